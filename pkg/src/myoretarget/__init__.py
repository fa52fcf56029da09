"""Musculature retargeting toolkit: anatomy core, muscle-induced ROMs,
retargeting optimizers, quasi-static dynamics, and a CLI/HTTP service."""

__version__ = "0.1.0"
