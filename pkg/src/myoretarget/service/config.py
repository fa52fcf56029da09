"""TOML-like key=value configuration files.

Supports `[section]` headers, `#` comments, numbers, booleans, quoted
strings, and comma lists of numbers. Used for optimizer constants and
skeleton parameter files.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..anatomy import ModelError
from ..retarget import BoneParams, SkeletonParams, TrunkParams


class ConfigError(ModelError):
    pass


def _parse_value(raw: str, line: int):
    raw = raw.strip()
    if not raw:
        raise ConfigError(f"line {line}: empty value")
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if "," in raw:
        return [_parse_value(part, line) for part in raw.split(",")]
    try:
        if any(c in raw for c in ".eE") and not raw.lstrip("+-").isdigit():
            return float(raw)
        return int(raw)
    except ValueError:
        return raw  # bare string


def parse_config(text: str) -> dict[str, dict]:
    """Sections mapped to key/value dicts; top-level keys land in ''. """
    out: dict[str, dict] = {"": {}}
    section = ""
    for ln, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            out.setdefault(section, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {ln}: expected key = value")
        key, _, raw = stripped.partition("=")
        out[section][key.strip()] = _parse_value(raw, ln)
    return out


def load_config(path: str | Path) -> dict[str, dict]:
    return parse_config(Path(path).read_text())


def skeleton_params_from_config(cfg: dict[str, dict]) -> SkeletonParams:
    """Build skeleton parameters from a parsed config.

    Sections: [trunk] elongate/expand/bend_deg/mass; [bone.<name>]
    elongate/torsion_deg/proximal_head_scale/distal_head_scale/mass;
    [global] scale/symmetric/hands_scale/feet_scale.
    """
    bones: dict[str, BoneParams] = {}
    trunk = TrunkParams()
    hands = feet = 1.0
    global_scale = 1.0
    symmetric = True
    for section, values in cfg.items():
        if section == "trunk":
            trunk = TrunkParams(
                elongate=float(values.get("elongate", 1.0)),
                expand=float(values.get("expand", 1.0)),
                bend=float(np.radians(values.get("bend_deg", 0.0))),
                mass_scale=float(values.get("mass", 1.0)))
        elif section.startswith("bone."):
            name = section[len("bone."):]
            bones[name] = BoneParams(
                elongate=float(values.get("elongate", 1.0)),
                torsion=float(np.radians(values.get("torsion_deg", 0.0))),
                proximal_head_scale=float(values.get("proximal_head_scale", 1.0)),
                distal_head_scale=float(values.get("distal_head_scale", 1.0)),
                mass_scale=float(values.get("mass", 1.0)))
        elif section == "global":
            global_scale = float(values.get("scale", 1.0))
            symmetric = bool(values.get("symmetric", True))
            hands = float(values.get("hands_scale", 1.0))
            feet = float(values.get("feet_scale", 1.0))
        elif section and section != "":
            raise ConfigError(f"unknown section [{section}]")
    return SkeletonParams(bones=bones, trunk=trunk, hands_scale=hands,
                          feet_scale=feet, global_scale=global_scale,
                          symmetric=symmetric)
