import numpy as np
import pytest

from myoretarget.anatomy import (CurveParams, CurveSet, MusculotendonUnit,
                                 Waypoint, fiber_equilibrium,
                                 fiber_equilibrium_batch,
                                 max_musculotendon_length, muscle_stretch_limit)
from myoretarget.anatomy.equilibrium import split_for_limit


def unit(l_m0=0.1, rho=2.0, pennation=0.0, f_max=500.0, k_m=1.6, k_t=1.03):
    return MusculotendonUnit(
        "m", waypoints=(Waypoint.on_bone("a", [0, 0, 0]),
                        Waypoint.on_bone("a", [0.1, 0, 0])),
        l_m0=l_m0, l_t0=rho * l_m0, f_max=f_max, pennation=pennation,
        k_m=k_m, k_t=k_t)


CURVES = CurveSet.default()


def oracle_bisection(m, curves, l_mt, a, iters=100):
    # independent plain bisection on the scalar force balance
    cos_p = np.cos(m.pennation)

    def residual(l_m):
        fiber = (a * curves.active_fl(l_m / m.l_m0)
                 + curves.passive_fl(l_m / m.l_m0)) * cos_p
        return fiber - curves.tendon_fl((l_mt - l_m * cos_p) / m.l_t0)

    lo, hi = 1e-9 * m.l_m0, l_mt / cos_p
    if residual(lo) > 0:
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if residual(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_rigid_tendon_limit():
    m = unit(pennation=0.2)
    rigid = CURVES.as_rigid_tendon()
    res = fiber_equilibrium(m, rigid, 0.35, 0.7)
    assert res.l_m == pytest.approx((0.35 - m.l_t0) / np.cos(0.2))
    assert res.l_t == m.l_t0


def test_slack_equilibrium_at_rest_lengths():
    m = unit(pennation=0.15)
    l_mt = m.l_m0 * np.cos(0.15) + m.l_t0
    res = fiber_equilibrium(m, CURVES, l_mt, 0.0)
    assert res.tension == 0.0
    assert res.l_m / m.l_m0 == pytest.approx(1.0, abs=1e-9)
    assert res.l_t / m.l_t0 == pytest.approx(1.0, abs=1e-9)


def test_short_length_clamps_to_slack():
    m = unit()
    res = fiber_equilibrium(m, CURVES, 0.5 * m.l_t0, 0.8)
    assert res.slack
    assert res.tension == 0.0


def test_equilibrium_matches_bisection_oracle():
    rng = np.random.default_rng(21)
    m = unit(pennation=0.1)
    rest = m.l_m0 * np.cos(0.1) + m.l_t0
    for _ in range(300):
        l_mt = rng.uniform(0.8, 1.7) * rest
        a = rng.uniform(0.0, 1.0)
        res = fiber_equilibrium(m, CURVES, l_mt, a)
        assert res.converged
        assert res.residual <= 1e-8
        expected = oracle_bisection(m, CURVES, l_mt, a)
        if expected is not None and not res.slack:
            assert res.l_m == pytest.approx(expected, abs=1e-6)
        # the split must reconstruct the total length
        assert res.l_m * np.cos(0.1) + res.l_t == pytest.approx(l_mt, abs=1e-12)


def test_batch_matches_scalar():
    rng = np.random.default_rng(22)
    m = unit()
    rest = m.l_m0 + m.l_t0
    l_mt = rng.uniform(0.7, 1.8, size=64) * rest
    a = rng.uniform(0, 1, size=64)
    batch = fiber_equilibrium_batch(m, CURVES, l_mt, a)
    for i in range(64):
        res = fiber_equilibrium(m, CURVES, float(l_mt[i]), float(a[i]))
        assert batch[i, 0] == pytest.approx(res.l_m, abs=1e-9)
        assert batch[i, 2] == pytest.approx(res.tension, rel=1e-6, abs=1e-6)


def test_tension_non_decreasing_in_activation():
    m = unit()
    rest = m.l_m0 + m.l_t0
    for l_mt in (0.95 * rest, 1.05 * rest, 1.2 * rest):
        tensions = [fiber_equilibrium(m, CURVES, l_mt, a).tension
                    for a in np.linspace(0, 1, 11)]
        assert all(b >= a - 1e-9 for a, b in zip(tensions, tensions[1:]))


def test_max_length_arithmetic():
    m = unit(l_m0=0.1, rho=2.0)
    assert max_musculotendon_length(m) == pytest.approx(0.366)


def test_max_length_tendonless():
    m = unit(l_m0=0.1, rho=0.0)
    assert max_musculotendon_length(m) == pytest.approx(0.16)


def test_max_length_unit_ratios():
    m = unit(l_m0=0.1, rho=2.0, k_m=1.0 + 1e-12, k_t=1.0)
    assert max_musculotendon_length(m) == pytest.approx(0.3)


def test_stretch_limit_matches_eq4_at_defaults():
    m = unit(l_m0=0.1, rho=2.0)
    assert muscle_stretch_limit(m, CURVES) == pytest.approx(
        max_musculotendon_length(m), abs=1e-9)


def test_split_for_limit_inverts_stretch_limit():
    m = unit()
    for rho in (0.0, 0.5, 2.0, 3.5):
        l_m0, l_t0 = split_for_limit(m, CURVES, 0.42, rho)
        probe = m.with_lengths(l_m0, l_t0)
        assert muscle_stretch_limit(probe, CURVES) == pytest.approx(0.42,
                                                                    abs=1e-12)
        if rho > 0:
            assert l_t0 / l_m0 == pytest.approx(rho, abs=1e-12)


def test_curve_invariants_sampled():
    c = CURVES
    samples = np.linspace(0.4, 1.8, 57)
    passive = np.asarray(c.passive_fl(samples))
    assert abs(float(np.asarray(c.passive_fl(1.0)))) < 1e-6
    upper = samples >= 1.0
    assert np.all(np.diff(passive[upper]) >= -1e-12)
    tendon = np.asarray(c.tendon_fl(samples))
    assert np.all(tendon[samples <= 1.0] == 0.0)
    above = samples > 1.0
    assert np.all(np.diff(tendon[above]) > 0)
    active = np.asarray(c.active_fl(samples))
    assert np.argmax(active) == np.argmin(np.abs(samples - 1.0))
    # the passive curve reaches its configured limit force at k_m
    assert float(np.asarray(c.passive_fl(1.6))) == pytest.approx(1.0)
    assert float(np.asarray(c.tendon_fl(1.03))) == pytest.approx(1.0)


def test_tendon_inverse_consistency():
    c = CURVES
    forces = np.linspace(1e-4, 1.4, 40)
    lengths = np.asarray(c.tendon_fl_inv(forces))
    np.testing.assert_allclose(np.asarray(c.tendon_fl(lengths)), forces,
                               atol=1e-10)
