"""Map presets, orbits, Lyapunov data, norms, critical sets, compositions."""

import math

import numpy as np
import pytest

from acim1d.errors import UnresolvedCritical
from acim1d.maps import (
    CIRCLE, UNIT_INTERVAL, check_map_invariants, critical_set, estimate_norms,
    eval_orbit, lyapunov_ft, make_map, power_map,
)

LOG2 = math.log(2.0)


def test_orbit_doubling():
    f = make_map("doubling")
    rec = eval_orbit(f, 0.3, 3)
    np.testing.assert_allclose(rec.points, [0.3, 0.6, 0.2, 0.4], atol=1e-12)
    np.testing.assert_allclose(rec.log_derivs, [LOG2] * 3, rtol=0)
    np.testing.assert_allclose(rec.chain_log_deriv,
                               [0.0, LOG2, 2 * LOG2, 3 * LOG2], rtol=1e-15)


def test_orbit_identity_affine():
    f = make_map("affine", c0=0.0, c1=1.0)
    rec = eval_orbit(f, 0.42, 5)
    assert np.all(rec.log_derivs == 0.0)


def test_orbit_hits_critical_point():
    f = make_map("logistic")
    rec = eval_orbit(f, 0.5, 1)
    assert rec.log_derivs[0] == -np.inf


def test_lyapunov_doubling_and_identity():
    assert math.isclose(lyapunov_ft(make_map("doubling"), 0.123, 37), LOG2,
                        rel_tol=1e-12)
    assert lyapunov_ft(make_map("affine", c0=0.0, c1=1.0), 0.9, 11) == 0.0


def test_lyapunov_logistic_birkhoff():
    # Oracle: the a.e. exponent of 4x(1-x) is log 2 (tent-map conjugacy);
    # cross-checked with Birkhoff averages from 10 random seeds.
    f = make_map("logistic")
    n = 10 ** 5
    rng = np.random.default_rng(7)
    oracle = np.array([lyapunov_ft(f, x, n) for x in rng.uniform(0.05, 0.95, 10)])
    assert np.all(np.abs(oracle - LOG2) < 0.01)
    assert abs(lyapunov_ft(f, 0.1234, n) - LOG2) < 0.01


def test_norms_doubling():
    norms = estimate_norms(make_map("doubling"))
    assert math.isclose(norms.sup_abs_deriv[1], 2.0, rel_tol=1e-12)
    assert math.isclose(norms.R_estimate, LOG2, rel_tol=1e-12)
    assert norms.R_estimate <= math.log(norms.sup_abs_deriv[1]) + 1e-9


def test_norms_logistic():
    norms = estimate_norms(make_map("logistic"))
    assert math.isclose(norms.sup_abs_deriv[1], 4.0, rel_tol=1e-10)
    assert math.isclose(norms.sup_abs_deriv[2], 8.0, rel_tol=1e-12)
    assert math.isclose(norms.f_prime_r_minus_1, 8.0, rel_tol=1e-10)


def test_norms_tent_growth_rate():
    # |(f^n)'| = s^n off a finite set, so R_estimate is exactly log s.
    norms = estimate_norms(make_map("tent", s=1.7), n_used=8)
    assert abs(norms.R_estimate - math.log(1.7)) < 1e-9


def test_norm_monotonicity_in_n():
    # submultiplicativity: the depth-2k rate cannot exceed the depth-k rate
    for name in ("doubling", "tent"):
        f = make_map(name)
        r1 = estimate_norms(f, n_used=4).R_estimate
        r2 = estimate_norms(f, n_used=8).R_estimate
        assert r2 <= r1 + 1e-9


def test_critical_set_logistic():
    crits = critical_set(make_map("logistic"))
    assert len(crits) == 1
    assert abs(crits[0] - 0.5) < 1e-10


def test_critical_set_doubling_empty():
    assert critical_set(make_map("doubling")) == []


def test_critical_set_cubic():
    # Oracle: f'(x) = 1 - 3(x-1/3)^2 vanishes in [0,1] only at 1/3 + 1/sqrt(3).
    root = 1.0 / 3.0 + 1.0 / math.sqrt(3.0)
    crits = critical_set(make_map("cubic"), tol=1e-12)
    assert len(crits) == 1
    assert abs(crits[0] - root) < 1e-10


def test_power_map_doubling():
    g = power_map(make_map("doubling"), 3)
    xs = np.linspace(0, 1, 11)
    np.testing.assert_allclose(g.eval(xs), (8 * xs) % 1.0, atol=1e-12)
    np.testing.assert_allclose(g.deriv(1, xs), 8.0, rtol=0)


def test_power_map_affine_higher_derivs_zero():
    g = power_map(make_map("affine", c0=0.31, c1=1.0, domain=CIRCLE), 4)
    xs = np.array([0.0, 0.25, 0.8])
    np.testing.assert_allclose(g.deriv(2, xs), 0.0, atol=1e-14)


def test_power_map_logistic_chain_rule():
    f = make_map("logistic")
    g = power_map(f, 2)
    x = 0.2
    d = float(g.deriv(1, x))
    expected = float(f.deriv(1, f.eval(x)) * f.deriv(1, x))
    assert math.isclose(d, expected, rel_tol=1e-14)
    h = 1e-6
    fd = (g.eval(x + h) - g.eval(x - h)) / (2 * h)
    assert math.isclose(d, float(fd), rel_tol=1e-6)


def test_power_map_bit_for_bit():
    f = make_map("logistic")
    g = power_map(f, 5)
    xs = np.random.default_rng(3).uniform(0, 1, 50)
    manual = xs.copy()
    for _ in range(5):
        manual = f.eval(manual)
    assert np.all(g.eval(xs) == manual)


@pytest.mark.parametrize("name,params", [
    ("logistic", {}), ("cubic", {}), ("perturbed_circle", {"d": 2, "delta": 0.05}),
])
def test_chain_rule_against_finite_differences(name, params):
    f = make_map(name, **params)
    rng = np.random.default_rng(11)
    for x in rng.uniform(0.05, 0.95, 5):
        for n in (3, 7, 20):
            rec = eval_orbit(f, x, n)
            if np.min(rec.log_derivs) <= -10:
                continue
            h = 1e-8
            y0, y1 = x - h, x + h
            for _ in range(n):
                y0, y1 = f.eval(y0), f.eval(y1)
            if f.domain.is_circle:
                diff = ((y1 - y0 + 0.5) % 1.0) - 0.5
            else:
                diff = y1 - y0
            fd = abs(diff) / (2 * h)
            if fd <= 0:
                continue
            assert math.isclose(rec.chain_log_deriv[n], math.log(fd),
                                rel_tol=1e-3, abs_tol=1e-4)


def test_expression_map_matches_preset():
    f = make_map("expr", expression="mod1(2*x + 0.1*sin(2*pi*x))",
                 domain=CIRCLE, smoothness_r=3.0,
                 holder_const=0.1 * (2 * math.pi) ** 3)
    g = make_map("perturbed_circle", d=2, delta=0.1)
    xs = np.linspace(0.01, 0.99, 31)
    np.testing.assert_allclose(f.eval(xs), g.eval(xs), atol=1e-12)
    for k in (1, 2, 3):
        np.testing.assert_allclose(f.deriv(k, xs), g.deriv(k, xs),
                                   rtol=1e-10, atol=1e-9)


def test_expression_language_rejects_junk():
    with pytest.raises(ValueError):
        make_map("expr", expression="__import__('os')")
    with pytest.raises(ValueError):
        make_map("expr", expression="x + y")


def test_map_invariants_report():
    rep = check_map_invariants(make_map("logistic"))
    assert rep["maps_into_domain"]
    assert rep["fd_match_fraction"] > 0.95
    assert rep["holder_ok"]


def test_unresolved_critical_error_exists():
    # a wild oscillation packs sign changes below any fixed grid
    f = make_map("expr", expression="0.5 + 0.001*sin(500*pi*x)*x*(1-x)",
                 smoothness_r=2.0, holder_const=5e3)
    with pytest.raises(UnresolvedCritical):
        critical_set(f, grid_size=128)
