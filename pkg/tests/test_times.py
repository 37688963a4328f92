"""Time-set calculus: oracle equivalence, lemma checks, detectors."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from acim1d.maps import eval_orbit, make_map, power_map
from acim1d.times import (
    boundary_set, clip, clip_bruteforce, components, density,
    hyperbolic_surrogate_times, surrogate_times_from_logs, trim,
    trim_bruteforce, verify_enm, verify_hyperbolic,
)

time_sets = st.frozensets(st.integers(min_value=0, max_value=11), max_size=12)


def test_clip_examples():
    assert clip({0, 2, 3, 7}, 8, 2) == {0, 1, 2}
    assert clip(set(), 10, 3) == set()
    assert clip(set(range(10)), 10, 1) == set(range(9))


def test_trim_examples():
    assert trim({0, 3, 5, 9}, 10, 3, 2) == {0, 1, 2}
    # m = 1 keeps the clip untouched (L = 0 is admissible)
    for E in ({0, 1, 4, 5, 6}, {2, 3, 9}, set(range(8))):
        assert trim(E, 10, 2, 1) == clip(E, 10, 2)
    # degenerate short component is dropped
    assert trim({0, 1}, 2, 1, 3) == set()


def test_boundary_examples():
    assert boundary_set({0, 1, 2}) == {0, 3}
    assert boundary_set(set()) == set()
    assert boundary_set({0, 2, 4}) == {0, 1, 2, 3, 4, 5}


@given(time_sets, st.integers(0, 4), st.integers(1, 4))
@settings(max_examples=300)
def test_clip_trim_match_bruteforce(E, M, m):
    n = 12
    assert clip(E, n, M) == clip_bruteforce(E, n, M)
    assert trim(E, n, M, m) == trim_bruteforce(E, n, M, m)


@given(time_sets, st.integers(0, 4), st.integers(0, 4), st.integers(1, 4))
@settings(max_examples=300)
def test_enm_lemma_random(E, M, Mextra, m):
    rep = verify_enm(E, 12, M, M + Mextra, m)
    assert rep["i_boundary_subset"]
    assert rep["iii_ok"]
    assert rep["iv_ok"]
    assert rep["monotone_in_M"]


def test_enm_empty_and_full():
    rep = verify_enm(set(), 12, 2, 3, 1)
    assert rep["i_boundary_subset"] and rep["iii_ok"] and rep["iv_ok"]
    n = 12
    E = set(range(n))
    rep = verify_enm(E, n, 1, 1, 1)
    assert rep["iii_ok"]
    d = boundary_set(trim(E, n, 1, 1))
    assert d == {0, n - 1}  # single component [[0, n-1[[


@given(time_sets, st.integers(1, 5), st.integers(1, 3))
@settings(max_examples=200)
def test_counting_bound_for_clip(E, M, m):
    # corrected form of the "clipping vs density" property: the clip keeps
    # every element that has an M-neighbor, up to one loss per component
    n = 12
    S = clip(E, n, M)
    iso = {e for e in E if 0 <= e < n
           and not any(0 < abs(e - f) <= M for f in E if f < n)}
    kept = {e for e in E if 0 <= e < n - M}
    assert len(S) >= len(kept) - len(components(S)) - len(iso)


def test_surrogate_uniform_expansion():
    # doubling^4 has slope 16 > 10, so every time qualifies
    g = power_map(make_map("doubling"), 4)
    E = hyperbolic_surrogate_times(g, 0.137, 30)
    assert list(E) == list(range(1, 31))


def test_surrogate_slope_one_empty():
    from acim1d.maps import CIRCLE

    g = make_map("affine", c0=0.2, c1=1.0, domain=CIRCLE)  # rigid rotation
    assert len(hyperbolic_surrogate_times(g, 0.3, 25)) == 0


def test_surrogate_matches_direct_recomputation():
    # oracle: O(n^2) per-definition check on exact prefix sums
    g = power_map(make_map("logistic"), 6)
    rec = eval_orbit(g, 0.137, 60)
    fast = set(surrogate_times_from_logs(rec.log_derivs, 10.0))
    S = rec.chain_log_deriv
    logc = math.log(10.0)
    slow = set()
    for l in range(1, 61):
        if np.isfinite(S[l]) and all(
                S[l] - S[k] >= (l - k) * logc - 1e-12 for k in range(l)):
            slow.add(l)
    assert fast == slow


def test_verify_hyperbolic_surrogate_by_construction():
    g = power_map(make_map("doubling"), 4)
    E = hyperbolic_surrogate_times(g, 0.271, 24)
    rep = verify_hyperbolic(g, 0.271, E, 24, 3, 2)
    assert rep["i_ok"] and rep["ii_ok"] and rep["iii_ok"]
    assert rep["i_margin"] >= -1e-9


def test_verify_hyperbolic_vacuous_on_empty():
    g = make_map("doubling")
    rep = verify_hyperbolic(g, 0.1, (), 10, 2, 1)
    assert rep["i_ok"] and rep["ii_ok"] and rep["iii_ok"]
    assert rep["i_margin"] == np.inf


def test_verify_hyperbolic_exact_linear():
    # 3^3 = 27 > 10: all inequalities hold with exact linear arithmetic
    g = power_map(make_map("linear_circle", d=3.0), 3)
    E = hyperbolic_surrogate_times(g, 0.4321, 20)
    assert len(E) == 20
    rep = verify_hyperbolic(g, 0.4321, E, 20, 2, 2)
    expected = math.log(27.0) - math.log(10.0)
    assert abs(rep["i_margin"] - expected) < 1e-9
    assert rep["iii_ok"]


def test_density_helper():
    assert density({0, 1, 2}, 6) == 0.5
    assert density(set(), 5) == 0.0
