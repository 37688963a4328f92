"""Seed pools, A_n selection, empirical measures, density comparisons."""

import math

import numpy as np
import pytest

from acim1d.errors import EmptySelection
from acim1d.maps import CIRCLE, make_map, power_map
from acim1d.measures import (
    EmpiricalMeasure, build_seed_pool, compare_density, density_estimate,
    empirical_measure, invariance_defect, positive_exponent_proxy,
    ref_logistic_acip, ref_uniform, select_An, support_gap_from_critical,
)
from acim1d.maps import critical_set

LOG2 = math.log(2.0)


def _doubling_pool(n=10, seeds=2000, p=4, seed=0):
    f = make_map("doubling")
    rng = np.random.default_rng(seed)
    return build_seed_pool(f, p, n, seeds, rng), f


def test_pool_surrogate_times_full_for_strong_expansion():
    pool, _ = _doubling_pool()
    # 2^4 = 16 > 10: every time is a surrogate time
    assert all(E == list(range(1, pool.n_orbit + 1)) for E in pool.times)


def test_select_all_pass_doubling():
    pool, _ = _doubling_pool()
    sel = select_An(pool, 10, beta=0.5, b=0.5, p=4)
    assert sel.n_selected == pool.n_seeds
    assert sel.leb_proxy_ok


def test_select_empty_when_b_too_large():
    pool, _ = _doubling_pool()
    with pytest.raises(EmptySelection):
        select_An(pool, 10, beta=0.5, b=LOG2 + 0.1, p=4)


def test_single_seed_uniform_weights():
    pool, _ = _doubling_pool(seeds=1)
    sel = select_An(pool, 10, 0.5, 0.5, 4)
    mu = empirical_measure(sel, M=2, m=1)
    # raw times are {1..18}; below n=10 the clip gives [[1 ; 9[[, 8 atoms
    assert mu.n_atoms == 8
    np.testing.assert_allclose(mu.weights, 1.0 / 8.0)
    assert abs(mu.total_mass - 1.0) < 1e-12


def test_doubling_measure_close_to_lebesgue():
    pool, _ = _doubling_pool(seeds=20000)
    sel = select_An(pool, 10, 0.5, 0.5, 4)
    mu = empirical_measure(sel, M=2, m=1)
    est = density_estimate(mu, 100)
    l1 = compare_density(est, ref_uniform)
    assert l1 < 0.05


def test_nu_mass_is_beta_ratio():
    pool, _ = _doubling_pool(seeds=500)
    sel = select_An(pool, 10, 0.5, 0.5, 4)
    beta_inf = 1.0
    nu = empirical_measure(sel, M=2, m=2, normalization="nu",
                           beta_inf=beta_inf)
    assert math.isclose(nu.total_mass, nu.meta["beta_nMm"] / beta_inf,
                        rel_tol=1e-12)


def test_nu_atoms_grow_with_M():
    pool, _ = _doubling_pool(seeds=300, n=12)
    sel = select_An(pool, 12, 0.5, 0.5, 4)
    sizes = []
    for M in (1, 2, 4):
        nu = empirical_measure(sel, M=M, m=2, normalization="nu", beta_inf=1.0)
        sizes.append(nu.n_atoms)
    assert sizes[0] <= sizes[1] <= sizes[2]


def test_invariance_defect_full_interval_bound():
    # E_n^{M,1} = [[1, 9[[ per seed: #dE = 2, so the mu-defect bound is 2/8
    pool, f = _doubling_pool(seeds=4000)
    g = power_map(f, 4)
    sel = select_An(pool, 10, 0.5, 0.5, 4)
    mu = empirical_measure(sel, M=2, m=1)
    rep = invariance_defect(mu, g)
    assert math.isclose(rep["bound"], 2.0 / 8.0, rel_tol=1e-12)
    assert rep["ok"]


def test_invariance_defect_on_invariant_grid():
    # discretized Lebesgue on the circle is doubling-invariant up to the
    # grid resolution
    f = make_map("doubling")
    N = 2 ** 16
    xs = (np.arange(N) + 0.5) / N
    mu = EmpiricalMeasure(atoms=xs, weights=np.full(N, 1.0 / N), meta={})
    rep = invariance_defect(mu, f)
    assert rep["defect"] <= 1e-3


def test_empty_nu_measure_defect_zero():
    f = make_map("doubling")
    mu = EmpiricalMeasure(atoms=np.array([]), weights=np.array([]),
                          meta={"normalization": "nu"})
    rep = invariance_defect(mu, f)
    assert rep["defect"] == 0.0


def test_density_masses_sum_to_total():
    pool, _ = _doubling_pool(seeds=100)
    sel = select_An(pool, 10, 0.5, 0.5, 4)
    mu = empirical_measure(sel, M=2, m=1)
    est = density_estimate(mu, 50)
    assert abs(est.total_mass - mu.total_mass) < 1e-12


def test_dirac_vs_uniform_l1_is_near_two():
    mu = EmpiricalMeasure(atoms=np.full(10, 0.503), weights=np.full(10, 0.1),
                          meta={})
    est = density_estimate(mu, 200)
    l1 = compare_density(est, ref_uniform)
    assert l1 > 1.9  # singular measure: mass 1 in one bin vs spread-out ref


def test_logistic_reference_by_conjugacy_oracle():
    # oracle: y = sin^2(pi u / 2) with u uniform has the arcsine density;
    # its histogram should be L1-close to the closed form
    rng = np.random.default_rng(42)
    u = rng.uniform(0, 1, 200000)
    y = np.sin(math.pi * u / 2.0) ** 2
    mu = EmpiricalMeasure(atoms=y, weights=np.full(y.size, 1.0 / y.size),
                          meta={})
    est = density_estimate(mu, 200)
    assert compare_density(est, ref_logistic_acip) < 0.05


def test_support_gap_no_criticals():
    pool, f = _doubling_pool(seeds=50)
    sel = select_An(pool, 10, 0.5, 0.5, 4)
    mu = empirical_measure(sel, M=2, m=1)
    rep = support_gap_from_critical(mu, critical_set(f))
    assert rep["gap"] == float("inf")


def test_support_gap_logistic_floor():
    f = make_map("logistic", smoothness_r=4.0)
    p = 6
    rng = np.random.default_rng(3)
    pool = build_seed_pool(f, p, 40, 400, rng)
    sel = select_An(pool, 40, 0.05, 0.45, p)
    mu = empirical_measure(sel, M=2, m=1)
    g = power_map(f, p)
    crit = critical_set(g, grid_size=16384)
    rep = support_gap_from_critical(mu, crit, g=g, M=2)
    assert rep["gap"] > 0.0
    assert rep["deriv_floor_ok"]


def test_support_gap_artificial_atom_flagged():
    mu = EmpiricalMeasure(atoms=np.array([0.5]), weights=np.array([1.0]),
                          meta={})
    rep = support_gap_from_critical(mu, [0.5])
    assert rep["gap"] == 0.0 and rep["flagged_zero"]


def test_positive_exponent_proxy_doubling():
    pool, _ = _doubling_pool(seeds=100)
    sel = select_An(pool, 10, 0.5, 0.5, 4)
    mu = empirical_measure(sel, M=2, m=1)
    assert positive_exponent_proxy(mu) == 1.0
