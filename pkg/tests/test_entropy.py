"""Partitions, entropies, and the inequality suites."""

import math
from fractions import Fraction

import numpy as np
import pytest

from acim1d.entropy import (
    C0_MANE, EntropyReport, build_Qq, change_of_variable_check, choose_offset,
    entropy_formula_residual, gibbs_check, itinerary_entropy, join,
    partition_entropy, partition_from_branches, qbin_label, refine,
    sete_inequality, verify_mane_bounds, verify_misiurewicz,
)
from acim1d.branches import monotone_branches
from acim1d.errors import InsufficientAtoms
from acim1d.maps import make_map, power_map
from acim1d.measures import (
    EmpiricalMeasure, build_seed_pool, empirical_measure, select_An,
)
from acim1d.reparam import choose_epsilon

LOG2 = math.log(2.0)


def _doubling_measure(seeds=20000, n=10, p=4):
    f = make_map("doubling")
    pool = build_seed_pool(f, p, n, seeds, np.random.default_rng(0))
    sel = select_An(pool, n, 0.5, 0.5, p)
    return f, empirical_measure(sel, M=2, m=1)


def test_c0_value():
    # c_0 = 4 (e (1 - e^{-1/2}))^{-1}
    assert math.isclose(C0_MANE, 4.0 / (math.e * (1 - math.exp(-0.5))),
                        rel_tol=1e-15)
    assert math.isclose(C0_MANE, 3.7395, rel_tol=1e-4)


def test_build_Qq_doubling_single_atom():
    part = build_Qq(make_map("doubling"), q=3, a=-0.2)
    # log|g'| = log 2 everywhere: one populated atom covering [0,1]
    assert part.n_atoms == 1
    assert abs(part.total_length() - 1.0) < 1e-9


def test_build_Qq_logistic_band_preimages():
    # oracle: log|4-8x| in ]0.5, 1.5] solves to two bands around 1/2
    f = make_map("logistic")
    part = build_Qq(f, q=1, a=-0.5)
    i = part.labels.index(("Q", 1))
    ivs = sorted(part.atoms[i])
    # the outer edges fall outside [0,1] (e^1.5 > 4) and clip at the domain
    lo1, hi1 = max(0.0, (4 - math.exp(1.5)) / 8), (4 - math.exp(0.5)) / 8
    lo2, hi2 = (4 + math.exp(0.5)) / 8, min(1.0, (4 + math.exp(1.5)) / 8)
    assert len(ivs) == 2
    np.testing.assert_allclose(ivs[0], (lo1, hi1), atol=1e-9)
    np.testing.assert_allclose(ivs[1], (lo2, hi2), atol=1e-9)


def test_Qq_atom_log_variation():
    # within an atom log|g'| varies by at most 1/q
    f = make_map("logistic")
    q = 4
    part = build_Qq(f, q=q, a=-0.1)
    rng = np.random.default_rng(1)
    xs = rng.uniform(0.001, 0.999, 10 ** 4)
    ids = part.locate_many(xs)
    u = f.log_abs_deriv(xs)
    for i in range(part.n_atoms):
        if part.labels[i] == ("tail",):
            continue
        sel = (ids == i) & np.isfinite(u)
        if np.sum(sel) > 1:
            assert np.max(u[sel]) - np.min(u[sel]) <= 1.0 / q + 1e-9


def test_qbin_chain_variation():
    # points sharing a depth-k Q-itinerary have |log(g^k)'| gaps <= k/q
    f = make_map("logistic")
    q, k = 4, 3
    labQ = qbin_label(f, q, -0.13)
    rng = np.random.default_rng(3)
    xs = rng.uniform(0.01, 0.99, 4000)
    codes = []
    u_sum = np.zeros(xs.shape)
    y = xs.copy()
    for _ in range(k):
        codes.append(labQ(y))
        u_sum += np.where(np.isfinite(f.log_abs_deriv(y)),
                          f.log_abs_deriv(y), -1e9)
        y = f.eval(y)
    code = np.stack(codes, 1)
    _, inv = np.unique(code, axis=0, return_inverse=True)
    for cid in np.unique(inv):
        grp = u_sum[inv == cid]
        grp = grp[grp > -1e8]
        if grp.size > 1:
            assert np.max(grp) - np.min(grp) <= k / q + 1e-9


def test_join_with_trivial_partition():
    f = make_map("doubling")
    J = partition_from_branches(monotone_branches(f))
    whole = type(J)(atoms=[[(0.0, 1.0)]], labels=[("all",)], name="triv")
    joined = join(J, whole)
    assert joined.n_atoms == J.n_atoms


def test_refine_doubling_eighths():
    f = make_map("doubling")
    J = partition_from_branches(monotone_branches(f))
    P3 = refine(J, f, 3)
    assert P3.n_atoms == 8
    lengths = sorted(sum(b - a for a, b in ivs) for ivs in P3.atoms)
    np.testing.assert_allclose(lengths, [0.125] * 8, atol=1e-9)


def test_refine_logistic_membership_oracle():
    f = make_map("logistic")
    bp = monotone_branches(f)
    J = partition_from_branches(bp)
    Q = build_Qq(f, q=1, a=-0.5)
    P = join(J, Q)
    P2 = refine(P, f, 2, bp)
    labJ = lambda xs: bp.locate_many(xs)
    labQ = qbin_label(f, 1, -0.5)
    rng = np.random.default_rng(7)
    xs = rng.uniform(0.001, 0.999, 10 ** 4)
    ids = P2.locate_many(xs)
    fx = f.eval(xs)
    direct = np.stack([labJ(xs), labQ(xs), labJ(fx), labQ(fx)], axis=1)
    # the two colorings must induce the same equivalence on the sample
    keep = ids >= 0
    _, inv_ids = np.unique(ids[keep], return_inverse=True)
    _, inv_dir = np.unique(direct[keep], axis=0, return_inverse=True)
    agree = 0
    seen = {}
    for a_, b_ in zip(inv_ids, inv_dir):
        if a_ in seen:
            agree += seen[a_] == b_
        else:
            seen[a_] = b_
            agree += 1
    assert agree / len(inv_ids) > 0.999


def test_partition_entropy_examples():
    two = EmpiricalMeasure(atoms=np.array([0.25, 0.75]),
                           weights=np.array([0.5, 0.5]), meta={})
    part = build_Qq(make_map("doubling"), 1, -0.5)  # single atom: H = 0
    whole = partition_from_branches(monotone_branches(make_map("doubling")))
    rep = partition_entropy(two, whole)
    assert math.isclose(rep.H_value, LOG2, rel_tol=1e-12)
    assert rep.check_invariants()
    dirac = EmpiricalMeasure(atoms=np.array([0.3]), weights=np.array([1.0]),
                             meta={})
    assert partition_entropy(dirac, whole).H_value == 0.0


def test_doubling_refined_entropy_matches_m_log2():
    f, mu = _doubling_measure()
    bp = monotone_branches(f)
    labJ = lambda xs: bp.locate_many(xs)
    mu_plain = EmpiricalMeasure(atoms=mu.atoms, weights=mu.weights, meta={})
    for m in (1, 3, 5):
        H = itinerary_entropy(mu_plain, [labJ], m, g=f)
        assert abs(H - m * LOG2) < 0.02


def test_itinerary_matches_geometric_refinement():
    f, mu = _doubling_measure(seeds=2000)
    bp = monotone_branches(f)
    J = partition_from_branches(bp)
    P3 = refine(J, f, 3)
    mu_plain = EmpiricalMeasure(atoms=mu.atoms, weights=mu.weights, meta={})
    H_geom = partition_entropy(mu_plain, P3).H_value
    H_code = itinerary_entropy(mu_plain, [lambda xs: bp.locate_many(xs)], 3,
                               g=f)
    assert abs(H_geom - H_code) < 1e-9


def test_misiurewicz_identity_case():
    lam = [Fraction(1, 4)] * 4
    rep = verify_misiurewicz(lam, [0, 1, 2, 3], [0, 1, 2, 3], [0], m=2)
    assert rep["ok"]


def test_misiurewicz_truncated_shift():
    # 8 states as binary words of length 3; T is the shift with a fixed
    # tail bit; R reads the leading symbol
    T = [(2 * s) % 8 for s in range(8)]
    R = [s >> 2 for s in range(8)]
    lam = [Fraction(1, 8)] * 8
    rep = verify_misiurewicz(lam, T, R, list(range(6)), m=2)
    assert rep["ok"] and rep["margin"] >= 0


def test_misiurewicz_randomized():
    rng = np.random.default_rng(12)
    for _ in range(120):
        N = int(rng.integers(2, 13))
        T = rng.integers(0, N, N).tolist()
        R = rng.integers(0, int(rng.integers(2, 5)), N).tolist()
        w = rng.integers(1, 6, N)
        tot = int(np.sum(w))
        lam = [Fraction(int(v), tot) for v in w]
        F = sorted(rng.choice(np.arange(0, 9),
                              size=int(rng.integers(1, 5)),
                              replace=False).tolist())
        m = int(rng.integers(1, 4))
        rep = verify_misiurewicz(lam, T, R, F, m)
        assert rep["ok"], (N, T, R, F, m, rep)


def test_sete_plugin():
    rep = sete_inequality({0: 0.5, 1: 0.5})
    assert math.isclose(rep["lhs"], LOG2, rel_tol=1e-12)
    assert rep["rhs"] >= rep["lhs"]
    assert rep["ok"]


def test_mane_bounds_doubling():
    f, mu = _doubling_measure(seeds=2000)
    rep = verify_mane_bounds(mu, f, q=3)
    assert rep["sete_ok"] and rep["hq_ok"]
    # H(Q_q) = 0 for constant log|g'|
    assert abs(rep["hq_lhs"]) < 1e-9
    assert rep["hq_rhs"] >= C0_MANE + 1.0


def test_mane_bounds_logistic_measure():
    f = make_map("logistic", smoothness_r=4.0)
    p = 6
    pool = build_seed_pool(f, p, 60, 800, np.random.default_rng(5))
    sel = select_An(pool, 60, 0.05, 0.45, p)
    mu = empirical_measure(sel, M=3, m=2)
    g = power_map(f, p)
    rep = verify_mane_bounds(mu, g, q=4)
    assert rep["sete_ok"] and rep["hq_ok"] and rep["branch_size_ok"]


def test_change_of_variable_doubling():
    f = make_map("doubling")
    rep = change_of_variable_check(f, 1, (0.0, 0.5), [(0.0, 1.0)],
                                   [(0.0, 1.0)])
    assert math.isclose(rep["lhs"], 0.5, abs_tol=1e-6)
    assert math.isclose(rep["rhs"], 0.5, rel_tol=1e-9)
    assert rep["ok"]


def test_change_of_variable_triple_squared():
    f = make_map("linear_circle", d=3.0)
    rep = change_of_variable_check(f, 2, (0.0, 1.0 / 9.0), [(0.0, 1.0)],
                                   [(0.4, 0.5)])
    assert rep["lhs"] <= 0.1 / 9.0 + 1e-6
    assert math.isclose(rep["rhs"], 0.1 / 9.0, rel_tol=1e-9)
    assert rep["ok"]


def test_change_of_variable_logistic_random_sets():
    f = make_map("logistic")
    rng = np.random.default_rng(2)
    for _ in range(5):
        pts = np.sort(rng.uniform(0.05, 0.95, 4))
        A = [(pts[0], pts[1])]
        B = [(pts[2], pts[3])]
        rep = change_of_variable_check(f, 1, (0.0, 0.5), A, B)
        assert rep["margin"] >= -2 * max(rep["err"], 1e-12)


def test_gibbs_empty_set_trivial():
    f = make_map("doubling")
    rep = gibbs_check(f, 0.3, [], q=4, eps=1 / 16, n=10, M=2, m=1,
                      beta=0.5, b=0.5, p=1, n_samples=100)
    assert rep["trivial"] and rep["ok"] and rep["rhs"] == 1.0


def test_gibbs_linear_closed_form():
    # 3^p x mod 1 with one full block of times: phi^E = #E p log 3 and
    # every cylinder has Lebesgue measure (3^p)^-#E-ish, far below rhs
    p = 2
    f = make_map("linear_circle", d=3.0)
    g = power_map(f, p)
    eps = choose_epsilon(g)
    n, M, m = 8, 2, 1
    E = list(range(1, n + 1))
    rep = gibbs_check(g, 0.377, E, q=4, eps=eps, n=n, M=M, m=m,
                      beta=0.3, b=0.9, p=p, n_samples=4000,
                      rng=np.random.default_rng(1))
    T = rep["T"]
    assert rep["phi_E"] == pytest.approx(len(T) * p * math.log(3.0), rel=1e-12)
    assert rep["ok"]
    # closed form: the T-cylinder of the linear map has measure 9^-#T;
    # it is below the bound with room to spare
    assert 9.0 ** -len(T) <= rep["rhs"]


def test_gibbs_logistic_power_instance():
    f = make_map("logistic", smoothness_r=4.0)
    p = 6
    g = power_map(f, p)
    eps = 2.0 ** -12  # representative certificate scale for g
    pool = build_seed_pool(f, p, 30, 50, np.random.default_rng(17))
    sel = select_An(pool, 30, 0.05, 0.45, p)
    s = sel.indices[0]
    x = float(pool.seeds[s])
    rep = gibbs_check(g, x, pool.times[s], q=4, eps=eps, n=30, M=3, m=2,
                      beta=0.05, b=0.45, p=p, n_samples=3000,
                      rng=np.random.default_rng(3))
    assert rep["ok"]
    for chk in rep.get("atoms", []):
        if not chk.get("skipped", True):
            assert chk["distortion_ok"]


def test_entropy_formula_doubling_verdict():
    f, mu = _doubling_measure(seeds=20000)
    rep = entropy_formula_residual(f, mu, q_list=[2], m_list=[1, 2, 3],
                                   p=4, tol=0.03)
    assert rep["verdict"] == "AC-consistent"
    assert abs(rep["h_f_est"] - LOG2) <= 0.03
    assert abs(rep["int_phi_f"] - LOG2) < 1e-9
    assert rep["exponent_positive"]


def test_entropy_formula_dirac_not_ac():
    f = make_map("linear_circle", d=3.0)
    # Dirac at the fixed point 1/2 (3/2 = 1/2 mod 1): h = 0, int = log 3
    atoms = np.full(10 ** 4, 0.5)
    mu = EmpiricalMeasure(atoms=atoms, weights=np.full(10 ** 4, 1e-4),
                          meta={"p": 1})
    rep = entropy_formula_residual(f, mu, q_list=[2], m_list=[1, 2], p=1,
                                   tol=0.05)
    assert rep["verdict"] == "not-AC"
    assert rep["residual_f"] == pytest.approx(-math.log(3.0), abs=1e-6)


def test_entropy_formula_needs_atoms():
    f = make_map("doubling")
    mu = EmpiricalMeasure(atoms=np.array([0.1]), weights=np.array([1.0]),
                          meta={})
    with pytest.raises(InsufficientAtoms):
        entropy_formula_residual(f, mu, [2], [1, 2], p=1)
