"""Experiment runner: map -> times -> measure -> entropy -> verdict.

Subcommands: norms, branches, tree, times, measure, entropy, verify,
bound, pipeline.  Each stage emits CSV files into the output directory;
verdict.txt is computed purely from checks.csv + entropy.csv (the
decision rule lives in compute_verdict and reads the files back).
Exit codes: 0 success, 2 config error, 3 empty selection, 4 tree
budget exceeded.

Determinism: every random draw descends from the config rng_seed via
numpy SeedSequence spawning in a fixed stage order, and floats are
printed with 17 significant digits, so a rerun reproduces every CSV
byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .branches import count_branches_with_min_slope, monotone_branches
from .config import ExperimentConfig, load_config
from .entropy import (
    entropy_formula_residual, gibbs_check, verify_mane_bounds,
    verify_misiurewicz,
)
from .errors import (
    Acim1dError, ConfigError, EmptySelection, TreeBudgetExceeded,
)
from .maps import estimate_norms, make_map, power_map
from .measures import (
    build_seed_pool, compare_density, density_estimate, empirical_measure,
    invariance_defect, positive_exponent_proxy, ref_logistic_acip,
    ref_uniform, select_An, support_gap_from_critical,
)
from .maps import critical_set
from .probes import probe_functions
from .reparam import affine_reparam, choose_epsilon
from .times import density as time_density
from .times import trim, verify_enm
from .tree import ReparamTree, distortion_suite, verify_tree

__all__ = ["main", "run_pipeline", "bound_calculator", "bound_analytic",
           "bound_smooth", "basin_probe", "compute_verdict",
           "reparam_count_constant"]


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def parallel_map(fn, items, jobs=1):
    """Ordered map with an optional thread pool (worker count = jobs)."""
    if jobs <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# bound calculators
# ---------------------------------------------------------------------------


def bound_calculator(log_sup_fprime, log_fprime_r_minus_1, delta, C_r):
    """Count bound (log||f'||_inf / delta)^{(C_r log||f'||_{r-1}) / delta}."""
    for name, v in (("log_sup_fprime", log_sup_fprime),
                    ("log_fprime_r_minus_1", log_fprime_r_minus_1),
                    ("delta", delta), ("C_r", C_r)):
        if v <= 0:
            raise ValueError(f"{name} must be positive")
    return (log_sup_fprime / delta) ** (C_r * log_fprime_r_minus_1 / delta)


def bound_analytic(c_const, delta):
    """Analytic-map variant: C^{1/delta^4}."""
    return c_const ** (1.0 / delta ** 4)


def bound_smooth(norm_value, c_const, delta):
    """C-infinity variant: (||f'||_{C/delta})^{C/delta^3}."""
    return norm_value ** (c_const / delta ** 3)


def reparam_count_constant(r, c_universal=1.0):
    """The C r^{2r} form of the reparametrization counting constant."""
    return c_universal * r ** (2.0 * r)


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------


class PipelineState:
    def __init__(self, cfg, out_dir=None, rng_seed=None, jobs=None):
        self.cfg = cfg
        if rng_seed is not None:
            cfg.rng_seed = rng_seed
        if jobs is not None:
            cfg.jobs = jobs
        self.out = Path(out_dir) if out_dir is not None else cfg.output_dir
        self.out.mkdir(parents=True, exist_ok=True)
        seq = np.random.SeedSequence(cfg.rng_seed)
        (self.seq_pool, self.seq_offset, self.seq_gibbs, self.seq_probe,
         self.seq_misc) = seq.spawn(5)
        self.f = None
        self.g = None
        self.p = None
        self.norms_f = None
        self.norms_g = None
        self.eps = None
        self.tree = None
        self.pool = None
        self.selection = None
        self.mu = None
        self.checks = []

    def check(self, name, instance, lhs, rhs, margin, ok, ci=(float("nan"),) * 2):
        self.checks.append((name, instance, lhs, rhs, margin, ci[0], ci[1],
                            int(bool(ok))))


def stage_map(st):
    cfg = st.cfg
    params = dict(cfg.map_params)
    if cfg.preset in ("logistic", "perturbed_circle", "expr"):
        params.setdefault("smoothness_r", cfg.r)
    try:
        st.f = make_map(cfg.preset, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"map construction failed: {exc}") from exc
    st.norms_f = estimate_norms(st.f)
    st.p = cfg.resolve_p(math.log(max(st.norms_f.sup_abs_deriv[1], 1e-300)))
    st.g = power_map(st.f, st.p)
    st.norms_g = estimate_norms(st.g, grid_size=2 ** 14, refine_iters=2,
                                n_used=2)
    rows = [("f", k, v, st.norms_f.upper_hints.get(k, float("nan")))
            for k, v in st.norms_f.sup_abs_deriv.items()]
    rows += [("g", k, v, st.norms_g.upper_hints.get(k, float("nan")))
             for k, v in st.norms_g.sup_abs_deriv.items()]
    rows.append(("f", "R_estimate", st.norms_f.R_estimate, st.norms_f.n_used))
    rows.append(("g", "R_estimate", st.norms_g.R_estimate, st.norms_g.n_used))
    rows.append(("run", "p", st.p, ""))
    rng = np.random.default_rng(st.seq_misc)
    from .maps import lyapunov_ft
    lyap = float(np.mean([lyapunov_ft(st.f, x, 1000)
                          for x in rng.uniform(0.02, 0.98, 5)]))
    st.lyapunov = lyap
    rows.append(("f", "lyapunov_ft", lyap, 1000))
    _write_csv(st.out / "norms.csv", ("map", "quantity", "value", "aux"), rows)
    return st


def stage_branches(st):
    st.bp = monotone_branches(st.g, grid_size=2 ** 14)
    _write_csv(st.out / "branches.csv",
               ("map", "index", "a", "b", "sign", "sup_slope"),
               st.bp.to_rows())
    return st


def stage_tree(st):
    cfg = st.cfg
    st.eps = choose_epsilon(st.g, st.norms_g)
    if cfg.detector in ("tree", "both"):
        sig = affine_reparam(0.37, 0.9 * st.eps)
        st.tree = ReparamTree(st.f, st.p, sig, st.eps,
                              C_r=cfg.C_r, level_budget=cfg.tree_budget)
        st.tree.build(cfg.tree_levels)
        _write_csv(st.out / "tree.csv",
                   ("level", "parent_id", "rate", "k", "kprime", "vtype",
                    "image_left", "image_right", "margin_item3"),
                   st.tree.to_rows())
        ratios, dist_ok = distortion_suite(st.tree)
        st.check("tree_distortion", "all", float(np.max(ratios)), 1.5,
                 1.5 - float(np.max(ratios)), dist_ok)
    return st


def stage_times(st):
    cfg = st.cfg
    if st.eps is None:
        st.eps = choose_epsilon(st.g, st.norms_g)
    n_max = max(cfg.n_list)
    rng = np.random.default_rng(st.seq_pool)
    window = None
    if cfg.detector == "tree" and st.tree is not None:
        c, s = st.tree.sigma_c, abs(st.tree.sigma_s)
        window = (c - 0.9 * s, c + 0.9 * s)
    st.pool = build_seed_pool(
        st.f, st.p, n_max, cfg.seeds, rng, detector=cfg.detector,
        window=window, orbit_buffer=max(cfg.entropy_m),
        tree=st.tree)
    if "tree_agreement_rate" in st.pool.provenance:
        # reported, never asserted: surrogate-vs-tree coincidence is an
        # open question beyond linear maps
        rate = st.pool.provenance["tree_agreement_rate"]
        st.check("detector_agreement", "tree_vs_surrogate", rate,
                 float("nan"), float("nan"), True)
    rows = [(float(st.pool.seeds[s]),
             ";".join(str(t) for t in st.pool.times[s]))
            for s in range(st.pool.n_seeds)]
    _write_csv(st.out / "times.csv", ("x", "times"), rows)

    M_fin, m_fin = max(cfg.M_list), min(cfg.m_list)
    dens_rows = []
    for n in range(1, n_max + 1):
        raw = float(np.mean([time_density(E, n) for E in st.pool.times]))
        trimmed = float(np.mean([len(trim(E, n, M_fin, m_fin)) / n
                                 for E in st.pool.times]))
        dens_rows.append((n, raw, trimmed))
    _write_csv(st.out / "density.csv", ("n", "d_n_raw", "d_n_trimmed"),
               dens_rows)
    return st


def stage_measure(st):
    cfg = st.cfg
    n_fin = max(cfg.n_list)
    b = st.norms_f.R_estimate / cfg.r + cfg.delta
    st.b = b
    st.selection = select_An(st.pool, n_fin, cfg.beta, b, st.p)

    # beta_nMm over the (n, M, m) grid: the plateau at the largest (n, M)
    # and smallest m is the beta_inf estimate
    betas = {}
    for n in cfg.n_list:
        for M in cfg.M_list:
            for m in cfg.m_list:
                counts = [len(trim(st.pool.times[s], n, M, m))
                          for s in st.selection.indices]
                betas[(n, M, m)] = float(np.mean(counts)) / n
    st.beta_inf = betas[(n_fin, max(cfg.M_list), min(cfg.m_list))]
    _write_csv(st.out / "betas.csv", ("n", "M", "m", "beta_nMm"),
               [(n, M, m, v) for (n, M, m), v in sorted(betas.items())])

    st.mu = empirical_measure(st.selection, max(cfg.M_list), min(cfg.m_list),
                              normalization="mu")
    _write_csv(st.out / "measure.csv", ("point", "weight"), st.mu.to_rows())

    est = density_estimate(st.mu, cfg.bins)
    ref = {"uniform": ref_uniform, "logistic": ref_logistic_acip}.get(
        cfg.reference)
    _write_csv(st.out / "hist.csv",
               ("bin_left", "bin_right", "mass", "reference_mass"),
               est.to_rows(ref))
    if ref is not None:
        l1 = compare_density(est, ref)
        st.check("density_l1", cfg.reference, l1, cfg.tol_l1,
                 cfg.tol_l1 - l1, l1 <= cfg.tol_l1)
    st.density_est = est

    rep = invariance_defect(st.mu, st.g)
    st.check("invariance_defect", "mu", rep["defect"], rep["bound"],
             rep["bound"] - rep["defect"], rep["ok"])
    crit = critical_set(st.g, grid_size=2 ** 14)
    gap = support_gap_from_critical(st.mu, crit, g=st.g, M=max(cfg.M_list),
                                    log_sup_gprime=math.log(
                                        st.norms_g.sup_abs_deriv[1]))
    st.check("support_gap", "min_distance", gap["gap"], 0.0, gap["gap"],
             not gap["flagged_zero"])
    if "deriv_floor_margin" in gap:
        st.check("deriv_floor", f"M={max(cfg.M_list)}",
                 gap["deriv_floor_margin"], 0.0, gap["deriv_floor_margin"],
                 gap["deriv_floor_ok"])
    proxy = positive_exponent_proxy(st.mu)
    st.check("exponent_proxy", "later_time_expansion", proxy, 0.95,
             proxy - 0.95, proxy >= 0.95)

    mane = verify_mane_bounds(st.mu, st.g, max(cfg.q_list), bp=st.bp,
                              norms=st.norms_g,
                              rng=np.random.default_rng(st.seq_offset))
    st.check("mane_sete", f"q={max(cfg.q_list)}", mane["sete_lhs"],
             mane["sete_rhs"], mane["sete_margin"], mane["sete_ok"])
    st.check("mane_hq", f"q={max(cfg.q_list)}", mane["hq_lhs"],
             mane["hq_rhs"], mane["hq_margin"], mane["hq_ok"])
    st.check("mane_branch_size", "atoms", mane["branch_size_margin"], 0.0,
             mane["branch_size_margin"], mane["branch_size_ok"])

    if cfg.gibbs_instances > 0:
        _run_gibbs_checks(st)
    return st


def _run_gibbs_checks(st):
    cfg = st.cfg
    rng = np.random.default_rng(st.seq_gibbs)
    n_fin = max(cfg.n_list)
    picks = rng.choice(st.selection.indices,
                       size=min(cfg.gibbs_instances,
                                st.selection.n_selected), replace=False)

    def one(s):
        return gibbs_check(
            st.g, float(st.pool.seeds[s]), st.pool.times[s],
            q=max(cfg.q_list), eps=st.eps, n=n_fin, M=max(cfg.M_list),
            m=min(cfg.m_list), beta=cfg.beta, b=st.b, p=st.p, bp=st.bp,
            n_samples=cfg.gibbs_samples,
            rng=np.random.default_rng((st.cfg.rng_seed, int(s))),
            atom_checks=False)

    reps = parallel_map(one, picks, cfg.jobs)
    for s, rep in zip(picks, reps):
        st.check("gibbs", f"seed={int(s)}", rep["leb_hat"], rep["rhs"],
                 rep["rhs"] - rep["leb_hat"], rep["ok"], rep.get("ci",
                 (float("nan"), float("nan"))))


def stage_entropy(st):
    cfg = st.cfg
    rep = entropy_formula_residual(
        st.f, st.mu, cfg.q_list, cfg.entropy_m, p=st.p,
        tol=cfg.tol_residual, rng=np.random.default_rng(st.seq_offset),
        bp=st.bp)
    st.entropy_rep = rep
    rows = []
    for q, tab in rep["tables"].items():
        for m, H in zip(tab["m"], tab["H"]):
            rows.append(("H", q, m, H))
        rows.append(("slope", q, "", rep["slopes"][q]))
    rows.append(("summary", "h_g_est", "", rep["h_g_est"]))
    rows.append(("summary", "int_phi_g", "", rep["int_phi_g"]))
    rows.append(("summary", "h_f_est", "", rep["h_f_est"]))
    rows.append(("summary", "int_phi_f", "", rep["int_phi_f"]))
    rows.append(("summary", "residual_f", "", rep["residual_f"]))
    rows.append(("summary", "tol", "", rep["tol"]))
    rows.append(("summary", "residual_ok", "",
                 int(abs(rep["residual_f"]) <= rep["tol"])))
    rows.append(("summary", "exponent_ok", "", int(rep["exponent_positive"])))
    _write_csv(st.out / "entropy.csv", ("kind", "q", "m", "value"), rows)
    return st


def stage_checks(st):
    _write_csv(st.out / "checks.csv",
               ("check_name", "instance_id", "lhs", "rhs", "margin",
                "ci_low", "ci_high", "pass"), st.checks)
    verdict = compute_verdict(st.out / "entropy.csv", st.out / "checks.csv")
    (st.out / "verdict.txt").write_text(verdict + "\n")
    return st


def compute_verdict(entropy_csv, checks_csv):
    """Pure decision rule over the two emitted files.

    AC-consistent iff the entropy summary has residual_ok and
    exponent_ok, and every invariance/Mane check row passed.
    """
    residual_ok = exponent_ok = False
    with open(entropy_csv) as fh:
        for row in csv.DictReader(fh):
            if row["kind"] == "summary" and row["q"] == "residual_ok":
                residual_ok = row["value"] == "1"
            if row["kind"] == "summary" and row["q"] == "exponent_ok":
                exponent_ok = row["value"] == "1"
    required = {"invariance_defect", "mane_sete", "mane_hq"}
    req_ok = True
    with open(checks_csv) as fh:
        for row in csv.DictReader(fh):
            if row["check_name"] in required and row["pass"] != "1":
                req_ok = False
    return "AC-consistent" if (residual_ok and exponent_ok and req_ok) \
        else "not-AC"


def run_pipeline(cfg, out_dir=None, rng_seed=None, jobs=None):
    """All stages in order; returns the final state."""
    st = PipelineState(cfg, out_dir, rng_seed, jobs)
    for stage in (stage_map, stage_branches, stage_tree, stage_times,
                  stage_measure, stage_entropy, stage_checks):
        stage(st)
    return st


# ---------------------------------------------------------------------------
# basin probe
# ---------------------------------------------------------------------------


def basin_probe(st, n_probe=10 ** 4, n_seeds=100, tolerance=0.05):
    """Fraction of fresh above-threshold seeds whose orbit measure is
    probe-close to the stored measure.

    Sampled basin-coverage evidence only: seeds below the finite-time
    exponent threshold R/r + delta are excluded from the denominator.
    Binary-shift maps (doubling) lose a mantissa bit per step, so keep
    n_probe below ~45 there or read the caveat in the ledger.
    """
    from .maps import orbit_grid

    cfg = st.cfg
    rng = np.random.default_rng(st.seq_probe)
    seeds = rng.uniform(0.0, 1.0, n_seeds)
    thresh = st.norms_f.R_estimate / cfg.r + cfg.delta
    probes = probe_functions()
    mu_vals = np.array([float(np.sum(st.mu.weights * psi(st.mu.atoms)))
                        for psi in probes])
    pts, lds = orbit_grid(st.f, seeds, n_probe)
    rates = np.sum(np.where(np.isfinite(lds), lds, -np.inf), axis=0) / n_probe
    used_mask = rates > thresh
    used = int(np.sum(used_mask))
    if used == 0:
        return {"n_used": 0, "n_close": 0, "fraction": float("nan"),
                "threshold": thresh, "tolerance": tolerance}
    orb = pts[:-1, used_mask]
    dists = np.zeros(used)
    for psi, mv in zip(probes, mu_vals):
        dists = np.maximum(dists, np.abs(np.mean(psi(orb), axis=0) - mv))
    close = int(np.sum(dists <= tolerance))
    return {"n_used": used, "n_close": close, "fraction": close / used,
            "threshold": thresh, "tolerance": tolerance}


# ---------------------------------------------------------------------------
# the verify suite (inequality batteries independent of a pipeline run)
# ---------------------------------------------------------------------------


def run_verify(out_dir, rng_seed=0, quick=False):
    """Combinatorics, Misiurewicz, and tree-distortion batteries."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(rng_seed)
    rows = []

    # E_n^{M,m} calculus: exhaustive small-universe battery
    from .times import clip, clip_bruteforce, trim_bruteforce
    nbits = 8 if quick else 12
    n = nbits
    mism = 0
    viol = 0
    total = 0
    for mask in range(1 << nbits):
        E = {i for i in range(nbits) if mask >> i & 1}
        for M in range(0, 5):
            if clip(E, n, M) != clip_bruteforce(E, n, M):
                mism += 1
            for m in range(1, 5):
                if trim(E, n, M, m) != trim_bruteforce(E, n, M, m):
                    mism += 1
            for Mp in range(M, 5):
                for m in range(1, 5):
                    total += 1
                    rep = verify_enm(E, n, M, Mp, m)
                    if not (rep["i_boundary_subset"] and rep["iii_ok"]
                            and rep["iv_ok"] and rep["monotone_in_M"]):
                        viol += 1
    rows.append(("enm_oracle_equivalence", f"2^{nbits} sets", mism, 0,
                 -mism, float("nan"), float("nan"), int(mism == 0)))
    rows.append(("enm_lemma", f"{total} instances", viol, 0, -viol,
                 float("nan"), float("nan"), int(viol == 0)))

    # Misiurewicz battery
    from fractions import Fraction
    bad = 0
    count = 200 if quick else 1000
    for _ in range(count):
        N = int(rng.integers(2, 13))
        T = rng.integers(0, N, N).tolist()
        R = rng.integers(0, int(rng.integers(2, 5)), N).tolist()
        w = rng.integers(1, 6, N)
        lam = [Fraction(int(v), int(np.sum(w))) for v in w]
        F = sorted(rng.choice(np.arange(0, 9),
                              size=int(rng.integers(1, 5)),
                              replace=False).tolist())
        m = int(rng.integers(1, 4))
        if not verify_misiurewicz(lam, T, R, F, m)["ok"]:
            bad += 1
    rows.append(("misiurewicz_random", f"{count} instances", bad, 0, -bad,
                 float("nan"), float("nan"), int(bad == 0)))

    # tree distortion battery on a strongly expanding linear map
    f = make_map("doubling")
    p = 7
    eps = choose_epsilon(power_map(f, p))
    tree = ReparamTree(f, p, affine_reparam(0.37, 0.9 * eps), eps)
    tree.build(1 if quick else 2)
    ratios, ok = distortion_suite(tree)
    rows.append(("tree_distortion", f"{ratios.size} vertices",
                 float(np.max(ratios)), 1.5, 1.5 - float(np.max(ratios)),
                 float("nan"), float("nan"), int(ok)))

    _write_csv(out / "checks.csv",
               ("check_name", "instance_id", "lhs", "rhs", "margin",
                "ci_low", "ci_high", "pass"), rows)
    return all(r[-1] == 1 for r in rows)


# ---------------------------------------------------------------------------
# argument parsing / entry point
# ---------------------------------------------------------------------------


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="acim1d",
        description="Numerical ACIM detection for one-dimensional maps")
    ap.add_argument("--config", type=Path, help="experiment config file")
    ap.add_argument("--jobs", type=int, default=1, help="worker cap")
    ap.add_argument("--rng-seed", type=int, default=None,
                    help="override the config rng seed")
    ap.add_argument("--out", type=Path, default=None,
                    help="override the output directory")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("norms", "branches", "tree", "times", "measure", "entropy",
                 "pipeline"):
        sub.add_parser(name)
    v = sub.add_parser("verify")
    v.add_argument("--quick", action="store_true")
    bp = sub.add_parser("bound")
    bp.add_argument("--log-sup", type=float, required=True)
    bp.add_argument("--log-r1", type=float, default=None)
    bp.add_argument("--delta", type=float, required=True)
    bp.add_argument("--c-r", type=float, default=1000.0)
    bp.add_argument("--variant", choices=("main", "analytic", "smooth"),
                    default="main")
    bp.add_argument("--norm-value", type=float, default=None,
                    help="||f'||_{C/delta} for the smooth variant")
    return ap


_STAGE_CHAINS = {
    "norms": (stage_map,),
    "branches": (stage_map, stage_branches),
    "tree": (stage_map, stage_branches, stage_tree),
    "times": (stage_map, stage_branches, stage_tree, stage_times),
    "measure": (stage_map, stage_branches, stage_tree, stage_times,
                stage_measure),
    "entropy": (stage_map, stage_branches, stage_tree, stage_times,
                stage_measure, stage_entropy, stage_checks),
    "pipeline": (stage_map, stage_branches, stage_tree, stage_times,
                 stage_measure, stage_entropy, stage_checks),
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "bound":
            if args.variant == "main":
                if args.log_r1 is None:
                    raise ConfigError("--log-r1 required for the main bound")
                val = bound_calculator(args.log_sup, args.log_r1, args.delta,
                                       args.c_r)
            elif args.variant == "analytic":
                val = bound_analytic(args.c_r, args.delta)
            else:
                if args.norm_value is None:
                    raise ConfigError("--norm-value required for smooth")
                val = bound_smooth(args.norm_value, args.c_r, args.delta)
            print(_fmt(val))
            return 0
        if args.command == "verify":
            out = args.out or Path("out")
            ok = run_verify(out, rng_seed=args.rng_seed or 0,
                            quick=args.quick)
            print(f"verify: {'all pass' if ok else 'FAILURES'} "
                  f"(checks.csv in {out})")
            return 0 if ok else 1
        if args.config is None:
            raise ConfigError(f"{args.command} requires --config")
        cfg = load_config(args.config)
        st = PipelineState(cfg, args.out, args.rng_seed, args.jobs)
        for stage in _STAGE_CHAINS[args.command]:
            stage(st)
        if args.command in ("pipeline", "entropy"):
            verdict = (st.out / "verdict.txt").read_text().strip()
            print(f"verdict: {verdict}")
        print(f"wrote outputs to {st.out}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EmptySelection as exc:
        print(f"empty selection: {exc}", file=sys.stderr)
        return 3
    except TreeBudgetExceeded as exc:
        print(f"tree budget exceeded: {exc}", file=sys.stderr)
        return 4
    except Acim1dError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
