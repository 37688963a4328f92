"""Empirical measures carried by orbit segments at selected times.

The pipeline draws seeds x, records their g-orbits and raw time sets
E(x), filters by density and finite-time expansion (the A_n selection),
and averages Dirac masses at the orbit points whose times survive the
clip/trim calculus:

   mu_n^{M,m}  =  sum_x sum_{i in E_n^{M,m}(x)} delta_{g^i x}
                  / sum_x #E_n^{M,m}(x)
   nu_n^{M,m}  =  (1 / (n beta_inf)) * mean_x sum_i delta_{g^i x}

with the uniform measure over retained seeds standing in for the
normalized Lebesgue measure on A_n.  Atom provenance (seed, time) is
kept so entropy estimators can read forward itineraries off the pool
orbits instead of re-iterating the map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySelection, InsufficientAtoms
from .maps import estimate_norms, power_map
from .probes import probe_functions
from .times import boundary_set, clip, surrogate_times_from_logs, trim

__all__ = [
    "SamplePool", "Selection", "EmpiricalMeasure", "DensityEstimate",
    "build_seed_pool", "select_An", "empirical_measure", "invariance_defect",
    "density_estimate", "compare_density", "support_gap_from_critical",
    "ref_uniform", "ref_logistic_acip",
]


@dataclass
class SamplePool:
    """Seed orbits under g with raw detector time sets."""

    seeds: np.ndarray          # (S,)
    points: np.ndarray         # (n_orbit+1, S)
    log_derivs: np.ndarray     # (n_orbit, S)
    chain: np.ndarray          # (n_orbit+1, S) prefix sums of log|g'|
    times: list                # raw E(x) per seed (sorted int lists)
    provenance: dict
    n_orbit: int

    @property
    def n_seeds(self):
        return self.seeds.shape[0]


def build_seed_pool(f, p, n, n_seeds, rng, detector="surrogate",
                    c_expansion=10.0, window=None, orbit_buffer=8,
                    tree=None):
    """Draw seeds, record g = f^p orbits, and attach detector time sets.

    window restricts seeds to an interval (the sigma image for the tree
    detector); orbit_buffer extends orbits beyond n so entropy
    itineraries of depth up to orbit_buffer stay inside the record.
    """
    g = power_map(f, p)
    lo, hi = window if window is not None else (0.0, 1.0)
    seeds = rng.uniform(lo, hi, n_seeds)
    n_orbit = n + orbit_buffer
    pts = np.empty((n_orbit + 1, n_seeds))
    pts[0] = g.domain.reduce(seeds)
    for k in range(n_orbit):
        pts[k + 1] = g.eval(pts[k])
    lds = g.log_abs_deriv(pts[:-1].reshape(-1)).reshape(n_orbit, n_seeds)
    chain = np.vstack([np.zeros(n_seeds), np.cumsum(lds, axis=0)])

    if detector == "surrogate":
        times = _surrogate_bulk(lds, c_expansion)
    elif detector == "tree":
        if tree is None:
            raise ValueError("tree detector requires a built ReparamTree")
        times = [tree.walk_geometric_times(float(x), n_orbit) for x in seeds]
    elif detector == "both":
        if tree is None:
            raise ValueError("tree detector requires a built ReparamTree")
        sur = _surrogate_bulk(lds, c_expansion)
        tr = [tree.walk_geometric_times(float(x), n_orbit) for x in seeds]
        agree = [len(set(a) & set(b)) / max(1, len(set(a) | set(b)))
                 for a, b in zip(sur, tr)]
        times = sur
        prov_agreement = float(np.mean(agree)) if agree else 1.0
    else:
        raise ValueError(f"unknown detector {detector!r}")

    prov = {"map": f.name, "p": p, "g": g.name, "detector": detector,
            "window": (lo, hi), "c_expansion": c_expansion}
    if detector == "both":
        prov["tree_agreement_rate"] = prov_agreement
    return SamplePool(seeds=seeds, points=pts, log_derivs=lds, chain=chain,
                      times=times, provenance=prov, n_orbit=n_orbit)


def _surrogate_bulk(lds, c_expansion):
    """Vectorized running-max surrogate detector over all seed columns."""
    n, S = lds.shape
    logc = float(np.log(c_expansion))
    prefix = np.vstack([np.zeros(S), np.cumsum(lds, axis=0)])
    t = prefix - logc * np.arange(n + 1)[:, None]
    run_max = np.maximum.accumulate(t, axis=0)
    ok = np.isfinite(t[1:]) & (t[1:] >= run_max[:-1] - 1e-12)
    return [list(np.nonzero(ok[:, s])[0] + 1) for s in range(S)]


@dataclass
class Selection:
    """Indices of pool seeds surviving the A_n filter, plus diagnostics."""

    pool: SamplePool
    indices: np.ndarray
    n: int
    beta: float
    b: float
    p: int
    fraction: float
    leb_proxy_ok: bool

    @property
    def n_selected(self):
        return self.indices.shape[0]


def select_An(pool, n, beta, b, p):
    """Keep seeds with d_n(E(x)) > beta and |(g^n)'(x)| >= e^{n p b}.

    The Lebesgue proxy flag reports whether the retained fraction meets
    the 1/n^2 threshold that the limit construction asks of Leb(A_n).
    """
    if n > pool.n_orbit:
        raise ValueError("selection horizon exceeds recorded orbits")
    dens = np.array([sum(1 for e in E if e < n) / n for E in pool.times])
    expand = pool.chain[n] >= n * p * b - 1e-12
    mask = (dens > beta) & expand
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        raise EmptySelection(
            f"no seed passed (beta={beta}, b={b}, n={n}); "
            f"max density {dens.max():.3f}, "
            f"max rate {np.max(pool.chain[n]) / (n * p):.3f}")
    frac = idx.size / pool.n_seeds
    return Selection(pool=pool, indices=idx, n=n, beta=beta, b=b, p=p,
                     fraction=frac, leb_proxy_ok=frac >= 1.0 / n ** 2)


@dataclass
class EmpiricalMeasure:
    """Weighted point masses at orbit points g^i x, i in E_n^{M,m}(x)."""

    atoms: np.ndarray          # positions
    weights: np.ndarray
    meta: dict
    seed_idx: np.ndarray = None
    time_idx: np.ndarray = None
    pool: SamplePool = None
    per_seed_counts: np.ndarray = None
    per_seed_boundary: np.ndarray = None

    @property
    def n_atoms(self):
        return self.atoms.shape[0]

    @property
    def total_mass(self):
        return float(np.sum(self.weights))

    def to_rows(self):
        return list(zip(self.atoms.tolist(), self.weights.tolist()))


def empirical_measure(selection, M, m, normalization="mu", beta_inf=None):
    """Assemble mu_n^{M,m} or nu_n^{M,m} from a seed selection."""
    pool = selection.pool
    n = selection.n
    atoms, s_idx, t_idx = [], [], []
    counts = np.zeros(selection.n_selected, dtype=int)
    bounds = np.zeros(selection.n_selected, dtype=int)
    for j, s in enumerate(selection.indices):
        T = sorted(trim(pool.times[s], n, M, m))
        counts[j] = len(T)
        bounds[j] = len(boundary_set(T))
        for i in T:
            atoms.append(pool.points[i, s])
            s_idx.append(s)
            t_idx.append(i)
    total = int(counts.sum())
    if total == 0:
        raise EmptySelection(f"E_n^{{M={M},m={m}}} empty for every retained seed")
    beta_nMm = float(np.mean(counts / n))
    if normalization == "mu":
        w = np.full(total, 1.0 / total)
    elif normalization == "nu":
        if beta_inf is None:
            raise ValueError("nu normalization needs a beta_inf estimate")
        w = np.full(total, 1.0 / (n * beta_inf * selection.n_selected))
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    meta = {"n": n, "M": M, "m": m, "normalization": normalization,
            "beta_nMm": beta_nMm, "beta_inf": beta_inf,
            "n_seeds": selection.n_selected,
            "map": pool.provenance.get("g"), "p": selection.p}
    return EmpiricalMeasure(
        atoms=np.array(atoms), weights=w, meta=meta,
        seed_idx=np.array(s_idx, dtype=int), time_idx=np.array(t_idx, dtype=int),
        pool=pool, per_seed_counts=counts, per_seed_boundary=bounds)


def invariance_defect(mu, g, probes=None):
    """Weak-* defect |int psi d g_*mu - int psi d mu| against its bound.

    The bound is the boundary-count term: pushing atoms forward shifts
    E_n^{M,m}(x) by one, so sums differ by at most #dE per seed.
    """
    probes = probes or probe_functions()
    gx = g.eval(mu.atoms)
    defect = 0.0
    for psi in probes:
        d = abs(float(np.sum(mu.weights * psi(gx))
                      - np.sum(mu.weights * psi(mu.atoms))))
        defect = max(defect, d)
    if mu.per_seed_boundary is not None and mu.per_seed_counts is not None:
        norm = mu.meta.get("normalization", "mu")
        if norm == "mu":
            bound = float(np.sum(mu.per_seed_boundary)
                          / max(1, np.sum(mu.per_seed_counts)))
        else:
            bound = float(np.sum(mu.per_seed_boundary)
                          / (mu.meta["n"] * mu.meta["beta_inf"]
                             * mu.meta["n_seeds"]))
    else:
        bound = float("nan")
    return {"defect": defect, "bound": bound,
            "ok": not np.isfinite(bound) or defect <= bound + 1e-12}


@dataclass
class DensityEstimate:
    bins: int
    edges: np.ndarray
    masses: np.ndarray

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    def to_rows(self, reference=None):
        rows = []
        for i in range(self.bins):
            a, b = self.edges[i], self.edges[i + 1]
            ref = _bin_mass(reference, a, b) if reference else float("nan")
            rows.append((a, b, float(self.masses[i]), ref))
        return rows


def density_estimate(mu, bins):
    """Histogram of atom masses over [0,1]."""
    if bins < 10:
        raise ValueError("need at least 10 bins")
    masses, edges = np.histogram(np.clip(mu.atoms, 0.0, 1.0 - 1e-15),
                                 bins=bins, range=(0.0, 1.0),
                                 weights=mu.weights)
    return DensityEstimate(bins=bins, edges=edges, masses=masses)


def _bin_mass(ref, a, b, subpoints=100):
    ts = a + (np.arange(subpoints) + 0.5) * (b - a) / subpoints
    return float(np.mean(ref(ts)) * (b - a))


def compare_density(est, reference_density, subpoints=100):
    """L1 distance between the histogram and a closed-form density.

    The reference is integrated per bin by the midpoint rule with
    subpoints nodes, so integrable endpoint singularities (the arcsine
    density) are handled without special cases.
    """
    l1 = 0.0
    for i in range(est.bins):
        a, b = est.edges[i], est.edges[i + 1]
        l1 += abs(float(est.masses[i]) - _bin_mass(reference_density, a, b,
                                                   subpoints))
    return l1


def ref_uniform(x):
    return np.ones_like(np.asarray(x, dtype=float))


def ref_logistic_acip(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (np.pi * np.sqrt(np.clip(x * (1.0 - x), 1e-300, None)))


def support_gap_from_critical(mu, critical_pts, g=None, M=None,
                              log_sup_gprime=None):
    """Distance of the support to the critical set, plus the M-floor check.

    Returns +inf when the critical set is empty.  When g and M are
    supplied, also checks log|g'| >= -M log||g'||_inf at every atom (the
    hyperbolic-time floor on the derivative along kept times).
    """
    pts = [c for c in critical_pts if not isinstance(c, tuple)]
    for c in critical_pts:
        if isinstance(c, tuple):
            pts.extend(c)
    if not pts:
        gap = float("inf")
    else:
        pts = np.asarray(pts, dtype=float)
        d = np.abs(mu.atoms[:, None] - pts[None, :])
        if g is not None and g.domain.is_circle:
            d = np.minimum(d, 1.0 - d)
        gap = float(np.min(d))
    rep = {"gap": gap, "flagged_zero": gap <= 1e-12}
    if g is not None and M is not None:
        if log_sup_gprime is None:
            log_sup_gprime = float(np.log(
                estimate_norms(g, 1024, 1, 2).sup_abs_deriv[1]))
        ld = g.log_abs_deriv(mu.atoms)
        floor = -M * log_sup_gprime
        rep["deriv_floor_margin"] = float(np.min(ld) - floor)
        rep["deriv_floor_ok"] = bool(np.min(ld) >= floor - 1e-9)
    return rep


def positive_exponent_proxy(mu, log10=np.log(10.0)):
    """Fraction of atoms with a later raw time l whose segment expands.

    For an atom g^i x with i in E_n^{M,m}(x) there should exist l in
    E(x), l > i, with log|(g^{l-i})'(g^i x)| >= (l-i) log 10; this is the
    mechanism that makes the limit exponent >= log 10.
    """
    if mu.pool is None:
        raise InsufficientAtoms("measure carries no pool provenance")
    pool = mu.pool
    ok = 0
    for s, i in zip(mu.seed_idx, mu.time_idx):
        later = [l for l in pool.times[s] if l > i]
        good = any(pool.chain[l, s] - pool.chain[i, s] >= (l - i) * log10 - 1e-9
                   for l in later)
        ok += bool(good)
    return ok / max(1, mu.n_atoms)
