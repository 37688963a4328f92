"""Partitions, partition entropy, and the inequality suites.

The working partition is P_q = J v Q_q: monotone branches joined with
level sets of log|g'| cut into bins ]k/q, (k+1)/q] + a.  The offset
a in ]-1/q, 0[ is drawn so that no recorded orbit point sits within
1e-9 of an atom boundary (the finite-sample stand-in for "the boundary
has zero measure").

Entropy of an empirical measure under P_q^m is computed by itinerary
coding: an atom at orbit position (seed, i) belongs to the P_q^m cell
determined by its labels at times i..i+m-1, so cell masses are exact
for purely atomic measures and no interval bookkeeping is needed.  The
geometric join/refine path (interval endpoints through branch
inverses) is kept for small cases and cross-checks the coding.

Inequality suites: the block-entropy lower bound for shifted averages
(exact rational masses, high-precision logs), the countable-partition
entropy bounds with c_0 = 4 (e (1 - e^{-1/2}))^{-1}, the change-of-
variable bound, and the Gibbs cylinder bound with C = 8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import InsufficientAtoms, OffsetNotFound
from .branches import monotone_branches
from .maps import estimate_norms, power_map
from .times import boundary_set, clip, components, trim

__all__ = [
    "Partition1D", "EntropyReport", "build_Qq", "choose_offset", "join",
    "refine", "partition_entropy", "itinerary_entropy", "verify_misiurewicz",
    "verify_mane_bounds", "change_of_variable_check", "gibbs_check",
    "entropy_formula_residual", "C0_MANE", "qbin_label",
]

C0_MANE = 4.0 / (math.e * (1.0 - math.exp(-0.5)))
GIBBS_C = 8.0


# ---------------------------------------------------------------------------
# partitions as interval unions
# ---------------------------------------------------------------------------


@dataclass
class Partition1D:
    """Atoms are finite unions of half-open intervals with labels."""

    atoms: list                 # list of [(a, b), ...]
    labels: list
    offset_a: float = None
    name: str = ""

    def __post_init__(self):
        segs = []
        for i, ivs in enumerate(self.atoms):
            for (a, b) in ivs:
                if b > a:
                    segs.append((a, b, i))
        segs.sort()
        self._lefts = np.array([s[0] for s in segs])
        self._rights = np.array([s[1] for s in segs])
        self._ids = np.array([s[2] for s in segs], dtype=int)

    @property
    def n_atoms(self):
        return len(self.atoms)

    def locate_many(self, xs):
        xs = np.asarray(xs, dtype=float)
        j = np.searchsorted(self._lefts, xs, side="right") - 1
        out = np.full(xs.shape, -1, dtype=int)
        ok = j >= 0
        jj = np.clip(j, 0, None)
        inside = ok & (xs < self._rights[jj])
        out[inside] = self._ids[jj[inside]]
        return out

    def total_length(self):
        return float(np.sum(self._rights - self._lefts))


def build_Qq(g, q, a, grid_size=16384, k_lo=None, k_hi=None):
    """Level-set partition Q_q of log|g'| with bins ]k/q,(k+1)/q] + a.

    Enumerates bins intersecting the observed range of log|g'| (clipped
    to [k_lo, k_hi] when given); everything below the lowest enumerated
    bin is lumped into a single tail atom, flagged by label ('tail',).
    On every enumerated atom log|g'| varies by at most 1/q.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if not -1.0 / q < a < 0.0:
        raise ValueError("offset a must lie in ]-1/q, 0[")
    xs = np.linspace(0.0, 1.0, grid_size + 1)
    with np.errstate(divide="ignore"):
        u = g.log_abs_deriv(xs)
    finite = u[np.isfinite(u)]
    if finite.size == 0:
        raise ValueError("derivative vanishes everywhere on the grid")
    lo = math.floor(q * (float(np.min(finite)) - a)) - 1
    hi = math.ceil(q * (float(np.max(finite)) - a)) + 1
    if k_lo is not None:
        lo = max(lo, k_lo)
    if k_hi is not None:
        hi = min(hi, k_hi)

    # crossing points of u against every bin edge, then constant-label runs
    cut_ts = {0.0, 1.0}
    for k in range(lo, hi + 2):
        c = k / q + a
        s = u - c
        for i in range(grid_size):
            a0, a1 = s[i], s[i + 1]
            if np.isfinite(a0) and np.isfinite(a1) and a0 * a1 < 0:
                try:
                    t = brentq(lambda t: float(g.log_abs_deriv(
                        np.asarray(t))) - c, xs[i], xs[i + 1], xtol=1e-13)
                    cut_ts.add(t)
                except ValueError:
                    pass
    cuts = sorted(cut_ts)
    per_label = {}
    for x0, x1 in zip(cuts, cuts[1:]):
        if x1 - x0 < 1e-13:
            continue
        mid = 0.5 * (x0 + x1)
        um = float(g.log_abs_deriv(np.asarray(mid)))
        if not np.isfinite(um):
            lab = ("tail",)
        else:
            k = math.ceil(q * (um - a)) - 1
            lab = ("tail",) if k < lo else ("Q", min(k, hi))
        per_label.setdefault(lab, []).append((x0, x1))
    labels = sorted(per_label, key=str)
    atoms = [_merge(per_label[lab]) for lab in labels]
    return Partition1D(atoms=atoms, labels=labels, offset_a=a,
                       name=f"Q_{q}")


def _merge(intervals):
    out = []
    for a, b in sorted(intervals):
        if out and a - out[-1][1] < 1e-12:
            out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def qbin_label(g, q, a, k_lo=-10 ** 9):
    """Vectorized Q_q bin index of points: k with log|g'(x)| in I_{q,k}.

    Values below k_lo (or at criticals) are lumped into the tail index
    k_lo - 1, matching the tail atom of build_Qq.
    """
    def fn(xs):
        u = g.log_abs_deriv(np.asarray(xs, dtype=float))
        k = np.where(np.isfinite(u), np.ceil(q * (u - a)) - 1.0, k_lo - 1)
        return np.maximum(k, k_lo - 1).astype(np.int64)
    return fn


def choose_offset(g, q, orbit_atoms, rng=None, n_draws=1000, min_dist=1e-9,
                  cut_points=None, j_mass_tol=0.01):
    """Draw a in ]-1/q, 0[ keeping orbit points away from atom borders.

    The Q_q borders sit where q (log|g'(x)| - a) is an integer; the J
    borders do not depend on a, so no draw can clear them: points on a
    branch cut are tolerated up to mass j_mass_tol (exactly-dyadic maps
    quantize late orbit points onto cuts) and OffsetNotFound is raised
    only when their fraction is material.
    """
    rng = rng or np.random.default_rng(0)
    atoms = np.asarray(orbit_atoms, dtype=float)
    if cut_points is not None and len(cut_points):
        cp = np.sort(np.asarray(
            [p for p in cut_points if not isinstance(p, tuple)]))
        if cp.size:
            j = np.clip(np.searchsorted(cp, atoms), 1, cp.size - 1)
            dj = np.minimum(np.abs(atoms - cp[j - 1]), np.abs(atoms - cp[j]))
            frac = float(np.mean(dj < min_dist))
            if frac > j_mass_tol:
                raise OffsetNotFound(
                    f"fraction {frac:.3g} of orbit points sit on branch "
                    f"cuts (> {j_mass_tol})")
    u = g.log_abs_deriv(atoms)
    u = u[np.isfinite(u)]
    for _ in range(n_draws):
        a = -rng.uniform(0.0, 1.0) / q
        if a <= -1.0 / q or a >= 0.0:
            continue
        frac = np.abs((q * (u - a)) - np.round(q * (u - a)))
        if frac.size == 0 or np.min(frac) > q * min_dist:
            return float(a)
    raise OffsetNotFound(f"no admissible offset after {n_draws} draws")


def join(P, Q):
    """Common refinement: pairwise intersections with combined labels."""
    atoms, labels = [], []
    for ai, la in zip(P.atoms, P.labels):
        for bi, lb in zip(Q.atoms, Q.labels):
            inter = _intersect_unions(ai, bi)
            if inter:
                atoms.append(inter)
                labels.append((la, lb))
    return Partition1D(atoms=atoms, labels=labels, offset_a=Q.offset_a,
                       name=f"{P.name}v{Q.name}")


def _intersect_unions(A, B):
    out = []
    for (a0, a1) in A:
        for (b0, b1) in B:
            lo, hi = max(a0, b0), min(a1, b1)
            if hi - lo > 1e-13:
                out.append((lo, hi))
    return sorted(out)


def partition_from_branches(bp):
    """Monotone branches as a Partition1D (circle arcs split at the wrap)."""
    atoms, labels = [], []
    for i, br in enumerate(bp.branches):
        if br.b <= 1.0 + 1e-12:
            atoms.append([(br.a, min(br.b, 1.0))])
        else:
            atoms.append([(br.a, 1.0), (0.0, br.b - 1.0)])
        labels.append(("J", i))
    return Partition1D(atoms=atoms, labels=labels, name="J")


def pullback(P, g, bp):
    """g^{-1} P through branch-wise inverses."""
    from .branches import branch_preimages

    atoms, labels = [], []
    for ivs, lab in zip(P.atoms, P.labels):
        pre = []
        for (a, b) in ivs:
            for br in bp.branches:
                seg = _pullback_interval(g, br, a, b)
                if seg is not None:
                    pre.append(seg)
        if pre:
            atoms.append(sorted(pre))
            labels.append(lab)
    return Partition1D(atoms=atoms, labels=labels, offset_a=P.offset_a,
                       name=f"g^-1({P.name})")


def _pullback_interval(g, br, a, b):
    circle = g.domain.is_circle
    lo = br.a + 1e-13
    hi = br.a + br.length - 1e-13

    def u(t):
        return float(g.eval(t % 1.0 if circle else t))

    ulo, uhi = u(lo), u(hi)
    vmin, vmax = min(ulo, uhi), max(ulo, uhi)
    aa, bb = max(a, vmin), min(b, vmax)
    if bb - aa < 1e-13:
        return None

    def inv(c):
        if c <= vmin:
            return lo if ulo < uhi else hi
        if c >= vmax:
            return hi if ulo < uhi else lo
        return brentq(lambda t: u(t) - c, lo, hi, xtol=1e-13)

    x0, x1 = inv(aa), inv(bb)
    if x0 > x1:
        x0, x1 = x1, x0
    if x1 - x0 < 1e-13:
        return None
    return (x0, x1)


def refine(P, g, m, bp=None):
    """P^m = v_{j<m} g^{-j} P via iterated pullback and join."""
    bp = bp or monotone_branches(g)
    out = P
    level = P
    for _ in range(m - 1):
        level = pullback(level, g, bp)
        out = join(out, level)
    return out


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------


@dataclass
class EntropyReport:
    H_value: float
    partition_id: str
    measure_id: str
    m: int
    per_atom_masses: np.ndarray = field(repr=False, default=None)

    def check_invariants(self):
        p = self.per_atom_masses[self.per_atom_masses > 0]
        h = float(-np.sum(p * np.log(p)))
        return (abs(h - self.H_value) < 1e-12
                and self.H_value <= math.log(max(1, p.size)) + 1e-12)


def _entropy_of_masses(masses):
    p = np.asarray(masses, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def partition_entropy(measure, P, measure_id="mu", m=1):
    """H(P) = sum -lambda(P) log lambda(P) on atom masses."""
    ids = P.locate_many(measure.atoms)
    masses = np.zeros(P.n_atoms + 1)
    np.add.at(masses, np.where(ids >= 0, ids, P.n_atoms), measure.weights)
    H = _entropy_of_masses(masses)
    return EntropyReport(H_value=H, partition_id=P.name, measure_id=measure_id,
                         m=m, per_atom_masses=masses)


def itinerary_entropy(mu, label_fns, m, g=None):
    """H_mu(P^m) by coding atoms with their forward labels.

    label_fns is a list of vectorized point-to-integer label functions
    (one per joined partition).  When the measure carries pool
    provenance the forward points come from the recorded orbits;
    otherwise g is iterated from the atoms directly.
    """
    n_atoms = mu.n_atoms
    cols = []
    if mu.pool is not None:
        pts = mu.pool.points
        for j in range(m):
            xj = pts[mu.time_idx + j, mu.seed_idx]
            for fn in label_fns:
                cols.append(fn(xj))
    else:
        if g is None:
            raise ValueError("need g to iterate a pool-free measure")
        xj = mu.atoms.copy()
        for j in range(m):
            for fn in label_fns:
                cols.append(fn(xj))
            if j < m - 1:
                xj = g.eval(xj)
    code = np.stack(cols, axis=1)
    _, inv = np.unique(code, axis=0, return_inverse=True)
    masses = np.bincount(inv, weights=mu.weights)
    return _entropy_of_masses(masses)


# ---------------------------------------------------------------------------
# the block-entropy inequality (exact masses, high-precision logs)
# ---------------------------------------------------------------------------


def _H_exact(mass_by_label):
    total = sum(mass_by_label.values(), Fraction(0))
    if total == 0:
        return mpmath.mpf(0)
    H = mpmath.mpf(0)
    for v in mass_by_label.values():
        if v > 0:
            pv = mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
            H -= pv * mpmath.log(pv)
    return H


def verify_misiurewicz(lam, T, R, F, m, dps=40):
    """Exact check of the shifted-average block-entropy bound.

    For a finite system (states 0..N-1, map T, partition labels R,
    probability lam) and a finite F subset Z_0^+:

      (1/m) H_{lam^F}(R^m) >= (1/#F) H_lam(R^F)
                              - m log(#R_{lam^F}) #dF / #F

    with lam^F = (1/#F) sum_{k in F} T^k_* lam.  Masses are exact
    rationals; entropies are evaluated with mpmath at dps digits.
    """
    with mpmath.workdps(dps):
        N = len(T)
        lam = [Fraction(v).limit_denominator(10 ** 12)
               if not isinstance(v, Fraction) else v for v in lam]
        F = sorted(set(F))
        nF = len(F)
        # orbit table up to max(F) + m
        depth = max(F) + m + 1
        orbit = np.empty((depth, N), dtype=int)
        orbit[0] = np.arange(N)
        for j in range(1, depth):
            orbit[j] = [T[s] for s in orbit[j - 1]]

        lamF = {}
        for k in F:
            for s in range(N):
                if lam[s] == 0:
                    continue
                tgt = int(orbit[k, s])
                lamF[tgt] = lamF.get(tgt, Fraction(0)) + lam[s] / nF

        # H_{lam^F}(R^m): R^m label of state s is (R[s], R[Ts], ..)
        by_rm = {}
        for s, mass in lamF.items():
            lab = tuple(R[int(orbit[j, s])] for j in range(m))
            by_rm[lab] = by_rm.get(lab, Fraction(0)) + mass
        H_rm = _H_exact(by_rm)

        # H_lam(R^F)
        by_rf = {}
        for s in range(N):
            if lam[s] == 0:
                continue
            lab = tuple(R[int(orbit[k, s])] for k in F)
            by_rf[lab] = by_rf.get(lab, Fraction(0)) + lam[s]
        H_rf = _H_exact(by_rf)

        # #R_{lam^F}
        charged = set()
        for s, mass in lamF.items():
            if mass > 0:
                charged.add(R[s])
        n_charged = max(1, len(charged))

        dF = len(set(F) ^ {k + 1 for k in F})
        lhs = H_rm / m
        rhs = H_rf / nF - m * mpmath.log(n_charged) * dF / nF
        margin = float(lhs - rhs)
        return {"lhs": float(lhs), "rhs": float(rhs), "margin": margin,
                "ok": margin >= -1e-12, "n_charged": n_charged, "dF": dF}


def verify_mane_bounds(measure, g, q, a=None, bp=None, norms=None,
                       rng=None):
    """The countable-partition entropy bounds on a finite-atom measure.

    (1) sum_k -x_k log x_k <= sum_k |k| x_k + c_0 for the Q_q bin masses
        (c_0 = 4 (e (1 - e^{-1/2}))^{-1}),
    (2) H(Q_q) <= c_0 + 1 + q * int |log|g'|| d(measure),
    (3) per atom: branch length >= (|g'(x)| / ||d^{r'} g||)^{1/(r'-1)}.
    """
    rng = rng or np.random.default_rng(0)
    a = a if a is not None else choose_offset(g, q, measure.atoms, rng)
    labfn = qbin_label(g, q, a)
    ks = labfn(measure.atoms)
    masses = {}
    for k, w in zip(ks, measure.weights):
        masses[int(k)] = masses.get(int(k), 0.0) + float(w)
    xs = np.array(list(masses.values()))
    kk = np.array(list(masses.keys()), dtype=float)
    lhs = _entropy_of_masses(xs)
    rhs1 = float(np.sum(np.abs(kk) * xs)) + C0_MANE
    u = g.log_abs_deriv(measure.atoms)
    int_abs = float(np.sum(measure.weights * np.abs(
        np.where(np.isfinite(u), u, 0.0))))
    rhs2 = C0_MANE + 1.0 + q * int_abs

    bp = bp or monotone_branches(g)
    norms = norms or estimate_norms(g)
    rp = min(2.0, g.smoothness_r)
    d_rp = norms.sup_abs_deriv[2] if rp == 2.0 else norms.sup_abs_deriv["r"]
    margin3 = float("inf")
    if d_rp > 0:
        ids = bp.locate_many(measure.atoms)
        lengths = np.array([br.length for br in bp.branches])
        good = ids >= 0
        bound = (np.exp(u[good]) / d_rp) ** (1.0 / (rp - 1.0))
        margin3 = float(np.min(lengths[ids[good]] - bound)) if good.any() \
            else float("inf")
    return {
        "sete_lhs": lhs, "sete_rhs": rhs1, "sete_margin": rhs1 - lhs,
        "sete_ok": rhs1 - lhs >= -1e-9,
        "hq_lhs": lhs, "hq_rhs": rhs2, "hq_margin": rhs2 - lhs,
        "hq_ok": rhs2 - lhs >= -1e-9,
        "branch_size_margin": margin3,
        "branch_size_ok": margin3 >= -1e-9,
        "c0": C0_MANE, "offset_a": a,
    }


def sete_inequality(xs):
    """Direct evaluation of sum -x_k log x_k <= sum |k| x_k + c_0.

    xs maps integer indices to values in [0, 1].
    """
    lhs = sum(-v * math.log(v) for v in xs.values() if v > 0)
    rhs = sum(abs(k) * v for k, v in xs.items()) + C0_MANE
    return {"lhs": lhs, "rhs": rhs, "margin": rhs - lhs,
            "ok": rhs - lhs >= -1e-12}


# ---------------------------------------------------------------------------
# change of variable and Gibbs
# ---------------------------------------------------------------------------


def _leb_of_intervals(ivs):
    return sum(b - a for a, b in ivs)


def change_of_variable_check(g, k, J_branch, A_set, B_set, target_err=1e-4,
                             max_grid=2 ** 20):
    """Leb(J cap A cap g^{-k} B) <= Leb(B) / inf_{J cap A} |(g^k)'|.

    Left side by midpoint quadrature with refinement until the estimate
    moves less than target_err; the inf by grid scan plus local polish.
    """
    gk = power_map(g, k) if k > 1 else g
    a0, b0 = J_branch
    JA = _intersect_unions([(a0, b0)], sorted(A_set))
    lebB = _leb_of_intervals(B_set)
    if not JA:
        return {"lhs": 0.0, "rhs": float("inf"), "margin": float("inf"),
                "ok": True, "err": 0.0}

    def inB(y):
        y = np.asarray(y)
        out = np.zeros(y.shape, dtype=bool)
        for (ba, bb) in B_set:
            out |= (y >= ba) & (y < bb)
        return out

    grid = 1 << 12
    prev = None
    lhs = 0.0
    err = float("inf")
    while grid <= max_grid:
        lhs = 0.0
        for (a, b) in JA:
            ts = a + (np.arange(grid) + 0.5) * (b - a) / grid
            if k >= 1:
                y = ts.copy()
                for _ in range(k):
                    y = g.eval(y)
            else:
                y = ts
            lhs += float(np.mean(inB(y))) * (b - a)
        if prev is not None:
            err = abs(lhs - prev)
            if err < target_err:
                break
        prev = lhs
        grid *= 2

    inf_d = float("inf")
    for (a, b) in JA:
        ts = np.linspace(a + 1e-12, b - 1e-12, 257)
        vals = np.abs(gk.deriv(1, ts)) if k >= 1 else np.ones_like(ts)
        i = int(np.argmin(vals))
        lo = max(a, ts[max(0, i - 1)])
        hi = min(b, ts[min(len(ts) - 1, i + 1)])
        res = minimize_scalar(lambda t: abs(float(gk.deriv(1, t))),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        inf_d = min(inf_d, float(np.min(vals)), float(res.fun))
    rhs = lebB / inf_d if inf_d > 0 else float("inf")
    margin = rhs - lhs
    return {"lhs": lhs, "rhs": rhs, "inf_deriv": inf_d, "err": err,
            "margin": margin, "ok": margin >= -2 * max(err, 1e-12)}


def _wilson(hits, n, z=1.96):
    if n == 0:
        return 0.0, 1.0
    ph = hits / n
    den = 1 + z * z / n
    center = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return max(0.0, center - half), min(1.0, center + half)


def gibbs_check(g, x, E, q, eps, *, n, M, m, beta, b, p, bp=None, a_offset=None,
                n_samples=20000, rng=None, c_const=GIBBS_C, c_expansion=10.0,
                atom_checks=True):
    """Monte Carlo check of the Gibbs cylinder bound for one seed.

    R collects the points sharing x's monotone-branch and Q_q-bin
    itinerary along E_n^{M,m}(x), the same trimmed time set, and the
    A_n membership; the bound is

       Leb(R) <= (C/eps)^{#dE} exp(-phi_g^E(x) + #E / q),  C = 8.

    Membership is tested on uniform samples with a Wilson interval; the
    inequality "fails" only when the interval's lower end exceeds the
    right-hand side.  Companion checks on the gap atoms (distortion
    9/4, image length eps/27) are run when atom_checks is set.
    """
    from .maps import eval_orbit, orbit_grid

    rng = rng or np.random.default_rng(0)
    bp = bp or monotone_branches(g)
    if a_offset is None:
        a_offset = -0.5 / q
    labQ = qbin_label(g, q, a_offset)

    T = sorted(trim(set(E), n, M, m))
    rec = eval_orbit(g, float(x), n)
    if not T:
        # R is the ambient cell; rhs = (C/eps)^0 e^0 = 1 >= Leb(R)
        return {"leb_hat": 1.0, "ci": (0.0, 1.0), "rhs": 1.0, "ok": True,
                "T": T, "trivial": True}
    dT = boundary_set(T)
    phi_E = float(sum(rec.log_derivs[i] for i in T))
    rhs = (c_const / eps) ** len(dT) * math.exp(-phi_E + len(T) / q)

    # itinerary of x along T
    jx = bp.locate_many(rec.points[T])
    qx = labQ(rec.points[T])

    ys = rng.uniform(0.0, 1.0, n_samples)
    pts, lds = orbit_grid(g, ys, n)
    mask = np.ones(n_samples, dtype=bool)
    for col, i in enumerate(T):
        mask &= bp.locate_many(pts[i]) == jx[col]
        mask &= labQ(pts[i]) == qx[col]
        if not mask.any():
            break
    # A_n and equal trimmed set, on survivors only
    hits = 0
    if mask.any():
        chain = np.vstack([np.zeros(n_samples), np.cumsum(lds, axis=0)])
        logc = math.log(c_expansion)
        for s in np.nonzero(mask)[0]:
            S = chain[:, s]
            Ey = [l for l in range(1, n + 1)
                  if np.isfinite(S[l]) and
                  np.all(S[l] - S[:l] >= (l - np.arange(l)) * logc - 1e-12)]
            if sum(1 for e in Ey if e < n) / n <= beta:
                continue
            if S[n] < n * p * b - 1e-12:
                continue
            if sorted(trim(set(Ey), n, M, m)) != T:
                continue
            hits += 1
    leb_hat = hits / n_samples
    ci = _wilson(hits, n_samples)
    ok = ci[0] <= rhs + 1e-12

    out = {"leb_hat": leb_hat, "ci": ci, "rhs": rhs, "ok": ok, "T": T,
           "phi_E": phi_E, "n_boundary": len(dT), "trivial": False}
    if atom_checks:
        out["atoms"] = _gap_atom_checks(g, rec, T, eps, bp)
    return out


def _gap_atom_checks(g, rec, T, eps, bp, max_depth=3):
    """Distortion and image-size checks on the gap atoms V_{a_{j+1}}.

    For each gap b_j -> a_{j+1} between components of the trimmed set,
    the atom around g^{b_j} x is the maximal interval sharing the
    branch itinerary for the gap length whose image stays in one ball
    of width ~eps/27; checks |(g^D)'| distortion <= 9/4 and image
    length >= eps/27.
    """
    comps = components(T)
    n_balls = max(15, int(math.floor(27.0 / eps))) if eps > 0 else 27
    w = 1.0 / n_balls
    checks = []
    gaps = []
    if comps:
        if comps[0][0] > 0:
            gaps.append((0, comps[0][0]))
        for (a1, b1), (a2, b2) in zip(comps, comps[1:]):
            gaps.append((b1, a2))
    for (bj, aj1) in gaps:
        D = aj1 - bj
        if D < 1 or D > max_depth:
            checks.append({"gap": (bj, aj1), "skipped": True})
            continue
        y0 = float(rec.points[bj])

        def itinerary(y):
            y = float(y)
            lab = []
            for _ in range(D):
                lab.append(int(bp.locate_many(np.asarray([y]))[0]))
                y = float(g.eval(y))
            lab.append(int(math.floor(y / w)))
            return tuple(lab)

        ref = itinerary(y0)

        def edge(direction):
            step = 1e-12
            t = 0.0
            while step < 1.0:
                if itinerary(y0 + direction * (t + step)) != ref:
                    lo, hi = t, t + step
                    for _ in range(60):
                        mid = 0.5 * (lo + hi)
                        if itinerary(y0 + direction * mid) == ref:
                            lo = mid
                        else:
                            hi = mid
                    return lo
                t += step
                step *= 2.0
            return t

        right = edge(1.0)
        left = edge(-1.0)
        lo, hi = y0 - left, y0 + right
        ts = np.linspace(lo + 1e-15, hi - 1e-15, 129)
        gD = ts.copy()
        for _ in range(D):
            gD = g.eval(gD)
        d = np.ones_like(ts)
        y = ts.copy()
        for _ in range(D):
            d = d * g.deriv(1, y)
            y = g.eval(y)
        d = np.abs(d)
        dist = float(np.max(d) / max(np.min(d), 1e-300))
        img = float(abs(gD[-1] - gD[0]))
        checks.append({
            "gap": (bj, aj1), "skipped": False,
            "distortion": dist, "distortion_ok": dist <= 9.0 / 4.0 + 1e-9,
            "image_length": img, "image_ok": img >= eps / 27.0 - 1e-12,
        })
    return checks


# ---------------------------------------------------------------------------
# entropy-formula residual and verdict
# ---------------------------------------------------------------------------


def entropy_formula_residual(f, mu, q_list, m_list, p=None, tol=0.05,
                             rng=None, min_atoms=10 ** 4, bp=None):
    """Estimate h(g, P_q) by refinement slopes and compare with int log|g'|.

    h_est is the largest over q of the least-squares slope of
    H_mu(P_q^m) against m over the last (up to) three m values; the
    residual h_est - int log|g'| d mu is reported at the g level and,
    through p h_f = h_{f^p}, at the f level.  The verdict is
    AC-consistent when the f-level residual is within tol and the
    positive-exponent proxy holds.
    """
    from .measures import positive_exponent_proxy

    if mu.n_atoms < min_atoms:
        raise InsufficientAtoms(f"{mu.n_atoms} atoms < {min_atoms}")
    rng = rng or np.random.default_rng(0)
    p = p or mu.meta.get("p", 1)
    g = power_map(f, p)
    bp = bp or monotone_branches(g, grid_size=2 ** 14)
    labJ = lambda xs: bp.locate_many(xs)

    tables = {}
    slopes = {}
    for q in q_list:
        a = choose_offset(g, q, mu.atoms, rng, cut_points=[
            pt for pt, _ in bp.cut_points])
        labQ = qbin_label(g, q, a)
        Hs = [itinerary_entropy(mu, [labJ, labQ], m, g=g) for m in m_list]
        tables[q] = {"a": a, "m": list(m_list), "H": Hs}
        tail = min(3, len(m_list))
        ms = np.asarray(m_list[-tail:], dtype=float)
        hs = np.asarray(Hs[-tail:])
        slopes[q] = float(np.polyfit(ms, hs, 1)[0]) if tail > 1 else \
            float(hs[0] / ms[0])
    h_g = max(slopes.values())
    u = g.log_abs_deriv(mu.atoms)
    int_phi_g = float(np.sum(mu.weights * np.where(np.isfinite(u), u, -745.0)))
    residual_g = h_g - int_phi_g
    h_f = h_g / p
    int_phi_f = int_phi_g / p
    residual_f = residual_g / p

    if mu.pool is not None:
        proxy = positive_exponent_proxy(mu)
    else:
        proxy = 1.0 if int_phi_g > 0 else 0.0
    exponent_positive = int_phi_g > 0 and proxy >= 0.95
    verdict = "AC-consistent" if (abs(residual_f) <= tol and
                                  exponent_positive) else "not-AC"
    return {
        "h_g_est": h_g, "int_phi_g": int_phi_g, "residual_g": residual_g,
        "h_f_est": h_f, "int_phi_f": int_phi_f, "residual_f": residual_f,
        "p": p, "slopes": slopes, "tables": tables,
        "exponent_proxy": proxy, "exponent_positive": exponent_positive,
        "verdict": verdict, "tol": tol,
    }
