"""Geometric/hyperbolic time detection and the E_n^{M,m} set calculus.

The discrete machinery works on finite subsets E of the nonnegative
integers below a horizon n:

  - clip:      E_n^M  = union of [[k;l[[ over pairs k,l in E cap [0,n)
               with |k-l| <= M,
  - trim:      E_n^{M,m} removes, from each component [[k;l[[ of E_n^M,
               the minimal L in [m-1, M+m-2] elements such that the
               shortened component still ends at an element of E
               (components with no valid L are dropped),
  - boundary:  dE = E symmetric-difference (E+1).

Two detectors produce the raw time sets: the reparametrization-tree
walk (the defining construction) and a fast surrogate that keeps the
times l whose past is uniformly expanded, |(g^{l-k})'(g^k x)| >=
c^{l-k} for every k < l, computed with a running-minimum pass over
log-derivative prefix sums.  With c = 10 the surrogate times satisfy
the hyperbolic-time inequalities by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TimeSet", "TimeSetDerived", "clip", "trim", "boundary_set",
    "components", "verify_enm", "hyperbolic_surrogate_times",
    "surrogate_times_from_logs", "verify_hyperbolic", "density",
    "geometric_times_tree",
]

LOG10 = float(np.log(10.0))


@dataclass(frozen=True)
class TimeSet:
    """A finite set of candidate times below a horizon."""

    elems: tuple
    horizon: int

    def __post_init__(self):
        if any(e < 0 or e > self.horizon for e in self.elems):
            raise ValueError("time-set elements must lie in [0, horizon]")
        object.__setattr__(self, "elems", tuple(sorted(set(self.elems))))

    def __iter__(self):
        return iter(self.elems)

    def __len__(self):
        return len(self.elems)


@dataclass
class TimeSetDerived:
    """E together with its clipped/trimmed/boundary companions at (n, M, m)."""

    base: TimeSet
    n: int
    M: int
    m: int
    clipped: frozenset = field(init=False)
    trimmed: frozenset = field(init=False)
    boundary: frozenset = field(init=False)
    density: float = field(init=False)

    def __post_init__(self):
        self.clipped = frozenset(clip(self.base.elems, self.n, self.M))
        self.trimmed = frozenset(trim(self.base.elems, self.n, self.M, self.m))
        self.boundary = frozenset(boundary_set(self.trimmed))
        self.density = density(self.trimmed, self.n)


def density(S, n):
    """d_n(S) = #(S cap [0,n)) / n."""
    if n <= 0:
        return 0.0
    return sum(1 for s in S if 0 <= s < n) / n


def components(S):
    """Connected components of an integer set as (start, stop) half-open runs."""
    xs = sorted(S)
    if not xs:
        return []
    runs = []
    a = b = xs[0]
    for v in xs[1:]:
        if v == b + 1:
            b = v
        else:
            runs.append((a, b + 1))
            a = b = v
    runs.append((a, b + 1))
    return runs


def clip(E, n, M):
    """E_n^M: union of [[k;l[[ over k,l in E cap [0,n) with |k-l| <= M.

    Only adjacent qualifying pairs matter: any qualifying [k,l) is a
    union of adjacent-element intervals with gaps <= l-k <= M.
    """
    elems = sorted(e for e in set(E) if 0 <= e < n)
    out = set()
    for a, b in zip(elems, elems[1:]):
        if b - a <= M:
            out.update(range(a, b))
    return out


def trim(E, n, M, m):
    """E_n^{M,m}: shorten each clip component back onto an element of E."""
    if m < 1:
        raise ValueError("m must be >= 1")
    Eset = set(E)
    out = set()
    for k, l in components(clip(E, n, M)):
        chosen = None
        for L in range(m - 1, M + m - 1):
            if l - L > k and (l - L) in Eset:
                chosen = L
                break
        if chosen is not None:
            out.update(range(k, l - chosen))
    return out


def boundary_set(S):
    """dS = S symmetric-difference (S+1)."""
    S = set(S)
    return S ^ {s + 1 for s in S}


# ---------------------------------------------------------------------------
# brute-force oracles (kept alongside the fast paths; tests compare them)
# ---------------------------------------------------------------------------


def clip_bruteforce(E, n, M):
    out = set()
    for k in E:
        for l in E:
            if k < n and l < n and abs(k - l) <= M:
                out.update(range(k, l))
    return out


def trim_bruteforce(E, n, M, m):
    Eset = set(E)
    out = set()
    for k, l in components(clip_bruteforce(E, n, M)):
        for L in range(m - 1, M + m - 1):
            if l - L > k and (l - L) in Eset:
                out.update(range(k, l - L))
                break
    return out


# ---------------------------------------------------------------------------
# combinatorial lemma checks
# ---------------------------------------------------------------------------


def verify_enm(E, n, M, Mprime, m):
    """Check the boundary/counting properties of E_n^{M,m}.

    Returns a dict of booleans and margins for: (i) dE_n^{M,m} subset E,
    (iii) M * #d/2 <= n + M, (iv) #(E_n^{M',m} \\ E_n^{M,m}) >=
    M (#dE_n^{M,m} - #dE_n^{M',m}) / 2, plus trimmed-set monotonicity
    in M.
    """
    if M > Mprime:
        raise ValueError("need M <= Mprime")
    Eset = set(E)
    S = trim(E, n, M, m)
    Sp = trim(E, n, Mprime, m)
    dS = boundary_set(S)
    dSp = boundary_set(Sp)
    i_ok = dS <= Eset
    iii_margin = (n + M) - M * len(dS) / 2
    iv_margin = len(Sp - S) - M * (len(dS) - len(dSp)) / 2
    return {
        "i_boundary_subset": i_ok,
        "iii_margin": iii_margin,
        "iii_ok": iii_margin >= 0,
        "iv_margin": iv_margin,
        "iv_ok": iv_margin >= 0,
        "monotone_in_M": S <= Sp,
    }


# ---------------------------------------------------------------------------
# detectors
# ---------------------------------------------------------------------------


def surrogate_times_from_logs(log_derivs, c_expansion=10.0):
    """Surrogate hyperbolic times from a log|g'| sequence.

    l qualifies iff S_l - S_k >= (l-k) log c for every k < l, where S is
    the prefix sum.  Equivalently S_l - l log c must reach a new running
    maximum over {S_k - k log c : k < l}; that gives the O(n) pass.
    A -inf log-derivative (critical hit) kills every later time.
    """
    lds = np.asarray(log_derivs, dtype=float)
    n = lds.shape[0]
    logc = float(np.log(c_expansion))
    S = np.concatenate(([0.0], np.cumsum(lds)))
    out = []
    run_max = S[0]  # max over k < l of S_k - k logc; starts with k=0
    for l in range(1, n + 1):
        t = S[l] - l * logc
        if np.isfinite(t) and t >= run_max - 1e-12:
            out.append(l)
        run_max = max(run_max, t)
    return out


def hyperbolic_surrogate_times(g, x, n_max, c_expansion=10.0):
    """Surrogate detector evaluated on a fresh orbit of g from x."""
    from .maps import eval_orbit

    if c_expansion < 1.0:
        raise ValueError("c_expansion must be >= 1")
    rec = eval_orbit(g, x, n_max)
    return TimeSet(tuple(surrogate_times_from_logs(rec.log_derivs, c_expansion)),
                   n_max)


def geometric_times_tree(tree, x, n_max):
    """Geometric times of x from a reparametrization tree (lazy walk).

    Delegates to the tree's path-following machinery; a time m is
    geometric when an expanding level-m vertex whose k'-labels match the
    orbit of x contains x in the middle third of its image.
    """
    return TimeSet(tuple(tree.walk_geometric_times(x, n_max)), n_max)


# ---------------------------------------------------------------------------
# hyperbolic-time property verification
# ---------------------------------------------------------------------------


def verify_hyperbolic(g, x, E, n, M, m, log_sup_gprime=None):
    """Check the expansion inequalities of hyperbolic times along an orbit.

    (i)   for l in E and every k < l:  S_l - S_k >= (l-k) log 10
    (ii)  per connected component [[a;b[[ of E_n^{M,m}:
          S_b - S_a >= (b-a) log 10
    (iii) for every [[k;l[[ inside E_n^{M,m}:
          S_l - S_k >= (l-k) log 10 - M log||g'||_inf

    Returns worst margins (positive = pass).  E may come from either
    detector; an empty E passes vacuously with margins +inf.
    """
    from .maps import estimate_norms, eval_orbit

    elems = sorted(set(E))
    horizon = max([n] + elems) if elems else n
    rec = eval_orbit(g, x, horizon)
    S = rec.chain_log_deriv
    if log_sup_gprime is None:
        log_sup_gprime = float(np.log(
            estimate_norms(g, 1024, 1, 2).sup_abs_deriv[1]))

    margin_i = np.inf
    for l in elems:
        if l == 0:
            continue
        ks = np.arange(0, l)
        margin_i = min(margin_i,
                       float(np.min((S[l] - S[ks]) - (l - ks) * LOG10)))

    T = trim(elems, n, M, m)
    margin_ii = np.inf
    margin_iii = np.inf
    for a, b in components(T):
        margin_ii = min(margin_ii, float(S[b] - S[a] - (b - a) * LOG10))
        for k in range(a, b):
            for l in range(k + 1, b + 1):
                lhs = S[l] - S[k]
                rhs = (l - k) * LOG10 - M * log_sup_gprime
                margin_iii = min(margin_iii, float(lhs - rhs))
    return {
        "i_margin": margin_i,
        "ii_margin": margin_ii,
        "iii_margin": margin_iii,
        "i_ok": margin_i >= -1e-9,
        "ii_ok": margin_ii >= -1e-9,
        "iii_ok": margin_iii >= -1e-9,
        "n_times": len(elems),
        "n_trimmed": len(T),
    }
