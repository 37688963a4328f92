"""Monotone-branch partitions of interval and circle maps.

A monotone branch is a maximal half-open interval [a, b) on whose
interior g' keeps a constant nonzero sign and g never hits the marked
point 0.  For interval maps the marked-point cuts coincide with
critical points or the domain boundary, so this reduces to the classic
partition; for circle maps the extra cuts at preimages of 0 restore
injectivity of g on each branch.

Circle branches are stored as (a, length) with the right endpoint
possibly wrapping past 1; membership is decided by the left-closed
convention after reduction mod 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import InverseNotBracketed
from .maps import critical_set, estimate_norms

__all__ = [
    "Branch", "BranchPartition", "monotone_branches",
    "count_branches_with_min_slope", "refine_branches", "branch_lengths",
]


@dataclass(frozen=True)
class Branch:
    """Half-open branch [a, a+length) (length may wrap past 1 on the circle)."""

    a: float
    length: float
    sign: int
    sup_slope: float

    @property
    def b(self):
        return self.a + self.length

    def contains(self, x, circle):
        if circle:
            return (x - self.a) % 1.0 < self.length
        return self.a <= x < self.b

    def midpoint(self, circle):
        m = self.a + 0.5 * self.length
        return m % 1.0 if circle else m


@dataclass
class BranchPartition:
    """Ordered branches plus the cut points that generated them."""

    map_name: str
    branches: list
    cut_points: list  # (point_or_interval, reason) pairs
    is_circle: bool
    flat_pieces: list

    def locate(self, x):
        """Index of the branch containing x, or -1 (cut point / flat piece)."""
        if self.is_circle:
            x = x % 1.0
        for i, br in enumerate(self.branches):
            if br.contains(x, self.is_circle):
                return i
        return -1

    def locate_many(self, xs):
        """Vectorized branch membership via sorted left endpoints."""
        xs = np.asarray(xs, dtype=float)
        if self.is_circle:
            xs = xs % 1.0
        lefts = np.array([br.a for br in self.branches])
        order = np.argsort(lefts)
        lefts_sorted = lefts[order]
        idx = np.searchsorted(lefts_sorted, xs, side="right") - 1
        if self.is_circle:
            idx = np.where(idx < 0, len(self.branches) - 1, idx)
        out = np.full(xs.shape, -1, dtype=int)
        for j, i in enumerate(np.atleast_1d(idx)):
            if i < 0:
                continue
            br = self.branches[order[i]]
            xv = np.atleast_1d(xs)[j]
            if br.contains(xv, self.is_circle) or (
                    self.is_circle and br.contains(xv + 1.0, self.is_circle)):
                np.atleast_1d(out)[j] = order[i]
        return out

    def to_rows(self):
        """CSV rows (map, index, a, b, sign, sup_slope)."""
        return [
            (self.map_name, i, br.a, br.b, br.sign, br.sup_slope)
            for i, br in enumerate(self.branches)
        ]


def _zeros_of_map(g, grid_size=8192):
    """Interior solutions of g(x) = 0 (mod 1 on the circle).

    Uses v(x) = ((g(x)+1/2) mod 1) - 1/2, continuous near its zeros, and
    brackets sign changes with both values close to 0 to dodge the wrap
    discontinuity at +-1/2.
    """
    xs = np.linspace(0.0, 1.0, grid_size + 1)
    gx = g.eval(xs)
    if g.domain.is_circle:
        v = ((gx + 0.5) % 1.0) - 0.5
    else:
        v = gx
    zeros = []
    for i in range(grid_size):
        a, b = v[i], v[i + 1]
        if abs(a) > 0.25 or abs(b) > 0.25:
            continue
        if a == 0.0:
            zeros.append(xs[i])
        elif a * b < 0:
            def vv(t):
                y = float(g.eval(t))
                return ((y + 0.5) % 1.0) - 0.5 if g.domain.is_circle else y
            zeros.append(brentq(vv, xs[i], xs[i + 1], xtol=1e-13))
    if v[-1] == 0.0:
        zeros.append(xs[-1])
    return zeros


def _sup_slope(g, lo, hi, samples=64):
    ts = np.linspace(lo, hi, samples)
    vals = np.abs(g.deriv(1, g.domain.reduce(ts)))
    best = float(np.max(vals))
    i = int(np.argmax(vals))
    a = max(lo, ts[max(0, i - 1)])
    b = min(hi, ts[min(samples - 1, i + 1)])
    if b > a:
        res = minimize_scalar(
            lambda t: -abs(float(g.deriv(1, float(g.domain.reduce(np.asarray(t)))))),
            bounds=(a, b), method="bounded", options={"xatol": 1e-12})
        best = max(best, float(-res.fun))
    return best


def monotone_branches(g, tol=1e-12, grid_size=8192):
    """Connected components of {g' != 0 and g != 0}, left-closed.

    Cut points are critical points of g, interior preimages of the
    marked point 0, and (interval case) the domain boundary.  Flat
    critical pieces are excluded from every branch and reported apart.
    """
    circle = g.domain.is_circle
    crits = critical_set(g, tol=tol, grid_size=grid_size)
    flat_pieces = [c for c in crits if isinstance(c, tuple)]
    crit_pts = [c for c in crits if not isinstance(c, tuple)]
    zeros = _zeros_of_map(g, grid_size)

    cuts = []
    for c in crit_pts:
        cuts.append((c % 1.0 if circle else c, "critical"))
    for z in zeros:
        if circle or (tol < z < 1 - tol):
            cuts.append((z % 1.0 if circle else z, "preimage_of_zero"))
    if not circle:
        cuts.append((0.0, "domain_boundary"))
        cuts.append((1.0, "domain_boundary"))

    # dedupe, keeping the first reason for coincident cuts
    cuts.sort(key=lambda t: t[0])
    dedup = []
    for p, reason in cuts:
        if dedup and abs(p - dedup[-1][0]) < 10 * max(tol, 1e-12):
            continue
        dedup.append((p, reason))
    pts = [p for p, _ in dedup]

    branches = []
    if circle:
        if not pts:
            # no cuts at all: the whole circle is one branch
            segs = [(0.0, 1.0)]
        else:
            segs = [(pts[i], (pts[i + 1] if i + 1 < len(pts) else pts[0] + 1.0))
                    for i in range(len(pts))]
    else:
        segs = list(zip(pts, pts[1:]))

    flat_set = [(a, b) for a, b in flat_pieces]
    for lo, hi in segs:
        if hi - lo <= 10 * max(tol, 1e-12):
            continue
        mid = (lo + hi) / 2.0
        midr = mid % 1.0 if circle else mid
        if any(a - tol <= midr <= b + tol for a, b in flat_set):
            continue
        d = float(g.deriv(1, midr))
        if d == 0.0:
            continue
        branches.append(Branch(
            a=lo % 1.0 if circle else lo,
            length=hi - lo,
            sign=1 if d > 0 else -1,
            sup_slope=_sup_slope(g, lo, hi),
        ))
    return BranchPartition(
        map_name=g.name,
        branches=branches,
        cut_points=dedup,
        is_circle=circle,
        flat_pieces=flat_pieces,
    )


def count_branches_with_min_slope(g, s, partition=None, norms=None):
    """Branches where sup|g'| >= s, with the C^r counting bound.

    bound = C(r', g) s^{-1/(r'-1)} + 1 with C = ||d^{r'} g||_inf^{1/(r'-1)},
    multiplied by ||g'||_inf on the circle (extra injectivity cuts).
    """
    if s <= 0:
        raise ValueError("s must be positive")
    part = partition or monotone_branches(g)
    norms = norms or estimate_norms(g)
    count = sum(1 for br in part.branches if br.sup_slope >= s)
    rprime = min(2.0, g.smoothness_r)
    d_rp = norms.sup_abs_deriv[2] if rprime == 2.0 else norms.sup_abs_deriv["r"]
    C = d_rp ** (1.0 / (rprime - 1.0)) if d_rp > 0 else 0.0
    bound = C * s ** (-1.0 / (rprime - 1.0)) + 1.0
    if g.domain.is_circle:
        bound *= norms.sup_abs_deriv[1]
    return count, {
        "count": count,
        "bound": bound,
        "C": C,
        "rprime": rprime,
        "within_bound": count <= bound + 1e-9,
    }


def branch_preimages(g, partition, c, tol=1e-13):
    """Solutions of g(x) = c, one per branch where c is attained.

    Circle maps: on a branch interior g never crosses the marked point,
    so g mod 1 is continuous and monotone there; the bracket check works
    directly on reduced values.
    """
    circle = g.domain.is_circle
    roots = []
    for br in partition.branches:
        lo = br.a + 1e-14
        hi = br.a + br.length - 1e-14
        def u(t):
            return float(g.eval(t % 1.0 if circle else t))
        ulo, uhi = u(lo), u(hi)
        a, b = (ulo, uhi) if ulo <= uhi else (uhi, ulo)
        if not (a - tol <= c <= b + tol):
            continue
        if not (a <= c <= b):
            # grazing contact at branch end; clamp
            roots.append(lo if abs(ulo - c) < abs(uhi - c) else hi)
            continue
        try:
            t = brentq(lambda t: u(t) - c, lo, hi, xtol=tol)
        except ValueError as exc:
            raise InverseNotBracketed(
                f"target {c} not bracketed on branch [{br.a}, {br.b})") from exc
        roots.append(t % 1.0 if circle else t)
    return roots


def refine_branches(g, n, tol=1e-12, grid_size=8192):
    """The join J^n = v_{i<n} g^{-i} J via branch-wise pullback of cuts."""
    base = monotone_branches(g, tol=tol, grid_size=grid_size)
    if n == 1:
        return base
    circle = g.domain.is_circle
    cuts = {round(p % 1.0 if circle else p, 13) for p, _ in base.cut_points}
    frontier = set(cuts)
    for _ in range(n - 1):
        new = set()
        for c in frontier:
            for x in branch_preimages(g, base, c):
                new.add(round(x % 1.0 if circle else x, 13))
        frontier = new - cuts
        cuts |= new

    pts = sorted(cuts)
    branches = []
    if circle:
        segs = [(pts[i], pts[i + 1] if i + 1 < len(pts) else pts[0] + 1.0)
                for i in range(len(pts))]
    else:
        pts = sorted({0.0, 1.0} | set(pts))
        segs = list(zip(pts, pts[1:]))
    for lo, hi in segs:
        if hi - lo <= 100 * tol:
            continue
        mid = (lo + hi) / 2.0
        midr = mid % 1.0 if circle else mid
        sgn = 1.0
        ok = True
        y = midr
        for _ in range(n):
            d = float(g.deriv(1, y))
            if d == 0.0:
                ok = False
                break
            sgn *= np.sign(d)
            y = float(g.eval(y))
        if not ok:
            continue
        branches.append(Branch(
            a=lo % 1.0 if circle else lo, length=hi - lo,
            sign=int(sgn), sup_slope=float("nan")))
    return BranchPartition(
        map_name=f"{g.name}^{n}-join",
        branches=branches,
        cut_points=[(p, "pullback") for p in pts],
        is_circle=circle,
        flat_pieces=base.flat_pieces,
    )


def branch_lengths(partition):
    return np.array([br.length for br in partition.branches])
