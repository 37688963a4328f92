"""Bounded reparametrizations: certificates, epsilon selection, splitting.

A reparametrization is a map sigma : [-1,1] -> I with nonvanishing
derivative whose image on ]-1,1] avoids the marked point 0 (the circle
injectivity convention).  Here sigma is stored as a polynomial in t
composed with a chain of affine self-maps of [-1,1]; compositions with
iterates of the dynamics are handled through jets, so every derivative
order that the certificates need is exact.

Certificates follow the definitions:
  bounded       max_{s in ]1,r]} ||d^s psi||_inf <= ||psi'||_inf / 6
  eps-bounded   bounded and ||psi'||_inf <= eps
  (n,eps)-bounded for g:  g^k o psi is eps-bounded for k = 0..n
Bounded implies the 3/2 distortion bound, which is what makes these
pieces usable for change-of-variable estimates.

The splitting operation covers [-1,1] with affine pieces iota_j so that
each gamma o iota_j is eps-bounded with |(gamma o iota_j)'(0)| >= eps/6,
at most 2 pieces are "plain" (full images count for the covering) and
the expanding pieces cover through their middle thirds; the piece count
stays below 6 (sup|gamma'|/eps + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotBounded
from .jets import jet_of_polynomial
from .maps import estimate_norms

__all__ = [
    "Reparametrization", "BoundednessCertificate", "affine_reparam",
    "check_bounded", "distortion_ratio", "choose_epsilon",
    "taylor_window_check", "split_reparam", "verify_split",
]


def _compose_affine(chain):
    """Fold affine self-maps (a, r), leftmost applied last: t -> A + R t."""
    A, R = 0.0, 1.0
    for a, r in chain:
        A, R = A + R * a, R * r
    return A, R


@dataclass
class Reparametrization:
    """sigma o (affine chain): a polynomial curve [-1,1] -> I.

    base_coeffs are ascending polynomial coefficients of sigma; chain
    holds affine self-maps (alpha, rho) of [-1,1], earliest first, so the
    full map is sigma(chain_1(chain_2(... t))).
    """

    base_coeffs: np.ndarray
    chain: list = field(default_factory=list)
    name: str = "sigma"

    def __post_init__(self):
        self.base_coeffs = np.asarray(self.base_coeffs, dtype=float)

    @property
    def theta(self):
        """The composed affine chain as (A, R)."""
        return _compose_affine(self.chain)

    def poly(self):
        """Coefficients of sigma o theta (ascending)."""
        A, R = self.theta
        p = np.polynomial.polynomial.Polynomial(self.base_coeffs)
        q = p(np.polynomial.polynomial.Polynomial([A, R]))
        return np.atleast_1d(q.coef)

    def child(self, alpha, rho, name=None):
        return Reparametrization(self.base_coeffs,
                                 self.chain + [(float(alpha), float(rho))],
                                 name or self.name)

    def point(self, t, domain=None):
        v = np.polynomial.polynomial.polyval(np.asarray(t, dtype=float),
                                             self.poly())
        return domain.reduce(v) if domain is not None else v

    def image(self):
        """Unreduced image interval of [-1,1] (polynomial extrema on grid)."""
        ts = np.linspace(-1.0, 1.0, 257)
        vals = self.point(ts)
        return float(np.min(vals)), float(np.max(vals))


def affine_reparam(center, slope, name="sigma"):
    """sigma(t) = center + slope * t."""
    return Reparametrization(np.array([center, slope]), [], name)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass
class BoundednessCertificate:
    sup_first_deriv: float
    sup_higher: dict            # {2: .., ..., 'r': ..} entries over ]1, r]
    eps: float
    is_bounded: bool
    is_eps_bounded: bool
    n_eps_bounded_up_to: int = 0
    min_first_deriv: float = float("nan")
    min_marked_distance: float = float("nan")
    per_k: list = field(default_factory=list)

    @property
    def distortion(self):
        return self.sup_first_deriv / self.min_first_deriv


_HOLDER_STRIDES = (1, 2, 4, 8, 16, 32, 64, 128, 256, 512)


def _composition_jets(sig, target_map, k, ts, order):
    jet = jet_of_polynomial(sig.poly(), ts, order)
    if target_map is not None:
        for _ in range(k):
            jet = target_map.jet_apply(jet)
    return jet


def _cert_from_jet(jet, ts, r, eps, domain=None, marked=0.0):
    K = jet.order
    d1 = np.abs(jet.deriv(1))
    sup1 = float(np.max(d1))
    min1 = float(np.min(d1))
    sup_higher = {}
    for s in range(2, K + 1):
        sup_higher[s] = float(np.max(np.abs(jet.deriv(s))))
    if r > K:  # fractional part: Hoelder quotient of d^K over dyadic strides
        dK = jet.deriv(K) if K >= 1 else jet.c[0]
        expo = r - K
        best = 0.0
        for stride in _HOLDER_STRIDES:
            if stride >= ts.shape[0]:
                break
            num = np.abs(dK[stride:] - dK[:-stride])
            den = np.abs(ts[stride:] - ts[:-stride]) ** expo
            best = max(best, float(np.max(num / den)))
        sup_higher["r"] = best
    worst_higher = max(sup_higher.values()) if sup_higher else 0.0
    is_bounded = worst_higher <= sup1 / 6.0 + 1e-15
    vals = jet.c[0]
    if domain is not None and domain.is_circle:
        v = vals % 1.0
        dist = np.minimum(v, 1.0 - v)
    else:
        dist = np.abs(vals - marked)
    # exclude t = -1 (the definition allows sigma(-1) = 0)
    min_marked = float(np.min(dist[1:])) if dist.shape[0] > 1 else float(dist[0])
    return BoundednessCertificate(
        sup_first_deriv=sup1,
        sup_higher=sup_higher,
        eps=eps,
        is_bounded=is_bounded,
        is_eps_bounded=is_bounded and sup1 <= eps * (1 + 1e-12),
        min_first_deriv=min1,
        min_marked_distance=min_marked,
    )


def check_bounded(sig, target_map=None, eps=np.inf, n=0, grid=1001):
    """Certificate for sigma and its compositions g^k o sigma, k <= n.

    Sups are taken over a grid of [-1,1] with derivatives from jets; the
    fractional order r entry is a Hoelder quotient over dyadic-stride
    point pairs.  n_eps_bounded_up_to is the largest k such that every
    composition up to k is eps-bounded (-1 if sigma itself fails).
    """
    r = target_map.smoothness_r if target_map is not None else 2.0
    order = max(2, int(math.floor(r)))
    ts = np.linspace(-1.0, 1.0, grid)
    domain = target_map.domain if target_map is not None else None

    jet = jet_of_polynomial(sig.poly(), ts, order)
    certs = []
    for k in range(n + 1):
        if k > 0:
            jet = target_map.jet_apply(jet)
        certs.append(_cert_from_jet(jet, ts, r, eps, domain))
    top = certs[0]
    up_to = -1
    for k, c in enumerate(certs):
        if c.is_eps_bounded:
            up_to = k
        else:
            break
    top.n_eps_bounded_up_to = up_to
    top.per_k = certs
    return top


def distortion_ratio(sig, target_map=None, k=0, grid=1001):
    """sup over sampled pairs of |psi'(t)| / |psi'(s)| for psi = g^k o sigma.

    Requires the composition to be bounded; bounded reparametrizations
    satisfy ratio <= 3/2.
    """
    r = target_map.smoothness_r if target_map is not None else 2.0
    order = max(2, int(math.floor(r)))
    ts = np.linspace(-1.0, 1.0, grid)
    jet = _composition_jets(sig, target_map, k, ts, order)
    cert = _cert_from_jet(jet, ts, r, np.inf,
                          target_map.domain if target_map else None)
    if not cert.is_bounded:
        raise NotBounded(
            f"distortion requested for an unbounded reparametrization "
            f"(sup1={cert.sup_first_deriv:.3g}, "
            f"worst higher={max(cert.sup_higher.values() or [0]):.3g})")
    return cert.distortion


# ---------------------------------------------------------------------------
# epsilon selection
# ---------------------------------------------------------------------------


def choose_epsilon(g, norms=None, grid_size=4096):
    """Largest dyadic eps with (2 eps)^(r'-1) < 1 / (2 ||g'||_{r-1}).

    r' = min(2, r).  The norm ||g'||_{r-1} comes from measured grid
    estimates (for integer r the order-r entry is the measured
    sup|d^floor(r) g|, not a propagated Hoelder bound).
    """
    norms = norms or estimate_norms(g, grid_size=grid_size)
    sups = dict(norms.sup_abs_deriv)
    if float(g.smoothness_r).is_integer():
        sups["r"] = sups[g.r_floor]
    N = max(sups.values())
    rp = min(2.0, g.smoothness_r)
    if N <= 0:
        return 0.25
    # (2 eps)^(rp-1) < 1/(2N)  <=>  eps < (1/2) (2N)^(-1/(rp-1))
    bound = 0.5 * (2.0 * N) ** (-1.0 / (rp - 1.0))
    e = 2.0 ** math.floor(math.log2(bound))
    while not (2 * e) ** (rp - 1.0) < 1.0 / (2.0 * N):
        e /= 2.0
    return min(e, 0.25)


def taylor_window_check(g, eps, samples=64, rng=None):
    """Sampled check of ||d^s(g^x_{2eps})||_inf <= 3 eps max(1, |g'(x)|).

    g^x_{2eps}(t) = g(x + 2 eps t); this is the Taylor-window bound that
    the epsilon inequality buys, and the reason pieces of that size can
    be re-bounded after one application of g.
    """
    rng = rng or np.random.default_rng(0)
    xs = rng.uniform(0.0, 1.0, samples)
    worst = np.inf
    ts = np.linspace(-1.0, 1.0, 65)
    order = max(2, g.r_floor)
    for x in xs:
        window = Reparametrization(np.array([x, 2.0 * eps]))
        jet = _composition_jets(window, g, 1, ts, order)
        rhs = 3.0 * eps * max(1.0, abs(float(g.deriv(1, x))))
        for s in range(1, order + 1):
            lhs = float(np.max(np.abs(jet.deriv(s))))
            worst = min(worst, rhs - lhs)
    return {"worst_margin": worst, "ok": worst >= -1e-12, "samples": samples}


# ---------------------------------------------------------------------------
# the splitting construction
# ---------------------------------------------------------------------------


def split_reparam(gamma, eps, target_map=None, power=0, grid=1001,
                  rate_cap=None):
    """Affine pieces making gamma (or g^power o gamma) eps-bounded.

    Returns {"L_plain": [(alpha, rho), ...], "L_exp": [...]} with the
    covering convention: plain pieces count with their full images,
    expanding pieces with the middle third.  Piece rate is
    min(1/2, (2/3) eps / sup|gamma'|) so that eps-boundedness and the
    eps/6 center derivative both follow from the 3/2 distortion bound;
    an explicit rate_cap (the tree uses 1/100) shrinks pieces further.
    """
    r = target_map.smoothness_r if target_map is not None else 2.0
    order = max(2, int(math.floor(r)))
    ts = np.linspace(-1.0, 1.0, grid)
    jet = _composition_jets(gamma, target_map, power, ts, order)
    cert = _cert_from_jet(jet, ts, r, eps,
                          target_map.domain if target_map else None)
    if not cert.is_bounded:
        raise NotBounded("split requires a bounded reparametrization")
    K = cert.sup_first_deriv
    if K <= eps * (1 + 1e-12):
        return {"L_plain": [(0.0, 1.0)], "L_exp": [], "rate": 1.0, "sup1": K}

    rho = min(0.5, (2.0 / 3.0) * eps / K)
    if rate_cap is not None:
        rho = min(rho, rate_cap)
    exp_pieces = []
    c = -1.0 + rho
    step = 2.0 * rho / 3.0
    last = 1.0 - rho
    while c < last - 1e-15:
        exp_pieces.append((c, rho))
        c += step
    exp_pieces.append((last, rho))
    plain_pieces = [(-1.0 + rho, rho), (1.0 - rho, rho)]
    return {"L_plain": plain_pieces, "L_exp": exp_pieces,
            "rate": rho, "sup1": K}


def verify_split(gamma, eps, pieces, target_map=None, power=0, grid=1001,
                 sample=128, rng=None):
    """Post-hoc verification of the four splitting guarantees.

    (i) each piece eps-bounded with center derivative >= eps/6,
    (ii) plain full images plus expanding middle thirds cover [-1,1],
    (iii) #plain <= 2, #expanding <= 6 (sup|gamma'|/eps + 1),
    (iv) at most 100 pieces meet any eps-ball around a point of the image.
    """
    rng = rng or np.random.default_rng(0)
    r = target_map.smoothness_r if target_map is not None else 2.0
    order = max(2, int(math.floor(r)))
    ts = np.linspace(-1.0, 1.0, grid)
    jet = _composition_jets(gamma, target_map, power, ts, order)
    parent_cert = _cert_from_jet(jet, ts, r, eps,
                                 target_map.domain if target_map else None)

    all_pieces = [(a, rho, "plain") for a, rho in pieces["L_plain"]] + \
                 [(a, rho, "exp") for a, rho in pieces["L_exp"]]
    worst_center = np.inf
    worst_eps_margin = np.inf
    bounded_ok = True
    tloc = np.linspace(-1.0, 1.0, 129)
    for a, rho, _ in all_pieces:
        child = gamma.child(a, rho)
        cj = _composition_jets(child, target_map, power, tloc, order)
        cc = _cert_from_jet(cj, tloc, r, eps,
                            target_map.domain if target_map else None)
        bounded_ok &= cc.is_bounded
        worst_eps_margin = min(worst_eps_margin, eps - cc.sup_first_deriv)
        center = abs(float(cj.deriv(1)[64]))
        worst_center = min(worst_center, center - eps / 6.0)

    cover = np.zeros_like(ts, dtype=bool)
    for a, rho in pieces["L_plain"]:
        cover |= np.abs(ts - a) <= rho + 1e-12
    for a, rho in pieces["L_exp"]:
        cover |= np.abs(ts - a) <= rho / 3.0 + 1e-12
    covering_ok = bool(np.all(cover))

    n_exp_bound = 6.0 * (parent_cert.sup_first_deriv / eps + 1.0)
    counts_ok = (len(pieces["L_plain"]) <= 2
                 and len(pieces["L_exp"]) <= n_exp_bound + 1e-9)

    # multiplicity near sampled image points (on the composed curve)
    curve_vals = jet.c[0]
    circle = target_map is not None and target_map.domain.is_circle
    idx = rng.integers(0, ts.shape[0], sample)
    worst_mult = 0
    for i in idx:
        x = curve_vals[i]
        count = 0
        for a, rho, _ in all_pieces:
            mask = np.abs(ts - a) <= rho + 1e-12
            d = np.abs(curve_vals[mask] - x)
            if circle:
                dm = d % 1.0
                d = np.minimum(dm, 1.0 - dm)
            if d.size and np.min(d) <= eps:
                count += 1
        worst_mult = max(worst_mult, count)

    return {
        "i_bounded_ok": bounded_ok,
        "i_eps_margin": worst_eps_margin,
        "i_center_margin": worst_center,
        "ii_covering_ok": covering_ok,
        "iii_counts_ok": counts_ok,
        "iii_n_plain": len(pieces["L_plain"]),
        "iii_n_exp": len(pieces["L_exp"]),
        "iii_exp_bound": n_exp_bound,
        "iv_max_multiplicity": worst_mult,
        "iv_ok": worst_mult <= 100,
    }
