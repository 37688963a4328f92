"""Boundedness certificates, epsilon selection, distortion, splitting."""

import math

import numpy as np
import pytest

from acim1d.errors import NotBounded
from acim1d.maps import make_map, power_map
from acim1d.reparam import (
    Reparametrization, affine_reparam, check_bounded, choose_epsilon,
    distortion_ratio, split_reparam, taylor_window_check, verify_split,
)

EPS = 1.0 / 16.0


def test_affine_eps_bounded():
    sig = affine_reparam(0.4, EPS / 2.0)
    cert = check_bounded(sig, eps=EPS)
    assert cert.is_bounded and cert.is_eps_bounded
    assert math.isclose(cert.sup_first_deriv, EPS / 2.0, rel_tol=1e-12)
    assert not cert.sup_higher or max(cert.sup_higher.values()) == 0.0


def test_affine_bounded_not_eps_bounded():
    sig = affine_reparam(0.4, 2.0 * EPS)
    cert = check_bounded(sig, eps=EPS)
    assert cert.is_bounded and not cert.is_eps_bounded


def test_quadratic_unbounded():
    # sigma(t) = c + eps t + eps t^2: sup|sigma''| = 2 eps, sup|sigma'| <= 3 eps,
    # and 2 eps > 3 eps / 6, so the boundedness inequality fails.
    sig = Reparametrization(np.array([0.5, EPS, EPS]))
    cert = check_bounded(sig, eps=EPS)
    assert math.isclose(cert.sup_higher[2], 2.0 * EPS, rel_tol=1e-12)
    assert math.isclose(cert.sup_first_deriv, 3.0 * EPS, rel_tol=1e-10)
    assert not cert.is_bounded


def test_distortion_affine_is_one():
    assert math.isclose(distortion_ratio(affine_reparam(0.3, 0.01)), 1.0,
                        rel_tol=1e-12)


def test_distortion_quadratic_exact():
    # sigma(t) = c + eps t + (eps/12) t^2: sigma' in [eps - eps/6, eps + eps/6],
    # ratio = (7/6)/(5/6) = 7/5 <= 3/2
    sig = Reparametrization(np.array([0.5, EPS, EPS / 12.0]))
    cert = check_bounded(sig, eps=EPS)
    assert cert.is_bounded
    ratio = distortion_ratio(sig)
    assert math.isclose(ratio, 7.0 / 5.0, rel_tol=1e-9)
    assert ratio <= 1.5 + 1e-9


def test_distortion_requires_bounded():
    sig = Reparametrization(np.array([0.5, EPS, EPS]))
    with pytest.raises(NotBounded):
        distortion_ratio(sig)


def test_choose_epsilon_norm_two():
    # (2 eps)^1 < 1/4 means eps < 1/8; largest dyadic with strict inequality
    # is 1/16 = 0.0625
    g = make_map("doubling")
    eps = choose_epsilon(g)
    assert eps == 2.0 ** -4


def test_choose_epsilon_affine_slope_one():
    from acim1d.maps import CIRCLE

    g = make_map("affine", c0=0.3, c1=1.0, domain=CIRCLE)
    eps = choose_epsilon(g)
    # ||g'||_{r-1} = 1 gives eps < 1/4; the 0.25 ceiling keeps it dyadic
    assert eps <= 0.25
    assert (2 * eps) < 1.0 / 2.0


def test_taylor_window_bound():
    g = make_map("doubling")
    rep = taylor_window_check(g, choose_epsilon(g))
    assert rep["ok"]
    g2 = make_map("logistic")
    rep2 = taylor_window_check(g2, choose_epsilon(g2))
    assert rep2["ok"]


def test_split_identity_when_already_eps_bounded():
    sig = affine_reparam(0.4, EPS)
    pieces = split_reparam(sig, EPS)
    assert pieces["L_plain"] == [(0.0, 1.0)]
    assert pieces["L_exp"] == []


def test_split_affine_three_eps():
    sig = affine_reparam(0.4, 3.0 * EPS)
    pieces = split_reparam(sig, EPS)
    rep = verify_split(sig, EPS, pieces)
    assert rep["i_bounded_ok"]
    assert rep["i_eps_margin"] >= -1e-12
    assert rep["i_center_margin"] >= 0.0
    assert rep["ii_covering_ok"]
    assert rep["iii_counts_ok"]
    assert len(pieces["L_exp"]) <= 6 * (3 + 1)
    assert rep["iv_ok"]


def test_split_nonaffine_five_eps():
    # bounded curve with sup|gamma'| ~ 5 eps
    sig = Reparametrization(np.array([0.5, 5.0 * EPS, 5.0 * EPS / 13.0]))
    cert = check_bounded(sig, eps=EPS)
    assert cert.is_bounded
    pieces = split_reparam(sig, EPS)
    rep = verify_split(sig, EPS, pieces)
    assert rep["i_bounded_ok"] and rep["ii_covering_ok"] and rep["iii_counts_ok"]
    assert rep["i_eps_margin"] >= -1e-12
    assert rep["i_center_margin"] >= 0.0
    assert rep["iv_ok"]


def test_split_requires_bounded():
    sig = Reparametrization(np.array([0.5, EPS, EPS]))
    with pytest.raises(NotBounded):
        split_reparam(sig, EPS)


def test_composition_certificates_through_map():
    # an eps-bounded affine seed stays bounded through one application of
    # the doubling map (derivative doubles, higher orders stay zero)
    g = make_map("doubling")
    eps = choose_epsilon(g)
    sig = affine_reparam(0.37, eps / 4.0)
    cert = check_bounded(sig, g, eps, n=2)
    assert cert.per_k[0].is_eps_bounded
    assert math.isclose(cert.per_k[1].sup_first_deriv, eps / 2.0, rel_tol=1e-10)
    assert cert.n_eps_bounded_up_to == 2
    assert math.isclose(cert.per_k[2].sup_first_deriv, eps, rel_tol=1e-10)


def test_marked_point_distance_recorded():
    g = make_map("doubling")
    sig = affine_reparam(0.37, 0.01)
    cert = check_bounded(sig, g, 0.0625, n=0)
    assert cert.min_marked_distance > 0.3


def test_logistic_power_window_bounded():
    # pieces of size ~eps stay bounded through one application of g
    g = power_map(make_map("logistic"), 2)
    eps = choose_epsilon(g)
    sig = affine_reparam(0.3, eps / 2.0)
    cert = check_bounded(sig, g, eps, n=1)
    assert cert.per_k[0].is_eps_bounded
    assert cert.per_k[1].is_bounded
