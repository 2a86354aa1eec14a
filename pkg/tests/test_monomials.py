import pytest

from blregion.degrees import TriDegree
from blregion.monomials import (
    ProductError,
    degree_of,
    display,
    make_gamma,
    make_positive,
    make_q,
    module_action,
    multiply,
)
from blregion.rules import parse_monomial


def test_degrees_of_named_classes(cat):
    assert degree_of(cat, make_q(cat, 0, "h_1^{4+k}", 0)) == TriDegree(5, 3, 5)
    assert degree_of(cat, make_q(cat, 3, "h_1^{4+k}", 0)) == TriDegree(8, 3, 8)
    assert degree_of(cat, make_gamma(cat, 0, 1)) == TriDegree(0, 0, 2)
    m = make_positive(cat, rho=3, tau=1, family="P^k h_1", k=1)
    assert degree_of(cat, m) == TriDegree(6, 5, 1)


def test_h0_h1_vanishing(cat):
    assert make_positive(cat, h0=1, h1=1) is None
    assert multiply(cat, make_positive(cat, h0=1), make_positive(cat, h1=3)) is None


def test_tau_torsion_powers(cat):
    assert make_positive(cat, tau=1, h1=4) is None
    assert make_positive(cat, tau=1, h1=3) is not None


def test_family_heights(cat):
    assert make_positive(cat, family="P^k h_1", k=1, h1=2) is not None  # P h_1^3
    assert make_positive(cat, family="P^k h_1", k=1, h1=3) is None      # P h_1^4 = 0
    assert make_positive(cat, family="P^k h_0 h_3", k=0, h0=3) is None  # h_0^4 h_3 = 0
    assert make_positive(cat, family="P^k c_0", k=0, h1=2) is None      # h_1^2 c_0 = 0


def test_edge_identification(cat):
    # h_0^2 h_2 = tau h_1^3, and its P-translates
    m = make_positive(cat, family="P^k h_2", k=0, h0=2)
    assert display(m) == "tau h_1^3"
    assert degree_of(cat, m) == TriDegree(3, 3, 2)
    m = make_positive(cat, family="P^k h_2", k=1, h0=2)
    assert display(m) == "tau P h_1^3"
    assert make_positive(cat, family="P^k h_2", k=0, h0=3) is None  # h_0^3 h_2 = 0


def test_p0_collapses_to_pure_power(cat):
    assert make_positive(cat, family="P^k h_1", k=0) == make_positive(cat, h1=1)


def test_module_action_examples(cat):
    g = make_gamma(cat, 1, 2)
    assert display(module_action(cat, "rho", g)) == "gamma/tau^2"
    assert module_action(cat, "tau", make_gamma(cat, 0, 1)) is None
    q = make_q(cat, 1, "h_1^{4+k}", 0)
    assert display(module_action(cat, "rho", q)) == "Q h_1^4"
    assert module_action(cat, "rho", make_q(cat, 0, "h_1^{4+k}", 0)) is None
    assert module_action(cat, "tau", q) is None
    assert module_action(cat, "h_0", q) is None
    assert display(module_action(cat, "h_1", q)) == "Q/rho h_1^5"


def test_gamma_action_reduces_tau_divisions(cat):
    g = make_gamma(cat, 2, 3, family="P^k h_1", k=1)
    up = module_action(cat, "tau", g)
    assert up == make_gamma(cat, 2, 2, family="P^k h_1", k=1)
    # the tau-division at depth 1 is annihilated by tau
    assert module_action(cat, "tau", make_gamma(cat, 2, 1, family="P^k h_2", k=1)) is None


def test_gamma_needs_tau_free_content(cat):
    # torsion powers do not feed the gamma part
    assert make_gamma(cat, 1, 2, h1=4) is None
    assert make_gamma(cat, 1, 2, h1=3) is not None


def test_product_of_two_families_rejected(cat):
    a = make_positive(cat, family="P^k h_1", k=1)
    b = make_positive(cat, family="P^k h_2", k=1)
    with pytest.raises(ProductError):
        multiply(cat, a, b)


def test_display_parse_roundtrip(cat):
    samples = [
        make_positive(cat, rho=2, tau=1, h0=3),
        make_positive(cat, tau=3, family="P^k h_0 h_3", k=1, h0=2),
        make_positive(cat, rho=3, family="P^k h_2", k=2),
        make_gamma(cat, 3, 4, family="P^k c_0", k=0, h1=1),
        make_gamma(cat, 0, 5, h0=2),
        make_q(cat, 4, "h_1^{4+k}", 2),
    ]
    for m in samples:
        assert parse_monomial(cat, display(m)) == m


def test_sort_key_orders_cones(cat):
    pos = make_positive(cat, h1=1)
    gam = make_gamma(cat, 0, 1)
    q = make_q(cat, 0, "h_1^{4+k}", 0)
    assert sorted([q, gam, pos], key=lambda m: m.sort_key()) == [pos, gam, q]
