import pytest

from blregion.degrees import TriDegree, Window
from blregion.monomials import degree_of, make_gamma, make_positive, make_q
from blregion.rules import (
    parse_monomial,
    parse_rule_line,
    seed_rules,
)

# Degree formulas of the seeded differential sources, frozen. Each entry:
# (label fragment, page at k, source degree at k, k_min).
SEED_DEGREES = [
    ("d1 tau^{2k+1}", lambda k: 1, lambda k: TriDegree(0, 0, -(2 * k + 1)), 0),
    ("d2 tau^{4k+2}", lambda k: 2, lambda k: TriDegree(0, 0, -(4 * k + 2)), 0),
    ("d3 tau^{4k+4}", lambda k: 3, lambda k: TriDegree(0, 0, -(4 * k + 4)), 0),
    ("d1 gamma/(rho tau^{2k+1})", lambda k: 1, lambda k: TriDegree(1, 0, 2 * k + 3), 0),
    ("d2 gamma/(rho^2 tau^{4k+2})", lambda k: 2, lambda k: TriDegree(2, 0, 4 * k + 5), 0),
    ("d3 gamma/(rho^3 tau^{4k+4})", lambda k: 3, lambda k: TriDegree(3, 0, 4 * k + 8), 0),
    ("d3 tau^3 P^k h_0^3 h_3", lambda k: 3,
     lambda k: TriDegree(8 * k + 7, 4 * k + 4, 4 * k + 1), 0),
    ("d3 tau^3 P^k h_1 c_0", lambda k: 3,
     lambda k: TriDegree(8 * k + 9, 4 * k + 4, 4 * k + 3), 0),
    ("d{4k-1} Q/rho^{4k-1} h_1^{4k}", lambda k: 4 * k - 1,
     lambda k: TriDegree(8 * k, 4 * k - 1, 8 * k), 1),
    ("d{4k} Q/rho^{4k} h_1^{4k+1}", lambda k: 4 * k,
     lambda k: TriDegree(8 * k + 2, 4 * k, 8 * k + 2), 1),
]


def test_seed_rule_set_matches_frozen_degrees(cat):
    rules = seed_rules(cat)
    assert len(rules) == len(SEED_DEGREES)
    by_label = {r.label: r for r in rules}
    for frag, page_of, deg_of, k_min in SEED_DEGREES:
        matches = [r for r in by_label.values() if r.label.startswith(frag)]
        assert len(matches) == 1, frag
        rule = matches[0]
        assert rule.k_min == k_min
        for k in range(k_min, k_min + 3):
            inst = rule.instance(cat, k)
            assert inst.page == page_of(k)
            assert degree_of(cat, inst.source) == deg_of(k)
            if inst.target is not None:
                tdeg = degree_of(cat, inst.target)
                assert tdeg == deg_of(k) + TriDegree(-1, 1, 0)
                # the filtration jump equals the page number
                assert inst.target.filtration() - inst.source.filtration() == inst.page


def test_specific_rule_values(cat):
    rules = {r.label.split(" -> ")[0]: r for r in seed_rules(cat)}
    inst = rules["d3 tau^3 P^k h_0^3 h_3"].instance(cat, 0)
    assert degree_of(cat, inst.source) == TriDegree(7, 4, 1)
    assert inst.target == make_positive(cat, rho=3, tau=1, family="P^k h_1", k=1)
    inst = rules["d3 gamma/(rho^3 tau^{4k+4})"].instance(cat, 0)
    assert inst.target is None
    inst = rules["d{4k-1} Q/rho^{4k-1} h_1^{4k}"].instance(cat, 1)
    assert inst.page == 3
    assert inst.source == make_q(cat, 3, "h_1^{4+k}", 0)
    assert inst.target == make_gamma(cat, 0, 3, h0=2, family="P^k h_0 h_3", k=0)
    inst = rules["d{4k} Q/rho^{4k} h_1^{4k+1}"].instance(cat, 1)
    assert inst.page == 4
    assert inst.target == make_gamma(cat, 0, 4, family="P^k h_1", k=1)


def test_monomial_expression_parser(cat):
    m = parse_monomial(cat, "tau^{2k+1}", k=3)
    assert m == make_positive(cat, tau=7)
    m = parse_monomial(cat, "rho^2 tau^{4k+1} h_1", k=1)
    assert m == make_positive(cat, rho=2, tau=5, h1=1)
    m = parse_monomial(cat, "gamma/(rho^{4k-1} tau^2) P^{k} h_1", k=1)
    assert m == make_gamma(cat, 3, 2, family="P^k h_1", k=1)
    m = parse_monomial(cat, "Q/rho^{4k} h_1^{4k+1}", k=2)
    assert m == make_q(cat, 8, "h_1^{4+k}", 5)
    assert parse_monomial(cat, "0") is None
    with pytest.raises(ValueError):
        parse_monomial(cat, "h_9^2")


def test_rule_override_line(cat):
    rule = parse_rule_line(cat, "2 | tau^{4k+2} | rho^2 tau^{4k+1} h_1 | 0..2")
    inst = rule.instance(cat, 1)
    assert inst.page == 2
    assert inst.source == make_positive(cat, tau=6)
    assert inst.target == make_positive(cat, rho=2, tau=5, h1=1)
    assert rule.instance(cat, 3) is None  # k_max respected


def test_rule_instances_stay_inside_window(cat):
    w = Window(max_stem=10)
    for rule in seed_rules(cat):
        for inst in rule.instances_in(cat, w):
            assert w.stores(degree_of(cat, inst.source))
