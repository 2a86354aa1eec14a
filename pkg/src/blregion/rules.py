"""Seeded differential rules and the monomial/rule expression syntax.

The seeds are the tau-power differentials together with their negative-cone
companions, the two page-3 differentials off the tau^3-prefixed edge
families, and the two Q-tower differentials. Everything else the engine
knows is closure: Leibniz products, rho-tower transfer and annihilator
solving. Rules can also be read from an override file (one per line,
``page | source | target | k_range``) so tests can mutate the rule set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .catalog import Catalog
from .degrees import Window
from .monomials import (
    Cone,
    MonomialClass,
    degree_of,
    make_gamma,
    make_positive,
    make_q,
)


@dataclass(frozen=True)
class RuleInstance:
    page: int
    source: MonomialClass
    target: Optional[MonomialClass]  # None encodes a declared-zero differential
    label: str


@dataclass(frozen=True)
class DifferentialRule:
    """A k-parameterized source -> target rewrite on one page family."""

    label: str
    k_min: int
    page_of: Callable[[int], int]
    source_of: Callable[[Catalog, int], Optional[MonomialClass]]
    target_of: Callable[[Catalog, int], Optional[MonomialClass]]

    def instance(self, cat: Catalog, k: int) -> Optional[RuleInstance]:
        if k < self.k_min:
            return None
        src = self.source_of(cat, k)
        if src is None:
            return None
        return RuleInstance(self.page_of(k), src, self.target_of(cat, k), self.label)

    def instances_in(self, cat: Catalog, window: Window) -> Iterator[RuleInstance]:
        for k in range(self.k_min, self.k_min + window.stored_max_stem + window.max_f + 16):
            inst = self.instance(cat, k)
            if inst is None:
                break
            if window.stores(degree_of(cat, inst.source)):
                yield inst


def seed_rules(cat: Catalog) -> List[DifferentialRule]:
    """The seeded rule list; every other differential is inferred closure."""

    def tau_pow(k_to_exp, page, k_to_target, label, k_min=0):
        return DifferentialRule(
            label=label,
            k_min=k_min,
            page_of=lambda k: page,
            source_of=lambda c, k: make_positive(c, tau=k_to_exp(k)),
            target_of=k_to_target,
        )

    rules = [
        # tau-power differentials in the positive cone
        tau_pow(
            lambda k: 2 * k + 1, 1,
            lambda c, k: make_positive(c, rho=1, tau=2 * k, h0=1),
            "d1 tau^{2k+1} -> rho tau^{2k} h_0",
        ),
        tau_pow(
            lambda k: 4 * k + 2, 2,
            lambda c, k: make_positive(c, rho=2, tau=4 * k + 1, h1=1),
            "d2 tau^{4k+2} -> rho^2 tau^{4k+1} h_1",
        ),
        tau_pow(
            lambda k: 4 * k + 4, 3,
            lambda c, k: None,
            "d3 tau^{4k+4} -> 0",
        ),
        # their negative-cone companions
        DifferentialRule(
            label="d1 gamma/(rho tau^{2k+1}) -> gamma/tau^{2k+2} h_0",
            k_min=0,
            page_of=lambda k: 1,
            source_of=lambda c, k: make_gamma(c, 1, 2 * k + 1),
            target_of=lambda c, k: make_gamma(c, 0, 2 * k + 2, h0=1),
        ),
        DifferentialRule(
            label="d2 gamma/(rho^2 tau^{4k+2}) -> gamma/tau^{4k+3} h_1",
            k_min=0,
            page_of=lambda k: 2,
            source_of=lambda c, k: make_gamma(c, 2, 4 * k + 2),
            target_of=lambda c, k: make_gamma(c, 0, 4 * k + 3, h1=1),
        ),
        DifferentialRule(
            label="d3 gamma/(rho^3 tau^{4k+4}) -> 0",
            k_min=0,
            page_of=lambda k: 3,
            source_of=lambda c, k: make_gamma(c, 3, 4 * k + 4),
            target_of=lambda c, k: None,
        ),
        # page-3 differentials off the tau^3-prefixed edge families
        DifferentialRule(
            label="d3 tau^3 P^k h_0^3 h_3 -> rho^3 tau P^{k+1} h_1",
            k_min=0,
            page_of=lambda k: 3,
            source_of=lambda c, k: make_positive(c, tau=3, h0=2, family="P^k h_0 h_3", k=k),
            target_of=lambda c, k: make_positive(c, rho=3, tau=1, family="P^k h_1", k=k + 1),
        ),
        DifferentialRule(
            label="d3 tau^3 P^k h_1 c_0 -> rho^3 P^{k+1} h_2",
            k_min=0,
            page_of=lambda k: 3,
            source_of=lambda c, k: make_positive(c, tau=3, h1=1, family="P^k c_0", k=k),
            target_of=lambda c, k: make_positive(c, rho=3, family="P^k h_2", k=k + 1),
        ),
        # Q-tower truncations
        DifferentialRule(
            label="d{4k-1} Q/rho^{4k-1} h_1^{4k} -> gamma/tau^{4k-1} P^{k-1} h_0^3 h_3",
            k_min=1,
            page_of=lambda k: 4 * k - 1,
            source_of=lambda c, k: make_q(c, 4 * k - 1, "h_1^{4+k}", 4 * k - 4),
            target_of=lambda c, k: make_gamma(c, 0, 4 * k - 1, h0=2, family="P^k h_0 h_3", k=k - 1),
        ),
        DifferentialRule(
            label="d{4k} Q/rho^{4k} h_1^{4k+1} -> gamma/tau^{4k} P^k h_1",
            k_min=1,
            page_of=lambda k: 4 * k,
            source_of=lambda c, k: make_q(c, 4 * k, "h_1^{4+k}", 4 * k - 3),
            target_of=lambda c, k: make_gamma(c, 0, 4 * k, family="P^k h_1", k=k),
        ),
    ]
    return rules


# --- monomial and rule expression parsing (override files, tests) ---------------

_LINEAR = re.compile(r"^(?:(?P<coef>\d*)k)?(?P<sign>[+-])?(?P<const>\d+)?$")


def _eval_linear(text: str, k: int) -> int:
    """Evaluate an exponent expression like '3', 'k', '2k+1', '4k-1' at k."""
    t = text.strip().replace(" ", "")
    m = _LINEAR.match(t)
    if not m or (m.group("coef") is None and m.group("const") is None and "k" not in t):
        raise ValueError(f"cannot parse linear expression {text!r}")
    coef = 0
    if "k" in t:
        coef = int(m.group("coef")) if m.group("coef") else 1
    const = int(m.group("const")) if m.group("const") else 0
    if m.group("sign") == "-":
        const = -const
    return coef * k + const


_FACTOR = re.compile(r"(rho|tau|h_\d|c_0|P)(?:\^(?:(\d+)|\{([^}]*)\}))?")


def _eval_factors(text: str, k: int) -> Dict[str, int]:
    exps: Dict[str, int] = {}
    pos = 0
    for m in _FACTOR.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse {text!r} near {text[pos:m.start()]!r}")
        pos = m.end()
        sym = m.group(1)
        if m.group(2) is not None:
            e = int(m.group(2))
        elif m.group(3) is not None:
            e = _eval_linear(m.group(3), k)
        else:
            e = 1
        exps[sym] = exps.get(sym, 0) + e
    if text[pos:].strip():
        raise ValueError(f"cannot parse {text!r} near {text[pos:]!r}")
    return exps


def _resolve_family(cat: Catalog, exps: Dict[str, int]) -> Tuple[str, int, int, int]:
    """Map symbol exponents to (family, k, h0_bump, h1_bump)."""
    p = exps.pop("P", 0)
    h0 = exps.pop("h_0", 0)
    h1 = exps.pop("h_1", 0)
    h2 = exps.pop("h_2", 0)
    h3 = exps.pop("h_3", 0)
    c0 = exps.pop("c_0", 0)
    if exps:
        raise ValueError(f"unknown symbols {sorted(exps)}")
    if h3:
        if h3 != 1 or h0 < 1 or h1 or c0 or h2:
            raise ValueError("unsupported h_3 monomial")
        return "P^k h_0 h_3", p, h0 - 1, 0
    if h2:
        if h2 != 1 or h1 or c0:
            raise ValueError("unsupported h_2 monomial")
        return "P^k h_2", p, h0, 0
    if c0:
        if c0 != 1 or h0:
            raise ValueError("unsupported c_0 monomial")
        return "P^k c_0", p, 0, h1
    if p:
        if h1 < 1 or h0:
            raise ValueError("unsupported P monomial")
        return "P^k h_1", p, 0, h1 - 1
    return "", 0, h0, h1


def parse_monomial(cat: Catalog, text: str, k: int = 0) -> Optional[MonomialClass]:
    """Parse an expression like 'tau^3 P^{k} h_0^3 h_3', 'gamma/(rho^2 tau^{4k+2}) P^k h_1',
    'Q/rho^{4k} h_1^{4k+1}' or '0' at a concrete parameter value k."""
    text = text.strip()
    if text == "0":
        return None
    if text.startswith("Q"):
        rest = text[1:].strip()
        j = 0
        if rest.startswith("/"):
            div, _, rest = rest[1:].partition(" ")
            exps = _eval_factors(div, k)
            j = exps.pop("rho", 0)
            if exps:
                raise ValueError(f"bad Q divisor in {text!r}")
        exps = _eval_factors(rest, k)
        h1 = exps.pop("h_1", 0)
        if exps or h1 < 4:
            raise ValueError(f"bad Q class {text!r}")
        return make_q(cat, j, "h_1^{4+k}", h1 - 4)
    if text.startswith("gamma/"):
        rest = text[len("gamma/"):]
        if rest.startswith("("):
            div, _, rest = rest[1:].partition(")")
        else:
            div, _, rest = rest.partition(" ")
        dexp = _eval_factors(div, k)
        j, i = dexp.pop("rho", 0), dexp.pop("tau", 0)
        if dexp:
            raise ValueError(f"bad gamma divisor in {text!r}")
        fam, fk, h0, h1 = _resolve_family(cat, _eval_factors(rest, k))
        return make_gamma(cat, j, i, h0, h1, fam, fk)
    exps = _eval_factors(text, k)
    rho = exps.pop("rho", 0)
    tau = exps.pop("tau", 0)
    fam, fk, h0, h1 = _resolve_family(cat, exps)
    return make_positive(cat, rho, tau, h0, h1, fam, fk)


def parse_rule_line(cat: Catalog, line: str) -> DifferentialRule:
    """Parse ``page | source | target | k_min[..k_max]`` into a rule."""
    parts = [p.strip() for p in line.split("|")]
    if len(parts) not in (3, 4):
        raise ValueError(f"rule line needs 3 or 4 fields: {line!r}")
    page_text, source_text, target_text = parts[:3]
    k_min, k_max = 0, None
    if len(parts) == 4 and parts[3]:
        lo, _, hi = parts[3].partition("..")
        k_min = int(lo)
        k_max = int(hi) if hi else None

    def source_of(c, k, _t=source_text):
        if k_max is not None and k > k_max:
            return None
        return parse_monomial(c, _t, k)

    return DifferentialRule(
        label=line.strip(),
        k_min=k_min,
        page_of=lambda k, _t=page_text: _eval_linear(_t, k),
        source_of=source_of,
        target_of=lambda c, k, _t=target_text: parse_monomial(c, _t, k),
    )


def load_rule_overrides(cat: Catalog, path) -> List[DifferentialRule]:
    rules = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                rules.append(parse_rule_line(cat, line))
    return rules
