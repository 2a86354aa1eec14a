"""The rho-Bockstein engine: rule seeding, Leibniz closure, page turning.

Differentials are stored as values on basis monomials; matrices are only
materialized per degree when a page is turned. A page differential is
resolved from, in order: seeded rules, filtration or empty-target vanishing,
the positive-cone factorization oracle, tensor factorizations of gamma
classes through ruled pure-gamma divisors, annihilator relations
(differentiating tau^n * x = 0 and solving), h0/h1 Leibniz transfer and
rho-tower transfer. Anything still unresolved falls under the engine's
declared closure assumption -- no differentials beyond the seeded ones and
their closure -- and is assigned zero with a log entry; the structural
checks and the census validate the assumption, while conflicting derivations
raise instead of guessing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from . import gf2
from .catalog import Catalog
from .cones import (
    E1Page,
    build_e1,
    enumerate_gamma_at,
    enumerate_positive_at,
    enumerate_q_at,
)
from .degrees import DIFFERENTIAL_SHIFT, TriDegree, Window
from .monomials import (
    Cone,
    MonomialClass,
    ProductError,
    degree_of,
    display,
    make_gamma,
    make_positive,
    module_action,
    multiply,
)
from .rules import DifferentialRule, RuleInstance, seed_rules


class EngineError(RuntimeError):
    pass


class ConflictError(EngineError):
    """Two derivations of the same differential disagree."""


_UNKNOWN = object()


class XorBasis:
    """Incremental F2 row space with combination tracking (pivot = low bit)."""

    def __init__(self):
        self.pivots: Dict[int, Tuple[int, int]] = {}

    def reduce(self, v: int, rec: int = 0) -> Tuple[int, int]:
        while v:
            p = v & -v
            hit = self.pivots.get(p)
            if hit is None:
                return v, rec
            v ^= hit[0]
            rec ^= hit[1]
        return 0, rec

    def add(self, v: int, rec: int) -> bool:
        v, rec = self.reduce(v, rec)
        if v == 0:
            return False
        self.pivots[v & -v] = (v, rec)
        return True


def solve_f2(columns: Sequence[int], rhs: int) -> Optional[int]:
    """One x (bitmask over columns) with XOR of chosen columns = rhs, or None."""
    basis = XorBasis()
    for i, c in enumerate(columns):
        basis.add(c, 1 << i)
    v, rec = basis.reduce(rhs, 0)
    return None if v else rec


@dataclass(frozen=True)
class Chain:
    """An F2 sum of basis monomials, split into stored and out-of-window terms."""

    terms: FrozenSet[MonomialClass] = frozenset()
    external: FrozenSet[MonomialClass] = frozenset()

    def __bool__(self) -> bool:
        return bool(self.terms) or bool(self.external)

    def __xor__(self, other: "Chain") -> "Chain":
        return Chain(self.terms ^ other.terms, self.external ^ other.external)

    def describe(self) -> str:
        if not self:
            return "0"
        parts = [display(m) for m in sorted(self.terms, key=lambda x: x.sort_key())]
        parts += [
            display(m) + " (outside window)"
            for m in sorted(self.external, key=lambda x: x.sort_key())
        ]
        return " + ".join(parts)


ZERO = Chain()


def chain_of(cat: Catalog, window: Window, monos: Iterable[Optional[MonomialClass]]) -> Chain:
    terms: Set[MonomialClass] = set()
    external: Set[MonomialClass] = set()
    for m in monos:
        if m is None:
            continue
        bucket = terms if window.stores(degree_of(cat, m)) else external
        bucket.symmetric_difference_update({m})
    return Chain(frozenset(terms), frozenset(external))


def multiply_chain(cat: Catalog, window: Window, factor: MonomialClass, ch: Chain) -> Chain:
    return chain_of(
        cat, window, (multiply(cat, factor, m) for m in itertools.chain(ch.terms, ch.external))
    )


# --- positive-cone oracle -------------------------------------------------------


class PositiveOracle:
    """Symbolic page differentials and survival for positive-cone monomials.

    Valid on pages 1..3 (the globally-run pages). The knowledge atoms are the
    tau-power rules, exact rule matches modulo tau^4 and rho factors, the
    declared permanent cycles, and empty-target vanishing; composite values
    follow by the Leibniz rule over the factorization rho^a tau^b z.
    """

    def __init__(self, cat: Catalog, rules: Sequence[DifferentialRule], k_span: int = 48):
        self.cat = cat
        self._fam_rules = self._index_family_rules(rules, k_span)
        self._d_memo: Dict[Tuple[MonomialClass, int], object] = {}
        self._alive_memo: Dict[Tuple[MonomialClass, int], bool] = {}

    def _index_family_rules(self, rules, k_span):
        """Positive-cone rule sources keyed by (family, k, rho, tau, h0, h1)."""
        index = {}
        for rule in rules:
            probe = rule.instance(self.cat, rule.k_min)
            if probe is None or probe.source.cone is not Cone.POSITIVE:
                continue
            if not probe.source.family:
                continue  # tau-power rules are built in
            for k in range(rule.k_min, rule.k_min + k_span):
                inst = rule.instance(self.cat, k)
                if inst is None:
                    break
                s = inst.source
                index[(s.family, s.k, s.rho, s.tau, s.h0, s.h1)] = inst
        return index

    def tau_power_d(self, b: int, r: int):
        """d_r(tau^b) as a monomial (None = zero) or _UNKNOWN off-schedule."""
        cat = self.cat
        if b == 0:
            return None
        if r == 1:
            return make_positive(cat, rho=1, tau=b - 1, h0=1) if b % 2 else None
        if r == 2:
            if b % 2:
                return _UNKNOWN  # class already dead, no page-2 value
            return make_positive(cat, rho=2, tau=b - 1, h1=1) if b % 4 == 2 else None
        if r == 3:
            return None if b % 4 == 0 else _UNKNOWN
        return _UNKNOWN  # pages >= 4 run on the rule schedule only

    def _underlying_d_zero(self, z: MonomialClass, r: int) -> bool:
        """True when d_r(z) = 0 is forced for a tau-free underlying monomial."""
        cat = self.cat
        if not z.family:
            return True  # coweight-0 classes: targets sit in empty negative coweight
        fam = cat.families[z.family]
        if fam.permanent_cycle and fam.perm_tau_prefix == 0:
            return True
        target = degree_of(cat, z) + DIFFERENTIAL_SHIFT
        if target.f < 0:
            return True
        return not any(m.rho == r for m in enumerate_positive_at(cat, target))

    def d(self, m: MonomialClass, r: int):
        """Resolved d_r(m) as a list of monomials, None for zero, or _UNKNOWN."""
        key = (m, r)
        if key not in self._d_memo:
            self._d_memo[key] = self._d_raw(m, r)
        return self._d_memo[key]

    def _wrap(self, a: int, out: Optional[MonomialClass]):
        if out is None:
            return None
        shifted = multiply(self.cat, make_positive(self.cat, rho=a), out)
        return [shifted] if shifted is not None else None

    def _d_raw(self, m: MonomialClass, r: int):
        cat = self.cat
        if m.cone is not Cone.POSITIVE:
            raise EngineError("positive oracle fed a negative-cone monomial")
        a, b = m.rho, m.tau
        target = degree_of(cat, m) + DIFFERENTIAL_SHIFT
        if target.coweight < 0 or not any(
            c.rho == a + r for c in enumerate_positive_at(cat, target)
        ):
            return None  # empty target degree: vanishing is forced
        if m.family:
            # exact rule match modulo rho and tau^4 factors (tau^4 is a cycle here)
            for strip in range(0, b // 4 + 1):
                inst = self._fam_rules.get((m.family, m.k, 0, b - 4 * strip, m.h0, m.h1))
                if inst is not None and inst.page == r:
                    if inst.target is None:
                        return None
                    out = multiply(cat, make_positive(cat, tau=4 * strip), inst.target)
                    return self._wrap(a, out)
            fam = cat.families[m.family]
            if fam.permanent_cycle and b >= fam.perm_tau_prefix:
                p = fam.perm_tau_prefix
                unit = replace(m, rho=0, tau=p)  # declared permanent cycle
                dt = self.tau_power_d(b - p, r)
                if dt is _UNKNOWN:
                    return _UNKNOWN
                return self._wrap(a, None if dt is None else multiply(cat, dt, unit))
            z = replace(m, rho=0, tau=0)
            if not self._underlying_d_zero(z, r):
                return _UNKNOWN
            dt = self.tau_power_d(b, r)
            if dt is _UNKNOWN:
                return _UNKNOWN
            return self._wrap(a, None if dt is None else multiply(cat, dt, z))
        z = replace(m, rho=0, tau=0)  # pure: d carried entirely by the tau power
        dt = self.tau_power_d(b, r)
        if dt is _UNKNOWN:
            return _UNKNOWN
        return self._wrap(a, None if dt is None else multiply(cat, dt, z))

    def alive(self, m: MonomialClass, r: int) -> bool:
        """Certified survival to page r; conservatively False on unknowns."""
        key = (m, r)
        if key in self._alive_memo:
            return self._alive_memo[key]
        self._alive_memo[key] = True  # break self-reference cycles
        ok = self._alive_raw(m, r)
        self._alive_memo[key] = ok
        return ok

    def _alive_raw(self, m: MonomialClass, r: int) -> bool:
        cat = self.cat
        deg = degree_of(cat, m)
        for q in range(1, r):
            val = self.d(m, q)
            if val is _UNKNOWN or val:
                return False
            if m.rho >= q:
                src_deg = deg + TriDegree(1, -1, 0)
                if src_deg.f < 0:
                    continue
                for s in enumerate_positive_at(cat, src_deg):
                    if s.rho != m.rho - q or not self.alive(s, q):
                        continue
                    sval = self.d(s, q)
                    if sval is not _UNKNOWN and sval and m in sval:
                        return False
        return True

    def certified_dead_by(self, m: MonomialClass, r: int) -> bool:
        """Positive certificate that m dies strictly before page r (pages <= 3)."""
        cat = self.cat
        deg = degree_of(cat, m)
        for q in range(1, min(r, 4)):
            val = self.d(m, q)
            if val is not _UNKNOWN and val:
                return True  # supports an earlier nonzero differential
            if m.rho >= q:
                src_deg = deg + TriDegree(1, -1, 0)
                if src_deg.f < 0:
                    continue
                for s in enumerate_positive_at(cat, src_deg):
                    if s.rho != m.rho - q or not self.alive(s, q):
                        continue
                    sval = self.d(s, q)
                    if sval is not _UNKNOWN and sval and m in sval:
                        return True  # certified hit
        return False


# --- pure gamma oracle ----------------------------------------------------------


class GammaPureOracle:
    """Differentials on the divided classes gamma/(rho^j tau^i) themselves."""

    def __init__(self, cat: Catalog, oracle: PositiveOracle):
        self.cat = cat
        self.oracle = oracle
        self._memo: Dict[Tuple[int, int, int], object] = {}

    def d(self, j: int, i: int, r: int):
        key = (j, i, r)
        if key not in self._memo:
            self._memo[key] = self._d_raw(j, i, r)
        return self._memo[key]

    def _d_raw(self, j: int, i: int, r: int):
        cat = self.cat
        if j < r:
            return None  # value would land in positive Bockstein filtration
        if r == 1 and i % 2 == 1:
            out = make_gamma(cat, j - 1, i + 1, h0=1)
            return [out] if out is not None else None
        if r == 2 and i % 4 == 2:
            out = make_gamma(cat, j - 2, i + 1, h1=1)
            return [out] if out is not None else None
        if r == 3 and i % 4 == 0:
            return None
        if r > 3:
            return _UNKNOWN
        src = make_gamma(cat, j, i)
        if src is None:
            return _UNKNOWN
        return annihilator_solve(cat, self.oracle, src, r)

    def alive(self, j: int, i: int, r: int) -> bool:
        for q in range(1, r):
            val = self.d(j, i, q)
            if val is _UNKNOWN or val:
                return False
        return True  # filtration-0 classes are never differential targets


def annihilator_solve(
    cat: Catalog,
    oracle: PositiveOracle,
    src: MonomialClass,
    r: int,
    alive=None,
):
    """Solve for d_r(src) by differentiating tau^n * src = 0.

    Returns a list of monomials, None for zero, or _UNKNOWN when the kernel
    of tau^n-multiplication leaves more than one possibility after the h0/h1
    annihilation filters. The relation lives on the page, so a nonzero
    right-hand side is only usable when the ``alive`` callback certifies it
    as a surviving page class (it may legitimately certify it dead, which
    flips the right-hand side to zero); with no callback such solves decline.
    """
    if src.cone is not Cone.GAMMA:
        return _UNKNOWN
    step = {1: 1, 2: 2, 3: 4}.get(r)
    if step is None:
        return _UNKNOWN
    n = src.tau
    while n % step:
        n += 1
    dt = oracle.tau_power_d(n, r)
    if dt is _UNKNOWN:
        return _UNKNOWN
    try:
        rhs = multiply(cat, dt, src) if dt is not None else None
    except ProductError:
        return _UNKNOWN
    if rhs is not None:
        status = alive(rhs) if alive is not None else None
        if status is None:
            return _UNKNOWN  # cannot place the relation on the page
        if status is False:
            rhs = None  # dead on the page: the relation reads zero

    target = degree_of(cat, src) + DIFFERENTIAL_SHIFT
    filt = src.filtration() + r
    if filt > 0:
        return None
    candidates = [
        m
        for m in enumerate_gamma_at(cat, target) + enumerate_q_at(cat, target)
        if m.filtration() == filt
    ]
    if alive is not None:
        candidates = [m for m in candidates if alive(m) is not False]
    if not candidates:
        if rhs is not None:
            raise ConflictError(
                f"tau-relation for {display(src)} on page {r} has no solution"
            )
        return None

    # Linear system: unknown d(src) = sum of candidates with (1) tau^n * d(src)
    # equal to d(tau^n) * src and (2) u * d(src) = 0 whenever u * src = 0.
    blocks: List[List[Optional[MonomialClass]]] = []
    tau_n = make_positive(cat, tau=n)
    blocks.append([multiply(cat, tau_n, c) for c in candidates])
    for u in ("h_0", "h_1"):
        if module_action(cat, u, src) is None:
            blocks.append([module_action(cat, u, c) for c in candidates])

    col_index: Dict[Tuple[int, MonomialClass], int] = {}
    for b_i, images in enumerate(blocks):
        for im in images:
            if im is not None and (b_i, im) not in col_index:
                col_index[(b_i, im)] = len(col_index)
    if rhs is not None and (0, rhs) not in col_index:
        return _UNKNOWN  # only solvable modulo boundary slack: decline
    columns = []
    for c_i in range(len(candidates)):
        v = 0
        for b_i, images in enumerate(blocks):
            im = images[c_i]
            if im is not None:
                v |= 1 << col_index[(b_i, im)]
        columns.append(v)
    rhs_vec = (1 << col_index[(0, rhs)]) if rhs is not None else 0

    sol = solve_f2(columns, rhs_vec)
    if sol is None:
        return _UNKNOWN  # solvable only up to boundary slack: decline
    kernel = gf2.F2Matrix(columns, len(col_index)).kernel_basis()
    if any(kv & ((1 << len(candidates)) - 1) for kv in kernel):
        return _UNKNOWN  # under-determined: leave to other mechanisms
    picked = [candidates[t] for t in range(len(candidates)) if (sol >> t) & 1]
    return picked or None


# --- page states ----------------------------------------------------------------


@dataclass
class DegreeState:
    degree: TriDegree
    basis: Tuple[MonomialClass, ...]
    cycles: List[int] = field(default_factory=list)      # RREF rows
    boundaries: List[int] = field(default_factory=list)  # RREF rows, inside cycles

    @classmethod
    def initial(cls, degree: TriDegree, basis: Tuple[MonomialClass, ...]) -> "DegreeState":
        return cls(degree, basis, [1 << t for t in range(len(basis))], [])

    def dim(self) -> int:
        return len(self.cycles) - len(self.boundaries)

    def reps(self) -> List[int]:
        return gf2.subquotient_basis(self.cycles, self.boundaries, len(self.basis))

    def vector(self, m: MonomialClass) -> int:
        return 1 << self.basis.index(m)

    def in_cycles(self, v: int) -> bool:
        rows, piv = gf2.rref(self.cycles, len(self.basis))
        return gf2.in_span(v, rows, piv)

    def reduce_mod_boundaries(self, v: int) -> int:
        rows, piv = gf2.rref(self.boundaries, len(self.basis))
        return gf2.reduce_vector(v, rows, piv)

    def alive_vector(self, v: int) -> bool:
        return self.in_cycles(v) and self.reduce_mod_boundaries(v) != 0

    def monomial_alive(self, m: MonomialClass) -> bool:
        return m in self.basis and self.alive_vector(self.vector(m))


@dataclass
class AssumptionLog:
    entries: List[Tuple[int, str]] = field(default_factory=list)

    def note(self, page: int, mono: MonomialClass) -> None:
        self.entries.append((page, display(mono)))


@dataclass
class BocksteinRun:
    cat: Catalog
    window: Window
    e1: E1Page
    states: Dict[TriDegree, DegreeState]
    #: page-true nonzero values (raw chains reduced modulo boundaries)
    differentials: Dict[int, Dict[MonomialClass, Chain]] = field(default_factory=dict)
    #: values as resolved, before the page projection
    raw_differentials: Dict[int, Dict[MonomialClass, Chain]] = field(default_factory=dict)
    assumptions: AssumptionLog = field(default_factory=AssumptionLog)
    pages_run: List[int] = field(default_factory=list)

    def state_at(self, d: TriDegree) -> Optional[DegreeState]:
        return self.states.get(d)

    def dimension(self, d: TriDegree) -> int:
        st = self.states.get(d)
        return st.dim() if st else 0

    def monomial_alive(self, m: MonomialClass) -> bool:
        st = self.states.get(degree_of(self.cat, m))
        return bool(st and st.monomial_alive(m))

    def chain_alive(self, ch: Chain) -> bool:
        if not ch.terms:
            return False
        st = self.states.get(degree_of(self.cat, next(iter(ch.terms))))
        if st is None:
            return False
        v = 0
        for m in ch.terms:
            v ^= st.vector(m)
        return st.alive_vector(v)


def _collect_states(cat: Catalog, e1: E1Page) -> Dict[TriDegree, DegreeState]:
    degrees: Set[TriDegree] = set()
    for sp in e1.spaces():
        degrees.update(sp.basis)
    return {d: DegreeState.initial(d, e1.at(d)) for d in sorted(degrees)}


# --- per-page resolution --------------------------------------------------------


class PageResolver:
    """Resolves d_r on all alive monomials of one page."""

    def __init__(self, run, r, rules, oracle, gpure, scheduled):
        self.run = run
        self.r = r
        self.rules = rules
        self.oracle = oracle
        self.gpure = gpure
        self.scheduled = scheduled  # True for pages >= 4: rules and transfer only
        self.values: Dict[MonomialClass, object] = {}
        self.rule_index = self._index_rules()

    def _index_rules(self) -> Dict[MonomialClass, RuleInstance]:
        index: Dict[MonomialClass, RuleInstance] = {}
        for rule in self.rules:
            for inst in rule.instances_in(self.run.cat, self.run.window):
                if inst.page != self.r:
                    continue
                if inst.source in index and index[inst.source].target != inst.target:
                    raise ConflictError(
                        f"two rules disagree on {display(inst.source)} at page {self.r}"
                    )
                index[inst.source] = inst
        return index

    def _chain(self, monos: Iterable[Optional[MonomialClass]]) -> Chain:
        return chain_of(self.run.cat, self.run.window, monos)

    def _target_candidates(self, m: MonomialClass) -> List[MonomialClass]:
        cat = self.run.cat
        target = degree_of(cat, m) + DIFFERENTIAL_SHIFT
        if target.f < 0:
            return []
        filt = m.filtration() + self.r
        if m.cone is Cone.POSITIVE:
            pool = enumerate_positive_at(cat, target)
        else:
            if filt > 0:
                return []
            pool = enumerate_gamma_at(cat, target) + enumerate_q_at(cat, target)
        return [c for c in pool if c.filtration() == filt]

    def resolve(self, m: MonomialClass):
        if m in self.values:
            return self.values[m]
        val = self._resolve_raw(m)
        if val is not _UNKNOWN:
            self.values[m] = val
        return val

    def _resolve_raw(self, m: MonomialClass):
        inst = self.rule_index.get(m)
        if inst is not None:
            return self._chain([inst.target] if inst.target else [])
        if not self._target_candidates(m):
            return ZERO  # empty target in the full E1: forced zero
        if m.cone is Cone.POSITIVE:
            val = self.oracle.d(m, self.r)
            return _UNKNOWN if val is _UNKNOWN else self._chain(val or [])
        if self.scheduled:
            return _UNKNOWN  # pages >= 4: transfer passes may still determine it
        if m.cone is Cone.GAMMA:
            return self._resolve_gamma(m)
        return _UNKNOWN  # Q classes: rules, vanishing or transfer

    def _resolve_gamma(self, m: MonomialClass):
        cat = self.run.cat
        j, i = m.rho, m.tau
        x = replace(m, cone=Cone.POSITIVE, rho=0, tau=0)
        for i2 in range(i, i + 8):
            dG = self.gpure.d(j, i2, self.r)
            if dG is _UNKNOWN or not self.gpure.alive(j, i2, self.r):
                continue
            y = make_positive(cat, 0, i2 - i, x.h0, x.h1, x.family, x.k)
            if y is None:
                continue
            G = make_gamma(cat, j, i2)
            if G is None or multiply(cat, y, G) != m:
                continue  # factorization must reproduce the class
            if not self.oracle.alive(y, self.r):
                continue
            dy = self.oracle.d(y, self.r)
            if dy is _UNKNOWN:
                continue
            try:
                total = ZERO
                for t in dG or []:
                    total ^= self._chain([multiply(cat, y, t)])
                for t in dy or []:
                    total ^= self._chain([multiply(cat, t, G)])
            except ProductError:
                continue
            return total
        solved = annihilator_solve(cat, self.oracle, m, self.r, alive=self._page_alive)
        return _UNKNOWN if solved is _UNKNOWN else self._chain(solved or [])

    def _page_alive(self, m: MonomialClass):
        """True/False page survival for stored monomials, None outside."""
        deg = degree_of(self.run.cat, m)
        if not self.run.window.stores(deg):
            return None
        st = self.run.states.get(deg)
        if st is None or m not in st.basis:
            return False
        return st.monomial_alive(m)

    # --- transfer passes (use neighbors' resolved values) ------------------------

    def transfer_pass(self, needed: Sequence[MonomialClass]) -> bool:
        changed = False
        cat, window = self.run.cat, self.run.window
        for m in needed:
            if m in self.values or m.cone is Cone.POSITIVE:
                continue
            for u, nb in self._bump_parents(m):
                if nb in self.values and self.run.monomial_alive(nb):
                    val = self.values[nb]
                    if isinstance(val, Chain):
                        try:
                            self.values[m] = multiply_chain(cat, window, u, val)
                        except ProductError:
                            continue
                        changed = True
                        break
            if m in self.values:
                continue
            if m.rho >= 1:
                shallow = replace(m, rho=m.rho - 1)
                if shallow in self.values and self.run.monomial_alive(shallow):
                    val = self.values[shallow]
                    if isinstance(val, Chain):
                        solved = self._rho_lift(m, val)
                        if solved is not _UNKNOWN:
                            self.values[m] = solved
                            changed = True
        return changed

    def _bump_parents(self, m: MonomialClass):
        cat = self.run.cat
        out = []
        if m.cone is Cone.Q and m.k >= 1:
            out.append((make_positive(cat, h1=1), replace(m, k=m.k - 1)))
        if m.h0 >= 1:
            out.append((make_positive(cat, h0=1), replace(m, h0=m.h0 - 1)))
        if m.h1 >= 1:
            out.append((make_positive(cat, h1=1), replace(m, h1=m.h1 - 1)))
        return out

    def _rho_lift(self, m: MonomialClass, shallow_value: Chain):
        """Solve rho * X = d_r(rho * m) for X = d_r(m).

        The solve runs over the filtration-correct candidate monomials of the
        target degree, modulo the current boundary subspaces on both sides;
        a kernel combination that is nonzero in the page leaves the value
        ambiguous and the lift declines.
        """
        run, cat, r = self.run, self.run.cat, self.r
        if shallow_value.external:
            return _UNKNOWN
        candidates = self._target_candidates(m)
        if not candidates:
            return ZERO if not shallow_value.terms else _UNKNOWN
        target_deg = degree_of(cat, m) + DIFFERENTIAL_SHIFT
        shallow_deg = target_deg + TriDegree(-1, 0, -1)
        t_state = run.states.get(target_deg)
        s_state = run.states.get(shallow_deg)
        if t_state is None or s_state is None:
            return _UNKNOWN
        rho = make_positive(cat, rho=1)
        cols = []
        for c in candidates:
            prod = multiply(cat, rho, c)
            vec = 0
            if prod is not None and prod in s_state.basis:
                vec = s_state.vector(prod)
            cols.append(s_state.reduce_mod_boundaries(vec))
        rhs = 0
        for t in shallow_value.terms:
            if t not in s_state.basis:
                return _UNKNOWN
            rhs ^= s_state.vector(t)
        rhs = s_state.reduce_mod_boundaries(rhs)
        sol = solve_f2(cols, rhs)
        if sol is None:
            raise ConflictError(
                f"rho-tower transfer inconsistent at {display(m)} page {r}"
            )
        for kv in gf2.F2Matrix(cols, len(s_state.basis)).kernel_basis():
            lifted = 0
            for c_i in range(len(candidates)):
                if (kv >> c_i) & 1:
                    lifted ^= t_state.vector(candidates[c_i])
            if t_state.reduce_mod_boundaries(lifted):
                return _UNKNOWN  # genuinely ambiguous in the page
        picked = [candidates[c_i] for c_i in range(len(candidates)) if (sol >> c_i) & 1]
        return self._chain(picked)


def _resolution_order(monos: Iterable[MonomialClass]) -> List[MonomialClass]:
    return sorted(monos, key=lambda m: (m.rho, m.k, m.h0 + m.h1, m.sort_key()))


def resolve_page(run, r, rules, oracle, gpure, scheduled) -> Dict[MonomialClass, Chain]:
    resolver = PageResolver(run, r, rules, oracle, gpure, scheduled)
    needed: Set[MonomialClass] = set()
    for st in run.states.values():
        if not st.dim():
            continue
        for rep in st.reps():
            for t, mono in enumerate(st.basis):
                if (rep >> t) & 1:
                    needed.add(mono)
    order = _resolution_order(needed)
    for m in order:
        resolver.resolve(m)
    for _ in range(8):
        if not resolver.transfer_pass(order):
            break
    out: Dict[MonomialClass, Chain] = {}
    for m in order:
        val = resolver.values.get(m, _UNKNOWN)
        if val is _UNKNOWN:
            run.assumptions.note(r, m)
            out[m] = ZERO
        else:
            out[m] = val
    return out


# --- page turning ---------------------------------------------------------------


def _filtration_jump_ok(cat: Catalog, m: MonomialClass, val: Chain, r: int) -> bool:
    want = m.filtration() + r
    return all(t.filtration() == want for t in itertools.chain(val.terms, val.external))


@dataclass
class _DegreeMatrix:
    reps: List[int]
    cols_page: List[int]   # image in target page coordinates (+ external bits)
    cols_raw: List[int]    # image in target E1 coordinates
    target: Optional[TriDegree]
    n_target_reps: int


def _page_matrices(run: BocksteinRun, diffs: Dict[MonomialClass, Chain], r: int):
    matrices: Dict[TriDegree, _DegreeMatrix] = {}
    rep_cache: Dict[TriDegree, List[int]] = {}
    for d, st in sorted(run.states.items()):
        if st.dim():
            rep_cache[d] = st.reps()
    for d, reps in rep_cache.items():
        st = run.states[d]
        target_deg = d + DIFFERENTIAL_SHIFT
        t_state = run.states.get(target_deg)
        t_reps = rep_cache.get(target_deg, [])
        externals: Dict[FrozenSet[MonomialClass], int] = {}
        cols_page, cols_raw = [], []
        for rep in reps:
            ch = ZERO
            for t, mono in enumerate(st.basis):
                if (rep >> t) & 1:
                    ch ^= diffs.get(mono, ZERO)
            raw = 0
            if ch.terms:
                if t_state is None:
                    raise EngineError(
                        f"value {ch.describe()} of d_{r} has no stored home degree"
                    )
                for mono in ch.terms:
                    raw ^= t_state.vector(mono)
                if not t_state.in_cycles(raw):
                    raise ConflictError(
                        f"d_{r} value {ch.describe()} is not a page-{r} class"
                    )
            page_vec = 0
            if raw and t_state is not None:
                reduced = t_state.reduce_mod_boundaries(raw)
                if reduced:
                    basis = XorBasis()
                    for t_i, tv in enumerate(t_reps):
                        basis.add(t_state.reduce_mod_boundaries(tv), 1 << t_i)
                    v, rec = basis.reduce(reduced, 0)
                    if v:
                        raise ConflictError(
                            f"d_{r} value {ch.describe()} escapes the page at {target_deg}"
                        )
                    page_vec = rec
            if ch.external:
                key = ch.external
                if key not in externals:
                    externals[key] = len(externals)
                page_vec |= 1 << (len(t_reps) + externals[key])
            cols_page.append(page_vec)
            cols_raw.append(raw)
        matrices[d] = _DegreeMatrix(reps, cols_page, cols_raw, target_deg, len(t_reps))
    return matrices


def _check_d_squared(run: BocksteinRun, matrices, r: int) -> None:
    for d, mat in matrices.items():
        nxt = matrices.get(mat.target)
        for c_i, col in enumerate(mat.cols_page):
            col &= (1 << mat.n_target_reps) - 1  # externals invisible downstream
            if not col or nxt is None:
                continue
            second = 0
            for t_i in range(mat.n_target_reps):
                if (col >> t_i) & 1:
                    second ^= nxt.cols_page[t_i]
            if second & ((1 << nxt.n_target_reps) - 1):
                raise ConflictError(
                    f"d_{r} o d_{r} != 0 on a class of degree {d}"
                )


def turn_page(run: BocksteinRun, diffs: Dict[MonomialClass, Chain], r: int) -> None:
    """Homology with respect to d_r, degree by degree."""
    matrices = _page_matrices(run, diffs, r)
    _check_d_squared(run, matrices, r)
    new_cycles: Dict[TriDegree, List[int]] = {}
    new_boundaries: Dict[TriDegree, List[int]] = {}
    for d, mat in matrices.items():
        kernel = gf2.F2Matrix(mat.cols_page, mat.n_target_reps + len(mat.reps)).kernel_basis()
        lifted = []
        for kv in kernel:
            v = 0
            for t in range(len(mat.reps)):
                if (kv >> t) & 1:
                    v ^= mat.reps[t]
            lifted.append(v)
        st = run.states[d]
        new_cycles[d] = gf2.rref(list(st.boundaries) + lifted, len(st.basis))[0]
        images = [v for v in mat.cols_raw if v]
        if images and mat.target is not None:
            new_boundaries.setdefault(mat.target, []).extend(images)
    for d, st in run.states.items():
        if d in new_cycles:
            st.cycles = new_cycles[d]
        elif st.dim() == 0:
            pass
        add = new_boundaries.get(d)
        if add:
            st.boundaries = gf2.rref(list(st.boundaries) + add, len(st.basis))[0]
            st.cycles = gf2.rref(list(st.cycles) + list(st.boundaries), len(st.basis))[0]


def leibniz_closure(
    run: BocksteinRun, r: int, rules: Optional[Sequence[DifferentialRule]] = None
) -> Dict[MonomialClass, Chain]:
    """Resolve d_r on every alive class of the current page.

    Rules seed the values; products, annihilator relations and tower
    transfer close them. Conflicting derivations raise ConflictError;
    classes the mechanisms cannot reach land in the run's assumption log
    (assigned zero under the declared closure assumption, validated later
    by the census) rather than being guessed.
    """
    rules = list(rules if rules is not None else seed_rules(run.cat))
    oracle = PositiveOracle(run.cat, rules)
    gpure = GammaPureOracle(run.cat, oracle)
    return resolve_page(run, r, rules, oracle, gpure, scheduled=r > 3)


def schedule_pages(cat: Catalog, window: Window, rules) -> List[int]:
    pages = {1, 2, 3}
    for rule in rules:
        for inst in rule.instances_in(cat, window):
            pages.add(inst.page)
    return sorted(pages)


def run_bockstein(
    cat: Catalog,
    window: Optional[Window] = None,
    rules: Optional[Sequence[DifferentialRule]] = None,
    extra_rules: Sequence[DifferentialRule] = (),
) -> BocksteinRun:
    """Run the Bockstein spectral sequence to its last scheduled page."""
    window = window or Window()
    rules = list(rules if rules is not None else seed_rules(cat)) + list(extra_rules)
    e1 = build_e1(cat, window)
    for sp in e1.spaces():
        sp.validate(cat)
    run = BocksteinRun(cat, window, e1, _collect_states(cat, e1))
    oracle = PositiveOracle(cat, rules)
    gpure = GammaPureOracle(cat, oracle)
    for r in schedule_pages(cat, window, rules):
        diffs = resolve_page(run, r, rules, oracle, gpure, scheduled=r > 3)
        for m, val in diffs.items():
            if val and not _filtration_jump_ok(cat, m, val, r):
                raise ConflictError(
                    f"d_{r}({display(m)}) = {val.describe()} breaks the filtration jump"
                )
        run.raw_differentials[r] = {m: v for m, v in diffs.items() if v}
        page_true: Dict[MonomialClass, Chain] = {}
        for m, v in diffs.items():
            reduced = _page_reduce(run, v)
            if reduced:
                page_true[m] = reduced
        run.differentials[r] = page_true
        turn_page(run, diffs, r)
        run.pages_run.append(r)
    return run


def _page_reduce(run: BocksteinRun, ch: Chain) -> Chain:
    """Project a raw value chain to the current page (mod boundaries)."""
    if not ch.terms:
        return ch
    st = run.states.get(degree_of(run.cat, next(iter(ch.terms))))
    if st is None:
        return ch
    vec = 0
    for m in ch.terms:
        vec ^= st.vector(m)
    vec = st.reduce_mod_boundaries(vec)
    terms = frozenset(st.basis[i] for i in range(len(st.basis)) if (vec >> i) & 1)
    return Chain(terms, ch.external)


# --- structural checks, census, inference ---------------------------------------


@dataclass
class Report:
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_structural_constraints(run: BocksteinRun) -> Report:
    """Rho-divisibility of negative-cone differentials, the negative-coweight
    vanishing wedge, and finiteness of coweight-1 h1 towers."""
    cat, window = run.cat, run.window
    rep = Report()

    # (a) towers carry their differentials: a negative-cone class in a
    # nonzero d_r must have its deeper rho-division in a nonzero d_r as
    # well, source-side and target-side, down to the window edge.
    for r, diffs in sorted(run.differentials.items()):
        target_monos = set()
        for val in diffs.values():
            target_monos.update(val.terms)
            target_monos.update(val.external)
        for src, val in sorted(diffs.items(), key=lambda kv: kv[0].sort_key()):
            if src.cone is Cone.POSITIVE:
                continue
            deeper = replace(src, rho=src.rho + 1)
            if window.stores(degree_of(cat, deeper)) and not diffs.get(deeper):
                rep.violations.append(
                    f"page {r}: {display(src)} supports a differential but its "
                    f"rho-division {display(deeper)} does not"
                )
            for mono in sorted(val.terms, key=lambda m: m.sort_key()):
                if mono.cone is Cone.POSITIVE:
                    continue
                deeper = replace(mono, rho=mono.rho + 1)
                ddeg = degree_of(cat, deeper)
                if not window.stores(ddeg):
                    continue  # tower leaves the window: boundary-marked
                if not window.stores(ddeg + TriDegree(1, -1, 0)):
                    continue  # its would-be source lies outside the window
                if deeper not in target_monos:
                    rep.violations.append(
                        f"page {r}: {display(mono)} receives a differential but its "
                        f"rho-division {display(deeper)} receives none"
                    )

    # The negative-coweight vanishing wedge. Divided classes riding the
    # stem-0 h0 tower are exempt: the underlying vanishing line only
    # constrains positive underlying stems.
    for d in sorted(run.states):
        if d.coweight < 0 and d.s > 0 and 2 * d.f > d.s + 3:
            for m in run.states[d].basis:
                under_stem = degree_of(cat, replace(m, cone=Cone.POSITIVE, rho=0, tau=0)).s
                if m.cone is Cone.GAMMA and under_stem == 0:
                    continue
                rep.violations.append(
                    f"E1 should vanish in {d}: negative coweight above the wedge "
                    f"line, found {display(m)}"
                )

    for d in sorted(run.states):
        if d.coweight != 1:
            continue
        st = run.states[d]
        for m in st.basis:
            if not st.monomial_alive(m):
                continue
            if window.near_boundary(d, reach=4):
                continue  # truncated towers near the edge are boundary-marked
            cur, height = m, 0
            ended_by_zero = False
            while height <= window.max_f:
                nxt = module_action(cat, "h_1", cur)
                if nxt is None:
                    ended_by_zero = True
                    break
                ndeg = degree_of(cat, nxt)
                nst = run.states.get(ndeg)
                if not window.stores(ndeg):
                    rep.warnings.append(
                        f"h1 tower on {display(m)} leaves the window unresolved"
                    )
                    break
                if nst is None or not nst.monomial_alive(nxt):
                    ended_by_zero = True
                    break
                cur, height = nxt, height + 1
            if not ended_by_zero and height > window.max_f:
                rep.violations.append(
                    f"unbounded h1 tower on {display(m)} in coweight 1"
                )
    return rep


def expected_census_dimension(d: TriDegree, max_f: int) -> int:
    """Survivor count predicted by the three-family census in one degree.

    The census covers coweight 0 strictly above the line f = s/2 - 1:
    the h0 tower on the zero stem, the wedge rho^j h1^k, and the truncated
    towers Q/rho^j h1^m with j <= m - 2 for m = 0 mod 4 and
    j <= 4*floor(m/4) - 1 otherwise (m >= 4).
    """
    if d.coweight != 0 or d.s < 0 or d.f < 0 or d.f > max_f:
        return 0
    if 2 * d.f <= d.s - 2:
        return 0
    count = 0
    if d.s == 0:
        count += 1  # h_0^f (the unit when f = 0)
    if d.f >= max(d.s, 1):
        count += 1  # rho^(f-s) h_1^f
    m, j = d.f + 1, d.s - d.f - 2
    if m >= 4 and j >= 0:
        bound = m - 2 if m % 4 == 0 else 4 * (m // 4) - 1
        if j <= bound:
            count += 1  # Q/rho^j h_1^m
    return count


def census_report(run: BocksteinRun) -> Report:
    """Exact comparison with the three-family census over the asserted region."""
    rep = Report()
    window = run.window
    for s in range(0, window.max_stem + 1):
        for f in range(0, window.max_f + 1):
            if 2 * f <= s - 2:
                continue
            d = TriDegree(s, f, s)
            want = expected_census_dimension(d, window.max_f)
            got = run.dimension(d)
            if want != got:
                rep.violations.append(
                    f"census mismatch in {d}: expected {want}, computed {got}"
                )
    if run.assumptions.entries:
        rep.notes.append(
            f"{len(run.assumptions.entries)} differentials assigned zero under the "
            "closure assumption (validated by this census)"
        )
    return rep


def infer_forced_differentials(
    cat: Catalog,
    rules: Optional[Sequence[DifferentialRule]] = None,
    k_range: Iterable[int] = range(0, 3),
    max_page: int = 12,
):
    """Locate the differentials forced by declared permanent rho-towers.

    A declared permanent cycle x whose degree violates the rho-inverted
    survivor criterion s + f - 2w = 0 can neither support a differential nor
    survive, so some rho^r x must be hit. Candidate sources are filtration-0
    classes one stem above; a candidate is excluded once its own fate is
    known, once it is certified dead, or once one of its rho-multiples is
    certified dead (sources of page-r differentials keep nonzero
    rho-multiples on the page). Inference iterates: each uniquely forced
    differential joins the knowledge for the next pass, mirroring how the
    first formula of a family feeds the second. Anything short of a unique
    candidate is reported, never guessed.
    """
    rules = list(rules if rules is not None else seed_rules(cat))
    oracle = PositiveOracle(cat, rules)
    known: Dict[MonomialClass, Tuple[int, MonomialClass]] = {}
    inferred: List[RuleInstance] = []
    rho1 = make_positive(cat, rho=1)

    def excluded(s_mono: MonomialClass, r: int, hit: MonomialClass) -> bool:
        if s_mono in known:
            kr, ktgt = known[s_mono]
            return (kr, ktgt) != (r, hit)
        if r <= 3:
            val = oracle.d(s_mono, r)
            if val is not _UNKNOWN and (not val or hit not in val):
                return True
        if oracle.certified_dead_by(s_mono, min(r, 4)):
            return True
        probe = s_mono
        for _ in range(4):
            probe = multiply(cat, rho1, probe)
            if probe is None or oracle.certified_dead_by(probe, min(r, 4)):
                return True  # a rho-multiple dies: no differential possible
        return False

    problems: List[str] = []
    for _pass in range(4):
        problems = []
        progressed = False
        for fam in sorted(cat.families.values(), key=lambda f: f.name):
            if not fam.permanent_cycle:
                continue
            for k in k_range:
                if k < fam.k_min:
                    continue
                x = make_positive(cat, tau=fam.perm_tau_prefix, family=fam.name, k=k)
                if x is None:
                    continue
                deg = degree_of(cat, x)
                if deg.s + deg.f - 2 * deg.w == 0:
                    continue
                candidates: List[Tuple[MonomialClass, int, MonomialClass]] = []
                for r in range(1, max_page + 1):
                    hit = make_positive(
                        cat, rho=r, tau=fam.perm_tau_prefix, family=fam.name, k=k
                    )
                    if hit is None:
                        continue
                    src_deg = degree_of(cat, hit) + TriDegree(1, -1, 0)
                    if src_deg.f < 0:
                        continue
                    for s_mono in enumerate_positive_at(cat, src_deg):
                        if s_mono.rho != 0 or excluded(s_mono, r, hit):
                            continue
                        candidates.append((s_mono, r, hit))
                if len(candidates) == 1:
                    s_mono, r, hit = candidates[0]
                    if s_mono not in known:
                        known[s_mono] = (r, hit)
                        inferred.append(
                            RuleInstance(r, s_mono, hit, f"forced by {display(x)}")
                        )
                        progressed = True
                elif not candidates:
                    problems.append(
                        f"no candidate differential can hit the rho-tower of {display(x)}"
                    )
                else:
                    names = ", ".join(f"d_{r}({display(s)})" for s, r, _ in candidates)
                    problems.append(f"ambiguous candidates for {display(x)}: {names}")
        if not progressed:
            break
    return inferred, problems
