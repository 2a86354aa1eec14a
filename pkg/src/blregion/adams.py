"""Adams layer over the Bockstein output and the homotopy-level consequences.

The region survives the Adams spectral sequence untouched (verified class by
class against the vanishing wedge and the finite coweight-1 h1 towers), after
which the only hidden rho-extensions are the jumps from the torsion witnesses
Q h_1^k to h_1^k for k >= 4; no further extensions land in the region, taken
as a rule since its proof lives in connective K-theory. Everything downstream
(rho- and 2-divisibility of the Hopf-power classes, the image of geometric
fixed points, underlying detectors, Mahowald invariants of the powers of 2)
is derived from this extension-decorated page.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .bockstein import BocksteinRun, Report
from .catalog import Catalog
from .cones import _underlying_with_filtration
from .degrees import TriDegree
from .monomials import (
    Cone,
    MonomialClass,
    degree_of,
    display,
    make_positive,
    make_q,
    module_action,
)


class OutOfWindowError(ValueError):
    """The requested derivation needs classes beyond the computed window."""


class AmbiguityError(ValueError):
    """A lookup demanded a unique answer and found several (or none)."""


@dataclass(frozen=True)
class HomotopyClass:
    """A coweight-0 stable class named by its final-page detector.

    ``rho_action`` points at the detector of rho times this class when that
    product is nonzero; ``hidden`` marks the links invisible on the page
    (they jump Adams filtration).
    """

    detector: MonomialClass
    stem: int
    rho_action: Optional[MonomialClass] = None
    hidden: bool = False


@dataclass
class AdamsPage:
    """Bockstein output regarded as the Adams final page, plus extensions."""

    run: BocksteinRun
    hidden_rho: Dict[MonomialClass, MonomialClass] = field(default_factory=dict)

    @property
    def cat(self) -> Catalog:
        return self.run.cat

    def homotopy_class(self, detector: MonomialClass) -> HomotopyClass:
        cat = self.cat
        d = degree_of(cat, detector)
        if detector in self.hidden_rho:
            return HomotopyClass(detector, d.s, self.hidden_rho[detector], hidden=True)
        rho_img = module_action(cat, "rho", detector)
        if rho_img is not None and not self.run.monomial_alive(rho_img):
            rho_img = None
        return HomotopyClass(detector, d.s, rho_img, hidden=False)


def region_classes(run: BocksteinRun) -> List[MonomialClass]:
    """Surviving census monomials: coweight 0, strictly above f = s/2 - 1."""
    cat, window = run.cat, run.window
    out = []
    for d in sorted(run.states):
        if d.coweight != 0 or d.s < 0 or d.s > window.max_stem:
            continue
        if 2 * d.f <= d.s - 2:
            continue
        st = run.states[d]
        for m in st.basis:
            if st.monomial_alive(m):
                out.append(m)
    return out


def adams_no_differentials(page_or_run, max_r: int = 12) -> Report:
    """Class-by-class exclusion of Adams differentials on the region.

    Targets of a differential on a region class drop into coweight -1, where
    the page vanishes above the wedge line; candidate sources sit in coweight
    1 and would have to be h1-periodic against the finite h1 towers there,
    or to hit the h0 tower from the empty stem-1 column.
    """
    run = page_or_run.run if isinstance(page_or_run, AdamsPage) else page_or_run
    cat, window = run.cat, run.window
    rep = Report()
    for alpha in region_classes(run):
        d = degree_of(cat, alpha)
        # (a) targets (s-1, f+r, w) must be dead or out of the stored page
        for r in range(2, max_r + 1):
            t = TriDegree(d.s - 1, d.f + r, d.w)
            if t.f > window.max_f:
                break
            st = run.states.get(t)
            if st is None:
                continue
            survivors = [m for m in st.basis if st.monomial_alive(m)]
            if survivors:
                rep.violations.append(
                    f"unexcluded differential: d_{r}({display(alpha)}) has live "
                    f"target {display(survivors[0])} at {t}"
                )
        # (b) sources (s+1, f-r, w) in coweight 1
        for r in range(2, max_r + 1):
            if d.f - r < 0:
                break
            s_deg = TriDegree(d.s + 1, d.f - r, d.w)
            st = run.states.get(s_deg)
            if st is None:
                continue
            sources = [m for m in st.basis if st.monomial_alive(m)]
            if not sources:
                continue
            is_h0_tower = alpha.h1 == 0 and alpha.cone is Cone.POSITIVE and not alpha.family
            sym = "h_0" if is_h0_tower else "h_1"
            for beta in sources:
                if _tower_argument_excludes(run, alpha, beta, sym):
                    rep.notes.append(
                        f"d_{r}({display(beta)}) -> {display(alpha)} excluded: "
                        f"the source's {sym} tower dies while the target's persists"
                    )
                else:
                    rep.violations.append(
                        f"unexcluded differential: d_{r}({display(beta)}) could hit "
                        f"{display(alpha)}"
                    )
    return rep


def _tower_argument_excludes(
    run: BocksteinRun, alpha: MonomialClass, beta: MonomialClass, sym: str
) -> bool:
    """Periodicity comparison along sym-multiplication towers.

    A nonzero differential hitting alpha would propagate along the tower:
    sym^t * beta must stay alive as long as sym^t * alpha does. Region
    classes belong to the census families, whose towers never terminate
    (validated by the census), so the source is excluded exactly when its
    own tower provably dies inside the stored window. Leaving the window
    unresolved does not exclude.
    """
    cat = run.cat
    cur, steps = beta, 0
    while steps <= run.window.max_f + 1:
        nxt = module_action(cat, sym, cur)
        if nxt is None:
            return True  # tower hits zero
        ndeg = degree_of(cat, nxt)
        st = run.states.get(ndeg)
        if st is None or not run.window.stores(ndeg):
            return False  # tower escapes the window: cannot certify
        if not st.monomial_alive(nxt):
            return True  # genuinely dead inside the window
        cur, steps = nxt, steps + 1
    return False


def install_hidden_rho_extensions(run: BocksteinRun) -> AdamsPage:
    """Link rho * [Q h_1^k] = [h_1^k] for k >= 4; nothing else enters the region."""
    page = AdamsPage(run)
    cat = run.cat
    k = 4
    while True:
        src = make_q(cat, 0, "h_1^{4+k}", k - 4)
        tgt = make_positive(cat, h1=k)
        if src is None or tgt is None:
            break
        if not run.window.asserts(degree_of(cat, src)):
            break
        if not (run.monomial_alive(src) and run.monomial_alive(tgt)):
            break
        page.hidden_rho[src] = tgt
        k += 1
    return page


def rho_divisibility_formula(k: int) -> int:
    """Closed form: k-1 when k = 0 mod 4, else 4*floor(k/4)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return k - 1 if k % 4 == 0 else 4 * (k // 4)


def rho_divisibility_engine(page: AdamsPage, k: int) -> int:
    """Maximal rho-power dividing the k-th Hopf-power class, from the page.

    Walks the extension-decorated page: one hidden step from h_1^k to
    Q h_1^k, then the surviving rho-divisions of the Q tower. Raises
    OutOfWindowError when the window cannot certify maximality.
    """
    run, cat = page.run, page.cat
    if k < 1:
        raise ValueError("k must be >= 1")
    top = make_positive(cat, h1=k)
    if top is None or not run.monomial_alive(top):
        raise OutOfWindowError(f"h_1^{k} not alive in the computed window")
    src = make_q(cat, 0, "h_1^{4+k}", k - 4) if k >= 4 else None
    if src is None or src not in page.hidden_rho:
        if k >= 4:
            raise OutOfWindowError(f"hidden extension for k={k} not installed")
        return 0
    j = 0
    while True:
        deeper = make_q(cat, j + 1, "h_1^{4+k}", k - 4)
        ddeg = degree_of(cat, deeper)
        if ddeg.s > run.window.max_stem:
            raise OutOfWindowError(
                f"rho-division tower of Q h_1^{k} leaves the window at stem {ddeg.s}"
            )
        if not run.monomial_alive(deeper):
            break
        j += 1
    return 1 + j


@dataclass(frozen=True)
class DivisibilityRecord:
    k: int
    max_rho_power: int
    max_two_power: Optional[int]
    fixed_point_generator_exponent: int


def rho_divisibility(k: int, page: Optional[AdamsPage] = None) -> int:
    """Engine mode when the window certifies the answer, closed form beyond.

    In engine mode the two must agree; disagreement raises, it is never
    papered over.
    """
    formula = rho_divisibility_formula(k)
    if page is not None:
        try:
            engine = rho_divisibility_engine(page, k)
        except OutOfWindowError:
            return formula
        if engine != formula:
            raise AmbiguityError(
                f"engine rho-divisibility {engine} for k={k} disagrees with "
                f"the closed form {formula}"
            )
        return engine
    return formula


def fixed_point_image(k: int, page: Optional[AdamsPage] = None) -> int:
    """Exponent m with image of geometric fixed points = 2^m Z on stem k.

    The fixed-points map sends the rho class to 1 and the Hopf class to -2
    (sign immaterial), so the image on the k-th diagonal is generated by
    2^n over those n <= k with the n-th Hopf power divisible by rho^(k-n).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    for n in range(0, k + 1):
        div = rho_divisibility(n, page) if n >= 1 else 0
        if div >= k - n:
            return n
    raise AmbiguityError(f"no generator exponent found for k={k}")


def two_divisibility(k: int, page: Optional[AdamsPage] = None) -> int:
    """Maximal power of 2 dividing the k-th Hopf-power class, k >= 5.

    On h0-torsion classes multiplication by 2 agrees with rho times the Hopf
    class up to sign, so 2^m divides the k-th power exactly when rho^m
    divides the (k-m)-th.
    """
    if k < 5:
        raise ValueError("two-divisibility derivation requires k >= 5")
    m = 0
    while m + 1 <= k - 1 and rho_divisibility(k - (m + 1), page) >= m + 1:
        m += 1
    return m


def classical_edge_at_stem(cat: Catalog, stem: int, max_f: int) -> List[MonomialClass]:
    """Tau-free edge monomials at one stem: the classical detectors."""
    out = []
    for f in range(0, max_f + 1):
        for z in _underlying_with_filtration(cat, f):
            if not z.family and z.h1 >= 4:
                continue  # tau-torsion powers vanish classically
            if degree_of(cat, z).s == stem:
                out.append(z)
    return sorted(out, key=lambda m: m.sort_key())


def is_rho_divisible(page: AdamsPage, alpha: MonomialClass) -> bool:
    """Is the class detected by alpha a rho-multiple, page-level or hidden?"""
    run = page.run
    if alpha.cone is Cone.POSITIVE:
        if alpha.rho >= 1:
            pre = MonomialClass(alpha.cone, alpha.family, alpha.k, alpha.rho - 1,
                                alpha.tau, alpha.h0, alpha.h1)
            if run.monomial_alive(pre):
                return True
        return alpha in set(page.hidden_rho.values())
    deeper = MonomialClass(alpha.cone, alpha.family, alpha.k, alpha.rho + 1,
                           alpha.tau, alpha.h0, alpha.h1)
    return run.monomial_alive(deeper)


def underlying_map(page: AdamsPage, alpha: MonomialClass) -> Optional[MonomialClass]:
    """Detector of the underlying classical class of a region class.

    Positive-cone detectors name their own image. Negative-cone detectors
    force a strictly higher filtration downstairs; the edge catalog must
    offer exactly one candidate. Classes divisible by rho (page-level or
    hidden) map to zero: they make up the kernel of the underlying map.
    """
    cat = page.cat
    d = degree_of(cat, alpha)
    if is_rho_divisible(page, alpha):
        return None
    if alpha.cone is Cone.POSITIVE:
        if alpha.rho >= 1:
            return None  # rho-divisible class whose witness left the window
        if alpha.tau or alpha.family:
            raise AmbiguityError(f"{display(alpha)} is not a region detector")
        return alpha
    candidates = [
        z
        for z in classical_edge_at_stem(cat, d.s, page.run.window.max_f)
        if degree_of(cat, z).f > d.f
    ]
    if len(candidates) != 1:
        raise AmbiguityError(
            f"underlying detector of {display(alpha)} is ambiguous: "
            f"{[display(c) for c in candidates] or 'no candidates'}"
        )
    return candidates[0]


def maximal_desuspension_detector(page: AdamsPage, k: int) -> MonomialClass:
    """Detector of the deepest equivariant lift of the k-th Hopf power."""
    cat = page.cat
    if k == 0:
        return make_positive(cat)
    div = rho_divisibility(k, page)
    if div == 0:
        return make_positive(cat, h1=k)
    # one hidden step plus (div - 1) page-level divisions
    return make_q(cat, div - 1, "h_1^{4+k}", k - 4)


def mahowald_invariant_of_2k(page: AdamsPage, k: int) -> MonomialClass:
    """Classical detector of an element of the Mahowald invariant of 2^k.

    Selects the maximal rho-desuspension of the k-th Hopf power (not rho
    divisible, else the stem were not maximal) and takes its underlying
    detector. Indeterminacy is not computed.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    beta = maximal_desuspension_detector(page, k)
    out = underlying_map(page, beta)
    if out is None:
        raise AmbiguityError(
            f"selected desuspension {display(beta)} is rho-divisible"
        )
    return out


def divisibility_table(page: AdamsPage, k_max: int) -> List[DivisibilityRecord]:
    rows = []
    for k in range(1, k_max + 1):
        rows.append(
            DivisibilityRecord(
                k=k,
                max_rho_power=rho_divisibility(k, page),
                max_two_power=two_divisibility(k, page) if k >= 5 else None,
                fixed_point_generator_exponent=fixed_point_image(k, page),
            )
        )
    return rows
