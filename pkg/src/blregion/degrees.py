"""Tridegrees (stem, Adams filtration, weight) and stem/coweight windows."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class TriDegree:
    """A (stem, filtration, weight) triple.

    Stems and weights may be negative (rho and tau both have negative
    entries). The Adams filtration of any stored class is homological and
    must be >= 0 -- enforced by ``require_filtration`` wherever classes are
    filed, while difference vectors (shifts) may carry f = -1.
    """

    s: int
    f: int
    w: int

    def require_filtration(self) -> "TriDegree":
        if self.f < 0:
            raise ValueError(f"Adams filtration must be >= 0, got {self.f}")
        return self

    @property
    def coweight(self) -> int:
        return self.s - self.w

    def add(self, other: "TriDegree") -> "TriDegree":
        return TriDegree(self.s + other.s, self.f + other.f, self.w + other.w)

    def __add__(self, other: "TriDegree") -> "TriDegree":
        return self.add(other)

    def scale(self, n: int) -> "TriDegree":
        return TriDegree(n * self.s, n * self.f, n * self.w)

    def __str__(self) -> str:
        return f"({self.s},{self.f},{self.w})"


def coweight(d: TriDegree) -> int:
    """Stem minus weight; constant along rho-towers, +1 per tau."""
    return d.coweight


#: Degree shift of every Bockstein and Adams differential: stem drops by
#: one, filtration rises by one, weight is fixed.
DIFFERENTIAL_SHIFT = TriDegree(-1, 1, 0)


@dataclass(frozen=True)
class Window:
    """Finite stem/coweight/filtration box in which pages are computed.

    The asserted ranges are padded internally (``stem_pad``/``coweight_pad``)
    so that differentials leaving or entering the asserted box are still
    visible; classes inside the padding are treated as
    indeterminate-at-boundary and excluded from census assertions.
    """

    max_stem: int = 24
    min_stem: int = -2
    min_coweight: int = -2
    max_coweight: int = 1
    max_f: int = 0  # 0 means "derive from max_stem"
    stem_pad: int = 4
    coweight_pad: int = 1

    def __post_init__(self):
        if self.max_f == 0:
            object.__setattr__(self, "max_f", self.max_stem + 2)
        if self.max_stem < self.min_stem:
            raise ValueError("empty stem range")

    # Stored = asserted plus padding; construction and page turning happen
    # over the stored box, assertions only over the asserted one.
    @property
    def stored_max_stem(self) -> int:
        return self.max_stem + self.stem_pad

    @property
    def stored_min_coweight(self) -> int:
        return self.min_coweight - self.coweight_pad

    def stores(self, d: TriDegree) -> bool:
        return (
            self.min_stem <= d.s <= self.stored_max_stem
            and 0 <= d.f <= self.max_f
            and self.stored_min_coweight <= d.coweight <= self.max_coweight
        )

    def asserts(self, d: TriDegree) -> bool:
        return (
            self.min_stem <= d.s <= self.max_stem
            and 0 <= d.f <= self.max_f
            and self.min_coweight <= d.coweight <= self.max_coweight
        )

    def near_boundary(self, d: TriDegree, reach: int = 0) -> bool:
        """True if d sits in the padding or within `reach` of the stored edge."""
        return not (
            self.min_stem <= d.s <= self.max_stem - reach
            and d.f + reach <= self.max_f
            and self.min_coweight <= d.coweight <= self.max_coweight
        )
