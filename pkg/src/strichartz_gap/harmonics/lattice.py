"""Multi-index lattice of S^5 harmonics and finitely supported coefficient fields."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, Mapping, Tuple

ZERO_M: Tuple[int, int, int, int] = (0, 0, 0, 0)


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Lattice point (ell, m1, m2, m3, m4) with ell >= m1 >= m2 >= m3 >= |m4|."""

    ell: int
    m: Tuple[int, int, int, int] = ZERO_M

    def __post_init__(self) -> None:
        m = tuple(int(value) for value in self.m)
        if len(m) != 4:
            raise ValueError(f"Multi-index needs four lower indices, got {self.m!r}")
        object.__setattr__(self, "m", m)
        m1, m2, m3, m4 = m
        if not (self.ell >= m1 >= m2 >= m3 >= abs(m4)):
            raise ValueError(f"({self.ell}, {m}) is not in N({self.ell})")

    @property
    def m1(self) -> int:
        return self.m[0]

    @property
    def is_zonal(self) -> bool:
        return self.m == ZERO_M

    def shifted(self, delta: int) -> MultiIndex | None:
        """Return the index with the same lower indices at ell + delta, if it exists."""
        target = self.ell + delta
        if target < self.m1:
            return None
        return MultiIndex(target, self.m)

    def label(self) -> str:
        return f"({self.ell},{','.join(str(v) for v in self.m)})"


def lower_indices(ell: int) -> Iterator[Tuple[int, int, int, int]]:
    """Yield the tuples of N(ell) in lexicographic order."""
    for m1 in range(ell + 1):
        for m2 in range(m1 + 1):
            for m3 in range(m2 + 1):
                for m4 in range(-m3, m3 + 1):
                    yield (m1, m2, m3, m4)


def index_set(ell: int) -> list[MultiIndex]:
    """Enumerate N(ell) deterministically in lexicographic order of (m1, m2, m3, m4)."""
    if ell < 0:
        raise ValueError(f"Degree must be nonnegative, got ell={ell}")
    return [MultiIndex(ell, m) for m in lower_indices(ell)]


def harmonic_dimension(ell: int) -> int:
    """Closed form (ell+1)(ell+2)^2(ell+3)/12 for the size of N(ell)."""
    return (ell + 1) * (ell + 2) ** 2 * (ell + 3) // 12


@dataclass(frozen=True)
class CoeffField:
    """Finitely supported real coefficients on the lattice, truncated at ``lmax``.

    Absent coefficients read as zero. Instances are immutable; arithmetic returns new
    fields whose support is the union of the operand supports.
    """

    entries: Mapping[MultiIndex, float] = field(default_factory=dict)
    lmax: int = 0

    def __post_init__(self) -> None:
        if self.lmax < 0:
            raise ValueError(f"lmax must be nonnegative, got {self.lmax}")
        cleaned: Dict[MultiIndex, float] = {}
        for index, value in self.entries.items():
            if not isinstance(index, MultiIndex):
                raise TypeError(f"Coefficient keys must be MultiIndex, got {index!r}")
            if index.ell > self.lmax:
                raise ValueError(f"Index {index.label()} exceeds lmax={self.lmax}")
            cleaned[index] = float(value)
        object.__setattr__(self, "entries", dict(sorted(cleaned.items())))

    @classmethod
    def unit(cls, index: MultiIndex, lmax: int | None = None, value: float = 1.0) -> CoeffField:
        return cls({index: value}, index.ell if lmax is None else lmax)

    @classmethod
    def zonal(cls, values: Mapping[int, float], lmax: int | None = None) -> CoeffField:
        """Build a field supported on m = 0 from a degree -> value map."""
        top = max(values, default=0) if lmax is None else lmax
        return cls({MultiIndex(ell): value for ell, value in values.items()}, top)

    def __getitem__(self, index: MultiIndex) -> float:
        return self.entries.get(index, 0.0)

    def get(self, ell: int, m: Tuple[int, int, int, int] = ZERO_M) -> float:
        if ell < 0 or ell < m[0]:
            return 0.0
        return self.entries.get(MultiIndex(ell, m), 0.0)

    def items(self) -> Iterable[tuple[MultiIndex, float]]:
        return self.entries.items()

    def support(self) -> list[MultiIndex]:
        return list(self.entries)

    @property
    def is_zonal(self) -> bool:
        return all(index.is_zonal for index in self.entries)

    def padded(self, lmax: int) -> CoeffField:
        if lmax < self.lmax:
            raise ValueError(f"Cannot pad lmax={self.lmax} down to {lmax}")
        return CoeffField(self.entries, lmax)

    def truncated(self, lmax: int) -> CoeffField:
        kept = {index: value for index, value in self.entries.items() if index.ell <= lmax}
        return CoeffField(kept, lmax)

    def add(self, other: CoeffField) -> CoeffField:
        merged = dict(self.entries)
        for index, value in other.entries.items():
            merged[index] = merged.get(index, 0.0) + value
        return CoeffField(merged, max(self.lmax, other.lmax))

    def scale(self, factor: float) -> CoeffField:
        return CoeffField(
            {index: factor * value for index, value in self.entries.items()}, self.lmax
        )

    def dot(self, other: CoeffField) -> float:
        """Plain l^2 pairing of coefficients."""
        return sum(value * other[index] for index, value in self.entries.items())

    def chains(self) -> Dict[Tuple[int, int, int, int], Dict[int, float]]:
        """Group coefficients by lower indices: m -> {ell: value}."""
        grouped: Dict[Tuple[int, int, int, int], Dict[int, float]] = {}
        for index, value in self.entries.items():
            grouped.setdefault(index.m, {})[index.ell] = value
        return grouped

    def to_json(self) -> Dict[str, Any]:
        return {
            "lmax": self.lmax,
            "entries": [
                {"l": index.ell, "m": list(index.m), "value": value}
                for index, value in self.entries.items()
            ],
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> CoeffField:
        if "lmax" not in payload:
            raise ValueError("Coefficient field is missing 'lmax'.")
        entries: Dict[MultiIndex, float] = {}
        for item in payload.get("entries") or []:
            try:
                index = MultiIndex(int(item["l"]), tuple(item.get("m", ZERO_M)))
                value = float(item["value"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"Malformed coefficient entry {item!r}") from exc
            entries[index] = entries.get(index, 0.0) + value
        return cls(entries, int(payload["lmax"]))
