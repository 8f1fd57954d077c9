"""Exact domain types for combinatorial demand data.

Items live in a fixed, ordered :class:`Universe`; a bundle is a bitmask over
that ordering, prices and valuations are tuples of :class:`fractions.Fraction`.
Constructors only enforce structure (lengths, shared universes). Semantic
conditions that a dataset read from disk may violate, such as non-positive
prices or empty demanded sets, are reported by :func:`validate_dataset`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

MAX_ITEMS = 24

Rational = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class UniverseMismatch(ValueError):
    """Operands were built over different universes."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class DatasetError(ValueError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        lines = "; ".join(f"observation {v.index}: {v.reason}" for v in self.violations)
        super().__init__(f"invalid dataset: {lines}")


def to_rational(x: Rational) -> Fraction:
    """Convert an int, Fraction or ``"n/d"`` string to an exact Fraction.

    Floats are rejected on purpose: a binary float would silently become a
    rational nobody typed.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        match = _RATIONAL_RE.match(x)
        if not match:
            raise ValueError(f"malformed rational {x!r}")
        num, den = match.group(1), match.group(2)
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in {x!r}")
        return Fraction(int(num), int(den) if den is not None else 1)
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact rational")


def format_rational(x: Fraction) -> str:
    return str(x)


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    return math.lcm(1, *(v.denominator for v in values))


def scaled(values: Iterable[Fraction], scale: int) -> list[int]:
    """Multiply each rational by ``scale``; the result must be integral."""
    out = []
    for v in values:
        q, r = divmod(v.numerator * scale, v.denominator)
        if r:
            raise ValueError("scale is not a common denominator")
        out.append(q)
    return out


@dataclass(frozen=True)
class Universe:
    """The ordered item set. Ordering is canonical for masks and files."""

    items: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("a universe needs at least one item")
        if len(self.items) > MAX_ITEMS:
            raise ValueError(f"at most {MAX_ITEMS} items are supported, got {len(self.items)}")
        for label in self.items:
            if not isinstance(label, str) or not label:
                raise ValueError(f"item labels must be nonempty strings, got {label!r}")
        if len(set(self.items)) != len(self.items):
            raise ValueError("item labels must be unique")

    def __len__(self) -> int:
        return len(self.items)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {label: k for k, label in enumerate(self.items)}

    @property
    def full_mask(self) -> int:
        return (1 << len(self.items)) - 1

    def index(self, label: str) -> int:
        try:
            return self._positions[label]
        except KeyError:
            raise KeyError(f"unknown item {label!r}") from None

    def bundle(self, labels: Iterable[str] = ()) -> "Bundle":
        if isinstance(labels, str):
            raise TypeError("pass an iterable of labels, not a single string")
        mask = 0
        for label in labels:
            mask |= 1 << self.index(label)
        return Bundle(self, mask)

    @property
    def empty(self) -> "Bundle":
        return Bundle(self, 0)

    def bundles(self) -> Iterator["Bundle"]:
        """All 2^|X| bundles in bitmask order."""
        for mask in range(1 << len(self.items)):
            yield Bundle(self, mask)

    def prices(self, values: Sequence[Rational]) -> "Prices":
        return Prices(self, tuple(values))

    def uniform(self, value: Rational) -> "Prices":
        return Prices(self, (value,) * len(self.items))


@dataclass(frozen=True)
class Bundle:
    """A subset of the universe, stored as a bitmask over its item order."""

    universe: Universe
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.universe.full_mask:
            raise ValueError(f"mask {self.mask} out of range for {len(self.universe)} items")

    @property
    def items(self) -> tuple[str, ...]:
        return tuple(lab for k, lab in enumerate(self.universe.items) if self.mask >> k & 1)

    def __iter__(self) -> Iterator[str]:
        return iter(self.items)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, label: str) -> bool:
        return bool(self.mask >> self.universe.index(label) & 1)

    def _other(self, other: "Bundle") -> int:
        if other.universe != self.universe:
            raise UniverseMismatch("bundles belong to different universes")
        return other.mask

    def __or__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.universe, self.mask | self._other(other))

    def __and__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.universe, self.mask & self._other(other))

    def __sub__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.universe, self.mask & ~self._other(other))

    def __lt__(self, other: "Bundle") -> bool:
        return self.mask < self._other(other)

    def issubset(self, other: "Bundle") -> bool:
        return self.mask & ~self._other(other) == 0

    def __str__(self) -> str:
        return "{" + ",".join(self.items) + "}"

    def __repr__(self) -> str:
        return f"Bundle({self})"


@dataclass(frozen=True)
class Prices:
    """One exact rational per item.

    Positivity is part of the domain but not enforced here; see
    :meth:`require_positive` and :func:`validate_dataset`.
    """

    universe: Universe
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(to_rational(x) for x in self.values)
        if len(vals) != len(self.universe):
            raise ValueError(f"expected {len(self.universe)} prices, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, universe: Universe, mapping: Mapping[str, Rational]) -> "Prices":
        missing = set(universe.items) - set(mapping)
        extra = set(mapping) - set(universe.items)
        if missing or extra:
            raise ValueError(f"price keys mismatch (missing {sorted(missing)}, extra {sorted(extra)})")
        return cls(universe, tuple(mapping[x] for x in universe.items))

    def __getitem__(self, key: Union[int, str]) -> Fraction:
        if isinstance(key, str):
            key = self.universe.index(key)
        return self.values[key]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __sub__(self, other: "Prices") -> tuple[Fraction, ...]:
        if other.universe != self.universe:
            raise UniverseMismatch("prices belong to different universes")
        return tuple(a - b for a, b in zip(self.values, other.values))

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.values)

    def require_positive(self) -> "Prices":
        if not self.is_positive():
            raise PreconditionError(f"prices must be strictly positive: {self}")
        return self

    def shifted(self, delta: Sequence[Rational]) -> "Prices":
        return Prices(self.universe, tuple(a + to_rational(b) for a, b in zip(self.values, delta)))

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


@dataclass(frozen=True)
class Valuation:
    """Exact values for all 2^|X| bundles, indexed by bitmask."""

    universe: Universe
    table: tuple[Fraction, ...]

    def __post_init__(self):
        tab = tuple(to_rational(x) for x in self.table)
        if len(tab) != 1 << len(self.universe):
            raise ValueError(f"valuation needs {1 << len(self.universe)} entries, got {len(tab)}")
        object.__setattr__(self, "table", tab)

    @classmethod
    def from_function(cls, universe: Universe, f: Callable[[Bundle], Rational]) -> "Valuation":
        return cls(universe, tuple(f(b) for b in universe.bundles()))

    @classmethod
    def from_mapping(cls, universe: Universe, mapping: Mapping[Iterable[str], Rational]) -> "Valuation":
        table: list = [None] * (1 << len(universe))
        for labels, value in mapping.items():
            table[universe.bundle(labels).mask] = value
        if any(x is None for x in table):
            raise ValueError("valuation mapping must cover every bundle")
        return cls(universe, tuple(table))

    def __getitem__(self, key: Union[Bundle, int]) -> Fraction:
        if isinstance(key, Bundle):
            if key.universe != self.universe:
                raise UniverseMismatch("bundle and valuation belong to different universes")
            key = key.mask
        return self.table[key]

    def shifted(self, c: Rational) -> "Valuation":
        c = to_rational(c)
        return Valuation(self.universe, tuple(x + c for x in self.table))

    def with_value(self, bundle: Bundle, value: Rational) -> "Valuation":
        tab = list(self.table)
        tab[bundle.mask] = value
        return Valuation(self.universe, tuple(tab))

    def is_monotone(self) -> bool:
        t = self.table
        for mask in range(1, len(t)):
            m = mask
            while m:
                low = m & -m
                if t[mask ^ low] > t[mask]:
                    return False
                m ^= low
        return True

    @cached_property
    def denominator_lcm(self) -> int:
        return lcm_of_denominators(self.table)


@dataclass(frozen=True)
class Observation:
    """Prices together with the full set of bundles demanded there."""

    prices: Prices
    demanded: tuple[Bundle, ...]

    def __post_init__(self):
        dem = tuple(sorted(self.demanded, key=lambda b: b.mask))
        for b in dem:
            if b.universe != self.prices.universe:
                raise UniverseMismatch("demanded bundle and prices belong to different universes")
        object.__setattr__(self, "demanded", dem)

    @property
    def universe(self) -> Universe:
        return self.prices.universe


@dataclass(frozen=True)
class DemandDataset:
    universe: Universe
    observations: tuple[Observation, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self) -> Iterator[Observation]:
        return iter(self.observations)

    def __getitem__(self, k: int) -> Observation:
        return self.observations[k]

    def empty_observations(self) -> list[int]:
        return [k for k, obs in enumerate(self.observations) if any(b.mask == 0 for b in obs.demanded)]

    def extended(self, observations: Iterable[Observation]) -> "DemandDataset":
        return DemandDataset(self.universe, self.observations + tuple(observations))

    @cached_property
    def price_scale(self) -> int:
        return lcm_of_denominators(v for obs in self.observations for v in obs.prices.values)

    @cached_property
    def scaled_prices(self) -> list[int]:
        """All observation prices, flattened row-major and scaled to integers."""
        return scaled((v for obs in self.observations for v in obs.prices.values), self.price_scale)


def _check_universe(a: Universe, b: Universe) -> None:
    if a != b:
        raise UniverseMismatch("operands belong to different universes")


def inner_product(p: Prices, bundle: Bundle) -> Fraction:
    """``sum of p_x over x in bundle``, exactly."""
    _check_universe(p.universe, bundle.universe)
    mask = bundle.mask
    return sum((v for k, v in enumerate(p.values) if mask >> k & 1), Fraction(0))


def signed_inner_product(r: Union[Prices, Sequence[Rational]], a: Bundle, b: Bundle) -> Fraction:
    """``<r, 1_A - 1_B>`` for a possibly signed rational vector ``r``.

    ``r`` may be a :class:`Prices` or a plain sequence, for instance the
    difference ``p - q`` of two price vectors.
    """
    _check_universe(a.universe, b.universe)
    if isinstance(r, Prices):
        _check_universe(r.universe, a.universe)
        vec = r.values
    else:
        vec = tuple(to_rational(x) for x in r)
        if len(vec) != len(a.universe):
            raise UniverseMismatch(f"vector has {len(vec)} entries for {len(a.universe)} items")
    total = Fraction(0)
    for k, v in enumerate(vec):
        total += v * ((a.mask >> k & 1) - (b.mask >> k & 1))
    return total


class Violation(NamedTuple):
    index: int
    reason: str


def validate_dataset(d: DemandDataset) -> list[Violation]:
    """Return every well-formedness violation; an empty list means ok."""
    out = []
    for k, obs in enumerate(d.observations):
        if obs.universe != d.universe:
            out.append(Violation(k, "universe mismatch"))
            continue
        if not obs.prices.is_positive():
            out.append(Violation(k, "non-positive price"))
        if not obs.demanded:
            out.append(Violation(k, "empty demanded set"))
        elif len({b.mask for b in obs.demanded}) != len(obs.demanded):
            out.append(Violation(k, "duplicate demanded bundle"))
    return out


def ensure_valid(d: DemandDataset) -> DemandDataset:
    violations = validate_dataset(d)
    if violations:
        raise DatasetError(violations)
    return d
