"""Uniqueness of the rationalizing valuation.

Along a price segment ``x(t) = x1 + t (x2 - x1)`` each bundle's surplus is a
line in ``t``; indirect utility is their upper envelope, convex and piecewise
affine with rational breakpoints. Because ``-A`` is a subgradient of indirect
utility exactly when ``A`` is demanded,

    U(x2) - U(x1) = - integral_0^1 <f(x(t)), x2 - x1> dt

for any selection ``f`` from demand. Two valuations with the same demand
therefore have indirect utilities differing by a constant, hence agree up to
that constant on the range of demand, and their monotone closures agree
after normalizing the empty bundle to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from combdemand.core import (
    Bundle,
    Prices,
    UniverseMismatch,
    Valuation,
    inner_product,
)
from combdemand.oracle import Grid, demand_many, in_range
from combdemand.recovery import monotone_closure


@dataclass(frozen=True)
class EnvelopePiece:
    lo: Fraction
    hi: Fraction
    bundles: tuple[Bundle, ...]
    intercept: Fraction
    slope: Fraction

    def value(self, t: Fraction) -> Fraction:
        return self.intercept + self.slope * t


@dataclass(frozen=True)
class SegmentEnvelope:
    x1: Prices
    x2: Prices
    pieces: tuple[EnvelopePiece, ...]
    # interior breakpoints with every bundle tying there
    breakpoints: tuple[tuple[Fraction, tuple[Bundle, ...]], ...] = field(default=())

    def piece_at(self, t: Fraction) -> EnvelopePiece:
        for piece in self.pieces:
            if piece.lo <= t <= piece.hi:
                return piece
        raise ValueError(f"{t} is outside [0, 1]")

    def value(self, t: Fraction) -> Fraction:
        return self.piece_at(t).value(t)

    def price_at(self, t: Fraction) -> Prices:
        return Prices(self.x1.universe, tuple(a + t * (b - a) for a, b in zip(self.x1, self.x2)))

    def to_dict(self) -> dict:
        return {
            "from": [str(x) for x in self.x1],
            "to": [str(x) for x in self.x2],
            "pieces": [
                {
                    "interval": [str(p.lo), str(p.hi)],
                    "bundles": [list(b.items) for b in p.bundles],
                    "intercept": str(p.intercept),
                    "slope": str(p.slope),
                }
                for p in self.pieces
            ],
            "breakpoints": [
                {"at": str(t), "bundles": [list(b.items) for b in bs]} for t, bs in self.breakpoints
            ],
        }


def _check_segment(v: Valuation, x1: Prices, x2: Prices) -> None:
    if x1.universe != v.universe or x2.universe != v.universe:
        raise UniverseMismatch("segment endpoints and valuation belong to different universes")
    x1.require_positive()
    x2.require_positive()


def segment_envelope(v: Valuation, x1: Prices, x2: Prices) -> SegmentEnvelope:
    """Exact upper envelope of the bundle surplus lines on ``t in [0, 1]``."""
    _check_segment(v, x1, x2)
    u = v.universe
    direction = x2 - x1
    lines = []  # (intercept, slope, mask)
    for b in u.bundles():
        lines.append((v[b] - inner_product(x1, b), -sum(
            (direction[k] for k in range(len(u)) if b.mask >> k & 1), Fraction(0)), b.mask))

    def tied_at(t):
        vals = [c + s * t for c, s, _ in lines]
        top = max(vals)
        return [lines[k] for k, val in enumerate(vals) if val == top]

    pieces = []
    breakpoints = []
    t = Fraction(0)
    while True:
        tied = tied_at(t)
        if t > 0:
            breakpoints.append((t, tuple(Bundle(u, m) for _, _, m in tied)))
        steepest = max(s for _, s, _ in tied)
        current = [line for line in tied if line[1] == steepest]
        c0, s0, _ = current[0]
        hits = [(c0 - c) / (s - s0) for c, s, _ in lines if s > s0]
        nxt = min((h for h in hits if h > t), default=None)
        end = Fraction(1) if nxt is None or nxt >= 1 else nxt
        pieces.append(EnvelopePiece(t, end, tuple(Bundle(u, m) for _, _, m in current), c0, s0))
        if end == 1:
            break
        t = end
    return SegmentEnvelope(x1, x2, tuple(pieces), tuple(breakpoints))


def selection_integral(v: Valuation, x1: Prices, x2: Prices, selection: str = "lowest") -> Fraction:
    """``integral_0^1 <f(x(t)), x2 - x1> dt`` for a canonical selection ``f``.

    ``selection`` picks the lowest or highest bitmask among each piece's
    maximizers; ties at breakpoints have measure zero. The value equals
    ``U(x1) - U(x2)``.
    """
    if selection not in ("lowest", "highest"):
        raise ValueError("selection must be 'lowest' or 'highest'")
    env = segment_envelope(v, x1, x2)
    direction = x2 - x1
    total = Fraction(0)
    for piece in env.pieces:
        chosen = piece.bundles[0] if selection == "lowest" else piece.bundles[-1]
        weight = sum((direction[k] for k in range(len(direction)) if chosen.mask >> k & 1), Fraction(0))
        total += (piece.hi - piece.lo) * weight
    return total


def canonical_valuation(v: Valuation) -> Valuation:
    """Monotone closure of ``v`` normalized to 0 at the empty bundle."""
    closed = monotone_closure(v)
    return closed.shifted(-closed.table[0])


@dataclass(frozen=True)
class ComparisonVerdict:
    same_demand: bool
    probes: int
    segments: int
    demand_mismatches: tuple[Prices, ...]
    segment_mismatches: tuple[tuple[Prices, Prices], ...]
    common_range: tuple[Bundle, ...]
    constant: Optional[Fraction]
    constant_failures: tuple[tuple[Bundle, Fraction], ...]
    closure_equal: bool

    @property
    def scope(self) -> str:
        return (f"demand compared at {self.probes} probe prices and along "
                f"{self.segments} exact segments only")

    def to_dict(self) -> dict:
        return {
            "same_demand": self.same_demand,
            "scope": self.scope,
            "demand_mismatches": [[str(x) for x in p] for p in self.demand_mismatches],
            "segment_mismatches": [
                [[str(x) for x in a], [str(x) for x in b]] for a, b in self.segment_mismatches
            ],
            "common_range": [list(b.items) for b in self.common_range],
            "constant": None if self.constant is None else str(self.constant),
            "constant_failures": [
                {"bundle": list(b.items), "difference": str(diff)} for b, diff in self.constant_failures
            ],
            "closure_equal": self.closure_equal,
        }


def compare_rationalizations(
    v: Valuation,
    w: Valuation,
    probes: Union[Grid, Sequence[Prices]],
    segments: Sequence[tuple[Prices, Prices]] = (),
) -> ComparisonVerdict:
    """Do ``v`` and ``w`` generate the same demand, and do they then differ by a constant?

    Demand equality can only be tested at the given probe prices and along the
    given segments (compared exactly, piece by piece); the verdict's
    ``scope`` says so.
    """
    if v.universe != w.universe:
        raise UniverseMismatch("valuations belong to different universes")
    points = probes.points(v.universe) if isinstance(probes, Grid) else list(probes)
    mismatches = tuple(
        a.prices for a, b in zip(demand_many(v, points), demand_many(w, points)) if a.masks != b.masks
    )
    seg_mismatches = []
    for x1, x2 in segments:
        ev, ew = segment_envelope(v, x1, x2), segment_envelope(w, x1, x2)
        shape_v = [(p.lo, p.hi, p.bundles) for p in ev.pieces]
        shape_w = [(p.lo, p.hi, p.bundles) for p in ew.pieces]
        if shape_v != shape_w or ev.breakpoints != ew.breakpoints:
            seg_mismatches.append((x1, x2))
    same = not mismatches and not seg_mismatches
    common = tuple(b for b in v.universe.bundles() if in_range(v, b) and in_range(w, b))
    constant = None
    failures: tuple = ()
    if same and common:
        diffs = [(b, v[b] - w[b]) for b in common]
        ref = diffs[0][1]
        failures = tuple((b, x) for b, x in diffs if x != ref)
        if not failures:
            constant = ref
    return ComparisonVerdict(
        same_demand=same,
        probes=len(points),
        segments=len(segments),
        demand_mismatches=mismatches,
        segment_mismatches=tuple(seg_mismatches),
        common_range=common,
        constant=constant,
        constant_failures=failures,
        closure_equal=canonical_valuation(v) == canonical_valuation(w),
    )
