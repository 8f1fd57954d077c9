"""Finite-data checks for the law of demand and cyclic monotonicity.

Both checkers return ``None`` on success and a self-verifying certificate on
failure. Passing only certifies the finite data: the law of demand on a
finite sample does not imply cyclic monotonicity (see the three-observation
fixture in the test suite).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from combdemand import kernels
from combdemand.core import (
    Bundle,
    DemandDataset,
    PreconditionError,
    Prices,
    Rational,
    Universe,
    Valuation,
    ensure_valid,
    signed_inner_product,
    to_rational,
)
from combdemand.graph import ConstraintGraph, collapse
from combdemand.oracle import demand, demand_many


class CertificateError(AssertionError):
    """A certificate failed to re-verify against its dataset."""


@dataclass(frozen=True)
class LoDViolation:
    """``<p_i - p_j, A - B> > 0`` with ``A`` demanded at ``p_i`` and ``B`` at ``p_j``."""

    i: int
    j: int
    a: Bundle
    b: Bundle
    value: Fraction

    def recompute(self, d: DemandDataset) -> Fraction:
        return signed_inner_product(d[self.i].prices - d[self.j].prices, self.a, self.b)

    def verify(self, d: DemandDataset) -> None:
        if self.a not in d[self.i].demanded or self.b not in d[self.j].demanded:
            raise CertificateError("bundles are not demanded at the cited observations")
        if self.recompute(d) != self.value or self.value <= 0:
            raise CertificateError(f"law-of-demand value {self.value} does not re-verify")

    def to_dict(self) -> dict:
        return {
            "kind": "law_of_demand",
            "i": self.i,
            "j": self.j,
            "A": list(self.a.items),
            "B": list(self.b.items),
            "value": str(self.value),
        }

    @classmethod
    def from_dict(cls, universe: Universe, data: dict) -> "LoDViolation":
        return cls(data["i"], data["j"], universe.bundle(data["A"]), universe.bundle(data["B"]),
                   to_rational(data["value"]))


@dataclass(frozen=True)
class CycleStep:
    observation: int
    prices: Prices
    bundle: Bundle


@dataclass(frozen=True)
class CycleCertificate:
    """A sequence with ``sum_k <p_k, A_k - A_{k+1}> > 0``, indices mod ``n``."""

    steps: tuple[CycleStep, ...]
    total: Fraction

    def __len__(self) -> int:
        return len(self.steps)

    @staticmethod
    def cycle_sum(steps) -> Fraction:
        n = len(steps)
        return sum(
            (signed_inner_product(steps[k].prices, steps[k].bundle, steps[(k + 1) % n].bundle)
             for k in range(n)),
            Fraction(0),
        )

    def verify(self, d: DemandDataset) -> None:
        if len(self.steps) < 2:
            raise CertificateError("a cycle needs at least two steps")
        for s in self.steps:
            obs = d[s.observation]
            if obs.prices != s.prices or s.bundle not in obs.demanded:
                raise CertificateError(f"step {s} does not appear in the dataset")
        if self.cycle_sum(self.steps) != self.total or self.total <= 0:
            raise CertificateError(f"cycle total {self.total} does not re-verify")

    def to_dict(self) -> dict:
        return {
            "kind": "cyclic_monotonicity",
            "steps": [
                {"observation": s.observation, "prices": [str(x) for x in s.prices], "bundle": list(s.bundle.items)}
                for s in self.steps
            ],
            "total": str(self.total),
        }

    @classmethod
    def from_dict(cls, universe: Universe, data: dict) -> "CycleCertificate":
        steps = tuple(
            CycleStep(s["observation"], universe.prices(s["prices"]), universe.bundle(s["bundle"]))
            for s in data["steps"]
        )
        return cls(steps, to_rational(data["total"]))


def _offsets(d: DemandDataset) -> tuple[list[int], list[int]]:
    offsets, masks = [0], []
    for obs in d:
        masks.extend(b.mask for b in obs.demanded)
        offsets.append(len(masks))
    return offsets, masks


def check_law_of_demand(d: DemandDataset) -> Optional[LoDViolation]:
    """Largest violation of ``<p - q, A - B> <= 0`` over all ordered pairs, or ``None``."""
    ensure_valid(d)
    offsets, masks = _offsets(d)
    best = kernels.lod_scan(d.scaled_prices, len(d.universe), offsets, masks, len(d))
    if best is None or best[0] <= 0:
        return None
    value, i, j, a, b = best
    u = d.universe
    cert = LoDViolation(i, j, Bundle(u, a), Bundle(u, b), Fraction(value, d.price_scale))
    cert.verify(d)
    return cert


def cycle_from_graph(graph: ConstraintGraph, cycle: list[int]) -> CycleCertificate:
    """Turn a negative graph cycle into a positive cyclic-monotonicity sequence.

    The graph edge ``u -> w`` is priced at an observation demanding ``w``;
    walking the cycle backwards gives steps ``(p_w, A_w)`` whose sum is the
    negated graph weight.
    """
    d = graph.dataset
    n = len(cycle)
    steps = []
    for k in range(n):
        u, w = cycle[k], cycle[(k + 1) % n]
        i = graph.edge_observation(u, w)
        steps.append(CycleStep(i, d[i].prices, graph.nodes[w]))
    steps.reverse()
    steps = tuple(steps)
    cert = CycleCertificate(steps, CycleCertificate.cycle_sum(steps))
    cert.verify(d)
    return cert


def find_violating_cycle(graph: ConstraintGraph) -> Optional[CycleCertificate]:
    cycle = kernels.negative_cycle(graph.scaled_weights, len(graph))
    if not cycle:
        return None
    if graph.cycle_weight(cycle) >= 0:
        raise AssertionError("predecessor cycle is not negative")
    return cycle_from_graph(graph, cycle)


def check_cyclic_monotonicity(d: DemandDataset) -> Optional[CycleCertificate]:
    """Exact cyclic-monotonicity check over every selection of demanded bundles."""
    ensure_valid(d)
    return find_violating_cycle(collapse(d))


def shorten_cycle(d: DemandDataset, c: CycleCertificate) -> CycleCertificate:
    """One reduction step on a positive cycle that repeats a price vector.

    Adjacent repeats telescope into a single step with the same total.
    Otherwise the cycle splits at the repeated price into two shorter cycles
    whose totals add up to the original, so one of them is positive.
    """
    if c.total <= 0:
        raise PreconditionError("cycle total must be positive")
    c.verify(d)
    steps = c.steps
    n = len(steps)
    pair = next(
        ((i, j) for i in range(n) for j in range(i + 1, n) if steps[i].prices == steps[j].prices),
        None,
    )
    if pair is None:
        raise PreconditionError("no price repeats in the cycle")
    i, j = pair
    # with p_i = p_j = p: <p, A_i - A_{i+1}> + <p, A_j - A_{j+1}>
    #                   = <p, A_j - A_{i+1}> + <p, A_i - A_{j+1}>
    # so the cycles i+1..j and j+1..i (wrapping) have totals summing to c.total
    inner = steps[i + 1:j + 1]
    outer = steps[j + 1:] + steps[:i + 1]
    t_inner = CycleCertificate.cycle_sum(inner)
    if len(inner) >= 2 and t_inner > 0:
        out = CycleCertificate(inner, t_inner)
    else:
        out = CycleCertificate(outer, CycleCertificate.cycle_sum(outer))
    out.verify(d)
    return out


def check_local_stability(
    v: Valuation,
    p: Prices,
    radius: Rational,
    samples: int = 100,
    seed: Optional[int] = None,
    resolution: int = 1024,
) -> Optional[Prices]:
    """Empirical probe of upper hemicontinuity at ``p``.

    Draws rational points in the sup-norm ball of ``radius`` and returns the
    first one whose demand is not contained in the demand at ``p``. ``None``
    means no counterexample was drawn, not that the property holds.
    """
    radius = to_rational(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    if any(x - radius <= 0 for x in p.values):
        raise PreconditionError("the ball leaves the strictly positive orthant")
    rng = random.Random(seed)
    n = len(v.universe)
    draws = [
        p.shifted([radius * Fraction(rng.randint(-resolution, resolution), resolution) for _ in range(n)])
        for _ in range(samples)
    ]
    base = demand(v, p).masks
    for result in demand_many(v, draws):
        if not result.masks <= base:
            return result.prices
    return None
