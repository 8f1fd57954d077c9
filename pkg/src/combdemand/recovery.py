"""Recover a rationalizing valuation from cyclically monotone demand data.

``v(A)`` is the cheapest revealed-preference path from ``A`` down to the empty
bundle, ``inf <p_1, A - A_1> + <p_2, A_1 - A_2> + ... + <p*, A_k>``, taken
over sequences with each ``A_i`` demanded at ``p_i``. On the collapsed graph
this is one first step into a node plus a shortest path to the terminal.
Every path cost is affine in ``A`` with a strictly positive slope, so the
result is a lower envelope of increasing affine functions: monotone and the
restriction of a concave function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from combdemand import kernels
from combdemand.axioms import CycleCertificate, cycle_from_graph
from combdemand.core import (
    Bundle,
    DemandDataset,
    PreconditionError,
    Prices,
    Universe,
    Valuation,
    ensure_valid,
    inner_product,
    to_rational,
)
from combdemand.graph import ConstraintGraph, collapse
from combdemand.oracle import _monotone_closure_table, demand_many


class CyclicMonotonicityError(ValueError):
    def __init__(self, certificate: CycleCertificate):
        self.certificate = certificate
        super().__init__(f"data violate cyclic monotonicity (cycle total {certificate.total})")


@dataclass(frozen=True)
class AffinePiece:
    slope: Prices
    intercept: Fraction
    # where the piece came from: first step into ``bundle`` at observation ``observation``
    bundle: Optional[Bundle] = None
    observation: Optional[int] = None

    def __call__(self, bundle: Bundle) -> Fraction:
        return inner_product(self.slope, bundle) + self.intercept


@dataclass(frozen=True)
class AffineRepresentation:
    """``value(A) = min_k <slope_k, 1_A> + intercept_k``."""

    universe: Universe
    pieces: tuple[AffinePiece, ...]

    def __call__(self, bundle: Bundle) -> Fraction:
        return evaluate_representation(self, bundle)

    def to_dict(self) -> dict:
        return {
            "pieces": [
                {
                    "slope": {x: str(piece.slope[x]) for x in self.universe.items},
                    "intercept": str(piece.intercept),
                }
                for piece in self.pieces
            ]
        }

    @classmethod
    def from_dict(cls, universe: Universe, data: dict) -> "AffineRepresentation":
        return cls(
            universe,
            tuple(
                AffinePiece(Prices.from_mapping(universe, p["slope"]), to_rational(p["intercept"]))
                for p in data["pieces"]
            ),
        )


class Recovery(NamedTuple):
    valuation: Valuation
    representation: AffineRepresentation


def evaluate_representation(rep: AffineRepresentation, bundle: Bundle) -> Fraction:
    if not rep.pieces:
        raise ValueError("empty representation")
    return min(piece(bundle) for piece in rep.pieces)


def build_constraint_graph(d: DemandDataset) -> ConstraintGraph:
    """Collapsed graph with the terminal at the lowest-index observation demanding ``{}``."""
    ensure_valid(d)
    empties = d.empty_observations()
    if not empties:
        raise PreconditionError("recovery needs an observation at which the empty bundle is demanded")
    graph = collapse(d)
    terminal = graph.node_index(d.universe.empty)
    return ConstraintGraph(
        graph.dataset, graph.nodes, graph.pairs, graph.scale, graph.scaled_weights,
        graph.witness, terminal=terminal, terminal_observation=empties[0],
    )


def _scaled_distances(graph: ConstraintGraph) -> list[int]:
    cycle = kernels.negative_cycle(graph.scaled_weights, len(graph))
    if cycle:
        raise CyclicMonotonicityError(cycle_from_graph(graph, cycle))
    result = kernels.shortest_to(graph.scaled_weights, len(graph), graph.terminal)
    if result is None:  # pragma: no cover - excluded by the cycle check above
        raise AssertionError("negative cycle missed by the cycle check")
    return list(result[0])


def shortest_distances(graph: ConstraintGraph) -> list[Fraction]:
    """Cheapest path cost from each node to the terminal.

    Raises :class:`CyclicMonotonicityError` when a negative cycle exists.
    """
    return [Fraction(x, graph.scale) for x in _scaled_distances(graph)]


def recover_valuation(d: DemandDataset) -> Recovery:
    """Valuation built from the data by shortest paths, with its affine envelope.

    The returned valuation is 0 at the empty bundle, monotone, and weakly
    rationalizes ``d``. Strict rationalization is not promised on finite data.
    """
    graph = build_constraint_graph(d)
    dist = _scaled_distances(graph)
    u = d.universe
    n = len(u)
    prices = d.scaled_prices
    masks = [b.mask for b in graph.nodes]
    # one affine piece per (observation, demanded bundle): slope p_i, intercept dist(w) - <p_i, A_w>
    piece_obs = [i for i, _ in graph.pairs]
    intercepts = []
    for i, k in graph.pairs:
        off = i * n
        ip = sum(prices[off + x] for x in range(n) if masks[k] >> x & 1)
        intercepts.append(dist[k] - ip)
    values, active = kernels.envelope_min(prices, n, piece_obs, intercepts)
    scale = graph.scale
    table = tuple(Fraction(x, scale) for x in values)
    if table[0] != 0:
        raise AssertionError(f"recovered value at the empty bundle is {table[0]}, expected 0")
    # keep every piece that is tight at some bundle; identical pieces once
    pieces, seen = [], set()
    for t in range(len(active)):
        if not active[t]:
            continue
        key = (graph.pairs[t][0], intercepts[t])
        if key in seen:
            continue
        seen.add(key)
        obs, node = graph.pairs[t]
        pieces.append(AffinePiece(d[obs].prices, Fraction(intercepts[t], scale), graph.nodes[node], obs))
    return Recovery(Valuation(u, table), AffineRepresentation(u, tuple(pieces)))


@dataclass(frozen=True)
class RationalizationFailure:
    observation: int
    kind: str  # "not_optimal" or "extra_maximizer"
    bundle: Bundle
    # surplus(bundle) - max surplus: negative when a demanded bundle is beaten,
    # zero when an undemanded bundle ties the optimum
    slack: Fraction

    def to_dict(self) -> dict:
        return {
            "kind": "rationalization",
            "observation": self.observation,
            "failure": self.kind,
            "bundle": list(self.bundle.items),
            "slack": str(self.slack),
        }


@dataclass(frozen=True)
class RationalizationReport:
    mode: str
    failures: tuple[RationalizationFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def verify_rationalization(v: Valuation, d: DemandDataset, mode: str = "weak") -> RationalizationReport:
    """Check that ``v`` rationalizes every observation.

    ``weak``: each demanded bundle attains the maximal surplus. ``strict``:
    additionally no other bundle attains it, so demand under ``v`` equals the
    observed set exactly.
    """
    if mode not in ("weak", "strict"):
        raise ValueError(f"mode must be 'weak' or 'strict', got {mode!r}")
    ensure_valid(d)
    failures = []
    for i, (obs, res) in enumerate(zip(d, demand_many(v, [o.prices for o in d]))):
        best = res.masks
        for b in obs.demanded:
            if b.mask not in best:
                slack = v[b] - inner_product(obs.prices, b) - res.surplus
                failures.append(RationalizationFailure(i, "not_optimal", b, slack))
        if mode == "strict":
            observed = {b.mask for b in obs.demanded}
            for b in res.bundles:
                if b.mask not in observed:
                    failures.append(RationalizationFailure(i, "extra_maximizer", b, Fraction(0)))
    return RationalizationReport(mode, tuple(failures))


def monotone_closure(h: Valuation) -> Valuation:
    """Smallest monotone valuation dominating ``h``: ``max_{B <= A} h(B)``."""
    return Valuation(h.universe, tuple(_monotone_closure_table(h.table)))
