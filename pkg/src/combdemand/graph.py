"""Collapsed revealed-preference graph.

Nodes are the distinct demanded bundles. The edge ``u -> w`` costs
``min <p, A_u - A_w>`` over observed prices ``p`` at which ``A_w`` is demanded,
so a path ``A -> A_1 -> ... -> A_k -> {}`` costs exactly
``<p_1, A - A_1> + <p_2, A_1 - A_2> + ... + <p*, A_k>``. Negative cycles here
are reversed violations of cyclic monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from combdemand import kernels
from combdemand.core import Bundle, DemandDataset, Prices


@dataclass(frozen=True)
class ConstraintGraph:
    dataset: DemandDataset
    nodes: tuple[Bundle, ...]
    # (observation index, node index) for every demanded bundle, canonical order
    pairs: tuple[tuple[int, int], ...]
    scale: int
    # row-major |V| x |V| integer weights, already multiplied by ``scale``
    scaled_weights: tuple[int, ...]
    # observation index realizing each edge's minimum, -1 on the diagonal
    witness: tuple[int, ...]
    terminal: Optional[int] = None
    terminal_observation: Optional[int] = None

    def __len__(self) -> int:
        return len(self.nodes)

    def node_index(self, bundle: Bundle) -> int:
        return self._index[bundle.mask]

    @property
    def _index(self) -> dict[int, int]:
        return {b.mask: k for k, b in enumerate(self.nodes)}

    def weight(self, u: int, w: int) -> Fraction:
        return Fraction(self.scaled_weights[u * len(self.nodes) + w], self.scale)

    def edge_observation(self, u: int, w: int) -> int:
        return self.witness[u * len(self.nodes) + w]

    def support(self, node: int) -> list[int]:
        """Observation indices at which the node's bundle is demanded."""
        return [i for i, k in self.pairs if k == node]

    @property
    def terminal_price(self) -> Optional[Prices]:
        if self.terminal_observation is None:
            return None
        return self.dataset[self.terminal_observation].prices

    def cycle_weight(self, cycle: list[int]) -> Fraction:
        n = len(cycle)
        return sum((self.weight(cycle[k], cycle[(k + 1) % n]) for k in range(n)), Fraction(0))


def collapse(d: DemandDataset) -> ConstraintGraph:
    """Build the collapsed graph without requiring an empty-bundle observation."""
    masks = sorted({b.mask for obs in d for b in obs.demanded})
    index = {m: k for k, m in enumerate(masks)}
    pairs = tuple((i, index[b.mask]) for i, obs in enumerate(d) for b in obs.demanded)
    n = len(d.universe)
    weights, witness_pairs = kernels.edge_weights(
        d.scaled_prices, n, [i for i, _ in pairs], [k for _, k in pairs], masks
    )
    witness = tuple(pairs[t][0] if t >= 0 else -1 for t in witness_pairs)
    nodes = tuple(Bundle(d.universe, m) for m in masks)
    return ConstraintGraph(d, nodes, pairs, d.price_scale, tuple(weights), witness)
