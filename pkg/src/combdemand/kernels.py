"""Backend selection for the integer kernels.

The compiled extension ``_ckernels`` is used when it imports and the inputs
provably fit in int64; otherwise the pure-Python twin in ``_pykernels`` runs on
unbounded ints. Set ``COMBDEMAND_PURE=1`` to force the fallback everywhere.

All functions take plain int sequences and return int sequences; callers are
responsible for scaling rationals to a common denominator.
"""

from __future__ import annotations

import os
from array import array
from typing import Optional, Sequence

from combdemand import _pykernels

try:
    from combdemand import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

if os.environ.get("COMBDEMAND_PURE"):
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

# Headroom below 2**63 for sums formed inside a kernel.
_INT64_LIMIT = 2**62


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def _pick(backend: Optional[str], magnitude: int, factor: int):
    if backend == "python":
        return _pykernels, None
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        if magnitude * factor >= _INT64_LIMIT:
            raise OverflowError("inputs too large for the int64 kernels")
        return _ckernels, array
    if _ckernels is not None and magnitude * factor < _INT64_LIMIT:
        return _ckernels, array
    return _pykernels, None


def _pack(conv, seq):
    return seq if conv is None else conv("q", seq)


def _mag(*seqs: Sequence[int]) -> int:
    return max((abs(x) for s in seqs for x in s), default=0)


def demand_batch(values, prices, n, m, backend=None):
    """Maximal surplus and all maximizers at each of ``m`` price vectors."""
    mod, conv = _pick(backend, _mag(values, prices), n + 2)
    return mod.demand_batch(_pack(conv, values), _pack(conv, prices), n, m)


def edge_weights(prices, n, pair_obs, pair_node, node_masks, backend=None):
    """Minimum ``<p, A_u - A_w>`` over prices supporting ``w``, per node pair."""
    mod, conv = _pick(backend, _mag(prices), 2 * n + 2)
    return mod.edge_weights(
        _pack(conv, prices), n, _pack(conv, pair_obs), _pack(conv, pair_node),
        _pack(conv, node_masks),
    )


def negative_cycle(weights, nv, backend=None):
    mod, conv = _pick(backend, _mag(weights), 2 * nv + 4)
    return list(mod.negative_cycle(_pack(conv, weights), nv))


def shortest_to(weights, nv, target, backend=None):
    mod, conv = _pick(backend, _mag(weights), 2 * nv + 4)
    return mod.shortest_to(_pack(conv, weights), nv, target)


def lod_scan(prices, n, offsets, masks, m, backend=None):
    mod, conv = _pick(backend, _mag(prices), 4 * n + 4)
    return mod.lod_scan(_pack(conv, prices), n, _pack(conv, offsets), _pack(conv, masks), m)


def envelope_min(prices, n, piece_obs, intercepts, backend=None):
    mod, conv = _pick(backend, _mag(prices) * (n + 1) + _mag(intercepts), 2)
    return mod.envelope_min(
        _pack(conv, prices), n, _pack(conv, piece_obs), _pack(conv, intercepts)
    )
