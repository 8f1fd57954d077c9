"""Ground-truth demand from a known valuation.

Besides brute-force demand, this module holds the constructive price devices
used by the theory: a price above which only the empty bundle is demanded, a
price supporting any bundle in the range of demand, and the ``W``/``E``
perturbation that turns upper hemicontinuity into a strict separation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from combdemand import kernels
from combdemand.core import (
    Bundle,
    DemandDataset,
    Observation,
    PreconditionError,
    Prices,
    Rational,
    Universe,
    UniverseMismatch,
    Valuation,
    lcm_of_denominators,
    scaled,
    to_rational,
)

VALUATION_CLASSES = ("arbitrary", "monotone", "submodular")


@dataclass(frozen=True)
class DemandResult:
    prices: Prices
    bundles: tuple[Bundle, ...]
    surplus: Fraction

    def __contains__(self, bundle: Bundle) -> bool:
        return bundle in self.bundles

    @property
    def masks(self) -> frozenset[int]:
        return frozenset(b.mask for b in self.bundles)


@dataclass(frozen=True)
class SpadeCertificate:
    """Witness that a bundle ``B`` not demanded at ``p`` is strictly beaten.

    ``perturbed = base + lam * 1_W - lam_prime * 1_E`` and the witness ``A'``
    is demanded at both prices with ``<p', A'-B> > <p, A'-B>``.
    """

    base: Prices
    excluded: Bundle
    w: Bundle
    e: Bundle
    lam: Fraction
    lam_prime: Fraction
    perturbed: Prices
    witness: Bundle

    def check(self, v: Valuation) -> list[str]:
        """Re-derive every invariant from scratch; returns the failures."""
        n = len(self.base.universe)
        problems = []
        expected = tuple(
            self.base[k] + (self.lam if self.w.mask >> k & 1 else 0) - (self.lam_prime if self.e.mask >> k & 1 else 0)
            for k in range(n)
        )
        if expected != self.perturbed.values:
            problems.append("perturbed prices do not match p + lam*1_W - lam'*1_E")
        if not (self.lam > 0 and self.lam_prime > 0 and self.lam / self.lam_prime > n):
            problems.append("multipliers violate lam/lam' > |X|")
        if not self.perturbed.is_positive():
            problems.append("perturbed prices leave the positive orthant")
        base = demand(v, self.base)
        if self.excluded in base.bundles:
            problems.append("excluded bundle is demanded at the base price")
        moved = demand(v, self.perturbed)
        if not moved.masks <= base.masks:
            problems.append("demand at p' is not contained in demand at p")
        delta = self.perturbed - self.base
        for a in moved.bundles:
            if _signed(delta, a, self.excluded) <= 0:
                problems.append(f"<p'-p, A'-B> <= 0 for A'={a}")
        if self.witness not in moved.bundles:
            problems.append("witness is not demanded at p'")
        return problems

    def to_dict(self) -> dict:
        return {
            "kind": "spade",
            "base": [str(x) for x in self.base],
            "excluded": list(self.excluded.items),
            "W": list(self.w.items),
            "E": list(self.e.items),
            "lambda": str(self.lam),
            "lambda_prime": str(self.lam_prime),
            "perturbed": [str(x) for x in self.perturbed],
            "witness": list(self.witness.items),
        }

    @classmethod
    def from_dict(cls, universe: Universe, data: dict) -> "SpadeCertificate":
        return cls(
            base=universe.prices(data["base"]),
            excluded=universe.bundle(data["excluded"]),
            w=universe.bundle(data["W"]),
            e=universe.bundle(data["E"]),
            lam=to_rational(data["lambda"]),
            lam_prime=to_rational(data["lambda_prime"]),
            perturbed=universe.prices(data["perturbed"]),
            witness=universe.bundle(data["witness"]),
        )


def _signed(vec: Sequence[Fraction], a: Bundle, b: Bundle) -> Fraction:
    return sum((x * ((a.mask >> k & 1) - (b.mask >> k & 1)) for k, x in enumerate(vec)), Fraction(0))


def demand_many(v: Valuation, prices: Sequence[Prices]) -> list[DemandResult]:
    """Exact argmax sets at several prices, enumerating all 2^|X| bundles."""
    u = v.universe
    n = len(u)
    for p in prices:
        if p.universe != u:
            raise UniverseMismatch("prices and valuation belong to different universes")
        p.require_positive()
    if not prices:
        return []
    scale = lcm_of_denominators(itertools.chain(v.table, (x for p in prices for x in p.values)))
    vals = scaled(v.table, scale)
    flat = scaled((x for p in prices for x in p.values), scale)
    surplus, offsets, masks = kernels.demand_batch(vals, flat, n, len(prices))
    out = []
    for i, p in enumerate(prices):
        bundles = tuple(Bundle(u, masks[t]) for t in range(offsets[i], offsets[i + 1]))
        out.append(DemandResult(p, bundles, Fraction(surplus[i], scale)))
    return out


def demand(v: Valuation, p: Prices) -> DemandResult:
    """All maximizers of ``v(A) - <p, A>`` and the maximal surplus."""
    return demand_many(v, [p])[0]


def indirect_utility(v: Valuation, p: Prices) -> Fraction:
    return demand(v, p).surplus


def disposal_price(v: Valuation) -> Prices:
    """Uniform price ``(max v - min v) + 1``; at or above it only the empty bundle is demanded.

    For ``A`` nonempty, ``v(A) - <p, A> <= v(A) - (max v - min v) - 1 < min v <= v(empty)``.
    """
    bound = max(v.table) - min(v.table) + 1
    return v.universe.uniform(bound)


def in_range(v: Valuation, bundle: Bundle) -> bool:
    """True iff every proper subset is worth strictly less than ``bundle``.

    Equivalently, ``bundle`` is demanded at some strictly positive price.
    """
    if bundle.universe != v.universe:
        raise UniverseMismatch("bundle and valuation belong to different universes")
    top = v.table[bundle.mask]
    return all(v.table[sub] < top for sub in _proper_submasks(bundle.mask))


def _proper_submasks(mask: int):
    sub = (mask - 1) & mask
    while True:
        if sub == mask:
            break
        yield sub
        if sub == 0:
            break
        sub = (sub - 1) & mask


def supporting_price(v: Valuation, bundle: Bundle) -> Prices:
    """A price at which ``bundle`` is demanded (in fact uniquely).

    Items in the bundle are priced at ``gap / (2|X|)``, where ``gap`` is the
    smallest margin of the bundle over a proper subset; all other items at the
    disposal bound. The result is checked against :func:`demand` before it is
    returned.
    """
    if not in_range(v, bundle):
        raise PreconditionError(f"{bundle} is not in the range of demand")
    n = len(v.universe)
    top = v.table[bundle.mask]
    if bundle.mask:
        gap = min(top - v.table[sub] for sub in _proper_submasks(bundle.mask))
        eps = gap / (2 * n)
    else:
        eps = Fraction(1)
    high = max(v.table) - min(v.table) + 1
    p = Prices(v.universe, tuple(eps if bundle.mask >> k & 1 else high for k in range(n)))
    if bundle not in demand(v, p).bundles:
        raise AssertionError(f"supporting price {p} does not demand {bundle}")
    return p


def spade_perturbation(
    v: Valuation,
    p: Prices,
    excluded: Bundle,
    *,
    initial: Rational = Fraction(1, 10),
    shrink: Rational = Fraction(1, 2),
    max_steps: int = 256,
) -> SpadeCertificate:
    """Find ``p'`` near ``p`` at which some demanded bundle strictly beats ``excluded``.

    With ``W`` the union of ``A \\ B`` and ``E`` the union of ``B \\ A`` over
    ``A`` demanded at ``p``, we move to ``p + lam*1_W - lam'*1_E`` with
    ``lam = (|X| + 1) * lam'``. The neighbourhood on which demand can only
    shrink is unknown, so ``lam'`` starts at ``initial * min(p)`` and is
    multiplied by ``shrink`` until every condition verifies.
    """
    u = v.universe
    if p.universe != u or excluded.universe != u:
        raise UniverseMismatch("operands belong to different universes")
    base = demand(v, p)
    if excluded in base.bundles:
        raise PreconditionError(f"{excluded} is demanded at {p}")
    w_mask = e_mask = 0
    for a in base.bundles:
        w_mask |= a.mask & ~excluded.mask
        e_mask |= excluded.mask & ~a.mask
    w, e = Bundle(u, w_mask), Bundle(u, e_mask)
    n = len(u)
    ratio = n + 1
    lam_prime = to_rational(initial) * min(p.values)
    shrink = to_rational(shrink)
    for _ in range(max_steps):
        lam = ratio * lam_prime
        delta = tuple((lam if w_mask >> k & 1 else 0) - (lam_prime if e_mask >> k & 1 else 0) for k in range(n))
        q = p.shifted(delta)
        if q.is_positive():
            moved = demand(v, q)
            if moved.masks <= base.masks and all(_signed(delta, a, excluded) > 0 for a in moved.bundles):
                return SpadeCertificate(p, excluded, w, e, lam, lam_prime, q, moved.bundles[0])
        lam_prime *= shrink
    raise RuntimeError(f"no admissible perturbation found in {max_steps} steps")


def _monotone_closure_table(table: Sequence[Fraction]) -> list[Fraction]:
    out = list(table)
    for mask in range(1, len(out)):
        m = mask
        while m:
            low = m & -m
            if out[mask ^ low] > out[mask]:
                out[mask] = out[mask ^ low]
            m ^= low
    return out


def gen_valuation(
    universe: Universe,
    cls: str = "arbitrary",
    value_bound: int = 16,
    seed: Optional[int] = None,
) -> Valuation:
    """Random integer valuation with ``v(empty) = 0`` and values in ``[0, value_bound]``.

    ``monotone`` takes the monotone closure of a random table. ``submodular``
    builds a weighted coverage function: each item covers a random subset of
    ``2|X|`` weighted elements and a bundle is worth the weight it covers, which
    is monotone and submodular by construction.
    """
    if value_bound < 1:
        raise ValueError("value_bound must be at least 1")
    if cls not in VALUATION_CLASSES:
        raise ValueError(f"unknown valuation class {cls!r}")
    rng = random.Random(seed)
    n = len(universe)
    size = 1 << n
    if cls == "submodular":
        m = 2 * n
        total = rng.randint(1, value_bound)
        cuts = sorted(rng.randint(0, total) for _ in range(m - 1))
        weights = [b - a for a, b in zip([0] + cuts, cuts + [total])]
        covers = [[e for e in range(m) if rng.random() < 0.5] for _ in range(n)]
        table = []
        for mask in range(size):
            covered = set()
            for k in range(n):
                if mask >> k & 1:
                    covered.update(covers[k])
            table.append(sum(weights[e] for e in covered))
        return Valuation(universe, tuple(table))
    table = [0] + [rng.randint(0, value_bound) for _ in range(size - 1)]
    if cls == "monotone":
        table = _monotone_closure_table(table)
    return Valuation(universe, tuple(table))


@dataclass(frozen=True)
class Grid:
    """Axis-aligned price grid ``lo, lo+step, ..., <= hi`` on every item.

    Each field may be a single rational (shared by all items) or one per item.
    """

    lo: Union[Rational, Sequence[Rational]]
    hi: Union[Rational, Sequence[Rational]]
    step: Union[Rational, Sequence[Rational]]

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like lo:hi:step, got {text!r}")
        return cls(*(to_rational(x) for x in parts))

    def _axis(self, value, k: int) -> Fraction:
        if isinstance(value, (list, tuple)):
            return to_rational(value[k])
        return to_rational(value)

    def axes(self, universe: Universe) -> list[list[Fraction]]:
        axes = []
        for k in range(len(universe)):
            lo, hi, step = (self._axis(x, k) for x in (self.lo, self.hi, self.step))
            if step <= 0:
                raise ValueError("grid step must be positive")
            if lo <= 0:
                raise ValueError("grid points must be strictly positive")
            count = int((hi - lo) // step) + 1 if hi >= lo else 0
            axes.append([lo + j * step for j in range(count)])
        return axes

    def points(self, universe: Universe) -> list[Prices]:
        return [Prices(universe, vals) for vals in itertools.product(*self.axes(universe))]


def sample_dataset(
    v: Valuation,
    prices: Union[Sequence[Prices], Grid],
    *,
    with_disposal: Optional[bool] = None,
) -> DemandDataset:
    """Observe the full demand of ``v`` at each price.

    A disposal observation is appended for grids always, and for explicit price
    lists only when no listed price already demands the empty bundle (pass
    ``with_disposal`` to override), so the result can always be recovered.
    """
    if isinstance(prices, Grid):
        points = prices.points(v.universe)
        if with_disposal is None:
            with_disposal = True
    else:
        points = list(prices)
    if not points:
        raise ValueError("need at least one price")
    results = demand_many(v, points)
    if with_disposal is None:
        with_disposal = not any(0 in r.masks for r in results)
    if with_disposal:
        results += demand_many(v, [disposal_price(v)])
    return DemandDataset(v.universe, tuple(Observation(r.prices, r.bundles) for r in results))
