"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--items 8] [--prices 200] [--repeat 3]

Inputs are random scaled integers of the size a real dataset produces; both
backends receive identical inputs and their outputs are compared before timing.
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit
from fractions import Fraction

from combdemand import Grid, Universe, gen_valuation, recover_valuation, sample_dataset
from combdemand import kernels


def _inputs(n_items: int, n_prices: int, seed: int):
    rng = random.Random(seed)
    size = 1 << n_items
    values = [0] + [rng.randint(0, 400) for _ in range(size - 1)]
    prices = [rng.randint(1, 120) for _ in range(n_prices * n_items)]
    nv = min(size, 48)
    node_masks = rng.sample(range(size), nv)
    pair_obs = [rng.randrange(n_prices) for _ in range(nv * 2)]
    pair_node = [k % nv for k in range(nv * 2)]
    offsets, masks = [0], []
    for _ in range(n_prices):
        masks.extend(sorted(rng.sample(range(size), rng.randint(1, 2))))
        offsets.append(len(masks))
    weights, _ = kernels.edge_weights(prices, n_items, pair_obs, pair_node, node_masks, backend="python")
    intercepts = [rng.randint(-200, 200) for _ in pair_obs]
    return {
        "demand_batch": (values, prices, n_items, n_prices),
        "edge_weights": (prices, n_items, pair_obs, pair_node, node_masks),
        "negative_cycle": (weights, nv),
        "shortest_to": (weights, nv, 0),
        "lod_scan": (prices, n_items, offsets, masks, n_prices),
        "envelope_min": (prices, n_items, pair_obs, intercepts),
    }


def _normalize(result):
    if isinstance(result, (list, tuple)):
        return [_normalize(x) for x in result]
    if hasattr(result, "tolist"):
        return result.tolist()
    return result


def _best(stmt, repeat: int) -> float:
    timer = timeit.Timer(stmt)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--items", type=int, default=8)
    parser.add_argument("--prices", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the fallback can be timed", file=sys.stderr)
    inputs = _inputs(args.items, args.prices, args.seed)
    print(f"{'kernel':<20}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for name, call_args in inputs.items():
        fn = getattr(kernels, name)
        outputs = [_normalize(fn(*call_args, backend=b)) for b in backends]
        if any(o != outputs[0] for o in outputs):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        times = [_best(lambda b=b: fn(*call_args, backend=b), args.repeat) for b in backends]
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else f"{'-':>10}"
        print(f"{name:<20}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times) + speed)

    # end to end: recovery on a sampled grid, one run per backend
    u = Universe(tuple("abcd"))
    d = sample_dataset(gen_valuation(u, "submodular", 16, args.seed), Grid(Fraction(1, 2), 4, Fraction(1, 2)))
    saved = kernels._ckernels
    times = []
    for b in backends:
        kernels._ckernels = saved if b == "cython" else None
        times.append(_best(lambda: recover_valuation(d), 1))
    kernels._ckernels = saved
    speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else f"{'-':>10}"
    label = f"recover ({len(d)} obs)"
    print(f"{label:<20}"
          + "".join(f"{t * 1e3:>12.3f}ms" for t in times) + speed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
