"""JSON file formats for datasets and valuations.

Dataset::

    {"items": ["a", "b"],
     "observations": [{"prices": {"a": "3/2", "b": 2}, "demanded": [["a"], []]}]}

Valuation::

    {"items": ["a", "b"], "values": {"{}": "0", "{a}": "3", "{b}": "2", "{a,b}": "4"}}

Rationals are written as ``"n/d"`` strings (or bare integers when integral on
input); bundle keys list their items in universe order.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from combdemand.core import (
    Bundle,
    DemandDataset,
    Observation,
    Prices,
    Universe,
    Valuation,
    to_rational,
)

PathLike = Union[str, Path]


class ParseError(ValueError):
    """Malformed input; the message names the offending field."""


def _rational(value: Any, where: str):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"{where}: expected an integer or 'n/d' string, got {value!r}")
    try:
        return to_rational(value)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _universe(obj: Any, where: str = "items") -> Universe:
    if not isinstance(obj, list):
        raise ParseError(f"{where}: expected a list of item labels")
    try:
        return Universe(tuple(obj))
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _bundle(universe: Universe, obj: Any, where: str) -> Bundle:
    if not isinstance(obj, list):
        raise ParseError(f"{where}: expected a list of items")
    try:
        return universe.bundle(obj)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def bundle_key(bundle: Bundle) -> str:
    for label in bundle.items:
        if any(ch in label for ch in ",{}"):
            raise ValueError(f"item label {label!r} cannot appear in a bundle key")
    return "{" + ",".join(bundle.items) + "}"


def parse_bundle_key(universe: Universe, key: str, where: str = "values") -> Bundle:
    text = key.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"{where}: bundle key {key!r} must look like {{a,b}}")
    inner = text[1:-1].strip()
    labels = [x.strip() for x in inner.split(",")] if inner else []
    return _bundle(universe, labels, f"{where}[{key!r}]")


def dataset_to_dict(d: DemandDataset) -> dict:
    return {
        "items": list(d.universe.items),
        "observations": [
            {
                "prices": {x: str(obs.prices[x]) for x in d.universe.items},
                "demanded": [list(b.items) for b in obs.demanded],
            }
            for obs in d
        ],
    }


def dataset_from_dict(obj: Any) -> DemandDataset:
    """Parse without semantic validation; see :func:`combdemand.core.validate_dataset`."""
    if not isinstance(obj, dict):
        raise ParseError("dataset: expected a JSON object")
    if "items" not in obj or "observations" not in obj:
        raise ParseError("dataset: needs 'items' and 'observations'")
    u = _universe(obj["items"])
    if not isinstance(obj["observations"], list):
        raise ParseError("observations: expected a list")
    observations = []
    for k, raw in enumerate(obj["observations"]):
        where = f"observations[{k}]"
        if not isinstance(raw, dict) or "prices" not in raw or "demanded" not in raw:
            raise ParseError(f"{where}: needs 'prices' and 'demanded'")
        prices = raw["prices"]
        if not isinstance(prices, dict):
            raise ParseError(f"{where}.prices: expected an object keyed by item")
        if set(prices) != set(u.items):
            raise ParseError(f"{where}.prices: keys must be exactly {list(u.items)}")
        p = Prices(u, tuple(_rational(prices[x], f"{where}.prices.{x}") for x in u.items))
        if not isinstance(raw["demanded"], list):
            raise ParseError(f"{where}.demanded: expected a list of bundles")
        demanded = tuple(_bundle(u, b, f"{where}.demanded[{j}]") for j, b in enumerate(raw["demanded"]))
        observations.append(Observation(p, demanded))
    return DemandDataset(u, tuple(observations))


def valuation_to_dict(v: Valuation) -> dict:
    return {
        "items": list(v.universe.items),
        "values": {bundle_key(b): str(v[b]) for b in v.universe.bundles()},
    }


def valuation_from_dict(obj: Any) -> Valuation:
    if not isinstance(obj, dict) or "items" not in obj or "values" not in obj:
        raise ParseError("valuation: needs 'items' and 'values'")
    u = _universe(obj["items"])
    values = obj["values"]
    if not isinstance(values, dict):
        raise ParseError("values: expected an object keyed by bundle")
    table: list = [None] * (1 << len(u))
    for key, raw in values.items():
        b = parse_bundle_key(u, key)
        table[b.mask] = _rational(raw, f"values[{key!r}]")
    missing = [str(Bundle(u, m)) for m, x in enumerate(table) if x is None]
    if missing:
        raise ParseError(f"values: missing bundles {missing}")
    return Valuation(u, tuple(table))


def _load_json(path: PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _dump_json(obj: Any, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def read_dataset(path: PathLike) -> DemandDataset:
    return dataset_from_dict(_load_json(path))


def write_dataset(d: DemandDataset, path: PathLike) -> None:
    _dump_json(dataset_to_dict(d), path)


def read_valuation(path: PathLike) -> Valuation:
    return valuation_from_dict(_load_json(path))


def write_valuation(v: Valuation, path: PathLike) -> None:
    _dump_json(valuation_to_dict(v), path)
