"""Command-line front end.

Exit codes: 0 pass, 1 violation or failed verification (with certificate),
2 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from combdemand import __version__
from combdemand.axioms import check_cyclic_monotonicity, check_law_of_demand
from combdemand.core import (
    DatasetError,
    DemandDataset,
    PreconditionError,
    Prices,
    Universe,
    UniverseMismatch,
    ensure_valid,
    to_rational,
)
from combdemand.identification import (
    canonical_valuation,
    compare_rationalizations,
    segment_envelope,
    selection_integral,
)
from combdemand.io import (
    ParseError,
    read_dataset,
    read_valuation,
    valuation_to_dict,
    write_dataset,
    write_valuation,
)
from combdemand.oracle import (
    VALUATION_CLASSES,
    Grid,
    demand_many,
    disposal_price,
    gen_valuation,
    indirect_utility,
    sample_dataset,
    spade_perturbation,
)
from combdemand.recovery import CyclicMonotonicityError, recover_valuation, verify_rationalization

SCHEMA = "combdemand.report/1"

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class Report:
    command: str
    verdict: str  # "pass", "fail" or "error"
    certificates: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)
    timing: Optional[float] = None

    def to_machine(self) -> dict:
        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "verdict": self.verdict,
            "certificates": self.certificates,
            "payload": self.payload,
            "messages": self.messages,
        }
        if self.timing is not None:
            doc["timing"] = self.timing
        return doc

    @classmethod
    def from_machine(cls, text: str) -> "Report":
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA:
            raise ParseError(f"unsupported report schema {doc.get('schema')!r}")
        return cls(
            command=doc["command"],
            verdict=doc["verdict"],
            certificates=doc["certificates"],
            payload=doc["payload"],
            messages=doc["messages"],
            timing=doc.get("timing"),
        )


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "machine"), default="text")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--timing", action="store_true", help="record wall-clock time in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="combdemand", description="Exact tests for combinatorial demand data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("check", help="law of demand and cyclic monotonicity")
    p.add_argument("--dataset", required=True)
    _common(p)

    p = sub.add_parser("recover", help="recover a valuation and its affine representation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--mode", choices=("weak", "strict"), default="weak")
    p.add_argument("--out", help="write the recovered valuation to this file")
    _common(p)

    p = sub.add_parser("demand", help="evaluate demand of a valuation")
    p.add_argument("--valuation", required=True)
    p.add_argument("--prices", action="append", default=[], help="comma-separated, item order")
    p.add_argument("--grid", help="lo:hi:step")
    _common(p)

    p = sub.add_parser("identify", help="canonical valuation, or compare two valuations")
    p.add_argument("--valuation", required=True)
    p.add_argument("--other")
    p.add_argument("--grid", help="probe grid lo:hi:step (default 1/4 steps up to the disposal price)")
    p.add_argument("--segments", type=int, default=0, help="random exact segments to compare")
    _common(p)

    p = sub.add_parser("spade", help="perturbation certificate for a bundle not demanded")
    p.add_argument("--valuation", required=True)
    p.add_argument("--prices", required=True)
    p.add_argument("--bundle", required=True, help="comma-separated items; empty string for {}")
    _common(p)

    p = sub.add_parser("integrate", help="segment envelope and the integral identity")
    p.add_argument("--valuation", required=True)
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="end", required=True)
    _common(p)

    p = sub.add_parser("gen", help="generate a valuation and optionally a sampled dataset")
    p.add_argument("--items", required=True, help="comma-separated item labels")
    p.add_argument("--class", dest="cls", choices=VALUATION_CLASSES, default="arbitrary")
    p.add_argument("--bound", type=int, default=16)
    p.add_argument("--grid")
    p.add_argument("--prices", action="append", default=[])
    p.add_argument("--out-valuation")
    p.add_argument("--out-dataset")
    _common(p)
    return parser


def load_dataset(path: str) -> DemandDataset:
    """Read and validate a dataset file (``ParseError`` / ``DatasetError`` on bad input)."""
    return ensure_valid(read_dataset(path))


def _prices(u: Universe, text: str) -> Prices:
    parts = [x for x in text.split(",")]
    if len(parts) != len(u):
        raise ParseError(f"--prices {text!r}: expected {len(u)} comma-separated values")
    try:
        return Prices(u, tuple(to_rational(x.strip()) for x in parts)).require_positive()
    except (ValueError, TypeError) as exc:
        raise ParseError(f"--prices {text!r}: {exc}") from None


def _bundle(u: Universe, text: str):
    labels = [x.strip() for x in text.split(",") if x.strip()]
    try:
        return u.bundle(labels)
    except KeyError as exc:
        raise ParseError(f"--bundle: {exc}") from None


def _grid(text: str) -> Grid:
    try:
        return Grid.parse(text)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"--grid {text!r}: {exc}") from None


def _strs(values) -> list[str]:
    return [str(x) for x in values]


def _cmd_check(args) -> tuple[Report, int]:
    d = load_dataset(args.dataset)
    lod = check_law_of_demand(d)
    cm = check_cyclic_monotonicity(d)
    report = Report("check", "pass" if lod is None and cm is None else "fail")
    report.payload = {
        "observations": len(d),
        "law_of_demand": "pass" if lod is None else "fail",
        "cyclic_monotonicity": "pass" if cm is None else "fail",
    }
    for cert in (lod, cm):
        if cert is not None:
            report.certificates.append(cert.to_dict())
    return report, EXIT_PASS if report.verdict == "pass" else EXIT_FAIL


def _cmd_recover(args) -> tuple[Report, int]:
    d = load_dataset(args.dataset)
    report = Report("recover", "pass")
    try:
        v_hat, rep = recover_valuation(d)
    except CyclicMonotonicityError as exc:
        report.verdict = "fail"
        report.messages.append(str(exc))
        report.certificates.append(exc.certificate.to_dict())
        return report, EXIT_FAIL
    checks = {mode: verify_rationalization(v_hat, d, mode) for mode in ("weak", "strict")}
    report.payload = {
        "valuation": valuation_to_dict(v_hat),
        "representation": rep.to_dict(),
        "verification": {
            mode: {"ok": r.ok, "failures": [f.to_dict() for f in r.failures]} for mode, r in checks.items()
        },
        "mode": args.mode,
    }
    chosen = checks[args.mode]
    report.certificates.extend(f.to_dict() for f in chosen.failures)
    if not chosen.ok:
        report.verdict = "fail"
        report.messages.append(f"{args.mode} rationalization fails at {len(chosen.failures)} point(s)")
    if args.out:
        write_valuation(v_hat, args.out)
    return report, EXIT_PASS if chosen.ok else EXIT_FAIL


def _cmd_demand(args) -> tuple[Report, int]:
    v = read_valuation(args.valuation)
    points = [_prices(v.universe, t) for t in args.prices]
    if args.grid:
        points += _grid(args.grid).points(v.universe)
    if not points:
        raise ParseError("demand: give --prices or --grid")
    results = demand_many(v, points)
    report = Report("demand", "pass")
    report.payload = {
        "results": [
            {"prices": _strs(r.prices), "bundles": [list(b.items) for b in r.bundles], "surplus": str(r.surplus)}
            for r in results
        ]
    }
    return report, EXIT_PASS


def _random_prices(rng: random.Random, u: Universe, top: Fraction) -> Prices:
    # multiples of 1/8 in (0, top]
    steps = int(top * 8)
    return Prices(u, tuple(Fraction(rng.randint(1, steps), 8) for _ in range(len(u))))


def _cmd_identify(args) -> tuple[Report, int]:
    v = read_valuation(args.valuation)
    canon = canonical_valuation(v)
    report = Report("identify", "pass")
    report.payload = {"canonical": valuation_to_dict(canon)}
    if not args.other:
        return report, EXIT_PASS
    w = read_valuation(args.other)
    if w.universe != v.universe:
        raise ParseError("--other: valuations use different item lists")
    if args.grid:
        grid = _grid(args.grid)
    else:
        top = max(disposal_price(v)[0], disposal_price(w)[0])
        grid = Grid(Fraction(1, 4), top, Fraction(1, 4))
    rng = random.Random(args.seed)
    top = max(disposal_price(v)[0], disposal_price(w)[0]) + 1
    segments = [(_random_prices(rng, v.universe, top), _random_prices(rng, v.universe, top))
                for _ in range(args.segments)]
    verdict = compare_rationalizations(v, w, grid, segments)
    report.payload["other_canonical"] = valuation_to_dict(canonical_valuation(w))
    report.payload["comparison"] = verdict.to_dict()
    ok = verdict.same_demand and verdict.closure_equal
    if not ok:
        report.verdict = "fail"
        for p in verdict.demand_mismatches:
            report.certificates.append({"kind": "demand_mismatch", "prices": _strs(p)})
        for a, b in verdict.segment_mismatches:
            report.certificates.append({"kind": "segment_mismatch", "from": _strs(a), "to": _strs(b)})
    return report, EXIT_PASS if ok else EXIT_FAIL


def _cmd_spade(args) -> tuple[Report, int]:
    v = read_valuation(args.valuation)
    p = _prices(v.universe, args.prices)
    b = _bundle(v.universe, args.bundle)
    cert = spade_perturbation(v, p, b)
    problems = cert.check(v)
    report = Report("spade", "pass" if not problems else "fail", certificates=[cert.to_dict()])
    report.messages.extend(problems)
    return report, EXIT_PASS if not problems else EXIT_FAIL


def _cmd_integrate(args) -> tuple[Report, int]:
    v = read_valuation(args.valuation)
    x1 = _prices(v.universe, args.start)
    x2 = _prices(v.universe, args.end)
    env = segment_envelope(v, x1, x2)
    integral = selection_integral(v, x1, x2)
    u1, u2 = indirect_utility(v, x1), indirect_utility(v, x2)
    residual = u2 - u1 + integral
    report = Report("integrate", "pass" if residual == 0 else "fail")
    report.payload = {
        "envelope": env.to_dict(),
        "integral": str(integral),
        "indirect_utility": {"from": str(u1), "to": str(u2)},
        "identity_residual": str(residual),
    }
    return report, EXIT_PASS if residual == 0 else EXIT_FAIL


def _cmd_gen(args) -> tuple[Report, int]:
    try:
        u = Universe(tuple(x.strip() for x in args.items.split(",")))
    except ValueError as exc:
        raise ParseError(f"--items: {exc}") from None
    v = gen_valuation(u, args.cls, args.bound, args.seed)
    report = Report("gen", "pass")
    report.payload = {"valuation": valuation_to_dict(v)}
    points = [_prices(u, t) for t in args.prices]
    d = None
    if args.grid:
        d = sample_dataset(v, _grid(args.grid))
        if points:
            d = d.extended(sample_dataset(v, points, with_disposal=False).observations)
    elif points:
        d = sample_dataset(v, points)
    if d is not None:
        report.payload["observations"] = len(d)
        if args.out_dataset:
            write_dataset(d, args.out_dataset)
    elif args.out_dataset:
        raise ParseError("--out-dataset needs --grid or --prices")
    if args.out_valuation:
        write_valuation(v, args.out_valuation)
    return report, EXIT_PASS


_COMMANDS = {
    "check": _cmd_check,
    "recover": _cmd_recover,
    "demand": _cmd_demand,
    "identify": _cmd_identify,
    "spade": _cmd_spade,
    "integrate": _cmd_integrate,
    "gen": _cmd_gen,
}


def requested_format(argv: Sequence[str]) -> str:
    """Output format named on the command line, even if the rest fails to parse."""
    argv = list(argv)
    for k, tok in enumerate(argv):
        if tok == "--format=machine" or (tok == "--format" and argv[k + 1:k + 2] == ["machine"]):
            return "machine"
    return "text"


def run(argv: Sequence[str]) -> tuple[Report, int]:
    """Execute a command line and return the report with its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        return Report("usage", "error", messages=[str(exc).strip()]), EXIT_INPUT
    if args.command is None:
        return Report("usage", "error", messages=[parser.format_usage().strip()]), EXIT_INPUT
    start = time.perf_counter()
    try:
        report, code = _COMMANDS[args.command](args)
    except (ParseError, DatasetError, PreconditionError, UniverseMismatch, OSError, ValueError) as exc:
        report, code = Report(args.command, "error", messages=[str(exc)]), EXIT_INPUT
    if args.timing:
        report.timing = round(time.perf_counter() - start, 6)
    return report, code


def _render_value(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(", ", ": "))
    return str(value)


def render_report(report: Report, fmt: str = "text") -> str:
    if fmt == "machine":
        return json.dumps(report.to_machine(), indent=2, sort_keys=True) + "\n"
    lines = [f"{report.command}: {report.verdict.upper()}"]
    lines.extend(f"  {m}" for m in report.messages)
    for key, value in report.payload.items():
        lines.append(f"  {key}: {_render_value(value)}")
    lines.append(f"certificates: {len(report.certificates)}")
    for cert in report.certificates:
        lines.append(f"  - {_render_value(cert)}")
    if report.timing is not None:
        lines.append(f"time: {report.timing:.3f}s")
    return "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report, code = run(argv)
    fmt = requested_format(argv)
    stream = sys.stderr if code == EXIT_INPUT and report.command == "usage" else sys.stdout
    stream.write(render_report(report, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
