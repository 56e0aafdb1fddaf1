"""Command-line entry point.

Exit codes: 0 success, 2 invalid scenario or input, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .metrics import trace_to_jsonl
from .scenario import ScenarioError, builtin_names, load_scenario
from .sim import run_scenario
from .wire import WireError, decode_frame
from .wire.dump import parse_hex, render

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2

log = logging.getLogger("ccndtn")


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    records, metrics = run_scenario(scenario, args.seed)
    if args.trace:
        _write(args.trace, trace_to_jsonl(records))
    if args.metrics:
        _write(args.metrics, metrics.to_json())
    else:
        print(metrics.to_json(), end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    s = load_scenario(args.file)
    print(f"ok: {s.name} ({len(s.nodes)} nodes, {len(s.links)} links, {len(s.workload)} workload actions)")
    return EXIT_OK


def cmd_list(args) -> int:
    for name in builtin_names():
        s = load_scenario(name)
        summary = s.description.split(". ")[0].rstrip(".")
        print(f"{name:14s} {summary}")
    return EXIT_OK


def cmd_dump(args) -> int:
    text = sys.stdin.read() if args.hexfile == "-" else Path(args.hexfile).read_text("utf-8")
    print(render(decode_frame(parse_hex(text))))
    return EXIT_OK


def _sweep_one(job):
    scenario_ref, seed = job
    _, metrics = run_scenario(load_scenario(scenario_ref), seed)
    return seed, json.loads(metrics.to_json())


def _seed_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("-")
    try:
        first = int(lo)
        last = int(hi) if sep else first
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or N-M, got {text!r}") from None
    if last < first:
        raise argparse.ArgumentTypeError("empty seed range")
    return list(range(first, last + 1))


def cmd_sweep(args) -> int:
    load_scenario(args.scenario)  # fail fast before spawning workers
    jobs = [(args.scenario, s) for s in args.seeds]
    if args.jobs == 1:
        results = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    out = {"scenario": args.scenario, "runs": [{"seed": s, "metrics": m} for s, m in results]}
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccndtn", description="CCN over DTN simulator")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and report metrics")
    run.add_argument("--scenario", required=True, help="scenario file or builtin name")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--trace", help="write the JSONL trace here ('-' for stdout)")
    run.add_argument("--metrics", help="write metrics JSON here (default: stdout)")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check a scenario file")
    val.add_argument("file")
    val.set_defaults(func=cmd_validate)

    ls = sub.add_parser("list-scenarios", help="list builtin scenarios")
    ls.set_defaults(func=cmd_list)

    wire = sub.add_parser("wire", help="wire format tools")
    wsub = wire.add_subparsers(dest="wire_command", required=True)
    dump = wsub.add_parser("dump", help="pretty-print a hex-encoded packet or bundle")
    dump.add_argument("hexfile", help="file with hex text ('-' for stdin)")
    dump.set_defaults(func=cmd_dump)

    sw = sub.add_parser("sweep", help="run one scenario over many seeds in parallel")
    sw.add_argument("--scenario", required=True)
    sw.add_argument("--seeds", type=_seed_range, default=[0], help="N or N-M (inclusive)")
    sw.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    sw.add_argument("--out", help="write merged results here (default: stdout)")
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which already matches our convention
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, WireError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
