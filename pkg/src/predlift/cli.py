"""Command-line harness: generate synthetic instances, run them in any
mode, verify against the brute-force oracle, and emit work-vs-error CSVs.

Exit codes: 0 ok, 1 verification mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import fileio
from .boosting import Backstop, BoostConfig, RecomputeBackstop, SteppableEngine, boost_run
from .decremental import DecrementalRun
from .engine import Engine, ScheduleBug, drain, run_offline, run_predicted
from .incremental import lift_incremental
from .model import DELETE, INSERT, Event
from .problems import (
    connectivity_contract,
    counter_contract,
    decremental_max_contract,
    msf_problem,
    oracle_daily_outputs,
)
from .streamgen import (
    ErrorModel,
    generate_deletion_predicted_stream,
    generate_insertion_predicted_instance,
    generate_offline_instance,
    make_bundles,
)

OFFLINE_PROBLEMS = ("counter", "connectivity", "msf")
PROBLEMS = OFFLINE_PROBLEMS + ("decmax",)
MODES = ("predicted", "offline", "brute-force", "backstopped", "boosted")


def _problem_impl(name: str):
    if name == "counter":
        return lift_incremental(counter_contract())
    if name == "connectivity":
        return lift_incremental(connectivity_contract())
    if name == "msf":
        return msf_problem()
    raise ValueError(f"no engine problem for {name!r}")


def format_output(problem: str, out) -> str:
    if problem == "counter":
        return str(out)
    if problem == "connectivity":
        return "|".join("-".join(str(v) for v in comp) for comp in out) or "-"
    if problem == "msf":
        weight, ids = out
        return f"{weight} {','.join(ids) if ids else '-'}"
    if problem == "decmax":
        return "-" if out is None else str(out)
    raise ValueError(problem)


def _decmax_oracle(events):
    """Daily outputs for a predicted-insertion instance, from scratch."""
    stream = [(day, ev) for day, ev, _ in events]
    return oracle_daily_outputs("decmax", stream)


def cmd_generate(args) -> int:
    model = ErrorModel(args.model, sigma=args.sigma, rho=args.rho)
    if args.problem == "decmax":
        predicted_set, events, err = generate_insertion_predicted_instance(
            args.n, args.T, model, args.seed
        )
        fileio.write_insertion_predicted_instance(f"{args.out}.inst", predicted_set, events)
        print(f"# l1_error {err}")
        return 0
    if args.deletion_predicted:
        items, registry, err = generate_deletion_predicted_stream(
            args.problem, args.n, args.T, model, args.seed
        )
        fileio.write_deletion_predicted_stream(f"{args.out}.dstream", items)
        print(f"# l1_error {err}")
        return 0
    inst = generate_offline_instance(args.problem, args.n, args.T, model, args.seed)
    fileio.write_predictions(
        f"{args.out}.pred", inst.predictions, meta={k: v for k, v in inst.meta.items()}
    )
    fileio.write_stream(f"{args.out}.stream", inst.stream)
    fileio.write_bundles(f"{args.out}.bundles", make_bundles(inst.predictions, inst.T))
    print(f"# l1_error {inst.l1}")
    return 0


def _load_offline(args):
    predictions = fileio.read_predictions(args.pred) if args.pred else []
    stream = fileio.read_stream(args.stream)
    registry = {ev.element: ev.payload for _, ev in stream if ev.payload}
    T = len(stream)
    return predictions, stream, registry, T


def _run_offline_problem(args):
    problem = _problem_impl(args.problem)
    predictions, stream, registry, T = _load_offline(args)
    if args.mode == "brute-force":
        return [  # no engine at all
            (day, out) for (day, _), out in zip(stream, oracle_daily_outputs(args.problem, stream))
        ], None
    if args.mode == "offline":
        eng = run_offline(problem, T, stream, args.seed)
    elif args.mode == "predicted":
        eng = run_predicted(problem, T, predictions, stream, args.seed, payload_registry=registry)
    elif args.mode == "backstopped":
        eng = Engine(problem, T, args.seed, payload_registry=registry)

        def oracle_step(history):
            return oracle_daily_outputs(args.problem, history)[-1], len(history)

        meta = Backstop([SteppableEngine(eng, predictions), RecomputeBackstop(oracle_step)])
        for day, ev in stream:
            meta.feed(day, ev)
        return list(zip((d for d, _ in stream), meta.outputs)), eng.counters
    elif args.mode == "boosted":
        if not args.bundles:
            raise FileUsage("boosted mode needs --bundles")
        bundles = {b.index: list(b.predictions) for b in fileio.read_bundles(args.bundles)}
        ground = {p.event.element for bs in bundles.values() for p in bs if not p.is_sentinel}

        def factory(T_hat, preds, seed):
            return SteppableEngine(
                Engine(_problem_impl(args.problem), T_hat, seed, payload_registry=registry), preds
            )

        outs, epochs = boost_run(
            factory,
            bundles,
            stream,
            max(2, len(ground)),
            BoostConfig(k=args.k, instances_cap=args.instances_cap, seed=args.seed),
            log=lambda line: print(line),
        )
        return list(zip((d for d, _ in stream), outs)), None
    else:
        raise FileUsage(f"unknown mode {args.mode}")
    return list(zip((d for d, _ in stream), eng.outputs)), eng.counters


def _run_decmax(args):
    predicted_set, events, _ = (
        fileio.read_insertion_predicted_instance(args.instance)[0],
        fileio.read_insertion_predicted_instance(args.instance)[1],
        None,
    )
    if args.mode == "brute-force":
        return [(day, out) for (day, _, _), out in zip(events, _decmax_oracle(events))], None
    T = len(events)
    run = DecrementalRun(decremental_max_contract(), predicted_set, T, args.seed)
    for day, ev, reins in events:
        run.process_day(day, ev, reins)
    return [(day, out) for (day, _, _), out in zip(events, run.outputs)], run.counters


class FileUsage(ValueError):
    pass


def _dispatch_run(args):
    if args.problem == "decmax":
        if not args.instance:
            raise FileUsage("decmax needs --instance")
        return _run_decmax(args)
    if args.dstream:
        items = fileio.read_deletion_predicted_stream(args.dstream)
        if args.mode == "brute-force":
            stream = [(d, ev) for d, ev, _ in items]
            return list(zip((d for d, _ in stream), oracle_daily_outputs(args.problem, stream))), None
        eng = Engine(_problem_impl(args.problem), len(items), args.seed, jit=True)
        for day, ev, pred in items:
            drain(eng.process_day(day, ev, predicted_deletion_day=pred))
        return list(zip((d for d, _, _ in items), eng.outputs)), eng.counters
    if not args.stream:
        raise FileUsage("need --stream (or --instance / --dstream)")
    return _run_offline_problem(args)


def cmd_run(args) -> int:
    rows, counters = _dispatch_run(args)
    for day, out in rows:
        print(f"{day} {format_output(args.problem, out)}")
    if counters is not None:
        print("#counters")
        print(counters.format_block())
    return 0


def cmd_verify(args) -> int:
    args.mode = "predicted"
    rows, _ = _dispatch_run(args)
    if args.problem == "decmax":
        events = fileio.read_insertion_predicted_instance(args.instance)[1]
        expected = _decmax_oracle(events)
    elif args.dstream:
        items = fileio.read_deletion_predicted_stream(args.dstream)
        expected = oracle_daily_outputs(args.problem, [(d, ev) for d, ev, _ in items])
    else:
        stream = fileio.read_stream(args.stream)
        expected = oracle_daily_outputs(args.problem, stream)
    mismatches = 0
    for (day, got), want in zip(rows, expected):
        if got != want:
            mismatches += 1
            print(
                f"day {day}: predicted={format_output(args.problem, got)} "
                f"oracle={format_output(args.problem, want)}"
            )
    if mismatches:
        print(f"FAIL {mismatches}/{len(rows)} days differ")
        return 1
    print(f"PASS all {len(rows)} days match the oracle")
    return 0


def cmd_bench(args) -> int:
    multipliers = [int(x) for x in args.errors.split(",")]
    rows = []
    for mult in multipliers:
        for s in range(args.seeds):
            model = ErrorModel("inject", sigma=mult * args.T)
            inst = generate_offline_instance(args.problem, args.n, args.T, model, args.seed + s)
            eng = run_predicted(
                _problem_impl(args.problem),
                inst.T,
                inst.predictions,
                inst.stream,
                args.seed + s,
                payload_registry=inst.payload_registry,
            )
            c = eng.counters
            rows.append(
                dict(
                    model=f"inject{mult}T",
                    T=inst.T,
                    l1_error=inst.l1,
                    preprocess_units=c.preprocess_units,
                    retrigger_units=c.retrigger_units,
                    total_units=c.total_units(),
                    reschedules=c.reschedules,
                    depth=c.depth,
                )
            )
    with open(args.out, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="predlift")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="emit a synthetic instance")
    g.add_argument("--problem", choices=PROBLEMS, required=True)
    g.add_argument("--model", default="exact")
    g.add_argument("--sigma", type=int, default=0)
    g.add_argument("--rho", type=float, default=0.0)
    g.add_argument("--T", type=int, required=True)
    g.add_argument("--n", type=int, default=16)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--deletion-predicted", action="store_true")
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    def run_flags(p):
        p.add_argument("--problem", choices=PROBLEMS, required=True)
        p.add_argument("--pred")
        p.add_argument("--stream")
        p.add_argument("--bundles")
        p.add_argument("--instance")
        p.add_argument("--dstream")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--instances-cap", type=int, default=4)

    r = sub.add_parser("run", help="run an instance in a given mode")
    run_flags(r)
    r.add_argument("--mode", choices=MODES, default="predicted")
    r.set_defaults(fn=cmd_run)

    v = sub.add_parser("verify", help="diff predicted mode against brute force")
    run_flags(v)
    v.set_defaults(fn=cmd_verify)

    b = sub.add_parser("bench", help="work-vs-error sweep to CSV")
    b.add_argument("--problem", choices=OFFLINE_PROBLEMS, default="counter")
    b.add_argument("--T", type=int, default=1024)
    b.add_argument("--n", type=int, default=16)
    b.add_argument("--seeds", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--errors", default="1,2,4,8")
    b.add_argument("--out", required=True)
    b.set_defaults(fn=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (fileio.FormatError, FileUsage, ScheduleBug, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
