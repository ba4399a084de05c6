"""Command-line front end.

Subcommands: validate, schedule, baseline, evaluate, compare, spacetime.
Outputs are machine-first (JSON/CSV, no timestamps, stable key order) so
fixed seeds reproduce byte-identical files regardless of --threads; human
summaries go to stdout and progress to stderr.

Exit codes: 0 success, 2 I/O or parse error, 3 code-invariant violation,
4 configuration/compatibility error, 5 internal contract breach.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import codes as codes_mod
from . import mcts, sim
from .codes import CodeFileError, CodeValidationError, load_code
from .decode import DecodingError, build_decoding_model, make_decoder, DECODER_REGISTRY
from .schedule import (Schedule, SchedulingError, greedy_lowest_depth,
                       lexical_schedule, optimal_lowest_depth,
                       partition_stabilizers, validate_schedule)
from .sim import DecoderContractError, NoiseModel

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_CONFIG = 4
EXIT_CONTRACT = 5


def _default_threads() -> int:
    env = os.environ.get("ASYN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _noise_from_args(args) -> NoiseModel:
    if getattr(args, "zero_noise", False):
        return NoiseModel.zero()
    if args.noise:
        return NoiseModel.load(args.noise)
    return NoiseModel(p_2q=args.p2q, p_idle=args.pidle, p_meas=args.pmeas,
                      ancilla_only=args.ancilla_only)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _result_payload(result: sim.EvalResult, *, depth, decoder, seed, shots) -> dict:
    payload = result.to_json_obj()
    payload.update({"depth": depth, "decoder": decoder, "seed": seed, "shots": shots})
    return payload


_CSV_FIELDS = ["schedule", "depth", "decoder", "seed", "shots",
               "p_x", "p_z", "overall", "score", "stderr_x", "stderr_z"]


def _write_results(prefix: str, rows: list[dict]) -> None:
    with open(prefix + ".json", "w") as fh:
        json.dump(rows if len(rows) > 1 else rows[0], fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(prefix + ".csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def cmd_validate(args) -> int:
    code = load_code(args.code)
    print(f"{args.code}: valid {code.family} [[{code.n},{code.k},{code.d}]], "
          f"{code.r} stabilizers")
    return EXIT_OK


def cmd_schedule(args) -> int:
    code = load_code(args.code)
    noise = _noise_from_args(args)
    decoder = make_decoder(args.decoder, build_decoding_model(code, noise))
    config = mcts.SearchConfig(
        iters_per_step=args.iters, eval_shots=args.shots,
        master_seed=args.seed, threads=args.threads,
    )
    partition = partition_stabilizers(code, args.seed)
    _progress(f"searching {len(partition.groups)} partitions "
              f"(iters={args.iters}, eval shots={args.shots}, seed={args.seed})")
    log_fh = open(args.log, "w") if args.log else None
    try:
        hook = None
        if log_fh is not None:
            def hook(entry, fh=log_fh):
                fh.write(json.dumps(entry.to_json_obj(), sort_keys=True) + "\n")
        t0 = time.monotonic()
        result = mcts.continuous_search(code, partition, config, noise, decoder,
                                        log_hook=hook)
        wall = time.monotonic() - t0
    finally:
        if log_fh is not None:
            log_fh.close()
    schedule = result.schedule
    report = validate_schedule(code, schedule)
    if report.conflicts:
        raise DecoderContractError(f"search produced a conflicting schedule:\n{report.describe()}")
    schedule.save(args.out)
    fresh_seed = _fresh_seed(args.seed)
    eval_shots = max(args.shots, 4 * args.shots)
    fresh = sim.estimate_logical_error(code, schedule, noise, decoder,
                                       shots=eval_shots, seed=fresh_seed,
                                       threads=args.threads)
    rows = [_result_payload(fresh, depth=schedule.depth, decoder=args.decoder,
                            seed=args.seed, shots=eval_shots) | {"schedule": args.out}]
    _write_results(args.out + ".results", rows)
    print(f"schedule written to {args.out}")
    print(f"depth={schedule.depth} p_x={fresh.p_x:.6g} p_z={fresh.p_z:.6g} "
          f"overall={fresh.overall:.6g} (fresh-seed re-evaluation, {eval_shots} shots)")
    print(f"evaluations={result.evaluations} wall={wall:.1f}s")
    return EXIT_OK


def _fresh_seed(seed: int) -> int:
    return int(np.random.SeedSequence(entropy=seed & (2**63 - 1),
                                      spawn_key=(104729,)).generate_state(1)[0])


def cmd_baseline(args) -> int:
    code = load_code(args.code)
    method = args.method
    if method == "lexical":
        schedule = lexical_schedule(code)
        note = ""
    elif method == "greedy":
        schedule = greedy_lowest_depth(code)
        note = ""
    elif method == "optimal":
        schedule, proven = optimal_lowest_depth(code, args.budget)
        note = " (proven optimal)" if proven else " (budget hit; best incumbent)"
    elif method in ("zigzag", "clockwise", "anticlockwise"):
        schedule = codes_mod.gen_reference_schedule(code, method)
        note = ""
    else:
        raise SchedulingError(f"unknown method {method!r}")
    report = validate_schedule(code, schedule)
    if report.conflicts:
        raise SchedulingError(f"baseline has conflicts:\n{report.describe()}")
    if report.anticommutation_violations:
        _progress(f"note: {method} carries {len(report.anticommutation_violations)} "
                  "cross-stabilizer ordering violations (simulable; outcomes unused)")
    schedule.save(args.out)
    print(f"{method} schedule written to {args.out}: depth={schedule.depth}{note}")
    if args.eval:
        noise = _noise_from_args(args)
        decoder = make_decoder(args.decoder, build_decoding_model(code, noise))
        result = sim.estimate_logical_error(code, schedule, noise, decoder,
                                            shots=args.shots, seed=args.seed,
                                            threads=args.threads)
        rows = [_result_payload(result, depth=schedule.depth, decoder=args.decoder,
                                seed=args.seed, shots=args.shots) | {"schedule": args.out}]
        _write_results(args.out + ".results", rows)
        print(f"p_x={result.p_x:.6g} p_z={result.p_z:.6g} overall={result.overall:.6g}")
    return EXIT_OK


def _load_schedule_for(code, path) -> Schedule:
    schedule = Schedule.load(path)
    report = validate_schedule(code, schedule)  # raises SchedulingError if incomplete
    if report.conflicts:
        raise SchedulingError(f"{path} conflicts with itself:\n{report.describe()}")
    return schedule


def cmd_evaluate(args) -> int:
    code = load_code(args.code)
    schedule = _load_schedule_for(code, args.schedule)
    noise = _noise_from_args(args)
    decoder = make_decoder(args.decoder, build_decoding_model(code, noise))
    result = sim.estimate_logical_error(code, schedule, noise, decoder,
                                        shots=args.shots, seed=args.seed,
                                        threads=args.threads)
    rows = [_result_payload(result, depth=schedule.depth, decoder=args.decoder,
                            seed=args.seed, shots=args.shots) | {"schedule": args.schedule}]
    _write_results(args.out, rows)
    print(f"depth={schedule.depth} p_x={result.p_x:.6g} p_z={result.p_z:.6g} "
          f"overall={result.overall:.6g} score={result.score:.6g}")
    return EXIT_OK


def cmd_compare(args) -> int:
    code = load_code(args.code)
    noise = _noise_from_args(args)
    decoder = make_decoder(args.decoder, build_decoding_model(code, noise))
    rows = []
    for path in args.schedules:
        schedule = _load_schedule_for(code, path)
        result = sim.estimate_logical_error(code, schedule, noise, decoder,
                                            shots=args.shots, seed=args.seed,
                                            threads=args.threads)
        rows.append(_result_payload(result, depth=schedule.depth, decoder=args.decoder,
                                    seed=args.seed, shots=args.shots) | {"schedule": path})
    base = rows[0]["overall"]
    for row in rows:
        row["reduction_vs_first"] = (base - row["overall"]) / base if base > 0 else 0.0
    _write_results(args.out, rows)
    print(f"shared seed={args.seed}, shots={args.shots}, decoder={args.decoder}")
    header = f"{'schedule':<40} {'depth':>5} {'p_x':>10} {'p_z':>10} {'overall':>10} {'reduction':>10}"
    print(header)
    print("-" * len(header))
    for row in rows:
        print(f"{row['schedule']:<40} {row['depth']:>5} {row['p_x']:>10.3e} "
              f"{row['p_z']:>10.3e} {row['overall']:>10.3e} "
              f"{row['reduction_vs_first']:>9.1%}")
    return EXIT_OK


def cmd_spacetime(args) -> int:
    code = load_code(args.code)
    schedule = _load_schedule_for(code, args.schedule)
    report = sim.spacetime_report(code, schedule, t_2q=args.t2q, t_meas=args.tmeas)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=1, sort_keys=True)
            fh.write("\n")
    print(f"depth={report['depth']} t_round={report['t_round_ns']:.0f}ns "
          f"time={report['time']:.6g} physical_qubits={report['physical_qubits']} "
          f"volume={report['volume']:.6g}")
    return EXIT_OK


def _add_noise_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--noise", help="noise model JSON file (overrides inline rates)")
    p.add_argument("--p2q", type=float, default=0.0074,
                   help="two-qubit depolarizing rate per check (default 0.0074)")
    p.add_argument("--pidle", type=float, default=0.0052,
                   help="idle depolarizing rate per tick (default 0.0052)")
    p.add_argument("--pmeas", type=float, default=0.0,
                   help="ancilla readout flip rate (recorded, default 0)")
    p.add_argument("--ancilla-only", action="store_true",
                   help="inject gate and idle noise on ancilla qubits only")
    p.add_argument("--zero-noise", action="store_true", help="disable all noise")


def _add_eval_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--decoder", default="ml", choices=sorted(DECODER_REGISTRY),
                   help="decoder name (default ml)")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synsched",
        description="Synthesize and evaluate syndrome-measurement schedules "
                    "for stabilizer codes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a code file")
    p.add_argument("--code", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("schedule", help="search a schedule with MCTS")
    p.add_argument("--code", required=True)
    p.add_argument("--out", required=True, help="output schedule JSON path")
    p.add_argument("--iters", type=int, default=4000, help="MCTS iterations per step")
    p.add_argument("--log", help="optional JSONL per-step search log")
    _add_eval_args(p)
    p.set_defaults(shots=10_000)
    _add_noise_args(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("baseline", help="generate a baseline schedule")
    p.add_argument("--code", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", required=True,
                   choices=["lexical", "greedy", "optimal", "zigzag",
                            "clockwise", "anticlockwise"])
    p.add_argument("--budget", type=float, default=60.0,
                   help="time budget in seconds for --method optimal")
    p.add_argument("--eval", action="store_true", help="also estimate error rates")
    _add_eval_args(p)
    _add_noise_args(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="estimate logical error rates of a schedule")
    p.add_argument("--code", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", required=True, help="results prefix (.json/.csv added)")
    _add_eval_args(p)
    _add_noise_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="evaluate several schedules under one seed")
    p.add_argument("--code", required=True)
    p.add_argument("--out", required=True, help="results prefix (.json/.csv added)")
    p.add_argument("schedules", nargs="+", help="two or more schedule files")
    _add_eval_args(p)
    _add_noise_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("spacetime", help="round duration and space-time volume")
    p.add_argument("--code", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--t2q", type=float, default=600.0, help="two-qubit gate time (ns)")
    p.add_argument("--tmeas", type=float, default=4000.0, help="measurement time (ns)")
    p.add_argument("--out", help="optional JSON output path")
    p.set_defaults(func=cmd_spacetime)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is None:
        args.threads = _default_threads()
    if getattr(args, "command", None) == "compare" and len(args.schedules) < 2:
        print("error: compare needs at least two schedules", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (CodeFileError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CodeValidationError as exc:
        print(f"error: invalid code: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (SchedulingError, DecodingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DecoderContractError as exc:
        print(f"internal contract breach: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
