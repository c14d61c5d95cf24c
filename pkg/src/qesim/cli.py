"""Command-line interface.

Subcommands::

    qesim run TARGET      evaluate detector probabilities for one setting
    qesim verify [NAME]   run every scenario's expected-property checks
    qesim sweep NAME      sweep a numeric parameter, CSV to stdout
    qesim sample TARGET   sample timestamped events; optional coincidences

TARGET is either a catalog scenario name or a path to an ``.edl`` file.
Exit codes: 0 success, 1 failed checks or domain errors, 2 usage errors.
The seed defaults to the ``QESIM_SEED`` environment variable, then 0.
All file outputs are byte-deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import edl, events, scenarios
from .circuit import Circuit, joint_distribution
from .measure import ConditioningError, conditional
from .qstate import CompositionError, ValidationError
from .screen import DEFAULT_GEOMETRY, fringe_visibility, pattern_from_bin_probs

USAGE_ERROR = 2
CHECK_ERROR = 1


class CliError(Exception):
    def __init__(self, message: str, code: int = CHECK_ERROR):
        super().__init__(message)
        self.code = code


def _default_seed() -> int:
    try:
        return int(os.environ.get("QESIM_SEED", "0"))
    except ValueError:
        return 0


def _parse_kv(pairs: list[str], what: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in pairs:
        if "=" not in item:
            raise CliError(f"bad {what} {item!r} (expected name=value)", USAGE_ERROR)
        k, v = item.split("=", 1)
        out[k] = v
    return out


def _parse_delays(pairs: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for k, v in _parse_kv(pairs, "--delay").items():
        try:
            out[k] = float(v)
        except ValueError:
            raise CliError(f"bad delay value {v!r} for {k!r}", USAGE_ERROR) from None
    return out


def _load_target(target: str) -> tuple[str, Circuit, dict]:
    """Resolve a scenario name or .edl path to (name, circuit, default delays)."""
    if target in scenarios.list_names():
        sc = scenarios.build(target)
        return sc.name, sc.circuit, dict(sc.default_delays)
    if target.endswith(".edl") or os.path.sep in target:
        if not os.path.exists(target):
            raise CliError(f"no such file: {target}", USAGE_ERROR)
        try:
            return os.path.basename(target)[:-4], edl.load_circuit(target), {}
        except ValidationError as e:
            raise CliError(str(e)) from None
    raise CliError(
        f"unknown target {target!r}; scenario names: {', '.join(scenarios.list_names())}",
        USAGE_ERROR,
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _ascii_pattern(values, width: int = 60) -> str:
    peak = max(values) or 1.0
    lines = []
    for v in values:
        n = int(round(width * v / peak))
        lines.append("#" * n)
    return "\n".join(lines) + "\n"


# -- run ------------------------------------------------------------------------


def cmd_run(args) -> int:
    _, circuit, _ = _load_target(args.target)
    settings = _parse_kv(args.setting, "--setting")
    try:
        dist = joint_distribution(circuit, settings)
    except (ValidationError, CompositionError) as e:
        raise CliError(str(e)) from None
    if args.format == "json":
        doc = {
            "target": args.target,
            "settings": settings,
            "axes": list(dist.axes),
            **dist.to_json_dict(),
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    else:
        lines = [",".join(dist.axes) + ",p"]
        for k, p in dist.outcomes.items():
            lines.append(",".join(k) + f",{p:.12g}")
        _emit("\n".join(lines) + "\n", args.out)
    if args.ascii:
        screen_axes = [
            s.name for s in circuit.detectors(settings) if s.screen_of is not None
        ]
        for ax in screen_axes:
            from .measure import marginal

            m = marginal(dist, [ax])
            vals = [m.prob((DEFAULT_GEOMETRY.bin_label(i),)) for i in range(DEFAULT_GEOMETRY.bins)]
            sys.stderr.write(f"-- {ax} --\n" + _ascii_pattern(vals))
    return 0


# -- verify ---------------------------------------------------------------------


def cmd_verify(args) -> int:
    names = args.names or scenarios.list_names()
    failures = 0
    for name in names:
        try:
            sc = scenarios.build(name)
        except scenarios.CatalogError as e:
            raise CliError(str(e), USAGE_ERROR) from None
        for chk in sc.expectations:
            value, ok = chk.run()
            status = "PASS" if ok else "FAIL"
            print(f"{status} {chk.name}: measured {value:.3e} (tol {chk.tol:g})")
            failures += 0 if ok else 1
    print(f"{'OK' if failures == 0 else 'FAILED'}: {failures} failing check(s)")
    return 0 if failures == 0 else CHECK_ERROR


# -- sweep ----------------------------------------------------------------------


def cmd_sweep(args) -> int:
    if args.target not in scenarios.list_names():
        raise CliError(f"sweep needs a catalog scenario, not {args.target!r}", USAGE_ERROR)
    if args.steps < 1:
        raise CliError("--steps must be >= 1", USAGE_ERROR)
    settings = _parse_kv(args.setting, "--setting")
    rows = []
    axes = None
    keys: list[tuple[str, ...]] = []
    for i in range(args.steps):
        value = args.start + (args.stop - args.start) * i / max(args.steps - 1, 1)
        sc = scenarios.build(args.target, **{args.param: value})
        dist = joint_distribution(sc.circuit, settings)
        if axes is None:
            axes = dist.axes
            keys = sorted(dist.outcomes.keys())
        rows.append((value, [dist.prob(k) for k in keys]))
    header = [args.param] + ["P(" + "|".join(k) + ")" for k in keys]
    lines = [",".join(header)]
    for value, ps in rows:
        lines.append(",".join([f"{value:.12g}"] + [f"{p:.12g}" for p in ps]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- sample ---------------------------------------------------------------------


def cmd_sample(args) -> int:
    name, circuit, default_delays = _load_target(args.target)
    settings = _parse_kv(args.setting, "--setting")
    delays = {**default_delays, **_parse_delays(args.delay)}
    try:
        log = events.generate_events(
            circuit, settings, shots=args.shots, seed=args.seed, delays=delays
        )
    except (ValidationError, CompositionError) as e:
        raise CliError(str(e)) from None

    if args.pairs is None:
        text = log.to_csv() if args.format == "csv" else log.to_jsonl()
        _emit(text, args.out)
        return 0

    if "," not in args.pairs:
        raise CliError("--pairs needs two detector names: A,B", USAGE_ERROR)
    det_a, det_b = (s.strip() for s in args.pairs.split(",", 1))
    offsets = _parse_delays(args.offset)
    pairs = events.coincidences(log, det_a, det_b, window=args.window, offsets=offsets)
    if args.given is not None:
        try:
            pat = events.conditioned_histogram(pairs, tuple(args.given.split("|")))
        except ValidationError as e:
            raise CliError(str(e)) from None
        _emit(pat.to_csv(), args.out)
        sys.stderr.write(
            f"{len(pairs)} pairs, fitted visibility {fringe_visibility(pat):.4f}\n"
        )
    else:
        lines = ["shot_a,t_a,outcome_a,shot_b,t_b,outcome_b"]
        for p in pairs:
            lines.append(
                f"{p.a.shot},{p.a.time:.12g},{'|'.join(p.a.outcome)},"
                f"{p.b.shot},{p.b.time:.12g},{'|'.join(p.b.outcome)}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qesim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False, shots=False):
        sp.add_argument("--setting", action="append", default=[], metavar="NAME=ALT")
        sp.add_argument("--out", default=None, metavar="PATH")
        if seed:
            sp.add_argument("--seed", type=int, default=_default_seed())
        if shots:
            sp.add_argument("-n", "--shots", type=int, default=10000)

    sp = sub.add_parser("run", help="detector probabilities for one setting")
    sp.add_argument("target")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--ascii", action="store_true", help="render screen patterns to stderr")
    common(sp)
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("verify", help="run scenario expectation checks")
    sp.add_argument("names", nargs="*")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("sweep", help="sweep a scenario parameter, CSV output")
    sp.add_argument("target")
    sp.add_argument("--param", default="phi")
    sp.add_argument("--start", type=float, default=0.0)
    sp.add_argument("--stop", type=float, default=6.283185307179586)
    sp.add_argument("--steps", type=int, default=64)
    common(sp)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("sample", help="sample events; optional coincidence pairs")
    sp.add_argument("target")
    sp.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    sp.add_argument("--delay", action="append", default=[], metavar="DET=NS")
    sp.add_argument("--window", type=float, default=events.DEFAULT_WINDOW_NS)
    sp.add_argument("--pairs", default=None, metavar="DET_A,DET_B")
    sp.add_argument("--offset", action="append", default=[], metavar="DET=NS")
    sp.add_argument("--given", default=None, metavar="OUTCOME",
                    help="with --pairs: histogram A outcomes where B matches")
    common(sp, seed=True, shots=True)
    sp.set_defaults(fn=cmd_sample)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"qesim: {e}", file=sys.stderr)
        return e.code
    except ConditioningError as e:
        print(f"qesim: {e}", file=sys.stderr)
        return CHECK_ERROR


if __name__ == "__main__":
    sys.exit(main())
