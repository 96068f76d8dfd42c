"""Command-line front end.

Subcommands::

    qmud detect --scenario S --bits 1,-1,1 [--noise I] [--delay J] [--user K]
    qmud trials --scenario S [--trials N] [--user K]
    qmud fig2   (--scenario S | --delta D | --nqreg N) [--m M | --l L] [--cmax C]
    qmud sweep  (--scenario S | --delta D | --nqreg N) --l L [--cmax C]

``detect`` and ``trials`` size the t-register from ``--l`` or, failing that,
from ``--m`` (default: the accuracy bound for the scenario's register) and
``--epsilon``.  Exit status: 0 decided / success, 2 undecidable, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .bounds import default_fig2_delta, fig2_sweep, resolving_accuracy
from .cdma import QuantizedSignal, qregister_size, synthesize_received
from .counting import max_accuracy, t_register_size
from .detector import Detector, run_trials
from .errors import QmudError
from .scenario import load_scenario

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDABLE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _num(x: float) -> float:
    return float(f"{x:.12g}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _n_qreg(scenario, grid) -> int:
    return qregister_size(scenario.K, grid.Nn, grid.delay_slots(scenario.Ts))


def _register_size(args, scenario, grid) -> int:
    if args.l is not None:
        return args.l
    if args.m is not None:
        return t_register_size(args.m, args.epsilon)
    with warnings.catch_warnings():
        # tiny registers fall back to one accuracy bit
        warnings.simplefilter("ignore", UserWarning)
        m = max(1, max_accuracy(_n_qreg(scenario, grid)))
    return t_register_size(m, args.epsilon)


def _delta(args) -> float:
    if args.delta is not None:
        return args.delta
    if args.nqreg is not None:
        return default_fig2_delta(args.nqreg)
    if args.scenario is not None:
        scenario, grid = load_scenario(args.scenario)
        return default_fig2_delta(_n_qreg(scenario, grid))
    raise QmudError("one of --delta, --nqreg or --scenario is required")


def cmd_detect(args) -> int:
    scenario, grid = load_scenario(args.scenario)
    l = _register_size(args, scenario, grid)
    detector = Detector(scenario, grid, args.user, l, args.window_bits)
    if args.received is not None:
        received = QuantizedSignal(args.received)
    else:
        if args.bits is None:
            raise QmudError("--bits is required unless --received is given")
        received = synthesize_received(scenario, grid, args.bits, args.noise, args.delay)
    det = detector.detect(received, np.random.default_rng(args.seed))
    report = {
        "user": args.user,
        "bits": args.bits,
        "noise_index": args.noise,
        "delay_index": args.delay,
        "received": list(received.chips),
        "l": l,
        "window_bits": args.window_bits,
        "seed": args.seed,
        "hypotheses": [
            {"bit": r.bit, "M": r.M, "measured": r.measured, "decision": r.decision.value}
            for r in det.results
        ],
        "detected": "undecidable" if det.undecidable else det.detected,
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_UNDECIDABLE if det.undecidable else EXIT_OK


def cmd_trials(args) -> int:
    scenario, grid = load_scenario(args.scenario)
    l = _register_size(args, scenario, grid)
    detector = Detector(scenario, grid, args.user, l, args.window_bits)
    s = run_trials(detector, args.trials, args.seed)
    report = {
        "trials": s.trials,
        "seed": args.seed,
        "user": args.user,
        "l": l,
        "window_bits": args.window_bits,
        "checks": s.checks,
        "false_absent": s.false_absent,
        "false_absent_rate": _num(s.false_absent_rate),
        "predicted_p_error_exact": _num(s.predicted_false_absent),
        "standard_error": _num(s.standard_error),
        "within_3_sigma": s.within_prediction,
        "wrong_decisions": s.wrong_decisions,
        "wrong_decision_rate": _num(s.wrong_decisions / s.trials),
        "undecidable": s.undecidable,
        "undecidable_rate": _num(s.undecidable / s.trials),
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_fig2(args) -> int:
    delta = _delta(args)
    if args.l is not None:
        if args.cmax >= args.l - 1:
            raise QmudError(f"--cmax {args.cmax} must be below l - 1 = {args.l - 1}")
        report = fig2_sweep(delta, args.cmax, l=args.l)
    else:
        m = args.m if args.m is not None else resolving_accuracy(delta)
        report = fig2_sweep(delta, args.cmax, m=m)
    _emit(report.to_csv(), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cmax = args.cmax if args.cmax is not None else args.l - 2
    if cmax >= args.l - 1:
        raise QmudError(f"--cmax {cmax} must be below l - 1 = {args.l - 1}")
    _emit(fig2_sweep(_delta(args), cmax, l=args.l).to_csv(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmud", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)

    def sizing(p):
        p.add_argument("--scenario", required=True)
        p.add_argument("--user", type=int, default=0, help="index of the detected user")
        p.add_argument("--l", type=int, help="t-register size")
        p.add_argument("--m", type=int, help="accuracy bits when --l is not given")
        p.add_argument("--epsilon", type=float, default=0.25, help="failure budget when --l is not given")
        p.add_argument("--window-bits", type=int, default=0, help="low outcome bits that read as zero")

    def phase(p):
        p.add_argument("--scenario", help="derive the worst-case delta from this scenario")
        p.add_argument("--delta", type=float)
        p.add_argument("--nqreg", type=int, help="derive the worst-case delta from this register size")

    p = sub.add_parser("detect", help="detect one symbol")
    common(p)
    sizing(p)
    p.add_argument("--bits", type=_int_list, help="transmitted bits of all users, e.g. 1,-1,1")
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--delay", type=int, default=0)
    p.add_argument("--received", type=_int_list, help="explicit received levels instead of synthesising")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("trials", help="Monte-Carlo detection trials")
    common(p)
    sizing(p)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_trials)

    p = sub.add_parser("fig2", help="error probability against added register bits")
    common(p)
    phase(p)
    size = p.add_mutually_exclusive_group()
    size.add_argument("--m", type=int, help="base accuracy; the register grows as m + C")
    size.add_argument("--l", type=int, help="fixed register size instead of a growing one")
    p.add_argument("--cmax", type=int, default=8)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("sweep", help="error probability against window bits in a fixed register")
    common(p)
    phase(p)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--cmax", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QmudError as exc:
        print(f"qmud {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
