"""Command-line front end.

Exit codes: 0 success, 1 invariant violation, 2 invalid input, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds, circuit, sweep, tails
from .errors import MaverickError, NegativeEigenvalue, NotAWorld, TooLarge
from .state import ProductState, SiteDistribution, make_qubit

OK, VIOLATION, INVALID, IO_ERROR = 0, 1, 2, 3


def _parse_string(text):
    text = text.strip()
    parts = text.split(",") if "," in text else list(text)
    return tuple(int(x) for x in parts if x.strip())


def _parse_sites(text):
    return tuple(SiteDistribution.from_probabilities([float(x) for x in chunk.split(",")])
                 for chunk in text.split(";") if chunk.strip())


def _state_from_args(args, N):
    if args.sites:
        pool = _parse_sites(args.sites)
    elif args.p is not None:
        pool = (SiteDistribution.from_probabilities([1.0 - args.p, args.p]),)
    elif args.config:
        pool = sweep.site_pool(sweep.load_config(args.config))
    else:
        raise ValueError("give --p, --sites or --config to describe the state")
    return ProductState(tuple(pool[i % len(pool)] for i in range(N)))


def cmd_simulate(args, out):
    return simulate(complex(args.alpha), complex(args.beta), args.N, args.out, out)


def simulate(alpha, beta, N, dump_path, out):
    """Write the statevector dump and the counter amplitude table."""
    if N > 20:
        raise TooLarge(f"simulate supports N <= 20, got {N}")
    site = make_qubit(alpha, beta)
    circ = circuit.build_counter_circuit(N)
    sv = circuit.run_counter(circ, site)
    if dump_path:
        with open(dump_path, "w", encoding="utf-8") as fh:
            circuit.write_dump(sv, fh)
    else:
        circuit.write_dump(sv, out)
        out.write("\n")
    sim = circuit.counter_amplitudes(sv)
    out.write("n\tsimulated\tclosed_form\tabs_diff\n")
    worst = 0.0
    for n in range(N + 1):
        closed = circuit.closed_form_counter_amplitude(alpha, beta, N, n)
        if sim[n] == 0 and closed == 0:
            continue
        diff = abs(sim[n] - closed)
        worst = max(worst, diff)
        out.write(f"{n}\t{sim[n]:.17g}\t{closed:.17g}\t{diff:.3g}\n")
    return OK if worst < 1e-9 else VIOLATION


def cmd_classify(args, out):
    s = _parse_string(args.string)
    state = _state_from_args(args, len(s))
    rate, H, dev = tails.world_statistics(state, s)
    verdict = tails.classify_world(state, s, args.epsilon)
    out.write(f"rate={rate:.17g} H={H:.17g} deviation={dev:.17g} "
              f"verdict={verdict.value}\n")
    return OK


def cmd_tail(args, out):
    mode = args.mode
    bin_width = args.bin_width
    if args.config:
        cfg = sweep.load_config(args.config)
        mode = mode or cfg.mode.value
        bin_width = bin_width or cfg.bin_width
        state_cfg = cfg
    else:
        state_cfg = None
    mode = tails.Mode.parse(mode or "frequency")
    if state_cfg is None or args.p is not None or args.sites:
        if args.sites:
            probs = tuple(tuple(s.probabilities) for s in _parse_sites(args.sites))
            state_cfg = sweep.SweepConfig(mode, (args.N,), (args.epsilon,), state="sites",
                                          sites=probs)
        elif args.p is not None:
            state_cfg = sweep.SweepConfig(mode, (args.N,), (args.epsilon,), state="iid",
                                          p=args.p)
        else:
            raise ValueError("give --p, --sites or --config to describe the state")
    cfg = sweep.with_overrides(state_cfg, mode=mode, n_grid=(args.N,),
                               epsilon_grid=(args.epsilon,), bin_width=bin_width or 1e-4)
    rows = [sweep.evaluate_point(cfg, args.N, args.epsilon)]
    sweep.write_rows(rows, args.out, args.format or "csv", stream=out)
    return VIOLATION if sweep.check_rows(rows) else OK


def cmd_bounds_check(args, out):
    seed = 0 if args.seed is None else args.seed
    if args.corrupt_observable:
        psi = circuit.StateVector(np.full(2, 2**-0.5), 1)
        bounds.markov_check(psi, bounds.DiagonalObservable([1.0, -1.0]), 1.0)
    reports = [bounds.run_markov_suite(seed, args.trials, args.max_qubits),
               bounds.run_chebyshev_suite(seed, args.trials, args.max_qubits)]
    for r in reports:
        out.write(r.line() + "\n")
    return OK if all(r.ok for r in reports) else VIOLATION


def cmd_sweep(args, out):
    if not args.config:
        raise ValueError("sweep needs --config PATH")
    cfg = sweep.load_config(args.config)
    cfg = sweep.with_overrides(cfg, seed=args.seed, workers=args.workers,
                               out=args.out, format=args.format)
    rows = sweep.run_sweep(cfg)
    sweep.write_rows(rows, cfg.out, cfg.format, stream=out)
    problems = sweep.check_rows(rows)
    for p in problems:
        sys.stderr.write(f"invariant violation: {p}\n")
    return VIOLATION if problems else OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="sweep/state configuration file")
    common.add_argument("--seed", type=int, help="base random seed")
    common.add_argument("--workers", type=int, help="concurrent grid points")
    common.add_argument("--out", help="output path")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="maverick", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="run the counting circuit and compare with the closed form")
    p.add_argument("--alpha", required=True, help="amplitude of |1>, complex literal")
    p.add_argument("--beta", required=True, help="amplitude of |0>, complex literal")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    def state_flags(p):
        p.add_argument("--p", type=float, help="weight of outcome 1 for identical qubits")
        p.add_argument("--sites", help="site weight lists, e.g. '0.75,0.25;0.5,0.5'")

    p = sub.add_parser("classify", parents=[common], help="typical or maverick?")
    state_flags(p)
    p.add_argument("--string", required=True, help="basis string, e.g. 1101 or 1,1,0,1")
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("tail", parents=[common], help="maverick norm^2 and bounds at one point")
    state_flags(p)
    p.add_argument("--mode", choices=("frequency", "entropy-rate"))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--bin-width", type=float)
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("bounds-check", parents=[common],
                       help="randomized Markov and Chebyshev suites")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-qubits", type=int, default=10)
    p.add_argument("--corrupt-observable", action="store_true",
                   help="feed a negative eigenvalue to exercise input validation")
    p.set_defaults(func=cmd_bounds_check)

    p = sub.add_parser("sweep", parents=[common], help="run a configured (N, epsilon) sweep")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except NegativeEigenvalue as exc:
        sys.stderr.write(f"NegativeEigenvalue: {exc}\n")
        return INVALID
    except NotAWorld as exc:
        sys.stderr.write(f"error: not a world ({exc})\n")
        return INVALID
    except (MaverickError, ValueError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return INVALID
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
