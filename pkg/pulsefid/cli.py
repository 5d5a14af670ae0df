"""
pulsefid command line.

Every data subcommand writes CSV (floats with 17 significant digits) to
--out, stdout by default. --manifest writes a JSON record of the run that
`pulsefid replay` turns back into byte-identical output.

Exit codes: 0 success, 2 argument error, 3 numerical convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from pulsefid import __version__, analytics
from pulsefid.api.bangbang import DEFAULT_OMEGA_DT, BangBangConfig
from pulsefid.api.montecarlo import DEFAULT_BINS, InitialState, SequenceConfig
from pulsefid.exceptions import ConvergenceError, DomainError, PulseFidException
from pulsefid.noise import DEFAULT_SEED, NoiseModel
from pulsefid.std import Simulator

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ARGUMENTS = 2
EXIT_CONVERGENCE = 3

# argparse destinations that describe where output goes, not what is computed
_NOT_REPLAYED = ("command", "out", "manifest", "verbose")


def _fmt(value):
    return f"{value:.17g}"


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _model(args):
    return NoiseModel(args.model, args.delta)


def _initial(args):
    if args.initial == "fixed":
        return InitialState.fixed(args.theta, args.phi)
    if args.initial == "worst-case":
        return InitialState.worst_case()
    return InitialState.uniform()


def _expected_mean(config):
    kind = config.initial_state.kind.value
    if kind == "uniform":
        return analytics.mean_fidelity(config.n_cycles, config.model)
    if kind == "worst_case":
        return analytics.worst_case_mean_fidelity(config.n_cycles, config.model)
    return None


#
# Subcommands. Each returns (output text, summary dict).


def cmd_mean_fidelity(args, simulator):  # pylint: disable=unused-argument
    model = _model(args)
    payload = {
        "n_cycles": args.n,
        "delta": args.delta,
        "model": model.kind.value,
        "n_delta_sq": analytics.effective_n_delta_sq(args.n, model),
        "mean_fidelity": analytics.mean_fidelity(args.n, model),
        "worst_case_mean_fidelity": analytics.worst_case_mean_fidelity(args.n, model),
    }
    return _json(payload), payload


def cmd_pdf(args, simulator):
    spec = analytics.QuadratureSpec(args.nodes, args.term_cap, args.term_tol)
    grid = analytics.pdf_grid(args.n_delta_sq, args.grid_size, args.edge, spec)
    text = _csv(["fidelity", "density"], zip(grid.fidelity_points.tolist(), grid.densities.tolist()))

    summary = {"n_delta_sq": args.n_delta_sq, "expected_mean": 2.0 / 3.0 + math.exp(-args.n_delta_sq) / 3.0}
    if args.check_normalization:
        summary["normalization"] = grid.normalization()
        summary["mean"] = grid.mean()
    if args.mc_check:
        if args.mc_cycles < 1:
            raise DomainError(f"mc_cycles must be >= 1, got {args.mc_cycles}")
        delta = math.sqrt(args.n_delta_sq / args.mc_cycles)
        config = SequenceConfig(args.mc_cycles, NoiseModel.amplitude(delta), InitialState.uniform(), args.seed)
        hist = simulator.montecarlo.ensemble_histogram(config, args.mc_check, args.bins)
        p = analytics.bin_probabilities(hist.bin_edges, args.n_delta_sq, spec)
        expected = p * hist.n_samples
        spread = np.sqrt(np.maximum(expected * (1.0 - p), 1.0))
        summary["mc_samples"] = hist.n_samples
        summary["mc_max_abs_z"] = float(np.max(np.abs(hist.counts - expected) / spread))
    log.info("pdf summary: %s", summary)
    return text, summary


def cmd_ensemble(args, simulator):
    config = SequenceConfig(args.n, _model(args), _initial(args), args.seed)
    (mean, std_error), hist = simulator.montecarlo.ensemble_summary(config, args.samples, args.bins)
    rows = zip(hist.bin_edges[:-1].tolist(), hist.bin_edges[1:].tolist(), hist.counts.tolist())
    summary = {"mean": mean, "std_error": std_error, "n_samples": args.samples, "expected_mean": _expected_mean(config)}
    log.info("ensemble summary: %s", summary)
    return _csv(["bin_lower", "bin_upper", "count"], rows), summary


def cmd_trajectory(args, simulator):
    config = SequenceConfig(args.n, _model(args), _initial(args), args.seed)
    traces = simulator.montecarlo.trajectories(config, args.trajectories)
    header = ["cycle"] + [f"fidelity_{k}" for k in range(len(traces))]
    rows = ([cycle + 1] + [float(t.per_cycle_fidelity[cycle]) for t in traces] for cycle in range(args.n))
    summary = {
        "final_fidelities": [t.final_fidelity for t in traces],
        "initial_angles": [[t.initial_theta, t.initial_phi] for t in traces],
        "expected_mean": _expected_mean(config),
    }
    return _csv(header, rows), summary


def cmd_bangbang(args, simulator):
    dt = args.dt
    if dt is None:
        dt = DEFAULT_OMEGA_DT / abs(args.omega) if args.omega else DEFAULT_OMEGA_DT
    initial = InitialState.fixed(args.theta, args.phi)
    config = BangBangConfig(args.n, _model(args), args.omega, dt, initial, args.seed)

    free = simulator.bangbang.free_fidelity_trace(args.omega, 2.0 * dt, args.n, initial)
    controlled = simulator.bangbang.trajectories(config, args.trajectories)
    header = ["t", "omega_t", "free_fidelity"] + [f"controlled_fidelity_{k}" for k in range(len(controlled))]
    rows = (
        [float(free.times[c]), float(args.omega * free.times[c]), float(free.per_cycle_fidelity[c])]
        + [float(t.per_cycle_fidelity[c]) for t in controlled]
        for c in range(args.n)
    )
    summary = {
        "omega_dt": args.omega * dt,
        "free_time_average": float(np.mean(free.per_cycle_fidelity)),
        "worst_case_mean_fidelity": analytics.worst_case_mean_fidelity(args.n, config.model),
    }
    if args.ensemble:
        mean, std_error = simulator.bangbang.ensemble_mean(config, args.ensemble)
        summary.update({"mean": mean, "std_error": std_error, "n_samples": args.ensemble})
    log.info("bangbang summary: %s", summary)
    return _csv(header, rows), summary


def cmd_bounds(args, simulator):  # pylint: disable=unused-argument
    payload = {
        "delta": args.delta,
        "tau_c": args.tau_c,
        "n_max": analytics.max_cycles(args.delta),
        "t_max": analytics.max_protection_time(args.tau_c, args.delta),
    }
    return _json(payload), payload


HANDLERS = {
    "mean-fidelity": cmd_mean_fidelity,
    "pdf": cmd_pdf,
    "ensemble": cmd_ensemble,
    "trajectory": cmd_trajectory,
    "bangbang": cmd_bangbang,
    "bounds": cmd_bounds,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsefid",
        description="Fidelity of two-level systems driven by imperfect pi pulses.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    subparsers = parser.add_subparsers(dest="command", required=True)

    # --samples belongs to ensemble alone; pdf and bangbang size their checks
    # with --mc-check and --ensemble, trajectory with --trajectories
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default="-", metavar="PATH")
    common.add_argument("--manifest", default=None, metavar="JSON")

    noise = argparse.ArgumentParser(add_help=False)
    noise.add_argument("--n", type=int, required=True, help="number of cycles (two pulses each)")
    noise.add_argument("--delta", type=float, required=True, help="per-pulse error std, radians")
    noise.add_argument("--model", choices=["amplitude", "phase"], default="amplitude")

    initial = argparse.ArgumentParser(add_help=False)
    initial.add_argument("--initial", choices=["uniform", "worst-case", "fixed"], default="uniform")
    initial.add_argument("--theta", type=float, default=0.0)
    initial.add_argument("--phi", type=float, default=0.0)

    subparsers.add_parser("mean-fidelity", parents=[common, noise], help="closed-form mean fidelities")

    pdf = subparsers.add_parser("pdf", parents=[common], help="fidelity probability density")
    pdf.add_argument("--n-delta-sq", type=float, required=True)
    pdf.add_argument("--grid-size", type=int, default=2001)
    pdf.add_argument("--edge", type=float, default=analytics.DEFAULT_EDGE)
    pdf.add_argument("--nodes", type=int, default=analytics.DEFAULT_QUADRATURE.n_points)
    pdf.add_argument("--term-cap", type=int, default=analytics.DEFAULT_QUADRATURE.n_term_cap)
    pdf.add_argument("--term-tol", type=float, default=analytics.DEFAULT_QUADRATURE.term_tol)
    pdf.add_argument("--check-normalization", action="store_true")
    pdf.add_argument("--mc-check", type=int, default=0, metavar="SAMPLES")
    pdf.add_argument("--mc-cycles", type=int, default=10)
    pdf.add_argument("--bins", type=int, default=DEFAULT_BINS)

    ensemble = subparsers.add_parser(
        "ensemble", parents=[common, noise, initial], help="final-fidelity histogram"
    )
    ensemble.add_argument("--samples", type=int, default=10000)
    ensemble.add_argument("--bins", type=int, default=DEFAULT_BINS)

    trajectory = subparsers.add_parser(
        "trajectory", parents=[common, noise, initial], help="per-cycle fidelity"
    )
    trajectory.add_argument("--trajectories", type=int, default=3)

    bangbang = subparsers.add_parser("bangbang", parents=[common, noise], help="bang-bang control run")
    bangbang.add_argument("--omega", type=float, default=1.0)
    bangbang.add_argument("--dt", type=float, default=None, help="pulse interval (default 0.005 pi / omega)")
    bangbang.add_argument("--theta", type=float, default=math.pi / 2)
    bangbang.add_argument("--phi", type=float, default=math.pi / 2)
    bangbang.add_argument("--trajectories", type=int, default=1)
    bangbang.add_argument("--ensemble", type=int, default=0, metavar="SAMPLES")

    bounds = subparsers.add_parser("bounds", parents=[common], help="cycle and protection time limits")
    bounds.add_argument("--delta", type=float, required=True)
    bounds.add_argument("--tau-c", type=float, default=1.0)

    replay = subparsers.add_parser("replay", help="re-run a manifest")
    replay.add_argument("source", metavar="MANIFEST")
    replay.add_argument("--out", default=None, metavar="PATH")
    replay.add_argument("--manifest", default=None, metavar="JSON")

    return parser


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _replay_args(args):
    try:
        with open(args.source, encoding="utf-8") as f:
            manifest = json.load(f)
        params = dict(manifest["parameters"])
        command = manifest["subcommand"]
        out = args.out or manifest["outputs"][0]
    except (OSError, ValueError, KeyError, IndexError, TypeError) as err:
        raise PulseFidException(f"manifest {args.source} unreadable: {err!r}") from err
    if command not in HANDLERS:
        raise PulseFidException(f"manifest {args.source} names unknown subcommand {command!r}")
    return argparse.Namespace(command=command, out=out, manifest=args.manifest, **params)


def run(args) -> int:
    source = None
    if args.command == "replay":
        source = args.source
        args = _replay_args(args)
    handler = HANDLERS[args.command]
    with Simulator(workers=args.workers) as simulator:
        try:
            text, summary = handler(args, simulator)
        except AttributeError as err:
            if source is None:
                raise
            raise PulseFidException(f"manifest {source} lacks a parameter: {err}") from err
    _write(args.out, text)

    if args.manifest:
        manifest = {
            "subcommand": args.command,
            "parameters": {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_REPLAYED},
            "master_seed": args.seed,
            "version": __version__,
            "outputs": [args.out],
            "summary": summary,
        }
        _write(args.manifest, _json(manifest))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return run(args)
    except ConvergenceError as err:
        log.error("%s", err)
        return EXIT_CONVERGENCE
    except PulseFidException as err:
        log.error("invalid argument: %s", err)
        return EXIT_ARGUMENTS
