"""
Interface en ligne de commande.

    icdiag entropy --dist 0.5,0.3,0.2 --alpha 0.8 --kind tsallis
    icdiag bound polygonal --ic 0.7 --alpha 1 --n 5
    icdiag diagram entropy --alpha 0.8 --n 5 --samples 10000 --seed 42 --out fig.csv
    icdiag verify polygonal --n 8 --samples 100000
    icdiag quantum bound --family sic --d 2 --purity 1 --alpha 1
    icdiag frames validate --file frame.json

Sortie JSON sur stdout (CSV avec --out), journaux sur stderr.
Codes de sortie : 0 succès / PASS, 1 échec de vérification, 2 usage ou domaine.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, List, Optional, Sequence

from pydantic import ValidationError

from icdiag import __version__
from icdiag.core.config import settings
from icdiag.core.logging import new_run_id, set_run_id, setup_logging
from icdiag.models.quantum import DensityMatrix, MeasurementSet, Povm
from icdiag.repositories import files
from icdiag.schemas.files import FrameFile
from icdiag.schemas.reports import ALPHA_GRID, QuantumSweepConfig, ScenarioParams, SweepConfig
from icdiag.services import bounds, entropy, harness, quantum, relations
from icdiag.services.errors import DomainError

logger = logging.getLogger("icdiag.cli")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DIAGRAM_SAMPLES = 10_000


class CliFailure(Exception):
    """Vérification menée à terme mais en échec (code 1)."""


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _emit(obj) -> None:
    sys.stdout.write(files.dump_json(obj) + "\n")


# ---------- verbes ----------

def cmd_entropy(args: argparse.Namespace) -> int:
    p = files.parse_distribution(args.dist)
    kind = args.kind
    if kind == "tsallis":
        value = entropy.tsallis(p, args.alpha)
    elif kind == "renyi":
        value = entropy.renyi(p, args.alpha)
    elif kind == "shannon":
        value = entropy.shannon(p)
    elif kind == "coincidence":
        value = entropy.coincidence(p)
    else:
        value = entropy.min_entropy(p)
    alpha = args.alpha if kind in ("tsallis", "renyi") else None
    _emit({"kind": kind, "alpha": alpha, "n": p.n, "value": value})
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    if args.bound_kind == "maxp":
        _emit({"ic": args.ic, "n": args.n, "lower": bounds.maxp_lower(args.ic), "upper": bounds.maxp_upper(args.ic, args.n)})
        return EXIT_OK
    if args.alpha is None:
        raise DomainError(f"bound {args.bound_kind} requires --alpha")
    if args.bound_kind == "polygonal":
        b = bounds.polygonal_tsallis_bound(args.ic, args.alpha, args.n)
        smooth = bounds.smooth_bound(args.ic, args.alpha)
    else:
        b = bounds.polygonal_renyi_bound(args.ic, args.alpha, args.n)
        smooth = entropy.renyi_from_tsallis(bounds.smooth_bound(args.ic, args.alpha), args.alpha)
    _emit({
        "kind": args.bound_kind,
        "ic": args.ic,
        "alpha": args.alpha,
        "n": args.n,
        "bound": b.value,
        "achieving_k": b.k,
        "smooth": smooth,
    })
    return EXIT_OK


def _sweep_config(args: argparse.Namespace, samples_default: int, alphas: Optional[List[float]] = None) -> SweepConfig:
    return SweepConfig(
        n=args.n,
        alphas=alphas or list(ALPHA_GRID),
        samples=args.samples if args.samples is not None else samples_default,
        seed=args.seed if args.seed is not None else settings.DEFAULT_SEED,
        grid=args.grid if args.grid is not None else settings.DEFAULT_GRID,
    )


def cmd_diagram(args: argparse.Namespace) -> int:
    alphas = [args.alpha] if args.alpha is not None else None
    config = _sweep_config(args, DIAGRAM_SAMPLES, alphas)
    points = harness.emit_diagram(args.diagram_kind, config, args.alpha)
    if args.out:
        rows = files.write_diagram_csv(points, args.diagram_kind, args.out)
        _emit({"diagram": args.diagram_kind, "out": args.out, "points": rows})
    else:
        _emit(points)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.verify_kind == "quantum":
        config = QuantumSweepConfig(
            dims=args.dims or [2, 3],
            alphas=args.alphas or list(ALPHA_GRID),
            states=args.states or settings.DEFAULT_STATES,
            seed=args.seed if args.seed is not None else settings.DEFAULT_SEED,
        )
        verdict = harness.run_quantum_sweep(config, threads=args.threads)
    else:
        config = _sweep_config(args, settings.DEFAULT_SAMPLES, args.alphas)
        run = harness.run_polygonal_sweep if args.verify_kind == "polygonal" else harness.run_thm1_sweep
        verdict = run(config, threads=args.threads)
    _emit(verdict)
    if verdict.status == "FAIL":
        raise CliFailure(f"{args.verify_kind} verification failed")
    return EXIT_OK


def _scenario(args: argparse.Namespace, purity: float) -> ScenarioParams:
    fields = {"family": args.family, "d": args.d, "purity": purity}
    for name in ("M", "n", "kappa", "theta"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    return ScenarioParams(**fields)


def _build_measurement(args: argparse.Namespace) -> Povm | MeasurementSet:
    if args.povm_file:
        return files.load_povm(args.povm_file)
    if args.family is None or args.d is None:
        raise DomainError("quantum certify requires --family and --d, or --povm-file")
    family, d = args.family, args.d
    if family == "mub":
        return quantum.mub_set(d, args.M if args.M is not None else d + 1)
    if family == "mum":
        if args.kappa is None:
            raise DomainError("family mum requires --kappa")
        return quantum.mum_set(d, args.kappa, args.M)
    if family == "etf":
        return quantum.etf_povm(files.load_frame(args.frame_file)) if args.frame_file else quantum.etf_simplex(d)
    if family == "sic":
        return quantum.sic_povm(d)
    if args.theta is None:
        raise DomainError("family gsic requires --theta")
    frame = files.load_frame(args.frame_file) if args.frame_file else None
    return quantum.general_sic(d, args.theta, frame)


def cmd_quantum(args: argparse.Namespace) -> int:
    action = args.quantum_action
    if action == "bound":
        purity = args.purity
        if args.state_file:
            rho: DensityMatrix = files.load_state(args.state_file)
            if rho.d != args.d:
                raise DomainError(f"state file has dimension {rho.d}, expected d={args.d}")
            purity = quantum.purity(rho)
        params = _scenario(args, 1.0 if purity is None else purity)
        _emit(relations.scenario_bound(params, args.alpha, args.kind))
        return EXIT_OK

    if action == "states":
        rho = quantum.random_state(args.d, args.state_kind, args.seed if args.seed is not None else settings.DEFAULT_SEED)
        if args.out:
            files.save_state(rho, args.out)
            _emit({"out": args.out, "d": rho.d, "purity": quantum.purity(rho)})
        else:
            _emit(files.state_payload(rho))
        return EXIT_OK

    # certify
    target = _build_measurement(args)
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    count = args.states or settings.DEFAULT_STATES
    states = quantum.random_states(target.d, count, args.state_kind, seed)
    reports = relations.certify(target, states, args.alphas or list(ALPHA_GRID))
    _emit(reports)
    if any(r.slack is not None and r.slack < -relations.SLACK_TOL for r in reports):
        raise CliFailure("certification found a violated bound")
    return EXIT_OK


def cmd_frames(args: argparse.Namespace) -> int:
    if args.frames_action == "validate":
        report = quantum.etf_validate(files.load_frame(args.file))
        _emit(report)
        if not report.is_etf:
            raise CliFailure("frame is not an equiangular tight frame")
        return EXIT_OK
    vectors = quantum.simplex_frame(args.d) if args.frames_action == "simplex" else quantum.sic_frame(args.d)
    _emit(FrameFile.from_array(vectors))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("icdiag.main:app", host=args.host, port=args.port, log_config=None)
    return EXIT_OK


# ---------- parseur ----------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icdiag", description="Information diagrams and entropic uncertainty bounds.")
    parser.add_argument("--version", action="version", version=f"icdiag {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("entropy", help="entropy or coincidence of a distribution")
    p.add_argument("--dist", required=True, help="comma list or JSON array of probabilities")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kind", choices=["tsallis", "renyi", "min", "shannon", "coincidence"], default="tsallis")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("bound", help="information-diagram bounds at a coincidence value")
    p.add_argument("bound_kind", choices=["polygonal", "renyi", "maxp"])
    p.add_argument("--ic", type=float, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("diagram", help="sampled diagram with analytic boundary curves")
    p.add_argument("diagram_kind", choices=["entropy", "maxp"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--out", help="CSV output file")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("verify", help="Monte-Carlo and extremal certification sweeps")
    p.add_argument("verify_kind", choices=["polygonal", "thm1", "quantum"])
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--alphas", type=_float_list)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--states", type=int)
    p.add_argument("--dims", type=_int_list)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("quantum", help="uncertainty bounds and certification for measurement families")
    p.add_argument("quantum_action", choices=["bound", "certify", "states"])
    p.add_argument("--family", choices=["mub", "mum", "etf", "sic", "gsic"])
    p.add_argument("--d", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--theta", type=float)
    purity = p.add_mutually_exclusive_group()
    purity.add_argument("--purity", type=float)
    purity.add_argument("--state-file")
    p.add_argument("--alpha", type=float)
    p.add_argument("--alphas", type=_float_list)
    p.add_argument("--kind", choices=["tsallis", "renyi", "min"], default="tsallis")
    p.add_argument("--frame-file")
    p.add_argument("--povm-file")
    p.add_argument("--states", type=int)
    p.add_argument("--state-kind", choices=["pure", "mixed"], default="mixed")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("frames", help="frame validation and built-in frames")
    p.add_argument("frames_action", choices=["validate", "simplex", "sic"])
    p.add_argument("--file")
    p.add_argument("--d", type=int)
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def _check_required(args: argparse.Namespace) -> None:
    if args.verb == "diagram" and args.diagram_kind == "entropy" and args.alpha is None:
        raise DomainError("diagram entropy requires --alpha")
    if args.verb == "quantum":
        if args.quantum_action == "bound" and (args.family is None or args.d is None):
            raise DomainError("quantum bound requires --family and --d")
        if args.quantum_action == "bound" and args.kind != "min" and args.alpha is None:
            raise DomainError("quantum bound requires --alpha for tsallis and renyi bounds")
        if args.quantum_action == "states" and args.d is None:
            raise DomainError("quantum states requires --d")
    if args.verb == "frames":
        if args.frames_action == "validate" and not args.file:
            raise DomainError("frames validate requires --file")
        if args.frames_action != "validate" and args.d is None:
            raise DomainError(f"frames {args.frames_action} requires --d")


def main(argv: Optional[Sequence[str]] = None, runner: Optional[Callable[[argparse.Namespace], int]] = None) -> int:
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    new_run_id()
    logger.info("command started", extra={"verb": args.verb})
    try:
        _check_required(args)
        return (runner or args.func)(args)
    except CliFailure as e:
        logger.warning("verification failed", extra={"verb": args.verb})
        sys.stderr.write(files.dump_json({"error": str(e)}) + "\n")
        return EXIT_FAIL
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(x) for x in first.get("loc", ())) or "input"
        sys.stderr.write(files.dump_json({"error": f"{where}: {first['msg']}"}) + "\n")
        return EXIT_USAGE
    except DomainError as e:
        sys.stderr.write(files.dump_json({"error": str(e)}) + "\n")
        return EXIT_USAGE
    finally:
        set_run_id(None)


if __name__ == "__main__":
    sys.exit(main())
