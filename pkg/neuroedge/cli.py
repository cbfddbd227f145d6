import argparse
import logging

import pydantic
import uvicorn

from neuroedge.api.dependencies import configure_endpoint
from neuroedge.domain.errors import (
    InsideObstacle,
    NeuroEdgeError,
    NoConvergence,
    NonFiniteState,
    NotStabilizable,
    ParseError,
    ValidationError,
)
from neuroedge.main import app
from neuroedge.models.scenario import SweepSpec
from neuroedge.service.runner.config import OUTPUT_DIR
from neuroedge.service.runner.orchestrator import build_cloud_endpoint, run_scenario
from neuroedge.service.runner.scenarios import config_from_dict, load_config
from neuroedge.service.runner.sweep import run_sweep


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_DIVERGED = 3


def _add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="scenario JSON; missing fields take the scenario defaults")
    source.add_argument(
        "--scenario",
        choices=["workbench", "rendezvous", "rendezvous_static_obstacle", "rendezvous_dynamic_obstacle"],
        help="run a scenario with its defaults",
    )
    parser.add_argument("--seed", type=int, default=None, help="overrides the config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neuroedge", description="Cloud-supervised spiking edge controller simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one scenario and write its telemetry")
    _add_scenario_arguments(run)
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--link", default=None, help="inproc, tcp://HOST:PORT or http://HOST:PORT")

    sweep = commands.add_parser("sweep", help="sweep the neuron count over several seeds")
    _add_scenario_arguments(sweep)
    sweep.add_argument("--n", required=True, help="comma separated neuron counts, e.g. 5,15,30,50")
    sweep.add_argument("--seeds", type=int, default=5, help="number of seeds per neuron count")
    sweep.add_argument("--out", default=None, help="output directory")

    serve = commands.add_parser("serve", help="serve the cloud side of a scenario over HTTP")
    _add_scenario_arguments(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load(args: argparse.Namespace):
    cfg = load_config(args.config) if args.config else config_from_dict({"scenario": args.scenario})
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})
    return cfg


def _parse_counts(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ValidationError([f"--n: {e}"]) from e


def _run(args: argparse.Namespace) -> None:
    cfg = _load(args)
    if args.link is not None:
        cfg = cfg.model_copy(update={"link": args.link})
    summary = run_scenario(cfg, out_dir=args.out)
    print(summary.model_dump_json(indent=2))


def _sweep(args: argparse.Namespace) -> None:
    cfg = _load(args)
    if args.seeds < 1:
        raise ValidationError(["--seeds must be >= 1"])
    spec = SweepSpec(base=cfg, N_values=_parse_counts(args.n), seeds=[cfg.seed + i for i in range(args.seeds)])
    print(run_sweep(spec, args.out or cfg.output_dir or OUTPUT_DIR))


def _serve(args: argparse.Namespace) -> None:
    configure_endpoint(build_cloud_endpoint(_load(args)))
    uvicorn.run(app, host=args.host, port=args.port)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _run, "sweep": _sweep, "serve": _serve}

    try:
        handlers[args.command](args)
    except (ParseError, ValidationError) as e:
        logger.error(str(e))
        return EXIT_INVALID
    except pydantic.ValidationError as e:
        logger.error(f"invalid configuration: {e}")
        return EXIT_INVALID
    except (NonFiniteState, InsideObstacle, NoConvergence, NotStabilizable) as e:
        logger.error(f"run aborted: {e}")
        return EXIT_DIVERGED
    except NeuroEdgeError as e:
        logger.error(f"run failed: {e}")
        return EXIT_FAILURE
    return EXIT_OK
