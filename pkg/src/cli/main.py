"""
poisson-deform command-line front end
Parses arguments, loads the problem file, runs one command (or a batch)
and prints a JSON document or a plain table on stdout
"""
import argparse
import asyncio
import json
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from cli.commands import run_command
from cli.serialization import load_spec, render_table
from models.problem_models import CommandName, ErrorDoc, ErrorInfo, OutputFormat, ProblemSpec, TimingInfo
from utils import config
from utils.computation_logger import log_command
from utils.errors import PoissonDeformError

GROUPS = {
    "deform": ("build", "verify", "normalize", "extend", "casimir"),
    "surface": ("h2", "deform", "verify", "rigidity", "normalize"),
    "plane": ("h2dim",),
}
SINGLE = ("milnor", "h2", "schouten", "delta", "properties")


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("-f", "--file", default="-", help="problem file, '-' for stdin (default)")
    parent.add_argument("--order", type=int, help="override the truncation order N")
    parent.add_argument("--phi-power-bound", type=int, help="override the phi-power bound")
    parent.add_argument("--seed", type=int, help="seed for randomized commands")
    output = parent.add_mutually_exclusive_group()
    output.add_argument("--json", dest="output", action="store_const", const=OutputFormat.JSON.value)
    output.add_argument("--table", dest="output", action="store_const", const=OutputFormat.TABLE.value)
    parent.set_defaults(output=OutputFormat.JSON.value)
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="poisson-deform",
        description="Formal deformations of the Poisson structures {.,.}_phi on Q[x,y,z]",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name in SINGLE:
        commands.add_parser(name, parents=[common])
    for group, actions in GROUPS.items():
        group_parser = commands.add_parser(group)
        sub = group_parser.add_subparsers(dest="action", required=True)
        for action in actions:
            sub.add_parser(action, parents=[common])

    batch = commands.add_parser("batch", parents=[common], help="run one command over several problem files")
    batch.add_argument("--command", dest="batch_command", required=True, choices=[c.value for c in CommandName])
    batch.add_argument("--workers", type=int, default=None, help="concurrent workers (POISSON_DEFORM_WORKERS)")
    batch.add_argument("files", nargs="+")
    return parser


def command_of(args: argparse.Namespace) -> CommandName:
    if args.command == "batch":
        return CommandName(args.batch_command)
    if args.command in GROUPS:
        return CommandName(f"{args.command} {args.action}")
    return CommandName(args.command)


def apply_overrides(spec: ProblemSpec, args: argparse.Namespace) -> ProblemSpec:
    updates: Dict[str, Any] = {}
    if args.order is not None:
        updates["truncation_order"] = args.order
    if args.phi_power_bound is not None:
        updates["phi_power_bound"] = args.phi_power_bound
    if args.seed is not None:
        updates["seed"] = args.seed
    return spec.model_copy(update=updates) if updates else spec


def error_document(command: str, exc: Exception) -> Dict[str, Any]:
    if isinstance(exc, PoissonDeformError):
        info = ErrorInfo(code=exc.code, message=exc.message, details=exc.details)
    else:
        info = ErrorInfo(code="internal_error", message=str(exc) or type(exc).__name__)
    return ErrorDoc(command=command, error=info).model_dump(mode="json")


def exit_code_of(exc: Exception) -> int:
    return exc.exit_code if isinstance(exc, PoissonDeformError) else 1


def execute(command: CommandName, path: str, args: argparse.Namespace) -> Dict[str, Any]:
    """Run one command on one problem file; errors propagate"""
    start = time.perf_counter()
    try:
        spec = apply_overrides(load_spec(path), args)
        doc = run_command(command, spec)
    except Exception as exc:
        log_command(command.value, False, time.perf_counter() - start, file=path, error=type(exc).__name__)
        raise
    elapsed = time.perf_counter() - start
    doc.timing = TimingInfo(elapsed_seconds=round(elapsed, 6))
    log_command(command.value, True, elapsed, file=path)
    return doc.model_dump(mode="json")


async def run_batch(command: CommandName, files: Sequence[str], args: argparse.Namespace, workers: int) -> List[Dict[str, Any]]:
    """Documents in input order, error documents in place of failures"""
    semaphore = asyncio.Semaphore(max(1, workers))

    async def one(path: str) -> Dict[str, Any]:
        async with semaphore:
            try:
                return await asyncio.to_thread(execute, command, path, args)
            except Exception as exc:
                doc = error_document(command.value, exc)
                doc["file"] = path
                return doc

    return list(await asyncio.gather(*(one(path) for path in files)))


def emit(document: Any, output: str):
    if output == OutputFormat.TABLE.value:
        documents = document if isinstance(document, list) else [document]
        print("\n\n".join(render_table(d) for d in documents))
    else:
        print(json.dumps(document, indent=2, ensure_ascii=False))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = command_of(args)

    if args.command == "batch":
        workers = args.workers or config.settings.workers
        documents = asyncio.run(run_batch(command, args.files, args, workers))
        emit(documents, args.output)
        failed = [d for d in documents if "error" in d]
        return 0 if not failed else 1

    try:
        document = execute(command, args.file, args)
    except Exception as exc:
        emit(error_document(command.value, exc), args.output)
        return exit_code_of(exc)
    emit(document, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
