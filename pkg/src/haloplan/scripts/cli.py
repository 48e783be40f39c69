#!/usr/bin/env python

"""The ``haloplan`` command: analyse and simulate a program file.

Commands:

- ``beta FILE``: the inputs each processor needs, per kernel.
- ``messages FILE``: the message plan of each kernel as JSON, its statistics embedded, or as
  tables with ``--format table``.
- ``dag FILE``: the task graph, in DOT or JSON.
- ``check-local FILE``: tell which kernels need no communication.
- ``simulate FILE``: run the program sequentially and distributed, and compare.

Exit codes are listed in ``ExitCode``.

"""

import argparse
from enum import IntEnum
import json
import logging
import sys
from typing import Any, List, Optional, Sequence

from haloplan import __version__, loading
from haloplan.datatypes import Value
from haloplan.exceptions import (
    HaloPlanException,
    InvariantError,
    SimulationError,
    UncoverableKernelError,
)
from haloplan.internal.check_mode import override_check_mode
from haloplan.kernel import Policy, communication_stats, is_local, message_plan
from haloplan.program import Program, build_task_graph, to_dot
from haloplan.simulator import verify


logger = logging.getLogger("haloplan.scripts.cli")


class ExitCode(IntEnum):
    """Exit codes of the ``haloplan`` command."""

    OK = 0
    INVALID = 1
    UNCOVERABLE = 2
    MISMATCH = 3
    NOT_LOCAL = 4


def _print_json(data: Any) -> None:
    print(json.dumps(data, indent=2))


def cmd_beta(prog: Program, args: argparse.Namespace) -> ExitCode:
    """Print the inputs needed by each processor, for each kernel."""
    _print_json(
        {
            "kernels": [
                {
                    "kernel": kernel.name,
                    "input": kernel.input_name,
                    "needed": kernel.beta.to_json()["sets"],
                }
                for kernel in prog.kernels
            ]
        }
    )
    return ExitCode.OK


def _format_table(rows: Sequence[Sequence[Any]]) -> List[str]:
    widths = [max(len(str(row[column])) for row in rows) for column in range(len(rows[0]))]
    return [
        "  ".join(str(cell).ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]


def cmd_messages(prog: Program, args: argparse.Namespace) -> ExitCode:
    """Print the message plan of each kernel, with its statistics."""
    plans = [message_plan(kernel, args.policy) for kernel in prog.kernels]

    if args.format == "json":
        _print_json(
            {
                "policy": plans[0].policy.value,
                "plans": [
                    dict(plan.to_json(), stats=communication_stats(plan).to_json())
                    for plan in plans
                ],
            }
        )
        return ExitCode.OK

    for plan in plans:
        print(f"kernel {plan.kernel_name} ({plan.policy.value})")
        rows: List[Sequence[Any]] = [("from", "to", "count", "indices")]
        rows.extend(
            (message.sender, message.receiver, len(message.indices), message.indices)
            for message in plan.cross_messages
        )
        for line in _format_table(rows):
            print(f"  {line}")
        print()

    rows = [("kernel", "messages", "volume", "max halo")]
    rows.extend(
        (plan.kernel_name, *communication_stats(plan)) for plan in plans  # type: ignore
    )
    for line in _format_table(rows):
        print(line)
    return ExitCode.OK


def cmd_dag(prog: Program, args: argparse.Namespace) -> ExitCode:
    """Print the task graph of the program."""
    graph = build_task_graph(prog)
    if args.format == "dot":
        print(to_dot(graph), end="")
    else:
        _print_json(graph.to_json())
    return ExitCode.OK


def cmd_check_local(prog: Program, args: argparse.Namespace) -> ExitCode:
    """Print, for each kernel, if it needs communication."""
    all_local = True
    for kernel in prog.kernels:
        local = is_local(kernel)
        all_local = all_local and local
        print(f"{kernel.name}: {'local' if local else 'non-local'}")
    return ExitCode.OK if all_local else ExitCode.NOT_LOCAL


def cmd_simulate(prog: Program, args: argparse.Namespace) -> ExitCode:
    """Run the program both ways and print the result of the comparison."""
    values: List[Value]
    if args.input:
        values = loading.load_values(args.input)
    else:
        values = list(range(prog.input_object.size))

    report = verify(prog, values, args.policy)

    if args.trace:
        if report.trace is None:
            logger.warning("no trace written to %s: %s", args.trace, report.error)
        else:
            with open(args.trace, "w") as file:
                file.write(report.trace.to_json_lines())

    _print_json(report.to_json())
    if not report.ok:
        print(
            f"Mismatch: {report.error or f'first difference at index {report.first_difference}'}",
            file=sys.stderr,
        )
        return ExitCode.MISMATCH
    return ExitCode.OK


COMMANDS = {
    "beta": cmd_beta,
    "messages": cmd_messages,
    "dag": cmd_dag,
    "check-local": cmd_check_local,
    "simulate": cmd_simulate,
}


def make_parser() -> argparse.ArgumentParser:
    """Create the parser of the command line arguments.

    Returns
    -------
    argparse.ArgumentParser
        The parser, with one sub-parser per command.

    """
    parser = argparse.ArgumentParser(
        prog="haloplan",
        description="Derive and check the communication of data parallel programs.",
        epilog=f"Program files:\n{(loading.__doc__ or '').split('A program file is ', 1)[-1]}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log more on standard error (-v for info, -vv for debug)",
    )
    parser.add_argument(
        "--no-checks",
        action="store_true",
        help="skip the checks of the computed message plans and task graphs",
    )

    policies = [policy.value for policy in Policy]
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        subparser = subparsers.add_parser(name, help=help_text, description=help_text)
        subparser.add_argument("file", help="the JSON program file")
        return subparser

    add_command("beta", "print the inputs needed by each processor, per kernel, as JSON")

    messages = add_command(
        "messages",
        "print the message plan of each kernel and its statistics: as JSON, one plan per kernel "
        "with its statistics under `stats`, or as tables of the cross messages followed by a "
        "statistics table",
    )
    messages.add_argument("--policy", choices=policies, default=None)
    messages.add_argument(
        "--format",
        choices=["json", "table"],
        default="json",
        help="json (default) for the plans with embedded statistics, table for humans",
    )

    dag = add_command("dag", "print the task graph")
    dag.add_argument("--format", choices=["dot", "json"], default="dot")

    add_command(
        "check-local",
        f"tell which kernels need no communication (exit {ExitCode.NOT_LOCAL.value} if some do)",
    )

    simulate = add_command("simulate", "run the program sequentially and distributed, and compare")
    simulate.add_argument(
        "--input",
        metavar="VALUES",
        help="file of whitespace separated integers or rationals (default: 0, 1, ..., N-1)",
    )
    simulate.add_argument("--policy", choices=policies, default=None)
    simulate.add_argument(
        "--trace", metavar="PATH", help="write the execution trace as JSON lines"
    )

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the ``haloplan`` command.

    Parameters
    ----------
    argv : Optional[Sequence[str]]
        The arguments, without the program name. Default to ``None`` to use ``sys.argv``.

    Returns
    -------
    int
        The exit code, see ``ExitCode``.

    """
    args = make_parser().parse_args(argv)

    logging.basicConfig(
        level={0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger.info("%s %s", args.command, args.file)

    try:
        with override_check_mode(not args.no_checks):
            prog = loading.load_program(args.file)
            return COMMANDS[args.command](prog, args)
    except UncoverableKernelError as exc:
        print(f"Uncoverable kernel: {exc}", file=sys.stderr)
        return ExitCode.UNCOVERABLE
    except (SimulationError, InvariantError) as exc:
        print(f"Simulation failed: {exc}", file=sys.stderr)
        return ExitCode.MISMATCH
    except (HaloPlanException, OSError) as exc:
        print(f"Invalid program: {exc}", file=sys.stderr)
        return ExitCode.INVALID


if __name__ == "__main__":
    sys.exit(main())
