"""A rootless collective: the sum of all the items, known by every processor.

The output is replicated: each processor owns, and computes, all of it.
"""

from haloplan.combiners import SumCombiner
from haloplan.distribution import block_distribution, replicated_distribution
from haloplan.program import Program
from haloplan.signature import TotalSignature
from haloplan.simulator import run_distributed


def allreduce_program(size: int = 4, nprocs: int = 4) -> Program:
    """Build an allreduce: every ``y[i]`` is the sum of all of ``x``.

    Parameters
    ----------
    size : int
        The number of items. Default to ``4``.
    nprocs : int
        The number of processors. Default to ``4``.

    Returns
    -------
    Program
        The program ``x -> y``, ``x`` on blocks and ``y`` replicated, with a kernel named
        ``allreduce``.

    """
    program = Program()
    program.add_object("x", block_distribution(size, nprocs))
    program.add_object("y", replicated_distribution(size, nprocs))
    program.add_kernel("allreduce", "x", "y", TotalSignature(n_in=size), SumCombiner())
    return program


def render_example() -> str:
    """Run the allreduce of ``1, 2, 3, 4`` and return what the processors end with."""
    values, trace = run_distributed(allreduce_program(), [1, 2, 3, 4])
    return f"{values} after {trace.cross_messages()} messages"


if __name__ == "__main__":
    print(render_example())
