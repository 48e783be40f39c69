"""The one dimensional heat equation: ``y[i] = 2*x[i] - x[i-1] - x[i+1]``.

At the edges of the domain the stencil is clipped, so ``y[0] = 2*x[0] - x[1]``.
"""

from haloplan.combiners import WeightedCombiner
from haloplan.distribution import block_distribution, halo_distribution
from haloplan.program import Program, build_task_graph, to_dot
from haloplan.signature import StencilSignature


HEAT_WEIGHTS = {-1: -1, 0: 2, 1: -1}


def _add_heat_kernel(program: Program, name: str, input_name: str, output_name: str) -> None:
    size = program.objects[input_name].size
    program.add_kernel(
        name,
        input_name,
        output_name,
        StencilSignature(sorted(HEAT_WEIGHTS), n_in=size),
        WeightedCombiner(HEAT_WEIGHTS),
    )


def heat_program(size: int = 12, nprocs: int = 4) -> Program:
    """Build one step of the heat equation, input and output on the same blocks.

    Parameters
    ----------
    size : int
        The number of points. Default to ``12``.
    nprocs : int
        The number of processors. Default to ``4``.

    Returns
    -------
    Program
        The program ``x -> y``, with a kernel named ``heat``.

    """
    program = Program()
    program.add_object("x", block_distribution(size, nprocs))
    program.add_object("y", block_distribution(size, nprocs))
    _add_heat_kernel(program, "heat", "x", "y")
    return program


def two_step_heat_program(size: int = 12, nprocs: int = 4) -> Program:
    """Build two chained steps of the heat equation: ``x -> y -> z``.

    For the parameters, see ``heat_program``.

    Returns
    -------
    Program
        The program, with kernels named ``heat1`` and ``heat2``.

    """
    program = Program()
    for name in ("x", "y", "z"):
        program.add_object(name, block_distribution(size, nprocs))
    _add_heat_kernel(program, "heat1", "x", "y")
    _add_heat_kernel(program, "heat2", "y", "z")
    return program


def heat_halo_program(size: int = 12, nprocs: int = 4, width: int = 1) -> Program:
    """Build one step of the heat equation reading an input already holding its halo.

    The input is distributed on blocks widened by `width`: when `width` is at least ``1``, every
    processor owns all it needs and the kernel is local.

    For the other parameters, see ``heat_program``.

    Parameters
    ----------
    width : int
        The width of the halo of the input. Default to ``1``.

    Returns
    -------
    Program
        The program ``x -> y``, with a kernel named ``heat``.

    """
    program = Program()
    program.add_object("x", halo_distribution(size, nprocs, width))
    program.add_object("y", block_distribution(size, nprocs))
    _add_heat_kernel(program, "heat", "x", "y")
    return program


def render_example() -> str:
    """Render the task graph of the two step heat program, in DOT.

    Returns
    -------
    str
        The DOT source.

    """
    return to_dot(build_task_graph(two_step_heat_program()))


if __name__ == "__main__":
    print(render_example(), end="")
