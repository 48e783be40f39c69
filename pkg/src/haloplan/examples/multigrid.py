"""Grid transfers of a multigrid method, between a fine grid and a coarse grid half its size.

- restriction: ``coarse[i] = fine[2i] + fine[2i+1]``, an affine recipe.
- prolongation: ``fine[i] = coarse[i // 2]``, a sparse pattern.

With both grids on balanced blocks, the blocks of the coarse grid are the images of the blocks
of the fine grid, so no processor needs anything it does not own.
"""

from haloplan.distribution import block_distribution
from haloplan.kernel import is_local
from haloplan.program import Program
from haloplan.signature import AffineSignature, SparseSignature


def restriction_program(coarse_size: int = 4, nprocs: int = 2) -> Program:
    """Build the restriction of a fine grid to a coarse grid.

    Parameters
    ----------
    coarse_size : int
        The number of points of the coarse grid. The fine grid has twice as many. Default to
        ``4``.
    nprocs : int
        The number of processors. Default to ``2``.

    Returns
    -------
    Program
        The program ``fine -> coarse``, with a kernel named ``restrict``.

    """
    fine_size = 2 * coarse_size
    program = Program()
    program.add_object("fine", block_distribution(fine_size, nprocs))
    program.add_object("coarse", block_distribution(coarse_size, nprocs))
    program.add_kernel("restrict", "fine", "coarse", AffineSignature(2, [0, 1], n_in=fine_size))
    return program


def prolongation_program(coarse_size: int = 4, nprocs: int = 2) -> Program:
    """Build the prolongation of a coarse grid to a fine grid, each coarse point being copied
    on the two fine points it covers.

    For the parameters, see ``restriction_program``.

    Returns
    -------
    Program
        The program ``coarse -> fine``, with a kernel named ``prolong``.

    """
    fine_size = 2 * coarse_size
    program = Program()
    program.add_object("coarse", block_distribution(coarse_size, nprocs))
    program.add_object("fine", block_distribution(fine_size, nprocs))
    program.add_kernel(
        "prolong",
        "coarse",
        "fine",
        SparseSignature({index: [index // 2] for index in range(fine_size)}, n_in=coarse_size),
    )
    return program


def render_example() -> str:
    """Tell, for each grid transfer, if it needs communication."""
    return "\n".join(
        f"{example.kernels[0].name}: {'local' if is_local(example.kernels[0]) else 'non-local'}"
        for example in (restriction_program(), prolongation_program())
    )


if __name__ == "__main__":
    print(render_example())
