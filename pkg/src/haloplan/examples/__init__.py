"""Some haloplan example programs, as Python builders and as JSON program files."""

from os import path

from .allreduce import allreduce_program
from .heat import heat_halo_program, heat_program, two_step_heat_program
from .multigrid import prolongation_program, restriction_program


FIXTURES_DIR = path.join(path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    """Return the path of the program file `name` shipped with haloplan.

    Parameters
    ----------
    name : str
        The name of the file, like ``heat12.json``.

    Returns
    -------
    str
        The absolute path of the file.

    """
    return path.join(FIXTURES_DIR, name)


__all__ = [
    "FIXTURES_DIR",
    "fixture_path",
    "allreduce_program",
    "heat_program",
    "heat_halo_program",
    "two_step_heat_program",
    "prolongation_program",
    "restriction_program",
]
