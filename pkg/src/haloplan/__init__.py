"""Root of the ``haloplan`` package."""

from configparser import ConfigParser
from importlib.metadata import PackageNotFoundError, version
from os import path

from . import exceptions  # noqa: F401
from .combiners import *  # noqa: F401,F403  # pylint: disable=wildcard-import
from .datatypes import *  # noqa: F401,F403  # pylint: disable=wildcard-import
from .distribution import *  # noqa: F401,F403  # pylint: disable=wildcard-import
from .indexset import IndexSet  # noqa: F401
from .internal.check_mode import *  # noqa: F401,F403  # pylint: disable=wildcard-import
from .kernel import *  # noqa: F401,F403  # pylint: disable=wildcard-import
from .loading import load_program, load_values, parse_program  # noqa: F401
from .program import *  # noqa: F401,F403  # pylint: disable=wildcard-import
from .signature import *  # noqa: F401,F403  # pylint: disable=wildcard-import
from .simulator import *  # noqa: F401,F403  # pylint: disable=wildcard-import


def _extract_version() -> str:
    """Extract the current version of ``haloplan``.

    It will get it from the installed package if any, or from the ``setup.cfg`` file.

    Returns
    -------
    str
        The actual version of the ``haloplan`` package.

    """
    try:
        return version("haloplan")
    except PackageNotFoundError:
        config = ConfigParser()
        config.read(path.join(path.dirname(__file__), "../../", "setup.cfg"))
        return config.get("metadata", "version", fallback="0+unknown")


__version__ = _extract_version()
