"""Functions to get/activate/deactivate check-mode, and the ``checked`` decorator.

In "check-mode", active by default, costly postconditions are verified on the results of the
main derivations: message plans must cover every needed index and only send owned indices,
task graphs must be acyclic with edges between adjacent layers only.

It's active by default to let you be sure that what is derived is consistent.

Your tests must run in "check-mode".

On big programs, when you trust the derivations, you can deactivate it to save time.

The included functions can be imported from ``haloplan.internal.check_mode`` or, by convenience,
from ``haloplan``.

Examples
--------
>>> from haloplan.internal.check_mode import in_check_mode, override_check_mode
>>> in_check_mode()
True
>>> with override_check_mode(False):
...     print(in_check_mode())
False
>>> in_check_mode()
True

"""

from contextlib import contextmanager
from typing import Any, Callable, Iterator

import wrapt


__all__ = [
    "set_check_mode",
    "unset_check_mode",
    "override_check_mode",
    "in_check_mode",
    "checked",
]


__CHECK_MODE__: bool = True


def set_check_mode(check_mode: bool = True) -> None:
    """Change the check-mode. Activate it if `check_mode` is not defined.

    Parameters
    ----------
    check_mode : bool
        The new check-mode wanted. Default to ``True``. Will be casted to ``bool``.

    """
    global __CHECK_MODE__  # pylint: disable=global-statement
    __CHECK_MODE__ = bool(check_mode)


def unset_check_mode() -> None:
    """Deactivate the check-mode."""
    set_check_mode(check_mode=False)


@contextmanager
def override_check_mode(  # pylint: disable=missing-yield-doc,missing-yield-type-doc
    check_mode: bool,
) -> Iterator[None]:
    """Create a context manager to change the check-mode in a ``with`` block.

    Parameters
    ----------
    check_mode : bool
        The check-mode wanted inside the ``with`` block.

    """
    old_check_mode: bool = __CHECK_MODE__
    try:
        set_check_mode(check_mode=check_mode)
        yield
    finally:
        set_check_mode(check_mode=old_check_mode)


def in_check_mode() -> bool:
    """Return the actual check-mode.

    Returns
    -------
    bool
        The value of the actual check-mode.

    """
    return __CHECK_MODE__


def checked(check: Callable[..., None]) -> Callable:  # noqa: D202
    """Decorate a function to verify its result with `check` when in check-mode.

    Parameters
    ----------
    check : Callable[..., None]
        Called with the result of the decorated function followed by the arguments it received.
        It must raise ``InvariantError`` when the result is not acceptable.

    Returns
    -------
    Callable
        A wrapper running `check` after the decorated function, only in check-mode.

    """

    @wrapt.decorator  # type: ignore
    def wrapper(  # pylint: disable=unused-argument
        wrapped: Callable, instance: Any, args: Any, kwargs: Any
    ) -> Any:
        """Call the `wrapped` function then check its result.

        Parameters
        ----------
        wrapped : Callable
            The function to decorate.
        instance : Any
            The instance calling the function if `wrapped` is a method.
        args : Any
            The unnamed arguments passed to the `wrapped` function.
        kwargs : Any
            The named arguments passed to the `wrapped` function.

        Returns
        -------
        Any
            The result of the call to `wrapped`.

        """
        result = wrapped(*args, **kwargs)
        if __CHECK_MODE__:
            check(result, *args, **kwargs)
        return result

    return wrapper
