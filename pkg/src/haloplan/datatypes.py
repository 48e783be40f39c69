"""Types used through haloplan and to be used externally."""

from fractions import Fraction
from typing import NewType, Union


__all__ = ["ProcId", "Value", "INDEX_LIMIT", "normalize_value", "parse_value", "format_value"]


# pylint: disable=invalid-name

#: Rank of a processor, in ``{0..P-1}``.
ProcId = NewType("ProcId", int)

#: Values carried by distributed objects. Arithmetic is exact.
Value = Union[int, Fraction]

# pylint: enable=invalid-name

#: Exclusive upper limit of the global index space.
INDEX_LIMIT: int = 2 ** 63


def normalize_value(value: Value) -> Value:
    """Return `value` as an ``int`` when it is integral, else as a ``Fraction``.

    Parameters
    ----------
    value : Value
        The value to normalize.

    Returns
    -------
    Value
        The same number, with the simplest exact type.

    Examples
    --------
    >>> normalize_value(Fraction(6, 3))
    2
    >>> normalize_value(Fraction(1, 2))
    Fraction(1, 2)

    """
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def parse_value(text: Union[str, int, Fraction]) -> Value:
    """Parse an exact value, given as an ``int``, a ``Fraction`` or a string like ``"1/2"``.

    Parameters
    ----------
    text : Union[str, int, Fraction]
        The value to parse.

    Returns
    -------
    Value
        The parsed value, normalized.

    Raises
    ------
    ValueError
        If `text` is not an integer or a rational. Floats are refused.

    Examples
    --------
    >>> parse_value("4/2"), parse_value(-1)
    (2, -1)

    """
    if isinstance(text, bool) or not isinstance(text, (int, str, Fraction)):
        raise ValueError(f"{text!r} is not an exact value")
    return normalize_value(Fraction(text))


def format_value(value: Value) -> str:
    """Return the text form of `value`, read back by ``parse_value``.

    Parameters
    ----------
    value : Value
        The value to format.

    Returns
    -------
    str
        ``"3"`` or ``"-1/2"``.

    """
    return str(normalize_value(value))
