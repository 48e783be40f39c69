"""The local functions combining, for one output index, the values of its input indices.

A combiner is called with the output index and the ``(input index, value)`` pairs of its
dependency set, in ascending input index order. Clipped stencils give fewer pairs at the edges of
the domain: combiners accept any number of operands, an empty list combining to ``0``.

Examples
--------
>>> heat = WeightedCombiner({-1: -1, 0: 2, 1: -1})
>>> heat(1, [(0, 0), (1, 1), (2, 2)])
0
>>> heat(0, [(0, 0), (1, 1)])
-1
>>> SumCombiner()(0, [(0, 1), (1, 2), (2, 3), (3, 4)])
10

"""

from operator import index as as_index
from typing import Any, Dict, Mapping, Sequence, Tuple

from .datatypes import Value, format_value, normalize_value, parse_value
from .exceptions import DomainError, InvalidKernelError
from .signature import SignatureFunction, StencilSignature


__all__ = ["Combiner", "SumCombiner", "MaxCombiner", "WeightedCombiner", "Operands"]


Operands = Sequence[Tuple[int, Value]]


class Combiner:
    """Base class for combiners."""

    kind: str = ""

    def __call__(self, index: int, operands: Operands) -> Value:
        """Combine the `operands` needed by the output `index`.

        Parameters
        ----------
        index : int
            The output index being computed.
        operands : Operands
            The ``(input index, value)`` pairs, in ascending input index order.

        Returns
        -------
        Value
            The value of the output `index`.

        """
        raise NotImplementedError

    def validate(self, kernel_name: str, signature: SignatureFunction) -> None:
        """Check that the combiner can be used with `signature`.

        Parameters
        ----------
        kernel_name : str
            The kernel using the combiner, for error messages.
        signature : SignatureFunction
            The signature of the kernel.

        """

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON descriptor of the combiner."""
        return {"kind": self.kind}

    def __eq__(self, other: Any) -> bool:
        """Compare descriptors."""
        if not isinstance(other, Combiner):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        """Hash the kind."""
        return hash(self.kind)

    def __repr__(self) -> str:
        """Return the representation of the combiner."""
        return f"{self.__class__.__name__}()"


class SumCombiner(Combiner):
    """Add all the operands."""

    kind = "sum"

    def __call__(self, index: int, operands: Operands) -> Value:
        """Return the sum of the values of `operands`."""
        return normalize_value(sum((value for _, value in operands), 0))


class MaxCombiner(Combiner):
    """Keep the greatest operand."""

    kind = "max"

    def __call__(self, index: int, operands: Operands) -> Value:
        """Return the greatest value of `operands`, ``0`` if there is none."""
        return normalize_value(max((value for _, value in operands), default=0))


class WeightedCombiner(Combiner):
    """A weighted sum, the weight of an operand depending on its stencil offset.

    The operand at input index ``j`` for the output ``i`` is multiplied by ``weights[j - i]``.

    Parameters
    ----------
    weights : Mapping[int, Value]
        The weight of each stencil offset. Given as integers, fractions or strings like ``"1/2"``.

    """

    kind = "weighted"

    def __init__(self, weights: Mapping[int, Any]) -> None:
        """Init the combiner with exact weights.

        Raises
        ------
        DomainError
            If a weight is not an integer or a rational, like a float.

        """
        self.weights: Dict[int, Value] = {}
        for offset, weight in sorted(weights.items()):
            try:
                self.weights[as_index(offset)] = parse_value(weight)
            except (ValueError, ZeroDivisionError):
                raise DomainError(
                    f"weight {weight!r} of offset {offset} is not an integer or a rational"
                ) from None

    def __call__(self, index: int, operands: Operands) -> Value:
        """Return the weighted sum of the values of `operands`."""
        return normalize_value(
            sum((self.weights[source - index] * value for source, value in operands), 0)
        )

    def validate(self, kernel_name: str, signature: SignatureFunction) -> None:
        """Check that `signature` is a stencil and that each of its offsets has a weight.

        Raises
        ------
        InvalidKernelError
            If the signature is not a stencil, or if an offset has no weight.

        """
        if not isinstance(signature, StencilSignature):
            raise InvalidKernelError(
                kernel_name, f"a weighted combiner needs a stencil, not a {signature.kind}"
            )
        missing = sorted(signature.offsets - set(self.weights))
        if missing:
            raise InvalidKernelError(
                kernel_name, f"the weighted combiner has no weight for offsets {missing}"
            )

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON descriptor, weights keyed by stringified offset."""
        return {
            "kind": self.kind,
            "weights": {
                str(offset): format_value(weight) for offset, weight in self.weights.items()
            },
        }

    def __repr__(self) -> str:
        """Return the representation of the combiner, with its weights."""
        return f"{self.__class__.__name__}({self.weights!r})"
