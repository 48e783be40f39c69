"""Signature functions: for each output index, the set of input indices it depends on.

Four variants are available:

- ``StencilSignature``: ``σ(i) = {i + d : d ∈ D}`` for a finite set of signed offsets ``D``.
- ``AffineSignature``: ``σ(i) = {a*i + b : b ∈ B}``, like the restriction of a multigrid method.
- ``SparseSignature``: ``σ(i) = rows[i]``, the pattern of a sparse matrix.
- ``TotalSignature``: ``σ(i) = [0, N)``, every output depends on every input (allreduce).

Every signature knows the size ``n_in`` of its input space: images are clipped to
``[0, n_in)``, so a stencil is truncated at the edges of the domain.

A signature is extended to sets (``apply_set``, the union of the images of the elements) and to
distributions (``apply_distribution``, applied to the set of every processor).

Examples
--------
>>> three_point = StencilSignature([-1, 0, 1], n_in=12)
>>> print(three_point.apply_index(5))
{[4,7)}
>>> print(three_point.apply_index(0))
{[0,2)}
>>> print(AffineSignature(2, [0, 1], n_in=8).apply_index(3))
{[6,8)}

"""

from functools import reduce
from operator import index as as_index
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Union

from .distribution import Distribution
from .exceptions import DomainError, MissingRowError, SignatureError
from .indexset import IndexSet


__all__ = [
    "SignatureFunction",
    "StencilSignature",
    "AffineSignature",
    "SparseSignature",
    "TotalSignature",
    "apply_index",
    "apply_set",
    "apply_distribution",
]


class SignatureFunction:
    """Base class for signature functions.

    Parameters
    ----------
    n_in : int
        Size of the input index space ``[0, n_in)``.

    Raises
    ------
    SignatureError
        If `n_in` is negative.

    """

    kind: str = ""

    def __init__(self, n_in: int) -> None:
        """Init the signature with the size of its input space."""
        n_in = as_index(n_in)
        if n_in < 0:
            raise SignatureError(f"the input size must not be negative (got {n_in})")
        self.n_in = n_in

    @property
    def domain_bound(self) -> int:
        """Get the size of the valid input index space ``[0, n_in)``."""
        return self.n_in

    def apply_index(self, index: int) -> IndexSet:
        """Return the dependency set of the output `index`, clipped to the input space.

        Parameters
        ----------
        index : int
            The output index.

        Returns
        -------
        IndexSet
            The input indices needed to compute `index`.

        Raises
        ------
        DomainError
            If `index` is negative.

        """
        index = as_index(index)
        if index < 0:
            raise DomainError(f"negative index {index}")
        return self._image_of_index(index)

    def apply_set(self, indices: IndexSet) -> IndexSet:
        """Return the union of the dependency sets of all elements of `indices`.

        Parameters
        ----------
        indices : IndexSet
            The output indices.

        Returns
        -------
        IndexSet
            The input indices needed to compute all of `indices`.

        """
        if not indices:
            return IndexSet.empty()
        return self._image_of_set(indices)

    def apply_distribution(self, distribution: Distribution) -> Distribution:
        """Apply the signature to the set of every processor of `distribution`.

        Parameters
        ----------
        distribution : Distribution
            Typically the output distribution of a kernel.

        Returns
        -------
        Distribution
            A distribution on the input space, with the same number of processors.

        """
        return Distribution([self.apply_set(indices) for indices in distribution], self.n_in)

    def _image_of_index(self, index: int) -> IndexSet:
        raise NotImplementedError

    def _image_of_set(self, indices: IndexSet) -> IndexSet:
        return reduce(
            IndexSet.union,
            (self._image_of_index(index) for index in indices),
            IndexSet.empty(),
        )

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON descriptor of the signature.

        Returns
        -------
        Dict[str, Any]
            The descriptor, with at least ``kind`` and ``n_in``.

        """
        return {"kind": self.kind, "n_in": self.n_in}

    def __eq__(self, other: Any) -> bool:
        """Compare descriptors."""
        if not isinstance(other, SignatureFunction):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        """Hash the kind and the input size."""
        return hash((self.kind, self.n_in))

    def __repr__(self) -> str:
        """Return the representation of the signature, from its descriptor."""
        parameters = ", ".join(
            f"{key}={value!r}" for key, value in self.to_json().items() if key != "kind"
        )
        return f"{self.__class__.__name__}({parameters})"


class StencilSignature(SignatureFunction):
    """A stencil: ``σ(i) = {i + d : d ∈ offsets}``, clipped to ``[0, n_in)``.

    Parameters
    ----------
    offsets : Iterable[int]
        The signed offsets of the stencil. Must not be empty.

    For the other parameters, see ``SignatureFunction``.

    Examples
    --------
    >>> print(StencilSignature([-1, 0, 1], n_in=20).apply_set(IndexSet.span(3, 7)))
    {[2,8)}

    """

    kind = "stencil"

    def __init__(self, offsets: Iterable[int], n_in: int) -> None:
        """Init the stencil and validate its offsets."""
        super().__init__(n_in)
        self.offsets = frozenset(as_index(offset) for offset in offsets)
        if not self.offsets:
            raise SignatureError("a stencil needs at least one offset")

    @property
    def reach(self) -> int:
        """Get the greatest distance between an output index and one of its inputs."""
        return max(abs(offset) for offset in self.offsets)

    def _image_of_index(self, index: int) -> IndexSet:
        return IndexSet.from_elements(
            index + offset
            for offset in self.offsets
            if 0 <= index + offset < self.n_in
        )

    def _image_of_set(self, indices: IndexSet) -> IndexSet:
        return reduce(
            IndexSet.union,
            (indices.translate(offset) for offset in sorted(self.offsets)),
            IndexSet.empty(),
        ).clip(0, self.n_in)

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON descriptor of the stencil."""
        return {"kind": self.kind, "offsets": sorted(self.offsets), "n_in": self.n_in}


class AffineSignature(SignatureFunction):
    """An affine recipe: ``σ(i) = {stride*i + b : b ∈ offsets}``, clipped to ``[0, n_in)``.

    Parameters
    ----------
    stride : int
        The positive multiplier ``a``.
    offsets : Iterable[int]
        The non-negative offsets ``B``. Must not be empty.

    For the other parameters, see ``SignatureFunction``.

    Examples
    --------
    >>> restriction = AffineSignature(2, [0, 1], n_in=8)
    >>> print(restriction.apply_set(IndexSet.from_elements([0, 2])))
    {[0,2),[4,6)}

    """

    kind = "affine"

    def __init__(self, stride: int, offsets: Iterable[int], n_in: int) -> None:
        """Init the recipe and validate its parameters."""
        super().__init__(n_in)
        self.stride = as_index(stride)
        self.offsets = frozenset(as_index(offset) for offset in offsets)
        if self.stride < 1:
            raise SignatureError(f"the stride must be positive (got {self.stride})")
        if not self.offsets:
            raise SignatureError("an affine recipe needs at least one offset")
        if min(self.offsets) < 0:
            raise SignatureError("the offsets of an affine recipe must not be negative")

    def _image_of_index(self, index: int) -> IndexSet:
        return IndexSet.from_elements(
            self.stride * index + offset
            for offset in self.offsets
            if self.stride * index + offset < self.n_in
        )

    def _image_of_set(self, indices: IndexSet) -> IndexSet:
        stride, n_in = self.stride, self.n_in
        offsets = sorted(self.offsets)

        # consecutive images overlap or touch: the image of an interval is an interval
        if offsets[-1] - offsets[0] + 1 == len(offsets) >= stride:
            return IndexSet(
                (stride * lo + offsets[0], min(stride * (hi - 1) + offsets[-1] + 1, n_in))
                for lo, hi in indices.intervals
            )

        images: List[int] = []
        for lo, hi in indices.intervals:
            for offset in offsets:
                # first ``i`` with ``stride * i + offset >= n_in``
                stop = min(hi, -(-(n_in - offset) // stride))
                if stop > lo:
                    images.extend(
                        range(stride * lo + offset, stride * (stop - 1) + offset + 1, stride)
                    )
        return IndexSet.from_elements(images)

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON descriptor of the recipe."""
        return {
            "kind": self.kind,
            "stride": self.stride,
            "offsets": sorted(self.offsets),
            "n_in": self.n_in,
        }


RowsInput = Mapping[int, Union[IndexSet, Iterable[int]]]


class SparseSignature(SignatureFunction):
    """A sparse pattern: ``σ(i) = rows[i]``, clipped to ``[0, n_in)``.

    Rows are only needed for the output indices that are actually computed. Asking for a missing
    row raises ``MissingRowError``.

    Parameters
    ----------
    rows : Mapping[int, Union[IndexSet, Iterable[int]]]
        For each output index, its input indices, as an ``IndexSet`` or explicit elements.

    For the other parameters, see ``SignatureFunction``.

    """

    kind = "sparse"

    def __init__(self, rows: RowsInput, n_in: int) -> None:
        """Init the pattern, converting each row to an ``IndexSet``."""
        super().__init__(n_in)
        self.rows: Dict[int, IndexSet] = {}
        for index, row in sorted(rows.items()):
            index = as_index(index)
            if index < 0:
                raise SignatureError(f"negative row index {index}")
            self.rows[index] = (
                row if isinstance(row, IndexSet) else IndexSet.from_elements(row)
            ).clip(0, n_in)

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence[int]]) -> "SparseSignature":
        """Create a pattern from a row-major 0/1 matrix.

        Row ``i`` of the matrix gives the inputs of the output ``i``: the columns holding a 1.

        Parameters
        ----------
        matrix : Sequence[Sequence[int]]
            The matrix, all rows having the same length, which is the input size.

        Returns
        -------
        SparseSignature
            The pattern, with one row per row of the matrix.

        Raises
        ------
        SignatureError
            If the rows have different lengths or if a cell is neither 0 nor 1.

        Examples
        --------
        >>> pattern = SparseSignature.from_dense([[1, 1, 0], [0, 1, 1]])
        >>> pattern.n_in
        3
        >>> print(pattern.apply_index(1))
        {[1,3)}

        """
        n_in = len(matrix[0]) if matrix else 0
        rows: Dict[int, List[int]] = {}
        for index, line in enumerate(matrix):
            if len(line) != n_in:
                raise SignatureError(
                    f"row {index} has {len(line)} columns instead of {n_in}"
                )
            if any(cell not in (0, 1) for cell in line):
                raise SignatureError(f"row {index} holds something else than 0 and 1")
            rows[index] = [column for column, cell in enumerate(line) if cell]
        return cls(rows, n_in)

    def _image_of_index(self, index: int) -> IndexSet:
        try:
            return self.rows[index]
        except KeyError:
            raise MissingRowError(index) from None

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON descriptor of the pattern, rows keyed by stringified index."""
        return {
            "kind": self.kind,
            "rows": {str(index): row.to_json() for index, row in self.rows.items()},
            "n_in": self.n_in,
        }


class TotalSignature(SignatureFunction):
    """Every output depends on every input: ``σ(i) = [0, n_in)``.

    For the parameters, see ``SignatureFunction``.

    Examples
    --------
    >>> print(TotalSignature(n_in=8).apply_index(3))
    {[0,8)}

    """

    kind = "total"

    def _image_of_index(self, index: int) -> IndexSet:
        return IndexSet.span(0, self.n_in)

    def _image_of_set(self, indices: IndexSet) -> IndexSet:
        return IndexSet.span(0, self.n_in)


def apply_index(s: SignatureFunction, i: int) -> IndexSet:
    """Return the dependency set of output index `i`. See ``SignatureFunction.apply_index``."""
    return s.apply_index(i)


def apply_set(s: SignatureFunction, indices: IndexSet) -> IndexSet:
    """Return the dependency set of a set of outputs. See ``SignatureFunction.apply_set``."""
    return s.apply_set(indices)


def apply_distribution(s: SignatureFunction, u: Distribution) -> Distribution:
    """Apply `s` to every set of `u`. See ``SignatureFunction.apply_distribution``."""
    return s.apply_distribution(u)
