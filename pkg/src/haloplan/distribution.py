"""Mappings from processors to the sets of indices they own, and their standard constructors.

A distribution maps every processor ``p`` in ``{0..P-1}`` to an ``IndexSet``. Sets may be empty,
and may overlap: an index can belong to several processors (halo copies, replicated results of
collectives, redundant computation).

Examples
--------
>>> d = block_distribution(10, 4)
>>> [len(d.lookup(p)) for p in range(4)]
[2, 3, 2, 3]
>>> cyclic_distribution(10, 4).owners(6)
[2]
>>> replicated_distribution(4, 2).owners(3)
[0, 1]

"""

from functools import reduce
from operator import index as as_index
from typing import Any, Dict, Iterator, List, Optional, Sequence

from .datatypes import ProcId
from .exceptions import DomainError
from .indexset import IndexSet


__all__ = [
    "Distribution",
    "block_distribution",
    "cyclic_distribution",
    "replicated_distribution",
    "explicit_distribution",
    "halo_distribution",
    "lookup",
    "owners",
]


class Distribution:
    """A total map from processor ranks to index sets.

    Parameters
    ----------
    sets : Sequence[IndexSet]
        The set of each processor, the entry ``p`` being the set of processor ``p``.
    size : Optional[int]
        The size ``N`` of the global index space ``[0, N)``. Default to ``None``, in which
        case it's the smallest space holding every set.

    Raises
    ------
    DomainError
        If there is no processor, or if a set goes beyond `size`.

    """

    __slots__ = ("_sets", "_size", "_span")

    def __init__(self, sets: Sequence[IndexSet], size: Optional[int] = None) -> None:
        """Init the distribution and check its global space."""
        if not sets:
            raise DomainError("a distribution needs at least one processor")

        self._sets = tuple(sets)
        self._span = reduce(IndexSet.union, self._sets, IndexSet.empty())

        upper = 0 if self._span.last is None else self._span.last + 1
        if size is None:
            size = upper
        elif size < upper:
            raise DomainError(
                f"index {upper - 1} is outside of the global space of size {size}"
            )
        self._size = size

    @property
    def nprocs(self) -> int:
        """Get the number of processors ``P``."""
        return len(self._sets)

    @property
    def size(self) -> int:
        """Get the size ``N`` of the global index space ``[0, N)``."""
        return self._size

    @property
    def per_proc(self) -> Sequence[IndexSet]:
        """Get the sets of all processors, by rank."""
        return self._sets

    @property
    def global_span(self) -> IndexSet:
        """Get the union of the sets of all processors."""
        return self._span

    @property
    def is_disjoint(self) -> bool:
        """Tell if no index is owned by more than one processor."""
        return len(self._span) == sum(len(indices) for indices in self._sets)

    def procs(self) -> Iterator[ProcId]:
        """Iterate over the processor ranks, in ascending order."""
        return (ProcId(p) for p in range(len(self._sets)))

    def lookup(self, proc: int) -> IndexSet:
        """Return the set owned by processor `proc`.

        Parameters
        ----------
        proc : int
            The rank of the processor.

        Returns
        -------
        IndexSet
            The set owned by `proc`, possibly empty.

        Raises
        ------
        DomainError
            If `proc` is not in ``{0..P-1}``.

        """
        proc = as_index(proc)
        if not 0 <= proc < len(self._sets):
            raise DomainError(f"processor {proc} is not in [0, {len(self._sets)})")
        return self._sets[proc]

    __getitem__ = lookup

    def __iter__(self) -> Iterator[IndexSet]:
        """Iterate over the sets of all processors, by rank."""
        return iter(self._sets)

    def __len__(self) -> int:
        """Return the number of processors."""
        return len(self._sets)

    def owners(self, index: int) -> List[ProcId]:
        """Return the processors owning `index`, in ascending rank order.

        Parameters
        ----------
        index : int
            The global index to look for.

        Returns
        -------
        List[ProcId]
            The owners. May be empty, or have more than one entry.

        """
        return [ProcId(p) for p, indices in enumerate(self._sets) if index in indices]

    def __eq__(self, other: Any) -> bool:
        """Compare sets and global spaces."""
        if not isinstance(other, Distribution):
            return NotImplemented
        return self._size == other._size and self._sets == other._sets

    def __hash__(self) -> int:
        """Hash sets and global space."""
        return hash((self._size, self._sets))

    def __repr__(self) -> str:
        """Return the representation of the distribution."""
        sets = ", ".join(str(indices) for indices in self._sets)
        return f"{self.__class__.__name__}(size={self._size}, sets=[{sets}])"

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON form of the distribution.

        Returns
        -------
        Dict[str, Any]
            A dict with ``nprocs``, ``size`` and ``sets``, one list of ``[lo, hi]`` pairs
            per processor.

        """
        return {
            "nprocs": self.nprocs,
            "size": self._size,
            "sets": [indices.to_json() for indices in self._sets],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Distribution":
        """Create a distribution from the output of ``to_json``.

        Parameters
        ----------
        data : Dict[str, Any]
            The JSON form.

        Returns
        -------
        Distribution
            The decoded distribution.

        """
        return cls([IndexSet.from_json(pairs) for pairs in data["sets"]], data.get("size"))


def _check_sizes(size: int, nprocs: int) -> None:
    if size < 0:
        raise DomainError(f"the global size must not be negative (got {size})")
    if nprocs < 1:
        raise DomainError(f"the number of processors must be at least 1 (got {nprocs})")


def block_distribution(size: int, nprocs: int) -> Distribution:
    """Split ``[0, size)`` in contiguous balanced blocks.

    Processor ``p`` owns ``[floor(p*N/P), floor((p+1)*N/P))``, so the remainder of the division
    is spread on the later ranks.

    Parameters
    ----------
    size : int
        The global size ``N``.
    nprocs : int
        The number of processors ``P``.

    Returns
    -------
    Distribution
        Disjoint blocks covering ``[0, N)``.

    Raises
    ------
    DomainError
        If ``N < 0`` or ``P < 1``.

    Examples
    --------
    >>> print(block_distribution(12, 4).lookup(1))
    {[3,6)}

    """
    _check_sizes(size, nprocs)
    return Distribution(
        [
            IndexSet.span(p * size // nprocs, (p + 1) * size // nprocs)
            for p in range(nprocs)
        ],
        size,
    )


def cyclic_distribution(size: int, nprocs: int) -> Distribution:
    """Deal the indices of ``[0, size)`` to the processors in a round-robin way.

    Processor ``p`` owns every ``i`` with ``i mod P == p``.

    Parameters
    ----------
    size : int
        The global size ``N``.
    nprocs : int
        The number of processors ``P``.

    Returns
    -------
    Distribution
        Disjoint sets covering ``[0, N)``.

    """
    _check_sizes(size, nprocs)
    return Distribution(
        [IndexSet.from_elements(range(p, size, nprocs)) for p in range(nprocs)], size
    )


def replicated_distribution(size: int, nprocs: int) -> Distribution:
    """Give the whole ``[0, size)`` to every processor.

    This is how the result of a rootless collective is owned: each processor owns the same
    items.

    Parameters
    ----------
    size : int
        The global size ``N``.
    nprocs : int
        The number of processors ``P``.

    Returns
    -------
    Distribution
        ``P`` copies of ``[0, N)``.

    """
    _check_sizes(size, nprocs)
    return Distribution([IndexSet.span(0, size)] * nprocs, size)


def explicit_distribution(
    sets: Sequence[IndexSet], size: Optional[int] = None
) -> Distribution:
    """Create a distribution from arbitrary, possibly overlapping, sets.

    Parameters
    ----------
    sets : Sequence[IndexSet]
        The set of each processor, taken verbatim.
    size : Optional[int]
        The global size. Default to the smallest space holding every set.

    Returns
    -------
    Distribution
        The distribution with ``P = len(sets)``.

    """
    return Distribution(sets, size)


def halo_distribution(size: int, nprocs: int, width: int) -> Distribution:
    """Create balanced blocks, each widened by `width` indices on both sides.

    The widened parts overlap the neighbouring blocks: they are the halo copies gathered on a
    processor for local operations.

    Parameters
    ----------
    size : int
        The global size ``N``.
    nprocs : int
        The number of processors ``P``.
    width : int
        The number of indices added on each side of a block, clipped to ``[0, N)``.

    Returns
    -------
    Distribution
        Overlapping sets covering ``[0, N)``.

    Raises
    ------
    DomainError
        If `width` is negative.

    Examples
    --------
    >>> print(halo_distribution(12, 4, 1).lookup(1))
    {[2,7)}

    """
    if width < 0:
        raise DomainError(f"the halo width must not be negative (got {width})")
    sets: List[IndexSet] = []
    for block in block_distribution(size, nprocs):
        if block.first is None or block.last is None:
            sets.append(block)
            continue
        sets.append(
            IndexSet.span(max(block.first - width, 0), min(block.last + 1 + width, size))
        )
    return Distribution(sets, size)


def lookup(d: Distribution, p: int) -> IndexSet:
    """Return the set owned by processor `p` in `d`. See ``Distribution.lookup``."""
    return d.lookup(p)


def owners(d: Distribution, i: int) -> List[ProcId]:
    """Return the processors owning index `i` in `d`. See ``Distribution.owners``."""
    return d.owners(i)
