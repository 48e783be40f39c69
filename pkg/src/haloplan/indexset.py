"""Finite sets of non-negative global indices.

An ``IndexSet`` is stored in its canonical form: a tuple of half-open ``[lo, hi)`` intervals,
sorted, pairwise disjoint, non-adjacent and non-empty. Two sets are equal if and only if their
canonical forms are identical.

Values are immutable: all operations return new sets.

Examples
--------
>>> a = IndexSet.from_elements([5, 7, 6, 9])
>>> a
IndexSet([(5, 8), (9, 10)])
>>> print(a | IndexSet.span(0, 3))
{[0,3),[5,8),[9,10)}
>>> print(a - IndexSet.span(6, 7))
{[5,6),[7,8),[9,10)}
>>> len(a), 9 in a, 8 in a
(4, True, False)

"""

from bisect import bisect_right
from heapq import merge
from operator import index as as_index
from typing import Any, Iterable, Iterator, List, Optional, Sequence, Tuple

from .datatypes import INDEX_LIMIT
from .exceptions import DomainError, IndexOverflowError


__all__ = [
    "IndexSet",
    "make_from_elements",
    "union",
    "intersect",
    "difference",
    "is_superset",
    "elements",
]


Interval = Tuple[int, int]


def _check_lower(value: int) -> int:
    if value < 0:
        raise DomainError(f"negative index {value}")
    return value


def _check_upper(value: int) -> int:
    if value > INDEX_LIMIT:
        raise IndexOverflowError(value, INDEX_LIMIT)
    return value


def _coalesce(intervals: Iterable[Interval]) -> Tuple[Interval, ...]:
    """Merge intervals sorted by lower bound into their canonical form.

    Parameters
    ----------
    intervals : Iterable[Interval]
        Intervals sorted by lower bound. May be empty, overlapping or adjacent.

    Returns
    -------
    Tuple[Interval, ...]
        The canonical intervals.

    """
    result: List[List[int]] = []
    for lo, hi in intervals:
        if lo >= hi:
            continue
        if result and lo <= result[-1][1]:
            if hi > result[-1][1]:
                result[-1][1] = hi
        else:
            result.append([lo, hi])
    return tuple((lo, hi) for lo, hi in result)


class IndexSet:
    """A finite set of non-negative integers, as sorted disjoint half-open intervals.

    Parameters
    ----------
    intervals : Iterable[Sequence[int]]
        ``(lo, hi)`` pairs, in any order, possibly overlapping. Empty pairs are ignored.

    Raises
    ------
    DomainError
        If a lower bound is negative.
    IndexOverflowError
        If an upper bound is above ``INDEX_LIMIT``.

    """

    __slots__ = ("_intervals",)

    def __init__(self, intervals: Iterable[Sequence[int]] = ()) -> None:
        """Init the set by canonicalizing `intervals`."""
        pairs: List[Interval] = []
        for interval in intervals:
            lo, hi = (as_index(bound) for bound in interval)
            if lo >= hi:
                continue
            pairs.append((_check_lower(lo), _check_upper(hi)))
        self._intervals: Tuple[Interval, ...] = _coalesce(sorted(pairs))

    @classmethod
    def _from_canonical(cls, intervals: Iterable[Interval]) -> "IndexSet":
        """Create a set from intervals already in canonical form, without any check."""
        instance = object.__new__(cls)
        instance._intervals = tuple(intervals)
        return instance

    @classmethod
    def empty(cls) -> "IndexSet":
        """Return the empty set.

        Returns
        -------
        IndexSet
            A set without any element.

        """
        return cls._from_canonical(())

    @classmethod
    def span(cls, lo: int, hi: int) -> "IndexSet":
        """Return the set of all integers in ``[lo, hi)``.

        Parameters
        ----------
        lo : int
            The first element.
        hi : int
            The element after the last one.

        Returns
        -------
        IndexSet
            The contiguous set, empty if ``hi <= lo``.

        """
        return cls([(lo, hi)])

    @classmethod
    def from_elements(cls, elements: Iterable[int]) -> "IndexSet":
        """Create a set from explicit elements, in any order, duplicates allowed.

        Parameters
        ----------
        elements : Iterable[int]
            The elements of the set.

        Returns
        -------
        IndexSet
            The canonical set holding exactly the given elements.

        Raises
        ------
        DomainError
            If an element is negative.

        Examples
        --------
        >>> IndexSet.from_elements([2, 0, 1, 1])
        IndexSet([(0, 3)])
        >>> IndexSet.from_elements([])
        IndexSet([])

        """
        values = sorted({as_index(element) for element in elements})
        if not values:
            return cls.empty()
        _check_lower(values[0])
        _check_upper(values[-1] + 1)

        intervals: List[Interval] = []
        start = previous = values[0]
        for value in values[1:]:
            if value != previous + 1:
                intervals.append((start, previous + 1))
                start = value
            previous = value
        intervals.append((start, previous + 1))
        return cls._from_canonical(intervals)

    @classmethod
    def from_json(cls, data: Iterable[Sequence[int]]) -> "IndexSet":
        """Create a set from its JSON form, a list of ``[lo, hi]`` pairs.

        Parameters
        ----------
        data : Iterable[Sequence[int]]
            The pairs, ``hi`` being exclusive.

        Returns
        -------
        IndexSet
            The decoded set.

        """
        return cls(data)

    def to_json(self) -> List[List[int]]:
        """Return the JSON form of the set.

        Returns
        -------
        List[List[int]]
            The list of ``[lo, hi]`` pairs, ``hi`` being exclusive.

        """
        return [[lo, hi] for lo, hi in self._intervals]

    @property
    def intervals(self) -> Tuple[Interval, ...]:
        """Get the canonical intervals of the set."""
        return self._intervals

    @property
    def first(self) -> Optional[int]:
        """Get the smallest element, or ``None`` for the empty set."""
        return self._intervals[0][0] if self._intervals else None

    @property
    def last(self) -> Optional[int]:
        """Get the greatest element, or ``None`` for the empty set."""
        return self._intervals[-1][1] - 1 if self._intervals else None

    def __len__(self) -> int:
        """Return the cardinality of the set."""
        return sum(hi - lo for lo, hi in self._intervals)

    def __bool__(self) -> bool:
        """Tell if the set has at least one element."""
        return bool(self._intervals)

    def __iter__(self) -> Iterator[int]:
        """Iterate over the elements in ascending order."""
        for lo, hi in self._intervals:
            yield from range(lo, hi)

    def __contains__(self, value: Any) -> bool:
        """Tell if `value` is an element of the set."""
        if not isinstance(value, int):
            return False
        position = bisect_right(self._intervals, (value, INDEX_LIMIT + 1)) - 1
        return position >= 0 and value < self._intervals[position][1]

    def __eq__(self, other: Any) -> bool:
        """Compare canonical forms."""
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self) -> int:
        """Hash the canonical form."""
        return hash(self._intervals)

    def __repr__(self) -> str:
        """Return the representation of the set, with its canonical intervals."""
        return f"{self.__class__.__name__}({list(self._intervals)!r})"

    def __str__(self) -> str:
        """Return the set in the ``{[lo,hi),...}`` notation."""
        return "{" + ",".join(f"[{lo},{hi})" for lo, hi in self._intervals) + "}"

    def union(self, other: "IndexSet") -> "IndexSet":
        """Return the elements that are in this set or in `other`."""
        return self._from_canonical(_coalesce(merge(self._intervals, other._intervals)))

    def intersection(self, other: "IndexSet") -> "IndexSet":
        """Return the elements that are both in this set and in `other`."""
        left, right = self._intervals, other._intervals
        result: List[Interval] = []
        i = j = 0
        while i < len(left) and j < len(right):
            lo = max(left[i][0], right[j][0])
            hi = min(left[i][1], right[j][1])
            if lo < hi:
                result.append((lo, hi))
            if left[i][1] < right[j][1]:
                i += 1
            else:
                j += 1
        return self._from_canonical(_coalesce(result))

    def difference(self, other: "IndexSet") -> "IndexSet":
        """Return the elements of this set that are not in `other`."""
        removed = other._intervals
        result: List[Interval] = []
        j = 0
        for lo, hi in self._intervals:
            current = lo
            while j < len(removed) and removed[j][1] <= current:
                j += 1
            k = j
            while k < len(removed) and removed[k][0] < hi:
                removed_lo, removed_hi = removed[k]
                if removed_lo > current:
                    result.append((current, removed_lo))
                current = max(current, removed_hi)
                if current >= hi:
                    break
                k += 1
            if current < hi:
                result.append((current, hi))
        return self._from_canonical(result)

    def issuperset(self, other: "IndexSet") -> bool:
        """Tell if every element of `other` is in this set."""
        return not other.difference(self)

    def issubset(self, other: "IndexSet") -> bool:
        """Tell if every element of this set is in `other`."""
        return other.issuperset(self)

    def isdisjoint(self, other: "IndexSet") -> bool:
        """Tell if this set and `other` have no element in common."""
        return not self.intersection(other)

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __ge__ = issuperset
    __le__ = issubset

    def translate(self, offset: int) -> "IndexSet":
        """Shift every element by `offset`, dropping the ones that become negative.

        Parameters
        ----------
        offset : int
            The signed shift to apply.

        Returns
        -------
        IndexSet
            The shifted set.

        Raises
        ------
        IndexOverflowError
            If a shifted element is above the index space.

        Examples
        --------
        >>> print(IndexSet.span(0, 4).translate(-1))
        {[0,3)}

        """
        result: List[Interval] = []
        for lo, hi in self._intervals:
            hi = _check_upper(hi + offset)
            if hi <= 0:
                continue
            result.append((max(lo + offset, 0), hi))
        return self._from_canonical(result)

    def clip(self, lo: int, hi: int) -> "IndexSet":
        """Keep only the elements in ``[lo, hi)``.

        Parameters
        ----------
        lo : int
            The lowest element to keep.
        hi : int
            The element after the last one to keep.

        Returns
        -------
        IndexSet
            The clipped set.

        """
        return self.intersection(IndexSet.span(max(lo, 0), min(hi, INDEX_LIMIT)))


def make_from_elements(elems: Iterable[int]) -> IndexSet:
    """Create a canonical set from explicit elements. See ``IndexSet.from_elements``.

    Parameters
    ----------
    elems : Iterable[int]
        The elements, in any order, duplicates allowed.

    Returns
    -------
    IndexSet
        The canonical set.

    """
    return IndexSet.from_elements(elems)


def union(a: IndexSet, b: IndexSet) -> IndexSet:
    """Return ``a ∪ b``."""
    return a.union(b)


def intersect(a: IndexSet, b: IndexSet) -> IndexSet:
    """Return ``a ∩ b``."""
    return a.intersection(b)


def difference(a: IndexSet, b: IndexSet) -> IndexSet:
    """Return ``a \\ b``."""
    return a.difference(b)


def is_superset(a: IndexSet, b: IndexSet) -> bool:
    """Tell if every element of `b` is in `a` (``a ⊇ b``, reflexive)."""
    return a.issuperset(b)


def elements(a: IndexSet) -> List[int]:
    """Return the elements of `a` in ascending order."""
    return list(a)
