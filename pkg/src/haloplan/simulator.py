"""Run a program, sequentially or as a simulated distributed execution.

``run_sequential`` is the reference: each output index is computed from the global input.

``run_distributed`` only uses what the message plans say: the input is scattered following its
distribution, then for each kernel every processor fills its input buffer from the messages it
receives (local copies included), computes its part of the output, and the output becomes the
input of the next kernel. At the end, each index is read from its owner of lowest rank.

Both use exact arithmetic, so ``verify`` can compare them exactly.

Examples
--------
>>> from haloplan.examples import heat_program
>>> from haloplan.simulator import run_distributed, run_sequential
>>> program = heat_program(12, 4)
>>> run_sequential(program, list(range(12)))
[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 12]
>>> values, trace = run_distributed(program, list(range(12)))
>>> values == run_sequential(program, list(range(12))), len(trace.messages())
(True, 6)

"""

from fractions import Fraction
import json
import logging
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .datatypes import Value, format_value, normalize_value
from .distribution import Distribution
from .exceptions import (
    DomainError,
    MissingRowError,
    ReplicaMismatchError,
    SenderConflictError,
    UncoverableKernelError,
    UnfilledSlotError,
)
from .indexset import IndexSet
from .kernel import (
    CommunicationStats,
    Kernel,
    Policy,
    communication_stats,
    get_default_policy,
    message_plan,
)
from .program import Program


__all__ = [
    "DataObject",
    "TraceEvent",
    "ExecutionTrace",
    "VerificationReport",
    "run_sequential",
    "run_distributed",
    "verify",
]


logger = logging.getLogger(__name__)


GlobalValues = List[Optional[Value]]


class DataObject:
    """A distributed object: for each processor, the values of the indices it owns.

    Parameters
    ----------
    name : str
        The name of the object.
    distribution : Distribution
        Which indices each processor owns.
    stores : Sequence[Dict[int, Value]]
        For each processor, the value of each index it owns.

    """

    def __init__(
        self, name: str, distribution: Distribution, stores: Sequence[Dict[int, Value]]
    ) -> None:
        """Init the object."""
        self.name = name
        self.distribution = distribution
        self.stores: Tuple[Dict[int, Value], ...] = tuple(stores)

    @classmethod
    def scatter(
        cls, name: str, distribution: Distribution, values: Sequence[Optional[Value]]
    ) -> "DataObject":
        """Create the object by giving each processor the values of the indices it owns.

        Parameters
        ----------
        name : str
            The name of the object.
        distribution : Distribution
            Which indices each processor owns.
        values : Sequence[Optional[Value]]
            The global values, one per index.

        Returns
        -------
        DataObject
            The distributed object.

        """
        return cls(
            name,
            distribution,
            [{index: values[index] for index in owned} for owned in distribution],  # type: ignore
        )

    @property
    def size(self) -> int:
        """Get the global size of the object."""
        return self.distribution.size

    def value(self, proc: int, index: int) -> Value:
        """Return the value of `index` held by `proc`."""
        return self.stores[proc][index]

    def check_replicas(self) -> None:
        """Check that all the copies of each index hold the same value.

        Raises
        ------
        ReplicaMismatchError
            If two processors hold different values for the same index.

        """
        if self.distribution.is_disjoint:
            return
        first_seen: Dict[int, Tuple[int, Value]] = {}
        for proc, store in enumerate(self.stores):
            for index, value in store.items():
                if index not in first_seen:
                    first_seen[index] = (proc, value)
                elif first_seen[index][1] != value:
                    raise ReplicaMismatchError(self.name, index, (first_seen[index][0], proc))

    def gather(self) -> GlobalValues:
        """Return the global values, each index being read from its owner of lowest rank.

        Returns
        -------
        GlobalValues
            One value per index, ``None`` for indices owned by no processor.

        """
        values: GlobalValues = [None] * self.size
        for store in reversed(self.stores):
            for index, value in store.items():
                values[index] = value
        return values

    def __repr__(self) -> str:
        """Return the representation of the object."""
        return f"<{self.__class__.__name__} {self.name}: {self.distribution!r}>"


class TraceEvent(NamedTuple):
    """A step of a distributed execution.

    Attributes
    ----------
    event : str
        ``"msg"`` for a message between two processors, ``"compute"`` for the local computation
        of a processor.
    kernel : str
        The name of the kernel.
    sender : int
        The processor sending the message, or computing.
    receiver : int
        The processor receiving the message, or computing.
    indices : IndexSet
        The indices sent, or computed.

    """

    event: str
    kernel: str
    sender: int
    receiver: int
    indices: IndexSet

    @property
    def count(self) -> int:
        """Get the number of values sent or computed."""
        return len(self.indices)

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON form of the event.

        Both kinds share the same keys. A computation goes ``from`` and ``to`` its processor, also
        given as ``proc``.
        """
        data: Dict[str, Any] = {
            "ev": self.event,
            "kernel": self.kernel,
            "from": self.sender,
            "to": self.receiver,
        }
        if self.event == "compute":
            data["proc"] = self.receiver
        data.update({"indices": self.indices.to_json(), "count": self.count})
        return data


class ExecutionTrace:
    """The ordered events of a distributed execution.

    For each kernel, the messages come first, by receiver then sender, then the computations, by
    processor. Local copies are not messages and do not appear.

    """

    def __init__(self, policy: Policy) -> None:
        """Init an empty trace for an execution with `policy`."""
        self.policy = policy
        self.events: List[TraceEvent] = []

    def add_message(self, kernel_name: str, sender: int, receiver: int, indices: IndexSet) -> None:
        """Record a message between two processors."""
        self.events.append(TraceEvent("msg", kernel_name, sender, receiver, indices))

    def add_compute(self, kernel_name: str, proc: int, indices: IndexSet) -> None:
        """Record the computation of `indices` by `proc`."""
        self.events.append(TraceEvent("compute", kernel_name, proc, proc, indices))

    def messages(self, kernel_name: Optional[str] = None) -> List[TraceEvent]:
        """Return the message events, of all kernels or only of `kernel_name`."""
        return [
            event
            for event in self.events
            if event.event == "msg" and kernel_name in (None, event.kernel)
        ]

    def computes(self, kernel_name: Optional[str] = None) -> List[TraceEvent]:
        """Return the compute events, of all kernels or only of `kernel_name`."""
        return [
            event
            for event in self.events
            if event.event == "compute" and kernel_name in (None, event.kernel)
        ]

    def cross_messages(self, kernel_name: Optional[str] = None) -> int:
        """Return the number of messages."""
        return len(self.messages(kernel_name))

    def cross_volume(self, kernel_name: Optional[str] = None) -> int:
        """Return the number of values carried by the messages."""
        return sum(event.count for event in self.messages(kernel_name))

    def to_json_lines(self) -> str:
        """Return the trace as JSON lines, one event per line.

        Returns
        -------
        str
            The JSON lines, each one ending with a newline.

        """
        return "".join(json.dumps(event.to_json()) + "\n" for event in self.events)

    def __iter__(self) -> Iterator[TraceEvent]:
        """Iterate on the events, in order."""
        return iter(self.events)

    def __len__(self) -> int:
        """Return the number of events."""
        return len(self.events)

    def __repr__(self) -> str:
        """Return the representation of the trace."""
        return (
            f"<{self.__class__.__name__} ({self.policy.value}): {len(self.events)} events, "
            f"{self.cross_messages()} messages>"
        )


def _prepare_input(prog: Program, values: Sequence[Value]) -> List[Value]:
    """Check the input values and normalize them.

    Raises
    ------
    DomainError
        If the number of values is not the size of the program input, or if a value is not
        an exact number.

    """
    size = prog.input_object.size
    if len(values) != size:
        raise DomainError(
            f"`{prog.input_object.name}` has {size} indices but {len(values)} values are given"
        )
    prepared = []
    for index, value in enumerate(values):
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise DomainError(f"value {value!r} at index {index} is not an exact number")
        prepared.append(normalize_value(value))
    return prepared


def _dependencies(k: Kernel, index: int) -> IndexSet:
    """Return the input indices needed by the output `index` of `k`."""
    try:
        return k.sigma.apply_index(index)
    except MissingRowError as exc:
        raise MissingRowError(exc.index, k.name) from None


def run_sequential(prog: Program, values: Sequence[Value]) -> GlobalValues:
    """Run `prog` on the global `values`, without any distribution.

    Each kernel computes every index owned by some processor of its output distribution, from
    the values of its dependencies in ascending index order.

    Parameters
    ----------
    prog : Program
        The program to run.
    values : Sequence[Value]
        The values of the program input, ``int`` or ``Fraction``.

    Returns
    -------
    GlobalValues
        The values of the program output, ``None`` for indices owned by no processor.

    Raises
    ------
    DomainError
        If `values` does not match the program input.
    UncoverableKernelError
        If an index needed by a kernel was not computed by the previous one.

    """
    current: GlobalValues = list(_prepare_input(prog, values))

    for k in prog.kernels:
        output: GlobalValues = [None] * k.gamma.size
        for index in k.gamma.global_span:
            operands = []
            for source in _dependencies(k, index):
                value = current[source]
                if value is None:
                    raise UncoverableKernelError(k.name, None, source)
                operands.append((source, value))
            output[index] = k.combiner(index, operands)
        logger.debug("sequential %s: %d values computed", k.name, len(k.gamma.global_span))
        current = output

    return current


def _run_kernel(
    k: Kernel, current: DataObject, policy: Policy, trace: ExecutionTrace
) -> DataObject:
    """Run one kernel from the distributed input `current` and return the distributed output."""
    plan = message_plan(k, policy)
    buffers: List[Dict[int, Value]] = [{} for _ in range(k.nprocs)]

    for message in plan.messages:
        if not message.local:
            trace.add_message(k.name, message.sender, message.receiver, message.indices)
        buffer = buffers[message.receiver]
        for index in message.indices:
            value = current.value(message.sender, index)
            if index in buffer and buffer[index] != value:
                raise SenderConflictError(k.name, message.receiver, index, (buffer[index], value))
            buffer[index] = value

    stores: List[Dict[int, Value]] = []
    for proc, (buffer, computed) in enumerate(zip(buffers, k.gamma)):
        for index in k.beta.lookup(proc):
            if index not in buffer:
                raise UnfilledSlotError(k.name, proc, index)
        store: Dict[int, Value] = {}
        for index in computed:
            operands = []
            for source in _dependencies(k, index):
                if source not in buffer:
                    raise UnfilledSlotError(k.name, proc, source)
                operands.append((source, buffer[source]))
            store[index] = k.combiner(index, operands)
        trace.add_compute(k.name, proc, computed)
        stores.append(store)

    output = DataObject(k.output_name, k.gamma, stores)
    output.check_replicas()
    logger.debug(
        "distributed %s: %d messages, %d values sent",
        k.name,
        trace.cross_messages(k.name),
        trace.cross_volume(k.name),
    )
    return output


def run_distributed(
    prog: Program, values: Sequence[Value], policy: Union[Policy, str, None] = None
) -> Tuple[GlobalValues, ExecutionTrace]:
    """Run `prog` as a distributed execution driven by the message plans.

    Parameters
    ----------
    prog : Program
        The program to run.
    values : Sequence[Value]
        The values of the program input, ``int`` or ``Fraction``.
    policy : Union[Policy, str, None]
        How senders are chosen. Default to ``None``, for the default policy.

    Returns
    -------
    Tuple[GlobalValues, ExecutionTrace]
        The values of the program output, each read from its owner of lowest rank (``None`` for
        indices owned by no processor), and the trace of the execution.

    Raises
    ------
    DomainError
        If `values` does not match the program input.
    UncoverableKernelError
        If an index needed by a processor is owned by no processor.
    UnfilledSlotError
        If a processor did not receive an index it needs.
    SenderConflictError
        If two senders delivered different values for the same index.
    ReplicaMismatchError
        If the copies of an index computed by several processors differ.

    """
    policy = get_default_policy() if policy is None else Policy(policy)
    prepared = _prepare_input(prog, values)
    first = prog.kernels[0]

    current = DataObject.scatter(first.input_name, first.alpha, prepared)
    current.check_replicas()
    trace = ExecutionTrace(policy)

    for k in prog.kernels:
        current = _run_kernel(k, current, policy, trace)

    return current.gather(), trace


class VerificationReport(NamedTuple):
    """The result of the comparison of a sequential and a distributed execution.

    Attributes
    ----------
    policy : Policy
        The policy of the distributed execution.
    equal : bool
        If both executions gave the same output.
    first_difference : Optional[int]
        The first index where the outputs differ, ``None`` if they are equal.
    replicas_agree : bool
        If the copies of replicated indices held the same values after each kernel.
    stats : Dict[str, CommunicationStats]
        The communication volume of each kernel.
    sequential : GlobalValues
        The output of the sequential execution.
    distributed : Optional[GlobalValues]
        The output of the distributed execution, ``None`` if replicas disagreed.
    trace : Optional[ExecutionTrace]
        The trace of the distributed execution, ``None`` if replicas disagreed.
    error : Optional[str]
        The message of the replica mismatch, if any.

    """

    policy: Policy
    equal: bool
    first_difference: Optional[int]
    replicas_agree: bool
    stats: Dict[str, CommunicationStats]
    sequential: GlobalValues
    distributed: Optional[GlobalValues]
    trace: Optional[ExecutionTrace]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:  # pylint: disable=invalid-name
        """Tell if the executions agree."""
        return self.equal and self.replicas_agree

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON form of the report, rational values written as text."""
        return {
            "policy": self.policy.value,
            "ok": self.ok,
            "equal": self.equal,
            "first_difference": self.first_difference,
            "replicas_agree": self.replicas_agree,
            "error": self.error,
            "stats": {name: stats.to_json() for name, stats in self.stats.items()},
            "values": _format_values(
                self.distributed if self.distributed is not None else self.sequential
            ),
        }


def _format_values(values: GlobalValues) -> List[Union[int, str, None]]:
    return [
        value if value is None or isinstance(value, int) else format_value(value)
        for value in values
    ]


def verify(
    prog: Program, values: Sequence[Value], policy: Union[Policy, str, None] = None
) -> VerificationReport:
    """Run `prog` both ways and compare the outputs.

    Parameters
    ----------
    prog : Program
        The program to run.
    values : Sequence[Value]
        The values of the program input.
    policy : Union[Policy, str, None]
        The policy of the distributed execution. Default to ``None``, for the default policy.

    Returns
    -------
    VerificationReport
        The comparison, with the communication volume of each kernel.

    """
    policy = get_default_policy() if policy is None else Policy(policy)
    sequential = run_sequential(prog, values)
    stats = {k.name: communication_stats(message_plan(k, policy)) for k in prog.kernels}

    try:
        distributed, trace = run_distributed(prog, values, policy)
    except ReplicaMismatchError as exc:
        logger.warning("%s", exc)
        return VerificationReport(
            policy, False, None, False, stats, sequential, None, None, exc.message
        )

    first_difference = next(
        (
            index
            for index, (expected, actual) in enumerate(zip(sequential, distributed))
            if expected != actual
        ),
        None,
    )
    if first_difference is None and len(sequential) != len(distributed):
        first_difference = min(len(sequential), len(distributed))
    equal = first_difference is None

    if equal:
        logger.info("%s: distributed execution matches (%s)", prog, policy.value)
    else:
        logger.warning(
            "%s: distributed execution differs at index %d (%s)",
            prog,
            first_difference,
            policy.value,
        )
    return VerificationReport(
        policy, equal, first_difference, True, stats, sequential, distributed, trace
    )
