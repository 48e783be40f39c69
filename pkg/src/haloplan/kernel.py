"""Data parallel kernels, and what can be derived from them.

A kernel ``y = f(x)`` reads an input object ``x`` distributed by ``alpha``, and computes an output
object ``y`` distributed by ``gamma``: each output index ``i`` is computed by the combiner from
the input indices ``sigma(i)``.

From this description we derive:

- ``derive_beta``: for each processor ``p``, the input indices it needs, ``beta(p) =
  sigma(gamma(p))``. It's the halo region, and it may overlap between processors.
- ``is_local``: the kernel needs no communication when ``alpha(p) ⊇ beta(p)`` for every ``p``.
- ``predecessors``: processor ``q`` precedes ``p`` when ``alpha(q) ∩ beta(p)`` is not empty.
- ``message_plan``: what each processor sends to each other one.

Examples
--------
>>> from haloplan.distribution import block_distribution
>>> from haloplan.kernel import Kernel, Policy, is_local, message_plan, predecessors
>>> from haloplan.signature import StencilSignature
>>> blocks = block_distribution(12, 4)
>>> heat = Kernel("heat", blocks, blocks, StencilSignature([-1, 0, 1], n_in=12))
>>> print(heat.beta.lookup(1))
{[2,7)}
>>> is_local(heat), predecessors(heat, 1)
(False, [0, 1, 2])
>>> plan = message_plan(heat, Policy.ALL_OWNERS)
>>> [(m.sender, str(m.indices)) for m in plan.received_by(1)]
[(0, '{[2,3)}'), (1, '{[3,6)}'), (2, '{[6,7)}')]

"""

from contextlib import contextmanager
from enum import Enum
import logging
from typing import Any, Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple, Union

from .combiners import Combiner, SumCombiner
from .datatypes import ProcId
from .distribution import Distribution
from .exceptions import (
    InvalidKernelError,
    InvariantError,
    MissingRowError,
    UncoverableKernelError,
)
from .indexset import IndexSet
from .internal.check_mode import checked
from .signature import SignatureFunction


__all__ = [
    "Kernel",
    "Policy",
    "Message",
    "MessagePlan",
    "CommunicationStats",
    "derive_beta",
    "is_local",
    "predecessors",
    "message_plan",
    "communication_stats",
    "set_default_policy",
    "override_default_policy",
    "get_default_policy",
]


logger = logging.getLogger(__name__)


class Policy(Enum):
    """How senders are chosen when an index is owned by several processors.

    Attributes
    ----------
    ALL_OWNERS : str
        Every owner of a needed index sends it: ``M(q→p) = alpha(q) ∩ beta(p)``. It's the full
        dependency relation, used for task graphs.
    LOWEST_OWNER : str
        Each needed index is sent once, by the receiver itself when it owns it, else by its
        owner of lowest rank. It's the practical message schedule.

    """

    ALL_OWNERS = "all-owners"
    LOWEST_OWNER = "lowest-owner"


__DEFAULT_POLICY__ = Policy.LOWEST_OWNER


def set_default_policy(policy: Policy) -> None:
    """Change the policy used when none is given to ``message_plan``.

    Parameters
    ----------
    policy : Policy
        The policy to use by default.

    """
    global __DEFAULT_POLICY__  # pylint: disable=global-statement
    __DEFAULT_POLICY__ = policy


@contextmanager
def override_default_policy(  # pylint: disable=missing-yield-doc,missing-yield-type-doc
    policy: Policy,
) -> Iterator[None]:
    """Create a context manager to change the default policy in a ``with`` block.

    Parameters
    ----------
    policy : Policy
        The policy to use by default in the ``with`` block.

    Examples
    --------
    >>> get_default_policy().value
    'lowest-owner'
    >>> with override_default_policy(Policy.ALL_OWNERS):
    ...     print(get_default_policy().value)
    all-owners
    >>> get_default_policy().value
    'lowest-owner'

    """
    old_default_policy: Policy = __DEFAULT_POLICY__
    try:
        set_default_policy(policy=policy)
        yield
    finally:
        set_default_policy(policy=old_default_policy)


def get_default_policy() -> Policy:
    """Return the actual default policy.

    Returns
    -------
    Policy
        The policy used when none is given.

    """
    return __DEFAULT_POLICY__


class Kernel:
    """One data parallel operation ``y = f(x)`` between two distributed objects.

    Parameters
    ----------
    name : str
        The name of the kernel, used in messages and outputs.
    alpha : Distribution
        The distribution of the input object.
    gamma : Distribution
        The distribution of the output object.
    sigma : SignatureFunction
        The dependencies of each output index.
    combiner : Optional[Combiner]
        The local function. Default to ``None``, in which case a ``SumCombiner`` is used.
    input_name : str
        The name of the input object. Default to ``"x"``.
    output_name : str
        The name of the output object. Default to ``"y"``.

    Raises
    ------
    InvalidKernelError
        If `alpha` and `gamma` do not have the same number of processors, if the input space of
        `sigma` is not the global space of `alpha`, or if the combiner does not fit `sigma`.

    """

    def __init__(  # pylint: disable=too-many-arguments
        self,
        name: str,
        alpha: Distribution,
        gamma: Distribution,
        sigma: SignatureFunction,
        combiner: Optional[Combiner] = None,
        input_name: str = "x",
        output_name: str = "y",
    ) -> None:
        """Init the kernel and check its invariants."""
        self.name = name
        self.alpha = alpha
        self.gamma = gamma
        self.sigma = sigma
        self.combiner = SumCombiner() if combiner is None else combiner
        self.input_name = input_name
        self.output_name = output_name
        self._beta: Optional[Distribution] = None

        if alpha.nprocs != gamma.nprocs:
            raise InvalidKernelError(
                name,
                f"input and output are on {alpha.nprocs} and {gamma.nprocs} processors",
            )
        if sigma.domain_bound != alpha.size:
            raise InvalidKernelError(
                name,
                f"the signature reads [0, {sigma.domain_bound}) but the input has "
                f"{alpha.size} indices",
            )
        self.combiner.validate(name, sigma)

    @property
    def nprocs(self) -> int:
        """Get the number of processors."""
        return self.alpha.nprocs

    @property
    def beta(self) -> Distribution:
        """Get the distribution of the needed inputs. Computed once, see ``derive_beta``."""
        if self._beta is None:
            self._beta = derive_beta(self)
        return self._beta

    def __repr__(self) -> str:
        """Return the representation of the kernel."""
        return (
            f"<{self.__class__.__name__} {self.name}: {self.output_name} = "
            f"{self.combiner.kind}({self.sigma.kind} of {self.input_name})>"
        )


def derive_beta(k: Kernel) -> Distribution:
    """Derive the distribution of the inputs needed by each processor: ``sigma(gamma)``.

    Parameters
    ----------
    k : Kernel
        The kernel.

    Returns
    -------
    Distribution
        ``beta``, on the input space. It may be non-disjoint across processors.

    Raises
    ------
    MissingRowError
        If a sparse signature has no row for an output index of ``gamma``.

    """
    try:
        beta = k.sigma.apply_distribution(k.gamma)
    except MissingRowError as exc:
        raise MissingRowError(exc.index, k.name) from None
    logger.debug(
        "beta of %s: %s", k.name, ", ".join(str(needed) for needed in beta.per_proc)
    )
    return beta


def is_local(k: Kernel) -> bool:
    """Tell if every processor already owns all the inputs it needs.

    Parameters
    ----------
    k : Kernel
        The kernel.

    Returns
    -------
    bool
        ``True`` if ``alpha(p) ⊇ beta(p)`` for every processor ``p``.

    """
    return all(
        owned.issuperset(needed) for owned, needed in zip(k.alpha, k.beta)
    )


def predecessors(k: Kernel, p: int) -> List[ProcId]:
    """Return the processors owning some input needed by `p`.

    Parameters
    ----------
    k : Kernel
        The kernel.
    p : int
        The rank of the processor.

    Returns
    -------
    List[ProcId]
        The ranks ``q``, ascending, with ``alpha(q) ∩ beta(p)`` not empty. ``p`` itself is
        included when it owns some of its inputs.

    """
    needed = k.beta.lookup(p)
    return [q for q in k.alpha.procs() if not k.alpha.lookup(q).isdisjoint(needed)]


class Message(NamedTuple):
    """The indices a processor sends to another one (or copies for itself)."""

    sender: ProcId
    receiver: ProcId
    indices: IndexSet

    @property
    def local(self) -> bool:
        """Tell if the message is a local copy (sender and receiver are the same)."""
        return self.sender == self.receiver

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON form of the message."""
        return {
            "from": self.sender,
            "to": self.receiver,
            "indices": self.indices.to_json(),
            "local": self.local,
        }


class CommunicationStats(NamedTuple):
    """Volume of the communication of a message plan.

    Local copies are not counted.
    """

    cross_messages: int
    cross_volume: int
    max_halo: int

    def to_json(self) -> Dict[str, int]:
        """Return the JSON form of the statistics."""
        return dict(self._asdict())


class MessagePlan:
    """The messages to send for one kernel, with what each processor owns and needs.

    Parameters
    ----------
    kernel_name : str
        The name of the kernel.
    policy : Policy
        The policy used to choose the senders.
    alpha : Distribution
        What each processor owns.
    beta : Distribution
        What each processor needs.
    entries : Mapping[Tuple[int, int], IndexSet]
        The indices sent, keyed by ``(sender, receiver)``. Empty entries are dropped.

    """

    def __init__(  # pylint: disable=too-many-arguments
        self,
        kernel_name: str,
        policy: Policy,
        alpha: Distribution,
        beta: Distribution,
        entries: Mapping[Tuple[int, int], IndexSet],
    ) -> None:
        """Init the plan, keeping messages sorted by receiver, then sender."""
        self.kernel_name = kernel_name
        self.policy = policy
        self.alpha = alpha
        self.beta = beta
        self.messages: Tuple[Message, ...] = tuple(
            Message(ProcId(sender), ProcId(receiver), indices)
            for (sender, receiver), indices in sorted(
                entries.items(), key=lambda item: (item[0][1], item[0][0])
            )
            if indices
        )

    @property
    def nprocs(self) -> int:
        """Get the number of processors."""
        return self.alpha.nprocs

    @property
    def entries(self) -> Dict[Tuple[ProcId, ProcId], IndexSet]:
        """Get the indices sent, keyed by ``(sender, receiver)``."""
        return {(message.sender, message.receiver): message.indices for message in self.messages}

    @property
    def cross_messages(self) -> List[Message]:
        """Get the messages between two different processors."""
        return [message for message in self.messages if not message.local]

    def received_by(self, receiver: int) -> List[Message]:
        """Return the messages received by `receiver`, local copy included, by sender rank."""
        return [message for message in self.messages if message.receiver == receiver]

    def senders(self, receiver: int) -> List[ProcId]:
        """Return the ranks sending something to `receiver`, itself included."""
        return [message.sender for message in self.received_by(receiver)]

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON form of the plan.

        Returns
        -------
        Dict[str, Any]
            A dict with ``kernel``, ``policy``, ``nprocs``, ``owned`` and ``needed`` (one list
            of ``[lo, hi]`` pairs per processor), and ``messages``, sorted by receiver then
            sender.

        """
        return {
            "kernel": self.kernel_name,
            "policy": self.policy.value,
            "nprocs": self.nprocs,
            "owned": self.alpha.to_json()["sets"],
            "needed": self.beta.to_json()["sets"],
            "messages": [message.to_json() for message in self.messages],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "MessagePlan":
        """Create a plan from the output of ``to_json``.

        Parameters
        ----------
        data : Mapping[str, Any]
            The JSON form.

        Returns
        -------
        MessagePlan
            The decoded plan.

        """
        return cls(
            data["kernel"],
            Policy(data["policy"]),
            Distribution([IndexSet.from_json(pairs) for pairs in data["owned"]]),
            Distribution([IndexSet.from_json(pairs) for pairs in data["needed"]]),
            {
                (message["from"], message["to"]): IndexSet.from_json(message["indices"])
                for message in data["messages"]
            },
        )

    def __repr__(self) -> str:
        """Return the representation of the plan."""
        return (
            f"<{self.__class__.__name__} {self.kernel_name} ({self.policy.value}): "
            f"{len(self.messages)} messages>"
        )


def _check_plan(
    plan: MessagePlan, k: Kernel, policy: Union[Policy, str, None] = None
) -> None:
    """Check that every message is owned by its sender and needed by its receiver, and that
    the needs of every receiver are covered.

    Raises
    ------
    InvariantError
        If one of the conditions does not hold.

    """
    for message in plan.messages:
        if not k.alpha.lookup(message.sender).issuperset(message.indices):
            raise InvariantError(f"<{k.name}> {message} sends indices not owned by its sender")
        if not k.beta.lookup(message.receiver).issuperset(message.indices):
            raise InvariantError(f"<{k.name}> {message} sends indices not needed")
    for receiver in k.alpha.procs():
        received = IndexSet.empty()
        for message in plan.received_by(receiver):
            received = received | message.indices
        if received != k.beta.lookup(receiver):
            raise InvariantError(f"<{k.name}> the needs of processor {receiver} are not covered")


@checked(_check_plan)
def message_plan(k: Kernel, policy: Union[Policy, str, None] = None) -> MessagePlan:
    """Compute the messages needed to bring to each processor the inputs it needs.

    Parameters
    ----------
    k : Kernel
        The kernel.
    policy : Union[Policy, str, None]
        How to choose the senders, as a ``Policy`` or its value. Default to ``None``, in which
        case the default policy is used (see ``set_default_policy``).

    Returns
    -------
    MessagePlan
        The plan. Local copies ``M(p→p)`` are kept and flagged as local.

    Raises
    ------
    UncoverableKernelError
        If an index needed by a processor is owned by no processor.

    """
    policy = get_default_policy() if policy is None else Policy(policy)
    entries: Dict[Tuple[int, int], IndexSet] = {}

    for receiver in k.alpha.procs():
        needed = k.beta.lookup(receiver)
        if policy is Policy.ALL_OWNERS:
            missing = needed
            for sender in k.alpha.procs():
                owned = k.alpha.lookup(sender)
                entries[(sender, receiver)] = owned & needed
                missing = missing - owned
        else:
            entries[(receiver, receiver)] = needed & k.alpha.lookup(receiver)
            missing = needed - k.alpha.lookup(receiver)
            for sender in k.alpha.procs():
                if not missing:
                    break
                if sender == receiver:
                    continue
                sent = missing & k.alpha.lookup(sender)
                entries[(sender, receiver)] = sent
                missing = missing - sent

        if missing:
            raise UncoverableKernelError(k.name, receiver, missing.first)  # type: ignore

    plan = MessagePlan(k.name, policy, k.alpha, k.beta, entries)
    logger.debug(
        "plan of %s (%s): %d messages, %d between processors",
        k.name,
        policy.value,
        len(plan.messages),
        len(plan.cross_messages),
    )
    return plan


def communication_stats(plan: MessagePlan) -> CommunicationStats:
    """Compute the volume of the communication of `plan`.

    Parameters
    ----------
    plan : MessagePlan
        The plan.

    Returns
    -------
    CommunicationStats
        The number of messages between different processors, the total number of indices they
        carry, and the size of the biggest halo, ``|beta(p) \\ alpha(p)|`` over all ``p``.

    """
    cross = plan.cross_messages
    return CommunicationStats(
        cross_messages=len(cross),
        cross_volume=sum(len(message.indices) for message in cross),
        max_halo=max(
            (len(needed - owned) for owned, needed in zip(plan.alpha, plan.beta)), default=0
        ),
    )
