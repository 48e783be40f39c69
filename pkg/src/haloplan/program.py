"""Programs as chains of kernels, and the layered task graph they give rise to.

A task is a kernel on one processor. Each kernel gives one layer of tasks, and its message plan
gives the edges coming into this layer from the previous one: the task of kernel ``k`` on
processor ``q`` precedes the task of kernel ``k+1`` on processor ``p`` when ``q`` is a
predecessor of ``p`` for kernel ``k+1``. The input of the program is produced by a layer of
source tasks, one per processor owning a part of it.

Layer ``0`` holds the source tasks, layer ``k`` (``k >= 1``) the tasks of the ``k``-th kernel.
"""

import logging
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from .combiners import Combiner
from .distribution import Distribution
from .exceptions import InvariantError, ProgramError
from .indexset import IndexSet
from .internal.check_mode import checked
from .kernel import Kernel, Policy, message_plan
from .signature import SignatureFunction


__all__ = [
    "ObjectDeclaration",
    "Program",
    "Task",
    "Edge",
    "TaskGraph",
    "build_task_graph",
    "topological_layers",
    "critical_path_length",
    "to_dot",
]


logger = logging.getLogger(__name__)


class ObjectDeclaration(NamedTuple):
    """A named distributed object of a program."""

    name: str
    distribution: Distribution

    @property
    def size(self) -> int:
        """Get the global size of the object."""
        return self.distribution.size


class Program:
    """An ordered chain of kernels over named distributed objects.

    Objects are declared first, then kernels are added in execution order. The first kernel
    reads a program input, each following kernel reads the output of the kernel just before it.

    Examples
    --------
    >>> from haloplan.distribution import block_distribution
    >>> from haloplan.program import Program
    >>> from haloplan.signature import StencilSignature
    >>> program = Program()
    >>> program.add_object("x", block_distribution(12, 4))
    >>> program.add_object("y", block_distribution(12, 4))
    >>> kernel = program.add_kernel("heat", "x", "y", StencilSignature([-1, 0, 1], n_in=12))
    >>> program.input_object.name, program.output_object.name
    ('x', 'y')

    """

    def __init__(self) -> None:
        """Init an empty program."""
        self.objects: Dict[str, ObjectDeclaration] = {}
        self.kernels: List[Kernel] = []

    def add_object(self, name: str, distribution: Distribution) -> None:
        """Declare a distributed object.

        Parameters
        ----------
        name : str
            The name of the object, unique in the program.
        distribution : Distribution
            How the object is distributed. Its global size is the size of the object.

        Raises
        ------
        ProgramError
            If an object with the same name is already declared.

        """
        if name in self.objects:
            raise ProgramError(f"object `{name}` is declared twice")
        self.objects[name] = ObjectDeclaration(name, distribution)

    def add_kernel(  # pylint: disable=too-many-arguments
        self,
        name: str,
        input_name: str,
        output_name: str,
        sigma: SignatureFunction,
        combiner: Optional[Combiner] = None,
    ) -> Kernel:
        """Append a kernel reading `input_name` and computing `output_name`.

        Parameters
        ----------
        name : str
            The name of the kernel, unique in the program.
        input_name : str
            The object read by the kernel. Its distribution is the ``alpha`` of the kernel.
        output_name : str
            The object computed by the kernel. Its distribution is the ``gamma`` of the kernel.
        sigma : SignatureFunction
            The signature of the kernel.
        combiner : Optional[Combiner]
            The local function. Default to ``None``, for a sum.

        Returns
        -------
        Kernel
            The created kernel.

        Raises
        ------
        ProgramError
            If an object is not declared, if the input is not the output of the previous
            kernel (or a program input for the first one), or if the output is already
            defined.
        InvalidKernelError
            If the kernel itself is not valid.

        """
        if any(kernel.name == name for kernel in self.kernels):
            raise ProgramError(f"kernel `{name}` is defined twice")
        for object_name in (input_name, output_name):
            if object_name not in self.objects:
                raise ProgramError(f"<{name}> object `{object_name}` is not declared")
        if input_name == output_name:
            raise ProgramError(f"<{name}> reads and writes the same object `{input_name}`")

        produced = {kernel.output_name for kernel in self.kernels}
        if self.kernels:
            previous = self.kernels[-1]
            if input_name != previous.output_name:
                raise ProgramError(
                    f"<{name}> must read `{previous.output_name}`, the output of the previous "
                    f"kernel `{previous.name}`, not `{input_name}`"
                )
            if output_name in produced or output_name == self.kernels[0].input_name:
                raise ProgramError(f"<{name}> object `{output_name}` is already defined")

        kernel = Kernel(
            name,
            self.objects[input_name].distribution,
            self.objects[output_name].distribution,
            sigma,
            combiner,
            input_name=input_name,
            output_name=output_name,
        )
        self.kernels.append(kernel)
        return kernel

    def validate(self) -> None:
        """Check that the program has at least one kernel.

        Raises
        ------
        ProgramError
            If there is no kernel.

        """
        if not self.kernels:
            raise ProgramError("a program needs at least one kernel")

    @property
    def input_object(self) -> ObjectDeclaration:
        """Get the object read by the first kernel."""
        self.validate()
        return self.objects[self.kernels[0].input_name]

    @property
    def output_object(self) -> ObjectDeclaration:
        """Get the object computed by the last kernel."""
        self.validate()
        return self.objects[self.kernels[-1].output_name]

    def __repr__(self) -> str:
        """Return the representation of the program."""
        chain = " -> ".join(
            [self.kernels[0].input_name] + [kernel.output_name for kernel in self.kernels]
            if self.kernels
            else []
        )
        return f"<{self.__class__.__name__} {chain}>"


class Task(NamedTuple):
    """The part of a layer run by one processor."""

    layer: int
    proc: int

    @property
    def node_id(self) -> str:
        """Get the identifier of the task in outputs, like ``k1_p2``."""
        return f"k{self.layer}_p{self.proc}"


class Edge(NamedTuple):
    """A dependency between two tasks of adjacent layers, with the indices it carries."""

    producer: Task
    consumer: Task
    indices: IndexSet

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON form of the edge."""
        return {
            "from": self.producer.node_id,
            "to": self.consumer.node_id,
            "indices": self.indices.to_json(),
        }


class TaskGraph:
    """The layered dependency graph of a program.

    Parameters
    ----------
    layer_names : Sequence[str]
        The name of each layer: the program input for layer ``0``, then the kernel names.
    layers : Sequence[Sequence[Task]]
        The tasks of each layer, by ascending processor rank.
    edges : Iterable[Edge]
        The dependencies. Kept sorted by consumer then producer.

    Attributes
    ----------
    graph : nx.DiGraph
        The same graph as a ``networkx`` directed graph, nodes being the tasks and each edge
        having an ``indices`` attribute.

    """

    def __init__(
        self,
        layer_names: Sequence[str],
        layers: Sequence[Sequence[Task]],
        edges: Iterable[Edge],
    ) -> None:
        """Init the graph and its ``networkx`` view."""
        self.layer_names: Tuple[str, ...] = tuple(layer_names)
        self.layers: Tuple[Tuple[Task, ...], ...] = tuple(tuple(layer) for layer in layers)
        self.edges: Tuple[Edge, ...] = tuple(
            sorted(edges, key=lambda edge: (edge.consumer, edge.producer))
        )

        self.graph = nx.DiGraph()
        for layer in self.layers:
            for task in layer:
                self.graph.add_node(task, layer=task.layer, proc=task.proc)
        for edge in self.edges:
            self.graph.add_edge(edge.producer, edge.consumer, indices=edge.indices)

    @property
    def tasks(self) -> List[Task]:
        """Get all the tasks, layer by layer."""
        return [task for layer in self.layers for task in layer]

    def in_degree(self, task: Task) -> int:
        """Return the number of tasks `task` depends on."""
        return int(self.graph.in_degree(task))

    def edges_into(self, layer: int) -> List[Edge]:
        """Return the edges going to the tasks of `layer`."""
        return [edge for edge in self.edges if edge.consumer.layer == layer]

    def to_json(self) -> Dict[str, Any]:
        """Return the JSON form of the graph.

        Returns
        -------
        Dict[str, Any]
            A dict with ``layers`` (names), ``tasks`` (node ids, layer by layer) and ``edges``.

        """
        return {
            "layers": list(self.layer_names),
            "tasks": [task.node_id for task in self.tasks],
            "edges": [edge.to_json() for edge in self.edges],
        }

    def __repr__(self) -> str:
        """Return the representation of the graph."""
        return (
            f"<{self.__class__.__name__}: {len(self.layers)} layers, "
            f"{len(self.tasks)} tasks, {len(self.edges)} edges>"
        )


def _check_graph(graph: TaskGraph, prog: Program) -> None:
    """Check that the graph is acyclic, with edges between adjacent layers only.

    Raises
    ------
    InvariantError
        If one of the conditions does not hold.

    """
    for edge in graph.edges:
        if edge.consumer.layer != edge.producer.layer + 1:
            raise InvariantError(
                f"edge {edge.producer.node_id} -> {edge.consumer.node_id} skips a layer"
            )
    if not nx.is_directed_acyclic_graph(graph.graph):
        raise InvariantError("the task graph has a cycle")


@checked(_check_graph)
def build_task_graph(prog: Program) -> TaskGraph:
    """Build the task graph of `prog`, from the all-owners message plan of each kernel.

    Parameters
    ----------
    prog : Program
        The program.

    Returns
    -------
    TaskGraph
        Source tasks in layer ``0``, one per processor owning a part of the program input, then
        one layer per kernel with a task for every processor (even the ones computing nothing).
        An edge ``q@k-1 -> p@k`` carries ``alpha(q) ∩ beta(p)`` of kernel ``k``.

    Raises
    ------
    ProgramError
        If the program has no kernel.
    UncoverableKernelError
        If a kernel needs an index owned by no processor.

    """
    prog.validate()
    first = prog.kernels[0]

    layer_names = [first.input_name] + [kernel.name for kernel in prog.kernels]
    layers: List[List[Task]] = [
        [Task(0, proc) for proc, owned in enumerate(first.alpha) if owned]
    ]
    edges: List[Edge] = []

    for layer, kernel in enumerate(prog.kernels, start=1):
        layers.append([Task(layer, proc) for proc in range(kernel.nprocs)])
        plan = message_plan(kernel, Policy.ALL_OWNERS)
        edges.extend(
            Edge(Task(layer - 1, message.sender), Task(layer, message.receiver), message.indices)
            for message in plan.messages
        )

    graph = TaskGraph(layer_names, layers, edges)
    logger.debug("%r built", graph)
    return graph


def topological_layers(g: TaskGraph) -> List[List[Task]]:
    """Return the tasks in execution order: layer by layer, by ascending rank in a layer.

    Parameters
    ----------
    g : TaskGraph
        The graph.

    Returns
    -------
    List[List[Task]]
        One list of tasks per layer.

    """
    return [list(layer) for layer in g.layers]


def critical_path_length(g: TaskGraph) -> int:
    """Return the number of tasks on the longest path of the graph.

    Every task counts for one, edges count for nothing.

    Parameters
    ----------
    g : TaskGraph
        The graph.

    Returns
    -------
    int
        The length of the critical path, ``0`` for a graph without task.

    """
    if not g.graph.number_of_nodes():
        return 0
    return int(nx.dag_longest_path_length(g.graph)) + 1


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: TaskGraph) -> str:
    """Render the graph in the Graphviz DOT language.

    Tasks of a layer are on the same rank, edges are labelled with the indices they carry. The
    output only depends on the graph, so it's the same from one run to another.

    Parameters
    ----------
    g : TaskGraph
        The graph.

    Returns
    -------
    str
        The DOT source.

    """
    lines = ["digraph taskgraph {", "  rankdir=TB;", "  node [shape=box];"]
    for layer, tasks in enumerate(g.layers):
        lines.append(f"  subgraph layer_{layer} {{")
        lines.append("    rank=same;")
        for task in tasks:
            label = f"{g.layer_names[layer]}@p{task.proc}"
            lines.append(f"    {_dot_quote(task.node_id)} [label={_dot_quote(label)}];")
        lines.append("  }")
    for edge in g.edges:
        lines.append(
            f"  {_dot_quote(edge.producer.node_id)} -> {_dot_quote(edge.consumer.node_id)}"
            f" [label={_dot_quote(str(edge.indices))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
