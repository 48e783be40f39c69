"""Ensure that the main names can be imported from ``haloplan`` and work together."""

from haloplan import (
    IndexSet,
    Program,
    StencilSignature,
    WeightedCombiner,
    __version__,
    block_distribution,
    build_task_graph,
    exceptions,
    is_local,
    message_plan,
    override_check_mode,
    verify,
)


def test_heat_from_main_imports():
    program = Program()
    program.add_object("x", block_distribution(12, 4))
    program.add_object("y", block_distribution(12, 4))
    heat = program.add_kernel(
        "heat",
        "x",
        "y",
        StencilSignature([-1, 0, 1], n_in=12),
        WeightedCombiner({-1: -1, 0: 2, 1: -1}),
    )

    assert heat.beta.lookup(1) == IndexSet.span(2, 7)
    assert not is_local(heat)
    assert len(message_plan(heat).cross_messages) == 6
    assert len(build_task_graph(program).edges) == 10
    with override_check_mode(False):
        assert verify(program, list(range(12))).ok


def test_exceptions_and_version():
    assert issubclass(exceptions.ProgramFileError, exceptions.HaloPlanException)
    assert isinstance(__version__, str) and __version__
