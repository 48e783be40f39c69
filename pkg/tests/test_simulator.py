"""Ensure that the distributed execution, driven by the message plans, is the sequential one."""

from fractions import Fraction
import json

from hypothesis import given, settings, strategies as st
import pytest

from haloplan.combiners import Combiner
from haloplan.distribution import (
    block_distribution,
    explicit_distribution,
    replicated_distribution,
)
from haloplan.examples import (
    allreduce_program,
    heat_halo_program,
    heat_program,
    prolongation_program,
    restriction_program,
    two_step_heat_program,
)
from haloplan.exceptions import DomainError, ReplicaMismatchError, UncoverableKernelError
from haloplan.indexset import IndexSet
from haloplan.kernel import Policy, communication_stats, message_plan
from haloplan.program import Program
from haloplan.signature import StencilSignature, TotalSignature
from haloplan.simulator import DataObject, run_distributed, run_sequential, verify

from .strategies import input_values, programs, sequential_oracle


def test_heat_sequential():
    assert run_sequential(heat_program(4, 2), [0, 1, 2, 3]) == [-1, 0, 0, 4]


def test_heat_distributed():
    program = heat_program(12, 4)
    values, trace = run_distributed(program, list(range(12)))
    assert values == run_sequential(program, list(range(12)))
    messages = trace.messages()
    assert len(messages) == 6
    assert all(event.count == 1 for event in messages)


def test_identity_gives_the_input():
    program = Program()
    program.add_object("x", block_distribution(6, 3))
    program.add_object("y", block_distribution(6, 3))
    program.add_kernel("copy", "x", "y", StencilSignature([0], n_in=6))
    assert run_sequential(program, [5, 4, 3, 2, 1, 0]) == [5, 4, 3, 2, 1, 0]
    assert run_distributed(program, [5, 4, 3, 2, 1, 0])[0] == [5, 4, 3, 2, 1, 0]


def test_single_processor_sends_nothing():
    program = two_step_heat_program(10, 1)
    values, trace = run_distributed(program, list(range(10)))
    assert trace.messages() == []
    assert values == run_sequential(program, list(range(10)))


def test_allreduce():
    program = allreduce_program(4, 4)
    assert run_sequential(program, [1, 2, 3, 4]) == [10, 10, 10, 10]
    values, trace = run_distributed(program, [1, 2, 3, 4], Policy.ALL_OWNERS)
    assert values == [10, 10, 10, 10]
    assert trace.cross_messages() == 12


def test_multigrid():
    for program in (restriction_program(4, 2), prolongation_program(4, 2)):
        size = program.input_object.size
        values, trace = run_distributed(program, list(range(size)))
        assert values == run_sequential(program, list(range(size)))
        assert trace.cross_messages() == 0
    assert run_sequential(restriction_program(4, 2), list(range(8))) == [1, 5, 9, 13]
    assert run_sequential(prolongation_program(4, 2), [1, 2, 3, 4]) == [1, 1, 2, 2, 3, 3, 4, 4]


def test_halo_input_needs_no_message():
    program = heat_halo_program(12, 4, 1)
    values, trace = run_distributed(program, list(range(12)))
    assert trace.cross_messages() == 0
    assert values == run_sequential(heat_program(12, 4), list(range(12)))


def test_exact_rationals():
    program = heat_program(3, 2)
    values = [Fraction(1, 2), Fraction(1, 3), 1]
    assert run_distributed(program, values)[0] == run_sequential(program, values)
    assert run_sequential(program, values) == [Fraction(2, 3), Fraction(-5, 6), Fraction(5, 3)]


def test_uncomputed_outputs_are_none():
    program = Program()
    program.add_object("x", block_distribution(4, 2))
    program.add_object("y", explicit_distribution([IndexSet.span(0, 2), IndexSet.empty()], 4))
    program.add_kernel("half", "x", "y", StencilSignature([0], n_in=4))
    assert run_sequential(program, [1, 2, 3, 4]) == [1, 2, None, None]
    assert run_distributed(program, [1, 2, 3, 4])[0] == [1, 2, None, None]


def test_uncomputed_inputs_are_uncoverable():
    program = Program()
    program.add_object("x", block_distribution(4, 2))
    program.add_object("y", explicit_distribution([IndexSet.span(0, 2), IndexSet.empty()], 4))
    program.add_object("z", block_distribution(4, 2))
    program.add_kernel("half", "x", "y", StencilSignature([0], n_in=4))
    program.add_kernel("copy", "y", "z", StencilSignature([0], n_in=4))
    with pytest.raises(UncoverableKernelError) as raised:
        run_sequential(program, [1, 2, 3, 4])
    assert raised.value.kernel_name == "copy"
    assert raised.value.index == 2
    with pytest.raises(UncoverableKernelError) as raised:
        run_distributed(program, [1, 2, 3, 4])
    assert raised.value.proc == 1
    assert raised.value.index == 2


def test_input_length_is_checked():
    with pytest.raises(DomainError):
        run_sequential(heat_program(4, 2), [1, 2, 3])
    with pytest.raises(DomainError):
        run_distributed(heat_program(4, 2), [1, 2, 3, 4.5])


def test_trace_order_and_json_lines():
    _, trace = run_distributed(two_step_heat_program(6, 2), list(range(6)))
    assert [(event.event, event.kernel) for event in trace] == [
        ("msg", "heat1"),
        ("msg", "heat1"),
        ("compute", "heat1"),
        ("compute", "heat1"),
        ("msg", "heat2"),
        ("msg", "heat2"),
        ("compute", "heat2"),
        ("compute", "heat2"),
    ]
    lines = trace.to_json_lines().splitlines()
    assert json.loads(lines[0]) == {
        "ev": "msg",
        "kernel": "heat1",
        "from": 1,
        "to": 0,
        "indices": [[3, 4]],
        "count": 1,
    }
    assert json.loads(lines[2]) == {
        "ev": "compute",
        "kernel": "heat1",
        "from": 0,
        "to": 0,
        "proc": 0,
        "indices": [[0, 3]],
        "count": 3,
    }


def test_trace_is_deterministic():
    program = two_step_heat_program(20, 3)
    first = run_distributed(program, list(range(20)))[1].to_json_lines()
    second = run_distributed(program, list(range(20)))[1].to_json_lines()
    assert first == second


def test_replica_mismatch_is_detected():
    replicated = DataObject(
        "y", replicated_distribution(2, 2), [{0: 1, 1: 2}, {0: 1, 1: 3}]
    )
    with pytest.raises(ReplicaMismatchError) as raised:
        replicated.check_replicas()
    assert raised.value.index == 1
    assert raised.value.procs == (0, 1)


class Disagreeing(Combiner):
    """A combiner giving a value depending on the call count, to break replicas."""

    kind = "disagreeing"

    def __init__(self):
        self.calls = 0

    def __call__(self, index, operands):
        self.calls += 1
        return self.calls


def test_verify_reports_replica_mismatch():
    program = Program()
    program.add_object("x", block_distribution(2, 2))
    program.add_object("y", replicated_distribution(2, 2))
    program.add_kernel("broken", "x", "y", TotalSignature(n_in=2), Disagreeing())
    report = verify(program, [1, 2])
    assert not report.replicas_agree
    assert not report.ok
    assert report.distributed is None
    assert "differ" in report.error


def test_verify():
    program = heat_program(12, 4)
    report = verify(program, list(range(12)), Policy.ALL_OWNERS)
    assert report.ok
    assert report.first_difference is None
    assert report.stats["heat"] == communication_stats(
        message_plan(program.kernels[0], Policy.ALL_OWNERS)
    )
    data = report.to_json()
    assert data["ok"] is True
    assert data["policy"] == "all-owners"
    assert data["values"] == [-1] + [0] * 10 + [12]


def test_output_larger_than_input():
    program = Program()
    program.add_object("x", block_distribution(4, 2))
    program.add_object("y", block_distribution(6, 2))
    program.add_object("z", block_distribution(6, 2))
    program.add_kernel("grow", "x", "y", StencilSignature([0], n_in=4))
    program.add_kernel("shift", "y", "z", StencilSignature([0], n_in=6))
    # the indices of `y` beyond the input read nothing
    assert run_sequential(program, [1, 2, 3, 4]) == [1, 2, 3, 4, 0, 0]
    assert run_distributed(program, [1, 2, 3, 4])[0] == [1, 2, 3, 4, 0, 0]


@settings(max_examples=500, deadline=None)
@given(st.data())
def test_distributed_matches_sequential(data):
    program = data.draw(programs())
    values = data.draw(input_values(program.input_object.size))

    sequential = run_sequential(program, values)
    expected = sequential_oracle(program, values)
    computed = {index: value for index, value in enumerate(sequential) if value is not None}
    assert computed == expected

    for policy in Policy:
        distributed, trace = run_distributed(program, values, policy)
        assert distributed == sequential
        for kernel in program.kernels:
            stats = communication_stats(message_plan(kernel, policy))
            assert trace.cross_messages(kernel.name) == stats.cross_messages
            assert trace.cross_volume(kernel.name) == stats.cross_volume
