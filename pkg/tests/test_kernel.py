"""Ensure that the halo, the predecessors and the messages of a kernel are derived correctly."""

from hypothesis import given, settings
import pytest

from haloplan.distribution import (
    block_distribution,
    cyclic_distribution,
    explicit_distribution,
    replicated_distribution,
)
from haloplan.exceptions import InvalidKernelError, MissingRowError, UncoverableKernelError
from haloplan.indexset import IndexSet
from haloplan.internal.check_mode import override_check_mode
from haloplan.kernel import (
    Kernel,
    MessagePlan,
    Policy,
    communication_stats,
    derive_beta,
    get_default_policy,
    is_local,
    message_plan,
    override_default_policy,
    predecessors,
)
from haloplan.signature import AffineSignature, SparseSignature, StencilSignature, TotalSignature

from .strategies import beta_oracle, kernels, predecessors_oracle


def heat_kernel(size=12, nprocs=4):
    blocks = block_distribution(size, nprocs)
    return Kernel("heat", blocks, blocks, StencilSignature([-1, 0, 1], n_in=size))


def cross_entries(plan):
    return {
        (message.sender, message.receiver): message.indices.to_json()
        for message in plan.cross_messages
    }


def test_heat_beta():
    beta = derive_beta(heat_kernel())
    assert [indices.to_json() for indices in beta] == [
        [[0, 4]],
        [[2, 7]],
        [[5, 10]],
        [[8, 12]],
    ]


def test_heat_is_not_local():
    kernel = heat_kernel()
    assert not is_local(kernel)
    assert [predecessors(kernel, proc) for proc in range(4)] == [
        [0, 1],
        [0, 1, 2],
        [1, 2, 3],
        [2, 3],
    ]


def test_identity_on_same_distribution_is_local():
    cyclic = cyclic_distribution(10, 3)
    kernel = Kernel("copy", cyclic, cyclic, StencilSignature([0], n_in=10))
    assert is_local(kernel)
    assert predecessors(kernel, 1) == [1]
    assert message_plan(kernel).cross_messages == []


def test_restriction_is_local():
    kernel = Kernel(
        "restrict",
        block_distribution(8, 2),
        block_distribution(4, 2),
        AffineSignature(2, [0, 1], n_in=8),
    )
    assert [indices.to_json() for indices in kernel.beta] == [[[0, 4]], [[4, 8]]]
    assert is_local(kernel)


def test_allreduce_needs_everything():
    kernel = Kernel(
        "allreduce",
        block_distribution(4, 4),
        replicated_distribution(4, 4),
        TotalSignature(n_in=4),
    )
    assert not is_local(kernel)
    assert all(predecessors(kernel, proc) == [0, 1, 2, 3] for proc in range(4))
    plan = message_plan(kernel, Policy.ALL_OWNERS)
    assert len(plan.messages) == 16
    assert len(plan.cross_messages) == 12


def test_heat_plan():
    plan = message_plan(heat_kernel(), Policy.ALL_OWNERS)
    assert cross_entries(plan) == {
        (1, 0): [[3, 4]],
        (0, 1): [[2, 3]],
        (2, 1): [[6, 7]],
        (1, 2): [[5, 6]],
        (3, 2): [[9, 10]],
        (2, 3): [[8, 9]],
    }
    # the local copies are kept, and flagged
    local = [message for message in plan.messages if message.local]
    assert [(message.sender, message.indices.to_json()) for message in local] == [
        (0, [[0, 3]]),
        (1, [[3, 6]]),
        (2, [[6, 9]]),
        (3, [[9, 12]]),
    ]
    # sorted by receiver, then sender
    assert [(message.receiver, message.sender) for message in plan.messages] == sorted(
        (message.receiver, message.sender) for message in plan.messages
    )


def test_heat_plan_is_the_same_with_both_policies():
    kernel = heat_kernel()
    assert cross_entries(message_plan(kernel, Policy.ALL_OWNERS)) == cross_entries(
        message_plan(kernel, Policy.LOWEST_OWNER)
    )


def test_lowest_owner_sends_once():
    # index 2 is owned by processors 0 and 1, processor 2 needs it
    alpha = explicit_distribution([IndexSet.span(0, 3), IndexSet.span(2, 4), IndexSet.empty()])
    gamma = explicit_distribution([IndexSet.empty(), IndexSet.empty(), IndexSet.span(2, 3)], 4)
    kernel = Kernel("pick", alpha, gamma, StencilSignature([0], n_in=4))

    all_owners = message_plan(kernel, Policy.ALL_OWNERS)
    assert cross_entries(all_owners) == {(0, 2): [[2, 3]], (1, 2): [[2, 3]]}

    lowest_owner = message_plan(kernel, Policy.LOWEST_OWNER)
    assert cross_entries(lowest_owner) == {(0, 2): [[2, 3]]}


def test_lowest_owner_prefers_a_local_copy():
    alpha = explicit_distribution([IndexSet.span(0, 4), IndexSet.span(2, 4)])
    gamma = explicit_distribution([IndexSet.empty(), IndexSet.span(2, 4)], 4)
    kernel = Kernel("pick", alpha, gamma, StencilSignature([0], n_in=4))
    plan = message_plan(kernel, Policy.LOWEST_OWNER)
    assert plan.cross_messages == []
    assert plan.senders(1) == [1]


def test_uncoverable_kernel():
    alpha = explicit_distribution([IndexSet.span(0, 2), IndexSet.span(4, 6)], 6)
    kernel = Kernel("holes", alpha, block_distribution(6, 2), StencilSignature([0], n_in=6))
    for policy in Policy:
        with pytest.raises(UncoverableKernelError) as raised:
            message_plan(kernel, policy)
        assert raised.value.kernel_name == "holes"
        assert raised.value.proc == 0
        assert raised.value.index == 2


def test_missing_row_names_the_kernel():
    blocks = block_distribution(4, 2)
    kernel = Kernel("sparse", blocks, blocks, SparseSignature({0: [0]}, n_in=4))
    with pytest.raises(MissingRowError) as raised:
        derive_beta(kernel)
    assert raised.value.kernel_name == "sparse"
    assert raised.value.index == 1


def test_invalid_kernels():
    with pytest.raises(InvalidKernelError):
        Kernel(
            "bad",
            block_distribution(4, 2),
            block_distribution(4, 3),
            StencilSignature([0], n_in=4),
        )
    with pytest.raises(InvalidKernelError):
        Kernel(
            "bad",
            block_distribution(4, 2),
            block_distribution(4, 2),
            StencilSignature([0], n_in=5),
        )


def test_empty_output_on_some_processors():
    kernel = Kernel(
        "sparse-output",
        block_distribution(8, 4),
        explicit_distribution(
            [IndexSet.span(0, 8), IndexSet.empty(), IndexSet.empty(), IndexSet.empty()], 8
        ),
        StencilSignature([0], n_in=8),
    )
    assert predecessors(kernel, 1) == []
    assert predecessors(kernel, 0) == [0, 1, 2, 3]
    assert message_plan(kernel).received_by(1) == []


def test_communication_stats():
    stats = communication_stats(message_plan(heat_kernel(), Policy.ALL_OWNERS))
    assert stats.cross_messages == 6
    assert stats.cross_volume == 6
    assert stats.max_halo == 2
    assert stats.to_json() == {"cross_messages": 6, "cross_volume": 6, "max_halo": 2}


def test_plan_json_round_trip():
    plan = message_plan(heat_kernel(), Policy.ALL_OWNERS)
    data = plan.to_json()
    assert data["kernel"] == "heat"
    assert data["policy"] == "all-owners"
    assert data["messages"][0] == {"from": 0, "to": 0, "indices": [[0, 3]], "local": True}
    assert MessagePlan.from_json(data).to_json() == data


def test_default_policy():
    kernel = heat_kernel()
    assert get_default_policy() is Policy.LOWEST_OWNER
    assert message_plan(kernel).policy is Policy.LOWEST_OWNER
    with override_default_policy(Policy.ALL_OWNERS):
        assert message_plan(kernel).policy is Policy.ALL_OWNERS
    assert message_plan(kernel, "all-owners").policy is Policy.ALL_OWNERS
    assert get_default_policy() is Policy.LOWEST_OWNER


@settings(max_examples=1000, deadline=None)
@given(kernels())
def test_beta_and_predecessors_match_brute_force(kernel):
    expected = beta_oracle(kernel)
    assert [set(indices) for indices in derive_beta(kernel)] == expected
    for proc in range(kernel.nprocs):
        assert predecessors(kernel, proc) == predecessors_oracle(kernel, expected[proc])


@settings(max_examples=300, deadline=None)
@given(kernels(covering=True))
def test_locality_three_ways(kernel):
    missing = [
        set(needed) - set(owned) for owned, needed in zip(kernel.alpha, beta_oracle(kernel))
    ]
    plan = message_plan(kernel, Policy.LOWEST_OWNER)
    assert is_local(kernel) == all(not indices for indices in missing)
    assert is_local(kernel) == (not plan.cross_messages)


@settings(max_examples=300, deadline=None)
@given(kernels(covering=True))
def test_plans_cover_the_needs(kernel):
    # run without the built-in checks to verify the plans independently
    with override_check_mode(False):
        for policy in Policy:
            plan = message_plan(kernel, policy)
            for proc in range(kernel.nprocs):
                received = set()
                for message in plan.received_by(proc):
                    assert set(message.indices) <= set(kernel.alpha.lookup(message.sender))
                    received |= set(message.indices)
                assert received == set(kernel.beta.lookup(proc))
            if policy is Policy.LOWEST_OWNER:
                # each needed index is received once
                for proc in range(kernel.nprocs):
                    counts = sum(len(message.indices) for message in plan.received_by(proc))
                    assert counts == len(kernel.beta.lookup(proc))
