"""Ensure that the example builders and the shipped program files describe the same programs."""

from os import listdir, path

import pytest

from haloplan.examples import (
    FIXTURES_DIR,
    allreduce,
    allreduce_program,
    fixture_path,
    heat,
    heat_halo_program,
    heat_program,
    multigrid,
    prolongation_program,
    restriction_program,
)
from haloplan.loading import load_program, program_to_document
from haloplan.simulator import verify


@pytest.mark.parametrize(
    "name, builder",
    [
        ("heat12.json", heat_program),
        ("heat_halo.json", heat_halo_program),
        ("restrict.json", restriction_program),
        ("prolong.json", prolongation_program),
        ("allreduce.json", allreduce_program),
    ],
)
def test_fixture_matches_builder(name, builder):
    assert program_to_document(load_program(fixture_path(name))) == program_to_document(
        builder()
    )


def test_fixtures_dir():
    assert sorted(listdir(FIXTURES_DIR)) == [
        "allreduce.json",
        "heat12.json",
        "heat_halo.json",
        "prolong.json",
        "restrict.json",
    ]
    assert path.isfile(fixture_path("heat12.json"))


def test_heat():
    dot = heat.render_example()
    assert dot.startswith("digraph taskgraph {\n")
    assert "subgraph layer_2 {" in dot
    assert '"k2_p3" [label="heat2@p3"];' in dot
    assert dot.count("->") == 20


def test_multigrid():
    assert multigrid.render_example() == "restrict: local\nprolong: local"


def test_allreduce():
    assert allreduce.render_example() == "[10, 10, 10, 10] after 12 messages"


def test_all_examples_verify():
    for prog, size in [
        (heat_program(), 12),
        (heat_halo_program(12, 4), 12),
        (restriction_program(), 8),
        (prolongation_program(), 4),
        (allreduce_program(), 4),
    ]:
        assert verify(prog, list(range(size))).ok
