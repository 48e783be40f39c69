"""Ensure that the ``haloplan`` command prints the derivations and exits with the right code."""

import json

import pytest

from haloplan import __version__
from haloplan.examples import fixture_path
from haloplan.exceptions import UnfilledSlotError
from haloplan.internal.check_mode import in_check_mode
from haloplan.kernel import MessagePlan, Policy
from haloplan.scripts import cli
from haloplan.scripts.cli import ExitCode, main
from haloplan.simulator import VerificationReport


UNCOVERABLE_PROGRAM = {
    "objects": [
        {"name": "x", "N": 8, "distribution": {"kind": "explicit", "sets": [[[0, 4]], [[6, 8]]]}},
        {"name": "y", "N": 8, "distribution": {"kind": "block", "P": 2}},
    ],
    "kernels": [
        {
            "name": "smooth",
            "input": "x",
            "output": "y",
            "signature": {"kind": "stencil", "offsets": [-1, 0, 1]},
        }
    ],
}


def write_json(tmp_path, data, name="program.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_beta(capsys):
    code, out, _ = run(capsys, "beta", fixture_path("heat12.json"))
    assert code == ExitCode.OK
    assert json.loads(out) == {
        "kernels": [
            {
                "kernel": "heat",
                "input": "x",
                "needed": [[[0, 4]], [[2, 7]], [[5, 10]], [[8, 12]]],
            }
        ]
    }


def test_check_local(capsys):
    code, out, _ = run(capsys, "check-local", fixture_path("heat12.json"))
    assert code == ExitCode.NOT_LOCAL == 4
    assert out == "heat: non-local\n"

    code, out, _ = run(capsys, "check-local", fixture_path("restrict.json"))
    assert code == ExitCode.OK
    assert out == "restrict: local\n"


def test_messages_json(capsys):
    code, out, _ = run(
        capsys, "messages", fixture_path("allreduce.json"), "--policy", "all-owners"
    )
    assert code == ExitCode.OK
    data = json.loads(out)
    assert data["policy"] == "all-owners"
    (plan,) = data["plans"]
    assert len(plan["messages"]) == 16
    assert plan["stats"] == {"cross_messages": 12, "cross_volume": 12, "max_halo": 3}
    assert len(MessagePlan.from_json(plan).cross_messages) == 12


def test_messages_default_policy(capsys):
    code, out, _ = run(capsys, "messages", fixture_path("heat12.json"))
    assert code == ExitCode.OK
    (plan,) = json.loads(out)["plans"]
    assert plan["policy"] == "lowest-owner"
    assert plan["stats"] == {"cross_messages": 6, "cross_volume": 6, "max_halo": 2}


def test_messages_table(capsys):
    code, out, _ = run(capsys, "messages", fixture_path("heat12.json"), "--format", "table")
    assert code == ExitCode.OK
    lines = out.splitlines()
    assert lines[0] == "kernel heat (lowest-owner)"
    assert lines[1].split() == ["from", "to", "count", "indices"]
    assert lines[2].split() == ["1", "0", "1", "{[3,4)}"]
    assert lines[-1].split() == ["heat", "6", "6", "2"]


def test_dag(capsys):
    code, out, _ = run(capsys, "dag", fixture_path("heat12.json"))
    assert code == ExitCode.OK
    assert out.startswith("digraph taskgraph {\n")
    assert out.endswith("}\n")
    assert out.count("->") == 10

    code, again, _ = run(capsys, "dag", fixture_path("heat12.json"))
    assert again == out

    code, out, _ = run(capsys, "dag", fixture_path("heat12.json"), "--format", "json")
    assert code == ExitCode.OK
    data = json.loads(out)
    assert data["layers"] == ["x", "heat"]
    assert len(data["tasks"]) == 8
    assert len(data["edges"]) == 10


def test_simulate_default_input(capsys):
    code, out, _ = run(capsys, "simulate", fixture_path("heat12.json"))
    assert code == ExitCode.OK
    report = json.loads(out)
    assert report["ok"] is True
    assert report["values"] == [-1] + [0] * 10 + [12]
    assert report["stats"]["heat"]["cross_messages"] == 6


def test_simulate_with_input_and_trace(capsys, tmp_path):
    values = tmp_path / "values.txt"
    values.write_text("1 2\n3 4\n")
    trace = tmp_path / "trace.jsonl"

    code, out, _ = run(
        capsys,
        "simulate",
        fixture_path("allreduce.json"),
        "--input",
        str(values),
        "--trace",
        str(trace),
    )
    assert code == ExitCode.OK
    assert json.loads(out)["values"] == [10, 10, 10, 10]

    events = [json.loads(line) for line in trace.read_text().splitlines()]
    assert [event["ev"] for event in events] == ["msg"] * 12 + ["compute"] * 4
    assert all(event["kernel"] == "allreduce" for event in events)


def test_simulate_rationals(capsys, tmp_path):
    path = tmp_path / "values.txt"
    path.write_text("1/2 1/3 1/6 1")
    code, out, _ = run(capsys, "simulate", fixture_path("allreduce.json"), "--input", str(path))
    assert code == ExitCode.OK
    assert json.loads(out)["values"] == [2, 2, 2, 2]


def test_simulate_bad_values(capsys, tmp_path):
    path = tmp_path / "values.txt"
    path.write_text("1 2 three 4")
    code, _, err = run(capsys, "simulate", fixture_path("allreduce.json"), "--input", str(path))
    assert code == ExitCode.INVALID
    assert "three" in err


def test_simulate_wrong_number_of_values(capsys, tmp_path):
    path = tmp_path / "values.txt"
    path.write_text("1 2 3")
    code, _, _ = run(capsys, "simulate", fixture_path("allreduce.json"), "--input", str(path))
    assert code == ExitCode.INVALID


def test_simulation_failure(capsys, monkeypatch):
    def failing_verify(prog, values, policy=None):
        raise UnfilledSlotError("heat", 0, 3)

    monkeypatch.setattr(cli, "verify", failing_verify)
    code, _, err = run(capsys, "simulate", fixture_path("heat12.json"))
    assert code == ExitCode.MISMATCH == 3
    assert err.startswith("Simulation failed:")


def test_no_trace_after_replica_mismatch(capsys, caplog, monkeypatch, tmp_path):
    error = "copies of y[0] differ on processors 0 and 1"

    def mismatching_verify(prog, values, policy=None):
        return VerificationReport(
            Policy.LOWEST_OWNER, False, None, False, {}, list(values), None, None, error
        )

    monkeypatch.setattr(cli, "verify", mismatching_verify)
    trace = tmp_path / "trace.jsonl"
    code, out, err = run(capsys, "simulate", fixture_path("allreduce.json"), "--trace", str(trace))
    assert code == ExitCode.MISMATCH
    assert json.loads(out)["replicas_agree"] is False
    assert err.startswith(f"Mismatch: {error}")
    assert not trace.exists()
    assert f"no trace written to {trace}: {error}" in caplog.text


def test_messages_help_tells_where_the_statistics_are(capsys):
    with pytest.raises(SystemExit) as raised:
        main(["messages", "--help"])
    assert raised.value.code == 0
    out = capsys.readouterr().out
    assert "`stats`" in out
    assert "--format {json,table}" in out


def test_invalid_program(capsys, tmp_path):
    document = json.loads(json.dumps(UNCOVERABLE_PROGRAM))
    document["objects"][1]["distribution"]["P"] = 0
    code, _, err = run(capsys, "beta", write_json(tmp_path, document))
    assert code == ExitCode.INVALID == 1
    assert "objects[1].distribution.P" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "beta", str(tmp_path / "nothing.json"))
    assert code == ExitCode.INVALID
    assert err.startswith("Invalid program:")


def test_uncoverable_program(capsys, tmp_path):
    path = write_json(tmp_path, UNCOVERABLE_PROGRAM)
    for command in ("messages", "dag", "simulate"):
        code, _, err = run(capsys, command, path)
        assert code == ExitCode.UNCOVERABLE == 2
        assert err.startswith("Uncoverable kernel: <smooth> index 4")


def test_no_checks(capsys):
    code, _, _ = run(capsys, "--no-checks", "messages", fixture_path("heat12.json"))
    assert code == ExitCode.OK
    assert in_check_mode()


def test_version(capsys):
    with pytest.raises(SystemExit) as raised:
        main(["--version"])
    assert raised.value.code == 0
    assert capsys.readouterr().out.strip() == f"haloplan {__version__}"


def test_command_is_required(capsys):
    with pytest.raises(SystemExit) as raised:
        main([])
    assert raised.value.code == 2
