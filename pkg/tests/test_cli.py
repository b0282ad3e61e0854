import json
import subprocess
import sys
from pathlib import Path

import pytest

from corel.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="d.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


# --- compose ---------------------------------------------------------------


def test_generators_compose_to_the_empty_partition(capsys):
    code, out, _ = run(capsys, "compose", str(SAMPLES / "frobenius_generators.json"))
    doc = json.loads(out)
    assert code == 0
    assert doc["kind"] == "corelation" and doc["blocks"] == [] and (doc["dom"], doc["cod"]) == (0, 0)


def test_identity_file(capsys):
    code, out, _ = run(capsys, "compose", str(SAMPLES / "identity.json"))
    assert code == 0 and json.loads(out)["blocks"] == [0, 1, 0, 1]


def test_scalar_chain_over_z(capsys):
    code, out, _ = run(capsys, "compose", str(SAMPLES / "scalar_chain_z.json"))
    assert code == 0 and json.loads(out)["matrix"] == [[2, 2]]


def test_span_composite_over_q(capsys):
    code, out, _ = run(capsys, "compose", str(SAMPLES / "span_composite_q.json"))
    doc = json.loads(out)
    assert code == 0 and doc["kind"] == "relation" and doc["basis"] == [[1, "1/6"]]


def test_engine_flag_overrides_header(capsys):
    code, out, _ = run(capsys, "compose", str(SAMPLES / "identity.json"), "--engine", "pf")
    assert code == 0 and json.loads(out)["engine"] == "pf"


def test_tensor_and_dagger_nodes(capsys, tmp_path):
    doc = {
        "engine": "finset",
        "expr": {"dagger": {"tensor": [{"id": 1}, {"cospan": {"left": {"dom": 2, "cod": 1, "table": [0, 0]}, "right": {"dom": 0, "cod": 1, "table": []}}}]}},
    }
    code, out, _ = run(capsys, "compose", write(tmp_path, doc))
    got = json.loads(out)
    assert code == 0 and (got["dom"], got["cod"]) == (1, 3)


def test_boundary_mismatch_is_a_type_error(capsys, tmp_path):
    doc = {"engine": "finset", "expr": {"seq": [{"id": 1}, {"id": 2}]}}
    code, _, err = run(capsys, "compose", write(tmp_path, doc))
    assert code == 3 and "type error" in err


def test_pi_outside_subcategory_is_a_type_error(capsys, tmp_path):
    leg = {"dom": 2, "cod": 1, "table": [0, 0]}
    doc = {"engine": "finset", "expr": {"pi": {"span": {"left": leg, "right": leg}}}}
    code, _, _ = run(capsys, "compose", write(tmp_path, doc), "--subcat", "M")
    assert code == 3


def test_mixed_kinds_are_a_type_error(capsys, tmp_path):
    leg = {"dom": 1, "cod": 1, "table": [0]}
    doc = {"engine": "finset", "expr": {"seq": [{"cospan": {"left": leg, "right": leg}}, {"span": {"left": leg, "right": leg}}]}}
    code, _, _ = run(capsys, "compose", write(tmp_path, doc))
    assert code == 3


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        json.dumps({"expr": {"id": 1}}),
        json.dumps({"engine": "finset"}),
        json.dumps({"engine": "nope", "expr": {"id": 1}}),
        json.dumps({"engine": "finset", "expr": {"frobnicate": 1}}),
        json.dumps({"engine": "finset", "expr": {"fwd": {"dom": 1, "cod": 1}}}),
        json.dumps({"ring": "Z", "expr": {"fwd": {"dom": 1, "cod": 1, "matrix": [["x"]]}}}),
    ],
)
def test_malformed_input_is_a_parse_error(capsys, tmp_path, text):
    code, _, err = run(capsys, "compose", write(tmp_path, text))
    assert code == 2 and err


def test_missing_file_is_a_parse_error(capsys, tmp_path):
    code, _, _ = run(capsys, "compose", str(tmp_path / "absent.json"))
    assert code == 2


# --- enumerate -------------------------------------------------------------


@pytest.mark.parametrize(
    "engine,kind,count",
    [("finset", "corel", 2), ("finset", "rel", 2), ("linfp:2", "rel", 5), ("linfp:2", "corel", 5), ("pf", "corel", 5)],
)
def test_enumerate_counts(capsys, engine, kind, count):
    code, out, _ = run(capsys, "enumerate", "--engine", engine, "--n", "1", "--m", "1", "--kind", kind)
    doc = json.loads(out)
    assert code == 0 and doc["count"] == count == len(doc["items"])


def test_enumerate_count_only_and_oversize_guard(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "2", "--m", "2", "--count-only")
    assert code == 0 and json.loads(out)["count"] == 15 and "items" not in json.loads(out)
    code, _, err = run(capsys, "enumerate", "--n", "3", "--m", "3", "--limit", "10")
    assert code == 2 and "limit" in err


def test_enumerate_rejects_infinite_engines(capsys):
    code, _, _ = run(capsys, "enumerate", "--engine", "linq", "--n", "1", "--m", "1")
    assert code == 2


# --- verify ----------------------------------------------------------------


def test_verify_non_example_is_expected_failure(capsys):
    code, out, _ = run(capsys, "verify", "assumption", "--engine", "finset", "--subcat", "F", "--json")
    doc = json.loads(out)
    (suite,) = doc["suites"]
    assert code == 0 and suite["status"] == "xfail"
    w = suite["failures"][0]["input"]
    assert (w["dom"], w["cod"], w["right"]["table"]) == (0, 2, [0, 0])


def test_verify_lattice_file(capsys):
    code, out, _ = run(capsys, "verify", "lattice", "--lattice", str(SAMPLES / "diamond.json"))
    assert code == 0 and out.startswith("#") and "PASS" in out


def test_verify_failing_suite_exits_one(capsys):
    # claiming the assumption for injections is a non-example would be an unexpected pass
    code, out, _ = run(capsys, "verify", "assumption", "--engine", "finset", "--subcat", "C", "--bound", "1")
    assert code == 1 and "XPASS" in out


def test_verify_usage_errors(capsys):
    assert run(capsys, "verify", "bogus")[0] == 2
    assert run(capsys, "verify", "all", "square")[0] == 2
    assert run(capsys, "verify", "square", "--engine", "q")[0] == 2
    assert run(capsys, "verify", "square", "--part", "pi")[0] == 2
    assert run(capsys, "verify", "square", "--seed", "-1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_verify_writes_artifacts(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", "scalars", "counts", "--bound", "1", "--out", str(tmp_path / "o"))
    assert code == 0
    names = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert names == ["failures.png", "report.json", "report.tsv", "report.txt", "summary.png"]


def test_timings_only_on_request(capsys):
    _, out, _ = run(capsys, "verify", "scalars", "--json")
    assert "elapsed" not in out
    _, out, _ = run(capsys, "verify", "scalars", "--json", "--timings")
    assert "elapsed" in out


def test_output_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "corel.cli", "verify", "functoriality", "--engine", "z", "--subcat", "M", "--part", "gamma", "--samples", "15", "--json"]
    first = subprocess.run(argv, capture_output=True)
    second = subprocess.run(argv, capture_output=True)
    assert first.returncode == 0 and first.stdout
    assert first.stdout == second.stdout
    enum = [sys.executable, "-m", "corel.cli", "enumerate", "--engine", "linfp:3", "--n", "1", "--m", "1", "--kind", "rel"]
    assert subprocess.run(enum, capture_output=True).stdout == subprocess.run(enum, capture_output=True).stdout
