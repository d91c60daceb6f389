import csv
import io
import json

import networkx as nx
import pytest

from inverse_mis.cli import EXIT_INVALID, EXIT_NOT_PROVEN, EXIT_OK, main
from inverse_mis.graph import Graph, build_inverse_graph, from_dimacs, to_dimacs
from inverse_mis.refutation import Certificate

TWOFOLD_EDGES = [(0, 1), (0, 5), (1, 5), (2, 3), (2, 6), (3, 6), (0, 2), (0, 4), (2, 4), (1, 3), (1, 4), (3, 4), (5, 6)]


@pytest.fixture
def run(capsys, caplog):
    """Run the CLI; returns (exit code, stdout, logged messages)."""

    def go(*argv):
        caplog.clear()
        code = main([str(a) for a in argv])
        out, _ = capsys.readouterr()
        return code, out, caplog.text

    return go


def rows_of(text):
    lines = text.splitlines()
    assert lines[0].startswith("#schema=")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_gen(run):
    code, out, _ = run("gen", 11)
    assert code == EXIT_OK
    assert from_dimacs(out) == build_inverse_graph(11)
    code, out, _ = run("gen", "--p", 3)
    assert code == EXIT_OK and "p edge 3 4" in out
    code, _, err = run("gen", 4)
    assert code == EXIT_INVALID and "prime" in err


def test_gen_json(run):
    code, out, _ = run("gen", 13, "--format", "json")
    assert code == EXIT_OK and json.loads(out)["p"] == 13


def test_census(run):
    code, out, _ = run("census", 11, 9)
    assert code == EXIT_OK
    rows = rows_of(out)
    assert len(rows) == 42 and rows[0]["sequence"] == "[++R]"
    code, out, _ = run("census", 11, "--max-len", 3)
    assert len(rows_of(out)) == 1
    code, out, _ = run("census", "--p", 61, "--cross-check")
    assert code == EXIT_OK
    code, _, err = run("census", "--p", 311, "--cross-check")
    assert code == EXIT_INVALID


def test_census_json(run):
    code, out, _ = run("census", 13, "--max-len", 5, "--format", "json")
    doc = json.loads(out)
    assert [r["sequence"] for r in doc] == ["[++R]", "[++++R]", "[++R+R]", "[++R-R]"]


def write_twofold(tmp_path):
    graph = tmp_path / "twofold.dimacs"
    graph.write_text(to_dimacs(Graph.from_edges(7, TWOFOLD_EDGES)))
    cert = Certificate(odd_cycles=[(0, 1, 5), (2, 3, 6), (0, 2, 4), (1, 3, 4)], chains=[(5, 6)], m=2)
    cert_path = tmp_path / "twofold.json"
    cert_path.write_text(cert.to_json())
    return graph, cert_path


def test_refute_valid(run, tmp_path):
    graph, cert = write_twofold(tmp_path)
    code, out, _ = run("refute", graph, cert)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["bound"] == 2 and doc["ratio"] == "5/2"


def test_refute_broken_cover(run, tmp_path):
    graph, _ = write_twofold(tmp_path)
    bad = tmp_path / "bad.json"
    bad.write_text(Certificate(odd_cycles=[(0, 1, 5)], singles=[2, 3, 4], m=1).to_json())
    code, out, err = run("refute", graph, bad)
    assert code == EXIT_INVALID and out == ""
    assert "vertex 6 covered 0 times" in err
    bad.write_text(Certificate(singles=[0, 1, 2, 3, 4, 5, 6, 6], m=1).to_json())
    code, _, err = run("refute", graph, bad)
    assert code == EXIT_INVALID and "vertex 6 covered 2 times" in err


def test_refute_search_and_formula(run):
    code, out, _ = run("refute", "--p", 13, "--search")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["valid"] and doc["bound"] >= 5
    code, out, _ = run("refute", "--bound-formula", 10007, 5)
    doc = json.loads(out)
    assert doc["ncc_lower_bound"] == "49576/11" and float(doc["ratio"]) > 0.45
    code, _, _ = run("refute", "--bound-formula", 2003, 5)
    assert code == EXIT_INVALID


def test_solve(run, tmp_path):
    code, out, _ = run("solve", "--p", 11, "--witness", "--naive")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["n_star"] == 4 and doc["proven"] and len(doc["witness"]) == 4
    code, out, _ = run("solve", "--p", 11, "--loop-policy", "ignore")
    assert json.loads(out)["n_star"] == 5
    path = tmp_path / "c6.dimacs"
    path.write_text(to_dimacs(Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])))
    code, out, _ = run("solve", path)
    assert json.loads(out)["n_star"] == 3


def test_solve_range_skips_composites(run):
    code, out, err = run("solve", "--range", "10..31", "--naive")
    assert code == EXIT_OK
    assert [r["p"] for r in rows_of(out)] == ["11", "13", "17", "19", "23", "29", "31"]
    assert "skipping composite 15" in err


def test_solve_not_proven(run, tmp_path):
    h = nx.gnp_random_graph(140, 0.05, seed=3)
    path = tmp_path / "hard.dimacs"
    path.write_text(to_dimacs(Graph.from_edges(140, h.edges())))
    code, out, _ = run("solve", path, "--budget-secs", 0)
    assert code == EXIT_NOT_PROVEN and json.loads(out)["proven"] is False


def test_spectral(run):
    code, out, _ = run("spectral", "--range", "100..110")
    rows = rows_of(out)
    assert code == EXIT_OK and [r["p"] for r in rows] == ["101", "103", "107", "109"]
    assert all(r["regular"] == "false" for r in rows)
    code, out, _ = run("spectral", 13, "--format", "json")
    assert json.loads(out)["p"] == 13


def test_sweep(run):
    code, out, _ = run("sweep", "--range", "11..20")
    rows = rows_of(out)
    assert code == EXIT_OK and [r["n_star"] for r in rows] == ["4", "5", "7", "8"]
    code, out, _ = run("sweep", "--range", "24..28")
    assert code == EXIT_OK and rows_of(out) == []
    assert out.splitlines()[1].startswith("p,N,n_star")


def test_usage_errors(run):
    with pytest.raises(SystemExit) as err:
        main(["census"])
    assert err.value.code == 2
    with pytest.raises(SystemExit):
        main(["solve", "--range", "nonsense"])
    assert run("solve")[0] == EXIT_INVALID


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "31"],
        ["census", "101", "9"],
        ["solve", "--range", "11..47"],
        ["spectral", "--range", "11..60"],
        ["sweep", "--range", "11..40"],
        ["refute", "--p", "13", "--search"],
    ],
)
def test_outputs_are_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--threads", "1", "--out", str(a)]) == EXIT_OK
    assert main(argv + ["--threads", "1", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_parallel_sweep_matches_serial(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["sweep", "--range", "11..60", "--threads", "1", "--out", str(a)])
    main(["sweep", "--range", "11..60", "--threads", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
