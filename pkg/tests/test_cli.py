import csv
import json
import subprocess
import sys

import pytest

from quasihyper.cli import ExperimentConfig, build_parser, config_from_args, main
from quasihyper.hypercore import Hypergraph, read_hypergraph, write_hypergraph


def _report(path):
    return json.loads(path.read_text())


def test_sample_then_measure(tmp_path, capsys):
    h = tmp_path / "a.txt"
    g = tmp_path / "g.txt"
    assert main(["sample", "--kind", "A", "--n", "12", "--seed", "3", "--out", str(h), "--witness", str(g), "--quiet"]) == 0
    H = read_hypergraph(h)
    assert (H.n, H.k) == (12, 3)
    rep = tmp_path / "r.json"
    code = main(["measure", "--input", str(h), "--measure", "cd", "--l", "2", "--s", "3", "--graph", str(g), "--report", str(rep)])
    assert code == 0
    data = _report(rep)
    assert set(data) >= {"tool_version", "schema_version", "config", "results"}
    (res,) = data["results"]
    assert set(res) >= {"name", "value", "expected", "tolerance", "pass"}
    assert res["detail"]["hits"] == res["detail"]["total"]  # every zero-color triangle is an edge
    rows = list(csv.DictReader(rep.with_suffix(".csv").open()))
    assert rows[0]["name"] == "cd"
    capsys.readouterr()


def test_measure_disc_reports_exact_fraction(tmp_path, capsys):
    h = tmp_path / "h.txt"
    write_hypergraph(Hypergraph.from_edges(5, 3, [(0, 1, 2), (0, 1, 3), (0, 1, 4)]), h)
    assert main(["measure", "--input", str(h), "--measure", "disc", "--p", "3/10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"][0]["value"] == {"fraction": "6/5", "float": 1.2}
    assert main(["measure", "--input", str(h), "--measure", "disc", "--p", "3/10", "--max-defect", "1"]) == 1
    err = capsys.readouterr().err
    assert "failed: disc" in err


def test_measure_dev_semantics(tmp_path, capsys):
    h = tmp_path / "h.txt"
    write_hypergraph(Hypergraph.empty(5, 3), h)
    for sem in ("set", "tuple"):
        assert main(["measure", "--input", str(h), "--measure", "dev", "--l", "2", "--semantics", sem]) == 0
        assert json.loads(capsys.readouterr().out)["results"][0]["value"] == 5**5


def test_separate_reports_named_lemma(tmp_path, capsys):
    rep = tmp_path / "r.json"
    code = main(["separate", "--lemma", "B-fails-expand", "--n", "24", "--seed", "7", "--report", str(rep), "--quiet"])
    data = _report(rep)
    names = {r["name"]: r for r in data["results"]}
    assert any(n.endswith("e") for n in names)
    e_check = next(r for n, r in names.items() if n.endswith(".e"))
    assert e_check["value"] == 0 and e_check["pass"]
    assert code == (0 if all(r["pass"] for r in data["results"]) else 1)
    capsys.readouterr()


def test_separate_is_deterministic_and_seed_ordered(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["separate", "--lemma", "A-fails-CD", "--n", "20", "--seed", "4", "--seeds-count", "2", "--quiet"]
    main(args + ["--report", str(a)])
    main(args + ["--report", str(b)])
    ra, rb = _report(a), _report(b)
    assert ra["results"] == rb["results"]
    seeds = [r["name"].split("/")[0] for r in ra["results"]]
    assert seeds == sorted(seeds) and seeds[0] == "seed4"


def test_poset_dot(tmp_path, capsys):
    dot = tmp_path / "p.dot"
    js = tmp_path / "p.json"
    assert main(["poset", "--k", "6", "--dot", str(dot), "--json", str(js), "--quiet"]) == 0
    assert dot.read_text().startswith("digraph properties {")
    assert len(json.loads(js.read_text())["edges"]) == 29
    assert main(["poset", "--k", "3"]) == 0
    assert capsys.readouterr().out.startswith("digraph properties {")


def test_verify_small_suite(capsys):
    assert main(["verify", "--suite", "partite", "--n", "6", "--trials", "5", "--quiet"]) == 0
    assert main(["verify", "--suite", "appendix", "--n", "5", "--trials", "6", "--quiet"]) == 0


def test_census(capsys):
    assert main(["census", "--kind", "D", "--n", "9", "--quiet"]) == 0
    assert main(["census", "--kind", "B", "--n", "9", "--pi", "2,1", "--filter", "B1", "--quiet"]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--kind", "A", "--n", "10", "--l", "5", "--out", "x.txt"],
        ["sample", "--kind", "A", "--n", "10", "--p", "3/2", "--out", "x.txt"],
        ["census", "--kind", "D", "--n", "9", "--filter", "A"],
        ["measure", "--input", "/nonexistent/h.txt", "--measure", "disc"],
        ["poset", "--k", "2"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2
    capsys.readouterr()


def test_config_roundtrip(tmp_path):
    args = build_parser().parse_args(["poset", "--k", "4", "--dot", str(tmp_path / "x.dot")])
    cfg = config_from_args(args)
    assert isinstance(cfg, ExperimentConfig) and cfg.k == 4
    json.dumps(cfg.to_json())


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "quasihyper.cli", "poset", "--k", "3", "--quiet"], capture_output=True, text=True
    )
    assert out.returncode == 0
