import json
import shutil
import subprocess

import pytest

from turanforge.cli import SCHEMA, main
from turanforge.constructions import build_gq
from turanforge.graph import complete_bipartite, read_graph, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_construct_and_verify_roundtrip(tmp_path, capsys):
    path = tmp_path / "g5.g6"
    code, _, _ = run(capsys, "construct", "gq", "--q", "5", "--out", str(path))
    assert code == 0
    assert read_graph(str(path)) == build_gq(5).graph
    code, data = run_json(capsys, "verify", "--in", str(path), "--forbid", "triangle,k{2,3}")
    assert code == 0 and data["free"] is True and data["schema"] == SCHEMA
    assert data["counts"] == {"vertices": 75, "edges": 300, "triangles": 0}


def test_construct_edgelist_roundtrip(tmp_path, capsys):
    path = tmp_path / "pg.txt"
    assert run(capsys, "construct", "pg", "--q", "2", "--format", "edgelist",
               "--out", str(path))[0] == 0
    g = read_graph(str(path))
    assert g.n == 14 and g.m == 21


def test_construct_gqt_multipliers(tmp_path, capsys):
    ms = tmp_path / "ms.json"
    out = tmp_path / "g.g6"
    assert run(capsys, "construct", "gqt", "--q", "5", "--t", "2", "--multipliers-out", str(ms),
               "--out", str(out))[0] == 0
    again = tmp_path / "g2.g6"
    assert run(capsys, "construct", "gqt", "--q", "5", "--t", "2", "--multipliers", str(ms),
               "--out", str(again))[0] == 0
    assert out.read_bytes() == again.read_bytes()
    assert read_graph(str(out)).m == 6 * 25 * 4


def test_verify_reports_witness(tmp_path, capsys):
    path = tmp_path / "k33.g6"
    write_graph(complete_bipartite(3, 3), str(path))
    code, data = run_json(capsys, "verify", "--in", str(path), "--forbid", "c4")
    assert code == 0 and data["free"] is False and "witness" in data


def test_count(tmp_path, capsys):
    path = tmp_path / "k33.g6"
    write_graph(complete_bipartite(3, 3), str(path))
    code, data = run_json(capsys, "count", "--in", str(path))
    assert code == 0
    assert data["c4"] == 9 and data["girth"] == 4 and data["odd_girth"] is None


def test_turan_ex(capsys):
    code, data = run_json(capsys, "turan", "ex", "--n", "5", "--forbid", "c4")
    assert code == 0 and data["value"] == 6


def test_turan_budget_exit(capsys):
    code, out, _ = run(capsys, "turan", "ex", "--n", "9", "--forbid", "c4", "--budget", "5")
    assert code == 2
    assert json.loads(out)["exhaustive"] is False


def test_turan_missing_flag(capsys):
    assert run(capsys, "turan", "z", "--n", "3", "--forbid", "c4")[0] == 64


def test_turan_ratio_csv(capsys):
    code, out, _ = run(capsys, "turan", "ratio", "--n-max", "4")
    assert code == 0
    assert out.splitlines()[0].startswith("n,")


def test_usage_errors(capsys):
    assert run(capsys, "construct", "gq", "--q", "5", "--bogus")[0] == 64
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys)[0] == 64


def test_domain_error(capsys):
    code, _, err = run(capsys, "construct", "gq", "--q", "7")
    assert code == 1 and "q = 7" in err
    assert run(capsys, "analyze", "bound", "--which", "furedi", "--params", "m=5,n=4,s=2,t=3")[0] == 1


def test_analyze_bounds(capsys):
    code, data = run_json(capsys, "analyze", "bound", "--which", "ell0",
                          "--params", "alpha=5/3,beta=4/3")
    assert code == 0 and (data["ell0"], data["k0"], data["k0_kst_fast_path"]) == (2, 9, 5)
    _, data = run_json(capsys, "analyze", "bound", "--which", "c4", "--params", "m=3,n=3,e=9")
    assert data == {"applicable": True, "value": "9", "which": "c4", "schema": SCHEMA}
    _, data = run_json(capsys, "analyze", "bound", "--which", "f", "--params", "i=2,beta=3/2")
    assert data["value"] == "4/3"
    _, data = run_json(capsys, "analyze", "bound", "--which", "expansion",
                       "--params", "rhoX=1,rhoY=1,sizeY=100,n=100,s=2,t=3")
    assert data["value"] == pytest.approx(40)
    assert run(capsys, "analyze", "bound", "--which", "book", "--params", "m=3")[0] == 1


def test_analyze_graph_commands(tmp_path, capsys):
    path = tmp_path / "k1010.g6"
    write_graph(complete_bipartite(10, 10), str(path))
    code, data = run_json(capsys, "analyze", "tristab", "--in", str(path), "--gamma", "0.01")
    assert code == 0 and data["kind"] == "bipartition" and data["non_crossing"] == 0
    code, data = run_json(capsys, "analyze", "oddcycle", "--in", str(path), "--k", "5")
    assert code == 0 and data["found"] is False


def test_regularity(tmp_path, capsys):
    path = tmp_path / "k88.g6"
    write_graph(complete_bipartite(8, 8), str(path))
    code, data = run_json(capsys, "regularity", "--in", str(path), "--eps", "0.25", "--p", "1")
    assert code == 0
    assert {"partition", "pairs", "cluster_graph", "energy_trace"} <= set(data)


def test_report_theorem4(capsys):
    code, out, _ = run(capsys, "report", "theorem4", "--q", "5")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.split(",")[0:2] == ["t", "q"]
    assert row.split(",")[3] == "300"


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"n": 5, "forbid": "c4"}))
    code, data = run_json(capsys, "turan", "ex", "--config", str(conf))
    assert code == 0 and data["value"] == 6
    code, data = run_json(capsys, "turan", "ex", "--config", str(conf), "--n", "4")
    assert data["value"] == 4
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(capsys, "turan", "ex", "--config", str(bad))[0] == 64


def test_threads_do_not_change_output(tmp_path, capsys, monkeypatch):
    path = tmp_path / "g.g6"
    write_graph(build_gq(5).graph, str(path))
    outs = []
    for threads in ("1", "4"):
        o = tmp_path / f"z{threads}.json"
        assert main(["turan", "z", "--m", "5", "--n", "5", "--forbid", "c4",
                     "--threads", threads, "--out", str(o)]) == 0
        outs.append(o.read_bytes())
        r = tmp_path / f"r{threads}.json"
        main(["regularity", "--in", str(path), "--eps", "0.2", "--p", "auto:1.5",
              "--seed", "3", "--threads", threads, "--max-rounds", "2", "--out", str(r)])
        outs.append(r.read_bytes())
    assert outs[0] == outs[2] and outs[1] == outs[3]
    monkeypatch.setenv("TURANFORGE_THREADS", "4")
    o = tmp_path / "env.json"
    assert main(["turan", "z", "--m", "5", "--n", "5", "--forbid", "c4", "--out", str(o)]) == 0
    assert o.read_bytes() == outs[0]


@pytest.mark.skipif(shutil.which("turanforge") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["turanforge", "turan", "ex", "--n", "4", "--forbid", "triangle"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["value"] == 4
