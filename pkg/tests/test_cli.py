import json
import subprocess
import sys

import pytest

from hardsmith import checkpoint
from hardsmith.cli import config_hash, main
from hardsmith.graph import Graph, read_graph6, to_graph6
from hardsmith.hardness import evaluate_counter

SMALL = ["--n", "8", "--layer-dims", "4,16", "--lr", "0.01"]


@pytest.fixture(autouse=True)
def runs_root(tmp_path, monkeypatch):
    monkeypatch.setenv("HARDSMITH_RUNS_DIR", str(tmp_path / "runs"))
    return tmp_path / "runs"


def run(*argv):
    return main([str(a) for a in argv])


def train_dir(tmp_path, name, *extra):
    d = tmp_path / name
    assert run("train", "--solver", "dsatur3", *SMALL, "--pstar", "0.3", "--budget", "40",
               "--seed", "7", "--run-dir", d, *extra) == 0
    return d


def test_calibrate_writes_pstar(tmp_path, capsys):
    d = tmp_path / "cal"
    assert run("calibrate", "--solver", "edges", "--n", "10", "--grid", "0.1:0.5:0.1",
               "--samples", "3", "--run-dir", d) == 0
    assert float((d / "pstar.txt").read_text()) == 0.5
    assert capsys.readouterr().out.strip() == "0.5"
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["p_star"] == 0.5 and manifest["evaluations"] == 15
    assert (d / "calibration.csv").read_text().splitlines()[0] == "p,hardest"


def test_calibrate_dsatur_default_runs_dir(runs_root):
    assert run("calibrate", "--solver", "dsatur3", "--n", "30", "--grid", "0.05:0.3:0.05",
               "--samples", "5") == 0
    (d,) = runs_root.iterdir()
    assert 0.05 <= float((d / "pstar.txt").read_text()) <= 0.3


def test_missing_n_is_usage_error(tmp_path):
    assert run("calibrate", "--solver", "dsatur3", "--run-dir", tmp_path / "x") == 2
    assert run("train", "--solver", "dsatur3", "--run-dir", tmp_path / "y") == 2


def test_unknown_solver_is_usage_error():
    with pytest.raises(SystemExit) as info:
        run("calibrate", "--solver", "magic", "--n", "5")
    assert info.value.code == 2


def test_train_run_directory(tmp_path):
    d = train_dir(tmp_path, "t")
    names = {p.name for p in d.iterdir()}
    assert {"manifest.json", "config.ini", "log.csv", "final.ckpt", "best.g6", "best.json",
            "checkpoints"} <= names
    ckpts = sorted(p.name for p in (d / "checkpoints").iterdir())
    assert ckpts[0] == "iter_0000002.ckpt" and len(ckpts) == 19
    log = (d / "log.csv").read_text().splitlines()
    assert log[0] == "iteration,reward,transformed_reward,best_so_far,pool_min"
    assert len(log) == 41
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["status"] == "ok" and manifest["evaluations"] == 40
    meta = json.loads((d / "best.json").read_text())
    best = next(read_graph6(open(d / "best.g6")))
    assert evaluate_counter("dsatur3", best).value == meta["reward"]
    assert checkpoint.load(d / "final.ckpt").step == 40


def test_train_reproducible(tmp_path):
    a = train_dir(tmp_path, "a")
    b = train_dir(tmp_path, "b")
    assert (a / "log.csv").read_bytes() == (b / "log.csv").read_bytes()
    assert (a / "final.ckpt").read_bytes() == (b / "final.ckpt").read_bytes()
    for p in (a / "checkpoints").iterdir():
        assert p.read_bytes() == (b / "checkpoints" / p.name).read_bytes()


def test_manifest_and_config_reproduce_run(tmp_path):
    a = train_dir(tmp_path, "a")
    b = tmp_path / "b"
    assert run("train", "--config", a / "config.ini", "--run-dir", b) == 0
    assert (a / "log.csv").read_bytes() == (b / "log.csv").read_bytes()
    ha = json.loads((a / "manifest.json").read_text())["config_hash"]
    hb = json.loads((b / "manifest.json").read_text())["config_hash"]
    assert ha == hb


def test_budget_one(tmp_path):
    d = tmp_path / "one"
    assert run("train", "--solver", "vc_bb", *SMALL, "--budget", "1", "--run-dir", d) == 0
    assert len((d / "log.csv").read_text().splitlines()) == 2


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[evaluator]\nsolver = vc_bb\n\n[policy]\nn = 6\nlayer_dims = 4,8\n\n"
                   "[train]\nbudget = 9\nmode = vanilla\n")
    d = tmp_path / "r"
    assert run("train", "--config", cfg, "--budget", "3", "--run-dir", d) == 0
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["budget"] == 3 and manifest["mode"] == "vanilla" and manifest["n"] == 6
    assert manifest["evaluator"] == "counter:vc_bb"


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[train]\nbudgett = 9\n")
    assert run("train", "--config", cfg, "--n", "6", "--run-dir", tmp_path / "r") == 2
    assert run("train", "--config", tmp_path / "missing.ini", "--n", "6",
               "--run-dir", tmp_path / "r2") == 3


def test_config_hash_stable():
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_nonempty_run_dir_refused(tmp_path):
    d = tmp_path / "busy"
    d.mkdir()
    (d / "x").write_text("keep")
    assert run("train", "--solver", "vc_bb", *SMALL, "--budget", "2", "--run-dir", d) == 3
    assert [p.name for p in d.iterdir()] == ["x"]


def test_sample_and_count_zero(tmp_path):
    d = train_dir(tmp_path, "t")
    out = tmp_path / "s.g6"
    assert run("sample", "--checkpoint", d / "final.ckpt", "--count", "12", "--seed", "3",
               "--out", out) == 0
    graphs = list(read_graph6(open(out)))
    assert len(graphs) == 12 and all(g.n == 8 for g in graphs)
    empty = tmp_path / "e.g6"
    assert run("sample", "--checkpoint", d / "final.ckpt", "--count", "0", "--out", empty) == 0
    assert empty.read_text() == ""
    assert run("sample", "--checkpoint", tmp_path / "nope.ckpt", "--out", empty) == 3


def test_evaluate_k4(tmp_path, capsys):
    src = tmp_path / "k4.g6"
    src.write_text(to_graph6(Graph.complete(4)) + "\n")
    out = tmp_path / "k4.csv"
    assert run("evaluate", "--input", src, "--solver", "dsatur3", "--out", out) == 0
    header, row = out.read_text().splitlines()
    assert header == "index,graph6,n,edges,value,kind"
    expected = evaluate_counter("dsatur3", Graph.complete(4)).value
    assert row == f"0,C~,4,6,{expected!r},counter"


def test_evaluate_errors(tmp_path):
    bad = tmp_path / "bad.g6"
    bad.write_text("C~~~~\n")
    assert run("evaluate", "--input", bad, "--solver", "dsatur3") == 3
    assert run("evaluate", "--input", tmp_path / "missing.g6", "--solver", "dsatur3") == 3
    ok = tmp_path / "e.g6"
    ok.write_text(to_graph6(Graph.empty(4)) + "\n")
    assert run("evaluate", "--input", ok, "--external", f"{sys.executable} -c 'import sys; sys.exit(1)'") == 4


def test_evaluator_crash_keeps_partial_artifacts(tmp_path):
    d = tmp_path / "crash"
    assert run("train", *SMALL, "--budget", "5", "--external", "false", "--run-dir", d) == 4
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["status"].startswith("aborted")
    assert (d / "log.csv").read_text().splitlines() == [
        "iteration,reward,transformed_reward,best_so_far,pool_min"]
    assert (d / "final.ckpt").exists()


def test_compare_edge_count(tmp_path, capsys):
    d = tmp_path / "cmp"
    assert run("compare", "--solver", "edges", "--n", "8", "--budget", "500", "--pstar", "0.5",
               "--layer-dims", "4,16", "--lr", "0.05", "--seeds", "2", "--run-dir", d) == 0
    lines = (d / "results.csv").read_text().splitlines()
    assert lines[0] == "method,seed,best_hardness,seconds"
    means = {}
    for line in lines[1:]:
        method, seed, best, _ = line.split(",")
        if seed == "mean":
            means[method] = float(best)
    assert set(means) == {"hisampler-per", "hisampler-vanilla", "ga", "random", "cheeseman",
                          "hogg"}
    # the searches that adapt get close to K8's 28 edges; fixed-p random
    # baselines only see the upper tail of a binomial
    assert all(v >= 20 for v in means.values()), means
    assert means["hisampler-per"] >= 26 and means["ga"] >= 26, means
    table = (d / "results.txt").read_text().splitlines()
    assert len(table) == 7 and len({len(t) for t in table}) == 1


def test_compare_unknown_method(tmp_path):
    assert run("compare", "--solver", "edges", "--n", "8", "--methods", "annealing",
               "--run-dir", tmp_path / "c") == 2


def test_analyze_run_dir(tmp_path, capsys):
    d = train_dir(tmp_path, "t")
    out = tmp_path / "an"
    assert run("analyze", d, "--solver", "dsatur3", "--count", "40", "--max-edges", "3",
               "--run-dir", out) == 0
    summary = json.loads((out / "diversity_summary.json").read_text())
    assert 0 <= summary["mean_jaccard_all"] <= 1
    assert (out / "patterns.csv").read_text().startswith("graph6,num_vertices,num_edges,support")
    assert len(list(read_graph6(open(out / "samples.g6")))) == 40


def test_analyze_bare_checkpoint_needs_reference(tmp_path):
    d = train_dir(tmp_path, "t")
    assert run("analyze", d / "final.ckpt", "--solver", "dsatur3", "--count", "5",
               "--run-dir", tmp_path / "an") == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hardsmith", "evaluate", "--input", "-",
                           "--value-only", "--solver", "bk_clique"],
                          input="C~\nD??\n", capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.split() == [repr(float(evaluate_counter("bk_clique", g).value))
                                   for g in (Graph.complete(4), Graph.empty(5))]
    proc = subprocess.run([sys.executable, "-m", "hardsmith", "train"], capture_output=True)
    assert proc.returncode == 2
