import json

import pytest

from ibmap.cli import main


def _files(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    argv = ["generate", "--n", "6", "--tau", "1", "--num-graphs", "2", "--N-list", "100,300",
            "--seed", "3", "--burn-in", "100", "--thin", "2", "--out", str(out)]
    assert main(argv) == 0
    return out, argv


def test_generate_layout_and_rerun_identical(generated, tmp_path):
    out, argv = generated
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["N_list"] == [100, 300] and len(manifest["graphs"]) == 2
    assert (out / "graph_001" / "data_N300.csv").exists()
    again = tmp_path / "again"
    assert main(argv[:-1] + [str(again)]) == 0
    assert _files(out) == _files(again)


def test_generate_minimal(tmp_path):
    assert main(["generate", "--n", "2", "--tau", "1", "--num-graphs", "1", "--N-list", "10",
                 "--burn-in", "10", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "graph_000" / "structure.txt").read_text() == "2\n0 1\n"


def _learn(tmp_path, generated, algorithm, name, *extra):
    out, _ = generated
    dest = tmp_path / name
    rc = main(["learn", "--algorithm", algorithm, "--data", str(out / "graph_000" / "data_N300.csv"),
               "--out", str(dest), *extra])
    return rc, dest


@pytest.mark.parametrize("algorithm", ["gsmn", "ibmap-hc", "ibmap-ts"])
def test_learn_rerun_identical(tmp_path, generated, algorithm):
    rc, a = _learn(tmp_path, generated, algorithm, "a", "--subsample", "0.5", "--seed", "1")
    assert rc == 0
    rc, b = _learn(tmp_path, generated, algorithm, "b", "--subsample", "0.5", "--seed", "1")
    assert rc == 0
    ra, rb = (json.loads((d / "report.json").read_text()) for d in (a, b))
    ra.pop("wall_time"), rb.pop("wall_time")
    ra["extra"].pop("manifest"), rb["extra"].pop("manifest")
    assert ra == rb
    assert (a / "structure.txt").read_text() == (b / "structure.txt").read_text()
    if algorithm == "ibmap-hc":
        assert isinstance(ra["ascents"], int)


def test_learn_oracle_and_ts_refusal(tmp_path, generated, capsys):
    out, _ = generated
    truth = out / "graph_000" / "structure.txt"
    assert main(["learn", "--algorithm", "gsmn", "--test", "oracle", "--truth", str(truth),
                 "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "structure.txt").read_text() == truth.read_text()
    assert main(["learn", "--algorithm", "gsmn", "--test", "oracle", "--out", str(tmp_path / "x")]) == 2
    big = tmp_path / "big.txt"
    big.write_text("15\n0 1\n")
    assert main(["learn", "--algorithm", "ibmap-ts", "--test", "oracle", "--truth", str(big),
                 "--out", str(tmp_path / "t")]) == 2
    assert "exponential" in capsys.readouterr().err


def test_evaluate(tmp_path, generated, capsys):
    out, _ = generated
    truth = str(out / "graph_000" / "structure.txt")
    data = str(out / "graph_000" / "data_N300.csv")
    rc, learned = _learn(tmp_path, generated, "gsmn", "g")
    learned = str(learned / "structure.txt")
    capsys.readouterr()
    assert main(["evaluate", "--learned", learned, "--metric", "he", "--truth", truth]) == 0
    assert isinstance(json.loads(capsys.readouterr().out)["H_E"], int)
    for metric, ref in (("hi-structure", ["--truth", truth]), ("hi-data", ["--data", data])):
        runs = []
        for _ in range(2):
            assert main(["evaluate", "--learned", learned, "--metric", metric, "--triplets", "200", *ref]) == 0
            runs.append(capsys.readouterr().out)
        assert runs[0] == runs[1]
        assert 0 <= json.loads(runs[0])["H_I"] <= 1
    assert main(["evaluate", "--learned", learned, "--metric", "he"]) == 2
    assert main(["evaluate", "--learned", learned, "--metric", "hi-data"]) == 2


def test_bench_rerun_identical(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": [5], "tau": [1], "N": [100, 200], "num_graphs": 2,
                               "algorithms": ["gsmn", "ibmap-hc", "ibmap-ts"], "triplets": 100,
                               "burn_in": 100, "thin": 2}))
    for name in ("a", "b"):
        assert main(["bench", str(cfg), "--seed", "4", "--out", str(tmp_path / name)]) == 0
    for f in ("runs.json", "summary.json", "runs.csv", "manifest.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    rows = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert [(r["N"]) for r in rows] == [100, 200]
    assert "r_E[ibmap-hc]" in rows[0] and "M[ibmap-hc]" in rows[0]


def test_bench_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": [5], "colour": "red"}))
    assert main(["bench", str(cfg), "--out", str(tmp_path / "o")]) == 2
