import json

import pytest

from pseudoregulus.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_pass_json(capsys):
    code, out, _ = _run(capsys, "verify", "thm35")
    assert code == 0
    d = json.loads(out)
    assert d["suite"] == "thm35" and d["verdict"] == "pass"


def test_verify_text_and_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = _run(capsys, "verify", "cor38", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["verdict"] == "pass"
    code, out, _ = _run(capsys, "verify", "cor38", "--format", "text", "--timing")
    assert code == 0 and "verdict: pass" in out and " ms)" in out


def test_verify_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("q=3\nt=3\nseed=5\n")
    code, out, _ = _run(capsys, "verify", "thm35", "--config", str(cfg), "--q", "2")
    d = json.loads(out)
    assert code == 0 and d["scenario"]["p"] == 2 and d["scenario"]["t"] == 3 and d["seed"] == 5


def test_verify_usage_and_budget_codes(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["verify", "nope"])
    assert ei.value.code == 2
    assert "invalid choice" in capsys.readouterr().err
    code, _, err = _run(capsys, "verify", "thm35", "--q", "6")
    assert code == 2 and err.startswith("error:")
    code, out, _ = _run(capsys, "verify", "thm22", "--budget", "10")
    assert code == 3 and json.loads(out)["verdict"] == "budget"


def test_construct_and_detect(capsys, tmp_path):
    code, out, _ = _run(capsys, "construct", "pr", "--q", "2", "--t", "3", "--n", "2")
    d = json.loads(out)
    assert code == 0 and d["size"] == 63 and d["scattered"] and d["line_count"] == 9
    assert len(d["transversals"]) == 2
    path = tmp_path / "basis.txt"
    path.write_text("# standard set\n" + "\n".join(d["basis"]) + "\n")
    code, out, _ = _run(capsys, "detect", "pr", "--q", "2", "--t", "3", "--input", str(path))
    r = json.loads(out)
    assert code == 0 and r["kind"] == "pseudoregulus" and r["line_count"] == 9


def test_detect_rejects_non_scattered_input(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0:Z\n1:Z\n2:Z\n")  # one point of weight 3
    code, out, _ = _run(capsys, "detect", "pr", "--q", "2", "--t", "3", "--input", str(path))
    assert code == 1 and json.loads(out)["kind"] == "not_pr"
    code, _, err = _run(capsys, "detect", "pr", "--q", "2", "--t", "3", "--input", str(tmp_path / "none"))
    assert code == 2


def test_line_scale_construct_and_detect(capsys):
    code, out, _ = _run(capsys, "construct", "pr", "--q", "2", "--t", "3", "--n", "1")
    assert code == 0 and json.loads(out)["size"] == 7
    code, out, _ = _run(capsys, "detect", "pr", "--q", "2", "--t", "3", "--n", "1")
    assert code == 0 and json.loads(out)["kind"] == "pr"


def test_equiv(capsys):
    code, out, _ = _run(capsys, "equiv", "pr", "--q", "2", "--t", "5", "--sigma-exp", "1", "--sigma-exp2", "4")
    assert code == 0 and json.loads(out)["equivalent"]
    code, out, _ = _run(capsys, "equiv", "pr", "--q", "2", "--t", "5", "--sigma-exp", "1", "--sigma-exp2", "2")
    assert code == 1 and not json.loads(out)["equivalent"]


def test_project_and_recover(capsys):
    code, out, _ = _run(capsys, "project", "--q", "2", "--t", "3", "--n", "2")
    d = json.loads(out)
    assert code == 0 and d["size"] == 63 and d["pseudoregulus_type"]
    code, out, _ = _run(capsys, "recover-spread", "--q", "2", "--t", "3", "--n", "2")
    d = json.loads(out)
    assert code == 0 and d["recovered"] and d["size"] == 9
    code, _, _ = _run(capsys, "recover-spread", "--q", "2", "--t", "4", "--n", "2", "--i2", "2")
    assert code == 2


def test_segre_build(capsys):
    code, out, _ = _run(capsys, "segre", "build", "--q", "3", "--n", "2")
    d = json.loads(out)
    assert code == 0 and d["size"] == 16 and d["system_sizes"] == [4, 4]


def test_semifield_round_trips(capsys, tmp_path):
    g = tmp_path / "g.txt"
    assert main(["semifield", "gtf", "--q", "3", "--n", "2", "--t", "2", "--out", str(g)]) == 0
    code, out, _ = _run(capsys, "semifield", "recognize", "--input", str(g))
    assert code == 0 and json.loads(out)["recognized"] == "gtf"
    k = tmp_path / "k.txt"
    assert main(["semifield", "knuth", "--q", "3", "--t", "2", "--family", "19", "--out", str(k)]) == 0
    code, out, _ = _run(capsys, "recognize", "--input", str(k), "--family", "knuth")
    assert code == 0 and json.loads(out)["recognized"] == "knuth"
    code, out, _ = _run(capsys, "recognize", "--input", str(k), "--family", "gtf")
    assert code == 1 and json.loads(out)["recognized"] is None


def test_semifield_usage_errors(capsys):
    code, _, err = _run(capsys, "semifield", "gtf", "--q", "2", "--n", "2", "--t", "2")
    assert code == 2 and "no admissible" in err
    code, _, err = _run(capsys, "semifield", "knuth", "--q", "2", "--t", "2", "--f", "-1", "--g", "0")
    assert code == 2
