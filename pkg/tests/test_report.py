import json

import pytest

from pseudoregulus.report import (
    EXIT_BUDGET,
    EXIT_FAIL,
    EXIT_PASS,
    CheckRecord,
    Report,
    emit_report,
    parse_report,
    to_json,
)
from pseudoregulus.suites import (
    ANCHORS,
    SUITES,
    ConfigError,
    ScenarioConfig,
    UnknownSuite,
    parse_config_text,
    run_suite,
)


def test_json_round_trip():
    rep = run_suite("thm35")
    assert rep.verdict == "pass" and rep.exit_code == EXIT_PASS
    back = parse_report(to_json(rep))
    assert back.to_dict() == rep.to_dict()
    d = json.loads(to_json(rep))
    assert set(d) == {"suite", "scenario", "seed", "checks", "verdict"}
    assert d["scenario"] == {"p": 2, "h": 1, "t": 3, "n": 2}
    for c in d["checks"]:
        assert {"id", "anchor", "expected", "observed", "pass", "ms"} <= set(c)


@pytest.mark.parametrize("suite", ["thm35", "rem36", "prop43", "rem54"])
def test_reports_are_deterministic(suite):
    cfg = ScenarioConfig(seed=11)
    assert to_json(run_suite(suite, cfg)) == to_json(run_suite(suite, cfg))


def test_workers_do_not_change_the_report():
    a = run_suite("prop51", ScenarioConfig(seed=2))
    b = run_suite("prop51", ScenarioConfig(seed=2, workers=4))
    assert to_json(a) == to_json(b)


def test_empty_report_is_vacuous_and_fails():
    rep = Report("x", {"p": 2, "h": 1, "t": 2, "n": 2}, 0)
    assert rep.verdict == "vacuous" and rep.exit_code == EXIT_FAIL


def test_verdict_precedence():
    ok = CheckRecord("a", "anchor", 1, 1, True)
    bad = CheckRecord("b", "anchor", 1, 2, False)
    skip = CheckRecord("c", "anchor", None, None, False, skipped="budget")
    sc = {"p": 2, "h": 1, "t": 2, "n": 2}
    assert Report("x", sc, 0, [ok, skip]).exit_code == EXIT_BUDGET
    assert Report("x", sc, 0, [ok, skip, bad]).verdict == "fail"
    assert Report("x", sc, 0, [ok]).verdict == "pass"


def test_budget_stops_checks_with_a_reason():
    rep = run_suite("thm22", ScenarioConfig(budget=10))
    assert rep.verdict == "budget" and rep.exit_code == EXIT_BUDGET
    skipped = [c for c in rep.checks if c.skipped is not None]
    assert skipped and all(c.skipped for c in skipped)
    assert all(not c.passed for c in skipped)


def test_text_format(tmp_path):
    rep = run_suite("cor38")
    text = emit_report(rep, "text", tmp_path / "r.txt")
    assert text.startswith("suite cor38") and text.rstrip().endswith("verdict: pass")
    assert (tmp_path / "r.txt").read_text() == text
    for c in rep.checks:
        assert c.id in text
    with pytest.raises(ValueError):
        emit_report(rep, "xml")


def test_timing_is_recorded_only_on_request():
    assert all(c.ms is None for c in run_suite("cor38").checks)
    assert all(c.ms is not None and c.ms >= 0 for c in run_suite("cor38", ScenarioConfig(timing=True)).checks)


def test_every_suite_has_anchors():
    assert set(ANCHORS) == set(SUITES)
    for sid, anchors in ANCHORS.items():
        assert anchors and all(isinstance(a, str) and a for a in anchors.values()), sid


@pytest.mark.parametrize("suite", ["thm35", "rem36", "cor38", "prop43", "thm39", "thm22", "prop51", "rem54",
                                   "prop59", "rem58"])
def test_records_carry_registered_anchors(suite):
    rep = run_suite(suite)
    assert rep.checks
    for c in rep.checks:
        assert c.anchor == ANCHORS[suite][c.id]


def test_unknown_suite_and_bad_config():
    with pytest.raises(UnknownSuite):
        run_suite("nope")
    with pytest.raises(ConfigError):
        ScenarioConfig().set_q(6)
    with pytest.raises(ConfigError):
        run_suite("thm35", ScenarioConfig(workers=0))
    with pytest.raises(ConfigError):
        ScenarioConfig.from_mapping({"i1": "x"})
    with pytest.raises(ConfigError):
        parse_config_text("q 3")


def test_config_parsing():
    d = parse_config_text("# scenario\nq = 9\nt=3  # comment\n\nseed=4\ni1=2\ntiming=yes\n")
    cfg = ScenarioConfig.from_mapping(d)
    assert (cfg.p, cfg.h, cfg.t, cfg.seed) == (3, 2, 3, 4)
    assert cfg.timing and cfg.param("i1", 0) == 2 and cfg.param("i2", 1) == 1
    assert cfg.resolved({"q": 2, "t": 5, "n": 2}).n == 2
