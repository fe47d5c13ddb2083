import json

import pytest

from qcotangent.verify import (
    CHECK_LIST, CHECKS, ConfigError, DEFAULT_CONFIG, corrupt_rplus, exit_code, load_config, report_json, run_suite,
)


def statuses(reps):
    return {r.check_id: r.status for r in reps}


@pytest.mark.parametrize("cfg", [
    {"depth": 0}, {"seed": -1}, {"trials": "many"}, {"n": [1]}, {"n": 2}, {"corruption": "typo"},
    {"checks": ["no.such.check"]}, {"checks": "rmat.hecke"}, {"timings": 1}, {"extra": True}, {"seed": True},
])
def test_config_errors(cfg):
    with pytest.raises(ConfigError):
        load_config(cfg)


def test_defaults():
    assert load_config(None) == DEFAULT_CONFIG


def test_check_ids_unique_and_deps_known():
    assert len(CHECKS) == len(CHECK_LIST)
    seen = set()
    for c in CHECK_LIST:
        # dependencies always come earlier in the run order
        assert set(c.deps) <= seen
        seen.add(c.check_id)


def test_empty_selection():
    reps = run_suite({"checks": []})
    assert reps == []
    assert exit_code(reps) == 0


def test_dependencies_pulled_in():
    reps = run_suite({"checks": ["rmat.hecke"], "n": [2]})
    assert [r.check_id for r in reps] == ["rmat.yang-baxter", "rmat.hecke"]
    assert all(r.status == "pass" for r in reps)


def test_report_shape():
    reps = run_suite({"checks": ["presentation.confluence"], "trials": 30})
    d = reps[-1].to_dict()
    assert set(d) == {"check-id", "section", "status", "details", "seed"}
    assert d["seed"] == 0
    assert d["details"]["with det"]["mismatches"] == 0


def test_r_entry_corruption_skips_dependents():
    reps = run_suite({"checks": ["rmat.rminus", "rmat.hecke"], "n": [2], "corruption": "R-entry"})
    st = statuses(reps)
    assert st["rmat.yang-baxter"] == "fail"
    assert st["rmat.rminus"] == "skipped" and st["rmat.hecke"] == "skipped"
    assert "witness" in reps[0].details
    assert exit_code(reps) == 1


def test_corrupt_rplus_only_touches_lambda_entry():
    from qcotangent.rmat import build_Rplus
    R = build_Rplus(2)
    C = corrupt_rplus(R)
    diff = [(i, j) for i in range(4) for j in range(4) if R.rows[i][j] != C.rows[i][j]]
    assert diff == [(1, 2)]


def test_lambda_term_corruption():
    reps = run_suite({"checks": ["presentation.confluence"], "trials": 200, "corruption": "lambda-term"})
    st = statuses(reps)
    assert st["presentation.confluence"] == "fail"
    w = reps[-1].details["without det"]
    assert w["mismatches"] > 0 and "witness" in w


def test_star_image_corruption():
    reps = run_suite({"checks": ["compact-form.scalar", "compact-form.matrix"], "corruption": "star-image",
                      "involutivity_trials": 5})
    st = statuses(reps)
    assert st["compact-form.scalar"] == "fail"
    assert st["compact-form.matrix"] == "pass"
    assert reps[[r.check_id for r in reps].index("compact-form.scalar")].details["closure"]["counts"]["fail"] == 18


@pytest.mark.parametrize("cid", ["negative-controls.R-entry", "negative-controls.lambda-term"])
def test_negative_control_checks(cid):
    reps = run_suite({"checks": [cid], "trials": 200})
    assert reps[-1].status == "pass"
    d = reps[-1].details
    assert d["failed"] == [d["target"]] and "witness" in d


def test_full_run_skips_negative_controls_when_corrupted():
    reps = run_suite({"checks": None, "corruption": "R-entry", "n": [2], "trials": 20,
                      "involutivity_trials": 1, "max_states": 3000})
    ids = [r.check_id for r in reps]
    assert not any(i.startswith("negative-controls.") for i in ids)


def test_deterministic_json():
    cfg = {"checks": ["presentation.confluence", "compact-form.matrix", "wznw.periodicity"], "trials": 100}
    a = report_json(run_suite(cfg), cfg)
    b = report_json(run_suite(cfg), cfg)
    assert a == b
    doc = json.loads(a)
    assert doc["config"]["trials"] == 100


def test_timings_opt_in():
    reps = run_suite({"checks": ["rmat.yang-baxter"], "n": [2], "timings": True})
    assert "seconds" in reps[0].details
    reps = run_suite({"checks": ["rmat.yang-baxter"], "n": [2]})
    assert "seconds" not in reps[0].details
