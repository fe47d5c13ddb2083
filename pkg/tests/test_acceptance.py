"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import io
import json
import time

import pytest

from qcotangent.cli import main
from qcotangent.heisenberg import build_g, det_coefficient, quantum_det
from qcotangent.verify import run_suite

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def report():
    t0 = time.perf_counter()
    reps = run_suite({"timings": True})
    total = time.perf_counter() - t0
    return {r.check_id: r for r in reps}, total


@pytest.fixture
def verdict(capsys):
    def record(n, title, ok, note=""):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title}{' (' + note + ')' if note else ''}")
        assert ok
    return record


def _passed(reps, *ids):
    return all(reps[i].status == "pass" for i in ids)


def _seconds(reps, *ids):
    return sum(reps[i].details["seconds"] for i in ids)


def test_c01_r_matrix_identities(report, verdict):
    reps, _ = report
    ids = ("rmat.yang-baxter", "rmat.rminus", "rmat.r-dagger")
    ok = _passed(reps, *ids)
    ok = ok and reps["rmat.yang-baxter"].details["holds"] == {"2": True, "3": True}
    secs = _seconds(reps, *ids)
    verdict(1, "R-matrix identities for n = 2, 3", ok and secs < 5, f"{secs:.2f}s")


def test_c02_presentation(report, verdict):
    reps, _ = report
    ids = ("presentation.assemble", "presentation.confluence", "presentation.self-consistency")
    ok = _passed(reps, *ids)
    conf = {k: v for k, v in reps["presentation.confluence"].details.items() if k != "seconds"}
    ok = ok and all(v["trials"] >= 1000 and v["maxdeg"] == 5 and v["mismatches"] == 0 for v in conf.values())
    ok = ok and reps["presentation.self-consistency"].details["nonzero"] == 0
    secs = _seconds(reps, *ids)
    verdict(2, "presentation self-consistency and confluence", ok and secs < 60, f"{secs:.2f}s")


def test_c03_quantum_determinant(report, verdict, system0):
    reps, _ = report
    d = reps["quantum-determinant"].details
    # centrality before setting det = 1, in the system without the det rule
    det = quantum_det(build_g(2), None, det_coefficient(system0))
    A = system0.alphabet
    central = all(system0.nf(det * A.gen(x) - A.gen(x) * det).is_zero()
                  for x in ("g[1,1]", "g[1,2]", "g[2,1]", "g[2,2]"))
    ok = _passed(reps, "quantum-determinant") and central and d["det_q(Op) = 1"] and d["det_q(Om) = 1"]
    verdict(3, "quantum determinant central, det_q(Omega+-) = 1", ok)


def test_c04_jimbo_drinfeld(report, verdict):
    reps, _ = report
    verdict(4, "Jimbo-Drinfeld relations from the Borel exchange", _passed(reps, "jimbo-drinfeld"))


def test_c05_compact_form(report, verdict):
    reps, _ = report
    ok = _passed(reps, "compact-form.scalar", "compact-form.matrix")
    m = reps["compact-form.matrix"].details
    ok = ok and m["proved"] == m["total"] and m["max steps"] <= 12
    verdict(5, "compact reality structure", ok, f"{m['proved']}/{m['total']} images proved")


def test_c06_hyperboloid_form(report, verdict):
    reps, _ = report
    ids = ("hyperboloid-form.scalar", "hyperboloid-form.matrix", "hyperboloid-form.samples")
    ok = _passed(reps, *ids)
    m = reps["hyperboloid-form.matrix"].details
    s = reps["hyperboloid-form.scalar"].details
    ok = ok and m["proved"] == m["total"] and m["max steps"] <= 12
    ok = ok and s["Sigma reflection"] and s["Omega/Sigma commutators vanishing"] == "16/16"
    ok = ok and s["star(det_q g) = det_q g"] and reps["hyperboloid-form.samples"].details["replayed"]
    secs = _seconds(reps, *ids)
    verdict(6, "hyperboloid reality structure", ok and secs < 120, f"{m['proved']}/{m['total']}, {secs:.2f}s")


def test_c07_dynamics(report, verdict):
    reps, _ = report
    d = {k: v for k, v in reps["dynamics.evolve"].details.items() if k != "seconds"}
    ok = _passed(reps, "dynamics.evolve") and sorted(d) == ["n=1", "n=2", "n=3"]
    ok = ok and all(r["status"] == "proved" for v in d.values() for r in v)
    verdict(7, "evolution preserves reality for n = 1, 2, 3", ok)


def test_c08_wznw(report, verdict):
    reps, _ = report
    d = reps["wznw.periodicity"].details
    res = d["results"][0]
    # (MR^-1)^dag g0 ML^dag on the left, unfolded through the definitions of ML and MR
    ok = _passed(reps, "wznw.periodicity") and res["obligation"] == "ML^-1 g MR = ML g MR^-1"
    ok = ok and {s["rule"] for s in res["trace"]} <= {"def ML", "def MR", "def Sigma", "def Omega"}
    verdict(8, "WZNW periodicity", ok, f"{res.get('steps')} steps")


def test_c09_negative_controls(report, verdict):
    reps, _ = report
    ids = ("negative-controls.R-entry", "negative-controls.star-image", "negative-controls.lambda-term")
    ok = _passed(reps, *ids)
    ok = ok and all(reps[i].details["failed"] == [reps[i].details["target"]] for i in ids)
    ok = ok and all("witness" in reps[i].details for i in ids)
    verdict(9, "negative controls fail exactly their target", ok)


def test_c10_determinism(tmp_path, verdict):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 7}))
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        code = main(["suite", "--config", str(cfg), "--json"], buf)
        outs.append((code, buf.getvalue().encode("utf-8")))
    ok = outs[0] == outs[1] and outs[0][0] == 0
    verdict(10, "suite reports are byte-identical", ok, f"{len(outs[0][1])} bytes")
