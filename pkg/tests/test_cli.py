import io
import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from qcotangent.cli import EvalContext, eval_expr, main, parse_expr, print_expr
from qcotangent.errors import ExprSyntaxError, NoImage, UnknownGenerator

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def nf(text, form="hyperboloid"):
    return eval_expr(parse_expr(text), EvalContext(form)).render()


# -- parsing ---------------------------------------------------------------------------

def test_parse_product():
    e = parse_expr("g[1,1]*g[1,2]")
    assert type(e).__name__ == "Prod"
    assert print_expr(e) == "g[1,1]*g[1,2]"


def test_parse_dag_power():
    e = parse_expr("dag(Op[1,2])^2 + q*lambda")
    assert type(e).__name__ == "Sum"
    assert parse_expr(print_expr(e)) == e


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        parse_expr("g[1,3]")
    with pytest.raises(UnknownGenerator):
        parse_expr("Y")


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse_expr("g[1,1] * * K")
    assert exc.value.line == 1 and exc.value.column == 10
    with pytest.raises(ExprSyntaxError) as exc:
        parse_expr("K +\n  (Xp")
    assert exc.value.line == 2


def test_q_fractional_power():
    assert nf("q^(1/2)*q^(1/2)") == "q"
    assert nf("q^-1*q") == "1"


# -- evaluation -------------------------------------------------------------------------

def test_k_kinv():
    assert nf("K*Kinv") == "1"


def test_dag_hyperboloid():
    assert nf("dag(g[1,2])") == "g[2,1]"


def test_dag_compact():
    assert nf("dag(Xp)", "compact") == "Xm"
    assert nf("dag(K)", "compact") == "Kinv"


def test_dag_no_image_hint():
    with pytest.raises(NoImage) as exc:
        nf("dag(g[1,2])", "compact")
    assert "--tier matrix" in str(exc.value)


def test_unit_determinant():
    # the central combination is ad - q^-1 bc; ad - q bc is not 1
    assert nf("nf(g[1,1]*g[2,2] - q^-1*g[1,2]*g[2,1])") == "1"
    assert nf("nf(g[1,1]*g[2,2] - q*g[1,2]*g[2,1])") == "(-q^2 + 1)*g[1,1]*g[2,2] + q^2"


def test_printed_normal_forms_reparse():
    for text in ("Xp*Xm - Xm*Xp", "g[2,2]*g[1,1]", "Op[1,2]*Om[2,1]", "(K + Kinv)^3", "i*lambda^-1*K^-2"):
        out = nf(text)
        assert nf(out) == out


_atoms = st.sampled_from(["K", "Kinv", "Xp", "Xm", "g[1,1]", "g[2,1]", "q", "i", "lambda", "2", "1/3",
                          "q^(1/2)", "Op[1,2]"])


def _expr():
    return st.recursive(
        _atoms,
        lambda ch: st.one_of(
            st.tuples(ch, ch).map(lambda t: f"{t[0]} + {t[1]}"),
            st.tuples(ch, ch).map(lambda t: f"{t[0]} - {t[1]}"),
            st.tuples(ch, ch).map(lambda t: f"({t[0]})*({t[1]})"),
            st.tuples(ch, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
            ch.map(lambda x: f"-({x})"),
            ch.map(lambda x: f"dag({x})"),
            ch.map(lambda x: f"nf({x})"),
        ),
        max_leaves=6,
    )


@settings(max_examples=200, deadline=None)
@given(_expr())
def test_print_parse_roundtrip(text):
    e = parse_expr(text)
    p = print_expr(e)
    assert parse_expr(p) == e
    assert print_expr(parse_expr(p)) == p


@settings(max_examples=40, deadline=None)
@given(_expr())
def test_eval_deterministic(text):
    e = parse_expr(text.replace("dag(", "nf("))
    assert eval_expr(e, EvalContext()).render() == eval_expr(e, EvalContext()).render()


# -- subcommands ------------------------------------------------------------------------

def test_relations_golden():
    code, out = run("relations", "--print")
    assert code == 0
    assert out == (GOLDEN / "relations_n2.txt").read_text(encoding="utf-8")
    code, out = run("relations", "--no-det")
    assert out == (GOLDEN / "relations_n2_nodet.txt").read_text(encoding="utf-8")


def test_golden_lines_reparse():
    for line in (GOLDEN / "relations_n2.txt").read_text(encoding="utf-8").splitlines():
        lhs, rhs = line.split(" = ")
        assert nf(f"nf({lhs}) - nf({rhs})") == "0"


def test_nf_command():
    assert run("nf", "K*Kinv") == (0, "1\n")
    code, out = run("nf", "dag(g[1,2])", "--json")
    assert json.loads(out)["nf"] == "g[2,1]"


def test_exit_codes(tmp_path):
    assert run("nf", "g[1,3]")[0] == 2
    assert run("nf", "K +")[0] == 2
    assert run("nf", "dag(g[1,1])", "--form", "compact")[0] == 1
    assert run("bogus")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"depth": 0}')
    assert run("suite", "--config", str(bad))[0] == 2
    bad.write_text('{"nope": 1}')
    assert run("suite", "--config", str(bad))[0] == 2
    assert run("suite", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_check_commands():
    assert run("check", "yang-baxter", "--n", "3")[0] == 0
    assert run("check", "rminus")[0] == 0
    assert run("check", "det-central")[0] == 0
    assert run("check", "jimbo-drinfeld")[0] == 0
    code, out = run("check", "confluence", "--trials", "50", "--json")
    assert code == 0
    doc = json.loads(out)
    assert [c["check-id"] for c in doc["checks"]][-2:] == ["presentation.confluence",
                                                           "presentation.self-consistency"]


def test_check_star_and_dynamics():
    assert run("check", "star", "--form", "compact")[0] == 0
    assert run("check", "star", "--form", "compact", "--tier", "matrix")[0] == 0
    code, out = run("check", "star", "--form", "hyperboloid", "--tier", "matrix")
    assert code == 0 and "hyperboloid-form.samples" in out
    assert run("check", "evolve", "--steps", "2")[0] == 0
    assert run("check", "wznw")[0] == 0


def test_suite_command(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": ["rmat.hecke"], "n": [2]}))
    code, out = run("suite", "--config", str(cfg), "--json")
    assert code == 0
    doc = json.loads(out)
    assert [c["status"] for c in doc["checks"]] == ["pass", "pass"]


def test_suite_corruption_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": ["rmat.rminus"], "n": [2], "corruption": "R-entry"}))
    code, out = run("suite", "--config", str(cfg))
    assert code == 1
    assert "FAIL     rmat.yang-baxter" in out and "witness" in out
