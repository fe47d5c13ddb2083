import pytest
from hypothesis import given, settings, strategies as st

from qcotangent.errors import NoImage
from qcotangent.heisenberg import build_g, catalog, quantum_det
from qcotangent.star import (
    check_involutivity, compact, get_form, hyperboloid, random_poly, star_apply, verify_star_closure,
)
from qcotangent.scalars import I, Q, qpow


@pytest.fixture(scope="module")
def hyp(alg):
    return hyperboloid(alg=alg)


def test_compact_images():
    s = compact()
    assert {k: v.render() for k, v in s.images.items()} == {
        "K": "Kinv", "Kinv": "K", "Xp": "Xm", "Xm": "Xp"}


def test_compact_has_no_g_image(alg):
    A = catalog(2)
    with pytest.raises(NoImage) as exc:
        star_apply(A.gen("g[1,1]"), compact(), alg)
    assert exc.value.generator == "g[1,1]"


def test_hyperboloid_transposes_g(hyp, alg):
    A = catalog(2)
    assert star_apply(A.gen("g[1,2]"), hyp, alg).render() == "g[2,1]"
    assert star_apply(A.gen("g[1,1]"), hyp, alg).render() == "g[1,1]"


def test_coefficients_conjugate(alg):
    A = catalog(2)
    p = (Q * I) * A.gen("Xp")
    img = star_apply(p, compact(), alg)
    assert img == (qpow(-1) * -I) * A.gen("Xm")


def test_products_reverse(alg):
    A = catalog(2)
    p = A.gen("K") * A.gen("Xp")
    assert star_apply(p, compact(), alg) == alg.nf(A.gen("Xm") * A.gen("Kinv"))


def test_closure_counts(alg):
    c = verify_star_closure(compact(), alg)
    h = verify_star_closure(hyperboloid(alg=alg), alg)
    assert c.counts() == {"pass": 26, "fail": 0, "deferred": 38}
    assert h.counts() == {"pass": 43, "fail": 0, "deferred": 50}
    assert c.ok and h.ok


def test_closure_report_dict(alg):
    d = verify_star_closure(compact(), alg).to_dict()
    assert d["form"] == "compact"
    assert all({"relation-id", "status"} <= set(r) for r in d["relations"])
    deferred = [r for r in d["relations"] if r["status"] == "deferred"]
    assert all(r["detail"].startswith("matrix tier") for r in deferred)


def test_corrupted_compact_fails(alg):
    bad = compact({"K": "K", "Kinv": "Kinv"})
    rep = verify_star_closure(bad, alg)
    assert not rep.ok
    assert rep.counts()["fail"] == 18


def test_involutivity_compact(alg):
    assert check_involutivity(compact(), trials=40, seed=3, alg=alg).ok


def test_involutivity_hyperboloid(hyp, alg):
    rep = check_involutivity(hyp, trials=3, seed=1, alg=alg)
    assert rep.ok, rep.failures


def test_star_det_hyperboloid(hyp, alg):
    d = quantum_det(build_g(2))
    assert star_apply(d, hyp, alg) == alg.nf(d)


def test_unknown_form():
    with pytest.raises(ValueError):
        get_form("split")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_compact_antihomomorphism(alg, seed):
    import random
    rng = random.Random(seed)
    s = compact()
    letters = list(s.domain())
    p = random_poly(rng, s.alphabet, letters, maxdeg=3, nterms=2)
    r = random_poly(rng, s.alphabet, letters, maxdeg=3, nterms=2)
    lhs = star_apply(alg.nf(p * r), s, alg)
    rhs = alg.nf(star_apply(r, s, alg) * star_apply(p, s, alg))
    assert lhs == rhs
