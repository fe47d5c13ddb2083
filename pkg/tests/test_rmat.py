import pytest

from qcotangent.errors import BadDimension, NoQuadraticRelation, SingularMatrix
from qcotangent.rmat import (
    CMatrix, build_P, build_Rminus, build_Rplus, check_hecke, check_yang_baxter, tensor_dim,
)
from qcotangent.scalars import LAM, Q, qpow


@pytest.mark.parametrize("n", [2, 3])
def test_yang_baxter(n):
    assert check_yang_baxter(build_Rplus(n))
    assert check_yang_baxter(build_Rminus(n))


@pytest.mark.parametrize("n", [2, 3])
def test_rminus_and_dagger(n):
    Rp, Rm, P = build_Rplus(n), build_Rminus(n), build_P(n)
    assert Rm == P @ Rp.inverse() @ P
    assert Rp.dagger() == Rm


def test_rplus_n2_entries():
    R = build_Rplus(2)
    h = qpow("-1/2")
    assert R[0, 0] == Q * h
    assert R[1, 2] == LAM * h
    assert R[2, 1] == 0
    assert R[1, 1] == h


def test_rminus_n2_is_lower():
    Rm = build_Rminus(2)
    assert Rm[1, 2] == 0
    assert Rm[2, 1] == -LAM * qpow("1/2")


def test_hecke_roots_n2():
    rep = check_hecke(build_Rplus(2))
    assert {str(r) for r in rep.roots} == {"q^(1/2)", "-q^(-3/2)"}


def test_hecke_rejects_non_quadratic():
    with pytest.raises(NoQuadraticRelation):
        check_hecke(CMatrix.identity(4) * 0)


def test_corrupted_r_breaks_ybe():
    R = build_Rplus(2)
    rows = [list(r) for r in R.rows]
    rows[1][2] = rows[1][2] * 2
    assert not check_yang_baxter(CMatrix(rows))


def test_errors():
    with pytest.raises(BadDimension):
        build_Rplus(1)
    with pytest.raises(BadDimension):
        build_Rplus(5)
    with pytest.raises(BadDimension):
        tensor_dim(CMatrix.identity(3))
    with pytest.raises(SingularMatrix):
        CMatrix.zeros(2).inverse()


def test_identity_satisfies_ybe():
    assert check_yang_baxter(CMatrix.identity(4))
