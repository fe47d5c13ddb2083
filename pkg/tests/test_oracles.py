"""Independent re-derivations with sympy (test-only dependency).

The expansion of every matrix relation is recomputed from scratch with
noncommutative sympy symbols and ``q = s^2``, then compared with the
engine's relation list up to scalar multiples.
"""

import pytest

sp = pytest.importorskip("sympy")

from qcotangent.heisenberg import RELATION_SPECS, expand_matrix_relation  # noqa: E402

s = sp.Symbol("s", positive=True)
q = s**2
lam = q - 1 / q
NC = {n: sp.Symbol(n, commutative=False)
      for n in ("Kinv", "K", "Xp", "Xm", "g[1,1]", "g[1,2]", "g[2,1]", "g[2,2]")}


def rplus():
    R = sp.zeros(4, 4)
    for i in range(2):
        for j in range(2):
            R[2 * i + j, 2 * i + j] = q if i == j else 1
    R[1, 2] = lam
    return R / s


def perm():
    P = sp.zeros(4, 4)
    for i in range(2):
        for j in range(2):
            P[2 * i + j, 2 * j + i] = 1
    return P


def mats():
    g = [[NC["g[1,1]"], NC["g[1,2]"]], [NC["g[2,1]"], NC["g[2,2]"]]]
    Op = [[NC["Kinv"], lam / s * NC["Xp"]], [0, NC["K"]]]
    Om = [[NC["K"], 0], [-s * lam * NC["Xm"], NC["Kinv"]]]
    return {"g": g, "Op": Op, "Om": Om}


def embed(M, space):
    out = [[0] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                if space == 1:
                    out[2 * i + k][2 * j + k] = M[i][j]
                else:
                    out[2 * k + i][2 * k + j] = M[i][j]
    return out


def mul(X, Y):
    # keeps factor order, so noncommutative entries are safe
    return [[sp.expand(sum(X[i][k] * Y[k][j] for k in range(4))) for j in range(4)] for i in range(4)]


def as_list(M):
    return [[M[i, j] for j in range(4)] for i in range(4)]


def terms(expr):
    out = {}
    for t in sp.Add.make_args(sp.expand(expr)):
        c, nc = t.args_cnc()
        word = []
        for f in nc:
            if isinstance(f, sp.Pow):
                word += [f.base] * int(f.exp)
            else:
                word.append(f)
        key = tuple(str(x) for x in word)
        out[key] = out.get(key, 0) + sp.Mul(*c)
    return {k: v for k, v in out.items() if sp.simplify(v) != 0}


def normalised(d):
    lead = min(d)
    c = d[lead]
    return {k: sp.cancel(v / c) for k, v in d.items()}


def same(d1, d2):
    return d1.keys() == d2.keys() and all(sp.simplify(d1[k] - d2[k]) == 0 for k in d1)


def qscalar_to_sympy(c):
    num = sum((sp.Rational(re.numerator, re.denominator) + sp.I * sp.Rational(im.numerator, im.denominator))
              * s ** int(2 * e) for e, (re, im) in c.terms.items())
    return num / lam ** c.lambda_power


def engine_terms(p):
    A = p.alphabet
    return {tuple(A.name(x) for x in w): qscalar_to_sympy(c) for w, c in p.terms.items()}


def oracle_relations(spec):
    M = mats()
    Rp = rplus()
    R = Rp if spec.R == "R+" else perm() * Rp.inv() * perm()
    Rl = as_list(R)
    A1, B2 = embed(M[spec.lhs[0]], 1), embed(M[spec.lhs[1]], 2)
    C2, D1 = embed(M[spec.rhs[0]], 2), embed(M[spec.rhs[1]], 1)
    lhs = mul(Rl, mul(A1, B2))
    rhs = mul(C2, D1)
    if spec.right_R:
        rhs = mul(rhs, Rl)
    out = []
    for i in range(4):
        for j in range(4):
            d = terms(lhs[i][j] - rhs[i][j])
            if d:
                out.append(normalised(d))
    return out


def dedupe(ds):
    out = []
    for d in ds:
        if not any(same(d, e) for e in out):
            out.append(d)
    return out


@pytest.mark.parametrize("spec", RELATION_SPECS, ids=lambda s: s.tag)
def test_expansion_matches_sympy(spec):
    oracle = dedupe(oracle_relations(spec))
    ours = dedupe([normalised(engine_terms(p)) for p in expand_matrix_relation(spec, 2)])
    assert len(oracle) == len(ours)
    for d in ours:
        assert any(same(d, e) for e in oracle)


def test_hecke_roots_sympy():
    PR = perm() * rplus()
    x = sp.Symbol("x")
    poly = sp.factor(sp.Matrix(PR).charpoly(x).as_expr())
    roots = set(sp.roots(sp.Poly(poly, x)).keys())
    assert {sp.simplify(r) for r in roots} == {s, -1 / s**3}


def test_rplus_dagger_sympy():
    # q is a phase, so conj(s) = 1/s
    Rp = rplus()
    dag = Rp.T.subs(s, 1 / s)
    Rm = perm() * Rp.inv() * perm()
    assert sp.simplify(dag - Rm) == sp.zeros(4, 4)
