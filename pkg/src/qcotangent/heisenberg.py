"""The T*G_q presentation for SL(n): generator catalog, matrix relations, rewrite system.

For n = 2 the catalog is ``Kinv < K < Xp < Xm < g[1,1] < g[1,2] < g[2,1] < g[2,2]``
and the Borel matrices are written in Jimbo-Drinfeld form::

    Op = [[Kinv, q^(-1/2) lambda Xp], [0, K]]
    Om = [[K, 0], [-q^(1/2) lambda Xm, Kinv]]

Every relation is an equation between 4x4 operator matrices on ``V (x) V``;
``X^1 = X (x) 1`` and ``X^2 = 1 (x) X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import BadDimension, NotInvertible, NotOrientable
from .freealg import (
    Alphabet,
    NCPoly,
    RewriteRule,
    RewriteSystem,
    check_local_confluence,
    complete,
    interreduce,
    orient,
    word_key,
)
from .rmat import CMatrix, build_Rminus, build_Rplus
from .scalars import LAM, ONE, ZERO, Q, QScalar, qpow

__all__ = [
    "OpMatrix",
    "RelationSpec",
    "RELATION_SPECS",
    "catalog",
    "build_g",
    "build_omega",
    "expand_matrix_relation",
    "defining_relations",
    "assemble_system",
    "quantum_det",
    "quantum_inverse",
    "build_Omega",
    "build_Sigma",
    "check_jimbo_drinfeld",
    "TStarAlgebra",
    "algebra",
]

ENVELOPING = ("Kinv", "K", "Xp", "Xm")
UNIT_INVERSES = {"K": "Kinv", "Kinv": "K"}


def gname(i: int, j: int) -> str:
    return f"g[{i},{j}]"


@lru_cache(maxsize=None)
def catalog(n: int = 2) -> Alphabet:
    """Generator alphabet in precedence order.

    n = 2 carries the Jimbo-Drinfeld letters; larger n has only the
    entries of ``g``.
    """
    if n < 2:
        raise BadDimension(f"n must be >= 2, got {n}")
    gs = [gname(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    if n == 2:
        names = list(ENVELOPING) + gs
        meta = [("K",), ("K",), ("X",), ("X",)] + [("g", i, j) for i in (1, 2) for j in (1, 2)]
    else:
        names = gs
        meta = [("g", i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    return Alphabet(names, meta)


class OpMatrix:
    """Square matrix of NCPoly entries."""

    __slots__ = ("dim", "rows", "alphabet")

    def __init__(self, rows, alphabet):
        self.alphabet = alphabet
        self.rows = [[_lift(x, alphabet) for x in r] for r in rows]
        self.dim = len(self.rows)
        if any(len(r) != self.dim for r in self.rows):
            raise BadDimension("operator matrix is not square")

    @classmethod
    def identity(cls, n, alphabet):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], alphabet)

    @classmethod
    def from_cmatrix(cls, C: CMatrix, alphabet):
        return cls([[NCPoly.scalar(x, alphabet) for x in r] for r in C.rows], alphabet)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other):
        if isinstance(other, CMatrix):
            other = OpMatrix.from_cmatrix(other, self.alphabet)
        if self.dim != other.dim:
            raise BadDimension(f"dimension mismatch {self.dim} vs {other.dim}")
        n = self.dim
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = NCPoly.scalar(0, self.alphabet)
                for k in range(n):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return OpMatrix(out, self.alphabet)

    def __rmatmul__(self, other):
        if isinstance(other, CMatrix):
            return OpMatrix.from_cmatrix(other, self.alphabet) @ self
        return NotImplemented

    def __add__(self, other):
        return OpMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.alphabet)

    def __sub__(self, other):
        return OpMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.alphabet)

    def __mul__(self, c):
        return OpMatrix([[a * c for a in r] for r in self.rows], self.alphabet)

    def __eq__(self, other):
        if not isinstance(other, OpMatrix):
            return NotImplemented
        return self.rows == other.rows

    def in_space(self, space: int) -> "OpMatrix":
        """``X (x) 1`` for space 1, ``1 (x) X`` for space 2."""
        n = self.dim
        N = n * n
        zero = NCPoly.scalar(0, self.alphabet)
        out = [[zero] * N for _ in range(N)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if space == 1:
                        out[i * n + k][j * n + k] = self.rows[i][j]
                    elif space == 2:
                        out[k * n + i][k * n + j] = self.rows[i][j]
                    else:
                        raise ValueError(f"space must be 1 or 2, got {space}")
        return OpMatrix(out, self.alphabet)

    def reduce(self, system: RewriteSystem) -> "OpMatrix":
        return OpMatrix([[system.nf(x) for x in r] for r in self.rows], self.alphabet)

    def map(self, f) -> "OpMatrix":
        return OpMatrix([[f(x) for x in r] for r in self.rows], self.alphabet)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def is_identity(self) -> bool:
        return all((x - (1 if i == j else 0)).is_zero()
                   for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, x in enumerate(r):
                yield (i, j), x

    def render(self) -> str:
        return "\n".join("[" + ", ".join(x.render() for x in r) + "]" for r in self.rows)

    def __str__(self):
        return self.render()


def _lift(x, alphabet):
    if isinstance(x, NCPoly):
        return x
    return NCPoly.scalar(x, alphabet)


# -- generator matrices ---------------------------------------------------------

def build_g(n: int = 2) -> OpMatrix:
    if n < 2:
        raise BadDimension(f"n must be >= 2, got {n}")
    A = catalog(n)
    return OpMatrix([[A.gen(gname(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)], A)


def build_omega(sign: str, n: int = 2) -> OpMatrix:
    """Jimbo-Drinfeld Borel matrix ``Op`` (sign '+') or ``Om`` (sign '-')."""
    if n != 2:
        raise BadDimension("Jimbo-Drinfeld form of the Borel matrices exists only for n = 2")
    A = catalog(2)
    K, Kinv, Xp, Xm = (A.gen(x) for x in ("K", "Kinv", "Xp", "Xm"))
    if sign in ("+", "plus", 1):
        return OpMatrix([[Kinv, Xp * (qpow("-1/2") * LAM)], [0, K]], A)
    if sign in ("-", "minus", -1):
        return OpMatrix([[K, 0], [Xm * (-qpow("1/2") * LAM), Kinv]], A)
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


# -- relation catalogue ---------------------------------------------------------

@dataclass(frozen=True)
class RelationSpec:
    """``R A^1 B^2 = C^2 D^1 [R]`` with symbols among g, Op, Om and R in {R+, R-}."""

    tag: str
    R: str
    lhs: tuple
    rhs: tuple
    right_R: bool = True
    source: str = ""

    def text(self) -> str:
        a, b = self.lhs
        c, d = self.rhs
        rhs = f"{c}^2 {d}^1" + (f" {self.R}" if self.right_R else "")
        return f"{self.R} {a}^1 {b}^2 = {rhs}"


RELATION_SPECS = (
    RelationSpec("Rgg+", "R+", ("g", "g"), ("g", "g"), True, "g-g exchange"),
    RelationSpec("Rgg-", "R-", ("g", "g"), ("g", "g"), True, "g-g exchange"),
    RelationSpec("RLL++/R+", "R+", ("Op", "Op"), ("Op", "Op"), True, "Borel exchange, upper-upper"),
    RelationSpec("RLL++/R-", "R-", ("Op", "Op"), ("Op", "Op"), True, "Borel exchange, upper-upper"),
    RelationSpec("RLL--/R+", "R+", ("Om", "Om"), ("Om", "Om"), True, "Borel exchange, lower-lower"),
    RelationSpec("RLL--/R-", "R-", ("Om", "Om"), ("Om", "Om"), True, "Borel exchange, lower-lower"),
    RelationSpec("RLL+-", "R+", ("Op", "Om"), ("Om", "Op"), True, "Borel exchange, upper-lower (corrected left side)"),
    RelationSpec("RLL-+", "R-", ("Om", "Op"), ("Op", "Om"), True, "Borel exchange, lower-upper"),
    RelationSpec("RLg+", "R+", ("Op", "g"), ("g", "Op"), False, "Borel-g exchange, upper"),
    RelationSpec("RLg-", "R-", ("Om", "g"), ("g", "Om"), False, "Borel-g exchange, lower"),
)

# The upper-lower Borel exchange exactly as typeset (Om^1 Om^2 on the left); kept only
# to demonstrate that it is incompatible with the other lines.
PRINTED_RLL_LINE3 = RelationSpec("RLL+-printed", "R+", ("Om", "Om"), ("Om", "Op"), True, "Borel exchange, upper-lower (as typeset)")

SPEC_BY_TAG = {s.tag: s for s in RELATION_SPECS}


def _spec_matrices(n, R_override=None):
    mats = {"g": build_g(n)}
    if n == 2:
        mats["Op"] = build_omega("+")
        mats["Om"] = build_omega("-")
    Rs = {"R+": build_Rplus(n), "R-": build_Rminus(n)}
    if R_override is not None:
        Rs = {k: R_override for k in Rs} if isinstance(R_override, CMatrix) else {**Rs, **R_override}
    return mats, Rs


def expand_matrix_relation(spec, n: int = 2, R=None) -> list:
    """Entrywise ``lhs - rhs`` of a matrix relation, zero and duplicate entries dropped.

    ``R`` optionally replaces the R-matrix (a CMatrix, or a dict keyed by
    'R+'/'R-').
    """
    if isinstance(spec, str):
        spec = SPEC_BY_TAG[spec]
    mats, Rs = _spec_matrices(n, R)
    if any(s not in mats for s in spec.lhs + spec.rhs):
        raise BadDimension(f"{spec.tag} needs the Borel matrices, available only for n = 2")
    Rm = Rs[spec.R]
    A1 = mats[spec.lhs[0]].in_space(1)
    B2 = mats[spec.lhs[1]].in_space(2)
    C2 = mats[spec.rhs[0]].in_space(2)
    D1 = mats[spec.rhs[1]].in_space(1)
    lhs = Rm @ (A1 @ B2)
    rhs = C2 @ D1
    if spec.right_R:
        rhs = rhs @ Rm
    return _dedupe(x for _, x in (lhs - rhs).entries())


def _dedupe(polys):
    seen = set()
    out = []
    for p in polys:
        if p.is_zero():
            continue
        w, c = p.leading()
        try:
            key = p * c.inv_unit()
        except Exception:
            key = p
        if key in seen or -key in seen:
            continue
        seen.add(key)
        out.append(p)
    return out


def inverse_pair_relations(alphabet=None):
    A = alphabet or catalog(2)
    K, Kinv = A.gen("K"), A.gen("Kinv")
    return [K * Kinv - 1, Kinv * K - 1]


def quantum_det(M: OpMatrix, system: RewriteSystem | None = None, coefficient: QScalar | None = None) -> NCPoly:
    """``M11 M22 - c M12 M21`` (normal form if a system is given).

    ``c`` defaults to the convention picked by the centrality oracle,
    see :func:`det_convention`.
    """
    if M.dim != 2:
        raise BadDimension("quantum determinant is implemented for 2x2 matrices")
    if coefficient is None:
        coefficient = det_convention()
    d = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0] * coefficient
    return system.nf(d) if system is not None else d


def defining_relations(n: int = 2) -> list:
    """``[(tag, relation)]`` for every matrix relation, without determinant rules."""
    out = []
    if n == 2:
        out += [("K Kinv", r) for r in inverse_pair_relations()]
    for spec in RELATION_SPECS:
        if n != 2 and spec.tag not in ("Rgg+", "Rgg-"):
            continue
        out += [(spec.tag, r) for r in expand_matrix_relation(spec, n)]
    return out


def _orient_all(alphabet, tagged, rules=()):
    rules = list(rules)
    for tag, rel in tagged:
        sysm = RewriteSystem(alphabet, rules)
        red = sysm.nf(rel)
        if red.is_zero():
            continue
        try:
            rule = orient(red, None, 2, tag)
        except NotOrientable as exc:
            raise NotOrientable(f"{tag}: {exc}", rel) from None
        rules.append(rule)
        rules = list(interreduce(alphabet, rules, max_lhs_len=2).rules)
    return rules


def det_is_central(system: RewriteSystem, coefficient: QScalar, letters=None) -> bool:
    g = build_g(2)
    d = quantum_det(g, None, coefficient)
    A = system.alphabet
    letters = letters or [gname(i, j) for i in (1, 2) for j in (1, 2)]
    return all(system.nf(d * A.gen(x) - A.gen(x) * d).is_zero() for x in letters)


def assemble_system(n: int = 2, with_det: bool = True, extra=(), max_rounds: int = 6,
                    relations=None) -> RewriteSystem:
    """Oriented, inter-reduced rewrite system for T*G_q (n = 2) or Fun_q(SL(n)).

    The q-determinant coefficient is chosen by the centrality oracle before
    ``det_q(g) = 1`` is imposed.
    """
    A = catalog(n)
    tagged = list(defining_relations(n) if relations is None else relations) + list(extra)
    rules = _orient_all(A, tagged)
    base = complete(RewriteSystem(A, rules), max_rounds)
    if not with_det or n != 2:
        return base
    coeff = det_coefficient(base)
    d = quantum_det(build_g(2), None, coeff) - 1
    rules = _orient_all(A, [("det_q(g) = 1", d)], base.rules)
    return complete(RewriteSystem(A, rules), max_rounds)


def det_coefficient(system: RewriteSystem) -> QScalar:
    """Centrality oracle: the ``c`` for which ``ad - c bc`` commutes with a, b, c, d."""
    for c in (Q, Q.inv_unit()):
        if det_is_central(system, c):
            return c
    raise NotOrientable("neither ad - q bc nor ad - q^-1 bc is central")


@lru_cache(maxsize=1)
def det_convention() -> QScalar:
    """The q-determinant coefficient for the default presentation (evaluates to q^-1)."""
    return det_coefficient(assemble_system(2, with_det=False))


# -- inverses and composite matrices -------------------------------------------

def _unit_letter_inverse(p: NCPoly):
    if len(p.terms) != 1:
        return None
    (w, c), = p.terms.items()
    if len(w) != 1:
        return None
    name = p.alphabet.name(w[0])
    inv = UNIT_INVERSES.get(name)
    if inv is None or not c.is_unit():
        return None
    return p.alphabet.gen(inv) * c.inv_unit()


def quantum_inverse(M: OpMatrix, kind: str, system: RewriteSystem) -> OpMatrix:
    """Two-sided inverse checked under ``system``.

    ``kind='g2x2'`` tries the quantum adjugates ``[[d, -q^s b], [-q^t c, a]]``;
    ``kind='triangular'`` uses the closed form for a Borel matrix whose
    diagonal entries are unit letters.
    """
    if M.dim != 2:
        raise NotInvertible("only 2x2 inverses are implemented")
    A = M.alphabet
    if M.is_identity():
        return OpMatrix.identity(2, A)
    if kind == "g2x2":
        a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
        for s in (Q.inv_unit(), Q):
            for t in (Q, Q.inv_unit()):
                cand = OpMatrix([[d, -(b * s)], [-(c * t), a]], A)
                if _two_sided(M, cand, system):
                    return cand
        raise NotInvertible("no quantum adjugate is a two-sided inverse")
    if kind == "triangular":
        a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
        ai, di = _unit_letter_inverse(a), _unit_letter_inverse(d)
        if ai is None or di is None:
            raise NotInvertible("diagonal entries are not unit letters")
        if c.is_zero():
            cand = OpMatrix([[ai, -(ai * b * di)], [0, di]], A)
        elif b.is_zero():
            cand = OpMatrix([[ai, 0], [-(di * c * ai), di]], A)
        else:
            raise NotInvertible("matrix is not triangular")
        cand = cand.reduce(system)
        if not _two_sided(M, cand, system):
            raise NotInvertible("closed-form inverse failed the two-sided check")
        return cand
    raise ValueError(f"unknown inverse kind {kind!r}")


def _two_sided(M, Minv, system):
    return (M @ Minv).reduce(system).is_identity() and (Minv @ M).reduce(system).is_identity()


class TStarAlgebra:
    """Assembled n = 2 algebra with cached composite matrices."""

    def __init__(self, system: RewriteSystem | None = None):
        self.system = system or assemble_system(2)
        self.alphabet = self.system.alphabet
        self._cache = {}

    def _memo(self, key, f):
        if key not in self._cache:
            self._cache[key] = f()
        return self._cache[key]

    def nf(self, p):
        return self.system.nf(p)

    @property
    def g(self):
        return build_g(2)

    @property
    def Op(self):
        return build_omega("+")

    @property
    def Om(self):
        return build_omega("-")

    @property
    def g_inv(self):
        return self._memo("g_inv", lambda: quantum_inverse(self.g, "g2x2", self.system))

    @property
    def Op_inv(self):
        return self._memo("Op_inv", lambda: quantum_inverse(self.Op, "triangular", self.system))

    @property
    def Om_inv(self):
        return self._memo("Om_inv", lambda: quantum_inverse(self.Om, "triangular", self.system))

    @property
    def Omega(self):
        return self._memo("Omega", lambda: (self.Op @ self.Om_inv).reduce(self.system))

    @property
    def Omega_inv(self):
        return self._memo("Omega_inv", lambda: (self.Om @ self.Op_inv).reduce(self.system))

    @property
    def Sigma(self):
        return self._memo("Sigma", lambda: (self.g_inv @ self.Omega @ self.g).reduce(self.system))

    @property
    def Sigma_inv(self):
        return self._memo("Sigma_inv", lambda: (self.g_inv @ self.Omega_inv @ self.g).reduce(self.system))

    @property
    def Rplus(self):
        return build_Rplus(2)

    @property
    def Rminus(self):
        return build_Rminus(2)

    def matrix(self, name: str) -> OpMatrix:
        """Scalar-tier realisation of a matrix symbol (inverse with suffix '^-1')."""
        table = {
            "g": "g", "g^-1": "g_inv", "Op": "Op", "Op^-1": "Op_inv", "Om": "Om",
            "Om^-1": "Om_inv", "Omega": "Omega", "Omega^-1": "Omega_inv",
            "Sigma": "Sigma", "Sigma^-1": "Sigma_inv",
        }
        return getattr(self, table[name])


@lru_cache(maxsize=1)
def algebra() -> TStarAlgebra:
    """Shared default n = 2 algebra (assembly is deterministic)."""
    return TStarAlgebra()


def build_Omega(alg: TStarAlgebra | None = None) -> OpMatrix:
    return (alg or algebra()).Omega


def build_Sigma(alg: TStarAlgebra | None = None) -> OpMatrix:
    return (alg or algebra()).Sigma


@dataclass
class JDReport:
    results: dict

    @property
    def ok(self):
        return all(v.is_zero() for v in self.results.values())

    def to_dict(self):
        return {k: {"status": "pass" if v.is_zero() else "fail", "residue": v.render()}
                for k, v in self.results.items()}


def jimbo_drinfeld_relations(alphabet=None, flip_sign: bool = False) -> dict:
    A = alphabet or catalog(2)
    K, Kinv, Xp, Xm = (A.gen(x) for x in ("K", "Kinv", "Xp", "Xm"))
    qp = Q.inv_unit() if flip_sign else Q
    return {
        "K Xp Kinv = q Xp": K * Xp * Kinv - Xp * qp,
        "K Xm Kinv = q^-1 Xm": K * Xm * Kinv - Xm * Q.inv_unit(),
        "K Xp = q Xp K": K * Xp - Xp * K * qp,
        "K Xm = q^-1 Xm K": K * Xm - Xm * K * Q.inv_unit(),
        "[Xp, Xm] = (K^2 - Kinv^2)/lambda": Xp * Xm - Xm * Xp - (K * K - Kinv * Kinv) * LAM.inv_unit(),
    }


def check_jimbo_drinfeld(system: RewriteSystem | None = None, flip_sign: bool = False) -> JDReport:
    system = system or algebra().system
    rels = jimbo_drinfeld_relations(system.alphabet, flip_sign)
    return JDReport({k: system.nf(v) for k, v in rels.items()})
