"""Dense exact matrices over :class:`QScalar` and the SL(N) R-matrices.

The tensor square ``V (x) V`` uses the basis ``e_i (x) e_j -> i*n + j``
(0-based), so for n = 2 the order is 11, 12, 21, 22.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadDimension, NoQuadraticRelation, NotAUnit, SingularMatrix
from .scalars import LAM, ONE, TICKS, ZERO, QScalar, qpow

__all__ = [
    "CMatrix",
    "build_P",
    "build_Rplus",
    "build_Rminus",
    "check_yang_baxter",
    "check_hecke",
    "HeckeReport",
    "tensor_dim",
]

SUPPORTED_N = (2, 3, 4, 6)


class CMatrix:
    """Square matrix of QScalars; immutable by convention."""

    __slots__ = ("dim", "rows")

    def __init__(self, rows):
        rows = [[QScalar.coerce(x) for x in r] for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise BadDimension("matrix is not square")
        self.dim = n
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "CMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int) -> "CMatrix":
        return cls([[ZERO] * n for _ in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _check(self, other):
        if self.dim != other.dim:
            raise BadDimension(f"dimension mismatch {self.dim} vs {other.dim}")

    def __matmul__(self, other: "CMatrix") -> "CMatrix":
        if not isinstance(other, CMatrix):
            return NotImplemented
        self._check(other)
        n = self.dim
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = ZERO
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return CMatrix(out)

    def __mul__(self, c):
        c = QScalar.coerce(c)
        return CMatrix([[x * c for x in r] for r in self.rows])

    __rmul__ = __mul__

    def __add__(self, other):
        self._check(other)
        return CMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        return CMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return CMatrix([[-a for a in r] for r in self.rows])

    def __eq__(self, other):
        if not isinstance(other, CMatrix):
            return NotImplemented
        return self.dim == other.dim and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def is_identity(self) -> bool:
        return self == CMatrix.identity(self.dim)

    def transpose(self) -> "CMatrix":
        return CMatrix([list(c) for c in zip(*self.rows)])

    def dagger(self) -> "CMatrix":
        """Entrywise phase conjugation followed by transposition."""
        return CMatrix([[x.conj() for x in c] for c in zip(*self.rows)])

    def kron(self, other: "CMatrix") -> "CMatrix":
        n, m = self.dim, other.dim
        out = [[ZERO] * (n * m) for _ in range(n * m)]
        for i in range(n):
            for j in range(n):
                a = self.rows[i][j]
                if not a:
                    continue
                for k in range(m):
                    for l in range(m):
                        b = other.rows[k][l]
                        if b:
                            out[i * m + k][j * m + l] = a * b
        return CMatrix(out)

    def inverse(self) -> "CMatrix":
        """Gauss-Jordan elimination using unit pivots only."""
        n = self.dim
        a = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = None
            for r in range(col, n):
                if a[r][col] and a[r][col].is_unit():
                    piv = r
                    break
            if piv is None:
                raise SingularMatrix(f"no unit pivot in column {col}")
            a[col], a[piv] = a[piv], a[col]
            inv = a[col][col].inv_unit()
            a[col] = [x * inv for x in a[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return CMatrix([r[n:] for r in a])

    def to_json(self) -> str:
        return json.dumps([[str(x) for x in r] for r in self.rows])

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)

    def __repr__(self):
        return f"CMatrix(dim={self.dim})"


def tensor_dim(R: CMatrix) -> int:
    """``n`` such that ``R`` acts on ``C^n (x) C^n``."""
    n = round(R.dim ** 0.5)
    if n * n != R.dim or n < 1:
        raise BadDimension(f"{R.dim} is not a perfect square")
    return n


def _check_n(n):
    if not isinstance(n, int) or n < 2:
        raise BadDimension(f"n must be an integer >= 2, got {n!r}")


def build_P(n: int) -> CMatrix:
    _check_n(n)
    N = n * n
    out = [[ZERO] * N for _ in range(N)]
    for i in range(n):
        for j in range(n):
            out[i * n + j][j * n + i] = ONE
    return CMatrix(out)


def build_Rplus(n: int) -> CMatrix:
    """``q^(-1/n) (q sum e_ii(x)e_ii + sum_{i!=j} e_ii(x)e_jj + lambda sum_{i<j} e_ij(x)e_ji)``."""
    _check_n(n)
    if n not in SUPPORTED_N:
        raise BadDimension(f"q^(-1/{n}) normalisation needs n in {SUPPORTED_N}")
    N = n * n
    out = [[ZERO] * N for _ in range(N)]
    q = qpow(1)
    for i in range(n):
        for j in range(n):
            out[i * n + j][i * n + j] = q if i == j else ONE
    for i in range(n):
        for j in range(i + 1, n):
            # e_ij (x) e_ji maps e_j (x) e_i to e_i (x) e_j
            out[i * n + j][j * n + i] = LAM
    return CMatrix(out) * qpow(Fraction(-1, n))


def build_Rminus(n: int, Rplus: CMatrix | None = None) -> CMatrix:
    """``P R+^-1 P``."""
    _check_n(n)
    Rp = build_Rplus(n) if Rplus is None else Rplus
    P = build_P(n)
    return P @ Rp.inverse() @ P


def _embed(R: CMatrix, slots: str) -> CMatrix:
    """Embed a two-site operator into the triple tensor product on sites ``slots``."""
    n = tensor_dim(R)
    I = CMatrix.identity(n)
    if slots == "12":
        return R.kron(I)
    if slots == "23":
        return I.kron(R)
    if slots == "13":
        P23 = I.kron(build_P(n))
        return P23 @ R.kron(I) @ P23
    raise ValueError(slots)


def check_yang_baxter(R: CMatrix) -> bool:
    """``R12 R13 R23 == R23 R13 R12`` exactly."""
    tensor_dim(R)
    R12, R13, R23 = _embed(R, "12"), _embed(R, "13"), _embed(R, "23")
    return R12 @ R13 @ R23 == R23 @ R13 @ R12


@dataclass(frozen=True)
class HeckeReport:
    trace_coeff: QScalar   # sigma in (PR)^2 = sigma PR + tau
    const_coeff: QScalar   # tau
    roots: tuple

    def to_dict(self):
        return {
            "relation": f"(PR)^2 = ({self.trace_coeff})*PR + ({self.const_coeff})",
            "roots": [str(r) for r in self.roots],
        }


def _laurent_sqrt(x: QScalar):
    """Exact square root of ``x`` when it has rational coefficients, else None."""
    if x.is_zero():
        return ZERO
    if x.lambda_power % 2:
        return None
    terms = {int(e * TICKS): c for e, c in x.terms.items()}
    if any(c[1] for c in terms.values()):
        return None
    lo, hi = min(terms), max(terms)
    if lo % 2 or (hi - lo) % 2:
        return None
    D = hi - lo
    p = [Fraction(0)] * (D + 1)
    for e, c in terms.items():
        p[e - lo] = c[0]
    top = _rational_sqrt(p[D])
    if top is None:
        return None
    h = D // 2
    r = [Fraction(0)] * (h + 1)
    r[h] = top
    for k in range(h - 1, -1, -1):
        acc = p[k + h] - sum(r[i] * r[k + h - i] for i in range(k + 1, h))
        r[k] = acc / (2 * top)
    cand = QScalar({k + lo // 2: c for k, c in enumerate(r) if c}, 0)
    cand = cand * LAM.inv_unit() ** (x.lambda_power // 2)
    return cand if cand * cand == x else None


def _rational_sqrt(x: Fraction):
    n, d = _isqrt_exact(x.numerator), _isqrt_exact(x.denominator)
    if n is None or d is None:
        return None
    return Fraction(n, d)


def _isqrt_exact(n):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def check_hecke(R: CMatrix) -> HeckeReport:
    """Find ``(PR - mu1)(PR - mu2) = 0`` exactly."""
    n = tensor_dim(R)
    M = build_P(n) @ R
    M2 = M @ M
    sigma = None
    for i in range(M.dim):
        for j in range(M.dim):
            if i != j and M[i, j]:
                try:
                    sigma = M2[i, j] / M[i, j]
                except NotAUnit:
                    continue
                break
        if sigma is not None:
            break
    if sigma is None:
        raise NoQuadraticRelation("P*R has no unit off-diagonal entry")
    tau = M2[0, 0] - sigma * M[0, 0]
    if M2 != M * sigma + CMatrix.identity(M.dim) * tau:
        raise NoQuadraticRelation("(PR)^2 is not a combination of PR and 1")
    disc = sigma * sigma + tau * 4
    root = _laurent_sqrt(disc)
    if root is None:
        raise NoQuadraticRelation(f"discriminant {disc} has no exact square root")
    half = QScalar.coerce(Fraction(1, 2))
    mu1, mu2 = (sigma + root) * half, (sigma - root) * half
    I = CMatrix.identity(M.dim)
    if not ((M - I * mu1) @ (M - I * mu2)) == CMatrix.zeros(M.dim):
        raise NoQuadraticRelation("roots do not annihilate P*R")
    roots = tuple(sorted((mu1, mu2), key=str))
    return HeckeReport(sigma, tau, roots)
