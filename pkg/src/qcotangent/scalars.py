"""Exact scalars: Laurent polynomials in fractional powers of ``q`` over the Gaussian rationals.

Exponents are stored as integers counting powers of ``s = q^(1/12)``, so the
``q^(-1/2)`` normalisation of the SL(2) R-matrix (and ``q^(-1/N)`` for
N in {2, 3, 4, 6}) stays exact.  The ring is
localised at ``lambda = q - q^-1``: a scalar is ``N(s) / lambda^k`` with ``N``
a Laurent polynomial that is not divisible by ``lambda`` whenever ``k > 0``.
Inverting ``lambda`` is what lets ``[X+, X-] = (K^2 - K^-2) / lambda`` and the
``-q^(1/2) lambda X-`` entry of the lower Borel matrix be handled by
unit-leading rewrite rules.

Conjugation treats ``q`` as a phase: ``s -> s^-1``, ``i -> -i``, hence
``lambda -> -lambda``.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotAUnit

__all__ = ["QScalar", "ZERO", "ONE", "Q", "I", "LAM", "qpow"]

_ZERO = Fraction(0)
_ONE = Fraction(1)


# -- Gaussian rationals as (re, im) pairs of Fractions -------------------------

def _gmul(a, b):
    ar, ai = a
    br, bi = b
    if not ai and not bi:
        return (ar * br, _ZERO)
    return (ar * br - ai * bi, ar * bi + ai * br)


def _ginv(a):
    ar, ai = a
    if not ai:
        return (1 / ar, _ZERO)
    n = ar * ar + ai * ai
    return (ar / n, -ai / n)


def _coeff(x):
    if isinstance(x, tuple):
        return (Fraction(x[0]), Fraction(x[1]))
    if isinstance(x, complex):
        return (Fraction(x.real), Fraction(x.imag))
    return (Fraction(x), _ZERO)


def _add_into(acc, e, c):
    old = acc.get(e)
    if old is None:
        acc[e] = c
        return
    r = old[0] + c[0]
    i = old[1] + c[1]
    if r or i:
        acc[e] = (r, i)
    else:
        del acc[e]


def _poly_mul(x, y):
    out = {}
    for e1, c1 in x.items():
        for e2, c2 in y.items():
            _add_into(out, e1 + e2, _gmul(c1, c2))
    return out


TICKS = 12  # exponent unit is q^(1/TICKS)


def _times_lambda(t):
    # lambda = s^TICKS - s^-TICKS
    out = {}
    for e, c in t.items():
        _add_into(out, e + TICKS, c)
        _add_into(out, e - TICKS, (-c[0], -c[1]))
    return out


def _div_lambda(t):
    """Exact quotient ``t / lambda`` or None when lambda does not divide ``t``."""
    if not t:
        return {}
    m = min(t)
    top = max(t) - m
    d = 2 * TICKS
    if top < d:
        return None
    # long division by x^d - 1, highest power first
    p = [[_ZERO, _ZERO] for _ in range(top + 1)]
    for e, c in t.items():
        p[e - m] = [c[0], c[1]]
    quo = {}
    for j in range(top, d - 1, -1):
        cr, ci = p[j]
        if cr or ci:
            quo[j - d] = (cr, ci)
            p[j - d][0] += cr
            p[j - d][1] += ci
    if any(v[0] or v[1] for v in p[:d]):
        return None
    return {e + m + TICKS: c for e, c in quo.items()}


def _fmt_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _fmt_power(e: int) -> str:
    k = Fraction(e, TICKS)
    if k.denominator == 1:
        return "q" if k == 1 else f"q^{k.numerator}"
    return f"q^({k.numerator}/{k.denominator})"


class QScalar:
    """Immutable exact scalar ``N(q^(1/12)) / lambda^k``."""

    __slots__ = ("_t", "_k", "_hash")

    def __init__(self, terms=None, lam_power: int = 0, *, _canonical=False):
        if _canonical:
            self._t = terms
            self._k = lam_power
        else:
            t = {}
            for e, c in (terms or {}).items():
                c = _coeff(c)
                if c[0] or c[1]:
                    _add_into(t, int(e), c)
            self._t, self._k = self._normalise(t, int(lam_power))
        self._hash = None

    @staticmethod
    def _normalise(t, k):
        if not t:
            return {}, 0
        while k > 0:
            d = _div_lambda(t)
            if d is None:
                break
            t = d
            k -= 1
        while k < 0:
            t = _times_lambda(t)
            k += 1
        return t, k

    @classmethod
    def _make(cls, t, k):
        t, k = cls._normalise(t, k)
        return cls(t, k, _canonical=True)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def coerce(cls, x) -> "QScalar":
        if isinstance(x, QScalar):
            return x
        c = _coeff(x)
        if not (c[0] or c[1]):
            return ZERO
        return cls({0: c}, 0, _canonical=True)

    @classmethod
    def monomial(cls, coeff, q_exponent=0) -> "QScalar":
        """``coeff * q^q_exponent``; the exponent must be a multiple of 1/12."""
        c = _coeff(coeff)
        if not (c[0] or c[1]):
            return ZERO
        return cls({_ticks(q_exponent): c}, 0, _canonical=True)

    # -- inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict:
        """Numerator terms as ``{q-exponent (Fraction): (re, im)}``."""
        return {Fraction(e, TICKS): c for e, c in self._t.items()}

    @property
    def lambda_power(self) -> int:
        """Power of lambda in the denominator."""
        return self._k

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_one(self) -> bool:
        return self._k == 0 and len(self._t) == 1 and self._t.get(0) == (_ONE, _ZERO)

    def is_monomial(self) -> bool:
        return self._k == 0 and len(self._t) == 1

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not other._t:
            return self
        if not self._t:
            return other
        a, b = self._t, other._t
        ka, kb = self._k, other._k
        if ka < kb:
            for _ in range(kb - ka):
                a = _times_lambda(a)
            k = kb
        else:
            for _ in range(ka - kb):
                b = _times_lambda(b)
            k = ka
        out = dict(a)
        for e, c in b.items():
            _add_into(out, e, c)
        if k == 0:
            return QScalar(out, 0, _canonical=True)
        return QScalar._make(out, k)

    __radd__ = __add__

    def __neg__(self):
        return QScalar({e: (-c[0], -c[1]) for e, c in self._t.items()}, self._k, _canonical=True)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not self._t or not other._t:
            return ZERO
        t = _poly_mul(self._t, other._t)
        k = self._k + other._k
        if k == 0:
            return QScalar(t, 0, _canonical=True)
        return QScalar._make(t, k)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self
        if n < 0:
            base = self.inv_unit()
            n = -n
        out = ONE
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self * other.inv_unit()

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other * self.inv_unit()

    def conj(self) -> "QScalar":
        """Phase conjugation: ``q -> q^-1`` and ``i -> -i``."""
        sign = -1 if self._k % 2 else 1
        t = {-e: (sign * c[0], -sign * c[1]) for e, c in self._t.items()}
        return QScalar(t, self._k, _canonical=True)

    def unit_decomposition(self):
        """Return ``(coeff, ticks, lam_exp)`` with self = coeff * q^(ticks/12) * lambda^lam_exp.

        Raises NotAUnit if the scalar is not of that shape.
        """
        if not self._t:
            raise NotAUnit("zero is not a unit")
        t = self._t
        j = 0
        while len(t) > 1:
            d = _div_lambda(t)
            if d is None:
                raise NotAUnit(f"{self} is not a unit")
            t = d
            j += 1
        (e, c), = t.items()
        return c, e, j - self._k

    def is_unit(self) -> bool:
        try:
            self.unit_decomposition()
        except NotAUnit:
            return False
        return True

    def inv_unit(self) -> "QScalar":
        c, e, j = self.unit_decomposition()
        mono = {-e: _ginv(c)}
        if j <= 0:
            t = mono
            for _ in range(-j):
                t = _times_lambda(t)
            return QScalar(t, 0, _canonical=True)
        return QScalar(mono, j, _canonical=True)

    # -- comparison / hashing -------------------------------------------------
    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self._k == other._k and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._t.items()), self._k))
        return self._hash

    # -- rendering ------------------------------------------------------------
    def __str__(self):
        if not self._t:
            return "0"
        pieces = []
        for e in sorted(self._t, reverse=True):
            pieces.append(_fmt_term(self._t[e], e))
        body = pieces[0]
        for p in pieces[1:]:
            body += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        if self._k == 0:
            return body
        if len(pieces) > 1:
            body = f"({body})"
        if body in ("1", "-1"):
            return f"{body[:-1]}lambda^-{self._k}"
        return f"{body}*lambda^-{self._k}"

    def __repr__(self):
        return f"QScalar({self})"


def _fmt_coeff(c) -> str:
    re, im = c
    if not im:
        return _fmt_rational(re)
    if not re:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return f"{_fmt_rational(im)}*i"
    sign = "-" if im < 0 else "+"
    mag = abs(im)
    imag = "i" if mag == 1 else f"{_fmt_rational(mag)}*i"
    return f"({_fmt_rational(re)}{sign}{imag})"


def _fmt_term(c, e) -> str:
    cs = _fmt_coeff(c)
    if e == 0:
        return cs
    p = _fmt_power(e)
    if cs == "1":
        return p
    if cs == "-1":
        return "-" + p
    return f"{cs}*{p}"


def _lift(x):
    if isinstance(x, QScalar):
        return x
    if isinstance(x, (int, Fraction, complex)):
        return QScalar.coerce(x)
    return NotImplemented


def _ticks(k) -> int:
    e = Fraction(k) * TICKS
    if e.denominator != 1:
        raise ValueError(f"q-exponent {k} is not a multiple of 1/{TICKS}")
    return int(e)


ZERO = QScalar({}, 0, _canonical=True)
ONE = QScalar({0: (_ONE, _ZERO)}, 0, _canonical=True)
I = QScalar({0: (_ZERO, _ONE)}, 0, _canonical=True)
Q = QScalar({TICKS: (_ONE, _ZERO)}, 0, _canonical=True)
LAM = Q - QScalar({-TICKS: (_ONE, _ZERO)}, 0, _canonical=True)


def qpow(k) -> QScalar:
    """``q^k`` for ``k`` a multiple of 1/12 (int, Fraction or "a/b" string)."""
    return QScalar.monomial(1, k)
