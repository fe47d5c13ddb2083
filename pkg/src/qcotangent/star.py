"""Anti-involutions at the scalar tier.

Compact form: defined on the enveloping letters only, read off entrywise from
``Op^dag = Om``.  Because ``(q^(-1/2) lambda)^* = -q^(1/2) lambda`` this gives
``Xp* = Xm`` and, from the diagonals, ``Kinv* = K``.

Hyperboloid form: ``g^dag = g`` on the g letters, plus ``Omega^dag = Sigma``.
Individual Omega entries are not letters of the catalog, so the hyperboloid
star acts on an extended alphabet with formal letters ``W[i,j]`` standing for
the entries of ``Omega``.  The image of ``W[j,i]`` is ``(g^-1 W g)[i,j]``;
results are realised by substituting ``W -> Omega(K, X)`` and reducing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NoImage
from .freealg import Alphabet, NCPoly
from .heisenberg import (
    RELATION_SPECS,
    OpMatrix,
    TStarAlgebra,
    algebra,
    build_g,
    catalog,
    expand_matrix_relation,
    gname,
    inverse_pair_relations,
    quantum_det,
)
from .rmat import build_Rminus, build_Rplus

__all__ = [
    "StarMap",
    "compact",
    "hyperboloid",
    "star_apply",
    "verify_star_closure",
    "check_involutivity",
    "ClosureReport",
    "omega_letter",
]

FORMS = ("compact", "hyperboloid")


def omega_letter(i: int, j: int) -> str:
    return f"W[{i},{j}]"


@lru_cache(maxsize=None)
def extended_alphabet() -> Alphabet:
    """The n = 2 catalog followed by the formal Omega-entry letters."""
    base = catalog(2)
    ws = [omega_letter(i, j) for i in (1, 2) for j in (1, 2)]
    return Alphabet(base.names + tuple(ws), base.meta + tuple(("W", i, j) for i in (1, 2) for j in (1, 2)))


def substitute(p: NCPoly, images: dict, alphabet: Alphabet, reverse: bool = False, conj: bool = False) -> NCPoly:
    """Letterwise substitution; ``reverse``/``conj`` turn it into an antilinear antihomomorphism."""
    out = NCPoly.scalar(0, alphabet)
    src = p.alphabet
    for w, c in p.terms.items():
        term = NCPoly.scalar(c.conj() if conj else c, alphabet)
        for x in (reversed(w) if reverse else w):
            name = src.name(x)
            img = images.get(name)
            if img is None:
                raise NoImage(name, _hint(name))
            term = term * img
        out = out + term
    return out


def _hint(name):
    if name.startswith("g["):
        return "g^dag = h lives at the matrix tier; use `check star --tier matrix`"
    return "Omega_pm^dag = Sigma_mp^-1 lives at the matrix tier; use `check star --tier matrix`"


@dataclass(frozen=True)
class StarMap:
    """Generator images of an anti-involution; products are reversed and coefficients conjugated."""

    form: str
    images: dict
    alphabet: Alphabet
    realise: dict | None = None   # W letters -> catalog polynomials (hyperboloid only)

    def domain(self):
        return tuple(n for n in self.alphabet.names if n in self.images)

    def __hash__(self):
        return hash((self.form, tuple(sorted((k, v.render()) for k, v in self.images.items()))))


def _lift(p: NCPoly, alphabet):
    """Re-home a catalog polynomial in ``alphabet`` (catalog letters keep their indices)."""
    return NCPoly._raw(dict(p.terms), alphabet)


def compact(images_override: dict | None = None) -> StarMap:
    A = catalog(2)
    images = {"K": A.gen("Kinv"), "Kinv": A.gen("K"), "Xp": A.gen("Xm"), "Xm": A.gen("Xp")}
    if images_override:
        images.update({k: _as_poly(v, A) for k, v in images_override.items()})
    return StarMap("compact", images, A)


def _as_poly(v, A):
    return A.gen(v) if isinstance(v, str) else v


def hyperboloid(images_override: dict | None = None, alg: TStarAlgebra | None = None) -> StarMap:
    alg = alg or algebra()
    E = extended_alphabet()
    images = {gname(i, j): E.gen(gname(j, i)) for i in (1, 2) for j in (1, 2)}
    gi = alg.g_inv
    # W[j,i]* = (g^-1 W g)[i,j] = sum_{k,l} ginv[i,k] W[k,l] g[l,j]
    for i in (1, 2):
        for j in (1, 2):
            acc = NCPoly.scalar(0, E)
            for k in (1, 2):
                for l in (1, 2):
                    acc = acc + _lift(gi[i - 1, k - 1], E) * E.gen(omega_letter(k, l)) * E.gen(gname(l, j))
            images[omega_letter(j, i)] = acc
    if images_override:
        images.update({k: _as_poly(v, E) for k, v in images_override.items()})
    realise = {n: _lift(catalog(2).gen(n), catalog(2)) for n in catalog(2).names}
    for i in (1, 2):
        for j in (1, 2):
            realise[omega_letter(i, j)] = alg.Omega[i - 1, j - 1]
    return StarMap("hyperboloid", images, E, realise)


def get_form(form: str, **kw) -> StarMap:
    if form == "compact":
        return compact(**kw)
    if form == "hyperboloid":
        return hyperboloid(**kw)
    raise ValueError(f"unknown star form {form!r}; expected one of {FORMS}")


def realise(p: NCPoly, s: StarMap, alg: TStarAlgebra | None = None) -> NCPoly:
    """Map a polynomial in the star's alphabet to the catalog and reduce."""
    alg = alg or algebra()
    if s.realise is None or p.alphabet is catalog(2):
        return alg.nf(_lift(p, catalog(2)))
    return alg.nf(substitute(p, s.realise, catalog(2)))


def star_apply(p: NCPoly, s: StarMap, alg: TStarAlgebra | None = None, reduce: bool = True) -> NCPoly:
    """Antilinear antihomomorphic image of ``p``, realised and in normal form.

    Raises NoImage for letters whose image exists only at the matrix tier.
    """
    if p.alphabet is not s.alphabet:
        p = _lift(p, s.alphabet)
    img = substitute(p, s.images, s.alphabet, reverse=True, conj=True)
    return realise(img, s, alg) if reduce else img


# -- closure --------------------------------------------------------------------

def _relations_compact():
    out = [("K Kinv", r) for r in inverse_pair_relations()]
    for spec in RELATION_SPECS:
        out += [(spec.tag, r) for r in expand_matrix_relation(spec, 2)]
    return out


def _omega_formal():
    E = extended_alphabet()
    return OpMatrix([[E.gen(omega_letter(i, j)) for j in (1, 2)] for i in (1, 2)], E)


def _relations_hyperboloid(alg):
    E = extended_alphabet()
    out = [("K Kinv", _lift(r, E)) for r in inverse_pair_relations()]
    for spec in RELATION_SPECS:
        out += [(spec.tag, _lift(r, E)) for r in expand_matrix_relation(spec, 2)]
    out.append(("det_q(g) = 1", _lift(quantum_det(build_g(2)) - 1, E)))
    W = _omega_formal()
    gE = OpMatrix([[E.gen(gname(i, j)) for j in (1, 2)] for i in (1, 2)], E)
    Rp, Rm = build_Rplus(2), build_Rminus(2)
    W1, W2, g1 = W.in_space(1), W.in_space(2), gE.in_space(1)
    refl = W1 @ Rm.inverse() @ W2 @ Rm - Rp.inverse() @ W2 @ Rp @ W1
    exch = Rm @ g1 @ W2 - W2 @ Rp @ g1
    out += [("reflection", x) for _, x in refl.entries() if x]
    out += [("g-Omega exchange", x) for _, x in exch.entries() if x]
    return out


@dataclass
class ClosureReport:
    form: str
    entries: list = field(default_factory=list)   # (relation-id, status, detail)

    @property
    def ok(self) -> bool:
        return all(s != "fail" for _, s, _ in self.entries)

    def counts(self):
        out = {"pass": 0, "fail": 0, "deferred": 0}
        for _, s, _ in self.entries:
            out[s] += 1
        return out

    def to_dict(self):
        return {
            "form": self.form,
            "counts": self.counts(),
            "relations": [{"relation-id": r, "status": s, **({"detail": d} if d else {})}
                          for r, s, d in self.entries],
        }


def verify_star_closure(s: StarMap, alg: TStarAlgebra | None = None) -> ClosureReport:
    """Star every defining relation in the form's scalar-tier domain and reduce.

    Relations touching letters without a scalar-tier image are reported as
    deferred to the matrix tier.
    """
    alg = alg or algebra()
    rels = _relations_compact() if s.form == "compact" else _relations_hyperboloid(alg)
    report = ClosureReport(s.form)
    counters = {}
    for tag, r in rels:
        counters[tag] = counters.get(tag, 0) + 1
        rid = f"{tag}#{counters[tag]}"
        if realise(r, s, alg) != 0:
            report.entries.append((rid, "fail", "relation itself does not vanish"))
            continue
        try:
            img = star_apply(r, s, alg)
        except NoImage as exc:
            report.entries.append((rid, "deferred", f"matrix tier: {exc.generator}"))
            continue
        if img.is_zero():
            report.entries.append((rid, "pass", ""))
        else:
            report.entries.append((rid, "fail", img.render()))
    return report


@dataclass
class InvolutivityReport:
    form: str
    trials: int
    seed: int
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {"form": self.form, "trials": self.trials, "seed": self.seed,
                "failures": [{"poly": p, "star2": q} for p, q in self.failures]}


def random_poly(rng: random.Random, alphabet: Alphabet, letters, maxdeg: int = 4, nterms: int = 3) -> NCPoly:
    from .scalars import QScalar
    acc = NCPoly.scalar(0, alphabet)
    for _ in range(nterms):
        w = tuple(alphabet.index(rng.choice(letters)) for _ in range(rng.randint(0, maxdeg)))
        c = QScalar.monomial((rng.randint(-3, 3), rng.randint(-2, 2)), rng.randint(-4, 4) / 2)
        acc = acc + NCPoly.word(w, alphabet, c)
    return acc


def check_involutivity(s: StarMap, trials: int = 50, seed: int = 0, maxdeg: int | None = None,
                       alg: TStarAlgebra | None = None) -> InvolutivityReport:
    """``star(star(p)) == p`` after normal form, for every generator and seeded random ``p``.

    The hyperboloid images of ``W`` letters have degree 3, so random words
    default to degree 2 there (degree 4 for the compact form).
    """
    alg = alg or algebra()
    if maxdeg is None:
        maxdeg = 4 if s.form == "compact" else 2
    rng = random.Random(seed)
    letters = list(s.domain())
    report = InvolutivityReport(s.form, trials, seed)
    gens = [s.alphabet.gen(x) for x in letters]
    for p in gens + [random_poly(rng, s.alphabet, letters, maxdeg) for _ in range(trials)]:
        twice = star_apply(star_apply(p, s, alg, reduce=False), s, alg)
        if twice != realise(p, s, alg):
            report.failures.append((p.render(), twice.render()))
    return report
