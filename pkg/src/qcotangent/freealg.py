"""Free associative algebra over :class:`QScalar` and oriented-relation rewriting.

Letters are small integers whose numeric order *is* the generator precedence;
an :class:`Alphabet` carries the printable names.  Words are tuples of
letters compared degree-lexicographically, so ``(len(w), w)`` is the order
key used everywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import BudgetExceeded, CompletionDiverged, NotAUnit, NotOrientable
from .scalars import ONE, ZERO, QScalar

__all__ = [
    "Alphabet",
    "NCPoly",
    "RewriteRule",
    "RewriteSystem",
    "orient",
    "check_local_confluence",
    "critical_pairs",
    "complete",
    "interreduce",
    "word_key",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10**6


def word_key(w):
    return (len(w), w)


class Alphabet:
    """Ordered generator names; index ``i`` has precedence rank ``i``."""

    def __init__(self, names, meta=None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        self._index = {n: i for i, n in enumerate(self.names)}
        self.meta = tuple(meta) if meta is not None else (None,) * len(self.names)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def index(self, name) -> int:
        return self._index[name]

    def name(self, letter: int) -> str:
        return self.names[letter]

    def gen(self, name) -> "NCPoly":
        return NCPoly({(self._index[name],): ONE}, self)

    def word(self, *names) -> tuple:
        return tuple(self._index[n] for n in names)

    def render_word(self, w) -> str:
        if not w:
            return "1"
        return "*".join(self.names[x] for x in w)

    def __repr__(self):
        return f"Alphabet({list(self.names)!r})"


def _fmt_coeff_for_term(c: QScalar) -> str:
    s = str(c)
    if " " in s:
        return f"({s})"
    return s


class NCPoly:
    """Finite ``Word -> QScalar`` map; zero coefficients are never stored."""

    __slots__ = ("terms", "alphabet")

    def __init__(self, terms=None, alphabet=None):
        t = {}
        for w, c in (terms or {}).items():
            c = QScalar.coerce(c)
            if c:
                w = tuple(w)
                old = t.get(w)
                if old is None:
                    t[w] = c
                else:
                    s = old + c
                    if s:
                        t[w] = s
                    else:
                        del t[w]
        self.terms = t
        self.alphabet = alphabet

    @classmethod
    def _raw(cls, terms, alphabet):
        p = cls.__new__(cls)
        p.terms = terms
        p.alphabet = alphabet
        return p

    @classmethod
    def scalar(cls, c, alphabet=None) -> "NCPoly":
        c = QScalar.coerce(c)
        return cls._raw({(): c} if c else {}, alphabet)

    @classmethod
    def word(cls, w, alphabet=None, coeff=ONE) -> "NCPoly":
        coeff = QScalar.coerce(coeff)
        return cls._raw({tuple(w): coeff} if coeff else {}, alphabet)

    # -- inspection -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def leading(self):
        """``(word, coeff)`` of the degree-lex largest word."""
        w = max(self.terms, key=word_key)
        return w, self.terms[w]

    def letters(self) -> set:
        return {x for w in self.terms for x in w}

    def _alpha(self, other):
        return self.alphabet if self.alphabet is not None else other.alphabet

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other, self.alphabet)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for w, c in other.terms.items():
            old = t.get(w)
            if old is None:
                t[w] = c
            else:
                s = old + c
                if s:
                    t[w] = s
                else:
                    del t[w]
        return NCPoly._raw(t, self._alpha(other))

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw({w: -c for w, c in self.terms.items()}, self.alphabet)

    def __sub__(self, other):
        other = _as_poly(other, self.alphabet)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other, self.alphabet)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (QScalar, int)):
            c = QScalar.coerce(other)
            if not c:
                return NCPoly._raw({}, self.alphabet)
            return NCPoly._raw({w: v * c for w, v in self.terms.items()}, self.alphabet)
        other = _as_poly(other, self.alphabet)
        if other is NotImplemented:
            return other
        t = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                old = t.get(w)
                if old is None:
                    t[w] = c
                else:
                    s = old + c
                    if s:
                        t[w] = s
                    else:
                        del t[w]
        return NCPoly._raw(t, self._alpha(other))

    def __rmul__(self, other):
        if isinstance(other, (QScalar, int)):
            return self * other
        other = _as_poly(other, self.alphabet)
        if other is NotImplemented:
            return other
        return other * self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = NCPoly.scalar(1, self.alphabet)
        for _ in range(n):
            out = out * self
        return out

    def map_coefficients(self, f) -> "NCPoly":
        return NCPoly({w: f(c) for w, c in self.terms.items()}, self.alphabet)

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        other = _as_poly(other, self.alphabet)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- rendering ------------------------------------------------------------
    def render(self, alphabet=None) -> str:
        alpha = alphabet or self.alphabet
        if not self.terms:
            return "0"
        out = []
        for w in sorted(self.terms, key=word_key, reverse=True):
            c = self.terms[w]
            ws = alpha.render_word(w) if alpha is not None else "*".join(f"x{x}" for x in w) or "1"
            if not w:
                piece = str(c)
                if " " in piece:
                    piece = f"({piece})"
            elif c.is_one():
                piece = ws
            elif (-c).is_one():
                piece = "-" + ws
            else:
                piece = f"{_fmt_coeff_for_term(c)}*{ws}"
            out.append(piece)
        s = out[0]
        for p in out[1:]:
            s += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return s

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"NCPoly({self.render()})"


def _as_poly(x, alphabet):
    if isinstance(x, NCPoly):
        return x
    if isinstance(x, (QScalar, int)):
        return NCPoly.scalar(x, alphabet)
    return NotImplemented


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple
    rhs: NCPoly
    source: str = ""

    def relation(self) -> NCPoly:
        return NCPoly.word(self.lhs, self.rhs.alphabet) - self.rhs

    def render(self, alphabet=None) -> str:
        alpha = alphabet or self.rhs.alphabet
        return f"{alpha.render_word(self.lhs)} -> {self.rhs.render(alpha)}"


class RewriteSystem:
    """Ordered list of length-decreasing rules plus the alphabet they live in.

    Normal forms are memoised per reduction strategy; the cache is the only
    mutable state and never changes results.
    """

    def __init__(self, alphabet: Alphabet, rules=(), budget: int = DEFAULT_BUDGET):
        self.alphabet = alphabet
        self.rules = tuple(rules)
        self.budget = budget
        self._by_lhs = {}
        for r in self.rules:
            if r.lhs in self._by_lhs:
                raise ValueError(f"duplicate lhs {alphabet.render_word(r.lhs)}")
            k = word_key(r.lhs)
            for w in r.rhs.terms:
                if word_key(w) >= k:
                    raise ValueError(f"rule {r.render(alphabet)} does not decrease the word order")
            self._by_lhs[r.lhs] = r
        self._lengths = sorted({len(r.lhs) for r in self.rules})
        self._cache = {"leftmost": {}, "rightmost": {}}

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def rule_for(self, lhs):
        return self._by_lhs.get(tuple(lhs))

    def with_rules(self, rules) -> "RewriteSystem":
        return RewriteSystem(self.alphabet, rules, self.budget)

    def sorted_rules(self):
        return sorted(self.rules, key=lambda r: word_key(r.lhs))

    def _match(self, w, strategy):
        by = self._by_lhs
        n = len(w)
        if strategy == "leftmost":
            positions = range(n)
        else:
            positions = range(n - 1, -1, -1)
        for i in positions:
            for L in self._lengths:
                if i + L > n:
                    break
                r = by.get(w[i:i + L])
                if r is not None:
                    return i, r
        return None

    def nf_word(self, w, strategy="leftmost", budget=None):
        """Normal form of a single word as a ``word -> QScalar`` dict (shared, do not mutate)."""
        cache = self._cache[strategy]
        hit = cache.get(w)
        if hit is not None:
            return hit
        budget = self.budget if budget is None else budget
        steps = 0
        pending = {}
        stack = [w]
        while stack:
            top = stack[-1]
            if top in cache:
                stack.pop()
                continue
            exp = pending.get(top)
            if exp is None:
                m = self._match(top, strategy)
                if m is None:
                    cache[top] = {top: ONE}
                    stack.pop()
                    continue
                i, rule = m
                steps += 1
                if steps > budget:
                    raise BudgetExceeded(f"normal form exceeded {budget} rewriting steps")
                pre, post = top[:i], top[i + len(rule.lhs):]
                exp = [(pre + rw + post, c) for rw, c in rule.rhs.terms.items()]
                pending[top] = exp
            missing = [u for u, _ in exp if u not in cache]
            if missing:
                stack.extend(missing)
                continue
            acc = {}
            for u, c in exp:
                for v, d in cache[u].items():
                    x = c * d
                    old = acc.get(v)
                    if old is None:
                        acc[v] = x
                    else:
                        s = old + x
                        if s:
                            acc[v] = s
                        else:
                            del acc[v]
            cache[top] = acc
            del pending[top]
            stack.pop()
        return cache[w]

    def nf(self, p: NCPoly, strategy="leftmost", budget=None) -> NCPoly:
        acc = {}
        for w, c in p.terms.items():
            for v, d in self.nf_word(w, strategy, budget).items():
                x = c * d
                old = acc.get(v)
                if old is None:
                    acc[v] = x
                else:
                    s = old + x
                    if s:
                        acc[v] = s
                    else:
                        del acc[v]
        return NCPoly._raw(acc, p.alphabet if p.alphabet is not None else self.alphabet)

    def is_normal(self, p: NCPoly) -> bool:
        return all(self._match(w, "leftmost") is None for w in p.terms)

    def render(self) -> str:
        return "\n".join(r.render(self.alphabet) for r in self.sorted_rules())


def orient(rel: NCPoly, system: RewriteSystem | None = None, max_lhs_len: int | None = 2,
           source: str = "") -> RewriteRule:
    """Turn ``rel = 0`` into a rule whose lhs is the leading word of ``rel``.

    ``rel`` is first reduced by ``system``.  With ``max_lhs_len=2`` the
    leading word must be exactly quadratic; ``None`` accepts any nonempty
    leading word (used by completion).
    """
    if system is not None:
        rel = system.nf(rel)
    if rel.is_zero():
        raise NotOrientable("relation is zero (nothing to orient)", rel)
    lead, c = rel.leading()
    if not lead:
        raise NotOrientable(f"relation reduces to the nonzero constant {c}", rel)
    if max_lhs_len is not None and len(lead) != max_lhs_len:
        raise NotOrientable(f"leading word has length {len(lead)}, expected {max_lhs_len}", rel)
    try:
        inv = c.inv_unit()
    except NotAUnit:
        raise NotOrientable(f"leading coefficient {c} is not a unit", rel) from None
    rest = {w: -(d * inv) for w, d in rel.terms.items() if w != lead}
    alpha = rel.alphabet if rel.alphabet is not None else (system.alphabet if system else None)
    return RewriteRule(lead, NCPoly._raw(rest, alpha), source)


def interreduce(alphabet, rules, budget=DEFAULT_BUDGET, max_lhs_len=None):
    """Mutually reduce ``rules`` until every lhs and rhs is irreducible by the others."""
    rules = list(rules)
    changed = True
    while changed:
        changed = False
        for i, r in enumerate(rules):
            others = RewriteSystem(alphabet, rules[:i] + rules[i + 1:], budget)
            rel = others.nf(r.relation())
            if rel.is_zero():
                del rules[i]
                changed = True
                break
            new = orient(rel, None, max_lhs_len, r.source)
            if new.lhs != r.lhs or new.rhs != r.rhs:
                if others.rule_for(new.lhs) is not None:
                    raise NotOrientable("interreduction produced a duplicate lhs", rel)
                rules[i] = new
                changed = True
                break
    return RewriteSystem(alphabet, rules, budget)


def _overlaps(l1, l2):
    """Proper overlaps: suffix of ``l1`` equals prefix of ``l2``."""
    for k in range(1, min(len(l1), len(l2))):
        if l1[-k:] == l2[:k]:
            yield l1 + l2[k:], len(l1) - k


def critical_pairs(system: RewriteSystem):
    """Nonzero residues of all overlap and inclusion ambiguities.

    Returns a list of ``(word, residue)``; empty means the system is
    confluent (every ambiguity resolves).
    """
    out = []
    alpha = system.alphabet
    rules = system.sorted_rules()
    for r1 in rules:
        for r2 in rules:
            cands = list(_overlaps(r1.lhs, r2.lhs))
            if r1 is not r2:
                L = len(r2.lhs)
                for i in range(len(r1.lhs) - L + 1):
                    if r1.lhs[i:i + L] == r2.lhs:
                        cands.append(("incl", i))
            for w, pos in cands:
                if w == "incl":
                    w = r1.lhs
                    left = r1.rhs
                    pre, post = w[:pos], w[pos + len(r2.lhs):]
                else:
                    left = r1.rhs * NCPoly.word(w[len(r1.lhs):], alpha)
                    pre, post = w[:pos], ()
                right = NCPoly.word(pre, alpha) * r2.rhs * NCPoly.word(post, alpha)
                diff = system.nf(left - right)
                if diff:
                    out.append((w, diff))
    return out


def complete(system: RewriteSystem, max_rounds: int = 10) -> RewriteSystem:
    """Bounded Knuth-Bendix style completion.

    Returns ``system`` itself when it has no unresolved critical pairs.
    """
    current = system
    for _ in range(max_rounds):
        residues = critical_pairs(current)
        if not residues:
            return current
        rules = list(current.rules)
        for w, res in residues:
            tmp = RewriteSystem(current.alphabet, rules, current.budget)
            res = tmp.nf(res)
            if res.is_zero():
                continue
            new = orient(res, None, None, f"critical pair {current.alphabet.render_word(w)}")
            rules.append(new)
        current = interreduce(current.alphabet, rules, current.budget)
    if critical_pairs(current):
        raise CompletionDiverged(f"new rules still appearing after {max_rounds} rounds")
    return current


@dataclass
class ConfluenceReport:
    trials: int
    maxdeg: int
    seed: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self, alphabet=None):
        return {
            "trials": self.trials,
            "maxdeg": self.maxdeg,
            "seed": self.seed,
            "mismatches": [
                {
                    "word": alphabet.render_word(w) if alphabet else list(w),
                    "leftmost": left.render(alphabet),
                    "rightmost": right.render(alphabet),
                }
                for w, left, right in self.mismatches
            ],
        }


def check_local_confluence(system: RewriteSystem, maxdeg: int = 5, trials: int = 1000,
                           seed: int = 0, letters=None) -> ConfluenceReport:
    """Reduce random words with two strategies and report disagreements."""
    rng = random.Random(seed)
    letters = list(range(len(system.alphabet))) if letters is None else list(letters)
    report = ConfluenceReport(trials, maxdeg, seed)
    if not letters or maxdeg < 1:
        return report
    for _ in range(trials):
        n = rng.randint(1, maxdeg)
        w = tuple(rng.choice(letters) for _ in range(n))
        p = NCPoly.word(w, system.alphabet)
        left = system.nf(p, "leftmost")
        right = system.nf(p, "rightmost")
        if left != right:
            report.mismatches.append((w, left, right))
    return report
