"""Matrix-tier equational prover.

Words are products of whole-matrix symbols (``g``, ``Op``, ``Om``, ``Sp``,
``Sm``, ``h``, ``Omega``, ``Sigma``, ``ML``, ``MR``, ``R+``, ``R-``, ``P``),
single-matrix symbols carrying a tensor-space label 1 or 2 (or none in
one-space contexts).  Text syntax: ``g_1``, ``Sm_2^-1``, ``R+``, ``P``.

Equations are turned into relators ``L R^-1 = c``; every cyclic rotation of a
relator (or of its inverse) split as ``u v`` gives a rewrite piece
``u -> c v^-1``.  Words are kept in a canonical form: free cancellation, plus
the commutation of Omega-family with Sigma-family symbols living in
different tensor spaces (their entries commute), with the lexicographically
least representative of the commutation class.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import ExprSyntaxError, NotProved
from .scalars import ONE, QScalar

__all__ = [
    "MatSymbol",
    "MatWord",
    "MatEquation",
    "ProofStep",
    "ProofTrace",
    "RuleBase",
    "parse_word",
    "parse_equation",
    "canon",
    "dagger_word",
    "build_rulebase",
    "prove_equal",
    "verify_involution_consistency",
    "evolve_check",
    "wznw_periodicity_check",
    "HYPERBOLOID_IMAGES",
    "COMPACT_IMAGES",
]

NAMES = ("R+", "R-", "P", "g", "h", "Op", "Om", "Omega", "ML", "Sp", "Sm", "Sigma", "MR")
GLOBAL = frozenset({"R+", "R-", "P"})
OMEGA_FAMILY = frozenset({"Op", "Om", "Omega", "ML"})
SIGMA_FAMILY = frozenset({"Sp", "Sm", "Sigma", "MR"})
SINGLE = tuple(n for n in NAMES if n not in GLOBAL)
_RANK = {n: i for i, n in enumerate(NAMES)}

# symbol code = rank * 8 + space * 2 + inverted
_P = _RANK["P"] * 8


def _code(name, space=0, inv=False):
    if name in GLOBAL:
        space = 0
    if name == "P":
        inv = False
    return _RANK[name] * 8 + space * 2 + int(inv)


def _name(c):
    return NAMES[c >> 3]


def _space(c):
    return (c >> 1) & 3


def _inv(c):
    return c if c == _P else c ^ 1


def _family(c):
    n = NAMES[c >> 3]
    if n in OMEGA_FAMILY:
        return 1
    if n in SIGMA_FAMILY:
        return 2
    return 0


_NCODES = len(NAMES) * 8
_COMMUTE = [[False] * _NCODES for _ in range(_NCODES)]
for _a in range(_NCODES):
    for _b in range(_NCODES):
        sa, sb = _space(_a), _space(_b)
        fa, fb = _family(_a), _family(_b)
        _COMMUTE[_a][_b] = bool(sa and sb and sa != sb and {fa, fb} == {1, 2})


def _render_code(c):
    n = _name(c)
    s = _space(c)
    out = n + (f"_{s}" if s else "")
    if c & 1 and c != _P:
        out += "^-1"
    return out


@dataclass(frozen=True, order=True)
class MatSymbol:
    name: str
    space: int = 0
    inverted: bool = False

    def __post_init__(self):
        if self.name not in _RANK:
            raise ValueError(f"unknown matrix symbol {self.name!r}")
        if self.space not in (0, 1, 2):
            raise ValueError(f"space must be 0, 1 or 2, got {self.space}")

    @property
    def code(self) -> int:
        return _code(self.name, self.space, self.inverted)

    @classmethod
    def from_code(cls, c):
        return cls(_name(c), _space(c), bool(c & 1) and c != _P)

    def __str__(self):
        return _render_code(self.code)


# -- canonical form ---------------------------------------------------------------

def _cancel(w):
    w = list(w)
    i = 0
    while i < len(w):
        x = w[i]
        xi = _inv(x)
        row = _COMMUTE[x]
        hit = -1
        for j in range(i + 1, len(w)):
            y = w[j]
            if y == xi:
                hit = j
                break
            if not row[y]:
                break
        if hit >= 0:
            del w[hit]
            del w[i]
            # a cancellation can expose new pairs to the left
            i = 0
        else:
            i += 1
    return w


def _lexmin(w):
    rest = list(w)
    out = []
    while rest:
        best = 0
        for k in range(1, len(rest)):
            x = rest[k]
            if x < rest[best]:
                row = _COMMUTE[x]
                if all(row[rest[j]] for j in range(k)):
                    best = k
        out.append(rest.pop(best))
    return out


def _has_commuting(w):
    fams = {(_family(c), _space(c)) for c in w}
    return any(f == 1 and s for f, s in fams) and any(f == 2 and s for f, s in fams)


def canon(w) -> tuple:
    """Canonical representative of a symbol-code word."""
    w = _cancel(w)
    if _has_commuting(w):
        w = _lexmin(w)
    return tuple(w)


def _linearizations(w, cap=48):
    """Words in the commutation class of ``w`` (breadth-first over adjacent swaps)."""
    if not _has_commuting(w):
        return [w]
    seen = {w: None}
    queue = deque([w])
    while queue and len(seen) < cap:
        x = queue.popleft()
        for i in range(len(x) - 1):
            if _COMMUTE[x[i]][x[i + 1]]:
                y = x[:i] + (x[i + 1], x[i]) + x[i + 2:]
                if y not in seen:
                    seen[y] = None
                    queue.append(y)
    return list(seen)


def _inverse_word(w):
    return tuple(_inv(c) for c in reversed(w))


# -- words and equations -------------------------------------------------------------

@dataclass(frozen=True)
class MatWord:
    codes: tuple
    scalar: QScalar = ONE

    @classmethod
    def of(cls, symbols, scalar=ONE):
        return cls(canon([s.code if isinstance(s, MatSymbol) else s for s in symbols]), QScalar.coerce(scalar))

    @property
    def symbols(self):
        return tuple(MatSymbol.from_code(c) for c in self.codes)

    def __len__(self):
        return len(self.codes)

    def __mul__(self, other: "MatWord") -> "MatWord":
        return MatWord(canon(self.codes + other.codes), self.scalar * other.scalar)

    def inverse(self) -> "MatWord":
        return MatWord(canon(_inverse_word(self.codes)), self.scalar.inv_unit())

    def render(self) -> str:
        body = " ".join(_render_code(c) for c in self.codes) or "1"
        if self.scalar.is_one():
            return body
        return f"({self.scalar}) {body}"

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class MatEquation:
    lhs: MatWord
    rhs: MatWord
    tag: str
    source: str = ""
    derivation: dict | None = field(default=None, compare=False, hash=False)

    def relator(self):
        """``(codes, c)`` with ``lhs rhs^-1 = c``."""
        return (self.lhs.codes + _inverse_word(self.rhs.codes), self.rhs.scalar / self.lhs.scalar)

    def render(self) -> str:
        return f"{self.lhs.render()} = {self.rhs.render()}"

    def to_dict(self):
        out = {"tag": self.tag, "equation": self.render(), "source": self.source}
        if self.derivation:
            out["derivation"] = self.derivation
        return out


def parse_word(text: str) -> MatWord:
    """Parse ``"R+ g_1 g_2"``; tokens separated by spaces, ``*`` or ``.``."""
    codes = []
    scalar = ONE
    pos = 0
    for tok in text.replace("*", " ").replace("·", " ").split():
        pos = text.find(tok, pos)
        if tok == "1":
            continue
        inv = tok.endswith("^-1")
        core = tok[:-3] if inv else tok
        name, _, sp = core.partition("_")
        if name not in _RANK:
            raise ExprSyntaxError(f"unknown matrix symbol {name!r}", text, pos)
        if sp and sp not in ("1", "2"):
            raise ExprSyntaxError(f"bad space label {sp!r}", text, pos)
        space = int(sp) if sp else 0
        if name in GLOBAL and space:
            raise ExprSyntaxError(f"{name} acts on both spaces and takes no label", text, pos)
        codes.append(_code(name, space, inv))
    return MatWord(canon(codes), scalar)


def parse_equation(text: str, tag: str = "", source: str = "") -> MatEquation:
    lhs, eq, rhs = text.partition("=")
    if not eq:
        raise ExprSyntaxError("expected '='", text, len(text))
    return MatEquation(parse_word(lhs), parse_word(rhs), tag or text.strip(), source)


# -- dagger ---------------------------------------------------------------------------

HYPERBOLOID_IMAGES = {
    "g": "g", "h": "h",
    "Op": "Sm^-1", "Om": "Sp^-1", "Sp": "Om^-1", "Sm": "Op^-1",
    "Omega": "Sigma", "Sigma": "Omega", "ML": "MR", "MR": "ML",
    "R+": "R-", "R-": "R+", "P": "P",
}

COMPACT_IMAGES = {
    "g": "h", "h": "g",
    "Op": "Om", "Om": "Op", "Sp": "Sm", "Sm": "Sp",
    "R+": "R-", "R-": "R+", "P": "P",
}

# composite symbols are expanded into their Borel factors before the compact map
COMPOSITES = {"Omega": "Op Om^-1", "Sigma": "Sp Sm^-1", "ML": "Op Om^-1", "MR": "Sp Sm^-1"}


def _image_table(form, images):
    if images is not None:
        return images
    if form == "hyperboloid":
        return HYPERBOLOID_IMAGES
    if form == "compact":
        return COMPACT_IMAGES
    raise ValueError(f"unknown star form {form!r}")


def _symbol_image(c, table, form):
    name, space = _name(c), _space(c)
    if name not in table and form == "compact" and name in COMPOSITES:
        # (A B^-1)^dag = (B^dag)^-1 A^dag
        word = []
        for tok in reversed(COMPOSITES[name].split()):
            inv = tok.endswith("^-1")
            word.extend(_symbol_image(_code(tok[:-3] if inv else tok, space, inv), table, form))
        img = tuple(word)
        return _inverse_word(img) if c & 1 else img
    target = table.get(name)
    if target is None:
        raise KeyError(f"no {form} image for {name}")
    out = []
    for tok in target.split():
        inv = tok.endswith("^-1")
        n = tok[:-3] if inv else tok
        out.append(_code(n, space, inv))
    out = tuple(out)
    if c & 1 and c != _P:
        out = _inverse_word(out)
    return out


def dagger_word(w: MatWord, form: str, images: dict | None = None) -> MatWord:
    """Reverse the word, map every symbol, conjugate the prefactor.

    Inverted symbols map through ``(X^-1)^dag = (X^dag)^-1``.
    """
    table = _image_table(form, images)
    out = []
    for c in reversed(w.codes):
        out.extend(_symbol_image(c, table, form))
    return MatWord(canon(out), w.scalar.conj())


def dagger_equation(eq: MatEquation, form: str, images: dict | None = None) -> MatEquation:
    return MatEquation(dagger_word(eq.lhs, form, images), dagger_word(eq.rhs, form, images),
                       f"dag[{form}]({eq.tag})", eq.source)


def swap_spaces(w: MatWord) -> MatWord:
    """Conjugation by P: labels 1 <-> 2, ``R+ -> R-^-1``, ``R- -> R+^-1``."""
    out = []
    for c in w.codes:
        name, space, inv = _name(c), _space(c), bool(c & 1)
        if name == "R+":
            out.append(_code("R-", 0, not inv))
        elif name == "R-":
            out.append(_code("R+", 0, not inv))
        elif space:
            out.append(_code(name, 3 - space, inv))
        else:
            out.append(c)
    return MatWord(canon(out), w.scalar)


# -- rule base --------------------------------------------------------------------------

TRANSCRIBED = (
    ("RmRp", "R- = P R+^-1 P", "R_- = P R_+^-1 P"),
    ("Rgg+", "R+ g_1 g_2 = g_2 g_1 R+", "R g g"),
    ("Rgg-", "R- g_1 g_2 = g_2 g_1 R-", "R g g"),
    ("RLL++/R+", "R+ Op_1 Op_2 = Op_2 Op_1 R+", "Borel exchange, first line"),
    ("RLL++/R-", "R- Op_1 Op_2 = Op_2 Op_1 R-", "Borel exchange, first line"),
    ("RLL--/R+", "R+ Om_1 Om_2 = Om_2 Om_1 R+", "Borel exchange, second line"),
    ("RLL--/R-", "R- Om_1 Om_2 = Om_2 Om_1 R-", "Borel exchange, second line"),
    ("RLL+-", "R+ Op_1 Om_2 = Om_2 Op_1 R+", "Borel exchange, third line (corrected left side)"),
    ("RLL-+", "R- Om_1 Op_2 = Op_2 Om_1 R-", "Borel exchange, fourth line"),
    ("RLg+", "R+ Op_1 g_2 = g_2 Op_1", "Borel-g exchange, first line"),
    ("RLg-", "R- Om_1 g_2 = g_2 Om_1", "Borel-g exchange, second line"),
    ("reflection", "Omega_1 R-^-1 Omega_2 R- = R+^-1 Omega_2 R+ Omega_1", "Omega reflection relation"),
    ("g-Omega", "R- g_1 Omega_2 = Omega_2 R+ g_1", "g-Omega exchange"),
)

DEFINITIONS = (
    ("def Omega", "Omega = Op Om^-1"),
    ("def Sigma", "Sigma = g^-1 Omega g"),
    ("def Sigma+-", "Sigma = Sp Sm^-1"),
    ("def h+", "h = Sp^-1 g^-1 Op"),
    ("def h-", "h = Sm^-1 g^-1 Om"),
    ("def ML", "ML = Omega"),
    ("def MR", "MR = Sigma"),
)

# dagger images that enter the base as Sigma / h relations, with the form used
GENERATED = (
    ("hyperboloid", "RLL++/R+"), ("hyperboloid", "RLL++/R-"),
    ("hyperboloid", "RLL--/R+"), ("hyperboloid", "RLL--/R-"),
    ("hyperboloid", "RLL+-"), ("hyperboloid", "RLL-+"),
    ("hyperboloid", "reflection"), ("hyperboloid", "g-Omega"),
    ("compact", "Rgg+"), ("compact", "Rgg-"),
)

# h-Sigma exchange relations; each is certified by an explicit derivation of
# the hyperboloid image of the matching Borel-g exchange line
H_SIGMA = (
    ("hSm", "h_1 Sm_2 = Sm_2 R+ h_1", "RLg+"),
    ("hSp", "h_1 Sp_2 = Sp_2 R- h_1", "RLg-"),
)


def _labelled(text, space):
    if not space:
        return text
    out = []
    for tok in text.split():
        if tok == "=":
            out.append(tok)
            continue
        inv = tok.endswith("^-1")
        core = tok[:-3] if inv else tok
        out.append(f"{core}_{space}" + ("^-1" if inv else ""))
    return " ".join(out)


def relator_key(eq: MatEquation):
    """Rotation/inversion invariant key of the relator (for de-duplication)."""
    codes, c = eq.relator()
    r = canon(codes)
    if not r:
        return ((), c)
    cands = []
    for word, scal in ((r, c), (_inverse_word(r), c.inv_unit())):
        for k in range(len(word)):
            cands.append((word[k:] + word[:k], str(scal)))
    return min(cands)


def present(codes, c, tag, source="", derivation=None) -> MatEquation:
    """Choose a readable equation ``L = R`` for the relator ``codes = c``.

    Among all rotations/inversions and splits, prefer the fewest inverted
    symbols, then balanced sides, then lexicographic order.
    """
    best = None
    r = tuple(codes)
    for word, scal in ((r, c), (_inverse_word(r), c.inv_unit())):
        for k in range(len(word)):
            rot = word[k:] + word[:k]
            for s in range(1, len(rot)):
                L, V = rot[:s], rot[s:]
                R = _inverse_word(V)
                ninv = sum(1 for x in L + R if x & 1 and x != _P)
                score = (ninv, abs(len(L) - len(R)), len(L) < len(R), L, R)
                if best is None or score < best[0]:
                    best = (score, L, R, scal)
    _, L, R, scal = best
    return MatEquation(MatWord(canon(L)), MatWord(canon(R), scal), tag, source, derivation)


@dataclass
class RuleBase:
    rules: list
    form_independent: bool = True

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def by_tag(self, tag) -> MatEquation:
        for r in self.rules:
            if r.tag == tag:
                return r
        raise KeyError(tag)

    def with_rules(self, extra) -> "RuleBase":
        return RuleBase(list(self.rules) + list(extra), self.form_independent)

    def to_dict(self):
        return [r.to_dict() for r in self.rules]


def _transcribed():
    out = []
    for tag, text, src in TRANSCRIBED:
        out.append(parse_equation(text, tag, src))
    for name in SINGLE:
        out.append(parse_equation(f"{name}_2 = P {name}_1 P", f"PXP {name}", "space relabelling X^2 = P X^1 P"))
    for tag, text in DEFINITIONS:
        for sp in (0, 1, 2):
            out.append(parse_equation(_labelled(text, sp), f"{tag}" + (f"/{sp}" if sp else ""), "definition"))
    for a in sorted(OMEGA_FAMILY, key=_RANK.get):
        for b in sorted(SIGMA_FAMILY, key=_RANK.get):
            for sa, sb in ((1, 2), (2, 1)):
                out.append(parse_equation(f"{a}_{sa} {b}_{sb} = {b}_{sb} {a}_{sa}", f"commute {a}_{sa} {b}_{sb}",
                                          "Omega and Sigma entries commute"))
    return out


def build_rulebase(form: str | None = None, include_swaps: bool = True) -> RuleBase:
    """Transcribed relations, definitions, generated dagger images and P-conjugates.

    The base does not depend on ``form``; the argument is accepted for
    symmetry with the other entry points.
    """
    rules = _transcribed()
    by_tag = {r.tag: r for r in rules}
    for f, tag in GENERATED:
        img = dagger_equation(by_tag[tag], f)
        codes, c = img.relator()
        eq = present(canon(codes), c, f"dag[{f}]({tag})",
                     f"{f} dagger image of {tag}", {"kind": "dagger-image", "form": f, "of": tag})
        rules.append(eq)
    for tag, text, of in H_SIGMA:
        rules.append(parse_equation(text, tag, f"h-Sigma exchange; equivalent to the hyperboloid image of {of}"))
    if include_swaps:
        seen = {relator_key(r) for r in rules}
        extra = []
        for r in rules:
            sw = MatEquation(swap_spaces(r.lhs), swap_spaces(r.rhs), f"swap({r.tag})", "P-conjugate",
                             {"kind": "P-conjugate", "of": r.tag})
            k = relator_key(sw)
            if k not in seen:
                seen.add(k)
                extra.append(sw)
        rules += extra
    return RuleBase(rules)


# -- proof search ---------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    u: tuple
    v: tuple
    scalar: QScalar
    rule: int
    direction: str
    introduces_p: bool


def _pieces(base: RuleBase, max_growth: int = 2):
    table = {}
    for idx, eq in enumerate(base.rules):
        codes, c = eq.relator()
        r = canon(codes)
        if not r:
            continue
        for word, scal, direction in ((r, c, "->"), (_inverse_word(r), c.inv_unit(), "<-")):
            n = len(word)
            for k in range(n):
                rot = word[k:] + word[:k]
                for s in range(1, n + 1):
                    u, rest = rot[:s], rot[s:]
                    v = _inverse_word(rest)
                    if len(v) - len(u) > max_growth:
                        continue
                    if canon(u) != u:
                        continue
                    p = Piece(u, v, scal, idx, direction, _P in v and _P not in u)
                    key = (u, v)
                    old = table.get(key)
                    if old is None or old.rule > idx:
                        table[key] = p
    index = {}
    for (u, _), p in table.items():
        index.setdefault(u, []).append(p)
    for u in index:
        index[u].sort(key=lambda p: (p.rule, p.v, p.direction))
    return index


@dataclass(frozen=True)
class ProofStep:
    rule: str
    source: str
    position: int
    direction: str
    lhs_piece: str
    rhs_piece: str
    before: str
    after: str

    def to_dict(self):
        return {
            "rule": self.rule,
            "source": self.source,
            "position": self.position,
            "direction": self.direction,
            "replace": f"{self.lhs_piece} -> {self.rhs_piece}",
            "before": self.before,
            "after": self.after,
        }


@dataclass
class ProofTrace:
    lhs: MatWord
    rhs: MatWord
    steps: list
    explored: int = 0
    raw: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.steps)

    def replay(self) -> MatWord:
        """Re-apply every step from ``lhs``; raises AssertionError on a bad step."""
        cur = MatWord(canon(self.lhs.codes), self.lhs.scalar)
        for lin, pos, u, v, c, forward, nxt in self.raw:
            if forward:
                if canon(lin) != cur.codes or lin[pos:pos + len(u)] != u:
                    raise AssertionError("trace step does not apply")
                cur = MatWord(canon(lin[:pos] + v + lin[pos + len(u):]), cur.scalar * c)
            else:
                # step recorded from the other side: nxt --(u -> c v)--> cur
                if canon(lin) != nxt or lin[pos:pos + len(u)] != u:
                    raise AssertionError("trace step does not apply")
                if canon(lin[:pos] + v + lin[pos + len(u):]) != cur.codes:
                    raise AssertionError("trace step does not connect")
                cur = MatWord(nxt, cur.scalar * c.inv_unit())
        return cur

    def verify(self) -> bool:
        end = self.replay()
        target = MatWord(canon(self.rhs.codes), self.rhs.scalar)
        return end == target

    def to_dict(self):
        return {
            "lhs": self.lhs.render(),
            "rhs": self.rhs.render(),
            "length": len(self.steps),
            "steps": [s.to_dict() for s in self.steps],
        }


class Prover:
    """Bidirectional breadth-first search over canonical words."""

    def __init__(self, base: RuleBase, max_growth: int = 2):
        self.base = base
        self.index = _pieces(base, max_growth)
        self.maxu = max((len(u) for u in self.index), default=0)
        self._succ = {}

    def successors(self, w, allow_p=False):
        """Canonical one-step neighbours; P-introducing pieces need P in ``w`` or ``allow_p``."""
        key = (w, allow_p)
        hit = self._succ.get(key)
        if hit is not None:
            return hit
        out = []
        seen = set()
        has_p = allow_p or _P in w
        index = self.index
        for lin in _linearizations(w):
            n = len(lin)
            for i in range(n):
                for L in range(1, min(self.maxu, n - i) + 1):
                    ps = index.get(lin[i:i + L])
                    if not ps:
                        continue
                    for p in ps:
                        if p.introduces_p and not has_p:
                            continue
                        nw = canon(lin[:i] + p.v + lin[i + L:])
                        if nw in seen or nw == w:
                            continue
                        seen.add(nw)
                        out.append((nw, p.scalar, (lin, i, p)))
        self._succ[key] = out
        return out

    def prove(self, lhs: MatWord, rhs: MatWord, depth: int = 12, max_states: int = 60000,
              max_len: int | None = None) -> ProofTrace:
        if depth < 0:
            raise ValueError("depth must be >= 0")
        a, b = canon(lhs.codes), canon(rhs.codes)
        if a == b and lhs.scalar == rhs.scalar:
            return ProofTrace(lhs, rhs, [])
        if max_len is None:
            max_len = max(len(a), len(b)) + 6
        # parents: word -> (prev word, scalar so far, step)
        fwd = {a: (None, lhs.scalar, None)}
        bwd = {b: (None, rhs.scalar, None)}
        ff, fb = [a], [b]
        allow_p = _P in a or _P in b
        df = db = 0
        explored = 0
        while df + db < depth and ff and fb:
            forward = len(ff) <= len(fb)
            frontier, mine, other = (ff, fwd, bwd) if forward else (fb, bwd, fwd)
            nxt = []
            for w in frontier:
                s0 = mine[w][1]
                for nw, c, step in self.successors(w, allow_p):
                    if nw in mine or len(nw) > max_len:
                        continue
                    mine[nw] = (w, s0 * c, step)
                    explored += 1
                    if nw in other and other[nw][1] == mine[nw][1]:
                        return self._trace(lhs, rhs, fwd, bwd, nw, explored)
                    nxt.append(nw)
                if explored > max_states:
                    raise NotProved(depth, explored)
            if forward:
                ff, df = nxt, df + 1
            else:
                fb, db = nxt, db + 1
        raise NotProved(depth, explored)

    def _trace(self, lhs, rhs, fwd, bwd, meet, explored):
        chain = []
        w = meet
        while fwd[w][0] is not None:
            prev, _, step = fwd[w]
            chain.append((prev, w, step, True))
            w = prev
        chain.reverse()
        w = meet
        while bwd[w][0] is not None:
            prev, _, step = bwd[w]
            chain.append((w, prev, step, False))
            w = prev
        steps, raw = [], []
        for frm, to, (lin, pos, p), forward in chain:
            rule = self.base.rules[p.rule]
            if forward:
                raw.append((lin, pos, p.u, p.v, p.scalar, True, to))
                before, after = lin, to
                direction = p.direction
            else:
                raw.append((lin, pos, p.u, p.v, p.scalar, False, to))
                before, after = frm, lin
                direction = "<-" if p.direction == "->" else "->"
            steps.append(ProofStep(
                rule.tag, rule.source, pos, direction,
                _render(p.u) if forward else _render(p.v),
                _render(p.v) if forward else _render(p.u),
                _render(before), _render(after),
            ))
        return ProofTrace(lhs, rhs, steps, explored, raw)


def _render(codes):
    return " ".join(_render_code(c) for c in codes) or "1"


_PROVERS = {}


def prover_for(base: RuleBase | None = None) -> Prover:
    base = base or default_rulebase()
    key = id(base)
    p = _PROVERS.get(key)
    if p is None or p.base is not base:
        p = Prover(base)
        _PROVERS[key] = p
    return p


_DEFAULT = []


def default_rulebase() -> RuleBase:
    if not _DEFAULT:
        _DEFAULT.append(build_rulebase())
    return _DEFAULT[0]


def prove_equal(lhs, rhs, base: RuleBase | None = None, depth: int = 12, max_states: int = 60000) -> ProofTrace:
    """Replayable trace from ``lhs`` to ``rhs`` or NotProved (not a refutation)."""
    if isinstance(lhs, str):
        lhs = parse_word(lhs)
    if isinstance(rhs, str):
        rhs = parse_word(rhs)
    return prover_for(base).prove(lhs, rhs, depth, max_states)


# -- reports ----------------------------------------------------------------------------

@dataclass
class ObligationResult:
    rule: str
    lhs: str
    rhs: str
    status: str            # proved | not-proved
    trace: ProofTrace | None = None
    explored: int = 0

    def to_dict(self):
        out = {"rule": self.rule, "obligation": f"{self.lhs} = {self.rhs}", "status": self.status}
        if self.trace is not None:
            out["steps"] = len(self.trace)
            out["trace"] = self.trace.to_dict()["steps"]
        else:
            out["explored"] = self.explored
        return out


@dataclass
class ConsistencyReport:
    form: str
    depth: int
    results: list

    @property
    def ok(self) -> bool:
        return all(r.status == "proved" for r in self.results)

    def failures(self):
        return [r for r in self.results if r.status != "proved"]

    def to_dict(self):
        return {
            "form": self.form,
            "depth": self.depth,
            "proved": sum(r.status == "proved" for r in self.results),
            "total": len(self.results),
            "results": [r.to_dict() for r in self.results],
        }


def verify_involution_consistency(form: str, depth: int = 12, base: RuleBase | None = None,
                                  images: dict | None = None, max_states: int = 60000,
                                  stage_lemmas: bool = True) -> ConsistencyReport:
    """Prove ``dag(lhs) = dag(rhs)`` for every rule of the base.

    With ``stage_lemmas`` each proved image is added to the rules available
    for later obligations; obligations are retried until no more progress is
    made, so the order of the base does not matter.
    """
    base = base or default_rulebase()
    originals = [r for r in base.rules if not r.tag.startswith("swap(")]
    pending = list(originals)
    results = {}
    current = base
    progress = True
    while pending and progress:
        progress = False
        still = []
        prover = Prover(current)
        lemmas = []
        for r in pending:
            img = dagger_equation(r, form, images)
            try:
                tr = prover.prove(img.lhs, img.rhs, depth, max_states)
            except NotProved as exc:
                still.append(r)
                results[r.tag] = ObligationResult(r.tag, img.lhs.render(), img.rhs.render(), "not-proved",
                                                  None, exc.explored)
                continue
            results[r.tag] = ObligationResult(r.tag, img.lhs.render(), img.rhs.render(), "proved", tr, tr.explored)
            progress = True
            if stage_lemmas and len(tr):
                lemmas.append(MatEquation(img.lhs, img.rhs, f"lemma {img.tag}", "proved dagger image"))
        pending = still
        if not stage_lemmas:
            break
        if lemmas and pending:
            current = current.with_rules(lemmas)
    return ConsistencyReport(form, depth, [results[r.tag] for r in originals])


@dataclass
class DerivationReport:
    name: str
    results: list

    @property
    def ok(self):
        return all(r.status == "proved" for r in self.results)

    def to_dict(self):
        return {"name": self.name, "ok": self.ok, "results": [r.to_dict() for r in self.results]}


def _obligation(name, lhs, rhs, prover, depth, max_states):
    try:
        tr = prover.prove(lhs, rhs, depth, max_states)
    except NotProved as exc:
        return ObligationResult(name, lhs.render(), rhs.render(), "not-proved", None, exc.explored)
    return ObligationResult(name, lhs.render(), rhs.render(), "proved", tr, tr.explored)


def evolve_check(n: int, depth: int = 12, form: str = "hyperboloid", base: RuleBase | None = None,
                 images: dict | None = None, max_states: int = 60000) -> DerivationReport:
    """Discrete evolution ``Omega(k) = Omega``, ``g(k) = Omega^k g`` for k = 1..n.

    Proves ``g(k)^dag = g(k)`` and ``Omega(k)^dag = g(k)^-1 Omega(k) g(k)``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    prover = prover_for(base)
    out = []
    for k in range(0 if n == 0 else 1, n + 1):
        gk = parse_word(" ".join(["Omega"] * k + ["g"]))
        out.append(_obligation(f"g({k})^dag = g({k})", dagger_word(gk, form, images), gk, prover, depth, max_states))
        omega = parse_word("Omega")
        rhs = gk.inverse() * omega * gk
        out.append(_obligation(f"Omega({k})^dag = g({k})^-1 Omega({k}) g({k})",
                               dagger_word(omega, form, images), rhs, prover, depth, max_states))
    return DerivationReport(f"evolve n={n}", out)


def wznw_periodicity_check(depth: int = 12, base: RuleBase | None = None, images: dict | None = None,
                           g0: str = "g", max_states: int = 60000) -> DerivationReport:
    """``(ML g0 MR^-1)^dag = ML g0 MR^-1`` with ``ML = Omega``, ``MR = Sigma``.

    ``g0="1"`` specialises the group element to the identity, so the base
    also gets ``g = 1`` and the definitions collapse ``Sigma`` onto ``Omega``.
    """
    if g0.strip() in ("", "1"):
        base = (base or default_rulebase()).with_rules(
            [parse_equation("g = 1", "g0 = 1", "identity specialisation")])
        g0 = "1"
    prover = prover_for(base)
    w = parse_word(f"ML {g0} MR^-1")
    res = _obligation("(ML g0 MR^-1)^dag = ML g0 MR^-1", dagger_word(w, "hyperboloid", images), w,
                      prover, depth, max_states)
    return DerivationReport("wznw", [res])


def sample_computations(depth: int = 12, base: RuleBase | None = None, max_states: int = 60000) -> DerivationReport:
    """The three worked hyperboloid examples: images of Rgg+, RLL++/R+ and RLg+."""
    base = base or default_rulebase()
    prover = prover_for(base)
    out = []
    for tag in ("Rgg+", "RLL++/R+", "RLg+"):
        img = dagger_equation(base.by_tag(tag), "hyperboloid")
        out.append(_obligation(f"dag[hyperboloid]({tag})", img.lhs, img.rhs, prover, depth, max_states))
    return DerivationReport("hyperboloid samples", out)


# -- cross-tier soundness ----------------------------------------------------------------

REALISABLE = frozenset({"g", "Op", "Om", "Omega", "Sigma", "ML", "MR", "R+", "R-", "P"})


def _realise_word(w: MatWord, alg, two_space: bool):
    from .heisenberg import OpMatrix
    from .rmat import build_P

    A = alg.alphabet
    N = 4 if two_space else 2
    acc = OpMatrix.identity(N, A)
    for c in w.codes:
        name, space, inv = _name(c), _space(c), bool(c & 1) and c != _P
        if name in ("R+", "R-", "P"):
            C = {"R+": alg.Rplus, "R-": alg.Rminus, "P": build_P(2)}[name]
            M = OpMatrix.from_cmatrix(C.inverse() if inv else C, A)
        else:
            base = {"ML": "Omega", "MR": "Sigma"}.get(name, name)
            M = alg.matrix(base + ("^-1" if inv else ""))
            if two_space:
                M = M.in_space(space)
        acc = (acc @ M).reduce(alg.system)
    return acc * w.scalar


def cross_tier_check(base: RuleBase | None = None, alg=None) -> list:
    """Evaluate every rule built only from realisable symbols entrywise at n = 2.

    Returns ``(tag, status, detail)`` with status ``pass``, ``fail`` or
    ``skipped`` (rules mentioning Sp, Sm or h, which have no scalar-tier
    realisation).
    """
    from .heisenberg import algebra

    alg = alg or algebra()
    base = base or default_rulebase()
    out = []
    for r in base.rules:
        codes = r.lhs.codes + r.rhs.codes
        names = {_name(c) for c in codes}
        if not names <= REALISABLE:
            out.append((r.tag, "skipped", "no scalar-tier realisation for " + ", ".join(sorted(names - REALISABLE))))
            continue
        two = any(_space(c) for c in codes) or bool(names & GLOBAL)
        diff = (_realise_word(r.lhs, alg, two) - _realise_word(r.rhs, alg, two)).reduce(alg.system)
        if diff.is_zero():
            out.append((r.tag, "pass", ""))
        else:
            (i, j), x = next(((ij, x) for ij, x in diff.entries() if x))
            out.append((r.tag, "fail", f"entry ({i + 1},{j + 1}): {x.render()}"))
    return out
