"""Command-line frontend and the scalar-tier expression language.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | factor
    factor  := atom ('^' exponent)?
    exponent:= '-'? integer | '(' '-'? integer '/' integer ')'
    atom    := '(' expr ')' | 'dag(' expr ')' | 'nf(' expr ')' | generator | scalar
    generator := ('g' | 'Op' | 'Om') '[' int ',' int ']' | 'K' | 'Kinv' | 'Xp' | 'Xm'
    scalar  := integer ('/' integer)? | 'q' | 'i' | 'lambda'

Fractional exponents are accepted on ``q`` only; negative exponents on ``q``,
``lambda``, ``K`` and ``Kinv``.  This is exactly what the polynomial printer
emits, so every rendered normal form reparses.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExprSyntaxError, NoImage, NotInvertible, QCotangentError, UnknownGenerator
from .freealg import NCPoly
from .scalars import I, LAM, Q, QScalar, qpow

__all__ = ["parse_expr", "eval_expr", "print_expr", "EvalContext", "main", "main_entry"]


# -- AST --------------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Sym:
    name: str            # q | i | lambda


@dataclass(frozen=True)
class Gen:
    name: str            # K, Kinv, Xp, Xm, g[i,j], Op[i,j], Om[i,j]


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Sum:
    terms: tuple         # ((sign, node), ...) with sign in '+-'


@dataclass(frozen=True)
class Prod:
    factors: tuple


@dataclass(frozen=True)
class Pow:
    base: object
    exp: Fraction


@dataclass(frozen=True)
class Call:
    fn: str              # dag | nf
    arg: object


# -- lexer / parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\],]))")


def _tokens(text):
    pos = 0
    out = []
    text = text.replace("·", "*")
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip():
                p = pos + len(rest) - len(rest.lstrip())
                raise ExprSyntaxError(f"unexpected character {text[p]!r}", text, p)
            out.append(("end", "", len(text)))
            return out
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text, n=2):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0
        self.n = n

    def peek(self, value=None):
        kind, v, _ = self.toks[self.i]
        if value is None:
            return kind, v
        return v == value and kind != "end"

    def take(self, value=None, kind=None):
        k, v, pos = self.toks[self.i]
        if (value is not None and v != value) or (kind is not None and k != kind):
            want = repr(value) if value is not None else kind
            got = "end of input" if k == "end" else repr(v)
            raise ExprSyntaxError(f"expected {want}, got {got}", self.text, pos)
        self.i += 1
        return v, pos

    def parse(self):
        e = self.expr()
        k, v, pos = self.toks[self.i]
        if k != "end":
            raise ExprSyntaxError(f"unexpected {v!r}", self.text, pos)
        return e

    def expr(self):
        terms = [("+", self.term())]
        while self.peek("+") or self.peek("-"):
            sign, _ = self.take()
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        fs = [self.unary()]
        while self.peek("*"):
            self.take("*")
            fs.append(self.unary())
        return fs[0] if len(fs) == 1 else Prod(tuple(fs))

    def unary(self):
        if self.peek("-"):
            self.take("-")
            return Neg(self.unary())
        return self.factor()

    def factor(self):
        base = self.atom()
        if self.peek("^"):
            _, pos = self.take("^")
            exp = self.exponent()
            if exp.denominator != 1 and base != Sym("q"):
                raise ExprSyntaxError("fractional exponents are only allowed on q", self.text, pos)
            return Pow(base, exp)
        return base

    def exponent(self):
        if self.peek("("):
            self.take("(")
            neg = bool(self.peek("-")) and self.take("-")
            a, _ = self.take(kind="num")
            self.take("/")
            b, pos = self.take(kind="num")
            self.take(")")
            if int(b) == 0:
                raise ExprSyntaxError("zero denominator", self.text, pos)
            v = Fraction(int(a), int(b))
            return -v if neg else v
        neg = bool(self.peek("-")) and self.take("-")
        a, _ = self.take(kind="num")
        return -Fraction(int(a)) if neg else Fraction(int(a))

    def atom(self):
        kind, v = self.peek()
        _, _, pos = self.toks[self.i]
        if v == "(" and kind == "op":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if kind == "num":
            self.take()
            if self.peek("/") and self.toks[self.i + 1][0] == "num":
                self.take("/")
                d, dpos = self.take(kind="num")
                if int(d) == 0:
                    raise ExprSyntaxError("zero denominator", self.text, dpos)
                return Num(Fraction(int(v), int(d)))
            return Num(Fraction(int(v)))
        if kind == "name":
            self.take()
            if v in ("dag", "nf"):
                self.take("(")
                e = self.expr()
                self.take(")")
                return Call(v, e)
            if v in ("q", "i", "lambda"):
                return Sym(v)
            if v in ("K", "Kinv", "Xp", "Xm"):
                return Gen(v)
            if v in ("g", "Op", "Om"):
                self.take("[")
                a, apos = self.take(kind="num")
                self.take(",")
                b, _ = self.take(kind="num")
                self.take("]")
                i, j = int(a), int(b)
                n = self.n if v == "g" else 2
                if not (1 <= i <= n and 1 <= j <= n):
                    raise UnknownGenerator(f"{v}[{i},{j}] is outside the {n}x{n} catalog")
                return Gen(f"{v}[{i},{j}]")
            raise UnknownGenerator(f"unknown generator {v!r} at column {pos + 1}")
        got = "end of input" if kind == "end" else repr(v)
        raise ExprSyntaxError(f"unexpected {got}", self.text, pos)


def parse_expr(text: str, n: int = 2):
    """Parse ``text`` into an AST; errors carry line and column."""
    return _Parser(text, n).parse()


# -- printer ------------------------------------------------------------------------------

def _prec(e):
    if isinstance(e, Sum):
        return 1
    if isinstance(e, Prod):
        return 2
    if isinstance(e, Neg):
        return 3
    return 4


def print_expr(e) -> str:
    if isinstance(e, Num):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Gen):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({print_expr(e.arg)})"
    if isinstance(e, Neg):
        inner = print_expr(e.arg)
        return f"-{inner}" if _prec(e.arg) >= 3 else f"-({inner})"
    if isinstance(e, Pow):
        b = print_expr(e.base)
        if _prec(e.base) < 4 or isinstance(e.base, Pow) or (isinstance(e.base, Num) and e.base.value < 0):
            b = f"({b})"
        x = e.exp
        exp = str(x.numerator) if x.denominator == 1 else f"({x.numerator}/{x.denominator})"
        return f"{b}^{exp}"
    if isinstance(e, Prod):
        return "*".join(print_expr(f) if _prec(f) >= 3 and not isinstance(f, Neg) else f"({print_expr(f)})"
                        for f in e.factors)
    if isinstance(e, Sum):
        out = []
        for k, (sign, t) in enumerate(e.terms):
            s = print_expr(t)
            if _prec(t) <= 1 or (k and isinstance(t, Neg)):
                s = f"({s})"
            out.append(s if k == 0 and sign == "+" else (f"-{s}" if k == 0 else f" {sign} {s}"))
        return "".join(out)
    raise TypeError(f"not an expression node: {e!r}")


# -- evaluation ---------------------------------------------------------------------------

class EvalContext:
    """Assembled system plus the star form used by ``dag``."""

    def __init__(self, form: str = "hyperboloid", alg=None):
        from .heisenberg import algebra
        self.alg = alg or algebra()
        self.form = form
        self._star = None

    @property
    def alphabet(self):
        return self.alg.alphabet

    @property
    def star(self):
        if self._star is None:
            from .star import get_form
            self._star = get_form(self.form) if self.form == "compact" else get_form(self.form, alg=self.alg)
        return self._star


def _scalar_of(e):
    """The QScalar value of a generator-free node, else None."""
    if isinstance(e, Num):
        return QScalar.coerce(e.value)
    if isinstance(e, Sym):
        return {"q": Q, "i": I, "lambda": LAM}[e.name]
    if isinstance(e, Pow) and e.base == Sym("q"):
        return qpow(e.exp)
    return None


def _eval(e, ctx):
    A = ctx.alphabet
    s = _scalar_of(e)
    if s is not None and not isinstance(e, Pow):
        return NCPoly.scalar(s, A)
    if isinstance(e, Gen):
        name = e.name
        if name.startswith(("Op[", "Om[")):
            i, j = map(int, name[3:-1].split(","))
            M = ctx.alg.Op if name.startswith("Op") else ctx.alg.Om
            return M[i - 1, j - 1]
        if name not in A:
            raise UnknownGenerator(f"{name} is not in the catalog")
        return A.gen(name)
    if isinstance(e, Neg):
        return -_eval(e.arg, ctx)
    if isinstance(e, Sum):
        acc = NCPoly.scalar(0, A)
        for sign, t in e.terms:
            v = _eval(t, ctx)
            acc = acc + v if sign == "+" else acc - v
        return acc
    if isinstance(e, Prod):
        acc = NCPoly.scalar(1, A)
        for f in e.factors:
            acc = ctx.alg.nf(acc * _eval(f, ctx))
        return acc
    if isinstance(e, Pow):
        if s is not None:
            return NCPoly.scalar(s, A)
        k = int(e.exp)
        if isinstance(e.base, Sym) or isinstance(e.base, Num):
            base = _scalar_of(e.base)
            return NCPoly.scalar(base ** k, A)
        v = _eval(e.base, ctx)
        if k < 0:
            v = _invert(v, ctx)
            k = -k
        acc = NCPoly.scalar(1, A)
        for _ in range(k):
            acc = ctx.alg.nf(acc * v)
        return acc
    if isinstance(e, Call):
        v = _eval(e.arg, ctx)
        if e.fn == "nf":
            return ctx.alg.nf(v)
        from .star import star_apply
        return star_apply(v, ctx.star, ctx.alg)
    raise TypeError(f"not an expression node: {e!r}")


def _invert(p, ctx):
    A = ctx.alphabet
    if len(p.terms) == 1:
        (w, c), = p.terms.items()
        names = [A.name(x) for x in w]
        if all(x in ("K", "Kinv") for x in names):
            inv = NCPoly.word(tuple(A.index("Kinv" if x == "K" else "K") for x in reversed(w)), A, c.inv_unit())
            return inv
    raise NotInvertible(f"{p.render()} is not an invertible monomial")


def eval_expr(e, ctx: EvalContext | None = None) -> NCPoly:
    """Evaluate and return the normal form."""
    ctx = ctx or EvalContext()
    if isinstance(e, str):
        e = parse_expr(e)
    return ctx.alg.nf(_eval(e, ctx))


# -- relation files ----------------------------------------------------------------------

def relation_lines(system) -> list:
    """``lhs = rhs`` lines for every rule, sorted by lhs word."""
    A = system.alphabet
    return [f"{A.render_word(r.lhs)} = {r.rhs.render(A)}" for r in system.sorted_rules()]


# -- subcommands ---------------------------------------------------------------------------

def _emit_reports(reports, cfg, as_json, out):
    from .verify import exit_code, report_json
    if as_json:
        out.write(report_json(reports, cfg))
    else:
        for r in reports:
            out.write(f"{r.status.upper():8s} {r.check_id} [{r.section}]\n")
            w = r.details.get("witness")
            if w is not None and r.status == "fail":
                out.write(f"         witness: {json.dumps(w, sort_keys=True)}\n")
    return exit_code(reports)


_CHECK_IDS = {
    "yang-baxter": ["rmat.yang-baxter"],
    "rminus": ["rmat.rminus", "rmat.r-dagger"],
    "det-central": ["quantum-determinant"],
    "jimbo-drinfeld": ["jimbo-drinfeld"],
    "confluence": ["presentation.confluence", "presentation.self-consistency"],
    "evolve": ["dynamics.evolve"],
    "wznw": ["wznw.periodicity"],
}


def _check(args, out):
    from .verify import run_suite
    cfg = {}
    what = args.what
    if what in ("yang-baxter", "rminus"):
        cfg["n"] = [args.n]
    if what == "confluence":
        cfg.update(maxdeg=args.maxdeg, trials=args.trials, seed=args.seed)
    if what in ("star", "evolve", "wznw"):
        cfg["depth"] = args.depth
    if what == "evolve":
        cfg["evolve_steps"] = args.steps
    if what == "star":
        if args.tier == "scalar":
            ids = [f"{args.form}-form.scalar"]
        else:
            ids = [f"{args.form}-form.matrix"] + (["hyperboloid-form.samples"] if args.form == "hyperboloid" else [])
    else:
        ids = _CHECK_IDS[what]
    cfg["checks"] = ids
    return _emit_reports(run_suite(cfg), cfg, args.json, out)


def _suite(args, out):
    from .verify import ConfigError, run_suite
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    reports = run_suite(cfg)
    return _emit_reports(reports, cfg, args.json, out)


def _relations(args, out):
    from .heisenberg import assemble_system
    system = assemble_system(args.n, with_det=not args.no_det)
    lines = relation_lines(system)
    if args.json:
        out.write(json.dumps({"n": args.n, "rules": lines}, indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return 0


def _nf(args, out):
    ctx = EvalContext(args.form)
    text = args.expr if args.expr != "-" else sys.stdin.read()
    e = parse_expr(text)
    res = eval_expr(e, ctx)
    if args.json:
        out.write(json.dumps({"input": print_expr(e), "form": args.form, "nf": res.render()}) + "\n")
    else:
        out.write(res.render() + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    p = argparse.ArgumentParser(prog="qcotangent", description="Exact engine for the q-deformed cotangent bundle T*G_q.")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("relations", parents=[common], help="print the assembled rewrite rules")
    r.add_argument("--print", action="store_true", dest="print_", help="print the rules (default)")
    r.add_argument("--n", type=int, default=2)
    r.add_argument("--no-det", action="store_true", help="omit the unit-determinant rule")
    r.set_defaults(func=_relations)

    nf = sub.add_parser("nf", parents=[common], help="normal form of an expression ('-' reads stdin)")
    nf.add_argument("expr")
    nf.add_argument("--form", choices=("compact", "hyperboloid"), default="hyperboloid",
                    help="star form used by dag()")
    nf.set_defaults(func=_nf)

    c = sub.add_parser("check", help="run one check")
    csub = c.add_subparsers(dest="what", required=True)
    for name in ("yang-baxter", "rminus"):
        x = csub.add_parser(name, parents=[common])
        x.add_argument("--n", type=int, default=2)
    csub.add_parser("det-central", parents=[common])
    csub.add_parser("jimbo-drinfeld", parents=[common])
    x = csub.add_parser("confluence", parents=[common])
    x.add_argument("--maxdeg", type=int, default=5)
    x.add_argument("--trials", type=int, default=1000)
    x.add_argument("--seed", type=int, default=0)
    x = csub.add_parser("star", parents=[common])
    x.add_argument("--form", choices=("compact", "hyperboloid"), required=True)
    x.add_argument("--tier", choices=("scalar", "matrix"), default="scalar")
    x.add_argument("--depth", type=int, default=12)
    x = csub.add_parser("evolve", parents=[common])
    x.add_argument("--steps", type=int, default=3)
    x.add_argument("--depth", type=int, default=12)
    x = csub.add_parser("wznw", parents=[common])
    x.add_argument("--depth", type=int, default=12)
    c.set_defaults(func=_check)

    s = sub.add_parser("suite", parents=[common], help="run the acceptance suite")
    s.add_argument("--config", required=True, help="JSON file with run_suite parameters")
    s.set_defaults(func=_suite)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    from .verify import ConfigError
    try:
        return args.func(args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ExprSyntaxError, UnknownGenerator, NotInvertible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoImage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except QCotangentError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
