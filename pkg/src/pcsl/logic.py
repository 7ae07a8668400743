"""Sorted first-order sentences over a finite p-semilattice.

Terms are built from variables, the constants 0 and 1, meet ``x^y``, star
``x*`` and skeletal join ``x v y``.  Atomic formulas compare terms with
``=``, ``<=``, ``<`` and ``||`` (incomparability) or apply the membership
predicates ``Sk(t)``, ``D(t)``, ``C(t)``.  Connectives are ``~``, ``&``,
``|`` and ``->``; quantifiers are written ``A x:Sk.`` / ``E d:D.`` / ``A x.``
with the sort restricting the range to the skeletal, dense, or full carrier.

Evaluation is exhaustive sorted quantification.  The short-circuit strategy
skips an implication's conclusion when the premise fails, which is what
keeps the heavier axiom sweeps tractable; the "sweep" strategy evaluates
every subformula on every assignment and exists to cross-check verdicts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import ElementSet, FinPSL


class Sort(enum.Enum):
    ALL = "All"
    SK = "Sk"
    D = "D"


Pos = tuple[int, int]  # 1-based line, column


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: int  # 0 or 1
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Meet:
    left: "Term"
    right: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Star:
    arg: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SkJoin:
    left: "Term"
    right: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


Term = Var | Const | Meet | Star | SkJoin


# --- formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class Cmp:
    """Binary atom over terms; op is one of =, <=, <, ||."""

    op: str
    left: Term
    right: Term
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Member:
    """Membership atom; pred is one of Sk, D, C."""

    pred: str
    arg: Term
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    body: "Formula"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Forall:
    var: str
    sort: Sort
    body: "Formula"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    body: "Formula"
    pos: Pos | None = field(default=None, compare=False, repr=False)


Formula = Cmp | Member | Not | And | Or | Implies | Forall | Exists


def free_vars(f: Formula | Term, bound: frozenset[str] = frozenset()) -> set[str]:
    match f:
        case Var(name):
            return set() if name in bound else {name}
        case Const():
            return set()
        case Meet(l, r) | SkJoin(l, r):
            return free_vars(l, bound) | free_vars(r, bound)
        case Star(a):
            return free_vars(a, bound)
        case Cmp(_, l, r):
            return free_vars(l, bound) | free_vars(r, bound)
        case Member(_, a):
            return free_vars(a, bound)
        case Not(b):
            return free_vars(b, bound)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return free_vars(l, bound) | free_vars(r, bound)
        case Forall(v, _, b) | Exists(v, _, b):
            return free_vars(b, bound | {v})
    raise TypeError(f"not a formula node: {f!r}")


def count_quantifiers(f: Formula) -> tuple[int, int]:
    """(number of universal, number of existential) quantifier nodes."""
    match f:
        case Forall(_, _, b):
            u, e = count_quantifiers(b)
            return u + 1, e
        case Exists(_, _, b):
            u, e = count_quantifiers(b)
            return u, e + 1
        case Not(b):
            return count_quantifiers(b)
        case And(l, r) | Or(l, r) | Implies(l, r):
            ul, el = count_quantifiers(l)
            ur, er = count_quantifiers(r)
            return ul + ur, el + er
        case _:
            return 0, 0


# --- parsing -----------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, pos: Pos):
        self.pos = pos
        super().__init__(f"{message} at line {pos[0]}, column {pos[1]}")


RESERVED = {"A", "E", "v", "Sk", "D", "C", "All"}

_SYMBOLS = ["||", "<=", "->", "^", "*", "=", "<", "&", "|", "~", "(", ")", ".", ":"]


@dataclass(frozen=True)
class _Token:
    kind: str  # name | num | sym | eof
    text: str
    pos: Pos


def _tokenize(text: str) -> list[_Token]:
    toks = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        pos = (line, col)
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("name", text[i:j], pos))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(_Token("num", text[i:j], pos))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(_Token("sym", sym, pos))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)
    toks.append(_Token("eof", "", (line, col)))
    return toks


class _Parser:
    def __init__(self, text: str, allow_free: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_free = allow_free
        self.bound: list[str] = []
        self.frees: set[str] = set()

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.pos)
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text

    # formulas

    def formula(self) -> Formula:
        t = self.peek()
        if t.kind == "name" and t.text in ("A", "E"):
            return self.quantified()
        return self.implies()

    def quantified(self) -> Formula:
        q = self.next()
        var = self.next()
        if var.kind != "name" or var.text in RESERVED:
            raise ParseError("expected a variable name after quantifier", var.pos)
        sort = Sort.ALL
        if self.at(":"):
            self.next()
            s = self.next()
            if s.text not in ("Sk", "D", "All"):
                raise ParseError("sort must be Sk, D or All", s.pos)
            sort = Sort(s.text)
        self.expect(".")
        self.bound.append(var.text)
        body = self.formula()
        self.bound.pop()
        cls = Forall if q.text == "A" else Exists
        return cls(var.text, sort, body, pos=q.pos)

    def implies(self) -> Formula:
        left = self.or_()
        if self.at("->"):
            pos = self.next().pos
            right = self.implies()  # right associative
            return Implies(left, right, pos=pos)
        return left

    def or_(self) -> Formula:
        f = self.and_()
        while self.at("|"):
            pos = self.next().pos
            f = Or(f, self.and_(), pos=pos)
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            pos = self.next().pos
            f = And(f, self.unary(), pos=pos)
        return f

    def unary(self) -> Formula:
        t = self.peek()
        if t.text == "~":
            self.next()
            return Not(self.unary(), pos=t.pos)
        if t.kind == "name" and t.text in ("Sk", "D", "C") and self.toks[self.i + 1].text == "(":
            self.next()
            self.expect("(")
            arg = self.term()
            self.expect(")")
            return Member(t.text, arg, pos=t.pos)
        if t.text == "(":
            # either a parenthesized formula or a parenthesized term that
            # begins a comparison; try the term reading first and back off
            mark = self.i
            try:
                return self.comparison()
            except ParseError:
                self.i = mark
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        return self.comparison()

    def comparison(self) -> Formula:
        left = self.term()
        op = self.next()
        if op.text not in ("=", "<=", "<", "||"):
            raise ParseError("expected a comparison operator", op.pos)
        right = self.term()
        return Cmp(op.text, left, right, pos=op.pos)

    # terms

    def term(self) -> Term:
        f = self.meet()
        while self.peek().kind == "name" and self.peek().text == "v":
            pos = self.next().pos
            f = SkJoin(f, self.meet(), pos=pos)
        return f

    def meet(self) -> Term:
        f = self.postfix()
        while self.at("^"):
            pos = self.next().pos
            f = Meet(f, self.postfix(), pos=pos)
        return f

    def postfix(self) -> Term:
        f = self.primary()
        while self.at("*"):
            pos = self.next().pos
            f = Star(f, pos=pos)
        return f

    def primary(self) -> Term:
        t = self.next()
        if t.kind == "num":
            if t.text not in ("0", "1"):
                raise ParseError("only the constants 0 and 1 exist", t.pos)
            return Const(int(t.text), pos=t.pos)
        if t.kind == "name":
            if t.text in RESERVED:
                raise ParseError(f"{t.text!r} is reserved", t.pos)
            if t.text not in self.bound:
                if not self.allow_free:
                    raise ParseError(f"unbound variable {t.text!r}", t.pos)
                self.frees.add(t.text)
            return Var(t.text, pos=t.pos)
        if t.text == "(":
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError(f"expected a term, found {t.text!r}", t.pos)


def parse(text: str, allow_free: bool = False) -> Formula:
    """Parse a sentence; raises ParseError with a source position on bad
    input or on unbound variables (unless allow_free)."""
    p = _Parser(text, allow_free)
    f = p.formula()
    tail = p.peek()
    if tail.kind != "eof":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.pos)
    return f


# --- printing ----------------------------------------------------------------


def _print_term(t: Term, prec: int = 0) -> str:
    match t:
        case Var(name):
            return name
        case Const(v):
            return str(v)
        case SkJoin(l, r):
            s = f"{_print_term(l, 1)} v {_print_term(r, 2)}"
            return f"({s})" if prec > 1 else s
        case Meet(l, r):
            s = f"{_print_term(l, 2)}^{_print_term(r, 3)}"
            return f"({s})" if prec > 2 else s
        case Star(a):
            return f"{_print_term(a, 4)}*"
    raise TypeError(f"not a term: {t!r}")


def _print_formula(f: Formula, prec: int = 0) -> str:
    match f:
        case Forall(v, s, b) | Exists(v, s, b):
            q = "A" if isinstance(f, Forall) else "E"
            sort = "" if s is Sort.ALL else f":{s.value}"
            body = _print_formula(b, 0)
            out = f"{q} {v}{sort}. {body}"
            return f"({out})" if prec > 0 else out
        case Implies(l, r):
            out = f"{_print_formula(l, 2)} -> {_print_formula(r, 1)}"
            return f"({out})" if prec > 1 else out
        case Or(l, r):
            out = f"{_print_formula(l, 2)} | {_print_formula(r, 3)}"
            return f"({out})" if prec > 2 else out
        case And(l, r):
            out = f"{_print_formula(l, 3)} & {_print_formula(r, 4)}"
            return f"({out})" if prec > 3 else out
        case Not(b):
            return f"~{_print_formula(b, 5)}"
        case Member(pred, a):
            return f"{pred}({_print_term(a)})"
        case Cmp(op, l, r):
            return f"{_print_term(l)} {op} {_print_term(r)}"
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    """Deterministic printer; parse(print_formula(f)) == f."""
    return _print_formula(f)


# --- evaluation ---------------------------------------------------------------


@dataclass
class EvalResult:
    value: bool
    assignment: dict[str, int]

    def __bool__(self) -> bool:
        return self.value

    @property
    def witness(self) -> dict[str, int] | None:
        return self.assignment if self.value else None

    @property
    def counterexample(self) -> dict[str, int] | None:
        return None if self.value else self.assignment


def _domain(p: FinPSL, sort: Sort) -> tuple[int, ...]:
    if sort is Sort.ALL:
        return tuple(range(p.n))
    if sort is Sort.SK:
        return p.skeleton.indices
    return p.dense.indices


def eval_term(p: FinPSL, t: Term, env: dict[str, int]) -> int:
    match t:
        case Var(name):
            return env[name]
        case Const(v):
            return p.zero if v == 0 else p.one
        case Meet(l, r):
            return p.meet[eval_term(p, l, env)][eval_term(p, r, env)]
        case Star(a):
            return p.star[eval_term(p, a, env)]
        case SkJoin(l, r):
            # definitional expansion (a* ^ b*)*
            a = eval_term(p, l, env)
            b = eval_term(p, r, env)
            return p.star[p.meet[p.star[a]][p.star[b]]]
    raise TypeError(f"not a term: {t!r}")


def _eval_atom(p: FinPSL, f: Cmp | Member, env) -> bool:
    if isinstance(f, Member):
        x = eval_term(p, f.arg, env)
        sets = {"Sk": p.skeleton, "D": p.dense, "C": p.central}
        return x in sets[f.pred]
    a = eval_term(p, f.left, env)
    b = eval_term(p, f.right, env)
    m = p.meet[a][b]
    if f.op == "=":
        return a == b
    if f.op == "<=":
        return m == a
    if f.op == "<":
        return a != b and m == a
    return m != a and m != b  # ||


def _eval_sc(p: FinPSL, f: Formula, env: dict[str, int]):
    """Short-circuit evaluation; returns (truth, assignment).

    The assignment collects quantifier choices that explain the verdict:
    witnesses of satisfied existentials on the True side, the falsifying
    universal assignment on the False side.
    """
    match f:
        case Cmp() | Member():
            return _eval_atom(p, f, env), {}
        case Not(b):
            v, _ = _eval_sc(p, b, env)
            return not v, {}
        case And(l, r):
            vl, al = _eval_sc(p, l, env)
            if not vl:
                return False, al
            vr, ar = _eval_sc(p, r, env)
            return vr, ar if not vr else {**al, **ar}
        case Or(l, r):
            vl, al = _eval_sc(p, l, env)
            if vl:
                return True, al
            return _eval_sc(p, r, env)
        case Implies(l, r):
            vl, _ = _eval_sc(p, l, env)
            if not vl:
                return True, {}
            return _eval_sc(p, r, env)
        case Forall(var, sort, body):
            for val in _domain(p, sort):
                env[var] = val
                v, a = _eval_sc(p, body, env)
                if not v:
                    del env[var]
                    return False, {var: val, **a}
            env.pop(var, None)
            return True, {}
        case Exists(var, sort, body):
            for val in _domain(p, sort):
                env[var] = val
                v, a = _eval_sc(p, body, env)
                if v:
                    del env[var]
                    return True, {var: val, **a}
            env.pop(var, None)
            return False, {}
    raise TypeError(f"not a formula: {f!r}")


def _eval_sweep(p: FinPSL, f: Formula, env: dict[str, int]) -> bool:
    """Full-sweep evaluation: no short circuits, every branch visited."""
    match f:
        case Cmp() | Member():
            return _eval_atom(p, f, env)
        case Not(b):
            return not _eval_sweep(p, b, env)
        case And(l, r):
            vl = _eval_sweep(p, l, env)
            vr = _eval_sweep(p, r, env)
            return vl and vr
        case Or(l, r):
            vl = _eval_sweep(p, l, env)
            vr = _eval_sweep(p, r, env)
            return vl or vr
        case Implies(l, r):
            vl = _eval_sweep(p, l, env)
            vr = _eval_sweep(p, r, env)
            return (not vl) or vr
        case Forall(var, sort, body):
            results = []
            for val in _domain(p, sort):
                env[var] = val
                results.append(_eval_sweep(p, body, env))
            env.pop(var, None)
            return all(results)
        case Exists(var, sort, body):
            results = []
            for val in _domain(p, sort):
                env[var] = val
                results.append(_eval_sweep(p, body, env))
            env.pop(var, None)
            return any(results)
    raise TypeError(f"not a formula: {f!r}")


def eval_formula(
    p: FinPSL,
    f: Formula,
    env: dict[str, int] | None = None,
    strategy: str = "shortcircuit",
) -> EvalResult:
    """Evaluate a formula under an assignment of its free variables."""
    env = dict(env) if env else {}
    missing = free_vars(f) - env.keys()
    if missing:
        raise ValueError(f"unbound variables: {sorted(missing)}")
    if strategy == "shortcircuit":
        v, a = _eval_sc(p, f, env)
        return EvalResult(v, a)
    if strategy == "sweep":
        return EvalResult(_eval_sweep(p, f, env), {})
    raise ValueError(f"unknown strategy {strategy!r}")


def eval_sentence(p: FinPSL, s: Formula, strategy: str = "shortcircuit") -> EvalResult:
    """Evaluate a closed sentence by exhaustive sorted quantification."""
    return eval_formula(p, s, {}, strategy)


# --- semantic-preserving rewrites used by the property suite -----------------


def relax_sorts(f: Formula) -> Formula:
    """Replace sorted quantifiers by unsorted ones guarded with the matching
    membership predicate; the verdict never changes."""
    match f:
        case Forall(v, s, b):
            b = relax_sorts(b)
            if s is Sort.ALL:
                return Forall(v, s, b)
            guard = Member(s.value, Var(v))
            return Forall(v, Sort.ALL, Implies(guard, b))
        case Exists(v, s, b):
            b = relax_sorts(b)
            if s is Sort.ALL:
                return Exists(v, s, b)
            guard = Member(s.value, Var(v))
            return Exists(v, Sort.ALL, And(guard, b))
        case Not(b):
            return Not(relax_sorts(b))
        case And(l, r):
            return And(relax_sorts(l), relax_sorts(r))
        case Or(l, r):
            return Or(relax_sorts(l), relax_sorts(r))
        case Implies(l, r):
            return Implies(relax_sorts(l), relax_sorts(r))
        case _:
            return f


def _expand_term(t: Term) -> Term:
    match t:
        case SkJoin(l, r):
            return Star(Meet(Star(_expand_term(l)), Star(_expand_term(r))))
        case Meet(l, r):
            return Meet(_expand_term(l), _expand_term(r))
        case Star(a):
            return Star(_expand_term(a))
        case _:
            return t


def expand_skjoin(f: Formula) -> Formula:
    """Rewrite every skeletal join into its star/meet expansion."""
    match f:
        case Cmp(op, l, r):
            return Cmp(op, _expand_term(l), _expand_term(r))
        case Member(pred, a):
            return Member(pred, _expand_term(a))
        case Not(b):
            return Not(expand_skjoin(b))
        case And(l, r):
            return And(expand_skjoin(l), expand_skjoin(r))
        case Or(l, r):
            return Or(expand_skjoin(l), expand_skjoin(r))
        case Implies(l, r):
            return Implies(expand_skjoin(l), expand_skjoin(r))
        case Forall(v, s, b):
            return Forall(v, s, expand_skjoin(b))
        case Exists(v, s, b):
            return Exists(v, s, expand_skjoin(b))
    raise TypeError(f"not a formula: {f!r}")
