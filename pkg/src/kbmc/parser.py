"""Text syntax for knowledge bases and construction requests.

Knowledge base (``.kb``)::

    kbmc-kb 1
    sort Event; sort House;
    pred Burglary(Event, House);
    func Color(House) -> {red, blue};
    const MyHouse : House;
    @a: stat [AlarmSound(e,x) | Burglary(e,x) & HouseWithAlarm(x)]_{e,x} = 0.75.
    fact HouseWithAlarm(MyHouse).
    axiom all e,x. CoinToss(e) & Object(e,x) -> Coin(x).

Connectives bind ``~`` tighter than ``&``, ``&`` than ``|``, ``|`` than
``->`` and ``->`` than ``<->``.  ``->`` associates to the right, the others
to the left.  Quantifiers (``all x,y.`` / ``ex x.``) extend as far right as
possible.  Inside a proportion bracket the first top-level ``|`` separates
the body from the condition, so a disjunctive body must be parenthesized.

Request (``.req``)::

    event E002;
    evidence ReportsAlarm(E002,Watson,MyHouse), ~Burglary(E002,MyHouse);
    query AlarmSound(E002,MyHouse);
    interest Earthquake(E002);
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .logic import (
    And, Const, Diagnostic, Exists, ForAll, FuncDecl, FunApp, Iff, Implies,
    InInterval, Literal, Not, NumCompare, Or, PredAtom, Product, Proportion,
    Sentence, Signature, Sum, ValueAtom, Var, free_vars, is_ground,
    well_formed, UNIVERSAL_SORT,
)
from .request import ConstructionRequest

KB_HEADER = "kbmc-kb 1"
REQ_HEADER = "kbmc-req 1"


class KBSyntaxError(Exception):
    """Lexical, syntax or well-formedness failure; carries all diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# -- source containers -------------------------------------------------------


@dataclass(frozen=True)
class Declaration:
    kind: str  # sort | pred | func | const
    names: tuple
    arg_sorts: tuple = ()
    values: Optional[tuple] = None
    result: Optional[str] = None
    sort: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Statement:
    kind: str  # fact | axiom | stat
    formula: object
    label: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)
    end_line: int = field(default=0, compare=False)
    end_column: int = field(default=0, compare=False)

    @property
    def sentence(self) -> Sentence:
        return Sentence(self.formula)


@dataclass
class SourceKB:
    items: list = field(default_factory=list)
    signature: Signature = field(default_factory=Signature)

    @property
    def declarations(self) -> list:
        return [i for i in self.items if isinstance(i, Declaration)]

    @property
    def statements(self) -> list:
        return [i for i in self.items if isinstance(i, Statement)]

    def __eq__(self, other):
        return isinstance(other, SourceKB) and self.items == other.items


def signature_from(decls) -> Signature:
    sorts, preds, funcs, consts = [], {}, {}, {}
    for d in decls:
        if d.kind == "sort":
            sorts.extend(d.names)
        elif d.kind == "pred":
            preds[d.names[0]] = d.arg_sorts
        elif d.kind == "func":
            funcs[d.names[0]] = FuncDecl(d.arg_sorts, d.values, d.result)
        elif d.kind == "const":
            for n in d.names:
                consts[n] = d.sort or UNIVERSAL_SORT
    return Signature(tuple(sorts), preds, funcs, consts)


# -- lexer -------------------------------------------------------------------

_UNICODE = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "≤": "<=",
            "≥": ">=", "∈": " in ", "∀": "all ", "∃": "ex "}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<num>\d+/\d+|\d+(?:\.\d+)?|\.\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9_']*)
  | (?P<sym><->|->|<=|>=|[~&|()\[\]{},.;:=<>+*_@])
""", re.VERBOSE)

KEYWORDS = {"all", "ex", "in"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, header: Optional[str] = None) -> list:
    for k, v in _UNICODE.items():
        text = text.replace(k, v)
    if header is not None:
        text = _strip_header(text, header)
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise KBSyntaxError([Diagnostic(f"unexpected character {text[pos]!r}",
                                            line, pos - line_start + 1)])
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _strip_header(text, header):
    # Blank the header line in place so token positions stay correct.
    lines = text.split("\n")
    for i, raw in enumerate(lines):
        stripped = raw.split("//")[0].strip()
        if not stripped:
            continue
        magic = header.split()[0]
        if stripped.split()[0] == magic:
            if stripped != header:
                raise KBSyntaxError([Diagnostic(
                    f"unsupported format header {stripped!r} (expected {header!r})", i + 1, 1)])
            lines[i] = " " * len(raw)
        break
    return "\n".join(lines)


def parse_number(text: str) -> Fraction:
    """Exact rational for a decimal or ``n/d`` literal."""
    return Fraction(text)


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens, sig: Optional[Signature] = None):
        self.toks = tokens
        self.i = 0
        self.sig = sig or Signature()
        self.numeric_memo = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("sym", "name") and t.text in texts

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise KBSyntaxError([Diagnostic(f"{msg} (found {found})", tok.line, tok.column)])

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self, what="name") -> str:
        t = self.tok
        if t.kind != "name":
            self.error(f"expected {what}")
        self.i += 1
        return t.text

    def number(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            self.error("expected a number")
        self.i += 1
        return parse_number(t.text)

    # ---- knowledge base

    def kb(self) -> SourceKB:
        items = []
        decls = []
        labels = {}
        while self.tok.kind != "eof":
            if self.at("sort", "pred", "func", "const"):
                d = self.declaration()
                decls.append(d)
                items.append(d)
                self.sig = signature_from(decls)
            else:
                s = self.statement()
                if s.label is not None:
                    if s.label in labels:
                        raise KBSyntaxError([Diagnostic(
                            f"duplicate label @{s.label} (first used on line {labels[s.label]})",
                            s.line, s.column)])
                    labels[s.label] = s.line
                items.append(s)
        return SourceKB(items, signature_from(decls))

    def declaration(self) -> Declaration:
        start = self.tok
        kind = self.name()
        if kind == "sort":
            names = [self.name("sort name")]
            while self.at(","):
                self.i += 1
                names.append(self.name("sort name"))
            self.expect(";")
            return Declaration("sort", tuple(names), line=start.line, column=start.column)
        if kind == "const":
            names = [self.name("constant name")]
            while self.at(","):
                self.i += 1
                names.append(self.name("constant name"))
            sort = None
            if self.at(":"):
                self.i += 1
                sort = self.name("sort name")
            self.expect(";")
            return Declaration("const", tuple(names), sort=sort, line=start.line, column=start.column)
        name = self.name(f"{kind} name")
        arg_sorts = ()
        if self.at("("):
            arg_sorts = tuple(self.name_list("(", ")", "sort name"))
        if kind == "pred":
            self.expect(";")
            return Declaration("pred", (name,), arg_sorts, line=start.line, column=start.column)
        self.expect("->")
        if self.at("{"):
            values = tuple(self.name_list("{", "}", "value name"))
            self.expect(";")
            return Declaration("func", (name,), arg_sorts, values=values,
                               line=start.line, column=start.column)
        result = self.name("result sort")
        self.expect(";")
        return Declaration("func", (name,), arg_sorts, result=result,
                           line=start.line, column=start.column)

    def name_list(self, open_, close, what) -> list:
        self.expect(open_)
        names = []
        if not self.at(close):
            names.append(self.name(what))
            while self.at(","):
                self.i += 1
                names.append(self.name(what))
        self.expect(close)
        return names

    def statement(self) -> Statement:
        start = self.tok
        label = None
        if self.at("@"):
            self.i += 1
            label = self.name("label")
            self.expect(":")
        kw = self.tok
        if not self.at("fact", "axiom", "stat"):
            self.error("expected a declaration or 'fact', 'axiom' or 'stat'")
        self.i += 1
        f = self.formula(frozenset())
        end = self.expect(".")
        return Statement(kw.text, f, label, start.line, start.column, end.line, end.column)

    # ---- formulas

    def formula(self, bound, nobar=False):
        return self.iff(bound, nobar)

    def iff(self, bound, nobar):
        left = self.implies(bound, nobar)
        while self.at("<->"):
            self.i += 1
            left = Iff(left, self.implies(bound, nobar))
        return left

    def implies(self, bound, nobar):
        left = self.disj(bound, nobar)
        if self.at("->"):
            self.i += 1
            return Implies(left, self.implies(bound, nobar))
        return left

    def disj(self, bound, nobar):
        left = self.conj(bound, nobar)
        while not nobar and self.at("|"):
            self.i += 1
            left = Or(left, self.conj(bound, nobar))
        return left

    def conj(self, bound, nobar):
        left = self.unary(bound, nobar)
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary(bound, nobar))
        return left

    def unary(self, bound, nobar):
        if self.at("~"):
            self.i += 1
            return Not(self.unary(bound, nobar))
        if self.at("all", "ex") and self.peek().kind == "name":
            q = ForAll if self.tok.text == "all" else Exists
            self.i += 1
            vars_ = [self.name("variable")]
            while self.at(","):
                self.i += 1
                vars_.append(self.name("variable"))
            self.expect(".")
            body = self.formula(bound | set(vars_), nobar)
            return q(tuple(vars_), body)
        return self.primary(bound, nobar)

    def primary(self, bound, nobar):
        t = self.tok
        if t.kind == "num" or self.at("["):
            return self.numeric_atom(bound)
        if self.at("("):
            start = self.i
            got = self.try_numeric_atom(bound)
            if got is not None:
                return got
            self.i = start + 1
            f = self.formula(bound, False)
            self.expect(")")
            return f
        if t.kind == "name" and t.text not in KEYWORDS:
            return self.atom(bound)
        self.error("expected a formula")

    def atom(self, bound):
        name = self.name()
        args = ()
        if self.at("("):
            args = self.term_args(bound)
        if self.at("="):
            self.i += 1
            value = self.value_term(bound)
            return ValueAtom(FunApp(name, args), value)
        return PredAtom(name, args)

    def term_args(self, bound) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.term(bound))
            while self.at(","):
                self.i += 1
                args.append(self.term(bound))
        self.expect(")")
        return tuple(args)

    def term(self, bound):
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            self.error("expected a term")
        name = self.name()
        if self.at("("):
            return FunApp(name, self.term_args(bound))
        return self.resolve(name, bound)

    def resolve(self, name, bound):
        if name in bound:
            return Var(name)
        if name in self.sig.constants:
            return Const(name)
        return Const(name) if name[0].isupper() else Var(name)

    def value_term(self, bound):
        name = self.name("value")
        return Var(name) if name in bound else Const(name)

    # ---- numeric atoms

    def try_numeric_atom(self, bound):
        key = (self.i, frozenset(bound))
        if key in self.numeric_memo:
            result, end = self.numeric_memo[key]
            if result is not None:
                self.i = end
            return result
        start = self.i
        try:
            result = self.numeric_atom(bound)
        except KBSyntaxError:
            result = None
        end = self.i
        self.numeric_memo[key] = (result, end)
        if result is None:
            self.i = start
        return result

    def numeric_atom(self, bound):
        left = self.numexpr(bound)
        if self.at("in"):
            self.i += 1
            if self.at("("):
                lo_open = True
            elif self.at("["):
                lo_open = False
            else:
                self.error("expected '(' or '[' to open an interval")
            self.i += 1
            lo = self.number()
            self.expect(",")
            hi = self.number()
            if self.at(")"):
                hi_open = True
            elif self.at("]"):
                hi_open = False
            else:
                self.error("expected ')' or ']' to close an interval")
            self.i += 1
            return InInterval(left, lo, hi, lo_open, hi_open)
        for op in ("<=", ">=", "=", "<", ">"):
            if self.at(op):
                self.i += 1
                return NumCompare(left, op, self.numexpr(bound))
        self.error("expected a comparison or 'in' after a numeric expression")

    def numexpr(self, bound):
        terms = [self.numproduct(bound)]
        while self.at("+"):
            self.i += 1
            terms.append(self.numproduct(bound))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def numproduct(self, bound):
        terms = [self.numprimary(bound)]
        while self.at("*"):
            self.i += 1
            terms.append(self.numprimary(bound))
        return terms[0] if len(terms) == 1 else Product(tuple(terms))

    def numprimary(self, bound):
        if self.tok.kind == "num":
            return Literal(self.number())
        if self.at("("):
            self.i += 1
            e = self.numexpr(bound)
            self.expect(")")
            return e
        if self.at("["):
            return self.proportion(bound)
        self.error("expected a number or a proportion term")

    def proportion(self, bound):
        # Bound variables follow the closing bracket, so look ahead for them.
        open_tok = self.tok
        close = self._matching_bracket(self.i)
        if close is None:
            self.error("unclosed '['", open_tok)
        save = self.i
        self.i = close + 1
        self.expect("_")
        vars_ = self.var_list()
        after = self.i
        self.i = save + 1
        inner = bound | set(vars_)
        body = self.formula(inner, nobar=True)
        cond = None
        if self.at("|"):
            self.i += 1
            cond = self.formula(inner, False)
        if self.i != close:
            self.error("expected ']' to close the proportion")
        self.i = after
        return Proportion(body, cond, tuple(vars_))

    def _matching_bracket(self, i):
        depth = 0
        j = i
        while j < len(self.toks):
            t = self.toks[j]
            if t.kind == "name" and t.text == "in" and self._is_interval(j + 1):
                # interval brackets need not balance: "in [0.4, 0.5)"
                j += 6
                continue
            if t.kind == "sym" and t.text == "[":
                depth += 1
            elif t.kind == "sym" and t.text == "]":
                depth -= 1
                if depth == 0:
                    return j
            j += 1
        return None

    def _is_interval(self, j):
        kinds = [self.toks[k] if k < len(self.toks) else None for k in range(j, j + 5)]
        if None in kinds:
            return False
        o, lo, comma, hi, c = kinds
        return (o.text in ("(", "[") and lo.kind == "num" and comma.text == ","
                and hi.kind == "num" and c.text in (")", "]"))

    def var_list(self) -> list:
        if self.at("{"):
            return self.name_list("{", "}", "variable")
        if self.at("(") and self.peek().kind == "name":
            return self.name_list("(", ")", "variable")
        return [self.name("variable")]

    # ---- requests

    def request(self) -> ConstructionRequest:
        event = None
        evidence, queries, interest = [], [], []
        while self.tok.kind != "eof":
            kw = self.tok
            if not self.at("event", "evidence", "query", "interest"):
                self.error("expected 'event', 'evidence', 'query' or 'interest'")
            self.i += 1
            if kw.text == "event":
                if event is not None:
                    self.error("event declared twice", kw)
                event = self.name("event constant")
            else:
                items = [self.request_item(kw.text)]
                while self.at(","):
                    self.i += 1
                    items.append(self.request_item(kw.text))
                {"evidence": evidence, "query": queries, "interest": interest}[kw.text].extend(items)
            self.expect(";")
        if event is None:
            raise KBSyntaxError([Diagnostic("request has no 'event' clause", 1, 1)])
        return ConstructionRequest(event, tuple(evidence), tuple(queries), tuple(interest))

    def request_item(self, clause):
        start = self.tok
        negated = False
        if self.at("~"):
            if clause != "evidence":
                self.error(f"negation is only allowed in evidence, not in {clause}")
            self.i += 1
            negated = True
        f = self.atom(frozenset())
        if isinstance(f, ValueAtom):
            if clause != "evidence" or negated:
                self.error("value assignments are only allowed as positive evidence", start)
            return f
        if clause == "evidence":
            return Not(f) if negated else f
        if f.pred in self.sig.functions:
            return FunApp(f.pred, f.args)
        return f


# -- public API --------------------------------------------------------------


def parse_formula(text: str, sig: Optional[Signature] = None):
    """Parse a single formula (no statement keyword, no terminator)."""
    p = _Parser(tokenize(text), sig)
    f = p.formula(frozenset())
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return f


def parse_kb(text: str) -> SourceKB:
    """Parse and check a knowledge base.

    Raises :class:`KBSyntaxError` with every diagnostic found; a KB is never
    returned partially.
    """
    p = _Parser(tokenize(text, KB_HEADER))
    kb = p.kb()
    diags = [Diagnostic(m) for m in kb.signature.check()]
    for s in kb.statements:
        for d in statement_problems(s, kb.signature):
            diags.append(Diagnostic(d.message, s.line, s.column))
    if diags:
        raise KBSyntaxError(diags)
    return kb


def statement_problems(s: Statement, sig: Signature) -> list:
    diags = list(well_formed(s.formula, sig))
    if s.kind == "fact":
        if not is_ground(s.formula) or _has_quantifier_or_number(s.formula):
            diags.append(Diagnostic("a fact must be a ground, quantifier-free formula"))
    elif s.kind == "stat":
        f = s.formula
        while isinstance(f, ForAll):
            f = f.body
        if not isinstance(f, (NumCompare, InInterval)):
            diags.append(Diagnostic("a stat must be a numeric comparison or interval constraint"))
    return diags


def _has_quantifier_or_number(f) -> bool:
    from .logic import subterms
    return any(isinstance(g, (ForAll, Exists, NumCompare, InInterval)) for g in subterms(f))


def parse_request(text: str, sig: Optional[Signature] = None) -> ConstructionRequest:
    """Parse a request.  With a signature, every symbol must be declared
    (the event constant excepted) and evidence must be ground."""
    p = _Parser(tokenize(text, REQ_HEADER), sig)
    req = p.request()
    diags = [Diagnostic(m) for m in req.problems()]
    for lit in req.evidence:
        if free_vars(lit):
            diags.append(Diagnostic(f"evidence must be ground: {pretty_formula(lit)}"))
    if sig is not None:
        local = sig.merged(Signature(constants={req.event: _event_sort(req, sig)}))
        for lit in req.evidence:
            for d in well_formed(lit, local):
                diags.append(Diagnostic(f"evidence {pretty_formula(lit)}: {d.message}"))
        for atom in req.queries + req.interest:
            probe = atom if isinstance(atom, PredAtom) else _as_value_probe(atom, sig)
            for d in well_formed(probe, local):
                if "not closed" in d.message:
                    continue
                diags.append(Diagnostic(f"{pretty_formula(probe)}: {d.message}"))
        for atom in req.queries:
            if free_vars(atom if isinstance(atom, PredAtom) else PredAtom(atom.fn, atom.args)):
                diags.append(Diagnostic(f"query must be ground: {pretty_node(atom)}"))
    if diags:
        raise KBSyntaxError(diags)
    return req


def _as_value_probe(atom: FunApp, sig):
    values = sig.functions[atom.fn].values if atom.fn in sig.functions and sig.functions[atom.fn].finite else None
    return ValueAtom(atom, Const(values[0] if values else "?"))


def _event_sort(req, sig) -> str:
    if sig.constants.get(req.event):
        return sig.constants[req.event]
    atoms = [lit.arg if isinstance(lit, Not) else lit for lit in req.evidence]
    atoms += list(req.queries) + list(req.interest)
    for atom in atoms:
        head = atom.term if isinstance(atom, ValueAtom) else atom
        name = head.pred if isinstance(head, PredAtom) else head.fn
        sorts = sig.predicates.get(name)
        if sorts is None and name in sig.functions:
            sorts = sig.functions[name].arg_sorts
        if not sorts:
            continue
        for i, a in enumerate(head.args):
            if isinstance(a, Const) and a.name == req.event and i < len(sorts):
                return sorts[i]
    return sig.sort_names()[0]


# -- printer -----------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def format_number(q: Fraction) -> str:
    """Shortest exact text for a rational: a finite decimal when one exists."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    places = max(twos, fives)
    sign = "-" if q < 0 else ""
    scaled = abs(q) * 10 ** places
    whole, frac = divmod(int(scaled), 10 ** places)
    return f"{sign}{whole}.{str(frac).zfill(places)}"


def pretty_term(t) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    return f"{t.fn}({', '.join(pretty_term(a) for a in t.args)})"


def pretty_node(atom) -> str:
    if isinstance(atom, FunApp):
        return pretty_term(atom)
    return pretty_formula(atom)


def pretty_formula(f, nobar: bool = False) -> str:
    """Render a formula so that parsing the text gives back the same AST."""
    return _fmt(f, 0, nobar)


def _fmt(f, ctx, nobar):
    # ctx: precedence of the enclosing binary operator slot (0 = top level).
    if isinstance(f, PredAtom):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(pretty_term(a) for a in f.args)})"
    if isinstance(f, ValueAtom):
        return f"{pretty_term(f.term)} = {pretty_term(f.value)}"
    if isinstance(f, Not):
        inner = f.arg
        text = _fmt(inner, 5, nobar)
        return "~" + text
    if isinstance(f, (ForAll, Exists)):
        kw = "all" if isinstance(f, ForAll) else "ex"
        text = f"{kw} {', '.join(f.vars)}. {_fmt(f.body, 0, nobar)}"
        return f"({_fmt_top(f)})" if ctx > 0 else text
    if type(f) in _PREC:
        prec = _PREC[type(f)]
        if isinstance(f, Or) and nobar:
            return f"({_fmt(f, 0, False)})"
        if isinstance(f, Implies):
            lhs = _fmt(f.left, prec + 1, nobar)
            rhs = _fmt(f.right, prec, nobar)
        else:
            lhs = _fmt(f.left, prec, nobar)
            rhs = _fmt(f.right, prec + 1, nobar)
        text = f"{lhs} {_OPS[type(f)]} {rhs}"
        return f"({_fmt(f, 0, False)})" if prec < ctx else text
    if isinstance(f, NumCompare):
        text = f"{_num(f.left, 0)} {f.op} {_num(f.right, 0)}"
        return text
    if isinstance(f, InInterval):
        lo = "(" if f.lo_open else "["
        hi = ")" if f.hi_open else "]"
        return f"{_num(f.expr, 0)} in {lo}{format_number(f.lo)}, {format_number(f.hi)}{hi}"
    raise TypeError(f"not a formula: {f!r}")


def _fmt_top(f):
    return _fmt(f, 0, False)


def _num(e, ctx) -> str:
    # ctx: 0 top, 1 inside a sum, 2 inside a product
    if isinstance(e, Literal):
        return format_number(e.value)
    if isinstance(e, Proportion):
        body = pretty_formula(e.body, nobar=True)
        if e.condition is not None:
            body += " | " + pretty_formula(e.condition)
        return f"[{body}]_{{{', '.join(e.vars)}}}"
    if isinstance(e, Sum):
        text = " + ".join(_num(t, 1) for t in e.terms)
        return f"({text})" if ctx >= 1 else text
    if isinstance(e, Product):
        text = " * ".join(_num(t, 2) for t in e.terms)
        return f"({text})" if ctx >= 2 else text
    raise TypeError(f"not a numeric expression: {e!r}")


def pretty_declaration(d: Declaration) -> str:
    if d.kind == "sort":
        return f"sort {', '.join(d.names)};"
    if d.kind == "const":
        sort = f" : {d.sort}" if d.sort else ""
        return f"const {', '.join(d.names)}{sort};"
    args = f"({', '.join(d.arg_sorts)})" if d.arg_sorts else ""
    if d.kind == "pred":
        return f"pred {d.names[0]}{args};"
    if d.values is not None:
        return f"func {d.names[0]}{args or '()'} -> {{{', '.join(d.values)}}};"
    return f"func {d.names[0]}{args or '()'} -> {d.result};"


def pretty_statement(s: Statement) -> str:
    label = f"@{s.label}: " if s.label else ""
    return f"{label}{s.kind} {pretty_formula(s.formula)}."


def pretty_print(kb: SourceKB) -> str:
    """Deterministic text for a KB; ``parse_kb`` of it gives back ``kb``."""
    lines = [KB_HEADER]
    for item in kb.items:
        if isinstance(item, Declaration):
            lines.append(pretty_declaration(item))
        else:
            lines.append(pretty_statement(item))
    return "\n".join(lines) + "\n"


def pretty_request(req: ConstructionRequest) -> str:
    lines = [REQ_HEADER, f"event {req.event};"]
    if req.evidence:
        lines.append("evidence " + ", ".join(pretty_formula(e).replace(" = ", "=") for e in req.evidence) + ";")
    if req.queries:
        lines.append("query " + ", ".join(pretty_node(q) for q in req.queries) + ";")
    if req.interest:
        lines.append("interest " + ", ".join(pretty_node(q) for q in req.interest) + ";")
    return "\n".join(lines) + "\n"
