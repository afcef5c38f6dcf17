"""Guarded-command models of symmetric concurrent systems.

A model declares component types (each replicated ``count`` times),
global variables (plain integers or id-sensitive process indices),
guarded commands per component type and symmetric safety properties.
Guards can only observe other instances through counting atoms and the
acting instance through ``self``, so every model is fully symmetric in
the instances of each type by construction.

File format (``#`` starts a comment)::

    model mutex
    type Proc count 3 locals N T C init N
    global tok idsensitive Proc init any
    global phase domain 4 init 0
    command Proc try   from N to T
    command Proc enter from T to C guard tok == self
    command Proc leave from C to N update tok := any
    property mutex_safe bad count(Proc, C) >= 2
"""
from __future__ import annotations

import math
import operator
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .bdd import BDD, Function

DEFAULT_BIT_CAP = 4096

COMPARATORS = {
    "==": operator.eq,
    "<=": operator.le,
    ">=": operator.ge,
    "<": operator.lt,
    ">": operator.gt,
}


class ModelError(Exception):
    """Invalid model text or model object."""


class ParseError(ModelError):
    def __init__(self, msg: str, line: int = 0, col: int = 0) -> None:
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)


class CapacityError(ModelError):
    """State vector wider than the configured bit cap."""


# ----------------------------------------------------------------------
# model objects


@dataclass(frozen=True)
class ComponentType:
    name: str
    count: int
    locals: Tuple[str, ...]
    init: str

    def local_index(self, name: str) -> int:
        return self.locals.index(name)


@dataclass(frozen=True)
class GlobalVar:
    """A global variable.

    Plain variables range over ``0..domain-1``. Id-sensitive variables
    range over the 1-based instance indices ``1..n`` of ``target``.
    ``init`` is ``None`` for a nondeterministic initial value.
    """

    name: str
    kind: str  # "plain" | "idsensitive"
    domain: int = 0
    target: Optional[str] = None
    init: Optional[int] = None

    @property
    def id_sensitive(self) -> bool:
        return self.kind == "idsensitive"


@dataclass(frozen=True)
class SelfEq:
    var: str


@dataclass(frozen=True)
class ConstCmp:
    var: str
    op: str
    value: int


@dataclass(frozen=True)
class Count:
    type: str
    local: str
    op: str
    value: int
    others: bool = False


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class And:
    items: Tuple["Cond", ...]


@dataclass(frozen=True)
class Or:
    items: Tuple["Cond", ...]


GuardAtom = Union[SelfEq, ConstCmp, Count]
Cond = Union[ConstCmp, Count, BoolConst, And, Or]


@dataclass(frozen=True)
class Update:
    var: str
    kind: str  # "const" | "self" | "any"
    value: int = 0


@dataclass(frozen=True)
class Command:
    type: str
    label: str
    src: str
    dst: str
    guard: Tuple[GuardAtom, ...] = ()
    updates: Tuple[Update, ...] = ()


@dataclass(frozen=True)
class SafetyProperty:
    name: str
    bad: Cond


@dataclass(frozen=True)
class Model:
    name: str
    types: Tuple[ComponentType, ...]
    globals: Tuple[GlobalVar, ...] = ()
    commands: Tuple[Command, ...] = ()
    properties: Tuple[SafetyProperty, ...] = ()

    def type(self, name: str) -> ComponentType:
        for t in self.types:
            if t.name == name:
                return t
        raise ModelError(f"undeclared component type {name!r}")

    def var(self, name: str) -> GlobalVar:
        for g in self.globals:
            if g.name == name:
                return g
        raise ModelError(f"undeclared global {name!r}")

    def commands_of(self, type_name: str) -> List[Command]:
        return [c for c in self.commands if c.type == type_name]

    def id_vars_for(self, type_name: str) -> List[GlobalVar]:
        return [g for g in self.globals if g.id_sensitive and g.target == type_name]

    def domain_values(self, g: GlobalVar) -> range:
        if g.id_sensitive:
            return range(1, self.type(g.target).count + 1)
        return range(g.domain)

    def group_order(self) -> int:
        return math.prod(math.factorial(t.count) for t in self.types)

    def with_counts(self, **counts: int) -> "Model":
        types = tuple(
            ComponentType(t.name, counts.get(t.name, t.count), t.locals, t.init)
            for t in self.types)
        m = Model(self.name, types, self.globals, self.commands, self.properties)
        validate(m)
        return m


class State(NamedTuple):
    """Explicit global state.

    ``globals`` follows the model's declaration order; ``locals`` holds
    one tuple of local-state indices per component type.
    """

    globals: Tuple[int, ...]
    locals: Tuple[Tuple[int, ...], ...]


# ----------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|==|<=|>=|&&|\|\||<|>|\(|\)|,)
""", re.VERBOSE)


class _Tokens:
    def __init__(self, text: str, lineno: int) -> None:
        self.lineno = lineno
        self.items: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
            if m.lastgroup != "ws":
                self.items.append((m.lastgroup, m.group(), pos + 1))
            pos = m.end()
        self.i = 0
        self.end_col = len(text) + 1

    def peek(self) -> Optional[str]:
        return self.items[self.i][1] if self.i < len(self.items) else None

    def col(self) -> int:
        return self.items[self.i][2] if self.i < len(self.items) else self.end_col

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.lineno, self.col())

    def next(self, kind: Optional[str] = None, what: str = "token") -> str:
        if self.i >= len(self.items):
            raise self.error(f"expected {what}, found end of line")
        k, v, _ = self.items[self.i]
        if kind is not None and k != kind:
            raise self.error(f"expected {what}, found {v!r}")
        self.i += 1
        return v

    def expect(self, value: str) -> None:
        if self.peek() != value:
            found = self.peek()
            raise self.error(f"expected {value!r}, found {found!r}" if found else
                             f"expected {value!r}, found end of line")
        self.i += 1

    def name(self, what: str = "name") -> str:
        return self.next("name", what)

    def number(self, what: str = "integer") -> int:
        return int(self.next("num", what))

    def at_end(self) -> bool:
        return self.i >= len(self.items)

    def accept(self, value: str) -> bool:
        if self.peek() == value:
            self.i += 1
            return True
        return False


def _comparator(tok: _Tokens) -> str:
    col = tok.col()
    op = tok.next(what="comparator")
    if op not in COMPARATORS:
        raise ParseError(f"expected comparator, found {op!r}", tok.lineno, col)
    return op


def _count_atom(tok: _Tokens, others: bool) -> Count:
    tok.expect("(")
    t = tok.name("component type")
    tok.expect(",")
    s = tok.name("local state")
    tok.expect(")")
    op = _comparator(tok)
    return Count(t, s, op, tok.number(), others)


def _guard_atom(tok: _Tokens) -> GuardAtom:
    head = tok.name("guard atom")
    if head in ("count", "count_others") and tok.peek() == "(":
        return _count_atom(tok, head == "count_others")
    op = _comparator(tok)
    if tok.accept("self"):
        if op != "==":
            raise tok.error("only '==' may compare with self")
        return SelfEq(head)
    return ConstCmp(head, op, tok.number("integer or self"))


def _cond(tok: _Tokens) -> Cond:
    items = [_conj(tok)]
    while tok.accept("||"):
        items.append(_conj(tok))
    return items[0] if len(items) == 1 else Or(tuple(items))


def _conj(tok: _Tokens) -> Cond:
    items = [_cond_atom(tok)]
    while tok.accept("&&"):
        items.append(_cond_atom(tok))
    return items[0] if len(items) == 1 else And(tuple(items))


def _cond_atom(tok: _Tokens) -> Cond:
    if tok.accept("("):
        c = _cond(tok)
        tok.expect(")")
        return c
    head = tok.name("condition")
    if head in ("true", "false"):
        return BoolConst(head == "true")
    if head == "count" and tok.peek() == "(":
        return _count_atom(tok, False)
    if head == "count_others":
        raise tok.error("count_others is only meaningful inside a command guard")
    op = _comparator(tok)
    return ConstCmp(head, op, tok.number())


def parse_model(text: str) -> Model:
    """Parse and validate model text."""
    name = None
    types: List[ComponentType] = []
    globs: List[Tuple[GlobalVar, int]] = []
    commands: List[Tuple[Command, int]] = []
    props: List[Tuple[SafetyProperty, int]] = []
    pending_globals: List[Tuple[str, str, object, Optional[int], int]] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tok = _Tokens(line, lineno)
        kw = tok.name("keyword")
        if name is None and kw != "model":
            raise ParseError("expected 'model <name>' before other declarations", lineno, 1)
        if kw == "model":
            if name is not None:
                raise ParseError("duplicate model declaration", lineno, 1)
            name = tok.name("model name")
        elif kw == "type":
            tname = tok.name("type name")
            tok.expect("count")
            count = tok.number("instance count")
            if count < 1:
                raise ParseError("instance count must be positive", lineno, tok.col())
            tok.expect("locals")
            locs = []
            while tok.peek() not in (None, "init"):
                locs.append(tok.name("local state"))
            if not locs:
                raise tok.error("at least one local state required")
            tok.expect("init")
            init = tok.name("initial local state")
            if len(set(locs)) != len(locs):
                raise ParseError(f"duplicate local state in type {tname!r}", lineno, 1)
            if init not in locs:
                raise ParseError(f"initial state {init!r} is not a local state of {tname!r}",
                                 lineno, 1)
            types.append(ComponentType(tname, count, tuple(locs), init))
        elif kw == "global":
            gname = tok.name("global name")
            kind = tok.name("'idsensitive' or 'domain'")
            if kind == "idsensitive":
                arg: object = tok.name("target type")
            elif kind == "domain":
                arg = tok.number("domain size")
                if arg < 1:
                    raise ParseError("domain size must be positive", lineno, 1)
            else:
                raise ParseError(f"unknown global kind {kind!r}", lineno, 1)
            tok.expect("init")
            init_val = None if tok.accept("any") else tok.number("initial value or any")
            pending_globals.append((gname, kind, arg, init_val, lineno))
        elif kw == "command":
            ctype = tok.name("component type")
            label = tok.name("command label")
            tok.expect("from")
            src = tok.name("local state")
            tok.expect("to")
            dst = tok.name("local state")
            guard: List[GuardAtom] = []
            updates: List[Update] = []
            if tok.accept("guard"):
                guard.append(_guard_atom(tok))
                while tok.accept("&&"):
                    guard.append(_guard_atom(tok))
            if tok.accept("update"):
                while True:
                    var = tok.name("variable")
                    tok.expect(":=")
                    if tok.accept("any"):
                        updates.append(Update(var, "any"))
                    elif tok.accept("self"):
                        updates.append(Update(var, "self"))
                    else:
                        updates.append(Update(var, "const", tok.number("value, self or any")))
                    if not tok.accept(","):
                        break
            commands.append((Command(ctype, label, src, dst, tuple(guard), tuple(updates)),
                             lineno))
        elif kw == "property":
            pname = tok.name("property name")
            tok.expect("bad")
            props.append((SafetyProperty(pname, _cond(tok)), lineno))
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno, 1)
        if not tok.at_end():
            raise tok.error(f"unexpected {tok.peek()!r}")

    if name is None:
        raise ParseError("empty model: expected 'model <name>'", 1, 1)

    type_names = {t.name for t in types}
    for gname, kind, arg, init_val, lineno in pending_globals:
        if kind == "idsensitive":
            if arg not in type_names:
                raise ParseError(f"undeclared component type {arg!r}", lineno, 1)
            n = next(t.count for t in types if t.name == arg)
            if init_val is not None and not 1 <= init_val <= n:
                raise ParseError(
                    f"initial value {init_val} of {gname!r} outside 1..{n}", lineno, 1)
            globs.append((GlobalVar(gname, "idsensitive", 0, arg, init_val), lineno))
        else:
            if init_val is not None and not 0 <= init_val < arg:
                raise ParseError(
                    f"initial value {init_val} of {gname!r} outside 0..{arg - 1}", lineno, 1)
            globs.append((GlobalVar(gname, "plain", arg, None, init_val), lineno))

    model = Model(name, tuple(types), tuple(g for g, _ in globs),
                  tuple(c for c, _ in commands), tuple(p for p, _ in props))
    lines = {("global", g.name): ln for g, ln in globs}
    lines.update({("command", i): ln for i, (_, ln) in enumerate(commands)})
    lines.update({("property", p.name): ln for p, ln in props})
    validate(model, lines)
    return model


def validate(model: Model, lines: Optional[dict] = None) -> None:
    """Resolve names and check the symmetry restrictions."""
    lines = lines or {}

    def fail(msg: str, key=None) -> None:
        raise ParseError(msg, lines.get(key, 0), 1 if key in lines else 0)

    seen = set()
    for t in model.types:
        if t.name in seen:
            fail(f"duplicate declaration {t.name!r}")
        seen.add(t.name)
    for g in model.globals:
        if g.name in seen:
            fail(f"duplicate declaration {g.name!r}", ("global", g.name))
        seen.add(g.name)
    if not model.types:
        fail("model declares no component types")
    types = {t.name: t for t in model.types}
    gvars = {g.name: g for g in model.globals}

    def check_count(a: Count, key, acting: Optional[str]) -> None:
        if a.type not in types:
            fail(f"undeclared component type {a.type!r}", key)
        if a.local not in types[a.type].locals:
            fail(f"{a.local!r} is not a local state of {a.type!r}", key)
        if a.op not in COMPARATORS:
            fail(f"bad comparator {a.op!r}", key)
        if a.others and a.type != acting:
            fail("count_others must count the acting component type", key)

    def check_plain(a: ConstCmp, key) -> None:
        g = gvars.get(a.var)
        if g is None:
            fail(f"undeclared global {a.var!r}", key)
        if g.id_sensitive:
            fail(f"id-sensitive {a.var!r} can only be compared with self", key)

    labels = set()
    for i, c in enumerate(model.commands):
        key = ("command", i)
        if c.type not in types:
            fail(f"undeclared component type {c.type!r}", key)
        t = types[c.type]
        if (c.type, c.label) in labels:
            fail(f"duplicate command {c.type}.{c.label}", key)
        labels.add((c.type, c.label))
        for s in (c.src, c.dst):
            if s not in t.locals:
                fail(f"{s!r} is not a local state of {c.type!r}", key)
        for a in c.guard:
            if isinstance(a, SelfEq):
                g = gvars.get(a.var)
                if g is None:
                    fail(f"undeclared global {a.var!r}", key)
                if not g.id_sensitive or g.target != c.type:
                    fail(f"{a.var!r} does not hold {c.type} indices", key)
            elif isinstance(a, ConstCmp):
                check_plain(a, key)
            else:
                check_count(a, key, c.type)
        targets = set()
        for u in c.updates:
            g = gvars.get(u.var)
            if g is None:
                fail(f"undeclared global {u.var!r}", key)
            if u.var in targets:
                fail(f"{u.var!r} updated twice", key)
            targets.add(u.var)
            if u.kind == "self" and (not g.id_sensitive or g.target != c.type):
                fail(f"{u.var!r} cannot be set to a {c.type} index", key)
            if u.kind == "const":
                if g.id_sensitive:
                    fail(f"id-sensitive {u.var!r} can only be set to self or any", key)
                if not 0 <= u.value < g.domain:
                    fail(f"value {u.value} outside the domain of {u.var!r}", key)

    names = set()
    for p in model.properties:
        key = ("property", p.name)
        if p.name in names:
            fail(f"duplicate property {p.name!r}", key)
        names.add(p.name)
        for a in _atoms(p.bad):
            if isinstance(a, Count):
                check_count(a, key, None)
            elif isinstance(a, ConstCmp):
                check_plain(a, key)


def _atoms(c: Cond):
    if isinstance(c, (And, Or)):
        for item in c.items:
            yield from _atoms(item)
    else:
        yield c


# ----------------------------------------------------------------------
# printing


def _fmt_atom(a) -> str:
    if isinstance(a, SelfEq):
        return f"{a.var} == self"
    if isinstance(a, ConstCmp):
        return f"{a.var} {a.op} {a.value}"
    if isinstance(a, Count):
        head = "count_others" if a.others else "count"
        return f"{head}({a.type}, {a.local}) {a.op} {a.value}"
    if isinstance(a, BoolConst):
        return "true" if a.value else "false"
    raise TypeError(a)


def format_cond(c: Cond, nested: bool = False) -> str:
    if isinstance(c, Or):
        s = " || ".join(format_cond(i, True) for i in c.items)
        return f"({s})" if nested else s
    if isinstance(c, And):
        return " && ".join(format_cond(i, True) for i in c.items)
    return _fmt_atom(c)


def format_model(model: Model) -> str:
    """Print a model in the text format accepted by :func:`parse_model`."""
    out = [f"model {model.name}"]
    for t in model.types:
        out.append(f"type {t.name} count {t.count} locals {' '.join(t.locals)} init {t.init}")
    for g in model.globals:
        init = "any" if g.init is None else str(g.init)
        kind = f"idsensitive {g.target}" if g.id_sensitive else f"domain {g.domain}"
        out.append(f"global {g.name} {kind} init {init}")
    for c in model.commands:
        line = f"command {c.type} {c.label} from {c.src} to {c.dst}"
        if c.guard:
            line += " guard " + " && ".join(_fmt_atom(a) for a in c.guard)
        if c.updates:
            ups = []
            for u in c.updates:
                v = str(u.value) if u.kind == "const" else u.kind
                ups.append(f"{u.var} := {v}")
            line += " update " + ", ".join(ups)
        out.append(line)
    for p in model.properties:
        out.append(f"property {p.name} bad {format_cond(p.bad)}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------
# bit layout


def bits_for(size: int) -> int:
    """Bits needed to encode ``size`` distinct values."""
    return (size - 1).bit_length() if size > 1 else 0


@dataclass(frozen=True)
class BitLayout:
    """Current-state bit ``k`` is BDD variable ``2k``; its next-state
    partner is ``2k + 1``. All bit lists are most significant bit first.
    """

    globals: Dict[str, Tuple[int, ...]]
    blocks: Dict[str, Tuple[Tuple[int, ...], ...]]
    nbits: int

    @property
    def nvars(self) -> int:
        return 2 * self.nbits

    @property
    def current(self) -> Tuple[int, ...]:
        return tuple(range(0, 2 * self.nbits, 2))

    @property
    def next(self) -> Tuple[int, ...]:
        return tuple(range(1, 2 * self.nbits, 2))

    def next_to_current(self) -> Dict[int, int]:
        return {v + 1: v for v in range(0, 2 * self.nbits, 2)}

    def block(self, type_name: str, j: int) -> Tuple[int, ...]:
        return self.blocks[type_name][j]


def encode_layout(model: Model, bit_cap: int = DEFAULT_BIT_CAP) -> BitLayout:
    """Plain globals, then id-sensitive globals, then the instance blocks
    of each type in declaration order, instance 1 first."""
    k = 0
    gbits: Dict[str, Tuple[int, ...]] = {}
    ordered = ([g for g in model.globals if not g.id_sensitive]
               + [g for g in model.globals if g.id_sensitive])
    for g in ordered:
        size = model.type(g.target).count if g.id_sensitive else g.domain
        w = bits_for(size)
        gbits[g.name] = tuple(2 * (k + i) for i in range(w))
        k += w
    blocks: Dict[str, Tuple[Tuple[int, ...], ...]] = {}
    for t in model.types:
        w = bits_for(len(t.locals))
        inst = []
        for _ in range(t.count):
            inst.append(tuple(2 * (k + i) for i in range(w)))
            k += w
        blocks[t.name] = tuple(inst)
    if k > bit_cap:
        raise CapacityError(f"state vector needs {k} bits, cap is {bit_cap}")
    return BitLayout(gbits, blocks, k)


# ----------------------------------------------------------------------
# symbolic encoding


class Encoder:
    """Builds decision diagrams for a model over one manager."""

    def __init__(self, model: Model, layout: Optional[BitLayout] = None,
                 bdd: Optional[BDD] = None, bit_cap: int = DEFAULT_BIT_CAP) -> None:
        self.model = model
        self.layout = layout or encode_layout(model, bit_cap)
        self.bdd = bdd or BDD(self.layout.nvars)
        if self.bdd.nvars < self.layout.nvars:
            raise ModelError("manager has fewer variables than the layout needs")
        self._cache: Dict[tuple, Function] = {}
        self._frames: Dict[frozenset, Function] = {}

    # values -----------------------------------------------------------

    def value_eq(self, bits: Sequence[int], code: int, nxt: bool = False) -> Function:
        """Bits (MSB first) hold ``code``."""
        w = len(bits)
        if code >= (1 << w) and not (w == 0 and code == 0):
            return self.bdd.false
        off = 1 if nxt else 0
        return self.bdd.cube({b + off: bool((code >> (w - 1 - i)) & 1)
                              for i, b in enumerate(bits)})

    def in_domain(self, bits: Sequence[int], size: int, nxt: bool = False) -> Function:
        """Bits hold a code below ``size``."""
        key = ("dom", tuple(bits), size, nxt)
        f = self._cache.get(key)
        if f is None:
            f = self.bdd.false
            for code in range(size):
                f = f | self.value_eq(bits, code, nxt)
            self._cache[key] = f
        return f

    def var_eq(self, name: str, value: int, nxt: bool = False) -> Function:
        """Global ``name`` has ``value`` (1-based for id-sensitive vars)."""
        g = self.model.var(name)
        code = value - 1 if g.id_sensitive else value
        if not 0 <= code < self._size(g):
            return self.bdd.false
        return self.value_eq(self.layout.globals[name], code, nxt)

    def _size(self, g: GlobalVar) -> int:
        return self.model.type(g.target).count if g.id_sensitive else g.domain

    def local_eq(self, type_name: str, j: int, local: str, nxt: bool = False) -> Function:
        """Instance ``j`` (0-based) of ``type_name`` is in ``local``."""
        key = ("loc", type_name, j, local, nxt)
        f = self._cache.get(key)
        if f is None:
            idx = self.model.type(type_name).local_index(local)
            f = self.value_eq(self.layout.block(type_name, j), idx, nxt)
            self._cache[key] = f
        return f

    # predicates -------------------------------------------------------

    def count_pred(self, type_name: str, local: str, op: str, k: int,
                   exclude: Optional[int] = None) -> Function:
        """Number of instances of ``type_name`` in ``local`` (optionally
        skipping instance ``exclude``) compares ``op k``."""
        key = ("count", type_name, local, op, k, exclude)
        f = self._cache.get(key)
        if f is not None:
            return f
        cmp = COMPARATORS[op]
        n = self.model.type(type_name).count
        cap = max(k + 1, 0)
        # tail[c]: the instances after the current one bring the total
        # from c (saturated at cap) to a value satisfying the comparison
        tail = [self.bdd.true if cmp(c, k) else self.bdd.false for c in range(cap + 1)]
        for j in reversed(range(n)):
            if j == exclude:
                continue
            here = self.local_eq(type_name, j, local)
            tail = [self.bdd.ite(here, tail[min(c + 1, cap)], tail[c])
                    for c in range(cap + 1)]
        f = tail[0]
        self._cache[key] = f
        return f

    def cmp_pred(self, name: str, op: str, value: int) -> Function:
        g = self.model.var(name)
        cmp = COMPARATORS[op]
        f = self.bdd.false
        for v in self.model.domain_values(g):
            if cmp(v, value):
                f = f | self.var_eq(name, v)
        return f

    def condition(self, cond: Cond) -> Function:
        """States satisfying a property condition."""
        if isinstance(cond, BoolConst):
            return self.bdd.true if cond.value else self.bdd.false
        if isinstance(cond, Count):
            return self.count_pred(cond.type, cond.local, cond.op, cond.value)
        if isinstance(cond, ConstCmp):
            return self.cmp_pred(cond.var, cond.op, cond.value)
        if isinstance(cond, And):
            f = self.bdd.true
            for c in cond.items:
                f = f & self.condition(c)
            return f
        if isinstance(cond, Or):
            f = self.bdd.false
            for c in cond.items:
                f = f | self.condition(c)
            return f
        raise TypeError(cond)

    def guard(self, cmd: Command, j: int) -> Function:
        f = self.bdd.true
        for a in cmd.guard:
            if isinstance(a, SelfEq):
                f = f & self.var_eq(a.var, j + 1)
            elif isinstance(a, ConstCmp):
                f = f & self.cmp_pred(a.var, a.op, a.value)
            else:
                ex = j if a.others else None
                f = f & self.count_pred(a.type, a.local, a.op, a.value, ex)
        return f

    # states -----------------------------------------------------------

    def initial(self) -> Function:
        f = self.bdd.true
        for g in self.model.globals:
            bits = self.layout.globals[g.name]
            if g.init is None:
                f = f & self.in_domain(bits, self._size(g))
            else:
                f = f & self.var_eq(g.name, g.init)
        for t in self.model.types:
            for j in range(t.count):
                f = f & self.local_eq(t.name, j, t.init)
        return f

    def valid(self) -> Function:
        """Encodings in which every variable holds an in-domain value."""
        f = self.bdd.true
        for g in self.model.globals:
            f = f & self.in_domain(self.layout.globals[g.name], self._size(g))
        for t in self.model.types:
            for bits in self.layout.blocks[t.name]:
                f = f & self.in_domain(bits, len(t.locals))
        return f

    def encode_state(self, s: State) -> Function:
        assignment: Dict[int, bool] = {}
        for g, v in zip(self.model.globals, s.globals):
            bits = self.layout.globals[g.name]
            code = v - 1 if g.id_sensitive else v
            for i, b in enumerate(bits):
                assignment[b] = bool((code >> (len(bits) - 1 - i)) & 1)
        for t, locs in zip(self.model.types, s.locals):
            for j, v in enumerate(locs):
                bits = self.layout.block(t.name, j)
                for i, b in enumerate(bits):
                    assignment[b] = bool((v >> (len(bits) - 1 - i)) & 1)
        return self.bdd.cube(assignment)

    def encode_states(self, states: Iterable[State]) -> Function:
        f = self.bdd.false
        for s in sorted(states):
            f = f | self.encode_state(s)
        return f

    def decode(self, assignment: Dict[int, bool]) -> State:
        def read(bits: Sequence[int]) -> int:
            v = 0
            for b in bits:
                v = (v << 1) | int(assignment.get(b, False))
            return v

        gl = []
        for g in self.model.globals:
            code = read(self.layout.globals[g.name])
            gl.append(code + 1 if g.id_sensitive else code)
        locs = tuple(tuple(read(bits) for bits in self.layout.blocks[t.name])
                     for t in self.model.types)
        return State(tuple(gl), locs)

    def states(self, f: Function) -> set:
        """Decode every state in a set over the current-state variables."""
        return {self.decode(a) for a in self.bdd.iter_sat(f, self.layout.current)}

    def count(self, f: Function) -> int:
        return self.bdd.count(f, self.layout.current)

    def describe(self, s: State) -> str:
        parts = []
        for t, locs in zip(self.model.types, s.locals):
            parts.append(f"{t.name}=[{','.join(t.locals[v] for v in locs)}]")
        for g, v in zip(self.model.globals, s.globals):
            parts.append(f"{g.name}={v}")
        return " ".join(parts)

    # transitions ------------------------------------------------------

    def frame(self, changed: Iterable[int]) -> Function:
        """Every current bit outside ``changed`` keeps its value."""
        key = frozenset(changed)
        f = self._frames.get(key)
        if f is None:
            f = self.bdd.true
            bdd = self.bdd
            for b in reversed(self.layout.current):
                if b in key:
                    continue
                # built bottom-up so each conjunction stays local
                f = bdd.ite(bdd.var(b), bdd.var(b + 1) & f, bdd.nvar(b + 1) & f)
            self._frames[key] = f
        return f

    def command_relation(self, cmd: Command, j: int) -> Function:
        lay = self.layout
        changed = set(lay.block(cmd.type, j))
        f = self.local_eq(cmd.type, j, cmd.dst, nxt=True)
        for u in cmd.updates:
            g = self.model.var(u.var)
            bits = lay.globals[u.var]
            changed.update(bits)
            if u.kind == "any":
                f = f & self.in_domain(bits, self._size(g), nxt=True)
            elif u.kind == "self":
                f = f & self.var_eq(u.var, j + 1, nxt=True)
            else:
                f = f & self.var_eq(u.var, u.value, nxt=True)
        f = f & self.local_eq(cmd.type, j, cmd.src) & self.guard(cmd, j)
        return f & self.frame(changed)

    def relation(self, type_name: str, j: int) -> Function:
        """Transition relation of instance ``j`` (0-based) of a type."""
        f = self.bdd.false
        for cmd in self.model.commands_of(type_name):
            f = f | self.command_relation(cmd, j)
        return f

    def full_relation(self) -> Function:
        f = self.bdd.false
        for t in self.model.types:
            for j in range(t.count):
                f = f | self.relation(t.name, j)
        return f


def build_component_relation(model: Model, layout: BitLayout, bdd: BDD,
                             type_name: str, j: int) -> Function:
    """Relation over current and next bits for instance ``j`` (0-based)."""
    return Encoder(model, layout, bdd).relation(type_name, j)


def build_predicate(model: Model, layout: BitLayout, bdd: BDD, cond: Cond) -> Function:
    return Encoder(model, layout, bdd).condition(cond)
