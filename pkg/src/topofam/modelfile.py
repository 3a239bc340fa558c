"""Plain-text model files: categories, functors, pseudofunctors, expectations.

Grammar (one statement per line, ``#`` starts a comment)::

    file      := section*
    section   := header NL statement* "end"
    header    := "category" STR
               | "functor" STR ":" STR "->" STR
               | "pseudofunctor" STR "over" STR
               | "expect" STR
    category statements:
        "object" STR
        "arrow" STR ":" STR "->" STR
        "identity" STR "=" STR
        "compose" STR STR "=" STR          # g f = g∘f
    functor statements:
        "object" STR "->" STR
        "arrow" STR "->" STR
    pseudofunctor statements:
        "element" STR STR                  # base object, element
        "le" STR STR STR                   # base object, x, y  (a Hasse edge x <= y)
        "transition" STR STR "->" STR      # base arrow φ, y, φ*(y)
    expect statements:
        "flag" STR "=" ("true" | "false")

Strings are double quoted with ``\\"`` and ``\\\\`` escapes.  An
``expect`` section names a functor or a pseudofunctor (whose total
projection is meant).  :func:`print_model` emits the canonical form and
``parse_model(print_model(m))`` reproduces ``m``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .fincat import FinCat, FunctorMap, InputError
from .grothendieck import Poset, PosetPseudofunctor
from .topological import FLAG_NAMES


class ParseError(InputError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


@dataclass
class ModelFile:
    categories: dict[str, FinCat] = field(default_factory=dict)
    functors: dict[str, FunctorMap] = field(default_factory=dict)
    pseudofunctors: dict[str, PosetPseudofunctor] = field(default_factory=dict)
    expectations: dict[str, dict[str, bool]] = field(default_factory=dict)

    def add_category(self, c: FinCat):
        if c.name not in self.categories:
            self.categories[c.name] = c
        elif self.categories[c.name] is not c:
            raise InputError(f"two different categories named {c.name!r}")

    def add_functor(self, u: FunctorMap):
        self.add_category(u.source)
        self.add_category(u.target)
        self.functors[u.name] = u

    def add_pseudofunctor(self, p: PosetPseudofunctor):
        self.add_category(p.base)
        self.pseudofunctors[p.name] = p


# -- tokenizer ---------------------------------------------------------------------

_TOKEN = re.compile(r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<arrow>->)|(?P<punct>[:=])|(?P<word>[A-Za-z_][A-Za-z0-9_-]*)|(?P<comment>#.*)|(?P<bad>\S))')


@dataclass
class Token:
    kind: str  # str, word, punct
    value: str
    col: int


def _unescape(raw: str, line: int, col: int) -> str:
    out, i = [], 1
    while i < len(raw) - 1:
        ch = raw[i]
        if ch == "\\":
            nxt = raw[i + 1]
            if nxt not in '"\\':
                raise ParseError(f"unknown escape \\{nxt}", line, col + i)
            out.append(nxt)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _tokens(text: str, line: int) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        col = m.start(m.lastgroup) + 1 if m.lastgroup else pos + 1
        if m.lastgroup == "str":
            out.append(Token("str", _unescape(m.group("str"), line, col), col))
        elif m.lastgroup == "arrow":
            out.append(Token("punct", "->", col))
        elif m.lastgroup == "punct":
            out.append(Token("punct", m.group("punct"), col))
        elif m.lastgroup == "word":
            out.append(Token("word", m.group("word"), col))
        elif m.lastgroup == "bad":
            if m.group("bad") == '"':
                raise ParseError("unterminated string", line, col)
            raise ParseError(f"unexpected character {m.group('bad')!r}", line, col)
        pos = m.end()
    return out


# statement shapes: S = string, other items are literal words/punctuation
_HEADERS = {
    "category": ["S"],
    "functor": ["S", ":", "S", "->", "S"],
    "pseudofunctor": ["S", "over", "S"],
    "expect": ["S"],
}
_BODIES = {
    "category": {
        "object": ["S"],
        "arrow": ["S", ":", "S", "->", "S"],
        "identity": ["S", "=", "S"],
        "compose": ["S", "S", "=", "S"],
    },
    "functor": {"object": ["S", "->", "S"], "arrow": ["S", "->", "S"]},
    "pseudofunctor": {"element": ["S", "S"], "le": ["S", "S", "S"], "transition": ["S", "S", "->", "S"]},
    "expect": {"flag": ["S", "=", "B"]},
}


def _match(tokens: list[Token], shape: list[str], line: int, end_col: int) -> list:
    values = []
    for i, want in enumerate(shape):
        if i >= len(tokens):
            raise ParseError(f"expected {'a string' if want == 'S' else repr(want)}", line, end_col)
        t = tokens[i]
        if want == "S":
            if t.kind != "str":
                raise ParseError(f"expected a string, found {t.value!r}", line, t.col)
            values.append(t.value)
        elif want == "B":
            if t.kind != "word" or t.value not in ("true", "false"):
                raise ParseError("expected true or false", line, t.col)
            values.append(t.value == "true")
        elif t.value != want:
            raise ParseError(f"expected {want!r}, found {t.value!r}", line, t.col)
    if len(tokens) > len(shape):
        raise ParseError(f"unexpected {tokens[len(shape)].value!r}", line, tokens[len(shape)].col)
    return values


def parse_model(text: str) -> ModelFile:
    model = ModelFile()
    section = None  # (kind, header values, header line, statements)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw, lineno)
        if not toks:
            continue
        head = toks[0]
        if head.kind != "word":
            raise ParseError(f"expected a keyword, found {head.value!r}", lineno, head.col)
        if section is None:
            if head.value not in _HEADERS:
                raise ParseError(f"unknown section {head.value!r}", lineno, head.col)
            values = _match(toks[1:], _HEADERS[head.value], lineno, len(raw) + 1)
            section = (head.value, values, lineno, [])
            continue
        if head.value == "end":
            if len(toks) > 1:
                raise ParseError("unexpected text after end", lineno, toks[1].col)
            _build_section(model, *section)
            section = None
            continue
        kind = section[0]
        shapes = _BODIES[kind]
        if head.value not in shapes:
            raise ParseError(f"unknown {kind} key {head.value!r}", lineno, head.col)
        values = _match(toks[1:], shapes[head.value], lineno, len(raw) + 1)
        section[3].append((head.value, values, lineno, head.col))
    if section is not None:
        raise ParseError(f"{section[0]} section not closed with end", section[2], 1)
    return model


def _build_section(model: ModelFile, kind: str, header: list, line: int, stmts: list):
    names = set(model.categories) | set(model.functors) | set(model.pseudofunctors)

    def fail(msg, at=line, col=1):
        raise ParseError(msg, at, col)

    if kind == "category":
        (name,) = header
        if name in model.categories:
            fail(f"duplicate category {name!r}")
        objects, arrows, ids, comp = [], {}, {}, {}
        for key, vals, at, col in stmts:
            if key == "object":
                objects.append(vals[0])
            elif key == "arrow":
                if vals[0] in arrows:
                    fail(f"duplicate arrow {vals[0]!r}", at, col)
                arrows[vals[0]] = (vals[1], vals[2])
            elif key == "identity":
                ids[vals[0]] = vals[1]
            else:
                if (vals[0], vals[1]) in comp:
                    fail(f"duplicate composite {vals[0]!r} {vals[1]!r}", at, col)
                comp[(vals[0], vals[1])] = vals[2]
        model.categories[name] = FinCat(tuple(objects), arrows, ids, comp, name)
    elif kind == "functor":
        name, src, tgt = header
        if name in names:
            fail(f"duplicate name {name!r}")
        for c in (src, tgt):
            if c not in model.categories:
                fail(f"unknown category {c!r}")
        om, am = {}, {}
        for key, vals, at, col in stmts:
            (om if key == "object" else am)[vals[0]] = vals[1]
        model.functors[name] = FunctorMap(model.categories[src], model.categories[tgt], om, am, name)
    elif kind == "pseudofunctor":
        name, base_name = header
        if name in names:
            fail(f"duplicate name {name!r}")
        if base_name not in model.categories:
            fail(f"unknown category {base_name!r}")
        base = model.categories[base_name]
        elements: dict[str, list[str]] = {s: [] for s in base.objects}
        edges: dict[str, list[tuple[str, str]]] = {s: [] for s in base.objects}
        trans: dict[str, dict[str, str]] = {}
        for key, vals, at, col in stmts:
            if vals[0] not in (base.arrows if key == "transition" else elements):
                fail(f"unknown base {'arrow' if key == 'transition' else 'object'} {vals[0]!r}", at, col)
            if key == "element":
                elements[vals[0]].append(vals[1])
            elif key == "le":
                edges[vals[0]].append((vals[1], vals[2]))
            else:
                trans.setdefault(vals[0], {})[vals[1]] = vals[2]
        try:
            posets = {s: Poset.from_hasse(elements[s], edges[s]) for s in base.objects}
        except InputError as e:
            fail(str(e))
        model.pseudofunctors[name] = PosetPseudofunctor(base, posets, trans, name)
    else:
        (name,) = header
        flags = {}
        for _, vals, at, col in stmts:
            if vals[0] not in FLAG_NAMES:
                fail(f"unknown flag {vals[0]!r}", at, col)
            flags[vals[0]] = vals[1]
        model.expectations[name] = flags


# -- printer -------------------------------------------------------------------------


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def print_category(c: FinCat) -> list[str]:
    out = [f"category {quote(c.name)}"]
    out += [f"  object {quote(x)}" for x in c.objects]
    out += [f"  arrow {quote(a)}: {quote(s)} -> {quote(t)}" for a, (s, t) in c.arrows.items()]
    out += [f"  identity {quote(x)} = {quote(c.identities[x])}" for x in c.objects if x in c.identities]
    out += [f"  compose {quote(g)} {quote(f)} = {quote(h)}" for (g, f), h in sorted(c.compose.items())]
    out.append("end")
    return out


def print_functor(u: FunctorMap) -> list[str]:
    out = [f"functor {quote(u.name)}: {quote(u.source.name)} -> {quote(u.target.name)}"]
    out += [f"  object {quote(x)} -> {quote(u.obj_map[x])}" for x in u.source.objects if x in u.obj_map]
    out += [f"  arrow {quote(a)} -> {quote(u.arr_map[a])}" for a in u.source.arrow_ids if a in u.arr_map]
    out.append("end")
    return out


def print_pseudofunctor(p: PosetPseudofunctor) -> list[str]:
    out = [f"pseudofunctor {quote(p.name)} over {quote(p.base.name)}"]
    for s in p.base.objects:
        out += [f"  element {quote(s)} {quote(x)}" for x in p.fiber_poset[s].elements]
    for s in p.base.objects:
        out += [f"  le {quote(s)} {quote(a)} {quote(b)}" for a, b in p.fiber_poset[s].hasse()]
    for phi in p.base.arrow_ids:
        t = p.base.tgt(phi)
        tab = p.transition.get(phi, {})
        out += [f"  transition {quote(phi)} {quote(y)} -> {quote(tab[y])}"
                for y in p.fiber_poset[t].elements if y in tab]
    out.append("end")
    return out


def print_expectation(name: str, flags: dict[str, bool]) -> list[str]:
    out = [f"expect {quote(name)}"]
    out += [f"  flag {quote(k)} = {'true' if flags[k] else 'false'}" for k in FLAG_NAMES if k in flags]
    out.append("end")
    return out


def print_model(m: ModelFile) -> str:
    blocks = [print_category(c) for c in m.categories.values()]
    blocks += [print_functor(u) for u in m.functors.values()]
    blocks += [print_pseudofunctor(p) for p in m.pseudofunctors.values()]
    blocks += [print_expectation(n, f) for n, f in m.expectations.items()]
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
