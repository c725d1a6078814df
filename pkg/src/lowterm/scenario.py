"""Scenario files: a small brace-and-semicolon DSL describing (G, N, M, SES, d).

Example::

    group { family: cyclic; param: 4; }
    normal { elements: [0, 2]; }
    module M { rank: 1; relations: [[2]]; }
    ses { cocycle: [[0], [1]]; }
    options { max_degree: 4; }

Relations are listed as vectors (one per relation). Action matrices are
given for generating elements, `action g<i>: [[..]]`, where i indexes the
group (or the quotient, for modules declared with `over: quotient`), and are
expanded over the whole Cayley table at load time. Modules without action
entries carry the trivial action. `#` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .exact_linalg import IntMatrix
from .fgab import FgAbGroup
from .grpmod import (
    FiniteGroup,
    GModule,
    GModuleMorphism,
    GroupError,
    ModuleSES,
    NotACocycle,
    NotNormal,
    QuotientData,
    Subgroup,
    builtin_group,
    closure_violation,
    extension_from_cocycle,
    fixed_points,
    quotient_group,
)

FAMILIES = ("cyclic", "dihedral", "quaternion8", "symmetric3", "klein4")
MIN_DEGREE = 4


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str, token: str = ""):
        super().__init__(f"{line}:{column}: {message}" + (f" (at {token!r})" if token else ""))
        self.line, self.column, self.message, self.token = line, column, message, token


class SemanticError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line, self.column, self.message = line, column, message


# -- lexing and parsing --------------------------------------------------------

_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<int>-?\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[{}\[\]:;,])")


@dataclass
class Token:
    kind: str      # int, ident, punct, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos - start + 1, "unexpected character", text[pos])
        kind = m.lastgroup
        if kind:
            toks.append(Token(kind, m.group(), line, pos - start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(Token("eof", "", line, pos - start + 1))
    return toks


@dataclass
class Entry:
    key: str
    arg: Optional[str]
    value: object
    tok: Token


@dataclass
class Section:
    kind: str
    name: Optional[str]
    entries: list
    tok: Token

    def get(self, key: str) -> Optional[Entry]:
        for e in self.entries:
            if e.key == key:
                return e
        return None


SECTION_KINDS = ("group", "normal", "module", "ses", "options")


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        t = self.next()
        if t.kind != kind or (text is not None and t.text != text):
            what = text or kind
            msg = "unexpected end of input" if t.kind == "eof" else f"expected {what!r}"
            raise ParseError(t.line, t.col, msg, t.text)
        return t

    def sections(self) -> list[Section]:
        out = []
        while self.peek().kind != "eof":
            t = self.expect("ident")
            if t.text not in SECTION_KINDS:
                raise ParseError(t.line, t.col, "unknown section", t.text)
            name = None
            if t.text == "module":
                name = self.expect("ident").text
            self.expect("punct", "{")
            entries = []
            while not (self.peek().kind == "punct" and self.peek().text == "}"):
                entries.append(self.entry())
            self.expect("punct", "}")
            out.append(Section(t.text, name, entries, t))
        return out

    def entry(self) -> Entry:
        k = self.expect("ident")
        arg = None
        if self.peek().kind == "ident":
            arg = self.next().text
        self.expect("punct", ":")
        v = self.value()
        self.expect("punct", ";")
        return Entry(k.text, arg, v, k)

    def value(self):
        t = self.next()
        if t.kind == "int":
            return int(t.text)
        if t.kind == "ident":
            return t.text
        if t.kind == "punct" and t.text == "[":
            items = []
            if self.peek().kind == "punct" and self.peek().text == "]":
                self.next()
                return items
            while True:
                items.append(self.value())
                s = self.next()
                if s.kind == "punct" and s.text == "]":
                    return items
                if not (s.kind == "punct" and s.text == ","):
                    raise ParseError(s.line, s.col, "expected ',' or ']'", s.text)
        msg = "unexpected end of input" if t.kind == "eof" else "expected a value"
        raise ParseError(t.line, t.col, msg, t.text)


# -- the scenario ---------------------------------------------------------------

@dataclass
class Scenario:
    """Everything needed to build D, the coefficient sequence and the diagrams."""

    name: str
    G: FiniteGroup
    N: Subgroup
    qd: QuotientData
    M: GModule
    ses: ModuleSES
    d: int = MIN_DEGREE
    family: Optional[tuple] = None       # (family, param) when built from a named family
    explicit_ses: bool = False
    _spectral: dict = field(default_factory=dict, repr=False)

    def spectral(self, resolution: str = "reduced"):
        from .spectral import SpectralDatum
        if resolution not in self._spectral:
            self._spectral[resolution] = SpectralDatum(self.qd, self.M, self.ses, self.d,
                                                       resolution, name=self.name)
        return self._spectral[resolution]

    def equivalent(self, other: "Scenario") -> bool:
        """Same tables, subgroup, module data, sequence and degree bound."""
        return (self.G.table == other.G.table
                and self.N.elements == other.N.elements
                and _same_module(self.M, other.M)
                and all(_same_module(x, y) for x, y in
                        zip((self.ses.A, self.ses.B, self.ses.C),
                            (other.ses.A, other.ses.B, other.ses.C)))
                and self.ses.i.matrix == other.ses.i.matrix
                and self.ses.j.matrix == other.ses.j.matrix
                and self.d == other.d)


def _same_module(a: GModule, b: GModule) -> bool:
    return (a.n == b.n and a.underlying.relations == b.underlying.relations
            and a.action == b.action)


def _sem(tok: Token, msg: str) -> SemanticError:
    return SemanticError(tok.line, tok.col, msg)


def _int(e: Entry, lo: Optional[int] = None) -> int:
    if not isinstance(e.value, int) or (lo is not None and e.value < lo):
        bound = f" >= {lo}" if lo is not None else ""
        raise _sem(e.tok, f"{e.key} must be an integer{bound}")
    return e.value


def _matrix(e: Entry, rows: Optional[int] = None, cols: Optional[int] = None) -> IntMatrix:
    v = e.value
    if not isinstance(v, list) or any(not isinstance(r, list) for r in v) or \
            any(not isinstance(x, int) for r in v for x in r):
        raise _sem(e.tok, f"{e.key} must be a matrix of integers")
    r = len(v) if rows is None else rows
    c = (len(v[0]) if v else 0) if cols is None else cols
    if len(v) != r or any(len(row) != c for row in v):
        raise _sem(e.tok, f"{e.key} must be a {r}x{c} matrix")
    return IntMatrix([list(row) for row in v], r, c)


def _group(sec: Section) -> tuple[FiniteGroup, Optional[tuple]]:
    fam, cay = sec.get("family"), sec.get("cayley")
    if (fam is None) == (cay is None):
        raise _sem(sec.tok, "group needs exactly one of 'family' or 'cayley'")
    try:
        if fam is not None:
            if fam.value not in FAMILIES:
                raise _sem(fam.tok, f"unknown group family {fam.value!r}")
            p = sec.get("param")
            param = _int(p, 1) if p is not None else None
            return builtin_group(fam.value, param), (fam.value, param)
        table = _matrix(cay)
        gens = sec.get("generators")
        g = None
        if gens is not None:
            if not isinstance(gens.value, list) or any(not isinstance(x, int) for x in gens.value):
                raise _sem(gens.tok, "generators must be a list of element indices")
            g = gens.value
        return FiniteGroup(table.data, generators=g), None
    except GroupError as exc:
        raise _sem(sec.tok, str(exc)) from None


def _module(sec: Section, group: FiniteGroup) -> GModule:
    rk = sec.get("rank")
    if rk is None:
        raise _sem(sec.tok, f"module {sec.name} needs a rank")
    n = _int(rk, 0)
    rel = sec.get("relations")
    if rel is None or not rel.value:
        R = IntMatrix.zeros(n, 0)
    else:
        cols = _matrix(rel, cols=n)
        R = IntMatrix.from_columns(cols.data, n)
    A = FgAbGroup(n, R)
    gen_action = {}
    for e in sec.entries:
        if e.key != "action":
            continue
        m = re.fullmatch(r"g(\d+)", e.arg or "")
        if m is None or int(m.group(1)) >= group.order:
            raise _sem(e.tok, f"action needs an element g<i> with i < {group.order}")
        gen_action[int(m.group(1))] = _matrix(e, n, n)
    if not gen_action:
        return GModule.trivial(group, A)
    try:
        return GModule.from_generators(group, A, gen_action, name=sec.name)
    except ValueError as exc:
        raise _sem(sec.tok, f"module {sec.name}: {exc}") from None


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    secs = _Parser(text).sections()
    eof = tokenize(text)[-1]
    by_kind: dict = {}
    for s in secs:
        if s.kind != "module":
            if s.kind in by_kind:
                raise _sem(s.tok, f"duplicate section {s.kind!r}")
            by_kind[s.kind] = s
    if "group" not in by_kind:
        raise ParseError(eof.line, eof.col, "missing 'group' section", "")
    G, family = _group(by_kind["group"])

    nsec = by_kind.get("normal")
    els = [G.identity]
    if nsec is not None:
        e = nsec.get("elements")
        if e is None or not isinstance(e.value, list) or \
                any(not isinstance(x, int) or not 0 <= x < G.order for x in e.value):
            raise _sem(nsec.tok, "normal needs 'elements': a list of element indices")
        els = sorted(set(e.value))
        v = closure_violation(G, els)
        if v is not None:
            raise _sem(e.tok, f"normal subset not closed: {v[0]}*{v[1]} = {G.mul(*v)} is missing")
        if G.identity not in els:
            raise _sem(e.tok, "normal subset must contain the identity")
    N = Subgroup(G, tuple(els))
    try:
        qd = quotient_group(G, N)
    except NotNormal as exc:
        raise _sem(nsec.tok, str(exc)) from None
    Q = qd.quotient

    gmods, qmods = {}, {}
    for s in (s for s in secs if s.kind == "module"):
        over = s.get("over")
        if over is not None and over.value not in ("group", "quotient"):
            raise _sem(over.tok, "over must be 'group' or 'quotient'")
        on_q = over is not None and over.value == "quotient"
        table = qmods if on_q else gmods
        if s.name in gmods or s.name in qmods:
            raise _sem(s.tok, f"duplicate module {s.name}")
        table[s.name] = (_module(s, Q if on_q else G), s)
    if len(gmods) != 1:
        where = secs[-1].tok if secs else eof
        raise _sem(where, "exactly one module over the group is required")
    M = next(iter(gmods.values()))[0]

    ssec = by_kind.get("ses")
    explicit = False
    try:
        if ssec is None or ssec.get("cocycle") is not None:
            A, _ = fixed_points(M, qd)
            if ssec is not None and ssec.get("module") is not None:
                ref = ssec.get("module")
                if ref.value not in qmods:
                    raise _sem(ref.tok, f"unknown quotient module {ref.value!r}")
                A = qmods[ref.value][0]
            if ssec is None:
                u = [[0] * A.n for _ in range(Q.order)]
            else:
                u = _matrix(ssec.get("cocycle"), Q.order, A.n).data
            ses = extension_from_cocycle(Q, A, [list(r) for r in u])
        else:
            explicit = True
            mods = []
            for key in "ABC":
                e = ssec.get(key)
                if e is None or e.value not in qmods:
                    raise _sem(ssec.tok, f"ses needs {key}: <module over the quotient>")
                mods.append(qmods[e.value][0])
            A, B, C = mods
            for key in "ij":
                if ssec.get(key) is None:
                    raise _sem(ssec.tok, f"ses needs the matrix {key}")
            i = GModuleMorphism(A, B, _matrix(ssec.get("i"), B.n, A.n))
            j = GModuleMorphism(B, C, _matrix(ssec.get("j"), C.n, B.n))
            ses = ModuleSES(A, B, C, i, j).validate()
    except NotACocycle as exc:
        raise _sem(ssec.get("cocycle").tok, f"not a cocycle: {exc}") from None
    except SemanticError:
        raise
    except ValueError as exc:
        raise _sem(ssec.tok, str(exc)) from None

    d = MIN_DEGREE
    osec = by_kind.get("options")
    if osec is not None:
        for e in osec.entries:
            if e.key != "max_degree":
                raise _sem(e.tok, f"unknown option {e.key!r}")
            d = _int(e, MIN_DEGREE)
    return Scenario(name, G, N, qd, M, ses, d, family, explicit)


# -- serialization ----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _module_text(name: str, M: GModule, over_quotient: bool) -> str:
    lines = [f"module {name} {{"]
    if over_quotient:
        lines.append("  over: quotient;")
    lines.append(f"  rank: {M.n};")
    R = M.underlying.relations
    if R.cols:
        lines.append(f"  relations: {_fmt([R.column(c) for c in range(R.cols)])};")
    if not M.is_trivial_action():
        for g in M.group.generators:
            lines.append(f"  action g{g}: {_fmt([list(r) for r in M.action[g].data])};")
    lines.append("}")
    return "\n".join(lines)


def serialize(sc: Scenario) -> str:
    out = []
    if sc.family is not None:
        fam, param = sc.family
        body = f"family: {fam};" + (f" param: {param};" if param is not None else "")
        out.append(f"group {{ {body} }}")
    else:
        out.append("group {")
        out.append(f"  cayley: {_fmt([list(r) for r in sc.G.table])};")
        out.append(f"  generators: {_fmt(list(sc.G.generators))};")
        out.append("}")
    out.append(f"normal {{ elements: {_fmt(list(sc.N.elements))}; }}")
    out.append(_module_text("M", sc.M, False))
    if sc.explicit_ses:
        for key, mod in zip("ABC", (sc.ses.A, sc.ses.B, sc.ses.C)):
            out.append(_module_text(f"{key}_", mod, True))
        out.append("ses {")
        out.append("  A: A_; B: B_; C: C_;")
        out.append(f"  i: {_fmt([list(r) for r in sc.ses.i.matrix.data])};")
        out.append(f"  j: {_fmt([list(r) for r in sc.ses.j.matrix.data])};")
        out.append("}")
    else:
        A, _ = fixed_points(sc.M, sc.qd)
        if not _same_module(A, sc.ses.A):
            out.append(_module_text("A_", sc.ses.A, True))
            ref = " module: A_;"
        else:
            ref = ""
        out.append(f"ses {{ cocycle: {_fmt([list(v) for v in sc.ses.cocycle])};{ref} }}")
    out.append(f"options {{ max_degree: {sc.d}; }}")
    return "\n".join(out) + "\n"


# -- the built-in library -------------------------------------------------------------

BUILTIN_SOURCES = {
    "LIB-0": """# degenerate: N trivial, nonsplit extension of Z by Z/2 over C2
group { family: cyclic; param: 2; }
normal { elements: [0]; }
module M { rank: 1; relations: [[2]]; }
ses { cocycle: [[0], [1]]; }
""",
    "LIB-1": """# C4 over its subgroup of order 2, trivial Z/2, nonsplit u
group { family: cyclic; param: 4; }
normal { elements: [0, 2]; }
module M { rank: 1; relations: [[2]]; }
ses { cocycle: [[0], [1]]; }
""",
    "LIB-2": """# S3 over A3, trivial Z/3; every such extension of Z by Z/3 splits
group { family: symmetric3; }
normal { elements: [0, 3, 4]; }
module M { rank: 1; relations: [[3]]; }
ses { cocycle: [[0], [0]]; }
""",
    "LIB-3": """# Klein four over <a>, Z with the sign action through the quotient
group { family: klein4; }
normal { elements: [0, 1]; }
module M { rank: 1; action g1: [[1]]; action g2: [[-1]]; }
ses { cocycle: [[0], [1]]; }
""",
}


def builtin_scenarios() -> dict[str, Scenario]:
    return {name: parse_scenario(src, name) for name, src in BUILTIN_SOURCES.items()}


def load_scenario(ref: str) -> Scenario:
    """A builtin name or a path to a scenario file."""
    if ref in BUILTIN_SOURCES:
        return parse_scenario(BUILTIN_SOURCES[ref], ref)
    with open(ref, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), ref)
