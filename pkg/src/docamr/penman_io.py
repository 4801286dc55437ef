"""Reading and writing AMR graphs in PENMAN notation.

Graphs are stored in normalized form: inverse roles such as ``:ARG0-of`` are
turned into forward relations with swapped endpoints, and the index of every
relation that was written inverted is remembered so printing can restore the
original shape.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

__all__ = [
    "AmrGraph",
    "PenmanError",
    "parse_penman",
    "print_penman",
    "read_penman",
    "write_penman",
    "normalize_role",
    "triple_set",
]

# roles ending in -of that are not inverses
NON_INVERTIBLE = frozenset({":consist-of", ":prep-out-of", ":prep-on-behalf-of"})

_ALIGN_RE = re.compile(r"~(?:[A-Za-z]\.)?(\d+(?:,\d+)*)")
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<slash>/)
  | (?P<string>"(?:[^"\\]|\\.)*")(?P<salign>~(?:[A-Za-z]\.)?\d+(?:,\d+)*)?
  | (?P<role>:[^\s()"~]*)(?:~(?:[A-Za-z]\.)?\d+(?:,\d+)*)?
  | (?P<symbol>[^\s()"~/]+)(?P<align>~(?:[A-Za-z]\.)?\d+(?:,\d+)*)?
    """,
    re.VERBOSE,
)
# bare symbols that look like variables must resolve to a declared node
_VARLIKE_RE = re.compile(r"^(?:[a-z]\d*|s\d+\.\S+|(?:ce|ie|at)\d+|doc)$")
_METADATA_RE = re.compile(r"^#\s*::(\S+)\s?(.*)$")


class PenmanError(ValueError):
    """Malformed PENMAN input or a graph that cannot be serialized."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, column {col}: {message}"
        super().__init__(message)


@dataclass
class AmrGraph:
    """A sentence-level AMR.

    ``attributes`` values are kept verbatim (quotes included) so the graph
    prints back the way it was read; comparison code strips the quotes.
    """

    id: str
    root: str
    instances: dict[str, str]
    attributes: list[tuple[str, str, str]] = field(default_factory=list)
    relations: list[tuple[str, str, str]] = field(default_factory=list)
    alignments: dict[str, set[int]] = field(default_factory=dict)
    tokens: Optional[list[str]] = None
    metadata: list[str] = field(default_factory=list)
    # indices into ``relations`` that were written as ``:R-of``
    inverted: set[int] = field(default_factory=set)
    # indices into ``attributes`` -> aligned token indices of the constant
    attribute_alignments: dict[int, set[int]] = field(default_factory=dict)

    def variables(self) -> list[str]:
        return list(self.instances)

    def check(self) -> None:
        """Raise :class:`PenmanError` if an AmrGraph invariant is violated."""
        if self.root not in self.instances:
            raise PenmanError(f"root {self.root!r} has no instance")
        for src, role, tgt in self.relations:
            for v in (src, tgt):
                if v not in self.instances:
                    raise PenmanError(f"relation {src} {role} {tgt} uses undeclared variable {v!r}")
        for var, role, _ in self.attributes:
            if var not in self.instances:
                raise PenmanError(f"attribute {role} on undeclared variable {var!r}")
        unreachable = _unreachable(self.root, self.instances, self.relations)
        if unreachable:
            raise PenmanError("disconnected graph, unreachable: " + ", ".join(sorted(unreachable)))


def normalize_role(role: str) -> tuple[str, bool]:
    """Return ``(forward_role, was_inverted)`` for a role label."""
    if role.endswith("-of") and role not in NON_INVERTIBLE and len(role) > 4:
        return role[:-3], True
    return role, False


def triple_set(graph) -> set[tuple[str, str, str]]:
    """All instance, attribute and relation triples of a graph as one set."""
    out = {(v, ":instance", c) for v, c in graph.instances.items()}
    out.update((v, r, _unquote(c)) for v, r, c in graph.attributes)
    out.update(graph.relations)
    return out


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
        return value[1:-1]
    return value


def _unreachable(root, instances, relations) -> set[str]:
    adj: dict[str, set[str]] = {v: set() for v in instances}
    for s, _, t in relations:
        adj.setdefault(s, set()).add(t)
        adj.setdefault(t, set()).add(s)
    seen = {root}
    stack = [root]
    while stack:
        for n in adj.get(stack.pop(), ()):
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return set(instances) - seen


def _parse_alignment(text: Optional[str]) -> set[int]:
    if not text:
        return set()
    m = _ALIGN_RE.fullmatch(text)
    return {int(x) for x in m.group(1).split(",")}


# ---------------------------------------------------------------------------
# parsing


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    align: Optional[str] = None


def _tokenize(text: str, line0: int) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = line0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise PenmanError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind in ("salign", "align"):
            kind = "string" if m.group("string") else "symbol"
        if kind == "ws":
            chunk = m.group()
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = m.start() + chunk.rfind("\n") + 1
        else:
            align = m.group("salign") if kind == "string" else m.group("align") if kind == "symbol" else None
            toks.append(_Tok(kind, m.group(kind), line, col, align))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], end_line: int):
        self.toks = toks
        self.i = 0
        self.end_line = end_line
        self.instances: dict[str, str] = {}
        self.decl_pos: dict[str, _Tok] = {}
        self.alignments: dict[str, set[int]] = {}
        self.attributes: list[tuple[str, str, str]] = []
        self.attr_align: dict[int, set[int]] = {}
        self.relations: list[tuple[str, str, str]] = []
        self.inverted: set[int] = set()
        # (parent, role, symbol, inverted, token) resolved after the whole tree is read
        self.pending: list[tuple[str, str, str, bool, _Tok, Optional[str]]] = []

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise PenmanError(f"unexpected end of graph, expected {kind}", self.end_line, 1)
        if tok.kind != kind:
            raise PenmanError(f"expected {kind}, found {tok.text!r}", tok.line, tok.col)
        self.i += 1
        return tok

    def node(self) -> str:
        open_tok = self.take("lparen")
        var_tok = self.take("symbol")
        var = var_tok.text
        self.take("slash")
        tok = self.peek()
        if tok is None or tok.kind not in ("symbol", "string"):
            where = tok or open_tok
            raise PenmanError(f"missing concept for variable {var!r}", where.line, where.col)
        self.i += 1
        concept = tok.text
        if var in self.instances and self.instances[var] != concept:
            raise PenmanError(
                f"variable {var!r} declared with conflicting concepts "
                f"{self.instances[var]!r} and {concept!r}",
                var_tok.line,
                var_tok.col,
            )
        self.instances[var] = concept
        self.decl_pos.setdefault(var, var_tok)
        if tok.align:
            self.alignments.setdefault(var, set()).update(_parse_alignment(tok.align))
        while True:
            tok = self.peek()
            if tok is None:
                raise PenmanError(
                    f"unbalanced parentheses: node opened here is never closed",
                    open_tok.line,
                    open_tok.col,
                )
            if tok.kind == "rparen":
                self.i += 1
                return var
            if tok.kind != "role":
                raise PenmanError(f"expected role or ')', found {tok.text!r}", tok.line, tok.col)
            self.i += 1
            self.edge(var, tok)

    def edge(self, var: str, role_tok: _Tok) -> None:
        role, inv = normalize_role(role_tok.text)
        tok = self.peek()
        if tok is None:
            raise PenmanError(f"role {role_tok.text} has no value", role_tok.line, role_tok.col)
        if tok.kind == "lparen":
            child = self.node()
            self._add_relation(var, role, child, inv)
        elif tok.kind == "string":
            self.i += 1
            self._add_attribute(var, role_tok.text, tok.text, tok.align)
        elif tok.kind == "symbol":
            self.i += 1
            self.pending.append((var, role, tok.text, inv, tok, role_tok.text))
        else:
            raise PenmanError(f"role {role_tok.text} has no value", tok.line, tok.col)

    def _add_relation(self, parent: str, role: str, child: str, inv: bool) -> None:
        if inv:
            self.inverted.add(len(self.relations))
            self.relations.append((child, role, parent))
        else:
            self.relations.append((parent, role, child))

    def _add_attribute(self, var: str, role: str, value: str, align: Optional[str]) -> None:
        if align:
            self.attr_align[len(self.attributes)] = _parse_alignment(align)
        self.attributes.append((var, role, value))

    def resolve(self) -> None:
        # keep file order among relations: rebuild with pending re-entrancies in place
        for var, role, sym, inv, tok, raw_role in self.pending:
            if sym in self.instances:
                self._add_relation(var, role, sym, inv)
            elif _VARLIKE_RE.match(sym):
                raise PenmanError(f"reference to undeclared variable {sym!r}", tok.line, tok.col)
            else:
                self._add_attribute(var, raw_role, sym, tok.align)


def _split_blocks(text: str) -> Iterator[tuple[int, list[str]]]:
    """Yield (first line number, lines) for each blank-line separated block."""
    block: list[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip():
            if not block:
                start = lineno
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def _parse_block(start: int, lines: list[str], index: int) -> Optional[AmrGraph]:
    meta: list[str] = []
    graph_id = None
    tokens = None
    body_start = None
    for off, line in enumerate(lines):
        stripped = line.strip()
        if stripped.startswith("#"):
            if body_start is not None:
                raise PenmanError("comment line inside graph body", start + off, 1)
            m = _METADATA_RE.match(stripped)
            if m:
                key, value = m.group(1), m.group(2).strip()
                if key == "id":
                    graph_id = value.split()[0] if value else None
                    continue
                if key == "tok":
                    tokens = value.split()
                    continue
            meta.append(stripped)
        elif body_start is None:
            body_start = off
    if body_start is None:
        return None
    body = "\n".join(lines[body_start:])
    toks = _tokenize(body, start + body_start)
    end_line = start + len(lines) - 1
    if not toks:
        return None
    depth = 0
    for tok in toks:
        if tok.kind == "lparen":
            depth += 1
        elif tok.kind == "rparen":
            depth -= 1
            if depth < 0:
                raise PenmanError("unbalanced parentheses: unexpected ')'", tok.line, tok.col)
    parser = _Parser(toks, end_line)
    root = parser.node()
    if parser.peek() is not None:
        tok = parser.peek()
        raise PenmanError(f"trailing content after graph: {tok.text!r}", tok.line, tok.col)
    parser.resolve()
    alignments = dict(parser.alignments)
    for line in meta:
        m = _METADATA_RE.match(line)
        if m and m.group(1) == "alignments":
            _merge_alignment_line(m.group(2), parser.instances, alignments)
    return AmrGraph(
        id=graph_id or f"s{index}",
        root=root,
        instances=parser.instances,
        attributes=parser.attributes,
        relations=parser.relations,
        alignments=alignments,
        tokens=tokens,
        metadata=meta,
        inverted=parser.inverted,
        attribute_alignments=parser.attr_align,
    )


def _merge_alignment_line(value: str, instances, alignments) -> None:
    # accepted form: "var:3,4 var2:7"; anything else stays opaque metadata
    for item in value.split():
        var, sep, idx = item.rpartition(":")
        if not sep or var not in instances:
            continue
        try:
            alignments.setdefault(var, set()).update(int(x) for x in idx.split(","))
        except ValueError:
            continue


def parse_penman(text: str) -> list[AmrGraph]:
    """Parse every graph in ``text``, in file order."""
    graphs = []
    seen: dict[str, int] = {}
    for start, lines in _split_blocks(text):
        g = _parse_block(start, lines, len(graphs) + 1)
        if g is None:
            continue
        if g.id in seen:
            raise PenmanError(f"duplicate graph id {g.id!r}", start, 1)
        seen[g.id] = start
        graphs.append(g)
    return graphs


def read_penman(path: Union[str, Path]) -> list[AmrGraph]:
    return parse_penman(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# printing


def _format_alignment(tokens: Iterable[int]) -> str:
    return "~e." + ",".join(str(t) for t in sorted(tokens))


def _print_tree(graph, with_alignments: bool) -> str:
    instances = graph.instances
    relations = graph.relations
    inverted = set(getattr(graph, "inverted", ()))
    unreachable = _unreachable(graph.root, instances, relations)
    if unreachable:
        raise PenmanError("cannot serialize disconnected graph, unreachable: " + ", ".join(sorted(unreachable)))

    # choose a printing orientation for each relation so every node hangs off the root
    while True:
        parent_of = [t if i in inverted else s for i, (s, _, t) in enumerate(relations)]
        children: dict[str, list[int]] = {v: [] for v in instances}
        for i, p in enumerate(parent_of):
            children[p].append(i)
        seen = {graph.root}
        stack = [graph.root]
        while stack:
            v = stack.pop()
            for i in children[v]:
                s, _, t = relations[i]
                child = s if i in inverted else t
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        if len(seen) == len(instances):
            break
        for i, (s, _, t) in enumerate(relations):
            child = s if i in inverted else t
            parent = parent_of[i]
            if parent not in seen and child in seen:
                inverted ^= {i}
                break

    attrs_of: dict[str, list[int]] = {v: [] for v in instances}
    for i, (v, _, _) in enumerate(graph.attributes):
        attrs_of[v].append(i)
    aligns = graph.alignments if with_alignments else {}
    attr_aligns = getattr(graph, "attribute_alignments", {}) if with_alignments else {}

    printed: set[str] = set()
    out: list[str] = []

    def concept_text(v: str) -> str:
        c = instances[v]
        if v in aligns and aligns[v]:
            c += _format_alignment(aligns[v])
        return c

    def emit(v: str, depth: int) -> None:
        printed.add(v)
        out.append(f"({v} / {concept_text(v)}")
        items = []
        for i in attrs_of[v]:
            _, role, value = graph.attributes[i]
            if value in instances or _VARLIKE_RE.match(value):
                # a bare constant here would read back as a variable
                value = '"' + value + '"'
            if i in attr_aligns and attr_aligns[i]:
                value += _format_alignment(attr_aligns[i])
            items.append((role, 0, i, None, value))
        for i in children[v]:
            s, role, t = relations[i]
            if i in inverted:
                items.append((role + "-of", 1, i, s, None))
            else:
                items.append((role, 1, i, t, None))
        items.sort(key=lambda x: (x[0], x[1], x[2]))
        for role, _, _, child, value in items:
            out.append("\n" + "    " * (depth + 1) + role + " ")
            if child is None:
                out.append(value)
            elif child in printed:
                out.append(child)
            else:
                emit(child, depth + 1)
        out.append(")")

    # a node reached as a re-entrancy before its defining edge is printed must
    # still be declared where the tree first reaches it; the orientation pass
    # above guarantees every node has a parent edge, and emit() declares on
    # first visit in print order
    emit(graph.root, 0)
    return "".join(out)


def print_penman(graph, with_alignments: bool = True) -> str:
    """Serialize one graph (sentence AmrGraph or DocGraph) with its metadata."""
    lines = []
    gid = getattr(graph, "doc_id", None) or getattr(graph, "id", None)
    if gid:
        lines.append(f"# ::id {gid}")
    tokens = getattr(graph, "tokens", None)
    if tokens:
        lines.append("# ::tok " + " ".join(tokens))
    lines.extend(getattr(graph, "metadata", ()) or ())
    origins = getattr(graph, "origins", None)
    if origins:
        merged = [f"{v}:{','.join(str(i) for i in sorted(idx))}" for v, idx in sorted(origins.items())]
        if merged:
            lines.append("# ::merged " + " ".join(merged))
    lines.append(_print_tree(graph, with_alignments))
    return "\n".join(lines) + "\n"


def write_penman(path: Union[str, Path], graphs: Iterable) -> None:
    Path(path).write_text("\n".join(print_penman(g) for g in graphs), encoding="utf-8")
