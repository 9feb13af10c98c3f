"""Line-oriented text formats for netlists, matrices and register states.

Netlist grammar (one statement per line, ``#`` starts a comment)::

    QCPU k=<k>
    ROT <m> <re> <im>
    TRA <m> <n> <re> <im>
    GRP <re> <im> <m:n> ... [FIX <m:n> ...]
    CON | COD | DRW <0|1>
    WRAP_BEGIN ... WRAP_END

``WRAP_BEGIN``/``WRAP_END`` enclose the body of an identity-plus-wrap node.
``FIX`` introduces the unit-coefficient branches of a group.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import (
    Element,
    GroupedElement,
    IdentityPlusWrap,
    Kind,
    Network,
    Node,
    Primitive,
    Product,
    TwoRegister,
)
from .operators import DimensionError, RegisterSpec, as_matrix


class FormatError(ValueError):
    """Malformed text input; ``line``/``column`` are 1-based."""

    def __init__(self, reason: str, line: int = 0, column: int = 0):
        self.reason = reason
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + reason)


def fmt_float(x: float) -> str:
    return f"{x:.17g}"


def fmt_complex_pair(z: complex) -> tuple[str, str]:
    return fmt_float(z.real), fmt_float(z.imag)


# -- netlist --------------------------------------------------------------------


def _emit_node(node: Node, out: list[str]) -> None:
    if isinstance(node, Product):
        for child in node.children:
            _emit_node(child, out)
    elif isinstance(node, IdentityPlusWrap):
        out.append("WRAP_BEGIN")
        _emit_node(node.inner, out)
        out.append("WRAP_END")
    elif isinstance(node, Primitive):
        out.append(_emit_element(node.element))
    elif isinstance(node, TwoRegister):
        raise ValueError("two-register networks have no netlist form")
    else:
        raise TypeError(f"unknown node {node!r}")


def _emit_element(e) -> str:
    if isinstance(e, GroupedElement):
        parts = ["GRP", *fmt_complex_pair(e.coeff)]
        parts += [f"{m}:{n}" for m, n in e.branches_]
        if e.fixed:
            parts.append("FIX")
            parts += [f"{m}:{n}" for m, n in e.fixed]
        return " ".join(parts)
    if e.kind is Kind.ROTATOR:
        return " ".join(["ROT", str(e.m), *fmt_complex_pair(e.coeff)])
    if e.kind is Kind.TRANSITOR:
        return " ".join(["TRA", str(e.m), str(e.n), *fmt_complex_pair(e.coeff)])
    if e.kind is Kind.CONNECTOR:
        return "CON"
    if e.kind is Kind.CO_CONNECTOR:
        return "COD"
    return f"DRW {e.outcome}"


def emit_netlist(net: Network) -> str:
    lines = [f"QCPU k={net.spec.k}"]
    _emit_node(net.expr, lines)
    return "\n".join(lines) + "\n"


@dataclass
class _Token:
    text: str
    column: int


def _tokenize(line: str) -> list[_Token]:
    line = line.split("#", 1)[0]
    tokens = []
    col = 0
    for part in line.split():
        col = line.index(part, col)
        tokens.append(_Token(part, col + 1))
        col += len(part)
    return tokens


class _Parser:
    def __init__(self, spec: RegisterSpec):
        self.spec = spec
        self.lineno = 0

    def fail(self, reason: str, tok: _Token | None = None):
        raise FormatError(reason, self.lineno, tok.column if tok else 1)

    def index(self, tok: _Token) -> int:
        try:
            value = int(tok.text)
        except ValueError:
            self.fail(f"malformed index {tok.text!r}", tok)
        if not 0 <= value < self.spec.N:
            self.fail(f"index {value} out of range for k={self.spec.k}", tok)
        return value

    def number(self, tok: _Token) -> float:
        try:
            return float(tok.text)
        except ValueError:
            self.fail(f"malformed number {tok.text!r}", tok)

    def pair(self, tok: _Token) -> tuple[int, int]:
        m, sep, n = tok.text.partition(":")
        if not sep:
            self.fail(f"expected a branch m:n, got {tok.text!r}", tok)
        return self.index(_Token(m, tok.column)), self.index(_Token(n, tok.column + len(m) + 1))

    def arity(self, toks: list[_Token], n: int):
        if len(toks) != n + 1:
            self.fail(f"{toks[0].text} takes {n} argument(s), got {len(toks) - 1}", toks[0])

    def element(self, toks: list[_Token]):
        head = toks[0]
        kw = head.text
        if kw == "ROT":
            self.arity(toks, 3)
            m = self.index(toks[1])
            return Element.rotator(m, complex(self.number(toks[2]), self.number(toks[3])))
        if kw == "TRA":
            self.arity(toks, 4)
            m, n = self.index(toks[1]), self.index(toks[2])
            if m == n:
                self.fail("Transitor requires m ≠ n", toks[2])
            return Element.transitor(m, n, complex(self.number(toks[3]), self.number(toks[4])))
        if kw == "GRP":
            if len(toks) < 4:
                self.fail("GRP needs a coefficient and at least one branch", head)
            coeff = complex(self.number(toks[1]), self.number(toks[2]))
            shared, fixed, target = [], [], None
            target = shared
            for tok in toks[3:]:
                if tok.text == "FIX":
                    if target is fixed:
                        self.fail("repeated FIX", tok)
                    target = fixed
                    continue
                target.append(self.pair(tok))
            if not shared:
                self.fail("GRP needs at least one shared branch", head)
            try:
                return GroupedElement(tuple(shared), coeff, tuple(fixed))
            except ValueError as exc:
                self.fail(str(exc), head)
        if kw in ("CON", "COD"):
            self.arity(toks, 0)
            return Element.connector() if kw == "CON" else Element.co_connector()
        if kw == "DRW":
            self.arity(toks, 1)
            if toks[1].text not in ("0", "1"):
                self.fail(f"Drawer outcome must be 0 or 1, got {toks[1].text!r}", toks[1])
            return Element.drawer(int(toks[1].text))
        self.fail(f"unknown keyword {kw!r}", head)


def _parse_header(lines: list[str]) -> tuple[int, str]:
    for i, raw in enumerate(lines):
        toks = _tokenize(raw)
        if toks:
            return i, " ".join(t.text for t in toks)
    raise FormatError("empty input: missing header", 1, 1)


def parse_netlist(text: str) -> Network:
    lines = text.splitlines()
    start, header = _parse_header(lines)
    parts = header.split()
    if len(parts) != 2 or parts[0] != "QCPU" or not parts[1].startswith("k="):
        raise FormatError(f"expected header 'QCPU k=<k>', got {header!r}", start + 1, 1)
    try:
        spec = RegisterSpec(int(parts[1][2:]))
    except ValueError as exc:
        raise FormatError(f"bad qubit count: {exc}", start + 1, 6) from None
    p = _Parser(spec)
    stack: list[list[Node]] = [[]]
    opened: list[int] = []
    for i in range(start + 1, len(lines)):
        p.lineno = i + 1
        toks = _tokenize(lines[i])
        if not toks:
            continue
        kw = toks[0].text
        if kw == "WRAP_BEGIN":
            p.arity(toks, 0)
            stack.append([])
            opened.append(i + 1)
        elif kw == "WRAP_END":
            p.arity(toks, 0)
            if len(stack) == 1:
                p.fail("WRAP_END without WRAP_BEGIN", toks[0])
            body = stack.pop()
            opened.pop()
            stack[-1].append(IdentityPlusWrap(Product(tuple(body))))
        else:
            stack[-1].append(Primitive(p.element(toks)))
    if len(stack) != 1:
        raise FormatError("unbalanced WRAP_BEGIN (missing WRAP_END)", opened[-1], 1)
    return Network(spec, Product(tuple(stack[0])))


# -- matrices and states ----------------------------------------------------------


def emit_matrix(u) -> str:
    u = as_matrix(u, square=True)
    lines = [f"MATRIX dim={u.shape[0]}"]
    for row in u:
        lines.append(" ".join(",".join(fmt_complex_pair(z)) for z in row))
    return "\n".join(lines) + "\n"


def _parse_entry(tok: _Token, lineno: int) -> complex:
    re_s, sep, im_s = tok.text.partition(",")
    try:
        return complex(float(re_s), float(im_s) if sep else 0.0)
    except ValueError:
        raise FormatError(f"malformed complex entry {tok.text!r}", lineno, tok.column) from None


def _content_lines(text: str) -> list[tuple[int, list[_Token]]]:
    return [(i + 1, toks) for i, raw in enumerate(text.splitlines()) if (toks := _tokenize(raw))]


def _dim_header(rows, keyword: str) -> int:
    if not rows:
        raise FormatError(f"empty input: missing '{keyword} dim=<N>' header", 1, 1)
    lineno, toks = rows[0]
    words = [t.text for t in toks]
    if len(words) != 2 or words[0] != keyword or not words[1].startswith("dim="):
        raise FormatError(f"expected header '{keyword} dim=<N>'", lineno, 1)
    try:
        dim = int(words[1][4:])
    except ValueError:
        raise FormatError(f"bad dimension {words[1]!r}", lineno, toks[1].column) from None
    if dim < 1:
        raise FormatError(f"bad dimension {dim}", lineno, toks[1].column)
    return dim


def parse_matrix(text: str) -> np.ndarray:
    rows = _content_lines(text)
    dim = _dim_header(rows, "MATRIX")
    body = rows[1:]
    if len(body) != dim:
        line = body[-1][0] + 1 if body else rows[0][0] + 1
        raise FormatError(f"expected {dim} matrix rows, got {len(body)}", line, 1)
    out = np.zeros((dim, dim), dtype=complex)
    for r, (lineno, toks) in enumerate(body):
        if len(toks) != dim:
            raise FormatError(f"expected {dim} entries, got {len(toks)}", lineno, 1)
        out[r] = [_parse_entry(t, lineno) for t in toks]
    return out


def emit_state(v) -> str:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return f"STATE dim={v.shape[0]}\n" + "".join(",".join(fmt_complex_pair(z)) + "\n" for z in v)


def parse_state(text: str) -> np.ndarray:
    """``STATE dim=<N>`` followed by ``N`` entries ``re,im`` (any line layout)."""
    rows = _content_lines(text)
    dim = _dim_header(rows, "STATE")
    entries = [_parse_entry(t, lineno) for lineno, toks in rows[1:] for t in toks]
    if len(entries) != dim:
        raise FormatError(f"expected {dim} state entries, got {len(entries)}", rows[-1][0], 1)
    return np.array(entries, dtype=complex)


def check_register_dim(dim: int) -> RegisterSpec:
    try:
        return RegisterSpec.from_dim(dim)
    except DimensionError as exc:
        raise FormatError(str(exc)) from None
