"""CPLEX-LP and MPS writers, plus readers for round-tripping.

The LP writer lists every variable in the objective (zero coefficients
included) so a reader that orders columns by first appearance recovers
the original column order.  MPS output uses the classic fixed-column
layout; names longer than eight characters widen their field, so readers
must split on whitespace (free MPS), which the reader here does.
"""

from __future__ import annotations

import io
import math
import re

import numpy as np
import scipy.sparse as sp

from .model import IpModel

TERMS_PER_LINE = 6


def _num(v: float) -> str:
    v = float(v)
    if v == 0:
        return "0"
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _expr(pairs) -> list[str]:
    """Render ``(coef, name)`` pairs as LP expression chunks, a few terms per line."""
    parts = []
    for idx, (c, name) in enumerate(pairs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else _num(mag) + " "
        if idx == 0 and sign == "+":
            parts.append(f"{coef}{name}")
        else:
            parts.append(f"{sign} {coef}{name}")
    return [" ".join(parts[i:i + TERMS_PER_LINE]) for i in range(0, len(parts), TERMS_PER_LINE)]


def write_lp(model: IpModel, out) -> None:
    w = out.write
    w(f"\\ Problem name: {model.name}\n")
    w("Minimize\n" if model.sense == "min" else "Maximize\n")
    chunks = _expr(list(zip(model.obj.tolist(), model.var_names)))
    w(" obj: " + ("\n      ".join(chunks) if chunks else "0") + "\n")
    w("Subject To\n")
    A = model.A
    for r, rname in enumerate(model.row_names):
        lo, hi = A.indptr[r], A.indptr[r + 1]
        pairs = [(A.data[p], model.var_names[A.indices[p]]) for p in range(lo, hi)]
        chunks = _expr(pairs) or ["0 " + model.var_names[0]]
        w(f" {rname}: " + "\n   ".join(chunks) + f" = {_num(model.rhs[r])}\n")
    binaries = [j for j in range(model.num_vars)
                if model.is_integer[j] and model.lower[j] == 0 and model.upper[j] == 1]
    binset = set(binaries)
    bounds = [j for j in range(model.num_vars) if j not in binset]
    if bounds:
        w("Bounds\n")
        for j in bounds:
            lo, hi = model.lower[j], model.upper[j]
            name = model.var_names[j]
            if lo == -math.inf and hi == math.inf:
                w(f" {name} free\n")
            elif lo == hi:
                w(f" {name} = {_num(lo)}\n")
            else:
                lo_s = "-inf" if lo == -math.inf else _num(lo)
                hi_s = "+inf" if hi == math.inf else _num(hi)
                w(f" {lo_s} <= {name} <= {hi_s}\n")
    if binaries:
        w("Binaries\n")
        names = [model.var_names[j] for j in binaries]
        for i in range(0, len(names), 8):
            w(" " + " ".join(names[i:i + 8]) + "\n")
    generals = [j for j in bounds if model.is_integer[j]]
    if generals:
        w("Generals\n")
        for j in generals:
            w(f" {model.var_names[j]}\n")
    w("End\n")


def _mps_line(f1="", f2="", f3="", f4="", f5="", f6=""):
    line = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}"
    if f5:
        line += f"   {f5:<8}  {f6:>12}"
    return line.rstrip() + "\n"


def write_mps(model: IpModel, out) -> None:
    w = out.write
    w(f"NAME          {model.name}\n")
    w("ROWS\n")
    w(_mps_line("N", "obj"))
    for rname in model.row_names:
        w(_mps_line("E", rname))
    w("COLUMNS\n")
    A = model.A.tocsc()
    in_int = False
    marker = 0
    for j, name in enumerate(model.var_names):
        if bool(model.is_integer[j]) != in_int:
            tag = "'INTORG'" if not in_int else "'INTEND'"
            w(f"    MARKER{marker:<4}  'MARKER'                 {tag}\n")
            marker += 1
            in_int = not in_int
        entries = []
        if model.obj[j] != 0:
            entries.append(("obj", model.obj[j]))
        for p in range(A.indptr[j], A.indptr[j + 1]):
            entries.append((model.row_names[A.indices[p]], A.data[p]))
        for i in range(0, len(entries), 2):
            pair = entries[i:i + 2]
            if len(pair) == 2:
                w(_mps_line("", name, pair[0][0], _num(pair[0][1]), pair[1][0], _num(pair[1][1])))
            else:
                w(_mps_line("", name, pair[0][0], _num(pair[0][1])))
    if in_int:
        w(f"    MARKER{marker:<4}  'MARKER'                 'INTEND'\n")
    w("RHS\n")
    nz = [(r, v) for r, v in zip(model.row_names, model.rhs) if v != 0]
    for i in range(0, len(nz), 2):
        pair = nz[i:i + 2]
        if len(pair) == 2:
            w(_mps_line("", "RHS", pair[0][0], _num(pair[0][1]), pair[1][0], _num(pair[1][1])))
        else:
            w(_mps_line("", "RHS", pair[0][0], _num(pair[0][1])))
    w("BOUNDS\n")
    for j, name in enumerate(model.var_names):
        lo, hi = model.lower[j], model.upper[j]
        if model.is_integer[j] and lo == 0 and hi == 1:
            w(_mps_line("BV", "BND", name))
            continue
        if lo == hi:
            w(_mps_line("FX", "BND", name, _num(lo)))
            continue
        if lo == -math.inf and hi == math.inf:
            w(_mps_line("FR", "BND", name))
            continue
        if lo == -math.inf:
            w(_mps_line("MI", "BND", name))
        elif lo != 0:
            w(_mps_line("LO", "BND", name, _num(lo)))
        if hi != math.inf:
            w(_mps_line("UP", "BND", name, _num(hi)))
    w("ENDATA\n")


def export(model: IpModel, fmt: str, sink) -> None:
    """Write ``model`` as LP or MPS text to a binary (or text) stream."""
    buf = io.StringIO()
    fmt = fmt.lower()
    if fmt == "lp":
        write_lp(model, buf)
    elif fmt == "mps":
        write_mps(model, buf)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    text = buf.getvalue()
    if isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("ascii"))


class _Builder:
    """Accumulates columns by first appearance and rows as sparse triples."""

    def __init__(self):
        self.col = {}
        self.names = []
        self.obj = {}
        self.rows, self.cols, self.vals = [], [], []
        self.row_names, self.rhs = [], []
        self.lower, self.upper, self.integer = {}, {}, set()

    def var(self, name):
        j = self.col.get(name)
        if j is None:
            j = self.col[name] = len(self.names)
            self.names.append(name)
        return j

    def finish(self, name, sense) -> IpModel:
        nv = len(self.names)
        lower = np.array([self.lower.get(j, 0.0) for j in range(nv)])
        upper = np.array([self.upper.get(j, math.inf) for j in range(nv)])
        obj = np.zeros(nv)
        for j, c in self.obj.items():
            obj[j] = c
        A = sp.csr_matrix((np.array(self.vals, dtype=float), (self.rows, self.cols)),
                          shape=(len(self.row_names), nv))
        A.sum_duplicates()
        A.sort_indices()
        is_int = np.zeros(nv, dtype=bool)
        is_int[list(self.integer)] = True
        return IpModel(var_names=self.names, obj=obj, lower=lower, upper=upper,
                       is_integer=is_int, row_names=self.row_names, A=A,
                       rhs=np.array(self.rhs, dtype=float), sense=sense, name=name)


class LpParseError(ValueError):
    pass


_SECTION = re.compile(
    r"^\s*(minimi[sz]e|maximi[sz]e|min|max|subject\s+to|such\s+that|s\.t\.|st|bounds?"
    r"|binar(?:y|ies)|bin|generals?|gen|end)\s*$", re.IGNORECASE)
_TOKEN = re.compile(
    r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf(?:inity)?\b)"
    r"|(?P<op><=|>=|=<|=>|<|>|=)|(?P<sign>[+-])|(?P<colon>:)"
    r"|(?P<name>[A-Za-z_!\"#$%&()/,.;?@`'{}|~][A-Za-z0-9_!\"#$%&()/,.;?@`'{}|~\[\]^]*))",
    re.IGNORECASE)


def _tokens(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LpParseError(f"cannot tokenize near {text[pos:pos + 20]!r}")
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


def _parse_number(tok: str) -> float:
    low = tok.lower().lstrip("+")
    if low in ("inf", "infinity"):
        return math.inf
    if low in ("-inf", "-infinity"):
        return -math.inf
    return float(tok)


def _linear(tokens, i, b: _Builder):
    """Parse ``[+-] [coef] name ...`` starting at ``i``; stop at an operator or label."""
    terms = []
    while i < len(tokens):
        kind, val = tokens[i]
        if kind in ("op",):
            break
        if kind == "name" and i + 1 < len(tokens) and tokens[i + 1][0] == "colon":
            break
        sign = 1.0
        if kind == "sign":
            sign = -1.0 if val == "-" else 1.0
            i += 1
            kind, val = tokens[i]
        coef = 1.0
        if kind == "num":
            coef = _parse_number(val)
            i += 1
            if i >= len(tokens) or tokens[i][0] != "name":
                # bare constant: only meaningful as an objective offset, ignored
                continue
            kind, val = tokens[i]
        if kind != "name":
            raise LpParseError(f"expected variable name, got {val!r}")
        terms.append((b.var(val), sign * coef))
        i += 1
    return terms, i


def read_lp(text: str) -> IpModel:
    lines = [ln.split("\\", 1)[0] for ln in text.splitlines()]
    sections, current = {}, None
    order = []
    for ln in lines:
        m = _SECTION.match(ln)
        if m:
            word = m.group(1).lower()
            if word.startswith(("min", "max")):
                current = "min" if word.startswith("min") else "max"
                order.append(current)
                key = "objective"
            elif word in ("subject to", "such that", "s.t.", "st") or word.startswith(("subject", "such")):
                key = "constraints"
            elif word.startswith("bound"):
                key = "bounds"
            elif word.startswith("bin"):
                key = "binaries"
            elif word.startswith("gen"):
                key = "generals"
            else:
                key = "end"
            current = key
            sections.setdefault(key, [])
            continue
        if current is None:
            if ln.strip():
                raise LpParseError(f"content before objective section: {ln!r}")
            continue
        sections[current].append(ln)
    if not order:
        raise LpParseError("missing Minimize/Maximize section")

    b = _Builder()
    toks = _tokens(" ".join(sections.get("objective", [])))
    i = 0
    if len(toks) >= 2 and toks[0][0] == "name" and toks[1][0] == "colon":
        i = 2
    terms, i = _linear(toks, i, b)
    for j, c in terms:
        b.obj[j] = b.obj.get(j, 0.0) + c

    toks = _tokens(" ".join(sections.get("constraints", [])))
    i = 0
    while i < len(toks):
        rname = f"R{len(b.row_names) + 1}"
        if toks[i][0] == "name" and i + 1 < len(toks) and toks[i + 1][0] == "colon":
            rname = toks[i][1]
            i += 2
        terms, i = _linear(toks, i, b)
        if i >= len(toks) or toks[i][0] != "op":
            raise LpParseError(f"row {rname}: missing relational operator")
        op = toks[i][1]
        if op not in ("=",):
            raise LpParseError(f"row {rname}: only equality rows are supported, got {op!r}")
        i += 1
        sign = 1.0
        if toks[i][0] == "sign":
            sign = -1.0 if toks[i][1] == "-" else 1.0
            i += 1
        if toks[i][0] != "num":
            raise LpParseError(f"row {rname}: expected numeric right-hand side")
        rhs = sign * _parse_number(toks[i][1])
        i += 1
        r = len(b.row_names)
        b.row_names.append(rname)
        b.rhs.append(rhs)
        for j, c in terms:
            b.rows.append(r)
            b.cols.append(j)
            b.vals.append(c)

    for ln in sections.get("bounds", []):
        toks = _tokens(ln)
        if not toks:
            continue
        vals = [t[1] for t in toks]
        if len(toks) == 2 and toks[1][1].lower() == "free":
            j = b.var(vals[0])
            b.lower[j], b.upper[j] = -math.inf, math.inf
        elif len(toks) == 5 and toks[2][0] == "name":
            j = b.var(vals[2])
            b.lower[j], b.upper[j] = _parse_number(vals[0]), _parse_number(vals[4])
        elif len(toks) == 3 and toks[0][0] == "name":
            j = b.var(vals[0])
            v = _parse_number(vals[2])
            if vals[1] in ("<=", "=<", "<"):
                b.upper[j] = v
            elif vals[1] in (">=", "=>", ">"):
                b.lower[j] = v
            else:
                b.lower[j] = b.upper[j] = v
        elif len(toks) == 3 and toks[2][0] == "name":
            j = b.var(vals[2])
            v = _parse_number(vals[0])
            if vals[1] in ("<=", "=<", "<"):
                b.lower[j] = v
            elif vals[1] in (">=", "=>", ">"):
                b.upper[j] = v
            else:
                b.lower[j] = b.upper[j] = v
        else:
            raise LpParseError(f"unrecognised bound line {ln!r}")

    for ln in sections.get("binaries", []):
        for name in ln.split():
            j = b.var(name)
            b.integer.add(j)
            b.lower[j], b.upper[j] = 0.0, 1.0
    for ln in sections.get("generals", []):
        for name in ln.split():
            b.integer.add(b.var(name))
    return b.finish(name="lp", sense=order[0])


def read_mps(text: str) -> IpModel:
    b = _Builder()
    section = None
    obj_row = None
    row_index = {}
    in_int = False
    name = "mps"
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            parts = raw.split()
            section = parts[0].upper()
            if section == "NAME" and len(parts) > 1:
                name = parts[1]
            if section == "ENDATA":
                break
            continue
        f = raw.split()
        if section == "ROWS":
            kind, rname = f[0].upper(), f[1]
            if kind == "N":
                if obj_row is None:
                    obj_row = rname
                continue
            if kind != "E":
                raise LpParseError(f"only equality rows are supported, got {kind}")
            row_index[rname] = len(b.row_names)
            b.row_names.append(rname)
            b.rhs.append(0.0)
        elif section == "COLUMNS":
            if len(f) >= 3 and f[1] == "'MARKER'":
                in_int = f[2] == "'INTORG'"
                continue
            j = b.var(f[0])
            if in_int:
                b.integer.add(j)
            for rname, val in zip(f[1::2], f[2::2]):
                v = float(val)
                if rname == obj_row:
                    b.obj[j] = b.obj.get(j, 0.0) + v
                else:
                    b.rows.append(row_index[rname])
                    b.cols.append(j)
                    b.vals.append(v)
        elif section == "RHS":
            for rname, val in zip(f[1::2], f[2::2]):
                if rname in row_index:
                    b.rhs[row_index[rname]] = float(val)
        elif section == "BOUNDS":
            kind, col = f[0].upper(), f[2]
            j = b.var(col)
            v = float(f[3]) if len(f) > 3 else None
            if kind == "BV":
                b.lower[j], b.upper[j] = 0.0, 1.0
                b.integer.add(j)
            elif kind == "UP":
                b.upper[j] = v
            elif kind == "LO":
                b.lower[j] = v
            elif kind == "FX":
                b.lower[j] = b.upper[j] = v
            elif kind == "FR":
                b.lower[j], b.upper[j] = -math.inf, math.inf
            elif kind == "MI":
                b.lower[j] = -math.inf
            else:
                raise LpParseError(f"unsupported bound type {kind}")
    return b.finish(name=name, sense="min")


def read_model(path) -> IpModel:
    with open(path, encoding="ascii") as fh:
        text = fh.read()
    if str(path).lower().endswith(".mps"):
        return read_mps(text)
    return read_lp(text)
