"""Line-oriented text formats for algebras, r-matrices, and twists.

All files are UTF-8 with '#' comments, blank-line tolerant, and carry
exact rationals serialized as p/q.  Blocks start with a bare keyword and
close with `end`:

    algebra
    dim 3
    basis e h f
    h_indices 1
    mode reductive
    bracket 0 1 -> (-2, 0)
    end

    rmatrix
    term 1 * e^f * 1
    term 1 * e^f * h
    end

    twist
    arity 2
    order 3
    hbar 0
    term 1 * (1 | 1 | 1)
    hbar 1
    term 1 * (e | f | 1)
    end

Monomials are basis names joined with '.', `1` for the empty word; the
r-matrix leg is a '.'-joined word in base names.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .adt_dgla import AdtElement
from .errors import SchemaError
from .hseries import HSeries
from .lie_core import LieData
from .tensor_spaces import CdybElement
from .uea import UEnvelope


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_blocks(text):
    """Split a document into named blocks of payload lines."""
    blocks = []
    current = None
    for lineno, line in _lines(text):
        if current is None:
            parts = line.split()
            if len(parts) != 1:
                raise SchemaError(
                    f"line {lineno}: expected a block keyword, got {line!r}"
                )
            current = (parts[0], [])
        elif line == "end":
            blocks.append(current)
            current = None
        else:
            current[1].append((lineno, line))
    if current is not None:
        raise SchemaError(f"block {current[0]!r} is not closed with 'end'")
    return blocks


def _find_block(blocks, name):
    found = [payload for n, payload in blocks if n == name]
    if not found:
        raise SchemaError(f"no {name!r} block in document")
    if len(found) > 1:
        raise SchemaError(f"multiple {name!r} blocks in document")
    return found[0]


def _frac(tok, lineno):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"line {lineno}: bad rational {tok!r}") from None


# -- algebra ----------------------------------------------------------------


def parse_algebra(text) -> LieData:
    payload = _find_block(parse_blocks(text), "algebra")
    dim = None
    basis = None
    h_indices = []
    mode = "reductive"
    brackets = {}
    for lineno, line in payload:
        parts = line.split()
        key = parts[0]
        if key == "dim":
            dim = int(parts[1])
        elif key == "basis":
            basis = parts[1:]
        elif key == "h_indices":
            h_indices = [int(p) for p in parts[1:]]
        elif key == "mode":
            mode = parts[1]
        elif key == "bracket":
            if len(parts) < 4 or parts[3] != "->":
                raise SchemaError(
                    f"line {lineno}: expected 'bracket i j -> (coeff, k)...'"
                )
            i, j = int(parts[1]), int(parts[2])
            rest = " ".join(parts[4:])
            comps = {}
            for chunk in rest.replace(")", ")\x00").split("\x00"):
                chunk = chunk.strip().lstrip(",").strip()
                if not chunk:
                    continue
                if not (chunk.startswith("(") and chunk.endswith(")")):
                    raise SchemaError(
                        f"line {lineno}: expected '(coeff, k)' pairs, "
                        f"got {chunk!r}"
                    )
                inner = chunk[1:-1].split(",")
                if len(inner) != 2:
                    raise SchemaError(f"line {lineno}: bad pair {chunk!r}")
                comps[int(inner[1])] = _frac(inner[0].strip(), lineno)
            brackets[(i, j)] = comps
        else:
            raise SchemaError(f"line {lineno}: unknown algebra key {key!r}")
    if dim is None or basis is None:
        raise SchemaError("algebra block needs 'dim' and 'basis'")
    if len(basis) != dim:
        raise SchemaError(f"dim {dim} does not match {len(basis)} basis names")
    return LieData(basis, brackets, h_indices, mode=mode)


def dump_algebra(lie: LieData) -> str:
    out = ["algebra", f"dim {lie.dim}", "basis " + " ".join(lie.basis_names)]
    out.append("h_indices" + "".join(f" {i}" for i in lie.h_indices))
    out.append(f"mode {lie.mode}")
    for (i, j), comps in sorted(lie._sc.items()):
        pairs = " ".join(f"({c}, {k})" for k, c in sorted(comps.items()))
        out.append(f"bracket {i} {j} -> {pairs}")
    out.append("end")
    return "\n".join(out) + "\n"


# -- monomials --------------------------------------------------------------


def _parse_mono(tok, lie: LieData, lineno):
    if tok == "1":
        return ()
    return tuple(lie.index_of(name) for name in tok.split("."))


def _dump_mono(mono, lie: LieData) -> str:
    if not mono:
        return "1"
    return ".".join(lie.name_of(i) for i in mono)


# -- r-matrix ---------------------------------------------------------------


def parse_rmatrix(text, lie: LieData, order: int) -> CdybElement:
    payload = _find_block(parse_blocks(text), "rmatrix")
    body = CdybElement.zero(order)
    for lineno, line in payload:
        parts = line.split()
        if parts[0] != "term" or len(parts) != 6 or parts[2] != "*" or parts[4] != "*":
            raise SchemaError(
                f"line {lineno}: expected 'term coeff * a^b * leg'"
            )
        coeff = _frac(parts[1], lineno)
        wedge_tok = parts[3]
        if "^" not in wedge_tok:
            raise SchemaError(f"line {lineno}: expected a wedge a^b")
        a, b = wedge_tok.split("^", 1)
        wedge = (lie.index_of(a), lie.index_of(b))
        leg = _parse_mono(parts[5], lie, lineno)
        for i in leg:
            if not lie.is_h(i):
                raise SchemaError(
                    f"line {lineno}: leg letter {lie.name_of(i)!r} is not "
                    "in the base subalgebra"
                )
        body = body + CdybElement.monomial(wedge, leg, coeff, order)
    return body


def dump_rmatrix(body: CdybElement, lie: LieData) -> str:
    out = ["rmatrix"]
    for (w, s), c in sorted(body.terms.items()):
        for n in range(c.order + 1):
            a = c.coeff(n)
            if a == 0:
                continue
            if n != 0:
                raise SchemaError(
                    "r-matrix files carry constant coefficients only"
                )
            out.append(
                f"term {a} * {lie.name_of(w[0])}^{lie.name_of(w[1])} * "
                + _dump_mono(s, lie)
            )
    out.append("end")
    return "\n".join(out) + "\n"


# -- twists -----------------------------------------------------------------


def parse_twist(text, uea: UEnvelope) -> AdtElement:
    payload = _find_block(parse_blocks(text), "twist")
    lie = uea.lie
    arity = None
    order = None
    level = None
    terms: dict = {}
    for lineno, line in payload:
        parts = line.split()
        key = parts[0]
        if key == "arity":
            arity = int(parts[1])
        elif key == "order":
            order = int(parts[1])
        elif key == "hbar":
            level = int(parts[1])
        elif key == "term":
            if arity is None or order is None or level is None:
                raise SchemaError(
                    f"line {lineno}: term before arity/order/hbar headers"
                )
            if len(parts) < 4 or parts[2] != "*":
                raise SchemaError(
                    f"line {lineno}: expected 'term coeff * (m | ... | leg)'"
                )
            coeff = _frac(parts[1], lineno)
            body = " ".join(parts[3:]).strip()
            if not (body.startswith("(") and body.endswith(")")):
                raise SchemaError(f"line {lineno}: slots must be in (...)")
            slots = [s.strip() for s in body[1:-1].split("|")]
            if len(slots) != arity + 1:
                raise SchemaError(
                    f"line {lineno}: expected {arity + 1} slots, "
                    f"got {len(slots)}"
                )
            words = [_parse_mono(s, lie, lineno) for s in slots]
            leg = tuple(sorted(words[-1]))
            for i in leg:
                if not lie.is_h(i):
                    raise SchemaError(
                        f"line {lineno}: leg letter {lie.name_of(i)!r} is "
                        "not in the base subalgebra"
                    )
            # slot words need not arrive straightened
            for combo in product(
                *(uea.straighten(w).items() for w in words[:-1])
            ):
                mkey = tuple(m for m, _ in combo) + (leg,)
                c = coeff
                for _, d in combo:
                    c = c * d
                prev = terms.get(mkey, HSeries.zero(order))
                terms[mkey] = prev + HSeries.hbar(order, level, c)
        else:
            raise SchemaError(f"line {lineno}: unknown twist key {key!r}")
    if arity is None or order is None:
        raise SchemaError("twist block needs 'arity' and 'order'")
    return AdtElement(uea, arity, terms, order)


def dump_twist(K: AdtElement) -> str:
    lie = K.uea.lie
    out = ["twist", f"arity {K.arity}", f"order {K.order}"]
    for n in range(K.order + 1):
        layer = K.hbar_component(n)
        if layer.is_zero():
            continue
        out.append(f"hbar {n}")
        for key, c in sorted(layer.terms.items()):
            slots = " | ".join(_dump_mono(m, lie) for m in key)
            out.append(f"term {c.coeff(0)} * ({slots})")
    out.append("end")
    return "\n".join(out) + "\n"


def load_file(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
