"""Text and JSON forms of Weyl-algebra elements.

Expressions use 1-based generator names ``x1..xd`` and ``xi1..xid`` (bare
``x``/``xi`` mean index 1), ``i`` for the imaginary unit, ``*``, ``/`` by a
scalar, ``+``, ``-``, ``^`` with a non-negative integer exponent, and
parentheses, e.g. ``(1+2i)*x1^2*xi2 + x2``.  Products are taken in the target
algebra, so ``xi1*x1`` comes back normal-ordered.
"""

from __future__ import annotations

import re

from .errors import ValidationError
from .weyl import OPERATOR, WeylAlgebra, WeylElement

__all__ = ["parse_element", "element_to_json", "element_from_json"]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)(?P<imag>i(?![a-z0-9]))?"
    r"|(?P<gen>xi|x)(?P<idx>\d*)"
    r"|(?P<unit>i(?![a-z0-9]))"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValidationError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("num") is not None:
            out.append(("num", m.group("num"), bool(m.group("imag"))))
        elif m.group("gen") is not None:
            out.append(("gen", m.group("gen"), int(m.group("idx") or 1)))
        elif m.group("unit") is not None:
            out.append(("num", "1", True))
        else:
            out.append(("op", m.group("op"), None))
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens, algebra: WeylAlgebra):
        self.toks = tokens
        self.k = 0
        self.alg = algebra

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else (None, None, None)

    def take(self):
        tok = self.peek()
        self.k += 1
        return tok

    def expect(self, op):
        kind, val, _ = self.take()
        if kind != "op" or val != op:
            raise ValidationError(f"expected {op!r}")

    def expr(self) -> WeylElement:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        out = self.term() * sign
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                out = out + t if val == "+" else out - t
            else:
                return out

    def term(self) -> WeylElement:
        out = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                f = self.factor()
                if val == "*":
                    out = out * f
                else:
                    c = self._as_scalar(f)
                    out = out * (self.alg.ring.one / c)
            else:
                return out

    def _as_scalar(self, f: WeylElement):
        zero_key = (0,) * self.alg.ngens
        if set(f.terms) != {zero_key}:
            raise ValidationError("division only by a nonzero constant")
        return f.terms[zero_key]

    def factor(self) -> WeylElement:
        base = self.primary()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, imag = self.take()
            if kind != "num" or imag or not val.isdigit():
                raise ValidationError("exponent must be a non-negative integer")
            return base ** int(val)
        return base

    def primary(self) -> WeylElement:
        kind, val, extra = self.take()
        alg = self.alg
        if kind == "num":
            c = alg.ring.parse_number(val)
            return alg.scalar(c * alg.ring.imag if extra else c)
        if kind == "gen":
            j = extra - 1
            if not 0 <= j < alg.d:
                raise ValidationError(f"{val}{extra} out of range for d={alg.d}")
            return alg.x(j) if val == "x" else alg.xi(j)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ValidationError(f"unexpected token {val!r}")


def parse_element(text: str, algebra: WeylAlgebra) -> WeylElement:
    """Parse an expression into ``algebra``.

    Examples
    --------
    >>> from ncgeo.weyl import WeylAlgebra
    >>> A = WeylAlgebra([[0.0]], exact=True)
    >>> str(parse_element("xi*x", A))
    'x1*xi1 - i'
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ValidationError("empty expression")
    p = _Parser(tokens, algebra)
    out = p.expr()
    if p.k != len(tokens):
        raise ValidationError(f"trailing input after token {p.k}")
    return out


def element_to_json(a: WeylElement) -> dict:
    alg = a.algebra
    d = alg.d
    ring = alg.ring
    terms = []
    for k in sorted(a.terms, key=lambda k: (-sum(k), k)):
        re_, im_ = ring.to_json_pair(a.terms[k])
        terms.append({"x": list(k[:d]), "xi": list(k[d:]), "re": re_, "im": im_})
    return {
        "d": d,
        "algebra": alg.kind,
        "exact": alg.exact,
        "theta": alg.theta.tolist(),
        "theta_prime": alg.theta_prime.tolist(),
        "terms": terms,
    }


def element_from_json(obj: dict, algebra: WeylAlgebra | None = None) -> WeylElement:
    """Inverse of :func:`element_to_json`; ``algebra`` overrides the stored one."""
    try:
        if algebra is None:
            algebra = WeylAlgebra(
                obj["theta"],
                obj.get("theta_prime"),
                kind=obj.get("algebra", OPERATOR),
                exact=bool(obj.get("exact", False)),
            )
        ring = algebra.ring
        terms = {}
        for t in obj["terms"]:
            key = tuple(int(v) for v in t["x"]) + tuple(int(v) for v in t["xi"])
            terms[key] = ring.from_json_pair((t["re"], t.get("im", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed element JSON: {exc}") from exc
    return WeylElement(algebra, terms)
