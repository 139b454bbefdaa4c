"""Expression language for immersion components, with exact forward-mode derivatives.

Grammar (standard precedence, left associative)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'? power
    power  := atom ('^' intlit)?
    atom   := number | name | name '(' expr ')' | '(' expr ')'

Second derivatives come from nesting first-order dual numbers: the outer
perturbation runs along one chart direction, the inner along another.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import EvaluationError, ParseError
from .metallic import MetallicParams

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt")
CONSTANTS = ("pi", "sigma", "sigma_bar", "phi", "phi_bar")


# --- syntax tree -----------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Number, Var, Const, Neg, Binary, Call]


@dataclass(frozen=True)
class Expression:
    """A parsed expression bound to its chart variables and metallic constants."""

    root: Node
    variables: tuple
    params: MetallicParams | None = None
    source: str = ""

    def with_params(self, params: MetallicParams) -> "Expression":
        return Expression(self.root, self.variables, params, self.source)

    def __str__(self):
        return to_source(self.root)


# --- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    offset: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    # offsets are byte offsets into the UTF-8 encoding
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", len(src[:pos].encode()))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), len(src[:pos].encode())))
        pos = m.end()
    tokens.append(Token("end", "", len(src.encode())))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, src, variables):
        self.tokens = tokenize(src)
        self.i = 0
        self.vars = {name: k for k, name in enumerate(variables)}

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text):
        if self.tok.text != text or self.tok.kind != "op":
            raise ParseError(f"expected '{text}'", self.tok.offset)
        return self.advance()

    def error_here(self, what="unexpected token"):
        t = self.tok
        desc = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"{what}: {desc}", t.offset)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.error_here()
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            t = self.tok
            if t.kind != "number":
                raise ParseError("exponent must be a non-negative integer literal", t.offset)
            if not t.text.isdigit():
                raise ParseError(f"non-integer exponent {t.text!r}", t.offset)
            self.advance()
            return Binary("^", base, Number(float(int(t.text))))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Number(float(t.text))
        if t.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {t.text!r}", t.offset)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            if t.text in self.vars:
                return Var(t.text, self.vars[t.text])
            if t.text in CONSTANTS:
                return Const(t.text)
            if t.text in FUNCTIONS:
                raise ParseError(f"function {t.text!r} needs an argument", self.tok.offset)
            raise ParseError(f"unknown identifier {t.text!r}", t.offset)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.error_here()


def parse(src: str, variables: Sequence[str], params: MetallicParams | None = None) -> Expression:
    """Parse ``src`` over the chart variables ``variables``.

    Raises :class:`ParseError` (with ``offset``) on syntax errors, unknown
    identifiers or functions, and non-integer exponents.
    """
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise ParseError("duplicate chart variable names", 0)
    for v in variables:
        if v in FUNCTIONS or v in CONSTANTS:
            raise ParseError(f"variable name {v!r} shadows a builtin", 0)
    root = _Parser(src, variables).parse()
    return Expression(root, variables, params, src)


def to_source(node: Node) -> str:
    """Print a tree so that re-parsing reproduces it exactly."""
    if isinstance(node, Number):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Neg):
        return f"-({to_source(node.operand)})"
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    if isinstance(node, Binary):
        if node.op == "^":
            return f"({to_source(node.left)})^{int(node.right.value)}"
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    raise TypeError(node)


# --- dual numbers ----------------------------------------------------------

class Dual:
    """re + eps*e with e^2 = 0; ``re`` and ``eps`` may themselves be Duals."""

    __slots__ = ("re", "eps")

    def __init__(self, re, eps):
        self.re = re
        self.eps = eps

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.re + o.re, self.eps + o.eps)
        return Dual(self.re + o, self.eps)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.re - o.re, self.eps - o.eps)
        return Dual(self.re - o, self.eps)

    def __rsub__(self, o):
        return Dual(o - self.re, -self.eps)

    def __neg__(self):
        return Dual(-self.re, -self.eps)

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.re * o.re, self.re * o.eps + self.eps * o.re)
        return Dual(self.re * o, self.eps * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            inv = 1.0 / o.re
            return Dual(self.re * inv, (self.eps * o.re - self.re * o.eps) * (inv * inv))
        return Dual(self.re / o, self.eps / o)

    def __rtruediv__(self, o):
        inv = 1.0 / self.re
        return Dual(o * inv, -o * self.eps * (inv * inv))

    def __repr__(self):
        return f"Dual({self.re!r}, {self.eps!r})"


def real_part(x) -> float:
    while isinstance(x, Dual):
        x = x.re
    return x


def _sin(x):
    if isinstance(x, Dual):
        return Dual(_sin(x.re), _cos(x.re) * x.eps)
    return math.sin(x)


def _cos(x):
    if isinstance(x, Dual):
        return Dual(_cos(x.re), -_sin(x.re) * x.eps)
    return math.cos(x)


def _tan(x):
    if isinstance(x, Dual):
        t = _tan(x.re)
        return Dual(t, (1.0 + t * t) * x.eps)
    return math.tan(x)


def _exp(x):
    if isinstance(x, Dual):
        e = _exp(x.re)
        return Dual(e, e * x.eps)
    return math.exp(x)


def _log(x):
    if isinstance(x, Dual):
        return Dual(_log(x.re), x.eps / x.re)
    return math.log(x)


def _sqrt(x):
    if isinstance(x, Dual):
        s = _sqrt(x.re)
        return Dual(s, x.eps / (2.0 * s))
    return math.sqrt(x)


def _powi(x, k: int):
    if k == 0:
        return 1.0
    if isinstance(x, Dual):
        return Dual(_powi(x.re, k), k * _powi(x.re, k - 1) * x.eps)
    return x ** k


_FN = {"sin": _sin, "cos": _cos, "tan": _tan, "exp": _exp, "log": _log, "sqrt": _sqrt}


def constant_values(params: MetallicParams | None) -> dict:
    from .metallic import GOLDEN

    vals = {"pi": math.pi, "phi": GOLDEN.sigma, "phi_bar": GOLDEN.sigma_bar}
    if params is not None:
        vals["sigma"] = params.sigma
        vals["sigma_bar"] = params.sigma_bar
    return vals


def _evaluate(node: Node, x, consts):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Var):
        return x[node.index]
    if isinstance(node, Const):
        try:
            return consts[node.name]
        except KeyError:
            raise EvaluationError(f"constant {node.name!r} needs MetallicParams", node.name) from None
    if isinstance(node, Neg):
        return -_evaluate(node.operand, x, consts)
    if isinstance(node, Binary):
        a = _evaluate(node.left, x, consts)
        if node.op == "^":
            return _powi(a, int(node.right.value))
        b = _evaluate(node.right, x, consts)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if real_part(b) == 0.0:
            raise EvaluationError("division by zero", to_source(node))
        return a / b
    if isinstance(node, Call):
        a = _evaluate(node.arg, x, consts)
        v = real_part(a)
        if node.fn == "log" and v <= 0.0:
            raise EvaluationError(f"log of non-positive value {v!r}", to_source(node))
        if node.fn == "sqrt" and (v < 0.0 or (v == 0.0 and isinstance(a, Dual))):
            raise EvaluationError(f"sqrt outside its differentiable domain at {v!r}", to_source(node))
        if node.fn == "tan" and math.cos(v) == 0.0:
            raise EvaluationError("tan pole", to_source(node))
        return _FN[node.fn](a)
    raise TypeError(node)


@dataclass(frozen=True)
class Jet2:
    """Value, gradient and Hessian of a scalar function at a point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray


def _check_point(e: Expression, point):
    x = [float(v) for v in np.asarray(point, dtype=float).ravel()]
    if len(x) != len(e.variables):
        raise ValueError(f"point has {len(x)} coordinates, expression expects {len(e.variables)}")
    return x


def eval_value(e: Expression, point) -> float:
    x = _check_point(e, point)
    return float(_evaluate(e.root, x, constant_values(e.params)))


def eval_gradient(e: Expression, point):
    """Value and gradient with one first-order pass per chart direction."""
    x = _check_point(e, point)
    consts = constant_values(e.params)
    n = len(x)
    grad = np.zeros(n)
    value = None
    for i in range(n):
        xi = [Dual(v, 1.0 if k == i else 0.0) for k, v in enumerate(x)]
        r = _evaluate(e.root, xi, consts)
        if isinstance(r, Dual):
            value, grad[i] = r.re, r.eps
        else:
            value, grad[i] = r, 0.0
    if value is None:
        value = _evaluate(e.root, x, consts)
    return float(value), grad


def eval_jet(e: Expression, point) -> Jet2:
    """Exact value, gradient and Hessian by nested dual numbers.

    Entry (i, j) of the Hessian comes from seeding the outer perturbation on
    coordinate i and the inner one on coordinate j; the lower triangle is
    mirrored, so the result is symmetric by construction.
    """
    x = _check_point(e, point)
    consts = constant_values(e.params)
    n = len(x)
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    value = _evaluate(e.root, x, consts)
    value = float(real_part(value))
    for i in range(n):
        for j in range(i, n):
            xs = [Dual(Dual(v, 1.0 if k == j else 0.0), Dual(1.0 if k == i else 0.0, 0.0))
                  for k, v in enumerate(x)]
            r = _evaluate(e.root, xs, consts)
            if not isinstance(r, Dual):
                continue
            outer_re, outer_eps = r.re, r.eps
            if i == j:
                grad[i] = outer_eps.re if isinstance(outer_eps, Dual) else outer_eps
            hess[i, j] = outer_eps.eps if isinstance(outer_eps, Dual) else 0.0
            hess[j, i] = hess[i, j]
    return Jet2(value, grad, hess)


def free_variables(node: Node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Number, Const)):
        return set()
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, Call):
        return free_variables(node.arg)
    return free_variables(node.left) | free_variables(node.right)
