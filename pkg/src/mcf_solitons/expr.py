"""Tiny recursive-descent reader for scalar expressions in one variable.

Supports ``+ - * / ^``, unary minus, parentheses, the functions in
:data:`FUNCTIONS` and the constants ``pi`` and ``e``.  Parsed expressions
evaluate on numpy arrays and differentiate symbolically::

    >>> f = Expr.parse("s^2 * sin(s)")
    >>> f.diff()(0.0)
    0.0
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import SpecParseError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "atan": np.arctan,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^(),]))")


def tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecParseError(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", float(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None or (op is not None and tok != ("op", op)):
            raise SpecParseError(f"expected {op or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.i != len(self.toks):
            raise SpecParseError(f"trailing input {self.toks[self.i][1]!r} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = (("add" if op == "+" else "sub"), node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = (("mul" if op == "*" else "div"), node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("pow", base, self.unary())
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            if self.peek() == ("op", "("):
                if val not in FUNCTIONS:
                    raise SpecParseError(f"unknown function {val!r}")
                self.take("(")
                arg = self.expr()
                self.take(")")
                return ("call", val, arg)
            if val in self.variables:
                return ("var", val)
            if val in CONSTANTS:
                return ("num", CONSTANTS[val])
            raise SpecParseError(f"unknown name {val!r} in {self.text!r}")
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        raise SpecParseError(f"unexpected {val!r} in {self.text!r}")


# ---------------------------------------------------------------------------
# construction helpers with light constant folding


def _is(node, v):
    return node[0] == "num" and node[1] == v


def add(a, b):
    if a[0] == "num" and b[0] == "num":
        return ("num", a[1] + b[1])
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return ("add", a, b)


def sub(a, b):
    if a[0] == "num" and b[0] == "num":
        return ("num", a[1] - b[1])
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return ("sub", a, b)


def mul(a, b):
    if a[0] == "num" and b[0] == "num":
        return ("num", a[1] * b[1])
    if _is(a, 0.0) or _is(b, 0.0):
        return ("num", 0.0)
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    return ("mul", a, b)


def div(a, b):
    if _is(a, 0.0):
        return ("num", 0.0)
    if _is(b, 1.0):
        return a
    return ("div", a, b)


def neg(a):
    if a[0] == "num":
        return ("num", -a[1])
    if a[0] == "neg":
        return a[1]
    return ("neg", a)


def call(f, a):
    return ("call", f, a)


def _has_var(node, var):
    if node[0] == "var":
        return node[1] == var
    if node[0] == "num":
        return False
    return any(_has_var(c, var) for c in node[1:] if isinstance(c, tuple))


def derivative(node, var="s"):
    kind = node[0]
    if kind == "num":
        return ("num", 0.0)
    if kind == "var":
        return ("num", 1.0 if node[1] == var else 0.0)
    if kind == "neg":
        return neg(derivative(node[1], var))
    if kind in ("add", "sub"):
        op = add if kind == "add" else sub
        return op(derivative(node[1], var), derivative(node[2], var))
    if kind == "mul":
        a, b = node[1], node[2]
        return add(mul(derivative(a, var), b), mul(a, derivative(b, var)))
    if kind == "div":
        a, b = node[1], node[2]
        return div(sub(mul(derivative(a, var), b), mul(a, derivative(b, var))), ("pow", b, ("num", 2.0)))
    if kind == "pow":
        a, b = node[1], node[2]
        if not _has_var(b, var):
            return mul(mul(b, ("pow", a, sub(b, ("num", 1.0)))), derivative(a, var))
        # d(a^b) = a^b (b' log a + b a'/a)
        return mul(node, add(mul(derivative(b, var), call("log", a)), div(mul(b, derivative(a, var)), a)))
    if kind == "call":
        f, a = node[1], node[2]
        da = derivative(a, var)
        outer = {
            "sin": lambda: call("cos", a),
            "cos": lambda: neg(call("sin", a)),
            "tan": lambda: div(("num", 1.0), ("pow", call("cos", a), ("num", 2.0))),
            "sinh": lambda: call("cosh", a),
            "cosh": lambda: call("sinh", a),
            "tanh": lambda: div(("num", 1.0), ("pow", call("cosh", a), ("num", 2.0))),
            "exp": lambda: node,
            "log": lambda: div(("num", 1.0), a),
            "sqrt": lambda: div(("num", 0.5), node),
            "atan": lambda: div(("num", 1.0), add(("num", 1.0), ("pow", a, ("num", 2.0)))),
        }[f]()
        return mul(outer, da)
    raise ValueError(f"bad node {node!r}")


def evaluate(node, env):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        return env[node[1]]
    if kind == "neg":
        return -evaluate(node[1], env)
    if kind == "call":
        return FUNCTIONS[node[1]](evaluate(node[2], env))
    a, b = evaluate(node[1], env), evaluate(node[2], env)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    if kind == "pow":
        return np.power(a, b)
    raise ValueError(f"bad node {node!r}")


def to_text(node) -> str:
    kind = node[0]
    if kind == "num":
        return repr(node[1])
    if kind == "var":
        return node[1]
    if kind == "neg":
        return f"(-{to_text(node[1])})"
    if kind == "call":
        return f"{node[1]}({to_text(node[2])})"
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[kind]
    return f"({to_text(node[1])} {sym} {to_text(node[2])})"


class Expr:
    """Parsed scalar expression in the variable ``var``."""

    def __init__(self, node, var="s"):
        self.node = node
        self.var = var

    @classmethod
    def parse(cls, text: str, var: str = "s") -> "Expr":
        return cls(_Parser(text, {var}).parse(), var)

    def __call__(self, x):
        val = evaluate(self.node, {self.var: x})
        if np.ndim(x) and np.ndim(val) == 0:
            return np.full(np.shape(x), float(val))
        return val

    def diff(self) -> "Expr":
        return Expr(derivative(self.node, self.var), self.var)

    def __repr__(self):
        return f"Expr({to_text(self.node)!r})"
