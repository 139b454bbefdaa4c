"""Tangent vector fields written in chart coordinates."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .expr import Expression, eval_gradient, eval_value, parse
from .metallic import MetallicParams


class ChartVectorField:
    """A tangent field X = sum_k c^k(x) d/du_k on a chart.

    ``components(x)`` gives c(x); ``derivative(x)`` gives dc[k, i] = d c^k / d u_i.
    Expression-backed fields differentiate exactly; function-backed fields use
    central differences with per-coordinate ``step``.
    """

    def __init__(self, dim: int, components: Callable, derivative: Callable, label: str = ""):
        self.dim = dim
        self._components = components
        self._derivative = derivative
        self.label = label

    def components(self, x) -> np.ndarray:
        return np.asarray(self._components(np.asarray(x, dtype=float)), dtype=float)

    def derivative(self, x) -> np.ndarray:
        return np.asarray(self._derivative(np.asarray(x, dtype=float)), dtype=float)

    def __repr__(self):
        return f"ChartVectorField({self.label or '?'})"

    @classmethod
    def coordinate(cls, index: int, dim: int) -> "ChartVectorField":
        e = np.zeros(dim)
        e[index] = 1.0
        zero = np.zeros((dim, dim))
        return cls(dim, lambda x: e, lambda x: zero, label=f"d/du{index}")

    @classmethod
    def from_expressions(cls, exprs: Sequence[Expression]) -> "ChartVectorField":
        dim = len(exprs)

        def comps(x):
            return np.array([eval_value(e, x) for e in exprs])

        def deriv(x):
            return np.array([eval_gradient(e, x)[1] for e in exprs])

        return cls(dim, comps, deriv, label="(" + ", ".join(str(e) for e in exprs) + ")")

    @classmethod
    def from_strings(cls, sources: Sequence[str], variables: Sequence[str],
                     params: MetallicParams | None = None) -> "ChartVectorField":
        if len(sources) != len(variables):
            raise ValueError("a chart vector field needs one component per chart variable")
        return cls.from_expressions([parse(s, variables, params) for s in sources])

    @classmethod
    def affine(cls, a, B, x0) -> "ChartVectorField":
        """c(x) = a + B (x - x0), with exact derivative B."""
        a = np.asarray(a, dtype=float)
        B = np.asarray(B, dtype=float)
        x0 = np.asarray(x0, dtype=float)
        return cls(len(a), lambda x: a + B @ (x - x0), lambda x: B, label="affine")

    @classmethod
    def from_function(cls, fn: Callable, dim: int, step) -> "ChartVectorField":
        step = np.broadcast_to(np.asarray(step, dtype=float), (dim,))

        def deriv(x):
            cols = []
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = step[i]
                cols.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * step[i]))
            return np.column_stack(cols)

        return cls(dim, fn, deriv, label="numeric")


def chart_bracket(X: ChartVectorField, Y: ChartVectorField, x) -> np.ndarray:
    """Chart components of [X, Y] = X(Y) - Y(X) at x."""
    return Y.derivative(x) @ X.components(x) - X.derivative(x) @ Y.components(x)
