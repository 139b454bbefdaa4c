"""Parametric immersions f: U in R^m' -> R^m and their per-point frame data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneratePointError, InputError
from .expr import Dual, Expression, _evaluate, constant_values, parse, real_part
from .metallic import MetallicParams

RANK_TOL = 1e-8
# residual norm below which an ambient axis is treated as already spanned
COMPLETION_TOL = 1e-6


@dataclass(frozen=True)
class Immersion:
    variables: tuple
    components: tuple  # of Expression
    chart_box: tuple  # of (lo, hi)
    name: str = "immersion"

    def __post_init__(self):
        if len(self.components) <= len(self.variables):
            raise InputError("ambient dimension must exceed chart dimension")
        if len(self.chart_box) != len(self.variables):
            raise InputError("chart_box needs one interval per chart variable")
        for lo, hi in self.chart_box:
            if not hi > lo:
                raise InputError(f"empty chart interval [{lo}, {hi}]")

    @classmethod
    def from_strings(cls, components: Sequence[str], variables: Sequence[str], chart_box,
                     params: MetallicParams | None = None, name="immersion") -> "Immersion":
        exprs = tuple(parse(c, variables, params) for c in components)
        box = tuple((float(lo), float(hi)) for lo, hi in chart_box)
        return cls(tuple(variables), exprs, box, name)

    @property
    def chart_dim(self) -> int:
        return len(self.variables)

    @property
    def ambient_dim(self) -> int:
        return len(self.components)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.chart_dim

    def box_widths(self) -> np.ndarray:
        return np.array([hi - lo for lo, hi in self.chart_box])

    def _consts(self):
        return [constant_values(c.params) for c in self.components]

    def value(self, x) -> np.ndarray:
        x = [float(v) for v in np.asarray(x, dtype=float)]
        return np.array([real_part(_evaluate(c.root, x, k)) for c, k in zip(self.components, self._consts())])

    def jacobian(self, x):
        """Ambient position and the m x m' Jacobian (one dual pass per chart direction)."""
        x = [float(v) for v in np.asarray(x, dtype=float)]
        consts = self._consts()
        m, n = self.ambient_dim, self.chart_dim
        jac = np.zeros((m, n))
        pos = np.zeros(m)
        for i in range(n):
            xi = [Dual(v, 1.0 if k == i else 0.0) for k, v in enumerate(x)]
            for a, (c, kc) in enumerate(zip(self.components, consts)):
                r = _evaluate(c.root, xi, kc)
                if isinstance(r, Dual):
                    pos[a], jac[a, i] = r.re, r.eps
                else:
                    pos[a], jac[a, i] = r, 0.0
        return pos, jac

    def hessian(self, x) -> np.ndarray:
        """Second derivatives d^2 f / du_i du_j as an (m', m', m) array."""
        x = [float(v) for v in np.asarray(x, dtype=float)]
        consts = self._consts()
        m, n = self.ambient_dim, self.chart_dim
        H = np.zeros((n, n, m))
        for i in range(n):
            for j in range(i, n):
                xs = [Dual(Dual(v, 1.0 if k == j else 0.0), Dual(1.0 if k == i else 0.0, 0.0))
                      for k, v in enumerate(x)]
                for a, (c, kc) in enumerate(zip(self.components, consts)):
                    r = _evaluate(c.root, xs, kc)
                    if isinstance(r, Dual) and isinstance(r.eps, Dual):
                        H[i, j, a] = r.eps.eps
                H[j, i] = H[i, j]
        return H


def coordinate_hessian(f: Immersion, x) -> np.ndarray:
    """Entry (i, j) is the ambient vector d^2 f / du_i du_j at x."""
    return f.hessian(x)


def _mgs(columns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt with one reorthogonalization pass: A = Q R."""
    m, k = columns.shape
    Q = np.array(columns, dtype=float)
    R = np.zeros((k, k))
    for j in range(k):
        for _ in range(2):
            for i in range(j):
                c = Q[:, i] @ Q[:, j]
                Q[:, j] -= c * Q[:, i]
                R[i, j] += c
        nrm = np.linalg.norm(Q[:, j])
        R[j, j] = nrm
        Q[:, j] /= nrm
    return Q, R


def complete_basis(E: np.ndarray, tol: float = COMPLETION_TOL) -> np.ndarray:
    """Orthonormal complement of span(E): Gram-Schmidt of e_1, e_2, ... against E in axis order."""
    m, k = E.shape
    basis = [E[:, i] for i in range(k)]
    normals = []
    for a in range(m):
        if len(normals) == m - k:
            break
        v = np.zeros(m)
        v[a] = 1.0
        for _ in range(2):
            for b in basis:
                v -= (b @ v) * b
        nrm = np.linalg.norm(v)
        if nrm < tol:
            continue
        v /= nrm
        basis.append(v)
        normals.append(v)
    if len(normals) != m - k:
        raise DegeneratePointError("could not complete the tangent frame to an ambient basis")
    return np.column_stack(normals) if normals else np.zeros((m, 0))


@dataclass(frozen=True)
class FrameData:
    """Tangent/normal geometry of an immersion at one chart point.

    ``r_factor`` is the upper-triangular R in jacobian = tangent_onb @ R, so
    chart components c of a tangent vector have frame components R @ c.
    """

    point: np.ndarray
    position: np.ndarray
    jacobian: np.ndarray
    tangent_onb: np.ndarray
    normal_onb: np.ndarray
    induced_metric: np.ndarray
    r_factor: np.ndarray

    @property
    def chart_dim(self):
        return self.jacobian.shape[1]

    @property
    def codim(self):
        return self.normal_onb.shape[1]

    def tangent_projector(self):
        E = self.tangent_onb
        return E @ E.T

    def normal_projector(self):
        Nf = self.normal_onb
        return Nf @ Nf.T

    def chart_to_frame(self, c):
        """Chart components (columns) to orthonormal tangent-frame components."""
        return self.r_factor @ c

    def frame_to_chart(self, a):
        return np.linalg.solve(self.r_factor, a)

    def push(self, c):
        """Chart components to ambient vectors."""
        return self.jacobian @ c

    def ambient_to_chart(self, v):
        return self.frame_to_chart(self.tangent_onb.T @ v)


def frame_at(f: Immersion, x) -> FrameData:
    x = np.array(x, dtype=float)
    pos, jac = f.jacobian(x)
    s = np.linalg.svd(jac, compute_uv=False)
    if s[-1] < RANK_TOL * s[0]:
        raise DegeneratePointError(f"Jacobian rank deficient at {x.tolist()} (sigma_min/sigma_max={s[-1] / s[0]:.2e})")
    E, R = _mgs(jac)
    Nf = complete_basis(E)
    for arr in (x, pos, jac, E, Nf, R):
        arr.setflags(write=False)
    G = jac.T @ jac
    G.setflags(write=False)
    return FrameData(x, pos, jac, E, Nf, G, R)


@dataclass(frozen=True)
class TangentVector:
    vector: np.ndarray
    point: np.ndarray


@dataclass(frozen=True)
class NormalVector:
    vector: np.ndarray
    point: np.ndarray


def split(v, frame: FrameData) -> tuple[TangentVector, NormalVector]:
    """Orthogonal decomposition v = v_T + v_N against the frame at a point."""
    v = np.asarray(v, dtype=float)
    if v.shape != (frame.jacobian.shape[0],):
        raise InputError(f"expected an ambient vector of length {frame.jacobian.shape[0]}")
    E = frame.tangent_onb
    vt = E @ (E.T @ v)
    vn = v - vt
    return TangentVector(vt, frame.point), NormalVector(vn, frame.point)


def as_vector(X) -> np.ndarray:
    if isinstance(X, (TangentVector, NormalVector)):
        return X.vector
    return np.asarray(X, dtype=float)
