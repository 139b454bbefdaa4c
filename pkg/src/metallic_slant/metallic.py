"""Metallic numbers, metallic and almost-product structure operators, projectors.

A metallic structure on R^m is a linear operator J with J^2 = pJ + qI that is
self-adjoint for the ambient metric.  Its eigenvalues are the two roots of
x^2 - px - q, the metallic number sigma > 0 and its conjugate sigma_bar < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, InputError, StructureError
from .report import VerificationReport

DEFAULT_TOL = 1e-9
MAX_DIM = 1024


@dataclass(frozen=True)
class MetallicParams:
    p: int
    q: int
    sigma: float
    sigma_bar: float

    @property
    def gap(self) -> float:
        """2*sigma - p, the distance between the two roots."""
        return self.sigma - self.sigma_bar

    @property
    def is_golden(self) -> bool:
        return self.p == 1 and self.q == 1


def metallic_number(p: int, q: int) -> MetallicParams:
    """Return the metallic mean sigma_{p,q} and its conjugate root.

    >>> metallic_number(1, 1).sigma
    1.618033988749895
    """
    if isinstance(p, bool) or isinstance(q, bool):
        raise DomainError("p and q must be positive integers")
    if int(p) != p or int(q) != q:
        raise DomainError(f"p and q must be integers, got p={p}, q={q}")
    p, q = int(p), int(q)
    if p <= 0 or q <= 0:
        raise DomainError(f"p and q must be positive, got p={p}, q={q}")
    # both terms positive: no cancellation
    sigma = (p + math.sqrt(p * p + 4 * q)) / 2.0
    # p - sigma cancels for large p; the product of roots is -q
    sigma_bar = -q / sigma
    return MetallicParams(p, q, sigma, sigma_bar)


GOLDEN = metallic_number(1, 1)


class Kind(str, Enum):
    METALLIC = "metallic"
    PRODUCT = "product"


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class StructureOperator:
    """A constant (1,1)-tensor on R^m together with the ambient metric.

    ``params`` is set for metallic operators and ``None`` for almost-product ones.
    """

    matrix: np.ndarray
    kind: Kind = Kind.METALLIC
    params: MetallicParams | None = None
    metric: np.ndarray | None = field(default=None)

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError(f"structure matrix must be square, got shape {M.shape}")
        if M.shape[0] > MAX_DIM:
            raise InputError(f"ambient dimension {M.shape[0]} exceeds {MAX_DIM}")
        G = np.eye(M.shape[0]) if self.metric is None else np.array(self.metric, dtype=float)
        if G.shape != M.shape:
            raise InputError("metric and structure must have the same shape")
        if not np.allclose(G, G.T, atol=1e-12):
            raise InputError("metric must be symmetric")
        try:
            np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            raise InputError("metric must be positive definite") from None
        kind = Kind(self.kind)
        if kind is Kind.METALLIC and self.params is None:
            raise InputError("a metallic structure needs MetallicParams")
        M.setflags(write=False)
        G.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "metric", G)
        object.__setattr__(self, "kind", kind)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_euclidean(self) -> bool:
        return bool(np.array_equal(self.metric, np.eye(self.dim)))

    def __call__(self, v):
        return self.matrix @ v

    @classmethod
    def diagonal(cls, tokens, params: MetallicParams) -> "StructureOperator":
        """Diagonal metallic operator from a list of ``"sigma"``/``"sigma_bar"`` tokens."""
        values = []
        for tok in tokens:
            if tok == "sigma":
                values.append(params.sigma)
            elif tok == "sigma_bar":
                values.append(params.sigma_bar)
            else:
                raise InputError(f"unknown diagonal token {tok!r}; use 'sigma' or 'sigma_bar'")
        return cls(np.diag(values), Kind.METALLIC, params)


def polynomial_residual(S: StructureOperator) -> float:
    """inf-norm of J^2 - pJ - qI (metallic) or F^2 - I (product)."""
    M = S.matrix
    I = np.eye(S.dim)
    if S.kind is Kind.METALLIC:
        p, q = S.params.p, S.params.q
        R = M @ M - p * M - q * I
    else:
        R = M @ M - I
    return float(np.linalg.norm(R, np.inf))


def compatibility_residual(S: StructureOperator) -> float:
    """inf-norm of G J - J^T G, zero when J is self-adjoint for the metric."""
    G, M = S.metric, S.matrix
    return float(np.linalg.norm(G @ M - M.T @ G, np.inf))


def validate_structure(S: StructureOperator, tol: float = DEFAULT_TOL, n_vectors: int = 100,
                       seed: int = 0) -> VerificationReport:
    """Check the defining polynomial, metric compatibility and (metallic) the
    quadratic identity g(JX, JY) = p g(JX, Y) + q g(X, Y) on random vector pairs."""
    report = VerificationReport(scenario="structure")
    if S.kind is Kind.METALLIC:
        report.add("polynomial", "J^2 = pJ + qI", polynomial_residual(S), tol)
    else:
        report.add("polynomial", "F^2 = I", polynomial_residual(S), tol)
    report.add("compatibility", "g(JX,Y) = g(X,JY)", compatibility_residual(S), tol)
    if S.kind is Kind.METALLIC:
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((S.dim, n_vectors))
        Y = rng.standard_normal((S.dim, n_vectors))
        G, J = S.metric, S.matrix
        p, q = S.params.p, S.params.q
        lhs = np.einsum("in,ij,jn->n", J @ X, G, J @ Y)
        rhs = p * np.einsum("in,ij,jn->n", J @ X, G, Y) + q * np.einsum("in,ij,jn->n", X, G, Y)
        scale = np.maximum(1.0, np.abs(lhs))
        report.add("quadratic_metric", "g(JX,JY) = p g(JX,Y) + q g(X,Y)",
                   float(np.max(np.abs(lhs - rhs) / scale)), tol, n_vectors)
    return report


def require_valid(S: StructureOperator, tol: float = DEFAULT_TOL, expect: Kind | None = None):
    if expect is not None and S.kind is not expect:
        raise StructureError(f"expected a {expect.value} structure, got {S.kind.value}")
    rep = validate_structure(S, tol, n_vectors=8)
    if not rep.passed:
        bad = ", ".join(f"{c.name}={c.residual:.3e}" for c in rep.failures())
        raise StructureError(f"invalid {S.kind.value} structure: {bad}")


def metallic_from_product(F: StructureOperator, params: MetallicParams,
                          branch: Branch | str = Branch.PLUS, tol: float = DEFAULT_TOL) -> StructureOperator:
    """J = +-((2 sigma - p)/2) F + (p/2) I.

    The plus branch sends the +1 eigenspace of F to sigma and -1 to sigma_bar.
    """
    require_valid(F, tol, expect=Kind.PRODUCT)
    sign = 1.0 if Branch(branch) is Branch.PLUS else -1.0
    J = sign * (params.gap / 2.0) * F.matrix + (params.p / 2.0) * np.eye(F.dim)
    out = StructureOperator(J, Kind.METALLIC, params, F.metric)
    require_valid(out, tol)
    return out


def products_from_metallic(J: StructureOperator, tol: float = DEFAULT_TOL):
    """The two almost-product structures F1 = (2J - pI)/(2 sigma - p) and F2 = -F1."""
    require_valid(J, tol, expect=Kind.METALLIC)
    par = J.params
    F1 = (2.0 * J.matrix - par.p * np.eye(J.dim)) / par.gap
    return (StructureOperator(F1, Kind.PRODUCT, None, J.metric),
            StructureOperator(-F1, Kind.PRODUCT, None, J.metric))


@dataclass(frozen=True)
class ProjectorPair:
    """P projects on the sigma_bar eigenspace, Q on the sigma eigenspace."""

    P: np.ndarray
    Q: np.ndarray


def projectors(J: StructureOperator, tol: float = DEFAULT_TOL) -> ProjectorPair:
    require_valid(J, tol, expect=Kind.METALLIC)
    s, gap = J.params.sigma, J.params.gap
    I = np.eye(J.dim)
    P = -J.matrix / gap + (s / gap) * I
    Q = J.matrix / gap + ((s - J.params.p) / gap) * I
    return ProjectorPair(P, Q)


def random_metallic(dim: int, params: MetallicParams, rng: np.random.Generator,
                    n_sigma: int | None = None) -> StructureOperator:
    """A metallic operator with a random orthogonal eigenbasis (Euclidean metric)."""
    if n_sigma is None:
        n_sigma = int(rng.integers(0, dim + 1))
    Qm, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eig = np.array([params.sigma] * n_sigma + [params.sigma_bar] * (dim - n_sigma))
    M = (Qm * eig) @ Qm.T
    return StructureOperator((M + M.T) / 2.0, Kind.METALLIC, params)
