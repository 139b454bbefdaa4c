"""Tangential/normal decomposition of a structure operator along a submanifold.

All maps are expressed in the orthonormal tangent frame E and normal frame
N of a :class:`FrameData`, so metric adjoints are plain transposes.  For a
metallic J the blocks are T, N, t, n; applied to an almost-product F the
same blocks are the f, omega, B, C of the product decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InputError
from .immersion import FrameData
from .metallic import MetallicParams, StructureOperator
from .report import VerificationReport
from .sampling import SamplingPlan

# A structure is either a constant operator or a callable giving the matrix
# at an ambient position (used to model non-parallel structures).
StructureLike = Union[StructureOperator, Callable[[np.ndarray], np.ndarray]]


class StructureField:
    """A position-dependent structure J(x) on R^m, e.g. to model a non-parallel J.

    ``params`` records the (p, q) the field is meant to satisfy pointwise.
    """

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], dim: int, params: MetallicParams | None = None,
                 label: str = "field"):
        self.fn = fn
        self.dim = dim
        self.params = params
        self.label = label

    def __call__(self, position) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(position, dtype=float)), dtype=float)


def structure_matrix(J: StructureLike, position=None) -> np.ndarray:
    if isinstance(J, StructureOperator):
        if not J.is_euclidean:
            raise InputError("submanifold computations require the Euclidean ambient metric")
        return J.matrix
    if isinstance(J, np.ndarray):
        return J
    return np.asarray(J(position), dtype=float)


@dataclass(frozen=True)
class InducedMaps:
    T: np.ndarray  # m' x m'
    N: np.ndarray  # r x m'
    t: np.ndarray  # m' x r
    n: np.ndarray  # r x r

    def block(self) -> np.ndarray:
        """The structure in the adapted basis [E | N]."""
        return np.block([[self.T, self.t], [self.N, self.n]])


def induced_maps(J: StructureLike, frame: FrameData) -> InducedMaps:
    M = structure_matrix(J, frame.position)
    E, Nf = frame.tangent_onb, frame.normal_onb
    if M.shape[0] != E.shape[0]:
        raise InputError(f"structure is {M.shape[0]}-dimensional but the immersion lives in R^{E.shape[0]}")
    JE, JN = M @ E, M @ Nf
    return InducedMaps(E.T @ JE, Nf.T @ JE, E.T @ JN, Nf.T @ JN)


@dataclass(frozen=True)
class SigmaStructure:
    """Induced (T, u_alpha, xi_alpha, a_alpha_beta) at a point.

    Row alpha of ``u`` is the 1-form u_alpha, column alpha of ``xi`` is the
    vector field xi_alpha, both in tangent-frame coordinates.
    """

    T: np.ndarray
    u: np.ndarray
    xi: np.ndarray
    a: np.ndarray


def sigma_structure(J: StructureLike, frame: FrameData) -> SigmaStructure:
    maps = induced_maps(J, frame)
    # J N_alpha = xi_alpha + sum_beta a_{alpha beta} N_beta, so a_{alpha beta} = <J N_alpha, N_beta> = n[beta, alpha]
    return SigmaStructure(maps.T, maps.N, maps.t, maps.n.T)


def sigma_residuals(S: SigmaStructure, params: MetallicParams, X: np.ndarray) -> dict:
    """Residuals of the induced-structure identities for tangent vectors ``X`` (columns).

    Vector identities are evaluated on the columns of X and reported as the
    largest Euclidean norm of the violation; the matrix identities for a
    and u(xi) are reported as the largest absolute entry.
    """
    p, q = params.p, params.q
    T, u, xi, a = S.T, S.u, S.xi, S.a
    k = T.shape[0]
    r = a.shape[0]
    I = np.eye(k)

    def colmax(M):
        return float(np.max(np.linalg.norm(M, axis=0))) if M.size else 0.0

    def entmax(M):
        return float(np.max(np.abs(M))) if M.size else 0.0

    return {
        "T_squared": colmax((T @ T - p * T - q * I + xi @ u) @ X),
        "u_of_T": colmax((u @ T - p * u + a @ u) @ X),
        "a_symmetric": entmax(a - a.T),
        "u_of_xi": entmax((u @ xi).T - (q * np.eye(r) + p * a - a @ a)),
        "T_of_xi": colmax(T @ xi - p * xi + xi @ a.T),
        "u_is_dual_of_xi": entmax(u - xi.T),
    }


SIGMA_IDENTITIES = {
    "T_squared": "T^2 X = pTX + qX - sum u_a(X) xi_a",
    "u_of_T": "u_a(TX) = p u_a(X) - sum_b a_ab u_b(X)",
    "a_symmetric": "a_ab = a_ba",
    "u_of_xi": "u_b(xi_a) = q delta_ab + p a_ab - sum_c a_ac a_cb",
    "T_of_xi": "T xi_a = p xi_a - sum_b a_ab xi_b",
    "u_is_dual_of_xi": "u_a(X) = g(X, xi_a)",
}


def verify_theorem1(structures: Sequence[SigmaStructure], params: MetallicParams, dirs=20,
                    rng: np.random.Generator | None = None, tol: float = 1e-9) -> VerificationReport:
    """Check every induced-structure identity over the sampled points.

    Each point is probed with ``dirs`` random unit tangent vectors.  ``dirs``
    may also be a SamplingPlan, which then supplies the direction count, the
    generator and the algebraic tolerance.
    """
    if isinstance(structures, SigmaStructure):
        structures = [structures]
    if isinstance(dirs, SamplingPlan):
        plan = dirs
        dirs, rng, tol = plan.dirs, plan.rng(4), plan.tol.algebraic
    if rng is None:
        rng = np.random.default_rng(0)
    worst = dict.fromkeys(SIGMA_IDENTITIES, 0.0)
    for S in structures:
        k = S.T.shape[0]
        X = rng.standard_normal((k, dirs))
        X /= np.linalg.norm(X, axis=0)
        for key, val in sigma_residuals(S, params, X).items():
            worst[key] = max(worst[key], val)
    report = VerificationReport(scenario="sigma_structure")
    n = len(structures) * dirs
    for key, ident in SIGMA_IDENTITIES.items():
        report.add(f"sigma.{key}", ident, worst[key], tol, n)
    return report


def symmetry_residuals(maps: InducedMaps) -> dict:
    """T and n self-adjoint, N adjoint to t."""
    return {
        "T_symmetric": float(np.max(np.abs(maps.T - maps.T.T), initial=0.0)),
        "n_symmetric": float(np.max(np.abs(maps.n - maps.n.T), initial=0.0)),
        "N_adjoint_t": float(np.max(np.abs(maps.N - maps.t.T), initial=0.0)),
    }


def invariant_residual(structures: Sequence[SigmaStructure], params: MetallicParams):
    """(max |N|, max ||T^2 - pT - qI||).  When N vanishes everywhere T is itself metallic."""
    n_max = max(float(np.max(np.abs(S.u), initial=0.0)) for S in structures)
    t_max = max(float(np.max(np.abs(S.T @ S.T - params.p * S.T - params.q * np.eye(S.T.shape[0])), initial=0.0))
                for S in structures)
    return n_max, t_max


def change_of_basis(frame: FrameData, chart_vectors) -> np.ndarray:
    """Tangent-frame coordinates of vectors given by chart components (e.g. the Z_i of a coordinate frame)."""
    return frame.chart_to_frame(np.asarray(chart_vectors, dtype=float))
