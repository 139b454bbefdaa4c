"""Wirtinger and slant angles, slant / semi-slant distribution tests, angle relations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, InputError
from .fields import ChartVectorField
from .immersion import FrameData, Immersion, as_vector, frame_at
from .induced import StructureLike, induced_maps, structure_matrix
from .metallic import MetallicParams, StructureOperator
from .report import VerificationReport
from .sampling import SamplingPlan, sample_points

HALF_PI = math.pi / 2
ZERO_RATIO = 1e-12


# --- distributions ---------------------------------------------------------

@dataclass(frozen=True)
class DistributionSpec:
    """A distribution on the chart, given by one of three selectors.

    ``coords``       indices of chart coordinates whose coordinate fields span it;
    ``fields``       spanning chart vector fields;
    ``frame_matrix`` x -> m' x k coefficients in the orthonormal tangent frame.
    """

    name: str
    coords: tuple | None = None
    fields: tuple | None = None
    frame_matrix: Callable | None = None

    def __post_init__(self):
        given = sum(s is not None for s in (self.coords, self.fields, self.frame_matrix))
        if given != 1:
            raise ConfigError(f"distribution {self.name!r} needs exactly one selector")
        if self.coords is not None:
            object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if self.fields is not None:
            object.__setattr__(self, "fields", tuple(self.fields))

    def chart_basis(self, frame: FrameData) -> np.ndarray:
        """Spanning vectors in chart components (m' x k)."""
        m1 = frame.chart_dim
        if self.coords is not None:
            C = np.zeros((m1, len(self.coords)))
            for col, k in enumerate(self.coords):
                if not 0 <= k < m1:
                    raise ConfigError(f"distribution {self.name!r}: coordinate index {k} out of range")
                C[k, col] = 1.0
            return C
        if self.fields is not None:
            return np.column_stack([fld.components(frame.point) for fld in self.fields])
        A = np.asarray(self.frame_matrix(frame.point), dtype=float)
        return frame.frame_to_chart(A)

    def frame_basis(self, frame: FrameData) -> np.ndarray:
        """Orthonormal basis in tangent-frame coordinates (m' x k)."""
        A = frame.chart_to_frame(self.chart_basis(frame))
        s = np.linalg.svd(A, compute_uv=False)
        if A.shape[1] == 0 or s[-1] < 1e-8 * max(s[0], 1.0):
            raise ConfigError(f"distribution {self.name!r} is degenerate at {frame.point.tolist()}")
        Q, _ = np.linalg.qr(A)
        return Q

    def ambient_basis(self, frame: FrameData) -> np.ndarray:
        return frame.tangent_onb @ self.frame_basis(frame)

    def dim(self, frame: FrameData) -> int:
        return self.chart_basis(frame).shape[1]

    def spanning_fields(self, f: Immersion) -> list[ChartVectorField]:
        m1 = f.chart_dim
        if self.coords is not None:
            return [ChartVectorField.coordinate(k, m1) for k in self.coords]
        if self.fields is not None:
            return list(self.fields)
        step = 1e-5 * f.box_widths()
        k = np.asarray(self.frame_matrix(np.mean(np.asarray(f.chart_box), axis=1))).shape[1]
        out = []
        for col in range(k):
            def fn(x, col=col):
                fr = frame_at(f, x)
                return fr.frame_to_chart(np.asarray(self.frame_matrix(x), dtype=float))[:, col]
            out.append(ChartVectorField.from_function(fn, m1, step))
        return out


def whole_tangent(f: Immersion) -> DistributionSpec:
    return DistributionSpec("TM", coords=tuple(range(f.chart_dim)))


# --- angles ----------------------------------------------------------------

def _angle_ratio(M: np.ndarray, basis: np.ndarray, X: np.ndarray) -> float:
    """||P TX|| / ||MX||, P the orthogonal projection on span(basis)."""
    MX = M @ X
    nMX = np.linalg.norm(MX)
    if nMX == 0.0:
        raise InputError("structure annihilates the vector; the angle is undefined")
    return float(np.linalg.norm(basis.T @ MX) / nMX)


def angle_from_ratio(c: float) -> float:
    if c < ZERO_RATIO:
        return HALF_PI
    return math.acos(min(c, 1.0))


def wirtinger_angle(M: StructureLike, frame: FrameData, X, D: DistributionSpec | None = None) -> float:
    """Angle between MX and T_xM (or the subspace D_x when D is given), in [0, pi/2]."""
    X = as_vector(X)
    if np.linalg.norm(X) == 0.0:
        raise InputError("the Wirtinger angle is undefined for the zero vector")
    Mm = structure_matrix(M, frame.position)
    basis = frame.tangent_onb if D is None else D.ambient_basis(frame)
    return angle_from_ratio(_angle_ratio(Mm, basis, X))


def wirtinger_angle_J(J: StructureLike, frame: FrameData, X, D=None) -> float:
    """cos(theta) = ||TX|| / ||JX||; returns pi/2 exactly when TX vanishes."""
    return wirtinger_angle(J, frame, X, D)


def wirtinger_angle_F(F: StructureLike, frame: FrameData, X, D=None) -> float:
    """cos(vartheta) = ||fX|| / ||FX|| for an almost-product structure F."""
    return wirtinger_angle(F, frame, X, D)


class SlantClass(str, Enum):
    INVARIANT = "invariant"
    ANTI_INVARIANT = "anti_invariant"
    PROPER_SLANT = "proper_slant"
    NOT_SLANT = "not_slant"


@dataclass
class AngleReport:
    distribution: str
    angles: np.ndarray
    angle_tol: float
    mean: float = field(init=False)
    max_deviation: float = field(init=False)
    classification: SlantClass = field(init=False)
    lam: float = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        self.angles = a
        self.mean = float(np.mean(a))
        self.max_deviation = float(np.max(np.abs(a - self.mean)))
        self.lam = float(np.mean(np.cos(a) ** 2))
        if a.max() < self.angle_tol:
            self.classification = SlantClass.INVARIANT
        elif a.min() > HALF_PI - self.angle_tol:
            self.classification = SlantClass.ANTI_INVARIANT
        elif self.max_deviation < self.angle_tol:
            self.classification = SlantClass.PROPER_SLANT
        else:
            self.classification = SlantClass.NOT_SLANT

    @property
    def is_slant(self) -> bool:
        return self.classification is not SlantClass.NOT_SLANT

    @property
    def cos(self) -> float:
        return math.cos(self.mean)


def sampled_frames(f: Immersion, plan: SamplingPlan, stream: int = 0) -> list[FrameData]:
    pts = sample_points(f.chart_box, plan.count, plan.rng(stream))
    return [frame_at(f, x) for x in pts]


def slant_test(M: StructureLike, f: Immersion, D: DistributionSpec, plan: SamplingPlan,
               frames: Sequence[FrameData] | None = None, stream: int = 1) -> AngleReport:
    """Angles between MX and D over ``plan.count`` points x ``plan.dirs`` random unit X in D."""
    if frames is None:
        frames = sampled_frames(f, plan)
    rng = plan.rng(stream)
    angles = []
    for fr in frames:
        Mm = structure_matrix(M, fr.position)
        Q = D.ambient_basis(fr)
        W = rng.standard_normal((Q.shape[1], plan.dirs))
        W /= np.linalg.norm(W, axis=0)
        for w in W.T:
            angles.append(angle_from_ratio(_angle_ratio(Mm, Q, Q @ w)))
    return AngleReport(D.name, np.array(angles), plan.tol.angle)


def _restricted_T(J: StructureLike, frame: FrameData, D: DistributionSpec):
    """(T_D, B): the compression of T to D in an orthonormal frame coordinate basis B of D."""
    maps = induced_maps(J, frame)
    B = D.frame_basis(frame)
    return B.T @ maps.T @ B, B, maps


def slant_distribution_lambda(J: StructureOperator, frames, D: DistributionSpec):
    """Least-squares lambda in (P_D T)^2 = lambda (p P_D T + q I) on D, and its max residual.

    ``frames`` may be one FrameData or a sequence; the fit pools all of them.
    """
    if isinstance(frames, FrameData):
        frames = [frames]
    p, q = J.params.p, J.params.q
    As, Cs = [], []
    for fr in frames:
        TD, _, _ = _restricted_T(J, fr, D)
        As.append(TD @ TD)
        Cs.append(p * TD + q * np.eye(TD.shape[0]))
    num = sum(float(np.sum(A * C)) for A, C in zip(As, Cs))
    den = sum(float(np.sum(C * C)) for C in Cs)
    lam = num / den
    res = max(float(np.max(np.abs(A - lam * C))) for A, C in zip(As, Cs))
    return lam, res


def slant_identity_residuals(J: StructureOperator, frames: Sequence[FrameData], D: DistributionSpec,
                             theta: float, dirs: int, rng: np.random.Generator) -> dict:
    """Slant identities on D at the fitted angle theta, for random X, Y in D.

    With D = TM these are the slant-submanifold identities; with D the slant
    part of a semi-slant splitting they are the projected versions.
    """
    p, q = J.params.p, J.params.q
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    out = dict.fromkeys(("tangent_gram", "normal_gram", "T_squared", "sigma_sum"), 0.0)
    for fr in frames:
        TD, B, maps = _restricted_T(J, fr, D)
        k = B.shape[1]
        I = np.eye(k)
        W = rng.standard_normal((k, 2 * dirs))
        W /= np.linalg.norm(W, axis=0)
        X, Y = B @ W[:, :dirs], B @ W[:, dirs:]  # tangent-frame coordinates
        PD = B @ B.T
        TX, TY = PD @ maps.T @ X, PD @ maps.T @ Y
        NX, NY = maps.N @ X, maps.N @ Y
        base = p * np.sum(X * TY, axis=0) + q * np.sum(X * Y, axis=0)
        out["tangent_gram"] = max(out["tangent_gram"], float(np.max(np.abs(np.sum(TX * TY, axis=0) - c2 * base))))
        out["normal_gram"] = max(out["normal_gram"], float(np.max(np.abs(np.sum(NX * NY, axis=0) - s2 * base))))
        out["T_squared"] = max(out["T_squared"], float(np.max(np.abs(TD @ TD - c2 * (p * TD + q * I)))))
        uxi = B.T @ (maps.t @ maps.N) @ B
        out["sigma_sum"] = max(out["sigma_sum"], float(np.max(np.abs(s2 * (p * TD + q * I) - uxi))))
    return out


SLANT_IDENTITIES = {
    "tangent_gram": "g(TX,TY) = cos^2(theta) [p g(X,TY) + q g(X,Y)]",
    "normal_gram": "g(NX,NY) = sin^2(theta) [p g(X,TY) + q g(X,Y)]",
    "T_squared": "T^2 = cos^2(theta) (pT + qI) on D",
    "sigma_sum": "sin^2(theta) (pT + qI) = sum u_a (x) xi_a on D",
}


def pythagoras_residuals(J: StructureOperator, frame: FrameData, X) -> tuple[float, float]:
    """(| ||TX||^2 + ||NX||^2 - ||JX||^2 |, | ||JX||^2 - p<JX,X> - q||X||^2 |)."""
    X = as_vector(X)
    M = structure_matrix(J, frame.position)
    JX = M @ X
    E, Nf = frame.tangent_onb, frame.normal_onb
    tx, nx = E.T @ JX, Nf.T @ JX
    jj = JX @ JX
    return abs(tx @ tx + nx @ nx - jj), abs(jj - J.params.p * (JX @ X) - J.params.q * (X @ X))


# --- semi-slant ------------------------------------------------------------

def semi_slant_check(J: StructureOperator, f: Immersion, D1: DistributionSpec, D2: DistributionSpec,
                     plan: SamplingPlan, frames: Sequence[FrameData] | None = None) -> VerificationReport:
    """D1 invariant, D2 slant with nonzero angle, D1 orthogonal to D2 and together spanning TM."""
    if frames is None:
        frames = sampled_frames(f, plan)
    tol = plan.tol
    rng = plan.rng(2)
    report = VerificationReport(scenario="semi_slant")
    ortho = 0.0
    for fr in frames:
        B1, B2 = D1.frame_basis(fr), D2.frame_basis(fr)
        if B1.shape[1] + B2.shape[1] != fr.chart_dim:
            raise ConfigError(f"{D1.name} and {D2.name} do not span the tangent space "
                              f"({B1.shape[1]} + {B2.shape[1]} != {fr.chart_dim})")
        ortho = max(ortho, float(np.max(np.abs(B1.T @ B2))))
    if ortho > 1e-6:
        raise ConfigError(f"{D1.name} and {D2.name} are not orthogonal (max |<e1,e2>| = {ortho:.3e})")
    report.add("semi_slant.orthogonal", "g(D1, D2) = 0", ortho, tol.algebraic, len(frames))

    inv = 0.0
    for fr in frames:
        maps = induced_maps(J, fr)
        B1 = D1.frame_basis(fr)
        W = rng.standard_normal((B1.shape[1], plan.dirs))
        W /= np.linalg.norm(W, axis=0)
        X = B1 @ W
        inv = max(inv, float(np.max(np.linalg.norm(maps.N @ X, axis=0))))
        # J(D1) must stay in D1, not only in TM
        TX = maps.T @ X
        inv = max(inv, float(np.max(np.linalg.norm(TX - B1 @ (B1.T @ TX), axis=0))))
    report.add("semi_slant.D1_invariant", "N P1 X = 0 and T(D1) in D1", inv, tol.algebraic, len(frames) * plan.dirs)

    ar = slant_test(J, f, D2, plan, frames=frames, stream=3)
    report.add("semi_slant.D2_slant", "theta(X) constant on D2", ar.max_deviation, tol.angle, len(ar.angles))
    # semi-slant requires theta != 0 on D2
    report.add("semi_slant.D2_nonzero_angle", "theta(D2) != 0", 1.0 if ar.classification is SlantClass.INVARIANT else 0.0,
               0.5, len(ar.angles))
    report.observe(f"angle.{D2.name}.theta", ar.mean)
    report.observe(f"angle.{D2.name}.cos_theta", ar.cos)
    report.observe(f"angle.{D2.name}.class", ar.classification.value)

    p, q = J.params.p, J.params.q
    c2, s2 = math.cos(ar.mean) ** 2, math.sin(ar.mean) ** 2
    r66 = r67 = r68 = 0.0
    for fr in frames:
        maps = induced_maps(J, fr)
        B2 = D2.frame_basis(fr)
        P2 = B2 @ B2.T
        W = rng.standard_normal((fr.chart_dim, 2 * plan.dirs))
        W /= np.linalg.norm(W, axis=0)
        X, Y = W[:, :plan.dirs], W[:, plan.dirs:]
        TP2X, TP2Y = maps.T @ P2 @ X, maps.T @ P2 @ Y
        base = p * np.sum(TP2X * (P2 @ Y), axis=0) + q * np.sum((P2 @ X) * (P2 @ Y), axis=0)
        r66 = max(r66, float(np.max(np.abs(np.sum(TP2X * TP2Y, axis=0) - c2 * base))))
        NX, NY = maps.N @ X, maps.N @ Y
        r67 = max(r67, float(np.max(np.abs(np.sum(NX * NY, axis=0) - s2 * base))))
        TD = B2.T @ maps.T @ B2
        r68 = max(r68, float(np.max(np.abs(TD @ TD - c2 * (p * TD + q * np.eye(TD.shape[0]))))))
    n = len(frames) * plan.dirs
    report.add("semi_slant.TP2_gram", "g(TP2X,TP2Y) = cos^2 [p g(TP2X,P2Y) + q g(P2X,P2Y)]", r66, tol.algebraic, n)
    report.add("semi_slant.N_gram", "g(NX,NY) = sin^2 [p g(TP2X,P2Y) + q g(P2X,P2Y)]", r67, tol.algebraic, n)
    report.add("semi_slant.TP2_squared", "(TP2)^2 = cos^2 (p TP2 + qI) on D2", r68, tol.algebraic, len(frames))
    return report


# --- relation between the J- and F-angles -----------------------------------

def pointwise_angle_relation(J: StructureOperator, F: StructureOperator, frame: FrameData, X,
                             tol: float = 1e-9):
    """lhs = ((2 sigma - p)^2 / 4) ||X||^2 sin^2 vartheta(X), rhs = (p<JX,X> + q||X||^2) sin^2 theta(X).

    Requires J to be the plus-branch structure of F.
    """
    par = J.params
    expected = (par.gap / 2.0) * F.matrix + (par.p / 2.0) * np.eye(F.dim)
    if np.max(np.abs(J.matrix - expected)) > tol:
        raise ConfigError("J is not the plus-branch metallic structure induced by F")
    X = as_vector(X)
    if np.linalg.norm(X) == 0.0:
        raise InputError("zero vector")
    E = frame.tangent_onb
    JX, FX = J.matrix @ X, F.matrix @ X
    cJ = np.linalg.norm(E.T @ JX) / np.linalg.norm(JX)
    cF = np.linalg.norm(E.T @ FX) / np.linalg.norm(FX)
    sin2_theta = 1.0 - min(cJ, 1.0) ** 2
    sin2_vartheta = 1.0 - min(cF, 1.0) ** 2
    xx = X @ X
    lhs = (par.gap ** 2 / 4.0) * xx * sin2_vartheta
    rhs = (par.p * (JX @ X) + par.q * xx) * sin2_theta
    return float(lhs), float(rhs), float(abs(lhs - rhs))


@dataclass(frozen=True)
class AngleRelation:
    predicted_sin_theta: float
    observed_sin_theta: float
    discrepancy: float

    def __iter__(self):
        return iter((self.predicted_sin_theta, self.observed_sin_theta, self.discrepancy))


def theorem_angle_relation(theta: float, vartheta: float, params: MetallicParams) -> AngleRelation:
    """Compare sin(theta) with ((2 sigma - p) / (2 sigma)) sin(vartheta).

    This is reported, never asserted: the closed form relies on F mapping
    tangent vectors to tangent vectors, which fails on general submanifolds.
    """
    predicted = params.gap / (2.0 * params.sigma) * math.sin(vartheta)
    observed = math.sin(theta)
    return AngleRelation(predicted, observed, abs(predicted - observed))
