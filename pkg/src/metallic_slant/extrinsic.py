"""Second fundamental form, shape operators, normal connection and the
covariant-derivative / bracket / integrability criteria of a submanifold in
flat space carrying a (possibly non-parallel) structure operator.

Immersion derivatives are exact (dual numbers).  Fields that only exist
numerically (TY, NY, the normal frame, ...) are differentiated by central
differences over a stencil of frames around the base point, with step
``1e-5 * box width`` per chart coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fields import ChartVectorField, chart_bracket
from .immersion import FrameData, Immersion, TangentVector, frame_at
from .induced import StructureLike, structure_matrix
from .report import VerificationReport
from .sampling import SamplingPlan, sample_points
from .slant import DistributionSpec

FD_REL_STEP = 1e-5

__all__ = [
    "ChartVectorField", "NormalField", "LocalPatch", "ExtrinsicData", "extrinsic_at",
    "induced_connection", "covariant_T", "covariant_N", "covariant_t", "covariant_n",
    "verify_derivative_props", "verify_bracket_props", "verify_connection",
    "integrability_checks", "bracket_integrability", "mixed_geodesic_check",
]


class NormalField:
    """V = sum_alpha v^alpha(x) N_alpha(x) over the deterministic normal frame."""

    def __init__(self, coefficients: Callable, label: str = ""):
        self.coefficients = coefficients
        self.label = label

    def at(self, frame: FrameData) -> np.ndarray:
        return frame.normal_onb @ np.asarray(self.coefficients(frame.point), dtype=float)

    @classmethod
    def frame_vector(cls, alpha: int, r: int) -> "NormalField":
        e = np.zeros(r)
        e[alpha] = 1.0
        return cls(lambda x: e, label=f"N{alpha}")

    @classmethod
    def affine(cls, a, B, x0) -> "NormalField":
        a, B, x0 = (np.asarray(v, dtype=float) for v in (a, B, x0))
        return cls(lambda x: a + B @ (x - x0), label="affine")


class LocalPatch:
    """Frames at a chart point and at its central-difference stencil.

    Every derivative of a numerically defined field at ``center`` is taken
    over this stencil, so all checks at one point share one set of frames.
    """

    def __init__(self, f: Immersion, x, J: StructureLike | None = None, step=None):
        self.f = f
        self.J = J
        self.center = frame_at(f, x)
        x = self.center.point
        m1 = f.chart_dim
        self.step = np.broadcast_to(FD_REL_STEP * f.box_widths() if step is None else np.asarray(step, float), (m1,))
        self.plus, self.minus = [], []
        for i in range(m1):
            e = np.zeros(m1)
            e[i] = self.step[i]
            self.plus.append(frame_at(f, x + e))
            self.minus.append(frame_at(f, x - e))
        c = self.center
        self.hess = f.hessian(x)  # (m', m', m)
        self.PT = c.tangent_projector()
        self.PN = c.normal_projector()
        # chart components of the orthonormal tangent frame vectors
        self.Cinv = np.linalg.inv(c.r_factor)
        hN = np.einsum("ijm,ma->ija", self.hess, c.normal_onb)  # h(d_i, d_j) in normal-frame coordinates
        self.h_coord = hN
        self.h_frame = np.einsum("ik,jl,ija->kla", self.Cinv, self.Cinv, hN)
        self.Jc = None if J is None else structure_matrix(J, c.position)
        self._dN = None

    # -- generic differentiation -------------------------------------------

    def partials(self, fn: Callable[[FrameData], np.ndarray]) -> np.ndarray:
        """d fn / d u_i at the center; the chart index is the last axis."""
        cols = [(np.asarray(fn(p)) - np.asarray(fn(m))) / (2.0 * h)
                for p, m, h in zip(self.plus, self.minus, self.step)]
        return np.stack(cols, axis=-1)

    def along(self, fn, Xc) -> np.ndarray:
        """Directional derivative of fn along the chart vector Xc."""
        return self.partials(fn) @ Xc

    def Jm(self, frame: FrameData) -> np.ndarray:
        return structure_matrix(self.J, frame.position)

    # -- tangent fields ----------------------------------------------------

    def comps(self, X: ChartVectorField) -> np.ndarray:
        return X.components(self.center.point)

    def vec(self, X: ChartVectorField, frame: FrameData | None = None) -> np.ndarray:
        frame = self.center if frame is None else frame
        return frame.jacobian @ X.components(frame.point)

    def ambient_derivative(self, X: ChartVectorField, Y: ChartVectorField) -> np.ndarray:
        """D_X Y of the pushed-forward field: Hessian term plus field-derivative term."""
        Xc, Yc = self.comps(X), self.comps(Y)
        return np.einsum("i,j,ijm->m", Xc, Yc, self.hess) + self.center.jacobian @ (Y.derivative(self.center.point) @ Xc)

    def connection(self, X, Y) -> np.ndarray:
        return self.PT @ self.ambient_derivative(X, Y)

    # -- pointwise tensors -------------------------------------------------

    def h(self, a, b) -> np.ndarray:
        """Second fundamental form of two ambient tangent vectors, as an ambient normal vector."""
        ca, cb = self.center.ambient_to_chart(a), self.center.ambient_to_chart(b)
        return self.center.normal_onb @ np.einsum("i,j,ija->a", ca, cb, self.h_coord)

    def shape(self, V, a) -> np.ndarray:
        """A_V a with g(A_V X, Y) = g(h(X, Y), V)."""
        c = self.center
        HV = np.einsum("kla,a->kl", self.h_frame, c.normal_onb.T @ V)
        return c.tangent_onb @ (HV @ (c.tangent_onb.T @ a))

    def shape_alpha(self) -> np.ndarray:
        """A_alpha in tangent-frame coordinates, shape (r, m', m')."""
        return np.moveaxis(self.h_frame, 2, 0)

    def T(self, v):
        return self.PT @ (self.Jc @ v)

    def N(self, v):
        return self.PN @ (self.Jc @ v)

    t = T
    n = N

    # -- normal frame derivatives ------------------------------------------

    def dN(self) -> np.ndarray:
        """d N_alpha / d u_i as (m, r, m')."""
        if self._dN is None:
            self._dN = self.partials(lambda fr: fr.normal_onb)
        return self._dN

    def normal_connection_forms(self) -> np.ndarray:
        """l[alpha, beta, i] = <d_i N_alpha, N_beta>."""
        return np.einsum("mai,mb->abi", self.dN(), self.center.normal_onb)

    def weingarten_shape(self) -> np.ndarray:
        """A_alpha from -(D_X N_alpha)^T, in tangent-frame coordinates (r, m', m')."""
        c = self.center
        # column l: -(d N_alpha along E_l)^T expressed in the tangent frame
        dN_E = np.einsum("mai,il->mal", self.dN(), self.Cinv)
        return -np.einsum("mk,mal->akl", c.tangent_onb, dN_E)

    # -- fields built from the structure -----------------------------------

    def _tangent_field(self, fn):
        return self.PT @ fn

    def nabla_TY(self, X, Y):
        return self.PT @ self.along(lambda fr: fr.tangent_projector() @ (self.Jm(fr) @ self.vec(Y, fr)), self.comps(X))

    def nabla_perp_NY(self, X, Y):
        return self.PN @ self.along(lambda fr: fr.normal_projector() @ (self.Jm(fr) @ self.vec(Y, fr)), self.comps(X))

    def nabla_perp(self, X, V: NormalField):
        return self.PN @ self.along(V.at, self.comps(X))

    def nabla_tV(self, X, V: NormalField):
        return self.PT @ self.along(lambda fr: fr.tangent_projector() @ (self.Jm(fr) @ V.at(fr)), self.comps(X))

    def nabla_perp_nV(self, X, V: NormalField):
        return self.PN @ self.along(lambda fr: fr.normal_projector() @ (self.Jm(fr) @ V.at(fr)), self.comps(X))

    def cov_T(self, X, Y):
        return self.nabla_TY(X, Y) - self.T(self.connection(X, Y))

    def cov_N(self, X, Y):
        return self.nabla_perp_NY(X, Y) - self.N(self.connection(X, Y))

    def cov_t(self, X, V):
        return self.nabla_tV(X, V) - self.t(self.nabla_perp(X, V))

    def cov_n(self, X, V):
        return self.nabla_perp_nV(X, V) - self.n(self.nabla_perp(X, V))

    def u(self, v) -> np.ndarray:
        """u_alpha(v) = <J v, N_alpha> for all alpha."""
        return self.center.normal_onb.T @ (self.Jc @ v)

    def xi(self) -> np.ndarray:
        """xi_alpha = t N_alpha as ambient columns."""
        return self.PT @ self.Jc @ self.center.normal_onb

    def a(self) -> np.ndarray:
        """a[alpha, beta] = <J N_alpha, N_beta>."""
        Nf = self.center.normal_onb
        return (self.Jc @ Nf).T @ Nf

    def nabla_u(self, X, Y) -> np.ndarray:
        """(nabla_X u_alpha) Y = X(u_alpha(Y)) - u_alpha(nabla_X Y), all alpha."""
        Xu = self.along(lambda fr: fr.normal_onb.T @ (self.Jm(fr) @ self.vec(Y, fr)), self.comps(X))
        return Xu - self.u(self.connection(X, Y))

    def X_of_uY(self, X, Y) -> np.ndarray:
        return self.along(lambda fr: fr.normal_onb.T @ (self.Jm(fr) @ self.vec(Y, fr)), self.comps(X))

    def bracket(self, X, Y) -> np.ndarray:
        return self.center.jacobian @ chart_bracket(X, Y, self.center.point)

    def J_derivative(self, X) -> np.ndarray:
        """(D_X J) along the submanifold; zero for a parallel structure."""
        return self.along(lambda fr: self.Jm(fr), self.comps(X))


@dataclass(frozen=True)
class ExtrinsicData:
    """h[i, j, alpha] = <h(d_i, d_j), N_alpha>; A[alpha] in the tangent frame;
    l[alpha, beta, i] = l_alpha_beta(d_i); A_weingarten from the normal-frame derivative."""

    point: np.ndarray
    h: np.ndarray
    A: np.ndarray
    l: np.ndarray
    A_weingarten: np.ndarray


def extrinsic_at(f: Immersion, x, step=None, patch: LocalPatch | None = None) -> ExtrinsicData:
    P = LocalPatch(f, x, step=step) if patch is None else patch
    return ExtrinsicData(P.center.point, P.h_coord, P.shape_alpha(), P.normal_connection_forms(), P.weingarten_shape())


def extrinsic_residuals(E: ExtrinsicData) -> dict:
    return {
        "h_symmetric": float(np.max(np.abs(E.h - np.swapaxes(E.h, 0, 1)), initial=0.0)),
        "shape_duality": float(np.max(np.abs(E.A - E.A_weingarten), initial=0.0)),
        "l_antisymmetric": float(np.max(np.abs(E.l + np.swapaxes(E.l, 0, 1)), initial=0.0)),
    }


def induced_connection(f: Immersion, x, X: ChartVectorField, Y: ChartVectorField) -> TangentVector:
    P = LocalPatch(f, x)
    return TangentVector(P.connection(X, Y), P.center.point)


def covariant_T(f, J, x, X, Y) -> TangentVector:
    """(nabla_X T) Y = nabla_X (TY) - T(nabla_X Y)."""
    P = LocalPatch(f, x, J)
    return TangentVector(P.cov_T(X, Y), P.center.point)


def covariant_N(f, J, x, X, Y) -> np.ndarray:
    """(nabla-bar_X N) Y = nabla-perp_X (NY) - N(nabla_X Y), a normal vector."""
    return LocalPatch(f, x, J).cov_N(X, Y)


def covariant_t(f, J, x, X, V: NormalField) -> TangentVector:
    P = LocalPatch(f, x, J)
    return TangentVector(P.cov_t(X, V), P.center.point)


def covariant_n(f, J, x, X, V: NormalField) -> np.ndarray:
    return LocalPatch(f, x, J).cov_n(X, V)


# --- random fields for sampled checks ----------------------------------------

def random_field(rng, dim, x0, scale=0.5, coords=None) -> ChartVectorField:
    """Affine chart field; with ``coords`` it is a section of that coordinate distribution."""
    a = rng.standard_normal(dim)
    B = scale * rng.standard_normal((dim, dim))
    if coords is not None:
        mask = np.zeros(dim)
        mask[list(coords)] = 1.0
        a, B = a * mask, B * mask[:, None]
    return ChartVectorField.affine(a, B, x0)


def random_section(rng, f: Immersion, D: DistributionSpec, x0, scale=0.5) -> ChartVectorField:
    """sum_k phi_k(x) S_k with S_k the spanning fields of D and phi_k affine."""
    if D.coords is not None:
        return random_field(rng, f.chart_dim, x0, scale, D.coords)
    fields = D.spanning_fields(f)
    k = len(fields)
    a = rng.standard_normal(k)
    B = scale * rng.standard_normal((k, f.chart_dim))

    def comps(x):
        phi = a + B @ (x - x0)
        return sum(p * F.components(x) for p, F in zip(phi, fields))

    def deriv(x):
        phi = a + B @ (x - x0)
        out = np.zeros((f.chart_dim, f.chart_dim))
        for p, b, F in zip(phi, B, fields):
            out += np.outer(F.components(x), b) + p * F.derivative(x)
        return out

    return ChartVectorField(f.chart_dim, comps, deriv, label=f"section of {D.name}")


def random_normal_field(rng, r, x0, dim, scale=0.5) -> NormalField:
    return NormalField.affine(rng.standard_normal(r), scale * rng.standard_normal((r, dim)), x0)


def _points(f, plan, count=None, stream=10):
    return sample_points(f.chart_box, plan.count if count is None else count, plan.rng(stream))


def _field_pairs(rng, f, x0, n_random):
    m1 = f.chart_dim
    pairs = []
    coords = [ChartVectorField.coordinate(i, m1) for i in range(m1)]
    for i in range(m1):
        for j in range(i + 1, m1):
            pairs.append((coords[i], coords[j]))
    for _ in range(n_random):
        pairs.append((random_field(rng, m1, x0), random_field(rng, m1, x0)))
    return pairs


def _nrm(v):
    return float(np.linalg.norm(v))


# --- verification suites -----------------------------------------------------

def verify_connection(f: Immersion, plan: SamplingPlan, count: int | None = None, n_fields: int = 2) -> VerificationReport:
    """Second fundamental form, shape operator, normal connection and induced connection checks."""
    tol = plan.tol.fd
    rng = plan.rng(11)
    worst = dict.fromkeys(("h_symmetric", "shape_duality", "l_antisymmetric", "gauss_h", "metric_compat", "torsion"), 0.0)
    pts = _points(f, plan, count)
    for x in pts:
        P = LocalPatch(f, x)
        for k, v in extrinsic_residuals(extrinsic_at(f, x, patch=P)).items():
            worst[k] = max(worst[k], v)
        for _ in range(n_fields):
            X, Y, Z = (random_field(rng, f.chart_dim, x) for _ in range(3))
            # tensorial h against the normal part of D_X Y
            worst["gauss_h"] = max(worst["gauss_h"], _nrm(P.PN @ P.ambient_derivative(X, Y) - P.h(P.vec(X), P.vec(Y))))
            lhs = P.along(lambda fr: P.vec(Y, fr) @ P.vec(Z, fr), P.comps(X))
            rhs = P.connection(X, Y) @ P.vec(Z) + P.vec(Y) @ P.connection(X, Z)
            worst["metric_compat"] = max(worst["metric_compat"], abs(float(lhs - rhs)))
            tors = P.connection(X, Y) - P.connection(Y, X) - P.bracket(X, Y)
            worst["torsion"] = max(worst["torsion"], _nrm(tors))
    rep = VerificationReport(scenario="connection")
    n = len(pts)
    rep.add("extrinsic.h_symmetric", "h(X,Y) = h(Y,X)", worst["h_symmetric"], plan.tol.algebraic, n)
    rep.add("extrinsic.shape_duality", "g(A_a X, Y) = h_a(X,Y), A_a from -(D N_a)^T", worst["shape_duality"], tol, n)
    rep.add("extrinsic.l_antisymmetric", "l_ab = -l_ba", worst["l_antisymmetric"], tol, n)
    rep.add("extrinsic.gauss_normal_part", "(D_X Y)^perp = h(X,Y)", worst["gauss_h"], tol, n * n_fields)
    rep.add("connection.metric_compatible", "X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla_X Z)", worst["metric_compat"], tol, n * n_fields)
    rep.add("connection.torsion_free", "nabla_X Y - nabla_Y X = [X,Y]", worst["torsion"], tol, n * n_fields)
    return rep


DERIVATIVE_IDENTITIES = {
    "J_parallel": "nabla-bar J = 0 along M",
    "nablaJ_symmetric": "g((nabla-bar_X J)Y, Z) = g(Y, (nabla-bar_X J)Z)",
    "nablaT_symmetric": "g((nabla_X T)Y, Z) = g(Y, (nabla_X T)Z)",
    "nablaT": "(nabla_X T)Y = A_{NY}X + t h(X,Y)",
    "nablaN": "(nabla-bar_X N)Y = n h(X,Y) - h(X,TY)",
    "nabla_t": "(nabla_X t)V = A_{nV}X - T A_V X",
    "nabla_n": "(nabla-bar_X n)V = -h(X,tV) - N A_V X",
    "nablaT_sigma": "(nabla_X T)Y = sum h_a(X,Y) xi_a + sum u_a(Y) A_a X",
    "nabla_u": "(nabla_X u_a)Y = -h_a(X,TY) + sum_b [u_b(Y) l_ab(X) + h_b(X,Y) a_ba]",
}


def _derivative_residuals(P: LocalPatch, X, Y, Z, V: NormalField) -> dict:
    c = P.center
    Xa, Ya, Za = P.vec(X), P.vec(Y), P.vec(Z)
    Vc = V.at(c)
    hXY = P.h(Xa, Ya)
    covT = P.cov_T(X, Y)
    out = {}
    DJ = P.J_derivative(X)
    out["J_parallel"] = float(np.max(np.abs(DJ)))
    out["nablaJ_symmetric"] = abs(float((DJ @ Ya) @ Za - Ya @ (DJ @ Za)))
    out["nablaT_symmetric"] = abs(float(covT @ Za - Ya @ P.cov_T(X, Z)))
    out["nablaT"] = _nrm(covT - (P.shape(P.N(Ya), Xa) + P.t(hXY)))
    out["nablaN"] = _nrm(P.cov_N(X, Y) - (P.n(hXY) - P.h(Xa, P.T(Ya))))
    out["nabla_t"] = _nrm(P.cov_t(X, V) - (P.shape(P.n(Vc), Xa) - P.T(P.shape(Vc, Xa))))
    out["nabla_n"] = _nrm(P.cov_n(X, V) - (-P.h(Xa, P.t(Vc)) - P.N(P.shape(Vc, Xa))))
    Nf = c.normal_onb
    h_alpha = Nf.T @ hXY
    uY = P.u(Ya)
    xi = P.xi()
    rhs41 = xi @ h_alpha + sum(uY[al] * P.shape(Nf[:, al], Xa) for al in range(Nf.shape[1]))
    out["nablaT_sigma"] = _nrm(covT - rhs41)
    l = np.einsum("abi,i->ab", P.normal_connection_forms(), P.comps(X))
    a = P.a()
    h_alpha_XTY = Nf.T @ P.h(Xa, P.T(Ya))
    rhs42 = -h_alpha_XTY + l @ uY + a.T @ h_alpha
    out["nabla_u"] = _nrm(P.nabla_u(X, Y) - rhs42)
    return out


def verify_derivative_props(f: Immersion, J: StructureLike, plan: SamplingPlan, count: int | None = None,
                            n_fields: int = 2) -> VerificationReport:
    """Covariant derivatives of T, N, t, n and u_alpha against their shape-operator forms."""
    rng = plan.rng(12)
    worst = dict.fromkeys(DERIVATIVE_IDENTITIES, 0.0)
    pts = _points(f, plan, count)
    samples = 0
    for x in pts:
        P = LocalPatch(f, x, J)
        r = P.center.codim
        for X, Y in _field_pairs(rng, f, x, n_fields):
            Z = random_field(rng, f.chart_dim, x)
            V = random_normal_field(rng, r, x, f.chart_dim)
            for k, v in _derivative_residuals(P, X, Y, Z, V).items():
                worst[k] = max(worst[k], v)
            samples += 1
    rep = VerificationReport(scenario="derivatives")
    for k, ident in DERIVATIVE_IDENTITIES.items():
        rep.add(f"derivative.{k}", ident, worst[k], plan.tol.fd, samples)
    return rep


BRACKET_IDENTITIES = {
    "T_bracket": "T[X,Y] = nabla_X TY - nabla_Y TX - A_{NY}X + A_{NX}Y",
    "N_bracket": "N[X,Y] = h(X,TY) - h(TX,Y) + nabla-perp_X NY - nabla-perp_Y NX",
    "T_bracket_sigma": "T[X,Y] = nabla_X TY - nabla_Y TX - sum [u_a(Y) A_a X - u_a(X) A_a Y]",
    "N_bracket_u": "u_a([X,Y]) = (nabla_Y u_a)X - (nabla_X u_a)Y + X(u_a(Y)) - Y(u_a(X))",
}


def _bracket_residuals(P: LocalPatch, X, Y) -> tuple[dict, float]:
    Xa, Ya = P.vec(X), P.vec(Y)
    brk = P.bracket(X, Y)
    TXY = P.nabla_TY(X, Y) - P.nabla_TY(Y, X)
    out = {}
    out["T_bracket"] = _nrm(P.T(brk) - (TXY - P.shape(P.N(Ya), Xa) + P.shape(P.N(Xa), Ya)))
    out["N_bracket"] = _nrm(P.N(brk) - (P.h(Xa, P.T(Ya)) - P.h(P.T(Xa), Ya)
                                         + P.nabla_perp_NY(X, Y) - P.nabla_perp_NY(Y, X)))
    Nf = P.center.normal_onb
    uX, uY = P.u(Xa), P.u(Ya)
    sig = sum(uY[al] * P.shape(Nf[:, al], Xa) - uX[al] * P.shape(Nf[:, al], Ya) for al in range(Nf.shape[1]))
    out["T_bracket_sigma"] = _nrm(P.T(brk) - (TXY - sig))
    nuYX, nuXY = P.nabla_u(Y, X), P.nabla_u(X, Y)
    XuY, YuX = P.X_of_uY(X, Y), P.X_of_uY(Y, X)
    out["N_bracket_u"] = _nrm(P.u(brk) - (nuYX - nuXY + XuY - YuX))
    # the form without the X(u(Y)) - Y(u(X)) terms but with normal-connection terms
    l = P.normal_connection_forms()
    lX = np.einsum("abi,i->ab", l, P.comps(X))
    lY = np.einsum("abi,i->ab", l, P.comps(Y))
    literal = nuYX - nuXY + (lY.T @ uX - lX.T @ uY)
    return out, _nrm(P.u(brk) - literal)


def verify_bracket_props(f: Immersion, J: StructureLike, plan: SamplingPlan, count: int | None = None,
                         n_fields: int = 2) -> VerificationReport:
    """Tangential and normal parts of [X, Y] in terms of T, N, h, A and u_alpha."""
    rng = plan.rng(13)
    worst = dict.fromkeys(BRACKET_IDENTITIES, 0.0)
    literal_worst = 0.0
    samples = 0
    for x in _points(f, plan, count):
        P = LocalPatch(f, x, J)
        for X, Y in _field_pairs(rng, f, x, n_fields):
            res, lit = _bracket_residuals(P, X, Y)
            for k, v in res.items():
                worst[k] = max(worst[k], v)
            literal_worst = max(literal_worst, lit)
            samples += 1
    rep = VerificationReport(scenario="brackets")
    for k, ident in BRACKET_IDENTITIES.items():
        rep.add(f"bracket.{k}", ident, worst[k], plan.tol.fd, samples)
    rep.observe("bracket.N_bracket_connection_form_residual", literal_worst)
    return rep


def bracket_integrability(f: Immersion, D: DistributionSpec, plan: SamplingPlan, count: int | None = None,
                          n_pairs: int = 3, stream: int = 14) -> float:
    """max ||(I - P_D)[X, Y]|| over random sections X, Y of D; zero iff D is closed under brackets."""
    rng = plan.rng(stream)
    worst = 0.0
    for x in _points(f, plan, count):
        fr = frame_at(f, x)
        Q = D.ambient_basis(fr)
        for _ in range(n_pairs):
            X, Y = random_section(rng, f, D, x), random_section(rng, f, D, x)
            b = fr.jacobian @ chart_bracket(X, Y, x)
            worst = max(worst, _nrm(b - Q @ (Q.T @ b)))
    return worst


def integrability_checks(f: Immersion, J: StructureLike, D1: DistributionSpec, D2: DistributionSpec,
                         plan: SamplingPlan, count: int | None = None, n_pairs: int = 2) -> VerificationReport:
    """Integrability criteria for the invariant part D1 and the slant part D2, cross-checked
    against a direct bracket test.

    Criterion residuals measure how far each side-by-side identity is from
    holding; the ``*_consistency`` checks confirm that each criterion agrees
    with the bracket it is supposed to characterize.
    """
    tol = plan.tol.fd
    rng = plan.rng(15)
    w = dict.fromkeys(("u_sym", "u_consistency", "h_T_sym", "JA_commute", "P1_T", "P1_T_sigma",
                       "d2_consistency", "nablaT"), 0.0)
    pts = _points(f, plan, count)
    for x in pts:
        P = LocalPatch(f, x, J)
        c = P.center
        Q1, Q2 = D1.ambient_basis(c), D2.ambient_basis(c)
        P1 = Q1 @ Q1.T
        Nf = c.normal_onb
        for _ in range(n_pairs):
            X, Y = random_section(rng, f, D1, x), random_section(rng, f, D1, x)
            lhs = P.nabla_u(Y, X) - P.nabla_u(X, Y)
            w["u_sym"] = max(w["u_sym"], _nrm(lhs))
            w["u_consistency"] = max(w["u_consistency"], _nrm(lhs - P.u(P.bracket(X, Y))))
            Xa, Ya = P.vec(X), P.vec(Y)
            w["h_T_sym"] = max(w["h_T_sym"], _nrm(P.h(Xa, P.T(Ya)) - P.h(P.T(Xa), Ya)))
            V = Nf @ rng.standard_normal(Nf.shape[1])
            comm = P.Jc @ P.shape(V, Xa) - P.shape(V, P.Jc @ Xa)
            w["JA_commute"] = max(w["JA_commute"], _nrm(P1 @ comm))

            X2, Y2 = random_section(rng, f, D2, x), random_section(rng, f, D2, x)
            X2a, Y2a = P.vec(X2), P.vec(Y2)
            lhs82 = P1 @ (P.nabla_TY(X2, Y2) - P.nabla_TY(Y2, X2))
            rhs82 = P1 @ (P.shape(P.N(Y2a), X2a) - P.shape(P.N(X2a), Y2a))
            w["P1_T"] = max(w["P1_T"], _nrm(lhs82 - rhs82))
            uX, uY = P.u(X2a), P.u(Y2a)
            rhs79 = sum(uY[al] * (P1 @ P.shape(Nf[:, al], X2a)) - uX[al] * (P1 @ P.shape(Nf[:, al], Y2a))
                        for al in range(Nf.shape[1]))
            w["P1_T_sigma"] = max(w["P1_T_sigma"], _nrm(lhs82 - rhs79))
            # lhs - rhs must equal P1 T [X, Y]
            w["d2_consistency"] = max(w["d2_consistency"], _nrm((lhs82 - rhs82) - P1 @ P.T(P.bracket(X2, Y2))))
            Z = random_field(rng, f.chart_dim, x)
            w["nablaT"] = max(w["nablaT"], _nrm(P.cov_T(Z, random_field(rng, f.chart_dim, x))))
    n = len(pts) * n_pairs
    b1 = bracket_integrability(f, D1, plan, count, stream=16)
    b2 = bracket_integrability(f, D2, plan, count, stream=17)
    rep = VerificationReport(scenario="integrability")
    rep.add(f"integrability.{D1.name}.u_symmetric", "(nabla_Y u_a)X = (nabla_X u_a)Y on D1", w["u_sym"], tol, n)
    rep.add(f"integrability.{D1.name}.u_consistency", "(nabla_Y u_a)X - (nabla_X u_a)Y = u_a([X,Y]) on D1", w["u_consistency"], tol, n)
    rep.add(f"integrability.{D1.name}.h_T_symmetric", "h(X,TY) = h(TX,Y) on D1", w["h_T_sym"], tol, n)
    rep.add(f"integrability.{D1.name}.JA_commute", "P1(J A_V X - A_V J X) = 0 on D1", w["JA_commute"], tol, n)
    rep.add(f"integrability.{D1.name}.bracket", "[D1, D1] in D1", b1, tol, len(pts))
    rep.add(f"integrability.{D2.name}.P1_T", "P1(nabla_X TY - nabla_Y TX) = P1(A_{NY}X - A_{NX}Y) on D2", w["P1_T"], tol, n)
    rep.add(f"integrability.{D2.name}.P1_T_sigma", "P1(nabla_X TY - nabla_Y TX) = sum [u_a(Y) P1 A_a X - u_a(X) P1 A_a Y] on D2",
            w["P1_T_sigma"], tol, n)
    rep.add(f"integrability.{D2.name}.consistency", "criterion defect = P1 T[X,Y]", w["d2_consistency"], tol, n)
    rep.add(f"integrability.{D2.name}.bracket", "[D2, D2] in D2", b2, tol, len(pts))
    rep.observe("integrability.max_nablaT", w["nablaT"])
    # parallel T forces both distributions to be integrable
    if w["nablaT"] < tol:
        rep.add("integrability.parallel_T_implies_integrable", "nabla T = 0 => [D_i, D_i] in D_i", max(b1, b2), tol, len(pts))
    return rep


def mixed_geodesic_check(f: Immersion, J: StructureLike, D1: DistributionSpec, D2: DistributionSpec,
                         plan: SamplingPlan, count: int | None = None, n_pairs: int = 2,
                         h_zero_tol: float = 1e-9) -> VerificationReport:
    """Mixed second fundamental form h(D1, D2), (nabla-bar N) on mixed pairs, and the
    shape-operator characterization of parallel N."""
    tol = plan.tol.fd
    rng = plan.rng(18)
    h_mixed = dN_mixed = dN_all = r88 = r89 = 0.0
    pts = _points(f, plan, count)
    for x in pts:
        P = LocalPatch(f, x, J)
        c = P.center
        Nf = c.normal_onb
        for _ in range(n_pairs):
            X, Y = random_section(rng, f, D1, x), random_section(rng, f, D2, x)
            Xa, Ya = P.vec(X), P.vec(Y)
            Xu, Yu = Xa / _nrm(Xa), Ya / _nrm(Ya)
            h_mixed = max(h_mixed, _nrm(P.h(Xu, Yu)))
            dN_mixed = max(dN_mixed, _nrm(P.cov_N(X, Y)) / (_nrm(Xa) * _nrm(Ya)))
            Z, W = random_field(rng, f.chart_dim, x), random_field(rng, f.chart_dim, x)
            Za, Wa = P.vec(Z), P.vec(W)
            covN = P.cov_N(Z, W)
            dN_all = max(dN_all, _nrm(covN))
            for al in range(Nf.shape[1]):
                V = Nf[:, al]
                lhs = covN @ V
                r89 = max(r89, abs(float(lhs - (P.shape(P.n(V), Za) - P.T(P.shape(V, Za))) @ Wa)),
                          abs(float(lhs - (P.shape(P.n(V), Wa) - P.shape(V, P.T(Wa))) @ Za)))
                r88 = max(r88, _nrm(P.shape(P.n(V), Za) - P.T(P.shape(V, Za))),
                          _nrm(P.T(P.shape(V, Za)) - P.shape(V, P.T(Za))))
    n = len(pts) * n_pairs
    rep = VerificationReport(scenario="mixed_geodesic")
    rep.observe("mixed.max_h", h_mixed)
    rep.observe("mixed.max_nablaN", dN_mixed)
    rep.observe("mixed.shape_commutation_residual", r88)
    rep.observe("mixed.max_nablaN_all", dN_all)
    mixed_geodesic = h_mixed < h_zero_tol
    rep.observe("mixed.totally_geodesic", mixed_geodesic)
    rep.add("mixed.nablaN_shape_form", "g((nabla-bar_X N)Y, V) = g(A_{nV}X - T A_V X, Y) = g(A_{nV}Y - A_V TY, X)",
            r89, tol, n * Nf.shape[1])
    # mixed totally geodesic => (nabla-bar N) vanishes on mixed pairs
    rep.add("mixed.geodesic_implies_N_parallel", "h(D1,D2) = 0 => (nabla-bar_X N)Y = 0",
            dN_mixed if mixed_geodesic else 0.0, tol, n)
    # N parallel everywhere <=> A_{nV} = T A_V = A_V T
    agree = (dN_all < tol) == (r88 < tol)
    rep.add("mixed.N_parallel_iff_shape", "nabla-bar N = 0 <=> A_{nV}X = T A_V X = A_V T X",
            0.0 if agree else 1.0, 0.5, n)
    return rep
