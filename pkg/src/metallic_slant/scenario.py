"""Scenarios: an immersion, a structure, named distributions and the checks to run.

A scenario is plain data and round-trips through JSON.  Expressions are
strings in the expression-engine syntax.  ``run_suite`` executes the requested
checks in a fixed order and returns one aggregated report.

JSON layout::

    {
      "name": "example1",
      "params": {"p": 1, "q": 1},
      "structure": {"diagonal": ["sigma", "sigma_bar", ...]}
                 | {"matrix": [[1.0, "x1", ...], ...]}        # entries may use x1..xm
                 | {"product": [[...], ...], "branch": "plus"},
      "immersion": {"variables": ["u", "t1"], "components": ["u*cos(t1)", ...],
                    "chart_box": [[0.5, 3.0], [0.0, 1.56]]},
      "distributions": [{"name": "D1", "coords": [1, 2]},
                        {"name": "D2", "fields": [["1", "0", "0"]]}],
      "semi_slant": ["D1", "D2"],
      "checks": ["structure", "frame", "sigma", ...],
      "sampling": {"seed": 20240101, "count": 100, "dirs": 20, "extrinsic_count": 50,
                   "tolerances": {"algebraic": 1e-9, "fd": 1e-6, "angle": 1e-6}},
      "expected": {"abs_cos_theta": {"D2": "(phi + 2*phi_bar)/sqrt(...)"},
                   "induced_metric": [["2", "0"], ["0", "u^2 + 1"]]}
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
import numpy as np

from . import __version__
from .errors import ConfigError, MetallicError
from .expr import eval_value, free_variables, parse
from .extrinsic import (integrability_checks, mixed_geodesic_check, verify_bracket_props,
                        verify_connection, verify_derivative_props)
from .fields import ChartVectorField
from .immersion import Immersion
from .induced import StructureField, sigma_structure, symmetry_residuals, induced_maps, verify_theorem1
from .metallic import (Branch, Kind, MetallicParams, StructureOperator, metallic_from_product, metallic_number,
                       products_from_metallic, validate_structure)
from .report import VerificationReport
from .sampling import SamplingPlan, Tolerances
from .slant import (SLANT_IDENTITIES, DistributionSpec, SlantClass, pointwise_angle_relation, sampled_frames,
                    semi_slant_check, slant_distribution_lambda, slant_identity_residuals, slant_test,
                    theorem_angle_relation, whole_tangent)

# execution order; unknown names are a configuration error
CHECK_ORDER = ("structure", "frame", "sigma", "slant", "semi_slant", "angle_relation",
               "connection", "derivatives", "brackets", "integrability", "mixed_geodesic")
DEFAULT_EXTRINSIC_COUNT = 50
POINTWISE_VECTORS = 200


@dataclass
class Scenario:
    name: str
    params: MetallicParams
    structure: dict
    immersion: Immersion
    distributions: list = field(default_factory=list)  # of DistributionSpec
    semi_slant: tuple | None = None
    checks: tuple = CHECK_ORDER
    plan: SamplingPlan = SamplingPlan()
    extrinsic_count: int = DEFAULT_EXTRINSIC_COUNT
    expected: dict = field(default_factory=dict)
    source: dict | None = None  # the JSON-like description this scenario came from

    @property
    def ambient_dim(self) -> int:
        return self.immersion.ambient_dim

    def distribution(self, name: str) -> DistributionSpec:
        for d in self.distributions:
            if d.name == name:
                return d
        raise ConfigError(f"unknown distribution {name!r}")

    def with_plan(self, **kw) -> "Scenario":
        out = Scenario(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        out.plan = self.plan.with_(**kw)
        return out

    def build_structure(self):
        """The structure as a StructureOperator, or a StructureField when it depends on position."""
        return _build_structure(self.structure, self.params, self.ambient_dim)


# --- construction from data ---------------------------------------------------

def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}: missing key {key!r}")
    return d[key]


def _build_structure(spec: dict, params: MetallicParams, m: int):
    if not isinstance(spec, dict):
        raise ConfigError("structure must be an object")
    keys = [k for k in ("diagonal", "matrix", "product") if k in spec]
    if len(keys) != 1:
        raise ConfigError("structure needs exactly one of 'diagonal', 'matrix', 'product'")
    key = keys[0]
    if key == "diagonal":
        tokens = list(spec["diagonal"])
        if len(tokens) != m:
            raise ConfigError(f"structure has {len(tokens)} diagonal entries but the immersion lives in R^{m}")
        return StructureOperator.diagonal(tokens, params)
    rows = spec[key]
    if len(rows) != m or any(len(r) != m for r in rows):
        raise ConfigError(f"structure matrix must be {m} x {m}")
    ambient_vars = [f"x{i + 1}" for i in range(m)]
    exprs = [[parse(str(v), ambient_vars, params) for v in r] for r in rows]
    if any(free_variables(e.root) for r in exprs for e in r):
        if key == "product":
            raise ConfigError("a position-dependent structure must be given as 'matrix'")

        def fn(x):
            return np.array([[eval_value(e, x) for e in r] for r in exprs])

        return StructureField(fn, m, params, label="matrix field")
    M = np.array([[eval_value(e, np.zeros(m)) for e in r] for r in exprs])
    if key == "matrix":
        return StructureOperator(M, Kind.METALLIC, params)
    F = StructureOperator(M, Kind.PRODUCT, None)
    return metallic_from_product(F, params, Branch(spec.get("branch", "plus")))


def _build_distribution(d: dict, variables, params) -> DistributionSpec:
    name = _require(d, "name", "distribution")
    sel = [k for k in ("coords", "fields", "frame") if k in d]
    if len(sel) != 1:
        raise ConfigError(f"distribution {name!r} needs exactly one of 'coords', 'fields', 'frame'")
    if "coords" in d:
        idx = []
        for c in d["coords"]:
            if isinstance(c, str):
                if c not in variables:
                    raise ConfigError(f"distribution {name!r}: unknown chart variable {c!r}")
                idx.append(list(variables).index(c))
            else:
                idx.append(int(c))
        return DistributionSpec(name, coords=tuple(idx))
    if "fields" in d:
        return DistributionSpec(name, fields=tuple(ChartVectorField.from_strings(f, variables, params)
                                                   for f in d["fields"]))
    rows = [[parse(str(v), variables, params) for v in r] for r in d["frame"]]

    def frame_matrix(x):
        return np.array([[eval_value(e, x) for e in r] for r in rows])

    return DistributionSpec(name, frame_matrix=frame_matrix)


def scenario_from_dict(data: dict) -> Scenario:
    """Validate and build a scenario; every problem raises a ConfigError-family error."""
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    try:
        name = str(data.get("name", "scenario"))
        pq = _require(data, "params", "scenario")
        params = metallic_number(_require(pq, "p", "params"), _require(pq, "q", "params"))
        imm = _require(data, "immersion", "scenario")
        variables = list(_require(imm, "variables", "immersion"))
        f = Immersion.from_strings(_require(imm, "components", "immersion"), variables,
                                   _require(imm, "chart_box", "immersion"), params, name=name)
        structure = _require(data, "structure", "scenario")
        S = _build_structure(structure, params, f.ambient_dim)
        dists = [_build_distribution(d, variables, params) for d in data.get("distributions", [])]
        names = [d.name for d in dists]
        if len(set(names)) != len(names):
            raise ConfigError("distribution names must be unique")
        semi = data.get("semi_slant")
        if semi is not None:
            semi = tuple(semi)
            if len(semi) != 2 or any(n not in names for n in semi):
                raise ConfigError("semi_slant must name two declared distributions")
        checks = tuple(data.get("checks", CHECK_ORDER))
        unknown = [c for c in checks if c not in CHECK_ORDER]
        if unknown:
            raise ConfigError(f"unknown checks: {unknown}; known: {list(CHECK_ORDER)}")
        needs_pair = {"semi_slant", "integrability", "mixed_geodesic"}
        if semi is None and needs_pair & set(checks):
            raise ConfigError(f"checks {sorted(needs_pair & set(checks))} need a 'semi_slant' pair")
        if isinstance(S, StructureField) and "angle_relation" in checks:
            raise ConfigError("angle_relation needs a constant structure")
        smp = data.get("sampling", {})
        tol = Tolerances(**smp.get("tolerances", {}))
        plan = SamplingPlan(seed=int(smp.get("seed", SamplingPlan.seed)), count=int(smp.get("count", 100)),
                            dirs=int(smp.get("dirs", 20)), tol=tol)
        expected = data.get("expected", {})
        for dname in expected.get("abs_cos_theta", {}):
            if dname not in names:
                raise ConfigError(f"expected abs_cos_theta for undeclared distribution {dname!r}")
        return Scenario(name, params, structure, f, dists, semi, checks, plan,
                        int(smp.get("extrinsic_count", DEFAULT_EXTRINSIC_COUNT)), expected, data)
    except ConfigError:
        raise
    except (MetallicError, TypeError, KeyError, AttributeError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(data)


# --- built-in examples -------------------------------------------------------

def example1_dict(p: int = 1, q: int = 1) -> dict:
    """Cones over a product of quarter circles in R^7 with a diagonal metallic structure."""
    top = math.pi / 2 - 0.01
    # cos theta = (sigma + 2 sigma_bar) / sqrt(3 (sigma^2 + 2 sigma_bar^2)), reported as |.|
    cos_expr = "(sigma + 2*sigma_bar) / sqrt(3*(sigma^2 + 2*sigma_bar^2))"
    return {
        "name": f"example1_p{p}_q{q}",
        "params": {"p": p, "q": q},
        "structure": {"diagonal": ["sigma", "sigma", "sigma_bar", "sigma_bar", "sigma_bar", "sigma", "sigma_bar"]},
        "immersion": {"variables": ["u", "t1", "t2"],
                      "components": ["u*cos(t1)", "u*sin(t1)", "u*cos(t2)", "u*sin(t2)", "u", "t1", "t2"],
                      "chart_box": [[0.5, 3.0], [0.0, top], [0.0, top]]},
        "distributions": [{"name": "D1", "coords": ["t1", "t2"]}, {"name": "D2", "coords": ["u"]}],
        "semi_slant": ["D1", "D2"],
        "checks": list(CHECK_ORDER),
        "sampling": {"seed": SamplingPlan.seed, "count": 100, "dirs": 20, "extrinsic_count": DEFAULT_EXTRINSIC_COUNT},
        "expected": {"abs_cos_theta": {"D2": cos_expr},
                     "induced_metric": [["3", "0", "0"], ["0", "u^2 + 1", "0"], ["0", "0", "u^2 + 1"]]},
    }


def example2_dict(n: int = 1, p: int = 1, q: int = 1) -> dict:
    """Cone-type immersion of an (n+1)-dimensional chart in R^{3n+1}."""
    if int(n) != n or n < 1:
        raise ConfigError("n must be a positive integer")
    n = int(n)
    alphas = [f"a{j}" for j in range(1, n + 1)]
    comps = ([f"u*cos({a})" for a in alphas] + [f"u*sin({a})" for a in alphas] + alphas + ["u"])
    metric = [["0"] * (n + 1) for _ in range(n + 1)]
    metric[0][0] = str(n + 1)
    for j in range(1, n + 1):
        metric[j][j] = "u^2 + 1"
    return {
        "name": f"example2_n{n}_p{p}_q{q}",
        "params": {"p": p, "q": q},
        "structure": {"diagonal": ["sigma"] * (3 * n) + ["sigma_bar"]},
        "immersion": {"variables": ["u"] + alphas, "components": comps,
                      "chart_box": [[0.5, 3.0]] + [[0.0, math.pi / 2]] * n},
        "distributions": [{"name": "D1", "coords": alphas}, {"name": "D2", "coords": ["u"]}],
        "semi_slant": ["D1", "D2"],
        "checks": list(CHECK_ORDER),
        "sampling": {"seed": SamplingPlan.seed, "count": 100, "dirs": 20, "extrinsic_count": DEFAULT_EXTRINSIC_COUNT},
        "expected": {"abs_cos_theta": {"D2": f"({n}*sigma + sigma_bar) / sqrt({n + 1}*({n}*sigma^2 + sigma_bar^2))"},
                     "induced_metric": metric},
    }


def builtin_example1(p: int = 1, q: int = 1) -> Scenario:
    return scenario_from_dict(example1_dict(p, q))


def builtin_example2(n: int = 1, p: int = 1, q: int = 1) -> Scenario:
    return scenario_from_dict(example2_dict(n, p, q))


# --- suite -------------------------------------------------------------------

def _structure_checks(s: Scenario, J, frames, rep: VerificationReport):
    tol = s.plan.tol.algebraic
    if isinstance(J, StructureOperator):
        sub = validate_structure(J, tol, seed=s.plan.seed)
        rep.extend(sub, "structure.")
        return sub.passed
    # a position-dependent structure is checked pointwise along the submanifold
    p, q = s.params.p, s.params.q
    poly = compat = 0.0
    for fr in frames:
        M = J(fr.position)
        poly = max(poly, float(np.max(np.abs(M @ M - p * M - q * np.eye(len(M))))))
        compat = max(compat, float(np.max(np.abs(M - M.T))))
    a = rep.add("structure.polynomial", "J^2 = pJ + qI along M", poly, tol, len(frames))
    b = rep.add("structure.compatibility", "g(JX,Y) = g(X,JY) along M", compat, tol, len(frames))
    return a.passed and b.passed


def _frame_checks(s: Scenario, frames, rep: VerificationReport):
    tol = s.plan.tol.algebraic
    orth = fac = 0.0
    for fr in frames:
        B = np.hstack([fr.tangent_onb, fr.normal_onb])
        orth = max(orth, float(np.max(np.abs(B.T @ B - np.eye(B.shape[1])))))
        fac = max(fac, float(np.max(np.abs(fr.jacobian - fr.tangent_onb @ fr.r_factor))))
    rep.add("frame.orthonormal", "[E | N] orthonormal", orth, tol, len(frames))
    rep.add("frame.factorization", "Jac = E R", fac, tol, len(frames))
    mexpr = s.expected.get("induced_metric")
    if mexpr is not None:
        vars_ = s.immersion.variables
        rows = [[parse(str(v), vars_, s.params) for v in r] for r in mexpr]
        worst = 0.0
        for fr in frames:
            G = np.array([[eval_value(e, fr.point) for e in r] for r in rows])
            worst = max(worst, float(np.max(np.abs(fr.induced_metric - G))))
        rep.add("frame.induced_metric", "Jac^T Jac = expected metric", worst, 1e-10, len(frames))


def _sigma_checks(s: Scenario, J, frames, rep: VerificationReport):
    tol = s.plan.tol.algebraic
    structs = [sigma_structure(J, fr) for fr in frames]
    rep.extend(verify_theorem1(structs, s.params, s.plan.dirs, s.plan.rng(4), tol))
    sym = dict.fromkeys(("T_symmetric", "n_symmetric", "N_adjoint_t"), 0.0)
    for fr in frames:
        for k, v in symmetry_residuals(induced_maps(J, fr)).items():
            sym[k] = max(sym[k], v)
    rep.add("sigma.T_symmetric", "g(TX,Y) = g(X,TY)", sym["T_symmetric"], tol, len(frames))
    rep.add("sigma.n_symmetric", "g(nU,V) = g(U,nV)", sym["n_symmetric"], tol, len(frames))
    rep.add("sigma.N_adjoint_t", "g(NX,V) = g(X,tV)", sym["N_adjoint_t"], tol, len(frames))


def _slant_checks(s: Scenario, J, frames, rep: VerificationReport):
    tol = s.plan.tol
    for i, D in enumerate([whole_tangent(s.immersion)] + list(s.distributions)):
        ar = slant_test(J, s.immersion, D, s.plan, frames=frames, stream=100 + i)
        key = f"slant.{D.name}"
        rep.observe(f"{key}.class", ar.classification.value)
        rep.observe(f"{key}.theta", ar.mean)
        rep.observe(f"{key}.cos_theta", ar.cos)
        rep.observe(f"{key}.max_deviation", ar.max_deviation)
        if ar.classification is SlantClass.PROPER_SLANT:
            lam, lres = slant_distribution_lambda(J, frames, D)
            rep.observe(f"{key}.lambda", lam)
            rep.add(f"{key}.lambda_fit", "(T_D)^2 = lambda (p T_D + qI)", lres, tol.algebraic, len(frames))
            res = slant_identity_residuals(J, frames, D, ar.mean, s.plan.dirs, s.plan.rng(200 + i))
            for k, ident in SLANT_IDENTITIES.items():
                rep.add(f"{key}.{k}", ident, res[k], tol.algebraic, len(frames) * s.plan.dirs)
        exp = s.expected.get("abs_cos_theta", {}).get(D.name)
        if exp is not None:
            val = abs(eval_value(parse(exp, [], s.params), []))
            dev = float(np.max(np.abs(np.cos(ar.angles) - val)))
            rep.observe(f"{key}.expected_cos_theta", val)
            rep.add(f"{key}.expected_angle", f"|cos theta| = {exp}", dev, 1e-8, len(ar.angles))


def _angle_relation(s: Scenario, J: StructureOperator, frames, rep: VerificationReport):
    F, _ = products_from_metallic(J)
    rng = s.plan.rng(5)
    worst, n = 0.0, 0
    per_frame = max(1, math.ceil(POINTWISE_VECTORS / len(frames)))
    for fr in frames:
        W = rng.standard_normal((fr.chart_dim, per_frame))
        for w in W.T:
            _, _, r = pointwise_angle_relation(J, F, fr, fr.tangent_onb @ w)
            worst = max(worst, r)
            n += 1
    rep.add("angle_relation.pointwise", "(2s-p)^2/4 |X|^2 sin^2(vartheta) = (p g(JX,X) + q|X|^2) sin^2(theta)",
            worst, s.plan.tol.algebraic, n)
    # the closed-form relation between the two slant angles is reported only
    for i, D in enumerate(list(s.distributions)):
        aJ = slant_test(J, s.immersion, D, s.plan, frames=frames, stream=300 + i)
        aF = slant_test(F, s.immersion, D, s.plan, frames=frames, stream=300 + i)
        if aJ.is_slant and aF.is_slant:
            rel = theorem_angle_relation(aJ.mean, aF.mean, s.params)
            key = f"angle_relation.{D.name}"
            rep.observe(f"{key}.theta", aJ.mean)
            rep.observe(f"{key}.vartheta", aF.mean)
            rep.observe(f"{key}.observed_sin_theta", rel.observed_sin_theta)
            rep.observe(f"{key}.predicted_sin_theta", rel.predicted_sin_theta)
            rep.observe(f"{key}.discrepancy", rel.discrepancy)


def run_suite(s: Scenario, timestamp: str | None = None) -> VerificationReport:
    """Run the scenario's checks in the fixed order of CHECK_ORDER.

    A structure that fails its own validation stops the run before any
    submanifold sampling; the report then carries only the structure checks.
    """
    rep = VerificationReport(scenario=s.name, seed=s.plan.seed, version=__version__, timestamp=timestamp)
    J = s.build_structure()
    f = s.immersion
    todo = [c for c in CHECK_ORDER if c in s.checks]
    # a constant structure is validated before any point is sampled
    frames = None if isinstance(J, StructureOperator) else sampled_frames(f, s.plan)
    if "structure" in todo and not _structure_checks(s, J, frames, rep):
        rep.observe("aborted", "structure failed validation")
        return rep
    if frames is None:
        frames = sampled_frames(f, s.plan)
    ext_plan = s.plan.with_(count=min(s.plan.count, s.extrinsic_count))
    D1 = D2 = None
    if s.semi_slant is not None:
        D1, D2 = (s.distribution(n) for n in s.semi_slant)
    for c in todo:
        if c == "frame":
            _frame_checks(s, frames, rep)
        elif c == "sigma":
            _sigma_checks(s, J, frames, rep)
        elif c == "slant":
            _slant_checks(s, J, frames, rep)
        elif c == "semi_slant":
            rep.extend(semi_slant_check(J, f, D1, D2, s.plan, frames=frames))
        elif c == "angle_relation":
            _angle_relation(s, J, frames, rep)
        elif c == "connection":
            rep.extend(verify_connection(f, ext_plan))
        elif c == "derivatives":
            rep.extend(verify_derivative_props(f, J, ext_plan))
        elif c == "brackets":
            rep.extend(verify_bracket_props(f, J, ext_plan))
        elif c == "integrability":
            rep.extend(integrability_checks(f, J, D1, D2, ext_plan))
        elif c == "mixed_geodesic":
            rep.extend(mixed_geodesic_check(f, J, D1, D2, ext_plan))
    return rep


def angle_report(s: Scenario, name: str) -> dict:
    """Slant angle summary for one declared distribution (or 'TM')."""
    D = whole_tangent(s.immersion) if name == "TM" else s.distribution(name)
    ar = slant_test(s.build_structure(), s.immersion, D, s.plan)
    return {"distribution": D.name, "classification": ar.classification.value, "theta": ar.mean,
            "cos_theta": ar.cos, "max_deviation": ar.max_deviation, "lambda": ar.lam, "samples": len(ar.angles)}
