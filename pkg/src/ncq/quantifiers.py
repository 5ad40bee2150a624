"""Certification and quantification programs for measurements and state sets.

Implements the classicality program (mu), the white-noise robustness (eta,
primal and dual), the nonclassical fraction (omega, primal and dual), and the
closed-form robustness upper bound, all phrased over the extreme points of
the relevant assignment polytope.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .config import DEFAULT_CONFIG, RunConfig
from .conic import ConicProgram, HermBlock, MatExpr, ScalarConstraint, ScalarExpr, ScalarVar, SolverFailure
from .operators import MultiMeasurement, StateSet, add_white_noise_measurement, add_white_noise_states
from .polytope import VertexSet, measurement_vertices, preparation_vertices


@dataclass
class QuantifierReport:
    """Outcome of one quantifier run, with re-verifiable certificates."""

    target: str
    quantity: str  # "mu" | "eta" | "omega" | "eta_upper_bound"
    value: float
    verdict: str   # "classical" | "nonclassical" | "boundary"
    primal_certificate: tuple | None = None
    dual_certificate: tuple | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_nonclassical(self) -> bool:
        return self.verdict == "nonclassical"

    @property
    def is_classical(self) -> bool:
        return self.verdict in ("classical", "boundary")

    def to_json_dict(self) -> dict:
        from .operators import matrix_to_json

        def certs(cs):
            return None if cs is None else [matrix_to_json(c) for c in cs]

        diag = {
            k: (float(v) if isinstance(v, (int, float, np.floating)) else str(v))
            for k, v in self.diagnostics.items()
        }
        return {
            "schema": 1,
            "kind": "quantifier_report",
            "target": self.target,
            "quantity": self.quantity,
            "value": self.value,
            "verdict": self.verdict,
            "primal_certificate": certs(self.primal_certificate),
            "dual_certificate": certs(self.dual_certificate),
            "diagnostics": diag,
        }


def _clamp_unit(value: float, tol: float = 1e-6) -> float:
    """Snap solver dust outside [0, 1] back onto the interval."""
    if -tol <= value <= 1 + tol:
        return min(max(value, 0.0), 1.0)
    return value


def _verdict_mu(value: float, tol: float) -> str:
    if value < -tol:
        return "nonclassical"
    if value <= tol:
        return "boundary"
    return "classical"


def _verdict_eta(value: float, tol: float) -> str:
    return "classical" if value >= 1.0 - tol else "nonclassical"


def _verdict_omega(value: float, tol: float) -> str:
    return "classical" if value <= tol else "nonclassical"


def _require_optimal(sol: conic.Solution, what: str) -> conic.Solution:
    if sol.status != "optimal":
        raise SolverFailure(f"{what}: solver returned {sol.status}")
    return sol


def _meas_target(meas: MultiMeasurement) -> str:
    return f"measurement(dim={meas.dim}, settings={meas.n_settings}, outcomes={list(meas.outcome_counts)})"


def _states_target(states: StateSet) -> str:
    return f"states(dim={states.dim}, k={len(states)})"


def _check_vertex_layout(verts: VertexSet, size: int, what: str) -> None:
    if verts.layout.size != size:
        raise ValueError(f"{what}: vertex layout size {verts.layout.size} does not match object size {size}")


# ---------------------------------------------------------------------------
# Shared program builders (the measurement and state programs coincide once
# the operator family and its vertex set are flattened)
# ---------------------------------------------------------------------------

def _decomposition_program(
    name: str, ops: list[np.ndarray], dim: int, verts: np.ndarray, floor_var: str
) -> ConicProgram:
    """max t s.t. sum_l D(i|l) G_l = O_i and G_l >= t*1 (certification form)."""
    n_l = verts.shape[0]
    eye = np.eye(dim, dtype=complex)
    prog = ConicProgram(name=name, sense="maximize", objective=ScalarExpr(scalars={floor_var: 1.0}))
    prog.scalars.append(ScalarVar(floor_var))
    for l in range(n_l):
        prog.blocks.append(HermBlock(f"G{l}", dim, psd=False))
    for i, op in enumerate(ops):
        blocks = {f"G{l}": float(verts[l, i]) for l in range(n_l) if abs(verts[l, i]) > 0}
        prog.matrix_constraints.append(
            conic.MatrixConstraint(MatExpr(dim, -np.asarray(op, complex), blocks=blocks), "zero", f"decomp[{i}]")
        )
    for l in range(n_l):
        prog.matrix_constraints.append(
            conic.MatrixConstraint(
                MatExpr(dim, np.zeros((dim, dim), complex), blocks={f"G{l}": 1.0}, scalars={floor_var: -eye}),
                "psd",
                f"floor[{l}]",
            )
        )
    return prog


def _robustness_program(name: str, ops: list[np.ndarray], dim: int, verts: np.ndarray) -> ConicProgram:
    """max eta <= 1 s.t. sum_l D(i|l) G_l = eta*O_i + (1-eta)*Tr[O_i]/d, G_l >= 0."""
    n_l = verts.shape[0]
    eye = np.eye(dim, dtype=complex)
    prog = ConicProgram(name=name, sense="maximize", objective=ScalarExpr(scalars={"eta": 1.0}))
    prog.scalars.append(ScalarVar("eta", ub=1.0))
    for l in range(n_l):
        prog.blocks.append(HermBlock(f"G{l}", dim, psd=True))
    for i, op in enumerate(ops):
        op = np.asarray(op, complex)
        noise = np.trace(op).real / dim * eye
        blocks = {f"G{l}": float(verts[l, i]) for l in range(n_l) if abs(verts[l, i]) > 0}
        prog.matrix_constraints.append(
            conic.MatrixConstraint(
                MatExpr(dim, -noise, blocks=blocks, scalars={"eta": noise - op}), "zero", f"decomp[{i}]"
            )
        )
    return prog


def _robustness_dual_program(name: str, ops: list[np.ndarray], dim: int, verts: np.ndarray) -> ConicProgram:
    """min 1 + sum_i Tr[X_i O_i] s.t. the trace inequality and sum_i D(i|l) X_i >= 0."""
    n_l, n = verts.shape
    eye = np.eye(dim, dtype=complex)
    prog = ConicProgram(
        name=name,
        sense="minimize",
        objective=ScalarExpr(const=1.0, block_traces={f"X{i}": np.asarray(ops[i], complex) for i in range(n)}),
    )
    for i in range(n):
        prog.blocks.append(HermBlock(f"X{i}", dim, psd=False))
    prog.scalar_constraints.append(
        ScalarConstraint(
            ScalarExpr(
                const=1.0,
                block_traces={
                    f"X{i}": np.asarray(ops[i], complex) - np.trace(ops[i]).real / dim * eye for i in range(n)
                },
            ),
            "ge",
            "noise-floor",
        )
    )
    for l in range(n_l):
        blocks = {f"X{i}": float(verts[l, i]) for i in range(n) if abs(verts[l, i]) > 0}
        prog.matrix_constraints.append(
            conic.MatrixConstraint(MatExpr(dim, np.zeros((dim, dim), complex), blocks=blocks), "psd", f"vertex[{l}]")
        )
    return prog


def _fraction_primal_program(
    name: str, ops: list[np.ndarray], dim: int, verts: np.ndarray, trace_scale: float
) -> ConicProgram:
    """min 1 - Tr[sum_l G_l]/trace_scale s.t. O_i >= sum_l D(i|l) G_l, G_l >= 0."""
    n_l = verts.shape[0]
    eye = np.eye(dim, dtype=complex)
    prog = ConicProgram(
        name=name,
        sense="minimize",
        objective=ScalarExpr(const=1.0, block_traces={f"G{l}": -eye / trace_scale for l in range(n_l)}),
    )
    for l in range(n_l):
        prog.blocks.append(HermBlock(f"G{l}", dim, psd=True))
    for i, op in enumerate(ops):
        blocks = {f"G{l}": -float(verts[l, i]) for l in range(n_l) if abs(verts[l, i]) > 0}
        prog.matrix_constraints.append(
            conic.MatrixConstraint(MatExpr(dim, np.asarray(op, complex), blocks=blocks), "psd", f"dominate[{i}]")
        )
    return prog


def _fraction_dual_program(
    name: str, ops: list[np.ndarray], dim: int, verts: np.ndarray, rhs_scale: float, obj_scale: float
) -> ConicProgram:
    """max 1 - sum_i Tr[F_i O_i]/obj_scale s.t. sum_i D(i|l) F_i >= 1/rhs_scale, F_i >= 0."""
    n_l, n = verts.shape
    eye = np.eye(dim, dtype=complex)
    prog = ConicProgram(
        name=name,
        sense="maximize",
        objective=ScalarExpr(
            const=1.0, block_traces={f"F{i}": -np.asarray(ops[i], complex) / obj_scale for i in range(n)}
        ),
    )
    for i in range(n):
        prog.blocks.append(HermBlock(f"F{i}", dim, psd=True))
    for l in range(n_l):
        blocks = {f"F{i}": float(verts[l, i]) for i in range(n) if abs(verts[l, i]) > 0}
        prog.matrix_constraints.append(
            conic.MatrixConstraint(MatExpr(dim, -eye / rhs_scale, blocks=blocks), "psd", f"vertex[{l}]")
        )
    return prog


def _blocks_list(sol: conic.Solution, prefix: str, count: int) -> tuple:
    return tuple(sol.blocks[f"{prefix}{i}"] for i in range(count))


def _decomposition_residual(ops, verts, blocks) -> float:
    worst = 0.0
    for i, op in enumerate(ops):
        rec = sum(verts[l, i] * blocks[l] for l in range(len(blocks)))
        worst = max(worst, float(np.max(np.abs(rec - op))))
    return worst


# ---------------------------------------------------------------------------
# Measurement quantifiers
# ---------------------------------------------------------------------------

def certify_measurement(
    meas: MultiMeasurement, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Classicality program: mu >= 0 iff the effects admit a vertex decomposition
    with a parent POVM; the optimal blocks are that parent POVM when classical."""
    if verts is None:
        verts = measurement_vertices(meas, config)
    ops = meas.effects_flat()
    _check_vertex_layout(verts, len(ops), "certify_measurement")
    prog = _decomposition_program("certify-measurement", ops, meas.dim, verts.vertices, "mu")
    sol = _require_optimal(conic.solve(prog, config=config), "certify_measurement")
    mu = sol.scalars["mu"]
    blocks = _blocks_list(sol, "G", verts.count)
    diag = {
        "solver": sol.info.get("backend"),
        "primal_residual": sol.info.get("primal_residual"),
        "decomposition_residual": _decomposition_residual(ops, verts.vertices, blocks),
        "min_block_eig": min(float(np.linalg.eigvalsh(g)[0]) for g in blocks),
    }
    return QuantifierReport(
        _meas_target(meas), "mu", mu, _verdict_mu(mu, config.verdict_tol),
        primal_certificate=blocks, diagnostics=diag,
    )


def white_noise_robustness_measurement(
    meas: MultiMeasurement, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Largest eta at which the white-noised measurement stays classical.

    Solved as one SDP with eta a variable; if the backend fails, falls back
    to bisecting the certification program over the noise level.
    """
    if verts is None:
        verts = measurement_vertices(meas, config)
    ops = meas.effects_flat()
    _check_vertex_layout(verts, len(ops), "white_noise_robustness_measurement")
    prog = _robustness_program("robustness-measurement", ops, meas.dim, verts.vertices)
    sol = conic.solve(prog, config=config)
    if sol.status != "optimal":
        eta = robustness_by_bisection("measurement", meas, verts, config)
        return QuantifierReport(
            _meas_target(meas), "eta", eta, _verdict_eta(eta, config.verdict_tol),
            diagnostics={"solver": "bisection", "direct_status": sol.status},
        )
    eta = _clamp_unit(sol.scalars["eta"])
    blocks = _blocks_list(sol, "G", verts.count)
    noisy_ops = add_white_noise_measurement(meas, eta).effects_flat()
    diag = {
        "solver": sol.info.get("backend"),
        "primal_residual": sol.info.get("primal_residual"),
        "decomposition_residual": _decomposition_residual(noisy_ops, verts.vertices, blocks),
        "min_block_eig": min(float(np.linalg.eigvalsh(g)[0]) for g in blocks),
    }
    return QuantifierReport(
        _meas_target(meas), "eta", eta, _verdict_eta(eta, config.verdict_tol),
        primal_certificate=blocks, diagnostics=diag,
    )


def white_noise_robustness_measurement_dual(
    meas: MultiMeasurement, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Dual robustness program; returns the certificate operators {X_i}."""
    if verts is None:
        verts = measurement_vertices(meas, config)
    ops = meas.effects_flat()
    _check_vertex_layout(verts, len(ops), "white_noise_robustness_measurement_dual")
    prog = _robustness_dual_program("robustness-measurement-dual", ops, meas.dim, verts.vertices)
    sol = _require_optimal(conic.solve(prog, config=config), "white_noise_robustness_measurement_dual")
    eta = _clamp_unit(sol.objective)
    xs = _blocks_list(sol, "X", len(ops))
    diag = {"solver": sol.info.get("backend"), "primal_residual": sol.info.get("primal_residual")}
    return QuantifierReport(
        _meas_target(meas), "eta", eta, _verdict_eta(eta, config.verdict_tol),
        dual_certificate=xs, diagnostics=diag,
    )


def analytic_upper_bound_measurement(
    meas: MultiMeasurement, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> float:
    """Closed-form robustness upper bound from the vertex spectral radius.

    Evaluates (d^2 L - sum_i Tr[O_i]^2) / sum_i (d Tr[O_i^2] - Tr[O_i]^2) with
    L the largest spectral norm of any vertex contraction sum_i D(i|l) O_i.
    For rank-one equal-trace families this coincides with (kL - 1)/(d - 1).
    """
    if verts is None:
        verts = measurement_vertices(meas, config)
    ops = meas.effects_flat()
    _check_vertex_layout(verts, len(ops), "analytic_upper_bound_measurement")
    return _analytic_bound(ops, meas.dim, verts.vertices)


def _analytic_bound(ops: list[np.ndarray], dim: int, verts: np.ndarray) -> float:
    lam = 0.0
    for row in verts:
        contraction = sum(row[i] * ops[i] for i in range(len(ops)))
        lam = max(lam, float(np.max(np.abs(np.linalg.eigvalsh(contraction)))))
    traces = np.array([np.trace(o).real for o in ops])
    sq_traces = np.array([np.trace(np.asarray(o) @ np.asarray(o)).real for o in ops])
    denom = float(np.sum(dim * sq_traces - traces**2))
    if denom <= 0:
        return float("inf")  # non-binding (e.g. every effect proportional to identity)
    return float((dim**2 * lam - np.sum(traces**2)) / denom)


def nonclassical_fraction_measurement(
    meas: MultiMeasurement, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Minimal nonclassical weight in any identity-respecting convex split.

    Solves the primal and its witness-producing dual; the report carries the
    primal mixture blocks and the dual operators {F_i} and records the gap.
    """
    if verts is None:
        verts = measurement_vertices(meas, config)
    ops = meas.effects_flat()
    _check_vertex_layout(verts, len(ops), "nonclassical_fraction_measurement")
    d = meas.dim
    primal = _require_optimal(
        conic.solve(_fraction_primal_program("fraction-measurement", ops, d, verts.vertices, float(d)), config=config),
        "nonclassical_fraction_measurement (primal)",
    )
    dual = _require_optimal(
        conic.solve(_fraction_dual_program("fraction-measurement-dual", ops, d, verts.vertices, float(d), 1.0), config=config),
        "nonclassical_fraction_measurement (dual)",
    )
    omega = _clamp_unit(primal.objective)
    gap = conic.check_duality_gap(dual, primal)  # max-dual vs min-primal: primal - dual
    diag = {
        "solver": primal.info.get("backend"),
        "primal_residual": primal.info.get("primal_residual"),
        "dual_residual": dual.info.get("primal_residual"),
        "duality_gap": gap,
        "dual_value": dual.objective,
    }
    return QuantifierReport(
        _meas_target(meas), "omega", omega, _verdict_omega(omega, config.verdict_tol),
        primal_certificate=_blocks_list(primal, "G", verts.count),
        dual_certificate=_blocks_list(dual, "F", len(ops)),
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# State-set quantifiers
# ---------------------------------------------------------------------------

def certify_states(
    states: StateSet, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Classicality program for a state set (vertices of the preparation polytope)."""
    if verts is None:
        verts = preparation_vertices(states, config)
    ops = list(states.states)
    _check_vertex_layout(verts, len(ops), "certify_states")
    prog = _decomposition_program("certify-states", ops, states.dim, verts.vertices, "mu")
    sol = _require_optimal(conic.solve(prog, config=config), "certify_states")
    mu = sol.scalars["mu"]
    blocks = _blocks_list(sol, "G", verts.count)
    diag = {
        "solver": sol.info.get("backend"),
        "primal_residual": sol.info.get("primal_residual"),
        "decomposition_residual": _decomposition_residual(ops, verts.vertices, blocks),
        "min_block_eig": min(float(np.linalg.eigvalsh(g)[0]) for g in blocks),
    }
    return QuantifierReport(
        _states_target(states), "mu", mu, _verdict_mu(mu, config.verdict_tol),
        primal_certificate=blocks, diagnostics=diag,
    )


def white_noise_robustness_states(
    states: StateSet, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Largest eta at which the white-noised state set stays classical."""
    if verts is None:
        verts = preparation_vertices(states, config)
    ops = list(states.states)
    _check_vertex_layout(verts, len(ops), "white_noise_robustness_states")
    prog = _robustness_program("robustness-states", ops, states.dim, verts.vertices)
    sol = conic.solve(prog, config=config)
    if sol.status != "optimal":
        eta = robustness_by_bisection("states", states, verts, config)
        return QuantifierReport(
            _states_target(states), "eta", eta, _verdict_eta(eta, config.verdict_tol),
            diagnostics={"solver": "bisection", "direct_status": sol.status},
        )
    eta = _clamp_unit(sol.scalars["eta"])
    blocks = _blocks_list(sol, "G", verts.count)
    noisy_ops = list(add_white_noise_states(states, eta).states)
    diag = {
        "solver": sol.info.get("backend"),
        "primal_residual": sol.info.get("primal_residual"),
        "decomposition_residual": _decomposition_residual(noisy_ops, verts.vertices, blocks),
        "min_block_eig": min(float(np.linalg.eigvalsh(g)[0]) for g in blocks),
    }
    return QuantifierReport(
        _states_target(states), "eta", eta, _verdict_eta(eta, config.verdict_tol),
        primal_certificate=blocks, diagnostics=diag,
    )


def white_noise_robustness_states_dual(
    states: StateSet, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Dual robustness program for state sets; returns {X_a}."""
    if verts is None:
        verts = preparation_vertices(states, config)
    ops = list(states.states)
    _check_vertex_layout(verts, len(ops), "white_noise_robustness_states_dual")
    prog = _robustness_dual_program("robustness-states-dual", ops, states.dim, verts.vertices)
    sol = _require_optimal(conic.solve(prog, config=config), "white_noise_robustness_states_dual")
    xs = _blocks_list(sol, "X", len(ops))
    eta = _clamp_unit(sol.objective)
    diag = {"solver": sol.info.get("backend"), "primal_residual": sol.info.get("primal_residual")}
    return QuantifierReport(
        _states_target(states), "eta", eta, _verdict_eta(eta, config.verdict_tol),
        dual_certificate=xs, diagnostics=diag,
    )


def analytic_upper_bound_states(
    states: StateSet, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> float:
    """Closed-form robustness upper bound (kdL - k) / (d sum_a Tr[rho_a^2] - k)."""
    if verts is None:
        verts = preparation_vertices(states, config)
    ops = list(states.states)
    _check_vertex_layout(verts, len(ops), "analytic_upper_bound_states")
    k, d = len(ops), states.dim
    lam = 0.0
    for row in verts.vertices:
        contraction = sum(row[a] * ops[a] for a in range(k))
        lam = max(lam, float(np.max(np.abs(np.linalg.eigvalsh(contraction)))))
    purity = sum(np.trace(np.asarray(r) @ np.asarray(r)).real for r in ops)
    denom = d * purity - k
    if denom <= 0:
        return float("inf")
    return float((k * d * lam - k) / denom)


def nonclassical_fraction_states(
    states: StateSet, verts: VertexSet | None = None, config: RunConfig = DEFAULT_CONFIG
) -> QuantifierReport:
    """Minimal nonclassical weight for a state set; dual returns {F_a}."""
    if verts is None:
        verts = preparation_vertices(states, config)
    ops = list(states.states)
    _check_vertex_layout(verts, len(ops), "nonclassical_fraction_states")
    k, d = float(len(ops)), states.dim
    primal = _require_optimal(
        conic.solve(_fraction_primal_program("fraction-states", ops, d, verts.vertices, k), config=config),
        "nonclassical_fraction_states (primal)",
    )
    dual = _require_optimal(
        conic.solve(_fraction_dual_program("fraction-states-dual", ops, d, verts.vertices, 1.0, k), config=config),
        "nonclassical_fraction_states (dual)",
    )
    omega = _clamp_unit(primal.objective)
    gap = conic.check_duality_gap(dual, primal)
    diag = {
        "solver": primal.info.get("backend"),
        "primal_residual": primal.info.get("primal_residual"),
        "dual_residual": dual.info.get("primal_residual"),
        "duality_gap": gap,
        "dual_value": dual.objective,
    }
    return QuantifierReport(
        _states_target(states), "omega", omega, _verdict_omega(omega, config.verdict_tol),
        primal_certificate=_blocks_list(primal, "G", verts.count),
        dual_certificate=_blocks_list(dual, "F", len(ops)),
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# Bisection fallback and noise sweeps
# ---------------------------------------------------------------------------

def robustness_by_bisection(kind: str, obj, verts: VertexSet, config: RunConfig = DEFAULT_CONFIG, tol: float = 1e-7) -> float:
    """Locate the critical noise by bisecting the certification program.

    Classicality of the white-noised object is monotone in the noise level,
    so the transition is bracketed and halved until ``tol``.  Used when the
    direct eta-variable SDP fails; several times slower but only needs
    feasibility-style solves at fixed noise.
    """
    def classical_at(eta: float) -> bool:
        if kind == "measurement":
            rep = certify_measurement(add_white_noise_measurement(obj, eta), verts, config)
        else:
            rep = certify_states(add_white_noise_states(obj, eta), verts, config)
        return rep.is_classical

    if classical_at(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if classical_at(mid):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2



def _sweep_point(args):
    kind, obj, eta, config = args
    if kind == "measurement":
        noisy = add_white_noise_measurement(obj, eta)
        rep = certify_measurement(noisy, config=config)
    else:
        noisy = add_white_noise_states(obj, eta)
        rep = certify_states(noisy, config=config)
    return eta, rep.value, rep.verdict


def noise_sweep(kind: str, obj, etas, config: RunConfig = DEFAULT_CONFIG) -> list[tuple[float, float, str]]:
    """Classify the white-noised object across noise levels; parallel when jobs > 1."""
    if kind not in ("measurement", "states"):
        raise ValueError("kind must be 'measurement' or 'states'")
    tasks = [(kind, obj, float(e), config) for e in etas]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]
