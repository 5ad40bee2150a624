"""Solver-agnostic layer for the linear and semidefinite programs the quantifiers emit.

A :class:`ConicProgram` mixes free scalars, nonnegative vectors, and Hermitian
matrix blocks under linear/trace constraints.  ``solve`` dispatches pure LPs
to scipy's HiGHS and everything else to cvxpy (CLARABEL, falling back to
SCS), and always re-checks primal residuals itself.  Farkas rays for
infeasible equality-form LPs are derived from the explicit alternative
system, since the backends do not expose them.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .config import DEFAULT_CONFIG, RunConfig
from .operators import matrix_from_json, matrix_to_json


class SolverFailure(RuntimeError):
    """A backend returned no usable solution; never converted to a verdict."""


@dataclass(frozen=True)
class ScalarVar:
    name: str
    lb: float | None = None
    ub: float | None = None


@dataclass(frozen=True)
class HermBlock:
    name: str
    dim: int
    psd: bool = False


@dataclass(frozen=True)
class NonnegVec:
    name: str
    size: int


@dataclass
class ScalarExpr:
    """Affine real functional: const + scalars + Tr[C_j block_j] + vec dots."""

    const: float = 0.0
    scalars: dict = field(default_factory=dict)       # name -> coeff
    block_traces: dict = field(default_factory=dict)  # name -> Hermitian coeff matrix
    vec_terms: dict = field(default_factory=dict)     # name -> coeff row


@dataclass
class MatExpr:
    """Affine Hermitian-matrix expression: const + sum c_j block_j + sum s_i A_i."""

    dim: int
    const: np.ndarray
    blocks: dict = field(default_factory=dict)   # name -> real coeff
    scalars: dict = field(default_factory=dict)  # name -> Hermitian matrix


@dataclass(frozen=True)
class MatrixConstraint:
    expr: MatExpr
    kind: str  # "zero" (expr == 0) or "psd" (expr >> 0)
    tag: str = ""


@dataclass(frozen=True)
class ScalarConstraint:
    expr: ScalarExpr
    kind: str  # "eq", "le", "ge"  (expr ? 0)
    tag: str = ""


@dataclass
class ConicProgram:
    name: str
    sense: str  # "maximize" or "minimize"
    objective: ScalarExpr
    scalars: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    vecs: list = field(default_factory=list)
    matrix_constraints: list = field(default_factory=list)
    scalar_constraints: list = field(default_factory=list)

    def validate(self) -> None:
        snames = {v.name for v in self.scalars}
        bnames = {b.name: b.dim for b in self.blocks}
        vnames = {v.name: v.size for v in self.vecs}
        if len(snames) != len(self.scalars) or len(bnames) != len(self.blocks):
            raise ValueError("duplicate variable names")

        def check_scalar_expr(e: ScalarExpr, where: str):
            for nm in e.scalars:
                if nm not in snames:
                    raise ValueError(f"{where}: unknown scalar {nm!r}")
            for nm, c in e.block_traces.items():
                if nm not in bnames or np.shape(c) != (bnames[nm], bnames[nm]):
                    raise ValueError(f"{where}: bad block trace term {nm!r}")
            for nm, row in e.vec_terms.items():
                if nm not in vnames or np.shape(row) != (vnames[nm],):
                    raise ValueError(f"{where}: bad vector term {nm!r}")

        check_scalar_expr(self.objective, "objective")
        for c in self.scalar_constraints:
            check_scalar_expr(c.expr, f"constraint {c.tag!r}")
        for c in self.matrix_constraints:
            e = c.expr
            if np.shape(e.const) != (e.dim, e.dim):
                raise ValueError(f"constraint {c.tag!r}: constant shape mismatch")
            for nm in e.blocks:
                if nm not in bnames or bnames[nm] != e.dim:
                    raise ValueError(f"constraint {c.tag!r}: unknown/mismatched block {nm!r}")
            for nm, mat in e.scalars.items():
                if nm not in snames or np.shape(mat) != (e.dim, e.dim):
                    raise ValueError(f"constraint {c.tag!r}: bad scalar matrix term {nm!r}")

    # -- serialization (debug dump format) ---------------------------------
    def to_json(self) -> str:
        def sexpr(e: ScalarExpr):
            return {
                "const": e.const,
                "scalars": e.scalars,
                "block_traces": {k: matrix_to_json(v) for k, v in e.block_traces.items()},
                "vec_terms": {k: np.asarray(v).tolist() for k, v in e.vec_terms.items()},
            }

        def mexpr(e: MatExpr):
            return {
                "dim": e.dim,
                "const": matrix_to_json(e.const),
                "blocks": e.blocks,
                "scalars": {k: matrix_to_json(v) for k, v in e.scalars.items()},
            }

        return json.dumps(
            {
                "schema": 1,
                "kind": "conic_program",
                "name": self.name,
                "sense": self.sense,
                "objective": sexpr(self.objective),
                "scalars": [[v.name, v.lb, v.ub] for v in self.scalars],
                "blocks": [[b.name, b.dim, b.psd] for b in self.blocks],
                "vecs": [[v.name, v.size] for v in self.vecs],
                "matrix_constraints": [
                    {"kind": c.kind, "tag": c.tag, "expr": mexpr(c.expr)} for c in self.matrix_constraints
                ],
                "scalar_constraints": [
                    {"kind": c.kind, "tag": c.tag, "expr": sexpr(c.expr)} for c in self.scalar_constraints
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ConicProgram":
        data = json.loads(text)

        def sexpr(d):
            return ScalarExpr(
                const=float(d["const"]),
                scalars={k: float(v) for k, v in d["scalars"].items()},
                block_traces={
                    k: matrix_from_json(v, int(round(np.sqrt(len(v))))) for k, v in d["block_traces"].items()
                },
                vec_terms={k: np.asarray(v, dtype=float) for k, v in d["vec_terms"].items()},
            )

        def mexpr(d):
            dim = int(d["dim"])
            return MatExpr(
                dim=dim,
                const=matrix_from_json(d["const"], dim),
                blocks={k: float(v) for k, v in d["blocks"].items()},
                scalars={k: matrix_from_json(v, dim) for k, v in d["scalars"].items()},
            )

        return cls(
            name=data["name"],
            sense=data["sense"],
            objective=sexpr(data["objective"]),
            scalars=[ScalarVar(n, lb, ub) for n, lb, ub in data["scalars"]],
            blocks=[HermBlock(n, int(d), bool(p)) for n, d, p in data["blocks"]],
            vecs=[NonnegVec(n, int(s)) for n, s in data["vecs"]],
            matrix_constraints=[
                MatrixConstraint(mexpr(c["expr"]), c["kind"], c["tag"]) for c in data["matrix_constraints"]
            ],
            scalar_constraints=[
                ScalarConstraint(sexpr(c["expr"]), c["kind"], c["tag"]) for c in data["scalar_constraints"]
            ],
        )


@dataclass
class Solution:
    status: str  # optimal | infeasible | unbounded | numerical_failure
    objective: float | None
    scalars: dict = field(default_factory=dict)
    blocks: dict = field(default_factory=dict)
    vecs: dict = field(default_factory=dict)
    duals: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)


def _eval_scalar(e: ScalarExpr, sol: Solution) -> float:
    val = e.const
    for nm, c in e.scalars.items():
        val += c * sol.scalars[nm]
    for nm, cmat in e.block_traces.items():
        val += float(np.trace(np.asarray(cmat) @ sol.blocks[nm]).real)
    for nm, row in e.vec_terms.items():
        val += float(np.asarray(row) @ sol.vecs[nm])
    return val


def _eval_matrix(e: MatExpr, sol: Solution) -> np.ndarray:
    val = np.array(e.const, dtype=complex)
    for nm, c in e.blocks.items():
        val = val + c * sol.blocks[nm]
    for nm, mat in e.scalars.items():
        val = val + sol.scalars[nm] * np.asarray(mat)
    return val


def primal_residual(prog: ConicProgram, sol: Solution) -> float:
    """Max constraint violation of a candidate solution."""
    worst = 0.0
    for c in prog.scalar_constraints:
        v = _eval_scalar(c.expr, sol)
        if c.kind == "eq":
            worst = max(worst, abs(v))
        elif c.kind == "le":
            worst = max(worst, v)
        else:
            worst = max(worst, -v)
    for c in prog.matrix_constraints:
        m = _eval_matrix(c.expr, sol)
        if c.kind == "zero":
            worst = max(worst, float(np.max(np.abs(m))))
        else:
            worst = max(worst, -float(np.linalg.eigvalsh(m)[0]))
    for b in prog.blocks:
        if b.psd:
            worst = max(worst, -float(np.linalg.eigvalsh(sol.blocks[b.name])[0]))
    for v in prog.vecs:
        worst = max(worst, -float(np.min(sol.vecs[v.name])) if sol.vecs[v.name].size else 0.0)
    for s in prog.scalars:
        x = sol.scalars[s.name]
        if s.lb is not None:
            worst = max(worst, s.lb - x)
        if s.ub is not None:
            worst = max(worst, x - s.ub)
    return worst


# ---------------------------------------------------------------------------
# LP path (scipy / HiGHS)
# ---------------------------------------------------------------------------

def _is_pure_lp(prog: ConicProgram) -> bool:
    return not prog.blocks and not prog.matrix_constraints


def _lp_arrays(prog: ConicProgram):
    svars = [v.name for v in prog.scalars]
    vvars = [(v.name, v.size) for v in prog.vecs]
    offsets = {}
    pos = 0
    for nm in svars:
        offsets[nm] = pos
        pos += 1
    for nm, size in vvars:
        offsets[nm] = pos
        pos += size
    n = pos

    def row_of(e: ScalarExpr):
        row = np.zeros(n)
        for nm, c in e.scalars.items():
            row[offsets[nm]] = c
        for nm, coeffs in e.vec_terms.items():
            o = offsets[nm]
            row[o : o + len(coeffs)] = np.asarray(coeffs, dtype=float)
        return row, e.const

    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for c in prog.scalar_constraints:
        row, const = row_of(c.expr)
        if c.kind == "eq":
            a_eq.append(row)
            b_eq.append(-const)
        elif c.kind == "le":
            a_ub.append(row)
            b_ub.append(-const)
        else:
            a_ub.append(-row)
            b_ub.append(const)
    c_row, c_const = row_of(prog.objective)
    sign = 1.0 if prog.sense == "minimize" else -1.0
    bounds = [(v.lb, v.ub) for v in prog.scalars] + [(0.0, None)] * sum(s for _, s in vvars)
    return (
        sign * c_row,
        c_const,
        sign,
        np.array(a_ub) if a_ub else None,
        np.array(b_ub) if b_ub else None,
        np.array(a_eq) if a_eq else None,
        np.array(b_eq) if b_eq else None,
        bounds,
        offsets,
        svars,
        vvars,
    )


def _solve_lp(prog: ConicProgram) -> Solution:
    c, c_const, sign, a_ub, b_ub, a_eq, b_eq, bounds, offsets, svars, vvars = _lp_arrays(prog)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 2:
        return Solution("infeasible", None, info={"backend": "highs"})
    if res.status == 3:
        return Solution("unbounded", None, info={"backend": "highs"})
    if res.status != 0 or res.x is None:
        return Solution("numerical_failure", None, info={"backend": "highs", "message": res.message})
    sol = Solution("optimal", sign * res.fun + c_const, info={"backend": "highs", "iterations": int(res.nit)})
    for nm in svars:
        sol.scalars[nm] = float(res.x[offsets[nm]])
    for nm, size in vvars:
        o = offsets[nm]
        sol.vecs[nm] = np.array(res.x[o : o + size])
    if a_eq is not None and res.eqlin is not None:
        sol.duals["eq"] = np.asarray(res.eqlin.marginals)
    return sol


# ---------------------------------------------------------------------------
# SDP path (cvxpy)
# ---------------------------------------------------------------------------

def _solve_sdp(prog: ConicProgram, solver_eps: float, max_iters: int | None) -> Solution:
    import cvxpy as cp

    svar = {v.name: cp.Variable(name=v.name) for v in prog.scalars}
    bvar = {
        b.name: cp.Variable((b.dim, b.dim), hermitian=True, name=b.name) for b in prog.blocks
    }
    vvar = {v.name: cp.Variable(v.size, nonneg=True, name=v.name) for v in prog.vecs}

    def sexpr(e: ScalarExpr):
        out = e.const
        for nm, c in e.scalars.items():
            out = out + c * svar[nm]
        for nm, cmat in e.block_traces.items():
            out = out + cp.real(cp.trace(np.asarray(cmat, dtype=complex) @ bvar[nm]))
        for nm, row in e.vec_terms.items():
            out = out + np.asarray(row, dtype=float) @ vvar[nm]
        return out

    def mexpr(e: MatExpr):
        out: object = np.asarray(e.const, dtype=complex)
        for nm, c in e.blocks.items():
            out = out + c * bvar[nm]
        for nm, mat in e.scalars.items():
            out = out + svar[nm] * np.asarray(mat, dtype=complex)
        return out

    cons = []
    for b in prog.blocks:
        if b.psd:
            cons.append(bvar[b.name] >> 0)
    for v in prog.scalars:
        if v.lb is not None:
            cons.append(svar[v.name] >= v.lb)
        if v.ub is not None:
            cons.append(svar[v.name] <= v.ub)
    for c in prog.matrix_constraints:
        m = mexpr(c.expr)
        cons.append(m == 0 if c.kind == "zero" else m >> 0)
    for c in prog.scalar_constraints:
        s = sexpr(c.expr)
        if c.kind == "eq":
            cons.append(s == 0)
        elif c.kind == "le":
            cons.append(s <= 0)
        else:
            cons.append(s >= 0)

    objective = sexpr(prog.objective)
    problem = cp.Problem(
        cp.Maximize(objective) if prog.sense == "maximize" else cp.Minimize(objective), cons
    )

    def snapshot(status: str, backend: str) -> Solution:
        info = {
            "backend": backend,
            "solver_status": status,
            "solve_time": problem.solver_stats.solve_time if problem.solver_stats else None,
        }
        if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            return Solution("infeasible", None, info=info)
        if status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
            return Solution("unbounded", None, info=info)
        if problem.value is None:
            return Solution("numerical_failure", None, info=info)
        sol = Solution("optimal", float(problem.value), info=info)
        for nm, v in svar.items():
            sol.scalars[nm] = float(v.value)
        for nm, v in bvar.items():
            val = np.asarray(v.value, dtype=complex)
            sol.blocks[nm] = (val + val.conj().T) / 2
        for nm, v in vvar.items():
            sol.vecs[nm] = np.asarray(v.value, dtype=float)
        for idx, c in enumerate(cons):
            if c.dual_value is not None:
                sol.duals[idx] = c.dual_value
        sol.info["primal_residual"] = primal_residual(prog, sol)
        sol.info["accurate"] = status == cp.OPTIMAL
        return sol

    clarabel_opts = {
        "tol_gap_abs": solver_eps,
        "tol_gap_rel": solver_eps,
        "tol_feas": solver_eps,
    }
    if max_iters is not None:
        clarabel_opts["max_iter"] = max_iters
    # The SCS retry is time-boxed so a stalled interior-point run on a large
    # block-diagonal instance cannot blow the runtime budget.
    scs_opts = {"eps": max(solver_eps, 1e-9), "max_iters": max_iters or 100_000, "time_limit_secs": 600}
    attempts = [(cp.CLARABEL, clarabel_opts), (cp.SCS, scs_opts)]

    best: Solution | None = None
    for solver, opts in attempts:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # inaccuracy is re-checked below
                problem.solve(solver=solver, **opts)
        except cp.error.SolverError:
            continue
        sol = snapshot(problem.status, str(solver))
        if sol.status in ("infeasible", "unbounded"):
            return sol
        if sol.status == "optimal" and sol.info["accurate"]:
            return sol
        if sol.status == "optimal":
            res = sol.info["primal_residual"]
            if best is None or res < best.info.get("primal_residual", np.inf):
                best = sol
    if best is not None:
        # An inaccurate flag with verified-tiny residuals is still usable; a
        # large residual is surfaced as a failure, never as a verdict.
        if best.info["primal_residual"] <= 1e-6:
            return best
        return Solution("numerical_failure", None, info=best.info)
    return Solution("numerical_failure", None, info={"backend": "none"})


def solve(
    prog: ConicProgram,
    solver_eps: float | None = None,
    max_iters: int | None = None,
    config: RunConfig = DEFAULT_CONFIG,
) -> Solution:
    """Solve a conic program; status is always explicit in the result."""
    prog.validate()
    eps = solver_eps if solver_eps is not None else config.solver_eps
    iters = max_iters if max_iters is not None else config.max_iters
    if _is_pure_lp(prog):
        sol = _solve_lp(prog)
    else:
        sol = _solve_sdp(prog, eps, iters)
    if sol.status == "optimal" and "primal_residual" not in sol.info:
        sol.info["primal_residual"] = primal_residual(prog, sol)
    return sol


def check_duality_gap(primal: Solution, dual: Solution) -> float:
    """Gap = dual objective - primal objective; weak duality demands >= -1e-6."""
    if primal.status != "optimal" or dual.status != "optimal":
        raise ValueError("duality gap requires two optimal solutions")
    return float(dual.objective - primal.objective)


def farkas_certificate(
    a_eq: np.ndarray, b_eq: np.ndarray, tol: float = 1e-9
) -> np.ndarray | None:
    """Certificate z with ``A^T z <= 0`` and ``b . z > 0`` for infeasible ``{x>=0: Ax=b}``.

    Solved via the alternative system (coefficients boxed to [-1, 1] to fix
    the scale); returns None when no certificate exists, i.e. the primal
    system is feasible.
    """
    a_eq = np.asarray(a_eq, dtype=float)
    b_eq = np.asarray(b_eq, dtype=float)
    m = a_eq.shape[0]
    res = linprog(
        -b_eq,
        A_ub=a_eq.T,
        b_ub=np.zeros(a_eq.shape[1]),
        bounds=[(-1.0, 1.0)] * m,
        method="highs",
    )
    if res.status != 0 or res.x is None:
        raise SolverFailure(f"alternative-system LP failed: {res.message}")
    z = np.asarray(res.x)
    if b_eq @ z <= tol:
        return None
    return z
