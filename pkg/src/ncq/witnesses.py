"""Witness construction from dual certificates, noncontextual-model LPs with
Farkas-certificate inequalities, inequality evaluation, and explicit
ontological-model verification."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .config import DEFAULT_CONFIG, RunConfig
from .conic import ConicProgram, NonnegVec, ScalarConstraint, ScalarExpr
from .identities import IdentitySpace
from .operators import GOLDEN, Behavior, MultiMeasurement, StateSet
from .polytope import VertexSet


# ---------------------------------------------------------------------------
# Theory-dependent witnesses from dual certificates
# ---------------------------------------------------------------------------

def _clip_psd(mat: np.ndarray) -> np.ndarray:
    """Project onto the PSD cone (adds a PSD correction, preserving dual feasibility)."""
    m = (np.asarray(mat, complex) + np.asarray(mat, complex).conj().T) / 2
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return (vecs * vals) @ vecs.conj().T


@dataclass(frozen=True)
class MeasurementWitness:
    """States and positive weights; classical measurements sharing the target's
    operational identities satisfy ``sum_j w_j Tr[rho_j M_{kept_j}] >= 1``."""

    states: StateSet
    weights: np.ndarray
    kept: tuple[int, ...]
    threshold: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.states),) or len(self.kept) != len(self.states):
            raise ValueError("weights/kept must have one entry per witness state")
        if np.min(w) <= 0:
            raise ValueError("witness weights must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def witness_from_dual_measurement(
    dual_certificate, config: RunConfig = DEFAULT_CONFIG
) -> MeasurementWitness:
    """Renormalize fraction-dual operators {F_i} into witness states.

    ``w_i = Tr F_i`` and ``rho_i = F_i / w_i``; zero-trace operators are
    dropped with a warning since they contribute nothing.
    """
    states, weights, kept = [], [], []
    for i, f in enumerate(dual_certificate):
        f = _clip_psd(f)
        tr = float(np.trace(f).real)
        if tr <= 1e-12:
            warnings.warn(f"dropping zero-trace witness operator {i}")
            continue
        states.append(f / tr)
        weights.append(tr)
        kept.append(i)
    if not states:
        raise ValueError("all-zero dual certificate provides no witness")
    dim = states[0].shape[0]
    return MeasurementWitness(StateSet(dim, tuple(states), config=config), np.array(weights), tuple(kept))


def evaluate_measurement_witness(
    witness: MeasurementWitness, meas: MultiMeasurement, config: RunConfig = DEFAULT_CONFIG
) -> tuple[float, str]:
    """Witness value on a measurement; below threshold certifies nonclassicality."""
    if witness.states.dim != meas.dim:
        raise ValueError("witness and measurement dimensions do not match")
    effects = meas.effects_flat()
    value = 0.0
    for rho, w, idx in zip(witness.states.states, witness.weights, witness.kept):
        value += w * float(np.trace(rho @ effects[idx]).real)
    verdict = "nonclassical" if value < witness.threshold - config.wit_tol else "no-violation"
    return value, verdict


@dataclass(frozen=True)
class StateWitness:
    """Two-outcome tests {T_a, 1 - T_a} with 0 <= T_a <= 1 and positive weights;
    classical state sets satisfy ``sum_a w_a Tr[T_a rho_a] >= 1``."""

    tests: tuple[np.ndarray, ...]
    weights: np.ndarray
    kept: tuple[int, ...]
    threshold: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.tests),) or len(self.kept) != len(self.tests):
            raise ValueError("weights/kept must match the tests")
        for t in self.tests:
            vals = np.linalg.eigvalsh(np.asarray(t, complex))
            if vals[0] < -1e-9 or vals[-1] > 1 + 1e-9:
                raise ValueError("witness tests must satisfy 0 <= T <= 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def witness_from_dual_states(dual_certificate, config: RunConfig = DEFAULT_CONFIG) -> StateWitness:
    """Rescale fraction-dual operators {F_a} into two-outcome tests.

    The dual's vertex constraint is normalized against the identity, so each
    operator is first divided by the number of states; the per-test weight is
    its largest eigenvalue, making ``T_a = F_a / (k w_a)`` satisfy T_a <= 1.
    """
    k = len(dual_certificate)
    tests, weights, kept = [], [], []
    for a, f in enumerate(dual_certificate):
        f = _clip_psd(f) / k
        top = float(np.linalg.eigvalsh(f)[-1])
        if top <= 1e-12:
            warnings.warn(f"dropping zero witness operator {a}")
            continue
        tests.append(f / top)
        weights.append(top)
        kept.append(a)
    if not tests:
        raise ValueError("all-zero dual certificate provides no witness")
    return StateWitness(tuple(tests), np.array(weights), tuple(kept))


def evaluate_state_witness(
    witness: StateWitness, states: StateSet, config: RunConfig = DEFAULT_CONFIG
) -> tuple[float, str]:
    """Witness value on a state set; below threshold certifies nonclassicality."""
    value = 0.0
    for t, w, idx in zip(witness.tests, witness.weights, witness.kept):
        value += w * float(np.trace(t @ states.states[idx]).real)
    verdict = "nonclassical" if value < witness.threshold - config.wit_tol else "no-violation"
    return value, verdict


# ---------------------------------------------------------------------------
# Noncontextuality inequalities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NCInequality:
    """Linear functional on a behavior table with a bound.

    ``sense`` is "<=" when noncontextual behaviors obey lhs <= bound and
    ">=" when they obey lhs >= bound.
    """

    coeffs: np.ndarray  # same shape as the behavior table (A, B, X, Y)
    bound: float
    sense: str
    label: str = ""

    def __post_init__(self):
        if self.sense not in ("<=", ">="):
            raise ValueError("sense must be '<=' or '>='")
        c = np.asarray(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "nc_inequality",
            "label": self.label,
            "sense": self.sense,
            "bound": self.bound,
            "shape": list(self.coeffs.shape),
            "coeffs": self.coeffs.reshape(-1).tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "NCInequality":
        shape = tuple(int(s) for s in data["shape"])
        return cls(
            np.asarray(data["coeffs"], dtype=float).reshape(shape),
            float(data["bound"]),
            data["sense"],
            data.get("label", ""),
        )

    def pretty(self) -> str:
        na, _, _, ny = self.coeffs.shape
        terms = []
        for idx in np.argwhere(np.abs(self.coeffs) > 1e-12):
            a, b, x, y = idx
            c = self.coeffs[tuple(idx)]
            if na == 1 and ny == 1:
                terms.append(f"{c:+.6g} p({b}|{x})")  # conditional form for one-outcome sources
            else:
                terms.append(f"{c:+.6g} p({a}{b}|{x}{y})")
        return f"{self.label or 'inequality'}: " + " ".join(terms) + f" {self.sense} {self.bound:.6g}"


def evaluate_inequality(ineq: NCInequality, beh: Behavior) -> tuple[float, bool]:
    """Plug a behavior into the inequality; returns (lhs, satisfied)."""
    if ineq.coeffs.shape != beh.table.shape:
        raise ValueError(
            f"inequality shape {ineq.coeffs.shape} does not match behavior shape {beh.table.shape}"
        )
    lhs = float(np.sum(ineq.coeffs * beh.table))
    tol = 1e-12
    satisfied = lhs <= ineq.bound + tol if ineq.sense == "<=" else lhs >= ineq.bound - tol
    return lhs, satisfied


def pentagon_inequality() -> NCInequality:
    """Five-preparation bound violated by the noiseless pentagon measurement.

    Stated on conditionals p(b|x) in a scenario with five deterministic
    preparations (one per setting) and one five-outcome measurement.
    """
    q = GOLDEN
    c = np.zeros((1, 5, 5, 1))
    c[0, 1, 0, 0] = q
    c[0, 1, 2, 0] = q
    c[0, 2, 0, 0] = q - 1
    c[0, 0, 2, 0] = 1.0
    c[0, 1, 1, 0] = -(q + 1)
    return NCInequality(c, 0.0, ">=", "pentagon")


def rotated_pentagon_inequality() -> NCInequality:
    """Tight five-preparation bound for the rotated pentagon preparations;
    violated exactly when the noisy pentagon measurement is nonclassical."""
    q = GOLDEN
    c = np.zeros((1, 5, 5, 1))
    c[0, 3, 0, 0] = 1.0
    c[0, 1, 0, 0] = q - 1
    c[0, 0, 0, 0] = -1.0
    c[0, 0, 1, 0] = q
    c[0, 1, 1, 0] = -1.0
    c[0, 1, 3, 0] = 1.0
    return NCInequality(c, 0.0, ">=", "rotated-pentagon")


def icosahedron_dodecahedron_inequality() -> NCInequality:
    """Steering-scenario bound for six icosahedron-axis sources and ten
    dodecahedron-axis measurements.

    The coefficients act on the joint table; the source side weights each
    outcome 1/2, so entries are doubled relative to the conditional form.
    Noncontextual behaviors stay at or below 1/q^2 (golden ratio q).
    """
    c = np.zeros((2, 2, 6, 10))
    for x, y in ((0, 2), (1, 2), (2, 2)):
        c[0, 0, x, y] = 2.0
    for x, y in ((0, 1), (1, 0), (2, 3)):
        c[0, 0, x, y] = -2.0
    return NCInequality(c, 1.0 / GOLDEN**2, "<=", "icosahedron-dodecahedron")


# ---------------------------------------------------------------------------
# Noncontextual-model linear program
# ---------------------------------------------------------------------------

@dataclass
class NCModelResult:
    feasible: bool
    weights: np.ndarray | None = None       # nu(kappa, lambda) when feasible
    inequality: NCInequality | None = None  # Farkas certificate when infeasible
    violation: float | None = None          # margin by which the input violates it
    diagnostics: dict = field(default_factory=dict)


def _model_matrix(beh: Behavior, v_prep: VertexSet, v_meas: VertexSet):
    a_max, b_max, nx, ny = beh.table.shape
    if len(v_prep.layout.groups) != nx:
        raise ValueError("preparation vertex layout does not match the behavior's settings")
    if len(v_meas.layout.groups) != ny:
        raise ValueError("measurement vertex layout does not match the behavior's settings")
    for x, (_, cnt) in enumerate(v_prep.layout.groups):
        if cnt != beh.a_counts[x]:
            raise ValueError(f"preparation outcome count mismatch at setting {x}")
    for y, (_, cnt) in enumerate(v_meas.layout.groups):
        if cnt != beh.b_counts[y]:
            raise ValueError(f"measurement outcome count mismatch at setting {y}")
    rows, rhs, labels = [], [], []
    kp, km = v_prep.count, v_meas.count
    for x in range(nx):
        for a in range(beh.a_counts[x]):
            pcol = v_prep.vertices[:, v_prep.layout.flat(a, x)]
            for y in range(ny):
                for b in range(beh.b_counts[y]):
                    mcol = v_meas.vertices[:, v_meas.layout.flat(b, y)]
                    rows.append(np.outer(pcol, mcol).reshape(-1))
                    rhs.append(beh.table[a, b, x, y])
                    labels.append((a, b, x, y))
    return np.array(rows), np.array(rhs), labels, kp * km


def nc_model_lp(
    beh: Behavior,
    v_prep: VertexSet,
    v_meas: VertexSet,
    config: RunConfig = DEFAULT_CONFIG,
) -> NCModelResult:
    """Decide whether the behavior factors through vertex pairs.

    Feasibility of ``nu >= 0`` with
    ``sum_{kl} nu(k,l) D_prep(a|x,k) D_meas(b|y,l) = p(ab|xy)`` returns the
    model; infeasibility returns a Farkas certificate rendered as an
    inequality every noncontextual behavior of the scenario satisfies and
    this behavior violates.
    """
    if v_prep.count == 0 or v_meas.count == 0:
        raise ValueError("empty vertex set")
    a_mat, b_vec, labels, n_nu = _model_matrix(beh, v_prep, v_meas)
    prog = ConicProgram(name="nc-model", sense="minimize", objective=ScalarExpr())
    prog.vecs.append(NonnegVec("nu", n_nu))
    for i in range(a_mat.shape[0]):
        prog.scalar_constraints.append(
            ScalarConstraint(ScalarExpr(const=-b_vec[i], vec_terms={"nu": a_mat[i]}), "eq", str(labels[i]))
        )
    sol = conic.solve(prog, config=config)
    if sol.status == "optimal":
        nu = sol.vecs["nu"].reshape(v_prep.count, v_meas.count)
        return NCModelResult(True, weights=nu, diagnostics={"residual": sol.info.get("primal_residual")})
    if sol.status != "infeasible":
        raise conic.SolverFailure(f"nc_model_lp: solver returned {sol.status}")

    z = conic.farkas_certificate(a_mat, b_vec)
    if z is None:
        raise conic.SolverFailure("LP reported infeasible but no Farkas certificate exists")
    # Normalize: largest |coefficient| = 1, drop numerical dust.
    z = z / np.max(np.abs(z))
    z[np.abs(z) < 1e-10] = 0.0
    coeffs = np.zeros(beh.table.shape)
    for zi, (a, b, x, y) in zip(z, labels):
        coeffs[a, b, x, y] = zi
    ineq = NCInequality(coeffs, 0.0, "<=", "farkas-certificate")
    violation = float(z @ b_vec)
    cone_slack = float(np.max(a_mat.T @ z))
    return NCModelResult(
        False,
        inequality=ineq,
        violation=violation,
        diagnostics={"cone_slack": cone_slack},
    )


def sample_noncontextual_tables(
    beh_shape: tuple[int, int, int, int],
    v_prep: VertexSet,
    v_meas: VertexSet,
    n_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Random points of the noncontextual cone (random nu over vertex pairs)."""
    kp, km = v_prep.count, v_meas.count
    a_max, b_max, nx, ny = beh_shape
    out = np.zeros((n_samples, a_max, b_max, nx, ny))
    prep_cols = np.zeros((kp, a_max, nx))
    for x, (_, cnt) in enumerate(v_prep.layout.groups):
        for a in range(cnt):
            prep_cols[:, a, x] = v_prep.vertices[:, v_prep.layout.flat(a, x)]
    meas_cols = np.zeros((km, b_max, ny))
    for y, (_, cnt) in enumerate(v_meas.layout.groups):
        for b in range(cnt):
            meas_cols[:, b, y] = v_meas.vertices[:, v_meas.layout.flat(b, y)]
    for s in range(n_samples):
        nu = rng.dirichlet(np.ones(kp * km)).reshape(kp, km)
        out[s] = np.einsum("kl,kax,lby->abxy", nu, prep_cols, meas_cols)
    return out


# ---------------------------------------------------------------------------
# Ontological models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OntologicalModel:
    """Finite ontic-state model: epistemic distributions per preparation and
    response functions per measurement outcome.

    ``epistemic[p, l]`` is the weight of ontic state l for flat preparation p;
    ``responses[m, l]`` the response of flat measurement outcome m.
    ``meas_outcome_counts`` delimits settings for response normalization.
    """

    epistemic: np.ndarray
    responses: np.ndarray
    meas_outcome_counts: tuple[int, ...]

    def __post_init__(self):
        e = np.asarray(self.epistemic, dtype=float)
        r = np.asarray(self.responses, dtype=float)
        if e.ndim != 2 or r.ndim != 2 or e.shape[1] != r.shape[1]:
            raise ValueError("epistemic and response tables must share the ontic index")
        if np.min(e) < -1e-12 or np.max(np.abs(e.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("epistemic rows must be probability distributions")
        if np.min(r) < -1e-12 or np.max(r) > 1 + 1e-12:
            raise ValueError("responses must lie in [0, 1]")
        if sum(self.meas_outcome_counts) != r.shape[0]:
            raise ValueError("meas_outcome_counts does not match response rows")
        off = 0
        for cnt in self.meas_outcome_counts:
            if np.max(np.abs(r[off : off + cnt].sum(axis=0) - 1.0)) > 1e-12:
                raise ValueError("responses must be normalized per setting and ontic state")
            off += cnt
        for arr in (e, r):
            arr.setflags(write=False)
        object.__setattr__(self, "epistemic", e)
        object.__setattr__(self, "responses", r)

    @property
    def n_ontic(self) -> int:
        return self.epistemic.shape[1]


def verify_ontological_model(
    model: OntologicalModel,
    beh: Behavior,
    prep_space: IdentitySpace,
    meas_space: IdentitySpace,
    tol: float = 1e-10,
) -> dict:
    """Check statistics reproduction and both ontological identity families.

    The source weights p(a|x) are recovered from the behavior's marginals.
    Returns per-check residuals and an overall flag.
    """
    a_max, b_max, nx, ny = beh.table.shape
    if model.epistemic.shape[0] != prep_space.layout.size:
        raise ValueError("epistemic table does not match the preparation layout")
    if model.responses.shape[0] != meas_space.layout.size:
        raise ValueError("response table does not match the measurement layout")

    weights = np.zeros((a_max, nx))
    for x in range(nx):
        for a in range(beh.a_counts[x]):
            weights[a, x] = beh.table[a, :, x, 0].sum()

    stat_res = 0.0
    for x in range(nx):
        for a in range(beh.a_counts[x]):
            joint = weights[a, x] * model.epistemic[prep_space.layout.flat(a, x)]
            for y in range(ny):
                for b in range(beh.b_counts[y]):
                    pred = float(joint @ model.responses[meas_space.layout.flat(b, y)])
                    stat_res = max(stat_res, abs(pred - beh.table[a, b, x, y]))

    joint_table = np.zeros((prep_space.layout.size, model.n_ontic))
    for x in range(nx):
        for a in range(beh.a_counts[x]):
            i = prep_space.layout.flat(a, x)
            joint_table[i] = weights[a, x] * model.epistemic[i]
    prep_res = 0.0
    for alpha in prep_space.basis:
        prep_res = max(prep_res, float(np.max(np.abs(alpha @ joint_table))))
    meas_res = 0.0
    for beta in meas_space.basis:
        meas_res = max(meas_res, float(np.max(np.abs(beta @ model.responses))))

    return {
        "statistics": stat_res,
        "preparation_identities": prep_res,
        "measurement_identities": meas_res,
        "ok": max(stat_res, prep_res, meas_res) <= tol,
    }
