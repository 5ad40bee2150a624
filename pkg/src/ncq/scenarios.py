"""Structural transforms: flag-convexification, source/state-set reductions, steering."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .operators import (
    GOLDEN,
    MultiMeasurement,
    MultiSource,
    StateSet,
    assert_hermitian,
    bloch_state,
    is_psd,
    platonic_vertices,
)


@dataclass(frozen=True)
class BipartiteState:
    """Density operator on a (dim_a x dim_b) product space."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray
    config: RunConfig = field(default=DEFAULT_CONFIG, repr=False, compare=False)

    def __post_init__(self):
        m = assert_hermitian(self.matrix, self.config.herm_tol, "bipartite state")
        if m.shape != (self.dim_a * self.dim_b,) * 2:
            raise ValueError("matrix shape does not match dim_a * dim_b")
        if not is_psd(m, self.config.psd_tol):
            raise ValueError("bipartite state is not positive semidefinite")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError("bipartite state must have unit trace")
        m = np.array(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def flag_convexify_measurement(meas: MultiMeasurement, dist=None) -> MultiMeasurement:
    """Collapse settings into outcomes: effects ``dist(y) M_{b|y}`` indexed by (b, y).

    ``dist`` defaults to uniform and must have full support over settings.
    """
    ny = meas.n_settings
    if dist is None:
        dist = np.full(ny, 1.0 / ny)
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (ny,) or abs(dist.sum() - 1.0) > 1e-12:
        raise ValueError("dist must be a probability distribution over settings")
    if np.min(dist) <= 0:
        raise ValueError("flag-convexification needs a full-support distribution")
    effects = tuple(dist[y] * m for y, setting in enumerate(meas.settings) for m in setting)
    return MultiMeasurement(dim=meas.dim, settings=(effects,), config=meas.config)


def multisource_to_state_set(source: MultiSource, dedup_tol: float = 1e-10) -> StateSet:
    """Deduplicated normalized states of a multi-source; weights are dropped.

    Zero-weight elements carry no operational content and are skipped with a
    warning.
    """
    kept: list[np.ndarray] = []
    for x in range(source.n_settings):
        for a, (w, rho) in enumerate(zip(source.weights[x], source.states[x])):
            if w <= 1e-14:
                warnings.warn(f"skipping zero-weight element ({a}|{x}) of the multi-source")
                continue
            if not any(_trace_distance(rho, s) <= dedup_tol for s in kept):
                kept.append(np.asarray(rho))
    if not kept:
        raise ValueError("multi-source has no nonzero-weight elements")
    return StateSet(source.dim, tuple(kept), config=source.config)


def _trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    diff = np.asarray(a) - np.asarray(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def uniform_rescale_state_set(states: StateSet) -> MultiSource:
    """Attach uniform weights 1/k: the single-setting source over the set."""
    return MultiSource.uniform_ensemble(states)


def isotropic_state(eta: float) -> BipartiteState:
    """Two-qubit maximally entangled state mixed with white noise.

    ``eta |phi><phi| + (1 - eta) 1/4`` with ``|phi> = (|00> + |11>)/sqrt(2)``;
    the noise term is the maximally mixed two-qubit state so the result has
    unit trace.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    mat = eta * np.outer(phi, phi.conj()) + (1 - eta) * np.eye(4) / 4
    return BipartiteState(2, 2, mat)


def steer(rho_ab: BipartiteState, meas_a: MultiMeasurement) -> MultiSource:
    """Assemblage on B from measuring A: ``p(a|x) rho_{a|x} = Tr_A[(N_{a|x} x 1) rho]``.

    The output satisfies no-signaling: ``sum_a p(a|x) rho_{a|x}`` is the
    reduced state of B for every setting x.
    """
    if meas_a.dim != rho_ab.dim_a:
        raise ValueError("measurement dimension does not match subsystem A")
    da, db = rho_ab.dim_a, rho_ab.dim_b
    rho = rho_ab.matrix.reshape(da, db, da, db)
    weights, states = [], []
    for setting in meas_a.settings:
        ws, rhos = [], []
        for eff in setting:
            # Tr_A[(N x 1) rho] = sum_{ij} N_ij rho[j, :, i, :]
            sub = np.einsum("ij,jbid->bd", np.asarray(eff, complex), rho)
            p = float(np.trace(sub).real)
            if p < 1e-14:
                ws.append(0.0)
                rhos.append(np.eye(db, dtype=complex) / db)
                continue
            ws.append(p)
            rhos.append(sub / p)
        total = sum(ws)
        ws = [w / total for w in ws]  # guard rounding; total == 1 for a POVM
        weights.append(tuple(ws))
        states.append(tuple(rhos))
    out = MultiSource(dim=db, weights=tuple(weights), states=tuple(states), labels=meas_a.labels)
    _check_no_signaling(out)
    return out


def _check_no_signaling(source: MultiSource, tol: float = 1e-10) -> None:
    reduced = []
    for ws, rhos in zip(source.weights, source.states):
        reduced.append(sum(w * r for w, r in zip(ws, rhos)))
    for r in reduced[1:]:
        if np.max(np.abs(r - reduced[0])) > tol:
            raise ValueError("steered assemblage violates no-signaling")


# ---------------------------------------------------------------------------
# Axis families for the steering scenarios
# ---------------------------------------------------------------------------

def icosahedron_axes() -> np.ndarray:
    """Six axis representatives of the icosahedron; the first three are
    [-1,-q,0], [-q,0,1], [-q,0,-1] (normalized), fixing the labeling used by
    the packaged steering inequality."""
    q = GOLDEN
    reps = [
        [-1.0, -q, 0.0],
        [-q, 0.0, 1.0],
        [-q, 0.0, -1.0],
        [1.0, -q, 0.0],
        [0.0, -1.0, -q],
        [0.0, -1.0, q],
    ]
    reps = [np.asarray(v) / np.linalg.norm(v) for v in reps]
    _assert_axes_cover(reps, platonic_vertices("icosahedron"))
    return np.array(reps)


def dodecahedron_axes() -> np.ndarray:
    """Ten axis representatives of the dodecahedron; the first four are
    [-1,-1,-1], [-q,1/q,0], [-q,-1/q,0], [-1,-1,1] (normalized)."""
    q = GOLDEN
    reps = [
        [-1.0, -1.0, -1.0],
        [-q, 1.0 / q, 0.0],
        [-q, -1.0 / q, 0.0],
        [-1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0],
        [0.0, -q, 1.0 / q],
        [0.0, -q, -1.0 / q],
        [1.0 / q, 0.0, -q],
        [-1.0 / q, 0.0, -q],
    ]
    reps = [np.asarray(v) / np.linalg.norm(v) for v in reps]
    _assert_axes_cover(reps, platonic_vertices("dodecahedron"))
    return np.array(reps)


def _assert_axes_cover(reps, vertices) -> None:
    covered = []
    for r in reps:
        hits = [i for i, v in enumerate(vertices) if np.allclose(v, r, atol=1e-12) or np.allclose(v, -r, atol=1e-12)]
        if len(hits) != 2:
            raise AssertionError("axis representative is not an antipodal vertex pair")
        covered.extend(hits)
    if sorted(covered) != list(range(len(vertices))):
        raise AssertionError("axis representatives do not cover the solid")


def axis_multimeasurement(axes: np.ndarray, transpose: bool = False) -> MultiMeasurement:
    """Two-outcome qubit measurements ``{(1 +/- n.sigma)/2}`` per axis.

    With ``transpose`` the effects are transposed (Bloch y component flips),
    as used on the measured side of the steering scenarios.
    """
    settings = []
    for n in axes:
        plus, minus = bloch_state(n), bloch_state(-n)
        if transpose:
            plus, minus = plus.T, minus.T
        settings.append((plus, minus))
    return MultiMeasurement(dim=2, settings=tuple(settings))


def icosahedron_steering_source(eta: float) -> MultiSource:
    """Assemblage from icosahedron-axis measurements on the noisy entangled state."""
    return steer(isotropic_state(eta), axis_multimeasurement(icosahedron_axes()))
