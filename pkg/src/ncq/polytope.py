"""Noncontextual assignment polytopes and their extreme points."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .identities import IdentitySpace, IndexLayout, snapped_basis
from .operators import MultiMeasurement, MultiSource, StateSet


class EnumerationCapExceeded(RuntimeError):
    """Raised when vertex enumeration would exceed the candidate-basis budget."""


@dataclass(frozen=True)
class AssignmentPolytope:
    """H-representation: ``eq_coeffs @ p = eq_rhs`` and ``p >= 0``.

    The first ``n_norm_rows`` equality rows are the per-setting normalization
    constraints; the rest come from operational identities.
    ``interior_point`` is a feasibility anchor (the statistics of the
    maximally mixed state or the weighted-uniform source distribution).
    """

    layout: IndexLayout
    eq_coeffs: np.ndarray
    eq_rhs: np.ndarray
    n_norm_rows: int
    interior_point: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.eq_coeffs, dtype=float)
        b = np.asarray(self.eq_rhs, dtype=float)
        p = np.asarray(self.interior_point, dtype=float)
        if a.ndim != 2 or a.shape[1] != self.layout.size or a.shape[0] != b.shape[0]:
            raise ValueError("equality system shape mismatch")
        if p.shape != (self.layout.size,):
            raise ValueError("interior point has the wrong length")
        if np.max(np.abs(a @ p - b)) > 1e-9 or np.min(p) < -1e-12:
            raise ValueError("stored interior point is not feasible")
        for arr in (a, b, p):
            arr.setflags(write=False)
        object.__setattr__(self, "eq_coeffs", a)
        object.__setattr__(self, "eq_rhs", b)
        object.__setattr__(self, "interior_point", p)

    @property
    def n_vars(self) -> int:
        return self.layout.size

    def residual(self, point: np.ndarray) -> float:
        """Max violation of equalities and nonnegativity at ``point``."""
        point = np.asarray(point, dtype=float)
        eq = np.max(np.abs(self.eq_coeffs @ point - self.eq_rhs)) if len(self.eq_rhs) else 0.0
        return float(max(eq, -min(np.min(point), 0.0)))

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "assignment_polytope",
            "layout": self.layout.to_json_dict(),
            "eq_coeffs": [row.tolist() for row in self.eq_coeffs],
            "eq_rhs": self.eq_rhs.tolist(),
            "n_norm_rows": self.n_norm_rows,
            "interior_point": self.interior_point.tolist(),
        }


@dataclass(frozen=True)
class VertexSet:
    """Extreme points ``D(.|lambda)`` of an assignment polytope, one per row."""

    layout: IndexLayout
    vertices: np.ndarray  # (count, n_vars)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.layout.size:
            raise ValueError("vertex array does not match layout size")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def count(self) -> int:
        return self.vertices.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "vertex_set",
            "layout": self.layout.to_json_dict(),
            "vertices": [row.tolist() for row in self.vertices],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "VertexSet":
        layout = IndexLayout.from_json_dict(data["layout"])
        return cls(layout, np.asarray(data["vertices"], dtype=float).reshape(-1, layout.size))


def _assemble(
    layout: IndexLayout,
    identities: IdentitySpace,
    norm_rhs: np.ndarray,
    interior: np.ndarray,
    snap_rational: bool,
) -> AssignmentPolytope:
    n = layout.size
    rows, rhs = [], []
    for off, (_, cnt) in zip(layout.offsets, layout.groups):
        r = np.zeros(n)
        r[off : off + cnt] = 1.0
        rows.append(r)
    rhs.extend(norm_rhs)
    n_norm = len(rows)
    id_rows = snapped_basis(identities) if snap_rational else identities.basis
    for row in id_rows:
        rows.append(row)
        rhs.append(0.0)
    return AssignmentPolytope(layout, np.array(rows), np.array(rhs), n_norm, interior)


def build_measurement_polytope(
    meas: MultiMeasurement,
    identities: IdentitySpace,
    *,
    snap_rational: bool = False,
) -> AssignmentPolytope:
    """Constraints (positivity, per-setting normalization, identities) on p(b|y)."""
    layout = identities.layout
    if identities.side != "measurement" or layout.groups != tuple(zip(meas.labels, meas.outcome_counts)):
        raise ValueError("identity space was not computed from this multi-measurement")
    d = meas.dim
    interior = np.array([np.trace(e).real / d for e in meas.effects_flat()])
    norm_rhs = np.ones(meas.n_settings)
    return _assemble(layout, identities, norm_rhs, interior, snap_rational)


def build_preparation_polytope(
    obj: StateSet | MultiSource,
    identities: IdentitySpace,
    *,
    snap_rational: bool = False,
) -> AssignmentPolytope:
    """Constraints on p(a): positivity, total normalization, identities.

    For a StateSet this is the polytope of the uniformly rescaled family; for
    a MultiSource the flat (a, x) layout is used with a single normalization
    row, and the weighted-uniform distribution anchors feasibility.
    """
    layout = identities.layout
    if identities.side != "preparation":
        raise ValueError("identity space is not preparation-sided")
    n = layout.size
    if isinstance(obj, StateSet):
        if n != len(obj):
            raise ValueError("identity space does not match this state set")
        interior = np.full(n, 1.0 / n)
    else:
        if layout.groups != tuple(zip(obj.labels, obj.outcome_counts)):
            raise ValueError("identity space does not match this multi-source")
        nx = obj.n_settings
        interior = np.array([w for ws in obj.weights for w in ws]) / nx
    # Single normalization row over all variables.
    rows = [np.ones(n)]
    rhs = [1.0]
    id_rows = snapped_basis(identities) if snap_rational else identities.basis
    for row in id_rows:
        rows.append(row)
        rhs.append(0.0)
    return AssignmentPolytope(layout, np.array(rows), np.array(rhs), 1, interior)


def enumerate_vertices(
    poly: AssignmentPolytope, config: RunConfig = DEFAULT_CONFIG
) -> VertexSet:
    """All extreme points, by exhaustive basic-feasible-solution search.

    Every choice of ``n_vars - rank`` coordinates pinned to zero that
    completes the equality system to full column rank yields one candidate;
    feasible candidates are deduplicated and ordered lexicographically on
    coordinates rounded to 12 decimals.
    """
    a, b = poly.eq_coeffs, poly.eq_rhs
    n = poly.n_vars
    sv = np.linalg.svd(a, compute_uv=False) if a.size else np.zeros(0)
    rank_tol = (sv[0] * max(a.shape) * 1e-12) if sv.size else 0.0
    rank = int(np.sum(sv > rank_tol))
    n_free = n - rank
    if n_free < 0:
        raise ValueError("equality system overdetermines the polytope")
    n_candidates = comb(n, n_free)
    if n_candidates > config.enum_cap:
        raise EnumerationCapExceeded(
            f"enumeration needs {n_candidates} candidate bases, cap is {config.enum_cap}"
        )

    found: list[np.ndarray] = []
    for zero_set in combinations(range(n), n_free):
        keep = [j for j in range(n) if j not in zero_set]
        sub = a[:, keep]
        if keep:
            sub_sv = np.linalg.svd(sub, compute_uv=False)
            if sub_sv.size < len(keep) or sub_sv[-1] <= rank_tol:
                continue  # pinned set does not determine a unique point
            x_keep, *_ = np.linalg.lstsq(sub, b, rcond=None)
            if np.max(np.abs(sub @ x_keep - b)) > config.vert_tol:
                continue
        else:
            x_keep = np.zeros(0)
        x = np.zeros(n)
        x[keep] = x_keep
        if np.min(x) < -config.vert_tol:
            continue
        if not any(np.max(np.abs(x - v)) <= config.dedup_tol for v in found):
            found.append(x)

    if not found:
        raise ValueError("polytope is empty: inconsistent constraint system")
    order = sorted(range(len(found)), key=lambda i: tuple(np.round(found[i], 12)))
    return VertexSet(poly.layout, np.array([found[i] for i in order]))


def simplex_product_vertices(poly: AssignmentPolytope) -> VertexSet | None:
    """Deterministic vertices when identities reduce to normalization differences.

    Applies when every identity row lies in the span of differences of the
    normalization rows, so the polytope is a product of simplices (one factor
    per normalization row); returns None otherwise.
    """
    norm = poly.eq_coeffs[: poly.n_norm_rows]
    ident = poly.eq_coeffs[poly.n_norm_rows :]
    supports = [np.flatnonzero(np.abs(row) > 1e-12) for row in norm]
    covered = np.concatenate(supports) if supports else np.zeros(0, dtype=int)
    if len(covered) != poly.n_vars or len(np.unique(covered)) != poly.n_vars:
        return None  # normalization rows must partition the variables
    if any(np.max(np.abs(norm[r][supports[r]] - 1.0)) > 1e-12 for r in range(len(norm))):
        return None
    if len(ident):
        diffs = norm[:-1] - norm[1:] if len(norm) > 1 else np.zeros((0, poly.n_vars))
        if len(diffs) == 0:
            if np.max(np.abs(ident)) > 1e-12:
                return None
        else:
            proj, *_ = np.linalg.lstsq(diffs.T, ident.T, rcond=None)
            if np.max(np.abs(diffs.T @ proj - ident.T)) > 1e-10:
                return None
    scales = poly.eq_rhs[: poly.n_norm_rows]
    vertices: list[np.ndarray] = []
    def rec(r, current):
        if r == len(supports):
            vertices.append(np.array(current))
            return
        for j in supports[r]:
            nxt = list(current)
            nxt[j] = scales[r]
            rec(r + 1, nxt)
    rec(0, [0.0] * poly.n_vars)
    order = sorted(range(len(vertices)), key=lambda i: tuple(np.round(vertices[i], 12)))
    return VertexSet(poly.layout, np.array([vertices[i] for i in order]))


def verify_vertices(poly: AssignmentPolytope, verts: VertexSet, config: RunConfig = DEFAULT_CONFIG) -> float:
    """Max constraint residual over all vertices (for re-verification)."""
    return max(poly.residual(v) for v in verts.vertices)


# ---------------------------------------------------------------------------
# Pipelines: object -> identity space -> polytope -> vertices
# ---------------------------------------------------------------------------

def measurement_vertices(
    meas: MultiMeasurement, config: RunConfig = DEFAULT_CONFIG, *, snap_rational: bool = False
) -> VertexSet:
    from .identities import measurement_identity_space

    space = measurement_identity_space(meas, config)
    poly = build_measurement_polytope(meas, space, snap_rational=snap_rational)
    shortcut = simplex_product_vertices(poly)
    return shortcut if shortcut is not None else enumerate_vertices(poly, config)


def preparation_vertices(
    obj: StateSet | MultiSource, config: RunConfig = DEFAULT_CONFIG, *, snap_rational: bool = False
) -> VertexSet:
    from .identities import preparation_identity_space

    space = preparation_identity_space(obj, config)
    poly = build_preparation_polytope(obj, space, snap_rational=snap_rational)
    shortcut = simplex_product_vertices(poly)
    return shortcut if shortcut is not None else enumerate_vertices(poly, config)
