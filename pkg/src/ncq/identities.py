"""Operational-identity spaces: null spaces of vectorized effect/state families."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .operators import (
    MultiMeasurement,
    MultiSource,
    StateSet,
    hermitian_basis,
    vectorize_many,
)


@dataclass(frozen=True)
class IndexLayout:
    """Flat indexing of outcome/setting pairs.

    ``groups`` holds ``(label, n_outcomes)`` per setting; flat order is all
    outcomes of setting 0, then setting 1, and so on.
    """

    kind: str  # "measurement" or "preparation"
    groups: tuple[tuple[str, int], ...]

    @property
    def size(self) -> int:
        return sum(n for _, n in self.groups)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for _, n in self.groups:
            out.append(acc)
            acc += n
        return tuple(out)

    def flat(self, outcome: int, setting: int) -> int:
        return self.offsets[setting] + outcome

    def pairs(self) -> list[tuple[int, int]]:
        """(outcome, setting) pairs in flat order."""
        return [(b, y) for y, (_, n) in enumerate(self.groups) for b in range(n)]

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "groups": [[lbl, n] for lbl, n in self.groups]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "IndexLayout":
        return cls(kind=data["kind"], groups=tuple((str(l), int(n)) for l, n in data["groups"]))


def measurement_layout(meas: MultiMeasurement) -> IndexLayout:
    return IndexLayout("measurement", tuple(zip(meas.labels, meas.outcome_counts)))


def preparation_layout(obj: StateSet | MultiSource) -> IndexLayout:
    if isinstance(obj, StateSet):
        return IndexLayout("preparation", (("0", len(obj)),))
    return IndexLayout("preparation", tuple(zip(obj.labels, obj.outcome_counts)))


@dataclass(frozen=True)
class IdentitySpace:
    """Orthonormal basis of coefficient vectors annihilating the operator family.

    Every basis row ``beta`` satisfies ``|| sum_i beta_i vec(O_i) || <= null_tol``
    with the operators taken in the layout's flat order; ``vectors`` stores
    those real operator coordinates for residual checks and serialization.
    """

    side: str
    layout: IndexLayout
    basis: np.ndarray          # (rank, n) orthonormal rows
    vectors: np.ndarray        # (n, dim**2) vectorized operators
    null_tol: float

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        v = np.asarray(self.vectors, dtype=float)
        if b.ndim != 2 or b.shape[1] != self.layout.size or v.shape[0] != self.layout.size:
            raise ValueError("identity basis/vectors do not match the layout size")
        for arr in (b, v):
            arr.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "vectors", v)

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "identity_space",
            "side": self.side,
            "layout": self.layout.to_json_dict(),
            "null_tol": self.null_tol,
            "basis": [row.tolist() for row in self.basis],
            "vectors": [row.tolist() for row in self.vectors],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "IdentitySpace":
        n = sum(int(g[1]) for g in data["layout"]["groups"])
        basis = np.asarray(data["basis"], dtype=float).reshape(-1, n)
        return cls(
            side=data["side"],
            layout=IndexLayout.from_json_dict(data["layout"]),
            basis=basis,
            vectors=np.asarray(data["vectors"], dtype=float),
            null_tol=float(data["null_tol"]),
        )


def _null_space(vectors: np.ndarray, config: RunConfig) -> tuple[np.ndarray, float]:
    """Orthonormal null-space rows of the map ``beta -> beta @ vectors``."""
    mat = vectors.T  # (dim**2, n); null space in coefficient space
    u, s, vt = np.linalg.svd(mat)
    if config.null_tol is not None:
        tol = config.null_tol
    else:
        smax = s[0] if s.size else 0.0
        tol = smax * max(mat.shape) * config.null_rcond
    rank = int(np.sum(s > tol)) if s.size else 0
    return vt[rank:], tol


def measurement_identity_space(
    meas: MultiMeasurement, config: RunConfig = DEFAULT_CONFIG
) -> IdentitySpace:
    """Coefficient vectors beta with ``sum_{b,y} beta_{b,y} M_{b|y} = 0``."""
    basis_ops = hermitian_basis(meas.dim)
    vectors = vectorize_many(meas.effects_flat(), basis_ops)
    null_basis, tol = _null_space(vectors, config)
    return IdentitySpace("measurement", measurement_layout(meas), null_basis, vectors, tol)


def preparation_identity_space(
    obj: StateSet | MultiSource, config: RunConfig = DEFAULT_CONFIG
) -> IdentitySpace:
    """Coefficient vectors alpha with ``sum alpha_{a,x} p(a|x) rho_{a|x} = 0``.

    For a StateSet the nulled family is the states themselves (uniform
    rescaling leaves the null space unchanged).
    """
    basis_ops = hermitian_basis(obj.dim)
    if isinstance(obj, StateSet):
        ops = list(obj.states)
    else:
        ops = obj.weighted_states_flat()
    vectors = vectorize_many(ops, basis_ops)
    null_basis, tol = _null_space(vectors, config)
    return IdentitySpace("preparation", preparation_layout(obj), null_basis, vectors, tol)


def verify_identity(space: IdentitySpace, coeffs) -> float:
    """Residual ``|| sum_i coeffs_i vec(O_i) ||_2`` for a coefficient vector."""
    c = np.asarray(coeffs, dtype=float).reshape(-1)
    if c.shape[0] != space.layout.size:
        raise ValueError(f"coefficient length {c.shape[0]} does not match layout size {space.layout.size}")
    return float(np.linalg.norm(c @ space.vectors))


def snapped_basis(space: IdentitySpace, max_denominator: int = 10**6) -> np.ndarray:
    """Identity rows with coefficients snapped to small rationals.

    Each row is rescaled so its largest |entry| is 1, every entry replaced by
    the nearest fraction with denominator <= ``max_denominator``, and kept
    only if it still annihilates the operators within ``null_tol``; rows that
    fail fall back to the SVD row.  The result spans the same space but is
    generally not orthonormal; it exists to stabilize downstream equality
    constraints.
    """
    rows = []
    for row in space.basis:
        peak = np.max(np.abs(row))
        if peak == 0:
            continue
        scaled = row / peak
        snapped = np.array(
            [float(Fraction(v).limit_denominator(max_denominator)) for v in scaled]
        )
        if np.linalg.norm(snapped @ space.vectors) <= max(space.null_tol, 1e-12) * 10:
            rows.append(snapped)
        else:
            rows.append(scaled)
    return np.array(rows) if rows else np.zeros((0, space.layout.size))
