"""Core operator algebra, real vectorization, and generators for example objects.

Quantum operators are plain complex ``numpy`` arrays.  The composite types
(:class:`MultiMeasurement`, :class:`MultiSource`, :class:`StateSet`,
:class:`Behavior`) are frozen dataclasses that validate their invariants on
construction and freeze their arrays, so instances are safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Golden ratio; pentagon and icosahedron geometry is exact in terms of it.
GOLDEN = (np.sqrt(5.0) + 1.0) / 2.0


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


def assert_hermitian(mat: np.ndarray, tol: float = 1e-12, name: str = "operator") -> np.ndarray:
    """Validate a square complex matrix as Hermitian and return it."""
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise ValueError(f"{name} is not Hermitian within tolerance {tol}")
    return a


def min_eigenvalue(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(np.asarray(mat, dtype=complex))[0])


def is_psd(mat: np.ndarray, tol: float = 1e-10) -> bool:
    return min_eigenvalue(mat) >= -tol


def bloch_state(n, dim_check: bool = True) -> np.ndarray:
    """Qubit density matrix (1 + n.sigma)/2 for a Bloch vector ``n``."""
    n = np.asarray(n, dtype=float)
    if dim_check and n.shape != (3,):
        raise ValueError("Bloch vector must have 3 components")
    return (np.eye(2, dtype=complex) + n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z) / 2


def ket_projector(ket) -> np.ndarray:
    """Normalized rank-1 projector |psi><psi| for a state vector."""
    v = np.asarray(ket, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("cannot project a zero vector")
    v = v / nrm
    return np.outer(v, v.conj())


# ---------------------------------------------------------------------------
# Hermitian basis and real vectorization
# ---------------------------------------------------------------------------

def hermitian_basis(dim: int) -> np.ndarray:
    """Orthonormal Hermitian basis of shape ``(dim**2, dim, dim)``.

    The first element is ``identity/sqrt(dim)``; the rest are normalized
    generalized Gell-Mann matrices.  Orthonormality is with respect to the
    trace inner product ``Tr[A B]``.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    mats = [np.eye(dim, dtype=complex) / np.sqrt(dim)]
    for k in range(1, dim):
        for j in range(k):
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m / np.sqrt(2.0))
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = -1.0j
            m[k, j] = 1.0j
            mats.append(m / np.sqrt(2.0))
    for level in range(1, dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[np.arange(level), np.arange(level)] = 1.0
        m[level, level] = -float(level)
        mats.append(m / np.sqrt(level * (level + 1)))
    return np.stack(mats, axis=0)


def vectorize(op: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Real coordinates ``v_i = Tr[B_i op]`` of a Hermitian operator."""
    op = np.asarray(op, dtype=complex)
    if op.shape != basis.shape[1:]:
        raise ValueError(f"operator shape {op.shape} does not match basis dimension {basis.shape[1:]}")
    v = np.einsum("ij,kji->k", op, basis)
    if np.max(np.abs(v.imag)) > 1e-10:
        raise ValueError("vectorization of a non-Hermitian operator")
    return v.real


def vectorize_many(ops, basis: np.ndarray) -> np.ndarray:
    """Stack :func:`vectorize` over a sequence of operators, shape ``(n, dim**2)``."""
    arr = np.asarray(ops, dtype=complex)
    v = np.einsum("nij,kji->nk", arr, basis)
    return v.real


def unvectorize(coords: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Reconstruct the operator ``sum_i v_i B_i`` from real coordinates."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (basis.shape[0],):
        raise ValueError("coordinate length does not match basis size")
    return np.einsum("k,kij->ij", coords, basis)


# ---------------------------------------------------------------------------
# Composite types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiMeasurement:
    """An indexed family of POVMs ``{M_{b|y}}`` on one system.

    ``settings[y][b]`` is the effect for outcome ``b`` of setting ``y``.
    A single POVM is the one-setting case.
    """

    dim: int
    settings: tuple[tuple[np.ndarray, ...], ...]
    labels: tuple[str, ...] = ()
    config: RunConfig = field(default=DEFAULT_CONFIG, repr=False, compare=False)

    def __post_init__(self):
        if not self.settings:
            raise ValueError("MultiMeasurement needs at least one setting")
        frozen = []
        for y, effects in enumerate(self.settings):
            if not effects:
                raise ValueError(f"setting {y} has no effects")
            row = []
            total = np.zeros((self.dim, self.dim), dtype=complex)
            for b, eff in enumerate(effects):
                m = assert_hermitian(eff, self.config.herm_tol, f"effect ({b}|{y})")
                if m.shape != (self.dim, self.dim):
                    raise ValueError(f"effect ({b}|{y}) has dim {m.shape[0]}, expected {self.dim}")
                if not is_psd(m, self.config.psd_tol):
                    raise ValueError(f"effect ({b}|{y}) is not positive semidefinite")
                total = total + m
                row.append(_frozen(m))
            if np.max(np.abs(total - np.eye(self.dim))) > max(self.config.herm_tol, 1e-10):
                raise ValueError(f"effects of setting {y} do not sum to the identity")
            frozen.append(tuple(row))
        object.__setattr__(self, "settings", tuple(frozen))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(y) for y in range(len(self.settings))))
        elif len(self.labels) != len(self.settings):
            raise ValueError("labels length must match number of settings")

    @property
    def n_settings(self) -> int:
        return len(self.settings)

    @property
    def outcome_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.settings)

    def effects_flat(self) -> list[np.ndarray]:
        """Effects in flat (b, y) layout order: all of setting 0, then 1, ..."""
        return [eff for setting in self.settings for eff in setting]

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "multi_measurement",
            "dim": self.dim,
            "settings": [
                {"label": lbl, "effects": [matrix_to_json(e) for e in effs]}
                for lbl, effs in zip(self.labels, self.settings)
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict, config: RunConfig = DEFAULT_CONFIG) -> "MultiMeasurement":
        dim = int(data["dim"])
        settings = tuple(
            tuple(matrix_from_json(e, dim) for e in s["effects"]) for s in data["settings"]
        )
        labels = tuple(str(s.get("label", y)) for y, s in enumerate(data["settings"]))
        return cls(dim=dim, settings=settings, labels=labels, config=config)


def single_povm(effects, dim: int | None = None, config: RunConfig = DEFAULT_CONFIG) -> MultiMeasurement:
    """Wrap one POVM as the one-setting MultiMeasurement."""
    effects = tuple(np.asarray(e, dtype=complex) for e in effects)
    d = dim if dim is not None else effects[0].shape[0]
    return MultiMeasurement(dim=d, settings=(effects,), config=config)


def trivial_measurement(dim: int = 2) -> MultiMeasurement:
    """The one-outcome POVM {identity}."""
    return single_povm([np.eye(dim, dtype=complex)], dim)


@dataclass(frozen=True)
class StateSet:
    """An unordered-but-indexed set of density matrices on one system."""

    dim: int
    states: tuple[np.ndarray, ...]
    config: RunConfig = field(default=DEFAULT_CONFIG, repr=False, compare=False)

    def __post_init__(self):
        if not self.states:
            raise ValueError("StateSet needs at least one state")
        frozen = []
        for a, rho in enumerate(self.states):
            r = assert_hermitian(rho, self.config.herm_tol, f"state {a}")
            if r.shape != (self.dim, self.dim):
                raise ValueError(f"state {a} has dim {r.shape[0]}, expected {self.dim}")
            if not is_psd(r, self.config.psd_tol):
                raise ValueError(f"state {a} is not positive semidefinite")
            if abs(np.trace(r).real - 1.0) > 1e-10:
                raise ValueError(f"state {a} does not have unit trace")
            frozen.append(_frozen(r))
        object.__setattr__(self, "states", tuple(frozen))

    def __len__(self) -> int:
        return len(self.states)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "state_set",
            "dim": self.dim,
            "states": [matrix_to_json(s) for s in self.states],
        }

    @classmethod
    def from_json_dict(cls, data: dict, config: RunConfig = DEFAULT_CONFIG) -> "StateSet":
        dim = int(data["dim"])
        return cls(dim=dim, states=tuple(matrix_from_json(s, dim) for s in data["states"]), config=config)


@dataclass(frozen=True)
class MultiSource:
    """Indexed ensembles ``{p(a|x) rho_{a|x}}``; a StateSet is the unweighted case.

    ``weights[x][a]`` and ``states[x][a]`` give outcome ``a`` of setting ``x``.
    """

    dim: int
    weights: tuple[tuple[float, ...], ...]
    states: tuple[tuple[np.ndarray, ...], ...]
    labels: tuple[str, ...] = ()
    config: RunConfig = field(default=DEFAULT_CONFIG, repr=False, compare=False)

    def __post_init__(self):
        if not self.states or len(self.weights) != len(self.states):
            raise ValueError("weights and states must be per-setting sequences of equal length")
        frozen_w, frozen_s = [], []
        for x, (ws, rhos) in enumerate(zip(self.weights, self.states)):
            if len(ws) != len(rhos) or not rhos:
                raise ValueError(f"setting {x}: weights/states mismatch")
            ws = tuple(float(w) for w in ws)
            if any(w < -1e-12 for w in ws) or abs(sum(ws) - 1.0) > 1e-12:
                raise ValueError(f"setting {x}: weights are not a probability distribution")
            row = []
            for a, rho in enumerate(rhos):
                r = assert_hermitian(rho, self.config.herm_tol, f"state ({a}|{x})")
                if r.shape != (self.dim, self.dim):
                    raise ValueError(f"state ({a}|{x}) has wrong dimension")
                if not is_psd(r, self.config.psd_tol):
                    raise ValueError(f"state ({a}|{x}) is not positive semidefinite")
                if abs(np.trace(r).real - 1.0) > 1e-10:
                    raise ValueError(f"state ({a}|{x}) does not have unit trace")
                row.append(_frozen(r))
            frozen_w.append(ws)
            frozen_s.append(tuple(row))
        object.__setattr__(self, "weights", tuple(frozen_w))
        object.__setattr__(self, "states", tuple(frozen_s))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(x) for x in range(len(self.states))))
        elif len(self.labels) != len(self.states):
            raise ValueError("labels length must match number of settings")

    @property
    def n_settings(self) -> int:
        return len(self.states)

    @property
    def outcome_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.states)

    def weighted_states_flat(self) -> list[np.ndarray]:
        """Sub-normalized operators ``p(a|x) rho_{a|x}`` in flat (a, x) order."""
        return [w * r for ws, rhos in zip(self.weights, self.states) for w, r in zip(ws, rhos)]

    @classmethod
    def deterministic(cls, states: StateSet) -> "MultiSource":
        """One setting per state, each emitting its state with probability 1."""
        return cls(
            dim=states.dim,
            weights=tuple((1.0,) for _ in states.states),
            states=tuple((s,) for s in states.states),
            config=states.config,
        )

    @classmethod
    def uniform_ensemble(cls, states: StateSet) -> "MultiSource":
        """A single setting sampling the states uniformly."""
        k = len(states)
        return cls(
            dim=states.dim,
            weights=((1.0 / k,) * k,),
            states=(tuple(states.states),),
            config=states.config,
        )

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "multi_source",
            "dim": self.dim,
            "settings": [
                {
                    "label": lbl,
                    "elements": [
                        {"weight": w, "state": matrix_to_json(r)} for w, r in zip(ws, rhos)
                    ],
                }
                for lbl, ws, rhos in zip(self.labels, self.weights, self.states)
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict, config: RunConfig = DEFAULT_CONFIG) -> "MultiSource":
        dim = int(data["dim"])
        weights, states, labels = [], [], []
        for x, s in enumerate(data["settings"]):
            labels.append(str(s.get("label", x)))
            weights.append(tuple(float(e["weight"]) for e in s["elements"]))
            states.append(tuple(matrix_from_json(e["state"], dim) for e in s["elements"]))
        return cls(dim=dim, weights=tuple(weights), states=tuple(states), labels=tuple(labels), config=config)


@dataclass(frozen=True)
class Behavior:
    """Joint outcome table ``p(a,b|x,y)`` with shape ``(A, B, X, Y)``.

    Ragged scenarios are zero-padded; ``a_counts``/``b_counts`` record the
    true outcome cardinalities per setting.
    """

    table: np.ndarray
    a_counts: tuple[int, ...] = ()
    b_counts: tuple[int, ...] = ()

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 4:
            raise ValueError("behavior table must have shape (A, B, X, Y)")
        if np.min(t) < -1e-12:
            raise ValueError("behavior table has negative entries")
        sums = t.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1.0)) > 1e-12:
            raise ValueError("behavior rows p(.,.|x,y) must each sum to 1")
        object.__setattr__(self, "table", _frozen(t))
        if not self.a_counts:
            object.__setattr__(self, "a_counts", (t.shape[0],) * t.shape[2])
        if not self.b_counts:
            object.__setattr__(self, "b_counts", (t.shape[1],) * t.shape[3])

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return tuple(self.table.shape)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "behavior",
            "shape": list(self.table.shape),
            "a_counts": list(self.a_counts),
            "b_counts": list(self.b_counts),
            "table": self.table.reshape(-1).tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Behavior":
        shape = tuple(int(s) for s in data["shape"])
        table = np.asarray(data["table"], dtype=float).reshape(shape)
        return cls(table, tuple(data.get("a_counts", ())), tuple(data.get("b_counts", ())))


# ---------------------------------------------------------------------------
# JSON matrix codec: row-major list of [re, im] pairs
# ---------------------------------------------------------------------------

def matrix_to_json(mat: np.ndarray) -> list:
    m = np.asarray(mat, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in m]

def matrix_from_json(entries: list, dim: int) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    if flat.size != dim * dim:
        raise ValueError(f"matrix entry list has length {flat.size}, expected {dim * dim}")
    return flat.reshape(dim, dim)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def make_planar_measurement(k: int, shift: float = 0.0) -> MultiMeasurement:
    """Symmetric k-outcome qubit measurement in the Bloch x-z plane.

    Effects are ``(1/k)[1 + cos(t_b) X + sin(t_b) Z]`` with ``t_b = 2 pi b / k
    + shift``.  ``k=4`` is the BB84 measurement; ``k=5`` the pentagon one.
    """
    if k < 3:
        raise ValueError("planar measurement needs k >= 3")
    effects = []
    for b in range(k):
        t = 2 * np.pi * b / k + shift
        effects.append((np.eye(2, dtype=complex) + np.cos(t) * SIGMA_X + np.sin(t) * SIGMA_Z) / k)
    return single_povm(effects, 2)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _cyclic(v) -> list[np.ndarray]:
    v = np.asarray(v, dtype=float)
    return [v, np.array([v[2], v[0], v[1]]), np.array([v[1], v[2], v[0]])]


def platonic_vertices(solid: str) -> np.ndarray:
    """Unit vertex vectors of a platonic solid, exact in the golden ratio."""
    q = GOLDEN
    if solid == "tetrahedron":
        vs = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
    elif solid == "octahedron":
        vs = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    elif solid == "cube":
        vs = [[s1, s2, s3] for s1 in (1, -1) for s2 in (1, -1) for s3 in (1, -1)]
    elif solid == "icosahedron":
        vs = [u for s1 in (1, -1) for s2 in (1, -1) for u in _cyclic([0.0, s1 * 1.0, s2 * q])]
    elif solid == "dodecahedron":
        vs = [[s1, s2, s3] for s1 in (1, -1) for s2 in (1, -1) for s3 in (1, -1)]
        vs += [u for s1 in (1, -1) for s2 in (1, -1) for u in _cyclic([0.0, s1 * q, s2 / q])]
    else:
        raise ValueError(f"unknown solid {solid!r}")
    return np.array([_unit(v) for v in vs])


def make_platonic_measurement(solid: str) -> MultiMeasurement:
    """Qubit POVM whose effects point at a platonic solid's vertices.

    Effects are ``(2/k) * (1 + n_b . sigma)/2`` over the ``k`` unit vertex
    vectors, which sum to the identity by vertex symmetry.
    """
    vs = platonic_vertices(solid)
    k = len(vs)
    return single_povm([(2.0 / k) * bloch_state(v) for v in vs], 2)


def _basis_projectors(rows: np.ndarray) -> tuple[np.ndarray, ...]:
    return tuple(np.outer(r, r.conj()) for r in np.asarray(rows, dtype=complex))


def _mub_bases(dim: int) -> list[np.ndarray]:
    """Rows of each returned matrix are the basis vectors."""
    if dim == 2:
        return [
            np.eye(2, dtype=complex),
            np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
            np.array([[1, 1j], [1, -1j]], dtype=complex) / np.sqrt(2),
        ]
    if dim == 3:
        w = np.exp(2j * np.pi / 3)
        bases = [np.eye(3, dtype=complex)]
        for a in range(3):
            rows = [[w ** ((a * k * k + m * k) % 3) / np.sqrt(3) for k in range(3)] for m in range(3)]
            bases.append(np.array(rows, dtype=complex))
        return bases
    if dim == 4:
        i = 1j
        return [
            np.eye(4, dtype=complex),
            np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]], dtype=complex) / 2,
            np.array([[1, -1, -i, -i], [1, 1, -i, i], [1, 1, i, -i], [1, -1, i, i]]) / 2,
            np.array([[1, -i, -i, -1], [1, i, i, -1], [1, -i, i, 1], [1, i, -i, 1]]) / 2,
            np.array([[1, -i, -1, -i], [1, i, -1, i], [1, -i, 1, i], [1, i, 1, -i]]) / 2,
        ]
    raise ValueError("mutually unbiased multi-measurements are provided for dim in {2, 3, 4}")


def make_mub_multimeasurement(dim: int) -> MultiMeasurement:
    """The dim+1 projective measurements of a full set of mutually unbiased bases."""
    bases = _mub_bases(dim)
    settings = tuple(_basis_projectors(b) for b in bases)
    return MultiMeasurement(dim=dim, settings=settings)


_STATE_SET_BUILDERS = {}

def _named(name):
    def reg(fn):
        _STATE_SET_BUILDERS[name] = fn
        return fn
    return reg

@_named("bb84_states")
def _bb84_states() -> StateSet:
    kets = [[1, 0], [0, 1], [1, 1], [1, -1]]
    return StateSet(2, tuple(ket_projector(k) for k in kets))

@_named("six_state")
def _six_state() -> StateSet:
    return StateSet(2, tuple(bloch_state(v) for v in platonic_vertices("octahedron")))

@_named("spekkens6")
def _spekkens6() -> StateSet:
    # Regular hexagon of pure states in the equatorial plane: three bases,
    # each the antipode of a trine direction.
    kets = [[1, np.exp(1j * a * np.pi / 3)] for a in range(6)]
    return StateSet(2, tuple(ket_projector(k) for k in kets))

@_named("cube8")
def _cube8() -> StateSet:
    return StateSet(2, tuple(bloch_state(v) for v in platonic_vertices("cube")))

@_named("icosahedron12")
def _icosahedron12() -> StateSet:
    return StateSet(2, tuple(bloch_state(v) for v in platonic_vertices("icosahedron")))


def make_named_state_set(name: str) -> StateSet:
    """Named pure-state sets: bb84_states, six_state, spekkens6, cube8, icosahedron12."""
    try:
        return _STATE_SET_BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown state set {name!r}; known: {sorted(_STATE_SET_BUILDERS)}") from None


def make_planar_state_set(k: int, shift: float = 0.0) -> StateSet:
    """Pure qubit states evenly spaced on the Bloch x-z circle."""
    if k < 1:
        raise ValueError("need k >= 1 states")
    states = []
    for a in range(k):
        t = 2 * np.pi * a / k + shift
        states.append(bloch_state([np.cos(t), 0.0, np.sin(t)]))
    return StateSet(2, tuple(states))


# ---------------------------------------------------------------------------
# White noise and behaviors
# ---------------------------------------------------------------------------

def add_white_noise_measurement(meas: MultiMeasurement, eta: float) -> MultiMeasurement:
    """Mix every effect with white noise: ``eta M + (1-eta) Tr[M]/d * 1``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("noise parameter eta must lie in [0, 1]")
    d = meas.dim
    eye = np.eye(d, dtype=complex)
    settings = tuple(
        tuple(eta * m + (1 - eta) * (np.trace(m).real / d) * eye for m in s) for s in meas.settings
    )
    return MultiMeasurement(dim=d, settings=settings, labels=meas.labels, config=meas.config)


def add_white_noise_states(states: StateSet, eta: float) -> StateSet:
    """Mix every state with white noise: ``eta rho + (1-eta) 1/d``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("noise parameter eta must lie in [0, 1]")
    d = states.dim
    eye = np.eye(d, dtype=complex)
    return StateSet(d, tuple(eta * r + (1 - eta) * eye / d for r in states.states), config=states.config)


def quantum_behavior(source: MultiSource, meas: MultiMeasurement) -> Behavior:
    """The table ``p(a,b|x,y) = p(a|x) Tr[M_{b|y} rho_{a|x}]``."""
    if source.dim != meas.dim:
        raise ValueError(f"source dim {source.dim} does not match measurement dim {meas.dim}")
    a_counts = source.outcome_counts
    b_counts = meas.outcome_counts
    na, nb = max(a_counts), max(b_counts)
    nx, ny = source.n_settings, meas.n_settings
    table = np.zeros((na, nb, nx, ny))
    for x in range(nx):
        for a in range(a_counts[x]):
            w, rho = source.weights[x][a], source.states[x][a]
            for y in range(ny):
                for b in range(b_counts[y]):
                    table[a, b, x, y] = w * np.trace(meas.settings[y][b] @ rho).real
    table = np.clip(table, 0.0, None)
    return Behavior(table, a_counts, b_counts)
