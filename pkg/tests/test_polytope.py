import numpy as np
import pytest
from scipy.optimize import linprog

from ncq.config import RunConfig
from ncq.identities import measurement_identity_space, preparation_identity_space
from ncq.operators import (
    MultiSource,
    StateSet,
    bloch_state,
    ket_projector,
    make_mub_multimeasurement,
    make_named_state_set,
    make_planar_measurement,
    make_platonic_measurement,
)
from ncq.polytope import (
    AssignmentPolytope,
    EnumerationCapExceeded,
    build_measurement_polytope,
    build_preparation_polytope,
    enumerate_vertices,
    measurement_vertices,
    preparation_vertices,
    simplex_product_vertices,
    verify_vertices,
)
from ncq.scenarios import flag_convexify_measurement


def meas_polytope(meas):
    return build_measurement_polytope(meas, measurement_identity_space(meas))


def prep_polytope(states):
    return build_preparation_polytope(states, preparation_identity_space(states))


def test_single_povm_simplex_vertices():
    meas = make_planar_measurement(3)
    verts = enumerate_vertices(meas_polytope(meas))
    assert verts.count == 3
    for onehot in np.eye(3):
        assert min(np.max(np.abs(onehot - v)) for v in verts.vertices) < 1e-12
    # deterministic lexicographic ordering
    np.testing.assert_allclose(verts.vertices, [[0, 0, 1], [0, 1, 0], [1, 0, 0]], atol=1e-12)


@pytest.mark.parametrize("dim,expected", [(2, 8), (3, 81)])
def test_mub_product_of_simplices(dim, expected):
    meas = make_mub_multimeasurement(dim)
    poly = meas_polytope(meas)
    shortcut = simplex_product_vertices(poly)
    assert shortcut is not None and shortcut.count == expected
    general = enumerate_vertices(poly)
    assert general.count == expected
    # set equality up to dedup tolerance
    for v in shortcut.vertices:
        assert min(np.max(np.abs(v - u)) for u in general.vertices) < 1e-8


def test_pentagon_vertices_match_closed_form():
    meas = make_planar_measurement(5)
    verts = enumerate_vertices(meas_polytope(meas))
    assert verts.count == 5
    # independent oracle: assignments lie in span{1, cos, sin}; a vertex has
    # two zeros at adjacent positions (mod 5).  Solve the 2x2 system for each
    # adjacent pair and keep feasible points.
    thetas = 2 * np.pi * np.arange(5) / 5
    expected = []
    for b in range(5):
        zero_a, zero_b = b, (b + 1) % 5
        mat = np.array(
            [[np.cos(thetas[zero_a]), np.sin(thetas[zero_a])],
             [np.cos(thetas[zero_b]), np.sin(thetas[zero_b])]]
        )
        vw = np.linalg.solve(mat, [-0.2, -0.2])
        p = 0.2 + np.cos(thetas) * vw[0] + np.sin(thetas) * vw[1]
        if p.min() >= -1e-12:
            expected.append(p)
    assert len(expected) == 5
    for p in expected:
        assert min(np.max(np.abs(p - v)) for v in verts.vertices) < 1e-9


def test_pentagon_shortcut_declines():
    poly = meas_polytope(make_planar_measurement(5))
    assert simplex_product_vertices(poly) is None


def test_single_povm_shortcut_gives_one_hot_vertices():
    poly = meas_polytope(make_planar_measurement(3))
    verts = simplex_product_vertices(poly)
    assert verts is not None and verts.count == 3
    np.testing.assert_allclose(verts.vertices, [[0, 0, 1], [0, 1, 0], [1, 0, 0]], atol=1e-12)


def test_flag_convexified_mub_vertices_scaled():
    flag = flag_convexify_measurement(make_mub_multimeasurement(2))
    poly = meas_polytope(flag)
    assert simplex_product_vertices(poly) is None
    verts = enumerate_vertices(poly)
    assert verts.count == 8
    assert set(np.round(np.unique(verts.vertices), 10)) == {0.0, round(1 / 3, 10)}


def test_preparation_single_state_is_a_point():
    verts = enumerate_vertices(prep_polytope(StateSet(2, (bloch_state([0, 0, 1]),))))
    assert verts.count == 1
    np.testing.assert_allclose(verts.vertices, [[1.0]], atol=1e-12)


def test_preparation_two_orthogonal_states_simplex():
    states = StateSet(2, (ket_projector([1, 0]), ket_projector([0, 1])))
    verts = enumerate_vertices(prep_polytope(states))
    assert verts.count == 2
    np.testing.assert_allclose(verts.vertices, [[0, 1], [1, 0]], atol=1e-12)


def test_preparation_bb84_vertices():
    verts = enumerate_vertices(prep_polytope(make_named_state_set("bb84_states")))
    assert verts.count == 4
    for v in verts.vertices:
        assert abs(v[0] + v[1] - 0.5) < 1e-10
        assert abs(v[2] + v[3] - 0.5) < 1e-10
        assert np.sort(v)[::-1][2:].max() < 1e-10  # exactly two supports of 1/2


def test_vertices_reverify_constraints():
    for meas in (make_planar_measurement(6), make_platonic_measurement("icosahedron")):
        poly = meas_polytope(meas)
        verts = enumerate_vertices(poly)
        assert verify_vertices(poly, verts) < 1e-9


def test_uniform_assignment_feasible_on_builtins():
    targets = [
        meas_polytope(make_planar_measurement(5)),
        meas_polytope(make_platonic_measurement("cube")),
        meas_polytope(make_mub_multimeasurement(2)),
        prep_polytope(make_named_state_set("six_state")),
    ]
    for poly in targets:
        uniform = np.zeros(poly.n_vars)
        for off, (_, cnt) in zip(poly.layout.offsets, poly.layout.groups):
            uniform[off : off + cnt] = 1.0 / cnt
        if poly.n_norm_rows == 1:  # preparation side: single overall normalization
            uniform = np.full(poly.n_vars, 1.0 / poly.n_vars)
        assert poly.residual(uniform) < 1e-10


def test_enumeration_cap():
    poly = meas_polytope(make_platonic_measurement("dodecahedron"))
    with pytest.raises(EnumerationCapExceeded):
        enumerate_vertices(poly, RunConfig(enum_cap=10))


def test_infeasible_system_raises():
    layout = meas_polytope(make_planar_measurement(3)).layout
    eq = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
    rhs = np.array([1.0, 2.0])
    with pytest.raises(ValueError):
        AssignmentPolytope(layout, eq, rhs, 2, np.full(3, 1 / 3))


def sample_polytope_points(poly, n, seed):
    """Hit-and-run sampler from the stored interior point (vertex-free)."""
    rng = np.random.default_rng(seed)
    a = poly.eq_coeffs
    svals = np.linalg.svd(a, compute_uv=False)
    rank = int(np.sum(svals > svals[0] * max(a.shape) * 1e-12))
    null = np.linalg.svd(a)[2][rank:]
    x = poly.interior_point.copy()
    out = []
    for _ in range(n):
        d = null.T @ rng.normal(size=null.shape[0])
        if np.linalg.norm(d) < 1e-13:
            out.append(x.copy())
            continue
        d /= np.linalg.norm(d)
        with np.errstate(divide="ignore"):
            tpos = np.min(np.where(d < -1e-14, -x / d, np.inf))
            tneg = np.min(np.where(d > 1e-14, x / d, np.inf))
        x = x + rng.uniform(-tneg, tpos) * d
        out.append(x.copy())
    return out


@pytest.mark.parametrize(
    "poly_factory",
    [
        lambda: meas_polytope(make_planar_measurement(5)),
        lambda: meas_polytope(make_platonic_measurement("icosahedron")),
        lambda: prep_polytope(make_named_state_set("bb84_states")),
    ],
)
def test_convex_hull_completeness(poly_factory):
    poly = poly_factory()
    verts = enumerate_vertices(poly)
    v = verts.vertices
    for i, point in enumerate(sample_polytope_points(poly, 100, seed=11)):
        res = linprog(
            np.zeros(len(v)),
            A_eq=np.vstack([v.T, np.ones(len(v))]),
            b_eq=np.concatenate([point, [1.0]]),
            bounds=(0, None),
            method="highs",
        )
        assert res.status == 0, f"point {i} not in hull"
        assert np.max(np.abs(v.T @ res.x - point)) < 1e-8


def test_pipeline_helpers_agree():
    meas = make_mub_multimeasurement(2)
    via_pipeline = measurement_vertices(meas)
    via_steps = enumerate_vertices(meas_polytope(meas))
    assert via_pipeline.count == via_steps.count

    source = MultiSource.deterministic(make_named_state_set("bb84_states"))
    assert preparation_vertices(source).count == 4


def test_snap_rational_polytope_matches():
    meas = make_planar_measurement(4)
    space = measurement_identity_space(meas)
    plain = enumerate_vertices(build_measurement_polytope(meas, space))
    snapped = enumerate_vertices(build_measurement_polytope(meas, space, snap_rational=True))
    assert plain.count == snapped.count
    for v in plain.vertices:
        assert min(np.max(np.abs(v - u)) for u in snapped.vertices) < 1e-9
