import numpy as np
import pytest
from itertools import product

from ncq.identities import (
    measurement_identity_space,
    preparation_identity_space,
    snapped_basis,
    verify_identity,
)
from ncq.operators import (
    MultiMeasurement,
    MultiSource,
    StateSet,
    bloch_state,
    hermitian_basis,
    ket_projector,
    make_mub_multimeasurement,
    make_named_state_set,
    make_planar_measurement,
    vectorize_many,
)


def two_projective_qubit_measurements():
    z = (ket_projector([1, 0]), ket_projector([0, 1]))
    x = (ket_projector([1, 1]), ket_projector([1, -1]))
    return MultiMeasurement(2, (z, x))


def test_independent_effects_have_no_identities():
    space = measurement_identity_space(make_planar_measurement(3))
    assert space.rank == 0


def test_two_projective_measurements_rank_one_normalization_difference():
    space = measurement_identity_space(two_projective_qubit_measurements())
    assert space.rank == 1
    # the only identity is (sum_b M_{b|0}) - (sum_b M_{b|1}) = 0
    expected = np.array([1.0, 1.0, -1.0, -1.0]) / 2
    beta = space.basis[0]
    assert min(np.linalg.norm(beta - expected), np.linalg.norm(beta + expected)) < 1e-10


@pytest.mark.parametrize("dim", [2, 3])
def test_mub_identities_span_normalization_differences(dim):
    meas = make_mub_multimeasurement(dim)
    space = measurement_identity_space(meas)
    n_settings = dim + 1
    assert space.rank == n_settings - 1
    # each basis vector lies in the span of per-setting normalization differences
    diffs = []
    offsets = space.layout.offsets
    for y in range(n_settings - 1):
        row = np.zeros(space.layout.size)
        row[offsets[y] : offsets[y] + dim] = 1.0
        row[offsets[y + 1] : offsets[y + 1] + dim] = -1.0
        diffs.append(row)
    diffs = np.array(diffs)
    for beta in space.basis:
        sol, *_ = np.linalg.lstsq(diffs.T, beta, rcond=None)
        assert np.max(np.abs(diffs.T @ sol - beta)) < 1e-10


def test_bb84_states_single_identity():
    space = preparation_identity_space(make_named_state_set("bb84_states"))
    assert space.rank == 1
    expected = np.array([1.0, 1.0, -1.0, -1.0]) / 2
    alpha = space.basis[0]
    assert min(np.linalg.norm(alpha - expected), np.linalg.norm(alpha + expected)) < 1e-10


def test_single_state_rank_zero():
    space = preparation_identity_space(StateSet(2, (bloch_state([0, 0, 1]),)))
    assert space.rank == 0


def test_icosahedron12_rank_eight():
    space = preparation_identity_space(make_named_state_set("icosahedron12"))
    assert space.rank == 12 - 4


def test_multisource_uses_weighted_states():
    # weights 1/2 on identical states collapse to the same null space as the set
    states = make_named_state_set("bb84_states")
    source = MultiSource.uniform_ensemble(states)
    space = preparation_identity_space(source)
    assert space.rank == 1


def test_verify_identity_on_basis_and_zero():
    space = preparation_identity_space(make_named_state_set("bb84_states"))
    for beta in space.basis:
        assert verify_identity(space, beta) <= space.null_tol
    assert verify_identity(space, np.zeros(space.layout.size)) == 0.0


def test_verify_identity_orthogonal_vector_bounded_below():
    space = preparation_identity_space(make_named_state_set("bb84_states"))
    svals = np.linalg.svd(space.vectors.T, compute_uv=False)
    smallest_nonzero = svals[np.sum(svals > space.null_tol) - 1]
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.normal(size=space.layout.size)
        v -= space.basis.T @ (space.basis @ v)  # project out the null space
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            continue
        assert verify_identity(space, v) >= smallest_nonzero * norm - 1e-9


def test_verify_identity_layout_mismatch():
    space = preparation_identity_space(make_named_state_set("bb84_states"))
    with pytest.raises(ValueError):
        verify_identity(space, np.ones(3))


def test_basis_is_orthonormal():
    space = measurement_identity_space(make_mub_multimeasurement(3))
    gram = space.basis @ space.basis.T
    np.testing.assert_allclose(gram, np.eye(space.rank), atol=1e-12)


def test_rank_invariant_under_effect_reordering():
    meas = make_planar_measurement(5)
    shuffled = MultiMeasurement(2, (tuple(reversed(meas.settings[0])),))
    assert (
        measurement_identity_space(meas).rank
        == measurement_identity_space(shuffled).rank
        == 2
    )


@pytest.mark.parametrize("dim", [2, 3])
def test_mub_subsets_below_dim_are_independent(dim):
    # taking fewer than dim effects from each basis leaves an independent family
    meas = make_mub_multimeasurement(dim)
    basis_ops = hermitian_basis(dim)
    choices_per_setting = [range(dim) for _ in range(dim + 1)]
    for dropped in product(*choices_per_setting):
        ops = []
        for y, skip in enumerate(dropped):
            ops.extend(eff for b, eff in enumerate(meas.settings[y]) if b != skip)
        vectors = vectorize_many(ops, basis_ops)
        assert np.linalg.matrix_rank(vectors, tol=1e-10) == len(ops)


def test_snapped_basis_preserves_span_and_residual():
    space = preparation_identity_space(make_named_state_set("bb84_states"))
    snapped = snapped_basis(space)
    assert snapped.shape == space.basis.shape
    for row in snapped:
        assert np.linalg.norm(row @ space.vectors) <= max(space.null_tol, 1e-12) * 10
    stacked = np.vstack([snapped, space.basis])
    assert np.linalg.matrix_rank(stacked, tol=1e-10) == space.rank
    # bb84's identity snaps to exact +/-1 coefficients
    assert set(np.round(np.abs(snapped[0]), 12)) == {1.0}


def test_identity_space_json_roundtrip():
    from ncq.identities import IdentitySpace

    space = measurement_identity_space(make_planar_measurement(5))
    again = IdentitySpace.from_json_dict(space.to_json_dict())
    np.testing.assert_allclose(again.basis, space.basis, atol=1e-15)
    assert again.layout == space.layout
