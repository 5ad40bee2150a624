"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion.  The dimension-4 multi-basis case is marked slow; include it with
``pytest -m slow``.
"""

import time

import numpy as np
import pytest
from scipy.optimize import linprog

from ncq.config import RunConfig
from ncq.identities import measurement_identity_space, preparation_identity_space
from ncq.operators import (
    MultiSource,
    add_white_noise_measurement,
    make_mub_multimeasurement,
    make_named_state_set,
    make_planar_measurement,
    make_platonic_measurement,
    trivial_measurement,
)
from ncq.polytope import (
    build_measurement_polytope,
    build_preparation_polytope,
    enumerate_vertices,
    measurement_vertices,
    preparation_vertices,
    simplex_product_vertices,
)
from ncq.quantifiers import (
    analytic_upper_bound_measurement,
    analytic_upper_bound_states,
    certify_states,
    nonclassical_fraction_measurement,
    nonclassical_fraction_states,
    white_noise_robustness_measurement,
    white_noise_robustness_measurement_dual,
    white_noise_robustness_states,
    white_noise_robustness_states_dual,
)
from ncq.reproduce import (
    MUB_ROBUSTNESS,
    PLANAR_ROBUSTNESS,
    PLATONIC_ROBUSTNESS,
    SQUARE_WITNESS_BOUND,
    STATE_SET_ROBUSTNESS,
    STEERING_BOUND,
    STEERING_MAX_VIOLATION,
    STEERING_THRESHOLD,
    pentagon_model_result,
    pentagon_scenario,
    square_scaled_witness_value,
    square_scenario,
    square_scenario_model,
    steered_icosahedron_dodecahedron_behavior,
)
from ncq.scenarios import flag_convexify_measurement, icosahedron_steering_source, multisource_to_state_set
from ncq.witnesses import (
    evaluate_inequality,
    icosahedron_dodecahedron_inequality,
    nc_model_lp,
    pentagon_inequality,
    sample_noncontextual_tables,
    verify_ontological_model,
)


def _ok(number: int, message: str) -> None:
    print(f"ACCEPTANCE {number:02d} PASS: {message}")


MEASUREMENT_INSTANCES = (
    [(f"planar k={k}", lambda k=k: make_planar_measurement(k), PLANAR_ROBUSTNESS[k]) for k in range(3, 9)]
    + [(s, lambda s=s: make_platonic_measurement(s), PLATONIC_ROBUSTNESS[s])
       for s in ("tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron")]
    + [(f"mub d={d}", lambda d=d: make_mub_multimeasurement(d), MUB_ROBUSTNESS[d]) for d in (2, 3)]
)

STATE_INSTANCES = [
    (name, lambda name=name: make_named_state_set(name), STATE_SET_ROBUSTNESS[name])
    for name in ("bb84_states", "six_state", "spekkens6", "cube8", "icosahedron12")
]


@pytest.fixture(scope="module")
def robustness_results():
    """Primal/dual robustness and the closed-form bound for criteria 1-6."""
    results = {}
    for name, factory, published in MEASUREMENT_INSTANCES:
        meas = factory()
        verts = measurement_vertices(meas)
        results[name] = {
            "published": published,
            "primal": white_noise_robustness_measurement(meas, verts),
            "dual": white_noise_robustness_measurement_dual(meas, verts),
            "bound": analytic_upper_bound_measurement(meas, verts),
        }
    for name, factory, published in STATE_INSTANCES:
        states = factory()
        verts = preparation_vertices(states)
        results[name] = {
            "published": published,
            "primal": white_noise_robustness_states(states, verts),
            "dual": white_noise_robustness_states_dual(states, verts),
            "bound": analytic_upper_bound_states(states, verts),
        }
    return results


def test_criterion_01_planar_robustness_and_runtime():
    start = time.monotonic()
    values = {}
    for k in range(3, 9):
        values[k] = white_noise_robustness_measurement(make_planar_measurement(k)).value
    elapsed = time.monotonic() - start
    for k, published in PLANAR_ROBUSTNESS.items():
        assert abs(values[k] - published) < 1e-5, f"k={k}: {values[k]} vs {published}"
    assert elapsed < 30.0, f"planar table took {elapsed:.1f}s"
    _ok(1, f"planar k=3..8 robustness within 1e-5 in {elapsed:.1f}s")


def test_criterion_02_platonic_robustness(robustness_results):
    for solid in PLATONIC_ROBUSTNESS:
        entry = robustness_results[solid]
        assert abs(entry["primal"].value - entry["published"]) < 1e-5, solid
    _ok(2, "platonic 4/6/8/12/20-vertex robustness within 1e-5")


def test_criterion_03_mub_robustness(robustness_results):
    for d in (2, 3):
        entry = robustness_results[f"mub d={d}"]
        assert abs(entry["primal"].value - entry["published"]) < 1e-5, f"d={d}"
    _ok(3, "mutually unbiased bases d=2,3 robustness within 1e-5")


@pytest.mark.slow
def test_criterion_03_mub_dim4_slow():
    start = time.monotonic()
    rep = white_noise_robustness_measurement(make_mub_multimeasurement(4))
    elapsed = time.monotonic() - start
    assert abs(rep.value - MUB_ROBUSTNESS[4]) < 1e-4
    assert elapsed < 900.0, f"dim-4 case took {elapsed:.0f}s"
    _ok(3, f"mutually unbiased bases d=4 robustness within 1e-4 in {elapsed:.0f}s")


def test_criterion_04_state_set_robustness(robustness_results):
    for name, _, published in STATE_INSTANCES:
        entry = robustness_results[name]
        tol = 1e-4 if name == "cube8" else 1e-5
        assert abs(entry["primal"].value - published) < tol, name
    _ok(4, "named state sets robustness at stated tolerances")


def test_criterion_05_analytic_bound_tightness(robustness_results):
    for name, entry in robustness_results.items():
        gap = entry["bound"] - entry["primal"].value
        assert -1e-6 <= gap <= 1e-5, f"{name}: bound gap {gap:.2e}"
    _ok(5, "closed-form bound within [-1e-6, 1e-5] of every robustness value")


def test_criterion_06_duality(robustness_results):
    for name, entry in robustness_results.items():
        primal, dual = entry["primal"].value, entry["dual"].value
        assert dual >= primal - 1e-6, f"{name}: weak duality violated"
        assert abs(dual - primal) < 1e-6, f"{name}: gap {abs(dual - primal):.2e}"
    _ok(6, "primal/dual agreement within 1e-6 on every instance")


def test_criterion_07_fraction_extremes():
    ones = [
        ("planar k=4", nonclassical_fraction_measurement(make_planar_measurement(4))),
        ("planar k=5", nonclassical_fraction_measurement(make_planar_measurement(5))),
        ("icosahedron", nonclassical_fraction_measurement(make_platonic_measurement("icosahedron"))),
    ]
    for name, _, _ in STATE_INSTANCES:
        ones.append((name, nonclassical_fraction_states(make_named_state_set(name))))
    for name, rep in ones:
        assert abs(rep.value - 1.0) < 1e-6, f"{name}: omega={rep.value}"
    zeros = [
        ("planar k=3", nonclassical_fraction_measurement(make_planar_measurement(3))),
        ("trivial", nonclassical_fraction_measurement(trivial_measurement(2))),
    ]
    for name, rep in zeros:
        assert abs(rep.value) < 1e-6, f"{name}: omega={rep.value}"
    _ok(7, "nonclassical fraction hits 1 on rank-one/pure cases and 0 on classical ones")


@pytest.mark.parametrize("dim", [2, 3])
def test_criterion_08_flag_convexification_invariance(dim):
    meas = make_mub_multimeasurement(dim)
    flat = flag_convexify_measurement(meas)
    eta_direct = white_noise_robustness_measurement(meas).value
    eta_flag = white_noise_robustness_measurement(flat).value
    assert abs(eta_direct - eta_flag) < 1e-6
    omega_direct = nonclassical_fraction_measurement(meas).value
    omega_flag = nonclassical_fraction_measurement(flat).value
    assert abs(omega_direct - omega_flag) < 1e-6
    _ok(8, f"flag-convexification preserves robustness and fraction for d={dim}")


def test_criterion_09_pentagon_theory_independent_checks():
    result = pentagon_model_result(1.0, rotated_states=False)
    assert not result.feasible
    _, _, beh = pentagon_scenario(1.0, rotated_states=False)
    lhs, satisfied = evaluate_inequality(pentagon_inequality(), beh)
    assert not satisfied and lhs < 0

    for eta in (0.63, 0.70, 0.90):
        assert not pentagon_model_result(eta, rotated_states=True).feasible, f"eta={eta}"
    assert pentagon_model_result(0.61, rotated_states=True).feasible
    _ok(9, "pentagon LP infeasibility pattern and inequality violation as published")


def test_criterion_10_square_scenario_suite():
    states, meas, beh = square_scenario()
    value = square_scaled_witness_value(meas)
    assert abs(value) < 1e-9
    eta_c = white_noise_robustness_measurement(meas).value
    attained = square_scaled_witness_value(add_white_noise_measurement(meas, eta_c))
    assert abs(attained - SQUARE_WITNESS_BOUND) < 1e-6
    assert value < SQUARE_WITNESS_BOUND

    source = MultiSource.deterministic(states)
    report = verify_ontological_model(
        square_scenario_model(), beh,
        preparation_identity_space(source), measurement_identity_space(meas),
    )
    assert report["statistics"] < 1e-10
    assert report["preparation_identities"] < 1e-10
    assert report["measurement_identities"] < 1e-10

    lp = nc_model_lp(beh, preparation_vertices(source), measurement_vertices(meas))
    assert lp.feasible
    _ok(10, "witness value 0 vs bound 2-sqrt(2); model verified; LP still feasible")


def test_criterion_11_steering_inequality_suite():
    ineq = icosahedron_dodecahedron_inequality()
    for eta in (0.0, 0.42, 1.0):
        lhs, _ = evaluate_inequality(ineq, steered_icosahedron_dodecahedron_behavior(eta))
        assert abs(lhs - STEERING_MAX_VIOLATION * eta) < 1e-9, f"eta={eta}"
    assert abs(ineq.bound - STEERING_BOUND) < 1e-15
    below, above = STEERING_THRESHOLD - 1e-3, STEERING_THRESHOLD + 1e-3
    _, sat_below = evaluate_inequality(ineq, steered_icosahedron_dodecahedron_behavior(below))
    _, sat_above = evaluate_inequality(ineq, steered_icosahedron_dodecahedron_behavior(above))
    assert sat_below and not sat_above
    lhs_max, _ = evaluate_inequality(ineq, steered_icosahedron_dodecahedron_behavior(1.0))
    assert abs(lhs_max - STEERING_MAX_VIOLATION) < 1e-9
    assert abs(lhs_max - 0.9106) < 1e-4
    _ok(11, "steering inequality lhs linear in noise; bound, threshold, maximum all match")


def _steered_verdict(eta: float) -> bool:
    steered = multisource_to_state_set(icosahedron_steering_source(eta))
    return certify_states(steered).is_nonclassical


def test_criterion_12_steering_chain():
    assert _steered_verdict(0.45)
    assert not _steered_verdict(0.41)
    lo, hi = 0.41, 0.45
    while hi - lo > 2e-3:
        mid = (lo + hi) / 2
        if _steered_verdict(mid):
            hi = mid
        else:
            lo = mid
    threshold = (lo + hi) / 2
    assert abs(threshold - STEERING_THRESHOLD) <= 5e-3
    _ok(12, f"entanglement detected at 0.45, not at 0.41; transition at {threshold:.4f}")


# ---------------------------------------------------------------------------
# Criterion 13: property suites
# ---------------------------------------------------------------------------

def _hull_membership_max_residual(poly, verts, n_points, seed):
    rng = np.random.default_rng(seed)
    a = poly.eq_coeffs
    svals = np.linalg.svd(a, compute_uv=False)
    rank = int(np.sum(svals > svals[0] * max(a.shape) * 1e-12))
    null = np.linalg.svd(a)[2][rank:]
    x = poly.interior_point.copy()
    worst = 0.0
    v = verts.vertices
    for _ in range(n_points):
        d = null.T @ rng.normal(size=null.shape[0])
        if np.linalg.norm(d) > 1e-13:
            d /= np.linalg.norm(d)
            with np.errstate(divide="ignore"):
                tpos = np.min(np.where(d < -1e-14, -x / d, np.inf))
                tneg = np.min(np.where(d > 1e-14, x / d, np.inf))
            x = x + rng.uniform(-tneg, tpos) * d
        res = linprog(
            np.zeros(len(v)),
            A_eq=np.vstack([v.T, np.ones(len(v))]),
            b_eq=np.concatenate([x, [1.0]]),
            bounds=(0, None),
            method="highs",
        )
        assert res.status == 0
        worst = max(worst, float(np.max(np.abs(v.T @ res.x - x))))
    return worst


def _builtin_polytopes():
    """(name, polytope) for every built-in instance of criteria 1-4."""
    out = []
    for name, factory, _ in MEASUREMENT_INSTANCES:
        meas = factory()
        out.append((name, build_measurement_polytope(meas, measurement_identity_space(meas))))
    for name, factory, _ in STATE_INSTANCES:
        states = factory()
        out.append((name, build_preparation_polytope(states, preparation_identity_space(states))))
    return out


def test_criterion_13_vertex_completeness():
    for seed_shift, (name, poly) in enumerate(_builtin_polytopes()):
        verts = simplex_product_vertices(poly) or enumerate_vertices(poly)
        residual = _hull_membership_max_residual(poly, verts, 100, seed=23 + seed_shift)
        assert residual < 1e-8, f"{name}: hull residual {residual:.2e}"
    _ok(13, "vertex completeness: 100 sampled feasible points per built-in polytope lie in the hull")


def test_criterion_13_shortcut_agreement():
    applied = 0
    for name, poly in _builtin_polytopes():
        shortcut = simplex_product_vertices(poly)
        general = enumerate_vertices(poly)
        if shortcut is None:
            continue
        applied += 1
        assert shortcut.count == general.count, name
        for v in shortcut.vertices:
            assert min(np.max(np.abs(v - u)) for u in general.vertices) < 1e-8, name
    assert applied >= 4  # single POVMs and both unbiased-bases families qualify
    assert simplex_product_vertices(
        build_measurement_polytope(make_planar_measurement(5),
                                   measurement_identity_space(make_planar_measurement(5)))
    ) is None
    _ok(13, f"structural shortcut agrees with the general enumerator on {applied} instances")


def test_criterion_13_monotone_noise_response():
    from ncq.quantifiers import certify_measurement, certify_states

    cases = [
        ("measurement", make_planar_measurement(6)),
        ("measurement", make_platonic_measurement("octahedron")),
        ("states", make_named_state_set("bb84_states")),
    ]
    etas = np.linspace(0.1, 1.0, 7)
    for kind, obj in cases:
        verdicts = []
        for eta in etas:
            if kind == "measurement":
                rep = certify_measurement(add_white_noise_measurement(obj, float(eta)))
            else:
                from ncq.operators import add_white_noise_states

                rep = certify_states(add_white_noise_states(obj, float(eta)))
            verdicts.append(rep.is_classical)
        for earlier, later in zip(verdicts, verdicts[1:]):
            if not earlier:
                assert not later  # once nonclassical, never classical again
        assert verdicts[0] and not verdicts[-1]
    _ok(13, "classicality is monotone under added white noise")


def test_criterion_13_certificate_reverification(robustness_results):
    config = RunConfig()
    for name, entry in robustness_results.items():
        diag = entry["primal"].diagnostics
        assert diag["decomposition_residual"] < config.cert_tol, name
        assert diag["min_block_eig"] > -config.cert_tol, name
    _ok(13, "primal certificates re-verify their constraints within cert_tol")


def test_criterion_13_farkas_soundness():
    rng = np.random.default_rng(123)
    for eta, rotated in ((1.0, False), (0.70, True)):
        source, meas, beh = pentagon_scenario(eta, rotated)
        v_prep = preparation_vertices(source)
        v_meas = measurement_vertices(meas)
        result = nc_model_lp(beh, v_prep, v_meas)
        assert not result.feasible
        tables = sample_noncontextual_tables(beh.table.shape, v_prep, v_meas, 1000, rng)
        values = np.einsum("abxy,sabxy->s", result.inequality.coeffs, tables)
        assert values.max() <= 1e-9
        lhs = float(np.sum(result.inequality.coeffs * beh.table))
        assert lhs >= result.violation - 1e-9
    _ok(13, "Farkas certificates hold on 1000 sampled noncontextual behaviors each")
