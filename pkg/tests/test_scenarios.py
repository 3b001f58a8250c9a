import numpy as np
import pytest

from hal.averaging import QuadratureConfig, f_bar_eval
from hal.errors import (DeltaOutOfRange, DisconnectedGraph,
                        FrequencyCollision, InfeasibleSchedule, OffManifold)
from hal.oscillatory import verify_regularity
from hal.scenarios import (build_es_affine, build_sphere_es, build_sync,
                           build_vehicle, estimate_synergy_gap, r2_params,
                           r4_params)
from hal.scenarios.es_affine import EsAffineParams
from hal.scenarios.sphere import (SphereEsParams, geodesic_distance,
                                  spurious_critical_point, synergistic_eval,
                                  warped_cost, warped_cost_grad)
from hal.scenarios.sync import SyncParams, pairwise_sync_error
from hal.scenarios.vehicle import (AGGRESSIVE_SCHEDULE, DEFAULT_AUTOMATON,
                                   VehicleParams)
from hal.automaton import AutomatonConfig, SwitchSchedule

TWO_PI = 2.0 * np.pi
QUAD = QuadratureConfig()


# ---------------------------------------------------------------------------
# regularity across all scenarios
# ---------------------------------------------------------------------------

def test_all_scenarios_pass_regularity(vehicle, sync_r2, es_plane, sphere):
    for scn, _ in (vehicle, sync_r2, es_plane, sphere):
        samples = [(x, z, 0.37, 1.91) for (x, z) in scn.random_states(10, seed=3)]
        report = verify_regularity(scn.osc, samples, quad_nodes=256)
        assert report.max_residual() <= 1e-8, scn.name


# ---------------------------------------------------------------------------
# vehicle
# ---------------------------------------------------------------------------

def test_vehicle_average_independent_of_heading(vehicle):
    scn, analytic = vehicle
    x_p = np.array([1.2, -0.8])
    values = []
    for ang in np.linspace(0.0, TWO_PI, 20, endpoint=False):
        x = np.array([x_p[0], x_p[1], np.cos(ang), np.sin(ang)])
        fb = f_bar_eval(scn.osc, x, 3.0, QUAD)
        values.append(fb)
        assert np.max(np.abs(fb[2:])) <= 1e-6  # heading block is at rest
    values = np.stack(values)
    assert np.max(np.abs(values - values[0])) <= 1e-6


def test_vehicle_average_oracle_at_random_states(vehicle):
    scn, analytic = vehicle
    worst = 0.0
    for (x, z) in scn.random_states(20, seed=7):
        err = np.max(np.abs(f_bar_eval(scn.osc, x, z, QUAD) - analytic(x, z)))
        worst = max(worst, float(err))
    assert worst <= 1e-6


def test_vehicle_rejects_infeasible_schedule():
    with pytest.raises(InfeasibleSchedule):
        build_vehicle(VehicleParams(schedule=AGGRESSIVE_SCHEDULE))


def test_vehicle_nominal_schedule_accepted_and_aggressive_rejected():
    from hal.automaton import check_schedule
    from hal.scenarios.vehicle import NOMINAL_SCHEDULE
    ok = check_schedule(NOMINAL_SCHEDULE, 3, DEFAULT_AUTOMATON, horizon=20.0)
    assert ok.ok
    bad = check_schedule(AGGRESSIVE_SCHEDULE, 1, DEFAULT_AUTOMATON, horizon=20.0)
    assert not bad.ok


# ---------------------------------------------------------------------------
# synchronization
# ---------------------------------------------------------------------------

def test_sync_average_matches_kuramoto_form(sync_r2):
    scn, analytic = sync_r2
    xi = np.array([0.0, np.pi / 2.0])
    fb = f_bar_eval(scn.osc, xi, 1.0, QUAD)
    np.testing.assert_allclose(fb, [2.0, 0.0], atol=1e-6)
    np.testing.assert_allclose(analytic(xi, 1.0), [2.0, 0.0], atol=1e-12)


def test_sync_average_independent_of_directions(sync_r2):
    scn, _ = sync_r2
    xi = np.array([0.4, 2.9])
    fields = [f_bar_eval(scn.osc, xi, float(mode), QUAD)
              for mode in (1, 2, 3, 4)]  # one graph, four sign patterns
    fields = np.stack(fields)
    assert np.max(np.abs(fields - fields[0])) <= 1e-6


def test_sync_equal_phases_drift_together():
    params = r2_params(xi0=np.array([1.0, 1.0]), t_final=5.0,
                       schedule=SwitchSchedule([(2.0, 3)], mode0=1))
    scn, analytic = build_sync(params)
    xi = np.array([1.0, 1.0])
    np.testing.assert_allclose(analytic(xi, 1.0), np.ones(2), atol=1e-12)
    arc = scn.run(record_every=4)
    errs = [pairwise_sync_error(s[:2]) for seg in arc.segments
            for s in seg.states]
    assert pairwise_sync_error(arc.last_state()[:2]) <= 0.02
    assert max(errs) <= 0.35  # transient probing splits phases only briefly


def test_sync_circle_embedding():
    from hal.scenarios.sync import to_circle_embedding
    pts = to_circle_embedding(np.array([0.0, np.pi / 2.0]))
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0)
    np.testing.assert_allclose(pts[0], [-1.0, 0.0], atol=1e-12)


def test_sync_rejects_disconnected_graph():
    with pytest.raises(DisconnectedGraph):
        SyncParams(r=3, graphs=(((0, 1),),), directions=((1, 1, 1),))


def test_sync_rejects_duplicate_frequencies():
    with pytest.raises(FrequencyCollision):
        SyncParams(r=2, graphs=(((0, 1),),), directions=((1, 1),),
                   frequencies=(1, 1))


def test_sync_modes_sharing_graph_share_average():
    params = r4_params()
    scn, _ = build_sync(params)
    xi = np.array([0.1, 1.7, 3.0, 5.1])
    # modes 1..4 use graph 0 with different signs; 5..8 graph 1
    g0 = np.stack([f_bar_eval(scn.osc, xi, float(m), QUAD) for m in (1, 2, 3, 4)])
    assert np.max(np.abs(g0 - g0[0])) <= 1e-6
    g1 = f_bar_eval(scn.osc, xi, 5.0, QUAD)
    assert np.max(np.abs(g1 - g0[0])) > 1e-3  # different topology, different flow


# ---------------------------------------------------------------------------
# control-affine seeking
# ---------------------------------------------------------------------------

def test_es_affine_identity_excitation(es_plane):
    scn, analytic = es_plane
    x = np.array([1.0, 0.0])
    np.testing.assert_allclose(analytic(x, 3.0), [-1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(analytic(x, 2.0), np.zeros(2), atol=1e-12)


def test_es_affine_blackout_mode_is_neutral(es_plane):
    scn, _ = es_plane
    for x in (np.array([0.5, 0.5]), np.array([-1.0, 2.0])):
        fb = f_bar_eval(scn.osc, x, 2.0, QUAD)
        np.testing.assert_allclose(fb, np.zeros(2), atol=1e-9)


def test_es_affine_spoofed_mode_ascends():
    # sustained spoofing: make the attacked mode budget-neutral so the run
    # can stay in it for the whole horizon
    automaton = AutomatonConfig(modes=(1, 2, 3), stable=(3,), unstable=(1, 2),
                                eta1=1.0, eta2=1.0, N0=2, T0=2.0)
    params = EsAffineParams(n=2, eps=0.05, x0=(0.6, -0.4), t_final=5.0,
                            schedule=SwitchSchedule([], mode0=1),
                            automaton=automaton)
    scn, _ = build_es_affine(params)
    arc = scn.run(record_every=4)
    assert np.linalg.norm(arc.last_state()[:2]) > np.linalg.norm(scn.x0[:2])


def test_es_affine_rejects_frequency_collision():
    with pytest.raises(FrequencyCollision):
        EsAffineParams(n=2, frequencies=(2, 2))


def test_es_affine_rejects_degenerate_field_family():
    from hal.errors import ExcitationDeficient
    e1 = np.array([1.0, 0.0])
    params = EsAffineParams(n=2, fields=[lambda x, t1: e1, lambda x, t1: e1],
                            frequencies=(1, 2))
    params.constant_fields = True
    with pytest.raises(ExcitationDeficient):
        build_es_affine(params)


def test_es_affine_rational_frequency_run():
    from hal.scenarios import load_scenario
    from pathlib import Path
    cfg = Path(__file__).resolve().parents[1] / "configs" / "es_affine.json"
    scn = load_scenario(cfg, t_final=3.0)
    assert scn.osc.T2 == pytest.approx(8.0 * np.pi)
    arc = scn.run(record_every=8)
    assert np.linalg.norm(arc.last_state()[:3]) < np.linalg.norm(scn.x0[:3])


# ---------------------------------------------------------------------------
# sphere seeking
# ---------------------------------------------------------------------------

def test_synergistic_values_at_landmarks(sphere):
    scn, _ = sphere
    params = scn.params
    e3 = np.array([0.0, 0.0, 1.0])
    e1 = np.array([1.0, 0.0, 0.0])
    antipode = np.array([0.0, 0.0, -1.0])
    for q in (1, 2):
        assert synergistic_eval(q, e3, params) == pytest.approx(0.0, abs=1e-12)
        assert synergistic_eval(q, e1, params) == pytest.approx(1.0, abs=1e-12)
        assert synergistic_eval(q, antipode, params) == pytest.approx(
            1.0 + np.cos(0.25), abs=1e-12)


def test_synergistic_rejects_off_manifold(sphere):
    scn, _ = sphere
    with pytest.raises(OffManifold):
        synergistic_eval(1, np.array([0.0, 0.0, -1.01]), scn.params)


def test_warped_family_agrees_with_cost_near_minimizer(sphere, rng):
    scn, _ = sphere
    params = scn.params
    count = 0
    while count < 25:
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        if v[2] <= 0.05:
            continue  # want the agreement cap, cost below one
        count += 1
        j = 1.0 - v[2]
        for q in (1, 2):
            assert synergistic_eval(q, v, params) == pytest.approx(j, abs=1e-12)


def test_warped_cost_grad_matches_finite_differences(sphere, rng):
    scn, _ = sphere
    for _ in range(10):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        for k in scn.params.k_warp:
            g = warped_cost_grad(v, k)
            fd = np.zeros(3)
            h = 1e-6
            for i in range(3):
                e = np.zeros(3)
                e[i] = h
                fd[i] = (warped_cost(v + e, k) - warped_cost(v - e, k)) / (2 * h)
            if abs(v[2]) < 1e-3:
                continue  # kink circle of the piecewise warp
            np.testing.assert_allclose(g, fd, atol=1e-8)


def test_sphere_average_oracle(sphere):
    scn, analytic = sphere
    worst = 0.0
    for (x, z) in scn.random_states(20, seed=11):
        err = np.max(np.abs(f_bar_eval(scn.osc, x, z, QUAD) - analytic(x, z)))
        worst = max(worst, float(err))
    assert worst <= 1e-6


def test_sphere_rejects_delta_out_of_range():
    with pytest.raises(DeltaOutOfRange):
        SphereEsParams(delta=0.3)
    with pytest.raises(DeltaOutOfRange):
        SphereEsParams(delta=0.0)


def test_sphere_hysteresis_run_small_delta():
    # a working gap: below the family's synergy constant, so switching is live
    params = SphereEsParams(delta=0.08)
    scn, _ = build_sphere_es(params)
    arc = scn.run(record_every=2)
    assert arc.num_jumps >= 1
    # sphere constraint holds to tight tolerance at every sample
    for seg in arc.segments:
        norms = np.linalg.norm(seg.states[:, :3], axis=1)
        assert np.max(np.abs(norms - 1.0)) <= 1e-9
    # every jump pays at least delta in the active warped cost
    for prev, nxt in zip(arc.segments[:-1], arc.segments[1:]):
        pre, post = prev.states[-1], nxt.states[0]
        drop = (synergistic_eval(int(round(pre[3])), pre[:3], params)
                - synergistic_eval(int(round(post[3])), post[:3], params))
        assert drop >= params.delta - 1e-9
    # gap condition holds during flows (the final sample of a jumping
    # segment is the detection point, which already sits in the jump set)
    from hal.scenarios.sphere import hysteresis_gap
    for idx, seg in enumerate(arc.segments):
        interior = seg.states[:-1] if idx < len(arc.segments) - 1 else seg.states
        for s in interior[:: max(1, len(interior) // 50)]:
            assert hysteresis_gap(s[:3], int(round(s[3])), params) \
                <= params.delta + 1e-6
    assert geodesic_distance(arc.last_state()[:3], [0, 0, 1]) <= 0.3


def test_sphere_average_stalls_at_spurious_point(sphere):
    scn, _ = sphere
    xc = spurious_critical_point(scn.params, q=1)
    fb = f_bar_eval(scn.osc, xc, 1.0, QUAD)
    assert np.linalg.norm(fb) <= 1e-6
    # ... while the other mode still pulls away from it
    fb2 = f_bar_eval(scn.osc, xc, 2.0, QUAD)
    assert np.linalg.norm(fb2) > 1e-2


def test_scenario_arcs_validate_cleanly():
    from hal.simulate import validate_arc
    for built, kw in [
        (build_vehicle(), dict(record_every=2, t_final=8.0)),
        (build_sync(r2_params()), dict(record_every=2, t_final=8.0)),
        (build_sphere_es(SphereEsParams(delta=0.08, t_final=8.0)),
         dict(record_every=2)),
    ]:
        scn, _ = built
        arc = scn.run(**kw)
        report = validate_arc(arc, scn.system, tol=1e-6)
        assert report.in_set_violations == 0, scn.name
        assert report.jump_violations == 0, scn.name


def test_sphere_closeness_shrinks_with_epsilon():
    # no-jump regime (delta above the attainable gap): both systems flow
    # only, so the pairing against the averaged run is structurally clean
    T = 6.0
    base, _ = build_sphere_es(SphereEsParams(delta=0.2, t_final=T))
    avg_arc = base.run_averaged(t_final=T)
    avg_proj = avg_arc.select(["x_1", "x_2", "x_3", "z1"])
    from hal.closeness import min_rho
    rhos = []
    for eps in (0.2, 0.1, 0.05):
        scn, _ = build_sphere_es(SphereEsParams(delta=0.2, eps=eps, t_final=T))
        arc = scn.run(record_every=4, t_final=T)
        proj = arc.select(["x_1", "x_2", "x_3", "z1"])
        rhos.append(min_rho(proj, avg_proj, T=T, tol=1e-3).rho_min)
    assert all(b <= a + 2e-3 for a, b in zip(rhos, rhos[1:])), rhos


def test_sphere_synergy_gap_probe(sphere):
    scn, _ = sphere
    probe = estimate_synergy_gap(scn.params)
    assert probe["synergy_constant"] == pytest.approx(0.10961, abs=1e-4)
    assert probe["max_gap"] == pytest.approx(0.19156, abs=1e-4)
    # the default gap of 0.2 exceeds both: no jump can ever fire there
    assert not probe["jumps_possible"]
    small = estimate_synergy_gap(SphereEsParams(delta=0.08))
    assert small["jumps_possible"] and small["escapes_critical_points"]
