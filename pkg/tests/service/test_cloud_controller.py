import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from neuroedge.domain.errors import DimensionMismatch, InsideObstacle, MalformedMessage, ValidationError
from neuroedge.domain.plant import make_workbench
from neuroedge.models.link import ControlSignal, StateReport, SupervisionRequest
from neuroedge.service.cloud.controller import (
    CloudPolicy,
    Obstacle,
    RepulsionParams,
    cloud_step,
    control_effort,
    lqr_control,
    obstacle_clearance,
    repulsive_accel,
)
from neuroedge.service.cloud.endpoint import CloudEndpoint
from neuroedge.service.cloud.reference import CloudReference, simulate_reference
from neuroedge.service.linalg.solvers import matrix_exponential
from neuroedge.service.runner.orchestrator import build_plant, build_policy
from neuroedge.service.runner.scenarios import config_from_dict

TABLE_GAIN = np.array([[0.2361, 1.2133]])


@pytest.mark.parametrize("K, x, expected", [
    (TABLE_GAIN, [5.0, 2.0], [-3.6071]),
    (TABLE_GAIN, [0.0, 0.0], [0.0]),
    (np.zeros((1, 2)), [5.0, 2.0], [0.0]),
])
def test_lqr_control(K, x, expected):
    np.testing.assert_allclose(lqr_control(CloudPolicy(K=K), x), expected, atol=1e-4)


def test_lqr_control_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        lqr_control(CloudPolicy(K=TABLE_GAIN), [1.0, 2.0, 3.0])


def test_repulsion_outside_influence_region():
    obstacle = Obstacle(center0=(0.0, 0.0, 0.0), radius=1.0)
    accel = repulsive_accel([12.0, 0.0, 0.0], obstacle, 0.0, RepulsionParams(k_rep=5.0, d0=10.0))
    np.testing.assert_array_equal(accel, np.zeros(3))


def test_repulsion_khatib_value():
    obstacle = Obstacle(center0=(0.0, 0.0, 0.0), radius=0.0)
    accel = repulsive_accel([1.0, 0.0, 0.0], obstacle, 0.0, RepulsionParams(k_rep=1.0, d0=2.0))
    np.testing.assert_allclose(accel, [0.5, 0.0, 0.0], atol=1e-15)


def test_static_repulsion_ignores_time():
    obstacle = Obstacle(center0=(1.0, 2.0, 3.0), radius=0.5)
    params = RepulsionParams(k_rep=2.0, d0=4.0)
    p = [2.0, 2.5, 3.5]
    np.testing.assert_array_equal(
        repulsive_accel(p, obstacle, 0.0, params),
        repulsive_accel(p, obstacle, 123.4, params),
    )


def test_moving_obstacle_center():
    obstacle = Obstacle(center0=(35.0, 6.0, -0.5), velocity=(0.0, 0.3, 0.0), radius=2.0)
    np.testing.assert_allclose(obstacle.center(10.0), [35.0, 9.0, -0.5])


def test_repulsion_inside_obstacle():
    obstacle = Obstacle(center0=(0.0, 0.0, 0.0), radius=2.0)
    with pytest.raises(InsideObstacle):
        repulsive_accel([1.0, 0.0, 0.0], obstacle, 0.0, RepulsionParams())


def test_repulsion_is_clamped_and_radial_near_surface():
    obstacle = Obstacle(center0=(0.0, 0.0, 0.0), radius=1.0)
    offset = np.array([1.001, 0.3, -0.2])
    accel = repulsive_accel(offset, obstacle, 0.0, RepulsionParams(k_rep=10.0, d0=5.0, u_max=1.0))

    assert np.max(np.abs(accel)) == pytest.approx(1.0)
    assert np.linalg.norm(np.cross(accel, offset)) < 1e-12
    assert np.dot(accel, offset) > 0


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.floats(-8.0, 8.0)] * 3))
def test_repulsion_is_purely_radial(p):
    p = np.array(p)
    assume(np.linalg.norm(p) > 1.01)
    obstacle = Obstacle(center0=(0.0, 0.0, 0.0), radius=1.0)
    params = RepulsionParams(k_rep=3.0, d0=5.0, u_max=1.0)

    accel = repulsive_accel(p, obstacle, 0.0, params)

    assert np.linalg.norm(np.cross(accel, p)) <= 1e-12
    assert np.all(np.abs(accel) <= params.u_max * (1 + 1e-12))


def test_obstacle_radius_must_be_non_negative():
    with pytest.raises(ValidationError):
        Obstacle(center0=(0.0, 0.0, 0.0), radius=-1.0)


def test_cloud_step_without_obstacles_is_lqr():
    policy = CloudPolicy(K=TABLE_GAIN)
    np.testing.assert_array_equal(cloud_step(policy, [5.0, 2.0], 3.0), lqr_control(policy, [5.0, 2.0]))


def test_cloud_step_at_rendezvous_origin():
    cfg = config_from_dict({"scenario": "rendezvous"})
    policy = build_policy(cfg, build_plant(cfg))
    np.testing.assert_array_equal(cloud_step(policy, np.zeros(6), 0.0), np.zeros(3))


def test_cloud_step_adds_repulsion():
    K = np.zeros((3, 6))
    obstacle = Obstacle(center0=(0.0, 0.0, 0.0), radius=0.0)
    policy = CloudPolicy(K=K, obstacles=(obstacle,), repulsion=RepulsionParams(k_rep=1.0, d0=2.0))
    u = cloud_step(policy, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.0)
    np.testing.assert_allclose(u, [0.5, 0.0, 0.0])


def test_obstacles_need_three_force_channels():
    policy = CloudPolicy(K=TABLE_GAIN, obstacles=(Obstacle(center0=(9.0, 9.0, 9.0), radius=1.0),))
    with pytest.raises(DimensionMismatch):
        cloud_step(policy, [5.0, 2.0], 0.0)


def test_obstacle_clearance():
    obstacles = [Obstacle(center0=(0.0, 0.0, 0.0), radius=1.0), Obstacle(center0=(10.0, 0.0, 0.0), radius=2.0)]
    assert obstacle_clearance([4.0, 0.0, 0.0], obstacles, 0.0) == pytest.approx(3.0)
    assert obstacle_clearance([4.0, 0.0, 0.0], [], 0.0) == np.inf


def test_control_effort():
    assert control_effort([[3.0, 4.0], [0.0, 1.0]], 0.1) == pytest.approx(0.6)


# --- reference trajectory ---

def test_workbench_reference_decays():
    cfg = config_from_dict({"scenario": "workbench"})
    plant = build_plant(cfg)
    policy = build_policy(cfg, plant)
    reference = CloudReference(policy, plant)

    x_end = reference.advance_to(100)

    x0 = np.array([5.0, 2.0])
    assert np.linalg.norm(x_end) < 0.05 * np.linalg.norm(x0)
    # sampled-data loop: u = -K x held over each dt
    augmented = np.zeros((3, 3))
    augmented[:2, :2], augmented[:2, 2:] = plant.A, plant.B
    phi = matrix_exponential(augmented, cfg.dt)
    step = phi[:2, :2] - phi[:2, 2:] @ policy.K
    expected = np.linalg.matrix_power(step, 100) @ x0
    assert np.linalg.norm(x_end - expected) <= 1e-3 * np.linalg.norm(expected)


def test_rendezvous_reference_converges():
    cfg = config_from_dict({"scenario": "rendezvous"})
    plant = build_plant(cfg)
    reference = CloudReference(build_policy(cfg, plant), plant)

    x_end = reference.advance_to(cfg.steps)

    assert np.linalg.norm(x_end[:3]) < 1.0
    assert np.linalg.norm(x_end[3:]) < 0.01


@pytest.mark.parametrize("scenario", ["rendezvous_static_obstacle", "rendezvous_dynamic_obstacle"])
def test_reference_avoids_obstacle(scenario):
    cfg = config_from_dict({"scenario": scenario})
    plant = build_plant(cfg)
    policy = build_policy(cfg, plant)

    states, _ = simulate_reference(policy, plant, cfg.steps)

    clearance = min(obstacle_clearance(x[:3], policy.obstacles, k * cfg.dt) for k, x in enumerate(states))
    assert clearance > 0


def test_obstacle_costs_more_control_effort():
    free = config_from_dict({"scenario": "rendezvous"})
    blocked = config_from_dict({"scenario": "rendezvous_static_obstacle"})
    efforts = []
    for cfg in (free, blocked):
        plant = build_plant(cfg)
        _, controls = simulate_reference(build_policy(cfg, plant), plant, cfg.steps)
        efforts.append(control_effort(controls, cfg.dt))
    assert efforts[1] > efforts[0]


def test_reference_cannot_rewind():
    cfg = config_from_dict({"scenario": "workbench"})
    plant = build_plant(cfg)
    reference = CloudReference(build_policy(cfg, plant), plant)
    reference.advance_to(5)
    with pytest.raises(MalformedMessage):
        reference.advance_to(3)


def test_reference_trajectory_after_last_step_was_applied():
    cfg = config_from_dict({"scenario": "workbench"})
    plant = build_plant(cfg)
    reference = CloudReference(build_policy(cfg, plant), plant)
    reference.advance_to(10)

    trajectory = reference.trajectory(10)

    assert reference.step == 10
    assert len(trajectory) == 10
    np.testing.assert_array_equal(np.array(trajectory), np.array(reference.states[:10]))


# --- endpoint ---

def test_endpoint_answers_with_cloud_command(workbench_endpoint):
    assert workbench_endpoint.handle(StateReport(step=0, data=[5.0, 2.0])) is None
    reply = workbench_endpoint.handle(SupervisionRequest(step=0))

    assert isinstance(reply, ControlSignal)
    assert reply.step == 0
    assert reply.u[0] == pytest.approx(-3.6071, abs=1e-3)
    assert workbench_endpoint.reference.step == 1


def test_endpoint_request_without_state(workbench_endpoint):
    with pytest.raises(MalformedMessage):
        workbench_endpoint.handle(SupervisionRequest(step=0))


def test_endpoint_rejects_wrong_state_size(workbench_endpoint):
    with pytest.raises(MalformedMessage):
        workbench_endpoint.handle(StateReport(step=0, data=[1.0, 2.0, 3.0]))


def test_endpoint_rejects_control_messages(workbench_endpoint):
    with pytest.raises(MalformedMessage):
        workbench_endpoint.handle(ControlSignal(step=0, data=[1.0]))


def test_endpoint_reference_runs_open_between_contacts():
    plant = make_workbench()
    policy = CloudPolicy(K=TABLE_GAIN)
    endpoint = CloudEndpoint(policy, plant)

    trajectory = endpoint.trajectory(10)

    expected = CloudReference(policy, make_workbench())
    expected.advance_to(9)
    assert len(trajectory) == 10
    np.testing.assert_array_equal(np.array(trajectory), np.array(expected.states[:10]))
