import numpy as np
import pytest

from neuroedge.domain.errors import InsideObstacle, ValidationError
from neuroedge.models.scenario import SweepSpec
from neuroedge.service.edge.gate import GateMode
from neuroedge.service.link.transport import HttpTransport
from neuroedge.service.runner.orchestrator import run_scenario, simulate
from neuroedge.service.runner.scenarios import config_from_dict
from neuroedge.service.runner.sweep import sweep_rows
from neuroedge.service.telemetry.metrics import normalized_tracking_error
from neuroedge.service.telemetry.writer import read_run, read_summary

from tests.conftest import SHORT_WORKBENCH


# a threshold nobody exceeds keeps the gate autonomous after warmup
QUIET_GATE = {**SHORT_WORKBENCH, "learning": {"warmup_steps": 5, "check_interval": 5, "e_th": [1e9]}}


def test_energy_identities(short_workbench):
    result = simulate(short_workbench)
    summary = result.summary

    assert summary.steps == 20
    assert summary.total_spikes == sum(r.spikes for r in result.records) == len(result.spike_log)
    assert summary.total_energy_pJ == 23.6 * summary.total_spikes
    assert result.records[-1].energy_cum == summary.total_energy_pJ
    energies = [r.energy_cum for r in result.records]
    assert energies == sorted(energies)
    assert all(r.energy_step == 23.6 * r.spikes for r in result.records)
    assert summary.spike_fraction == summary.total_spikes / (30 * 20 * 100)


def test_supervision_messages_follow_the_schedule(short_workbench):
    summary = simulate(short_workbench).summary

    assert summary.supervision_messages == summary.expected_supervision_messages
    assert summary.state_reports == summary.supervision_messages
    assert summary.supervision_messages >= 5


def test_thousand_steps_need_69_messages():
    cfg = config_from_dict({
        "scenario": "workbench",
        "dt": 0.01,
        "horizon": 10.0,
        "learning": {"e_th": [1e9], "substeps_per_step": 10},
    })

    summary = simulate(cfg).summary

    assert summary.steps == 1000
    assert summary.supervision_messages == 69
    assert summary.expected_supervision_messages == 69
    assert summary.relearn_windows == []


def test_run_ending_on_a_supervised_step():
    cfg = config_from_dict({**SHORT_WORKBENCH, "learning": {"warmup_steps": 5, "check_interval": 5, "e_th": [1e-12], "command": "zero"}})

    result = simulate(cfg)

    assert result.records[-1].supervised
    assert len(result.records) == 20
    assert all(r.x_cloud_ref is not None for r in result.records)
    assert result.summary.supervision_messages == result.summary.expected_supervision_messages


def test_checks_judge_the_autonomous_readout():
    cfg = config_from_dict({**SHORT_WORKBENCH, "horizon": 4.0})
    records = simulate(cfg).records
    checked = 0

    for previous, record in zip(records, records[1:]):
        if record.step < 5 or not record.supervised or previous.mode is GateMode.RELEARN:
            continue
        checked += 1
        error = np.subtract(record.u_cloud, record.u_hat)
        np.testing.assert_allclose(record.u_error, error, atol=1e-15)
        assert np.all(np.abs(error) <= 0.1) or record.mode is GateMode.RELEARN
    assert checked >= 7


def test_edge_drives_the_plant_after_warmup(short_workbench):
    result = simulate(short_workbench)
    after_warmup = [r.u_hat[0] for r in result.records[5:]]

    assert len(set(after_warmup)) > 1
    assert result.summary.nte_control < 0.5


def test_relearning_ends_once_the_fitted_command_agrees():
    cfg = config_from_dict({"scenario": "rendezvous", "horizon": 20.0})
    summary = simulate(cfg).summary

    assert summary.steps == 200
    assert summary.supervision_messages < summary.steps
    assert summary.supervision_messages == summary.expected_supervision_messages
    assert all(end - start <= 5 for start, end in summary.relearn_windows)


def test_records_track_supervision(short_workbench):
    records = simulate(short_workbench).records

    for record in records:
        assert (record.u_cloud is not None) == record.supervised
        if record.supervised:
            assert record.u_cloud == record.u_expected
        assert record.x_cloud_ref is not None
    assert all(r.supervised for r in records[:5])
    assert records[0].x_cloud_ref == records[0].x_plant == [5.0, 2.0]


def test_weights_frozen_without_supervision():
    cfg = config_from_dict(QUIET_GATE)
    snapshots = []

    result = simulate(cfg, observer=lambda record, state: snapshots.append(state.Omega_s.copy()))

    unsupervised = [k for k, r in enumerate(result.records) if not r.supervised]
    assert unsupervised == [6, 7, 8, 9, 11, 12, 13, 14, 16, 17, 18, 19]
    for k in unsupervised:
        np.testing.assert_array_equal(snapshots[k], snapshots[k - 1])


def test_same_seed_same_files(short_workbench, tmp_path):
    run_scenario(short_workbench, out_dir=tmp_path / "a")
    run_scenario(short_workbench, out_dir=tmp_path / "b")

    for name in ("run.csv", "spikes.csv", "weights.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_changes_the_network(short_workbench):
    other = short_workbench.model_copy(update={"seed": 1})
    assert simulate(short_workbench).spike_log != simulate(other).spike_log


def test_written_run_matches_summary(short_workbench, tmp_path):
    summary = run_scenario(short_workbench, out_dir=tmp_path)

    records = read_run(tmp_path)
    assert len(records) == summary.steps
    assert records[-1].energy_cum == summary.total_energy_pJ
    assert read_summary(tmp_path) == summary


def test_short_run_has_no_tracking_error():
    cfg = config_from_dict({**SHORT_WORKBENCH, "horizon": 0.3})
    summary = simulate(cfg).summary
    assert summary.steps == 3
    assert summary.nte_states is None
    assert summary.nte_control is None


def test_cloud_actuated_warmup_follows_reference():
    cfg = config_from_dict({**SHORT_WORKBENCH, "cloud_actuates_warmup": True})
    records = simulate(cfg).records

    for record in records[:6]:
        assert record.x_cloud_ref == record.x_plant


def test_tcp_link_matches_inproc(short_workbench):
    tcp = short_workbench.model_copy(update={"link": "tcp://127.0.0.1:0"})
    inproc_result = simulate(short_workbench)
    tcp_result = simulate(tcp)

    assert tcp_result.records == inproc_result.records
    assert tcp_result.summary.payload_bytes == inproc_result.summary.payload_bytes


def test_http_link_matches_inproc(short_workbench, client):
    http_result = simulate(short_workbench, transport=HttpTransport("http://testserver", session=client))
    inproc_result = simulate(short_workbench)

    assert http_result.records == inproc_result.records
    assert http_result.summary == inproc_result.summary


def test_unknown_link_is_rejected(short_workbench):
    with pytest.raises(ValidationError):
        simulate(short_workbench.model_copy(update={"link": "udp://127.0.0.1:9"}))


def test_collision_aborts_the_run():
    cfg = config_from_dict({
        "scenario": "rendezvous_static_obstacle",
        "horizon": 1.0,
        "obstacles": [{"center0": [70.0, 30.0, -5.0], "radius": 2.0}],
    })
    with pytest.raises(InsideObstacle):
        simulate(cfg)


@pytest.mark.slow
def test_workbench_tracks_cloud_during_warmup():
    errors = []
    for seed in range(5):
        cfg = config_from_dict({"scenario": "workbench", "seed": seed})
        records = simulate(cfg).records[: cfg.learning.warmup_steps]
        errors.append(normalized_tracking_error([r.u_cloud for r in records], [r.u_hat for r in records]))
    assert np.median(errors) < 0.2


@pytest.mark.slow
def test_rendezvous_run_keeps_its_accounting():
    cfg = config_from_dict({"scenario": "rendezvous"})
    summary = simulate(cfg).summary

    assert summary.steps == 3600
    assert summary.supervision_messages == summary.expected_supervision_messages
    assert summary.total_energy_pJ == 23.6 * summary.total_spikes
    assert summary.control_effort_reference > 0
    assert summary.supervision_messages < summary.steps


@pytest.mark.slow
def test_workbench_tracks_cloud_after_warmup():
    errors = [simulate(config_from_dict({"scenario": "workbench", "seed": seed})).summary.nte_control for seed in range(5)]
    assert np.median(errors) < 0.2


def _mean_abs_error(records) -> float:
    return float(np.mean([np.abs(r.u_error).mean() for r in records if r.u_error is not None]))


@pytest.mark.slow
def test_learning_reduces_the_command_error():
    early, late = [], []
    for seed in range(5):
        records = simulate(config_from_dict({"scenario": "workbench", "seed": seed, "horizon": 20.0})).records
        early.append(_mean_abs_error(records[:50]))
        late.append(_mean_abs_error(records[-100:]))
    assert np.median(late) < np.median(early)


@pytest.mark.slow
def test_spikes_stay_sparse():
    summary = simulate(config_from_dict({"scenario": "workbench"})).summary
    assert summary.neurons == 30
    assert summary.spike_fraction < 0.1
    assert summary.spike_fraction_per_step == pytest.approx(summary.spike_fraction * summary.substeps_per_step)


@pytest.mark.slow
def test_more_neurons_track_better():
    base = config_from_dict({"scenario": "workbench"})
    rows = sweep_rows(SweepSpec(base=base, N_values=[5, 15, 30], seeds=list(range(5))))

    def median_nte(n):
        return np.median([row["nte_control"] for row in rows if row["N"] == n])

    assert median_nte(30) <= 0.2 * median_nte(5)


@pytest.mark.slow
def test_rendezvous_reaches_the_target():
    summaries = [simulate(config_from_dict({"scenario": "rendezvous", "seed": seed})).summary for seed in range(3)]

    assert np.median([s.final_position_norm for s in summaries]) < 1.0
    assert np.median([s.nte_states for s in summaries]) < 0.1


@pytest.mark.slow
def test_obstacles_cost_energy_and_keep_clear():
    summaries = {
        kind: simulate(config_from_dict({"scenario": kind})).summary
        for kind in ("rendezvous", "rendezvous_static_obstacle", "rendezvous_dynamic_obstacle")
    }
    none, static, dynamic = (summaries[k].total_energy_pJ for k in summaries)

    assert none < static < dynamic
    assert summaries["rendezvous_static_obstacle"].min_obstacle_clearance > 0
    assert summaries["rendezvous_dynamic_obstacle"].min_obstacle_clearance > 0
