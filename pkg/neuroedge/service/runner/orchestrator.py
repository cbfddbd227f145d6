import logging
from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from neuroedge.domain.errors import DegenerateTarget
from neuroedge.domain.plant import CwParams, LtiPlant, make_cw, make_workbench
from neuroedge.models.scenario import ScenarioConfig
from neuroedge.models.telemetry import RunSummary, StepRecord
from neuroedge.service.cloud.controller import (
    CloudPolicy,
    Obstacle,
    RepulsionParams,
    cloud_step,
    control_effort,
    obstacle_clearance,
)
from neuroedge.service.cloud.endpoint import CloudEndpoint
from neuroedge.service.cloud.reference import simulate_reference
from neuroedge.service.edge.controller import EdgeController
from neuroedge.service.edge.gate import GateMode, LearningConfig, SupervisionGate, gate_step
from neuroedge.service.edge.network import NetworkState, init_network
from neuroedge.service.link.schedule import supervision_count
from neuroedge.service.link.stats import LinkClient
from neuroedge.service.link.transport import open_link
from neuroedge.service.linalg.solvers import lqr_gain
from neuroedge.service.runner.config import OUTPUT_DIR
from neuroedge.service.telemetry.energy import spike_energy, spike_fraction
from neuroedge.service.telemetry.metrics import normalized_tracking_error, spiking_cost
from neuroedge.service.telemetry.writer import write_run


logger = logging.getLogger(__name__)

Observer = Callable[[StepRecord, NetworkState], None]


@dataclass
class RunResult:
    records: list[StepRecord]
    summary: RunSummary
    spike_log: list[tuple[int, int, int]] = field(default_factory=list)
    weights: list[np.ndarray] = field(default_factory=list)


def build_plant(cfg: ScenarioConfig) -> LtiPlant:
    if cfg.scenario == "workbench":
        return make_workbench(cfg.x0, cfg.dt)
    return make_cw(CwParams(cfg.orbit.mu_earth, cfg.orbit.R0), cfg.x0[:3], cfg.x0[3:], cfg.dt)


def build_policy(cfg: ScenarioConfig, plant: LtiPlant) -> CloudPolicy:
    K = lqr_gain(plant.A, plant.B, np.array(cfg.Q), np.array(cfg.R))
    obstacles = tuple(
        Obstacle(center0=tuple(o.center0), velocity=tuple(o.velocity), radius=o.radius)
        for o in cfg.obstacles
    )
    repulsion = RepulsionParams(cfg.repulsion.k_rep, cfg.repulsion.d0, cfg.repulsion.u_max)
    return CloudPolicy(K=K, obstacles=obstacles, repulsion=repulsion)


def build_cloud_endpoint(cfg: ScenarioConfig) -> CloudEndpoint:
    plant = build_plant(cfg)
    return CloudEndpoint(build_policy(cfg, plant), plant)


def build_learning_config(cfg: ScenarioConfig) -> LearningConfig:
    section = cfg.learning
    return LearningConfig(
        e_th=np.array(section.e_th),
        warmup_steps=section.warmup_steps,
        check_interval=section.check_interval,
        substeps_per_step=section.substeps_per_step,
        max_spikes_per_substep=section.max_spikes_per_substep,
        command=section.command,
        fit_window=section.fit_window,
    )


def build_edge(cfg: ScenarioConfig, learning: LearningConfig) -> EdgeController:
    net = cfg.network
    params, state = init_network(
        seed=cfg.seed,
        N=net.N,
        K=cfg.control_dim,
        P=net.P,
        decoder_variance=net.decoder_variance,
        lam=net.lam,
        mu=net.mu,
        nu=net.nu,
        k_fb=net.k_fb,
        eta=net.eta,
        max_spikes_per_substep=learning.max_spikes_per_substep,
    )
    return EdgeController(params, state, learning, cfg.dt)


def _nte_or_none(target, actual, start_step: int) -> Optional[float]:
    try:
        return normalized_tracking_error(target, actual, start_step)
    except DegenerateTarget as e:
        logger.warning(f"tracking error undefined: {e}")
        return None


def simulate(cfg: ScenarioConfig, observer: Optional[Observer] = None, transport=None) -> RunResult:
    """Run the closed loop of cloud, link, spiking edge and plant without writing files.

    Each step: evaluate the cloud command at the plant state, contact the
    cloud when the gate asks for it, run the network substeps and actuate
    the plant with the step-mean readout. After warmup an autonomous step
    runs first and the gate judges its readout; in warmup and relearn the
    gate judges the edge's prediction and the step runs under supervision.
    `transport` overrides the link named in the config.
    """
    plant = build_plant(cfg)
    policy = build_policy(cfg, plant)
    learning = build_learning_config(cfg)
    edge = build_edge(cfg, learning)
    gate = SupervisionGate()
    steps, dt = cfg.steps, cfg.dt
    N = edge.params.N

    logger.info(
        f"{cfg.scenario} seed={cfg.seed}: {steps} steps, N={N}, spike budgets "
        f"{N * steps} (one per step) and {N * steps * learning.substeps_per_step} (one per substep)"
    )

    link = nullcontext(transport) if transport is not None else open_link(cfg.link, CloudEndpoint(policy, plant.copy()))
    records: list[StepRecord] = []
    weights: list[np.ndarray] = []
    rates: list[np.ndarray] = []
    actuated: list[np.ndarray] = []
    windows: list[tuple[int, int]] = []
    window_start: Optional[int] = None
    total_spikes = 0

    with link as channel:
        client = LinkClient(channel, cfg.control_dim)

        for step in range(steps):
            t = step * dt
            x = plant.x.copy()
            u_expected = cloud_step(policy, x, t)

            relearning = gate.mode is GateMode.RELEARN and step >= learning.warmup_steps
            if relearning and window_start is None:
                window_start = step
            elif not relearning and window_start is not None:
                windows.append((window_start, step))
                window_start = None

            supervised = gate.needs_supervision(learning, step)
            u_cloud = client.supervise(step, x) if supervised else None

            if step >= learning.warmup_steps and gate.mode is not GateMode.RELEARN:
                # checks compare against what the network produced on its own this step
                spikes, u_hat = edge.run_step(step, x)
                e = u_cloud - u_hat if supervised else None
                decision = gate_step(gate, learning, step, e)
                if decision.learn:
                    edge.fit_command(x, u_cloud)
            else:
                e = u_cloud - edge.predict(x)
                decision = gate_step(gate, learning, step, e)
                if decision.learn:
                    edge.fit_command(x, u_cloud)
                spikes, u_hat = edge.run_step(step, x, u_cloud, decision.learn)

            u_applied = u_cloud if (cfg.cloud_actuates_warmup and step < learning.warmup_steps) else u_hat
            plant.step(u_applied)

            total_spikes += spikes
            record = StepRecord(
                step=step,
                t=t,
                x_plant=x.tolist(),
                u_cloud=None if u_cloud is None else u_cloud.tolist(),
                u_expected=u_expected.tolist(),
                u_hat=u_hat.tolist(),
                u_error=None if e is None else e.tolist(),
                spikes=spikes,
                energy_step=spike_energy(spikes),
                energy_cum=spike_energy(total_spikes),
                mode=gate.mode,
                supervised=supervised,
            )
            records.append(record)
            weights.append(edge.state.Omega_s[0].copy())
            rates.append(edge.state.r.copy())
            actuated.append(np.asarray(u_applied, dtype=np.float64))
            if observer is not None:
                observer(record, edge.state)

        if window_start is not None:
            windows.append((window_start, steps))
        reference = client.reference(steps) if steps else np.zeros((0, cfg.state_dim))
        stats = client.stats

    records = [r.model_copy(update={"x_cloud_ref": ref.tolist()}) for r, ref in zip(records, reference)]

    plant_states = np.array([r.x_plant for r in records]).reshape(steps, cfg.state_dim)
    expected = np.array([r.u_expected for r in records]).reshape(steps, cfg.control_dim)
    readout = np.array([r.u_hat for r in records]).reshape(steps, cfg.control_dim)
    start = learning.warmup_steps

    clearance = None
    if cfg.obstacles:
        clearance = min(
            (obstacle_clearance(x[:3], policy.obstacles, k * dt) for k, x in enumerate(plant_states)),
            default=None,
        )
    _, reference_controls = simulate_reference(policy, build_plant(cfg), steps)
    expected_messages = supervision_count(steps, learning, windows)
    if stats.control_signals != expected_messages:
        logger.error(f"observed {stats.control_signals} control messages, schedule implies {expected_messages}")

    summary = RunSummary(
        scenario=cfg.scenario,
        seed=cfg.seed,
        steps=steps,
        neurons=N,
        substeps_per_step=learning.substeps_per_step,
        state_dim=cfg.state_dim,
        control_dim=cfg.control_dim,
        total_spikes=total_spikes,
        total_energy_pJ=spike_energy(total_spikes),
        spike_fraction=spike_fraction(total_spikes, N, steps, learning.substeps_per_step),
        spike_fraction_per_step=spike_fraction(total_spikes, N, steps),
        nte_states=_nte_or_none(reference, plant_states, start) if steps > start else None,
        nte_control=_nte_or_none(expected, readout, start) if steps > start else None,
        supervision_messages=stats.control_signals,
        expected_supervision_messages=expected_messages,
        state_reports=stats.messages_sent["state"],
        payload_bytes=stats.payload_bytes,
        relearn_windows=windows,
        spiking_cost=spiking_cost(
            expected, readout, np.array(rates).reshape(steps, N), cfg.network.nu, cfg.network.mu, cfg.horizon
        ),
        control_effort_reference=control_effort(reference_controls, dt),
        control_effort_edge=control_effort(actuated, dt),
        min_obstacle_clearance=clearance,
        final_position_norm=float(np.linalg.norm(plant.x[: cfg.state_dim // 2])),
    )
    logger.info(
        f"{cfg.scenario} seed={cfg.seed} done: {total_spikes} spikes, {summary.total_energy_pJ:.1f} pJ, "
        f"{summary.supervision_messages} supervision messages, NTE(control)={summary.nte_control}"
    )
    return RunResult(records=records, summary=summary, spike_log=list(edge.state.spike_log), weights=weights)


def run_scenario(cfg: ScenarioConfig, out_dir=None, observer: Optional[Observer] = None, transport=None) -> RunSummary:
    """simulate() and write run.csv, spikes.csv, weights.csv and summary.json."""
    result = simulate(cfg, observer=observer, transport=transport)
    path = Path(out_dir or cfg.output_dir or OUTPUT_DIR)
    write_run(result.records, result.summary, path, result.spike_log, result.weights)
    return result.summary
