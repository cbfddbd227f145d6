from neuroedge.service.edge.gate import LearningConfig


def supervision_count(total_steps: int, cfg: LearningConfig, relearn_windows=()) -> int:
    """ControlSignals the gate schedule implies for a run.

    `relearn_windows` are half-open (start, end) step ranges during which the
    gate was in relearn mode when supervision was requested; check steps that
    fall inside a window are only counted once.
    """
    windows = [(max(start, cfg.warmup_steps), min(end, total_steps)) for start, end in relearn_windows]
    windows = [(start, end) for start, end in windows if start < end]

    def in_window(step: int) -> bool:
        return any(start <= step < end for start, end in windows)

    warmup = min(total_steps, cfg.warmup_steps)
    checks = sum(
        1
        for step in range(cfg.warmup_steps, total_steps)
        if step % cfg.check_interval == 0 and not in_window(step)
    )
    return warmup + checks + sum(end - start for start, end in windows)
