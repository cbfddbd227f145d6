import numpy as np

from neuroedge.domain.errors import DegenerateTarget, DimensionMismatch


def normalized_tracking_error(target, actual, start_step: int = 0) -> float:
    """Sum of ||target - actual|| over the sum of ||target||, from `start_step` on."""
    target = np.atleast_2d(np.asarray(target, dtype=np.float64).T).T
    actual = np.atleast_2d(np.asarray(actual, dtype=np.float64).T).T
    if target.shape != actual.shape:
        raise DimensionMismatch(f"target {target.shape} and actual {actual.shape} differ")
    if not 0 <= start_step < target.shape[0]:
        raise DegenerateTarget(f"start_step {start_step} leaves no samples out of {target.shape[0]}")

    target, actual = target[start_step:], actual[start_step:]
    denominator = float(np.sum(np.linalg.norm(target, axis=1)))
    if denominator == 0.0:
        raise DegenerateTarget("target signal is identically zero")
    return float(np.sum(np.linalg.norm(target - actual, axis=1))) / denominator


def spiking_cost(x, x_hat, r, nu: float, mu: float, horizon: float) -> float:
    """Time average of ||x - x_hat||^2 + nu ||r||_1 + mu ||r||_2^2 over the horizon."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] == 0:
        return 0.0
    x = x.reshape(x.shape[0], -1)
    x_hat = np.asarray(x_hat, dtype=np.float64).reshape(x.shape)
    r = np.asarray(r, dtype=np.float64).reshape(x.shape[0], -1)

    dt = horizon / x.shape[0]
    per_sample = (
        np.sum((x - x_hat) ** 2, axis=1)
        + nu * np.sum(np.abs(r), axis=1)
        + mu * np.sum(r * r, axis=1)
    )
    return float(np.sum(dt * per_sample) / horizon)
