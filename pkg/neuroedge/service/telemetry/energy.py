from neuroedge.domain.errors import InvalidSpikeCount
from neuroedge.service.telemetry.config import ENERGY_PER_SPIKE_PJ


def spike_energy(count: int) -> float:
    """Energy in pJ for `count` spikes; one multiplication so totals match exactly."""
    if count < 0:
        raise InvalidSpikeCount(f"spike count must be >= 0, got {count}")
    return ENERGY_PER_SPIKE_PJ * count


def spike_fraction(total_spikes: int, neurons: int, steps: int, substeps: int = 1) -> float:
    budget = neurons * steps * substeps
    return total_spikes / budget if budget else 0.0
