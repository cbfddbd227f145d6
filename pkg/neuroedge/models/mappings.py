import logging

from neuroedge.domain.errors import IoError
from neuroedge.models.telemetry import StepRecord


logger = logging.getLogger(__name__)

VECTOR_COLUMNS = {
    "x_plant": "state",
    "x_cloud_ref": "state",
    "u_cloud": "control",
    "u_expected": "control",
    "u_hat": "control",
    "u_error": "control",
}


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def run_header(state_dim: int, control_dim: int) -> list[str]:
    dims = {"state": state_dim, "control": control_dim}
    header = ["step", "t"]
    for name, kind in VECTOR_COLUMNS.items():
        header += [f"{name}_{i}" for i in range(dims[kind])]
    return header + ["spikes", "energy_step", "energy_cum", "mode", "supervised"]


def record_to_row(record: StepRecord, state_dim: int, control_dim: int) -> list[str]:
    dims = {"state": state_dim, "control": control_dim}
    row = [str(record.step), format_float(record.t)]
    for name, kind in VECTOR_COLUMNS.items():
        values = getattr(record, name)
        row += [""] * dims[kind] if values is None else [format_float(v) for v in values]
    return row + [
        str(record.spikes),
        format_float(record.energy_step),
        format_float(record.energy_cum),
        record.mode.value,
        "true" if record.supervised else "false",
    ]


def row_to_record(header: list[str], row: list[str]) -> StepRecord:
    cells = dict(zip(header, row))
    if len(cells) != len(header) or len(row) != len(header):
        raise IoError(f"row has {len(row)} cells, header has {len(header)}")

    vectors = {}
    for name in VECTOR_COLUMNS:
        columns = [c for c in header if c.startswith(f"{name}_") and c[len(name) + 1:].isdigit()]
        values = [cells[c] for c in columns]
        vectors[name] = None if values and all(v == "" for v in values) else [float(v) for v in values]

    return StepRecord(
        step=int(cells["step"]),
        t=float(cells["t"]),
        spikes=int(cells["spikes"]),
        energy_step=float(cells["energy_step"]),
        energy_cum=float(cells["energy_cum"]),
        mode=cells["mode"],
        supervised=cells["supervised"] == "true",
        **vectors,
    )
