import csv
import logging
from pathlib import Path

from neuroedge.domain.errors import IoError
from neuroedge.models.mappings import format_float, record_to_row, row_to_record, run_header
from neuroedge.models.telemetry import RunSummary, StepRecord
from neuroedge.service.telemetry.config import RUN_FILE, SPIKES_FILE, SUMMARY_FILE, WEIGHTS_FILE


logger = logging.getLogger(__name__)


def write_run(records, summary: RunSummary, path, spike_log=(), weights=()) -> Path:
    """Write run.csv, spikes.csv, weights.csv and summary.json into directory `path`.

    `weights` holds one row of slow weights per step.
    """
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)

        with open(out / RUN_FILE, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(run_header(summary.state_dim, summary.control_dim))
            for record in records:
                writer.writerow(record_to_row(record, summary.state_dim, summary.control_dim))

        with open(out / SPIKES_FILE, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["step", "substep", "neuron"])
            writer.writerows(spike_log)

        write_weights(weights, out / WEIGHTS_FILE)
        (out / SUMMARY_FILE).write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write run files to {out}: {e}") from e

    logger.info(f"run written to {out}")
    return out


def write_weights(weights, path) -> None:
    rows = [list(row) for row in weights]
    width = len(rows[0]) if rows else 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["step"] + [f"w_{i}" for i in range(width)])
        for step, row in enumerate(rows):
            writer.writerow([step] + [format_float(v) for v in row])


def read_run(path) -> list[StepRecord]:
    """Read run.csv back; `path` is the run directory or the file itself."""
    file = Path(path)
    if file.is_dir():
        file = file / RUN_FILE
    try:
        with open(file, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader)
            return [row_to_record(header, row) for row in reader]
    except (OSError, StopIteration) as e:
        raise IoError(f"cannot read {file}: {e}") from e


def read_summary(path) -> RunSummary:
    file = Path(path)
    if file.is_dir():
        file = file / SUMMARY_FILE
    try:
        return RunSummary.model_validate_json(file.read_text(encoding="utf-8"))
    except OSError as e:
        raise IoError(f"cannot read {file}: {e}") from e
