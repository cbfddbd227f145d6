import csv
import json
import logging
import math
from pathlib import Path

import numpy as np
from scipy.stats import spearmanr

from neuroedge.domain.errors import IoError
from neuroedge.models.mappings import format_float
from neuroedge.models.scenario import SweepSpec
from neuroedge.service.runner.orchestrator import simulate


logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "N",
    "seed",
    "nte_control",
    "nte_states",
    "total_spikes",
    "total_energy_pJ",
    "supervision_messages",
]


def sweep_rows(spec: SweepSpec) -> list[dict]:
    rows = []
    for n in spec.N_values:
        for seed in spec.seeds:
            network = spec.base.network.model_copy(update={"N": n})
            cfg = spec.base.model_copy(update={"seed": seed, "network": network})
            summary = simulate(cfg).summary
            rows.append({
                "N": n,
                "seed": seed,
                "nte_control": summary.nte_control,
                "nte_states": summary.nte_states,
                "total_spikes": summary.total_spikes,
                "total_energy_pJ": summary.total_energy_pJ,
                "supervision_messages": summary.supervision_messages,
            })
            logger.info(f"sweep N={n} seed={seed}: NTE(control)={summary.nte_control}")
    return rows


def _median(values) -> float | None:
    present = [v for v in values if v is not None]
    return float(np.median(present)) if present else None


def summarize_sweep(rows: list[dict]) -> dict:
    """Per-N medians, NTE reduction from the smallest to the largest N, and energy-vs-N rank correlation."""
    per_n = {}
    for n in sorted({row["N"] for row in rows}):
        group = [row for row in rows if row["N"] == n]
        per_n[n] = {
            "nte_control": _median(row["nte_control"] for row in group),
            "nte_states": _median(row["nte_states"] for row in group),
            "total_energy_pJ": _median(row["total_energy_pJ"] for row in group),
        }

    reduction = None
    if len(per_n) > 1:
        first, last = per_n[min(per_n)]["nte_control"], per_n[max(per_n)]["nte_control"]
        if first and last is not None:
            reduction = 1.0 - last / first

    rho = None
    if len(per_n) > 1:
        statistic = spearmanr([row["N"] for row in rows], [row["total_energy_pJ"] for row in rows]).statistic
        rho = None if math.isnan(statistic) else float(statistic)

    return {
        "per_n": {str(n): medians for n, medians in per_n.items()},
        "nte_control_reduction": reduction,
        "energy_spearman_rho": rho,
    }


def run_sweep(spec: SweepSpec, out_dir) -> Path:
    """Run every (N, seed) pair and write sweep.csv plus sweep_summary.json; returns the CSV path."""
    rows = sweep_rows(spec)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SWEEP_COLUMNS)
            for row in rows:
                writer.writerow([
                    "" if row[c] is None else (format_float(row[c]) if isinstance(row[c], float) else row[c])
                    for c in SWEEP_COLUMNS
                ])
        (out / "sweep_summary.json").write_text(json.dumps(summarize_sweep(rows), indent=2), encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write sweep files to {out}: {e}") from e

    logger.info(f"sweep of {len(rows)} runs written to {out}")
    return out / "sweep.csv"
