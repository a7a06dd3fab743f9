import csv
import json
import os
from logging import getLogger

from ..core import file_manager
from . import EvalReport

logger = getLogger(__name__)

METRICS_JSON = "metrics.json"
METRICS_CSV = "metrics.csv"
CSV_FIELDS = ("task", "rmse_t", "rmse_r_deg", "chamfer", "n")


def _row(task, m):
    return [task, repr(m.rmse_t), repr(m.rmse_r_deg), repr(m.chamfer), str(m.n)]


def report(ev: EvalReport, out_dir, history=None):
    """Write metrics.json, metrics.csv and optionally the loss history.

    Returns the written paths.
    """
    file_manager.ensure_dir(out_dir)
    json_path = os.path.join(out_dir, METRICS_JSON)
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump(ev.to_dict(), f, indent=4)
        f.write("\n")
    csv_path = os.path.join(out_dir, METRICS_CSV)
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for task, m in ev.tasks.items():
            writer.writerow(_row(task, m))
        writer.writerow(_row("ALL", ev.overall))
    paths = [json_path, csv_path]
    if history is not None:
        paths.append(write_history(file_manager.history_path(out_dir), history))
    logger.info(f"Wrote {', '.join(paths)}")
    return paths


def write_history(path, history):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("epoch", "loss"))
        for epoch, value in enumerate(history):
            writer.writerow((epoch, repr(float(value))))
    return path


def read_metrics_csv(path):
    """{task: {field: value}} from a metrics.csv."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    return {
        row["task"]: {
            "rmse_t": float(row["rmse_t"]),
            "rmse_r_deg": float(row["rmse_r_deg"]),
            "chamfer": float(row["chamfer"]),
            "n": int(row["n"]),
        }
        for row in rows
    }
