"""CSV serialization of simulation records.

Floats are written with 17 significant digits so a round trip through the
file reproduces every value exactly. The last line is a comment naming the
random generator and the package version.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile

from . import __version__
from .rng import GENERATOR
from .simulation import MseRecord

__all__ = ["CSV_HEADER", "format_records", "write_csv", "read_csv", "trailer"]

CSV_HEADER = ("estimator", "n", "alpha", "target", "mse", "mc_se", "reps", "seed", "grid", "failures")


def _f(v: float) -> str:
    return format(v, ".17g")


def trailer() -> str:
    return f"# generator={GENERATOR} topp_leone={__version__}"


def format_records(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.estimator, r.n, _f(r.alpha), r.target, _f(r.mse), _f(r.mc_se),
                    r.reps, r.seed, r.grid, r.failures])
    buf.write(trailer() + "\n")
    return buf.getvalue()


def write_csv(records, path) -> None:
    """Write atomically: a temp file in the target directory, then rename."""
    text = format_records(records)
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=os.path.dirname(target))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = csv.DictReader(lines)
    if tuple(rows.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected header {rows.fieldnames!r}")
    return [
        MseRecord(
            estimator=row["estimator"],
            n=int(row["n"]),
            alpha=float(row["alpha"]),
            target=row["target"],
            mse=float(row["mse"]),
            mc_se=float(row["mc_se"]),
            reps=int(row["reps"]),
            seed=int(row["seed"]),
            grid=row["grid"],
            failures=int(row["failures"]),
        )
        for row in rows
    ]
