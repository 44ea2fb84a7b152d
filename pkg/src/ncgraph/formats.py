"""CSV/JSON readers and writers for snapshots, limit tables and reports.

Every CSV starts with one ``#`` metadata line (a JSON object) followed by a
header row.  Floats are written with ``repr``, the shortest decimal that
round-trips to the same double.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from . import __version__
from .simulator import Snapshot


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    return repr(float(x)) if isinstance(x, float) else str(x)


def parse_float(s: str):
    return None if s == "NA" else float(s)


def metadata(**fields) -> dict:
    return {"package": "ncgraph", "version": __version__, **fields}


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path, meta: dict, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_csv(path) -> tuple:
    """Return ``(meta, header, rows)`` with rows as lists of strings."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing metadata line")
        meta = json.loads(first[1:])
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return meta, header, rows


def write_snapshot(path, snap: Snapshot, meta: dict) -> None:
    meta = {**meta, "n": snap.n, "V_n": snap.V_n}
    rows = sorted((d, w, c) for (d, w), c in snap.xdw.items())
    write_csv(path, meta, ["d", "w", "count"], rows)


def read_snapshot(path) -> tuple:
    meta, header, rows = read_csv(path)
    if header != ["d", "w", "count"]:
        raise ValueError(f"{path}: unexpected header {header}")
    xdw = {(int(d), int(w)): int(c) for d, w, c in rows}
    xw, ud = {}, {}
    for (d, w), c in xdw.items():
        xw[w] = xw.get(w, 0) + c
        ud[d] = ud.get(d, 0) + c
    return meta, Snapshot(meta["n"], sum(xdw.values()), xdw, xw, ud)
