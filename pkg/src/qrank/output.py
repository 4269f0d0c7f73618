"""File writers for CLI results.

Every file starts with the effective run configuration (``#`` comment lines
for CSV, a ``config`` member for JSON). Floats in CSV are written with 17
significant digits; JSON uses Python's round-trip float repr. Both are exact,
so reruns with the same config compare byte-for-byte.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classical import ranking


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if not math.isfinite(x) else x
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def write_csv(path: Path, command: str, config: dict, columns: Sequence[str], rows: Iterable) -> Path:
    lines = [f"# qrank {command}"]
    lines += [f"# {k} = {v}" for k, v in sorted(config.items())]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path: Path, command: str, config: dict, payload: dict) -> Path:
    doc = {"command": command, "config": config, **payload}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path


def write_ranks(out_dir: Path, command: str, config: dict, p, fmt_name: str) -> Path:
    rows = ranking(p)
    if fmt_name == "json":
        ranks = [{"node": n, "score": s, "rank": r} for n, s, r in rows]
        return write_json(Path(out_dir) / "rank.json", command, config, {"ranks": ranks})
    return write_csv(Path(out_dir) / "rank.csv", command, config, ("node", "score", "rank"), rows)


def read_ranks(path: Path) -> np.ndarray:
    """Scores indexed by node id, from a rank.csv or rank.json file."""
    path = Path(path)
    if path.suffix == ".json":
        rows = [(d["node"], d["score"]) for d in json.loads(path.read_text())["ranks"]]
    else:
        rows = []
        for line in path.read_text().splitlines():
            if line.startswith("#") or line.startswith("node"):
                continue
            node, score, _ = line.split(",")
            rows.append((int(node), float(score)))
    p = np.zeros(len(rows))
    for node, score in rows:
        p[node] = score
    return p


def snapshot_rows(snapshots, threshold: float = 1e-14):
    for t, rho in snapshots:
        ii, jj = np.nonzero(np.abs(rho) > threshold)
        for i, j in zip(ii.tolist(), jj.tolist()):
            z = rho[i, j]
            yield (float(t), i, j, float(z.real), float(z.imag))


def write_snapshots(out_dir: Path, command: str, config: dict, snapshots, fmt_name: str) -> Path:
    if fmt_name == "json":
        payload = {
            "snapshots": [
                {"t": t, "re": np.real(rho), "im": np.imag(rho)} for t, rho in snapshots
            ]
        }
        return write_json(Path(out_dir) / "snapshots.json", command, config, payload)
    return write_csv(
        Path(out_dir) / "snapshots.csv", command, config,
        ("t", "i", "j", "re", "im"), snapshot_rows(snapshots),
    )
