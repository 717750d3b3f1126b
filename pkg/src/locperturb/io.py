"""Distribution file format: CSV of masses plus a JSON metadata sidecar.

CSV: header ``offset,probability``, offsets ascending, probabilities in
scientific notation with 17 significant digits (floats round-trip
exactly, so write -> read -> write is byte-identical).

Sidecar: ``{kind, rho, alpha, delta, target, p, tail_mass, lo, hi}``.
The sidecar does not carry the privacy radius, so loaded distributions
report epsilon per one-step radius (r = 1).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .distributions import DiscretePmf
from .errors import ParameterError
from .params import GridSpec, PrivacyParams


def format_probability(x: float) -> str:
    """17-significant-digit scientific notation."""
    return f"{x:.16e}"


def sidecar_path(csv_path: str | Path) -> Path:
    path = Path(csv_path)
    return path.with_suffix(".meta.json") if path.suffix == ".csv" else Path(str(path) + ".meta.json")


def write_distribution(pmf: DiscretePmf, csv_path: str | Path) -> tuple[Path, Path]:
    """Write the stored support and metadata; returns (csv, sidecar) paths."""
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["offset", "probability"])
        for offset, prob in zip(pmf.offsets, pmf.probs):
            writer.writerow([int(offset), format_probability(prob)])

    meta = {
        "kind": pmf.kind,
        "rho": pmf.params.rho,
        "alpha": pmf.params.alpha,
        "delta": pmf.grid.delta,
        "target": pmf.target,
        "p": pmf.p,
        "tail_mass": pmf.grid.tail_mass,
        "lo": pmf.lo,
        "hi": pmf.hi,
    }
    meta_path = sidecar_path(csv_path)
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return csv_path, meta_path


def read_distribution(csv_path: str | Path) -> DiscretePmf:
    """Rebuild a pmf from a distribution CSV and its metadata sidecar."""
    csv_path = Path(csv_path)
    meta_path = sidecar_path(csv_path)
    if not meta_path.exists():
        raise ParameterError(f"metadata sidecar {meta_path} not found")
    with open(meta_path) as fh:
        meta = json.load(fh)

    offsets, probs = [], []
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["offset", "probability"]:
            raise ParameterError(f"unexpected distribution header {header!r} in {csv_path}")
        for row in reader:
            offsets.append(int(row[0]))
            probs.append(float(row[1]))
    if not offsets:
        raise ParameterError(f"empty distribution file {csv_path}")
    if offsets != list(range(offsets[0], offsets[0] + len(offsets))):
        raise ParameterError(f"offsets in {csv_path} are not contiguous ascending")
    if offsets[0] != meta["lo"] or offsets[-1] != meta["hi"]:
        raise ParameterError(f"offsets in {csv_path} disagree with sidecar lo/hi")

    params = PrivacyParams(rho=meta["rho"], alpha=meta["alpha"])
    grid = GridSpec(delta=meta["delta"], tail_mass=meta["tail_mass"])
    probs_arr = np.array(probs, dtype=float)
    return DiscretePmf(
        kind=meta["kind"],
        params=params,
        grid=grid,
        target=meta["target"],
        lo=offsets[0],
        hi=offsets[-1],
        probs=probs_arr,
        p=meta["p"],
        stored_mass=float(probs_arr.sum()),
    )


def write_json_report(payload: dict, path: str | Path) -> Path:
    """Write a report with deterministic key order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2))
        fh.write("\n")
    return path


def write_samples_csv(offsets, path: str | Path) -> Path:
    """One sampled offset per row under an ``offset`` header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["offset"])
        for x in offsets:
            writer.writerow([int(x)])
    return path
