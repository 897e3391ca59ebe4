"""On-disk formats.

* matrices: headerless CSV, one row per line, ragged rows rejected
* systems: JSON object with ``"A"``, ``"B"`` and optional ``"C"``
* experiment sets: a directory with ``U.csv``, ``X.csv``, optional
  ``Y.csv`` and ``meta.json``
"""

import csv
import json
from pathlib import Path

import numpy as np

from . import matops
from .datagen import ExperimentSet
from .errors import InvalidInputError
from .sysmodel import LtiSystem


def read_matrix_csv(path):
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise InvalidInputError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise InvalidInputError(f"{path}: no data")
    width = len(rows[0])
    for i, r in enumerate(rows, start=1):
        if len(r) != width:
            raise InvalidInputError(f"{path}: row {i} has {len(r)} entries, expected {width}")
    return matops.as_matrix(rows, str(path))


def write_matrix_csv(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in M:
            writer.writerow([repr(float(x)) for x in row])


def write_vector_csv(path, v):
    write_matrix_csv(path, np.asarray(v, dtype=float).reshape(-1, 1))


def read_vector_csv(path):
    return read_matrix_csv(path).reshape(-1)


def system_to_dict(sys):
    d = {"A": sys.A.tolist(), "B": sys.B.tolist()}
    if sys.C is not None:
        d["C"] = sys.C.tolist()
    return d


def system_from_dict(d):
    missing = {"A", "B"} - set(d)
    if missing:
        raise InvalidInputError(f"system file lacks keys {sorted(missing)}")
    return LtiSystem(np.array(d["A"], dtype=float), np.array(d["B"], dtype=float),
                     None if d.get("C") is None else np.array(d["C"], dtype=float))


def load_system(path):
    with open(path) as fh:
        return system_from_dict(json.load(fh))


def save_system(sys, path):
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys), fh, indent=2)
        fh.write("\n")


def save_experiment(data, directory, extra_meta=None):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(out / "U.csv", data.U)
    write_matrix_csv(out / "X.csv", data.X)
    if data.Y is not None:
        write_matrix_csv(out / "Y.csv", data.Y)
    meta = {
        "T": data.T,
        "N": data.N,
        "n": data.n,
        "m": data.m,
        "x0": data.x0.tolist(),
        "x0_known_zero": data.x0_known_zero,
        "seed": data.seed,
        "noise": data.noise,
    }
    if extra_meta:
        meta.update(extra_meta)
    with open(out / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_experiment(directory):
    src = Path(directory)
    for name in ("U.csv", "X.csv", "meta.json"):
        if not (src / name).is_file():
            raise InvalidInputError(f"{src} is missing {name}")
    with open(src / "meta.json") as fh:
        meta = json.load(fh)
    U = read_matrix_csv(src / "U.csv")
    X = read_matrix_csv(src / "X.csv")
    Y = read_matrix_csv(src / "Y.csv") if (src / "Y.csv").is_file() else None
    x0 = np.asarray(meta.get("x0", np.zeros(X.shape[0])), dtype=float)
    return ExperimentSet(
        T=int(meta["T"]), U=U, X=X, Y=Y, x0=x0,
        x0_known_zero=bool(meta.get("x0_known_zero", np.all(x0 == 0))),
        seed=meta.get("seed"), noise=meta.get("noise", {"kind": "none"}),
    )
