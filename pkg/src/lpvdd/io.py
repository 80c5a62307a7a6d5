"""CSV/JSON file formats.

Floats are written with ``repr``, the shortest decimal string that reloads
to the same double, so a write/read cycle is bit-faithful.
"""
import csv
import json
from pathlib import Path

import numpy as np

from .ddrep import DataDictionary
from .models import Complexity, LpvIoModel


def fmt(x):
    return repr(float(x))


def write_table(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([v if isinstance(v, (str, int, np.integer)) else fmt(v) for v in row])
    return path


def read_table(path):
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        rows = [[float(v) for v in r] for r in rd if r]
    return header, np.asarray(rows, dtype=float).reshape(len(rows), len(header))


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def trajectory_table(k0, **blocks):
    """Header and rows for a ``k,<name>1..`` table from named 2-D blocks."""
    header = ["k"]
    cols = []
    for name, block in blocks.items():
        block = np.asarray(block, dtype=float)
        block = block.reshape(block.shape[0], -1)
        header += [f"{name}{i + 1}" for i in range(block.shape[1])]
        cols.append(block)
    data = np.hstack(cols) if cols else np.zeros((0, 0))
    rows = [[k0 + i] + list(r) for i, r in enumerate(data)]
    return header, rows


# --- dictionaries ----------------------------------------------------------

def sidecar_path(csv_path):
    return Path(csv_path).with_suffix(".json")


def complexity_from(obj):
    if obj is None:
        return None
    return Complexity(int(obj["m"]), int(obj["lag"]), int(obj["order"]))


def write_dictionary(data, path):
    """Write ``path`` (CSV) and its ``.json`` sidecar; returns both paths."""
    header, rows = trajectory_table(data.w.start_index, u=data.w.u, y=data.w.y,
                                    p=data.p.samples)
    csv_path = write_table(path, header, rows)
    meta = {"n_u": data.n_u, "n_y": data.n_y, "n_p": data.n_p, "seed": data.seed,
            "complexity": data.complexity.as_dict() if data.complexity else None,
            "provenance": data.provenance}
    return csv_path, write_json(sidecar_path(path), meta)


def _split_columns(header):
    idx = {c: [i for i, h in enumerate(header) if h.startswith(c) and h[1:].isdigit()]
           for c in "uyp"}
    if header[0] != "k" or not idx["p"] or not (idx["u"] or idx["y"]):
        raise ValueError(f"unrecognized dictionary header {header}")
    return idx


def read_dictionary(path):
    header, table = read_table(path)
    idx = _split_columns(header)
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = read_json(side)
    return DataDictionary.from_arrays(table[:, idx["u"]], table[:, idx["y"]], table[:, idx["p"]],
                                      provenance=meta.get("provenance", str(path)),
                                      seed=meta.get("seed"),
                                      complexity=complexity_from(meta.get("complexity")))


# --- models ----------------------------------------------------------------

def model_to_json(model):
    return {"n_u": model.n_u, "n_y": model.n_y, "n_p": model.n_p,
            "a": model.a.tolist(), "b": model.b.tolist(),
            "complexity": model.complexity.as_dict()}


def model_from_json(obj):
    n_u, n_y, n_p = int(obj["n_u"]), int(obj["n_y"]), int(obj["n_p"])
    a = np.asarray(obj["a"], dtype=float).reshape(-1, n_p + 1, n_y, n_y)
    b = np.asarray(obj["b"], dtype=float).reshape(-1, n_p + 1, n_y, n_u)
    return LpvIoModel(a, b, complexity_from(obj.get("complexity")))


def write_model(model, path):
    return write_json(path, model_to_json(model))


def read_model(path):
    return model_from_json(read_json(path))


# --- problems ----------------------------------------------------------------

def resolve(base, ref):
    """Resolve a file reference relative to the JSON file that mentions it."""
    ref = Path(ref)
    return ref if ref.is_absolute() else Path(base).parent / ref


def _arr(obj, width):
    a = np.asarray(obj if obj is not None else [], dtype=float)
    return a.reshape(-1, width)


def read_sim_problem(path):
    """``{dictionary, w_ini, p_ini, u_r, p_r}`` with w_ini rows ``[u.., y..]``."""
    from .simulate import SimProblem
    from .signals import Trajectory

    obj = read_json(path)
    data = read_dictionary(resolve(path, obj["dictionary"]))
    w_ini = Trajectory(_arr(obj.get("w_ini"), data.n_w), data.n_u, data.n_y)
    return SimProblem(data, w_ini, _arr(obj.get("p_ini"), data.n_p),
                      _arr(obj["u_r"], data.n_u), _arr(obj["p_r"], data.n_p))


def read_control_problem(path):
    """``{dictionary, w_ini, p_ini, T_r, Q, R, tol, max_iter, psi}``."""
    from .control import ControlProblem
    from .signals import Trajectory

    obj = read_json(path)
    data = read_dictionary(resolve(path, obj["dictionary"]))
    w_ini = Trajectory(_arr(obj.get("w_ini"), data.n_w), data.n_u, data.n_y)
    kw = {k: obj[k] for k in ("tol", "max_iter") if k in obj}
    p_r_init = obj.get("p_r_init")
    return ControlProblem(data, w_ini, _arr(obj.get("p_ini"), data.n_p), int(obj["T_r"]),
                          obj.get("psi", "nl_example"), obj.get("Q", "identity"),
                          obj.get("R", "identity"),
                          None if p_r_init is None else _arr(p_r_init, data.n_p), **kw)
