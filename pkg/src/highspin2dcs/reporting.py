"""Run configuration, artifact emission and scaling fits.

Artifacts carry the SHA-256 of the canonical JSON form of the configuration
that produced them, so downstream analysis can refuse mixed inputs.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .avqds import EvolutionConfig, Integrator
from .encoding import Encoding, as_spin
from .model import DriveProtocol, ModelSpec, PulseSpec
from .spectroscopy import WindowSpec, tau_grid

__all__ = [
    "ConfigError",
    "HashMismatchError",
    "RunConfig",
    "CONFIG_SCHEMA",
    "config_hash",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "to_jsonable",
    "ScalingTable",
    "PowerLawFit",
    "powerlaw_fit",
]


class ConfigError(ValueError):
    pass


class HashMismatchError(ValueError):
    pass


_NUM = {"type": "number"}
_WINDOW = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_PULSE = {
    "type": "object",
    "additionalProperties": False,
    "properties": {"B0": _NUM, "omega0": _NUM, "t0": _NUM, "duration": {"type": "number", "exclusiveMinimum": 0}, "delay": _NUM},
    "required": ["B0"],
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_sites": {"type": "integer", "minimum": 1},
                "s": {"type": ["number", "string"]},
                "J": _NUM,
                "D": _NUM,
                "K_a": _NUM,
                "K_c": _NUM,
                "encoding": {"enum": ["gray", "std"]},
            },
        },
        "drive": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pulses": {"type": "array", "items": _PULSE},
                "tau": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"start": _NUM, "stop": _NUM, "step": {"type": "number", "exclusiveMinimum": 0}},
                },
            },
        },
        "engine": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "name": {"enum": ["avqds", "ed", "trotter", "meanfield"]},
                "ground": {"enum": ["adapt-vqe", "avqite", "ed"]},
                "ground_pool": {"enum": ["all12", "yzchain", "hamiltonian"]},
                "evolution": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "l2_cut": _NUM,
                        "dtheta_max": _NUM,
                        "tikhonov": _NUM,
                        "integrator": {"enum": ["rk4", "euler"]},
                        "pool": {"enum": ["all12", "yzchain", "hamiltonian"]},
                        "dt_min": _NUM,
                        "dt_max": _NUM,
                        "stall_rtol": _NUM,
                        "max_adapt": {"type": "integer", "minimum": 1},
                        "wall_limit": _NUM,
                    },
                },
                "trotter_dt": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "spectroscopy": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_final": {"type": "number", "exclusiveMinimum": 0},
                "dt_out": {"type": "number", "exclusiveMinimum": 0},
                "window": _WINDOW,
                "t_window": _WINDOW,
                "tau_window": _WINDOW,
                "padding": {"type": "integer", "minimum": 1},
                "slice_tau": _NUM,
                "eta": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
    },
}

_DEFAULTS = {
    "model": {"n_sites": 2, "s": 1, "J": 1.0, "D": 0.2, "K_a": 0.0, "K_c": 0.0, "encoding": "gray"},
    "drive": {"pulses": [{"B0": 0.5}], "tau": {"start": 3.5, "stop": 20.0, "step": 0.1}},
    "engine": {"name": "ed", "ground": "adapt-vqe", "evolution": {}, "trotter_dt": 0.005},
    "spectroscopy": {
        "t_final": 50.0,
        "dt_out": 0.01,
        "window": [0.0, 50.0],
        "t_window": [29.0, 49.0],
        "tau_window": [4.0, 19.5],
        "padding": 8,
        "eta": 0.02,
    },
    "output": {"dir": "out"},
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(data: dict) -> str:
    return hashlib.sha256(_canonical(data).encode()).hexdigest()


@dataclass
class RunConfig:
    """Validated configuration with defaults filled in."""

    data: dict = field(default_factory=lambda: copy.deepcopy(_DEFAULTS))

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        try:
            jsonschema.validate(raw, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"{where}: {exc.message}") from None
        data = _merge(_DEFAULTS, raw)
        s = data["model"]["s"]
        try:
            data["model"]["s"] = str(as_spin(Fraction(s) if isinstance(s, str) else s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"model/s: {exc}") from None
        return cls(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def with_overrides(self, **blocks) -> "RunConfig":
        return RunConfig.from_dict(_merge(self.data, blocks))

    @property
    def hash(self) -> str:
        return config_hash(self.data)

    def echo(self) -> dict:
        return {"config": self.data, "config_hash": self.hash}

    # typed views

    @property
    def model(self) -> ModelSpec:
        m = self.data["model"]
        return ModelSpec(
            n_sites=m["n_sites"],
            s=as_spin(Fraction(m["s"])),
            J=m["J"],
            D=m["D"],
            K_a=m["K_a"],
            K_c=m["K_c"],
            encoding=Encoding.parse(m["encoding"]),
        )

    @property
    def pulses(self) -> list[tuple[PulseSpec, float]]:
        out = []
        for p in self.data["drive"]["pulses"]:
            kw = {k: p[k] for k in ("B0", "omega0", "t0", "duration") if k in p}
            out.append((PulseSpec(**kw), float(p.get("delay", 0.0))))
        return out

    @property
    def protocol(self) -> DriveProtocol:
        return DriveProtocol(tuple(self.pulses))

    @property
    def taus(self) -> np.ndarray:
        t = self.data["drive"]["tau"]
        return tau_grid(t["start"], t["stop"], t["step"])

    @property
    def engine(self) -> str:
        return self.data["engine"]["name"]

    @property
    def evolution(self) -> EvolutionConfig:
        kw = dict(self.data["engine"]["evolution"])
        if "integrator" in kw:
            kw["integrator"] = Integrator(kw["integrator"])
        return EvolutionConfig(**kw)

    def window(self, key: str = "window") -> WindowSpec:
        return WindowSpec(*self.data["spectroscopy"][key])

    @property
    def spectroscopy(self) -> dict:
        return self.data["spectroscopy"]

    @property
    def out_dir(self) -> Path:
        return Path(self.data["output"]["dir"])


# --- artifacts ---------------------------------------------------------------------------


def _meta_lines(meta: dict) -> list[str]:
    return [f"# {k}: {_canonical(v)}" for k, v in sorted(meta.items())]


def write_csv(path, columns: dict, meta: dict | None = None, config_hash: str | None = None) -> Path:
    """Header row after ``#`` metadata lines; complex columns split into ``name_re``/``name_im``."""
    meta = dict(meta or {})
    if config_hash is not None:
        meta["config_hash"] = config_hash
    names, cols = [], []
    length = None
    for name, values in columns.items():
        arr = np.asarray(values)
        if arr.ndim != 1:
            raise ValueError(f"column {name!r} is not one-dimensional")
        if length is None:
            length = arr.size
        elif arr.size != length:
            raise ValueError("columns differ in length")
        if np.iscomplexobj(arr):
            names += [f"{name}_re", f"{name}_im"]
            cols += [arr.real, arr.imag]
        else:
            names.append(name)
            cols.append(arr)
    buf = io.StringIO()
    for line in _meta_lines(meta):
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*cols):
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


def read_csv(path, expected_hash: str | None = None) -> tuple[dict, dict]:
    """Inverse of :func:`write_csv`; ``_re``/``_im`` pairs are rejoined as complex."""
    meta, body = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value)
        else:
            body.append(line)
    if expected_hash is not None and meta.get("config_hash") != expected_hash:
        raise HashMismatchError(f"{path}: config hash {meta.get('config_hash')!r} != {expected_hash!r}")
    rows = list(csv.reader(body))
    header, data = rows[0], rows[1:]
    raw = {h: np.array([float(r[i]) for r in data]) for i, h in enumerate(header)}
    cols = {}
    for h in header:
        if h.endswith("_re") and h[:-3] + "_im" in raw:
            cols[h[:-3]] = raw[h] + 1j * raw[h[:-3] + "_im"]
        elif h.endswith("_im") and h[:-3] + "_re" in raw:
            continue
        else:
            cols[h] = raw[h]
    return meta, cols


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def write_json(path, payload: dict, config_hash: str | None = None) -> Path:
    body = to_jsonable(dict(payload))
    if config_hash is not None:
        body["config_hash"] = config_hash
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")
    return path


def read_json(path, expected_hash: str | None = None) -> dict:
    body = json.loads(Path(path).read_text())
    if expected_hash is not None and body.get("config_hash") != expected_hash:
        raise HashMismatchError(f"{path}: config hash {body.get('config_hash')!r} != {expected_hash!r}")
    return body


# --- scaling -----------------------------------------------------------------------------


@dataclass
class ScalingTable:
    """Rows of ``(x, y, label)``: system size against a CNOT count."""

    rows: list = field(default_factory=list)

    def add(self, x: int, y: float, label: str = "") -> None:
        if int(x) != x or x <= 0:
            raise ValueError("x must be a positive integer")
        if not y > 0:
            raise ValueError("y must be positive")
        self.rows.append((int(x), float(y), label))

    @property
    def x(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows], dtype=float)


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    beta: float
    residual: float
    r_squared: float

    def __call__(self, x):
        return self.alpha * np.asarray(x, dtype=float) ** self.beta


def powerlaw_fit(table: ScalingTable) -> PowerLawFit:
    """Least squares of ``log y = log alpha + beta log x``.

    ``residual`` is the root-mean-square log-space misfit.
    """
    x, y = table.x, table.y
    if x.size < 3:
        raise ValueError("power-law fit needs at least three rows")
    if np.unique(x).size != x.size:
        raise ValueError("x values must be distinct")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive values")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([np.ones_like(lx), lx])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(math.exp(coef[0])), float(coef[1]), math.sqrt(ss_res / x.size), r2)
