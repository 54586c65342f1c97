"""Initial data, sampled solution fields, and their CSV/JSON serialisation.

Pointwise evaluation f(x, d) takes coordinates in d = 1 and radii |x| in d >= 2."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

from fractel.errors import DimensionError, DomainError

__all__ = [
    "Delta",
    "Gaussian",
    "Indicator",
    "Tabulated",
    "InitialCondition",
    "initial_condition_from_dict",
    "SolutionField",
    "ROUTES",
    "write_field_csv",
    "read_field_csv",
    "write_json",
]

ROUTES = (
    "analytic",
    "laplace-check",
    "monte-carlo",
    "epd-bessel",
    "epd-ek",
    "epd-beta",
    "epd-series",
)


def _ball_transform(R, r, d):
    """Fourier transform of the indicator of the ball of radius R in R^d."""
    r = np.asarray(r, dtype=float)
    vol = math.pi ** (d / 2) * R**d / math.gamma(d / 2 + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (2 * math.pi * R / r) ** (d / 2) * sp.jv(d / 2, R * r)
    return np.where(r > 0, val, vol)


@dataclass(frozen=True)
class Delta:
    kind = "delta"

    def is_radial(self, d):
        return True

    def shift(self, d):
        return 0.0

    def fourier(self, r, d):
        return np.ones_like(np.asarray(r, dtype=float))

    def __call__(self, x, d=1):
        raise DomainError("delta initial data has no pointwise values")

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Gaussian:
    """Normalised Gaussian density (2 pi w^2)^(-d/2) exp(-|x - c|^2 / 2 w^2)."""

    center: float = 0.0
    width: float = 1.0

    kind = "gaussian"

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("gaussian width must be > 0")

    def is_radial(self, d):
        return d == 1 or self.center == 0.0

    def shift(self, d):
        return self.center

    def fourier(self, r, d):
        """Transform of the centred profile."""
        r = np.asarray(r, dtype=float)
        return np.exp(-0.5 * (self.width * r) ** 2)

    def __call__(self, x, d=1):
        x = np.asarray(x, dtype=float)
        # coordinates in d = 1, radii |x| in d >= 2
        rr = (x - self.center) ** 2 if d == 1 else x**2
        return (2 * math.pi * self.width**2) ** (-d / 2) * np.exp(-0.5 * rr / self.width**2)

    def to_dict(self):
        return {"kind": self.kind, "center": self.center, "width": self.width}


@dataclass(frozen=True)
class Indicator:
    """Indicator of [a, b] in one dimension, of the shell a <= |x| <= b in d >= 2."""

    a: float
    b: float

    kind = "indicator"

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError("indicator requires a < b")

    def is_radial(self, d):
        return d == 1 or self.a >= 0

    def shift(self, d):
        return 0.5 * (self.a + self.b) if d == 1 else 0.0

    def fourier(self, r, d):
        if d == 1:
            return _ball_transform(0.5 * (self.b - self.a), r, 1)
        out = _ball_transform(self.b, r, d)
        if self.a > 0:
            out = out - _ball_transform(self.a, r, d)
        return out

    def __call__(self, x, d=1):
        x = np.asarray(x, dtype=float)
        return ((x >= self.a) & (x <= self.b)).astype(float)

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Piecewise-linear data on a strictly increasing one-dimensional grid,
    zero outside it."""

    grid: np.ndarray
    values: np.ndarray

    kind = "tabulated"

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise DomainError("tabulated grid and values must be 1-D of equal length >= 2")
        if np.any(np.diff(g) <= 0):
            raise DomainError("tabulated grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("tabulated values must be finite")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def is_radial(self, d):
        return d == 1

    def shift(self, d):
        return 0.0

    def fourier(self, r, d):
        raise DimensionError("tabulated data has no closed-form transform")

    def __call__(self, x, d=1):
        if d != 1:
            raise DimensionError("tabulated initial data is one-dimensional")
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def to_dict(self):
        return {"kind": self.kind, "grid": self.grid.tolist(), "values": self.values.tolist()}


InitialCondition = Delta | Gaussian | Indicator | Tabulated


def initial_condition_from_dict(d: dict) -> InitialCondition:
    d = dict(d)
    kind = d.pop("kind", None)
    classes = {"delta": Delta, "gaussian": Gaussian, "indicator": Indicator, "tabulated": Tabulated}
    if kind not in classes:
        raise DomainError(f"unknown initial condition kind {kind!r}")
    try:
        return classes[kind](**d)
    except TypeError as exc:
        raise DomainError(str(exc)) from None


@dataclass
class SolutionField:
    """A solution u(t, .) sampled on a one-dimensional or radial grid."""

    d: int
    grid: np.ndarray
    values: np.ndarray
    t: float
    route: str
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.d < 1:
            raise DomainError("dimension must be >= 1")
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise DomainError("grid must be one-dimensional with at least two points")
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if self.values.shape != self.grid.shape:
            raise DomainError("values and grid shapes differ")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field values must be finite")
        if self.t < 0:
            raise DomainError("t must be >= 0")
        if self.route not in ROUTES:
            raise DomainError(f"unknown route {self.route!r}")
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)

    def header(self):
        """``# route=...,d=...,t=...,alpha=...,lambda=...,symbol={...}``"""
        parts = [f"route={self.route}", f"d={self.d}", f"t={_fmt(self.t)}"]
        for key in ("alpha", "lambda", "lambda_epd", "symbol"):
            if key in self.meta:
                val = json.dumps(self.meta[key], sort_keys=True, separators=(",", ":"))
                parts.append(f"{key}={val}")
        return "# " + ",".join(parts)


def _fmt(v):
    return format(float(v), ".17g")


def write_field_csv(fld: SolutionField, path=None):
    """CSV with a commented header line, then ``x,value[,stderr]`` rows.

    Numbers carry 17 significant digits so a read-back is bit-exact.  Returns
    the text when ``path`` is None.
    """
    buf = io.StringIO()
    buf.write(fld.header() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    if fld.stderr is None:
        w.writerow(["x", "value"])
        for x, v in zip(fld.grid, fld.values):
            w.writerow([_fmt(x), _fmt(v)])
    else:
        w.writerow(["x", "mean", "stderr"])
        for x, v, e in zip(fld.grid, fld.values, fld.stderr):
            w.writerow([_fmt(x), _fmt(v), _fmt(e)])
    text = buf.getvalue()
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def read_field_csv(path):
    """Read a field CSV back; returns (header, columns) with numpy columns keyed by name."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    header = ""
    if lines and lines[0].startswith("#"):
        header, lines = lines[0], lines[1:]
    rows = list(csv.reader(lines))
    names = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(names))
    return header, {name: data[:, i] for i, name in enumerate(names)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
