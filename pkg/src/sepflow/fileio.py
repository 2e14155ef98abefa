"""Run configuration files and CSV grid export.

Config files are line oriented ``key=value`` text with ``#`` comments::

    family=powermode
    lambda=3
    c1=1
    domain=fullplane
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields

import numpy as np

from . import families as fam
from .geometry import ConeDomain
from .verifier import GridSpec, sample_field

KEYS = ("family", "lambda", "c1", "c2", "c3", "c4", "c5",
        "domain", "alpha", "beta", "rmin", "rmax", "nr", "ntheta")
HEADER = ("x", "y", "u1", "u2", "p", "w")
GRID_TOL = 1e-9


class ConfigError(ValueError):
    pass


class GridFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    family: str
    constants: tuple = ()
    lam: float | None = None
    domain: ConeDomain = ConeDomain.full_plane()
    rmin: float = 0.5
    rmax: float = 2.0
    nr: int = 8
    ntheta: int = 16

    def solution(self) -> fam.FlowSolution:
        return build_solution(self.family, self.constants, self.lam)

    def grid(self) -> GridSpec:
        return GridSpec(self.domain, self.rmin, self.rmax, self.nr, self.ntheta)


def constant_names(tag: str) -> list:
    cls = fam.FAMILIES[tag]
    return [f.name for f in fields(cls) if f.name != "lam"]


def build_solution(tag: str, constants, lam=None) -> fam.FlowSolution:
    if tag not in fam.FAMILIES:
        raise ConfigError(f"unknown family {tag!r}; expected one of {', '.join(fam.FAMILIES)}")
    names = constant_names(tag)
    if len(constants) > len(names):
        raise ConfigError(f"{tag} takes {len(names)} constants ({', '.join(names)})")
    kw = dict(zip(names, constants))
    if tag == "powermode":
        if lam is None:
            raise ConfigError("powermode needs lambda")
        return fam.PowerMode(lam, **kw)
    if lam is not None:
        raise ConfigError(f"lambda is only meaningful for powermode, not {tag}")
    if tag == "quadratic":
        full = [kw.get(n, 0.0) for n in names]
        return fam.make_quadratic(*full)
    return fam.FAMILIES[tag](**kw)


def _number(key, value, lineno, kind=float):
    try:
        out = kind(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects a number, got {value!r}") from None
    if kind is float and not math.isfinite(out):
        raise ConfigError(f"line {lineno}: {key} must be finite")
    return out


def parse_config(text: str) -> RunConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)

    if "family" not in raw:
        raise ConfigError("missing required key 'family'")
    family = raw["family"][0].lower()

    nums = {}
    for key in ("lambda", "c1", "c2", "c3", "c4", "c5", "alpha", "beta", "rmin", "rmax"):
        if key in raw:
            nums[key] = _number(key, *raw[key])
    for key in ("nr", "ntheta"):
        if key in raw:
            nums[key] = _number(key, *raw[key], kind=int)

    present = [k for k in ("c1", "c2", "c3", "c4", "c5") if k in nums]
    n = int(present[-1][1]) if present else 0
    constants = tuple(nums.get(f"c{i}", 0.0) for i in range(1, n + 1))

    kind = raw.get("domain", ("fullplane", 0))[0].lower()
    try:
        if kind == "fullplane":
            if "alpha" in nums or "beta" in nums:
                raise ConfigError("alpha/beta are only used with domain=sector")
            domain = ConeDomain.full_plane()
        elif kind == "sector":
            domain = ConeDomain.sector(nums.get("alpha", 0.0), nums.get("beta", math.pi))
        elif kind == "halfplane":
            domain = ConeDomain.half_plane()
        else:
            raise ConfigError(f"line {raw['domain'][1]}: unknown domain {kind!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    try:
        s = build_solution(family, constants, nums.get("lambda"))
    except fam.ConstraintViolation as exc:
        raise ConfigError(f"quadratic constraint violated: residuals "
                          f"({exc.res1:g}, {exc.res2:g})") from None
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    ok = fam.admissible(s, domain)
    if not ok:
        raise ConfigError(f"inadmissible on {domain}: {ok.reason}")

    cfg = RunConfig(family, constants, nums.get("lambda"), domain,
                    nums.get("rmin", 0.5), nums.get("rmax", 2.0),
                    nums.get("nr", 8), nums.get("ntheta", 16))
    try:
        cfg.grid()
    except ValueError as exc:
        raise ConfigError(f"bad grid: {exc}") from None
    return cfg


def render_config(cfg: RunConfig) -> str:
    lines = [f"family={cfg.family}"]
    if cfg.lam is not None:
        lines.append(f"lambda={cfg.lam!r}")
    lines += [f"c{i}={v!r}" for i, v in enumerate(cfg.constants, 1)]
    if cfg.domain.is_full_plane:
        lines.append("domain=fullplane")
    else:
        lines += ["domain=sector", f"alpha={cfg.domain.alpha!r}", f"beta={cfg.domain.beta!r}"]
    lines += [f"rmin={cfg.rmin!r}", f"rmax={cfg.rmax!r}", f"nr={cfg.nr}", f"ntheta={cfg.ntheta}"]
    return "\n".join(lines) + "\n"


def _fmt(v: float) -> str:
    return "%.17g" % v if math.isfinite(v) else "nan"


def export_grid(s: fam.FlowSolution, g: GridSpec, path) -> int:
    """Write the sampled field as CSV; returns the number of rows replaced by NaN."""
    data = sample_field(s, g)
    cols = [np.asarray(data[k], float) for k in HEADER]
    bad = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for row in zip(*cols):
            if not all(math.isfinite(v) for v in row):
                bad += 1
                row = row[:2] + (math.nan,) * 4
            w.writerow([_fmt(v) for v in row])
    return bad


@dataclass(frozen=True)
class GridData:
    radii: np.ndarray
    angles: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    p: np.ndarray
    w: np.ndarray


def read_grid(path) -> GridData:
    """Read an exported CSV back onto its polar tensor grid."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != HEADER:
        raise GridFormatError(f"expected header {','.join(HEADER)}")
    try:
        arr = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise GridFormatError(f"non-numeric entry: {exc}") from None
    if arr.ndim != 2 or arr.shape[1] != 6 or arr.shape[0] < 4:
        raise GridFormatError("too few rows or wrong column count")
    x, y = arr[:, 0], arr[:, 1]
    r = np.hypot(x, y)
    t = np.mod(np.arctan2(y, x), 2 * math.pi)
    n = arr.shape[0]
    nt = int(np.sum(np.abs(r - r[0]) <= GRID_TOL * max(r[0], 1.0)))
    if nt < 1 or n % nt:
        raise GridFormatError("rows do not form a polar tensor grid")
    nr = n // nt
    R, T = r.reshape(nr, nt), t.reshape(nr, nt)
    radii, angles = R[:, 0], T[0]
    if (np.abs(R - radii[:, None]).max() > GRID_TOL * max(1.0, radii.max())
            or np.abs(T - angles[None, :]).max() > GRID_TOL):
        raise GridFormatError("rows are not regular in (r, theta) within 1e-9")
    return GridData(radii, angles, *(arr[:, k].reshape(nr, nt) for k in range(2, 6)))
