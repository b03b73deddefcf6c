"""Line-oriented experiment configuration: `key = value`, `#` comments.

Parsing validates every constraint it can before any computation starts and
reports all errors at once, each with its line number.  Configurations
round-trip: parse(serialize(parse(text))) equals parse(text).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .geometry import build_domain

_SCALAR_CATALOGS = {"constant": 1, "radial_bump": 4, "linear_ramp": 2}
_TENSOR_CATALOGS = {"constant_tensor": 3, "rotated_anisotropic": 3}
_DATUM_KINDS = ("cos", "sin", "steklov")


@dataclass(eq=False)
class ExperimentConfig:
    domain_family: str = "disk"
    domain_params: tuple = (1.0,)
    h: float = 0.05
    conductivity: tuple = ("constant", (1.0,))
    metric: tuple = ("constant_tensor", (1.0, 0.0, 1.0))
    aks: bool = False
    data: list = field(default_factory=list)        # [(kind, n), ...]
    d_grid: tuple = (0.0, 0.0, 1)                   # start, stop, count
    steklov_m: int = 12
    mode_traces: bool = False
    penetration_n: tuple = ()
    penetration_nmax: int = 0                       # 0 = per-mode default n+16
    penetration_d: tuple = ()
    out: str = ""

    def d_values(self):
        start, stop, count = self.d_grid
        if count == 1:
            return np.array([start])
        return np.linspace(start, stop, count)

    def serialize(self):
        lines = [
            f"domain = {self.domain_family} " + _nums(self.domain_params),
            f"h = {self.h:.17g}",
            "A = " + _field_text(self.conductivity),
            "G = " + _field_text(self.metric),
            f"aks = {'on' if self.aks else 'off'}",
        ]
        for kind, n in self.data:
            lines.append(f"datum = {kind} {n}")
        start, stop, count = self.d_grid
        lines.append(f"d_grid = {start:.17g} {stop:.17g} {count}")
        lines.append(f"steklov_m = {self.steklov_m}")
        lines.append(f"mode_traces = {'on' if self.mode_traces else 'off'}")
        if self.penetration_n:
            lines.append("penetration_n = " + " ".join(str(n) for n in self.penetration_n))
        if self.penetration_nmax:
            lines.append(f"penetration_nmax = {self.penetration_nmax}")
        if self.penetration_d:
            lines.append("penetration_d = " + _nums(self.penetration_d))
        if self.out:
            lines.append(f"out = {self.out}")
        return "\n".join(lines) + "\n"


def _nums(values):
    return " ".join(f"{v:.17g}" for v in values)


def _field_text(spec):
    catalog, params = spec
    if catalog == "blended":
        weight, first, second = params
        return (f"blended {weight:.17g} | " + _field_text(first)
                + " | " + _field_text(second))
    return catalog + " " + _nums(params)


def _parse_field_spec(text, errors, lineno, label):
    tokens = text.split("|")
    head = tokens[0].split()
    if not head:
        errors.append((lineno, f"{label}: empty field spec"))
        return None
    catalog = head[0]
    if catalog == "blended":
        if len(tokens) != 3 or len(head) != 2:
            errors.append((lineno, f"{label}: blended needs `blended w | spec | spec`"))
            return None
        try:
            weight = float(head[1])
        except ValueError:
            errors.append((lineno, f"{label}: malformed blend weight {head[1]!r}"))
            return None
        first = _parse_field_spec(tokens[1], errors, lineno, label)
        second = _parse_field_spec(tokens[2], errors, lineno, label)
        if first is None or second is None:
            return None
        return ("blended", (weight, first, second))
    known = {**_SCALAR_CATALOGS, **_TENSOR_CATALOGS}
    if catalog not in known:
        errors.append((lineno, f"{label}: unknown catalog entry {catalog!r}"))
        return None
    want = known[catalog]
    raw = head[1:]
    if catalog == "linear_ramp" and len(raw) == 1:
        raw = raw + ["0.2"]
    if len(raw) != want:
        errors.append((lineno, f"{label}: {catalog} takes {want} number(s), got {len(raw)}"))
        return None
    try:
        params = tuple(float(t) for t in raw)
    except ValueError:
        errors.append((lineno, f"{label}: malformed number in {raw}"))
        return None
    return (catalog, params)


def parse_config(text):
    """Parse and fully validate; raises ConfigError listing every problem."""
    cfg = ExperimentConfig()
    errors = []
    seen_dgrid = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append((lineno, "expected `key = value`"))
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            seen_dgrid |= _apply(cfg, key, value, errors, lineno)
        except _LineError as exc:
            errors.append((lineno, str(exc)))
    _validate(cfg, errors, seen_dgrid)
    if errors:
        msg = "; ".join(f"line {ln}: {m}" for ln, m in errors)
        err = ConfigError(msg)
        err.errors = errors
        raise err
    return cfg


class _LineError(Exception):
    pass


def _floats(value, count=None):
    try:
        vals = tuple(float(t) for t in value.split())
    except ValueError:
        raise _LineError(f"malformed number in {value!r}")
    if count is not None and len(vals) != count:
        raise _LineError(f"expected {count} numbers, got {len(vals)}")
    return vals


def _flag(value):
    if value not in ("on", "off"):
        raise _LineError(f"expected on/off, got {value!r}")
    return value == "on"


def _apply(cfg, key, value, errors, lineno):
    """Apply one key; returns True when the key was d_grid."""
    if key == "domain":
        parts = value.split()
        if not parts:
            raise _LineError("domain needs a family name")
        cfg.domain_family = parts[0]
        cfg.domain_params = _floats(" ".join(parts[1:]))
    elif key == "h":
        cfg.h = _floats(value, 1)[0]
    elif key == "A":
        spec = _parse_field_spec(value, errors, lineno, "A")
        if spec is not None:
            cfg.conductivity = spec
    elif key == "G":
        spec = _parse_field_spec(value, errors, lineno, "G")
        if spec is not None:
            cfg.metric = spec
    elif key == "aks":
        cfg.aks = _flag(value)
    elif key == "mode_traces":
        cfg.mode_traces = _flag(value)
    elif key == "datum":
        parts = value.split()
        if len(parts) != 2 or parts[0] not in _DATUM_KINDS:
            raise _LineError(f"datum must be `cos|sin|steklov <k>`, got {value!r}")
        try:
            n = int(parts[1])
        except ValueError:
            raise _LineError(f"malformed datum index {parts[1]!r}")
        cfg.data.append((parts[0], n))
    elif key == "d_grid":
        parts = value.split()
        if len(parts) != 3:
            raise _LineError("d_grid takes `start stop count`")
        start, stop = _floats(" ".join(parts[:2]), 2)
        try:
            count = int(parts[2])
        except ValueError:
            raise _LineError(f"malformed count {parts[2]!r}")
        cfg.d_grid = (start, stop, count)
        return True
    elif key == "steklov_m":
        cfg.steklov_m = _int(value)
    elif key == "penetration_n":
        cfg.penetration_n = tuple(_int(t) for t in value.split())
    elif key == "penetration_nmax":
        cfg.penetration_nmax = _int(value)
    elif key == "penetration_d":
        cfg.penetration_d = _floats(value)
    elif key == "out":
        cfg.out = value
    else:
        raise _LineError(f"unknown key {key!r}")
    return False


def _int(value):
    try:
        return int(value)
    except ValueError:
        raise _LineError(f"malformed integer {value!r}")


def _validate(cfg, errors, seen_dgrid):
    domain = None
    try:
        domain = build_domain(cfg.domain_family, cfg.domain_params)
    except Exception as exc:
        errors.append((0, f"domain: {exc}"))

    if domain is not None and not 0.0 < cfg.h < domain.d0:
        errors.append((0, f"h must be in (0, d0); got h={cfg.h:g}, d0={domain.d0:g}"))

    start, stop, count = cfg.d_grid
    if count < 1:
        errors.append((0, "d_grid count must be >= 1"))
    if start < 0.0 or (count > 1 and stop <= start):
        errors.append((0, "d_grid must be ascending and nonnegative"))
    if domain is not None and seen_dgrid:
        if max(start, stop) > 0.9 * domain.d0 + 1e-12:
            errors.append((0, f"d_grid exceeds 0.9*d0 = {0.9*domain.d0:g}"))
        if count > 1 and (stop - start) / (count - 1) < 2.0 * cfg.h * (1 - 1e-12):
            errors.append((0, f"d_grid step below 2h = {2*cfg.h:g}"))

    for kind, n in cfg.data:
        if kind in ("cos", "sin") and n < 0:
            errors.append((0, f"datum {kind} {n}: mode must be >= 0"))
        if kind == "steklov" and n < 1:
            errors.append((0, f"datum steklov {n}: index must be >= 1"))
    if cfg.steklov_m < 1:
        errors.append((0, "steklov_m must be >= 1"))

    for n in cfg.penetration_n:
        nmax = cfg.penetration_nmax or (n + 16)
        if not n < nmax:
            errors.append((0, f"penetration needs n < n_max (n={n}, n_max={nmax})"))
    for d in cfg.penetration_d:
        if domain is not None and not 0.0 < d <= 0.9 * domain.d0 + 1e-12:
            errors.append((0, f"penetration depth {d:g} outside (0, 0.9*d0]"))
