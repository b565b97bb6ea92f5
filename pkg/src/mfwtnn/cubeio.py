"""Cube container files and flat key-value config files.

Cube file layout::

    MFWCUBE 1
    dims 40 40 20
    width 64
    byteorder little
    layout C
    END
    <n1*n2*n3 little-endian floats, C order (band index fastest)>

Config files hold ``key = value`` lines; ``#`` starts a comment. Every key
must belong to :class:`~mfwtnn.solver.SolverConfig` or :class:`~mfwtnn.noise.NoiseSpec`,
so a misspelt key is an error rather than a silently ignored setting.
"""

from __future__ import annotations

import dataclasses
import os
from pathlib import Path

import numpy as np

from .noise import NoiseSpec, StripeSpec
from .solver import SolverConfig
from .weights import ModalWeights

__all__ = [
    "CubeFormatError",
    "ConfigError",
    "MAGIC",
    "save_cube",
    "load_cube",
    "normalize_cube",
    "read_config",
    "write_config",
    "solver_config_from_dict",
    "solver_config_to_dict",
    "noise_spec_from_dict",
    "noise_spec_to_dict",
    "load_solver_config",
    "load_noise_spec",
    "SOLVER_KEYS",
    "NOISE_KEYS",
]

MAGIC = "MFWCUBE 1"
_DTYPES = {32: "<f4", 64: "<f8"}
_MAX_HEADER_LINES = 16


class CubeFormatError(ValueError):
    """Malformed cube file."""


class ConfigError(ValueError):
    """Malformed or unknown config entry."""


def save_cube(cube, path, width: int = 64, force: bool = False) -> Path:
    """Write ``cube`` to ``path``. Existing files are kept unless ``force`` is set."""
    path = Path(path)
    cube = np.asarray(cube)
    if cube.ndim != 3 or min(cube.shape) < 1:
        raise ValueError(f"cube must have three nonzero dims, got shape {cube.shape}")
    if width not in _DTYPES:
        raise ValueError(f"width must be 32 or 64, got {width}")
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; pass force=True to overwrite")
    n1, n2, n3 = cube.shape
    header = f"{MAGIC}\ndims {n1} {n2} {n3}\nwidth {width}\nbyteorder little\nlayout C\nEND\n"
    payload = np.ascontiguousarray(cube, dtype=_DTYPES[width]).tobytes(order="C")
    tmp = path.with_name(path.name + ".part")
    with open(tmp, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(payload)
    os.replace(tmp, path)
    return path


def _read_header(f) -> dict:
    first = f.readline().decode("ascii", "replace").strip()
    if first != MAGIC:
        raise CubeFormatError(f"not a cube file (magic {first!r})")
    fields = {}
    for _ in range(_MAX_HEADER_LINES):
        line = f.readline().decode("ascii", "replace").strip()
        if line == "END":
            break
        if not line:
            raise CubeFormatError("truncated header")
        key, _, value = line.partition(" ")
        fields[key] = value.split()
    else:
        raise CubeFormatError("header has no END line")
    try:
        dims = tuple(int(v) for v in fields["dims"])
        width = int(fields["width"][0])
        order = fields["byteorder"][0]
        layout = fields["layout"][0]
    except (KeyError, IndexError, ValueError) as exc:
        raise CubeFormatError(f"incomplete header: {exc}") from exc
    if len(dims) != 3 or min(dims) < 1:
        raise CubeFormatError(f"bad dims {dims}")
    if width not in _DTYPES:
        raise CubeFormatError(f"unsupported width {width}")
    if order != "little":
        raise CubeFormatError(f"unsupported byte order {order!r}")
    if layout != "C":
        raise CubeFormatError(f"unsupported layout {layout!r}")
    return {"dims": dims, "width": width}


def load_cube(path, normalize: bool = False) -> np.ndarray:
    """Read a cube file as float64.

    With ``normalize=True`` the cube is min-max mapped to ``[0, 1]``.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such cube file: {path}")
    with open(path, "rb") as f:
        hdr = _read_header(f)
        payload = f.read()
    dims, width = hdr["dims"], hdr["width"]
    expected = int(np.prod(dims)) * width // 8
    if len(payload) != expected:
        raise CubeFormatError(f"payload is {len(payload)} bytes, header implies {expected}")
    cube = np.frombuffer(payload, dtype=_DTYPES[width]).reshape(dims).astype(np.float64)
    if not np.all(np.isfinite(cube)):
        raise CubeFormatError(f"{path} contains NaN or Inf")
    return normalize_cube(cube) if normalize else cube


def normalize_cube(cube) -> np.ndarray:
    """Affine map of the whole cube onto ``[0, 1]``; a constant cube maps to zeros."""
    cube = np.asarray(cube, dtype=np.float64)
    lo, hi = float(cube.min()), float(cube.max())
    if hi == lo:
        return np.zeros_like(cube)
    return (cube - lo) / (hi - lo)


# ---------------------------------------------------------------- config files

SOLVER_KEYS = tuple(f.name for f in dataclasses.fields(SolverConfig))
NOISE_KEYS = (
    "gaussian",
    "impulse",
    "stripe_bands",
    "stripe_fraction",
    "stripe_offsets",
    "seed",
    "case",
)


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines into a dict of raw strings."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def write_config(entries: dict, path, force: bool = False) -> Path:
    path = Path(path)
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; pass force=True to overwrite")
    lines = [f"{k} = {_fmt(v)}" for k, v in entries.items() if v is not None]
    path.write_text("\n".join(lines) + "\n")
    return path


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.replace(",", " ").split())


def _level(s: str):
    vals = _floats(s)
    if len(vals) == 1:
        return vals[0]
    if len(vals) == 2:
        return vals
    raise ConfigError(f"expected a level or a 'lo, hi' range, got {s!r}")


def _bool(s: str) -> bool:
    low = s.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


def _optional_float(s: str):
    return None if s.lower() in ("auto", "none", "") else float(s)


def _check_keys(entries: dict, allowed) -> None:
    unknown = sorted(set(entries) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown config key(s) {unknown}; allowed keys are {sorted(allowed)}")


def solver_config_from_dict(entries: dict[str, str]) -> SolverConfig:
    _check_keys(entries, SOLVER_KEYS)
    kw: dict = {}
    try:
        for key, value in entries.items():
            if key == "model":
                kw[key] = value
            elif key == "alpha":
                a = _floats(value)
                kw[key] = ModalWeights.from_alpha3(a[0]) if len(a) == 1 else ModalWeights(a)
            elif key in ("lam", "tau", "sigma"):
                kw[key] = _optional_float(value)
            elif key == "max_iters":
                kw[key] = int(value)
            elif key == "adaptive_weights":
                kw[key] = _bool(value)
            else:
                kw[key] = float(value)
        return SolverConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def solver_config_to_dict(cfg: SolverConfig) -> dict:
    d = cfg.to_dict()
    for k in ("lam", "tau", "sigma"):
        if d[k] is None:
            d[k] = "auto"
    return d


def noise_spec_from_dict(entries: dict[str, str]) -> NoiseSpec:
    _check_keys(entries, NOISE_KEYS)
    try:
        stripes = None
        if "stripe_bands" in entries:
            lo, hi = (int(v) for v in _floats(entries["stripe_bands"]))
            kw = {}
            if "stripe_fraction" in entries:
                kw["column_fraction"] = float(entries["stripe_fraction"])
            if "stripe_offsets" in entries:
                kw["offsets"] = _floats(entries["stripe_offsets"])
            stripes = StripeSpec((lo, hi), **kw)
        elif "stripe_fraction" in entries or "stripe_offsets" in entries:
            raise ConfigError("stripe_fraction / stripe_offsets need stripe_bands")
        case = entries.get("case")
        return NoiseSpec(
            gaussian=_level(entries.get("gaussian", "0")),
            impulse=_level(entries.get("impulse", "0")),
            stripes=stripes,
            seed=int(entries.get("seed", "0")),
            case=int(case) if case not in (None, "", "none") else None,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def noise_spec_to_dict(spec: NoiseSpec) -> dict:
    d = {"gaussian": spec.gaussian, "impulse": spec.impulse, "seed": spec.seed, "case": spec.case}
    if spec.stripes is not None:
        d["stripe_bands"] = spec.stripes.bands
        d["stripe_fraction"] = spec.stripes.column_fraction
        d["stripe_offsets"] = spec.stripes.offsets
    return d


def load_solver_config(path) -> SolverConfig:
    return solver_config_from_dict(read_config(path))


def load_noise_spec(path) -> NoiseSpec:
    return noise_spec_from_dict(read_config(path))
