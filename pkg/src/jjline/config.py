"""TOML run configurations: schema validation, normalization, manifests.

Every subcommand has a fixed schema of typed sections. Validation is
strict: unknown sections or keys are rejected with their full path, so a
typo cannot silently fall back to a default. A validated config is a
plain dict of sections with all defaults resolved; the manifest written
next to each output is that dict plus a [meta] section and is itself a
valid config, so any run can be reproduced from its manifest.
"""

from __future__ import annotations

import sys

import numpy as np

from .errors import ConfigError
from .scattering import CrystalChain, JunctionSpec, Segment

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

__all__ = [
    "load_config",
    "validate",
    "chain_from_elements",
    "elements_from_chain",
    "write_manifest",
    "SCHEMAS",
]

_REQUIRED = object()


def _float(raw, path):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {raw!r}")
    return float(raw)


def _pos_float(raw, path):
    val = _float(raw, path)
    if not val > 0:
        raise ConfigError(f"{path}: must be > 0, got {val}")
    return val


def _nonneg_float(raw, path):
    val = _float(raw, path)
    if val < 0:
        raise ConfigError(f"{path}: must be >= 0, got {val}")
    return val


def _int(raw, path):
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"{path}: expected an integer, got {raw!r}")
    return raw


def _pos_int(raw, path):
    val = _int(raw, path)
    if val < 1:
        raise ConfigError(f"{path}: must be >= 1, got {val}")
    return val


def _seed(raw, path):
    val = _int(raw, path)
    if not 0 <= val < 2**64:
        raise ConfigError(f"{path}: must fit in 64 unsigned bits")
    return val


def _bool(raw, path):
    if not isinstance(raw, bool):
        raise ConfigError(f"{path}: expected true/false, got {raw!r}")
    return raw


def _float_list(raw, path):
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}: expected a nonempty list of numbers")
    return [_float(v, f"{path}[{i}]") for i, v in enumerate(raw)]


def _angle(raw, path):
    val = _float(raw, path)
    if not -np.pi / 2 < val < np.pi / 2:
        raise ConfigError(f"{path}: must lie in (-pi/2, pi/2) radians, got {val}")
    return val


def _req(tab: dict, key: str, path: str):
    if key not in tab:
        raise ConfigError(f"missing required key {path}.{key}")
    return tab[key]


def _elements(raw, path):
    """Array of tables describing a chain left to right."""
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}: expected a nonempty array of element tables")
    out = []
    for i, tab in enumerate(raw):
        p = f"{path}[{i}]"
        if not isinstance(tab, dict):
            raise ConfigError(f"{p}: expected a table")
        kind = tab.get("kind")
        if kind == "junction":
            allowed = {"kind", "omega_p", "z_ratio"}
            entry = {"kind": "junction",
                     "omega_p": _pos_float(_req(tab, "omega_p", p), f"{p}.omega_p"),
                     "z_ratio": _pos_float(_req(tab, "z_ratio", p), f"{p}.z_ratio")}
        elif kind == "segment":
            allowed = {"kind", "length"}
            entry = {"kind": "segment",
                     "length": _nonneg_float(_req(tab, "length", p), f"{p}.length")}
        else:
            raise ConfigError(f"{p}.kind: must be 'junction' or 'segment', got {kind!r}")
        extra = set(tab) - allowed
        if extra:
            raise ConfigError(f"unknown key {p}.{sorted(extra)[0]}")
        out.append(entry)
    return out


_GRID = {
    "omega_min": (_pos_float, _REQUIRED),
    "omega_max": (_pos_float, _REQUIRED),
    "n": (_pos_int, _REQUIRED),
}

_RUN = {
    "seed": (_seed, 0),
    "workers": (_pos_int, 1),
}

_CELL = {"element": (_elements, _REQUIRED)}

SCHEMAS = {
    "scatter": {
        "junction": {"omega_p": (_pos_float, _REQUIRED), "z_ratio": (_pos_float, _REQUIRED)},
        "grid": _GRID,
        "run": _RUN,
    },
    "bands1d": {
        "cell": _CELL,
        "grid": _GRID,
        "gaps": {"n_scan": (_pos_int, 2000)},
        "run": _RUN,
    },
    "bands2d": {
        "cell": _CELL,
        "contour": {"omega": (_pos_float, _REQUIRED), "n": (_pos_int, 96)},
        "run": _RUN,
    },
    "refract": {
        "cell": _CELL,
        "scan": {**_GRID, "theta_in": (_angle, _REQUIRED)},
        "run": _RUN,
    },
    "entangle": {
        "chain": {
            "n_junctions": (_pos_int, _REQUIRED),
            "omega_p": (_pos_float, _REQUIRED),
            "z_ratio": (_pos_float, _REQUIRED),
            "length": (_pos_float, _REQUIRED),
        },
        "grid": _GRID,
        "disorder": {
            "n_realizations": (_pos_int, _REQUIRED),
            "deltas": (_float_list, _REQUIRED),
            "correlated_draws": (_bool, False),
            "n_separations": (_pos_int, 64),
        },
        "qubits": {
            "f": (_nonneg_float, _REQUIRED),
            "lambda_nr": (_nonneg_float, _REQUIRED),
            "gamma0": (_pos_float, 1.0),
        },
        "run": _RUN,
    },
}

# sections whose omega_max must exceed omega_min
_ORDERED_GRIDS = ("grid", "scan")


def load_config(path) -> dict:
    """Read a TOML file; parse and I/O problems both surface as ConfigError."""
    try:
        with open(path, "rb") as fh:
            return _toml.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def validate(subcommand: str, raw: dict) -> dict:
    """Check raw config against the subcommand schema, resolving defaults.

    A [meta] section (written by manifests) is allowed anywhere and
    dropped. Everything else unknown is an error naming the path.
    """
    if subcommand not in SCHEMAS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    schema = SCHEMAS[subcommand]
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a table")
    unknown = set(raw) - set(schema) - {"meta"}
    if unknown:
        raise ConfigError(f"unknown section [{sorted(unknown)[0]}]")
    out = {}
    for sec, fields in schema.items():
        given = raw.get(sec, {})
        if not isinstance(given, dict):
            raise ConfigError(f"[{sec}] must be a table")
        extra = set(given) - set(fields)
        if extra:
            raise ConfigError(f"unknown key {sec}.{sorted(extra)[0]}")
        norm = {}
        for key, (caster, default) in fields.items():
            if key in given:
                norm[key] = caster(given[key], f"{sec}.{key}")
            elif default is _REQUIRED:
                raise ConfigError(f"missing required key {sec}.{key}")
            else:
                norm[key] = default
        out[sec] = norm
    for sec in _ORDERED_GRIDS:
        g = out.get(sec)
        if g and "omega_max" in g and not g["omega_max"] > g["omega_min"]:
            raise ConfigError(f"{sec}.omega_max must exceed {sec}.omega_min")
    return out


def chain_from_elements(elements: list) -> CrystalChain:
    """Build the chain described by a validated cell.element list."""
    built = []
    for e in elements:
        if e["kind"] == "junction":
            built.append(JunctionSpec(omega_p=e["omega_p"], z_ratio=e["z_ratio"]))
        else:
            built.append(Segment(length=e["length"]))
    return CrystalChain(elements=tuple(built))


def elements_from_chain(chain: CrystalChain) -> list:
    out = []
    for e in chain.elements:
        if isinstance(e, JunctionSpec):
            out.append({"kind": "junction", "omega_p": e.omega_p, "z_ratio": e.z_ratio})
        else:
            out.append({"kind": "segment", "length": e.length})
    return out


def _toml_scalar(val) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, int):
        return str(val)
    if isinstance(val, float):
        return repr(val)  # shortest round-trip form
    if isinstance(val, str):
        escaped = val.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise ConfigError(f"cannot serialize {type(val).__name__} to TOML")


def _emit_table(name: str, table: dict, lines: list) -> None:
    scalars = {k: v for k, v in table.items() if not isinstance(v, list) or (
        v and not isinstance(v[0], dict))}
    arrays = {k: v for k, v in table.items() if k not in scalars}
    lines.append(f"[{name}]")
    for key, val in scalars.items():
        if isinstance(val, list):
            inner = ", ".join(_toml_scalar(v) for v in val)
            lines.append(f"{key} = [{inner}]")
        else:
            lines.append(f"{key} = {_toml_scalar(val)}")
    lines.append("")
    for key, tabs in arrays.items():
        for tab in tabs:
            lines.append(f"[[{name}.{key}]]")
            for k, v in tab.items():
                lines.append(f"{k} = {_toml_scalar(v)}")
            lines.append("")


def write_manifest(path, subcommand: str, version: str, config: dict) -> None:
    """Emit [meta] + the resolved config; the file is itself a valid config.

    The writer covers exactly the shapes the schemas produce (scalar
    sections, scalar lists, and arrays of element tables), deterministic
    key order, so identical runs give identical bytes.
    """
    lines = []
    _emit_table("meta", {"tool": "jjline", "version": version,
                         "subcommand": subcommand}, lines)
    for sec, table in config.items():
        _emit_table(sec, table, lines)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines).rstrip("\n") + "\n")
