"""Experiment configuration: flat ``section.key=value`` files or the same schema as JSON.

Resolution order, lowest to highest: built-in defaults, config file,
``GEOBEAM_SEED`` (``mc.seed`` only), ``--set`` flags.
"""
from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GeobeamError


class ConfigParseError(GeobeamError):
    pass


class ConfigValidationError(GeobeamError, ValueError):
    pass


class Experiment(str, enum.Enum):
    BEAM_GAIN = "BEAM_GAIN"
    FIG2_SWEEP = "FIG2_SWEEP"
    LEMMA1_VALIDATE = "LEMMA1_VALIDATE"
    THEOREM1_CHECK = "THEOREM1_CHECK"
    THEOREM3_CHECK = "THEOREM3_CHECK"
    RATE_BOUNDS = "RATE_BOUNDS"


def _float(v):
    if isinstance(v, bool):
        raise ValueError("expected a number")
    if isinstance(v, (int, float)):
        return float(v)
    s = str(v).strip().lower()
    consts = {"pi": math.pi, "pi/2": math.pi / 2, "pi/4": math.pi / 4, "pi/8": math.pi / 8,
              "inf": math.inf}
    return consts[s] if s in consts else float(s)


def _int(v):
    if isinstance(v, bool):
        raise ValueError("expected an integer")
    if isinstance(v, int):
        return v
    f = float(str(v).strip())
    if not f.is_integer():
        raise ValueError(f"expected an integer, got {v!r}")
    return int(f)


def _str(v):
    return str(v).strip()


def _auto(parse):
    def p(v):
        return None if str(v).strip().lower() in ("auto", "none", "") else parse(v)
    return p


def _list(parse):
    def p(v):
        items = v if isinstance(v, (list, tuple)) else [x for x in str(v).split(",") if x.strip()]
        return [parse(x) for x in items]
    return p


def _beams(v):
    items = v if isinstance(v, (list, tuple)) else [x for x in str(v).split(",") if x.strip()]
    out = []
    for item in items:
        if isinstance(item, (list, tuple)):
            n, m = item
        else:
            n, m = str(item).split(":")
        out.append((_int(n), _int(m)))
    return out


def _q_grid(v):
    if str(v).strip().lower() == "admissible":
        return "admissible"
    return _list(_float)(v)


def _enum(cls):
    def p(v):
        try:
            return cls(str(v).strip().upper())
        except ValueError:
            raise ValueError(f"expected one of {[e.value for e in cls]}, got {v!r}") from None
    return p


def _schema():
    from .montecarlo import Conditioning, Sampler
    from .selection import Policy

    return {
        "experiment": (_enum(Experiment), Experiment.FIG2_SWEEP),
        "output_path": (_str, "geobeam_out"),
        "system.M": (_int, 10_000),
        "system.H": (_float, 3.5786e7),
        "system.f_c": (_float, 20e9),
        "system.c0": (_float, 299_792_458.0),
        "system.P": (_float, 1.0),
        "params.q": (_float, 1.8),
        "params.t": (_float, 0.3),
        "params.p": (_float, 0.4),
        "params.eps": (_float, 0.1),
        "params.s": (_float, 0.3),
        "params.ell": (_float, 0.5),
        "selection.N": (_auto(_int), None),
        "selection.R": (_auto(_float), None),
        "selection.policy": (_enum(Policy), Policy.NEAREST_N),
        "mc.n_samples": (_int, 10_000),
        "mc.seed": (_int, 20240601),
        "mc.workers": (_int, 1),
        "mc.conditioning": (_enum(Conditioning), Conditioning.RESAMPLE_ON_INSUFFICIENT),
        "mc.sampler": (_enum(Sampler), Sampler.ORDER_STATISTIC),
        "sweep.t_values": (_list(_float), [0.0, 0.5, 1.0]),
        "sweep.q_grid": (_q_grid, "admissible"),
        "sweep.n_q": (_int, 8),
        "sweep.policies": (_list(_enum(Policy)), [Policy.NEAREST_N, Policy.RANDOM_WITHIN_R]),
        "beam_gain.M_values": (_list(_int), [64, 128, 256]),
        "beam_gain.phi_values": (_list(_float), [0.0, math.pi / 8, math.pi / 4]),
        "beam_gain.r_max": (_float, 1.5e6),
        "beam_gain.n_points": (_int, 301),
        "lemma1.N": (_int, 5),
        "lemma1.lam_pi_R2": (_float, 50.0),
        "theorem1.M_values": (_list(_int), [4096]),
        "theorem1.phi_values": (_list(_float), [math.pi / 4, math.pi / 8, 0.0]),
        "theorem1.n_radii": (_int, 10_000),
        "theorem3.beams": (_beams, [(1, 0), (2, 0), (1, 1)]),
        "rate_bounds.M_values": (_list(_int), [2048, 4096, 8192, 16384]),
    }


# user-facing km aliases, converted to meters
KM_ALIASES = {"system.H_km": "system.H", "selection.R_km": "selection.R",
              "beam_gain.r_max_km": "beam_gain.r_max"}


def parse_keyvalue_text(text: str, origin: str = "<text>") -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"{origin}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigParseError(f"{origin}:{lineno}: empty key")
        out[key] = value
    return out


def _flatten(obj, prefix=""):
    out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def load_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigParseError(f"{path}: top level must be an object")
        # run manifests embed their resolved config under "config"
        if isinstance(doc.get("config"), dict):
            doc = doc["config"]
        return _flatten(doc)
    return parse_keyvalue_text(text, str(path))


@dataclass
class ResolvedConfig:
    values: dict
    sources: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def canonical(self) -> dict:
        """JSON-safe view of the resolved values, loadable back as a config."""
        def enc(v):
            if isinstance(v, enum.Enum):
                return v.value
            if isinstance(v, list):
                return [enc(x) for x in v]
            if isinstance(v, tuple):
                return f"{v[0]}:{v[1]}"
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return v
        return {k: enc(v) for k, v in sorted(self.values.items())}


def resolve(file_values: dict | None = None, overrides: dict | None = None,
            env: dict | None = None) -> ResolvedConfig:
    schema = _schema()
    env = os.environ if env is None else env
    values = {k: default for k, (_, default) in schema.items()}
    sources = {k: "default" for k in schema}

    layers = [("file", file_values or {})]
    if env.get("GEOBEAM_SEED") is not None:
        layers.append(("env", {"mc.seed": env["GEOBEAM_SEED"]}))
    layers.append(("flag", overrides or {}))

    for origin, layer in layers:
        for key, raw in layer.items():
            target = KM_ALIASES.get(key, key)
            if target not in schema:
                raise ConfigValidationError(f"unknown config key {key!r} ({origin})")
            parse = schema[target][0]
            try:
                value = parse(raw)
            except (ValueError, TypeError, KeyError) as exc:
                raise ConfigValidationError(f"invalid value for {key!r} ({origin}): {exc}") from None
            if key in KM_ALIASES and value is not None:
                value = value * 1e3
            values[target] = value
            sources[target] = origin
    return ResolvedConfig(values, sources)


def parse_overrides(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigParseError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out
