"""Flat ``key = value`` run configuration.

One key per line, ``#`` starts a comment.  Keys are the field names of
ModelParams, ArenaGeometry (except ``fraction``) and RunConfig's scalar fields.
"""
from dataclasses import fields, replace

from .engine import RunConfig
from .errors import ParseError
from .lattice import ArenaGeometry
from .particles import ModelParams

_GEOMETRY_KEYS = [f.name for f in fields(ArenaGeometry) if f.name != "fraction"]
_PARAM_KEYS = [f.name for f in fields(ModelParams)]
_RUN_KEYS = [f.name for f in fields(RunConfig) if f.name not in ("geometry", "params")]


def _types():
    out = {}
    for cls, keys in ((ArenaGeometry, _GEOMETRY_KEYS), (ModelParams, _PARAM_KEYS), (RunConfig, _RUN_KEYS)):
        for f in fields(cls):
            if f.name in keys:
                out[f.name] = f.type
    return out


KEY_TYPES = _types()


def convert(key, text):
    """Convert a raw string to the key's type; raises KeyError for unknown keys."""
    typ = KEY_TYPES[key]
    if typ is int:
        return int(text, 0) if text.strip().lower().startswith("0x") else int(text)
    if typ is float:
        return float(text)
    return str(text)


def parse_config(lines):
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ParseError(f"expected 'key = value', got {text!r}", lineno)
        key, val = (p.strip() for p in text.split("=", 1))
        if key not in KEY_TYPES:
            raise ParseError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = convert(key, val)
        except ValueError:
            raise ParseError(f"bad value {val!r} for {key}", lineno) from None
    return values


def load_config(path):
    with open(path) as fh:
        return parse_config(fh)


def build_run_config(values, base=None):
    """RunConfig from ``base`` (default: all defaults) with ``values`` applied."""
    base = RunConfig() if base is None else base
    unknown = set(values) - set(KEY_TYPES)
    if unknown:
        raise ParseError(f"unknown key(s): {', '.join(sorted(unknown))}")
    geo = replace(base.geometry, **{k: values[k] for k in _GEOMETRY_KEYS if k in values})
    params = replace(base.params, **{k: values[k] for k in _PARAM_KEYS if k in values})
    run = {k: values[k] for k in _RUN_KEYS if k in values}
    return replace(base, geometry=geo, params=params, **run)


def config_items(cfg):
    items = [(k, getattr(cfg.geometry, k)) for k in _GEOMETRY_KEYS]
    items += [(k, getattr(cfg.params, k)) for k in _PARAM_KEYS]
    items += [(k, getattr(cfg, k)) for k in _RUN_KEYS]
    return items


def write_config(path, cfg):
    with open(path, "w") as fh:
        for k, v in config_items(cfg):
            fh.write(f"{k} = {v!r}\n" if isinstance(v, float) else f"{k} = {v}\n")
