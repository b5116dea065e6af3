"""Key-value config files and the scenario file format.

Format: one ``key = value`` per line, ``#`` starts a comment, keys may use
dashes or underscores.  Repeated keys accumulate (used by ``implant``).
A JSON run manifest is also accepted wherever a config file is; its
``config`` section is used.
"""

from __future__ import annotations

import json
from pathlib import Path

from .synth import ImplantSpec, ScenarioConfig, ScenarioError, Strategy


class ConfigFileError(ValueError):
    pass


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def norm_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def parse_kv_lines(lines) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigFileError(f"line {lineno}: expected 'key = value'")
        out.setdefault(norm_key(key), []).append(value.strip())
    return out


def _stringify(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    if value is None:
        return ""
    return str(value)


def load_config(path) -> dict[str, list[str]]:
    """Read a key-value file or a JSON manifest into ``{key: [values]}``."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigFileError(f"{path}: invalid JSON ({exc.msg})") from None
        section = data.get("config", data)
        return {norm_key(k): [_stringify(v)] for k, v in section.items() if v is not None}
    return parse_kv_lines(text.splitlines())


def parse_implant(text: str) -> ImplantSpec:
    """``boost group_size=5 events=10 within_window_seconds=300 [target=acct]``"""
    parts = text.split()
    if not parts:
        raise ConfigFileError("implant: empty specification")
    try:
        strategy = Strategy(parts[0].lower())
    except ValueError:
        valid = ", ".join(s.value for s in Strategy)
        raise ConfigFileError(f"implant: unknown strategy {parts[0]!r} (valid: {valid})") from None
    fields: dict = {}
    for item in parts[1:]:
        key, sep, value = item.partition("=")
        key = norm_key(key)
        if not sep:
            raise ConfigFileError(f"implant: expected key=value, got {item!r}")
        if key in ("group_size", "events", "within_window_seconds"):
            try:
                fields[key] = int(value)
            except ValueError:
                raise ConfigFileError(f"implant: {key} must be an integer") from None
        elif key == "target":
            fields[key] = value
        else:
            raise ConfigFileError(f"implant: unknown field {key!r}")
    for key in ("group_size", "events"):
        if key not in fields:
            raise ConfigFileError(f"implant: missing {key}")
    return ImplantSpec(strategy, **fields)


_SCENARIO_FIELDS = {
    "seed": int,
    "duration_days": int,
    "background_accounts": int,
    "background_rate": float,
    "gamma_minutes": int,
    "start": int,
    "straddle": parse_bool,
    "implant_background": parse_bool,
    "vocab_size": int,
    "zipf_exponent": float,
}


def scenario_from_kv(kv: dict[str, list[str]]) -> ScenarioConfig:
    cfg = ScenarioConfig()
    for key, values in kv.items():
        if key == "implant":
            cfg.implants.extend(parse_implant(v) for v in values)
        elif key in _SCENARIO_FIELDS:
            try:
                setattr(cfg, key, _SCENARIO_FIELDS[key](values[-1]))
            except ValueError:
                raise ConfigFileError(f"{key}: invalid value {values[-1]!r}") from None
        else:
            raise ConfigFileError(f"unknown scenario key {key!r}")
    return cfg


def scenario_to_kv(cfg: ScenarioConfig) -> str:
    lines = [f"{k} = {_stringify(getattr(cfg, k))}" for k in _SCENARIO_FIELDS]
    for imp in cfg.implants:
        spec = (f"{imp.strategy.value} group_size={imp.group_size} events={imp.events} "
                f"within_window_seconds={imp.within_window_seconds}")
        if imp.target:
            spec += f" target={imp.target}"
        lines.append(f"implant = {spec}")
    return "\n".join(lines) + "\n"


def load_scenario(path) -> ScenarioConfig:
    cfg = scenario_from_kv(load_config(path))
    try:
        cfg.validate()
    except ScenarioError as exc:
        raise ConfigFileError(str(exc)) from None
    return cfg
