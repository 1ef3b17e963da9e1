"""Run configuration: INI files with per-subcommand sections plus CLI overrides.

A config file looks like:

    [common]
    orders = 0.9, 0.9
    init = 0.1, 0.1
    horizon = 100
    steps = 10000

    [solve]
    system = lcr
    f = 0.1
    out = run.csv

Values in [common] apply to every subcommand; the section named after the
subcommand refines them; CLI flags override both.  Expression values may be
quoted ("..." or '...'); the loader strips one matching pair.
"""

from __future__ import annotations

import configparser
import dataclasses
import logging
from dataclasses import dataclass

from .errors import ConfigError

log = logging.getLogger("fracsim")

COMMANDS = ("solve", "verify", "bench", "bifurcate", "precision")


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Resolved settings for one subcommand invocation.

    String-ish fields keep their raw text here; structures that need other
    fields to interpret (init needs orders) are parsed by the consumers.
    """

    command: str = "solve"
    system: str = "lcr"
    rhs: tuple[str, ...] | None = None
    sigma: float = 1.015
    f: float = 0.0
    omega: float = 0.55
    a: float = -1.02
    b: float = -0.58
    lam: float = -1.0
    orders: tuple[float, ...] | None = None
    init: str | None = None
    horizon: float | None = None
    steps: int | None = None
    precision: str = "f64"
    workers: int = 1
    mode: str = "balanced"
    out: str | None = None
    stats_out: str | None = None
    stride: int = 1
    seeds: str | None = None
    f_start: float | None = None
    f_end: float | None = None
    f_count: int | None = None
    transient_frac: float = 0.5
    threshold: float = 0.3
    strobe_phase: float = 0.0
    repeats: int = 3
    steps_list: tuple[int, ...] | None = None
    workers_list: tuple[int, ...] | None = None
    widths: tuple[str, str] = ("f64", "extended")
    div_threshold: float | None = None

    def require(self, field: str):
        value = getattr(self, field)
        if value is None:
            raise ConfigError("missing required field", field=field)
        return value


def _strip_quotes(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_mode(text: str) -> str:
    token = text.strip()
    if token == "static":
        return "static_block"
    return token


def _parse_orders(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(part, 10) for part in text.replace(",", " ").split())


def _parse_rhs(text: str) -> tuple[str, ...]:
    return tuple(_strip_quotes(part) for part in text.split(";") if part.strip())


def _parse_widths(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _parse_str(text: str) -> str:
    return _strip_quotes(text)


# key -> (converter, RunConfig field)
_KEYS = {
    "system": (_parse_str, "system"),
    "rhs": (_parse_rhs, "rhs"),
    "sigma": (_parse_float, "sigma"),
    "f": (_parse_float, "f"),
    "omega": (_parse_float, "omega"),
    "a": (_parse_float, "a"),
    "b": (_parse_float, "b"),
    "lambda": (_parse_float, "lam"),
    "orders": (_parse_orders, "orders"),
    "init": (_parse_str, "init"),
    "horizon": (_parse_float, "horizon"),
    "steps": (_parse_int, "steps"),
    "precision": (_parse_str, "precision"),
    "workers": (_parse_int, "workers"),
    "mode": (_parse_mode, "mode"),
    "out": (_parse_str, "out"),
    "stats_out": (_parse_str, "stats_out"),
    "stride": (_parse_int, "stride"),
    "seeds": (_parse_str, "seeds"),
    "f_start": (_parse_float, "f_start"),
    "f_end": (_parse_float, "f_end"),
    "f_count": (_parse_int, "f_count"),
    "transient_frac": (_parse_float, "transient_frac"),
    "threshold": (_parse_float, "threshold"),
    "strobe_phase": (_parse_float, "strobe_phase"),
    "repeats": (_parse_int, "repeats"),
    "steps_list": (_parse_ints, "steps_list"),
    "workers_list": (_parse_ints, "workers_list"),
    "widths": (_parse_widths, "widths"),
    "div_threshold": (_parse_float, "div_threshold"),
}

# CLI flags arrive pre-typed; accept their values as-is for these fields.
_FIELDS = {field for _, field in _KEYS.values()}


def _apply(updates: dict, key: str, raw, source: str | None) -> None:
    """Convert one raw value and stage it, wrapping converter failures."""
    spec = _KEYS.get(key)
    if spec is None:
        raise ConfigError("unknown configuration key", source=source, field=key)
    convert, field = spec
    if isinstance(raw, str):
        try:
            updates[field] = convert(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(
                f"cannot parse value {raw!r}: {exc}", source=source, field=key
            ) from exc
    else:
        updates[field] = raw


def load_config(
    path: str | None,
    overrides: dict | None = None,
    command: str = "solve",
) -> RunConfig:
    """Merge file values and overrides into a RunConfig, then echo it.

    Precedence: [common] section, then the [<command>] section, then
    ``overrides`` (CLI flags keyed by configuration key name).  The full
    resolved configuration is echoed to the package log, one line per call.

    Raises:
        ConfigError: unreadable/unparseable file (message carries the line),
            unknown section/key, or an unconvertible value.
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown subcommand {command!r}")
    updates: dict = {"command": command}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", source=str(path)) from exc
        except configparser.Error as exc:
            raise ConfigError(f"parse error: {exc}", source=str(path)) from exc
        known_sections = {"common", *COMMANDS}
        for section in parser.sections():
            if section not in known_sections:
                raise ConfigError(
                    f"unknown section [{section}]; expected [common] or a subcommand section",
                    source=str(path),
                )
        for section in ("common", command):
            if parser.has_section(section):
                for key, raw in parser.items(section):
                    _apply(updates, key, raw, str(path))
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        _apply(updates, key, raw, None)

    try:
        cfg = RunConfig(**updates)
    except TypeError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc

    echo = "; ".join(
        f"{field.name}={getattr(cfg, field.name)!r}"
        for field in dataclasses.fields(RunConfig)
    )
    log.info("resolved config: %s", echo)
    return cfg


def parse_init(cfg: RunConfig, orders: tuple[float, ...]) -> tuple[tuple[float, ...], ...]:
    """Interpret the init text against the component orders.

    Semicolons separate components; commas separate the derivatives of one
    component.  Without semicolons: one value per component, or for a single
    component its full derivative list.

    Raises:
        ConfigError: missing init, or a shape that needs the ';' form.
    """
    from .problem import order_depth

    text = cfg.require("init")
    dim = len(orders)
    depths = [order_depth(a) for a in orders]
    try:
        if ";" in text:
            parts = [p for p in text.split(";") if p.strip()]
            entries = tuple(
                tuple(float(v) for v in part.split(",") if v.strip()) for part in parts
            )
        else:
            values = [float(v) for v in text.split(",") if v.strip()]
            if dim == 1:
                entries = (tuple(values),)
            else:
                if any(depth > 1 for depth in depths) and len(values) == dim:
                    raise ConfigError(
                        "components with order > 1 need the ';' form: "
                        "'y0,y0p; y0' lists each component's derivatives",
                        field="init",
                    )
                entries = tuple((v,) for v in values)
    except ValueError as exc:
        raise ConfigError(f"cannot parse init {text!r}: {exc}", field="init") from exc
    return entries


def parse_seeds(text: str) -> tuple[tuple[float, ...], ...]:
    """'x,y; x,y' -> one flat state per semicolon-separated group."""
    try:
        groups = [g for g in text.split(";") if g.strip()]
        return tuple(
            tuple(float(v) for v in g.split(",") if v.strip()) for g in groups
        )
    except ValueError as exc:
        raise ConfigError(f"cannot parse seeds {text!r}: {exc}", field="seeds") from exc
