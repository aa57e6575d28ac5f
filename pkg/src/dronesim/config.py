"""Key-value configuration files.

Format: one `key = value` pair per line, `#` starts a comment, blank lines
ignored. Speeds may be given either as v_mps or v_kmh (exactly one).
Unknown keys are errors so that typos cannot silently fall back to defaults.
"""

import math

from .params import NetworkParams, db_to_linear

DEFAULTS = {
    "lambda0": 1e-6,
    "h_m": 100.0,
    "v_mps": 12.5,
    "alpha": 3.0,
    "p_tx_db": 0.0,
    "p_edge": 0.05,
    "r_d_m": 100_000.0,
}

_KNOWN_KEYS = set(DEFAULTS) | {"v_kmh", "n0_watts"}


class ConfigError(ValueError):
    """Raised for malformed text, unknown keys, or out-of-range values."""


def parse_config(text, overrides=None):
    """Parse config text into NetworkParams.

    overrides, when given, is applied after the file (CLI flags win).
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            raw[key] = float(value.strip())
        except ValueError:
            raise ConfigError(f"line {lineno}: value for {key!r} is not a number") from None

    if overrides:
        for key, value in overrides.items():
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"unknown override key {key!r}")
            raw[key] = float(value)

    if "v_kmh" in raw and "v_mps" in raw:
        raise ConfigError("give v_mps or v_kmh, not both")
    if "v_kmh" in raw:
        raw["v_mps"] = raw.pop("v_kmh") / 3.6

    merged = dict(DEFAULTS)
    n0 = raw.pop("n0_watts", None)
    merged.update(raw)

    for key, value in merged.items():
        if not math.isfinite(value):
            raise ConfigError(f"{key} must be finite")

    try:
        return NetworkParams(
            lambda0=merged["lambda0"],
            h=merged["h_m"],
            v=merged["v_mps"],
            alpha=merged["alpha"],
            p=db_to_linear(merged["p_tx_db"]),
            n0=n0,
            r_d=merged["r_d_m"],
            p_edge=merged["p_edge"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, overrides=None):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


def config_lines(params):
    """Render params back to config format, used for the CSV echo headers."""
    lines = [
        f"lambda0 = {params.lambda0!r}",
        f"h_m = {params.h!r}",
        f"v_mps = {params.v!r}",
        f"alpha = {params.alpha!r}",
        f"p_tx_db = {10.0 * math.log10(params.p)!r}",
        f"p_edge = {params.p_edge!r}",
        f"r_d_m = {params.r_d!r}",
        f"n0_watts = {params.n0!r}",
    ]
    return lines
