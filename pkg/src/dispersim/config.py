"""Flat key-value experiment configs, CSV output, and run manifests.

Config files are UTF-8 text, one `key = value` per line, `#` comments,
with optional `[section]` headers named after subcommands.  Keys outside
any section apply to every subcommand; a section overrides them.  No
nesting: list-valued keys are space-separated scalars on one line.

Manifests echo the effective config under `[config]` (so a manifest
re-parses to an equivalent config) and put run metadata and diagnostics
under `[run]`.  CSV files start with a schema comment line, then a header
row; all floats are serialized with 17 significant digits.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import ConfigError

SCHEMA_PREFIX = "# schema: "


def fmt17(value) -> str:
    """Serialize a number with 17 significant digits (floats round-trip exactly)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def parse_config_text(text: str, source: str = "<config>") -> dict[str, dict[str, str]]:
    """Parse sectioned flat key-value text; duplicate keys in a section are an error."""
    sections: dict[str, dict[str, str]] = {"": {}}
    current = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}", source=source)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key", source=source)
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key", source=source, key=key)
        sections[current][key] = value.strip()
    return sections


def load_config(path: str | Path, section: str = "") -> "Config":
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", source=str(path)) from exc
    sections = parse_config_text(text, source=str(path))
    data = dict(sections[""])
    if section and section in sections:
        data.update(sections[section])
    return Config(data, source=str(path))


class Config:
    """Typed access to one subcommand's flat key-value mapping."""

    def __init__(self, data: dict[str, str], source: str = "<config>"):
        self.data = dict(data)
        self.source = source
        self._used: set[str] = set()

    def __eq__(self, other):
        return isinstance(other, Config) and self.data == other.data

    def has(self, key: str) -> bool:
        return key in self.data

    def _raw(self, key: str, default=None, required: bool = False) -> str | None:
        if key in self.data:
            self._used.add(key)
            return self.data[key]
        if required:
            raise ConfigError("missing required key", source=self.source, key=key)
        return default

    def get_str(self, key: str, default: str | None = None, required: bool = False) -> str | None:
        return self._raw(key, default, required)

    def get_choice(self, key: str, choices, default: str | None = None) -> str:
        raw = self._raw(key, default, required=default is None)
        if raw not in choices:
            raise ConfigError(f"expected one of {sorted(choices)}, got {raw!r}",
                              source=self.source, key=key)
        return raw

    def get_float(self, key: str, default: float | None = None, required: bool = False) -> float:
        raw = self._raw(key, None, required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"expected a number, got {raw!r}", source=self.source, key=key) from exc

    def get_int(self, key: str, default: int | None = None, required: bool = False) -> int:
        raw = self._raw(key, None, required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"expected an integer, got {raw!r}", source=self.source, key=key) from exc

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self._raw(key, None)
        if raw is None:
            return default
        if raw.lower() in ("true", "yes", "1", "on"):
            return True
        if raw.lower() in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}", source=self.source, key=key)

    def get_floats(self, key: str, default=None, required: bool = False) -> list[float]:
        raw = self._raw(key, None, required)
        if raw is None:
            return list(default) if default is not None else []
        if raw == "":
            return []
        try:
            return [float(tok) for tok in raw.split()]
        except ValueError as exc:
            raise ConfigError(f"expected space-separated numbers, got {raw!r}",
                              source=self.source, key=key) from exc

    def get_ints(self, key: str, default=None, required: bool = False) -> list[int]:
        raw = self._raw(key, None, required)
        if raw is None:
            return list(default) if default is not None else []
        try:
            return [int(tok) for tok in raw.split()]
        except ValueError as exc:
            raise ConfigError(f"expected space-separated integers, got {raw!r}",
                              source=self.source, key=key) from exc

    def get_matrix(self, key: str, required: bool = False) -> np.ndarray | None:
        """Rows separated by ';', entries by spaces: '1 0; 0 1'."""
        raw = self._raw(key, None, required)
        if raw is None:
            return None
        try:
            rows = [[float(tok) for tok in row.split()] for row in raw.split(";")]
            mat = np.array(rows, dtype=float)
        except ValueError as exc:
            raise ConfigError(f"expected 'a b; c d' matrix rows, got {raw!r}",
                              source=self.source, key=key) from exc
        if mat.ndim != 2:
            raise ConfigError("matrix rows have inconsistent lengths", source=self.source, key=key)
        return mat

    def get_time_grid(self, prefix: str = "t") -> np.ndarray:
        """Either '<prefix>_values', or <prefix>_min/_max/_count with linear|log spacing."""
        values_key = f"{prefix}_values"
        if self.has(values_key):
            grid = np.array(self.get_floats(values_key, required=True))
        else:
            t_min = self.get_float(f"{prefix}_min", required=True)
            t_max = self.get_float(f"{prefix}_max", required=True)
            count = self.get_int(f"{prefix}_count", required=True)
            spacing = self.get_choice(f"{prefix}_spacing", ("linear", "log"), default="linear")
            if count < 1:
                raise ConfigError("grid count must be >= 1", source=self.source, key=f"{prefix}_count")
            if spacing == "log":
                if t_min <= 0:
                    raise ConfigError("log spacing needs positive endpoints",
                                      source=self.source, key=f"{prefix}_min")
                grid = np.geomspace(t_min, t_max, count)
            else:
                grid = np.linspace(t_min, t_max, count)
        if grid.size == 0:
            raise ConfigError("time grid is empty", source=self.source, key=values_key)
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise ConfigError("time grid must be strictly increasing", source=self.source, key=values_key)
        return grid


def write_csv(path: str | Path, schema: str, columns: list[str], rows,
              schema_tokens: dict[str, str] | None = None) -> Path:
    """Write a schema-tagged CSV (comment line + header + 17-significant-digit rows)."""
    path = Path(path)
    tokens = "".join(f" {k}={v}" for k, v in (schema_tokens or {}).items())
    lines = [f"{SCHEMA_PREFIX}{schema}{tokens}", ",".join(columns)]
    for row in rows:
        cells = []
        for cell in row:
            cells.append(cell if isinstance(cell, str) else fmt17(cell))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv(path: str | Path) -> tuple[str, dict[str, str], list[str], list[list[str]]]:
    """Return (schema, schema tokens, columns, raw rows) of a schema-tagged CSV."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(SCHEMA_PREFIX):
        raise ConfigError("not a dispersim CSV (missing schema comment line)", source=str(path))
    head = lines[0][len(SCHEMA_PREFIX):].split()
    schema = head[0] if head else ""
    tokens = dict(tok.split("=", 1) for tok in head[1:] if "=" in tok)
    if len(lines) < 2:
        raise ConfigError("CSV has no header row", source=str(path))
    columns = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:]]
    return schema, tokens, columns, rows


def write_manifest(path: str | Path, config_data: dict[str, str], run_info: dict[str, str],
                   flags: list[str]) -> Path:
    path = Path(path)
    lines = ["[config]"]
    for key in sorted(config_data):
        lines.append(f"{key} = {config_data[key]}")
    lines.append("")
    lines.append("[run]")
    for key, value in run_info.items():
        lines.append(f"{key} = {value}")
    for i, flag in enumerate(flags):
        lines.append(f"flag.{i} = {flag}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
