"""Run configuration, result records and CSV/JSON emission."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .disk import DEFAULT_ANGULAR_ORDER, DEFAULT_RADIAL_COUNT, MIN_RADIAL_COUNT
from .errors import ConfigurationError

CONFIG_ENV_VAR = "WPCURV_CONFIG"
DEFAULT_CONFIG_FILE = "wpcurv.cfg"

_KEYS = {
    "radial_count": int,
    "angular_order": int,
    "solver_tol": float,
    "report_rtol": float,
    "cache_dir": str,
    "output": str,
    "backend": str,
}


@dataclass
class RunConfig:
    radial_count: int = DEFAULT_RADIAL_COUNT
    angular_order: int = DEFAULT_ANGULAR_ORDER
    solver_tol: float = 1e-10
    report_rtol: float = 1e-6
    cache_dir: str = ""
    output: str = "csv"
    backend: str = "mode_bvp"

    def validate(self):
        if self.radial_count < 2 * MIN_RADIAL_COUNT:
            raise ConfigurationError(f"radial_count must be >= {2 * MIN_RADIAL_COUNT}")
        if self.angular_order < 0:
            raise ConfigurationError("angular_order must be >= 0")
        if not (self.solver_tol > 0 and self.report_rtol > 0):
            raise ConfigurationError("tolerances must be positive")
        if self.output not in ("csv", "json"):
            raise ConfigurationError("output must be 'csv' or 'json'")
        if self.backend not in ("mode_bvp", "kernel_convolution"):
            raise ConfigurationError(f"unknown backend {self.backend!r}")
        return self

    def numerics(self) -> dict:
        return {
            "grid": {"radial_count": self.radial_count, "angular_order": self.angular_order},
            "tolerances": {"solver": self.solver_tol, "report_rtol": self.report_rtol},
            "backend": self.backend,
        }

    @property
    def digest(self) -> str:
        """Stable hash of grid + tolerances + backend (not output or paths)."""
        blob = json.dumps(self.numerics(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def as_dict(self) -> dict:
        return {**asdict(self), "digest": self.digest}


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigurationError(f"config line {lineno}: unknown key {key!r}")
        try:
            out[key] = _KEYS[key](value)
        except ValueError as exc:
            raise ConfigurationError(f"config line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config_file(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"))


def resolve_config(config_path=None, overrides=None, environ=None) -> RunConfig:
    """Merge defaults, config file, command-line overrides and the env-var file.

    Precedence, lowest first: built-in defaults, the file named by
    ``config_path`` (or ``./wpcurv.cfg`` if present), explicit command-line
    values, then the file named by ``$WPCURV_CONFIG``.
    """
    environ = os.environ if environ is None else environ
    values = {}
    if config_path:
        values.update(load_config_file(config_path))
    elif Path(DEFAULT_CONFIG_FILE).exists():
        values.update(load_config_file(DEFAULT_CONFIG_FILE))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    env_path = environ.get(CONFIG_ENV_VAR)
    if env_path:
        values.update(load_config_file(env_path))
    return RunConfig(**values).validate()


@dataclass
class ResultRecord:
    command: str
    parameters: dict
    values: list
    config: RunConfig
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @property
    def config_digest(self) -> str:
        return self.config.digest

    def rows(self) -> list[dict]:
        rows = []
        for v in self.values:
            row = v.as_dict() if hasattr(v, "as_dict") else dict(v)
            if "est_error" not in row:
                raise ValueError(f"result row without est_error: {row}")
            rows.append(row)
        return rows

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "params": self.parameters,
            "results": self.rows(),
            "config": self.config.as_dict(),
            "timestamp": self.timestamp,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        rows = [_flatten(r) for r in self.rows()]
        lead = ["index", "value", "est_error"]
        extra = sorted({k for r in rows for k in r} - set(lead))
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=lead + extra, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _csv_cell(v) for k, v in r.items()})
        return buf.getvalue()

    def render(self, fmt=None) -> str:
        fmt = fmt or self.config.output
        return self.to_json() if fmt == "json" else self.to_csv()


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            for kk, vv in v.items():
                out[f"{k}.{kk}"] = vv
        else:
            out[k] = v
    if "index" not in out and "indices" in out:
        out["index"] = "-".join(str(i) for i in out.pop("indices"))
    return out


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "-".join(str(x) for x in v)
    return v


def write_atomic(path, text: str):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
