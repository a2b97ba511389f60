"""On-disk cache of essential-spectrum thresholds.

File format (``thresholds.json`` inside the cache directory)::

    {
      "format": "magwedge-threshold-cache",
      "version": 1,
      "entries": [
        {"kind": "robin", "beta": 0.0, "h": 0.002, "L": 12.0,
         "theta": 0.5901064199317649, "argmin_p": -0.768178...},
        ...
      ]
    }

Floats are written with ``repr`` precision, so a reload reproduces them
bit for bit. A file with a different ``format`` or ``version`` is ignored
and overwritten on the next save.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from filelock import FileLock

from .fiber import FiberConfig, FiberKind, FiberModel, ThresholdResult

CACHE_FORMAT = "magwedge-threshold-cache"
CACHE_VERSION = 1
CACHE_FILENAME = "thresholds.json"


def default_cache_dir() -> Path:
    env = os.environ.get("MAGWEDGE_CACHE_DIR")
    if env:
        return Path(env)
    root = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(root) / "magwedge"


def cache_key(kind, beta: float, h: float, L: float) -> tuple:
    return (FiberKind(kind).value, round(float(beta), 12), float(h), float(L))


class ThresholdCache:
    """Threshold values keyed by ``(model kind, beta rounded to 1e-12, h, L)``."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.path = self.directory / CACHE_FILENAME
        self._entries: dict[tuple, dict] = {}
        self._dirty = False
        self._load()

    def _load(self) -> None:
        try:
            raw = json.loads(self.path.read_text())
        except (OSError, ValueError):
            return
        if not isinstance(raw, dict):
            return
        if raw.get("format") != CACHE_FORMAT or raw.get("version") != CACHE_VERSION:
            return
        for rec in raw.get("entries", []):
            try:
                key = cache_key(rec["kind"], rec["beta"], rec["h"], rec["L"])
                self._entries[key] = {
                    "theta": float(rec["theta"]),
                    "argmin_p": float(rec["argmin_p"]),
                }
            except (KeyError, TypeError, ValueError):
                continue

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, model: FiberModel, cfg: FiberConfig) -> ThresholdResult | None:
        rec = self._entries.get(cache_key(model.kind, model.beta, cfg.h, cfg.L))
        if rec is None:
            return None
        return ThresholdResult(rec["theta"], rec["argmin_p"], model, cfg)

    def put(self, result: ThresholdResult) -> None:
        key = cache_key(result.model.kind, result.model.beta, result.config.h, result.config.L)
        rec = {"theta": float(result.theta), "argmin_p": float(result.argmin_p)}
        if self._entries.get(key) != rec:
            self._entries[key] = rec
            self._dirty = True

    def save(self) -> None:
        """Merge with the file on disk and write atomically under an exclusive lock."""
        if not self._dirty:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        with FileLock(str(self.path) + ".lock"):
            mine = self._entries
            self._entries = {}
            self._load()
            self._entries.update(mine)
            entries = [
                {"kind": k[0], "beta": k[1], "h": k[2], "L": k[3], **v}
                for k, v in sorted(self._entries.items())
            ]
            doc = {"format": CACHE_FORMAT, "version": CACHE_VERSION, "entries": entries}
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".thresholds.")
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, indent=1)
                fh.write("\n")
            os.replace(tmp, self.path)
        self._dirty = False
