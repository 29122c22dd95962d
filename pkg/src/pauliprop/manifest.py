"""Run manifests: every subcommand that writes results drops one next to its
outputs, recording the command, flags, seed, version, timing, and file digests."""

from __future__ import annotations

import hashlib
import json
import subprocess
import sys
from pathlib import Path

from . import __version__


def _digest(path: Path) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            sha.update(chunk)
    return sha.hexdigest()


def version_string() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        rev = ""
    return f"pauliprop {__version__}" + (f" ({rev})" if rev else "")


def write_manifest(
    command: str,
    params: dict,
    inputs: list,
    outputs: list,
    wall_time: float,
    seed: int | None = None,
    path=None,
) -> Path:
    """Write <first output>.manifest.json (or ``path``) and return its path."""
    outputs = [Path(p) for p in outputs]
    if path is None:
        if not outputs:
            raise ValueError("manifest needs an explicit path when there are no outputs")
        path = outputs[0].with_suffix(outputs[0].suffix + ".manifest.json")
    doc = {
        "command": command,
        "argv": sys.argv,
        "params": params,
        "seed": seed,
        "version": version_string(),
        "wall_time_s": wall_time,
        "inputs": {str(p): _digest(Path(p)) for p in inputs},
        "outputs": {str(p): _digest(p) for p in outputs},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return Path(path)
