"""Path resolution and run manifests."""

import hashlib
import json
import platform
import sys
import time
from importlib import metadata
from pathlib import Path

_LIBRARIES = ("numpy", "scipy", "matplotlib", "pydantic", "pyyaml")


def resolve_path(path: str | Path, base_dir: Path | None = None) -> Path:
    """Resolve a path from a config file against the config's directory.

    Args:
        path: absolute path, or path relative to ``base_dir``
        base_dir: directory of the config file (defaults to the working directory)

    Returns:
        The resolved path (not required to exist)
    """
    path = Path(path).expanduser()
    if path.is_absolute() or base_dir is None:
        return path
    return base_dir / path


def file_sha256(path: str | Path) -> str:
    """Hex SHA-256 of a file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest_path(output: str | Path) -> Path:
    """``<output>.manifest.json`` beside an output file."""
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def _version(name: str) -> str | None:
    try:
        return metadata.version(name)
    except metadata.PackageNotFoundError:
        return None


class Timer:
    """Named wall-clock timings for a manifest."""

    def __init__(self):
        self.timings: dict[str, float] = {}
        self._start: dict[str, float] = {}

    def start(self, name: str) -> None:
        self._start[name] = time.perf_counter()

    def stop(self, name: str) -> float:
        elapsed = time.perf_counter() - self._start.pop(name)
        self.timings[name] = self.timings.get(name, 0.0) + elapsed
        return elapsed


def write_manifest(
    output: str | Path,
    command: str,
    config_path: str | Path | None = None,
    timings: dict[str, float] | None = None,
    extra: dict | None = None,
) -> Path:
    """Write the run manifest for an output file.

    Timings are wall-clock and change between runs; the output files they
    describe do not.
    """
    from .. import __version__

    manifest = {
        "command": command,
        "output": str(output),
        "config": str(config_path) if config_path else None,
        "config_sha256": file_sha256(config_path) if config_path else None,
        "trilattice": __version__,
        "libraries": {name: _version(name) for name in _LIBRARIES},
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "timings": timings or {},
    }
    if extra:
        manifest.update(extra)
    path = manifest_path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
