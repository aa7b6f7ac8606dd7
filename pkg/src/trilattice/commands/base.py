"""Shared plumbing for subcommands: results, summaries and manifests."""

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..config import RunConfig
from ..model.lattice import LatticeDomain, LatticeSpec, build_domain
from ..utils.paths import Timer, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_FAILURE = 4


@dataclass
class CommandResult:
    """Printed summary, written files and exit code of one command."""
    text: str
    outputs: list[Path] = field(default_factory=list)
    exit_code: int = EXIT_OK


def build_config_domain(config: RunConfig, epsilon: float | None = None) -> LatticeDomain:
    eps = config.lattice.epsilon if epsilon is None else epsilon
    return build_domain(LatticeSpec(eps, config.polygon()))


def write_summary(path: Path, summary: dict) -> Path:
    """``<output>.summary.json`` with sorted keys."""
    target = path.with_name(path.name + ".summary.json")
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target


def finish(
    config: RunConfig,
    command: str,
    outputs: list[Path],
    timer: Timer,
    extra: dict | None = None,
) -> list[Path]:
    """Write one manifest per output unless disabled; returns all written paths."""
    written = list(outputs)
    if config.output.manifest:
        for out in outputs:
            info = {"seed": config.seed, **(extra or {})}
            written.append(write_manifest(out, command, config.source, timer.timings, info))
    return written
