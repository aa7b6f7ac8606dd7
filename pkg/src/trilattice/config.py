"""Run configuration: YAML documents validated by pydantic models.

A configuration file looks like::

    lattice:
      epsilon: 0.015625
      gamma: 0.5
      domain: hexagon.txt      # polygon file; omit for a regular polygon
    potentials: {name: quadratic, alpha1: 2.0, alpha2: 2.0}
    rotation: 0.0
    dislocations:
      - {x: 0.0, y: 0.0, b1: 1, b2: 0, theta: 0.0}
    far_field:
      matrix: [[0.0, 0.0], [0.0, 0.0]]
    solver: {grad_tol_factor: 1.0e-8, max_iter: 10000}
    output: {path: results.csv}

Every section is optional. Relative paths resolve against the directory of
the configuration file.
"""

import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator, model_validator

from .continuum.tensors import IsotropicTensor
from .errors import ConfigError, ConfigIssue, InvalidPolygonError
from .model.energy import linearized_tensor
from .model.lattice import read_polygon
from .model.potentials import POTENTIALS, PotentialPair, get_potentials
from .model.strain import Dislocation, DislocationMeasure
from .recovery.constructor import FarField, LinearFarField, QuadraticFarField
from .utils.geometry import regular_polygon
from .utils.paths import resolve_path

logger = logging.getLogger(__name__)


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LatticeSection(Section):
    epsilon: float = Field(1.0 / 64.0, gt=0.0)
    gamma: float = Field(0.5, gt=0.0, lt=1.0)
    domain: str | None = None
    sides: int = Field(6, ge=3)
    radius: float = Field(1.0, gt=0.0)


class PotentialSection(Section):
    name: str = "quadratic"
    alpha1: float = Field(2.0, gt=0.0)
    alpha2: float = Field(2.0, gt=0.0)

    @field_validator("name")
    @classmethod
    def _known(cls, v: str) -> str:
        if v not in POTENTIALS:
            raise ValueError(f"unknown potential {v!r}; available: {', '.join(sorted(POTENTIALS))}")
        return v


class DislocationEntry(Section):
    x: float
    y: float
    b1: int
    b2: int
    theta: float = 0.0

    @model_validator(mode="after")
    def _nonzero(self) -> "DislocationEntry":
        if self.b1 == 0 and self.b2 == 0:
            raise ValueError("Burgers vector must be nonzero")
        return self

    def to_dislocation(self) -> Dislocation:
        return Dislocation((self.x, self.y), (self.b1, self.b2), self.theta)


class FarFieldSection(Section):
    matrix: list[list[float]] = Field(default_factory=lambda: [[0.0, 0.0], [0.0, 0.0]])
    hessian: list[list[list[float]]] | None = None

    @field_validator("matrix")
    @classmethod
    def _square(cls, v):
        if np.asarray(v).shape != (2, 2):
            raise ValueError("matrix must be 2x2")
        return v

    @field_validator("hessian")
    @classmethod
    def _symmetric(cls, v):
        if v is None:
            return v
        H = np.asarray(v, dtype=float)
        if H.shape != (2, 2, 2):
            raise ValueError("hessian must have shape 2x2x2")
        if not np.allclose(H, np.swapaxes(H, 1, 2)):
            raise ValueError("hessian must be symmetric in its last two indices")
        return v


class SolverSection(Section):
    grad_tol_factor: float = Field(1e-8, gt=0.0)
    max_iter: int = Field(10000, ge=1)
    fixed_frame: bool = True
    delta: float | None = Field(None, gt=0.0)


def _default_ladder() -> list[float]:
    return [2.0**-k for k in range(5, 10)]


class ScalingSection(Section):
    epsilons: list[float] = Field(default_factory=_default_ladder, min_length=1)
    minimize: bool = True

    @field_validator("epsilons")
    @classmethod
    def _positive(cls, v):
        if any(not e > 0.0 for e in v):
            raise ValueError("every epsilon must be positive")
        return v


class SelfEnergySection(Section):
    burgers: tuple[int, int] = (1, 0)
    modes: int = Field(8, ge=2)
    annulus: tuple[float, float] | None = None
    search_bound: float | None = Field(None, gt=0.0)

    @field_validator("annulus")
    @classmethod
    def _ordered(cls, v):
        if v is not None and not 0.0 < v[0] < v[1]:
            raise ValueError("annulus radii must satisfy 0 < r1 < r2")
        return v


class PsiStudySection(Section):
    burgers: tuple[int, int] = (1, 0)
    ratios: list[float] = Field(default_factory=lambda: [10.0, 100.0, 1000.0], min_length=1)
    points_per_decade: int = Field(64, ge=2)
    modes: int = Field(4, ge=1)

    @field_validator("ratios")
    @classmethod
    def _increasing(cls, v):
        if v[0] <= 1.0 or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("ratios must be increasing and greater than 1")
        return v


class ThinAnnulusSection(Section):
    M: float = Field(4.0, gt=1.0)
    epsilons: list[float] = Field(default_factory=lambda: [2.0**-k for k in range(4, 9)], min_length=1)


class OutputSection(Section):
    path: str | None = None
    svg: str | None = None
    state: str | None = None
    manifest: bool = True


class RunConfig(Section):
    """Validated run configuration."""
    rotation: float = 0.0
    seed: int = 0
    lattice: LatticeSection = Field(default_factory=LatticeSection)
    potentials: PotentialSection = Field(default_factory=PotentialSection)
    dislocations: list[DislocationEntry] = Field(default_factory=list)
    far_field: FarFieldSection = Field(default_factory=FarFieldSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    scaling: ScalingSection = Field(default_factory=ScalingSection)
    selfenergy: SelfEnergySection = Field(default_factory=SelfEnergySection)
    psi_study: PsiStudySection = Field(default_factory=PsiStudySection)
    thin_annulus: ThinAnnulusSection = Field(default_factory=ThinAnnulusSection)
    output: OutputSection = Field(default_factory=OutputSection)

    _base_dir: Path = PrivateAttr(default_factory=Path.cwd)
    _source: Path | None = PrivateAttr(default=None)

    @property
    def base_dir(self) -> Path:
        return self._base_dir

    @property
    def source(self) -> Path | None:
        return self._source

    def resolve(self, path: str | Path) -> Path:
        return resolve_path(path, self._base_dir)

    def polygon(self) -> np.ndarray:
        if self.lattice.domain is not None:
            return read_polygon(self.resolve(self.lattice.domain))
        return regular_polygon(self.lattice.sides, self.lattice.radius)

    def layout(self) -> tuple[Dislocation, ...]:
        return tuple(d.to_dislocation() for d in self.dislocations)

    def measure(self, epsilon: float | None = None) -> DislocationMeasure:
        eps = self.lattice.epsilon if epsilon is None else epsilon
        return DislocationMeasure(self.layout(), eps, self.lattice.gamma)

    def potential_pair(self) -> PotentialPair:
        p = self.potentials
        return get_potentials(p.name, p.alpha1, p.alpha2)

    def tensor(self) -> IsotropicTensor:
        return linearized_tensor(self.potential_pair())

    def far_field_model(self) -> FarField:
        M = np.asarray(self.far_field.matrix, dtype=float)
        if self.far_field.hessian is None:
            return LinearFarField(M)
        return QuadraticFarField(M, np.asarray(self.far_field.hessian, dtype=float))

    def output_path(self, default: str) -> Path:
        return self.resolve(self.output.path or default)


def _set_dotted(data: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        child = node.get(key)
        if not isinstance(child, dict):
            child = {}
            node[key] = child
        node = child
    node[keys[-1]] = value


def _node_line(root: yaml.Node | None, loc: tuple) -> int | None:
    """1-based line of the deepest YAML node reached along a pydantic error location."""
    node = root
    line = node.start_mark.line + 1 if node is not None else None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            match = node.value[key]
        else:
            match = None
        if match is None:
            break
        node = match
        line = node.start_mark.line + 1
    return line


def _load(path: Path) -> tuple[dict, yaml.Node | None]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([ConfigIssue("<file>", f"cannot read {path}: {e}", kind="IOError")]) from e
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError([ConfigIssue("<file>", str(e).splitlines()[0], line, "SyntaxError")]) from e
    if data is None:
        return {}, root
    if not isinstance(data, dict):
        raise ConfigError([ConfigIssue("<root>", "configuration must be a mapping", 1)])
    return data, root


def _separation_issues(config: RunConfig, polygon: np.ndarray, epsilon: float, root) -> list[ConfigIssue]:
    mu = config.measure(epsilon)
    pairs, boundary = mu.separation_issues(polygon)
    issues = []
    for a, b, d in pairs:
        issues.append(ConfigIssue(
            f"dislocations[{b}]",
            f"dislocations {a} and {b} are {d:.6g} apart at epsilon={epsilon:g}, "
            f"need at least 4*eps^gamma = {4 * epsilon**mu.gamma:.6g}",
            _node_line(root, ("dislocations", b)),
            "SeparationViolation",
        ))
    for n, d in boundary:
        issues.append(ConfigIssue(
            f"dislocations[{n}]",
            f"dislocation {n} is {d:.6g} from the boundary at epsilon={epsilon:g}, "
            f"need at least 2*eps^gamma = {2 * epsilon**mu.gamma:.6g}",
            _node_line(root, ("dislocations", n)),
            "SeparationViolation",
        ))
    return issues


def parse_config(
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
    check_ladder: bool = False,
) -> RunConfig:
    """Load, validate and semantically check a run configuration.

    Args:
        path: YAML file, or None for defaults
        overrides: dotted field paths (e.g. "lattice.epsilon") replacing file values
        check_ladder: also check the dislocation layout at every scaling epsilon

    Raises:
        ConfigError: every issue found, each with its field and line when known
    """
    if path is not None:
        path = Path(path)
        data, root = _load(path)
    else:
        data, root = {}, None
    for dotted, value in (overrides or {}).items():
        if value is not None:
            _set_dotted(data, dotted, value)

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        issues = []
        for err in e.errors():
            loc = tuple(err["loc"])
            field = ".".join(f"[{k}]" if isinstance(k, int) else str(k) for k in loc).replace(".[", "[")
            issues.append(ConfigIssue(field or "<root>", err["msg"], _node_line(root, loc), err["type"]))
        raise ConfigError(issues) from None

    if path is not None:
        config._base_dir = path.resolve().parent
        config._source = path.resolve()

    issues: list[ConfigIssue] = []
    try:
        polygon = config.polygon()
    except InvalidPolygonError as e:
        issues.append(ConfigIssue("lattice.domain", str(e), _node_line(root, ("lattice", "domain")), "InvalidPolygonError"))
        polygon = None
    if polygon is not None:
        ladder = [config.lattice.epsilon]
        if check_ladder:
            ladder += [e for e in config.scaling.epsilons if not math.isclose(e, config.lattice.epsilon)]
        for eps in ladder:
            issues += _separation_issues(config, polygon, eps, root)
    if issues:
        raise ConfigError(issues)
    logger.debug("Parsed configuration %s", path)
    return config
