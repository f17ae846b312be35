"""
JSON instance files: schema records, loading with exit-coded errors and
re-emission for round trips.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

from sqlmodel import Field, SQLModel

from robust_newsvendor.core.knapsack import Instance, Item
from robust_newsvendor.core.moments import MomentSpec, validate_moment_spec
from robust_newsvendor.core.single_item import ItemEconomics
from robust_newsvendor.errors import InstanceFileError
from robust_newsvendor.evaluation.ground_truth import GroundTruthDistribution
from robust_newsvendor.logger import logger


SCHEMA_VERSION = "1"


class GroundTruthRecord(SQLModel):
    family: str
    a: Optional[float] = None
    b: Optional[float] = None
    k: Optional[float] = None
    lam: Optional[float] = None
    mode: Optional[float] = None
    points: Optional[List[float]] = None
    probs: Optional[List[float]] = None


class ItemRecord(SQLModel):
    c: float = Field(default=1.0, gt=0)
    m: float = Field(gt=0)
    d: float = Field(gt=0)
    a: float
    mu: float
    b: float
    mad: float
    beta: Optional[float] = None
    sigma: Optional[float] = None
    ground_truth: Optional[GroundTruthRecord] = None


class YieldRecord(SQLModel):
    a: float
    mu: float
    b: float
    mad: float
    beta: Optional[float] = None


class ConstraintRecord(SQLModel):
    weights: List[float]
    budget: float = Field(ge=0)


class OptionsRecord(SQLModel):
    seed: Optional[int] = None
    grid_points: Optional[int] = Field(default=None, ge=2)
    gamma: Optional[float] = Field(default=None, ge=0, lt=1)
    yields: Optional[List[YieldRecord]] = None
    extra_constraints: Optional[List[ConstraintRecord]] = None


class InstanceFile(SQLModel):
    version: str = SCHEMA_VERSION
    items: List[ItemRecord]
    budget: Optional[float] = Field(default=None, ge=0)
    budget_grid: Optional[List[float]] = None
    options: OptionsRecord = Field(default_factory=OptionsRecord)


@dataclass
class LoadedInstance:
    record: InstanceFile
    instance: Instance
    ground_truths: List[Optional[GroundTruthDistribution]]
    yields: Optional[List[MomentSpec]] = None
    notes: List[str] = field(default_factory=list)

    @property
    def has_ground_truths(self) -> bool:
        return all(g is not None for g in self.ground_truths)


def _ground_truth(rec: GroundTruthRecord) -> GroundTruthDistribution:
    family = rec.family.lower()
    if family == "uniform":
        return GroundTruthDistribution.uniform(rec.a, rec.b)
    if family == "beta":
        a = rec.a if rec.a is not None else 0.0
        b = rec.b if rec.b is not None else 1.0
        return GroundTruthDistribution.beta(rec.k, rec.lam, a, b)
    if family == "triangular":
        return GroundTruthDistribution.triangular(rec.a, rec.b, rec.mode)
    if family == "discrete":
        return GroundTruthDistribution.discrete(rec.points or [], rec.probs or [])
    raise ValueError(f"unknown ground-truth family: {rec.family}")


def parse_instance(text: str, source: str = "<string>", require_beta: bool = False) -> LoadedInstance:
    """
    Validate instance JSON.

    Raises:
        InstanceFileError: exit code 2 on malformed JSON, 3 on schema errors,
            4 on infeasible moments
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFileError(f"{source}: not valid JSON: {e}", InstanceFileError.PARSE) from e

    try:
        record = InstanceFile.model_validate(data)
    except ValueError as e:
        raise InstanceFileError(f"{source}: schema error: {e}", InstanceFileError.SCHEMA) from e
    if record.version != SCHEMA_VERSION:
        raise InstanceFileError(f"{source}: unsupported version {record.version!r}", InstanceFileError.SCHEMA)

    violations, notes = [], []
    items, truths = [], []
    for i, rec in enumerate(record.items):
        if require_beta and rec.beta is None:
            raise InstanceFileError(f"{source}: item {i}: beta required for lower bound", InstanceFileError.SCHEMA)
        spec = MomentSpec(rec.a, rec.mu, rec.b, rec.mad, rec.beta, rec.sigma)
        report = validate_moment_spec(spec)
        violations.extend(f"item {i}: {v}" for v in report.violations)
        notes.extend(f"item {i}: {n}" for n in report.notes)
        items.append(Item(ItemEconomics(rec.m, rec.d, rec.c), spec))
        try:
            truths.append(_ground_truth(rec.ground_truth) if rec.ground_truth else None)
        except (ValueError, TypeError) as e:
            raise InstanceFileError(f"{source}: item {i}: ground truth: {e}", InstanceFileError.SCHEMA) from e

    yields = None
    if record.options.yields is not None:
        if len(record.options.yields) != len(items):
            raise InstanceFileError(f"{source}: one yield spec per item is required", InstanceFileError.SCHEMA)
        yields = []
        for i, y in enumerate(record.options.yields):
            spec = MomentSpec(y.a, y.mu, y.b, y.mad, y.beta)
            report = validate_moment_spec(spec)
            violations.extend(f"item {i} yield: {v}" for v in report.violations)
            if y.a < 0 or y.b > 1:
                violations.append(f"item {i} yield: support must lie in [0, 1]")
            yields.append(spec)

    for k, con in enumerate(record.options.extra_constraints or []):
        if len(con.weights) != len(items):
            raise InstanceFileError(f"{source}: constraint {k} needs {len(items)} weights", InstanceFileError.SCHEMA)

    if violations:
        raise InstanceFileError(f"{source}: infeasible moments: " + "; ".join(violations), InstanceFileError.MOMENTS)
    for note in notes:
        logger.warning(note)

    instance = Instance(tuple(items), record.budget or 0.0)
    return LoadedInstance(record, instance, truths, yields, notes)


def load_instance(path: Union[str, Path], require_beta: bool = False) -> LoadedInstance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceFileError(f"{path}: cannot read: {e}", InstanceFileError.PARSE) from e
    return parse_instance(text, str(path), require_beta)


def dump_instance(record: InstanceFile) -> str:
    return record.model_dump_json(indent=2, exclude_none=True)
