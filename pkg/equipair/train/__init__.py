import math
from dataclasses import asdict, dataclass, field, fields

from ..core.errors import ContractViolation

BRANCHES = ("B", "A", "joint")


def _from_dict(cls, d):
    known = {f.name for f in fields(cls)}
    unknown = set(d) - known
    if unknown:
        raise ContractViolation(f"Unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**d)


@dataclass(frozen=True)
class LossConfig:
    lambda_rot: float = 1.0
    lambda_trans: float = 1.0
    symmetry_aware: bool = True

    def __post_init__(self):
        if self.lambda_rot < 0 or self.lambda_trans < 0:
            raise ContractViolation("loss weights must be nonnegative")
        if self.lambda_rot == 0 and self.lambda_trans == 0:
            raise ContractViolation("loss weights cannot both be zero")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return _from_dict(cls, d)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 4
    learning_rate: float = 1e-4
    epochs: int = 1000
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        for name in ("batch_size", "learning_rate", "epochs", "eps"):
            if not getattr(self, name) > 0:
                raise ContractViolation(f"{name} must be positive, got {getattr(self, name)}")
        if self.seed < 0:
            raise ContractViolation(f"seed must be nonnegative, got {self.seed}")
        for name in ("beta1", "beta2"):
            if not 0 <= getattr(self, name) < 1:
                raise ContractViolation(f"{name} must lie in [0, 1)")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return _from_dict(cls, d)


@dataclass
class TaskMetrics:
    rmse_t: float
    rmse_r_deg: float
    chamfer: float
    n: int


@dataclass
class SampleRecord:
    """Per-sample squared errors summed over both objects' 3 components."""

    pair_id: str
    task: str
    sq_err_t: float
    sq_err_r_deg: float
    chamfer: float
    components: int = 6


@dataclass
class EvalReport:
    tasks: dict
    overall: TaskMetrics
    samples: list
    config: dict = field(default_factory=dict)
    euler_convention: str = "intrinsic XYZ of R_pred R_gt_best^T, wrapped to (-180, 180]"

    def to_dict(self):
        return {
            "tasks": {k: asdict(v) for k, v in self.tasks.items()},
            "overall": asdict(self.overall),
            "samples": [asdict(s) for s in self.samples],
            "config": self.config,
            "euler_convention": self.euler_convention,
        }

    @classmethod
    def from_samples(cls, samples, config=None):
        """Aggregate per task and overall from per-sample rows."""
        if not samples:
            raise ContractViolation("an evaluation report needs at least one sample")
        by_task = {}
        for s in samples:
            by_task.setdefault(s.task, []).append(s)
        tasks = {task: aggregate(rows) for task, rows in sorted(by_task.items())}
        return cls(tasks, aggregate(samples), list(samples), dict(config or {}))


def aggregate(samples) -> TaskMetrics:
    components = sum(s.components for s in samples)
    return TaskMetrics(
        rmse_t=math.sqrt(math.fsum(s.sq_err_t for s in samples) / components),
        rmse_r_deg=math.sqrt(math.fsum(s.sq_err_r_deg for s in samples) / components),
        chamfer=math.fsum(s.chamfer for s in samples) / len(samples),
        n=len(samples),
    )
