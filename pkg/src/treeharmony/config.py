"""Solver configuration and outcome records shared by all solvers.

Every empirical limit the search needs lives here with an explicit
default, overridable per run via CLI flags or a key=value config file
(same key names).  The default seed is a fixed constant rather than
entropy so bare invocations are replayable.
"""

from dataclasses import dataclass, field, fields, replace
from typing import Any

DEFAULT_SEED = 1000003

PIPELINE_TAGS = ("twostage", "backtrack", "tabu")


@dataclass(frozen=True)
class SolverConfig:
    """Limits, tenures and probabilities for the three solvers, the
    hybrid pipeline order, and the sweep's global seed."""

    backtrack_limit: int = 50000      # backtrack events allowed per restart
    backtrack_restarts: int = 20      # independent runs per solve call
    perturb_rate: float = 0.01        # per forward step
    tabu_sample_pairs: int = 30
    tabu_tenure: int = 8
    tabu_max_iters: int | None = None  # None: 20000 * n
    twostage_runs: int = 10000
    stage1_budget: int = 2000         # backtracks for the internal-node stage
    stage2_budget: int = 150          # backtracks for the leaf CSP
    pipeline: tuple[str, ...] = PIPELINE_TAGS
    global_seed: int = DEFAULT_SEED

    def __post_init__(self):
        for f in fields(self):
            if f.name in ("pipeline", "tabu_max_iters", "global_seed"):
                continue
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")
        if self.tabu_max_iters is not None and self.tabu_max_iters < 0:
            raise ValueError("tabu_max_iters must be non-negative")
        if not self.pipeline:
            raise ValueError("pipeline must name at least one solver")
        if len(set(self.pipeline)) != len(self.pipeline):
            raise ValueError("pipeline tags must be distinct")
        for tag in self.pipeline:
            if tag not in PIPELINE_TAGS:
                raise ValueError(f"unknown solver tag {tag!r}")

    def tabu_iteration_limit(self, n: int) -> int:
        if self.tabu_max_iters is not None:
            return self.tabu_max_iters
        return 20000 * n

    @classmethod
    def from_file(cls, path) -> "SolverConfig":
        """Read key=value lines ('#' comments allowed); keys are the
        field names above."""
        overrides = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value")
                key, value = (part.strip() for part in line.split("=", 1))
                overrides[key] = value
        return cls().with_overrides(overrides)

    def with_overrides(self, overrides: dict[str, Any]) -> "SolverConfig":
        """Apply string or typed overrides keyed by field name."""
        known = {f.name: f for f in fields(self)}
        parsed = {}
        for key, value in overrides.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            if not isinstance(value, str):
                parsed[key] = value
                continue
            if key == "pipeline":
                parsed[key] = tuple(t.strip() for t in value.split(",") if t.strip())
            elif key == "perturb_rate":
                parsed[key] = float(value)
            elif key == "tabu_max_iters" and value.lower() in ("none", "auto"):
                parsed[key] = None
            else:
                parsed[key] = int(value)
        return replace(self, **parsed)


@dataclass
class SolveOutcome:
    """Result of one solve call: a labelling (raw solver output, not yet
    normalized) or a failure, plus per-solver search statistics."""

    success: bool
    labels: tuple[int, ...] | None
    solver: str
    stats: dict = field(default_factory=dict)
