"""Resource caps for the exhaustive parts of the toolkit.

Several operations enumerate exponentially sized spaces (event families,
informed-set game states, execution trees).  A ``Budget`` makes the caps
explicit so oversized instances fail fast with a dedicated error instead
of hanging.  The ``OMLAB_BUDGET`` environment variable overrides the
defaults, either as a bare integer (execution cap) or as a comma list of
``key=value`` pairs, e.g. ``OMLAB_BUDGET=max_executions=2000000``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

DEFAULT_MAX_FAMILY_EVENTS = 1 << 20
DEFAULT_MAX_GAME_NODES = 20
DEFAULT_MAX_EXECUTIONS = 1_000_000

ENV_VAR = "OMLAB_BUDGET"


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed the configured resource caps."""


class FamilyCapExceededError(BudgetExceededError):
    """A generated event family would exceed the family size cap."""


@dataclass(frozen=True)
class Budget:
    max_family_events: int = DEFAULT_MAX_FAMILY_EVENTS
    max_game_nodes: int = DEFAULT_MAX_GAME_NODES
    max_executions: int = DEFAULT_MAX_EXECUTIONS

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"budget cap {f.name} must be positive")

    @classmethod
    def from_env(cls, env: str | None = None) -> "Budget":
        raw = os.environ.get(ENV_VAR) if env is None else env
        if not raw:
            return cls()
        raw = raw.strip()
        if raw.isdigit():
            return cls(max_executions=int(raw), max_family_events=int(raw))
        budget = cls()
        names = {f.name for f in fields(cls)}
        for part in raw.split(","):
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise ValueError(f"cannot parse {ENV_VAR} entry: {part!r}")
            budget = replace(budget, **{key: int(value)})
        return budget


def effective_budget(budget: Budget | None) -> Budget:
    """Resolve an optional budget argument against the environment."""
    return budget if budget is not None else Budget.from_env()
