"""Three-valued results of closure checks and LT decisions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .trees import Tree, render_path, render_tree


class Status(str, enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


class LtStatus(str, enum.Enum):
    LT = "LT"
    NOT_LT = "NotLT"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


class Reason(str, enum.Enum):
    TESTABLE_AT = "TestableAt"
    NOT_TAME = "NotTame"
    NOT_STUTTER_CLOSED = "NotStutterClosed"
    BOUND_CHECK_FAILED = "BoundCheckFailed"
    BUDGET_EXCEEDED = "BudgetExceeded"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class OperationWitness:
    """A tree and node paths where a guarded operation flips membership."""

    op: str
    tree: Any
    nodes: tuple
    k: Any
    result: Any = None

    def to_dict(self) -> dict:
        return {
            "op": str(self.op),
            "tree": _term(self.tree),
            "nodes": [render_path(x) for x in self.nodes],
            "k": self.k,
            "result": _term(self.result) if self.result is not None else None,
        }

    def terms(self) -> list:
        out = [_term(self.tree)]
        if self.result is not None:
            out.append(_term(self.result))
        return out


@dataclass(frozen=True)
class PairWitness:
    """Two equivalent trees with different membership."""

    left: Any
    right: Any
    kappa: Any

    def to_dict(self) -> dict:
        return {"left": _term(self.left), "right": _term(self.right), "kappa": self.kappa}

    def terms(self) -> list:
        return [_term(self.left), _term(self.right)]


def _term(t) -> str:
    if isinstance(t, Tree):
        return render_tree(t)
    return str(t)


@dataclass(frozen=True)
class ClosureVerdict:
    status: Status
    witness: Any = None
    explored: dict = field(default_factory=dict)
    note: str | None = None
    bounded: bool = False

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def violated(self) -> bool:
        return self.status is Status.VIOLATED

    @property
    def unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    def to_dict(self) -> dict:
        return {
            "status": str(self.status),
            "witness": self.witness.to_dict() if self.witness is not None else None,
            "explored": dict(sorted(self.explored.items())),
            "note": self.note,
            "bounded": self.bounded,
        }


def holds(**explored) -> ClosureVerdict:
    return ClosureVerdict(Status.HOLDS, explored=explored)


def violated(witness, **explored) -> ClosureVerdict:
    return ClosureVerdict(Status.VIOLATED, witness, explored=explored)


def unknown(note: str, **explored) -> ClosureVerdict:
    return ClosureVerdict(Status.UNKNOWN, None, explored=explored, note=note)


@dataclass(frozen=True)
class LtVerdict:
    status: LtStatus
    reason: Reason | None = None
    kappa: int | None = None
    lam: int | None = None
    details: dict = field(default_factory=dict)
    witness: Any = None

    @property
    def conclusive(self) -> bool:
        return self.status is not LtStatus.UNKNOWN

    def to_dict(self) -> dict:
        out = {
            "status": str(self.status),
            "reason": str(self.reason) if self.reason is not None else None,
            "kappa": self.kappa,
            "details": _plain(self.details),
            "witness": self.witness.to_dict() if self.witness is not None else None,
        }
        if self.lam is not None:
            out["lambda"] = self.lam
        return out


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, enum.Enum):
        return str(value)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value
