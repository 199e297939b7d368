from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Union

Answer = Literal["yes", "no", "unknown"]
Depth = Union[int, Literal["exact"]]


@dataclass
class Verdict:
    """Three-valued answer with a certificate that can be replayed.

    ``depth == "exact"`` means a decision procedure terminated; an integer
    records the bound of a search.
    """

    answer: Answer
    certificate: dict[str, Any] = field(default_factory=dict)
    depth: Depth = "exact"

    def __post_init__(self):
        if self.answer not in ("yes", "no", "unknown"):
            raise ValueError(f"bad answer {self.answer!r}")

    @property
    def exact(self) -> bool:
        return self.depth == "exact"

    def to_json(self) -> dict[str, Any]:
        return {"answer": self.answer, "certificate": self.certificate, "depth": self.depth}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Verdict":
        return cls(data["answer"], data.get("certificate", {}), data.get("depth", "exact"))


class InfiniteFamily(Exception):
    """Raised when a requested set of ancestry pairs is provably infinite."""

    def __init__(self, message: str, certificate: dict[str, Any]):
        super().__init__(message)
        self.certificate = certificate


class OracleViolation(RuntimeError):
    """Two independent computations of the same fact disagreed."""
