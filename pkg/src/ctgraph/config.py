"""Default search and truncation depths."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class OracleConfig:
    lemma1_depth: int = 6
    lemma1_max_len: int = 5
    lemma2_max_len: int = 6
    lemma3_depth: int = 4
    axioms_depth: int = 4
    cover_depth: int = 4


@dataclass(frozen=True)
class KGraphConfig:
    depth: int = 3
    validate_degree: tuple[int, int] = (3, 3)


@dataclass(frozen=True)
class Config:
    oracle: OracleConfig = field(default_factory=OracleConfig)
    kgraph: KGraphConfig = field(default_factory=KGraphConfig)


DEFAULT = Config()
