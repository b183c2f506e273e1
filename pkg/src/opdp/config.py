"""Configuration from environment."""

import dataclasses
import os
from dataclasses import dataclass
from typing import Any

from opdp.scalar import FieldSpec

DEFAULT_FIELD = "q"
DEFAULT_MAX_ARITY = 5
DEFAULT_MAX_DEGREE = 6
DEFAULT_MAX_INDEX = 5
DEFAULT_SEED = 0
DEFAULT_THREADS = 1
DEFAULT_LOG_LEVEL = "WARNING"

MAX_ARITY_LIMIT = 8
MAX_DEGREE_LIMIT = 12  # BHS census checks run up to n = 12
MAX_INDEX_LIMIT = 8


@dataclass
class Config:
    """Field, enumeration bounds and verifier settings."""

    field: str = DEFAULT_FIELD
    max_arity: int = DEFAULT_MAX_ARITY
    max_degree: int = DEFAULT_MAX_DEGREE
    max_index: int = DEFAULT_MAX_INDEX
    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS
    log_level: str = DEFAULT_LOG_LEVEL

    @classmethod
    def from_env(cls) -> "Config":
        """Load config from environment variables."""
        return cls(
            field=os.getenv("OPDP_FIELD", DEFAULT_FIELD).strip() or DEFAULT_FIELD,
            max_arity=int(os.getenv("OPDP_MAX_ARITY", str(DEFAULT_MAX_ARITY))),
            max_degree=int(os.getenv("OPDP_MAX_DEGREE", str(DEFAULT_MAX_DEGREE))),
            max_index=int(os.getenv("OPDP_MAX_INDEX", str(DEFAULT_MAX_INDEX))),
            seed=int(os.getenv("OPDP_SEED", str(DEFAULT_SEED))),
            threads=int(os.getenv("OPDP_THREADS", str(DEFAULT_THREADS))),
            log_level=os.getenv("OPDP_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper()
            or DEFAULT_LOG_LEVEL,
        )

    def with_overrides(self, **overrides: Any) -> "Config":
        """Return a copy with every non-None override applied (command-line flags)."""
        return dataclasses.replace(
            self, **{k: v for k, v in overrides.items() if v is not None}
        )

    def field_spec(self) -> FieldSpec:
        return FieldSpec.parse(self.field)

    def validate(self) -> None:
        """Validate configuration on startup."""
        self.field_spec()

        for name, value, limit in (
            ("max_arity", self.max_arity, MAX_ARITY_LIMIT),
            ("max_degree", self.max_degree, MAX_DEGREE_LIMIT),
            ("max_index", self.max_index, MAX_INDEX_LIMIT),
        ):
            if not 0 <= value <= limit:
                raise ValueError(f"{name} must be between 0 and {limit}")

        if self.threads < 1:
            raise ValueError("threads must be at least 1")

        if self.seed < 0:
            raise ValueError("seed must be non-negative")
