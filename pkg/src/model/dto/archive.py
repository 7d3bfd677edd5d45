"""Manifest written next to every archive of samples or generated data."""

import json
from dataclasses import asdict, dataclass, field
from enum import StrEnum

from src.utils.errors import InvalidConfigError
from src.utils.types import ConfigValue

MANIFEST_NAME = "manifest.json"
MANIFEST_SCHEMA_VERSION = 1


class ArchiveKind(StrEnum):
    PERIODIC = "periodic"
    STATIC = "static"
    DYNAMIC = "dynamic"
    VALIDATE_IW = "validate-iw"


@dataclass(frozen=True)
class ArchiveManifest:
    """Config echo, shapes, timings and row counts of one archive directory."""

    kind: ArchiveKind
    seed: int
    config: dict[str, ConfigValue]
    shapes: dict[str, int]
    chain_id: int | None = None
    wall_time_seconds: float = 0.0
    acceptance: dict[str, float] = field(default_factory=dict)
    row_counts: dict[str, int] = field(default_factory=dict)
    schema_version: int = MANIFEST_SCHEMA_VERSION

    def to_json(self) -> str:
        payload = asdict(self)
        payload["kind"] = str(self.kind)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ArchiveManifest":
        try:
            payload = json.loads(text)
            payload["kind"] = ArchiveKind(payload["kind"])
            return cls(**payload)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise InvalidConfigError(f"Manifest is not readable: {e}") from e

    def with_updates(self, **changes: object) -> "ArchiveManifest":
        payload = asdict(self)
        payload["kind"] = self.kind
        payload.update(changes)
        return ArchiveManifest(**payload)
