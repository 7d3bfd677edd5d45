"""Data-transfer objects shared across sphcov boundaries."""

from src.model.dto.archive import MANIFEST_NAME, ArchiveKind, ArchiveManifest
from src.model.dto.experiment import ExperimentConfig, GpBlock, PriorKind, StopRule, TauJacobian

__all__ = [
    "MANIFEST_NAME",
    "ArchiveKind",
    "ArchiveManifest",
    "ExperimentConfig",
    "GpBlock",
    "PriorKind",
    "StopRule",
    "TauJacobian",
]
