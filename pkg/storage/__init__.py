"""
Storage module for run records and experiment artifacts
"""

from .artifact_store import ArtifactStore
from .models import RunRecord, compute_digest

__all__ = ['ArtifactStore', 'RunRecord', 'compute_digest']
