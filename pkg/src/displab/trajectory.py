"""Run configuration and trajectory records shared by steppers and analysis."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np


@dataclass
class SimConfig:
    """Knobs for a single integration.

    ``sample_every`` counts steps between norm samples, ``snapshot_every``
    counts steps between stored coefficient snapshots (0 means never).
    """

    truncation: int
    h: float
    horizon: float
    sample_every: int = 1
    snapshot_every: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.h <= 0:
            raise ValueError("step must be positive")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.sample_every < 1:
            raise ValueError("sample_every must be at least 1")


@dataclass
class TrajectoryLog:
    """Sampled norms plus optional snapshots and a final state.

    ``lyapunov`` is NaN wherever the model has no Lyapunov functional.
    Snapshots are raw coefficient arrays aligned with ``snapshot_times``.
    """

    times: np.ndarray
    h_norm: np.ndarray
    h1_norm: np.ndarray
    lyapunov: np.ndarray
    snapshot_times: list = dc_field(default_factory=list)
    snapshots: list = dc_field(default_factory=list)
    final: np.ndarray | None = None

    def __post_init__(self) -> None:
        if len(self.times) and np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if len(self.times) != len(self.h_norm) or len(self.times) != len(self.h1_norm):
            raise ValueError("norm series length mismatch")

    def with_snapshots(self, times: list, snaps: list) -> "TrajectoryLog":
        return TrajectoryLog(self.times, self.h_norm, self.h1_norm,
                             self.lyapunov, list(times), list(snaps),
                             self.final)
