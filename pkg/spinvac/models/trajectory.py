# spinvac/models/trajectory.py
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from spinvac.core.errors import DomainError

TRAJECTORY_CSV_COLUMNS = ["t", "sz", "splus_re", "splus_im", "sx", "sy"]
CONE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Trajectory:
    """
    Spin expectation values sampled on an increasing time grid.

    ``splus`` is <S_+> = <S_x> + i <S_y>, so sx and sy are derived from it.
    ``photon_number`` and ``energy`` are filled by the exact engine only.
    ``metadata`` holds the engine name and, inside a run, the config hash;
    ``diagnostics`` holds numeric engine checks such as norm and energy drift.
    """
    times: np.ndarray
    sz: np.ndarray
    splus: np.ndarray
    hbar_half: float = 0.5
    photon_number: Optional[np.ndarray] = None
    energy: Optional[np.ndarray] = None
    metadata: Dict[str, str] = field(default_factory=dict)
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise DomainError("times must be a non-empty 1-D grid")
        if np.any(np.diff(times) <= 0):
            raise DomainError("times must be strictly increasing")
        for name in ("sz", "splus", "photon_number", "energy"):
            values = getattr(self, name)
            if values is not None and np.shape(values) != times.shape:
                raise DomainError(f"{name} has shape {np.shape(values)}, expected {times.shape}")

    def __len__(self) -> int:
        return int(np.shape(self.times)[0])

    @property
    def sx(self) -> np.ndarray:
        return np.real(self.splus)

    @property
    def sy(self) -> np.ndarray:
        return np.imag(self.splus)

    def cone_excess(self) -> float:
        """Largest amount by which |<S>|^2 exceeds (hbar/2)^2; <= 1e-9 for a valid trajectory."""
        radius2 = self.sx ** 2 + self.sy ** 2 + self.sz ** 2
        return float(np.max(radius2 - self.hbar_half ** 2))

    def with_metadata(self, **entries: str) -> "Trajectory":
        return replace(self, metadata={**self.metadata, **entries})

    def to_frame(self) -> pd.DataFrame:
        data = {
            "t": self.times,
            "sz": self.sz,
            "splus_re": np.real(self.splus),
            "splus_im": np.imag(self.splus),
            "sx": self.sx,
            "sy": self.sy,
        }
        columns = list(TRAJECTORY_CSV_COLUMNS)
        if self.photon_number is not None:
            data["photon_number"] = self.photon_number
            columns.append("photon_number")
        return pd.DataFrame(data, columns=columns)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path], hbar_half: float = 0.5) -> "Trajectory":
        frame = pd.read_csv(path, float_precision="round_trip")
        photon_number = None
        if "photon_number" in frame.columns:
            photon_number = frame["photon_number"].to_numpy(dtype=float)
        return cls(
            times=frame["t"].to_numpy(dtype=float),
            sz=frame["sz"].to_numpy(dtype=float),
            splus=frame["splus_re"].to_numpy(dtype=float) + 1j * frame["splus_im"].to_numpy(dtype=float),
            hbar_half=hbar_half,
            photon_number=photon_number,
        )

    def __repr__(self):
        engine = self.metadata.get("engine", "unknown")
        return f"<Trajectory(n_samples={len(self)}, t_max={float(self.times[-1]):.6g}, engine={engine})>"
