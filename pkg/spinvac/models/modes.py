# spinvac/models/modes.py
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd

MODE_CSV_COLUMNS = ["omega_k", "khat_x", "khat_y", "khat_z", "lambda", "g_x", "g_y", "g_z"]


@dataclass(frozen=True)
class PolarizationBasis:
    """Transverse basis {e1, e2} for a propagation direction k_hat, right-handed."""
    k_hat: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    def vector(self, lam: int) -> np.ndarray:
        """Polarization vector e(k, lambda) for lambda in {1, 2}."""
        return self.e1 if lam == 1 else self.e2


@dataclass(frozen=True)
class Mode:
    omega_k: float
    k_hat: np.ndarray
    lam: int
    coupling_vector: np.ndarray


@dataclass(frozen=True)
class ModeSet:
    """
    Discretized free-space photon modes seen by a spin at the origin.

    Each row is one (frequency, direction, polarization) mode with coupling
    vector g = w (k x e) / sqrt(2 omega_k); the vacuum field at the origin is
    B = sum_j g_j i (b_j - b_j^dagger). ``alpha`` is carried so rates can be
    computed from the set alone.
    """
    omega_k: np.ndarray
    k_hat: np.ndarray
    lam: np.ndarray
    coupling: np.ndarray
    cutoff: float
    window: Tuple[float, float]
    alpha: float = 0.0
    measure: str = "rate_matched"
    frequency_nodes: np.ndarray = field(default=None)
    frequency_weights: np.ndarray = field(default=None)

    def __len__(self) -> int:
        return int(self.omega_k.shape[0])

    @property
    def modes(self) -> List[Mode]:
        return [
            Mode(float(w), k, int(l), g)
            for w, k, l, g in zip(self.omega_k, self.k_hat, self.lam, self.coupling)
        ]

    def flip_strength(self) -> np.ndarray:
        """Per-mode spin-flip coupling strength alpha^2 (g_x^2 + g_y^2) / 4."""
        g = self.coupling
        return self.alpha ** 2 * (g[:, 0] ** 2 + g[:, 1] ** 2) / 4.0

    def scaled(self, factor: float) -> "ModeSet":
        """Same modes with every coupling vector multiplied by ``factor``."""
        return ModeSet(
            omega_k=self.omega_k,
            k_hat=self.k_hat,
            lam=self.lam,
            coupling=self.coupling * factor,
            cutoff=self.cutoff,
            window=self.window,
            alpha=self.alpha,
            measure=self.measure,
            frequency_nodes=self.frequency_nodes,
            frequency_weights=self.frequency_weights,
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "omega_k": self.omega_k,
            "khat_x": self.k_hat[:, 0],
            "khat_y": self.k_hat[:, 1],
            "khat_z": self.k_hat[:, 2],
            "lambda": self.lam,
            "g_x": self.coupling[:, 0],
            "g_y": self.coupling[:, 1],
            "g_z": self.coupling[:, 2],
        }, columns=MODE_CSV_COLUMNS)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path], alpha: float = 0.0,
                 measure: str = "rate_matched") -> "ModeSet":
        frame = pd.read_csv(path, float_precision="round_trip")
        omega_k = frame["omega_k"].to_numpy(dtype=float)
        nodes = np.unique(omega_k)
        return cls(
            omega_k=omega_k,
            k_hat=frame[["khat_x", "khat_y", "khat_z"]].to_numpy(dtype=float),
            lam=frame["lambda"].to_numpy(dtype=int),
            coupling=frame[["g_x", "g_y", "g_z"]].to_numpy(dtype=float),
            cutoff=float(omega_k.max()),
            window=(float(omega_k.min()), float(omega_k.max())),
            alpha=alpha,
            measure=measure,
            frequency_nodes=nodes,
        )

    def __repr__(self):
        return (f"<ModeSet(n_modes={len(self)}, window=({self.window[0]:.6g}, "
                f"{self.window[1]:.6g}), measure={self.measure})>")
