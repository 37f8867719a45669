"""Reconstruction fidelity metrics: RMSE, mean row cosine, and top-k
nearest-neighbor overlap under cosine similarity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embio import EmbeddingMatrix
from .errors import DataError
from .quantizer import SizeReport


@dataclass(frozen=True)
class FidelityReport:
    rmse: float
    mean_cosine: float
    nn_overlap_at_k: float
    k: int
    size: SizeReport | None = None

    def to_dict(self) -> dict:
        d = {
            "rmse": self.rmse,
            "mean_cosine": self.mean_cosine,
            "nn_overlap_at_k": self.nn_overlap_at_k,
            "k": self.k,
        }
        if self.size is not None:
            d["size"] = self.size.to_dict()
        return d


def _topk_neighbors(values: np.ndarray, k: int) -> np.ndarray:
    """Row indices of the k most cosine-similar other rows, per row.
    Ties resolve to the lower row index (stable sort)."""
    x = values.astype(np.float64)
    norms = np.linalg.norm(x, axis=1)
    norms[norms == 0.0] = 1.0
    unit = x / norms[:, None]
    cos = unit @ unit.T
    np.fill_diagonal(cos, -np.inf)
    order = np.argsort(-cos, axis=1, kind="stable")
    return order[:, :k]


def fidelity(e: EmbeddingMatrix, r: EmbeddingMatrix, k: int,
             size: SizeReport | None = None) -> FidelityReport:
    """Compare a reconstruction r against the original e."""
    if e.values.shape != r.values.shape:
        raise DataError(
            f"shape mismatch: {e.values.shape} vs {r.values.shape}")
    if not 1 <= k < e.rows:
        raise DataError(f"k={k} out of range [1, {e.rows})")

    a = e.values.astype(np.float64)
    b = r.values.astype(np.float64)
    rmse = float(np.sqrt(np.mean((a - b) ** 2)))

    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    denom = na * nb
    denom[denom == 0.0] = 1.0
    mean_cosine = float(np.mean(np.sum(a * b, axis=1) / denom))

    nn_a = _topk_neighbors(e.values, k)
    nn_b = _topk_neighbors(r.values, k)
    overlap = np.mean([
        len(set(nn_a[i]) & set(nn_b[i])) / k for i in range(e.rows)
    ])
    return FidelityReport(rmse, mean_cosine, float(overlap), k, size)
