"""Product quantization of embedding matrices, with optional Gaussian
codebooks, under two partition schemes.

Structured partitioning splits the matrix into g column groups and
clusters each group independently. Unified partitioning stacks the g
groups row-wise and clusters once, so all groups share one codebook.
Gaussian codebooks additionally keep per-dimension intra-cluster
variances, enabling sampled reconstruction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .embio import EmbeddingMatrix
from .errors import DataError
from .kmeans import kmeans_best_of
from .rng import SplitMix64, derive_seed

FLOAT_BITS = 32  # bit width of one stored floating-point parameter


class PartitionKind(enum.Enum):
    STRUCTURED = "structured"
    UNIFIED = "unified"


class ReconstructMode(enum.Enum):
    MEAN = "mean"
    SAMPLE = "sample"


@dataclass(frozen=True)
class PartitionScheme:
    kind: PartitionKind
    groups: int

    def __post_init__(self):
        if self.groups < 1:
            raise DataError("group count must be >= 1")

    def check_divides(self, cols: int) -> None:
        if cols % self.groups != 0:
            raise DataError(
                f"group count {self.groups} does not divide dimension {cols}")


@dataclass(frozen=True)
class QuantizedEmbedding:
    """Index matrix plus codebook(s); the compressed form of a matrix.

    codebook_means has shape (blocks, c, n/g) with blocks = g for
    structured and 1 for unified partitioning. codebook_vars, when
    present, is shape-identical and carries per-dimension intra-cluster
    variances.
    """

    scheme: PartitionScheme
    rows: int
    cols: int
    clusters: int
    index_matrix: np.ndarray           # (rows, groups) uint32
    codebook_means: np.ndarray         # (blocks, c, n/g) float32
    codebook_vars: np.ndarray | None   # same shape, float32, or None
    seed: int
    vocab: list[str] | None = None

    def __post_init__(self):
        g = self.scheme.groups
        self.scheme.check_divides(self.cols)
        sub = self.cols // g
        blocks = g if self.scheme.kind is PartitionKind.STRUCTURED else 1
        if self.index_matrix.shape != (self.rows, g):
            raise DataError(f"index matrix shape {self.index_matrix.shape} != ({self.rows}, {g})")
        if self.index_matrix.size and int(self.index_matrix.max()) >= self.clusters:
            raise DataError("index matrix entry out of range")
        if self.codebook_means.shape != (blocks, self.clusters, sub):
            raise DataError(
                f"codebook shape {self.codebook_means.shape} != ({blocks}, {self.clusters}, {sub})")
        if self.codebook_vars is not None:
            if self.codebook_vars.shape != self.codebook_means.shape:
                raise DataError("variance table shape differs from codebook")
            if np.any(self.codebook_vars < 0):
                raise DataError("negative variance in codebook")

    @property
    def total_clusters(self) -> int:
        """Number of Gaussians/centroids overall: c*g structured, c unified."""
        if self.scheme.kind is PartitionKind.STRUCTURED:
            return self.clusters * self.scheme.groups
        return self.clusters

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuantizedEmbedding):
            return NotImplemented
        if (self.codebook_vars is None) != (other.codebook_vars is None):
            return False
        return (self.scheme == other.scheme
                and (self.rows, self.cols, self.clusters, self.seed)
                == (other.rows, other.cols, other.clusters, other.seed)
                and np.array_equal(self.index_matrix, other.index_matrix)
                and np.array_equal(self.codebook_means, other.codebook_means)
                and (self.codebook_vars is None
                     or np.array_equal(self.codebook_vars, other.codebook_vars))
                and self.vocab == other.vocab)


@dataclass(frozen=True)
class SizeReport:
    """Bit-exact accounting of a compressed matrix.

    theoretical_bits uses exact log2(c) per index; storable_bits uses
    ceil(log2 c) bits per index, packed matrix-level and padded to a byte
    boundary, plus 32 bits per codebook float.
    """

    theoretical_bits: float
    storable_bits: int
    float_params: int
    int_params: int
    baseline_bits: int
    compression_ratio: float

    @property
    def storable_bytes(self) -> int:
        return self.storable_bits // 8

    def to_dict(self) -> dict:
        return {
            "theoretical_bits": self.theoretical_bits,
            "storable_bits": self.storable_bits,
            "storable_bytes": self.storable_bytes,
            "float_params": self.float_params,
            "int_params": self.int_params,
            "baseline_bits": self.baseline_bits,
            "compression_ratio": self.compression_ratio,
        }


def index_bit_width(clusters: int) -> int:
    """Stored bits per index: ceil(log2 c); 0 for a single cluster."""
    return 0 if clusters <= 1 else (clusters - 1).bit_length()


def partition(e: EmbeddingMatrix, scheme: PartitionScheme):
    """Split the matrix per the scheme.

    Structured: list of g blocks, each rows x (n/g), from contiguous
    column ranges. Unified: a single (g*rows) x (n/g) matrix with the
    blocks stacked row-wise in group order.
    """
    scheme.check_divides(e.cols)
    g = scheme.groups
    sub = e.cols // g
    blocks = [e.values[:, i * sub:(i + 1) * sub] for i in range(g)]
    if scheme.kind is PartitionKind.STRUCTURED:
        return blocks
    return np.vstack(blocks)


def _compress(e: EmbeddingMatrix, scheme: PartitionScheme, c: int, seed: int,
              restarts: int, with_vars: bool) -> QuantizedEmbedding:
    if c < 1:
        raise DataError("cluster count must be >= 1")
    scheme.check_divides(e.cols)
    g = scheme.groups
    sub = e.cols // g
    index = np.empty((e.rows, g), dtype=np.uint32)

    if scheme.kind is PartitionKind.STRUCTURED:
        if c > e.rows:
            raise DataError(f"cluster count {c} exceeds {e.rows} sub-vectors per group")
        means = np.empty((g, c, sub), dtype=np.float32)
        vars_ = np.empty((g, c, sub), dtype=np.float32) if with_vars else None
        for i, block in enumerate(partition(e, scheme)):
            res = kmeans_best_of(block, c, derive_seed(seed, i), restarts)
            index[:, i] = res.assignments
            means[i] = res.centroids.astype(np.float32)
            if with_vars:
                vars_[i] = res.variances.astype(np.float32)
    else:
        if c > g * e.rows:
            raise DataError(f"cluster count {c} exceeds {g * e.rows} stacked sub-vectors")
        stacked = partition(e, scheme)
        res = kmeans_best_of(stacked, c, derive_seed(seed, 0), restarts)
        index[:] = res.assignments.reshape(g, e.rows).T
        means = res.centroids.astype(np.float32)[None, :, :]
        vars_ = res.variances.astype(np.float32)[None, :, :] if with_vars else None

    return QuantizedEmbedding(scheme, e.rows, e.cols, c, index, means, vars_,
                              seed, e.vocab)


def pq_compress(e: EmbeddingMatrix, scheme: PartitionScheme, c: int,
                seed: int, restarts: int = 1) -> QuantizedEmbedding:
    """Plain product quantization: index matrix + centroid codebook."""
    return _compress(e, scheme, c, seed, restarts, with_vars=False)


def gpq_compress(e: EmbeddingMatrix, scheme: PartitionScheme, c: int,
                 seed: int, restarts: int = 1) -> QuantizedEmbedding:
    """Same clustering as pq_compress, plus per-dimension intra-cluster
    variances so each cluster carries a diagonal Gaussian."""
    return _compress(e, scheme, c, seed, restarts, with_vars=True)


def reconstruct(q: QuantizedEmbedding, mode: ReconstructMode = ReconstructMode.MEAN,
                seed: int = 0) -> EmbeddingMatrix:
    """Rebuild the dense matrix by codebook lookup.

    MEAN substitutes each sub-vector with its cluster mean. SAMPLE first
    draws one codebook with every entry ~ Normal(mean, variance) from the
    given seed, then looks up as in MEAN mode.
    """
    if mode is ReconstructMode.SAMPLE:
        if q.codebook_vars is None:
            raise DataError("sample mode requires a variance table")
        rng = SplitMix64(seed)
        z = rng.normals(q.codebook_means.size).reshape(q.codebook_means.shape)
        book = (q.codebook_means.astype(np.float64)
                + np.sqrt(q.codebook_vars.astype(np.float64)) * z).astype(np.float32)
    else:
        book = q.codebook_means

    g = q.scheme.groups
    sub = q.cols // g
    out = np.empty((q.rows, q.cols), dtype=np.float32)
    for i in range(g):
        block = book[i] if q.scheme.kind is PartitionKind.STRUCTURED else book[0]
        out[:, i * sub:(i + 1) * sub] = block[q.index_matrix[:, i]]
    return EmbeddingMatrix(out, q.vocab)


def compute_size_report(rows: int, cols: int, scheme: PartitionScheme,
                        clusters: int, has_vars: bool) -> SizeReport:
    """Size accounting from parameters alone (no codebook needed)."""
    scheme.check_divides(cols)
    g = scheme.groups
    sub = cols // g
    mean_params = clusters * cols if scheme.kind is PartitionKind.STRUCTURED else clusters * sub
    float_params = 2 * mean_params if has_vars else mean_params
    int_params = rows * g

    theoretical_bits = math.log2(clusters) * rows * g + float_params * FLOAT_BITS
    index_bits = index_bit_width(clusters) * rows * g
    storable_bits = 8 * ((index_bits + 7) // 8) + float_params * FLOAT_BITS
    baseline_bits = rows * cols * FLOAT_BITS
    return SizeReport(
        theoretical_bits=theoretical_bits,
        storable_bits=storable_bits,
        float_params=float_params,
        int_params=int_params,
        baseline_bits=baseline_bits,
        compression_ratio=baseline_bits / storable_bits,
    )


def size_report(q: QuantizedEmbedding) -> SizeReport:
    return compute_size_report(q.rows, q.cols, q.scheme, q.clusters,
                               q.codebook_vars is not None)
