"""Label-occurrence distributions and the KL distance minimized by the selection strategies.

Everything here is a plain value: samples, label counts, distributions and the
target-distribution parameters. The replay strategies compare the label
distribution of a candidate memory against a target distribution under the
Kullback-Leibler distance; both distributions are additively smoothed so the
distance is always finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Default additive smoothing applied to every distribution before KL.
DEFAULT_EPSILON = 1e-9


class CountUnderflowError(ValueError):
    """Raised when removing a sample would drive a label count below zero."""


@dataclass(frozen=True)
class MultiLabelSample:
    """One stored unit: a feature vector, an n-hot label vector and its task of origin.

    Features are non-negative reals in [0, 1] (normalized event counts, so they
    sum to at most 1); labels is a fixed-length 0/1 vector shared by every
    sample in a run; sample_id is unique within a stream.
    """

    features: np.ndarray
    labels: np.ndarray
    task_id: int
    sample_id: int

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=np.float64))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))

    @property
    def label_cardinality(self) -> int:
        return int(self.labels.sum())


@dataclass(frozen=True)
class LabelCounts:
    """Occurrence counts per label over a sample set, with the cached grand total."""

    counts: np.ndarray
    total: int = field(default=-1)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if self.total < 0:
            object.__setattr__(self, "total", int(counts.sum()))
        elif self.total != int(counts.sum()):
            raise ValueError(f"total {self.total} != sum of counts {int(counts.sum())}")
        if np.any(counts < 0):
            raise CountUnderflowError("negative label count")

    def __len__(self) -> int:
        return len(self.counts)

    @classmethod
    def from_samples(cls, samples, num_labels: int) -> "LabelCounts":
        counts = np.zeros(num_labels, dtype=np.int64)
        for s in samples:
            counts += s.labels
        return cls(counts)


@dataclass(frozen=True)
class LabelDistribution:
    """A probability vector over the label universe (entries >= 0, summing to 1)."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if np.any(probs < 0):
            raise ValueError("negative probability")
        if abs(float(probs.sum()) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {float(probs.sum())}, not 1")

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class TargetSpec:
    """Parameters of the target distribution: allocation power and smoothing constant.

    rho shapes how memory slots are allocated across labels: rho=0 targets the
    uniform distribution, rho=1 mirrors the observed frequencies.
    """

    rho: float = 0.0
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1e-3):
            raise ValueError(f"epsilon must be in (0, 1e-3], got {self.epsilon}")


def empirical_distribution(counts: LabelCounts, epsilon: float = DEFAULT_EPSILON) -> LabelDistribution:
    """Smoothed relative frequencies: (n_i + eps) / (total + L*eps).

    The smoothing keeps every entry strictly positive (so KL is defined) and
    makes the all-zero case the uniform distribution.
    """
    c = counts.counts
    return LabelDistribution((c + epsilon) / (counts.total + len(c) * epsilon))


def target_distribution(counts: LabelCounts, spec: TargetSpec) -> LabelDistribution:
    """Target distribution p_i = n_i^rho / sum_j n_j^rho, smoothed like the empirical one.

    rho=0 gives exactly the uniform distribution (0^0 taken as 1). Negative rho
    is undefined when any count is zero and raises.
    """
    c = counts.counts
    if spec.rho < 0 and np.any(c == 0):
        raise ValueError("target undefined: negative allocation power with a zero count")
    weights = np.power(c.astype(np.float64), spec.rho)
    return LabelDistribution((weights + spec.epsilon) / (weights.sum() + len(c) * spec.epsilon))


def kl_distance(p: LabelDistribution, q: LabelDistribution) -> float:
    """Kullback-Leibler distance sum_i p_i * ln(p_i / q_i).

    Both arguments must be smoothed (strictly positive) and of equal length.
    Non-negative, zero iff p equals q.
    """
    if len(p) != len(q):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(q)}")
    return float(np.sum(p.probs * np.log(p.probs / q.probs)))


def counts_without_sample(counts: LabelCounts, sample: MultiLabelSample) -> LabelCounts:
    """Counts after removing one sample: each of its positive labels decremented by 1."""
    c = counts.counts - sample.labels
    if np.any(c < 0):
        raise CountUnderflowError(f"sample {sample.sample_id} not accounted for in counts")
    return LabelCounts(c, counts.total - sample.label_cardinality)


def counts_with_sample(counts: LabelCounts, sample: MultiLabelSample) -> LabelCounts:
    """Inverse of counts_without_sample."""
    return LabelCounts(counts.counts + sample.labels, counts.total + sample.label_cardinality)
