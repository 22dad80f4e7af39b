"""Bounded replay memory and the greedy removal primitive all strategies build on.

memory_update deletes b samples one at a time; each step removes the sample
whose absence leaves the memory's label distribution closest (in KL) to the
target. Candidate distributions are evaluated incrementally from the cached
label counts, and every candidate evaluation bumps the memory's eval counter,
so the counter reproduces the b*m - b*(b-1)/2 cost of the greedy scan exactly.
"""

from __future__ import annotations

import numpy as np

from .distributions import (
    DEFAULT_EPSILON,
    LabelCounts,
    LabelDistribution,
    MultiLabelSample,
)


class ReplayMemory:
    """Ordered bounded store of samples with cached label counts.

    The cache is updated incrementally on every add/remove; verify_counts
    recounts from scratch and is the independent check that the two stay in
    sync. eval_counter is monotone and counts KL distance evaluations performed
    on behalf of this memory.
    """

    def __init__(self, capacity: int, num_labels: int):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self.num_labels = num_labels
        self.samples: list[MultiLabelSample] = []
        self.eval_counter = 0
        self._counts = np.zeros(num_labels, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def counts(self) -> LabelCounts:
        return LabelCounts(self._counts.copy())

    def add(self, sample: MultiLabelSample) -> None:
        self.samples.append(sample)
        self._counts += sample.labels

    def extend(self, samples) -> None:
        for s in samples:
            self.add(s)

    def remove_at(self, index: int) -> MultiLabelSample:
        sample = self.samples.pop(index)
        self._counts -= sample.labels
        return sample

    def verify_counts(self) -> bool:
        """True iff the cached counts equal a full recount of the stored samples."""
        recount = LabelCounts.from_samples(self.samples, self.num_labels)
        return bool(np.array_equal(recount.counts, self._counts))

    def task_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.samples:
            out[s.task_id] = out.get(s.task_id, 0) + 1
        return out


def memory_update(
    memory: ReplayMemory,
    b: int,
    target: LabelDistribution,
    epsilon: float = DEFAULT_EPSILON,
) -> ReplayMemory:
    """Greedily delete b samples, keeping the label distribution closest to target.

    At each of the b steps, every remaining sample j is scored by the KL
    distance of the memory-without-j distribution to the target, and the argmin
    is removed; ties go to the smallest sample_id. The target is fixed for the
    whole call. Exactly sum_{k=0}^{b-1} (|memory|-k) distance evaluations are
    performed and added to memory.eval_counter.

    Raises ValueError when b is outside [0, |memory|].
    """
    n = len(memory)
    if not 0 <= b <= n:
        raise ValueError(f"cannot remove {b} samples from a memory of {n}")
    if b == 0:
        return memory

    q = target.probs
    L = memory.num_labels
    labels = np.array([s.labels for s in memory.samples], dtype=np.int64)
    ids = np.array([s.sample_id for s in memory.samples], dtype=np.int64)
    counts = memory._counts.astype(np.int64)

    keep = np.ones(n, dtype=bool)
    for _ in range(b):
        cand_labels = labels[keep]
        cand = counts[None, :] - cand_labels
        totals = cand.sum(axis=1, keepdims=True)
        probs = (cand + epsilon) / (totals + L * epsilon)
        dists = np.sum(probs * np.log(probs / q[None, :]), axis=1)
        memory.eval_counter += len(dists)

        best = dists == dists.min()
        cand_ids = ids[keep]
        winner_id = cand_ids[best].min()
        idx = int(np.flatnonzero(ids == winner_id)[0])
        keep[idx] = False
        counts -= labels[idx]

    victims = set(ids[~keep].tolist())
    memory.samples = [s for s in memory.samples if s.sample_id not in victims]
    memory._counts = counts
    return memory
