"""One-dimensional K-medians with seeded restarts, plus an exact
dynamic-programming reference that computes the global L1 optimum.

The iterative engine follows the classic three-phase shape: pick initial
centroids, assign every value to the nearest centroid by absolute distance,
recompute each centroid as its cluster's median, and repeat phases two and
three until the centroids stop moving. Because scalar clusters are
intervals, each converged run is then polished by exact coordinate descent
on the cluster boundaries (each split point is moved to its cost-optimal
position with the others held fixed), which removes the single-point-move
stalls plain alternation is prone to; alternation and polishing repeat
until neither changes anything.

Initial centroids alternate between distance-weighted seeds and jittered
quantile seeds across restarts, so separation-dominated and evenly sized
cluster structures are both reachable within a modest restart budget.

Everything is deterministic for a given seed: seeding consumes a private
RNG stream, assignment ties go to the lower centroid index, even-sized
medians take the midpoint of the two middle values, boundary moves require
a strict improvement, and restart ties keep the earliest run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, KTooLarge, TooFewDistinctValues
from .measurements import FeatureDataset

_SEED_STRIDE = 1_000_003  # spreads derived restart seeds; any odd prime works


@dataclass(frozen=True)
class ClusterParams:
    """Knobs for the clustering engine."""

    k: int = 5
    restarts: int = 50
    max_iterations: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class Clustering:
    """A k-way partition of scalar values.

    ``assignments[i]`` is the cluster index of ``values[i]``; ``centroids``
    are the cluster medians in ascending order; ``objective`` is the total
    L1 distance of every value to its centroid.
    """

    values: tuple[float, ...]
    assignments: tuple[int, ...]
    centroids: tuple[float, ...]
    objective: float
    iterations_used: int
    converged: bool
    run_seed: int

    @property
    def k(self) -> int:
        return len(self.centroids)

    def members(self, cluster: int) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.assignments) if a == cluster)

    def cluster_values(self, cluster: int) -> tuple[float, ...]:
        return tuple(self.values[i] for i in self.members(cluster))

    def to_dict(self) -> dict:
        """JSON-ready form: {k, seed, objective, centroids, clusters}."""
        clusters = []
        for c in range(self.k):
            vals = self.cluster_values(c)
            clusters.append(
                {"members": list(self.members(c)), "min": min(vals), "max": max(vals)}
            )
        return {
            "k": self.k,
            "seed": self.run_seed,
            "objective": self.objective,
            "centroids": list(self.centroids),
            "clusters": clusters,
        }


def _as_values(data: FeatureDataset | Sequence[float]) -> tuple[float, ...]:
    if isinstance(data, FeatureDataset):
        return data.values
    return tuple(data)


def objective(
    data: FeatureDataset | Sequence[float],
    assignments: Sequence[int],
    centroids: Sequence[float],
) -> float:
    """Total L1 cost: sum over values of |value - assigned centroid|."""
    values = _as_values(data)
    if len(assignments) != len(values):
        raise DimensionMismatch(
            f"{len(assignments)} assignments for {len(values)} values"
        )
    total = 0.0
    for value, a in zip(values, assignments):
        if not 0 <= a < len(centroids):
            raise DimensionMismatch(f"assignment {a} outside 0..{len(centroids) - 1}")
        total += abs(value - centroids[a])
    return total


def _seed_spread(distinct: list[float], k: int, rng: random.Random) -> list[float]:
    """Distance-weighted seeds: first uniform, each next value drawn with
    probability proportional to its distance from the seeds so far.
    Already-chosen values carry zero weight, so the k seeds are distinct."""
    centroids = [distinct[rng.randrange(len(distinct))]]
    while len(centroids) < k:
        weights = [min(abs(v - c) for c in centroids) for v in distinct]
        r = rng.random() * sum(weights)
        acc = 0.0
        chosen = None
        for v, w in zip(distinct, weights):
            if w <= 0:
                continue
            acc += w
            chosen = v
            if acc >= r:
                break
        centroids.append(chosen)
    centroids.sort()
    return centroids


def _seed_quantiles(distinct: list[float], k: int, rng: random.Random) -> list[float]:
    """Jittered-quantile seeds: one value near each of k evenly spaced
    positions in the sorted distinct values, nudged randomly inside its
    stratum. Indices are repaired to stay strictly increasing."""
    n = len(distinct)
    indices = [int((j + rng.random()) * n / k) for j in range(k)]
    for j in range(1, k):
        indices[j] = max(indices[j], indices[j - 1] + 1)
    for j in range(k - 1, -1, -1):
        indices[j] = min(indices[j], n - (k - j))
    return [distinct[i] for i in indices]


def _seed_centroids(distinct: list[float], k: int, rng: random.Random) -> list[float]:
    """Initial centroids for one run: half the restarts favour spread-out
    seeds, half favour balanced strata, so both separation-dominated and
    evenly sized cluster structures stay reachable."""
    if rng.random() < 0.5:
        return _seed_spread(distinct, k, rng)
    return _seed_quantiles(distinct, k, rng)


def _median(sorted_vals: list[float]) -> float:
    n = len(sorted_vals)
    mid = n // 2
    if n % 2:
        return sorted_vals[mid]
    return (sorted_vals[mid - 1] + sorted_vals[mid]) / 2.0


def _assign(
    values: tuple[float, ...], centroids: list[float]
) -> tuple[list[int], list[float]]:
    """Nearest-centroid assignment with empty-cluster repair.

    Ties go to the lower centroid index. If a cluster comes out empty its
    centroid is moved onto the feature farthest from its own centroid and
    the assignment is redone; this strictly lowers the assignment cost, so
    the repair loop terminates.
    """
    centroids = list(centroids)
    while True:
        assignments = []
        for v in values:
            best, best_dist = 0, abs(v - centroids[0])
            for j in range(1, len(centroids)):
                d = abs(v - centroids[j])
                if d < best_dist:
                    best, best_dist = j, d
            assignments.append(best)
        occupied = set(assignments)
        empty = [j for j in range(len(centroids)) if j not in occupied]
        if not empty:
            return assignments, centroids
        worst_idx = max(
            range(len(values)),
            key=lambda i: (abs(values[i] - centroids[assignments[i]]), -i),
        )
        centroids[empty[0]] = values[worst_idx]
        centroids.sort()


def _boundaries_from_assignments(
    sorted_labels: list[int], k: int
) -> list[int]:
    """Last sorted-position of each cluster except the final one."""
    boundaries = []
    for pos in range(len(sorted_labels) - 1):
        if sorted_labels[pos] != sorted_labels[pos + 1]:
            boundaries.append(pos)
    assert len(boundaries) == k - 1, "clusters must be contiguous"
    return boundaries


def _refine_boundaries(
    sv: list[float], prefix: list[float], boundaries: list[int]
) -> tuple[list[int], bool]:
    """Exact coordinate descent on split points over the sorted values.

    Each boundary in turn is moved to the position minimizing the cost of
    its two adjacent segments, holding the rest fixed; candidate positions
    never split a run of equal values, so equal values stay clustered
    together. Sweeps repeat until stable. Moves require strict improvement,
    ties keep the current position.
    """
    n = len(sv)
    boundaries = list(boundaries)
    changed_any = False
    while True:
        changed = False
        for j in range(len(boundaries)):
            lo = boundaries[j - 1] + 1 if j > 0 else 0
            hi = boundaries[j + 1] if j + 1 < len(boundaries) else n - 1
            current = boundaries[j]
            best_pos, best_cost = current, (
                _segment_cost(prefix, lo, current) + _segment_cost(prefix, current + 1, hi)
            )
            for pos in range(lo, hi):
                if sv[pos] == sv[pos + 1]:
                    continue
                cost = _segment_cost(prefix, lo, pos) + _segment_cost(prefix, pos + 1, hi)
                if cost < best_cost:
                    best_pos, best_cost = pos, cost
            if best_pos != current:
                boundaries[j] = best_pos
                changed = changed_any = True
        if not changed:
            return boundaries, changed_any


def kmedians_run(
    data: FeatureDataset | Sequence[float],
    params: ClusterParams,
    run_seed: int,
    history: list[float] | None = None,
) -> Clustering:
    """One seeded K-medians run.

    ``history``, when given, collects the objective after every
    (assignment, recomputation) pair and after every boundary-polish pass;
    the sequence is non-increasing.
    """
    values = _as_values(data)
    distinct = sorted(set(values))
    if len(distinct) < params.k:
        raise TooFewDistinctValues(params.k, len(distinct))

    centroids = _seed_centroids(distinct, params.k, random.Random(run_seed))

    order = sorted(range(len(values)), key=lambda i: values[i])
    sv = [values[i] for i in order]
    prefix = _segment_cost_table(sv)

    assignments: list[int] = []
    iterations = 0
    converged = False
    while iterations < params.max_iterations:
        # alternate assignment and median recomputation until stable
        lloyd_converged = False
        while iterations < params.max_iterations:
            assignments, centroids = _assign(values, centroids)
            new_centroids = []
            for c in range(params.k):
                cluster = sorted(values[i] for i, a in enumerate(assignments) if a == c)
                new_centroids.append(_median(cluster))
            iterations += 1
            if history is not None:
                history.append(objective(values, assignments, new_centroids))
            if new_centroids == centroids:
                lloyd_converged = True
                break
            centroids = new_centroids

        # polish: move each split point to its exact local optimum
        sorted_labels = [assignments[i] for i in order]
        boundaries, polished = _refine_boundaries(
            sv, prefix, _boundaries_from_assignments(sorted_labels, params.k)
        )
        if lloyd_converged and not polished:
            converged = True
            break
        label = 0
        cuts = set(boundaries)
        for pos in range(len(sv)):
            assignments[order[pos]] = label
            if pos in cuts:
                label += 1
        centroids = [
            _median(sorted(values[i] for i, a in enumerate(assignments) if a == c))
            for c in range(params.k)
        ]
        if history is not None and polished:
            history.append(objective(values, assignments, centroids))
        if not lloyd_converged:
            break

    return Clustering(
        values=values,
        assignments=tuple(assignments),
        centroids=tuple(centroids),
        objective=objective(values, assignments, centroids),
        iterations_used=iterations,
        converged=converged,
        run_seed=run_seed,
    )


def best_of_restarts(
    data: FeatureDataset | Sequence[float], params: ClusterParams
) -> Clustering:
    """Run ``params.restarts`` independent seeded runs and keep the one with
    the smallest objective (earliest run wins ties)."""
    best: Clustering | None = None
    for i in range(params.restarts):
        run = kmedians_run(data, params, run_seed=params.seed * _SEED_STRIDE + i)
        if best is None or run.objective < best.objective:
            best = run
    assert best is not None
    return best


def _segment_cost_table(values: Sequence[float]) -> list[float]:
    # prefix[i] = sum of values[:i]
    prefix = [0.0]
    for v in values:
        prefix.append(prefix[-1] + v)
    return prefix


def _segment_cost(prefix: list[float], i: int, j: int) -> float:
    """L1 cost of the sorted segment values[i..j] around its median: sum of
    the upper half minus sum of the lower half (middle element drops out
    when the length is odd)."""
    half = (j - i + 1) // 2
    lower = prefix[i + half] - prefix[i]
    upper = prefix[j + 1] - prefix[j + 1 - half]
    return upper - lower


def exact_dp(values: Sequence[float], k: int) -> tuple[float, list[int]]:
    """Globally optimal k-segmentation of sorted values under L1 cost.

    Returns the minimal total cost and the boundaries as the index of the
    last element of each segment except the final one (k-1 entries).
    O(n^2 k) time, O(nk) space.
    """
    values = list(values)
    n = len(values)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds {n} values")
    if any(values[i] > values[i + 1] for i in range(n - 1)):
        raise ValueError("values must be sorted ascending")

    prefix = _segment_cost_table(values)
    INF = float("inf")
    # cost[m][j]: best cost of first j values in m segments
    cost = [[INF] * (n + 1) for _ in range(k + 1)]
    split = [[0] * (n + 1) for _ in range(k + 1)]
    cost[0][0] = 0.0
    for m in range(1, k + 1):
        for j in range(m, n + 1):
            best, best_i = INF, m - 1
            for i in range(m - 1, j):
                c = cost[m - 1][i] + _segment_cost(prefix, i, j - 1)
                if c < best:
                    best, best_i = c, i
            cost[m][j] = best
            split[m][j] = best_i

    boundaries: list[int] = []
    j = n
    for m in range(k, 1, -1):
        j = split[m][j]
        boundaries.append(j - 1)
    boundaries.reverse()
    return cost[k][n], boundaries
