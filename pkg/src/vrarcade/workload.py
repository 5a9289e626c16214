"""Impulse-action workload: Zipf popularity, impact matrix, arrivals, popularity learning."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def zipf_pmf(n: int, z: float) -> np.ndarray:
    """Zipf probability vector: p_i = i^(-z) / sum_k k^(-z), ranks i = 1..n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    ranks = np.arange(1, n + 1, dtype=np.float64)
    weights = ranks ** (-z)
    return weights / weights.sum()


@dataclass(frozen=True)
class ImpulseCatalog:
    """Action set with Zipf popularity and the binary player-impact matrix.

    theta[u, i] == 1 iff action i affects player u. affected_sets[i] lists those u.
    """

    n_actions: int
    pmf: np.ndarray
    theta: np.ndarray                  # (n_players, n_actions) uint8
    affected_sets: list[np.ndarray]

    def __post_init__(self) -> None:
        if abs(float(self.pmf.sum()) - 1.0) > 1e-12:
            raise ValueError("catalog pmf must sum to 1")
        if np.any(np.diff(self.pmf) > 0):
            raise ValueError("catalog pmf must be non-increasing in rank")


def build_catalog(n_actions: int, n_players: int, z: float, impact_density: float,
                  rng: np.random.Generator) -> ImpulseCatalog:
    """Draw the impact matrix as iid Bernoulli(impact_density) per (player, action).

    Actions affecting nobody are redrawn so every action has at least one affected player.
    """
    pmf = zipf_pmf(n_actions, z)
    theta = (rng.random((n_players, n_actions)) < impact_density).astype(np.uint8)
    if n_players > 0:
        empty = np.flatnonzero(theta.sum(axis=0) == 0)
        while empty.size > 0:
            theta[:, empty] = (rng.random((n_players, empty.size)) < impact_density).astype(np.uint8)
            # guarantee termination even for vanishing density: force one player
            still = empty[theta[:, empty].sum(axis=0) == 0]
            for i in still:
                theta[int(rng.integers(n_players)), i] = 1
            empty = np.flatnonzero(theta.sum(axis=0) == 0)
    affected = [np.flatnonzero(theta[:, i]) for i in range(n_actions)]
    return ImpulseCatalog(n_actions=n_actions, pmf=pmf, theta=theta, affected_sets=affected)


def sample_arrivals(intensity: float, dt: float, catalog: ImpulseCatalog, n_players: int,
                    rng: np.random.Generator) -> list[tuple[int, float]]:
    """Impulse-action arrivals for one slot of length dt.

    The count is Poisson with mean intensity*dt*n_players; each event gets an action
    index drawn from the catalog pmf and a uniform offset inside the slot. Events are
    returned sorted by offset.
    """
    if intensity < 0:
        raise ValueError(f"intensity must be >= 0, got {intensity}")
    mean = intensity * dt * n_players
    if mean == 0.0:
        return []
    count = int(rng.poisson(mean))
    if count == 0:
        return []
    actions = rng.choice(catalog.n_actions, size=count, p=catalog.pmf)
    offsets = np.sort(rng.random(count)) * dt
    return [(int(a), float(o)) for a, o in zip(actions, offsets)]


@dataclass
class PopularityEstimate:
    """Empirical action popularity with additive smoothing.

    With zero observations the estimate is uniform; alpha > 0 keeps every action's
    probability strictly positive.
    """

    n_actions: int
    alpha: float = 1.0
    counts: np.ndarray = field(default=None)  # type: ignore[assignment]
    total: int = 0

    def __post_init__(self) -> None:
        if self.counts is None:
            self.counts = np.zeros(self.n_actions, dtype=np.int64)

    def pmf(self) -> np.ndarray:
        return (self.counts + self.alpha) / (self.total + self.alpha * self.n_actions)

    def top_k(self, k: int) -> np.ndarray:
        """Indices of the k most popular actions by estimated pmf, ties to lower index."""
        k = min(k, self.n_actions)
        # stable sort on negated counts gives lowest-index-first among ties
        order = np.argsort(-self.counts, kind="stable")
        return order[:k]


def update_popularity(est: PopularityEstimate, action: int) -> PopularityEstimate:
    """Record one observed action; mutates and returns the estimate."""
    if not 0 <= action < est.n_actions:
        raise ValueError(f"action index {action} out of range [0, {est.n_actions})")
    est.counts[action] += 1
    est.total += 1
    return est
