"""Per-slot downlink allocation via capacity-constrained deferred acceptance.

Access points rank frame requests tightest-deadline-first; users rank access
points by achievable rate. User-proposing deferred acceptance yields the
user-optimal stable matching. Users whose smoothed average rate has fallen below
the multi-connectivity threshold may then be granted a second, spare AP for
non-coherent combining.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass


@dataclass
class PreferenceProfile:
    """Strict rankings for one slot; all ties are pre-broken by lower id."""

    ap_rankings: dict[int, list[int]]      # ap -> users, tightest slack first
    user_rankings: dict[int, list[int]]    # user -> aps, highest rate first
    quota: dict[int, int]                  # users an AP may hold per slot


@dataclass
class MatchingResult:
    serving: dict[int, list[int]]          # user -> serving APs (size 1 or 2)
    unmatched: list[int]
    proposals: int = 0

    def matched_users(self) -> list[int]:
        return sorted(self.serving)


def build_preferences(slacks: dict[int, float], link_rates: dict[int, dict[int, float]],
                      ap_ids: list[int], quota: int = 1) -> PreferenceProfile:
    """slacks: remaining deadline slack per requesting user; link_rates[u][a]:
    achievable rate of user u on AP a."""
    users = sorted(slacks)
    ap_rankings = {a: sorted(users, key=lambda u: (slacks[u], u)) for a in ap_ids}
    user_rankings = {u: sorted(ap_ids, key=lambda a: (-link_rates[u][a], a)) for u in users}
    return PreferenceProfile(ap_rankings=ap_rankings, user_rankings=user_rankings,
                             quota={a: quota for a in ap_ids})


def deferred_acceptance(profile: PreferenceProfile) -> MatchingResult:
    """User-proposing deferred acceptance with AP quotas.

    Unmatched users propose down their lists; each AP tentatively holds its best
    applicants up to quota and rejects the rest. Terminates within
    n_users * n_aps proposals at a stable matching (no blocking pair).
    """
    ap_rank = {a: {u: i for i, u in enumerate(ranking)}
               for a, ranking in profile.ap_rankings.items()}
    held: dict[int, list[int]] = {a: [] for a in profile.ap_rankings}
    next_choice = {u: 0 for u in profile.user_rankings}
    free = deque(sorted(profile.user_rankings))
    proposals = 0

    while free:
        u = free.popleft()
        prefs = profile.user_rankings[u]
        matched = False
        while next_choice[u] < len(prefs):
            a = prefs[next_choice[u]]
            next_choice[u] += 1
            proposals += 1
            if u not in ap_rank[a]:
                continue
            holders = held[a]
            if len(holders) < profile.quota[a]:
                holders.append(u)
                matched = True
                break
            worst = max(holders, key=lambda v: ap_rank[a][v])
            if ap_rank[a][u] < ap_rank[a][worst]:
                holders.remove(worst)
                holders.append(u)
                free.append(worst)
                matched = True
                break
        if not matched and next_choice[u] >= len(prefs):
            pass  # exhausted every AP; stays unmatched

    serving = {}
    for a, holders in held.items():
        for u in holders:
            serving.setdefault(u, []).append(a)
    for u in serving:
        serving[u].sort()
    unmatched = sorted(set(profile.user_rankings) - set(serving))
    return MatchingResult(serving=serving, unmatched=unmatched, proposals=proposals)


def mc_augment(matching: MatchingResult, avg_rates: dict[int, float], mc_rate_threshold: float,
               spare_aps: list[int], rx_power_dbm: dict[int, dict[int, float]],
               min_gain_db: float = 0.0) -> MatchingResult:
    """Grant each rate-starved user (ascending average rate) the spare AP adding
    the most received power, one user per spare AP. Serving sets only ever grow,
    so no user's combined SINR can decrease.

    min_gain_db gates marginal grants: a second transmitter is only worth its
    interference footprint when it adds a material share of the received power.
    """
    serving = {u: list(aps) for u, aps in matching.serving.items()}
    spares = sorted(spare_aps)
    starved = sorted((u for u in serving
                      if avg_rates.get(u, float("inf")) < mc_rate_threshold and len(serving[u]) < 2),
                     key=lambda u: (avg_rates[u], u))
    for u in starved:
        if not spares:
            break
        best = max(spares, key=lambda a: (rx_power_dbm[u][a], -a))
        held_mw = sum(10.0 ** (rx_power_dbm[u][a] / 10.0) for a in serving[u])
        gain_db = 10.0 * math.log10(1.0 + 10.0 ** (rx_power_dbm[u][best] / 10.0) / held_mw)
        if gain_db < min_gain_db:
            continue
        serving[u] = sorted(serving[u] + [best])
        spares.remove(best)
    return MatchingResult(serving=serving, unmatched=list(matching.unmatched),
                          proposals=matching.proposals)


def find_blocking_pair(profile: PreferenceProfile, matching: MatchingResult) -> tuple[int, int] | None:
    """Brute-force stability check: a (user, AP) pair blocks when the user strictly
    prefers the AP to every AP currently serving them and the AP either has spare
    quota or strictly prefers the user to one it holds. Returns the first blocking
    pair found, or None when the matching is stable."""
    ap_rank = {a: {u: i for i, u in enumerate(r)} for a, r in profile.ap_rankings.items()}
    user_rank = {u: {a: i for i, a in enumerate(r)} for u, r in profile.user_rankings.items()}
    held: dict[int, list[int]] = {a: [] for a in profile.ap_rankings}
    for u, aps in matching.serving.items():
        for a in aps:
            held[a].append(u)
    for u in sorted(profile.user_rankings):
        current = matching.serving.get(u, [])
        current_best = min((user_rank[u][a] for a in current), default=len(user_rank[u]) + 1)
        for a in profile.user_rankings[u]:
            if user_rank[u][a] >= current_best:
                break  # every later AP is worse than what u already has
            if u not in ap_rank[a]:
                continue
            if len(held[a]) < profile.quota[a]:
                return (u, a)
            if any(ap_rank[a][u] < ap_rank[a][v] for v in held[a]):
                return (u, a)
    return None


def check_latency_constraint(records, d_th: float, epsilon: float) -> tuple[float, bool]:
    """Fraction of records whose computing plus communication delay reaches the
    threshold, and whether that fraction stays within the allowed rate."""
    records = list(records)
    if not records:
        raise ValueError("records must be non-empty")
    violations = sum(1 for r in records if r.d_comp + r.d_comm >= d_th)
    rate = violations / len(records)
    return rate, rate <= epsilon
