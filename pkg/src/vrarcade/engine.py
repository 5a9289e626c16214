"""Slotted simulation loop tying workload, compute, channel, and scheduling together.

Each slot: players move inside their pods, impulse actions arrive and invalidate
stale frames, due frame requests are served from cache or the edge pool, proactive
render jobs are planned, link budgets are evaluated, downlink resources are matched
by deferred acceptance (plus multi-connectivity under the Proposed scheme), and
in-flight frames drain bits. A frame not fully delivered by its deadline falls back
to local low-resolution rendering and counts as an HD failure.

Replications are independent and deterministic: every random draw comes from a
named stream seeded by (seed, replication, stream), so identical configurations
reproduce byte-identical results and schemes can be compared on common random
numbers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import (achievable_rate, antenna_gain_db, bodies_block_segments, noise_power_dbm,
                      path_loss_db, self_blockage, sinr_db, wrap_angle)
from .compute import (CACHE_HIT, DELIVERED, PROACTIVE, READY, REAL_TIME, CacheEntry,
                      FrameCache, FrameTask, MecPool, PredictedTick, enqueue_tasks,
                      invalidate_on_action, local_fallback, mix_context, proactive_plan,
                      serve_frame)
from .config import Scenario
from .scheduler import build_preferences, deferred_acceptance, mc_augment
from .workload import PopularityEstimate, build_catalog, sample_arrivals, update_popularity

STREAM_WORKLOAD = 0
STREAM_MOBILITY = 1
STREAM_TOPOLOGY = 2

CSV_COLUMNS = ["scheme", "n_players", "cache_capacity", "action_intensity", "d_th_ms",
               "mean_total_ms", "mean_comp_ms", "mean_comm_ms", "p99_comm_ms", "reliability",
               "mean_rate_gbps", "hd_success", "me_ms", "n_replications", "seed"]


@dataclass
class DeliveryRecord:
    """Outcome of one frame request; d_total is d_comp + d_comm by construction."""

    player: int
    frame_index: int
    d_comp: float
    d_comm: float
    hd: bool
    serving_set_size: int
    slot: int                      # slot the request arrived in

    @property
    def d_total(self) -> float:
        return self.d_comp + self.d_comm


@dataclass
class MetricsSummary:
    mean_total_ms: float
    mean_comp_ms: float
    mean_comm_ms: float
    p99_comm_ms: float
    reliability: float
    mean_rate_bps: float
    hd_success: float
    replication_means_ms: tuple
    margin_of_error_ms: float
    n_records: int
    n_replications: int


@dataclass
class PlayerState:
    id: int
    pod_center: np.ndarray         # (2,)
    position: np.ndarray           # (3,)
    head_azimuth: float
    velocity: float = 0.0
    avg_rate: float = 0.0
    ctx: int = 0
    frame_counter: int = 0
    pending: "PendingFrame | None" = None


@dataclass
class PendingFrame:
    task: FrameTask
    source: str | None = None      # CACHE_HIT or COMPUTED
    ready_time: float | None = None
    remaining_bits: float = 0.0
    serving_size: int = 0


class TraceSink:
    """Optional per-slot CSV trace writers; any of them may be None."""

    def __init__(self, links=None, compute=None, matching=None):
        self.links = links
        self.compute = compute
        self.matching = matching


class SimulationState:
    """Mutable state of one replication; advanced one slot at a time by step()."""

    def __init__(self, scenario: Scenario, replication: int = 0):
        self.scenario = scenario
        self.replication = replication
        self.slot = 0
        self.t = 0.0
        sc = scenario

        self.rng_workload = np.random.default_rng(np.random.SeedSequence((sc.seed, replication, STREAM_WORKLOAD)))
        rng_mobility = np.random.default_rng(np.random.SeedSequence((sc.seed, replication, STREAM_MOBILITY)))
        rng_topology = np.random.default_rng(np.random.SeedSequence((sc.seed, replication, STREAM_TOPOLOGY)))

        # topology: pod assignment, AP placement jitter, impact matrix
        pods = rng_topology.permutation(sc.pod_centers.shape[0])[:sc.n_players]
        self.ap_positions = sc.ap_positions.copy()
        if self.ap_positions.size:
            jitter = rng_topology.uniform(-0.5, 0.5, size=(sc.n_aps, 2))
            self.ap_positions[:, 0] = np.clip(self.ap_positions[:, 0] + jitter[:, 0], 0.0, sc.arena_width)
            self.ap_positions[:, 1] = np.clip(self.ap_positions[:, 1] + jitter[:, 1], 0.0, sc.arena_depth)
        self.catalog = build_catalog(sc.n_actions, sc.n_players, sc.zipf_z, sc.impact_density,
                                     rng_topology)

        horizon = sc.n_slots + sc.prediction_window + 1
        self.positions, self.azimuths = generate_trajectories(sc, pods, horizon, rng_mobility)

        self.players = [PlayerState(id=u, pod_center=sc.pod_centers[pods[u]].copy(),
                                    position=np.array([*self.positions[0, u], sc.player_height]),
                                    head_azimuth=float(self.azimuths[0, u]),
                                    avg_rate=sc.rate_requirement)
                        for u in range(sc.n_players)]
        self.pool = MecPool(sc.n_servers)
        self.cache = FrameCache(sc.cache_capacity)
        self.popularity = PopularityEstimate(sc.n_actions, alpha=sc.popularity_alpha)
        self.in_flight: dict[tuple, FrameTask] = {}
        self.noise_dbm = noise_power_dbm(sc.bandwidth, sc.noise_figure)
        self.counters = {"spawned": 0, "delivered": 0, "fallen_back": 0, "cache_hits": 0,
                         "invalidated": 0, "actions": 0, "stale_proactive": 0,
                         "mc_grants": 0, "mc_starved": 0, "expired": 0, "hopeless": 0}

    # everything below keys off player id order for determinism

    def pose_key(self, u: int, slot: int) -> tuple:
        sc = self.scenario
        x, y = self.positions[slot, u]
        az = float(self.azimuths[slot, u]) % (2 * math.pi)
        n_bins = max(1, int(round(360.0 / sc.azimuth_bin_deg)))
        return (int(round(x / sc.pose_grid)), int(round(y / sc.pose_grid)),
                int(az / (2 * math.pi) * n_bins) % n_bins)


def generate_trajectories(sc: Scenario, pods: np.ndarray, horizon: int,
                          rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random-waypoint positions inside each player's pod and a Gaussian
    random-walk head azimuth, precomputed for the whole run plus the prediction
    window (pose prediction is exact look-ahead into these arrays)."""
    n = sc.n_players
    pos = np.empty((max(horizon, 1), n, 2), dtype=np.float64)
    rows, cols = sc.pod_grid
    half = min(sc.pod_size, sc.arena_width / cols, sc.arena_depth / rows) / 2.0
    for u in range(n):
        center = sc.pod_centers[pods[u]]
        cur = center.copy()
        filled = 0
        pos[0, u] = cur
        filled = 1
        while filled < horizon:
            waypoint = center + rng.uniform(-half, half, size=2)
            speed = rng.uniform(0.3, 1.0) * sc.max_speed
            dist = float(np.linalg.norm(waypoint - cur))
            steps = max(1, int(math.ceil(dist / (speed * sc.slot_duration))))
            take = min(steps, horizon - filled)
            frac = (np.arange(1, take + 1) / steps)[:, None]
            pos[filled:filled + take, u] = cur + frac * (waypoint - cur)
            filled += take
            cur = waypoint.copy() if take == steps else pos[filled - 1, u].copy()
    az0 = rng.uniform(-math.pi, math.pi, size=n)
    steps = rng.normal(0.0, math.radians(sc.azimuth_sigma_deg), size=(max(horizon - 1, 0), n))
    az = np.vstack([az0[None, :], az0[None, :] + np.cumsum(steps, axis=0)]) if horizon > 1 else az0[None, :]
    return pos, wrap_angle(az)


def _tick_phase(u: int, period: int) -> int:
    return u % period


def step(state: SimulationState, sink: TraceSink | None = None) -> tuple[SimulationState, list[DeliveryRecord]]:
    """Advance one slot; returns the state and the records emitted this slot."""
    sc = state.scenario
    k = state.slot
    t = state.t
    dt = sc.slot_duration
    slot_end = (k + 1) * dt
    records: list[DeliveryRecord] = []

    # (1) mobility: poses come from the precomputed trajectories
    for p in state.players:
        prev = p.position[:2].copy()
        p.position[0], p.position[1] = state.positions[k, p.id]
        p.head_azimuth = float(state.azimuths[k, p.id])
        p.velocity = float(np.linalg.norm(p.position[:2] - prev)) / dt if k > 0 else 0.0

    # servers run continuously; collect everything finished by this slot's start
    for task, finish in state.pool.advance(t):
        _handle_completion(state, task, finish)

    # expire cached frames whose target slot has passed (validity horizon)
    state.counters["expired"] += state.cache.expire(k)

    new_requests: list[FrameTask] = []

    # (2) impulse actions: learn popularity, invalidate stale frames, trigger re-renders
    arrivals = sample_arrivals(sc.action_intensity, dt, state.catalog, sc.n_players,
                               state.rng_workload)
    for action, offset in arrivals:
        state.counters["actions"] += 1
        update_popularity(state.popularity, action)
        affected = state.catalog.affected_sets[action]
        for u in affected:
            state.players[int(u)].ctx = mix_context(state.players[int(u)].ctx, action)
        ctx_map = {int(u): state.players[int(u)].ctx for u in affected}
        n_inv, dropped = invalidate_on_action(action, affected, ctx_map, state.cache, state.pool)
        for task in dropped:
            state.in_flight.pop(task.cache_key, None)
        state.counters["invalidated"] += n_inv + len(dropped)
        state.counters["stale_proactive"] += len(dropped)
        for u in affected:
            p = state.players[int(u)]
            if p.pending is None:
                new_requests.append(_make_request(state, p, t + offset))

    # (3) periodic frame requests at the player's cadence, one pending at a time
    period = sc.frame_period_slots
    for p in state.players:
        if p.pending is None and k % period == _tick_phase(p.id, period):
            new_requests.append(_make_request(state, p, t))

    # (4) serve each request: exact cache hit or queue on the edge pool. A render
    # whose projected completion already overshoots the frame deadline is not
    # admitted at all: the frame will fall back locally either way, and burning a
    # server on it would starve frames that can still make their deadline.
    for task in sorted(new_requests, key=lambda r: (r.request_time, r.player)):
        pending = state.players[task.player].pending
        projection = min(s.projected_completion(task, task.request_time) for s in state.pool.servers)
        if state.cache.lookup(task.cache_key) is None and projection > task.deadline:
            state.counters["hopeless"] += 1
            if sink and sink.compute:
                sink.compute.writerow([k, task.cls, task.player, f"{projection - task.request_time:.6f}",
                                       0, state.counters["invalidated"]])
            continue
        source, d_comp_proj = serve_frame(task, state.cache, state.pool, task.request_time)
        pending.source = source
        if source == CACHE_HIT:
            pending.ready_time = task.request_time
            pending.remaining_bits = task.hd_size
            state.counters["cache_hits"] += 1
        if sink and sink.compute:
            sink.compute.writerow([k, task.cls, task.player, f"{d_comp_proj:.6f}",
                                   int(source == CACHE_HIT), state.counters["invalidated"]])

    # (5) proactive planning (skipped by the reactive baseline)
    if sc.scheme != "Baseline1" and sc.cache_capacity > 0 and sc.prediction_window > 0:
        ticks = _predicted_ticks(state, k)
        if ticks:
            plan = proactive_plan(ticks, {p.id: p.ctx for p in state.players}, state.popularity,
                                  state.catalog.theta, state.cache, state.pool,
                                  set(state.in_flight), t, top_k=sc.top_k_actions,
                                  compute_demand=sc.compute_demand, hd_size=sc.hd_size)
            enqueue_tasks(state.pool, plan, t)
            for task in plan:
                state.in_flight[task.cache_key] = task

    # (6)-(8) downlink: link budgets, matching, transmission
    ready_users = sorted(p.id for p in state.players
                         if p.pending is not None and p.pending.ready_time is not None
                         and p.pending.ready_time <= t)
    achieved: dict[int, float] = {}
    if ready_users and sc.n_aps > 0:
        achieved = _downlink(state, ready_users, records, sink)
    # the smoothed average tracks delivered service rate: slots without a
    # transmission count as zero, so under-served players become MC-eligible
    beta = sc.avg_rate_smoothing
    for p in state.players:
        p.avg_rate = (1 - beta) * p.avg_rate + beta * achieved.get(p.id, 0.0)

    # frames that missed the deadline fall back to local low-resolution rendering
    for p in state.players:
        pending = p.pending
        if pending is None or pending.task.deadline > slot_end - 1e-12:
            continue
        task = pending.task
        deadline = task.deadline
        if pending.ready_time is None:
            d_comp, d_comm = deadline - task.request_time, 0.0
            state.pool.remove_queued(task)
        else:
            d_comp = pending.ready_time - task.request_time
            d_comm = deadline - pending.ready_time
        frag = local_fallback(task, d_comp, d_comm)
        records.append(DeliveryRecord(player=p.id, frame_index=task.frame_index,
                                      d_comp=frag["d_comp"], d_comm=frag["d_comm"], hd=False,
                                      serving_set_size=pending.serving_size,
                                      slot=task.request_slot))
        state.counters["fallen_back"] += 1
        p.pending = None

    # (9) advance the clock
    state.slot = k + 1
    state.t = state.slot * dt
    return state, records


def _make_request(state: SimulationState, p: PlayerState, req_time: float) -> FrameTask:
    sc = state.scenario
    task = FrameTask(player=p.id, frame_index=p.frame_counter, pose_key=state.pose_key(p.id, state.slot),
                     ctx=p.ctx, cls=REAL_TIME, compute_demand=sc.compute_demand, hd_size=sc.hd_size,
                     deadline=req_time + sc.d_th, request_time=req_time, request_slot=state.slot)
    p.frame_counter += 1
    p.pending = PendingFrame(task=task)
    state.counters["spawned"] += 1
    return task


def _handle_completion(state: SimulationState, task: FrameTask, finish: float) -> None:
    if task.cls == PROACTIVE:
        state.in_flight.pop(task.cache_key, None)
        if finish > task.deadline:
            # rendered too late for its target slot (a tighter task cut in)
            state.counters["stale_proactive"] += 1
            return
        state.cache.insert(task.cache_key,
                           CacheEntry(player=task.player, ctx=task.ctx, utility=task.utility,
                                      insert_slot=state.slot, expiry_slot=task.target_slot))
        return
    # real-time render done: hand the frame to the radio unless it was abandoned
    pending = state.players[task.player].pending
    if pending is None or pending.task is not task:
        return
    pending.ready_time = finish
    pending.remaining_bits = task.hd_size
    task.status = READY


def _predicted_ticks(state: SimulationState, k: int) -> list[PredictedTick]:
    sc = state.scenario
    period = sc.frame_period_slots
    ticks = []
    for p in state.players:
        phase = _tick_phase(p.id, period)
        first = k + 1 + (phase - (k + 1)) % period
        for tick_slot in range(first, k + sc.prediction_window + 1, period):
            ticks.append(PredictedTick(player=p.id, slot=tick_slot, time=tick_slot * sc.slot_duration,
                                       pose_key=state.pose_key(p.id, tick_slot)))
    return ticks


def _downlink(state: SimulationState, ready_users: list[int], records: list[DeliveryRecord],
              sink: TraceSink | None) -> dict[int, float]:
    sc = state.scenario
    k, t, dt = state.slot, state.t, sc.slot_duration
    slot_end = (k + 1) * dt
    aps_xy = state.ap_positions[:, :2]
    ap_ids = list(range(sc.n_aps))

    users = ready_users
    U, A = len(users), sc.n_aps
    player_xy = np.array([state.players[u].position[:2] for u in users])
    player_pos = np.array([state.players[u].position for u in users])
    heads = np.array([state.players[u].head_azimuth for u in users])
    bodies = state.positions[k]                       # all players block, (n_players, 2)

    dist3d = np.linalg.norm(state.ap_positions[None, :, :] - player_pos[:, None, :], axis=-1)
    starts = np.repeat(player_xy, A, axis=0)
    ends = np.tile(aps_xy, (U, 1))
    exclude = np.zeros((U * A, bodies.shape[0]), dtype=bool)
    for i, u in enumerate(users):
        exclude[i * A:(i + 1) * A, u] = True
    body_blocked = bodies_block_segments(starts, ends, bodies, sc.body_radius, exclude).reshape(U, A)
    self_blocked = self_blockage(player_xy, aps_xy, heads, sc.self_block_cone)
    blocked = body_blocked | self_blocked
    pl = path_loss_db(dist3d, sc.carrier_freq, blocked, sc.blockage_loss)
    # serving links are ideally beam-aligned: mainlobe gain at both ends
    prx = sc.tx_power - pl + 2.0 * sc.antenna.mainlobe_gain_db          # (U, A) dBm
    snr_rates = {u: {a: achievable_rate(prx[i, a] - state.noise_dbm, sc.bandwidth)
                     for a in ap_ids} for i, u in enumerate(users)}
    if sink and sink.links:
        for i, u in enumerate(users):
            for a in ap_ids:
                snr = prx[i, a] - state.noise_dbm
                sink.links.writerow([k, u, a, int(blocked[i, a]), f"{snr:.3f}",
                                     f"{snr_rates[u][a]:.1f}"])

    slacks = {u: state.players[u].pending.task.deadline - t for u in users}
    profile = build_preferences(slacks, snr_rates, ap_ids)
    matching = deferred_acceptance(profile)
    if sc.scheme == "Proposed":
        matched_aps = {a for aps in matching.serving.values() for a in aps}
        spare = [a for a in ap_ids if a not in matched_aps]
        avg_rates = {u: state.players[u].avg_rate for u in users}
        before = {u: len(aps) for u, aps in matching.serving.items()}
        matching = mc_augment(matching, avg_rates, sc.mc_rate_threshold, spare,
                              {u: {a: prx[i, a] for a in ap_ids} for i, u in enumerate(users)},
                              min_gain_db=sc.mc_min_gain_db)
        for u, aps in matching.serving.items():
            if len(aps) > before[u]:
                state.counters["mc_grants"] += 1
            elif avg_rates[u] < sc.mc_rate_threshold and len(aps) == 1:
                state.counters["mc_starved"] += 1

    idx = {u: i for i, u in enumerate(users)}
    ap_of_user = {}
    for u, aps in matching.serving.items():
        for a in aps:
            ap_of_user[a] = u
    active_aps = sorted(ap_of_user)

    # azimuths for interference beam offsets
    az_player_to_ap = np.arctan2(aps_xy[None, :, 1] - player_xy[:, None, 1],
                                 aps_xy[None, :, 0] - player_xy[:, None, 0])
    achieved: dict[int, float] = {}
    for u in sorted(matching.serving):
        i = idx[u]
        serving = matching.serving[u]
        serving_dbm = [float(prx[i, a]) for a in serving]
        primary = serving[int(np.argmax(serving_dbm))]
        interferers = []
        for b in active_aps:
            if b in serving:
                continue
            v = ap_of_user[b]
            # transmitter beam points at its own user; receiver beam at the primary AP
            tx_off = _ap_beam_offset(state, b, v, u, az_player_to_ap, idx)
            rx_off = az_player_to_ap[i, b] - az_player_to_ap[i, primary]
            g = antenna_gain_db(tx_off, sc.antenna) + antenna_gain_db(rx_off, sc.antenna)
            interferers.append(sc.tx_power - float(pl[i, b]) + g)
        snr = sinr_db(serving_dbm, interferers, state.noise_dbm)
        rate = achievable_rate(snr, sc.bandwidth)
        pending = state.players[u].pending
        pending.serving_size = len(serving)
        pending.remaining_bits -= rate * dt
        achieved[u] = rate
        if sink and sink.matching:
            sink.matching.writerow([k, u, "|".join(map(str, serving)),
                                    f"{slacks[u] * 1e3:.3f}", f"{rate:.1f}"])
        if pending.remaining_bits <= 1e-9 and slot_end <= pending.task.deadline + 1e-12:
            task = pending.task
            task.status = DELIVERED
            records.append(DeliveryRecord(player=u, frame_index=task.frame_index,
                                          d_comp=pending.ready_time - task.request_time,
                                          d_comm=slot_end - pending.ready_time, hd=True,
                                          serving_set_size=len(serving),
                                          slot=task.request_slot))
            state.counters["delivered"] += 1
            state.players[u].pending = None
    return achieved


def _ap_beam_offset(state, b, served_user, victim, az_player_to_ap, idx) -> float:
    if served_user in idx and victim in idx:
        az_b_to_v = az_player_to_ap[idx[served_user], b] + math.pi
        az_b_to_u = az_player_to_ap[idx[victim], b] + math.pi
        return az_b_to_u - az_b_to_v
    return math.pi


def run_replication(scenario: Scenario, replication: int,
                    sink: TraceSink | None = None) -> list[DeliveryRecord]:
    """One full run with a fresh topology; warm-up records are excluded."""
    state = SimulationState(scenario, replication)
    records: list[DeliveryRecord] = []
    for _ in range(scenario.n_slots):
        state, new = step(state, sink)
        records.extend(new)
    warmup = scenario.warmup_slots
    return [r for r in records if r.slot >= warmup]


def nearest_rank_percentile(values, q: float) -> float:
    """Nearest-rank percentile: the ceil(q*n)-th smallest value."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("values must be non-empty")
    rank = max(1, math.ceil(q / 100.0 * len(ordered)))
    return float(ordered[rank - 1])


def margin_of_error(replication_means) -> float:
    """Half-width of the 99% confidence interval: 2.576 * s / sqrt(n)."""
    means = np.asarray(list(replication_means), dtype=np.float64)
    if means.size < 2:
        raise ValueError("need at least two replication means")
    s = float(np.std(means, ddof=1))
    return 2.576 * s / math.sqrt(means.size)


def compute_metrics(records, reliability_threshold: float, d_th: float, epsilon: float, *,
                    hd_size: float | None = None, fps: float | None = None,
                    replication_means_s=None, n_replications: int = 1) -> MetricsSummary:
    """Aggregate delivery records into the summary metrics.

    Reliability is the fraction of HD-delivered frames whose communication delay
    stayed below the threshold. The mean service rate is the HD stream rate a
    player actually sustains: frame size times cadence times the HD success
    ratio, so every fallback frame is service the network failed to deliver.
    """
    records = list(records)
    if not records:
        raise ValueError("records must be non-empty")
    totals = [r.d_total for r in records]
    comps = [r.d_comp for r in records]
    comms = [r.d_comm for r in records]
    hd = [r for r in records if r.hd]
    reliability = (sum(1 for r in hd if r.d_comm < reliability_threshold) / len(hd)) if hd else 0.0
    # tail latency is a property of experienced (delivered) frames; abandoned
    # frames carry censored partial delays and would pin the percentile to the
    # deadline-truncation atom
    tail_pool = [r.d_comm for r in hd] if hd else comms
    if hd_size is not None and fps is not None:
        mean_rate = hd_size * fps * (len(hd) / len(records))
    else:
        mean_rate = float("nan")
    rep_means_ms = tuple(m * 1e3 for m in (replication_means_s or ()))
    me = margin_of_error(rep_means_ms) if len(rep_means_ms) >= 2 else 0.0
    return MetricsSummary(
        mean_total_ms=float(np.mean(totals)) * 1e3,
        mean_comp_ms=float(np.mean(comps)) * 1e3,
        mean_comm_ms=float(np.mean(comms)) * 1e3,
        p99_comm_ms=nearest_rank_percentile(tail_pool, 99) * 1e3,
        reliability=reliability,
        mean_rate_bps=mean_rate,
        hd_success=len(hd) / len(records),
        replication_means_ms=rep_means_ms,
        margin_of_error_ms=me,
        n_records=len(records),
        n_replications=n_replications,
    )


def _replication_worker(args) -> list[DeliveryRecord]:
    scenario, rep = args
    return run_replication(scenario, rep)


def run_experiment(scenario: Scenario, max_workers: int | None = None,
                   sink: TraceSink | None = None) -> MetricsSummary:
    """Run all replications (in parallel when allowed) and aggregate, with the
    99% margin of error computed over per-replication mean total delays.

    When a trace sink is given the run is serial and only replication 0 is traced.
    """
    if scenario.n_replications < 2:
        raise ValueError("n_replications must be >= 2")
    reps = range(scenario.n_replications)
    if sink is not None:
        all_records = [run_replication(scenario, r, sink if r == 0 else None) for r in reps]
    elif max_workers is not None and max_workers <= 1:
        all_records = [run_replication(scenario, r) for r in reps]
    else:
        workers = max_workers or os.cpu_count() or 1
        workers = min(workers, scenario.n_replications)
        if workers <= 1:
            all_records = [run_replication(scenario, r) for r in reps]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                all_records = list(pool.map(_replication_worker, [(scenario, r) for r in reps]))
    pooled = [r for recs in all_records for r in recs]
    rep_means = [float(np.mean([r.d_total for r in recs])) for recs in all_records if recs]
    return compute_metrics(pooled, scenario.reliability_threshold, scenario.d_th, scenario.epsilon,
                           hd_size=scenario.hd_size, fps=scenario.fps,
                           replication_means_s=rep_means,
                           n_replications=scenario.n_replications)


def results_row(scenario: Scenario, summary: MetricsSummary) -> dict:
    """One results-CSV row in the declared column order."""
    return {
        "scheme": scenario.scheme,
        "n_players": scenario.n_players,
        "cache_capacity": scenario.cache_capacity,
        "action_intensity": f"{scenario.action_intensity:g}",
        "d_th_ms": f"{scenario.d_th * 1e3:g}",
        "mean_total_ms": f"{summary.mean_total_ms:.6f}",
        "mean_comp_ms": f"{summary.mean_comp_ms:.6f}",
        "mean_comm_ms": f"{summary.mean_comm_ms:.6f}",
        "p99_comm_ms": f"{summary.p99_comm_ms:.6f}",
        "reliability": f"{summary.reliability:.6f}",
        "mean_rate_gbps": f"{summary.mean_rate_bps / 1e9:.6f}",
        "hd_success": f"{summary.hd_success:.6f}",
        "me_ms": f"{summary.margin_of_error_ms:.6f}",
        "n_replications": summary.n_replications,
        "seed": scenario.seed,
    }
