"""Edge compute pool and frame cache.

Servers run one frame at a time, non-preemptively, pulling from priority queues
where every real-time task outranks every proactive task and ties within a class
break earliest-deadline-first. Idle servers steal waiting work so no server sits
idle while a task is queued anywhere. The cache holds proactively rendered frames
keyed by (player, quantized pose, action context); impulse actions invalidate all
entries whose context predates them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

REAL_TIME = "RealTime"
PROACTIVE = "Proactive"

QUEUED = "Queued"
COMPUTING = "Computing"
CACHED = "Cached"
READY = "Ready"
DELIVERED = "Delivered"
FALLEN_BACK = "FallenBack"

CACHE_HIT = "CacheHit"
COMPUTED = "Computed"

_task_seq = itertools.count()


@dataclass
class FrameTask:
    """One video-frame work item."""

    player: int
    frame_index: int
    pose_key: tuple
    ctx: int                      # action-context hash the frame content depends on
    cls: str                      # REAL_TIME or PROACTIVE
    compute_demand: float         # seconds of one server
    hd_size: float                # bits
    deadline: float               # absolute seconds; proactive: the slot it is needed
    request_time: float = 0.0
    request_slot: int = 0
    target_slot: int = -1         # proactive only
    utility: float = 0.0          # proactive ranking weight
    status: str = QUEUED
    seq: int = field(default_factory=lambda: next(_task_seq))

    def sort_key(self) -> tuple:
        return (0 if self.cls == REAL_TIME else 1, self.deadline, self.seq)

    @property
    def cache_key(self) -> tuple:
        return (self.player, self.pose_key, self.ctx)


@dataclass
class CacheEntry:
    player: int
    ctx: int
    utility: float
    insert_slot: int
    expiry_slot: int = -1         # slot the frame was rendered for; -1 = no expiry


class FrameCache:
    """Fixed-capacity store of rendered frames with utility-based eviction."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.entries: dict[tuple, CacheEntry] = {}
        self._by_player: dict[int, set[tuple]] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: tuple) -> bool:
        return key in self.entries

    def lookup(self, key: tuple) -> CacheEntry | None:
        return self.entries.get(key)

    def free_space(self) -> int:
        return self.capacity - len(self.entries)

    def min_utility(self) -> float | None:
        if not self.entries:
            return None
        return min(e.utility for e in self.entries.values())

    def would_accept(self, utility: float) -> bool:
        if self.capacity == 0:
            return False
        if len(self.entries) < self.capacity:
            return True
        return self.min_utility() < utility

    def insert(self, key: tuple, entry: CacheEntry) -> bool:
        """Store an entry, evicting the lowest-utility one (oldest first on ties)
        when full. Returns False if the entry lost the eviction comparison."""
        if self.capacity == 0:
            return False
        if key in self.entries:
            self._drop(key)
        if len(self.entries) >= self.capacity:
            victim = min(self.entries.items(), key=lambda kv: (kv[1].utility, kv[1].insert_slot, kv[0]))
            if victim[1].utility >= entry.utility:
                return False
            self._drop(victim[0])
        self.entries[key] = entry
        self._by_player.setdefault(entry.player, set()).add(key)
        return True

    def _drop(self, key: tuple) -> None:
        entry = self.entries.pop(key)
        self._by_player[entry.player].discard(key)

    def remove_stale_for_player(self, player: int, keep_ctx: int) -> int:
        """Drop every entry of this player whose action context is not keep_ctx."""
        stale = [k for k in self._by_player.get(player, ()) if self.entries[k].ctx != keep_ctx]
        for k in stale:
            self._drop(k)
        return len(stale)

    def expire(self, slot: int) -> int:
        """Drop entries rendered for a slot that already passed (validity horizon)."""
        dead = [k for k, e in self.entries.items() if 0 <= e.expiry_slot < slot]
        for k in dead:
            self._drop(k)
        return len(dead)


class MecServer:
    def __init__(self, server_id: int):
        self.id = server_id
        self.in_service: FrameTask | None = None
        self.free_at = 0.0
        self.queue: list[FrameTask] = []   # kept sorted by task.sort_key()

    def queued_work(self) -> float:
        return sum(t.compute_demand for t in self.queue)

    def projected_completion(self, task: FrameTask, now: float) -> float:
        """Completion estimate per the queue model: busy-until plus all queued
        work plus the task's own demand. Later arrivals with tighter deadlines
        may still cut in, so the realized time can exceed this."""
        base = self.free_at if self.in_service is not None else now
        return max(base, now) + self.queued_work() + task.compute_demand

    def _insert(self, task: FrameTask) -> None:
        key = task.sort_key()
        lo, hi = 0, len(self.queue)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.queue[mid].sort_key() <= key:
                lo = mid + 1
            else:
                hi = mid
        self.queue.insert(lo, task)
        task.status = QUEUED


class MecPool:
    """Identical servers fed by per-server priority queues with idle stealing."""

    def __init__(self, n_servers: int):
        self.servers = [MecServer(i) for i in range(n_servers)]

    def enqueue(self, task: FrameTask, now: float) -> float:
        """Assign to the server with the earliest projected completion; starts
        immediately on an idle server. Returns the projected completion time."""
        best = min(self.servers, key=lambda s: (s.projected_completion(task, now), s.id))
        projection = best.projected_completion(task, now)
        if best.in_service is None and not best.queue:
            self._start(best, task, now)
        else:
            best._insert(task)
        return projection

    def _start(self, server: MecServer, task: FrameTask, at: float) -> None:
        server.in_service = task
        # a task can never start before it was requested (mid-slot arrivals)
        server.free_at = max(at, task.request_time) + task.compute_demand
        task.status = COMPUTING

    def _best_waiting(self) -> tuple[MecServer, FrameTask] | None:
        best: tuple[tuple, MecServer, FrameTask] | None = None
        for s in self.servers:
            if s.queue:
                k = s.queue[0].sort_key()
                if best is None or k < best[0]:
                    best = (k, s, s.queue[0])
        if best is None:
            return None
        return best[1], best[2]

    def advance(self, now: float) -> list[tuple[FrameTask, float]]:
        """Run the pool forward to `now`; returns (task, finish_time) completions
        in event order. Freed servers immediately pull the globally best waiting
        task (own queue or stolen), so no server idles while work waits."""
        done: list[tuple[FrameTask, float]] = []
        while True:
            busy = [s for s in self.servers if s.in_service is not None and s.free_at <= now]
            if not busy:
                break
            s = min(busy, key=lambda x: (x.free_at, x.id))
            t_free = s.free_at
            done.append((s.in_service, t_free))
            s.in_service = None
            waiting = self._best_waiting()
            if waiting is not None:
                owner, task = waiting
                owner.queue.remove(task)
                self._start(s, task, t_free)
        # defensive: an idle server never coexists with waiting work outside this loop
        for s in self.servers:
            if s.in_service is None:
                waiting = self._best_waiting()
                if waiting is None:
                    break
                owner, task = waiting
                owner.queue.remove(task)
                self._start(s, task, now)
        return done

    def remove_queued(self, task: FrameTask) -> bool:
        """Drop a task that is still waiting; in-service tasks are never preempted."""
        for s in self.servers:
            if task in s.queue:
                s.queue.remove(task)
                return True
        return False

    def remove_stale_proactive(self, player: int, keep_ctx: int) -> list[FrameTask]:
        """Drop queued proactive tasks of this player whose context is not keep_ctx."""
        removed = []
        for s in self.servers:
            stale = [t for t in s.queue if t.cls == PROACTIVE and t.player == player and t.ctx != keep_ctx]
            for t in stale:
                s.queue.remove(t)
                removed.append(t)
        return removed

    def idle_exists(self) -> bool:
        return any(s.in_service is None and not s.queue for s in self.servers)

    def queued_realtime_anywhere(self) -> bool:
        return any(t.cls == REAL_TIME for s in self.servers for t in s.queue)


def enqueue_tasks(pool: MecPool, tasks: list[FrameTask], now: float) -> list[float]:
    """Assign each task to the earliest-completing server; real-time work is
    always ordered ahead of proactive work, earliest deadline first within class.
    Returns the projected completion time per task."""
    return [pool.enqueue(t, now) for t in tasks]


def serve_frame(request: FrameTask, cache: FrameCache, pool: MecPool,
                now: float) -> tuple[str, float]:
    """Serve a real-time frame request: an exact cache-key match costs zero
    computing delay, otherwise the task joins the pool and the projected queueing
    plus rendering time is returned."""
    entry = cache.lookup(request.cache_key)
    if entry is not None:
        request.status = READY
        return CACHE_HIT, 0.0
    projection = pool.enqueue(request, now)
    return COMPUTED, projection - now


def invalidate_on_action(action: int, affected_players, player_ctx: dict[int, int],
                         cache: FrameCache, pool: MecPool) -> tuple[int, list[FrameTask]]:
    """Remove every cached or queued-proactive frame of an affected player whose
    action context predates the action. player_ctx must already hold the
    post-action context, so variants prefetched for this very action survive.
    Returns (number of cache entries dropped, dropped queued tasks)."""
    n_cache = 0
    dropped: list[FrameTask] = []
    for u in affected_players:
        u = int(u)
        n_cache += cache.remove_stale_for_player(u, player_ctx[u])
        dropped.extend(pool.remove_stale_proactive(u, player_ctx[u]))
    return n_cache, dropped


@dataclass(frozen=True)
class PredictedTick:
    """An upcoming frame-request instant of one player with its exact pose key."""

    player: int
    slot: int
    time: float
    pose_key: tuple


def proactive_plan(ticks: list[PredictedTick], player_ctx: dict[int, int],
                   popularity, theta, cache: FrameCache, pool: MecPool,
                   in_flight_keys: set, now: float, *, top_k: int,
                   compute_demand: float, hd_size: float) -> list[FrameTask]:
    """Pick proactive render jobs for upcoming predicted poses.

    For every predicted tick a no-action continuation frame is a candidate, plus
    one variant per top-k popular action that impacts the player. Candidates are
    ranked by expected utility (estimated probability mass; the continuation
    carries full mass), earliest tick first. A candidate is admitted only onto a
    server that is idle right now and can finish before the frame is needed: the
    job starts immediately and, being non-preemptive, can never be rendered late,
    so proactive work only ever soaks up true compute slack. Cache admission
    requires free space net of in-flight renders, or beating the cheapest cached
    entry. Keys already cached or in flight are never duplicated.
    """
    if cache.capacity == 0 or not ticks:
        return []
    idle = [s.id for s in pool.servers if s.in_service is None and not s.queue]
    if not idle:
        return []
    pmf = popularity.pmf()
    popular = [int(a) for a in popularity.top_k(top_k)]

    candidates: list[tuple[float, int, int, int, PredictedTick, int]] = []
    for tick in ticks:
        ctx = player_ctx[tick.player]
        candidates.append((1.0, tick.slot, tick.player, -1, tick, ctx))
        for rank, a in enumerate(popular):
            if theta[tick.player, a]:
                ctx_variant = mix_context(ctx, a)
                candidates.append((float(pmf[a]), tick.slot, tick.player, rank, tick, ctx_variant))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2], c[3]))

    reserved = len(in_flight_keys)
    finish = now + compute_demand
    plan: list[FrameTask] = []
    for utility, slot, player, _rank, tick, ctx in candidates:
        if not idle:
            break
        if finish > tick.time:
            continue
        key = (player, tick.pose_key, ctx)
        if key in cache or key in in_flight_keys:
            continue
        if cache.free_space() - reserved <= 0:
            cheapest = cache.min_utility()
            if cheapest is None or cheapest >= utility:
                continue
        idle.pop(0)
        reserved += 1
        in_flight_keys.add(key)
        plan.append(FrameTask(player=player, frame_index=-1, pose_key=tick.pose_key, ctx=ctx,
                              cls=PROACTIVE, compute_demand=compute_demand, hd_size=hd_size,
                              deadline=tick.time, request_time=now, target_slot=tick.slot,
                              utility=utility))
    return plan


def local_fallback(task: FrameTask, d_comp: float, d_comm: float) -> dict:
    """Mark a frame that missed its delivery deadline: the player renders a
    low-resolution version locally, so the game continues but the HD delivery
    counts as a failure."""
    task.status = FALLEN_BACK
    return {"hd": False, "d_comp": d_comp, "d_comm": d_comm}


def mix_context(ctx: int, action: int) -> int:
    """Deterministic context evolution when an action lands on a player."""
    return (ctx * 1_000_003 + action + 1) & 0xFFFFFFFFFFFF
