"""Event-driven simulation of the relay chain's tandem queues.

Packets are generated on [0, L] by a stationary arrival process, collected
by the nearest node, and forwarded hop by hop toward the sink.  Every hop is
a FIFO single-server queue whose service time is packet size over the hop's
rate; store-and-forward, no propagation delay.  Packets landing in the
sink's own catchment are delivered on arrival and never enter a queue.

The simulator exists to probe stability empirically: below the placement's
supportable load all queues settle, above it the total backlog grows at the
overload rate.  ``stability_probe`` classifies a grid of loads with the
least-squares drift test and reports where the empirical boundary sits.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import RateFunction
from .evaluate import TrafficModel
from .solver1d import Placement

__all__ = [
    "ARRIVAL_POISSON",
    "ARRIVAL_DETERMINISTIC",
    "SIZE_FIXED",
    "SIZE_EXPONENTIAL",
    "SimConfig",
    "QueueStats",
    "ProbePoint",
    "ProbeResult",
    "InconclusiveProbeError",
    "simulate",
    "is_stable",
    "stability_probe",
]

ARRIVAL_POISSON = "poisson"
ARRIVAL_DETERMINISTIC = "deterministic"
SIZE_FIXED = "fixed"
SIZE_EXPONENTIAL = "exponential"

DRIFT_SLOPE_FRACTION = 0.01   # stable iff total slope < fraction * packet rate
END_QUEUE_FACTOR = 100.0      # ... and end backlog <= factor * early average


class InconclusiveProbeError(RuntimeError):
    """Stability classification was not monotone across the probed loads."""

    def __init__(self, message: str, points=None):
        super().__init__(message)
        self.points = points or []


@dataclass(frozen=True)
class SimConfig:
    placement: Placement
    traffic: TrafficModel
    arrival_process: str = ARRIVAL_POISSON
    packet_size: str = SIZE_FIXED
    horizon_s: Optional[float] = None    # default: 1e6 packets worth of time
    warmup_s: Optional[float] = None     # default: 10% of the horizon
    seed: int | tuple = 0
    n_samples: int = 2048                # queue-length snapshots along the run
    record_trace: bool = False           # per-node arrival/departure id lists

    def __post_init__(self) -> None:
        if self.arrival_process not in (ARRIVAL_POISSON, ARRIVAL_DETERMINISTIC):
            raise ValueError(f"unknown arrival process {self.arrival_process!r}")
        if self.packet_size not in (SIZE_FIXED, SIZE_EXPONENTIAL):
            raise ValueError(f"unknown packet size model {self.packet_size!r}")
        if self.n_samples < 4:
            raise ValueError("n_samples must be >= 4")

    def resolved_window(self) -> tuple[float, float]:
        """Concrete (horizon_s, warmup_s) after defaults."""
        horizon = self.horizon_s
        if horizon is None:
            horizon = 1e6 / self.traffic.packet_rate
        warmup = 0.1 * horizon if self.warmup_s is None else self.warmup_s
        if not horizon > warmup >= 0.0:
            raise ValueError("need horizon_s > warmup_s >= 0")
        return float(horizon), float(warmup)


@dataclass(frozen=True)
class QueueStats:
    """Per-node backlog statistics over the post-warmup window."""

    time_avg_queue: np.ndarray    # time-weighted mean packets at each node
    end_queue: np.ndarray         # packets at each node at the horizon
    drift_slope: np.ndarray       # LSQ backlog growth per node [packets/s]
    total_drift_slope: float      # LSQ growth of the total backlog [packets/s]
    delivered: int
    generated: int
    duration_s: float
    warmup_s: float
    sample_times: np.ndarray
    queue_samples: np.ndarray     # (n_samples, N) backlog snapshots
    trace: Optional[dict] = field(default=None, repr=False)


def _lsq_slope(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares slope of y (columns) against t."""
    tc = t - t.mean()
    denom = float(tc @ tc)
    if denom == 0.0:
        return np.zeros(y.shape[1] if y.ndim > 1 else 1)
    return (tc @ y) / denom


def simulate(cfg: SimConfig, rate: RateFunction) -> QueueStats:
    """Run the tandem-queue simulation and summarize backlog behavior."""
    placement = cfg.placement
    traffic = cfg.traffic
    if abs(traffic.area_length - placement.length) > 1e-6 * placement.length:
        raise ValueError("traffic.area_length must match placement.length")
    n = placement.n
    lam = traffic.packet_rate
    mean_size = traffic.mean_data_size
    horizon, warmup = cfg.resolved_window()

    d = placement.distances
    link_rate = np.asarray(rate(d), dtype=float)
    if np.any(link_rate <= 0.0) or not np.all(np.isfinite(link_rate)):
        raise ValueError("every hop needs a positive, finite rate")
    inv_rate = (1.0 / link_rate).tolist()

    rng = np.random.default_rng(cfg.seed)

    # --- pre-generate the packet population (draw order fixed for determinism)
    if cfg.arrival_process == ARRIVAL_POISSON:
        chunks = []
        t_last = 0.0
        chunk = max(1024, int(lam * horizon * 1.1) + 64)
        while t_last <= horizon:
            cs = t_last + np.cumsum(rng.exponential(1.0 / lam, chunk))
            chunks.append(cs)
            t_last = float(cs[-1])
        times = np.concatenate(chunks)
        times = times[times <= horizon]
    else:
        times = np.arange(1.0, math.floor(lam * horizon) + 1.0) / lam
    m = times.size
    positions = rng.uniform(0.0, placement.length, m)
    if cfg.packet_size == SIZE_FIXED:
        sizes = np.full(m, mean_size)
    else:
        sizes = rng.exponential(mean_size, m)

    x = placement.positions
    boundaries = 0.5 * (x[:-1] + x[1:])
    owner = np.searchsorted(boundaries, positions, side="right")  # 0 = sink

    relay = owner > 0
    sink_delivered = int(m - relay.sum())
    ext_times = times[relay]
    ext_nodes = owner[relay].tolist()
    ext_sizes = sizes[relay].tolist()
    ext_t = ext_times.tolist()
    n_ext = len(ext_t)

    # --- state
    counts = [0] * (n + 1)          # packets at each node (waiting + in service)
    busy = [False] * (n + 1)
    queues = [deque() for _ in range(n + 1)]   # waiting packet sizes
    acc = [0.0] * (n + 1)           # time integral of counts
    last_t = [0.0] * (n + 1)
    warm_acc = None
    delivered_relay = 0
    in_system = 0
    processed = 0
    heap: list = []
    seq = 0
    trace_arr = [[] for _ in range(n + 1)] if cfg.record_trace else None
    trace_dep = [[] for _ in range(n + 1)] if cfg.record_trace else None
    ids_enabled = cfg.record_trace

    sample_t = np.linspace(0.0, horizon, cfg.n_samples)
    samples = np.zeros((cfg.n_samples, n), dtype=float)
    sp = 0
    stimes = sample_t.tolist()

    hpush = heapq.heappush
    hpop = heapq.heappop
    inf = math.inf

    def snapshot_warm(at: float) -> list:
        return [acc[i] + counts[i] * (at - last_t[i]) for i in range(n + 1)]

    ei = 0
    while True:
        t_ext = ext_t[ei] if ei < n_ext else inf
        t_dep = heap[0][0] if heap else inf
        t = t_ext if t_ext <= t_dep else t_dep
        if t is inf or t > horizon:
            break
        while sp < cfg.n_samples and stimes[sp] <= t:
            samples[sp] = counts[1:]
            sp += 1
        if warm_acc is None and t > warmup:
            warm_acc = snapshot_warm(warmup)
        if t_ext <= t_dep:
            # external arrival of packet ei at node nd
            nd = ext_nodes[ei]
            size = ext_sizes[ei]
            pk = ei
            ei += 1
            processed += 1
            in_system += 1
            acc[nd] += counts[nd] * (t - last_t[nd])
            last_t[nd] = t
            counts[nd] += 1
            if ids_enabled:
                trace_arr[nd].append(pk)
            if busy[nd]:
                queues[nd].append((size, pk))
            else:
                busy[nd] = True
                seq += 1
                hpush(heap, (t + size * inv_rate[nd - 1], seq, nd, size, pk))
        else:
            _, _, nd, size, pk = hpop(heap)
            acc[nd] += counts[nd] * (t - last_t[nd])
            last_t[nd] = t
            counts[nd] -= 1
            if ids_enabled:
                trace_dep[nd].append(pk)
            if nd == 1:
                delivered_relay += 1
                in_system -= 1
            else:
                nx = nd - 1
                acc[nx] += counts[nx] * (t - last_t[nx])
                last_t[nx] = t
                counts[nx] += 1
                if ids_enabled:
                    trace_arr[nx].append(pk)
                if busy[nx]:
                    queues[nx].append((size, pk))
                else:
                    busy[nx] = True
                    seq += 1
                    hpush(heap, (t + size * inv_rate[nx - 1], seq, nx, size, pk))
            q = queues[nd]
            if q:
                nsize, npk = q.popleft()
                seq += 1
                hpush(heap, (t + nsize * inv_rate[nd - 1], seq, nd, nsize, npk))
            else:
                busy[nd] = False
        if processed != delivered_relay + in_system:
            raise AssertionError("packet conservation violated")  # pragma: no cover

    # --- flush to the horizon
    while sp < cfg.n_samples:
        samples[sp] = counts[1:]
        sp += 1
    if warm_acc is None:
        warm_acc = snapshot_warm(warmup)
    final_acc = [acc[i] + counts[i] * (horizon - last_t[i]) for i in range(n + 1)]
    span = horizon - warmup
    time_avg = np.array([(final_acc[i] - warm_acc[i]) / span for i in range(1, n + 1)])
    end_queue = np.array(counts[1:], dtype=float)

    post = sample_t >= warmup
    drift = np.asarray(_lsq_slope(sample_t[post], samples[post]), dtype=float)
    total_drift = float(drift.sum())  # slope is linear, so totals add

    trace = None
    if cfg.record_trace:
        trace = {
            "arrivals": [list(a) for a in trace_arr[1:]],
            "departures": [list(dp) for dp in trace_dep[1:]],
        }
    return QueueStats(
        time_avg_queue=time_avg,
        end_queue=end_queue,
        drift_slope=drift,
        total_drift_slope=total_drift,
        delivered=sink_delivered + delivered_relay,
        generated=int(m),
        duration_s=horizon,
        warmup_s=warmup,
        sample_times=sample_t,
        queue_samples=samples,
        trace=trace,
    )


def is_stable(stats: QueueStats, packet_rate: float) -> bool:
    """Drift test: total backlog slope under 1% of the packet rate, with an
    end-backlog backstop against slow late growth."""
    if stats.total_drift_slope >= DRIFT_SLOPE_FRACTION * packet_rate:
        return False
    post = stats.sample_times >= stats.warmup_s
    totals = stats.queue_samples[post].sum(axis=1)
    quarter = max(1, totals.size // 4)
    early_avg = float(totals[:quarter].mean())
    end_total = float(stats.end_queue.sum())
    return end_total <= END_QUEUE_FACTOR * max(early_avg, 1e-9)


@dataclass(frozen=True)
class ProbePoint:
    q: float
    stable: bool
    total_drift_slope: float
    end_backlog: float


@dataclass(frozen=True)
class ProbeResult:
    q_stable: Optional[float]     # largest probed load classified stable
    q_unstable: Optional[float]   # smallest probed load classified unstable
    points: tuple


def stability_probe(placement: Placement, rate: RateFunction, q_grid,
                    *, mean_data_size: float = 1e5,
                    horizon_packets: int = 50_000, warmup_frac: float = 0.1,
                    seed: int = 1, arrival_process: str = ARRIVAL_POISSON,
                    packet_size: str = SIZE_FIXED) -> ProbeResult:
    """Simulate each load in an ascending grid and locate the empirical boundary."""
    q_grid = [float(q) for q in q_grid]
    if not q_grid:
        raise ValueError("q_grid must not be empty")
    if any(b <= a for a, b in zip(q_grid, q_grid[1:])):
        raise ValueError("q_grid must be strictly increasing")
    if any(q <= 0 for q in q_grid):
        raise ValueError("loads must be > 0")
    points = []
    for i, q in enumerate(q_grid):
        lam = q * placement.length / mean_data_size
        horizon = horizon_packets / lam
        cfg = SimConfig(
            placement=placement,
            traffic=TrafficModel(packet_rate=lam, mean_data_size=mean_data_size,
                                 area_length=placement.length),
            arrival_process=arrival_process,
            packet_size=packet_size,
            horizon_s=horizon,
            warmup_s=warmup_frac * horizon,
            seed=(seed, i),
        )
        stats = simulate(cfg, rate)
        points.append(ProbePoint(q=q, stable=is_stable(stats, lam),
                                 total_drift_slope=stats.total_drift_slope,
                                 end_backlog=float(stats.end_queue.sum())))
    flags = [p.stable for p in points]
    # all stable loads must precede all unstable ones
    if any(a < b for a, b in zip(flags, flags[1:])):
        raise InconclusiveProbeError(
            "stability classification is not monotone across the load grid; "
            "lengthen the horizon", points)
    stable_qs = [p.q for p in points if p.stable]
    unstable_qs = [p.q for p in points if not p.stable]
    return ProbeResult(
        q_stable=max(stable_qs) if stable_qs else None,
        q_unstable=min(unstable_qs) if unstable_qs else None,
        points=tuple(points),
    )
