"""Monte Carlo validation: parallel non-preemptive FCFS exponential queues
with Bernoulli routing of a common Poisson arrival stream.

The simulation is exact in distribution but vectorized: per-server FCFS
departure times follow the Lindley-style recurrence
D_k = max(A_k, D_{k-1}) + S_k, computed with a cumulative-max identity,
and the combined AoI sawtooth area is integrated in closed form between
informative departures.  Same seed, same result, regardless of how
replicates are scheduled.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import SystemConfig


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: system, run length, seed, measurement knobs."""

    system: SystemConfig
    packets: int = 1_000_000
    seed: int = 0
    warmup_fraction: float = 0.1
    histogram_bins: int = 200
    histogram_range: float | None = None  # None: 10x the crude mean guess
    histogram_samples: int = 10_000
    keep_trace: bool = False

    def __post_init__(self):
        if self.packets < 1:
            raise ValueError("packets must be >= 1")
        if not (0.0 <= self.warmup_fraction < 1.0):
            raise ValueError("warmup_fraction must be in [0, 1)")
        if self.histogram_bins < 1:
            raise ValueError("histogram_bins must be positive")
        if not any(a > 0.0 for a in self.system.alphas):
            raise ValueError("no active servers: all routing probabilities are zero")


@dataclass
class SimResult:
    """Aggregates of one run; the trace is kept only on request."""

    mean_aoi: float
    per_server_mean_aoi: list[float]
    histogram: np.ndarray
    histogram_edges: np.ndarray
    packets_served: int
    per_server_packets: list[int]
    sim_time: float
    unstable: bool
    trace: np.ndarray | None = field(default=None, repr=False)


def _streams(seed: int, n_servers: int) -> list[np.random.Generator]:
    """Independent generators: arrivals, routing, one per server."""
    children = np.random.SeedSequence(seed).spawn(2 + n_servers)
    return [np.random.Generator(np.random.Philox(s)) for s in children]


def _fcfs_departures(arrivals: np.ndarray, services: np.ndarray) -> np.ndarray:
    """Departure times of a non-preemptive FCFS server.

    D_k = max(A_k, D_{k-1}) + S_k, vectorized via
    D_k = cumS_k + max_{j<=k}(A_j - cumS_{j-1}).
    """
    cum = np.cumsum(services)
    slack = arrivals - (cum - services)
    return cum + np.maximum.accumulate(slack)


def _sawtooth_area(events: np.ndarray, resets: np.ndarray, t0: float, t1: float) -> float:
    """Integral over [t0, t1] of the age process that resets to resets[k]
    at events[k] and grows at unit slope in between.  Requires
    events[0] <= t0 <= t1 <= horizon of definition."""
    if t1 <= t0:
        return 0.0
    starts = np.clip(events, t0, t1)
    ends = np.empty_like(starts)
    ends[:-1] = starts[1:]
    ends[-1] = t1
    widths = ends - starts
    age_at_start = resets + (starts - events)
    return float(np.sum(widths * age_at_start + 0.5 * widths * widths))


def _age_at(events: np.ndarray, resets: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Sample the sawtooth at given times (all >= events[0])."""
    idx = np.searchsorted(events, times, side="right") - 1
    return resets[idx] + (times - events[idx])


def run(config: SimConfig) -> SimResult:
    """Simulate one run and measure the combined AoI sawtooth exactly."""
    sysc = config.system
    n = len(sysc.mus)
    mus = np.asarray(sysc.mus)
    alphas = np.asarray(sysc.alphas)
    unstable = not sysc.is_stable()

    arrival_rng, routing_rng, *service_rngs = _streams(config.seed, n)

    m = config.packets
    arrivals = np.cumsum(arrival_rng.exponential(1.0 / sysc.arrival_rate, size=m))
    servers = routing_rng.choice(n, size=m, p=alphas)

    # per-server FCFS service; departures within a server are ordered
    departures = np.empty(m)
    per_server_packets = [0] * n
    server_first_departure = []
    server_events: list[tuple[np.ndarray, np.ndarray] | None] = [None] * n
    for i in range(n):
        mask = servers == i
        cnt = int(mask.sum())
        per_server_packets[i] = cnt
        if cnt == 0:
            continue
        arr_i = arrivals[mask]
        svc_i = service_rngs[i].exponential(1.0 / mus[i], size=cnt)
        dep_i = _fcfs_departures(arr_i, svc_i)
        departures[mask] = dep_i
        server_events[i] = (dep_i, dep_i - arr_i)
        server_first_departure.append(dep_i[0])

    # combined sawtooth: sort by departure; a departure is informative when
    # its arrival time beats every previously departed packet's arrival
    order = np.argsort(departures, kind="stable")
    dep_sorted = departures[order]
    arr_sorted = arrivals[order]
    running_max = np.maximum.accumulate(arr_sorted)
    informative = np.empty(m, dtype=bool)
    informative[0] = True
    informative[1:] = arr_sorted[1:] > running_max[:-1]
    events = dep_sorted[informative]
    resets = events - arr_sorted[informative]

    sim_time = float(dep_sorted[-1])
    t0 = max(config.warmup_fraction * sim_time, float(events[0]))
    # every active server must already have a defined age at t0
    t0 = max(t0, max(server_first_departure))
    t1 = sim_time

    mean_aoi = _sawtooth_area(events, resets, t0, t1) / (t1 - t0)

    per_server_mean = []
    for i in range(n):
        ev = server_events[i]
        if ev is None:
            per_server_mean.append(math.inf)
        else:
            per_server_mean.append(_sawtooth_area(ev[0], ev[1], t0, t1) / (t1 - t0))

    # time-grid samples estimate the stationary AoI distribution
    sample_times = np.linspace(t0, t1, config.histogram_samples)
    ages = _age_at(events, resets, sample_times)
    hist_range = config.histogram_range
    if hist_range is None:
        hist_range = 10.0 * float(np.mean(ages))
    counts, edges = np.histogram(ages, bins=config.histogram_bins, range=(0.0, hist_range))

    trace = None
    if config.keep_trace:
        post_drop = _age_at(events, resets, dep_sorted)
        trace = np.column_stack([arr_sorted, servers[order].astype(float), dep_sorted, post_drop])

    return SimResult(
        mean_aoi=float(mean_aoi),
        per_server_mean_aoi=per_server_mean,
        histogram=counts,
        histogram_edges=edges,
        packets_served=m,
        per_server_packets=per_server_packets,
        sim_time=sim_time,
        unstable=unstable,
        trace=trace,
    )


def empirical_tail(result: SimResult) -> list[tuple[float, float]]:
    """Complementary cumulative histogram: (bin left edge, P(age > edge))."""
    total = result.histogram.sum()
    if total == 0:
        raise ValueError("empty histogram: no sampled ages")
    survivors = total - np.concatenate([[0], np.cumsum(result.histogram[:-1])])
    return [
        (float(x), float(s) / float(total))
        for x, s in zip(result.histogram_edges[:-1], survivors)
    ]


def export_trace(result: SimResult, path: str) -> None:
    """Write one CSV record per departure: arrival, server, departure, AoI."""
    if result.trace is None:
        raise ValueError("run was not configured with keep_trace=True")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["arrival_time", "server", "departure_time", "aoi"])
        for arr, srv, dep, aoi in result.trace:
            writer.writerow([f"{arr:.9g}", int(srv), f"{dep:.9g}", f"{aoi:.9g}"])


def replicate(config: SimConfig, reps: int) -> tuple[float, float]:
    """Mean and standard error of mean_aoi over deterministic replicates.

    Replicate r uses seed (base_seed, r) through the seed-splitting
    function, so results do not depend on execution order.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    values = []
    for r in range(reps):
        rep_seed = int(
            np.random.SeedSequence([config.seed, r]).generate_state(1, np.uint64)[0]
        )
        rep_cfg = SimConfig(
            system=config.system,
            packets=config.packets,
            seed=rep_seed,
            warmup_fraction=config.warmup_fraction,
            histogram_bins=config.histogram_bins,
            histogram_range=config.histogram_range,
            histogram_samples=config.histogram_samples,
        )
        values.append(run(rep_cfg).mean_aoi)
    mean = float(np.mean(values))
    if reps == 1:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(reps))
