"""Deterministic discrete-event core.

Virtual time is an integer number of microseconds since simulation start.
At 125 kHz bandwidth every LoRa symbol duration is a multiple of 8 us, so
all airtime arithmetic stays exact; there is no floating-point drift over
long runs.  Events are dispatched in (fire_at, seq) order where seq is a
monotone counter assigned at scheduling time, which makes ties deterministic
and explainable.
"""

from __future__ import annotations

import hashlib
import heapq
import random

import numpy as np

US_PER_S = 1_000_000


def us(seconds: float) -> int:
    """Convert seconds to integer microseconds (nearest)."""
    return int(round(seconds * US_PER_S))


class SimulationError(RuntimeError):
    """Fatal model violation: scheduling in the past, double transmit, etc."""


class EventHandle:
    """Scheduled event.  Cancelling an already-fired handle is a no-op."""

    __slots__ = ("fire_at", "seq", "kind", "target", "fn", "cancelled", "dispatched")

    def __init__(self, fire_at: int, seq: int, kind: str, target: int, fn) -> None:
        self.fire_at = fire_at
        self.seq = seq
        self.kind = kind
        self.target = target
        self.fn = fn
        self.cancelled = False
        self.dispatched = False

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<Event {self.kind}@{self.fire_at} seq={self.seq} target={self.target}>"


class Engine:
    """Single-run event loop.  Strictly single-threaded; runs with different
    seeds/configs share no state and may execute in separate processes."""

    def __init__(self, trace=None) -> None:
        self.now: int = 0
        self.dispatched_count: int = 0
        self._heap: list[tuple[int, int, EventHandle]] = []
        self._seq: int = 0
        self._trace = trace  # callable(now, kind, target), e.g. a trace-file writer

    def schedule(self, fire_at: int, kind: str, target: int, fn) -> EventHandle:
        if fire_at < self.now:
            raise SimulationError(
                f"event '{kind}' scheduled at t={fire_at} in the past (now={self.now})"
            )
        self._seq += 1
        handle = EventHandle(fire_at, self._seq, kind, target, fn)
        heapq.heappush(self._heap, (fire_at, handle.seq, handle))
        return handle

    def schedule_in(self, delay: int, kind: str, target: int, fn) -> EventHandle:
        return self.schedule(self.now + delay, kind, target, fn)

    def cancel(self, handle: EventHandle) -> None:
        handle.cancelled = True

    def run_until(self, end: int) -> int:
        """Dispatch every event with fire_at <= end; afterwards clock == end.

        Returns the number of events dispatched by this call (cancelled
        events are skipped and not counted)."""
        n0 = self.dispatched_count
        heap = self._heap
        while heap and heap[0][0] <= end:
            fire_at, _, handle = heapq.heappop(heap)
            if handle.cancelled:
                continue
            self.now = fire_at
            handle.dispatched = True
            self.dispatched_count += 1
            if self._trace is not None:
                self._trace(fire_at, handle.kind, handle.target)
            handle.fn()
        if end > self.now:
            self.now = end
        return self.dispatched_count - n0


class RngStreams:
    """Per-entity random streams derived from one master seed.

    Each entity (node, gateway, traffic source) draws from its own stream, so
    adding a node never perturbs the draw sequences of unrelated entities and
    A/B comparisons across configs stay stable.  Identical (master seed, key)
    always yields the identical sequence, independent of platform."""

    def __init__(self, master_seed: int) -> None:
        self.master_seed = int(master_seed)
        self._py: dict[tuple, random.Random] = {}
        self._np: dict[tuple, np.random.Generator] = {}

    def _entropy(self, key: tuple) -> int:
        material = repr((self.master_seed,) + key).encode("ascii")
        return int.from_bytes(hashlib.blake2s(material).digest()[:16], "little")

    def stream(self, *key) -> random.Random:
        if key not in self._py:
            self._py[key] = random.Random(self._entropy(key))
        return self._py[key]

    def numpy_stream(self, *key) -> np.random.Generator:
        if key not in self._np:
            self._np[key] = np.random.default_rng(self._entropy(key))
        return self._np[key]
