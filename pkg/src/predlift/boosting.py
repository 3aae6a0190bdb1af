"""Step-interleaved backstop over resumable algorithms, and the boosting
wrapper that runs independent engine instances under guess-and-double
horizon estimation.

A steppable algorithm buffers incoming events and performs exactly one work
unit per step() call.  The backstop feeds each day's event to every
constituent and then issues single steps round-robin until one constituent
has drained its buffer; that constituent's output is the day's answer.
Because all constituents stay within one step of each other, total meta
work tracks N times the minimum constituent's work.

The boosting loop doubles its horizon guess whenever the stream reaches it,
rebuilding L fresh independent instances (L from both log of the horizon
guess and log of the ground-set size, with a configurable cap) and
replaying all previously seen events through a fresh backstop.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from math import ceil, log2
from typing import Any, Callable, Iterator

from .engine import Engine
from .model import Event, Prediction

PROGRESSED = "progressed"
BUFFER_COMPLETE = "buffer_complete"


class SteppableEngine:
    """Engine driven one work unit at a time.

    The engine's generators yield unit counts after each chunk of real
    work; the wrapper meters them out so a step() always accounts exactly
    one unit, regardless of chunk size.
    """

    def __init__(self, engine: Engine, predictions: list[Prediction] | None = None):
        self.engine = engine
        self._gens: deque[Iterator[int]] = deque()
        if predictions is not None:
            self._gens.append(engine.ingest_predictions(predictions))
        self._buffer: deque[tuple[int, Event, int | None]] = deque()
        self._pending = 0
        self.steps_taken = 0

    def buffer_event(self, day: int, event: Event, predicted_deletion_day: int | None = None):
        self._buffer.append((day, event, predicted_deletion_day))

    def _refill(self) -> bool:
        while self._pending == 0:
            if self._gens:
                units = next(self._gens[0], None)
                if units is None:
                    self._gens.popleft()
                    continue
                self._pending = units
            elif self._buffer:
                day, ev, pred = self._buffer.popleft()
                self._gens.append(self.engine.process_day(day, ev, predicted_deletion_day=pred))
            else:
                return False
        return True

    def step(self) -> str:
        if not self._refill():
            return BUFFER_COMPLETE
        self._pending -= 1
        self.steps_taken += 1
        return PROGRESSED

    def is_complete(self) -> bool:
        return not self._refill()

    def current_output(self) -> Any:
        return self.engine.outputs[-1] if self.engine.outputs else None


class RecomputeBackstop:
    """Trivially correct fully dynamic wrapper: from-scratch recomputation
    of a daily oracle, one unit per oracle element touch."""

    def __init__(self, oracle_step: Callable[[list[tuple[int, Event]]], tuple[Any, int]]):
        self._oracle_step = oracle_step
        self._history: list[tuple[int, Event]] = []
        self._buffer: deque[tuple[int, Event, int | None]] = deque()
        self._pending = 0
        self._output: Any = None
        self.steps_taken = 0

    def buffer_event(self, day: int, event: Event, predicted_deletion_day: int | None = None):
        self._buffer.append((day, event, predicted_deletion_day))

    def step(self) -> str:
        if self._pending == 0:
            if not self._buffer:
                return BUFFER_COMPLETE
            day, ev, _ = self._buffer.popleft()
            self._history.append((day, ev))
            self._output, self._pending = self._oracle_step(self._history)
            self._pending = max(1, self._pending)
        self._pending -= 1
        self.steps_taken += 1
        return PROGRESSED

    def is_complete(self) -> bool:
        return self._pending == 0 and not self._buffer

    def current_output(self) -> Any:
        return self._output


class Backstop:
    """Round-robin composition of steppable algorithms."""

    def __init__(self, algorithms: list):
        if not algorithms:
            raise ValueError("need at least one algorithm")
        self.algorithms = list(algorithms)
        self.meta_steps = 0
        self.outputs: list[Any] = []

    def feed(self, day: int, event: Event, predicted_deletion_day: int | None = None) -> Any:
        for a in self.algorithms:
            a.buffer_event(day, event, predicted_deletion_day)
        completed = None
        while completed is None:
            # completion is checked at round boundaries without consuming a
            # step, so every round issues exactly one step to every
            # constituent and their step counts never drift apart
            for a in list(self.algorithms):
                if self._guard(a, lambda: a.is_complete()):
                    completed = a
                    break
            if completed is not None:
                break
            for a in list(self.algorithms):
                self._guard(a, lambda: a.step())
                self.meta_steps += 1
        out = completed.current_output()
        self.outputs.append(out)
        return out

    def _guard(self, a, fn):
        try:
            return fn()
        except Exception as exc:  # drop a faulty constituent, keep going
            warnings.warn(f"backstop constituent {a!r} failed: {exc}")
            self.algorithms.remove(a)
            if not self.algorithms:
                raise
            return False

    def step_spread(self) -> int:
        taken = [a.steps_taken for a in self.algorithms]
        return max(taken) - min(taken)


def backstop_run(algorithms: list, stream: list[tuple[int, Event]]) -> tuple[list, Backstop]:
    meta = Backstop(algorithms)
    for day, ev in stream:
        meta.feed(day, ev)
    return meta.outputs, meta


@dataclass
class BoostConfig:
    k: int = 1
    instances_cap: int = 4
    seed: int = 0


@dataclass
class EpochStats:
    horizon_guess: int
    L: int
    L_uncapped: int
    replayed: int
    instance_steps: list[int] = field(default_factory=list)


def boost_run(
    engine_factory: Callable[[int, list[Prediction], int], SteppableEngine],
    bundles: dict[int, list[Prediction]],
    stream: list[tuple[int, Event]],
    ground_size: int,
    config: BoostConfig,
    log: Callable[[str], None] | None = None,
) -> tuple[list[Any], list[EpochStats]]:
    """Guess-and-double over an unknown horizon.

    On each doubling day the bundle indexed by the old guess's log is
    ingested (or the last available one), L fresh independent instances are
    built for the doubled guess, and all previously seen events replay
    through a new backstop before live traffic resumes.
    """
    horizon_guess = 1
    meta: Backstop | None = None
    history: list[tuple[int, Event]] = []
    outputs: list[Any] = []
    epochs: list[EpochStats] = []

    def close_epoch():
        if meta is not None and epochs:
            epochs[-1].instance_steps = [a.steps_taken for a in meta.algorithms]

    for day, ev in stream:
        if day >= horizon_guess:
            close_epoch()
            idx = max(1, horizon_guess.bit_length() - 1)
            while idx > 1 and idx not in bundles:
                idx -= 1  # missing bundle: fall back to the last available
            bundle = bundles.get(idx, [])
            horizon_guess *= 2
            l_uncapped = max(
                config.k * max(1, ceil(log2(horizon_guess))),
                ceil(log2(max(2, ground_size))),
            )
            L = max(1, min(l_uncapped, config.instances_cap))
            usable = [p for p in bundle if not p.is_sentinel and p.predicted_day <= horizon_guess]
            instances = [
                engine_factory(horizon_guess, usable, config.seed + 7919 * len(epochs) + i)
                for i in range(L)
            ]
            meta = Backstop(instances)
            if log:
                log(f"#epoch T^={horizon_guess} L={L} L_uncapped={l_uncapped}")
            for past_day, past_ev in history:
                meta.feed(past_day, past_ev)
            epochs.append(EpochStats(horizon_guess, L, l_uncapped, replayed=len(history)))
        history.append((day, ev))
        outputs.append(meta.feed(day, ev))
    close_epoch()
    return outputs, epochs
