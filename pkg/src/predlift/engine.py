"""Day loop over a random partition tree: schedule maintenance, retrigger
recomputation, early/late event handlers, and work accounting.

The engine owns a live schedule of records (one per event lifetime) spread
over days 0..T+1.  Day 0 holds pre-horizon insertions (elements present
before the stream starts); day T+1 is the parking zone for predictions
pushed past the horizon, outside every window of the tree.  Exactly one
real event arrives per day in [1, T].

When a real event lands earlier than its prediction, the prediction is
pulled back to the real day and the subtree under the smallest window
containing both days is recomputed.  When a predicted event fails to
materialize on its day, it is pushed 2^i days ahead (doubling with each
miss) and the covering subtree is recomputed.  Either way the recomputation
never touches windows whose unordered event set is unchanged, which is what
ties total work to the l1 prediction error.

All long-running entry points are generators that yield work-unit counts,
so an engine can be driven to completion in a tight loop or preempted after
any single unit (see the boosting module).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Iterator

from .model import DELETE, END_OF_HORIZON, INSERT, Event, Prediction
from .scheduling import OpCounter, SlotLine, fix_ordering, harmonic_assign
from .timetree import PartitionTree


class ScheduleBug(RuntimeError):
    """The realized stream contradicts schedule invariants (duplicate
    lifetime, deletion without insertion, out-of-order day)."""


@dataclass
class WorkCounters:
    """Instrumentation totals.  All counters are monotone; the split between
    preprocess_units and retrigger_units buckets window compute and clone
    work by whether it happened during initial builds / just-in-time
    activation or during retrigger recomputation."""

    window_compute_units: int = 0
    clone_units: int = 0
    retrigger_calls: int = 0
    reschedules: int = 0
    scheduler_ops: int = 0
    preprocess_units: int = 0
    retrigger_units: int = 0
    day_overhead: int = 0
    batch_max: int = 0
    depth: int = 0
    reinits: int = 0

    def total_units(self) -> int:
        return (
            self.window_compute_units
            + self.clone_units
            + self.scheduler_ops
            + self.reschedules
            + self.retrigger_calls
            + self.day_overhead
        )

    def as_dict(self) -> dict[str, int]:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["total_units"] = self.total_units()
        return d

    def format_block(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.as_dict().items())


class Rec:
    """One scheduled event lifetime endpoint (mutable engine-internal)."""

    __slots__ = ("element", "kind", "day", "i", "realized")

    def __init__(self, element: str, kind: str, day: int, i: int = 0, realized: bool = False):
        self.element = element
        self.kind = kind
        self.day = day
        self.i = i
        self.realized = realized

    def __repr__(self):
        flag = "real" if self.realized else f"pred i={self.i}"
        return f"<{self.element} {self.kind} @{self.day} {flag}>"


class Schedule:
    """Day-indexed event records plus per-(element, kind) lookup.

    Each (element, kind) pair has at most one record: the framework tracks
    one lifetime per element id (reinsertions must be instanced by the
    caller; the decremental adapter does this)."""

    def __init__(self, T: int):
        self.T = T
        self.days: list[list[Rec]] = [[] for _ in range(T + 2)]
        self.by_key: dict[tuple[str, str], Rec] = {}
        self.payloads: dict[str, tuple] = {}
        # element -> current scheduled day, kept in lockstep with the
        # records; these are the hot lookups of every window recompute
        self.ins_day: dict[str, int] = {}
        self.del_day: dict[str, int] = {}

    def add(self, element: str, kind: str, day: int, realized: bool = False, i: int = 0) -> Rec:
        key = (element, kind)
        if key in self.by_key:
            raise ScheduleBug(f"duplicate lifetime for {key}")
        rec = Rec(element, kind, day, i, realized)
        self.by_key[key] = rec
        self.days[min(day, self.T + 1)].append(rec)
        (self.ins_day if kind == INSERT else self.del_day)[element] = day
        return rec

    def move(self, rec: Rec, new_day: int) -> None:
        self.days[min(rec.day, self.T + 1)].remove(rec)
        rec.day = new_day
        self.days[min(new_day, self.T + 1)].append(rec)
        (self.ins_day if rec.kind == INSERT else self.del_day)[rec.element] = new_day

    def events_in(self, a: int, b: int) -> list[Rec]:
        out: list[Rec] = []
        for d in range(a, b + 1):
            out.extend(self.days[d])
        return out

    def all_records(self):
        return self.by_key.values()

    def lifetime(self, element: str) -> tuple[int | None, int]:
        """(insertion day or None, deletion day or T+1).  An element is
        active on day t iff ins is not None and ins <= t < del."""
        return self.ins_day.get(element), self.del_day.get(element, self.T + 1)


class WindowCtx:
    """What a window's computation may look at: its span, its own unordered
    event set, the parent window's event set, and current element lifetimes
    (the parent's update set folded into reachable state)."""

    __slots__ = ("_engine", "nid", "start", "end")

    def __init__(self, engine: "Engine", nid: int):
        self._engine = engine
        self.nid = nid
        self.start = engine.tree.start[nid]
        self.end = engine.tree.end[nid]

    @property
    def T(self) -> int:
        return self._engine.T

    @property
    def day_span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def parent_span(self) -> tuple[int, int] | None:
        p = self._engine.tree.parent[self.nid]
        if p == -1:
            return None
        return (self._engine.tree.start[p], self._engine.tree.end[p])

    def events(self) -> list[Rec]:
        return self._engine.schedule.events_in(self.start, self.end)

    def parent_events(self):
        """Events of the parent span; for the root, every record including
        pre-horizon and parked ones."""
        span = self.parent_span()
        if span is None:
            return self._engine.schedule.all_records()
        return self._engine.schedule.events_in(*span)

    def permanent_candidates(self):
        """The slice of the parent's update set where a permanent element
        must have an event: an element alive across this window but not
        across the parent either gained life inside (parent start, own
        start] or loses it inside (own end, parent end], and those ranges
        lie in the sibling window plus this window's first day."""
        span = self.parent_span()
        if span is None:
            return self._engine.schedule.all_records()
        ps, pe = span
        if self.start == ps:
            lo, hi = self.end + 1, pe
        else:
            lo, hi = ps + 1, self.start
        days = self._engine.schedule.days
        return (rec for d in range(lo, hi + 1) for rec in days[d])

    def lifetime(self, element: str) -> tuple[int | None, int]:
        return self._engine.schedule.lifetime(element)

    def lifetime_maps(self) -> tuple[dict[str, int], dict[str, int], int]:
        """(insertion days, deletion days, day meaning never-deleted); the
        raw dictionaries behind lifetime(), for tight scan loops."""
        sched = self._engine.schedule
        return sched.ins_day, sched.del_day, sched.T + 1

    def payload(self, element: str) -> tuple:
        return self._engine.schedule.payloads.get(element, ())


class Engine:
    """Fully dynamic run of a divide-and-conquer problem under predictions.

    ``problem`` must provide::

        root_memory() -> memory | None        state above the root (None lets
                                              compute_window build it)
        compute_window(ctx, parent_memory) -> (memory, compute_units, clone_units)
        day_output(leaf_memory, ctx) -> answer
        query(leaf_memory, args) -> answer    optional

    In just-in-time mode (``jit=True``) windows are first computed on their
    start day and insertion events arrive online carrying a predicted
    deletion day (scheduled against a persistent slot line).
    """

    def __init__(
        self,
        problem,
        T: int,
        seed: int,
        jit: bool = False,
        payload_registry: dict[str, tuple] | None = None,
    ):
        self.problem = problem
        self.T = T
        self.seed = seed
        self.jit = jit
        self.counters = WorkCounters()
        self.schedule = Schedule(T)
        if payload_registry:
            self.schedule.payloads.update(payload_registry)
        self.tree = PartitionTree.build(T, seed ^ 0x5EED)
        self.counters.depth = self.tree.depth()
        self.memory: list[Any] = [None] * self.tree.n_nodes()
        self.active = [False] * self.tree.n_nodes()
        self._rng = random.Random(seed)
        self._op_counter = OpCounter()
        self._slotline = SlotLine(T, self._op_counter)
        self.current_day = 0
        self.outputs: list[Any] = []

    # -- preprocessing -----------------------------------------------------

    def ingest_predictions(self, predictions: list[Prediction]) -> Iterator[int]:
        """Convert raw predictions into a feasible schedule (harmonic online
        matching plus the insert-before-delete ordering fix) and, outside
        just-in-time mode, compute the whole tree once."""
        live = [p for p in predictions if not p.is_sentinel]
        seen = set()
        for p in live:
            if p.event.key in seen:
                raise ScheduleBug(f"prediction file reuses lifetime {p.event.key}")
            seen.add(p.event.key)
        before = self._op_counter.ops
        days = [self._slotline.assign_harmonic(p.predicted_day, self._rng) for p in live]
        from .scheduling import Assignment

        assignment = fix_ordering(Assignment(live, days, self.T))
        self.counters.scheduler_ops += self._op_counter.ops - before
        yield max(1, self._op_counter.ops - before)
        for p, day in zip(assignment.predictions, assignment.days):
            self.schedule.add(p.event.element, p.event.kind, min(day, self.T + 1))
        if not self.jit:
            yield from self.full_compute("preprocess", activate=True)

    def preload_day0(self, items: list[tuple[str, tuple]]) -> None:
        """Record elements present before day 1 (realized pre-horizon
        insertions); used by the decremental adapter."""
        for element, payload in items:
            self.schedule.add(element, INSERT, 0, realized=True)
            if payload:
                self.schedule.payloads[element] = payload

    def schedule_deletion_prediction(self, element: str, requested_day: int) -> int:
        """Assign a predicted deletion day online against the persistent
        slot line.  A slot earlier than the element's insertion day is moved
        onto the insertion day; a slot past the horizon parks at T+1."""
        before = self._op_counter.ops
        if requested_day >= END_OF_HORIZON:
            slot = self.T + 1
        else:
            slot = self._slotline.assign_harmonic(requested_day, self._rng)
            if slot > self.T:
                slot = self.T + 1
        ins_day, _ = self.schedule.lifetime(element)
        if ins_day is not None and slot < ins_day:
            slot = ins_day
        self.schedule.add(element, DELETE, slot)
        self.counters.scheduler_ops += self._op_counter.ops - before
        return slot

    # -- recomputation ------------------------------------------------------

    def _recompute(self, nid: int, bucket: str) -> int:
        parent = self.tree.parent[nid]
        pmem = self.memory[parent] if parent != -1 else None
        mem, compute_units, clone_units = self.problem.compute_window(WindowCtx(self, nid), pmem)
        self.memory[nid] = mem
        units = compute_units + clone_units
        self.counters.window_compute_units += compute_units
        self.counters.clone_units += clone_units
        if bucket == "preprocess":
            self.counters.preprocess_units += units
        else:
            self.counters.retrigger_units += units
        return max(1, units)

    def full_compute(self, bucket: str, activate: bool = False) -> Iterator[int]:
        """Recompute the root and every (active) descendant, breadth-first."""
        if activate:
            self.active[0] = True
        if self.active[0]:
            yield self._recompute(0, bucket)
        for nid in self.tree.bfs_descendants(0):
            if activate:
                self.active[nid] = True
            if self.active[nid]:
                yield self._recompute(nid, bucket)

    def retrigger(self, t1: int, t2: int, widen: bool = False) -> Iterator[int]:
        """Recompute every active descendant of the smallest window holding
        both days, children before grandchildren so each recomputation reads
        a fresh parent memory.

        ``widen`` is set when the moved record is an insertion: a window
        starting exactly at the lower day tests "inserted on or before my
        first day" against the moved record, so its own computation can
        change even though its unordered event set did not.  Covering one
        day further left makes every such window a strict descendant of the
        recomputed root.  (Deletion moves cannot flip a containing window's
        tests: both days stay inside its span, hence at or before its end.)

        An endpoint beyond the horizon means the event left or entered the
        tree entirely, which invalidates the root as well: recompute
        everything."""
        self.counters.retrigger_calls += 1
        yield 1
        lo, hi = min(t1, t2), max(t1, t2)
        if widen:
            lo -= 1
        if hi > self.T or lo < 1:
            yield from self.full_compute("retrigger")
            return
        w = self.tree.smallest_window(lo, hi)
        for nid in self.tree.bfs_descendants(w):
            if self.active[nid]:
                yield self._recompute(nid, bucket="retrigger")

    # -- handlers ------------------------------------------------------------

    def process_event_earlier(self, rec: Rec, t: int) -> Iterator[int]:
        """Real event on day t ahead of its prediction: pull the record back
        to t as a real event and repair the covering subtree."""
        t_predict = rec.day
        self.schedule.move(rec, t)
        rec.realized = True
        yield from self.retrigger(t, t_predict, widen=rec.kind == INSERT)

    def process_event_later(self, rec: Rec, t: int) -> Iterator[int]:
        """Predicted event missed its day: push it 2^i days ahead (doubling
        per miss), drag any earlier predicted deletion of the same element
        along to keep insert-before-delete, and repair the subtree.

        A push past the horizon clamps to day T while earlier days remain
        (the real event, if any, will find it there at cost proportional to
        the remaining gap, which the doubling keeps within twice the
        original error).  Only a miss on day T itself proves the prediction
        will never realize; then the record parks outside the tree at T+1,
        work charged like the l1 cost T of an unmatched prediction."""
        rec.i += 1
        self.counters.reschedules += 1
        target = t + (1 << rec.i)
        if target > self.T:
            target = self.T if t < self.T else self.T + 1
        self.schedule.move(rec, target)
        if rec.kind == INSERT:
            dl = self.schedule.by_key.get((rec.element, DELETE))
            if dl is not None and not dl.realized and dl.day < target:
                self.schedule.move(dl, target)
                dl.i += 1
                self.counters.reschedules += 1
        yield 1
        yield from self.retrigger(t, target, widen=rec.kind == INSERT)

    # -- day loop -------------------------------------------------------------

    def process_day(
        self, day: int, event: Event, predicted_deletion_day: int | None = None
    ) -> Iterator[int]:
        if day != self.current_day + 1:
            raise ScheduleBug(f"day {day} out of order (expected {self.current_day + 1})")
        self.current_day = day
        self.counters.day_overhead += 1
        yield 1
        if event.payload:
            self.schedule.payloads[event.element] = event.payload

        rec = self.schedule.by_key.get(event.key)
        if self.jit and event.kind == INSERT:
            if rec is not None:
                raise ScheduleBug(f"element {event.element} inserted twice")
            self.schedule.add(event.element, INSERT, day, realized=True)
            self.schedule_deletion_prediction(
                event.element,
                END_OF_HORIZON if predicted_deletion_day is None else predicted_deletion_day,
            )
            yield 1
        elif rec is None:
            # never predicted: default prediction at the end of the horizon
            self.schedule.add(event.element, event.kind, day, realized=True)
            yield from self.retrigger(day, self.T + 1)
        elif rec.realized:
            if rec.day != day:
                raise ScheduleBug(f"lifetime of {event.key} reused on day {day}")
            # already reconciled by a rebuilding adapter: nothing to do
        elif day < rec.day:
            yield from self.process_event_earlier(rec, day)
        elif day == rec.day:
            rec.realized = True
        else:
            raise ScheduleBug(f"stale prediction {rec!r} survived past its day")

        # snapshot, then reschedule every unrealized prediction of this day
        batch = list(self.schedule.days[day])
        if len(batch) > self.counters.batch_max:
            self.counters.batch_max = len(batch)
        for r in batch:
            if not r.realized:
                yield from self.process_event_later(r, day)

        if self.jit:
            for nid in self.tree.windows_starting_at(day):
                if not self.active[nid]:
                    self.active[nid] = True
                    yield self._recompute(nid, "preprocess")

        self.outputs.append(self.day_output_value(day))

    # -- outputs & queries ------------------------------------------------------

    def day_output_value(self, day: int) -> Any:
        nid = self.tree.leaf_of[day]
        if not self.active[nid] or self.memory[nid] is None:
            raise ScheduleBug(f"leaf for day {day} never computed")
        return self.problem.day_output(self.memory[nid], WindowCtx(self, nid))

    def query(self, *args) -> Any:
        if self.current_day < 1:
            raise ScheduleBug("no day processed yet")
        nid = self.tree.leaf_of[self.current_day]
        return self.problem.query(self.memory[nid], *args)


def drain(gen: Iterator[int]) -> int:
    """Run a unit-yielding generator to completion; returns units seen."""
    total = 0
    for units in gen:
        total += units
    return total


def run_predicted(
    problem,
    T: int,
    predictions: list[Prediction],
    stream: list[tuple[int, Event]],
    seed: int,
    payload_registry: dict[str, tuple] | None = None,
) -> Engine:
    """Convenience driver: preprocess, then process the whole stream."""
    eng = Engine(problem, T, seed, payload_registry=payload_registry)
    drain(eng.ingest_predictions(predictions))
    for day, ev in stream:
        drain(eng.process_day(day, ev))
    return eng


def run_offline(
    problem,
    T: int,
    stream: list[tuple[int, Event]],
    seed: int,
) -> Engine:
    """Pure offline divide-and-conquer reference run: the realized stream is
    the schedule, no predictions, no handlers, one full computation."""
    eng = Engine(problem, T, seed)
    for day, ev in stream:
        if ev.payload:
            eng.schedule.payloads[ev.element] = ev.payload
        eng.schedule.add(ev.element, ev.kind, day, realized=True)
    drain(eng.full_compute("preprocess", activate=True))
    for day, _ in stream:
        eng.current_day = day
        eng.counters.day_overhead += 1
        eng.outputs.append(eng.day_output_value(day))
    return eng
