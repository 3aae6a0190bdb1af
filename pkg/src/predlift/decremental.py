"""Lift a worst-case decremental algorithm to the predicted-insertion
model by reinterpreting it as an incremental algorithm over anti-elements.

An anti-element is present exactly while its element is absent: deleting e
from the real system inserts anti-e, inserting e deletes anti-e, and a
predicted insertion day for e is a predicted deletion day for anti-e.  The
anti-view is therefore a predicted-deletion instance and runs on the
just-in-time engine unchanged, with all anti-elements of the predicted set
S present before day 1.

Elements can be deleted and reinserted repeatedly; each absence interval of
e becomes a fresh anti-element instance ``e~k`` so the engine always sees
one lifetime per id.  Inserting an element outside S grows S, reruns the
decremental initialization from scratch, and retriggers the whole tree
(charged like an l1 error of T).
"""

from __future__ import annotations

from typing import Any, Protocol

from .engine import Engine, drain
from .model import DELETE, END_OF_HORIZON, INSERT, Event
from .incremental import lift_incremental


class DecrementalContract(Protocol):
    def initialize(self, items: list[tuple[str, int]], capacity: int) -> tuple[Any, int]: ...

    def delete(self, state: Any, element: str) -> int: ...

    def clone(self, state: Any) -> tuple[Any, int]: ...

    def output(self, state: Any, day: int | None = None) -> Any: ...

    def query(self, state: Any, *args) -> Any: ...


class _AntiContract:
    """IncrementalContract facade: inserting anti-e deletes e."""

    def __init__(self, run: "DecrementalRun"):
        self.run = run

    def init(self):
        items = sorted((el, payload[0]) for el, payload in self.run.ground.items())
        state, units = self.run.contract.initialize(items, self.run.T)
        self.run.initialize_units += units
        return state, units

    def insert(self, state, anti_element, payload):
        return self.run.contract.delete(state, anti_element.rsplit("~", 1)[0])

    def clone(self, state):
        return self.run.contract.clone(state)

    def output(self, state, day):
        return self.run.contract.output(state, day)

    def query(self, state, *args):
        return self.run.contract.query(state, *args)


class DecrementalRun:
    """Drives one predicted-insertion instance end to end.

    ``predicted_set`` lists (element, predicted_insertion_day, payload) for
    the elements announced at the outset; payload[0] is the element's value
    for the max problem (opaque to this adapter otherwise).
    """

    def __init__(
        self,
        contract: DecrementalContract,
        predicted_set: list[tuple[str, int, tuple]],
        T: int,
        seed: int,
    ):
        self.contract = contract
        self.T = T
        self.ground: dict[str, tuple] = {el: payload for el, day, payload in predicted_set}
        self.generation: dict[str, int] = {el: 0 for el in self.ground}
        self.initialize_units = 0
        self.out_of_set_inserts = 0  # the theorem's K
        self.reinits = 0
        self.engine = Engine(lift_incremental(_AntiContract(self)), T, seed, jit=True)
        self.engine.preload_day0([(self._anti(el), payload) for el, _, payload in predicted_set])
        for el, day, _ in predicted_set:
            self.engine.schedule_deletion_prediction(self._anti(el), day)

    def _anti(self, element: str) -> str:
        return f"{element}~{self.generation[element]}"

    def anti_active_ids(self) -> set[str]:
        """Current anti-elements alive on the processed day (view duality
        checks compare this against the complement of the real active set)."""
        t = self.engine.current_day
        out = set()
        for el in self.ground:
            anti = self._anti(el)
            ins, dl = self.engine.schedule.lifetime(anti)
            if ins is not None and ins <= t < dl:
                out.add(anti)
        return out

    def process_day(self, day: int, ev: Event, reinsertion_day: int | None = None) -> Any:
        if ev.kind == INSERT:
            if ev.element not in self.ground:
                self._admit_new_element(day, ev)
            anti = self._anti(ev.element)
            drain(self.engine.process_day(day, Event(anti, DELETE)))
        else:
            self.generation[ev.element] += 1
            anti = self._anti(ev.element)
            pred = END_OF_HORIZON if reinsertion_day is None else reinsertion_day
            drain(
                self.engine.process_day(
                    day, Event(anti, INSERT, self.ground[ev.element]), predicted_deletion_day=pred
                )
            )
        return self.engine.outputs[-1]

    def _admit_new_element(self, day: int, ev: Event) -> None:
        """Insertion outside S: grow the set, reinitialize from scratch, and
        recompute the whole tree.  The new element's anti-instance is alive
        [0, day) and its real deletion coincides with the insertion."""
        self.ground[ev.element] = ev.payload
        self.generation[ev.element] = 0
        anti = self._anti(ev.element)
        self.engine.schedule.payloads[anti] = ev.payload
        self.engine.schedule.add(anti, INSERT, 0, realized=True)
        self.engine.schedule.add(anti, DELETE, day, realized=True)
        self.out_of_set_inserts += 1
        self.reinits += 1
        drain(self.engine.retrigger(day, self.T + 1))

    @property
    def outputs(self):
        return self.engine.outputs

    @property
    def counters(self):
        return self.engine.counters


def lift_decremental(
    contract: DecrementalContract,
    predicted_set: list[tuple[str, int, tuple]],
    T: int,
    seed: int,
) -> DecrementalRun:
    return DecrementalRun(contract, predicted_set, T, seed)
