"""Wrap a worst-case incremental algorithm as a divide-and-conquer problem.

An element is permanent for a window when it is inserted on or before the
window's first day, deleted after its last day, and not permanent for any
ancestor.  The windows an element is permanent for partition its lifetime;
dually, the windows containing a day partition the elements active on that
day.  A window's computation therefore just clones the parent state and
inserts the window's permanents, giving work update(A) per element.

Every permanent of a window has an event inside the parent window (else it
would be permanent for the parent too), so candidates are enumerated from
the parent's event set, whose size is what the work bound charges.
"""

from __future__ import annotations

from typing import Any, Protocol

from .engine import WindowCtx


class IncrementalContract(Protocol):
    """The pluggable worst-case incremental algorithm."""

    def init(self) -> tuple[Any, int]:
        """Fresh empty state plus the units spent building it."""

    def insert(self, state: Any, element: str, payload: tuple) -> int:
        """Mutate state to include element; returns cost units spent, which
        must stay within the declared worst-case update bound."""

    def clone(self, state: Any) -> tuple[Any, int]:
        """Independent copy plus its size in units."""

    def output(self, state: Any, day: int) -> Any: ...

    def query(self, state: Any, *args) -> Any: ...


def permanents_of(
    ctx_span: tuple[int, int],
    parent_span: tuple[int, int] | None,
    candidates,
    lifetime,
) -> list[str]:
    """Elements permanent for the window ``ctx_span``: alive across all of
    it, but not across all of the parent.  ``candidates`` yields event
    records of the parent span; ``lifetime`` maps element -> (ins, del)."""
    s, e = ctx_span
    seen: set[str] = set()
    out: list[str] = []
    for rec in candidates:
        el = rec.element
        if el in seen:
            continue
        seen.add(el)
        ins, dl = lifetime(el)
        if ins is None or ins > s or dl <= e:
            continue
        if parent_span is not None:
            ps, pe = parent_span
            if ins <= ps and dl > pe:
                continue  # ancestor-permanent
        out.append(el)
    out.sort()
    return out


class LiftedState:
    """Window memory for a lifted incremental algorithm."""

    __slots__ = ("state",)

    def __init__(self, state: Any):
        self.state = state


class LiftedIncremental:
    """c = 1 divide-and-conquer problem over an IncrementalContract."""

    def __init__(self, contract: IncrementalContract):
        self.contract = contract

    def root_memory(self) -> None:
        return None

    def compute_window(self, ctx: WindowCtx, parent_memory: LiftedState | None):
        if parent_memory is None:
            state, clone_units = self.contract.init()
        else:
            state, clone_units = self.contract.clone(parent_memory.state)
        compute_units = 0
        # inlined permanents_of over the reduced candidate slice; this scan
        # runs for every window recompute
        s, e = ctx.start, ctx.end
        ins_map, del_map, never = ctx.lifetime_maps()
        pspan = ctx.parent_span()
        seen: set[str] = set()
        perms: list[str] = []
        ins_get = ins_map.get
        del_get = del_map.get
        for rec in ctx.permanent_candidates():
            el = rec.element
            if el in seen:
                continue
            seen.add(el)
            ins = ins_get(el)
            if ins is None or ins > s:
                continue
            dl = del_get(el, never)
            if dl <= e:
                continue
            if pspan is not None and ins <= pspan[0] and dl > pspan[1]:
                continue  # an ancestor already carries it
            perms.append(el)
        perms.sort()
        for element in perms:
            compute_units += self.contract.insert(state, element, ctx.payload(element))
        return LiftedState(state), compute_units, clone_units

    def day_output(self, leaf_memory: LiftedState, ctx: WindowCtx) -> Any:
        return self.contract.output(leaf_memory.state, ctx.start)

    def query(self, leaf_memory: LiftedState, *args) -> Any:
        return self.contract.query(leaf_memory.state, *args)


def lift_incremental(contract: IncrementalContract) -> LiftedIncremental:
    return LiftedIncremental(contract)
