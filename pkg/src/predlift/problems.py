"""Concrete problem instantiations and their from-scratch oracles.

Three incremental contracts (active-element counter, union-by-rank
connectivity, and, via the decremental adapter, an ordered-multiset max)
plus an offline divide-and-conquer minimum spanning forest with contraction
sparsification.

Every problem also ships an independent daily oracle used by verification:
the oracle recomputes the answer from the true active set each day through
a different code path than the engine (BFS instead of union-find for
connectivity, plain Kruskal instead of the sparsifier chain for MSF).
"""

from __future__ import annotations

import bisect
from math import ceil, log2

from .engine import WindowCtx
from .model import DELETE, INSERT, Event


# -- counter ---------------------------------------------------------------


class CounterContract:
    """Active-element count; insert cost exactly 1 unit."""

    def init(self):
        return [0], 1

    def insert(self, state, element, payload):
        state[0] += 1
        return 1

    def clone(self, state):
        return [state[0]], 1

    def output(self, state, day):
        return state[0]

    def query(self, state, *args):
        return state[0]


def counter_contract() -> CounterContract:
    return CounterContract()


# -- incremental connectivity ----------------------------------------------


class ConnectivityContract:
    """Union by rank without path compression: O(log n) worst-case insert,
    so the lifted divide-and-conquer meets the worst-case update-time
    requirement.  State is (parent, rank) dicts over vertices."""

    def init(self):
        return ({}, {}), 1

    def _find(self, parent, v) -> tuple[int, int]:
        steps = 0
        while parent[v] != v:
            v = parent[v]
            steps += 1
        return v, steps

    def insert(self, state, element, payload):
        parent, rank = state
        u, v = payload[0], payload[1]
        cost = 1
        for x in (u, v):
            if x not in parent:
                parent[x] = x
                rank[x] = 0
                cost += 1
        ru, su = self._find(parent, u)
        rv, sv = self._find(parent, v)
        cost += su + sv
        if ru == rv:
            return cost
        if rank[ru] < rank[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        if rank[ru] == rank[rv]:
            rank[ru] += 1
        return cost

    def clone(self, state):
        parent, rank = state
        return (dict(parent), dict(rank)), len(parent) + len(rank) + 1

    def output(self, state, day):
        parent, _ = state
        comps: dict[int, list[int]] = {}
        for v in parent:
            comps.setdefault(self._find(parent, v)[0], []).append(v)
        return tuple(sorted(tuple(sorted(c)) for c in comps.values()))

    def query(self, state, u, v):
        parent, _ = state
        if u not in parent or v not in parent:
            raise ValueError(f"unknown vertex in query: {u if u not in parent else v}")
        return self._find(parent, u)[0] == self._find(parent, v)[0]


def connectivity_contract() -> ConnectivityContract:
    return ConnectivityContract()


# -- decremental max ---------------------------------------------------------


class DecrementalMaxContract:
    """Ordered multiset of (value, element) pairs; worst-case-logarithmic
    locate per deletion.  Output is the current max value (None if empty)."""

    def initialize(self, items: list[tuple[str, int]], capacity: int):
        pairs = sorted((value, element) for element, value in items)
        values = {element: value for element, value in items}
        n = max(1, len(pairs))
        return [pairs, values], len(pairs) * (1 + ceil(log2(n + 1)))

    def delete(self, state, element):
        pairs, values = state
        if element not in values:
            raise ValueError(f"delete of absent value for element {element}")
        value = values.pop(element)
        idx = bisect.bisect_left(pairs, (value, element))
        if idx >= len(pairs) or pairs[idx] != (value, element):
            raise ValueError(f"ordered multiset out of sync for {element}")
        del pairs[idx]
        return 1 + ceil(log2(len(pairs) + 2))

    def clone(self, state):
        pairs, values = state
        return [list(pairs), dict(values)], len(pairs) + len(values) + 1

    def output(self, state, day=None):
        pairs, _ = state
        return pairs[-1][0] if pairs else None

    def query(self, state, *args):
        return self.output(state)


def decremental_max_contract() -> DecrementalMaxContract:
    return DecrementalMaxContract()


# -- minimum spanning forest --------------------------------------------------


class MsfGraph:
    """Window memory for the MSF problem: the contracted residual graph plus
    the weight and ids of edges already forced into every spanning forest of
    the window's span."""

    __slots__ = ("edges", "vmap", "acc_weight", "acc_ids")

    def __init__(self, edges, vmap, acc_weight, acc_ids):
        self.edges = edges  # tuple of (w, id, u, v) in contracted labels
        self.vmap = vmap  # original vertex -> contracted label
        self.acc_weight = acc_weight
        self.acc_ids = acc_ids

    def size(self) -> int:
        return len(self.edges) + len(self.vmap)


def _kruskal(edges):
    """Forest of the minimum spanning forest under the total order (w, id).
    Returns (picked list, weight).  Tie order by id keeps the forest unique
    and diffable against the oracle."""
    parent: dict = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    picked = []
    weight = 0
    for w, eid, u, v in sorted(edges):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
            picked.append((w, eid, u, v))
            weight += w
    return picked, weight


class MsfProblem:
    """Offline divide-and-conquer MSF (c = 1, up to the sorting log).

    Per window, parent edges split into permanents (alive across the whole
    span) and volatiles (an endpoint event inside the span).  Permanents in
    the spanning forest even with every volatile edge forced present are in
    every spanning forest of the span: contract them.  Permanents outside
    the spanning forest of permanents alone are outside every spanning
    forest: drop them.  Volatiles always pass through to the children.
    """

    def root_memory(self):
        return None

    def compute_window(self, ctx: WindowCtx, parent: MsfGraph | None):
        s, e = ctx.start, ctx.end
        if parent is None:
            vmap: dict = {}
            candidates = []
            seen = set()
            for rec in ctx.events():
                if rec.element in seen:
                    continue
                seen.add(rec.element)
                payload = ctx.payload(rec.element)
                if len(payload) < 3:
                    raise ValueError(f"edge {rec.element} has no (u, v, w) payload")
                u, v, w = payload[0], payload[1], payload[2]
                candidates.append((w, rec.element, u, v))
            acc_weight, acc_ids = 0, frozenset()
        else:
            vmap = parent.vmap
            candidates = list(parent.edges)
            acc_weight, acc_ids = parent.acc_weight, parent.acc_ids

        perm, vol = [], []
        for edge in candidates:
            w, eid, u, v = edge
            ins, dl = ctx.lifetime(eid)
            # every test below depends only on whether the edge's events fall
            # inside the span, never on their exact days, so a containing
            # window's classification is stable under in-span reschedules
            if ins is None or ins > e or dl < s:
                continue  # no event here and never alive here
            if s <= ins <= e or s <= dl <= e:
                vol.append(edge)  # has an endpoint event inside the span
            else:
                perm.append(edge)  # alive across the whole span

        m = len(perm) + len(vol)
        cost = m * (1 + ceil(log2(m + 2)))

        # contraction test: volatile edges forced present
        parent_uf: dict = {}

        def find(uf, x):
            root = x
            while uf.get(root, root) != root:
                root = uf[root]
            while uf.get(x, x) != root:
                uf[x], x = root, uf[x]
            return root

        for _, _, u, v in vol:
            ru, rv = find(parent_uf, u), find(parent_uf, v)
            if ru != rv:
                parent_uf[max(ru, rv)] = min(ru, rv)
        contracted = []
        for w, eid, u, v in sorted(perm):
            ru, rv = find(parent_uf, u), find(parent_uf, v)
            if ru != rv:
                parent_uf[max(ru, rv)] = min(ru, rv)
                contracted.append((w, eid, u, v))

        # deletion test: permanents alone
        keep, _ = _kruskal(perm)
        contracted_ids = {eid for _, eid, _, _ in contracted}
        residual = [edge for edge in keep if edge[1] not in contracted_ids]

        # rebuild labels under the new contractions
        con_uf: dict = {}
        for _, _, u, v in contracted:
            ru, rv = find(con_uf, u), find(con_uf, v)
            if ru != rv:
                con_uf[max(ru, rv)] = min(ru, rv)
        new_vmap = {orig: find(con_uf, label) for orig, label in vmap.items()}
        if parent is None:
            for _, eid, u, v in candidates:
                for x in (u, v):
                    if x not in new_vmap:
                        new_vmap[x] = find(con_uf, x)
        new_edges = []
        for w, eid, u, v in residual + vol:
            ru, rv = find(con_uf, u), find(con_uf, v)
            if ru != rv:  # self-loops are in no spanning forest
                new_edges.append((w, eid, ru, rv))
        new_edges.sort()

        mem = MsfGraph(
            tuple(new_edges),
            new_vmap,
            acc_weight + sum(w for w, _, _, _ in contracted),
            acc_ids | frozenset(eid for _, eid, _, _ in contracted),
        )
        return mem, cost, mem.size()

    def day_output(self, leaf: MsfGraph, ctx: WindowCtx):
        t = ctx.start
        alive = []
        for edge in leaf.edges:
            ins, dl = ctx.lifetime(edge[1])
            if ins is not None and ins <= t < dl:
                alive.append(edge)
        picked, weight = _kruskal(alive)
        ids = tuple(sorted(leaf.acc_ids | {eid for _, eid, _, _ in picked}))
        return (leaf.acc_weight + weight, ids)

    def query(self, leaf: MsfGraph, *args):
        raise NotImplementedError("MSF exposes per-day outputs, not point queries")


def msf_problem() -> MsfProblem:
    return MsfProblem()


# -- daily brute-force oracles -------------------------------------------------


def _active_sets(stream: list[tuple[int, Event]]):
    """Yield (day, active element -> payload) after each day's real event."""
    active: dict[str, tuple] = {}
    payloads: dict[str, tuple] = {}
    for day, ev in stream:
        if ev.payload:
            payloads[ev.element] = ev.payload
        if ev.kind == INSERT:
            active[ev.element] = payloads.get(ev.element, ())
        else:
            if ev.element not in active:
                raise ValueError(f"day {day}: delete of inactive element {ev.element}")
            del active[ev.element]
        yield day, active


def _bfs_components(edges: list[tuple[int, int]]):
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen: set[int] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = []
        frontier = [start]
        seen.add(start)
        while frontier:
            x = frontier.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        comps.append(tuple(sorted(comp)))
    return tuple(sorted(comps))


def oracle_daily_outputs(
    problem: str,
    stream: list[tuple[int, Event]],
    payload_registry: dict[str, tuple] | None = None,
) -> list:
    """From-scratch recomputation of every day's answer from the true
    active set.  Independent of the engine's data structures."""
    registry = payload_registry or {}
    outs = []
    for day, active in _active_sets(stream):
        payload = lambda el: active[el] or registry.get(el, ())
        if problem == "counter":
            outs.append(len(active))
        elif problem == "connectivity":
            outs.append(_bfs_components([(payload(el)[0], payload(el)[1]) for el in active]))
        elif problem == "msf":
            edges = [(payload(el)[2], el, payload(el)[0], payload(el)[1]) for el in active]
            picked, weight = _kruskal(edges)
            outs.append((weight, tuple(sorted(eid for _, eid, _, _ in picked))))
        elif problem == "decmax":
            outs.append(max((payload(el)[0] for el in active), default=None))
        else:
            raise ValueError(f"unknown problem {problem!r}")
    return outs
