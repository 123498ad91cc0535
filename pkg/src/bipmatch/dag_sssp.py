"""Decremental approximate s-t shortest paths on weighted DAG-like graphs.

Maintains, under edge deletions and vertex splits, per-vertex distance
estimates that are multiples of eps, a shortest-path out-tree from the
source, per-vertex in-neighbor heaps and weight-bucketed out-neighbor sets.
A vertex re-communicates its estimate to a weight-2^i out-neighbor only when
the estimate crosses a multiple of eps^2*ceil(d*2^i/(Gamma*log n)), which is
what caps the total update work.

Everything is stored as integers scaled by 1/eps^2: modified lengths are
k^2*len + k*T_i with k = 1/eps and T_i = ceil(d*2^i/(Gamma*log n)), so
estimates move in steps of k and notification thresholds are exact multiples
of T_i.  No floating point is used anywhere in the update path.

A query returns the tree path (original total length at most (1+10eps)*d)
or FAIL; FAIL is permanent and only legal when no s-t path has both total
length <= d and total weight <= Gamma.
"""

from __future__ import annotations

import heapq
import math

from .constants import log2c

INF = math.inf


class DagSssp:
    def __init__(self, s: int, t: int, d: int, eps_inv: int, gamma: int,
                 n_hint: int, checked: bool = False):
        if eps_inv < 8:
            raise ValueError("1/eps must be an integer >= 8")
        if d <= 0 or gamma <= 0:
            raise ValueError("d and Gamma must be positive")
        self.s = s
        self.t = t
        self.k = eps_inv
        self.gamma = gamma
        self.d_original = d
        self.n_hint = max(2, n_hint)
        self.logn = log2c(self.n_hint)
        self.max_class = max(1, math.ceil(math.log2(self.n_hint)))
        self.checked = checked

        # initial length transformation: ensure Gamma*logn <= d <= max(4n/eps, 4*Gamma*logn)
        k = self.k
        if d > self.n_hint * k:
            self.c1 = -(-d // (self.n_hint * k))
            d = ((k + 2) * d) // (k * self.c1)
        else:
            self.c1 = 1
        if d < gamma * self.logn:
            self.c2 = -(-(gamma * self.logn) // d)
            d = self.c2 * d
        else:
            self.c2 = 1
        self.d = d
        self.cap = 2 * d * k * k                      # estimates beyond this become INF
        self.fail_threshold = d * k * k + 3 * d * k   # (1+3eps)*d, scaled
        self.thresholds = [
            -(-(d * (1 << i)) // (gamma * self.logn)) for i in range(self.max_class + 1)
        ]

        self.n = 0
        self.tail: list[int] = []
        self.head: list[int] = []
        self.ell0: list[int] = []       # original (untransformed) length
        self.lprime: list[int] = []     # k^2-scaled modified length
        self.wclass: list[int] = []
        self.alive: list[bool] = []
        self.is_temp: list[bool] = []
        self.in_edges: list[list[int]] = []
        self.out_by_class: list[dict[int, set[int]]] = []

        self.est: list[float] = []
        self.stale: list[float] = []    # per edge: tail's estimate as last told to head
        self.key_of: list[float] = []
        self.in_heap: list[list[tuple[float, int]]] = []
        self.parent_edge: list[int | None] = []
        self.children: list[set[int]] = []

        self.finalized = False
        self.failed = False
        self.work = 0
        self.m_counted = 0
        self._est_floor: list[float] = []  # for the monotonicity check
        self._q: list[tuple[float, int]] = []
        self._q_members: dict[int, float] = {}

    # ------------------------------------------------------------- building

    def add_vertex(self) -> int:
        vid = self.n
        self.n += 1
        self.in_edges.append([])
        self.out_by_class.append({})
        self.est.append(INF)
        self.in_heap.append([])
        self.parent_edge.append(None)
        self.children.append(set())
        self._est_floor.append(0)
        return vid

    def _transform(self, length: int) -> int:
        return self.c2 * (-(-length // self.c1))

    def _class_of(self, weight: int) -> int:
        cls = weight.bit_length() - 1
        if weight <= 0 or (1 << cls) != weight or cls > self.max_class:
            raise ValueError(f"weight {weight} is not a power of 2 within range")
        return cls

    def _new_edge(self, u: int, v: int, length: int, weight: int, temp: bool = False) -> int:
        if length <= 0:
            raise ValueError("length must be positive")
        cls = self._class_of(weight)
        eid = len(self.tail)
        self.tail.append(u)
        self.head.append(v)
        self.ell0.append(length)
        lp = self.k * self.k * self._transform(length) + self.k * self.thresholds[cls]
        self.lprime.append(lp)
        self.wclass.append(cls)
        self.alive.append(True)
        self.is_temp.append(temp)
        self.in_edges[v].append(eid)
        self.out_by_class[u].setdefault(cls, set()).add(eid)
        self.stale.append(INF)
        self.key_of.append(INF)
        if not temp:
            self.m_counted += 1
        self.work += 1
        return eid

    def add_edge(self, u: int, v: int, length: int, weight: int) -> int:
        if self.finalized:
            raise RuntimeError("edges may only be added before finalize or via splits")
        return self._new_edge(u, v, length, weight)

    def finalize(self) -> None:
        if self.finalized:
            raise RuntimeError("already finalized")
        try:
            self.check_p1()
        except AssertionError as exc:
            raise ValueError(f"input violates the bucket-degree property: {exc}")
        self.finalized = True
        dist: list[float] = [INF] * self.n
        best: list[int | None] = [None] * self.n
        dist[self.s] = 0
        heap = [(0, self.s)]
        while heap:
            dcur, v = heapq.heappop(heap)
            if dcur > dist[v]:
                continue
            for cls, eids in self.out_by_class[v].items():
                for eid in sorted(eids):
                    self.work += 1
                    w = self.head[eid]
                    nd = dcur + self.lprime[eid]
                    if nd < dist[w]:
                        dist[w] = nd
                        best[w] = eid
                        heapq.heappush(heap, (nd, w))
                    elif nd == dist[w] and best[w] is not None and eid < best[w]:
                        best[w] = eid
        for v in range(self.n):
            self.est[v] = dist[v] if dist[v] <= self.cap else INF
        for v in range(self.n):
            if v != self.s and self.est[v] < INF:
                eid = best[v]
                assert eid is not None
                self.parent_edge[v] = eid
                self.children[self.tail[eid]].add(v)
        for eid in range(len(self.tail)):
            self.stale[eid] = self.est[self.tail[eid]]
            self._set_key(eid)
        if self.checked:
            self.check_invariants()

    # ------------------------------------------------------------ heap utils

    def _set_key(self, eid: int) -> None:
        if not self.alive[eid] or self.stale[eid] is INF:
            self.key_of[eid] = INF
            return
        key = self.stale[eid] + self.lprime[eid]
        self.key_of[eid] = key
        heapq.heappush(self.in_heap[self.head[eid]], (key, eid))
        self.work += 1

    def _heap_min(self, v: int):
        h = self.in_heap[v]
        while h:
            key, eid = h[0]
            if self.alive[eid] and self.key_of[eid] == key:
                return key, eid
            heapq.heappop(h)
            self.work += 1
        return INF, None

    # ---------------------------------------------------------  est raising

    def _notify(self, v: int, old: float, new: float) -> None:
        """Push v's new estimate to out-neighbors whose class threshold was crossed."""
        for cls, eids in self.out_by_class[v].items():
            t_i = self.thresholds[cls]
            if new is INF or old // t_i < new // t_i:
                for eid in sorted(eids):
                    self.work += 1
                    if not self.alive[eid]:
                        continue
                    self.stale[eid] = new
                    self._set_key(eid)
                    u = self.head[eid]
                    if self.parent_edge[u] == eid:
                        self.parent_edge[u] = None
                        self.children[v].discard(u)
                        self._enqueue(u)

    def _enqueue(self, v: int) -> None:
        self._q_members[v] = self.est[v]
        heapq.heappush(self._q, (self.est[v], v))
        self.work += 1

    def _set_inf(self, v: int) -> None:
        old = self.est[v]
        self.est[v] = INF
        self._notify(v, old, INF)
        for c in sorted(self.children[v]):
            self.parent_edge[c] = None
            self._enqueue(c)
        self.children[v].clear()

    def _process_queue(self) -> None:
        """Reattach or retire every queued vertex.

        A vertex pops, looks at its cheapest in-edge key, and either attaches
        at its current estimate or jumps the estimate straight to that key
        (capped), firing all crossed notification thresholds in one batch.
        Tree keys strictly exceed their tail's estimate, so attaching through
        a still-dangling parent can never create a cycle and resolves itself
        when the parent moves.
        """
        q = self._q
        members = self._q_members
        while q:
            est_popped, a = heapq.heappop(q)
            self.work += 1
            if members.get(a) != est_popped or self.est[a] != est_popped:
                continue
            del members[a]
            while self.est[a] is not INF:
                key, eid = self._heap_min(a)
                if key <= self.est[a]:
                    if self.checked and key != self.est[a]:
                        raise AssertionError("attach below the current estimate")
                    assert eid is not None
                    self.parent_edge[a] = eid
                    self.children[self.tail[eid]].add(a)
                    break
                new = min(key, self.cap + self.k)
                old = self.est[a]
                self.est[a] = new
                self._notify(a, old, new)
                if new > self.cap:
                    self._set_inf(a)
                    break

    # ------------------------------------------------------------ operations

    def delete_edge(self, eid: int) -> None:
        if not self.finalized:
            raise RuntimeError("finalize first")
        if not self.alive[eid]:
            raise ValueError(f"edge {eid} already deleted")
        self.alive[eid] = False
        self.key_of[eid] = INF
        self.out_by_class[self.tail[eid]][self.wclass[eid]].discard(eid)
        self.work += 1
        v = self.head[eid]
        self._q = []
        self._q_members = {}
        if self.parent_edge[v] == eid:
            self.parent_edge[v] = None
            self.children[self.tail[eid]].discard(v)
            self._enqueue(v)
            self._process_queue()
        if self.checked:
            self.check_invariants()

    def split_vertex(self, v: int, new_ids: list[int],
                     specs: list[tuple[int, int, int, int]]) -> list[int]:
        """Split new_ids off from v; specs are (tail, head, length, weight).

        Every described edge either joins two members of {v}+new_ids, or
        mirrors an existing edge between v and an outside vertex with
        identical length and weight.  Returns the created edge ids, in
        input order.
        """
        if not self.finalized:
            raise RuntimeError("finalize first")
        if v in (self.s, self.t):
            raise ValueError("cannot split the source or sink")
        group = set(new_ids) | {v}
        for u in new_ids:
            if u != self.n:
                raise ValueError("new vertex ids must be allocated in order")
            self.add_vertex()
            self.est[u] = self.est[v]
            self._est_floor[u] = 0 if self.est[v] is INF else self.est[v]

        temp_ids: list[int] = []
        if self.est[v] is not INF:
            pe = self.parent_edge[v]
            assert pe is not None
            x = self.tail[pe]
            for u in new_ids:
                te = self._new_edge(x, u, self.ell0[pe], 1 << self.wclass[pe], temp=True)
                self.lprime[te] = self.lprime[pe]
                self.stale[te] = self.stale[pe]
                self._set_key(te)
                self.parent_edge[u] = te
                self.children[x].add(u)
                temp_ids.append(te)

        created: list[int] = []
        for a, b, length, weight in specs:
            if a in group and b in group:
                eid = self._new_edge(a, b, length, weight)
                self.stale[eid] = self.est[a]
                self._set_key(eid)
            elif b in group:
                mirror = self._find_mirror(a, v, length, weight, incoming=True)
                eid = self._new_edge(a, b, length, weight)
                self.stale[eid] = self.stale[mirror]
                self._set_key(eid)
            elif a in group:
                mirror = self._find_mirror(b, v, length, weight, incoming=False)
                eid = self._new_edge(a, b, length, weight)
                self.stale[eid] = self.stale[mirror]
                self._set_key(eid)
            else:
                raise ValueError("a described edge does not touch the split group")
            created.append(eid)

        self._q = []
        self._q_members = {}
        for te in temp_ids:
            self.alive[te] = False
            self.key_of[te] = INF
            self.out_by_class[self.tail[te]][self.wclass[te]].discard(te)
            u = self.head[te]
            if self.parent_edge[u] == te:
                self.parent_edge[u] = None
                self.children[self.tail[te]].discard(u)
                self._enqueue(u)
        self._process_queue()
        if self.checked:
            self.check_invariants()
        return created

    def _find_mirror(self, outside: int, v: int, length: int, weight: int,
                     incoming: bool) -> int:
        cls = self._class_of(weight)
        if incoming:
            cands = [e for e in self.in_edges[v]
                     if self.alive[e] and self.tail[e] == outside
                     and self.ell0[e] == length and self.wclass[e] == cls]
        else:
            cands = [e for e in self.out_by_class[v].get(cls, ())
                     if self.alive[e] and self.head[e] == outside and self.ell0[e] == length]
        if not cands:
            raise ValueError("vertex-split edge has no mirror in the current graph")
        return min(cands)

    # --------------------------------------------------------------- queries

    def path_query(self):
        """Tree path s..t as edge ids, or None (permanent FAIL)."""
        if self.failed or self.est[self.t] > self.fail_threshold:
            self.failed = True
            return None
        eids: list[int] = []
        cur = self.t
        while cur != self.s:
            pe = self.parent_edge[cur]
            assert pe is not None
            eids.append(pe)
            cur = self.tail[pe]
        eids.reverse()
        if self.checked:
            total = sum(self.ell0[e] for e in eids)
            k = self.k
            if total * 10 * k > (10 * k + 100) * self.d_original:
                raise AssertionError("query path exceeds (1+10eps)*d")
        return eids

    def path_length(self, eids: list[int]) -> int:
        return sum(self.ell0[e] for e in eids)

    def work_budget(self) -> int:
        n = self.n
        return 16 * self.k * self.k * (n * n + self.m_counted + self.gamma * n)

    # ------------------------------------------------------------ invariants

    def _exact_dist(self) -> list[float]:
        dist: list[float] = [INF] * self.n
        dist[self.s] = 0
        heap = [(0, self.s)]
        while heap:
            dcur, v = heapq.heappop(heap)
            if dcur > dist[v]:
                continue
            for cls, eids in self.out_by_class[v].items():
                for eid in eids:
                    if not self.alive[eid]:
                        continue
                    w = self.head[eid]
                    nd = dcur + self.lprime[eid]
                    if nd < dist[w]:
                        dist[w] = nd
                        heapq.heappush(heap, (nd, w))
        return dist

    def check_invariants(self) -> None:
        k = self.k
        # I1: estimates are multiples of eps and never decrease
        for v in range(self.n):
            e = self.est[v]
            if e is not INF:
                if e % k != 0:
                    raise AssertionError(f"est[{v}]={e} not a multiple of eps")
                if e < self._est_floor[v]:
                    raise AssertionError(f"est[{v}] decreased")
                self._est_floor[v] = e
            else:
                self._est_floor[v] = self.cap
        # I2: tree keys; I3: staleness bounds
        for v in range(self.n):
            pe = self.parent_edge[v]
            if pe is not None:
                if not self.alive[pe]:
                    raise AssertionError("tree edge is dead")
                key = self.stale[pe] + self.lprime[pe]
                if key != self.est[v]:
                    raise AssertionError(f"tree key mismatch at {v}")
                best = INF
                for eid in self.in_edges[v]:
                    if self.alive[eid] and self.stale[eid] is not INF:
                        best = min(best, self.stale[eid] + self.lprime[eid])
                if best < key:
                    raise AssertionError(f"tree edge at {v} is not the heap minimum")
        for eid in range(len(self.tail)):
            if not self.alive[eid]:
                continue
            u = self.tail[eid]
            t_i = self.thresholds[self.wclass[eid]]
            if self.est[u] is INF:
                if self.stale[eid] is not INF:
                    raise AssertionError("stale finite while estimate infinite")
            else:
                if self.stale[eid] is INF or not (
                    self.est[u] - t_i <= self.stale[eid] <= self.est[u]
                ):
                    raise AssertionError(f"staleness bound violated on edge {eid}")
        # I4/I5 against exact distances over modified lengths
        dist = self._exact_dist()
        for v in range(self.n):
            if dist[v] <= self.cap:
                if self.est[v] is INF or self.est[v] > dist[v]:
                    raise AssertionError(f"estimate above true distance at {v}")
            if dist[v] is not INF and self.est[v] is not INF:
                if k * self.est[v] < (k - 1) * dist[v]:
                    raise AssertionError(f"estimate below (1-eps)*dist at {v}")
            if self.est[v] is not INF and v != self.s:
                # tree path length within est/(1-eps)
                total = 0
                cur = v
                while cur != self.s:
                    pe = self.parent_edge[cur]
                    assert pe is not None
                    total += self.lprime[pe]
                    cur = self.tail[pe]
                if total * (k - 1) > self.est[v] * k:
                    raise AssertionError(f"tree path too long at {v}")

    def check_p1(self) -> None:
        for v in range(self.n):
            if v == self.t:
                continue
            for cls, eids in self.out_by_class[v].items():
                heads = {self.head[e] for e in eids if self.alive[e] and not self.is_temp[e]}
                if len(heads) > (1 << (cls + 2)):
                    raise AssertionError(
                        f"P1 violated at vertex {v} class {cls}: {len(heads)}"
                    )
