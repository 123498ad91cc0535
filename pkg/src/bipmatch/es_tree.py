"""Decremental single-source shortest-path tree for weighted directed graphs.

Maintains exact distances from a root up to a depth bound d under edge
deletions; levels are monotone non-decreasing.  Repair uses the classic
per-vertex scan pointer: an orphaned vertex resumes scanning its in-edges
for a parent realizing its current level, and only when the pointer wraps
does it recompute its level from scratch and cascade to its tree children.
Each vertex therefore pays at most two passes over its in-edges per level
value, keeping total scan work within a small multiple of m*d.

Ties among equal-level parents are broken by smallest edge id so runs are
bit-reproducible.
"""

from __future__ import annotations

import heapq

INF = float("inf")


class EsTree:
    def __init__(self, n: int, edges: list[tuple[int, int, int]], root: int, depth: int):
        """edges: (tail, head, length) triples; edge ids are list positions."""
        self.n = n
        self.root = root
        self.depth = depth
        self.tail = [e[0] for e in edges]
        self.head = [e[1] for e in edges]
        self.length = [e[2] for e in edges]
        for ln in self.length:
            if ln < 1 or ln != int(ln):
                raise ValueError("edge lengths must be integers >= 1")
        self.alive = [True] * len(edges)
        self.in_adj: list[list[int]] = [[] for _ in range(n)]
        self.out_adj: list[list[int]] = [[] for _ in range(n)]
        for eid, (u, v, _) in enumerate(edges):
            self.out_adj[u].append(eid)
            self.in_adj[v].append(eid)
        self.level: list[float] = [INF] * n
        self.parent_edge: list[int | None] = [None] * n
        self.children: list[set[int]] = [set() for _ in range(n)]
        self.ptr = [0] * n
        self.scan_steps = 0
        self.dropped: list[int] = []  # vertices newly pushed past the depth bound
        self._build()

    # ------------------------------------------------------------------ build

    def _build(self) -> None:
        dist = self.level
        dist[self.root] = 0
        best_edge: list[int | None] = [None] * self.n
        heap = [(0, self.root)]
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist[v]:
                continue
            for out in self.out_adj[v]:
                self.scan_steps += 1
                if not self.alive[out]:
                    continue
                w = self.head[out]
                nd = d + self.length[out]
                if nd > self.depth:
                    continue
                if nd < dist[w]:
                    dist[w] = nd
                    best_edge[w] = out
                    heapq.heappush(heap, (nd, w))
                elif nd == dist[w] and best_edge[w] is not None and out < best_edge[w]:
                    best_edge[w] = out
        for v in range(self.n):
            if v != self.root and dist[v] < INF:
                eid = best_edge[v]
                assert eid is not None
                self.parent_edge[v] = eid
                self.children[self.tail[eid]].add(v)

    # ---------------------------------------------------------------- queries

    def in_tree(self, v: int) -> bool:
        return self.level[v] < INF

    def path_to(self, v: int) -> list[int] | None:
        """Vertex sequence root..v of exact total length level(v), or None."""
        if self.level[v] == INF:
            return None
        seq = [v]
        while seq[-1] != self.root:
            eid = self.parent_edge[seq[-1]]
            assert eid is not None
            seq.append(self.tail[eid])
        seq.reverse()
        return seq

    def path_edges_to(self, v: int) -> list[int] | None:
        if self.level[v] == INF:
            return None
        out = []
        cur = v
        while cur != self.root:
            eid = self.parent_edge[cur]
            assert eid is not None
            out.append(eid)
            cur = self.tail[eid]
        out.reverse()
        return out

    # --------------------------------------------------------------- deletion

    def delete_edge(self, eid: int) -> None:
        self.delete_edges([eid])

    def delete_edges(self, eids: list[int]) -> None:
        orphans = []
        for eid in eids:
            if not self.alive[eid]:
                raise ValueError(f"edge {eid} already deleted")
            self.alive[eid] = False
            v = self.head[eid]
            if self.parent_edge[v] == eid:
                self.parent_edge[v] = None
                self.children[self.tail[eid]].discard(v)
                orphans.append(v)
        if orphans:
            self._repair(orphans)

    def _repair(self, seeds: list[int]) -> None:
        heap: list[tuple[float, int]] = []
        pending: set[int] = set()
        for v in seeds:
            pending.add(v)
            heapq.heappush(heap, (self.level[v], v))
        while heap:
            lv, v = heapq.heappop(heap)
            if v not in pending or self.level[v] != lv:
                continue
            pending.discard(v)
            adj = self.in_adj[v]
            # resume pointer scan for a parent realizing the current level
            attached = False
            while self.ptr[v] < len(adj):
                eid = adj[self.ptr[v]]
                self.scan_steps += 1
                if self.alive[eid] and self.level[self.tail[eid]] + self.length[eid] == lv:
                    self.parent_edge[v] = eid
                    self.children[self.tail[eid]].add(v)
                    attached = True
                    break
                self.ptr[v] += 1
            if attached:
                continue
            # pointer wrapped: recompute the level from scratch
            best = INF
            best_eid = None
            for eid in adj:
                self.scan_steps += 1
                if not self.alive[eid]:
                    continue
                cand = self.level[self.tail[eid]] + self.length[eid]
                if cand < best or (cand == best and (best_eid is None or eid < best_eid)):
                    best = cand
                    best_eid = eid
            for c in sorted(self.children[v]):
                self.parent_edge[c] = None
                if c not in pending:
                    pending.add(c)
                    heapq.heappush(heap, (self.level[c], c))
            self.children[v].clear()
            if best > self.depth:
                self.level[v] = INF
                self.dropped.append(v)
                continue
            self.level[v] = best
            self.ptr[v] = 0
            assert best_eid is not None
            self.parent_edge[v] = best_eid
            self.children[self.tail[best_eid]].add(v)

    def scan_budget(self, m: int | None = None) -> int:
        m = m if m is not None else max(1, len(self.tail))
        return 16 * m * (self.depth + 1) + 64
