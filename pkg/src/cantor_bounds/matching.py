"""Maximum-cardinality matching.

Edmonds' blossom algorithm for general graphs and Hopcroft-Karp for the
bipartite case.  A greedy maximal matching is available as a cheap fallback;
any matching gives a sound measure cap, only the maximum gives the tightest.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Matching:
    size: int
    pairs: tuple[tuple[int, int], ...]
    maximum: bool = True


def _adjacency(n: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _greedy(adj: list[list[int]]) -> list[int]:
    mate = [-1] * len(adj)
    for u in sorted(range(len(adj)), key=lambda x: len(adj[x])):
        if mate[u] != -1:
            continue
        for v in adj[u]:
            if mate[v] == -1:
                mate[u], mate[v] = v, u
                break
    return mate


def _pairs(mate: Sequence[int]) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) for u, v in enumerate(mate) if u < v)


def greedy_matching(n: int, edges: Iterable[tuple[int, int]]) -> Matching:
    mate = _greedy(_adjacency(n, edges))
    pairs = _pairs(mate)
    return Matching(len(pairs), pairs, maximum=False)


class _Blossom:
    def __init__(self, adj: list[list[int]]):
        self.adj = adj
        self.n = len(adj)
        self.mate = _greedy(adj)

    def _lca(self, a: int, b: int) -> int:
        base, mate, parent = self.base, self.mate, self.parent
        seen = [False] * self.n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[mate[b]]

    def _mark_path(self, v: int, b: int, child: int, blossom: list[bool]):
        base, mate, parent = self.base, self.mate, self.parent
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    def _find_path(self, root: int) -> int:
        n, adj, mate = self.n, self.adj, self.mate
        self.used = used = [False] * n
        self.parent = parent = [-1] * n
        self.base = base = list(range(n))
        used[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    cur = self._lca(v, to)
                    blossom = [False] * n
                    self._mark_path(v, cur, to, blossom)
                    self._mark_path(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if mate[to] == -1:
                        return to
                    used[mate[to]] = True
                    queue.append(mate[to])
        return -1

    def _augment(self, v: int):
        mate, parent = self.mate, self.parent
        while v != -1:
            pv = parent[v]
            nxt = mate[pv]
            mate[v], mate[pv] = pv, v
            v = nxt

    def run(self) -> list[int]:
        for root in range(self.n):
            if self.mate[root] == -1 and self.adj[root]:
                end = self._find_path(root)
                if end != -1:
                    self._augment(end)
        return self.mate


def edmonds_matching(n: int, edges: Iterable[tuple[int, int]]) -> Matching:
    """Maximum matching in a general graph, O(n^3).

    Starting from a greedy matching, search an augmenting path from every
    free vertex, contracting odd cycles (blossoms) on the way.  A vertex with
    no augmenting path never gains one later, so one pass suffices.
    """
    mate = _Blossom(_adjacency(n, edges)).run()
    pairs = _pairs(mate)
    return Matching(len(pairs), pairs)


def hopcroft_karp(n_left: int, n_right: int, edges: Iterable[tuple[int, int]]) -> Matching:
    """Maximum matching of a bipartite graph with edges (left, right).

    Returned pairs use left indices 0..n_left-1 and right indices shifted by
    n_left, so they index the same vertex list as the general solver.
    """
    adj: list[list[int]] = [[] for _ in range(n_left)]
    for u, v in edges:
        adj[u].append(v)
    INF = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        # iterative to stay clear of the recursion limit on long paths
        stack = [(u, iter(adj[u]))]
        path = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w == -1:
                    path.append((x, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[x] + 1:
                    path.append((x, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[x] = INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                dfs(u)
    pairs = tuple((u, n_left + v) for u, v in enumerate(match_l) if v != -1)
    return Matching(len(pairs), pairs)


def is_matching(pairs: Iterable[tuple[int, int]], edges: Iterable[tuple[int, int]]) -> bool:
    """True when ``pairs`` are vertex-disjoint edges of the graph."""
    edge_set = {frozenset(e) for e in edges}
    used: set[int] = set()
    for u, v in pairs:
        if u in used or v in used or frozenset((u, v)) not in edge_set:
            return False
        used.update((u, v))
    return True
