"""Min-cut labeling of superpixels with seed constraints.

A two-terminal graph is built over superpixels: seeded clusters get
infinite-capacity terminal links, unseeded ones pay the CIELAB distance to
the opposite side's mean seed color, and adjacent clusters share a contrast
weight gc_lambda * exp(-d^2 / (2 sigma^2)). The exact minimum cut comes from
Dinic's algorithm (graphs here are tiny).
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .expansion import ExpansionConfig, SeedSet
from .slic import SuperpixelMap


class SeedError(ValueError):
    """Raised when a seed side is empty; callers should fall back to
    y_c = statistic foreground only."""


class Dinic:
    """Max-flow on a small directed graph; iterative, float capacities."""

    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[float] = []
        self.head: list[list[int]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, cap: float, rev_cap: float = 0.0) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(float(cap))
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(float(rev_cap))

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if self.cap[e] > 0.0 and level[v] < 0:
                    level[v] = level[u] + 1
                    dq.append(v)
        return level if level[t] >= 0 else None

    def _blocking_flow(self, s: int, t: int, level: list[int]) -> float:
        total = 0.0
        it = [0] * self.n
        while True:
            # iterative DFS for one augmenting path in the level graph
            path: list[int] = []
            u = s
            while True:
                if u == t:
                    bottleneck = min(self.cap[e] for e in path)
                    for e in path:
                        self.cap[e] -= bottleneck
                        self.cap[e ^ 1] += bottleneck
                    total += bottleneck
                    # retreat to the first saturated edge on the path
                    for i, e in enumerate(path):
                        if self.cap[e] <= 0.0:
                            path = path[:i]
                            break
                    u = self.to[path[-1]] if path else s
                    continue
                advanced = False
                while it[u] < len(self.head[u]):
                    e = self.head[u][it[u]]
                    v = self.to[e]
                    if self.cap[e] > 0.0 and level[v] == level[u] + 1:
                        path.append(e)
                        u = v
                        advanced = True
                        break
                    it[u] += 1
                if advanced:
                    continue
                if u == s:
                    return total
                # dead end: exhaust this vertex and step back
                level[u] = -1
                e = path.pop()
                u = self.to[e ^ 1]
                it[u] += 1

    def max_flow(self, s: int, t: int) -> float:
        flow = 0.0
        while True:
            level = self._levels(s, t)
            if level is None:
                return flow
            flow += self._blocking_flow(s, t, level)

    def reachable(self, s: int) -> np.ndarray:
        """Vertices reachable from s in the residual graph (the source side
        of the minimum cut)."""
        seen = np.zeros(self.n, dtype=bool)
        seen[s] = True
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if self.cap[e] > 0.0 and not seen[v]:
                    seen[v] = True
                    dq.append(v)
        return seen


def min_cut(
    n: int,
    source_cap: np.ndarray,
    sink_cap: np.ndarray,
    edges: list[tuple[int, int, float]],
) -> tuple[float, np.ndarray]:
    """Minimum s/t cut over n nodes with per-node terminal capacities and
    undirected pairwise capacities. Returns (cut cost, source-side mask)."""
    source_cap = np.asarray(source_cap, dtype=np.float64)
    sink_cap = np.asarray(sink_cap, dtype=np.float64)
    net = Dinic(n + 2)
    s, t = n, n + 1
    for i in range(n):
        if source_cap[i] > 0.0:
            net.add_edge(s, i, source_cap[i])
        if sink_cap[i] > 0.0:
            net.add_edge(i, t, sink_cap[i])
    for u, v, wgt in edges:
        if wgt > 0.0:
            net.add_edge(u, v, wgt, rev_cap=wgt)
    flow = net.max_flow(s, t)
    side = net.reachable(s)[:n]
    return flow, side


def _seeded_ids(sp: SuperpixelMap, seeds: SeedSet) -> tuple[set[int], set[int]]:
    labels = sp.labels
    h, w = labels.shape
    fg = {int(labels[r, c]) for r, c in seeds.foreground if 0 <= r < h and 0 <= c < w}
    bg = {int(labels[r, c]) for r, c in seeds.background if 0 <= r < h and 0 <= c < w}
    # a cluster holding both seed kinds counts as foreground: scribble pixels
    # are road by construction, background seeds are only a heuristic grid
    bg -= fg
    return fg, bg


def graph_cut(sp: SuperpixelMap, seeds: SeedSet, cfg: ExpansionConfig) -> np.ndarray:
    """Label superpixels foreground/background by minimum cut; returns the
    per-pixel {0,1} map."""
    cfg.validate()
    fg_ids, bg_ids = _seeded_ids(sp, seeds)
    if not fg_ids or not bg_ids:
        raise SeedError(
            "graph cut needs at least one foreground- and one background-seeded "
            "superpixel; fall back to y_c = statistic foreground only"
        )
    k = sp.centers.shape[0]
    colors = sp.mean_color
    mu_fg = colors[sorted(fg_ids)].mean(axis=0)
    mu_bg = colors[sorted(bg_ids)].mean(axis=0)
    d_fg = np.sqrt(((colors - mu_fg) ** 2).sum(axis=1))
    d_bg = np.sqrt(((colors - mu_bg) ** 2).sum(axis=1))

    sigma = cfg.gc_sigma
    if sigma is None:
        if sp.adjacency:
            diffs = [
                math.sqrt(((colors[i] - colors[j]) ** 2).sum()) for i, j in sp.adjacency
            ]
            sigma = float(np.mean(diffs))
        else:
            sigma = 1.0
    if sigma <= 0.0:  # uniform image: any positive scale gives weight gc_lambda
        sigma = 1.0

    pair_w = {
        (i, j): cfg.gc_lambda * math.exp(-((colors[i] - colors[j]) ** 2).sum() / (2.0 * sigma**2))
        for i, j in sp.adjacency
    }

    src = np.zeros(k)
    snk = np.zeros(k)
    unseeded = [i for i in range(k) if i not in fg_ids and i not in bg_ids]
    for i in unseeded:
        # cutting the source link puts i on the background side, so that link
        # carries the cost of calling i background: its distance to the
        # background seed color (and symmetrically for the sink link)
        src[i] = d_bg[i]
        snk[i] = d_fg[i]
    finite_total = float(src.sum() + snk.sum() + sum(pair_w.values()))
    inf_cap = finite_total + 1.0
    for i in fg_ids:
        src[i] = inf_cap
        snk[i] = 0.0
    for i in bg_ids:
        snk[i] = inf_cap
        src[i] = 0.0

    edges = [(i, j, wgt) for (i, j), wgt in pair_w.items()]
    _, side = min_cut(k, src, snk, edges)
    return side[sp.labels].astype(np.float64)
