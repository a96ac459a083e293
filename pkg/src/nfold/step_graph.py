"""Dynamic (P, k)-best steps over a fixed brick partition.

For a partition ``P`` of the bricks into ``k*k`` classes, a (P, k)-best step
is a kernel vector ``y`` of maximum gain ``c.y`` that uses at most one brick
per class, has l1-norm at most ``k`` inside that brick and respects the step
bounds ``lbar <= y <= ubar``.

The search runs over a layered graph.  Layer ``j`` holds the reachable values
of the top-row partial sum after the first ``j`` classes; the step from layer
``j-1`` to ``j`` adds a difference ``d`` realised by a single brick of class
``j``.  Edge weights only depend on ``(class, d)``, so every such pair owns an
ordered index of ``(gain, brick)`` pairs whose maximum is the weight.  When
the bounds of one brick change, only that brick's pairs are swapped, so an
update costs ``O(log n)`` per touched edge instead of a rebuild.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from sortedcontainers import SortedList

from .brick import BrickGainTable, BrickProblem, build_gain_table
from .model import NFoldInstance, Vector
from .splitter import Partition

@dataclass(frozen=True)
class StepConfig:
    partition: Partition
    k: int
    lbar: tuple[int, ...]
    ubar: tuple[int, ...]

    def __post_init__(self) -> None:
        for lo, up in zip(self.lbar, self.ubar):
            if not lo <= 0 <= up:
                raise ValueError(f"step bounds must contain 0, got [{lo}, {up}]")


@dataclass(frozen=True)
class BestStep:
    y: tuple[int, ...]
    gain: int
    bricks: tuple[int, ...] = ()


def brick_table(inst: NFoldInstance, brick: int, lbar: Sequence[int], ubar: Sequence[int], k: int) -> BrickGainTable:
    sl = inst.brick_slice(brick)
    problem = BrickProblem(
        a_block=inst.a_blocks[brick],
        b_block=inst.b_blocks[brick],
        c_prime=inst.c[sl],
        lower_prime=tuple(lbar),
        upper_prime=tuple(ubar),
        k=k,
    )
    return build_gain_table(problem)


class StepGraph:
    """Layered partial-sum graph with per-edge max indexes for one partition."""

    def __init__(self, inst: NFoldInstance, config: StepConfig, tables: Sequence[BrickGainTable] | None = None):
        self.inst = inst
        self.partition = config.partition
        self.k = config.k
        self.lbar = list(config.lbar)
        self.ubar = list(config.ubar)
        self.members = config.partition.classes()
        if tables is None:
            t = inst.t
            tables = [
                brick_table(inst, i, self.lbar[i * t:(i + 1) * t], self.ubar[i * t:(i + 1) * t], self.k)
                for i in range(inst.n)
            ]
        self.tables: list[BrickGainTable] = list(tables)
        self.index: list[dict[Vector, SortedList]] = [{} for _ in self.members]
        for brick, table in enumerate(self.tables):
            self._insert(brick, table)
        self.layers: list[dict[Vector, int]] = []

    # -- edge indexes ------------------------------------------------------

    def _insert(self, brick: int, table: BrickGainTable) -> None:
        edges = self.index[self.partition.class_of[brick]]
        for d, (gain, _wit) in table.entries.items():
            idx = edges.get(d)
            if idx is None:
                idx = edges[d] = SortedList()
            idx.add((gain, brick))

    def update_brick(
        self,
        brick: int,
        lbar: Sequence[int],
        ubar: Sequence[int],
        table: BrickGainTable | None = None,
    ) -> None:
        """Replace the step bounds of one brick and swap its index entries."""
        t = self.inst.t
        sl = slice(brick * t, (brick + 1) * t)
        self.lbar[sl] = list(lbar)
        self.ubar[sl] = list(ubar)
        if table is None:
            table = brick_table(self.inst, brick, lbar, ubar, self.k)
        old = self.tables[brick]
        if old is table:
            return
        edges = self.index[self.partition.class_of[brick]]
        for d, (gain, _wit) in old.entries.items():
            new = table.entries.get(d)
            if new is not None and new[0] == gain:
                continue
            idx = edges[d]
            idx.remove((gain, brick))
            if not idx:
                del edges[d]
        for d, (gain, _wit) in table.entries.items():
            prev = old.entries.get(d)
            if prev is not None and prev[0] == gain:
                continue
            idx = edges.get(d)
            if idx is None:
                idx = edges[d] = SortedList()
            idx.add((gain, brick))
        self.tables[brick] = table

    def edge_maxima(self) -> dict[tuple[int, Vector], tuple[int, int]]:
        """``(class, d) -> (gain, brick)`` of every non-empty edge index."""
        return {
            (cls, d): idx[-1]
            for cls, edges in enumerate(self.index)
            for d, idx in edges.items()
        }

    def snapshot(self) -> list[dict[Vector, list[tuple[int, int]]]]:
        return [{d: list(idx) for d, idx in sorted(edges.items())} for edges in self.index]

    # -- longest path ------------------------------------------------------

    def _class_edges(self, cls: int) -> dict[Vector, int]:
        edges = self.index[cls]
        if not edges:
            return {(0,) * self.inst.r: 0}
        # sorted, so ties in the longest path do not depend on update history
        return {d: edges[d][-1][0] for d in sorted(edges)}

    def best_step(self) -> BestStep:
        """Longest source-to-target path, turned back into a step vector."""
        r = self.inst.r
        zero = (0,) * r
        weights = [self._class_edges(cls) for cls in range(len(self.members))]

        # per-coordinate reach of the classes still to come, for pruning
        m = len(weights)
        lo_suffix = [[0] * r for _ in range(m + 1)]
        hi_suffix = [[0] * r for _ in range(m + 1)]
        for cls in range(m - 1, -1, -1):
            ds = weights[cls]
            for c in range(r):
                lo_suffix[cls][c] = lo_suffix[cls + 1][c] + min(d[c] for d in ds)
                hi_suffix[cls][c] = hi_suffix[cls + 1][c] + max(d[c] for d in ds)

        layer: dict[Vector, int] = {zero: 0}
        back: list[dict[Vector, tuple[Vector, Vector]]] = []
        self.layers = [dict(layer)]
        for cls in range(m):
            ds = weights[cls]
            lo, hi = lo_suffix[cls + 1], hi_suffix[cls + 1]
            nxt: dict[Vector, int] = {}
            ptr: dict[Vector, tuple[Vector, Vector]] = {}
            if len(ds) == 1 and zero in ds:
                w = ds[zero]
                for v, val in layer.items():
                    nxt[v] = val + w
                    ptr[v] = (v, zero)
            else:
                for v, val in sorted(layer.items()):
                    for d, w in ds.items():
                        node = tuple(a + b for a, b in zip(v, d))
                        if any(not (lo[c] <= -node[c] <= hi[c]) for c in range(r)):
                            continue
                        cand = val + w
                        cur = nxt.get(node)
                        if cur is None or cand > cur:
                            nxt[node] = cand
                            ptr[node] = (v, d)
            layer = nxt
            back.append(ptr)
            self.layers.append(dict(layer))
        best = layer.get(zero, 0)
        self.layers.append({zero: best})

        y = [0] * self.inst.num_vars
        if best <= 0:
            return BestStep(tuple(y), 0)
        t = self.inst.t
        used: list[int] = []
        node = zero
        for cls in range(m - 1, -1, -1):
            prev, d = back[cls][node]
            idx = self.index[cls].get(d)
            if idx is not None:
                gain, brick = idx[-1]
                wit = self.tables[brick].entries[d][1]
                if any(wit):
                    y[brick * t:(brick + 1) * t] = wit
                    used.append(brick)
            node = prev
        return BestStep(tuple(y), best, tuple(sorted(used)))


def build(inst: NFoldInstance, config: StepConfig, tables: Sequence[BrickGainTable] | None = None) -> StepGraph:
    return StepGraph(inst, config, tables)


def best_step(graph: StepGraph) -> BestStep:
    return graph.best_step()


def update_brick(graph: StepGraph, brick: int, lbar: Sequence[int], ubar: Sequence[int]) -> None:
    graph.update_brick(brick, lbar, ubar)
