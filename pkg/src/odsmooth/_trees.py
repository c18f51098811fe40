"""Array-backed KD-tree and ball tree for exact k-nearest-neighbor queries.

Both trees return exactly the same neighbors as a quadratic scan, including
the tie rule (equal distances resolved by ascending point index). Three
details make that guarantee hold:

* Candidate distances are computed with the same numpy expression as the
  brute-force scan (elementwise difference, square, row sum), so a given
  point pair always yields the bit-identical squared distance.
* Subtrees are pruned only when their lower bound strictly exceeds the
  current k-th best distance; a bound equal to it may still hide a point
  that wins the index tie-break.
* Node bounds are shaved by a relative 1e-12 (and ball radii inflated by
  the same amount), so rounding differences between the bound arithmetic
  and the distance arithmetic can never prune a genuine candidate.

Nodes always split at the positional median of the widest axis, so
duplicate-heavy data cannot cause unbalanced recursion.
"""

from __future__ import annotations

from heapq import heappop, heappush
from math import sqrt

import numpy as np

_LEAF_SIZE = 64

# one-sided safety margin for pruning decisions (see module docstring)
_BOUND_SLACK = 1.0 - 1e-12


class _BinaryTree:
    """Shared build logic: median splits on the widest axis, leaves hold slices."""

    def __init__(self, points: np.ndarray, leaf_size: int = _LEAF_SIZE) -> None:
        self.points = np.ascontiguousarray(points, dtype=np.float64)
        self.leaf_size = max(int(leaf_size), 1)
        n = self.points.shape[0]
        self.perm = np.arange(n)
        # flat node storage, filled by _build
        self.node_lo: list[int] = []
        self.node_hi: list[int] = []
        self.node_left: list[int] = []
        self.node_right: list[int] = []
        self._build(0, n)
        self.sorted_points = self.points[self.perm]
        self._finish_nodes()

    def _build(self, lo: int, hi: int) -> int:
        node = len(self.node_lo)
        self.node_lo.append(lo)
        self.node_hi.append(hi)
        self.node_left.append(-1)
        self.node_right.append(-1)
        if hi - lo > self.leaf_size:
            seg = self.perm[lo:hi]
            pts = self.points[seg]
            axis = int(np.argmax(pts.max(axis=0) - pts.min(axis=0)))
            order = np.argsort(pts[:, axis], kind="stable")
            self.perm[lo:hi] = seg[order]
            mid = lo + (hi - lo) // 2
            self.node_left[node] = self._build(lo, mid)
            self.node_right[node] = self._build(mid, hi)
        return node

    def _finish_nodes(self) -> None:
        raise NotImplementedError

    def _node_bound(self, node: int, x: list[float]) -> float:
        """Conservative lower bound on squared distance from x to the node."""
        raise NotImplementedError

    def query_point(
        self, x: np.ndarray, k: int, exclude: int = -1
    ) -> tuple[np.ndarray, np.ndarray]:
        """Exact k nearest neighbors of x, optionally excluding one point index.

        Returns (indices, distances) sorted by ascending (distance, index).
        Nodes are visited best-bound-first; the current k-th best distance
        prunes whole subtrees, and leaf candidates are merged into the
        running result with one lexsort per leaf.
        """
        x = np.asarray(x, dtype=np.float64)
        x_list = x.tolist()
        best_d2: np.ndarray | None = None
        best_idx: np.ndarray | None = None
        pending: list[tuple[float, int]] = [(0.0, 0)]
        node_left = self.node_left
        node_right = self.node_right
        while pending:
            bound, node = heappop(pending)
            full = best_d2 is not None and best_d2.shape[0] == k
            if full and bound > best_d2[-1]:
                break
            left = node_left[node]
            if left != -1:
                right = node_right[node]
                heappush(pending, (self._node_bound(left, x_list), left))
                heappush(pending, (self._node_bound(right, x_list), right))
                continue
            lo, hi = self.node_lo[node], self.node_hi[node]
            diff = self.sorted_points[lo:hi] - x
            # same expression as the brute-force scan, so distances match bitwise
            d2 = (diff * diff).sum(axis=1)
            idx = self.perm[lo:hi]
            if exclude >= 0:
                keep = idx != exclude
                if not keep.all():
                    d2 = d2[keep]
                    idx = idx[keep]
            if full:
                # equality kept: an equal distance can still win the index tie
                keep = d2 <= best_d2[-1]
                d2 = d2[keep]
                idx = idx[keep]
                if d2.shape[0] == 0:
                    continue
            if best_d2 is not None:
                d2 = np.concatenate((best_d2, d2))
                idx = np.concatenate((best_idx, idx))
            order = np.lexsort((idx, d2))[:k]
            best_d2 = d2[order]
            best_idx = idx[order]
        return best_idx.astype(np.int64), np.sqrt(best_d2)


class KDTree(_BinaryTree):
    """Axis-aligned bounding-box tree; bound is the squared distance to the box."""

    def _finish_nodes(self) -> None:
        box_min = []
        box_max = []
        for node in range(len(self.node_lo)):
            seg = self.sorted_points[self.node_lo[node] : self.node_hi[node]]
            box_min.append(seg.min(axis=0).tolist())
            box_max.append(seg.max(axis=0).tolist())
        self._box_min = box_min
        self._box_max = box_max

    def _node_bound(self, node: int, x: list[float]) -> float:
        box_min = self._box_min[node]
        box_max = self._box_max[node]
        total = 0.0
        for j, v in enumerate(x):
            lo = box_min[j]
            if v < lo:
                gap = lo - v
                total += gap * gap
            else:
                hi = box_max[j]
                if v > hi:
                    gap = v - hi
                    total += gap * gap
        return total * _BOUND_SLACK


class BallTree(_BinaryTree):
    """Centroid/radius tree; suited to higher dimensions than the KD-tree."""

    def _finish_nodes(self) -> None:
        centroids = []
        radii = []
        for node in range(len(self.node_lo)):
            seg = self.sorted_points[self.node_lo[node] : self.node_hi[node]]
            center = seg.mean(axis=0)
            diff = seg - center
            centroids.append(center.tolist())
            radii.append(sqrt(float((diff * diff).sum(axis=1).max())) / _BOUND_SLACK)
        self._centroids = centroids
        self._radii = radii

    def _node_bound(self, node: int, x: list[float]) -> float:
        center = self._centroids[node]
        total = 0.0
        for j, v in enumerate(x):
            gap = v - center[j]
            total += gap * gap
        gap = sqrt(total) - self._radii[node]
        if gap <= 0.0:
            return 0.0
        return gap * gap * _BOUND_SLACK
