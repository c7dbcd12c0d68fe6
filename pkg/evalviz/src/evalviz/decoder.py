"""Minimum-weight perfect-matching decoding over the detector error model.

Shortest-path distances (and the logical parity picked up along each path)
are precomputed with Dijkstra over the edge graph; each shot's defects are
matched against each other and the boundary.  Small defect sets use exact
matching enumeration; larger ones fall back to the blossom matching in
networkx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .dem import BOUNDARY, ErrorModel

_P_FLOOR = 1e-14
_P_CEIL = 0.5 - 1e-9
_EXACT_MATCHING_LIMIT = 4  # defects; above this use blossom matching


@dataclass
class MatchingDecoder:
    n_detectors: int
    dist: np.ndarray  # (n+1, n+1) including the boundary node
    parity: np.ndarray  # logical parity along the shortest path

    @classmethod
    def from_model(cls, model: ErrorModel) -> "MatchingDecoder":
        n = model.n_detectors
        boundary = n
        rows, cols, weights = [], [], []
        parity_of: dict[tuple[int, int], bool] = {}
        for (a, b), (p, obs) in model.edges.items():
            if b == BOUNDARY:
                b = boundary
            p = min(max(p, _P_FLOOR), _P_CEIL)
            w = math.log((1 - p) / p)
            key = (min(a, b), max(a, b))
            if key in parity_of:
                continue  # first (highest-probability) edge wins
            parity_of[key] = obs
            rows += [a, b]
            cols += [b, a]
            weights += [w, w]
        graph = csr_matrix((weights, (rows, cols)), shape=(n + 1, n + 1))
        dist, predecessors = dijkstra(graph, return_predecessors=True)
        parity = np.zeros((n + 1, n + 1), dtype=bool)
        for src in range(n + 1):
            for dst in range(n + 1):
                if src >= dst or not np.isfinite(dist[src, dst]):
                    continue
                par = False
                node = dst
                while node != src:
                    prev = predecessors[src, node]
                    if prev < 0:
                        break
                    key = (min(prev, node), max(prev, node))
                    par ^= parity_of.get(key, False)
                    node = prev
                parity[src, dst] = parity[dst, src] = par
        return cls(n_detectors=n, dist=dist, parity=parity)

    # -- per-shot decoding -------------------------------------------------

    def decode(self, defects: np.ndarray) -> bool:
        """Logical correction parity for one shot's defect list."""
        k = len(defects)
        if k == 0:
            return False
        boundary = self.n_detectors
        if k == 1:
            return bool(self.parity[defects[0], boundary])
        if k <= _EXACT_MATCHING_LIMIT:
            return self._decode_exact(list(defects))
        return self._decode_blossom(list(defects))

    def _pair_cost(self, a: int, b: int) -> float:
        boundary = self.n_detectors
        via_boundary = self.dist[a, boundary] + self.dist[b, boundary]
        direct = self.dist[a, b]
        return min(direct, via_boundary)

    def _pair_parity(self, a: int, b: int) -> bool:
        boundary = self.n_detectors
        via_boundary = self.dist[a, boundary] + self.dist[b, boundary]
        if self.dist[a, b] <= via_boundary:
            return bool(self.parity[a, b])
        return bool(self.parity[a, boundary] ^ self.parity[b, boundary])

    def _decode_exact(self, defects: list[int]) -> bool:
        best_cost, best_parity = self._match_rec(tuple(sorted(defects)))
        return best_parity

    def _match_rec(self, defects: tuple[int, ...]) -> tuple[float, bool]:
        if not defects:
            return 0.0, False
        boundary = self.n_detectors
        first, rest = defects[0], defects[1:]
        # match to boundary
        best_cost = self.dist[first, boundary]
        sub_cost, sub_par = self._match_rec(rest)
        best_cost += sub_cost
        best_parity = bool(self.parity[first, boundary]) ^ sub_par
        # match to each partner
        for i, partner in enumerate(rest):
            remaining = rest[:i] + rest[i + 1 :]
            sub_cost, sub_par = self._match_rec(remaining)
            cost = self._pair_cost(first, partner) + sub_cost
            if cost < best_cost:
                best_cost = cost
                best_parity = self._pair_parity(first, partner) ^ sub_par
        return best_cost, best_parity

    def _decode_blossom(self, defects: list[int]) -> bool:
        k = len(defects)
        graph = nx.Graph()
        big = 1e9
        for i in range(k):
            graph.add_edge(("d", i), ("b", i), weight=big - self.dist[defects[i], self.n_detectors])
            for j in range(i + 1, k):
                graph.add_edge(("d", i), ("d", j), weight=big - self._pair_cost(defects[i], defects[j]))
                graph.add_edge(("b", i), ("b", j), weight=big)
        matching = nx.max_weight_matching(graph, maxcardinality=True)
        parity = False
        for u, v in matching:
            if u[0] == "b" and v[0] == "b":
                continue
            if u[0] == "d" and v[0] == "d":
                parity ^= self._pair_parity(defects[u[1]], defects[v[1]])
            else:
                d = u if u[0] == "d" else v
                parity ^= bool(self.parity[defects[d[1]], self.n_detectors])
        return parity

    def decode_batch(self, det_bits: np.ndarray) -> np.ndarray:
        """Predicted observable flips for detection events [n_det, shots]."""
        shots = det_bits.shape[1]
        out = np.zeros(shots, dtype=bool)
        active = np.flatnonzero(det_bits.any(axis=0))
        for s in active:
            defects = np.flatnonzero(det_bits[:, s])
            out[s] = self.decode(defects)
        return out
