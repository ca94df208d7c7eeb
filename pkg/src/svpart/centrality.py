"""Closeness centrality over the contraction graph's downstream orientation.

compute_reach runs one backward (reverse topological) traversal keeping, per
node, the exact shortest downstream distance to every reachable node: the
candidate distance to w through neighbor u is |l_v - l_u| + dist_u(w) and the
minimum across neighbors wins.  Distance maps are encoded as one int64 row
per node, so the merge is an elementwise minimum.  compute_reach_bruteforce
re-derives the same table with per-node Dijkstra runs and exists purely to
cross-check.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

import numpy as np

from .graph import OUTPUT_ID, ContractionGraph

_INF = np.int64(2**62)


class CycleDetected(Exception):
    pass


@dataclass
class ReachInfo:
    rn: dict[int, int]
    dist: int
    size: int


@dataclass
class CentralityTable:
    reach: dict[int, ReachInfo]
    cc: dict[int, float]
    n: int


def downstream_neighbors(graph: ContractionGraph, node_id: int) -> set[int]:
    """Nodes sharing an edge with node_id whose l is strictly larger."""
    node = graph.nodes[node_id]
    out = set()
    for dim in node.out_dims + node.in_dims:
        for other in graph.edges[dim]:
            if other != OUTPUT_ID and other != node_id:
                if graph.nodes[other].l > node.l:
                    out.add(other)
    return out


def _adjacency(graph: ContractionGraph) -> dict[int, list[tuple[int, int]]]:
    # node -> [(downstream neighbor, |delta l|)], deduped, deterministic order
    adj: dict[int, set[int]] = {nid: set() for nid in graph.nodes}
    for dim, (p, c) in graph.edges.items():
        if c == OUTPUT_ID:
            continue
        if graph.nodes[p].l >= graph.nodes[c].l:
            raise CycleDetected(f"edge {dim} does not increase l")
        adj[p].add(c)
    return {
        nid: [(u, abs(graph.nodes[u].l - graph.nodes[nid].l)) for u in sorted(nbrs)]
        for nid, nbrs in adj.items()
    }


def compute_reach(graph: ContractionGraph) -> dict[int, ReachInfo]:
    """Exact reachable-set distance maps via one reverse topological sweep."""
    ids = graph.topo_order()
    index = {nid: i for i, nid in enumerate(ids)}
    adj = _adjacency(graph)
    v = len(ids)
    rows = np.full((v, v), _INF, dtype=np.int64)
    for nid in reversed(ids):
        i = index[nid]
        for u, w in adj[nid]:
            cand = np.minimum(rows[index[u]] + w, _INF)
            cand[index[u]] = w
            np.minimum(rows[i], cand, out=rows[i])
    out = {}
    for nid in ids:
        row = rows[index[nid]]
        hit = np.nonzero(row < _INF)[0]
        rn = {ids[j]: int(row[j]) for j in hit}
        out[nid] = ReachInfo(rn=rn, dist=int(row[hit].sum()), size=len(hit))
    return out


def compute_reach_bruteforce(graph: ContractionGraph) -> dict[int, ReachInfo]:
    """Per-node Dijkstra over downstream edges; validation oracle."""
    if len(graph.nodes) > 10_000:
        raise ValueError("bruteforce oracle capped at 10000 nodes")
    adj = _adjacency(graph)
    out = {}
    for nid in graph.nodes:
        best: dict[int, int] = {}
        heap = [(w, u) for u, w in adj[nid]]
        heapq.heapify(heap)
        while heap:
            dist_u, u = heapq.heappop(heap)
            if u in best:
                continue
            best[u] = dist_u
            for w2, weight in adj[u]:
                if w2 not in best:
                    heapq.heappush(heap, (dist_u + weight, w2))
        out[nid] = ReachInfo(rn=best, dist=sum(best.values()), size=len(best))
    return out


def closeness(graph: ContractionGraph) -> CentralityTable:
    """cc(v) = (|RN|/dist) * (|RN|/N), zero for nodes reaching nothing."""
    reach = compute_reach(graph)
    n = len(graph.nodes)
    cc = {}
    for nid, info in reach.items():
        if info.size == 0:
            cc[nid] = 0.0
        else:
            cc[nid] = (info.size / info.dist) * (info.size / n)
    return CentralityTable(reach=reach, cc=cc, n=n)


def to_json(table: CentralityTable) -> str:
    doc = {
        "n": table.n,
        "nodes": {
            str(nid): {
                "cc": table.cc[nid],
                "dist": info.dist,
                "size": info.size,
                "rn": {str(k): v for k, v in sorted(info.rn.items())},
            }
            for nid, info in sorted(table.reach.items())
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)
