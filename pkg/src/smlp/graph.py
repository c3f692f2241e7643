"""In-memory temporal multiplex network.

A :class:`MultiplexNetwork` holds one :class:`NodeRegistry` shared by every
layer, and each :class:`Layer` is an ordered series of :class:`Snapshot`
objects covering the same snapshot range. Edges are kept as read (directed),
while every neighborhood and weight query goes through the undirected view,
where the weight of a node pair is the sum over both directions.
"""

import csv
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .exceptions import DataError

logger = logging.getLogger(__name__)

HEADER = ("source", "target", "weight", "layer", "snapshot")


class NodeRegistry:
    """Dense integer ids for external string labels."""

    def __init__(self, labels=()):
        self._labels = []
        self._index = {}
        for label in labels:
            self.add(label)

    def add(self, label):
        label = str(label)
        node = self._index.get(label)
        if node is None:
            node = len(self._labels)
            self._labels.append(label)
            self._index[label] = node
        return node

    def id(self, label):
        try:
            return self._index[str(label)]
        except KeyError:
            raise DataError(f"unknown node label {label!r}") from None

    def label(self, node):
        return self._labels[node]

    @property
    def labels(self):
        return tuple(self._labels)

    def __len__(self):
        return len(self._labels)

    def __contains__(self, label):
        return str(label) in self._index

    def __iter__(self):
        return iter(self._labels)


class Snapshot:
    """One time slice of one layer.

    Parameters
    ----------
    n_nodes : int
        Size of the shared node registry.
    edges : mapping (int, int) -> float
        Directed edges with positive weights. Self-loops are rejected.
    layer, index :
        Provenance only; views built by combining layers carry a synthetic
        layer name.
    """

    def __init__(self, n_nodes, edges=None, layer="", index=0):
        self.n_nodes = int(n_nodes)
        self.layer = layer
        self.index = index
        self.edges = {}
        for (u, v), w in (edges or {}).items():
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise DataError(f"self-loop on node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise DataError(f"edge ({u}, {v}) references an unregistered node")
            if not math.isfinite(w) or w < 0:
                raise DataError(f"invalid weight {w} on edge ({u}, {v})")
            if w == 0:
                continue
            self.edges[(u, v)] = self.edges.get((u, v), 0.0) + w

    @classmethod
    def from_undirected(cls, n_nodes, pairs, layer="", index=0):
        """Build from an undirected ``{(u, v): w}`` mapping (orientation ignored)."""
        edges = {}
        for (u, v), w in pairs.items():
            key = (u, v) if u < v else (v, u)
            edges[key] = edges.get(key, 0.0) + w
        return cls(n_nodes, edges, layer=layer, index=index)

    def __repr__(self):
        return (f"Snapshot(layer={self.layer!r}, index={self.index}, "
                f"n_nodes={self.n_nodes}, n_edges={self.n_edges})")

    @cached_property
    def undirected(self):
        out = {}
        for (u, v), w in self.edges.items():
            key = (u, v) if u < v else (v, u)
            out[key] = out.get(key, 0.0) + w
        return dict(sorted(out.items()))

    @property
    def n_edges(self):
        return len(self.undirected)

    @cached_property
    def adjacency(self):
        """Symmetric CSR matrix of undirected weights."""
        n = self.n_nodes
        if not self.undirected:
            return sp.csr_matrix((n, n), dtype=float)
        pairs = np.array(list(self.undirected), dtype=np.int64)
        w = np.fromiter(self.undirected.values(), dtype=float, count=len(pairs))
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        mat = sp.csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n))
        mat.sort_indices()
        return mat

    @cached_property
    def binary(self):
        mat = self.adjacency.copy()
        mat.data[:] = 1.0
        return mat

    @cached_property
    def strength(self):
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    @cached_property
    def degree(self):
        return np.diff(self.adjacency.indptr).astype(np.int64)

    @cached_property
    def triangles(self):
        """Number of triangles through each node (unweighted topology)."""
        a = self.binary
        return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0

    def edge_pairs(self):
        """Undirected edges as a sorted ``(m, 2)`` array with ``u < v``."""
        if not self.undirected:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(list(self.undirected), dtype=np.int64)

    def _check(self, x):
        if not 0 <= x < self.n_nodes:
            raise DataError(f"node {x} is not registered")

    def neighbors(self, x):
        self._check(x)
        a = self.adjacency
        return frozenset(a.indices[a.indptr[x]:a.indptr[x + 1]].tolist())

    def weight(self, x, y):
        key = (x, y) if x < y else (y, x)
        return self.undirected.get(key, 0.0)

    def has_edge(self, x, y):
        key = (x, y) if x < y else (y, x)
        return key in self.undirected


class Layer:
    def __init__(self, name, snapshots):
        self.name = name
        self.snapshots = tuple(snapshots)
        for expected, snap in enumerate(self.snapshots):
            if snap.index != expected:
                raise DataError(f"layer {name!r}: snapshot indices must be 0..T-1")
        self._cumulative = {}

    def __len__(self):
        return len(self.snapshots)

    def __repr__(self):
        return f"Layer({self.name!r}, snapshots={len(self)})"

    def cumulative_view(self, upto):
        """Edge union of snapshots ``0..=upto``; repeated edges sum their weights."""
        if not 0 <= upto < len(self.snapshots):
            raise DataError(
                f"layer {self.name!r}: snapshot index {upto} out of range "
                f"[0, {len(self.snapshots) - 1}]")
        if upto not in self._cumulative:
            if upto == 0:
                view = self.snapshots[0]
            else:
                prev = self.cumulative_view(upto - 1)
                edges = dict(prev.edges)
                for key, w in self.snapshots[upto].edges.items():
                    edges[key] = edges.get(key, 0.0) + w
                view = Snapshot(prev.n_nodes, edges, layer=self.name, index=upto)
            self._cumulative[upto] = view
        return self._cumulative[upto]


class MultiplexNetwork:
    """Node registry plus named layers sharing one snapshot range."""

    def __init__(self, registry, layers):
        if not layers:
            raise DataError("a multiplex network needs at least one layer")
        self.registry = registry
        self.layers = {layer.name: layer for layer in layers}
        counts = {len(layer) for layer in layers}
        if len(counts) != 1:
            raise DataError("all layers must share the same snapshot range")
        for layer in layers:
            for snap in layer.snapshots:
                if snap.n_nodes != len(registry):
                    raise DataError("snapshot size does not match the node registry")

    @classmethod
    def from_rows(cls, rows, n_snapshots=None, layer_order=None, nodes=()):
        """Build from ``(source, target, weight, layer, snapshot)`` tuples.

        Labels are registered on first sight; duplicate rows within one
        snapshot sum their weights.
        """
        registry = NodeRegistry(nodes)
        buckets = {}
        order = list(layer_order or [])
        for src, dst, w, layer, t in rows:
            u, v = registry.add(src), registry.add(dst)
            if layer not in buckets:
                buckets[layer] = {}
                if layer not in order:
                    order.append(layer)
            snap = buckets[layer].setdefault(int(t), {})
            snap[(u, v)] = snap.get((u, v), 0.0) + float(w)
        last = max((t for b in buckets.values() for t in b), default=-1)
        total = max(last + 1, n_snapshots or 0)
        if total == 0:
            raise DataError("no edges")
        n = len(registry)
        layers = []
        for name in order:
            per = buckets.get(name, {})
            layers.append(Layer(name, [Snapshot(n, per.get(t), layer=name, index=t)
                                       for t in range(total)]))
        return cls(registry, layers)

    @property
    def n_nodes(self):
        return len(self.registry)

    @property
    def n_snapshots(self):
        return len(next(iter(self.layers.values())))

    @property
    def layer_names(self):
        return tuple(self.layers)

    def layer(self, name):
        try:
            return self.layers[name]
        except KeyError:
            raise DataError(f"unknown layer {name!r}; have {list(self.layers)}") from None

    def view(self, layer, t, cumulative=False):
        """Snapshot ``t`` of ``layer``, or the cumulative view of ``0..=t``."""
        lay = self.layer(layer)
        if cumulative:
            return lay.cumulative_view(t)
        if not 0 <= t < len(lay):
            raise DataError(f"snapshot index {t} out of range for layer {layer!r}")
        return lay.snapshots[t]

    def node_id(self, label):
        return self.registry.id(label)

    def __repr__(self):
        return (f"MultiplexNetwork(nodes={self.n_nodes}, layers={list(self.layers)}, "
                f"snapshots={self.n_snapshots})")


def combine(a, b, how):
    """Undirected union or intersection of two views over the same registry.

    Weights come from ``a`` wherever ``a`` has the edge, otherwise from ``b``;
    the intersection therefore carries the first view's weights.
    """
    if a.n_nodes != b.n_nodes:
        raise DataError("views do not share a node registry")
    ua, ub = a.undirected, b.undirected
    if how == "intersection":
        pairs = {k: w for k, w in ua.items() if k in ub}
    elif how == "union":
        pairs = dict(ub)
        pairs.update(ua)
    else:
        raise ValueError(f"unknown combination {how!r}")
    return Snapshot(a.n_nodes, pairs, layer=f"{a.layer}{'&' if how == 'intersection' else '|'}{b.layer}",
                    index=a.index)


def merge_views(views):
    """Undirected union of several views, summing weights."""
    views = list(views)
    pairs = {}
    for view in views:
        for k, w in view.undirected.items():
            pairs[k] = pairs.get(k, 0.0) + w
    return Snapshot(views[0].n_nodes, pairs, layer="+".join(v.layer for v in views),
                    index=views[0].index)


def neighbors(g, x):
    """Undirected neighbor set of ``x`` in a snapshot or cumulative view."""
    return g.neighbors(x)


def common_neighbors(g, x, y):
    if x == y:
        raise DataError("common neighbors need two distinct nodes")
    return g.neighbors(x) & g.neighbors(y)


def _layer_pair(net, layers, t, cumulative):
    alpha, beta = layers
    return net.view(alpha, t, cumulative), net.view(beta, t, cumulative)


def global_neighbors(net, layers, x, t, cumulative=False):
    """Neighbors of ``x`` over the union of the two layers' edge sets."""
    a, b = _layer_pair(net, layers, t, cumulative)
    return a.neighbors(x) | b.neighbors(x)


def core_neighbors(net, layers, x, t, cumulative=False):
    """Neighbors of ``x`` over the intersection of the two layers' edge sets."""
    a, b = _layer_pair(net, layers, t, cumulative)
    return a.neighbors(x) & b.neighbors(x)


def cumulative_view(layer, upto):
    return layer.cumulative_view(upto)


@dataclass(frozen=True)
class EdgeListFormat:
    delimiter: str = ","
    comment: str = "#"
    header: bool = True


def _parse_row(fields, lineno):
    if len(fields) != 5:
        raise DataError(f"expected 5 fields, got {len(fields)}", line=lineno)
    src, dst, w, layer, t = (f.strip() for f in fields)
    if not src or not dst or not layer:
        raise DataError("empty source, target or layer", line=lineno)
    try:
        weight = float(w)
    except ValueError:
        raise DataError(f"weight {w!r} is not a number", line=lineno) from None
    if not math.isfinite(weight):
        raise DataError(f"weight {w!r} is not finite", line=lineno)
    if weight < 0:
        raise DataError(f"negative weight {weight}", line=lineno)
    try:
        snapshot = int(t)
    except ValueError:
        raise DataError(f"snapshot {t!r} is not an integer", line=lineno) from None
    if snapshot < 0:
        raise DataError(f"negative snapshot index {snapshot}", line=lineno)
    return src, dst, weight, layer, snapshot


def load_edge_list(path, fmt=EdgeListFormat()):
    """Read the ``source,target,weight,layer,snapshot`` CSV into a network.

    The header row is optional. Self-loops and zero-weight rows are skipped
    with a warning; any other malformed row raises :class:`DataError` with
    its line number.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=fmt.delimiter)
        seen_data = False
        for fields in reader:
            lineno = reader.line_num
            if not fields or not "".join(fields).strip():
                continue
            if fields[0].lstrip().startswith(fmt.comment):
                continue
            if not seen_data and tuple(f.strip().lower() for f in fields) == HEADER:
                seen_data = True
                continue
            seen_data = True
            src, dst, weight, layer, t = _parse_row(fields, lineno)
            if src == dst:
                logger.warning("line %d: self-loop on %r rejected", lineno, src)
                continue
            if weight == 0:
                logger.warning("line %d: zero-weight edge ignored", lineno)
                continue
            rows.append((src, dst, weight, layer, t))
    if not rows:
        raise DataError(f"{path}: no edges")
    return MultiplexNetwork.from_rows(rows)


def iter_rows(net):
    """Rows of the edge-list format, ordered by layer, snapshot and node id."""
    labels = net.registry.labels
    for name, layer in net.layers.items():
        for snap in layer.snapshots:
            for (u, v) in sorted(snap.edges):
                yield labels[u], labels[v], snap.edges[(u, v)], name, snap.index


def write_edge_list(net, path, fmt=EdgeListFormat()):
    from ._io import atomic_writer

    with atomic_writer(path) as fh:
        writer = csv.writer(fh, delimiter=fmt.delimiter, lineterminator="\n")
        if fmt.header:
            writer.writerow(HEADER)
        for src, dst, w, layer, t in iter_rows(net):
            writer.writerow((src, dst, repr(float(w)), layer, t))
