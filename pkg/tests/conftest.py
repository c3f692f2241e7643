import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from smlp.graph import MultiplexNetwork, Snapshot  # noqa: E402

A, B, C, D = 0, 1, 2, 3
G1_EDGES = {(A, B): 1.0, (A, C): 2.0, (B, C): 1.0, (C, D): 1.0}


@pytest.fixture
def g1():
    return Snapshot.from_undirected(4, G1_EDGES, layer="g1")


def snapshot(edges, n):
    return Snapshot.from_undirected(n, edges)


def network(layers, n=None, snapshots=1):
    """``{name: [edges_t0, edges_t1, ...]}`` with integer node labels."""
    rows = []
    for name, series in layers.items():
        for t, edges in enumerate(series):
            rows.extend((str(u), str(v), w, name, t) for (u, v), w in edges.items())
    nodes = [str(i) for i in range(n)] if n else ()
    return MultiplexNetwork.from_rows(rows, n_snapshots=snapshots, layer_order=list(layers),
                                      nodes=nodes)


ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record one acceptance line; the summary prints them all at the end."""
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
