"""Input checks shared by the estimator classes."""

import numpy as np

from .exceptions import DataError
from .graph import MultiplexNetwork
from .metrics import as_pairs


def check_network(net, min_layers=1):
    if not isinstance(net, MultiplexNetwork):
        raise DataError(f"expected a MultiplexNetwork, got {type(net).__name__}")
    if len(net.layers) < min_layers:
        raise DataError(f"need at least {min_layers} layers, network has {len(net.layers)}")
    return net


def check_layer(net, name):
    net.layer(name)
    return name


def check_train_end(net, train_end):
    if train_end is None:
        train_end = net.n_snapshots - 1
    if not isinstance(train_end, (int, np.integer)) or not 0 <= train_end < net.n_snapshots:
        raise DataError(f"train_end must be an integer in [0, {net.n_snapshots - 1}]")
    return int(train_end)


def check_pairs(pairs, net):
    """Canonical pair array from ids or labels."""
    if pairs is None:
        return None
    items = list(pairs)
    if items and isinstance(items[0][0], str):
        items = [(net.node_id(a), net.node_id(b)) for a, b in items]
    return as_pairs(items, net.n_nodes)

