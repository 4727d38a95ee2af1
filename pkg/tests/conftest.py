import json
from importlib import resources

import numpy as np
import pytest

import isogirp
from isogirp.cli import load_input
from isogirp.losses import (EpsInsensitiveLoss, HingeLoss, HuberLoss,
                            LogisticLoss, SquaredLoss)
from isogirp.order import PartialOrderDag


@pytest.fixture(scope="session", autouse=True)
def _compiled_kernels():
    # pay the kernel compilation once, before any timed test
    isogirp.warmup()


def data_path(name):
    return resources.files("isogirp").joinpath("data", name)


@pytest.fixture(scope="session")
def example32():
    """Bundled 32-node Huber instance: (ids, responses, dag)."""
    return load_input(str(data_path("example1.json")))


@pytest.fixture(scope="session")
def hinge3():
    """Bundled 3-chain hinge instance: (ids, responses, dag)."""
    return load_input(str(data_path("hinge3.json")))


def random_dag(rng, n, p=0.4):
    """Random DAG on n nodes; edges oriented low index -> high index."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return PartialOrderDag(n, edges)


def random_values(rng, loss, n):
    if isinstance(loss, (HingeLoss, LogisticLoss)):
        return rng.integers(0, 2, n).astype(np.float64) * 2.0 - 1.0
    return np.round(rng.normal(0.0, 2.0, n), 2)


LOSS_POOL = [SquaredLoss(), HuberLoss(0.9), EpsInsensitiveLoss(0.5),
             HingeLoss()]


def load_tree_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
