from __future__ import annotations

import pytest

from stabledistrict import Instance, equal_quotas

from helpers import path_graph


@pytest.fixture
def p6():
    """Unit path on 6 nodes with centers at the ends, quotas 3/3."""
    g = path_graph(6)
    return Instance(g, [0, 5], equal_quotas(6, 2))


@pytest.fixture
def p5():
    """Unit path on 5 nodes, centers at the ends, quotas 3/2: node 2 is tied."""
    g = path_graph(5)
    return Instance(g, [0, 4], [3, 2])


@pytest.fixture
def p4():
    """Unit path on 4 nodes with adjacent centers at nodes 0 and 1."""
    g = path_graph(4)
    return Instance(g, [0, 1], [2, 2])
