import itertools

import numpy as np
import pytest

from adaptive_ldpc.formats import hamming74


def brute_force_cycles(H, max_len=None):
    """Shortest cycle length and count by depth-bounded DFS over simple paths.

    Returns ``(None, 0)`` for a forest.  Independent of the BFS code under
    test: cycles are enumerated explicitly, each anchored at its smallest
    vertex and counted once per direction.
    """
    H = np.asarray(H)
    m, n = H.shape
    adj = {v: set() for v in range(n + m)}
    for c, v in zip(*np.nonzero(H)):
        adj[v].add(n + c)
        adj[n + c].add(v)
    n_edges = int(H.sum())
    # forest test by union-find
    parent = list(range(n + m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cyclic = False
    for c, v in zip(*np.nonzero(H)):
        a, b = find(v), find(n + c)
        if a == b:
            cyclic = True
        parent[a] = b
    if not cyclic:
        return None, 0
    limit = max_len or (n + m)
    for L in range(4, limit + 1, 2):
        count = 0
        for s in range(n + m):
            stack = [(s, (s,))]
            while stack:
                u, path = stack.pop()
                for w in adj[u]:
                    if w == s and len(path) == L:
                        count += 1
                    elif w > s and w not in path and len(path) < L:
                        stack.append((w, path + (w,)))
        if count:
            return L, count // 2
    return None, 0


def random_bipartite(rng, max_nodes=40, density=None):
    m = int(rng.integers(2, min(15, max_nodes - 1)))
    n = int(rng.integers(2, max_nodes - m + 1))
    p = density if density is not None else rng.uniform(0.08, 0.3)
    return (rng.random((m, n)) < p).astype(np.uint8)


@pytest.fixture(scope="session")
def hamming_H():
    return hamming74()


@pytest.fixture(scope="session")
def hamming_codewords(hamming_H):
    from adaptive_ldpc.codec import build_encoder, encode

    tables = build_encoder(hamming_H)
    msgs = np.array(list(itertools.product([0, 1], repeat=4)), dtype=np.uint8)
    return tables, encode(tables, msgs).full
