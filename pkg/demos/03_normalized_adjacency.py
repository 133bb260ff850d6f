"""Self-loops, row-sum degree and symmetric normalization on a five-node graph.

Run: python demos/03_normalized_adjacency.py
"""

import numpy as np

from evmcfg.encode import degree_matrix, normalize

np.set_printoptions(precision=4, suppress=True)

adj = np.array([
    [0, 1, 1, 1, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0],
], dtype=float)

print("A + I:\n", adj + np.eye(5))
print("degree:\n", degree_matrix(adj))
print("D^-1/2:\n", np.diag(1 / np.sqrt(np.diag(degree_matrix(adj)))))
print("normalized:\n", normalize(adj))
