"""How much of a matrix's spectral norm survives in a random corner.

Take a fixed zero-diagonal matrix M, relabel rows and columns with one
uniform permutation, and keep only the top-right quarter T. The norm of T
fluctuates with the permutation, but a constant fraction of ||M|| shows up
with constant probability. This script draws the empirical curve
c -> P{||T|| >= c ||M||} for a few matrices and prints the strongest
constant the data supports.

Run:  python demos/corner_of_a_regular_matrix.py
"""

import numpy as np

from exspec.core import SquareMatrix
from exspec.rng import stream
from exspec.tails import corner_capture_fraction

rng = stream(2024)

matrices = {}

# A single unit entry: the corner either contains it (norm 1) or not
# (norm 0), and the capture probability is exactly 16/56 for n = 8.
E = np.zeros((8, 8))
E[0, 1] = 1.0
matrices["single entry, n=8"] = SquareMatrix(E, zero_diagonal=True)

# Dense Gaussian noise.
G = rng.normal(size=(32, 32))
np.fill_diagonal(G, 0.0)
matrices["gaussian, n=32"] = SquareMatrix(G, zero_diagonal=True)

# Complete digraph: fully flat, the corner always keeps about half the mass.
J = np.ones((16, 16)) - np.eye(16)
matrices["complete digraph, n=16"] = SquareMatrix(J, zero_diagonal=True)

for name, M in matrices.items():
    res = corner_capture_fraction(M, trials=20000, seed=7)
    print(f"{name}: ||M|| = {res['m_norm']:.3f}, best c = {res['best_c']:.2f}")
    for c, p in zip(res["c_grid"][::20], res["p_hat"][::20]):
        print(f"    P{{||T|| >= {c:.2f} ||M||}} = {p:.3f}")
