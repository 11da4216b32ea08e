"""Independent numpy/scipy oracle for the KCBS constants frozen in
tests/unit/oracle_values.hpp. Shares no code with the C++ library.

    python3 tests/oracles/kcbs_oracle.py
"""
import itertools
import json

import numpy as np
from scipy.optimize import linprog

# Independent coordinates: P(++) and P(+-) of each context A_i A_{i+1}.
T = np.zeros((10, 20))
M = np.zeros((20, 10))
V = np.zeros(20)
for i in range(5):
    j = (i + 1) % 5
    T[2 * i, 4 * i] = T[2 * i + 1, 4 * i + 1] = 1
    M[4 * i, 2 * i] = M[4 * i + 1, 2 * i + 1] = 1
    # P(-+) = P(A_{i+1}=+) - P(++), where P(A_{i+1}=+) is read off context i+1.
    M[4 * i + 2, 2 * i] -= 1
    M[4 * i + 2, 2 * j] += 1
    M[4 * i + 2, 2 * j + 1] += 1
    M[4 * i + 3, 2 * i + 1] -= 1
    M[4 * i + 3, 2 * j] -= 1
    M[4 * i + 3, 2 * j + 1] -= 1
    V[4 * i + 3] = 1


def deterministic(assignment):
    P = np.zeros(20)
    for i in range(5):
        x, y = assignment[i], assignment[(i + 1) % 5]
        P[4 * i + [(1, 1), (1, -1), (-1, 1), (-1, -1)].index((x, y))] = 1
    return P


E = np.array([deterministic(a) for a in itertools.product([1, -1], repeat=5)]).T  # 20 x 32

phis = np.array([2, 6, 0, 4, 8]) * np.pi / 5
ct = 5 ** -0.25
st = np.sqrt(1 - ct * ct)
vecs = [np.array([ct, st * np.cos(p), st * np.sin(p)]) for p in phis]


def q_trace(lam, a):
    psi = np.array([a, np.sqrt(1 - a * a), 0.0])
    rho = (1 - lam) * np.eye(3) / 3 + lam * np.outer(psi, psi)
    P = np.zeros(20)
    for i in range(5):
        pi = np.outer(vecs[i], vecs[i])
        pj = np.outer(vecs[(i + 1) % 5], vecs[(i + 1) % 5])
        for k, proj in enumerate([np.zeros((3, 3)), pi, pj, np.eye(3) - pi - pj]):
            P[4 * i + k] = np.trace(proj @ rho)
    return P


def cf_lp(P):
    r = linprog(-np.ones(32), A_ub=E, b_ub=np.maximum(P, 0), bounds=[(0, None)] * 32, method="highs")
    return 1 + r.fun


f1 = np.array([0, 1, 0, 1, 0, 1, 0, 1, 0, 1])


def main():
    out = {}
    P11 = q_trace(1, 1)
    out["q11_even"] = (T @ P11)[1]
    out["kcbs_11"] = f1 @ (T @ P11)
    out["cf_11"] = cf_lp(P11)
    out["lambda_star"] = 1 / (3 * np.sqrt(5) - 5)
    out["q_lambda1_a0_even"] = list((T @ q_trace(1, 0))[1::2])
    grid = np.linspace(0, 1, 20)
    cells = []
    for lam in grid:
        for a in grid:
            P = q_trace(lam, a)
            s = f1 @ (T @ P)
            cells.append((lam, a, s, cf_lp(P)))
    out["contextual_cells"] = sum(1 for c in cells if c[2] > 2)
    out["max_cf_gap_vs_2(S-2)"] = max(abs(c[3] - max(0, 2 * (c[2] - 2))) for c in cells)
    out["max_cf_gap_vs_(S-2)/3"] = max(abs(c[3] - max(0, (c[2] - 2) / 3)) for c in cells)
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
