#!/usr/bin/env python3
"""Generate the bundled Matrix Market test matrices in data/.

The experiments are defined on SuiteSparse matrices (steam1, bcsstm07, nos7,
saylr3, 1138_bus). These generators build deterministic stand-ins with the
same size and the structural features the experiments depend on. Use
scripts/fetch_suitesparse.sh to obtain the originals when network access is
available; the CLI accepts either.

    python3 scripts/make_fixtures.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def write_mtx(path, A, symmetric=False, comment=""):
    A = sp.coo_matrix(A)
    if symmetric:
        mask = A.row >= A.col
        rows, cols, vals = A.row[mask], A.col[mask], A.data[mask]
    else:
        rows, cols, vals = A.row, A.col, A.data
    order = np.lexsort((rows, cols))
    rows, cols, vals = rows[order], cols[order], vals[order]
    with open(path, "w") as f:
        kind = "symmetric" if symmetric else "general"
        f.write(f"%%MatrixMarket matrix coordinate real {kind}\n")
        for line in comment.strip().splitlines():
            f.write(f"% {line}\n")
        f.write(f"{A.shape[0]} {A.shape[1]} {len(vals)}\n")
        for i, j, v in zip(rows, cols, vals):
            f.write(f"{i + 1} {j + 1} {float(v)!r}\n")


def steam1_like(rng):
    """240 x 240: 16 x 5 grid of cells with 3 coupled unknowns each.

    Unsymmetric 3x3 cell blocks, weaker nearest-neighbour coupling, and
    per-unknown column scalings spanning several decades.
    """
    nx, ny, m = 16, 5, 3
    ncell = nx * ny
    n = ncell * m
    A = np.zeros((n, n))

    def cell(ix, iy):
        return ix * ny + iy

    for ix in range(nx):
        for iy in range(ny):
            c = cell(ix, iy)
            D = rng.uniform(-0.4, 0.4, (m, m))
            D[np.diag_indices(m)] = rng.uniform(2.0, 3.0, m)
            A[c * m:(c + 1) * m, c * m:(c + 1) * m] = D
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                jx, jy = ix + dx, iy + dy
                if not (0 <= jx < nx and 0 <= jy < ny):
                    continue
                d = cell(jx, jy)
                for a in range(m):
                    A[c * m + a, d * m + a] = -rng.uniform(0.2, 0.45)
                a, b = rng.choice(m, 2, replace=False)
                A[c * m + a, d * m + b] = rng.uniform(-0.1, 0.1)

    col_scale = np.tile([1.0, 1.0e3, 5.0e-4], ncell)
    row_scale = np.tile([1.0, 2.0, 0.5], ncell)
    A = (row_scale[:, None] * A) * col_scale[None, :]
    return sp.csc_matrix(A)


def bcsstm07_like(rng):
    """420 x 420 SPD banded matrix with a prescribed spectrum.

    The normalized eigenvalues decay slowly to about 1e-2 at k = 148, drop
    steeply to 1e-6 by k = 160 and then level off near 1e-6. The matrix is
    built as Q diag(lambda) Q^T with Q a product of alternating layers of
    adjacent Givens rotations, which keeps it banded and its spectrum exact up
    to roundoff.
    """
    n = 420
    k1 = 148
    k2 = 160
    lam = np.empty(n)
    lam[:k1] = np.logspace(0, np.log10(0.0105), k1)
    lam[k1:k2] = np.logspace(np.log10(0.0094), -6, k2 - k1)
    lam[k2:] = np.logspace(np.log10(0.95e-6), np.log10(3e-7), n - k2)
    lam *= 100.0

    A = np.diag(lam[rng.permutation(n)])
    layers = 8
    for layer in range(layers):
        for i in range(layer % 2, n - 1, 2):
            t = rng.uniform(0.2, 1.2)
            c, s = np.cos(t), np.sin(t)
            G = np.array([[c, -s], [s, c]])
            A[[i, i + 1], :] = G @ A[[i, i + 1], :]
            A[:, [i, i + 1]] = A[:, [i, i + 1]] @ G.T
    A = 0.5 * (A + A.T)
    A[np.abs(A) < 1e-14 * np.abs(A).max()] = 0.0
    return sp.csc_matrix(A)


def nos7_like(rng):
    """729 x 729 SPD: 7-point finite differences on a 9^3 grid with
    layered diffusion coefficients spanning several decades."""
    g = 9
    n = g ** 3
    layer_coef = 10.0 ** rng.uniform(-3, 3, g)

    def idx(i, j, k):
        return (i * g + j) * g + k

    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    for i in range(g):
        for j in range(g):
            for k in range(g):
                p = idx(i, j, k)
                for di, dj, dk in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                    a, b, c = i + di, j + dj, k + dk
                    if a >= g or b >= g or c >= g:
                        continue
                    q = idx(a, b, c)
                    w = np.sqrt(layer_coef[k] * layer_coef[c])
                    rows += [p, q]
                    cols += [q, p]
                    vals += [-w, -w]
                    diag[p] += w
                    diag[q] += w
    diag += 1e-2 * layer_coef[np.arange(n) % g]
    rows += list(range(n))
    cols += list(range(n))
    vals += list(diag)
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


def saylr3_like(rng):
    """1000 x 1000 unsymmetric: convection-diffusion on a 10^3 grid."""
    g = 10
    n = g ** 3
    h = 1.0 / (g + 1)
    vel = np.array([30.0, -12.0, 6.0])

    def idx(i, j, k):
        return (i * g + j) * g + k

    rows, cols, vals = [], [], []
    for i in range(g):
        for j in range(g):
            for k in range(g):
                p = idx(i, j, k)
                kap = 10.0 ** rng.uniform(-0.5, 0.5)
                rows.append(p)
                cols.append(p)
                vals.append(6.0 * kap / h ** 2)
                for axis, (di, dj, dk) in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))):
                    for sgn in (1, -1):
                        a, b, c = i + sgn * di, j + sgn * dj, k + sgn * dk
                        if not (0 <= a < g and 0 <= b < g and 0 <= c < g):
                            continue
                        rows.append(p)
                        cols.append(idx(a, b, c))
                        vals.append(-kap / h ** 2 + sgn * vel[axis] / (2 * h))
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


def bus1138_like(rng):
    """1138 x 1138 SPD admittance-like matrix of a sparse power network:
    a random spatial tree plus a few extra local lines, with shunts."""
    n = 1138
    pos = rng.uniform(0, 1, (n, 2))
    order = np.argsort(pos[:, 0] + 0.3 * pos[:, 1])
    pos = pos[order]
    edges = set()
    for v in range(1, n):
        lo = max(0, v - 12)
        d = np.linalg.norm(pos[lo:v] - pos[v], axis=1)
        u = lo + int(np.argmin(d))
        edges.add((u, v))
    extra = 0
    while extra < 320:
        v = int(rng.integers(1, n))
        u = int(rng.integers(max(0, v - 30), v))
        if (u, v) not in edges:
            edges.add((u, v))
            extra += 1
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    for u, v in sorted(edges):
        y = 10.0 ** rng.uniform(-1, 2.5)
        rows += [u, v]
        cols += [v, u]
        vals += [-y, -y]
        diag[u] += y
        diag[v] += y
    diag += 10.0 ** rng.uniform(-3, 0, n)
    rows += list(range(n))
    cols += list(range(n))
    vals += list(diag)
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


FIXTURES = [
    ("steam1", steam1_like, False),
    ("bcsstm07", bcsstm07_like, True),
    ("nos7", nos7_like, True),
    ("saylr3", saylr3_like, False),
    ("1138_bus", bus1138_like, True),
]


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out.mkdir(parents=True, exist_ok=True)
    for seed, (name, gen, sym) in enumerate(FIXTURES):
        rng = np.random.default_rng(20240601 + seed)
        A = gen(rng)
        A.eliminate_zeros()
        if sym:
            A = sp.csc_matrix(0.5 * (A + A.T))
        note = f"synthetic stand-in for {name}, generated by scripts/make_fixtures.py"
        write_mtx(out / f"{name}.mtx", A, symmetric=sym, comment=note)
        print(f"{name}: n={A.shape[0]} nnz={A.nnz}")


if __name__ == "__main__":
    main()
