"""Shared oracles and generators for the test suite.

The determinant oracle expands det L(lambda, eta) as a polynomial by a
Leibniz permutation sum with per-entry coefficient convolution.  It shares
no code with the linearization path it cross-checks, which is the point.
"""

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from gyropencil.pencil import PencilSpec, RankOneCoupling


def perm_sign(perm):
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1 if inv % 2 else 1


def det_poly_coeffs(spec, eta):
    """Ascending coefficients of det L(lambda, eta), exact up to rounding.

    Entry (i, j) is the quadratic lambda^2 M_ij - lambda eta G_ij - A_ij;
    the determinant is the signed sum over permutations of entry products,
    each product formed by convolution.  Only usable for small n.
    """
    n = spec.n
    entry = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            entry[i, j] = np.array(
                [-spec.a[i, j], -eta * spec.g[i, j], spec.m[i, j]])
    total = np.zeros(2 * n + 1)
    for perm in itertools.permutations(range(n)):
        prod = np.array([1.0])
        for i in range(n):
            prod = np.convolve(prod, entry[i, perm[i]])
        total[:prod.size] += perm_sign(perm) * prod
    return total


def poly_roots(coeffs):
    """Finite roots of an ascending-coefficient polynomial.

    Trailing near-zero coefficients (singular M drops the degree) are
    trimmed relative to the largest coefficient before calling np.roots.
    """
    c = np.asarray(coeffs, dtype=float)
    top = np.max(np.abs(c))
    if top == 0.0:
        raise ValueError("zero polynomial has no isolated roots")
    deg = c.size - 1
    while deg > 0 and abs(c[deg]) <= 1e-12 * top:
        deg -= 1
    return np.roots(c[deg::-1])


def expand_records(result):
    """Each eigenvalue repeated algebraic-multiplicity times."""
    out = []
    for rec in result.records:
        out.extend([rec.lam] * rec.alg_mult)
    return out


def max_pair_distance(xs, ys):
    """Optimal-assignment matching distance between two equal lists."""
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    assert xs.size == ys.size, (xs.size, ys.size)
    if xs.size == 0:
        return 0.0
    cost = np.abs(xs[:, None] - ys[None, :])
    ri, ci = linear_sum_assignment(cost)
    return float(cost[ri, ci].max())


def rand_orth(rng, n):
    qmat, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return qmat


def rand_condition1_spec(rng, n_max=8):
    """Random spec with M > 0 and an axis rank-one G."""
    n = int(rng.integers(2, n_max + 1))
    r = rng.normal(size=(n, n))
    m = r @ r.T + 0.1 * np.eye(n)
    b = float(rng.uniform(0.1, 2.0))
    e_index = int(rng.integers(n))
    g = np.zeros((n, n))
    g[e_index, e_index] = b
    qmat = rand_orth(rng, n)
    a = qmat @ np.diag(rng.uniform(-5.0, 5.0, size=n)) @ qmat.T
    a = 0.5 * (a + a.T)
    return PencilSpec(m, g, a, rank_one=RankOneCoupling(b=b, e_index=e_index))


def kernel_engineered_spec(rng, n_max=8):
    """Spec with prescribed dim ker A and prescribed p = dim(ker A ∩ e⊥).

    Returns (spec, n_ker, p).  Kernel vectors are either all orthogonal to
    the coupling axis (p = n_ker) or one of them mixes the axis in
    (p = n_ker - 1).
    """
    n = int(rng.integers(3, n_max + 1))
    k = int(rng.integers(1, min(3, n - 2) + 1))
    e_index = int(rng.integers(n))
    e = np.zeros(n)
    e[e_index] = 1.0

    # orthonormal basis of the axis complement
    x = rng.normal(size=(n, n - 1))
    x[e_index, :] = 0.0
    qp, _ = np.linalg.qr(x)

    mix = bool(rng.integers(2))
    if mix:
        v1 = (e + qp[:, 0]) / np.sqrt(2.0)
        ker = np.column_stack([v1] + [qp[:, j] for j in range(1, k)])
        u1 = (e - qp[:, 0]) / np.sqrt(2.0)
        nonker = np.column_stack([u1] + [qp[:, j] for j in range(k, n - 1)])
        p = k - 1
    else:
        ker = qp[:, :k]
        nonker = np.column_stack([e] + [qp[:, j] for j in range(k, n - 1)])
        p = k

    # residual from the kernel must vanish exactly at working precision
    vals = rng.uniform(0.5, 5.0, size=nonker.shape[1])
    vals *= rng.choice([-1.0, 1.0], size=vals.size)
    a = nonker @ np.diag(vals) @ nonker.T
    a = 0.5 * (a + a.T)
    assert np.max(np.abs(a @ ker)) < 1e-12

    r = rng.normal(size=(n, n))
    m = r @ r.T + 0.5 * np.eye(n)
    b = float(rng.uniform(0.2, 2.0))
    g = np.zeros((n, n))
    g[e_index, e_index] = b
    spec = PencilSpec(m, g, a, rank_one=RankOneCoupling(b=b, e_index=e_index))
    return spec, k, p


def rand_definite_spec(rng, n_max=6):
    """Random spec with both M and G strictly positive definite."""
    n = int(rng.integers(2, n_max + 1))
    r = rng.normal(size=(n, n))
    m = r @ r.T + 0.5 * np.eye(n)
    s = rng.normal(size=(n, n))
    g = s @ s.T + 0.5 * np.eye(n)
    qmat = rand_orth(rng, n)
    a = qmat @ np.diag(rng.uniform(-5.0, 5.0, size=n)) @ qmat.T
    a = 0.5 * (a + a.T)
    return PencilSpec(m, g, a)
