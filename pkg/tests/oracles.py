"""Independent reference computations for the tests.

Each oracle takes a different route from the code under test: explicit loops,
Jacobi rotations, cofactor inverses, an ODE solve. They are slow and only meant
for small inputs.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import airy


def jacobi_eigenvalues(s, tol=1e-15, sweeps=100):
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations (ascending)."""
    a = np.array(s, dtype=float)
    n = a.shape[0]
    for _ in range(sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * max(1.0, float(np.abs(np.diag(a)).max())):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                sn = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = sn, -sn
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def gram(a):
    """A^T A by explicit triple loop."""
    m, k = a.shape
    g = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            g[i, j] = sum(a[r, i] * a[r, j] for r in range(m))
    return g


def spectral_norm_oracle(a):
    a = np.asarray(a, dtype=float)
    small = a if a.shape[1] <= a.shape[0] else a.T
    return math.sqrt(max(jacobi_eigenvalues(gram(small))[-1], 0.0))


def cofactor_inverse(s):
    """Inverse by the adjugate formula (small matrices only)."""
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    det = np.linalg.det(s)
    adj = np.zeros_like(s)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(s, i, axis=0), j, axis=1)
            adj[j, i] = (-1) ** (i + j) * (np.linalg.det(minor) if n > 1 else 1.0)
    return adj / det


def normal_equation_residual(a, y):
    """Y - A (A^T A)^{-1} A^T Y with an explicit inverse."""
    return y - a @ (cofactor_inverse(gram(a)) @ (a.T @ y))


def coherence_oracle(phi):
    """(mu, (i, j)) by a double loop over column pairs; first maximal pair in row-major order."""
    n = phi.shape[1]
    best, pair = -1.0, (0, 1)
    for i in range(n):
        for j in range(i + 1, n):
            v = abs(float(np.dot(phi[:, i], phi[:, j])))
            if v > best:
                best, pair = v, (i, j)
    return best, pair


def erc_oracle(phi, support):
    """max over off-support atoms of ||(A^T A)^{-1} A^T a||_1 with an explicit inverse."""
    a = phi[:, list(support)]
    pinv = cofactor_inverse(gram(a)) @ a.T
    off = [k for k in range(phi.shape[1]) if k not in set(support)]
    return max(float(np.abs(pinv @ phi[:, k]).sum()) for k in off)


def selection_scores_oracle(phi, r):
    n = phi.shape[1]
    out = np.zeros(n)
    for i in range(n):
        out[i] = math.sqrt(sum(float(np.dot(phi[:, i], r[:, j])) ** 2 for j in range(r.shape[1])))
    return out


def somp_oracle(phi, y, steps):
    """Plain SOMP for ``steps`` iterations using normal equations; returns the selections."""
    sel = []
    r = y.copy()
    for _ in range(steps):
        scores = selection_scores_oracle(phi, r)
        scores[sel] = -1.0
        sel.append(int(np.argmax(scores)))
        r = normal_equation_residual(phi[:, sel], y)
    return sel


def tw1_cdf_painleve(s_values, x0=8.0):
    """F1(s) through the Hastings-McLeod solution of Painleve II.

    q'' = s q + 2 q^3 with q ~ Ai(s) as s -> +inf. Integrating from x0 down to s
    together with the running integrals of q, q^2 and x q^2 gives

        log F2(s) = -int_s^inf (x - s) q(x)^2 dx,   F1(s) = sqrt(F2(s)) exp(-1/2 int_s^inf q).

    The starting values use Ai and Ai' at x0 (the cubic term is below 1e-20 there)
    and the tails of the integrals beyond x0 are neglected (below 1e-12).
    """
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    ai, aip, _, _ = airy(x0)

    def rhs(x, u):
        q, qp = u[0], u[1]
        return [qp, x * q + 2 * q**3, -q, -q * q, -x * q * q]

    lo = float(s_values.min())
    sol = solve_ivp(rhs, (x0, lo), [ai, aip, 0.0, 0.0, 0.0], method="DOP853",
                    rtol=1e-13, atol=1e-16, dense_output=True)
    out = []
    for s in s_values:
        # with derivative -f, integrating downward from x0 accumulates int_s^x0 f
        _, _, int_q, int_q2, int_xq2 = sol.sol(s)
        log_f2 = -(int_xq2 - s * int_q2)
        out.append(math.exp(0.5 * log_f2 - 0.5 * int_q))
    return np.array(out)
