"""Dense two-phase revised simplex for small support-function LPs.

Solves  max u.x  subject to  D x <= f  where the rows of D are sampled
directions and f are gauge values.  The dual,  min f.lam  s.t.
D^T lam = u, lam >= 0,  has only n equality rows (n <= 8 in practice), so
a dense revised simplex with Bland's anti-cycling rule is adequate and
dependency-free.  Dual infeasibility certifies that u is not in the
positive span of the directions, i.e. the primal is unbounded.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, WulffUnboundedError


class _DualUnbounded(Exception):
    pass


def _simplex_core(A, b, c, basis, allowed, tol, max_iter):
    """Minimize c.lam s.t. A lam = b, lam >= 0 starting from a feasible basis.

    ``allowed`` marks columns permitted to enter the basis.  Bland's rule
    (lowest eligible index) is used throughout, which precludes cycling.
    Returns (basis, lam_B).
    """
    n = A.shape[0]
    basis = list(basis)
    for _ in range(max_iter):
        B = A[:, basis]
        try:
            lam_B = np.linalg.solve(B, b)
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular basis in simplex") from exc
        lam_B = np.where(lam_B < 0.0, 0.0, lam_B)
        reduced = c - A.T @ y
        candidates = np.flatnonzero(allowed & (reduced < -tol))
        if candidates.size == 0:
            return basis, lam_B
        enter = int(candidates[0])
        w = np.linalg.solve(B, A[:, enter])
        positive = np.flatnonzero(w > tol)
        if positive.size == 0:
            raise _DualUnbounded()
        ratios = lam_B[positive] / w[positive]
        theta = ratios.min()
        ties = positive[ratios <= theta + tol * (1.0 + abs(theta))]
        leave_pos = min(ties, key=lambda i: basis[i])
        basis[leave_pos] = enter
    raise NumericalError("simplex iteration limit exceeded")


def support_lp(directions: np.ndarray, values: np.ndarray, u: np.ndarray,
               tol: float = 1e-9):
    """Maximize u.x over {x : directions @ x <= values}.

    Parameters
    ----------
    directions : (m, n) array
        Constraint normals (grid directions); must positively span R^n for
        the problem to be bounded.
    values : (m,) array
        Right-hand sides (gauge values), all >= 0 so that x = 0 is feasible.
    u : (n,) array
        Objective direction.

    Returns
    -------
    value : float
        The optimal objective value.
    x : (n,) array
        An optimal point; feasible within ``tol``.

    Raises
    ------
    WulffUnboundedError
        If the LP is unbounded (directions do not positively span R^n).
    """
    D = np.asarray(directions, dtype=float)
    f = np.asarray(values, dtype=float)
    u = np.asarray(u, dtype=float)
    m, n = D.shape
    if f.shape != (m,):
        raise NumericalError("constraint value vector has wrong length")

    A = np.hstack([D.T, np.diag(np.where(u >= 0.0, 1.0, -1.0))])  # (n, m+n)
    b = u
    max_iter = 50 * (m + n) + 200

    # Phase 1: drive artificial variables to zero.
    c1 = np.concatenate([np.zeros(m), np.ones(n)])
    allowed = np.ones(m + n, dtype=bool)
    basis = list(range(m, m + n))
    try:
        basis, lam_B = _simplex_core(A, b, c1, basis, allowed, tol, max_iter)
    except _DualUnbounded as exc:
        raise NumericalError("phase-1 subproblem unbounded") from exc
    if float(c1[basis] @ lam_B) > 1e3 * tol * (1.0 + np.abs(u).sum()):
        raise WulffUnboundedError(
            "support LP unbounded: sampled directions do not positively span "
            "the objective direction; refine the grid"
        )
    # Pivot any residual artificial (at zero level) out of the basis.
    for pos in range(n):
        if basis[pos] >= m:
            B = A[:, basis]
            for j in range(m):
                if j in basis:
                    continue
                w = np.linalg.solve(B, A[:, j])
                if abs(w[pos]) > 1e3 * tol:
                    basis[pos] = j
                    break
            else:
                raise NumericalError("could not remove artificial variable from basis")

    # Phase 2: minimize the true cost over real columns only.
    c2 = np.concatenate([f, np.zeros(n)])
    allowed = np.concatenate([np.ones(m, dtype=bool), np.zeros(n, dtype=bool)])
    try:
        basis, lam_B = _simplex_core(A, b, c2, basis, allowed, tol, max_iter)
    except _DualUnbounded as exc:
        # Dual unbounded below means the primal is infeasible; cannot occur
        # for values >= 0 (x = 0 feasible), so treat as numerical failure.
        raise NumericalError("dual simplex became unbounded") from exc

    B = A[:, basis]
    x = np.linalg.solve(B.T, c2[basis])
    value = float(c2[basis] @ lam_B)
    direct = float(u @ x)
    if abs(direct - value) > 1e-6 * (1.0 + abs(value)):
        raise NumericalError("primal/dual objective mismatch in support LP")
    return value, x
