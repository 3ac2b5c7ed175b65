"""Elementary symmetric functions, cofactor tensors and intrinsic volumes.

For a symmetric N x N matrix A, S_r(A) is the r-th elementary symmetric
function of its eigenvalues (S_0 = 1, S_1 = trace, S_N = det), computed
by the Faddeev-LeVerrier recursion without eigendecomposition.  The first
cofactor is the derivative with respect to the independent matrix entries,

    S_r^{ij}(A) = d S_r / d a_ij,

which evaluates in closed form to the matrix polynomial

    T_r(A) = sum_{m=0}^{r-1} (-1)^m S_{r-1-m}(A) A^m,

so T_1 = I, T_2 = S_1 I - A, ..., T_N = adj(A).  The second cofactor
S_r^{ij,kl} is obtained by differencing the exact first cofactor (entries
perturbed in symmetric pairs, which keeps the argument symmetric and
reproduces the independent-entry derivative after halving off-diagonal
increments).

For a convex body with smooth support function h, the matrix
Q[h] = (h_ij + h delta_ij) in an orthonormal tangent frame gives the
area-measure densities S_{k-1}(Q[h]) and the intrinsic volumes

    V_k(K) = (1 / (k kappa_{n-k})) int_{S^{n-1}} h S_{k-1}(Q[h]) dx,

normalized so that V_k of the unit ball is binom(n,k) kappa_n/kappa_{n-k}
and V_k of a box with half-lengths a_i is 2^k e_k(a_1..a_n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import calculus
from .bodies import Body, require_smooth
from .errors import DomainError
from .sphere import SphericalGrid, TangentFrame, build_grid, tangent_frame

def _kappa_table(top: int) -> tuple:
    # recurrence kappa_j = kappa_{j-2} 2 pi / j from exact seeds; one ulp
    # tighter than the gamma-function formula for small j
    vals = [1.0, 2.0]
    for j in range(2, top + 1):
        vals.append(vals[j - 2] * 2.0 * math.pi / j)
    return tuple(vals)


#: Unit-ball volumes kappa_j, precomputed for j = 0..16.
KAPPA = _kappa_table(16)


def unit_ball_volume(j: int) -> float:
    """kappa_j, the volume of the unit ball in R^j (table for j <= 16)."""
    if j < 0:
        raise DomainError("dimension must be non-negative")
    if j < len(KAPPA):
        return KAPPA[j]
    return math.pi ** (j / 2.0) / math.gamma(j / 2.0 + 1.0)


def _check_square(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("expected a square matrix")
    return A


def _check_symmetric(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    A = _check_square(A)
    if A.size and np.max(np.abs(A - A.T)) > tol * (1.0 + np.max(np.abs(A))):
        raise DomainError("matrix must be symmetric")
    return A


def _elem_sym_all_batch(A: np.ndarray) -> np.ndarray:
    """S_0..S_N for a batch of matrices, shape (m, N, N) -> (m, N + 1).

    Faddeev-LeVerrier: B_1 = I; S_r = tr(A B_r) / r; B_{r+1} = S_r I - A B_r.
    The auxiliary matrices B_r coincide with the cofactor matrices T_r.
    """
    m, N, _ = A.shape
    out = np.empty((m, N + 1))
    out[:, 0] = 1.0
    B = np.broadcast_to(np.eye(N), (m, N, N)).copy()
    eye = np.eye(N)
    for r in range(1, N + 1):
        AB = A @ B
        s = np.einsum("mii->m", AB) / r
        out[:, r] = s
        if r < N:
            B = s[:, None, None] * eye - AB
    return out


def elem_sym(r: int, A: np.ndarray) -> float:
    """Elementary symmetric function S_r of the eigenvalues of symmetric A."""
    A = _check_symmetric(A)
    N = A.shape[0]
    if not 0 <= r <= N:
        raise DomainError(f"order r must satisfy 0 <= r <= {N}, got {r}")
    return float(_elem_sym_all_batch(A[None])[0, r])


def _cofactor_batch(A: np.ndarray, r: int) -> np.ndarray:
    """Exact first-cofactor matrices T_r for a batch (m, N, N) -> (m, N, N)."""
    m, N, _ = A.shape
    S = _elem_sym_all_batch(A)
    # Horner evaluation of sum_{i=0}^{r-1} (-1)^i S_{r-1-i} A^i from the top power.
    sign = -1.0 if (r - 1) % 2 else 1.0
    eye = np.eye(N)
    P = (sign * S[:, 0])[:, None, None] * np.broadcast_to(eye, (m, N, N)).copy()
    for i in range(r - 2, -1, -1):
        sign = -1.0 if i % 2 else 1.0
        P = A @ P + (sign * S[:, r - 1 - i])[:, None, None] * eye
    return P


def cofactor(r: int, A: np.ndarray) -> np.ndarray:
    """First cofactor matrix (S_r^{ij}(A)) = (d S_r / d a_ij).

    Closed form: sum_{m=0}^{r-1} (-1)^m S_{r-1-m}(A) A^m; for r = N this
    is the adjugate, and at A = I_N it equals binom(N-1, r-1) I_N.
    """
    A = _check_symmetric(A)
    N = A.shape[0]
    if not 1 <= r <= N:
        raise DomainError(f"order r must satisfy 1 <= r <= {N}, got {r}")
    return _cofactor_batch(A[None], r)[0]


def _second_cofactor_batch(A: np.ndarray, r: int, step: float = 1e-5) -> np.ndarray:
    """Second cofactors by central differences of the exact first cofactor.

    Entries are perturbed in symmetric pairs (k, l), (l, k); halving the
    off-diagonal difference converts the pair derivative into the
    independent-entry derivative d^2 S_r / d a_ij d a_kl symmetrized over
    (k, l), which is what contractions against symmetric matrices see.
    """
    m, N, _ = A.shape
    eps = step * (1.0 + np.max(np.abs(A)))
    out = np.empty((m, N, N, N, N))
    for k in range(N):
        for l in range(k, N):
            E = np.zeros((N, N))
            E[k, l] = eps
            E[l, k] = eps
            Tp = _cofactor_batch(A + E, r)
            Tm = _cofactor_batch(A - E, r)
            D = (Tp - Tm) / (2.0 * eps)
            if k != l:
                D = D / 2.0
            out[:, :, :, k, l] = D
            out[:, :, :, l, k] = D
    return out


def second_cofactor(r: int, A: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Second cofactor tensor (S_r^{ij,kl}(A)), shape (N, N, N, N).

    S_1^{ij,kl} vanishes identically; r = 2 gives a constant tensor.
    """
    A = _check_symmetric(A)
    N = A.shape[0]
    if not 1 <= r <= N:
        raise DomainError(f"order r must satisfy 1 <= r <= {N}, got {r}")
    if r == 1:
        return np.zeros((N, N, N, N))
    return _second_cofactor_batch(A[None], r, step=step)[0]


def q_matrix(body: Body, x: np.ndarray, frame: TangentFrame | None = None,
             step: float = calculus.HESSIAN_STEP) -> np.ndarray:
    """Q[h] = (h_ij + h delta_ij) at a unit direction, in the given frame.

    Requires a smooth body.  The result is frame-covariant: its elementary
    symmetric functions do not depend on the frame choice.
    """
    require_smooth(body, "q_matrix")
    if frame is None:
        frame = tangent_frame(x)
    x = np.asarray(x, dtype=float)
    Q, _ = calculus.tangent_hessian(
        body.support_values, x[None, :], frame.vectors[None, :, :], step=step
    )
    return Q[0]


def q_matrix_nodes(body: Body, grid: SphericalGrid,
                   step: float = calculus.HESSIAN_STEP):
    """Q[h] at every grid node using the grid's cached frames.

    Returns (Q, err) with Q of shape (m, n-1, n-1) and err the per-node
    finite-difference error estimate.
    """
    require_smooth(body, "q_matrix_nodes")
    return calculus.tangent_hessian(body.support_values, grid.nodes, grid.frames, step=step)


def area_measure_density(body: Body, k: int, x: np.ndarray,
                         frame: TangentFrame | None = None) -> float:
    """Density S_{k-1}(Q[h]) of the (k-1)-st area measure at direction x."""
    n = np.asarray(x).shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"order k must satisfy 1 <= k <= {n}, got {k}")
    Q = q_matrix(body, x, frame)
    return float(_elem_sym_all_batch(Q[None])[0, k - 1])


@dataclass(frozen=True)
class IntrinsicVolumeResult:
    """Value of an intrinsic volume with provenance and error metadata."""

    value: float
    k: int
    method: str
    error_estimate: float = 0.0
    q_positive_definite: bool = True


def _vk_integral(body: Body, k: int, grid: SphericalGrid):
    h = np.asarray(body.support_values(grid.nodes), dtype=float)
    Q, _ = q_matrix_nodes(body, grid)
    dens = _elem_sym_all_batch(Q)[:, k - 1]
    pd = bool(np.all(np.linalg.eigvalsh(Q)[:, 0] > 0.0))
    n = grid.dimension
    value = float(np.dot(grid.weights, h * dens)) / (k * unit_ball_volume(n - k))
    return value, pd


def vk_quadrature(body: Body, k: int, grid: SphericalGrid,
                  error_estimate: bool = True) -> IntrinsicVolumeResult:
    """V_k of a smooth body by spherical quadrature of h S_{k-1}(Q[h]).

    The error estimate is the difference against a companion grid at half
    the resolution (same method and seed); it is 0 when no coarser grid
    exists.  A non-positive-definite Q at some node is reported through
    ``q_positive_definite`` rather than raised, since it usually signals
    loss of convexity rather than an evaluation failure.
    """
    n = grid.dimension
    if not 1 <= k <= n:
        raise DomainError(f"order k must satisfy 1 <= k <= {n}, got {k}")
    require_smooth(body, "vk_quadrature")
    value, pd = _vk_integral(body, k, grid)
    delta = 0.0
    if error_estimate and grid.resolution >= 2:
        coarse = build_grid(n, grid.resolution // 2, grid.method, seed=grid.seed)
        coarse_value, _ = _vk_integral(body, k, coarse)
        delta = abs(value - coarse_value)
    return IntrinsicVolumeResult(value=value, k=k, method="quadrature",
                                 error_estimate=delta, q_positive_definite=pd)


def vk_ball(n: int, k: int, radius: float = 1.0) -> IntrinsicVolumeResult:
    """Closed form V_k(R B_n) = binom(n, k) kappa_n R^k / kappa_{n-k}."""
    if not 0 <= k <= n:
        raise DomainError(f"order k must satisfy 0 <= k <= {n}, got {k}")
    if radius < 0.0:
        raise DomainError("radius must be non-negative")
    value = math.comb(n, k) * unit_ball_volume(n) * radius ** k / unit_ball_volume(n - k)
    return IntrinsicVolumeResult(value=value, k=k, method="ball-closed-form")


def vk_box(half_lengths, k: int) -> IntrinsicVolumeResult:
    """V_k of a box with given half-lengths: 2^k e_k(a_1, ..., a_n).

    e_k is the elementary symmetric polynomial, evaluated by the standard
    one-pass recurrence (exact for small integer or dyadic inputs).
    """
    a = [float(v) for v in half_lengths]
    n = len(a)
    if not 0 <= k <= n:
        raise DomainError(f"order k must satisfy 0 <= k <= {n}, got {k}")
    if any(v < 0.0 for v in a):
        raise DomainError("box half-lengths must be non-negative")
    e = [0.0] * (k + 1)
    e[0] = 1.0
    for v in a:
        for j in range(k, 0, -1):
            e[j] += v * e[j - 1]
    return IntrinsicVolumeResult(value=(2.0 ** k) * e[k], k=k, method="box-formula")
