"""Log-perturbation paths, curvature-integral derivatives and concavity scans.

For a smooth body with support h and an even test function psi, the path
h_s = h e^{s psi} stays in the support-function cone for s in a window
around 0.  The central object is

    f_k(s) = (1/k) int_{S^{n-1}} h_s S_{k-1}(Q[h_s]) dx,

proportional to the k-th intrinsic volume of the body with support h_s
(f_k = kappa_{n-k} V_k).  Because d/ds h_s = psi h_s, the derivatives have
closed expressions in the cofactors of S_{k-1}:

    f_k'   = int psi h_s S_{k-1}(Q[h_s])
    f_k''  = int psi^2 h_s S_{k-1} + int psi h_s <S_{k-1}^{ij}, Q[psi h_s]>
    f_k''' = int psi^3 h_s S_{k-1} + 2 int psi^2 h_s <S_{k-1}^{ij}, Q[psi h_s]>
             + int psi h_s <S_{k-1}^{ij,rs}, Q[psi h_s] (x) Q[psi h_s]>
             + int psi h_s <S_{k-1}^{ij}, Q[psi^2 h_s]>

The p-Brunn-Minkowski inequality for V_k along geodesics of the 0-sum is
log-concavity of f_k in s, i.e. H(s) = f_k f_k'' - (f_k')^2 <= 0.  For
constant psi, f_k(s) = f_k(0) e^{k psi s} exactly (scaling), so H = 0.

At the unit ball (h = 1) the derivatives reduce to closed forms:

    f_k(0)   = |S^{n-1}|/k binom(n-1, k-1)
    f_k'(0)  = binom(n-1, k-1) int psi
    f_k''(0) = binom(n-2, n-k) [ (n-1)k/(k-1) int psi^2 + int psi Lap psi ]

(the last for k >= 2; k = 1 is the linear mean-width functional).  The
spectral gap on even zero-mean functions gives the sharpened Poincare
inequality  int psi^2 <= (1/2n) int |grad psi|^2,  with equality exactly
on degree-2 harmonics, which is what makes f_k''(0) <= 0 above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import calculus
from .bodies import Body, require_smooth
from .errors import DomainError, PathValidityError, UnsupportedScaleError
from .intrinsic import (
    _cofactor_batch,
    _elem_sym_all_batch,
    _second_cofactor_batch,
)
from .sphere import SphericalGrid, TestFunction, integrate

#: Largest ambient dimension for which third derivatives (second-cofactor
#: contractions at every node) are computed.
MAX_THIRD_DERIVATIVE_DIMENSION = 5

S_WINDOW = (-2.0, 2.0)
_VALIDITY_SAMPLES = (-2.0, -1.0, 0.0, 1.0, 2.0)


def _min_eig(Q: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(Q)[:, 0]


@dataclass
class VariationPath:
    """The family h_s = h e^{s psi} for a smooth base body.

    Construction verifies that Q[h_s] is positive definite at every grid
    node for s in {-2, -1, 0, 1, 2}; computed node data is cached per s.
    """

    body: Body
    psi: TestFunction
    k: int
    grid: SphericalGrid
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _psi_vals: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        require_smooth(self.body, "VariationPath")
        n = self.grid.dimension
        if not 1 <= self.k <= n:
            raise DomainError(f"order k must satisfy 1 <= k <= {n}, got {self.k}")
        self._psi_vals = np.asarray(self.psi(self.grid.nodes), dtype=float)
        for s in _VALIDITY_SAMPLES:
            self._node_data(s)

    # -- field constructors ------------------------------------------------
    def _field_h(self, s: float):
        body, psi = self.body, self.psi

        def h_s(X):
            return np.asarray(body.support_values(X), dtype=float) * np.exp(
                s * np.asarray(psi(X), dtype=float)
            )

        return h_s

    def _field_psih(self, s: float, power: int = 1):
        h_s, psi = self._field_h(s), self.psi

        def g(X):
            return np.asarray(psi(X), dtype=float) ** power * h_s(X)

        return g

    # -- cached per-s node data -------------------------------------------
    def _node_data(self, s: float) -> dict:
        key = float(s)
        data = self._cache.get(key)
        if data is None:
            Q, _ = calculus.tangent_hessian(
                self._field_h(key), self.grid.nodes, self.grid.frames
            )
            lo = _min_eig(Q)
            if not np.all(lo > 0.0):
                bad = int(np.argmin(lo))
                raise PathValidityError(
                    f"Q[h_s] not positive definite at s={key} (node {bad}, "
                    f"min eigenvalue {lo[bad]:.3e}); the path left the smooth "
                    "convex cone",
                    s=key,
                    node_index=bad,
                )
            data = {
                "h": self._field_h(key)(self.grid.nodes),
                "Q": Q,
                "dens": _elem_sym_all_batch(Q)[:, self.k - 1],
            }
            self._cache[key] = data
        return data

    def _cofactors(self, s: float) -> np.ndarray:
        data = self._node_data(s)
        if "cof" not in data:
            if self.k == 1:
                m, N, _ = data["Q"].shape
                data["cof"] = np.zeros((m, N, N))
            else:
                data["cof"] = _cofactor_batch(data["Q"], self.k - 1)
        return data["cof"]

    def _q_psih(self, s: float) -> np.ndarray:
        data = self._node_data(s)
        if "q_psih" not in data:
            Q, _ = calculus.tangent_hessian(
                self._field_psih(s), self.grid.nodes, self.grid.frames
            )
            data["q_psih"] = Q
        return data["q_psih"]

    def _q_psi2h(self, s: float) -> np.ndarray:
        data = self._node_data(s)
        if "q_psi2h" not in data:
            Q, _ = calculus.tangent_hessian(
                self._field_psih(s, power=2), self.grid.nodes, self.grid.frames
            )
            data["q_psi2h"] = Q
        return data["q_psi2h"]

    def _second_cofactors(self, s: float) -> np.ndarray:
        data = self._node_data(s)
        if "scof" not in data:
            Q = data["Q"]
            m, N, _ = Q.shape
            if self.k == 1:
                data["scof"] = np.zeros((m, N, N, N, N))
            else:
                data["scof"] = _second_cofactor_batch(Q, self.k - 1)
        return data["scof"]


def _check_s(s: float) -> float:
    if not S_WINDOW[0] <= s <= S_WINDOW[1]:
        raise DomainError(f"s must lie in [{S_WINDOW[0]}, {S_WINDOW[1]}], got {s}")
    return float(s)


def f_k(path: VariationPath, s: float) -> float:
    """f_k(s) = (1/k) int h_s S_{k-1}(Q[h_s])."""
    s = _check_s(s)
    data = path._node_data(s)
    w = path.grid.weights
    return float(np.dot(w, data["h"] * data["dens"])) / path.k


def f_k_prime(path: VariationPath, s: float) -> float:
    """First s-derivative of f_k; uses d/ds h_s = psi h_s."""
    s = _check_s(s)
    data = path._node_data(s)
    w, psi = path.grid.weights, path._psi_vals
    return float(np.dot(w, psi * data["h"] * data["dens"]))


def f_k_second(path: VariationPath, s: float) -> float:
    """Second s-derivative of f_k via the first cofactor of S_{k-1}."""
    s = _check_s(s)
    data = path._node_data(s)
    w, psi = path.grid.weights, path._psi_vals
    hd = data["h"]
    term1 = float(np.dot(w, psi * psi * hd * data["dens"]))
    cof = path._cofactors(s)
    qdot = path._q_psih(s)
    inner = np.einsum("mij,mij->m", cof, qdot)
    term2 = float(np.dot(w, psi * hd * inner))
    return term1 + term2


def f_k_third(path: VariationPath, s: float) -> float:
    """Third s-derivative of f_k via first and second cofactors.

    Limited to ambient dimension <= 5: the second-cofactor contraction at
    every node scales like (n-1)^4 cofactor evaluations.
    """
    s = _check_s(s)
    n = path.grid.dimension
    if n > MAX_THIRD_DERIVATIVE_DIMENSION:
        raise UnsupportedScaleError(
            f"third derivatives are supported for n <= {MAX_THIRD_DERIVATIVE_DIMENSION}, got n={n}"
        )
    data = path._node_data(s)
    w, psi = path.grid.weights, path._psi_vals
    hd = data["h"]
    cof = path._cofactors(s)
    qdot = path._q_psih(s)
    inner1 = np.einsum("mij,mij->m", cof, qdot)
    term1 = float(np.dot(w, psi ** 3 * hd * data["dens"]))
    term2 = 2.0 * float(np.dot(w, psi * psi * hd * inner1))
    scof = path._second_cofactors(s)
    inner2 = np.einsum("mijrs,mij,mrs->m", scof, qdot, qdot)
    term3 = float(np.dot(w, psi * hd * inner2))
    qddot = path._q_psi2h(s)
    inner3 = np.einsum("mij,mij->m", cof, qddot)
    term4 = float(np.dot(w, psi * hd * inner3))
    return term1 + term2 + term3 + term4


@dataclass(frozen=True)
class ConcavityReport:
    """Result of a log-concavity scan of f_k along a perturbation path."""

    s_values: tuple[float, ...]
    f_values: tuple[float, ...]
    fprime_values: tuple[float, ...]
    fsecond_values: tuple[float, ...]
    concavity_values: tuple[float, ...]  # H(s) = f f'' - (f')^2
    tolerance: float
    verdict: str  # strictly-concave | concave | violated
    violation_s: float | None = None

    def to_json(self) -> dict:
        return {
            "s_values": list(self.s_values),
            "f_values": list(self.f_values),
            "fprime_values": list(self.fprime_values),
            "fsecond_values": list(self.fsecond_values),
            "concavity_values": list(self.concavity_values),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "violation_s": self.violation_s,
        }

    def csv_rows(self) -> list[list]:
        rows = [["s", "f_k", "f_k_prime", "f_k_second", "H"]]
        for i, s in enumerate(self.s_values):
            rows.append([s, self.f_values[i], self.fprime_values[i],
                         self.fsecond_values[i], self.concavity_values[i]])
        return rows


def concavity_scan(path: VariationPath, s_values=None,
                   tolerance_scale: float = 1e-8) -> ConcavityReport:
    """Evaluate H(s) = f_k f_k'' - (f_k')^2 on a grid of s values.

    Verdict is ``strictly-concave`` if H < -tol everywhere, ``concave`` if
    H <= tol everywhere, else ``violated``; tol = tolerance_scale * f_k(0)^2
    absorbs quadrature and differencing noise (relevant for constant psi,
    where H vanishes identically).
    """
    if s_values is None:
        s_values = np.linspace(S_WINDOW[0], S_WINDOW[1], 21)
    s_values = [float(_check_s(s)) for s in s_values]
    f0 = f_k(path, 0.0)
    tol = tolerance_scale * f0 * f0
    fs, f1s, f2s, Hs = [], [], [], []
    for s in s_values:
        fv = f_k(path, s)
        f1 = f_k_prime(path, s)
        f2 = f_k_second(path, s)
        fs.append(fv)
        f1s.append(f1)
        f2s.append(f2)
        Hs.append(fv * f2 - f1 * f1)
    H = np.asarray(Hs)
    if np.all(H < -tol):
        verdict, violation = "strictly-concave", None
    elif np.all(H <= tol):
        verdict, violation = "concave", None
    else:
        verdict = "violated"
        violation = s_values[int(np.argmax(H))]
    return ConcavityReport(
        s_values=tuple(s_values),
        f_values=tuple(fs),
        fprime_values=tuple(f1s),
        fsecond_values=tuple(f2s),
        concavity_values=tuple(Hs),
        tolerance=tol,
        verdict=verdict,
        violation_s=violation,
    )


# -- closed forms at the unit ball ----------------------------------------

def ball_fk(n: int, k: int) -> float:
    """f_k(0) for the unit ball: |S^{n-1}|/k * binom(n-1, k-1)."""
    if not 1 <= k <= n:
        raise DomainError(f"order k must satisfy 1 <= k <= {n}, got {k}")
    from .sphere import surface_area

    return surface_area(n) / k * math.comb(n - 1, k - 1)


def ball_fk_prime(n: int, k: int, psi, grid: SphericalGrid) -> float:
    """f_k'(0) at the unit ball: binom(n-1, k-1) int psi."""
    if not 1 <= k <= n:
        raise DomainError(f"order k must satisfy 1 <= k <= {n}, got {k}")
    return math.comb(n - 1, k - 1) * integrate(grid, psi)


def ball_fk_second(n: int, k: int, psi, grid: SphericalGrid) -> float:
    """f_k''(0) at the unit ball, for k >= 2:

    binom(n-2, n-k) [ (n-1)k/(k-1) int psi^2 + int psi Lap psi ].

    k = 1 is excluded: the mean-width functional is linear in h, so its
    second variation carries no cofactor term and needs no closed form.
    """
    if not 2 <= k <= n:
        raise DomainError("closed-form f_k''(0) requires 2 <= k <= n")
    psi_vals = np.asarray(psi(grid.nodes), dtype=float)
    lap = calculus.spherical_laplacian(psi, grid.nodes, grid.frames)
    int_psi2 = float(np.dot(grid.weights, psi_vals * psi_vals))
    int_psilap = float(np.dot(grid.weights, psi_vals * lap))
    return math.comb(n - 2, n - k) * ((n - 1) * k / (k - 1) * int_psi2 + int_psilap)


# -- Poincare inequality ---------------------------------------------------

@dataclass(frozen=True)
class PoincareResult:
    lhs: float        # int psi^2
    rhs: float        # (1/2n) int |grad psi|^2
    ratio: float      # lhs / rhs (0 for the trivial zero function)
    satisfied: bool
    degenerate: bool = False


def poincare_check(psi, grid: SphericalGrid, slack: float = 1e-9) -> PoincareResult:
    """Check int psi^2 <= (1/2n) int |grad psi|^2 for even zero-mean psi.

    Equality holds exactly on degree-2 spherical harmonics (the first even
    eigenvalue of -Lap is 2n); higher even harmonics give ratio < 1.

    Raises
    ------
    DomainError
        If psi is not even (checked by sampling antipodes) or not
        zero-mean (|int psi| > 1e-8 * scale).
    """
    vals = np.asarray(psi(grid.nodes), dtype=float)
    anti = np.asarray(psi(-grid.nodes), dtype=float)
    scale = 1.0 + np.max(np.abs(vals))
    if np.max(np.abs(vals - anti)) > 1e-10 * scale:
        raise DomainError("poincare_check requires an even test function")
    mean = float(np.dot(grid.weights, vals))
    if abs(mean) > 1e-8 * scale * grid.area:
        raise DomainError("poincare_check requires a zero-mean test function")
    n = grid.dimension
    lhs = float(np.dot(grid.weights, vals * vals))
    grad = calculus.spherical_gradient(psi, grid.nodes)
    rhs = float(np.dot(grid.weights, (grad * grad).sum(axis=1))) / (2.0 * n)
    if lhs < 1e-14 * scale * scale and rhs < 1e-14 * scale * scale:
        return PoincareResult(lhs=lhs, rhs=rhs, ratio=0.0, satisfied=True,
                              degenerate=True)
    ratio = lhs / rhs
    return PoincareResult(lhs=lhs, rhs=rhs, ratio=ratio,
                          satisfied=lhs <= rhs * (1.0 + slack) + slack)


# -- integration-by-parts identities ---------------------------------------

@dataclass(frozen=True)
class IbpResult:
    """Absolute residuals of the two cofactor integration-by-parts identities."""

    residual_first: float
    residual_second: float
    scale_first: float
    scale_second: float


def ibp_check(body: Body, phi, phibar, psi, k: int, grid: SphericalGrid) -> IbpResult:
    """Residuals of the symmetry identities of cofactor contractions.

    First identity:  int phibar <S_k^{ij}(Q[h]), Q[phi]> =
                     int phi    <S_k^{ij}(Q[h]), Q[phibar]>.
    Second identity: int psi    <S_k^{ij,rs}(Q[h]), Q[phi] (x) Q[phibar]> =
                     int phibar <S_k^{ij,rs}(Q[h]), Q[phi] (x) Q[psi]>.

    Here k indexes S_k directly, 1 <= k <= n - 1.
    """
    require_smooth(body, "ibp_check")
    n = grid.dimension
    if not 1 <= k <= n - 1:
        raise DomainError(f"order k must satisfy 1 <= k <= {n - 1}, got {k}")
    w = grid.weights
    Qh, _ = calculus.tangent_hessian(body.support_values, grid.nodes, grid.frames)
    cof = _cofactor_batch(Qh, k)
    qphi, _ = calculus.tangent_hessian(phi, grid.nodes, grid.frames)
    qphibar, _ = calculus.tangent_hessian(phibar, grid.nodes, grid.frames)
    vphi = np.asarray(phi(grid.nodes), dtype=float)
    vphibar = np.asarray(phibar(grid.nodes), dtype=float)

    a1 = float(np.dot(w, vphibar * np.einsum("mij,mij->m", cof, qphi)))
    a2 = float(np.dot(w, vphi * np.einsum("mij,mij->m", cof, qphibar)))

    if k == 1:
        m, N, _ = Qh.shape
        scof = np.zeros((m, N, N, N, N))
    else:
        scof = _second_cofactor_batch(Qh, k)
    qpsi, _ = calculus.tangent_hessian(psi, grid.nodes, grid.frames)
    vpsi = np.asarray(psi(grid.nodes), dtype=float)
    b1 = float(np.dot(w, vpsi * np.einsum("mijrs,mij,mrs->m", scof, qphi, qphibar)))
    b2 = float(np.dot(w, vphibar * np.einsum("mijrs,mij,mrs->m", scof, qphi, qpsi)))

    return IbpResult(
        residual_first=abs(a1 - a2),
        residual_second=abs(b1 - b2),
        scale_first=max(abs(a1), abs(a2), 1.0),
        scale_second=max(abs(b1), abs(b2), 1.0),
    )


# -- Christoffel-Minkowski residual ----------------------------------------

def christoffel_residual(body: Body, p: float, k: int, x: np.ndarray,
                         frame=None) -> float:
    """Residual h^{1-p} S_{k-1}(Q[h]) - binom(n-1, k-1) at direction x.

    Zero exactly at the unit ball; the scaled ball R B_n gives the constant
    (R^{k-p} - 1) binom(n-1, k-1).
    """
    from .intrinsic import q_matrix

    if not 0.0 <= p < 1.0:
        raise DomainError(f"p must lie in [0, 1), got {p}")
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if not 2 <= k <= n:
        raise DomainError(f"order k must satisfy 2 <= k <= {n}, got {k}")
    h = float(np.asarray(body.support_values(x[None, :]))[0])
    if h <= 0.0:
        raise DomainError("christoffel residual requires positive support at x")
    Q = q_matrix(body, x, frame)
    dens = float(_elem_sym_all_batch(Q[None])[0, k - 1])
    return h ** (1.0 - p) * dens - math.comb(n - 1, k - 1)


def christoffel_residual_grid(body: Body, p: float, k: int, grid: SphericalGrid):
    """Residual field on all grid nodes; returns (values, max_abs)."""
    from .intrinsic import q_matrix_nodes

    if not 0.0 <= p < 1.0:
        raise DomainError(f"p must lie in [0, 1), got {p}")
    n = grid.dimension
    if not 2 <= k <= n:
        raise DomainError(f"order k must satisfy 2 <= k <= {n}, got {k}")
    h = np.asarray(body.support_values(grid.nodes), dtype=float)
    if np.any(h <= 0.0):
        raise DomainError("christoffel residual requires positive support")
    Q, _ = q_matrix_nodes(body, grid)
    dens = _elem_sym_all_batch(Q)[:, k - 1]
    vals = h ** (1.0 - p) * dens - math.comb(n - 1, k - 1)
    return vals, float(np.max(np.abs(vals)))


# -- centering -------------------------------------------------------------

def center_test_function(psi, grid: SphericalGrid):
    """Subtract the grid mean: returns (psi_bar, mean) with int psi_bar = 0.

    The mean uses the grid's own weight sum, so the centered function
    integrates to zero on that grid to rounding accuracy.  Centering shifts
    f_k along the path by the exact factor e^{-k s mean}.
    """
    vals = np.asarray(psi(grid.nodes), dtype=float)
    mean = float(np.dot(grid.weights, vals)) / grid.area
    if isinstance(psi, TestFunction):
        return psi.shifted(-mean), mean

    def centered(X):
        return np.asarray(psi(X), dtype=float) - mean

    return centered, mean
