"""Finite push-forward matrices: regression estimate and jet-space oracle.

The estimate is the leftmost block of V* (U*)^+ built from feature matrices at
sample pairs (z, f(z)).  The oracle computes the same matrix exactly from jets
of f at the base point, by pairing derivative functionals against the target
features composed with f.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import EstimatorIllPosedError, NonPositiveDefiniteError
from .fock import SampleSet, feature_matrix_U, feature_matrix_V
from .jets import constant_jet, jet_exp, jet_int_pow, jet_mul
from .maps import MapExpr, jet_of_map
from .multiindex import graded_numbering, jet_dimension


def default_rcond(N: int, r_n: int) -> float:
    """Relative singular-value cutoff for the feature pseudo-inverse."""
    return 1e-12 * max(N, r_n)


@dataclass(frozen=True)
class PushforwardEstimate:
    """Regression estimate of the order-m push-forward from order-n features."""

    C_hat: np.ndarray  # r_m(target) x r_m(source)
    m: int
    n: int
    d: int
    r: int
    pinv_rcond: float
    smallest_kept_sv: float
    largest_sv: float

    def __post_init__(self) -> None:
        expected = (jet_dimension(self.r, self.m), jet_dimension(self.d, self.m))
        if self.C_hat.shape != expected:
            raise ValueError(f"estimate has shape {self.C_hat.shape}, expected {expected}")


def estimate_pushforward(p, q, m: int, n: int, samples: SampleSet,
                         rcond: float | None = None) -> PushforwardEstimate:
    """Least-squares push-forward estimate from paired samples.

    p is the source base point, q = f(p) the target one; m is the block order,
    n >= m the regression order.
    """
    p = np.atleast_1d(np.asarray(p, dtype=np.complex128))
    q = np.atleast_1d(np.asarray(q, dtype=np.complex128))
    if not 1 <= m <= n:
        raise ValueError(f"orders must satisfy 1 <= m <= n, got m={m}, n={n}")
    d, r = p.shape[0], q.shape[0]
    U = feature_matrix_U(p, n, samples.Z)
    V = feature_matrix_V(q, m, samples.W)
    N, rn_E = U.shape
    rm_E = jet_dimension(d, m)
    if N < rn_E:
        warnings.warn(
            f"only {N} samples for {rn_E} features; estimate is underdetermined",
            stacklevel=2,
        )
    if rcond is None:
        rcond = default_rcond(N, rn_E)
    A, s, Bh = np.linalg.svd(U, full_matrices=False)
    cutoff = rcond * s[0]
    kept = int(np.count_nonzero(s > cutoff))
    if kept < rn_E:
        raise EstimatorIllPosedError(
            f"feature matrix has numerical rank {kept} < {rn_E}", s.copy()
        )
    # (U*)^+ = A diag(1/s) B^h, so V* (U*)^+ in three thin products
    G = (V.conj().T @ A) * (1.0 / s)[None, :] @ Bh
    return PushforwardEstimate(
        C_hat=G[:, :rm_E],
        m=m,
        n=n,
        d=d,
        r=r,
        pinv_rcond=float(rcond),
        smallest_kept_sv=float(s[kept - 1]),
        largest_sv=float(s[0]),
    )


@dataclass(frozen=True)
class OraclePushforward:
    """Exact order-m push-forward matrix and the Jacobian of f at the base point."""

    C: np.ndarray  # r_m(target) x r_m(source)
    jacobian: np.ndarray  # r x d


def _gamma_range(alpha: tuple[int, ...]):
    return product(*(range(a + 1) for a in alpha))


def oracle_pushforward(f: MapExpr, p, m: int) -> OraclePushforward:
    """Exact push-forward block of order m computed from jets of f about p."""
    if m < 1:
        raise ValueError(f"order must be at least 1, got {m}")
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    if p.shape != (f.d,):
        raise ValueError(f"base point has shape {p.shape}, expected ({f.d},)")
    d, r = f.d, f.r
    table_E = graded_numbering(d, m)
    table_F = graded_numbering(r, m)
    jets_f = jet_of_map(f, p, m)
    q = np.array([jf.coeffs[0] for jf in jets_f])
    jac = np.array([[jets_f[k].coeffs[1 + i] for i in range(d)] for k in range(r)])

    # jets of the centered components and of e^{<f-q, q>}
    centered = [jf - q_k for jf, q_k in zip(jets_f, q)]
    expo = constant_jet(centered[0].table, 0.0)
    for k in range(r):
        expo += centered[k] * complex(np.conj(q[k]))
    kernel = jet_exp(expo)

    H = np.empty((len(table_F), len(table_E)), dtype=np.complex128)
    for j, beta in enumerate(table_F.entries):
        g = kernel
        for k, b in enumerate(beta):
            if b:
                g = jet_mul(g, jet_int_pow(centered[k], b))
        H[j] = g.coeffs

    # contraction with the derivative-functional coefficients of the source features
    M = np.zeros((len(table_E), len(table_E)))
    pref = math.exp(-float(p @ p) / 2)
    for i, alpha in enumerate(table_E.entries):
        scale = pref / math.sqrt(table_E.factorials[i])
        for gamma in _gamma_range(alpha):
            t = table_E.position(gamma)
            binom = math.prod(math.comb(a, g) for a, g in zip(alpha, gamma))
            mono = math.prod((-p[k]) ** (alpha[k] - gamma[k]) for k in range(d))
            M[i, t] = scale * binom * mono * table_E.factorials[t]

    row_scale = np.array(
        [
            math.exp(float(np.vdot(q, q).real) / 2) / math.sqrt(table_F.factorials[j])
            for j in range(len(table_F))
        ]
    )
    C = (row_scale[:, None] * np.conj(H)) @ M.T
    return OraclePushforward(C=C, jacobian=jac)


def gamma_check(D_mu: np.ndarray, D_hat: np.ndarray) -> float:
    """Operator-norm distance of the whitened empirical moment matrix from identity."""
    D_mu = np.asarray(D_mu, dtype=np.float64)
    D_hat = np.asarray(D_hat, dtype=np.float64)
    if D_mu.shape != D_hat.shape or D_mu.ndim != 2 or D_mu.shape[0] != D_mu.shape[1]:
        raise ValueError(f"shape mismatch: {D_mu.shape} vs {D_hat.shape}")
    w, Q = np.linalg.eigh((D_mu + D_mu.T) / 2)
    if w.min() <= 0:
        raise NonPositiveDefiniteError(
            f"reference moment matrix has smallest eigenvalue {w.min():.3e}"
        )
    S = (Q * w ** -0.5) @ Q.T
    Mres = np.eye(D_mu.shape[0]) - S @ ((D_hat + D_hat.T) / 2) @ S
    Mres = (Mres + Mres.T) / 2
    return float(np.max(np.abs(np.linalg.eigvalsh(Mres))))


def theorem_rate(m: int, n: int, R_mu: float, Lambda_n: float, gamma: float) -> float:
    """Error-rate expression sqrt(m!/gamma) R_mu^n / sqrt(Lambda_n)."""
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    if Lambda_n <= 0:
        raise ValueError(f"Lambda_n must be positive, got {Lambda_n}")
    return math.sqrt(math.factorial(m) / gamma) * R_mu ** n / math.sqrt(float(Lambda_n))
