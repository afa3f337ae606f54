"""Map reconstruction from a push-forward estimate, and its least-squares twin.

Component i of the reconstructed map is u_{p,m}(z) C^* (d/dz_i v_{q,m})(0)^*.
At p = 0 this coincides, monomial by monomial, with truncating a degree-n
least-squares polynomial fit to degree m (after restoring the constant term).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EstimatorIllPosedError
from .fock import SampleSet, basis_gradient_at_zero, feature_matrix_U
from .maps import MapExpr, eval_map, eval_map_batch
from .multiindex import graded_numbering, jet_dimension
from .pushforward import PushforwardEstimate, default_rcond, estimate_pushforward


def reconstruct_eval(estimate: PushforwardEstimate, p, q, m: int, z) -> np.ndarray:
    """Evaluate the reconstructed map at a point z; returns a length-r vector."""
    if m != estimate.m:
        raise ValueError(f"estimate was built at order {estimate.m}, not {m}")
    p = np.atleast_1d(np.asarray(p, dtype=np.complex128))
    q = np.atleast_1d(np.asarray(q, dtype=np.complex128))
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    u = feature_matrix_U(p, m, z[None, :])[0]
    pulled = estimate.C_hat.conj().T  # r_m(source) x r_m(target)
    out = np.empty(q.shape[0], dtype=np.complex128)
    for i in range(1, q.shape[0] + 1):
        grad = basis_gradient_at_zero(q, m, i)
        out[i - 1] = u @ pulled @ np.conj(grad)
    return out


def monomial_design(X, n: int) -> np.ndarray:
    """N x r_n matrix of plain monomials x^alpha in graded order."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    table = graded_numbering(X.shape[1], n)
    pows = [np.vander(X[:, k], N=n + 1, increasing=True) for k in range(X.shape[1])]
    P = np.ones((X.shape[0], len(table)))
    for i, alpha in enumerate(table.entries):
        col = np.ones(X.shape[0])
        for k, a in enumerate(alpha):
            if a:
                col = col * pows[k][:, a]
        P[:, i] = col
    return P


def truncated_lsq(X, Y, m: int, n: int, rcond: float | None = None) -> np.ndarray:
    """Degree-n least-squares polynomial fit, truncated to coefficients of degree <= m."""
    if not 1 <= m <= n:
        raise ValueError(f"orders must satisfy 1 <= m <= n, got m={m}, n={n}")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.asarray(Y, dtype=np.complex128).ravel()
    if Y.shape[0] != X.shape[0]:
        raise ValueError(f"{X.shape[0]} points but {Y.shape[0]} values")
    P = monomial_design(X, n)
    N, rn = P.shape
    if N < rn:
        warnings.warn(f"only {N} samples for {rn} monomials; fit is underdetermined",
                      stacklevel=2)
    if rcond is None:
        rcond = default_rcond(N, rn)
    A, s, Bh = np.linalg.svd(P, full_matrices=False)
    kept = int(np.count_nonzero(s > rcond * s[0]))
    if kept < rn:
        raise EstimatorIllPosedError(
            f"monomial design matrix has numerical rank {kept} < {rn}", s.copy()
        )
    coeff = Bh.conj().T @ ((A.conj().T @ Y) / s)
    return coeff[: jet_dimension(X.shape[1], m)]


def pipeline_and_lsq_coefficients(g: MapExpr, X, m: int, n: int
                                  ) -> tuple[np.ndarray, np.ndarray]:
    """Monomial coefficients of the feature pipeline at p=0 and of truncated LSQ.

    g must be scalar-valued; the pipeline runs on f = g - g(0) and the constant
    is restored before comparing against the direct polynomial fit of g.
    """
    if g.r != 1:
        raise ValueError(f"expected a scalar-valued map, got r={g.r}")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    d = g.d
    if X.shape[1] != d:
        raise ValueError(f"points have shape {X.shape}, expected (N, {d})")
    g0 = complex(eval_map(g, np.zeros(d))[0])
    if abs(g0.imag) > 1e-12:
        raise ValueError(f"map value at 0 must be real, got {g0}")
    Yg = eval_map_batch(g, X)[:, 0]
    # centered samples feed the feature pipeline; the constant is restored below
    samples = SampleSet(Z=X, W=(Yg - g0)[:, None], provenance="lsq-equivalence")
    est = estimate_pushforward(np.zeros(d), np.zeros(1), m, n, samples)
    grad = basis_gradient_at_zero(np.zeros(1), m, 1)
    pulled = est.C_hat.conj().T @ np.conj(grad)  # feature coefficients of the pipeline map
    table = graded_numbering(d, m)
    mono = pulled / np.sqrt(np.array(table.factorials, dtype=np.float64))
    mono[0] += g0
    direct = truncated_lsq(X, Yg, m, n)
    return mono, direct


def lsq_equivalence_check(g: MapExpr, X, m: int, n: int) -> float:
    """Max coefficient gap between the feature pipeline at p=0 and truncated LSQ."""
    mono, direct = pipeline_and_lsq_coefficients(g, X, m, n)
    return float(np.max(np.abs(mono - direct)))
