"""Moment matrices and their smallest eigenvalues at configurable precision.

Moments of product measures are assembled exactly (rational arithmetic on
request); smallest eigenvalues are certified by inertia-counting bisection in
software floats of a requested mantissa width, which keeps the count reliable
far below double-precision underflow of the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .errors import PrecisionError
from .multiindex import graded_numbering, jet_dimension


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    """A compactly supported measure: sample cloud, box, or ball."""

    kind: str  # "empirical" | "uniform_box" | "uniform_ball"
    points: Optional[np.ndarray] = None
    center: Optional[tuple[float, ...]] = None
    radii: Optional[tuple[float, ...]] = None
    radius: Optional[float] = None
    normalized: bool = True

    @classmethod
    def empirical(cls, points) -> "MeasureSpec":
        pts = np.array(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError(f"expected a nonempty (N, d) point array, got shape {pts.shape}")
        pts.flags.writeable = False
        return cls(kind="empirical", points=pts)

    @classmethod
    def uniform_box(cls, center, radii, normalized: bool = True) -> "MeasureSpec":
        c = tuple(float(x) for x in np.atleast_1d(center))
        r = tuple(float(x) for x in np.atleast_1d(radii))
        if len(c) != len(r):
            raise ValueError("center and radii have different lengths")
        if any(x <= 0 for x in r):
            raise ValueError("box radii must be positive")
        return cls(kind="uniform_box", center=c, radii=r, normalized=normalized)

    @classmethod
    def uniform_ball(cls, center, radius, normalized: bool = True) -> "MeasureSpec":
        c = tuple(float(x) for x in np.atleast_1d(center))
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        return cls(kind="uniform_ball", center=c, radius=float(radius), normalized=normalized)

    @property
    def d(self) -> int:
        if self.kind == "empirical":
            return self.points.shape[1]
        return len(self.center)


def _interval_moments(c: Fraction, r: Fraction, max_power: int, normalized: bool) -> list[Fraction]:
    """Exact moments of the weight-1 (or normalized) measure on [c-r, c+r]."""
    hi, lo = c + r, c - r
    mass = 2 * r if normalized else Fraction(1)
    return [
        ((hi ** (k + 1)) - (lo ** (k + 1))) / ((k + 1) * mass)
        for k in range(max_power + 1)
    ]


def moment_matrix(measure: MeasureSpec, n: int, exact: bool = False):
    """Matrix of moments x^(alpha_i + alpha_j) over the graded numbering of order n.

    Returns a float array, or nested Fraction lists when exact=True (boxes only).
    """
    table = graded_numbering(measure.d, n)
    size = len(table)
    if measure.kind == "empirical":
        if exact:
            raise ValueError("exact moments are only available for uniform_box measures")
        X = measure.points
        V = np.ones((X.shape[0], size))
        for i, alpha in enumerate(table.entries):
            col = np.ones(X.shape[0])
            for k, a in enumerate(alpha):
                if a:
                    col = col * X[:, k] ** a
            V[:, i] = col
        D = V.T @ V / X.shape[0]
        return (D + D.T) / 2
    if measure.kind == "uniform_box":
        per_axis = [
            _interval_moments(Fraction(c), Fraction(r), 2 * n, measure.normalized)
            for c, r in zip(measure.center, measure.radii)
        ]
        rows = []
        for alpha in table.entries:
            row = []
            for beta in table.entries:
                entry = Fraction(1)
                for k in range(measure.d):
                    entry *= per_axis[k][alpha[k] + beta[k]]
                row.append(entry)
            rows.append(row)
        if exact:
            return rows
        return np.array([[float(x) for x in row] for row in rows])
    raise ValueError(f"no closed-form moments for measure kind {measure.kind!r}")


def lebesgue_hankel(a: float, r: float, n: int) -> list[list[Fraction]]:
    """Exact (n+1)x(n+1) Hankel matrix of weight-1 moments on [a-r, a+r]."""
    if r <= 0:
        raise ValueError("interval radius must be positive")
    mom = _interval_moments(Fraction(a), Fraction(r), 2 * n, normalized=False)
    return [[mom[i + j] for j in range(n + 1)] for i in range(n + 1)]


@dataclass(frozen=True)
class HankelSpectrum:
    """Certified smallest eigenvalue of a moment matrix."""

    n: int
    Lambda: object  # mpmath.mpf
    precision_bits: int
    certified: bool


class _PivotBreakdown(Exception):
    pass


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (int, np.integer)):
        return mpmath.mpf(int(x))
    return mpmath.mpf(float(x))


def _count_eigs_below(rows: list[list], t) -> int:
    """Negative pivots of D - tI under symmetric elimination (Sylvester inertia)."""
    size = len(rows)
    a = [[rows[i][j] for j in range(i + 1)] for i in range(size)]
    for i in range(size):
        a[i][i] -= t
    neg = 0
    for k in range(size):
        piv = a[k][k]
        if piv == 0:
            raise _PivotBreakdown
        if piv < 0:
            neg += 1
        inv = 1 / piv
        col_k = {i: a[i][k] for i in range(k + 1, size)}
        for i in range(k + 1, size):
            f = col_k[i] * inv
            if f == 0:
                continue
            row_i = a[i]
            for j in range(k + 1, i + 1):
                row_i[j] -= f * col_k[j]
    return neg


def smallest_eigenvalue(
    D,
    precision_bits: int = 256,
    order: Optional[int] = None,
    upper_hint=None,
) -> HankelSpectrum:
    """Smallest eigenvalue of a real symmetric matrix by inertia bisection.

    The bisection runs in software floats with `precision_bits` mantissa bits
    and stops at relative bracket width 2**(-precision_bits // 4).
    """
    if precision_bits < 16:
        raise ValueError("precision_bits must be at least 16")
    if isinstance(D, np.ndarray):
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {D.shape}")
        if not np.allclose(D, D.T, rtol=0.0, atol=1e-13 * max(1.0, float(np.abs(D).max()))):
            raise ValueError("matrix is not symmetric")
        D = (D + D.T) / 2
        size = D.shape[0]
        raw_rows = [[D[i, j] for j in range(size)] for i in range(size)]
    else:
        raw_rows = [list(row) for row in D]
        size = len(raw_rows)
        if any(len(row) != size for row in raw_rows):
            raise ValueError("expected a square matrix")
        for i in range(size):
            for j in range(i):
                if raw_rows[i][j] != raw_rows[j][i]:
                    raise ValueError("matrix is not symmetric")
    with mpmath.workprec(precision_bits):
        rows = [[_to_mpf(x) for x in row] for row in raw_rows]
        diag = [rows[i][i] for i in range(size)]
        radius = [
            mpmath.fsum(abs(rows[i][j]) for j in range(size) if j != i) for i in range(size)
        ]
        scale = max(abs(d) + r for d, r in zip(diag, radius))
        if scale == 0:
            return HankelSpectrum(order if order is not None else size - 1,
                                  mpmath.mpf(0), precision_bits, True)
        eps = mpmath.mpf(2) ** (-(precision_bits // 2))
        lo = min(d - r for d, r in zip(diag, radius)) - scale * eps
        hi = min(diag) + scale * eps
        if upper_hint is not None:
            hi = min(hi, _to_mpf(upper_hint) + scale * eps)

        def count(t):
            shift = (hi - lo) / 997
            for _ in range(4):
                try:
                    return _count_eigs_below(rows, t)
                except _PivotBreakdown:
                    t = t + shift
            raise PrecisionError(
                f"symmetric factorization broke down at {precision_bits} bits; retry with more"
            )

        bumps = 0
        while count(hi) == 0:
            hi += scale * eps * 2 ** bumps
            bumps += 1
            if bumps > precision_bits:
                raise PrecisionError("could not bracket the smallest eigenvalue; retry with more bits")
        reltol = mpmath.mpf(2) ** (-(precision_bits // 4))
        max_iter = 8 * precision_bits
        iters = 0
        while hi - lo > reltol * max(abs(lo), abs(hi)):
            iters += 1
            if iters > max_iter:
                raise PrecisionError(
                    f"bisection did not reach relative width 2^-{precision_bits // 4}; retry with more bits"
                )
            mid = (lo + hi) / 2
            if count(mid) >= 1:
                hi = mid
            else:
                lo = mid
        lam = (lo + hi) / 2
    return HankelSpectrum(
        n=order if order is not None else size - 1,
        Lambda=lam,
        precision_bits=precision_bits,
        certified=True,
    )


def hankel_spectrum_sweep(a: float, r: float, n_max: int, precision_bits: int = 256) -> list[HankelSpectrum]:
    """Smallest eigenvalues of the interval Hankel matrices for n = 0..n_max.

    Nestedness gives interlacing, so each certified value brackets the next
    search from above.
    """
    out: list[HankelSpectrum] = []
    hint = None
    for n in range(n_max + 1):
        spec = smallest_eigenvalue(
            lebesgue_hankel(a, r, n), precision_bits, order=n, upper_hint=hint
        )
        out.append(spec)
        hint = spec.Lambda
    return out


def sigma(a: float, r: float) -> float:
    """Decay base of interval Hankel spectra; branch keyed on |a| + a^2 - r^2."""
    if r <= 0:
        raise ValueError("interval radius must be positive")
    t = abs(a) + a * a - r * r
    if t >= 0:
        q = (abs(a) + 1.0) / r
        return q + math.sqrt(q * q - 1.0)
    s = 1.0 / (r * r - a * a)
    return math.sqrt(s + 1.0) + math.sqrt(s)


def decay_rate_check(a: float, r: float, n_max: int, precision_bits: int = 256) -> list[tuple[int, float]]:
    """Observed decay rates -log(lambda_n)/(2n+2) for n = 0..n_max."""
    rates = []
    for spec in hankel_spectrum_sweep(a, r, n_max, precision_bits):
        with mpmath.workprec(precision_bits):
            rate = -mpmath.log(spec.Lambda) / (2 * spec.n + 2)
        rates.append((spec.n, float(rate)))
    return rates


def rectangle_lower_bound(p: Sequence[float], radii: Sequence[float], n: int,
                          precision_bits: int = 256) -> float:
    """Product of per-axis interval Hankel eigenvalues; a floor for the box spectrum."""
    p = list(np.atleast_1d(p))
    radii = list(np.atleast_1d(radii))
    if len(p) != len(radii):
        raise ValueError("center and radii have different lengths")
    with mpmath.workprec(precision_bits):
        prod = mpmath.mpf(1)
        for c, r in zip(p, radii):
            spec = smallest_eigenvalue(lebesgue_hankel(c, r, n), precision_bits, order=n)
            prod *= spec.Lambda
        return float(prod)


def sample_complexity(n: int, d: int, Lambda_n: float, L_mu: float, delta: float) -> int:
    """Sample count sufficient for the half-spectrum moment concentration event."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    lam = float(Lambda_n)
    if lam <= 0:
        raise ValueError(f"Lambda_n must be positive, got {Lambda_n}")
    if L_mu < 1:
        raise ValueError(f"L_mu must be at least 1, got {L_mu}")
    r_n = jet_dimension(d, n)
    value = (float(L_mu) ** (4 * n)) * (r_n ** 2) / (lam * lam) * 4.0 * math.log(2.0 / delta)
    return math.ceil(value)
