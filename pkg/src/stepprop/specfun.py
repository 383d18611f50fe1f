"""Complex special functions: log-gamma, gamma, and Gauss 2F1.

The hypergeometric function is needed for complex parameters a, b, c and a
real argument z in [0, 1),

    2F1(a, b; c; z) = sum_n (a)_n (b)_n / ((c)_n n!) z^n .

Evaluation strategy
-------------------
* z <= 1/2 : direct power series.
* z  > 1/2 : linear transformation z -> 1-z,

      2F1(a,b;c;z) = G(c)G(w)/(G(c-a)G(c-b)) 2F1(a,b;1-w;1-z)
                   + (1-z)^w G(c)G(-w)/(G(a)G(b)) 2F1(c-a,c-b;1+w;1-z),

  with w = c-a-b.  When w is within 1e-8 of an integer the two terms are
  individually singular; the w = 0 case is handled by the logarithmic
  limiting series (the c = a+b connection formula with digamma terms).

All entry points broadcast over numpy arrays.  Callers that know 1-z to
better precision than 1 - float(z) (the eigenstates do, since their argument
is a logistic function of position) should use :func:`hyp2f1_with_complement`.

The series keeps a running bound on the largest partial term; if alternating
cancellation would push the relative accuracy above ``CANCEL_TOL`` the
evaluation raises instead of returning a degraded value.
"""
from __future__ import annotations

import numpy as np
from scipy import special as _sp

from .errors import GammaPoleError, SeriesConvergenceError

#: termwise stopping tolerance of the power series
SERIES_TOL = 1e-14
#: iteration cap; exceeding it is an error, never a silent truncation
MAX_TERMS = 10_000
#: |c-a-b - nearest integer| below which the limiting (log) form is used
DEGENERATE_EPS = 1e-8
#: raise if estimated cancellation error exceeds this relative level
CANCEL_TOL = 1e-9


def _as_complex(*vals):
    return tuple(np.asarray(v, dtype=complex) for v in vals)


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z.

    Raises GammaPoleError at the poles (non-positive integers).
    """
    (z,) = _as_complex(z)
    on_axis = z.imag == 0.0
    at_pole = on_axis & (z.real <= 0.0) & (z.real == np.round(z.real))
    if np.any(at_pole):
        raise GammaPoleError("log_gamma pole at non-positive integer z")
    return _sp.loggamma(z)


def gamma(z):
    """Gamma(z) for complex z via exp(log_gamma)."""
    return np.exp(log_gamma(z))


def _series(a, b, c, z, track_cancellation=True):
    """Raw power series sum with termwise convergence + cancellation guard."""
    a, b, c, z = np.broadcast_arrays(*_as_complex(a, b, c, z))
    total = np.ones(a.shape, dtype=complex)
    term = np.ones(a.shape, dtype=complex)
    peak = np.ones(a.shape)
    small_runs = np.zeros(a.shape, dtype=int)
    done = np.zeros(a.shape, dtype=bool)
    n = 0
    while n < MAX_TERMS:
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total = total + np.where(done, 0.0, term)
        mag = np.abs(term)
        peak = np.maximum(peak, mag)
        small = mag <= SERIES_TOL * (np.abs(total) + 1e-300)
        small_runs = np.where(small, small_runs + 1, 0)
        done = done | (small_runs >= 2)
        if np.all(done):
            break
        n += 1
    else:
        raise SeriesConvergenceError(
            f"2F1 series did not converge within {MAX_TERMS} terms")
    if track_cancellation:
        est = np.finfo(float).eps * peak / (np.abs(total) + 1e-300)
        if np.any(est > CANCEL_TOL):
            raise SeriesConvergenceError(
                "2F1 series lost too many digits to cancellation "
                f"(estimated relative error {float(np.max(est)):.2e})")
    return total


def _gamma_ratio(num, den):
    """exp(sum log_gamma(num) - sum log_gamma(den)); 0 when a denominator
    argument sits at a pole (reciprocal-gamma convention)."""
    num = [np.asarray(v, dtype=complex) for v in num]
    den = [np.asarray(v, dtype=complex) for v in den]
    shape = np.broadcast_shapes(*(v.shape for v in num + den))
    acc = np.zeros(shape, dtype=complex)
    for v in num:
        acc = acc + _sp.loggamma(v)
    kill = np.zeros(shape, dtype=bool)
    for v in den:
        pole = (v.imag == 0.0) & (v.real <= 0.0) & (v.real == np.round(v.real))
        kill = kill | np.broadcast_to(pole, shape)
        acc = acc - np.where(pole, 0.0, _sp.loggamma(np.where(pole, 1.0, v)))
    out = np.exp(acc)
    return np.where(kill, 0.0, out)


def _transformed(a, b, c, zc):
    """z > 1/2 branch via the z -> 1-z connection formula, zc = 1-z."""
    w = c - a - b
    g1 = _gamma_ratio([c, w], [c - a, c - b])
    g2 = _gamma_ratio([c, -w], [a, b])
    f1 = _series(a, b, 1.0 - w, zc)
    f2 = _series(c - a, c - b, 1.0 + w, zc)
    return g1 * f1 + g2 * np.exp(w * np.log(zc)) * f2


def _log_form(a, b, zc):
    """Limiting c = a+b form: 2F1(a,b;a+b;1-zc) with logarithmic terms."""
    a, b, zc = np.broadcast_arrays(*_as_complex(a, b, zc))
    lzc = np.log(zc)
    coef = np.ones(a.shape, dtype=complex)
    bracket = 2.0 * _sp.digamma(np.ones(a.shape)) - _sp.digamma(a) - _sp.digamma(b)
    total = bracket - lzc
    psi_n1 = _sp.digamma(np.ones(a.shape))  # psi(n+1)
    psi_a = _sp.digamma(a)
    psi_b = _sp.digamma(b)
    for n in range(MAX_TERMS):
        coef = coef * (a + n) * (b + n) / ((n + 1.0) ** 2) * zc
        psi_n1 = psi_n1 + 1.0 / (n + 1.0)
        psi_a = psi_a + 1.0 / (a + n)
        psi_b = psi_b + 1.0 / (b + n)
        term = coef * (2.0 * psi_n1 - psi_a - psi_b - lzc)
        total = total + term
        if np.all(np.abs(term) <= SERIES_TOL * (np.abs(total) + 1e-300)):
            break
    else:
        raise SeriesConvergenceError("2F1 logarithmic series did not converge")
    return _gamma_ratio([a + b], [a, b]) * total


def hyp2f1_with_complement(a, b, c, z, zc):
    """2F1(a,b;c;z) with the complement zc = 1-z supplied exactly.

    z must be real with 0 <= z < 1 (elementwise); a, b, c may be complex
    arrays.  This is the precision-critical entry point used by the
    eigenstates, whose argument approaches 1 exponentially on the left of
    the step.
    """
    a, b, c, z, zc = np.broadcast_arrays(*_as_complex(a, b, c, z, zc))
    zr = z.real
    # z may round to 1.0 in floating point while the exact complement zc
    # stays positive; the transformed branch only consumes zc
    if np.any((zr < 0.0) | (zc.real <= 0.0) | (z.imag != 0.0)):
        raise ValueError("hyp2f1 argument must be real with 0 <= z < 1")
    pole_c = (c.imag == 0.0) & (c.real <= 0.0) & (c.real == np.round(c.real))
    if np.any(pole_c):
        raise GammaPoleError("2F1 parameter c at a non-positive integer")
    out = np.empty(a.shape, dtype=complex)
    lo = zr <= 0.5
    if np.any(lo):
        out[lo] = _series(a[lo], b[lo], c[lo], z[lo])
    hi = ~lo
    if np.any(hi):
        ah, bh, ch, zch = a[hi], b[hi], c[hi], zc[hi]
        w = ch - ah - bh
        wdist = np.abs(w - np.round(w.real))
        degen = (np.abs(w.imag) < DEGENERATE_EPS) & (wdist < DEGENERATE_EPS)
        res = np.empty(ah.shape, dtype=complex)
        reg = ~degen
        if np.any(reg):
            res[reg] = _transformed(ah[reg], bh[reg], ch[reg], zch[reg])
        if np.any(degen):
            m_int = np.round(w[degen].real)
            if np.any(m_int != 0):
                # nudge off the integer; only the m = 0 case arises from the
                # eigenstate parameter family (c-a-b = -ik/(alpha*hbar))
                shift = np.where(m_int == 0, 0.0, DEGENERATE_EPS)
                res[degen] = _transformed(ah[degen] - shift, bh[degen],
                                          ch[degen], zch[degen])
            else:
                res[degen] = _log_form(ah[degen], bh[degen], zch[degen])
        out[hi] = res
    if out.shape == ():
        return complex(out)
    return out


def hyp2f1(a, b, c, z):
    """Gauss hypergeometric function for complex parameters, real z in [0,1)."""
    z = np.asarray(z, dtype=complex)
    return hyp2f1_with_complement(a, b, c, z, 1.0 - z)


def _series_cols_rows(a_col, b_col, c_col, z_row):
    """Power series on a parameter-column x argument-row grid.

    The term factorizes, term_n(col, row) = P_n(col) z_row^n, so the sum is
    a single matrix product P @ Z with P built by the coefficient recurrence
    and Z by a row power recurrence.  Mathematically identical to the
    elementwise loop, but the heavy arithmetic is one BLAS call.
    """
    a = np.asarray(a_col, dtype=complex).reshape(-1)
    b = np.asarray(b_col, dtype=complex).reshape(-1)
    c = np.asarray(c_col, dtype=complex).reshape(-1)
    z = np.asarray(z_row, dtype=float).reshape(-1)
    z_max = float(np.max(z)) if z.size else 0.0
    coeffs = [np.ones(a.size, dtype=complex)]
    bound = 1.0
    peak = 1.0
    quiet = 0
    n = 0
    while n < MAX_TERMS:
        nxt = coeffs[-1] * (a + n) * (b + n) / ((c + n) * (n + 1.0))
        coeffs.append(nxt)
        n += 1
        bound = float(np.max(np.abs(nxt))) * z_max ** n
        peak = max(peak, bound)
        if bound <= 0.5 * SERIES_TOL:
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise SeriesConvergenceError(
            f"2F1 series did not converge within {MAX_TERMS} terms")
    P = np.stack(coeffs, axis=1)                     # (n_col, N+1)
    Z = np.empty((len(coeffs), z.size))              # (N+1, n_row)
    Z[0] = 1.0
    for j in range(1, len(coeffs)):
        Z[j] = Z[j - 1] * z
    out = P @ Z.astype(complex)
    scale = max(float(np.median(np.abs(out))), 1e-6)
    if np.finfo(float).eps * peak / scale > CANCEL_TOL:
        raise SeriesConvergenceError(
            "2F1 grid series lost too many digits to cancellation")
    return out


def hyp2f1_cols_rows(a_col, b_col, c_col, z_row, zc_row):
    """2F1 on a parameter-column x argument-row grid.

    Parameters have shape (n, 1) and the real argument shape (1, m); the
    gamma factors of the z -> 1-z connection formula are evaluated once per
    parameter row instead of per grid element.  Rows must be uniformly on
    one side of z = 1/2 (the eigenstate grids split their columns first).
    """
    a_col, b_col, c_col = _as_complex(a_col, b_col, c_col)
    z_row = np.asarray(z_row, dtype=float).reshape(1, -1)
    zc_row = np.asarray(zc_row, dtype=float).reshape(1, -1)
    if np.all(z_row <= 0.5):
        return _series_cols_rows(a_col, b_col, c_col, z_row)
    if np.any(z_row <= 0.5):
        raise ValueError("argument rows must not straddle z = 1/2")
    w = c_col - a_col - b_col
    wdist = np.abs(w - np.round(w.real))
    if np.any((np.abs(w.imag) < DEGENERATE_EPS) & (wdist < DEGENERATE_EPS)):
        # rare in grid evaluation; fall back to the general path
        A, B, C, Z, ZC = np.broadcast_arrays(
            a_col + 0 * z_row, b_col + 0 * z_row, c_col + 0 * z_row,
            z_row + 0 * a_col.real, zc_row + 0 * a_col.real)
        return hyp2f1_with_complement(A, B, C, Z, ZC)
    g1 = _gamma_ratio([c_col, w], [c_col - a_col, c_col - b_col])
    g2 = _gamma_ratio([c_col, -w], [a_col, b_col])
    f1 = _series_cols_rows(a_col, b_col, 1.0 - w, zc_row)
    f2 = _series_cols_rows(c_col - a_col, c_col - b_col, 1.0 + w, zc_row)
    return g1 * f1 + g2 * np.exp(w * np.log(zc_row + 0j)) * f2
