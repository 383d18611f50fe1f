"""Real-time and energy propagators via the spectral representation.

    G(x1,x0;T) = Theta(T) [ int_0^kc  w_c(k)  e^{-i k^2 T/(2 m hbar)} dk
                          + int_kc^oo w_pm(k) e^{-i k^2 T/(2 m hbar)} dk ],

with kc = sqrt(2 m V0) and the orthonormal-eigenstate kernels

    w_c  = varphi_c(x1)  varphi_c(x0)^*,
    w_pm = varphi_-(x1) varphi_-(x0)^* + varphi_+(x1) varphi_+(x0)^*,

written as analytic functions of k (conjugates replaced by their i -> -i
closed forms), so the above-threshold leg can be deformed into the lower
half-plane where the kernel decays like a Gaussian.

Substitutions remove the square-root branch points at threshold:
below, k = kc sin(u); above, p = t e^{-i theta} with k = sqrt(kc^2 + p^2).

The energy propagator shares the kernels,

    K(x1,x0;E) = i hbar int_0^oo w(k) / (E - k^2/2m) dk,

with the retarded pole passed below via a semicircle detour, the free-kernel
part resummed in closed form and the remaining (scattering) tail integrated
under a smooth window.

T <= 0 returns an exactly zero amplitude (retarded convention).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigenstates import (ncc_analytic, norm_combos, npm_analytic,
                          npp_analytic, phi, phi_grid)
from .errors import ValidationError
from .potential import StepModel
from .quadrature import integrate_adaptive

__all__ = ["QuadratureConfig", "PropagatorSample", "propagate",
           "energy_propagator", "free_propagator", "evolve_packet_spectral"]


@dataclass(frozen=True)
class QuadratureConfig:
    """Contour and tolerance settings for the spectral integrals."""

    theta: float = 0.1
    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    k_max_factor: float = 40.0

    def __post_init__(self):
        if not (0.0 < self.theta < math.pi / 4):
            raise ValidationError("deformation angle must lie in (0, pi/4)")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValidationError("tolerances must be positive")
        if self.k_max_factor <= 1:
            raise ValidationError("k_max_factor must exceed 1")


@dataclass(frozen=True)
class PropagatorSample:
    x0: float
    x1: float
    T: float
    G: complex
    est_error: float
    n_evals: int


def spectral_weight_below(model, k, mu, x0, x1):
    """Below-threshold kernel w_c, analytic in (k, mu)."""
    num = (phi(model, "c", k, mu, x1)
           * phi(model, "c", k, mu, x0, conj=True))
    return num / (model.hbar * ncc_analytic(model, k, mu))


def spectral_weight_above(model, k, p, x0, x1):
    """Above-threshold kernel w_pm, analytic in (k, p).

    The +- orthonormal combinations are expanded so that only analytic
    closed forms appear (no absolute values):

        w_pm = (A N^{++} - Nbar^{+-} P - N^{+-} Q) / ((N^{++})^2 - N^{+-}Nbar^{+-})

    with A, P, Q the eigenstate products and the denominator factorized into
    the stable combinations N^{++} +/- |N^{+-}|.
    """
    pp1 = phi(model, "plus", k, p, x1)
    pp0b = phi(model, "plus", k, p, x0, conj=True)
    pm1 = phi(model, "minus", k, p, x1)
    pm0b = phi(model, "minus", k, p, x0, conj=True)
    a_term = pp1 * pp0b + pm1 * pm0b
    b_term = (npm_analytic(model, k, p, conj=True) * pp1 * pm0b
              + npm_analytic(model, k, p) * pm1 * pp0b)
    combo_p, combo_m = norm_combos(model, k, p)
    return ((a_term * npp_analytic(model, k, p) - b_term)
            / (model.hbar * combo_p * combo_m))


def free_propagator(model: StepModel, x0: float, x1: float, T: float) -> complex:
    """Closed-form free propagator sqrt(m/(2 pi i hbar T)) e^{i m dx^2/(2 hbar T)}."""
    if T <= 0:
        return 0.0 + 0.0j
    m, h = model.m, model.hbar
    return complex(np.sqrt(m / (2j * math.pi * h * T))
                   * np.exp(1j * m * (x1 - x0) ** 2 / (2 * h * T)))


def _below_leg(model, x0, x1, kern, cfg):
    """Integral over k in [0, kc] via k = kc sin(u)."""
    kc = model.k_threshold
    if kc == 0.0:
        return 0.0 + 0.0j, 0.0, 0

    def f(us):
        k = kc * np.sin(us)
        mu = kc * np.cos(us)
        w = spectral_weight_below(model, k + 0j, mu + 0j, x0, x1)
        return w * kern(k * k + 0j) * kc * np.cos(us)

    return integrate_adaptive(f, 0.0, math.pi / 2, cfg.abs_tol, cfg.rel_tol)


def _above_leg_deformed(model, x0, x1, T, cfg):
    """Deformed above-threshold leg for the real-time propagator."""
    kc = model.k_threshold
    m, h = model.m, model.hbar
    rot = np.exp(-1j * cfg.theta)

    def f(ts):
        p = rot * ts
        k = np.sqrt(kc * kc + p * p)
        w = spectral_weight_above(model, k, p, x0, x1)
        return w * np.exp(-1j * k * k * T / (2 * m * h)) * (p / k) * rot

    # Gaussian damping scale of the rotated phase plus the stationary point
    damp = math.sqrt(2.0 * m * h / (T * math.sin(2.0 * cfg.theta)))
    k_star = m * (abs(x0) + abs(x1)) / T
    block = max(1.5 * damp, 1.0)
    t_cap = cfg.k_max_factor * max(kc, k_star, damp, 1.0)
    total = 0.0 + 0.0j
    err = 0.0
    n_evals = 0
    lo = 0.0
    quiet = 0
    while lo < t_cap:
        val, e, ne = integrate_adaptive(f, lo, lo + block,
                                        cfg.abs_tol, cfg.rel_tol)
        total += val
        err += e
        n_evals += ne
        lo += block
        if abs(val) < max(1e-13, cfg.abs_tol * 1e-2):
            quiet += 1
            if quiet >= 2 and lo > k_star + 4 * damp:
                return total, err + abs(val), n_evals
        else:
            quiet = 0
    return total, err + 10 * cfg.abs_tol, n_evals


def propagate(model: StepModel, x0: float, x1: float, T: float,
              cfg: QuadratureConfig | None = None) -> PropagatorSample:
    """Real-time propagator G(x1, x0; T) with quadrature diagnostics."""
    cfg = cfg or QuadratureConfig()
    if T <= 0:
        return PropagatorSample(x0, x1, T, 0.0 + 0.0j, 0.0, 0)
    m, h = model.m, model.hbar
    kern = lambda k2: np.exp(-1j * k2 * T / (2.0 * m * h))
    g_below, e_below, n_below = _below_leg(model, x0, x1, kern, cfg)
    g_above, e_above, n_above = _above_leg_deformed(model, x0, x1, T, cfg)
    return PropagatorSample(x0, x1, T, complex(g_below + g_above),
                            float(e_below + e_above), n_below + n_above)


# ---------------------------------------------------------------------------
# energy propagator
# ---------------------------------------------------------------------------

def _free_weight(model, k, x0, x1):
    """Free spectral kernel cos(k (x1-x0)/hbar)/(pi hbar), analytic in k."""
    h = model.hbar
    return np.cos(k * (x1 - x0) / h) / (math.pi * h)


def _free_energy_propagator(model, x0, x1, E):
    """Closed form of i hbar int w_free/(E - k^2/2m) dk (retarded branch)."""
    m, h = model.m, model.hbar
    kappa = np.sqrt(complex(2.0 * m * E))
    if kappa.imag < 0:
        kappa = -kappa
    if kappa == 0:
        raise ValidationError("energy propagator undefined at E = 0")
    return complex(m / kappa * np.exp(1j * kappa * abs(x1 - x0) / h))


def energy_propagator(model: StepModel, x0: float, x1: float, E: float,
                      cfg: QuadratureConfig | None = None):
    """Energy propagator K(x1, x0; E), retarded prescription.

    Returns (K, est_error).  The free part is resummed in closed form; the
    remaining kernel difference decays with k and is integrated along a real
    contour with a semicircular detour below the pole at k = sqrt(2 m E),
    finished by a smooth cosine-window tail.
    """
    cfg = cfg or QuadratureConfig()
    m, h = model.m, model.hbar
    kc = model.k_threshold

    def dw(karr):
        karr = np.asarray(karr, dtype=complex)
        out = np.empty(karr.shape, dtype=complex)
        below = karr.real < kc
        if np.any(below):
            kb = karr[below]
            mu = np.sqrt(kc * kc - kb * kb)
            out[below] = spectral_weight_below(model, kb, mu, x0, x1)
        if np.any(~below):
            ka = karr[~below]
            p = np.sqrt(ka * ka - kc * kc)
            out[~below] = spectral_weight_above(model, ka, p, x0, x1)
        return out - _free_weight(model, karr, x0, x1)

    def den(karr):
        return 1.0 / (E - karr * karr / (2.0 * m))

    k_pole = math.sqrt(2.0 * m * E) if E > 0 else None
    k_split = max(3.0 * kc, 4.0, (k_pole or 0.0) + 1.0)
    # contour on the real axis with a semicircular detour below the pole;
    # each side of the threshold keeps its own analytic kernel, so the arc
    # must not straddle k = kc
    segments = []
    if k_pole is not None and 1e-9 < k_pole < k_split:
        r = min(0.4 * k_pole, 0.4 * (k_split - k_pole), 0.5)
        if kc > 0.0 and abs(k_pole - kc) < r:
            r = 0.8 * abs(k_pole - kc)
        if r < 1e-4:
            raise ValidationError(
                "energy too close to the threshold V0 for the pole detour")
        segments.append(("line", 1e-12, k_pole - r))
        segments.append(("arc", k_pole, r))
        segments.append(("line", k_pole + r, k_split))
    else:
        segments.append(("line", 1e-12, k_split))

    total = 0.0 + 0.0j
    err = 0.0
    n_evals = 0
    for seg in segments:
        if seg[0] == "line":
            _, a, b = seg
            if b <= a:
                continue
            f = lambda ks: dw(ks + 0j) * den(ks + 0j)
            val, e, ne = integrate_adaptive(f, a, b, cfg.abs_tol, cfg.rel_tol)
        else:
            _, center, r = seg

            def f(ss):
                kpath = center + r * np.exp(1j * (math.pi + math.pi * ss))
                dk = 1j * math.pi * r * np.exp(1j * (math.pi + math.pi * ss))
                return dw(kpath) * den(kpath) * dk

            val, e, ne = integrate_adaptive(f, 0.0, 1.0, cfg.abs_tol, cfg.rel_tol)
        total += val
        err += e
        n_evals += ne

    # smooth windowed tail: frequencies >= min spacing of |x1 +- x0| / hbar
    freq = max(min(abs(x1 - x0), abs(x1 + x0)) / h, 0.05)
    width = min(max(60.0 / freq, 40.0), 4000.0)

    def f_tail(ks):
        s = (ks - k_split) / width
        window = np.where(s < 1.0, np.cos(0.5 * math.pi * np.clip(s, 0, 1)) ** 4, 0.0)
        return dw(ks + 0j) * den(ks + 0j) * window

    val, e, ne = integrate_adaptive(f_tail, k_split, k_split + width,
                                    max(cfg.abs_tol, 1e-10), cfg.rel_tol)
    total += val
    err += e + abs(val) * 1e-3
    n_evals += ne

    kfree = _free_energy_propagator(model, x0, x1, E)
    return complex(kfree + 1j * h * total), float(abs(1j * h) * err)


# ---------------------------------------------------------------------------
# packet evolution through the spectral representation
# ---------------------------------------------------------------------------

def _simpson_weights(n, dx):
    if n % 2 == 0:
        raise ValidationError("Simpson grid needs an odd number of nodes")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (dx / 3.0)


def evolve_packet_spectral(model: StepModel, x_grid, psi0, x_out, T: float,
                           k_max: float = 6.0, n_below: int = 513,
                           n_above: int = 2049):
    """Convolve psi0 with the propagator, psi_T(x1) = int G(x1,x0;T) psi0(x0) dx0.

    The x0 and k integrals of the spectral representation are exchanged, so
    the packet is expanded once in the orthonormal basis (overlaps on the
    x_grid via Simpson weights) and resummed at the output points.  x_grid
    must be uniform and resolve the packet; k_max bounds the packet's
    momentum support.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    x_out = np.asarray(x_out, dtype=float)
    dx = x_grid[1] - x_grid[0]
    wx = _simpson_weights(x_grid.size, dx)
    m, h = model.m, model.hbar
    kc = model.k_threshold
    psi_T = np.zeros(x_out.size, dtype=complex)

    def accumulate(branches, ks, qs, wk):
        nonlocal psi_T
        phase = np.exp(-1j * ks * ks * T / (2 * m * h))
        for branch in branches:
            bar = phi_grid(model, branch, ks, qs, x_grid, conj=True)
            coef = bar @ (wx * psi0)
            outm = phi_grid(model, branch, ks, qs, x_out)
            psi_T = psi_T + ((wk * phase * coef)[None, :] @ outm).ravel()

    chunk = 256

    if kc > 0.0:
        us = np.linspace(0.0, math.pi / 2, n_below)
        wu = _simpson_weights(n_below, us[1] - us[0])
        # drop the k = 0 endpoint node: its weight vanishes quadratically
        # and the eigenstate normalization is singular there
        us, wu = us[1:], wu[1:]
        ks_all = kc * np.sin(us)
        mus_all = kc * np.cos(us)
        ncc = np.real(ncc_analytic(model, ks_all + 0j, mus_all + 0j))
        wk_all = wu * kc * np.cos(us) / (h * ncc)
        phase_all = np.exp(-1j * ks_all ** 2 * T / (2 * m * h))
        for lo in range(0, ks_all.size, chunk):
            sl = slice(lo, min(lo + chunk, ks_all.size))
            ks, mus = ks_all[sl], mus_all[sl]
            bar = phi_grid(model, "c", ks, mus, x_grid, conj=True)
            coef = bar @ (wx * psi0)
            outm = phi_grid(model, "c", ks, mus, x_out)
            psi_T += ((wk_all[sl] * phase_all[sl] * coef)[None, :] @ outm).ravel()

    qs_all = np.linspace(0.0, math.sqrt(max(k_max * k_max - kc * kc, 1.0)),
                         n_above)
    wq_all = _simpson_weights(n_above, qs_all[1] - qs_all[0])
    if kc == 0.0:
        # free case: drop the k = 0 node (plane-wave label k > 0)
        qs_all, wq_all = qs_all[1:], wq_all[1:]
    ks_all = np.sqrt(kc * kc + qs_all ** 2)
    phase_all = np.exp(-1j * ks_all ** 2 * T / (2 * m * h))
    jac_all = np.where(ks_all > 0, qs_all / ks_all, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        npp = npp_analytic(model, ks_all + 0j, qs_all + 0j)
        npm = npm_analytic(model, ks_all + 0j, qs_all + 0j)
        npm_b = npm_analytic(model, ks_all + 0j, qs_all + 0j, conj=True)
        combo_p, combo_m = norm_combos(model, ks_all + 0j, qs_all + 0j)
        denom = h * combo_p * combo_m
        w_pp_all = npp / denom
        w_pm_all = npm / denom
        w_pm_b_all = npm_b / denom
    for arr in (w_pp_all, w_pm_all, w_pm_b_all):
        arr[~np.isfinite(arr)] = 0.0
    row_all = wq_all * phase_all * jac_all
    for lo in range(0, n_above, chunk):
        sl = slice(lo, min(lo + chunk, n_above))
        ks, qs = ks_all[sl], qs_all[sl]
        pp_bar = phi_grid(model, "plus", ks, qs, x_grid, conj=True)
        pm_bar = phi_grid(model, "minus", ks, qs, x_grid, conj=True)
        pp_out = phi_grid(model, "plus", ks, qs, x_out)
        pm_out = phi_grid(model, "minus", ks, qs, x_out)
        cp_bar = pp_bar @ (wx * psi0)
        cm_bar = pm_bar @ (wx * psi0)
        row = row_all[sl]
        psi_T += ((row * w_pp_all[sl] * cp_bar)[None, :] @ pp_out).ravel()
        psi_T += ((row * w_pp_all[sl] * cm_bar)[None, :] @ pm_out).ravel()
        psi_T -= ((row * w_pm_b_all[sl] * cm_bar)[None, :] @ pp_out).ravel()
        psi_T -= ((row * w_pm_all[sl] * cp_bar)[None, :] @ pm_out).ravel()
    return psi_T
