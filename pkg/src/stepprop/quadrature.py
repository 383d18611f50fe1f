"""Adaptive panel quadrature for complex-valued integrands.

Panels carry a 15-point Gauss-Legendre rule; a panel is accepted when the
parent value agrees with the sum of its two children, which doubles as the
error estimate.  The integrand is evaluated in batches (all nodes of all
pending panels at once) so that vectorized special-function evaluation is
amortized across the whole refinement front.
"""
from __future__ import annotations

import numpy as np

from .errors import QuadratureError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


def _panel_values(f, panels):
    """Evaluate f on the GL nodes of every (lo, hi) panel in one batch."""
    los = np.array([p[0] for p in panels])
    his = np.array([p[1] for p in panels])
    mids = 0.5 * (los + his)
    half = 0.5 * (his - los)
    xs = (mids[:, None] + half[:, None] * _NODES[None, :]).ravel()
    vals = np.asarray(f(xs), dtype=complex).reshape(len(panels), _NODES.size)
    return (half * (vals @ _WEIGHTS)).astype(complex)


def integrate_adaptive(f, a: float, b: float, abs_tol: float = 1e-9,
                       rel_tol: float = 1e-8, max_panels: int = 20_000):
    """Integrate complex-valued f over [a, b].

    f maps a real node array to complex values; any complex path is the
    caller's parametrization.  Returns (value, error_estimate, n_evals).
    """
    if b == a:
        return 0.0 + 0.0j, 0.0, 0
    parents = [(a, b)]
    parent_vals = _panel_values(f, parents)
    total = 0.0 + 0.0j
    err = 0.0
    n_evals = _NODES.size
    n_accepted = 0
    while parents:
        if n_accepted + len(parents) > max_panels:
            raise QuadratureError(
                f"panel budget {max_panels} exhausted (interval [{a}, {b}])")
        children = []
        for lo, hi in parents:
            mid = 0.5 * (lo + hi)
            children.append((lo, mid))
            children.append((mid, hi))
        child_vals = _panel_values(f, children)
        n_evals += 2 * len(parents) * _NODES.size
        next_parents = []
        next_vals = []
        scale = max(abs(total), float(np.sum(np.abs(child_vals))))
        for i, (lo, hi) in enumerate(parents):
            pair = child_vals[2 * i] + child_vals[2 * i + 1]
            delta = abs(parent_vals[i] - pair)
            tol = max(abs_tol, rel_tol * max(scale, abs(pair)))
            if delta <= tol or (hi - lo) < 1e-14 * (b - a):
                total += pair
                err += delta
                n_accepted += 1
            else:
                next_parents.append(children[2 * i])
                next_parents.append(children[2 * i + 1])
                next_vals.append(child_vals[2 * i])
                next_vals.append(child_vals[2 * i + 1])
        parents = next_parents
        parent_vals = np.array(next_vals, dtype=complex)
    return total, err, n_evals
