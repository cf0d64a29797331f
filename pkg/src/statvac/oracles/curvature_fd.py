"""Curvature by finite differences, plus two closed-form cross-checks.

fd_riemann differentiates Christoffel symbols of a MetricField with
4th-order central differences and assembles the curvature tensor in the
sign convention used throughout the package: the (0,4) tensor is

    R_abcd = (d_a Gamma^e_bc - d_b Gamma^e_ac
              + Gamma^e_af Gamma^f_bc - Gamma^e_bf Gamma^f_ac) g_ed,

whose trace over the outer slots gives a Ricci tensor that is positive
on round spheres.  Everything here is an oracle: no spectral machinery,
no reconstruction formulas, only stencils and the definitions.
"""

from __future__ import annotations

import numpy as np

from ..curvature import Riemann3
from .metricfield import MetricField, _D1_OFFSETS, _D1_WEIGHTS

__all__ = [
    "fd_riemann",
    "fd_ricci",
    "conformal_ricci",
    "linearized_ricci",
    "fd_linearized_ricci",
]

_STEP_RANGE = (1e-4, 1e-2)


def _check_step(step: float) -> None:
    if not (_STEP_RANGE[0] <= step <= _STEP_RANGE[1]):
        raise ValueError(f"finite-difference step {step} outside {_STEP_RANGE}")


def fd_riemann(metric: MetricField, point, step: float = 1e-3) -> Riemann3:
    """Riemann tensor of an ambient metric at one point, by differences.

    Christoffel symbols are themselves computed from finite differences
    of the metric callable, so the result never touches an analytic
    gradient that closed-form code might share.
    """
    _check_step(step)
    point = np.asarray(point, dtype=float).reshape(3)

    def gamma(pts):
        return metric.christoffel(pts, step=step, force_fd=True)

    base = np.atleast_2d(point)
    gam0 = gamma(base)[0]
    dgam = np.zeros((3, 3, 3, 3))  # [a, c, b, d] = d_a Gamma^c_bd
    for a in range(3):
        acc = np.zeros((3, 3, 3))
        for off, wgt in zip(_D1_OFFSETS, _D1_WEIGHTS):
            shifted = base.copy()
            shifted[0, a] += off * step
            acc += wgt * gamma(shifted)[0]
        dgam[a] = acc / step

    # R_ab c^e then lower the last slot with g.
    upper = (np.einsum("aebc->abce", dgam) - np.einsum("beac->abce", dgam)
             + np.einsum("eaf,fbc->abce", gam0, gam0)
             - np.einsum("ebf,fac->abce", gam0, gam0))
    g0 = metric(base)[0]
    dense = np.einsum("abce,ed->abcd", upper, g0)
    return Riemann3.from_dense(dense)


def fd_ricci(metric: MetricField, point, step: float = 1e-3) -> np.ndarray:
    """Coordinate Ricci components from the finite-difference Riemann tensor.

    The contraction uses the inverse metric at the point; the plain
    ``Riemann3.ricci`` helper assumes an orthonormal frame and would be
    wrong wherever g differs from the identity.
    """
    point = np.asarray(point, dtype=float).reshape(3)
    dense = fd_riemann(metric, point, step).dense
    ginv = np.linalg.inv(metric(point[None])[0])
    return np.einsum("dc,cabd->ab", ginv, dense)


def conformal_ricci(rho: float, grad: np.ndarray, hess: np.ndarray) -> np.ndarray:
    """Ricci tensor of g = rho * delta from the 2-jet of rho at a point.

    Closed form for three dimensions:

        Ric = (3/4) rho^-2 drho x drho - (1/2) rho^-1 Hess rho
              - (1/2) rho^-1 (Lap rho) delta + (1/4) rho^-2 |drho|^2 delta
    """
    grad = np.asarray(grad, dtype=float).reshape(3)
    hess = np.asarray(hess, dtype=float).reshape(3, 3)
    lap = np.trace(hess)
    grad_sq = float(grad @ grad)
    eye = np.eye(3)
    return (0.75 / rho**2 * np.outer(grad, grad)
            - 0.5 / rho * hess
            - 0.5 / rho * lap * eye
            + 0.25 / rho**2 * grad_sq * eye)


def linearized_ricci(d2h: np.ndarray) -> np.ndarray:
    """Linearization of Ricci at the flat metric from second derivatives.

    Parameters
    ----------
    d2h : ndarray, shape (3, 3, 3, 3)
        d2h[c, d, a, b] = d_c d_d h_ab for the symmetric perturbation h.

    Returns
    -------
    ndarray, shape (3, 3)
        (1/2)(h_a^c_,cb + h_b^c_,ca - (tr h)_,ab - Lap h_ab).
    """
    d2h = np.asarray(d2h, dtype=float)
    t1 = np.einsum("bcac->ab", d2h)
    t2 = np.einsum("acbc->ab", d2h)
    t3 = np.einsum("abcc->ab", d2h)
    t4 = np.einsum("ccab->ab", d2h)
    return 0.5 * (t1 + t2 - t3 - t4)


def fd_linearized_ricci(h_fun, point, t_step: float = 1e-4,
                        x_step: float = 1e-3) -> np.ndarray:
    """d/dt Ric(delta + t h) at t = 0 by central differences in t.

    h_fun maps (npts, 3) points to (npts, 3, 3) symmetric perturbations.
    Used to check linearized_ricci without sharing any formula with it.
    """
    point = np.asarray(point, dtype=float).reshape(3)

    def ric_at(t):
        def fun(pts):
            return np.broadcast_to(np.eye(3), (pts.shape[0], 3, 3)) + t * np.asarray(h_fun(pts))
        return fd_ricci(MetricField(fun), point, step=x_step)

    return (ric_at(t_step) - ric_at(-t_step)) / (2.0 * t_step)
