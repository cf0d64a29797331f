"""Analytic ambient metrics with finite-difference jets.

A MetricField wraps a vectorized callable x -> g(x) on R^3.  Derivatives
are taken by 4th-order central differences of the callable; constructors
for polynomial and conformally flat metrics also carry exact first
derivatives, which the geodesic integrator may use, but every curvature
oracle differentiates the callable directly so that it stays independent
of the closed forms it is checking.
"""

from __future__ import annotations

import itertools

import numpy as np

__all__ = [
    "MetricField",
    "fd_gradient",
    "random_polynomial_metric",
]

# 4th-order central difference weights at offsets (-2, -1, 1, 2) * h
_D1_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_D1_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def fd_gradient(fun, points: np.ndarray, step: float) -> np.ndarray:
    """4th-order partial derivatives of a pointwise array-valued callable.

    Parameters
    ----------
    fun : callable
        Maps (npts, 3) points to (npts, ...) values.
    points : ndarray, shape (npts, 3)
    step : float

    Returns
    -------
    ndarray, shape (npts, 3, ...)
        Derivative along each coordinate axis.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    base = np.asarray(fun(points))
    out = np.zeros((points.shape[0], 3) + base.shape[1:])
    for c in range(3):
        acc = np.zeros_like(base)
        for off, wgt in zip(_D1_OFFSETS, _D1_WEIGHTS):
            shifted = points.copy()
            shifted[:, c] += off * step
            acc = acc + wgt * np.asarray(fun(shifted))
        out[:, c] = acc / step
    return out


class MetricField:
    """Vectorized ambient metric x -> g(x) with optional exact gradient."""

    def __init__(self, fun, grad=None, label: str = "metric"):
        self._fun = fun
        self._grad = grad
        self.label = label

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        g = np.asarray(self._fun(points), dtype=float)
        if g.shape != (points.shape[0], 3, 3):
            raise ValueError("metric callable must return (npts, 3, 3)")
        return g

    def gradient(self, points: np.ndarray, step: float = 1e-3) -> np.ndarray:
        """dg[n, c, a, b] = d g_ab / d x^c, exact if available, else FD."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self._grad is not None:
            return np.asarray(self._grad(points), dtype=float)
        return fd_gradient(self.__call__, points, step)

    def fd_gradient(self, points: np.ndarray, step: float = 1e-3) -> np.ndarray:
        """Finite-difference gradient regardless of any analytic one."""
        return fd_gradient(self.__call__, points, step)

    def christoffel(self, points: np.ndarray, step: float = 1e-3,
                    force_fd: bool = False) -> np.ndarray:
        """Christoffel symbols Gamma^c_ab at the given points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        g = self(points)
        dg = self.fd_gradient(points, step) if force_fd else self.gradient(points, step)
        ginv = np.linalg.inv(g)
        # Gamma^c_ab = (1/2) g^{cd} (dg[a, d, b] + dg[b, d, a] - dg[d, a, b])
        bracket = (np.einsum("nadb->nabd", dg) + np.einsum("nbda->nabd", dg)
                   - np.einsum("ndab->nabd", dg))
        return 0.5 * np.einsum("ncd,nabd->ncab", ginv, bracket)

    # -- constructors ----------------------------------------------------

    @classmethod
    def euclidean(cls) -> "MetricField":
        def fun(pts):
            return np.broadcast_to(np.eye(3), (pts.shape[0], 3, 3)).copy()

        def grad(pts):
            return np.zeros((pts.shape[0], 3, 3, 3))

        return cls(fun, grad, label="euclidean")

    @classmethod
    def conformal(cls, rho, drho=None, label: str = "conformal") -> "MetricField":
        """g = rho(x) * delta for a positive scalar callable rho."""

        def fun(pts):
            vals = np.asarray(rho(pts), dtype=float)
            return vals[:, None, None] * np.eye(3)

        grad = None
        if drho is not None:
            def grad(pts):
                dv = np.asarray(drho(pts), dtype=float)
                return dv[:, :, None, None] * np.eye(3)

        return cls(fun, grad, label=label)

    @classmethod
    def space_form(cls, k: float) -> "MetricField":
        """Constant sectional curvature k in its conformally flat chart."""

        def rho(pts):
            r2 = np.sum(pts * pts, axis=1)
            return (1.0 + 0.25 * k * r2) ** (-2.0)

        def drho(pts):
            r2 = np.sum(pts * pts, axis=1)
            base = (1.0 + 0.25 * k * r2) ** (-3.0)
            return -k * base[:, None] * pts

        return cls.conformal(rho, drho, label=f"space_form(k={k})")

    @classmethod
    def polynomial(cls, lin=None, quad=None, cubic=None,
                   label: str = "polynomial") -> "MetricField":
        """g_ab = delta_ab + lin[a,b,i] x_i + quad[a,b,i,j] x_i x_j + cubic[...].

        Coefficient arrays are symmetrized in (a, b) and in the monomial
        indices.  The exact gradient is attached.
        """
        lin = np.zeros((3, 3, 3)) if lin is None else np.asarray(lin, dtype=float)
        quad = np.zeros((3, 3, 3, 3)) if quad is None else np.asarray(quad, dtype=float)
        cubic = np.zeros((3, 3, 3, 3, 3)) if cubic is None else np.asarray(cubic, dtype=float)
        lin = 0.5 * (lin + lin.transpose(1, 0, 2))
        quad = 0.5 * (quad + quad.transpose(1, 0, 2, 3))
        quad = 0.5 * (quad + quad.transpose(0, 1, 3, 2))
        cubic = 0.5 * (cubic + cubic.transpose(1, 0, 2, 3, 4))
        # full symmetrization over the three monomial slots; the gradient
        # formula below is the derivative only of a symmetric array
        cubic = sum(cubic.transpose(0, 1, *p)
                    for p in itertools.permutations((2, 3, 4))) / 6.0

        def fun(pts):
            g = np.broadcast_to(np.eye(3), (pts.shape[0], 3, 3)).copy()
            g = g + np.einsum("abi,ni->nab", lin, pts)
            g = g + np.einsum("abij,ni,nj->nab", quad, pts, pts)
            g = g + np.einsum("abijk,ni,nj,nk->nab", cubic, pts, pts, pts)
            return g

        def grad(pts):
            dg = np.einsum("abc->cab", lin)[None, :, :, :] * np.ones((pts.shape[0], 1, 1, 1))
            dg = dg + 2.0 * np.einsum("abcj,nj->ncab", quad, pts)
            dg = dg + 3.0 * np.einsum("abcjk,nj,nk->ncab", cubic, pts, pts)
            return dg

        return cls(fun, grad, label=label)


def random_polynomial_metric(rng: np.random.Generator, amplitude: float = 0.5,
                             degree: int = 3) -> MetricField:
    """Random polynomial metric equal to delta at the origin.

    The linear part is omitted so that the Cartesian frame at the origin
    is orthonormal with vanishing first metric derivatives; amplitudes
    are kept small enough for positivity on the unit ball.
    """
    quad = rng.uniform(-amplitude, amplitude, size=(3, 3, 3, 3))
    cubic = rng.uniform(-amplitude, amplitude, size=(3, 3, 3, 3, 3)) if degree >= 3 else None
    return MetricField.polynomial(quad=quad, cubic=cubic, label="random_polynomial")
