"""Quadrature grid on the unit sphere.

The grid is a tensor product of Gauss-Legendre nodes in cos(theta) and
equally spaced longitudes.  With nlat >= lmax+1 and nlon >= 2*lmax+1 the
quadrature integrates every spherical polynomial of degree <= 2*lmax
exactly, which makes the analysis projections of band-limited fields exact
as well.  The poles are never grid nodes, so the orthonormal frame
(e_theta, e_phi) is defined at every node; all vector and tensor
components in this package refer to that frame.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import harmonics

__all__ = ["SphereGrid", "build_grid"]


class SphereGrid:
    """Immutable spherical quadrature grid with spectral tables.

    Parameters
    ----------
    lmax : int
        Band limit of the basis attached to the grid.
    nlat, nlon : int, optional
        Number of latitude and longitude nodes.  Defaults are the minimal
        exact choices lmax+1 and 2*lmax+1.
    """

    def __init__(self, lmax: int, nlat: int | None = None, nlon: int | None = None):
        if lmax < 0:
            raise ValueError("lmax must be nonnegative")
        nlat = lmax + 1 if nlat is None else nlat
        nlon = 2 * lmax + 1 if nlon is None else nlon
        if nlat < lmax + 1:
            raise ValueError("nlat must be at least lmax + 1")
        if nlon < 2 * lmax + 1:
            raise ValueError("nlon must be at least 2*lmax + 1")
        self.lmax = int(lmax)
        self.nlat = int(nlat)
        self.nlon = int(nlon)

        mu, wgl = leggauss(self.nlat)
        theta_1d = np.arccos(mu)
        phi_1d = 2.0 * np.pi * np.arange(self.nlon) / self.nlon
        self.theta = np.repeat(theta_1d, self.nlon)
        self.phi = np.tile(phi_1d, self.nlat)
        self.weights = np.repeat(wgl * (2.0 * np.pi / self.nlon), self.nlon)

        st, ct = np.sin(self.theta), np.cos(self.theta)
        sp, cp = np.sin(self.phi), np.cos(self.phi)
        self.nodes = np.stack([st * cp, st * sp, ct], axis=1)
        self.e_theta = np.stack([ct * cp, ct * sp, -st], axis=1)
        self.e_phi = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
        self.sin_theta = st
        self.cos_theta = ct

        self.ls, self.ms = harmonics.mode_table(self.lmax)
        self.lam = (self.ls * (self.ls + 1)).astype(float)
        self.nmodes = harmonics.num_modes(self.lmax)
        self.nnodes = self.theta.size

        for arr in (self.theta, self.phi, self.weights, self.nodes,
                    self.e_theta, self.e_phi, self.sin_theta, self.cos_theta,
                    self.ls, self.ms, self.lam):
            arr.setflags(write=False)

    # ------------------------------------------------------------------
    # spectral tables (built lazily, all shaped (nmodes, nnodes))
    # ------------------------------------------------------------------

    @cached_property
    def _tables(self):
        Y, dY = harmonics.harmonic_tables(self.lmax, self.theta, self.phi)
        Y.setflags(write=False)
        dY.setflags(write=False)
        return Y, dY

    @property
    def Y(self) -> np.ndarray:
        """Basis values at the nodes."""
        return self._tables[0]

    @property
    def dYdtheta(self) -> np.ndarray:
        return self._tables[1]

    @cached_property
    def d2Ydtheta2(self) -> np.ndarray:
        # Second theta derivative from the associated Legendre equation:
        # P'' = -cot(theta) P' + (m^2/sin^2(theta) - l(l+1)) P.
        cot = self.cos_theta / self.sin_theta
        msq = (self.ms.astype(float) ** 2)[:, None]
        lam = self.lam[:, None]
        out = -cot[None, :] * self.dYdtheta + (msq / self.sin_theta[None, :] ** 2 - lam) * self.Y
        out.setflags(write=False)
        return out

    def dphi_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        """Coefficients of the longitude derivative of a field.

        cos(m phi) rows exchange with sin(m phi) rows under d/dphi, so the
        operation is a signed permutation in coefficient space.
        """
        out = np.zeros_like(coeffs)
        m = self.ms
        pos = m > 0
        neg = m < 0
        # index of the partner mode (l, -m)
        partner = (self.ls * self.ls + self.ls - self.ms)
        out[partner[pos]] = -m[pos] * coeffs[pos]
        out[partner[neg]] = -m[neg] * coeffs[neg]
        return out

    @cached_property
    def dYdphi(self) -> np.ndarray:
        out = np.zeros_like(self.Y)
        m = self.ms
        partner = (self.ls * self.ls + self.ls - self.ms)
        nz = m != 0
        out[nz] = -m[nz, None] * self.Y[partner[nz]]
        out.setflags(write=False)
        return out

    @cached_property
    def d2Ydthetadphi(self) -> np.ndarray:
        out = np.zeros_like(self.Y)
        m = self.ms
        partner = (self.ls * self.ls + self.ls - self.ms)
        nz = m != 0
        out[nz] = -m[nz, None] * self.dYdtheta[partner[nz]]
        out.setflags(write=False)
        return out

    @cached_property
    def grad_tables(self):
        """Frame components of grad Y_lm: (G1, G2) = (d/dtheta, (1/sin)d/dphi)."""
        G1 = self.dYdtheta
        G2 = self.dYdphi / self.sin_theta[None, :]
        G2.setflags(write=False)
        return G1, G2

    @cached_property
    def tfhess_tables(self):
        """Frame components (E1, E2) of the trace-free Hessian of Y_lm.

        E1 is the (theta,theta) component minus half the Laplacian, E2 the
        (theta,phi) frame component.  The (phi,phi) component is -E1.
        """
        st = self.sin_theta[None, :]
        cot = (self.cos_theta / self.sin_theta)[None, :]
        H11 = self.d2Ydtheta2
        H12 = (self.d2Ydthetadphi - cot * self.dYdphi) / st
        E1 = H11 + 0.5 * self.lam[:, None] * self.Y
        E2 = H12
        E1.setflags(write=False)
        E2.setflags(write=False)
        return E1, E2

    # ------------------------------------------------------------------
    # transforms
    # ------------------------------------------------------------------

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Project node values onto the basis by quadrature."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.nnodes,):
            raise ValueError("values must be a flat array over the grid nodes")
        return self.Y @ (self.weights * values)

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """Evaluate a coefficient vector at the grid nodes."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.nmodes,):
            raise ValueError("coefficient vector has the wrong length")
        return coeffs @ self.Y

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature integral of node values over the sphere."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.nnodes,):
            raise ValueError("values must be a flat array over the grid nodes")
        return float(np.dot(self.weights, values))

    def same_layout(self, other: "SphereGrid") -> bool:
        return (self.lmax == other.lmax and self.nlat == other.nlat
                and self.nlon == other.nlon)

    def __repr__(self):
        return f"SphereGrid(lmax={self.lmax}, nlat={self.nlat}, nlon={self.nlon})"


def build_grid(lmax: int, nlat: int | None = None, nlon: int | None = None) -> SphereGrid:
    """Construct a deterministic Gauss-Legendre by equispaced grid."""
    return SphereGrid(lmax, nlat=nlat, nlon=nlon)
