"""Real orthonormal spherical harmonics.

The basis is indexed by (l, m) with l = 0..lmax and m = -l..l, flattened as
k = l*l + l + m.  For m > 0 the basis function is sqrt(2)*N_l^m(theta)*cos(m*phi),
for m < 0 it is sqrt(2)*N_l^|m|(theta)*sin(|m|*phi), and for m = 0 it is
N_l^0(theta), where N_l^m is the associated Legendre function carrying the
full orthonormalization factor sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!) and no
Condon-Shortley phase.  All tables are computed with stable three-term
recurrences, so no factorials appear explicitly.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "mode_table",
    "index_of",
    "num_modes",
    "harmonic_tables",
    "angles_from_directions",
]


def num_modes(lmax: int) -> int:
    """Number of basis functions through band limit lmax."""
    return (lmax + 1) * (lmax + 1)


def index_of(l: int, m: int) -> int:
    """Flat index of the (l, m) basis function."""
    return l * l + l + m


def mode_table(lmax: int):
    """Arrays (ls, ms) giving the degree and order of each flat index."""
    ls = np.empty(num_modes(lmax), dtype=int)
    ms = np.empty(num_modes(lmax), dtype=int)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            ls[index_of(l, m)] = l
            ms[index_of(l, m)] = m
    return ls, ms


def _normalized_legendre(lmax: int, theta: np.ndarray):
    """Orthonormalized associated Legendre tables N and dN/dtheta.

    Parameters
    ----------
    lmax : int
        Band limit.
    theta : ndarray, shape (npts,)
        Colatitudes, strictly inside (0, pi) for the derivative table.

    Returns
    -------
    N, dN : ndarray, shape (lmax+1, lmax+1, npts)
        N[l, m] and its theta derivative, for 0 <= m <= l.  Unused entries
        (m > l) are zero.
    """
    theta = np.asarray(theta, dtype=float)
    ct = np.cos(theta)
    st = np.sin(theta)
    npts = theta.size
    N = np.zeros((lmax + 1, lmax + 1, npts))
    N[0, 0] = np.sqrt(1.0 / (4.0 * np.pi))
    for m in range(1, lmax + 1):
        N[m, m] = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * N[m - 1, m - 1]
    for m in range(0, lmax):
        N[m + 1, m] = np.sqrt(2.0 * m + 3.0) * ct * N[m, m]
    for m in range(0, lmax + 1):
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            N[l, m] = a * (ct * N[l - 1, m] - b * N[l - 2, m])

    # dN_l^m/dtheta = (l*cos(theta)*N_l^m - c_lm*N_{l-1}^m) / sin(theta),
    # c_lm = sqrt((2l+1)/(2l-1) * (l^2 - m^2)); c vanishes at l = m.
    dN = np.zeros_like(N)
    safe_st = np.where(np.abs(st) < 1e-300, 1.0, st)
    for m in range(0, lmax + 1):
        for l in range(m, lmax + 1):
            if l == 0:
                continue
            c = np.sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (l * l - m * m))
            prev = N[l - 1, m] if l - 1 >= m else 0.0
            dN[l, m] = (l * ct * N[l, m] - c * prev) / safe_st
    return N, dN


def harmonic_tables(lmax: int, theta: np.ndarray, phi: np.ndarray):
    """Value and theta-derivative tables of the real basis at given angles.

    Parameters
    ----------
    lmax : int
        Band limit.
    theta, phi : ndarray, shape (npts,)
        Paired colatitudes and longitudes.

    Returns
    -------
    Y, dYdtheta : ndarray, shape ((lmax+1)**2, npts)
        Rows follow the flat (l, m) layout of :func:`index_of`.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if theta.shape != phi.shape:
        raise ValueError("theta and phi must have matching shapes")
    N, dN = _normalized_legendre(lmax, theta)
    nmode = num_modes(lmax)
    Y = np.zeros((nmode, theta.size))
    dY = np.zeros_like(Y)
    sqrt2 = np.sqrt(2.0)
    cosm = [np.cos(m * phi) for m in range(lmax + 1)]
    sinm = [np.sin(m * phi) for m in range(lmax + 1)]
    for l in range(lmax + 1):
        Y[index_of(l, 0)] = N[l, 0]
        dY[index_of(l, 0)] = dN[l, 0]
        for m in range(1, l + 1):
            Y[index_of(l, m)] = sqrt2 * N[l, m] * cosm[m]
            Y[index_of(l, -m)] = sqrt2 * N[l, m] * sinm[m]
            dY[index_of(l, m)] = sqrt2 * dN[l, m] * cosm[m]
            dY[index_of(l, -m)] = sqrt2 * dN[l, m] * sinm[m]
    return Y, dY


def angles_from_directions(points: np.ndarray):
    """Colatitude/longitude of unit-sphere directions.

    Accepts an (npts, 3) array of nonzero vectors; they are normalized
    internally, so off-sphere points give the angles of their ray.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(points, axis=1)
    if np.any(r == 0.0):
        raise ValueError("cannot take the direction of a zero vector")
    unit = points / r[:, None]
    ct = np.clip(unit[:, 2], -1.0, 1.0)
    theta = np.arccos(ct)
    phi = np.arctan2(unit[:, 1], unit[:, 0])
    return theta, phi
