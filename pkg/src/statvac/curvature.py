"""Pointwise curvature algebra in three dimensions.

Conventions: the Riemann tensor is fixed by the commutator rule
X^d_{|ba} - X^d_{|ab} = X^c R_{abc}{}^d and Ricci by R_ab = R_{cab}{}^c,
which is positive on round spheres.  In 3D the Riemann tensor is a
pointwise algebraic function of Ricci,

  R_abcd = R_ad g_bc + R_bc g_ad - R_ac g_bd - R_bd g_ac
           + (R/2)(g_ac g_bd - g_ad g_bc),

and the quadratic invariants collapse to |Riem|^2 = 4|Ric|^2 - R^2 and
R_abcd R^adcb = 2|Ric|^2 - R^2/2.  A curvature jet (Ricci with two
derivative orders at a point) generates the fourth-order Taylor data of
geodesic spheres: the scaled induced metric and mean curvature offsets
from (round, -2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BartnikPerturbation
from .spherical.fields import ScalarField, SymTensorField
from .spherical.grid import SphereGrid

__all__ = [
    "TRI6",
    "sym3_to_vec",
    "vec_to_sym3",
    "SymMat3",
    "Riemann3",
    "riemann_from_ricci",
    "quadratic_invariants",
    "CurvatureJet",
    "random_jet",
    "jet_from_arrays",
    "small_sphere_data",
    "ExpansionReport",
    "reference_expansions",
]

# upper-triangle component order used by every 6-vector in this package
TRI6 = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))

_EPS3 = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS3[_i, _j, _k] = 1.0
    _EPS3[_i, _k, _j] = -1.0
_EPS3.setflags(write=False)


def sym3_to_vec(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    return np.array([mat[i, j] for i, j in TRI6])


def vec_to_sym3(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    out = np.zeros((3, 3))
    for val, (i, j) in zip(vec, TRI6):
        out[i, j] = val
        out[j, i] = val
    return out


class SymMat3:
    """Symmetric 3x3 matrix wrapper with 6-vector serialization."""

    def __init__(self, mat: np.ndarray):
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        if np.max(np.abs(mat - mat.T)) > 1e-12 * (1.0 + np.max(np.abs(mat))):
            raise ValueError("matrix is not symmetric")
        self.mat = 0.5 * (mat + mat.T)
        self.mat.setflags(write=False)

    @classmethod
    def from_vec(cls, vec) -> "SymMat3":
        return cls(vec_to_sym3(vec))

    def to_vec(self) -> np.ndarray:
        return sym3_to_vec(self.mat)

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat))


class Riemann3:
    """Riemann tensor at a point, stored through antisymmetric index pairs.

    The pair basis is ((1,2), (2,0), (0,1)), dual to the coordinate axes
    through the Levi-Civita symbol, so the tensor is a symmetric 3x3
    matrix over that basis and all the algebraic symmetries hold exactly
    by construction.  ``symmetry_residual`` records how far the raw input
    of ``from_dense`` was from satisfying them.
    """

    _PAIRS = ((1, 2), (2, 0), (0, 1))

    def __init__(self, pair_matrix: np.ndarray, symmetry_residual: float = 0.0):
        K = np.asarray(pair_matrix, dtype=float)
        if K.shape != (3, 3):
            raise ValueError("pair matrix must be 3x3")
        self.pair_matrix = 0.5 * (K + K.T)
        self.pair_matrix.setflags(write=False)
        self.symmetry_residual = float(symmetry_residual)

    @classmethod
    def from_dense(cls, R: np.ndarray) -> "Riemann3":
        R = np.asarray(R, dtype=float)
        if R.shape != (3, 3, 3, 3):
            raise ValueError("dense Riemann must be 3x3x3x3")
        scale = 1.0 + np.max(np.abs(R))
        res = max(
            np.max(np.abs(R + np.swapaxes(R, 0, 1))),
            np.max(np.abs(R + np.swapaxes(R, 2, 3))),
            np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))),
        ) / scale
        K = np.empty((3, 3))
        for A, (a, b) in enumerate(cls._PAIRS):
            for B, (c, d) in enumerate(cls._PAIRS):
                K[A, B] = R[a, b, c, d]
        return cls(K, symmetry_residual=float(res))

    @property
    def dense(self) -> np.ndarray:
        return np.einsum("abx,cdy,xy->abcd", _EPS3, _EPS3, self.pair_matrix)

    def ricci(self) -> np.ndarray:
        """Contraction R_ab = R_{cab}{}^c with the flat metric."""
        return np.einsum("cabc->ab", self.dense)

    def riem_sq(self) -> float:
        R = self.dense
        return float(np.einsum("abcd,abcd->", R, R))

    def cross_invariant(self) -> float:
        R = self.dense
        return float(np.einsum("abcd,adcb->", R, R))


def riemann_from_ricci(ric: np.ndarray) -> Riemann3:
    """Reconstruct the 3D Riemann tensor from Ricci at a point (metric = delta)."""
    ric = np.asarray(ric, dtype=float)
    if ric.shape != (3, 3):
        raise ValueError("ric must be a 3x3 matrix")
    return Riemann3.from_dense(_riemann_dense(ric))


def _riemann_dense(ric: np.ndarray) -> np.ndarray:
    g = np.eye(3)
    scal = np.trace(ric)
    R = (np.einsum("ad,bc->abcd", ric, g) + np.einsum("bc,ad->abcd", ric, g)
         - np.einsum("ac,bd->abcd", ric, g) - np.einsum("bd,ac->abcd", ric, g))
    R += 0.5 * scal * (np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g))
    return R


def quadratic_invariants(ric: np.ndarray):
    """Closed-form invariants (|Riem|^2, R_abcd R^adcb) from Ricci alone."""
    ric = np.asarray(ric, dtype=float)
    ric2 = float(np.sum(ric * ric))
    scal = float(np.trace(ric))
    return 4.0 * ric2 - scal ** 2, 2.0 * ric2 - 0.5 * scal ** 2


@dataclass(frozen=True)
class CurvatureJet:
    """Ricci curvature with two derivative orders at a point.

    dric[c, a, b] is the first covariant derivative of R_ab in direction c
    and d2ric[d, c, a, b] the second, stored symmetric in (d, c); the
    commutator ambiguity of the mixed part is quadratic in curvature and
    only affects orders beyond the fourth.  Construction validates the
    contracted differential identity div Ric = (1/2) grad R.
    """

    ric: np.ndarray
    dric: np.ndarray
    d2ric: np.ndarray

    def __post_init__(self):
        ric = np.asarray(self.ric, dtype=float)
        dric = np.asarray(self.dric, dtype=float)
        d2ric = np.asarray(self.d2ric, dtype=float)
        if ric.shape != (3, 3) or dric.shape != (3, 3, 3) or d2ric.shape != (3, 3, 3, 3):
            raise ValueError("jet arrays must have shapes (3,3), (3,3,3), (3,3,3,3)")
        scale = 1.0 + max(np.max(np.abs(ric)), np.max(np.abs(dric)), np.max(np.abs(d2ric)))
        sym_err = max(
            np.max(np.abs(ric - ric.T)),
            np.max(np.abs(dric - np.swapaxes(dric, 1, 2))),
            np.max(np.abs(d2ric - np.swapaxes(d2ric, 2, 3))),
            np.max(np.abs(d2ric - np.swapaxes(d2ric, 0, 1))),
        )
        if sym_err > 1e-10 * scale:
            raise ValueError(f"jet symmetry violation: {sym_err:.3e}")
        div_ric = np.einsum("bba->a", dric)
        grad_r = np.einsum("aii->a", dric)
        bianchi = np.max(np.abs(div_ric - 0.5 * grad_r))
        if bianchi > 1e-10 * scale:
            raise ValueError(f"contracted Bianchi violation: {bianchi:.3e}")
        object.__setattr__(self, "ric", _frozen(ric))
        object.__setattr__(self, "dric", _frozen(dric))
        object.__setattr__(self, "d2ric", _frozen(d2ric))

    @classmethod
    def from_ricci(cls, ric: np.ndarray) -> "CurvatureJet":
        return cls(np.asarray(ric, dtype=float), np.zeros((3, 3, 3)), np.zeros((3, 3, 3, 3)))

    @property
    def scalar(self) -> float:
        return float(np.trace(self.ric))

    @property
    def ric_sq(self) -> float:
        return float(np.sum(self.ric * self.ric))

    @property
    def grad_scalar(self) -> np.ndarray:
        return np.einsum("cii->c", self.dric)

    @property
    def lap_scalar(self) -> float:
        return float(np.einsum("ddii->", self.d2ric))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _dric_constraints():
    """Constraint rows: index symmetry plus the contracted Bianchi identity."""
    rows = []

    def idx(c, a, b):
        return (c * 3 + a) * 3 + b

    for c in range(3):
        for a in range(3):
            for b in range(a + 1, 3):
                r = np.zeros(27)
                r[idx(c, a, b)] = 1.0
                r[idx(c, b, a)] = -1.0
                rows.append(r)
    for a in range(3):
        r = np.zeros(27)
        for b in range(3):
            r[idx(b, b, a)] += 1.0
            r[idx(a, b, b)] -= 0.5
        rows.append(r)
    return np.array(rows)


def _d2ric_constraints():
    """Symmetry in both index pairs plus the differentiated Bianchi identity."""
    rows = []

    def idx(d, c, a, b):
        return ((d * 3 + c) * 3 + a) * 3 + b

    for d in range(3):
        for c in range(3):
            for a in range(3):
                for b in range(a + 1, 3):
                    r = np.zeros(81)
                    r[idx(d, c, a, b)] = 1.0
                    r[idx(d, c, b, a)] = -1.0
                    rows.append(r)
    for d in range(3):
        for c in range(d + 1, 3):
            for a in range(3):
                for b in range(3):
                    r = np.zeros(81)
                    r[idx(d, c, a, b)] = 1.0
                    r[idx(c, d, a, b)] = -1.0
                    rows.append(r)
    for d in range(3):
        for b in range(3):
            r = np.zeros(81)
            for a in range(3):
                r[idx(d, a, a, b)] += 1.0
                r[idx(d, b, a, a)] -= 0.5
            rows.append(r)
    return np.array(rows)


def _project_constraints(x: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Nearest point with A x = 0 (minimum-norm least-squares correction)."""
    correction, *_ = np.linalg.lstsq(A, A @ x, rcond=None)
    return x - correction


def random_jet(rng: np.random.Generator, scale: float = 1.0,
               require_lap: bool = False) -> CurvatureJet:
    """Random curvature jet satisfying the differential identities.

    Entries are uniform in [-scale, scale] before projection onto the
    symmetry and contracted Bianchi constraints.  With ``require_lap`` the
    sample is redrawn until the scalar curvature Laplacian is bounded away
    from zero.
    """
    while True:
        ric = rng.uniform(-scale, scale, size=(3, 3))
        ric = 0.5 * (ric + ric.T)
        dric = rng.uniform(-scale, scale, size=27)
        dric = _project_constraints(dric, _dric_constraints()).reshape(3, 3, 3)
        d2 = rng.uniform(-scale, scale, size=81)
        d2 = _project_constraints(d2, _d2ric_constraints()).reshape(3, 3, 3, 3)
        jet = CurvatureJet(ric, dric, d2)
        if not require_lap or abs(jet.lap_scalar) > 0.1 * scale:
            return jet


def jet_from_arrays(ric: np.ndarray, dric: np.ndarray,
                    d2ric: np.ndarray) -> CurvatureJet:
    """Assemble a jet from raw derivative arrays, e.g. finite differences.

    Each block is symmetrized in the index pairs that must commute, and the
    first-derivative block is projected onto the contracted differential
    identity.  For arrays produced by a consistent discretization the
    projection only removes truncation drift; it keeps the jet inside the
    validation tolerance of :class:`CurvatureJet`.
    """
    ric = 0.5 * (np.asarray(ric, dtype=float) + np.asarray(ric, dtype=float).T)
    dric = np.asarray(dric, dtype=float)
    dric = 0.5 * (dric + np.swapaxes(dric, 1, 2))
    dric = _project_constraints(dric.ravel(), _dric_constraints()).reshape(3, 3, 3)
    d2 = np.asarray(d2ric, dtype=float)
    d2 = 0.5 * (d2 + np.swapaxes(d2, 2, 3))
    d2 = 0.5 * (d2 + np.swapaxes(d2, 0, 1))
    return CurvatureJet(ric, dric, d2)


def _derivative_riemann(dric_slice: np.ndarray) -> np.ndarray:
    """Reconstruction formula applied to a Ricci derivative (metric parallel)."""
    return _riemann_dense(dric_slice)


def small_sphere_data(jet: CurvatureJet, tau: float, order: int,
                      grid: SphereGrid) -> BartnikPerturbation:
    """Taylor data of the geodesic sphere of radius tau, scaled to the unit sphere.

    Parameters
    ----------
    jet : CurvatureJet
        Curvature of the ambient space at the center, in an orthonormal frame.
    tau : float
        Geodesic radius.
    order : int
        Highest Taylor order kept (2, 3 or 4).
    grid : SphereGrid
        Target grid; band limit 4 suffices to hold order-4 data exactly.

    Returns
    -------
    BartnikPerturbation
        Offsets (gamma1, H1) of the scaled induced metric from the round
        metric and of the scaled mean curvature from -2.
    """
    if order not in (2, 3, 4):
        raise ValueError("order must be 2, 3 or 4")
    tau = float(tau)
    x = grid.nodes
    e1 = grid.e_theta
    e2 = grid.e_phi

    Rm = _riemann_dense(jet.ric)
    # Q_ik = R_{i r k r} with r the radial direction at each node
    Q = np.einsum("ijkl,nj,nl->nik", Rm, x, x)

    def frame(Qmat):
        c11 = np.einsum("ni,nik,nk->n", e1, Qmat, e1)
        c12 = np.einsum("ni,nik,nk->n", e1, Qmat, e2)
        c22 = np.einsum("ni,nik,nk->n", e2, Qmat, e2)
        return c11, c12, c22

    g11, g12, g22 = frame(Q)
    c11 = (tau ** 2 / 3.0) * g11
    c12 = (tau ** 2 / 3.0) * g12
    c22 = (tau ** 2 / 3.0) * g22
    H = (tau ** 2 / 3.0) * np.einsum("ij,ni,nj->n", jet.ric, x, x)

    if order >= 3:
        dRm = np.stack([_derivative_riemann(jet.dric[e]) for e in range(3)])
        dQ = np.einsum("eijkl,ne,nj,nl->nik", dRm, x, x, x)
        d11, d12, d22 = frame(dQ)
        c11 = c11 + (tau ** 3 / 6.0) * d11
        c12 = c12 + (tau ** 3 / 6.0) * d12
        c22 = c22 + (tau ** 3 / 6.0) * d22
        H = H + (tau ** 3 / 4.0) * np.einsum("cab,nc,na,nb->n", jet.dric, x, x, x)

    if order >= 4:
        d2Rm = np.empty((3, 3, 3, 3, 3, 3))
        for e in range(3):
            for f in range(3):
                d2Rm[e, f] = _riemann_dense(jet.d2ric[e, f])
        d2Q = np.einsum("efijkl,ne,nf,nj,nl->nik", d2Rm, x, x, x, x)
        QQ = np.einsum("nic,nck->nik", Q, Q)
        dd11, dd12, dd22 = frame(d2Q)
        m11, m12, m22 = frame(QQ)
        c11 = c11 + tau ** 4 * (dd11 / 20.0 + 2.0 * m11 / 45.0)
        c12 = c12 + tau ** 4 * (dd12 / 20.0 + 2.0 * m12 / 45.0)
        c22 = c22 + tau ** 4 * (dd22 / 20.0 + 2.0 * m22 / 45.0)
        Qsq = np.einsum("nik,nik->n", Q, Q)
        H = H + tau ** 4 * (np.einsum("dcab,nd,nc,na,nb->n", jet.d2ric, x, x, x, x) / 10.0
                            + Qsq / 45.0)

    gamma1 = SymTensorField.from_components(grid, c11, c12, c22)
    H1 = ScalarField.from_values(grid, H)
    return BartnikPerturbation(gamma1=gamma1, H1=H1)


@dataclass(frozen=True)
class ExpansionReport:
    """Cubic and quintic coefficients of the small-sphere mass expansions."""

    hawking_c3: float
    hawking_c5: float
    brown_york_c3: float
    brown_york_c5: float
    static_c3: float
    static_c5: float

    @property
    def static_minus_hawking_c5(self) -> float:
        return self.static_c5 - self.hawking_c5

    @property
    def brown_york_minus_static_c5(self) -> float:
        return self.brown_york_c5 - self.static_c5

    def to_dict(self) -> dict:
        return {
            "hawking_c3": self.hawking_c3,
            "hawking_c5": self.hawking_c5,
            "brown_york_c3": self.brown_york_c3,
            "brown_york_c5": self.brown_york_c5,
            "static_c3": self.static_c3,
            "static_c5": self.static_c5,
            "static_minus_hawking_c5": self.static_minus_hawking_c5,
            "brown_york_minus_static_c5": self.brown_york_minus_static_c5,
        }


def reference_expansions(jet: CurvatureJet) -> ExpansionReport:
    """Known small-sphere expansions of the quasilocal mass functionals."""
    R = jet.scalar
    ric2 = jet.ric_sq
    lap = jet.lap_scalar
    return ExpansionReport(
        hawking_c3=R / 12.0,
        hawking_c5=(6.0 * lap - 5.0 * R ** 2) / 720.0,
        brown_york_c3=R / 12.0,
        brown_york_c5=(24.0 * ric2 - 13.0 * R ** 2 + 12.0 * lap) / 1440.0,
        static_c3=R / 12.0,
        static_c5=(30.0 * ric2 - 25.0 * R ** 2 + 18.0 * lap) / 2160.0,
    )
