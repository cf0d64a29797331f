"""Field containers on the sphere grid.

Scalar fields keep both node values and spectral coefficients.  Tangent
vector fields are stored through two scalar potentials (gradient part and
rotated-gradient part), and symmetric 2-tensors through a trace scalar
plus two trace-free potentials.  On the round sphere this potential
representation is complete: a trace-free divergence-free symmetric tensor
vanishes, so two potentials capture every trace-free field.

Frame conventions: components labelled 1 and 2 refer to the orthonormal
frame (e_theta, e_phi).  The pointwise rotation J maps (u1, u2) to
(-u2, u1); on trace-free symmetric tensors with components (t1, t2) =
(T_11, T_12) it acts as (t1, t2) -> (-t2, t1).
"""

from __future__ import annotations

import numpy as np

from .grid import SphereGrid

__all__ = ["ScalarField", "TangentField", "SymTensorField"]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(arr, dtype=float))
    arr.setflags(write=False)
    return arr


class ScalarField:
    """Scalar function on a sphere grid with dual representation.

    Node values are authoritative for quadrature; coefficients are used by
    the spectral operators.  ``truncation`` records the max-norm mismatch
    between the stored values and the synthesis of the stored coefficients,
    which is nonzero only when the field is not band-limited at the grid's
    lmax.
    """

    def __init__(self, grid: SphereGrid, values: np.ndarray, coeffs: np.ndarray,
                 truncation: float = 0.0):
        self.grid = grid
        self.values = _readonly(values)
        self.coeffs = _readonly(coeffs)
        self.truncation = float(truncation)
        if self.values.shape != (grid.nnodes,):
            raise ValueError("values array does not match the grid")
        if self.coeffs.shape != (grid.nmodes,):
            raise ValueError("coefficient array does not match the grid")

    @classmethod
    def from_values(cls, grid: SphereGrid, values: np.ndarray) -> "ScalarField":
        values = np.asarray(values, dtype=float)
        coeffs = grid.analyze(values)
        trunc = float(np.max(np.abs(values - grid.synthesize(coeffs)), initial=0.0))
        return cls(grid, values, coeffs, truncation=trunc)

    @classmethod
    def from_coeffs(cls, grid: SphereGrid, coeffs: np.ndarray) -> "ScalarField":
        coeffs = np.asarray(coeffs, dtype=float)
        return cls(grid, grid.synthesize(coeffs), coeffs, truncation=0.0)

    @classmethod
    def zeros(cls, grid: SphereGrid) -> "ScalarField":
        return cls(grid, np.zeros(grid.nnodes), np.zeros(grid.nmodes))

    @classmethod
    def constant(cls, grid: SphereGrid, value: float) -> "ScalarField":
        return cls.from_values(grid, np.full(grid.nnodes, float(value)))

    # -- arithmetic helpers (values side; coefficients follow linearly) --

    def __add__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.values + other.values,
                           self.coeffs + other.coeffs,
                           truncation=self.truncation + other.truncation)

    def __sub__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.values - other.values,
                           self.coeffs - other.coeffs,
                           truncation=self.truncation + other.truncation)

    def __mul__(self, scalar: float):
        s = float(scalar)
        return ScalarField(self.grid, s * self.values, s * self.coeffs,
                           truncation=abs(s) * self.truncation)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def pointwise(self, other: "ScalarField") -> "ScalarField":
        """Pointwise product; reanalyzed, so band growth shows in truncation."""
        self._check(other)
        return ScalarField.from_values(self.grid, self.values * other.values)

    def _check(self, other):
        if not isinstance(other, ScalarField) or other.grid is not self.grid:
            if isinstance(other, ScalarField) and other.grid.same_layout(self.grid):
                return
            raise ValueError("fields live on different grids")

    # -- calculus -------------------------------------------------------

    def gradient_components(self):
        """Frame components (d/dtheta, (1/sin)d/dphi) at the nodes."""
        G1, G2 = self.grid.grad_tables
        return self.coeffs @ G1, self.coeffs @ G2

    def mean_l2(self) -> float:
        return float(np.sqrt(np.dot(self.coeffs, self.coeffs)))

    def l_slice_norm(self, l: int) -> float:
        """L2 norm of the degree-l part."""
        sel = self.grid.ls == l
        return float(np.sqrt(np.sum(self.coeffs[sel] ** 2)))


class TangentField:
    """Tangent vector field X = grad(a) + J grad(b).

    The potentials a and b are coefficient vectors supported on l >= 1.
    Components at the nodes are cached in the orthonormal frame.
    """

    def __init__(self, grid: SphereGrid, a_coeffs: np.ndarray, b_coeffs: np.ndarray):
        self.grid = grid
        a = np.asarray(a_coeffs, dtype=float).copy()
        b = np.asarray(b_coeffs, dtype=float).copy()
        if a.shape != (grid.nmodes,) or b.shape != (grid.nmodes,):
            raise ValueError("potential vectors do not match the grid")
        a[grid.ls == 0] = 0.0
        b[grid.ls == 0] = 0.0
        self.a_coeffs = _readonly(a)
        self.b_coeffs = _readonly(b)
        G1, G2 = grid.grad_tables
        self.comp1 = _readonly(a @ G1 - b @ G2)
        self.comp2 = _readonly(a @ G2 + b @ G1)

    @classmethod
    def zeros(cls, grid: SphereGrid) -> "TangentField":
        z = np.zeros(grid.nmodes)
        return cls(grid, z, z)

    @classmethod
    def from_components(cls, grid: SphereGrid, comp1: np.ndarray, comp2: np.ndarray):
        """Project node components onto the potential representation.

        Exact for band-limited fields; the residual against the input
        components is returned alongside the field.
        """
        comp1 = np.asarray(comp1, dtype=float)
        comp2 = np.asarray(comp2, dtype=float)
        G1, G2 = grid.grad_tables
        w1 = grid.weights * comp1
        w2 = grid.weights * comp2
        lam = grid.lam.copy()
        lam[lam == 0.0] = np.inf
        a = (G1 @ w1 + G2 @ w2) / lam
        b = (-G2 @ w1 + G1 @ w2) / lam
        field = cls(grid, a, b)
        resid = max(np.max(np.abs(field.comp1 - comp1), initial=0.0),
                    np.max(np.abs(field.comp2 - comp2), initial=0.0))
        return field, float(resid)

    def divergence(self) -> ScalarField:
        """div X = Laplace(a); the rotated-gradient part is divergence free."""
        return ScalarField.from_coeffs(self.grid, -self.grid.lam * self.a_coeffs)

    def ambient_components(self) -> np.ndarray:
        """Cartesian components of X at the nodes, shape (nnodes, 3)."""
        g = self.grid
        return self.comp1[:, None] * g.e_theta + self.comp2[:, None] * g.e_phi

    def norm_sq_values(self) -> np.ndarray:
        return self.comp1 ** 2 + self.comp2 ** 2

    def covariant_matrix(self) -> np.ndarray:
        """Covariant derivative X_{alpha:beta} in the frame, shape (n, 2, 2).

        For X = grad(a) + J grad(b) this is Hess(a) + J Hess(b) with J
        rotating the first index.
        """
        g = self.grid
        E1, E2 = g.tfhess_tables
        # Hessian of a scalar from its trace-free part and Laplacian:
        # H11 = E1 - lam/2 * Y, H22 = -E1 - lam/2 * Y, H12 = E2 (frame).
        lamY_a = (-g.lam * self.a_coeffs) @ g.Y
        lamY_b = (-g.lam * self.b_coeffs) @ g.Y
        a1 = self.a_coeffs @ E1
        a2 = self.a_coeffs @ E2
        b1 = self.b_coeffs @ E1
        b2 = self.b_coeffs @ E2
        Ha = np.empty((g.nnodes, 2, 2))
        Ha[:, 0, 0] = a1 + 0.5 * lamY_a
        Ha[:, 1, 1] = -a1 + 0.5 * lamY_a
        Ha[:, 0, 1] = Ha[:, 1, 0] = a2
        Hb11 = b1 + 0.5 * lamY_b
        Hb22 = -b1 + 0.5 * lamY_b
        # (J Hess b)_{1,beta} = -Hess(b)_{2,beta}, (J Hess b)_{2,beta} = Hess(b)_{1,beta}
        out = Ha.copy()
        out[:, 0, 0] -= b2
        out[:, 0, 1] -= Hb22
        out[:, 1, 0] += Hb11
        out[:, 1, 1] += b2
        return out

    def l1_norm_of_potentials(self) -> float:
        sel = self.grid.ls == 1
        return float(np.sqrt(np.sum(self.a_coeffs[sel] ** 2) + np.sum(self.b_coeffs[sel] ** 2)))


class SymTensorField:
    """Symmetric 2-tensor split into trace and trace-free potentials.

    The full tensor is gamma = (trace/2) * g + tracefree, with the
    trace-free part tfHess(p) + J tfHess(q) for potentials supported on
    l >= 2.  Node components (t1, t2) = (tracefree_11, tracefree_12) are
    cached exactly as given at construction, so quadrature against the
    tensor does not suffer from potential truncation; the mismatch is
    recorded in ``tracefree_truncation``.
    """

    def __init__(self, grid: SphereGrid, trace: ScalarField,
                 p_coeffs: np.ndarray, q_coeffs: np.ndarray,
                 t1: np.ndarray | None = None, t2: np.ndarray | None = None):
        self.grid = grid
        self.trace = trace
        p = np.asarray(p_coeffs, dtype=float).copy()
        q = np.asarray(q_coeffs, dtype=float).copy()
        if p.shape != (grid.nmodes,) or q.shape != (grid.nmodes,):
            raise ValueError("potential vectors do not match the grid")
        p[grid.ls < 2] = 0.0
        q[grid.ls < 2] = 0.0
        self.p_coeffs = _readonly(p)
        self.q_coeffs = _readonly(q)
        E1, E2 = grid.tfhess_tables
        synth1 = p @ E1 - q @ E2
        synth2 = p @ E2 + q @ E1
        if t1 is None:
            t1, t2 = synth1, synth2
            self.tracefree_truncation = 0.0
        else:
            t1 = np.asarray(t1, dtype=float)
            t2 = np.asarray(t2, dtype=float)
            self.tracefree_truncation = float(max(np.max(np.abs(synth1 - t1), initial=0.0),
                                                  np.max(np.abs(synth2 - t2), initial=0.0)))
        self.t1 = _readonly(t1)
        self.t2 = _readonly(t2)

    @classmethod
    def zeros(cls, grid: SphereGrid) -> "SymTensorField":
        z = np.zeros(grid.nmodes)
        return cls(grid, ScalarField.zeros(grid), z, z)

    @classmethod
    def round_metric(cls, grid: SphereGrid) -> "SymTensorField":
        z = np.zeros(grid.nmodes)
        return cls(grid, ScalarField.constant(grid, 2.0), z, z)

    @classmethod
    def from_components(cls, grid: SphereGrid, c11: np.ndarray, c12: np.ndarray,
                        c22: np.ndarray) -> "SymTensorField":
        """Build from frame components; trace-free potentials by projection.

        The projection inverts the diagonal multiplier l(l+1)(l(l+1)-2)/2 of
        the double-divergence composed with the trace-free Hessian.
        """
        c11 = np.asarray(c11, dtype=float)
        c12 = np.asarray(c12, dtype=float)
        c22 = np.asarray(c22, dtype=float)
        trace = ScalarField.from_values(grid, c11 + c22)
        t1 = 0.5 * (c11 - c22)
        t2 = c12
        E1, E2 = grid.tfhess_tables
        w1 = grid.weights * t1
        w2 = grid.weights * t2
        # inner product of trace-free tensors carries a pointwise factor 2,
        # <T,S> = 2 (t1 s1 + t2 s2), and the basis tensors have squared norm
        # lam (lam - 2) / 2, so the coefficient is 2 <T, basis> / norm.
        norm = 0.5 * grid.lam * (grid.lam - 2.0)
        norm[norm <= 0.0] = np.inf
        p = 2.0 * (E1 @ w1 + E2 @ w2) / norm
        q = 2.0 * (-E2 @ w1 + E1 @ w2) / norm
        return cls(grid, trace, p, q, t1=t1, t2=t2)

    @classmethod
    def from_parts(cls, grid: SphereGrid, trace: ScalarField,
                   p_coeffs: np.ndarray, q_coeffs: np.ndarray) -> "SymTensorField":
        return cls(grid, trace, p_coeffs, q_coeffs)

    def tracefree(self) -> "SymTensorField":
        """The trace-free part as a field of its own."""
        return SymTensorField(self.grid, ScalarField.zeros(self.grid),
                              self.p_coeffs, self.q_coeffs,
                              t1=self.t1, t2=self.t2)

    def components(self):
        """Full frame components (c11, c12, c22) at the nodes."""
        half = 0.5 * self.trace.values
        return half + self.t1, self.t2, half - self.t1

    def tracefree_norm_sq_values(self) -> np.ndarray:
        """Pointwise squared norm of the trace-free part, 2*(t1^2 + t2^2)."""
        return 2.0 * (self.t1 ** 2 + self.t2 ** 2)

    def max_component(self) -> float:
        c11, c12, c22 = self.components()
        return float(max(np.max(np.abs(c11), initial=0.0),
                         np.max(np.abs(c12), initial=0.0),
                         np.max(np.abs(c22), initial=0.0)))

    def scaled(self, s: float) -> "SymTensorField":
        s = float(s)
        return SymTensorField(self.grid, self.trace * s,
                              s * self.p_coeffs, s * self.q_coeffs,
                              t1=s * self.t1, t2=s * self.t2)

    def shifted(self, other: "SymTensorField") -> "SymTensorField":
        if other.grid is not self.grid and not other.grid.same_layout(self.grid):
            raise ValueError("fields live on different grids")
        return SymTensorField(self.grid, self.trace + other.trace,
                              self.p_coeffs + other.p_coeffs,
                              self.q_coeffs + other.q_coeffs,
                              t1=self.t1 + other.t1, t2=self.t2 + other.t2)
