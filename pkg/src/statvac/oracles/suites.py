"""Named verification suites behind the command-line verify mode.

Each suite re-derives a frozen piece of the package from an independent
route and reports named checks as {max_residual, tolerance, passed}.
Independence is the point: quadrature is checked against double-factorial
moment formulas, spectral multipliers against ambient finite differences
of degree-zero homogeneous extensions, curvature identities against dense
tensor contractions, variation formulas against Richardson differences of
first-principles geometry, and the small-sphere Taylor data against
geodesic integration of random smooth metrics.

Suites are pure functions of (rng, lmax, fast); ``run_suite`` wires the
rng from a seed in a way that does not depend on which other suites run,
so any subset reproduces the full run's numbers.
"""

from __future__ import annotations

import numpy as np

from ..boundary import BartnikPerturbation, BoundarySolution, solve_boundary_system
from ..curvature import quadratic_invariants, reference_expansions, riemann_from_ricci
from ..curvature import small_sphere_data
from ..mass import compute_m1, compute_m2, estimate, hawking_mass
from ..spherical import harmonics, operators
from ..spherical.fields import ScalarField, SymTensorField, TangentField
from ..spherical.grid import SphereGrid, build_grid
from .curvature_fd import conformal_ricci, fd_linearized_ricci, fd_ricci, linearized_ricci
from .geodesic import geodesic_sphere, jet_from_metric, space_form_reference
from .metricfield import MetricField, random_polynomial_metric
from .sphere_variation import (
    conformal_probe_check,
    mass_variation_identity,
    random_deformation,
    variation_check,
)

__all__ = [
    "SUITE_NAMES",
    "run_suite",
    "run_all",
    "random_data",
]


def _check(max_residual: float, tolerance: float) -> dict:
    max_residual = float(max_residual)
    return {
        "max_residual": max_residual,
        "tolerance": float(tolerance),
        "passed": bool(max_residual <= tolerance),
    }


# -- shared random-input builders -----------------------------------------


def random_data(grid: SphereGrid, rng: np.random.Generator,
                amplitude: float = 0.1) -> BartnikPerturbation:
    """Random smooth boundary data with coefficients decaying in degree."""
    decay = 1.0 / (1.0 + grid.ls.astype(float)) ** 2
    tr = ScalarField.from_coeffs(grid, amplitude * decay * rng.standard_normal(grid.nmodes))
    high = grid.ls >= 2
    p = np.where(high, amplitude * decay * rng.standard_normal(grid.nmodes), 0.0)
    q = np.where(high, amplitude * decay * rng.standard_normal(grid.nmodes), 0.0)
    H1 = ScalarField.from_coeffs(grid, amplitude * decay * rng.standard_normal(grid.nmodes))
    return BartnikPerturbation(gamma1=SymTensorField(grid, tr, p, q), H1=H1)


def _homog_values(lmax: int, coeffs: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Degree-zero homogeneous extension of a band-limited scalar."""
    theta, phi = harmonics.angles_from_directions(pts)
    Y, _ = harmonics.harmonic_tables(lmax, theta, phi)
    return coeffs @ Y


def _ambient_laplacian(lmax: int, coeffs: np.ndarray, pts: np.ndarray,
                       h: float) -> np.ndarray:
    """Euclidean Laplacian of the homogeneous extension, 4th-order stencil.

    On the unit sphere this equals the surface Laplacian, because the
    extension has no radial variation.
    """
    w = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    eye = np.eye(3)
    total = np.zeros(pts.shape[0])
    for axis in range(3):
        acc = np.zeros(pts.shape[0])
        for wi, oi in zip(w, offs):
            acc += wi * _homog_values(lmax, coeffs, pts + (oi * h) * eye[axis])
        total += acc / h ** 2
    return total


def _ambient_hessian(lmax: int, coeffs: np.ndarray, pts: np.ndarray,
                     h: float) -> np.ndarray:
    """Euclidean Hessian of the homogeneous extension, 2nd-order stencils."""
    eye = np.eye(3)
    f0 = _homog_values(lmax, coeffs, pts)
    hess = np.zeros((pts.shape[0], 3, 3))
    for a in range(3):
        fp = _homog_values(lmax, coeffs, pts + h * eye[a])
        fm = _homog_values(lmax, coeffs, pts - h * eye[a])
        hess[:, a, a] = (fp - 2.0 * f0 + fm) / h ** 2
    for a in range(3):
        for b in range(a + 1, 3):
            pp = _homog_values(lmax, coeffs, pts + h * (eye[a] + eye[b]))
            pm = _homog_values(lmax, coeffs, pts + h * (eye[a] - eye[b]))
            mp = _homog_values(lmax, coeffs, pts - h * (eye[a] - eye[b]))
            mm = _homog_values(lmax, coeffs, pts - h * (eye[a] + eye[b]))
            hess[:, a, b] = hess[:, b, a] = (pp - pm - mp + mm) / (4.0 * h ** 2)
    return hess


# -- suites ----------------------------------------------------------------


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _suite_moments(rng, lmax, fast):
    """Quadrature of coordinate monomials against double-factorial values."""
    grid = build_grid(lmax)
    x = grid.nodes
    worst = {}
    for i in range(5):
        for j in range(5 - i):
            for k in range(5 - i - j):
                deg = i + j + k
                if deg > 4:
                    continue
                vals = x[:, 0] ** i * x[:, 1] ** j * x[:, 2] ** k
                quad = grid.integrate(vals)
                if i % 2 or j % 2 or k % 2:
                    ref = 0.0
                else:
                    num = (_double_factorial(i - 1) * _double_factorial(j - 1)
                           * _double_factorial(k - 1))
                    ref = 4.0 * np.pi * num / _double_factorial(deg + 1)
                res = abs(quad - ref) / max(abs(ref), 1.0)
                key = f"degree_{deg}"
                worst[key] = max(worst.get(key, 0.0), res)
    return {key: _check(val, 1e-12) for key, val in sorted(worst.items())}


def _suite_multipliers(rng, lmax, fast):
    """Spectral operator table against ambient finite differences."""
    grid = build_grid(lmax)
    checks = {}

    # diagonal action on single modes, spectral consistency
    worst = 0.0
    for _ in range(100):
        l = int(rng.integers(0, grid.lmax + 1))
        m = int(rng.integers(-l, l + 1))
        coeffs = np.zeros(grid.nmodes)
        coeffs[harmonics.index_of(l, m)] = 1.0
        out = operators.laplace(ScalarField.from_coeffs(grid, coeffs))
        expect = -float(l * (l + 1)) * coeffs
        worst = max(worst, float(np.max(np.abs(out.coeffs - expect))))
    checks["laplace_spectrum"] = _check(worst, 1e-10)

    worst = 0.0
    for _ in range(20):
        coeffs = rng.standard_normal(grid.nmodes) / (1.0 + grid.ls) ** 2
        u = ScalarField.from_coeffs(grid, coeffs)
        rhs = ScalarField.from_coeffs(
            grid, operators.helmholtz2_multiplier(grid.ls) * u.coeffs)
        back, _ = operators.helmholtz2_solve(rhs)
        target = np.where(grid.ls == 1, 0.0, coeffs)
        worst = max(worst, float(np.max(np.abs(back.coeffs - target))))
    checks["helmholtz_solve_roundtrip"] = _check(worst, 1e-9)

    worst = 0.0
    for _ in range(20):
        high = grid.ls >= 2
        p = np.where(high, rng.standard_normal(grid.nmodes) / (1.0 + grid.ls) ** 2, 0.0)
        q = np.where(high, rng.standard_normal(grid.nmodes) / (1.0 + grid.ls) ** 2, 0.0)
        tensor = SymTensorField(grid, ScalarField.zeros(grid), p, q)
        X, res = operators.conformal_killing_solve(tensor)
        image = operators.conformal_killing_apply(X)
        worst = max(worst, res,
                    float(np.max(np.abs(image.p_coeffs - p))),
                    float(np.max(np.abs(image.q_coeffs - q))))
    checks["conformal_killing_roundtrip"] = _check(worst, 1e-9)

    # ambient finite differences pin the multiplier values themselves
    nprobe = 24 if fast else 48
    nmode = 4 if fast else 8
    h = 0.02
    worst = 0.0
    for _ in range(nmode):
        l = int(rng.integers(1, min(grid.lmax, 6) + 1))
        m = int(rng.integers(-l, l + 1))
        coeffs = np.zeros(grid.nmodes)
        coeffs[harmonics.index_of(l, m)] = 1.0
        idx = rng.choice(grid.nnodes, size=min(nprobe, grid.nnodes), replace=False)
        pts = grid.nodes[idx]
        lap_h = _ambient_laplacian(grid.lmax, coeffs, pts, h)
        lap_h2 = _ambient_laplacian(grid.lmax, coeffs, pts, 0.5 * h)
        lap = (16.0 * lap_h2 - lap_h) / 15.0
        expect = -float(l * (l + 1)) * (coeffs @ grid.Y[:, idx])
        worst = max(worst, float(np.max(np.abs(lap - expect)) / (l * (l + 1))))
    checks["laplace_ambient_fd"] = _check(worst, 1e-6)

    # int |tfHess Y|^2 = (divdiv multiplier) * int Y^2 by parts, with the
    # trace-free Hessian taken from the ambient extension, so this check
    # fails if the frozen multiplier table is wrong.
    nmode = 3 if fast else 5
    worst = 0.0
    e1, e2 = grid.e_theta, grid.e_phi
    for _ in range(nmode):
        l = int(rng.integers(2, min(grid.lmax, 5) + 1))
        m = int(rng.integers(-l, l + 1))
        coeffs = np.zeros(grid.nmodes)
        coeffs[harmonics.index_of(l, m)] = 1.0
        hess_h = _ambient_hessian(grid.lmax, coeffs, grid.nodes, h)
        hess_h2 = _ambient_hessian(grid.lmax, coeffs, grid.nodes, 0.5 * h)
        hess = (4.0 * hess_h2 - hess_h) / 3.0
        q11 = np.einsum("na,nab,nb->n", e1, hess, e1)
        q12 = np.einsum("na,nab,nb->n", e1, hess, e2)
        q22 = np.einsum("na,nab,nb->n", e2, hess, e2)
        t1 = 0.5 * (q11 - q22)
        mu_fd = grid.integrate(2.0 * (t1 ** 2 + q12 ** 2))
        mu = float(operators.divdiv_multiplier(np.array([l]))[0])
        worst = max(worst, abs(mu_fd - mu) / mu)
    checks["divdiv_ambient_fd"] = _check(worst, 2e-4)
    return checks


def _suite_invariants(rng, lmax, fast):
    """Quadratic curvature invariants against dense contractions."""
    nsample = 200 if fast else 1000
    worst_riem = worst_cross = worst_ricci = worst_sym = 0.0
    for _ in range(nsample):
        ric = rng.uniform(-2.0, 2.0, size=(3, 3))
        ric = 0.5 * (ric + ric.T)
        closed_riem, closed_cross = quadratic_invariants(ric)
        R = riemann_from_ricci(ric)
        worst_riem = max(worst_riem,
                         abs(closed_riem - R.riem_sq()) / max(abs(R.riem_sq()), 1.0))
        worst_cross = max(worst_cross,
                          abs(closed_cross - R.cross_invariant())
                          / max(abs(R.cross_invariant()), 1.0))
        worst_ricci = max(worst_ricci, float(np.max(np.abs(R.ricci() - ric))))
        worst_sym = max(worst_sym, R.symmetry_residual)
    return {
        "riemann_norm_formula": _check(worst_riem, 1e-12),
        "cross_invariant_formula": _check(worst_cross, 1e-12),
        "ricci_reconstruction": _check(worst_ricci, 1e-12),
        "pair_symmetry": _check(worst_sym, 1e-12),
    }


def _suite_conformal(rng, lmax, fast):
    """Closed-form conformal Ricci against finite-difference curvature."""
    nsample = 20 if fast else 100
    worst = 0.0
    for _ in range(nsample):
        lin = rng.uniform(-0.2, 0.2, 3)
        quad = rng.uniform(-0.2, 0.2, (3, 3))
        quad = 0.5 * (quad + quad.T)

        def rho(pts):
            return 1.0 + pts @ lin + np.einsum("na,ab,nb->n", pts, quad, pts)

        point = rng.uniform(-0.3, 0.3, 3)
        closed = conformal_ricci(float(rho(point[None])[0]),
                                 lin + 2.0 * quad @ point, 2.0 * quad)
        fd = fd_ricci(MetricField.conformal(rho), point)
        scale = 1.0 + float(np.max(np.abs(closed)))
        worst = max(worst, float(np.max(np.abs(fd - closed))) / scale)
    return {"conformal_ricci_fd": _check(worst, 1e-6)}


def _suite_linearized(rng, lmax, fast):
    """Linearized Ricci formula against t-differenced curvature."""
    nsample = 10 if fast else 40
    worst = 0.0
    for _ in range(nsample):
        amp = 0.3
        const = rng.uniform(-amp, amp, (3, 3))
        lin = rng.uniform(-amp, amp, (3, 3, 3))
        quad = rng.uniform(-amp, amp, (3, 3, 3, 3))
        const = 0.5 * (const + const.transpose(1, 0))
        lin = 0.5 * (lin + lin.transpose(1, 0, 2))
        quad = 0.5 * (quad + quad.transpose(1, 0, 2, 3))
        quad = 0.5 * (quad + quad.transpose(0, 1, 3, 2))

        def h_fun(pts):
            return (const[None] + np.einsum("abc,nc->nab", lin, pts)
                    + np.einsum("abcd,nc,nd->nab", quad, pts, pts))

        point = rng.uniform(-0.3, 0.3, 3)
        d2h = 2.0 * np.einsum("abcd->cdab", quad)
        closed = linearized_ricci(d2h)
        # Richardson pair in the family parameter: a single difference
        # amplifies the curvature noise floor by 1/t, so use two steps
        # with the t^2 term cancelled to keep both error sources small.
        fd_coarse = fd_linearized_ricci(h_fun, point, t_step=2e-3)
        fd_fine = fd_linearized_ricci(h_fun, point, t_step=1e-3)
        fd = (4.0 * fd_fine - fd_coarse) / 3.0
        scale = 1.0 + float(np.max(np.abs(closed)))
        worst = max(worst, float(np.max(np.abs(fd - closed))) / scale)
    return {"linearized_ricci_fd": _check(worst, 1e-6)}


def _suite_flux(rng, lmax, fast):
    """First-variation flux identity on random linear perturbations."""
    grid = build_grid(min(lmax, 12))
    nsample = 5 if fast else 20
    worst = 0.0
    for _ in range(nsample):
        A = rng.uniform(-0.5, 0.5, (3, 3))
        A = 0.5 * (A + A.T)
        B = rng.uniform(-0.5, 0.5, (3, 3, 3))
        B = 0.5 * (B + B.transpose(0, 2, 1))

        def gdot(pts):
            return A[None] + np.einsum("cab,nc->nab", B, pts)

        out = mass_variation_identity(gdot, grid)
        worst = max(worst, out["difference"] / (1.0 + abs(out["rhs"])))
    return {"variation_flux_identity": _check(worst, 1e-8)}


def _suite_variations(rng, lmax, fast):
    """Closed-form surface variations against Richardson differences."""
    nsample = 3 if fast else 20
    grid = build_grid(8)
    worst = 0.0
    for _ in range(nsample):
        params = random_deformation(grid, rng, amplitude=0.1)
        report = variation_check(params)
        worst = max(worst, report["max_discrepancy"])
    probe = conformal_probe_check()
    return {
        "first_second_variations": _check(worst, 1e-6),
        "conformal_probe_curve": _check(probe["h_curve_error"], 1e-9),
        "conformal_probe_second": _check(probe["second_derivative_error"], 1e-8),
    }


def _suite_boundary(rng, lmax, fast):
    """Boundary system residuals, energy identity, and gauge freedom."""
    grid = build_grid(lmax)
    nsample = 10 if fast else 50
    worst_res = worst_flux = 0.0
    for _ in range(nsample):
        data = random_data(grid, rng)
        sol = solve_boundary_system(data)
        scale = 1.0 + data.epsilon_estimate
        worst_res = max(worst_res, max(sol.residuals.values()) / scale)
        m1, m1_flux = compute_m1(data, sol)
        worst_flux = max(worst_flux, abs(m1 - m1_flux) / (1.0 + abs(m1)))

    nharm = 25 if fast else 100
    worst_dir = 0.0
    from ..boundary import HarmonicExterior
    for _ in range(nharm):
        coeffs = rng.standard_normal(grid.nmodes) / (1.0 + grid.ls) ** 2
        v = HarmonicExterior(grid, coeffs)
        closed = v.dirichlet_energy()
        quad = -grid.integrate(v.trace().values * v.radial_trace().values)
        worst_dir = max(worst_dir, abs(closed - quad) / (1.0 + abs(closed)))

    ngauge = 5 if fast else 20
    worst_gauge = 0.0
    for _ in range(ngauge):
        data = random_data(grid, rng)
        sol = solve_boundary_system(data)
        m2 = compute_m2(data, sol)
        eta = ScalarField.from_coeffs(
            grid, np.where(grid.ls == 1, rng.standard_normal(grid.nmodes), 0.0))
        shifted_f = BoundarySolution(v=sol.v, f=sol.f + eta, X=sol.X)
        worst_gauge = max(worst_gauge,
                          abs(compute_m2(data, shifted_f) - m2) / (1.0 + abs(m2)))
        # conformal Killing shift of X, with f rebuilt from the trace equation
        bump = np.where(grid.ls == 1, rng.standard_normal(grid.nmodes), 0.0)
        X2 = TangentField(grid, sol.X.a_coeffs + bump, sol.X.b_coeffs + bump)
        f2 = (0.25 * data.gamma1.trace - 0.5 * X2.divergence()
              - 0.5 * sol.v.trace())
        shifted_x = BoundarySolution(v=sol.v, f=f2, X=X2)
        worst_gauge = max(worst_gauge,
                          abs(compute_m2(data, shifted_x) - m2) / (1.0 + abs(m2)))
    return {
        "equation_residuals": _check(worst_res, 1e-9),
        "m1_flux_consistency": _check(worst_flux, 1e-12),
        "dirichlet_identity": _check(worst_dir, 1e-10),
        "m2_gauge_invariance": _check(worst_gauge, 1e-12),
    }


def _constant_data(grid: SphereGrid, c: float, eps: float) -> BartnikPerturbation:
    """Data whose only content is the constant mode: gamma1 = c g0, H1 = eps."""
    tr = np.zeros(grid.nmodes)
    tr[0] = 2.0 * c * np.sqrt(4.0 * np.pi)
    hc = np.zeros(grid.nmodes)
    hc[0] = eps * np.sqrt(4.0 * np.pi)
    gamma = SymTensorField(grid, ScalarField.from_coeffs(grid, tr),
                           np.zeros(grid.nmodes), np.zeros(grid.nmodes))
    return BartnikPerturbation(gamma1=gamma, H1=ScalarField.from_coeffs(grid, hc))


def _suite_anchors(rng, lmax, fast):
    """Closed-form mass values on the constant-mode data family."""
    grid = build_grid(lmax)
    worst_family = 0.0
    for c in (-0.05, 0.0, 0.05):
        for eps in (-0.05, 0.0, 0.05):
            report = estimate(_constant_data(grid, c, eps))
            closed = 0.5 * (eps - c) + 0.25 * (3.0 * c * eps - 0.5 * eps ** 2 - c ** 2)
            worst_family = max(worst_family, abs(report.total - closed))
    eps = 0.01
    report = estimate(_constant_data(grid, 0.0, eps))
    worst_pure = max(abs(report.m1 - 0.5 * eps), abs(report.m2 + eps ** 2 / 8.0))
    return {
        "constant_mode_family": _check(worst_family, 1e-13),
        "pure_mean_curvature_mode": _check(worst_pure, 1e-13),
    }


def _taylor_gap(a: BartnikPerturbation, b: BartnikPerturbation) -> float:
    a11, a12, a22 = a.gamma1.components()
    b11, b12, b22 = b.gamma1.components()
    return float(max(np.max(np.abs(a11 - b11)), np.max(np.abs(a12 - b12)),
                     np.max(np.abs(a22 - b22)),
                     np.max(np.abs(a.H1.values - b.H1.values))))


def _suite_taylor(rng, lmax, fast):
    """Geodesic-sphere sampling against the curvature-jet Taylor data."""
    ggrid = build_grid(12)
    center = np.zeros(3)
    checks = {}

    worst = 0.0
    for k in ((0.7,) if fast else (0.7, -0.55)):
        data = geodesic_sphere(MetricField.space_form(k), center, 0.1, ggrid)
        factor, scaled_h = space_form_reference(k, 0.1)
        c11, c12, c22 = data.gamma1.components()
        worst = max(worst,
                    float(np.max(np.abs(c11 - (factor - 1.0)))),
                    float(np.max(np.abs(c12))),
                    float(np.max(np.abs(c22 - (factor - 1.0)))),
                    float(np.max(np.abs(data.H1.values - (scaled_h + 2.0)))))
    checks["space_form_closed_form"] = _check(worst, 1e-8)

    # random smooth metrics with curvature bounded away from degenerate
    # reference values, so the relative fit checks are meaningful
    taus = (0.03, 0.05, 0.08)
    shortfall = -np.inf
    for _ in range(1 if fast else 3):
        while True:
            metric = random_polynomial_metric(rng, amplitude=0.5)
            jet = jet_from_metric(metric, center)
            ref = reference_expansions(jet)
            if abs(jet.scalar) > 0.3 and abs(ref.hawking_c5) > 0.02:
                break
        gaps = []
        for tau in taus:
            measured = geodesic_sphere(metric, center, tau, ggrid)
            predicted = small_sphere_data(jet, tau, 4, ggrid)
            gaps.append(_taylor_gap(measured, predicted))
        slope = float(np.polyfit(np.log(taus), np.log(gaps), 1)[0])
        shortfall = max(shortfall, 5.0 - slope)
    # data agree through fourth order, so the gaps decay at fifth;
    # the residual recorded here is the shortfall against exactly 5
    checks["taylor_convergence_order"] = _check(shortfall, 0.4)

    if not fast:
        fit_taus = np.array([0.005, 0.0075, 0.01, 0.0125, 0.015,
                             0.017, 0.0185, 0.02])
        ratios = []
        for tau in fit_taus:
            data = geodesic_sphere(metric, center, tau, ggrid)
            ratios.append(hawking_mass(data.gamma1, data.H1))
        u = fit_taus ** 2
        design = np.stack([np.ones_like(u), u, u * u, u ** 3], axis=1)
        coef, *_ = np.linalg.lstsq(design, np.array(ratios), rcond=None)
        c3_res = abs(coef[1] - ref.hawking_c3) / abs(ref.hawking_c3)
        c5_res = abs(coef[2] - ref.hawking_c5) / abs(ref.hawking_c5)
        checks["hawking_cubic_coefficient"] = _check(c3_res, 1e-2)
        checks["hawking_quintic_coefficient"] = _check(c5_res, 1e-2)
    return checks


_SUITES = {
    "moments": _suite_moments,
    "multipliers": _suite_multipliers,
    "invariants": _suite_invariants,
    "conformal": _suite_conformal,
    "linearized": _suite_linearized,
    "flux": _suite_flux,
    "variations": _suite_variations,
    "boundary": _suite_boundary,
    "anchors": _suite_anchors,
    "taylor": _suite_taylor,
}

SUITE_NAMES = tuple(_SUITES)


def run_suite(name: str, seed: int = 0, lmax: int = 16, fast: bool = True) -> dict:
    """Run one suite; the rng depends only on (seed, suite), not the subset."""
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    index = SUITE_NAMES.index(name)
    rng = np.random.default_rng([seed, index])
    checks = _SUITES[name](rng, lmax, fast)
    return {"checks": checks, "passed": all(c["passed"] for c in checks.values())}


def run_all(names=None, seed: int = 0, lmax: int = 16, fast: bool = True) -> dict:
    """Run the named suites (all by default) and aggregate the verdict."""
    if names is None:
        names = SUITE_NAMES
    suites = {name: run_suite(name, seed=seed, lmax=lmax, fast=fast)
              for name in names}
    return {"suites": suites, "passed": all(s["passed"] for s in suites.values())}
