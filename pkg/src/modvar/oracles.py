"""Independent numerical validation of every closed form in the package:
characteristic-function quadrature, translated momentum moments, the
expectation-value evolution check, PDE residuals, ODE trajectory
integration, and a spectral grid propagator.

These routines never reuse the closed-form answers they test; they
integrate, differentiate, or propagate from more primitive definitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate

from .params import (
    BathParams,
    GaussianPacket,
    ParameterError,
    PhysicalConstants,
    SuperpositionSpec,
    TimeGrid,
)
from .schrodinger import (
    BohmianTrajectory,
    DomainError,
    _packet_amplitude_dx,
    _superposed_amplitude_dx,
    packet_amplitude,
    packet_state,
    superposed_amplitude,
)
from .caldeira_leggett import (
    QuadratureError,
    _center_width,
    _eval_parts,
    _eval_parts_dr,
    _quad_complex,
    _term_parts,
)


@dataclass(frozen=True)
class ResidualReport:
    """Outcome of a finite-difference consistency check."""

    max_abs_residual: float
    relative_residual: float
    steps: tuple
    convergence_ratio: float


@dataclass(frozen=True)
class SchrodingerSource:
    """Pure-state source: a superposition or a single packet."""

    state: Union[SuperpositionSpec, GaussianPacket]
    c: PhysicalConstants

    def amplitude(self, x, t):
        if isinstance(self.state, SuperpositionSpec):
            return superposed_amplitude(self.state, self.c, x, t)
        return packet_amplitude(self.state, self.c, x, t)

    def amplitude_dx(self, x, t):
        if isinstance(self.state, SuperpositionSpec):
            return _superposed_amplitude_dx(self.state, self.c, x, t)
        return _packet_amplitude_dx(self.state, self.c, x, t)

    def centers_width(self, t):
        if isinstance(self.state, SuperpositionSpec):
            packets = [self.state.packetA, self.state.packetB]
        else:
            packets = [self.state]
        centers = [packet_state(p, self.c, t).x_t for p in packets]
        width = max(packet_state(p, self.c, t).sigma_t for p in packets)
        return centers, width


@dataclass(frozen=True)
class CLSource:
    """Dissipative source: analytic density matrix of a superposition or a
    single packet."""

    state: Union[SuperpositionSpec, GaussianPacket]
    bath: BathParams
    c: PhysicalConstants
    h_coeff: float | None = None

    def parts(self, t):
        if isinstance(self.state, SuperpositionSpec):
            return _term_parts(self.state, self.bath, self.c, t, self.h_coeff)
        # single packet: one term with the same shared quadratic/slope structure
        p = self.state
        c, b = self.c, self.bath
        from .params import scaled_time_tau

        tau = scaled_time_tau(b.gamma, t)
        tau4 = scaled_time_tau(2.0 * b.gamma, t)
        e2 = math.exp(-2.0 * b.gamma * t)
        x_t, w, _ = _center_width(p, b.gamma, b.D, c, t)
        quad = -(b.D * tau4 / c.hbar**2 + e2 * e2 / (8.0 * p.sigma0**2))
        slope = -(b.D * tau**2 / (c.hbar * c.m) + c.hbar * tau * e2 / (4.0 * c.m * p.sigma0**2))
        lin = -1j * c.m * c.g * tau / c.hbar + 1j * (p.p0 / c.hbar) * e2
        beta = 1j * float(x_t)
        return (float(w), quad, slope, [(0.0, lin, beta)], [1.0])

    def centers_width(self, t):
        parts = self.parts(t)
        return [beta.imag for (_, _, beta) in parts[3]], parts[0]


Source = Union[SchrodingerSource, CLSource]


class CharacteristicFunction:
    """chi(r, t) = integral over R of rho(r, R, t), with error estimate.

    For pure states rho(r, R) = Psi(R + r/2) Psi*(R - r/2)."""

    def __init__(self, source: Source):
        self.source = source

    def __call__(self, r: float, t: float):
        if isinstance(self.source, SchrodingerSource):
            centers, width = self.source.centers_width(t)
            hints = sorted(set(centers) | {c - r for c in centers})
            lo, hi = hints[0] - 15.0 * width, hints[-1] + 15.0 * width

            def f(x):
                return np.conj(self.source.amplitude(x, t)) * self.source.amplitude(x + r, t)

            return _quad_complex(f, lo, hi, points=[h for h in hints if lo < h < hi])
        parts = self.source.parts(t)
        peaks, width = self.source.centers_width(t)
        hints = sorted(peaks)
        lo, hi = hints[0] - 15.0 * width, hints[-1] + 15.0 * width

        def f(R):
            return _eval_parts(parts, r, np.asarray(R))

        return _quad_complex(f, lo, hi, points=[h for h in hints if lo < h < hi])

    def d_dr(self, r: float, t: float):
        """chi'(r, t) by quadrature of the r-derivative of the integrand."""
        if isinstance(self.source, SchrodingerSource):
            centers, width = self.source.centers_width(t)
            hints = sorted(set(centers) | {c - r for c in centers})
            lo, hi = hints[0] - 15.0 * width, hints[-1] + 15.0 * width

            def f(x):
                return np.conj(self.source.amplitude(x, t)) * self.source.amplitude_dx(x + r, t)

            return _quad_complex(f, lo, hi, points=[h for h in hints if lo < h < hi])
        parts = self.source.parts(t)
        peaks, width = self.source.centers_width(t)
        hints = sorted(peaks)
        lo, hi = hints[0] - 15.0 * width, hints[-1] + 15.0 * width

        def f(R):
            return _eval_parts_dr(parts, r, np.asarray(R))

        return _quad_complex(f, lo, hi, points=[h for h in hints if lo < h < hi])


def characteristic_modular(source: Source, t: float, ell: float) -> complex:
    """<e^{i p ell / hbar}> by adaptive quadrature."""
    val, err = CharacteristicFunction(source)(ell, t)
    if err > 1e-8:
        raise QuadratureError("characteristic quadrature error %.3g" % err)
    return val


def modular_via_momentum_grid(spec, c, t: float, ell: float, n: int = 2**14) -> complex:
    """Cross-check route: discrete-Fourier momentum distribution of the pure
    state, then <e^{i p ell / hbar}> as a momentum-space sum."""
    src = SchrodingerSource(spec, c)
    centers, width = src.centers_width(t)
    # box span must exceed twice the translation length: the p-density of a
    # two-packet state carries fringes at dual position +-L, and the weighted
    # sum has components out to 2 ell that alias back through the DFT period
    pad = 20.0 * width + abs(ell)
    lo = min(centers) - pad
    hi = max(centers) + pad
    x = np.linspace(lo, hi, n, endpoint=False)
    dx = x[1] - x[0]
    psi = src.amplitude(x, t)
    # momentum grid of the DFT with hbar folded in
    p = 2.0 * math.pi * c.hbar * np.fft.fftfreq(n, d=dx)
    psi_p = np.fft.fft(psi) * dx / math.sqrt(2.0 * math.pi * c.hbar)
    prob = np.abs(psi_p) ** 2
    dp = 2.0 * math.pi * c.hbar / (n * dx)
    norm = prob.sum() * dp
    return complex((prob * np.exp(1j * p * ell / c.hbar)).sum() * dp / norm)


def momentum_first_moment_translated(
    source: Source, t: float, ell: float, method: str = "analytic"
) -> complex:
    """<p e^{i p ell / hbar}> = (hbar/i) d chi / d r at r = ell.

    method="fd" replaces the integrand derivative by Richardson central
    differences of chi itself; the two must agree closely.
    """
    hbar = source.c.hbar
    cf = CharacteristicFunction(source)
    if method == "analytic":
        val, err = cf.d_dr(ell, t)
        if err > 1e-8:
            raise QuadratureError("moment quadrature error %.3g" % err)
        return (hbar / 1j) * val
    if method != "fd":
        raise ParameterError("method must be 'analytic' or 'fd'")
    h = 1e-4
    d_h = (cf(ell + h, t)[0] - cf(ell - h, t)[0]) / (2.0 * h)
    d_h2 = (cf(ell + h / 2, t)[0] - cf(ell - h / 2, t)[0]) / h
    rich = (4.0 * d_h2 - d_h) / 3.0
    if abs(rich - d_h2) > 1e-6 * max(1.0, abs(rich)):
        raise QuadratureError("derivative estimate not converged")
    return (hbar / 1j) * rich


def _time_derivative_sweep(f: Callable[[float], complex], t: float, h0: float = 1e-3):
    """Central-difference df/dt with automatic step refinement.

    Halves the step until successive estimates stop improving, then returns
    (best estimate, step used, convergence ratio of the last clean pair).
    """
    estimates = []
    h = h0
    for _ in range(10):
        estimates.append(((f(t + h) - f(t - h)) / (2.0 * h), h))
        h *= 0.5
        if len(estimates) >= 3:
            d1 = abs(estimates[-2][0] - estimates[-3][0])
            d2 = abs(estimates[-1][0] - estimates[-2][0])
            if d2 == 0.0 or d1 == 0.0:
                break
            if d2 > 0.5 * d1:
                # roundoff floor reached; earlier pair still shows the order
                break
    if len(estimates) < 3:
        return estimates[-1][0], estimates[-1][1], float("nan")
    d1 = abs(estimates[-2][0] - estimates[-3][0])
    d2 = abs(estimates[-1][0] - estimates[-2][0])
    ratio = d1 / d2 if d2 > 0 else float("inf")
    return estimates[-1][0], estimates[-1][1], ratio


def heisenberg_rhs_check(
    spec: SuperpositionSpec, b: BathParams, c: PhysicalConstants, t: float
) -> ResidualReport:
    """Check d/dt <e^{i p L / hbar}> against
    (-i m g L / hbar - D L^2 / hbar^2) <e^{i p L / hbar}>
      - 2 gamma i (L / hbar) <p e^{i p L / hbar}>,
    all expectations taken on the analytic density matrix by quadrature."""
    L, hbar = spec.L, c.hbar
    source = CLSource(spec, b, c)
    cf = CharacteristicFunction(source)

    lhs, step, ratio = _time_derivative_sweep(lambda s: cf(L, s)[0], t)
    chi = cf(L, t)[0]
    mom = momentum_first_moment_translated(source, t, L)
    term1 = (-1j * c.m * c.g * L / hbar - b.D * L**2 / hbar**2) * chi
    term2 = -2.0 * b.gamma * 1j * (L / hbar) * mom
    rhs = term1 + term2
    resid = abs(lhs - rhs)
    scale = max(abs(term1), abs(term2), abs(lhs), 1e-30)
    return ResidualReport(
        max_abs_residual=resid,
        relative_residual=resid / scale,
        steps=(step,),
        convergence_ratio=ratio,
    )


def _sample_supports(framework, spec, b, c, n, t_max=2.0, seed=7):
    """Deterministic sample points inside the evolving packet supports."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        t = rng.uniform(0.05, t_max)
        packet = spec.packetA if rng.uniform() < 0.5 else spec.packetB
        if framework == "schrodinger":
            st = packet_state(packet, c, t)
            x = st.x_t + rng.uniform(-2.0, 2.0) * st.sigma_t
            pts.append((x, t))
        else:
            x_t, w, _ = _center_width(packet, b.gamma, b.D, c, t)
            R = float(x_t) + rng.uniform(-2.0, 2.0) * float(w)
            r = rng.uniform(-3.0, 3.0) * spec.sigma0
            pts.append((r, R, t))
    return pts


def _schrodinger_residual_at(spec, c, x, t, h, field=None):
    psi = field if field is not None else (lambda xx, tt: superposed_amplitude(spec, c, xx, tt))
    # phase rotates at rate ~ m|g x|/hbar, much faster than the spatial
    # scales; the time stencil needs a finer step than the space stencil
    ht = 0.1 * h
    p_t = (psi(x, t + ht) - psi(x, t - ht)) / (2.0 * ht)
    p_xx = (psi(x + h, t) - 2.0 * psi(x, t) + psi(x - h, t)) / (h * h)
    t1 = 1j * c.hbar * p_t
    t2 = c.hbar**2 * p_xx / (2.0 * c.m)
    t3 = -c.m * c.g * x * psi(x, t)
    resid = t1 + t2 + t3
    return abs(resid), max(abs(t1), abs(t2), abs(t3), 1e-30)


def _cl_residual_at(spec, b, c, r, R, t, h, h_coeff=None, field=None):
    if field is not None:
        rho = field
    else:
        def rho(rr, RR, tt):
            return complex(
                _eval_parts(_term_parts(spec, b, c, tt, h_coeff), rr, np.asarray(RR))
            )
    r_t = (rho(r, R, t + h) - rho(r, R, t - h)) / (2.0 * h)
    r_r = (rho(r + h, R, t) - rho(r - h, R, t)) / (2.0 * h)
    r_rR = (
        rho(r + h, R + h, t)
        - rho(r + h, R - h, t)
        - rho(r - h, R + h, t)
        + rho(r - h, R - h, t)
    ) / (4.0 * h * h)
    val = rho(r, R, t)
    t1 = r_t
    t2 = -(1j * c.hbar / c.m) * r_rR
    t3 = 2.0 * b.gamma * r * r_r
    t4 = (b.D / c.hbar**2) * r * r * val
    t5 = -(c.m * c.g / (1j * c.hbar)) * r * val
    resid = t1 + t2 + t3 + t4 + t5
    return abs(resid), max(abs(t1), abs(t2), abs(t3), abs(t4), abs(t5), 1e-30)


def pde_residual(
    framework: str,
    spec: SuperpositionSpec,
    b: BathParams,
    c: PhysicalConstants,
    points=None,
    h_coeff: float | None = None,
    step: float = 1e-4,
    field=None,
) -> ResidualReport:
    """Finite-difference residual of the governing equation on the analytic
    solution (or on an explicit `field` callable).

    framework "schrodinger": i hbar psi_t + hbar^2/(2m) psi_xx - m g x psi.
    framework "cl": rho_t - (i hbar/m) rho_rR + 2 gamma r rho_r
                    + (D/hbar^2) r^2 rho - (m g/(i hbar)) r rho.
    Reports the worst relative residual and the step-halving convergence
    ratio of the residual maxima.
    """
    if framework not in ("schrodinger", "cl"):
        raise ParameterError("framework must be 'schrodinger' or 'cl'")
    if points is None:
        points = _sample_supports(framework, spec, b, c, 40)

    def max_resid(h):
        worst_abs, worst_rel = 0.0, 0.0
        for pt in points:
            if framework == "schrodinger":
                absr, scale = _schrodinger_residual_at(spec, c, pt[0], pt[1], h, field)
            else:
                absr, scale = _cl_residual_at(
                    spec, b, c, pt[0], pt[1], pt[2], h, h_coeff, field
                )
            worst_abs = max(worst_abs, absr)
            worst_rel = max(worst_rel, absr / scale)
        return worst_abs, worst_rel

    abs_h, rel_h = max_resid(step)
    abs_2h, rel_2h = max_resid(2.0 * step)
    ratio = abs_2h / abs_h if abs_h > 0 else float("inf")
    return ResidualReport(
        max_abs_residual=abs_h,
        relative_residual=rel_h,
        steps=(step, 2.0 * step),
        convergence_ratio=ratio,
    )


def trajectory_ode_oracle(
    velocity_field: Callable[[float, float], float], X0: float, grid: TimeGrid
) -> BohmianTrajectory:
    """Integrate dX/dt = v(X, t) with tight adaptive error control."""
    ts = grid.times()
    sol = integrate.solve_ivp(
        lambda t, y: [velocity_field(y[0], t)],
        (ts[0], ts[-1]),
        [X0],
        method="DOP853",
        t_eval=ts,
        rtol=1e-10,
        atol=1e-12,
    )
    if not sol.success:
        raise RuntimeError("trajectory integration failed: %s" % sol.message)
    return BohmianTrajectory(X0=X0, samples=np.column_stack([sol.t, sol.y[0]]))


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the spectral propagation oracle."""

    n_points: int = 4096
    t_final: float = 2.0
    n_steps: int = 8000


@dataclass(frozen=True)
class GridPropagation:
    """Propagated state with conservation diagnostics."""

    x: np.ndarray
    psi: np.ndarray
    norm_drift: float
    boundary_peak: float
    dt: float


def _propagation_box(spec, c, t_final):
    """Domain covering every classical center over [0, t_final] plus tails."""
    ts = np.linspace(0.0, t_final, 65)
    centers = []
    for p in (spec.packetA, spec.packetB):
        centers.append(p.x0 + p.p0 * ts / c.m - 0.5 * c.g * ts**2)
    centers = np.concatenate(centers)
    sigma_max = packet_state(spec.packetA, c, t_final).sigma_t
    return float(centers.min() - 15.0 * sigma_max), float(centers.max() + 15.0 * sigma_max)


def grid_propagator(
    spec: SuperpositionSpec, c: PhysicalConstants, grid: GridSpec = GridSpec()
) -> GridPropagation:
    """Propagate the initial superposition with second-order operator
    splitting: half potential, full kinetic (discrete Fourier), half
    potential.  The potential is linear, so the splitting defect is a pure
    c-number phase of order dt^2 per unit time."""
    lo, hi = _propagation_box(spec, c, grid.t_final)
    n = grid.n_points
    x = np.linspace(lo, hi, n, endpoint=False)
    dx = x[1] - x[0]
    kx = 2.0 * math.pi * np.fft.fftfreq(n, d=dx)
    dt = grid.t_final / grid.n_steps

    psi = superposed_amplitude(spec, c, x, 0.0)
    half_v = np.exp(-1j * c.m * c.g * x * dt / (2.0 * c.hbar))
    kin = np.exp(-1j * c.hbar * kx**2 * dt / (2.0 * c.m))

    norm0 = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dx)
    worst_norm = 0.0
    worst_edge = 0.0
    check_every = max(1, grid.n_steps // 100)
    for step in range(grid.n_steps):
        psi = half_v * psi
        psi = np.fft.ifft(kin * np.fft.fft(psi))
        psi = half_v * psi
        if (step + 1) % check_every == 0 or step == grid.n_steps - 1:
            dens = np.abs(psi) ** 2
            norm = math.sqrt(float(dens.sum()) * dx)
            worst_norm = max(worst_norm, abs(norm - norm0))
            edge = float(max(dens[:8].max(), dens[-8:].max()))
            worst_edge = max(worst_edge, edge)
            if edge > 1e-12:
                raise DomainError(
                    "boundary density %.3g exceeds 1e-12; enlarge the box" % edge
                )
    return GridPropagation(x=x, psi=psi, norm_drift=worst_norm, boundary_peak=worst_edge, dt=dt)


def l2_error(x: np.ndarray, psi_a: np.ndarray, psi_b: np.ndarray) -> float:
    """Discrete L2 distance between two sampled wavefunctions."""
    dx = x[1] - x[0]
    return math.sqrt(float(np.sum(np.abs(psi_a - psi_b) ** 2)) * dx)
