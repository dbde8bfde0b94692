"""Analytic dissipative evolution of the superposed density matrix, the
matching Bohmian kinematics, and modular/translation observables with
diagnostics.

The density matrix is expressed in relative/midpoint coordinates
r = x - x', R = (x + x')/2 as a weighted sum of four Gaussian terms

    rho_j(r, R, t) = (1/(sqrt(2 pi) w_t)) exp[a_j(r,t) - (R + i b_j(r,t))^2 / (2 w_t^2)]

with a_j quadratic and b_j linear in r.  All coefficients are evaluated in
cancellation-free form through the scaled times tau_c(t) = -expm1(-c t)/c,
so the gamma -> 0 limit is exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .params import (
    BathParams,
    GaussianPacket,
    ParameterError,
    PhysicalConstants,
    SuperpositionSpec,
    TimeGrid,
    TimeSeries,
    friction_drift,
    scaled_time_tau,
)
from .schrodinger import BohmianTrajectory, DomainError

_UNDERFLOW = 1e-300

# Taylor coefficients of f(u) = 3 + e^{-2u} - 4 e^{-u} - 2u = sum c_n u^n,
# c_n = ((-2)^n - 4 (-1)^n) / n!, nonzero from n = 3 on.  The bracket feeds
# the diffusive width correction and cancels badly for small u.
_BRACKET_COEFFS = [
    ((-2.0) ** n - 4.0 * (-1.0) ** n) / math.factorial(n) for n in range(3, 17)
]


def _width_bracket_over_u3(u):
    """(3 + e^{-2u} - 4 e^{-u} - 2u) / u^3, stable for all u >= 0."""
    u = np.asarray(u, dtype=float)
    small = u <= 0.5
    # series sum_{n>=3} c_n u^{n-3}; 14 terms keep full precision up to the switch
    acc = np.zeros_like(u)
    for cn in reversed(_BRACKET_COEFFS):
        acc = acc * u + cn
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (3.0 + np.exp(-2.0 * u) - 4.0 * np.exp(-u) - 2.0 * u) / u**3
    out = np.where(small, acc, closed)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class PacketStateCL:
    """Dissipatively evolved packet parameters: center x_t, width w_t and the
    friction-scaled time tau."""

    x_t: float
    w_t: float
    tau: float


@dataclass(frozen=True)
class TermCoefficients:
    """Coefficients a_j(r,t), b_j(r,t) of the j-th Gaussian term, j in 1..4."""

    a: complex
    b: complex
    j: int


def _center_width(p: GaussianPacket, gamma: float, D: float, c: PhysicalConstants, ts):
    """Vectorized center and width of one packet for a given rate/diffusion.

    Kept separate from the bath object so window solvers can rescale the
    rate while holding D fixed.
    """
    ts = np.asarray(ts, dtype=float)
    m, hbar, g = c.m, c.hbar, c.g
    s0 = p.sigma0
    tau = _tau_vec(gamma, ts)
    drift = _drift_vec(gamma, ts)
    x_t = p.x0 + p.p0 * tau / m - g * drift
    # diffusive broadening: -(bracket) D/(8 m^2 gamma^3) = -D t^3 h(u)/m^2, u = 2 gamma t
    u = 2.0 * gamma * ts
    w_sq = s0**2 * (1.0 + (hbar * tau) ** 2 / (4.0 * m**2 * s0**4)) \
        - D * ts**3 * _width_bracket_over_u3(u) / m**2
    w_t = np.sqrt(w_sq)
    return x_t, w_t, tau


def _tau_vec(gamma, ts):
    ts = np.asarray(ts, dtype=float)
    if gamma == 0.0:
        return ts.copy() if ts.shape else float(ts)
    gt = gamma * ts
    series = ts * (1.0 + gt * (-1.0 + gt * (2.0 / 3.0 + gt * (-1.0 / 3.0 + gt * 2.0 / 15.0))))
    closed = -np.expm1(-2.0 * gamma * ts) / (2.0 * gamma)
    out = np.where(gt < 1e-4, series, closed)
    return out if out.shape else float(out)


def _drift_vec(gamma, ts):
    ts = np.asarray(ts, dtype=float)
    if gamma == 0.0:
        out = 0.5 * ts * ts
        return out if out.shape else float(out)
    gt = gamma * ts
    series = ts * ts * (0.5 + gt * (-1.0 / 3.0 + gt * (1.0 / 6.0 + gt * (-1.0 / 15.0 + gt / 45.0))))
    closed = (ts - _tau_vec(gamma, ts)) / (2.0 * gamma)
    out = np.where(gt < 1e-4, series, closed)
    return out if out.shape else float(out)


def cl_packet_state(
    p: GaussianPacket, b: BathParams, c: PhysicalConstants, t: float
) -> PacketStateCL:
    """Evolve one packet's center and width under friction and diffusion."""
    x_t, w_t, tau = _center_width(p, b.gamma, b.D, c, t)
    return PacketStateCL(x_t=float(x_t), w_t=float(w_t), tau=float(tau))


def cl_bohmian_trajectory(
    p: GaussianPacket, b: BathParams, c: PhysicalConstants, X0: float, grid: TimeGrid
) -> BohmianTrajectory:
    """X(t) = x_t + (X0 - x0) w_t / sigma0 on the grid."""
    ts = grid.times()
    x_t, w_t, _ = _center_width(p, b.gamma, b.D, c, ts)
    X = x_t + (X0 - p.x0) * w_t / p.sigma0
    return BohmianTrajectory(X0=X0, samples=np.column_stack([ts, X]))


def _term_parts(spec, b, c, t, h_coeff=None):
    """Shared coefficient structure at time t.

    Returns (w, quad, slope, [(A_j, lin_j, beta_j)]_j, weights) where
    a_j(r) = A_j + lin_j r + quad r^2 and b_j(r) = beta_j + slope r.
    """
    m, hbar, g = c.m, c.hbar, c.g
    gamma, D = b.gamma, b.D
    s0 = spec.sigma0
    L, k = spec.L, spec.k
    h = c.hbar if h_coeff is None else h_coeff

    tau = scaled_time_tau(gamma, t)
    tau4 = scaled_time_tau(2.0 * gamma, t)  # (1 - e^{-4 gamma t}) / (4 gamma)
    drift = friction_drift(gamma, t)
    e2 = math.exp(-2.0 * gamma * t)

    _, w_arr, _ = _center_width(spec.packetA, gamma, D, c, t)
    w = float(w_arr)

    quad = -(D * tau4 / hbar**2 + e2 * e2 / (8.0 * s0**2))
    slope = -(D * tau**2 / (hbar * m) + hbar * tau * e2 / (4.0 * m * s0**2))

    lin1 = -1j * m * g * tau / hbar
    beta1 = -1j * (L / 2.0 + g * drift)

    lin2 = lin1 + 1j * k * e2
    beta2 = beta1 + 1j * (L + h * k * tau / m)

    A3 = -(4.0 * k**2 * s0**4 + 4j * k * L * s0**2 + L**2) / (8.0 * s0**2)
    lin3 = lin1 + e2 * (L + 2j * k * s0**2) / (4.0 * s0**2)
    beta3 = beta1 + (L + 2j * k * s0**2) * (hbar * tau + 2j * m * s0**2) / (4.0 * m * s0**2)

    A4 = A3 + 1j * k * L
    lin4 = lin3 - L * e2 / (2.0 * s0**2)
    beta4 = beta3 + 2.0 * k * s0**2 - hbar * L * tau / (2.0 * m * s0**2)

    terms = [(0.0, lin1, beta1), (0.0, lin2, beta2), (A3, lin3, beta3), (A4, lin4, beta4)]
    # equal-weight superposition: each term carries 1/2
    weights = [0.5, 0.5, 0.5 * cmath.exp(1j * spec.alpha), 0.5 * cmath.exp(-1j * spec.alpha)]
    return w, quad, slope, terms, weights


def _eval_parts(parts, r, R):
    """rho(r, R) from precomputed coefficient parts (broadcasts r and R)."""
    w, quad, slope, terms, weights = parts
    r = np.asarray(r)
    R = np.asarray(R)
    pref = 1.0 / (math.sqrt(2.0 * math.pi) * w)
    total = 0.0j
    for (A, lin, beta), wt in zip(terms, weights):
        a = A + lin * r + quad * r * r
        bb = beta + slope * r
        total = total + wt * np.exp(a - (R + 1j * bb) ** 2 / (2.0 * w * w))
    return pref * total


def _eval_parts_dr(parts, r, R):
    """Analytic d rho / d r from precomputed parts."""
    w, quad, slope, terms, weights = parts
    r = np.asarray(r)
    R = np.asarray(R)
    pref = 1.0 / (math.sqrt(2.0 * math.pi) * w)
    total = 0.0j
    for (A, lin, beta), wt in zip(terms, weights):
        a = A + lin * r + quad * r * r
        bb = beta + slope * r
        term = np.exp(a - (R + 1j * bb) ** 2 / (2.0 * w * w))
        dlog = lin + 2.0 * quad * r - 1j * slope * (R + 1j * bb) / (w * w)
        total = total + wt * term * dlog
    return pref * total


class CLDensityMatrix:
    """Evaluator of the analytic density matrix over (r, R, t)."""

    def __init__(self, spec, bath, constants, h_coeff=None):
        self.spec = spec
        self.bath = bath
        self.constants = constants
        self.h_coeff = h_coeff
        self._cache_t = None
        self._cache_parts = None

    def _parts(self, t):
        if self._cache_t != t:
            self._cache_parts = _term_parts(
                self.spec, self.bath, self.constants, t, self.h_coeff
            )
            self._cache_t = t
        return self._cache_parts

    def __call__(self, r, R, t):
        return _eval_parts(self._parts(t), r, R)

    def d_dr(self, r, R, t):
        return _eval_parts_dr(self._parts(t), r, R)

    def diagonal_peaks(self, t):
        """R positions of the four term peaks (Im of the b_j offsets)."""
        w, quad, slope, terms, _ = self._parts(t)
        return [beta.imag for (_, _, beta) in terms], w


def term_coefficients(
    j: int,
    spec: SuperpositionSpec,
    b: BathParams,
    c: PhysicalConstants,
    r: float,
    t: float,
    h_coeff: float | None = None,
) -> TermCoefficients:
    """a_j(r,t) and b_j(r,t) for term j in 1..4.

    h_coeff overrides the constant multiplying the kick drift in b_2
    (defaults to hbar); exposed so oracle sensitivity tests can perturb it.
    """
    if j not in (1, 2, 3, 4):
        raise ParameterError("term index must be 1..4")
    w, quad, slope, terms, _ = _term_parts(spec, b, c, t, h_coeff)
    A, lin, beta = terms[j - 1]
    a = A + lin * r + quad * r * r
    bb = beta + slope * r
    return TermCoefficients(a=complex(a), b=complex(bb), j=j)


def density_matrix_rR(
    spec: SuperpositionSpec,
    b: BathParams,
    c: PhysicalConstants,
    r,
    R,
    t: float,
    h_coeff: float | None = None,
):
    """rho(r, R, t) = (1/2)[rho1 + rho2 + e^{i alpha} rho3 + e^{-i alpha} rho4]."""
    parts = _term_parts(spec, b, c, t, h_coeff)
    return _eval_parts(parts, r, R)


def cl_density(spec, b, c, x, t: float):
    """Diagonal rho(x, x, t); real and nonnegative."""
    val = density_matrix_rR(spec, b, c, 0.0, x, t)
    out = np.real(val)
    return out if out.shape else float(out)


def cl_current(spec, b, c, x, t: float, method: str = "analytic"):
    """Probability current j(x,t) = (hbar/m) Im d rho/d r at (r=0, R=x).

    method="step" switches to a Richardson central-difference fallback used
    to validate the analytic derivative.
    """
    parts = _term_parts(spec, b, c, t)
    x = np.asarray(x, dtype=float)
    if method == "analytic":
        d = _eval_parts_dr(parts, 0.0, x)
    elif method == "step":
        h = 1e-5
        d4 = (_eval_parts(parts, h, x) - _eval_parts(parts, -h, x)) / (2.0 * h)
        d2 = (_eval_parts(parts, h / 2, x) - _eval_parts(parts, -h / 2, x)) / h
        d = (4.0 * d2 - d4) / 3.0
    else:
        raise ParameterError("method must be 'analytic' or 'step'")
    out = (c.hbar / c.m) * np.imag(d)
    return out if out.shape else float(out)


def local_translation(spec, b, c, x: float, t: float) -> complex:
    """Local displacement value rho(x+L, x, t) / rho(x, x, t)."""
    parts = _term_parts(spec, b, c, t)
    den = _eval_parts(parts, 0.0, np.asarray(x))
    if abs(den) < _UNDERFLOW:
        raise DomainError("rho(x, x, t) underflows at x = %g" % x)
    num = _eval_parts(parts, spec.L, np.asarray(x + spec.L / 2.0))
    return complex(num / den)


def cl_local_modular_on_trajectory(
    spec, b, c, X0: float, grid: TimeGrid, support_factor: float = 5.0
) -> TimeSeries:
    """Local Hermitian modular value along the left packet's trajectory:
    Re{[rho(X+L, X) + rho(X-L, X)] / (2 rho(X, X))}."""
    import warnings as _warnings

    pA = spec.packetA
    if abs(X0 - pA.x0) > support_factor * pA.sigma0:
        _warnings.warn(
            "X0 = %g lies outside the left packet's %g-sigma support" % (X0, support_factor)
        )
    traj = cl_bohmian_trajectory(pA, b, c, X0, grid)
    L = spec.L
    vals = np.empty(len(traj.t))
    for i, (t, X) in enumerate(traj.samples):
        parts = _term_parts(spec, b, c, t)
        den = _eval_parts(parts, 0.0, np.asarray(X))
        if abs(den) < _UNDERFLOW:
            raise DomainError("rho(X, X, t) underflows at t = %g" % t)
        up = _eval_parts(parts, L, np.asarray(X + L / 2.0))
        dn = _eval_parts(parts, -L, np.asarray(X - L / 2.0))
        vals[i] = np.real((up + dn) / (2.0 * den))
    return TimeSeries(
        t=traj.t,
        values=vals,
        provenance="cl local modular, X0=%g, alpha=%g, gamma=%g, T=%g"
        % (X0, spec.alpha, b.gamma, b.T),
    )


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature fails to converge."""


def _quad_complex(f, lo, hi, points=None, epsabs=1e-13, epsrel=1e-11, limit=200):
    re, re_err = integrate.quad(
        lambda x: f(x).real, lo, hi, points=points, epsabs=epsabs, epsrel=epsrel, limit=limit
    )
    im, im_err = integrate.quad(
        lambda x: f(x).imag, lo, hi, points=points, epsabs=epsabs, epsrel=epsrel, limit=limit
    )
    return complex(re, im), re_err + im_err


def _line_scale(parts, r0):
    """Peak magnitude of the density-matrix parts along the line r = r0.

    Each part's R profile is a displaced complex Gaussian; its pointwise
    magnitude peaks exp(Re(u)^2 / 2w^2) above its own integral (u is the
    displacement), so deep in the decohered regime every value can sit far
    below the adaptive quadrature's absolute tolerance and the refinement
    would stop early.  Dividing the integrand by this scale keeps the
    tolerances acting relative to the largest part.
    """
    w, quad, slope, terms, weights = parts
    best = -math.inf
    for wt, (A, lin, beta) in zip(weights, terms):
        if wt == 0:
            continue
        u = beta + slope * r0
        expo = (A + lin * r0 + quad * r0 * r0).real + u.real**2 / (2.0 * w * w)
        best = max(best, math.log(abs(wt)) + expo)
    return math.exp(best) if best > -700.0 else 0.0


def cl_modular_quadrature(spec, b, c, t: float, ell: float) -> float:
    """<cos(p ell / hbar)> by adaptive quadrature of the analytic density
    matrix over the packets' effective supports; valid for any ell."""
    parts = _term_parts(spec, b, c, t)
    w = parts[0]
    peaks = [beta.imag for (_, _, beta) in parts[3]]
    pad = 15.0 * w

    def run(sign):
        # integrand rho(x' + sign*ell, x') at midpoint R = x' + sign*ell/2
        scale = _line_scale(parts, sign * ell)
        if scale == 0.0:
            return 0.0 + 0.0j
        hints = sorted(p - sign * ell / 2.0 for p in peaks)
        lo, hi = hints[0] - pad, hints[-1] + pad
        interior = [p for p in hints if lo < p < hi]
        f = lambda xp: _eval_parts(parts, sign * ell, np.asarray(xp + sign * ell / 2.0)) / scale
        val, err = _quad_complex(f, lo, hi, points=interior)
        if err > 1e-8:
            raise QuadratureError(
                "translation quadrature error %.3g at t=%g, ell=%g" % (err, t, ell)
            )
        return val * scale

    plus = run(+1.0)
    minus = run(-1.0)
    return float(np.real((plus + minus) / 2.0))


def cl_translation_quadrature(spec, b, c, t: float, ell: float) -> complex:
    """<e^{i p ell / hbar}> = integral of rho(x'+ell, x', t) dx'."""
    parts = _term_parts(spec, b, c, t)
    w = parts[0]
    peaks = [beta.imag for (_, _, beta) in parts[3]]
    pad = 15.0 * w
    scale = _line_scale(parts, ell)
    if scale == 0.0:
        return 0.0 + 0.0j
    hints = sorted(p - ell / 2.0 for p in peaks)
    lo, hi = hints[0] - pad, hints[-1] + pad
    interior = [p for p in hints if lo < p < hi]
    f = lambda xp: _eval_parts(parts, ell, np.asarray(xp + ell / 2.0)) / scale
    val, err = _quad_complex(f, lo, hi, points=interior)
    if err > 1e-8:
        raise QuadratureError(
            "translation quadrature error %.3g at t=%g, ell=%g" % (err, t, ell)
        )
    return val * scale


def cl_modular_envelope_phase(spec, b, c, t: float):
    """Envelope and cosine argument of the dissipative modular signal."""
    m, hbar, g = c.m, c.hbar, c.g
    gamma, D = b.gamma, b.D
    s0, L, k = spec.sigma0, spec.L, spec.k
    tau = scaled_time_tau(gamma, t)
    tau4 = scaled_time_tau(2.0 * gamma, t)
    envelope = 0.5 * math.exp(
        -D * L**2 * tau4 / hbar**2
        - L**2 * gamma**2 * tau**2 / (2.0 * s0**2)
        - 0.5 * k**2 * s0**2
    )
    phase = spec.alpha - L * tau * (k * gamma + m * g / hbar)
    return envelope, phase


def cl_modular_closed(spec, b, c, t: float) -> float:
    """Closed-form dissipative modular signal; reduces exactly to the unitary
    result as gamma -> 0."""
    envelope, phase = cl_modular_envelope_phase(spec, b, c, t)
    return envelope * math.cos(phase)


def trace_check(spec, b, c, t: float) -> float:
    """Trace of the density matrix by quadrature (the ell = 0 modular value)."""
    return cl_modular_quadrature(spec, b, c, t, 0.0)


def _blob_rectangles(parts, L):
    """Effective-support rectangles of the four terms in the (r, R) plane."""
    w, quad, slope, terms, _ = parts
    rects = []
    for (A, lin, beta) in terms:
        # |rho_j| ~ exp[Re a + (Re b)^2/(2 w^2)]: quadratic in r
        Q = quad + slope * slope / (2.0 * w * w)
        lin_eff = lin.real + beta.real * slope / (w * w)
        r_star = -lin_eff / (2.0 * Q)
        s_r = 1.0 / math.sqrt(2.0 * abs(Q))
        rects.append(
            [r_star - 12.0 * s_r, r_star + 12.0 * s_r,
             beta.imag - 12.0 * w, beta.imag + 12.0 * w]
        )
    return rects


def _merge_rects(rects):
    merged = [list(r) for r in rects]
    changed = True
    while changed:
        changed = False
        for i in range(len(merged)):
            for j in range(i + 1, len(merged)):
                a, bx = merged[i], merged[j]
                if a[0] <= bx[1] and bx[0] <= a[1] and a[2] <= bx[3] and bx[2] <= a[3]:
                    merged[i] = [min(a[0], bx[0]), max(a[1], bx[1]),
                                 min(a[2], bx[2]), max(a[3], bx[3])]
                    merged.pop(j)
                    changed = True
                    break
            if changed:
                break
    return merged


def _panel_nodes(lo, hi, scale, n):
    """Composite Gauss-Legendre nodes/weights, panels no wider than ~3 scale."""
    nodes, wts = np.polynomial.legendre.leggauss(n)
    n_panels = max(1, int(math.ceil((hi - lo) / (3.0 * scale))))
    edges = np.linspace(lo, hi, n_panels + 1)
    xs, ws = [], []
    for a, bnd in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (bnd - a) * nodes + 0.5 * (bnd + a))
        ws.append(0.5 * (bnd - a) * wts)
    return np.concatenate(xs), np.concatenate(ws)


def _gl_integral_abs(parts, rect, n):
    w, quad, slope, _, _ = parts
    s_r = 1.0 / math.sqrt(2.0 * abs(quad + slope * slope / (2.0 * w * w)))
    lo_r, hi_r, lo_R, hi_R = rect
    r, r_wts = _panel_nodes(lo_r, hi_r, s_r, n)
    R, R_wts = _panel_nodes(lo_R, hi_R, w, n)
    vals = np.abs(_eval_parts(parts, r[:, None], R[None, :]))
    return float(r_wts @ vals @ R_wts)


def l1_coherence(spec, b, c, t: float, bounds=None):
    """Position-basis l1 coherence: the double integral of |rho(r, R, t)|.

    Integrates over the union of the four terms' effective-support
    rectangles (or explicit bounds (r_lo, r_hi, R_lo, R_hi)) with composite
    Gauss-Legendre rules; returns (value, error_estimate).
    """
    parts = _term_parts(spec, b, c, t)
    if bounds is not None:
        rects = [list(bounds)]
    else:
        rects = _merge_rects(_blob_rectangles(parts, spec.L))
    coarse = sum(_gl_integral_abs(parts, rect, 18) for rect in rects)
    fine = sum(_gl_integral_abs(parts, rect, 26) for rect in rects)
    err = abs(fine - coarse)
    if err > 1e-6 * max(1.0, abs(fine)):
        raise QuadratureError("l1 coherence quadrature did not settle: diff %.3g" % err)
    return fine, err
