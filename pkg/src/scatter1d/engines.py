"""Numerical transfer-matrix engines.

Three independent routes to the same scattering data:

* ``transfer_matrix_dynamical`` treats the transfer matrix as the propagator
  of an effective two-level system, i d/dx M_x = H(x) M_x, and advances it by
  piecewise-constant slicing with the exact per-slice barrier propagator
  (unconditionally unimodular); delta terms are spliced in exactly.
* ``scattering_solution``/``ls_amplitudes`` integrate the stationary wave
  equation psi'' = (v - k^2) psi with outgoing boundary data and read the
  amplitudes from the asymptotics and from the reflection/transmission
  quadratures accumulated along the solve.
* ``s_curve_solve`` integrates the second-order equation for S(z) on the
  unit-circle arc z = e^{-2ikx}, parameterized by x so that multi-winding
  curves stay single-valued, with the left-reflection contour integral
  accumulated by the same stepper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .exact import barrier_slice_matrices, delta_matrix
from .potentials import Potential
from .transfer import (
    IDENTITY,
    KMAT,
    SIGMA3,
    ScatteringData,
    TransferMatrix,
    chain_product,
)

__all__ = [
    "EffectiveHamiltonian",
    "WaveSolution",
    "LsResult",
    "SCurveTrace",
    "transfer_matrix_dynamical",
    "scattering_solution",
    "ls_amplitudes",
    "s_curve_solve",
    "ToleranceNotReached",
    "InconsistentTransmission",
    "SCurvePoleError",
]


class ToleranceNotReached(RuntimeError):
    """Slice refinement hit the cap before step-halving converged."""


class InconsistentTransmission(RuntimeError):
    """The two transmission quadratures disagree beyond tolerance."""


class SCurvePoleError(RuntimeError):
    """S or S' passed within tolerance of zero on the integration contour."""


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Generator of the dynamical formulation for a given potential and k.

    Interaction picture: H(x) = (v(x)/2k) e^{-ikx sigma3} K e^{ikx sigma3},
    traceless and nilpotent-valued (K^2 = 0); Schroedinger picture:
    H_s(x) = (v(x)/2k) K - k sigma3 with free part H0 = -k sigma3.
    """

    potential: Potential
    k: float

    def interaction(self, x: float) -> np.ndarray:
        v = self.potential.evaluate(x)
        ph = np.exp(2j * self.k * x)
        w = v / (2 * self.k)
        return np.array([[w, w / ph], [-w * ph, -w]], dtype=complex)

    def schroedinger(self, x: float) -> np.ndarray:
        v = self.potential.evaluate(x)
        return (v / (2 * self.k)) * KMAT - self.k * SIGMA3

    def free(self) -> np.ndarray:
        return -self.k * SIGMA3


# ---------------------------------------------------------------------------
# Segmentation shared by the engines
# ---------------------------------------------------------------------------


def _segments(p: Potential) -> tuple[list[tuple[float, float]], list]:
    """Smooth spans (between support edges/breakpoints/deltas) and sorted deltas."""
    a, b = p.support()
    deltas = sorted(p.delta_terms(), key=lambda t: t.location)
    cuts = {a, b}
    cuts.update(x for x in p.internal_boundaries() if a <= x <= b)
    cuts.update(t.location for t in deltas)
    edges = sorted(cuts)
    scale = max(abs(a), abs(b), 1.0)
    spans = [
        (lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi - lo > 1e-14 * scale
    ]
    return spans, deltas


def _span_is_active(p: Potential, lo: float, hi: float) -> bool:
    probe = np.linspace(lo, hi, 9)[1:-1]
    return bool(np.any(p.evaluate(probe) != 0))


# ---------------------------------------------------------------------------
# Dynamical engine
# ---------------------------------------------------------------------------


def transfer_matrix_dynamical(
    p: Potential, k: float, tol: float = 1e-8, max_slices: int = 2**20
) -> TransferMatrix:
    """Transfer matrix by adaptive piecewise-constant slicing.

    Each slice is advanced with the exact barrier propagator evaluated at the
    midpoint value of v; slice counts double (per smooth span) until the
    step-halving difference falls below tol.  Delta terms are spliced in via
    their exact matrices.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    spans, deltas = _segments(p)
    active = [(lo, hi) for lo, hi in spans if _span_is_active(p, lo, hi)]
    total_len = sum(hi - lo for lo, hi in active)
    n_pieces = len(active) + len(deltas)
    if n_pieces == 0:
        return TransferMatrix(IDENTITY, k)
    seg_tol = tol / max(1, len(active))
    n_start_total = max(64, math.ceil(8 * k * total_len / math.pi)) if total_len else 0

    pieces: list[tuple[float, np.ndarray]] = []
    for z, a in deltas:
        pieces.append((a, delta_matrix(z, a, k).m))
    for lo, hi in active:
        share = max(16, math.ceil(n_start_total * (hi - lo) / total_len))
        pieces.append((lo, _refine_span(p, lo, hi, k, seg_tol, share, max_slices)))
    pieces.sort(key=lambda item: item[0])
    stack = np.stack([m for _, m in pieces])
    return TransferMatrix(chain_product(stack), k)


def _refine_span(
    p: Potential, lo: float, hi: float, k: float, tol: float, n_start: int, cap: int
) -> np.ndarray:
    n = n_start
    prev = None
    while n <= cap:
        edges = np.linspace(lo, hi, n + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        mats = barrier_slice_matrices(p.evaluate(mids), edges[:-1], edges[1:], k)
        cur = chain_product(mats)
        if prev is not None:
            diff = np.abs(cur - prev).max()
            if diff <= tol * max(1.0, float(np.linalg.norm(cur))):
                return cur
        prev = cur
        n *= 2
    raise ToleranceNotReached(
        f"slice refinement on [{lo}, {hi}] did not reach tol={tol:g} within {cap} slices"
    )


# ---------------------------------------------------------------------------
# Stationary wave-equation engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WaveSolution:
    """psi and psi' along the support plus asymptotic plane-wave coefficients.

    ``quad_minus``/``quad_plus`` hold integral e^{-+iky} v(y) psi(y) dy over the
    support (delta contributions included), used by the Lippmann-Schwinger
    amplitude formulas.
    """

    k: float
    side: str
    x: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    a_minus: complex
    b_minus: complex
    a_plus: complex
    b_plus: complex
    r: complex
    t: complex
    quad_minus: complex
    quad_plus: complex


def _schrodinger_rhs(p: Potential, k: float):
    def rhs(x, y):
        psi = y[0] + 1j * y[1]
        dpsi = y[2] + 1j * y[3]
        v = p.evaluate(x)
        dd = (v - k * k) * psi
        w = v * psi
        qm = np.exp(-1j * k * x) * w
        qp = np.exp(1j * k * x) * w
        return [dpsi.real, dpsi.imag, dd.real, dd.imag, qm.real, qm.imag, qp.real, qp.imag]

    return rhs


def scattering_solution(
    p: Potential, k: float, side: str = "left", tol: float = 1e-10
) -> WaveSolution:
    """Integrate psi'' = (v - k^2) psi from the transmission side inward.

    side='left': left-incident wave; starts at the right edge with the
    outgoing unit-amplitude wave e^{ikx} and integrates to the left edge.
    Delta terms impose the derivative jump psi'(a+) = psi'(a-) + z psi(a).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    a, b = p.support()
    spans, deltas = _segments(p)
    rhs = _schrodinger_rhs(p, k)
    rtol, atol = tol, tol * 1e-3
    interp = p.interpolation_scale()
    max_step = interp if interp else np.inf
    scale = max(abs(a), abs(b), 1.0)

    # merged delta strengths by location (a Sum may stack terms at one point)
    delta_at: dict[float, complex] = {}
    for t in deltas:
        delta_at[t.location] = delta_at.get(t.location, 0.0) + t.strength

    checkpoints = sorted({a, b, *(lo for lo, _ in spans), *(hi for _, hi in spans),
                          *delta_at})
    backward = side == "left"
    if backward:
        checkpoints = checkpoints[::-1]
        psi = np.exp(1j * k * b)
        dpsi = 1j * k * psi
    else:
        psi = np.exp(-1j * k * a)
        dpsi = -1j * k * psi

    quad_smooth = np.zeros(2, dtype=complex)  # (int e^{-iky} v psi, int e^{+iky} v psi)
    quad_delta = np.zeros(2, dtype=complex)
    xs: list[np.ndarray] = []
    psis: list[np.ndarray] = []
    dpsis: list[np.ndarray] = []

    def apply_delta(x: float) -> None:
        nonlocal psi, dpsi
        z = delta_at.get(x)
        if z is None:
            return
        quad_delta[0] += np.exp(-1j * k * x) * z * psi
        quad_delta[1] += np.exp(1j * k * x) * z * psi
        dpsi = dpsi - z * psi if backward else dpsi + z * psi

    x_cur = checkpoints[0]
    apply_delta(x_cur)
    for x_next in checkpoints[1:]:
        y0 = [psi.real, psi.imag, dpsi.real, dpsi.imag, 0.0, 0.0, 0.0, 0.0]
        sol = solve_ivp(rhs, (x_cur, x_next), y0, method="DOP853", rtol=rtol,
                        atol=atol, max_step=max_step)
        if not sol.success:
            raise RuntimeError(f"integration failed: {sol.message}")
        psi = sol.y[0, -1] + 1j * sol.y[1, -1]
        dpsi = sol.y[2, -1] + 1j * sol.y[3, -1]
        quad_smooth += np.array(
            [sol.y[4, -1] + 1j * sol.y[5, -1], sol.y[6, -1] + 1j * sol.y[7, -1]]
        )
        xs.append(sol.t)
        psis.append(sol.y[0] + 1j * sol.y[1])
        dpsis.append(sol.y[2] + 1j * sol.y[3])
        x_cur = x_next
        apply_delta(x_cur)

    if backward:
        quad_smooth = -quad_smooth  # traversal accumulated int_b^a
    quad = quad_smooth + quad_delta

    # at a spectral singularity the denominators vanish; keep the coefficients
    # finite and let r, t go to inf rather than raising
    with np.errstate(divide="ignore", invalid="ignore"):
        if backward:
            a_m = 0.5 * np.exp(-1j * k * a) * (psi + dpsi / (1j * k))
            b_m = 0.5 * np.exp(1j * k * a) * (psi - dpsi / (1j * k))
            coeffs = dict(a_minus=a_m, b_minus=b_m, a_plus=1.0 + 0j, b_plus=0.0 + 0j)
            r, t_amp = b_m / a_m, 1.0 / a_m
        else:
            a_p = 0.5 * np.exp(-1j * k * b) * (psi + dpsi / (1j * k))
            b_p = 0.5 * np.exp(1j * k * b) * (psi - dpsi / (1j * k))
            coeffs = dict(a_minus=0.0 + 0j, b_minus=1.0 + 0j, a_plus=a_p, b_plus=b_p)
            r, t_amp = a_p / b_p, 1.0 / b_p

    if xs:
        x_all = np.concatenate(xs)
        psi_all = np.concatenate(psis)
        dpsi_all = np.concatenate(dpsis)
        order = np.argsort(x_all)
        x_all, psi_all, dpsi_all = x_all[order], psi_all[order], dpsi_all[order]
    else:
        x_all = np.array([a if backward else b])
        psi_all = np.array([psi])
        dpsi_all = np.array([dpsi])

    return WaveSolution(
        k=k,
        side=side,
        x=x_all,
        psi=psi_all,
        dpsi=dpsi_all,
        r=complex(r),
        t=complex(t_amp),
        quad_minus=complex(quad[0]),
        quad_plus=complex(quad[1]),
        **{key: complex(val) for key, val in coeffs.items()},
    )


@dataclass(frozen=True)
class LsResult:
    """Amplitudes from the Lippmann-Schwinger quadratures, with both T routes."""

    data: ScatteringData
    t_from_left: complex
    t_from_right: complex


def ls_amplitudes(p: Potential, k: float, tol: float = 1e-10) -> LsResult:
    """R^{l,r} and T from integral e^{-+iky} v(y) psihat(y) dy / 2ik.

    Runs both one-sided solves; the two independent transmission evaluations
    must agree within 10*tol.
    """
    left = scattering_solution(p, k, "left", tol)
    right = scattering_solution(p, k, "right", tol)
    two_ik = 2j * k
    # normalize by the incident amplitudes (unit transmitted convention inside)
    r_l = left.quad_plus / (two_ik * left.a_minus)
    t_l = 1.0 + left.quad_minus / (two_ik * left.a_minus)
    r_r = right.quad_minus / (two_ik * right.b_plus)
    t_r = 1.0 + right.quad_plus / (two_ik * right.b_plus)
    if abs(t_l - t_r) > 10 * tol * max(1.0, abs(t_l)):
        raise InconsistentTransmission(
            f"T from left {t_l} vs right {t_r}: |diff| = {abs(t_l - t_r):.3e}"
        )
    return LsResult(ScatteringData(r_l, r_r, t_l, k), complex(t_l), complex(t_r))


# ---------------------------------------------------------------------------
# S-curve engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SCurveTrace:
    """S and S' sampled along the parameterized curve z = e^{-2ikx}."""

    x: np.ndarray
    z: np.ndarray
    s: np.ndarray         # S(z(x))
    s_prime: np.ndarray   # dS/dz along the curve
    winding: float        # k (a_+ - a_-) / pi
    min_abs_s: float
    min_abs_s_prime: float


def s_curve_solve(
    p: Potential, k: float, tol: float = 1e-10, pole_tol: float = 1e-8
) -> tuple[ScatteringData, SCurveTrace]:
    """Amplitudes from the unit-circle initial-value problem.

    In the x chart (z = e^{-2ikx}, s(x) = S(z)) the curve equation
    z^2 S'' + (v/4k^2) S = 0 becomes s'' + 2ik s' - v s = 0 with
    s(a_-) = z_-, s'(a_-) = -2ik z_-; this stays single-valued for any
    winding number (k L >= pi), which is why the parameterization is by x.
    Endpoint values give T = -2ik z_+/s'(a_+) and R^r = T s(a_+) - z_+;
    the left reflection is the simultaneously accumulated quadrature
    R^l = integral 2ik z v / s'^2 dx (the contour integral of
    -S''/(S S'^2) dz in the z chart).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if p.delta_terms():
        raise ValueError("delta terms are not supported by the S-curve method")
    a, b = p.support()
    if p.is_trivial():
        trace = SCurveTrace(
            x=np.array([a, b]),
            z=np.exp(-2j * k * np.array([a, b])),
            s=np.exp(-2j * k * np.array([a, b])),
            s_prime=np.ones(2, dtype=complex),
            winding=k * (b - a) / np.pi,
            min_abs_s=1.0,
            min_abs_s_prime=1.0,
        )
        return ScatteringData(0.0, 0.0, 1.0, k), trace

    def rhs(x, y):
        s = y[0] + 1j * y[1]
        sp = y[2] + 1j * y[3]
        v = p.evaluate(x)
        spp = v * s - 2j * k * sp
        dr = 2j * k * np.exp(-2j * k * x) * v / (sp * sp)
        return [sp.real, sp.imag, spp.real, spp.imag, dr.real, dr.imag]

    z_minus = np.exp(-2j * k * a)
    y0 = [z_minus.real, z_minus.imag, (-2j * k * z_minus).real, (-2j * k * z_minus).imag, 0.0, 0.0]
    cuts = sorted({a, b, *(x for x in p.internal_boundaries() if a < x < b)})
    interp = p.interpolation_scale()
    max_step = interp if interp else np.inf
    xs, ss, sps = [], [], []
    y = y0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        sol = solve_ivp(rhs, (lo, hi), y, method="DOP853", rtol=tol,
                        atol=tol * 1e-3, max_step=max_step)
        if not sol.success:
            raise RuntimeError(f"S-curve integration failed: {sol.message}")
        xs.append(sol.t)
        ss.append(sol.y[0] + 1j * sol.y[1])
        sps.append(sol.y[2] + 1j * sol.y[3])
        y = [float(sol.y[j, -1]) for j in range(6)]
    r_left = y[4] + 1j * y[5]
    s_end = y[0] + 1j * y[1]
    sp_end = y[2] + 1j * y[3]

    x_all = np.concatenate(xs)
    s_all = np.concatenate(ss)
    sp_all = np.concatenate(sps)
    z_all = np.exp(-2j * k * x_all)
    s_prime_z = sp_all / (-2j * k * z_all)
    min_s = float(np.abs(s_all).min())
    min_sp = float(np.abs(s_prime_z).min())
    scale_s = float(np.abs(s_all).max())
    scale_sp = float(np.abs(s_prime_z).max())
    if min_s < pole_tol * scale_s or min_sp < pole_tol * scale_sp:
        which = "S" if min_s < pole_tol * scale_s else "S'"
        raise SCurvePoleError(
            f"{which} passed within {pole_tol:g} (relative) of zero on the contour; "
            "the left-reflection integrand has a pole there - fall back to the "
            "dynamical engine"
        )

    z_plus = np.exp(-2j * k * b)
    t = -2j * k * z_plus / sp_end
    r_right = t * s_end - z_plus
    trace = SCurveTrace(
        x=x_all,
        z=z_all,
        s=s_all,
        s_prime=s_prime_z,
        winding=k * (b - a) / np.pi,
        min_abs_s=min_s,
        min_abs_s_prime=min_sp,
    )
    return ScatteringData(r_left, r_right, t, k), trace
