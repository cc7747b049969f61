"""Time integration and per-element electrical waveform reconstruction.

Integrators are deliberately simple and deterministic: a fixed-step
classical Runge-Kutta (rk4) whose 4th-order global error scaling is itself
under test, and a Dormand-Prince 5(4) pair (rk45) with PI step-size
control and cubic Hermite dense output.  Acceleration series are
reconstructed from the system right-hand side, never by differencing
velocities, so the integrated-Kirchhoff residual check measures constraint
violation rather than differentiation noise.

On top of the coordinate trajectories, :func:`branch_waveforms` rebuilds
every element's electrical picture (sigma, q, I, phi, V, rho where
defined) from its constitutive relation and branch states, and
:func:`drive_element` runs a single element under a prescribed source to
expose its hysteresis behavior, which :func:`pinch_check` turns into a
verdict.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .constitutive import Element, ElementKind, Modulation, SourceWaveform
from .errors import (
    CurveDomainError,
    DomainExitError,
    MemlagError,
    NumericError,
    StepUnderflowError,
)
from .lagrangian import FirstOrderSystem, LagrangianSystem, to_first_order
from .netlist import Circuit

__all__ = [
    "Trajectory",
    "ElementRecord",
    "ElementWaveforms",
    "PinchReport",
    "integrate",
    "branch_waveforms",
    "ikvl_residual",
    "drive_element",
    "pinch_check",
    "traversed_gain_bound",
    "waveforms_csv",
    "drive_csv",
]

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10

_ELEMENT_IN_MESSAGE = re.compile(r"element '([^']+)'")


# ---------------------------------------------------------------------
# Runge-Kutta cores
# ---------------------------------------------------------------------


def _rk4_fixed(f, y0, t0, t1, h):
    """Classical RK4 on a fixed grid; returns (t, y, f_at_grid)."""
    span = t1 - t0
    n_full = int(math.floor(span / h + 1e-9))
    ts = [t0]
    ys = [np.asarray(y0, float)]
    t, y = t0, np.asarray(y0, float)
    for k in range(n_full):
        y = _rk4_step(f, t, y, h)
        t = t0 + (k + 1) * h
        ts.append(t)
        ys.append(y)
    if t1 - t > 1e-12 * max(abs(t1), 1.0):
        y = _rk4_step(f, t, y, t1 - t)
        ts.append(t1)
        ys.append(y)
    tgrid = np.array(ts)
    ygrid = np.array(ys)
    fgrid = np.array([f(tk, yk) for tk, yk in zip(tgrid, ygrid)])
    return tgrid, ygrid, fgrid, len(ts) - 1, 0


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Dormand-Prince 5(4) tableau.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# 5th-order weights are row 7 of A (FSAL); the embedded 4th-order weights:
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)
_DP_ERR = tuple(b5 - b4 for b5, b4 in zip(_DP_A[6] + (0.0,), _DP_B4))


def _rk45_adaptive(f, y0, t0, t1, rtol, atol, t_stops=None):
    """Dormand-Prince 5(4) with PI step control; returns (t, y, f, steps, rejected).

    ``t_stops`` is an optional increasing array of times the stepper must
    land on exactly, so requested output points carry full solver accuracy
    instead of interpolation accuracy.
    """
    span = t1 - t0
    y = np.asarray(y0, float)
    t = t0
    f0 = f(t, y)
    h = _initial_step(f, t0, y, f0, t1, rtol, atol)
    ts = [t0]
    ys = [y]
    fs = [f0]
    k1 = f0
    err_prev = 1e-4
    rejected_last = False
    n_rejected = 0
    safety, alpha, beta = 0.9, 0.17, 0.04
    stops = np.asarray(t_stops, float) if t_stops is not None else None
    si = 0
    while t < t1:
        if h < 1e-14 * span:
            raise StepUnderflowError(
                f"step size {h:.3e} fell below 1e-14 of the span at t={t:.6g}"
            )
        t_target = min(t + h, t1)
        if stops is not None:
            while si < len(stops) and stops[si] <= t + 1e-14 * span:
                si += 1
            if si < len(stops) and stops[si] < t_target:
                t_target = stops[si]
        h_try = t_target - t
        ks = [k1]
        for s in range(1, 7):
            ts_stage = t + _DP_C[s] * h_try
            y_stage = y + h_try * sum(
                a * k for a, k in zip(_DP_A[s], ks) if a != 0.0
            )
            ks.append(f(ts_stage, y_stage))
        y_new = y + h_try * sum(
            a * k for a, k in zip(_DP_A[6], ks) if a != 0.0
        )
        # FSAL: stage 7 was evaluated at (t + h, y_new).
        err_vec = h_try * sum(e * k for e, k in zip(_DP_ERR, ks) if e != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err):
            raise NumericError(f"non-finite step error estimate at t={t:.6g}")
        if err <= 1.0:
            t = t_target
            y = y_new
            k1 = ks[6]
            ts.append(t)
            ys.append(y)
            fs.append(k1)
            fac = (5.0 if err == 0.0
                   else safety * err ** (-alpha) * err_prev ** beta)
            fac = min(5.0, max(0.2, fac))
            if rejected_last:
                fac = min(fac, 1.0)
            h = h_try * fac
            err_prev = max(err, 1e-4)
            rejected_last = False
        else:
            n_rejected += 1
            rejected_last = True
            h = h_try * max(0.2, safety * err ** (-alpha))
    return (np.array(ts), np.array(ys), np.array(fs),
            len(ts) - 1, n_rejected)


def _initial_step(f, t0, y0, f0, t1, rtol, atol):
    span = t1 - t0
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 * span if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6 * span, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def _hermite(tgrid, ygrid, fgrid, tq):
    """Cubic Hermite interpolation of (y, ydot=f) data onto query times."""
    out = np.empty((len(tq), ygrid.shape[1]))
    idx = np.searchsorted(tgrid, tq, side="right") - 1
    idx = np.clip(idx, 0, len(tgrid) - 2)
    for r, (ti, k) in enumerate(zip(tq, idx)):
        dt = tgrid[k + 1] - tgrid[k]
        s = (ti - tgrid[k]) / dt
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        out[r] = (h00 * ygrid[k] + h10 * dt * fgrid[k]
                  + h01 * ygrid[k + 1] + h11 * dt * fgrid[k + 1])
    return out


# ---------------------------------------------------------------------
# Trajectory
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """Coordinate trajectory with reconstructed accelerations.

    ``x``, ``v``, ``a`` have shape (len(t), n).  Accelerations come from
    the system right-hand side at each grid point.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray
    method: str
    n_steps: int
    n_rejected: int = 0
    h: float | None = None
    rtol: float | None = None
    atol: float | None = None

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise MemlagError("trajectory time grid must strictly increase")
        for arr in (self.t, self.x, self.v, self.a):
            if not np.all(np.isfinite(arr)):
                raise NumericError("trajectory contains non-finite values")

    @property
    def n(self) -> int:
        return self.x.shape[1]


def _wrap_domain_exit(exc: CurveDomainError, t: float) -> DomainExitError:
    m = _ELEMENT_IN_MESSAGE.search(str(exc))
    element = m.group(1) if m else None
    return DomainExitError(
        f"trajectory left a curve domain at t={t:.9g}: {exc}",
        time=t, element=element,
    )


def integrate(system, x0, t_span, *, method: str = "rk45",
              h: float | None = None, rtol: float = DEFAULT_RTOL,
              atol: float = DEFAULT_ATOL, v0=None, t_eval=None) -> Trajectory:
    """Integrate a first-order system over ``t_span = (t0, t1)``.

    ``system`` is a :class:`~memlag.lagrangian.FirstOrderSystem` (a
    LagrangianSystem is reduced automatically).  The initial state is either
    a packed state vector ``x0`` of length ``system.dim``, or full
    coordinate vectors ``x0`` and ``v0`` of length n (``v0`` defaults to
    zeros).  ``method`` is "rk4"
    (requires ``h``) or "rk45" (PI-controlled, ``rtol``/``atol``).
    ``t_eval`` requests dense output on an explicit grid via cubic Hermite
    interpolation of the accepted steps.
    """
    if isinstance(system, LagrangianSystem):
        system = to_first_order(system)
    if not isinstance(system, FirstOrderSystem):
        raise MemlagError("integrate needs a FirstOrderSystem or LagrangianSystem")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise MemlagError(f"t_span must increase, got [{t0}, {t1}]")

    x0 = np.asarray(x0, float)
    if v0 is not None:
        y0 = system.pack(x0, np.asarray(v0, float))
    elif x0.shape == (system.dim,):
        y0 = x0
    elif x0.shape == (system.n,):
        y0 = system.pack(x0, np.zeros(system.n))
    else:
        raise MemlagError(
            f"initial state must be a packed vector of length {system.dim} "
            f"or x0/v0 pairs of length {system.n}"
        )

    tq = None
    if t_eval is not None:
        tq = np.asarray(t_eval, float)
        if np.any(np.diff(tq) <= 0):
            raise MemlagError("t_eval must strictly increase")
        if tq[0] < t0 - 1e-12 or tq[-1] > t1 + 1e-12:
            raise MemlagError("t_eval must lie within t_span")

    state = {"t": t0}

    def f(t, y):
        state["t"] = t
        return system.rhs(t, y)

    try:
        if method == "rk4":
            if h is None or h <= 0:
                raise MemlagError("rk4 requires a positive step h")
            tg, yg, fg, n_steps, n_rej = _rk4_fixed(f, y0, t0, t1, h)
        elif method == "rk45":
            if rtol <= 0 or atol <= 0:
                raise MemlagError("rk45 requires positive rtol and atol")
            tg, yg, fg, n_steps, n_rej = _rk45_adaptive(
                f, y0, t0, t1, rtol, atol, t_stops=tq)
        else:
            raise MemlagError(f"unknown method {method!r} (rk4 or rk45)")
    except CurveDomainError as exc:
        raise _wrap_domain_exit(exc, state["t"]) from exc

    if tq is not None:
        yq = _hermite(tg, yg, fg, tq)
        tg, yg = tq, yq

    m = len(tg)
    n = system.n
    X = np.empty((m, n))
    V = np.empty((m, n))
    A = np.empty((m, n))
    try:
        for k in range(m):
            X[k], V[k], A[k] = system.expand(tg[k], yg[k])
    except CurveDomainError as exc:
        raise _wrap_domain_exit(exc, float(tg[k])) from exc

    return Trajectory(
        t=tg, x=X, v=V, a=A, method=method, n_steps=n_steps,
        n_rejected=n_rej, h=h if method == "rk4" else None,
        rtol=rtol if method == "rk45" else None,
        atol=atol if method == "rk45" else None,
    )


def ikvl_residual(sys: LagrangianSystem, traj: Trajectory) -> float:
    """Worst violation of the integrated Kirchhoff laws along a trajectory.

    Max over grid points and coordinates of |el_residual|.  Near zero on a
    healthy trajectory; order-one when the trajectory does not belong to
    the system (or was corrupted), since flux/charge balance then fails.
    """
    if traj.n != sys.n:
        raise MemlagError(
            f"trajectory has {traj.n} coordinates, system has {sys.n}"
        )
    worst = 0.0
    for k in range(len(traj.t)):
        r = sys.residual(traj.x[k], traj.v[k], traj.a[k], float(traj.t[k]))
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


# ---------------------------------------------------------------------
# Grid differentiation (for the few waveforms without exact expressions)
# ---------------------------------------------------------------------


def _grid_deriv(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """First derivative of samples on a (possibly non-uniform) grid.

    5-point stencils, 4th order, one-sided near the ends.  On uniform
    grids the interior uses the closed-form central weights.
    """
    m = len(t)
    if m == 1:
        return np.zeros_like(y)
    if m < 5:
        return _grid_deriv_small(t, y)
    out = np.empty_like(y, dtype=float)
    dt = np.diff(t)
    uniform = np.allclose(dt, dt[0], rtol=1e-10, atol=0.0)
    if uniform:
        hstep = dt[0]
        out[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * hstep)
        edges = [0, 1, m - 2, m - 1]
    else:
        edges = range(m)
    for i in edges:
        j0 = min(max(i - 2, 0), m - 5)
        d = t[j0:j0 + 5] - t[i]
        M = np.vander(d, 5, increasing=True).T
        w = np.linalg.solve(M, np.array([0.0, 1.0, 0.0, 0.0, 0.0]))
        out[i] = w @ y[j0:j0 + 5]
    return out


def _grid_deriv_small(t, y):
    m = len(t)
    out = np.empty_like(y, dtype=float)
    for i in range(m):
        d = t - t[i]
        M = np.vander(d, m, increasing=True).T
        rhs = np.zeros(m)
        rhs[1] = 1.0
        w = np.linalg.solve(M, rhs)
        out[i] = w @ y
    return out


# ---------------------------------------------------------------------
# Element waveforms
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class ElementRecord:
    """Electrical picture of one element along a trajectory.

    Arrays share the waveform grid; fields that the element's variable
    hierarchy does not define are None.  ``V = dphi/dt`` and ``I = dq/dt``
    hold on the grid (exactly where a closed form exists, to
    finite-difference accuracy where a series had to be differentiated).
    """

    name: str
    kind: ElementKind
    sigma: np.ndarray | None = None
    q: np.ndarray | None = None
    I: np.ndarray | None = None
    phi: np.ndarray | None = None
    V: np.ndarray | None = None
    rho: np.ndarray | None = None


@dataclass(frozen=True)
class ElementWaveforms:
    t: np.ndarray
    records: tuple[ElementRecord, ...]

    def __getitem__(self, name: str) -> ElementRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    def __iter__(self):
        return iter(self.records)


def _branch_series(el: Element, series: np.ndarray) -> np.ndarray:
    out = np.zeros(series.shape[0])
    for idx, sign in el.membership:
        out += sign * series[:, idx - 1]
    return out


def _curve_map(el: Element, fn, series: np.ndarray) -> np.ndarray:
    try:
        return np.array([fn(s) for s in series])
    except CurveDomainError as exc:
        raise CurveDomainError(f"element {el.name!r}: {exc}") from exc


def branch_waveforms(circuit: Circuit, traj: Trajectory) -> ElementWaveforms:
    """Rebuild per-element electrical waveforms from a coordinate trajectory.

    Loop form: for each element, sigma = sum sign*x, q = sum sign*v,
    I = sum sign*a; flux from the constitutive relation (memcapacitor
    phi-hat(sigma), meminductor rho-hat'(q)*I, memristor phi-hat(q), linear
    elements by their constants); V analytically where the chain rule
    closes (capacitive, resistive, source elements) and by 4th-order grid
    differentiation of phi for inductive storage.  Node form is the dual
    with q/I and phi/V swapping roles.
    """
    if circuit.n_coords != traj.n:
        raise MemlagError(
            f"circuit has {circuit.n_coords} coordinates, trajectory has {traj.n}"
        )
    loop = circuit.formulation == "loop"
    records = []
    for el in circuit.elements:
        xb = _branch_series(el, traj.x)
        vb = _branch_series(el, traj.v)
        ab = _branch_series(el, traj.a)
        if loop:
            records.append(_loop_record(el, traj.t, xb, vb, ab))
        else:
            records.append(_node_record(el, traj.t, xb, vb, ab))
    return ElementWaveforms(t=traj.t.copy(), records=tuple(records))


def _loop_record(el: Element, t, sigma, q, I) -> ElementRecord:
    kind = el.kind
    rho = None
    if kind is ElementKind.MEMCAPACITOR:
        phi = _curve_map(el, el.curve.value, sigma)
        V = _curve_map(el, el.curve.deriv, sigma) * q
    elif kind is ElementKind.CAPACITOR:
        phi = sigma / el.value
        V = q / el.value
    elif kind is ElementKind.MEMINDUCTOR:
        phi = _curve_map(el, el.curve.deriv, q) * I
        V = _grid_deriv(t, phi)
        rho = _curve_map(el, el.curve.value, q)
    elif kind is ElementKind.INDUCTOR:
        phi = el.value * I
        V = _grid_deriv(t, phi)
        rho = el.value * q
    elif kind is ElementKind.MEMRISTOR:
        phi = _curve_map(el, el.curve.value, q)
        V = _curve_map(el, el.curve.deriv, q) * I
    elif kind is ElementKind.RESISTOR:
        phi = el.value * q
        V = el.value * I
    else:  # voltage source
        phi = np.array([el.waveform.integral(tk) for tk in t])
        V = np.array([el.waveform.value(tk) for tk in t])
    return ElementRecord(name=el.name, kind=kind, sigma=sigma, q=q, I=I,
                         phi=phi, V=V, rho=rho)


def _node_record(el: Element, t, rho, phi, V) -> ElementRecord:
    kind = el.kind
    sigma = None
    if kind is ElementKind.MEMINDUCTOR:
        q = _curve_map(el, el.curve.value, rho)
        I = _curve_map(el, el.curve.deriv, rho) * phi
    elif kind is ElementKind.INDUCTOR:
        q = rho / el.value
        I = phi / el.value
    elif kind is ElementKind.MEMCAPACITOR:
        q = _curve_map(el, el.curve.deriv, phi) * V
        I = _grid_deriv(t, q)
        sigma = _curve_map(el, el.curve.value, phi)
    elif kind is ElementKind.CAPACITOR:
        q = el.value * V
        I = _grid_deriv(t, q)
        sigma = el.value * phi
    elif kind is ElementKind.MEMRISTOR:
        q = _curve_map(el, el.curve.value, phi)
        I = _curve_map(el, el.curve.deriv, phi) * V
    elif kind is ElementKind.RESISTOR:
        q = phi / el.value
        I = V / el.value
    else:  # current source
        q = np.array([el.waveform.integral(tk) for tk in t])
        I = np.array([el.waveform.value(tk) for tk in t])
    return ElementRecord(name=el.name, kind=kind, rho=rho, phi=phi, V=V,
                         q=q, I=I, sigma=sigma)


# ---------------------------------------------------------------------
# Single-element hysteresis drive
# ---------------------------------------------------------------------


def drive_element(element: Element, drive: SourceWaveform, t_span, *,
                  method: str = "rk45", h: float | None = None,
                  rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                  t_eval=None) -> ElementWaveforms:
    """Run one element under a prescribed drive from zero initial state.

    The drive is applied on the element's modulation side: current for
    charge- and integrated-charge-modulated elements (and R, L), voltage
    for flux- and integrated-flux-modulated elements (and C).  The
    modulating state is integrated from 0 and the paired output follows
    from the constitutive relation: V for a memristor, phi for a
    meminductor, q for a memcapacitor.
    """
    if element.kind is ElementKind.SOURCE:
        raise MemlagError("a source element has no constitutive relation to drive")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise MemlagError(f"t_span must increase, got [{t0}, {t1}]")

    two_level = element.kind.is_memory and element.modulation in (
        Modulation.INTEGRATED_CHARGE, Modulation.INTEGRATED_FLUX)
    dim = 2 if two_level else 1

    def f(t, y):
        if two_level:
            return np.array([drive.value(t), y[0]])
        return np.array([drive.value(t)])

    tq = None
    if t_eval is not None:
        tq = np.asarray(t_eval, float)
        if np.any(np.diff(tq) <= 0):
            raise MemlagError("t_eval must strictly increase")
        if tq[0] < t0 - 1e-12 or tq[-1] > t1 + 1e-12:
            raise MemlagError("t_eval must lie within t_span")

    y0 = np.zeros(dim)
    if method == "rk4":
        if h is None or h <= 0:
            raise MemlagError("rk4 requires a positive step h")
        tg, yg, fg, _, _ = _rk4_fixed(f, y0, t0, t1, h)
    elif method == "rk45":
        tg, yg, fg, _, _ = _rk45_adaptive(f, y0, t0, t1, rtol, atol,
                                          t_stops=tq)
    else:
        raise MemlagError(f"unknown method {method!r} (rk4 or rk45)")
    if tq is not None:
        yg = _hermite(tg, yg, fg, tq)
        tg = tq

    u = np.array([drive.value(tk) for tk in tg])
    du = np.array([drive.derivative(tk) for tk in tg])
    try:
        record = _drive_record(element, tg, yg, u, du)
    except CurveDomainError as exc:
        raise DomainExitError(
            f"driven state left the curve domain: {exc}",
            element=element.name,
        ) from exc
    return ElementWaveforms(t=tg, records=(record,))


def _drive_record(el: Element, t, y, u, du) -> ElementRecord:
    kind = el.kind
    name = el.name
    if kind is ElementKind.RESISTOR:
        return ElementRecord(name=name, kind=kind, q=y[:, 0], I=u,
                             V=el.value * u, phi=el.value * y[:, 0])
    if kind is ElementKind.INDUCTOR:
        return ElementRecord(name=name, kind=kind, q=y[:, 0], I=u,
                             phi=el.value * u, V=el.value * du,
                             rho=el.value * y[:, 0])
    if kind is ElementKind.CAPACITOR:
        return ElementRecord(name=name, kind=kind, phi=y[:, 0], V=u,
                             q=el.value * u, I=el.value * du,
                             sigma=el.value * y[:, 0])

    curve = el.curve
    mod = el.modulation
    s = y[:, -1]  # modulating state (the innermost integral)
    val = _curve_map(el, curve.value, s)
    slope = _curve_map(el, curve.deriv, s)
    if kind is ElementKind.MEMRISTOR:
        if mod is Modulation.CHARGE:  # drive is I
            return ElementRecord(name=name, kind=kind, q=s, I=u,
                                 phi=val, V=slope * u)
        return ElementRecord(name=name, kind=kind, phi=s, V=u,  # drive is V
                             q=val, I=slope * u)
    if kind is ElementKind.MEMINDUCTOR:
        if mod is Modulation.CHARGE:  # drive is I
            phi = slope * u
            return ElementRecord(name=name, kind=kind, q=s, I=u, rho=val,
                                 phi=phi, V=_grid_deriv(t, phi))
        # rho-modulated: drive is V, y = (phi, rho)
        return ElementRecord(name=name, kind=kind, rho=s, phi=y[:, 0],
                             V=u, q=val, I=slope * y[:, 0])
    # memcapacitor
    if mod is Modulation.INTEGRATED_CHARGE:  # drive is I, y = (q, sigma)
        return ElementRecord(name=name, kind=kind, sigma=s, q=y[:, 0],
                             I=u, phi=val, V=slope * y[:, 0])
    q = slope * u  # phi-modulated: drive is V
    return ElementRecord(name=name, kind=kind, phi=s, V=u, sigma=val,
                         q=q, I=_grid_deriv(t, q))


# ---------------------------------------------------------------------
# Pinched-hysteresis verdict
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class PinchReport:
    """Outcome of a pinched-hysteresis check on an input/output pair.

    ``pinched`` is true when every grid point with |u| <= eps has
    |y| <= gain_bound * eps.  The half-plane loop areas (shoelace over the
    u-y curve restricted to u >= 0 and u <= 0) are hysteresis evidence:
    positive areas with a pinched verdict is the memory-element signature.
    """

    pinched: bool
    eps: float
    gain_bound: float
    n_zero_points: int
    max_output_at_zero: float
    area_positive: float
    area_negative: float

    @property
    def verdict(self) -> str:
        return "pinched" if self.pinched else "not_pinched"


def pinch_check(pair, eps: float, *, gain_bound: float) -> PinchReport:
    """Check that the u-y curve passes through the origin whenever u does.

    ``pair`` is (u, y) on a common grid covering at least one drive period.
    ``gain_bound`` is the maximum incremental value of the element over the
    traversed state range (see :func:`traversed_gain_bound`); the memory
    element laws y = slope(state) * u make |y| <= gain_bound * |u| a
    provable inequality, so failing it certifies a non-pinched device.
    """
    u, y = pair
    u = np.asarray(u, float)
    y = np.asarray(y, float)
    if u.shape != y.shape or u.ndim != 1:
        raise MemlagError("pinch_check needs two equal-length 1-d series")
    if eps <= 0 or gain_bound <= 0:
        raise MemlagError("eps and gain_bound must be positive")
    at_zero = np.abs(u) <= eps
    n_zero = int(np.count_nonzero(at_zero))
    max_y = float(np.max(np.abs(y[at_zero]))) if n_zero else 0.0
    pinched = max_y <= gain_bound * eps
    return PinchReport(
        pinched=pinched, eps=eps, gain_bound=gain_bound,
        n_zero_points=n_zero, max_output_at_zero=max_y,
        area_positive=_halfplane_area(u, y, True),
        area_negative=_halfplane_area(u, y, False),
    )


def _halfplane_area(u, y, positive: bool) -> float:
    mask = u >= 0.0 if positive else u <= 0.0
    uu = u[mask]
    yy = y[mask]
    if len(uu) < 3:
        return 0.0
    return 0.5 * abs(float(
        np.dot(uu, np.roll(yy, -1)) - np.dot(np.roll(uu, -1), yy)
    ))


def traversed_gain_bound(element: Element, states) -> float:
    """Max incremental value of the element over the traversed state range."""
    if element.kind.is_conventional:
        return float(element.value)
    if element.kind is ElementKind.SOURCE:
        raise MemlagError("a source has no incremental value")
    states = np.asarray(states, float)
    lo = float(np.min(states))
    hi = float(np.max(states))
    curve = element.curve
    if curve.points is not None:
        xs = [p[0] for p in curve.points]
        best = 0.0
        for k in range(len(xs) - 1):
            if xs[k + 1] >= lo and xs[k] <= hi:
                best = max(best, curve.deriv(0.5 * (max(xs[k], lo)
                                                    + min(xs[k + 1], hi))))
        return best
    grid = np.linspace(lo, hi, 513) if hi > lo else np.array([lo])
    return max(float(curve.deriv(s)) for s in grid)


# ---------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------

_COORD_UNITS = {
    "sigma": ("C*s", "C", "A"),
    "rho": ("Wb*s", "Wb", "V"),
    "q": ("C", "A", "A/s"),
}
_FIELD_UNITS = {"sigma": "C*s", "q": "C", "I": "A", "phi": "Wb", "V": "V",
                "rho": "Wb*s"}
_FIELD_ORDER = ("sigma", "q", "I", "phi", "V", "rho")


def _format_csv(columns: list[tuple[str, str, np.ndarray]]) -> str:
    units = ",".join(f"{name}={unit}" for name, unit, _ in columns)
    header = ",".join(name for name, _, _ in columns)
    arrays = [arr for _, _, arr in columns]
    rows = len(arrays[0])
    lines = [f"# units: {units}", header]
    for r in range(rows):
        lines.append(",".join(f"{arr[r]:.17g}" for arr in arrays))
    return "\n".join(lines) + "\n"


def waveforms_csv(circuit: Circuit, traj: Trajectory,
                  waves: ElementWaveforms | None = None) -> str:
    """CSV of a simulation: time, coordinate series, element waveforms.

    17 significant digits, one row per grid point, a leading ``# units:``
    comment line.  Byte-deterministic for identical inputs.
    """
    if waves is None:
        waves = branch_waveforms(circuit, traj)
    coord = "sigma" if circuit.formulation == "loop" else "rho"
    xu, vu, au = _COORD_UNITS[coord]
    columns: list[tuple[str, str, np.ndarray]] = [("t", "s", traj.t)]
    for i in range(traj.n):
        columns.append((f"{coord}{i + 1}", xu, traj.x[:, i]))
        columns.append((f"{coord}{i + 1}_dot", vu, traj.v[:, i]))
        columns.append((f"{coord}{i + 1}_ddot", au, traj.a[:, i]))
    for rec in waves:
        columns.extend(_record_columns(rec))
    return _format_csv(columns)


def drive_csv(waves: ElementWaveforms) -> str:
    """CSV of a single-element drive run."""
    columns: list[tuple[str, str, np.ndarray]] = [("t", "s", waves.t)]
    for rec in waves:
        columns.extend(_record_columns(rec))
    return _format_csv(columns)


def _record_columns(rec: ElementRecord):
    out = []
    for field in _FIELD_ORDER:
        arr = getattr(rec, field)
        if arr is not None:
            out.append((f"{rec.name}_{field}", _FIELD_UNITS[field], arr))
    return out
