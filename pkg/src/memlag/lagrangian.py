"""Assembly of circuit equations of motion from energy state functions.

Loop analysis works in integrated loop charges: each coordinate x_i is a
sigma (time integral of a loop charge), its velocity v_i = x_dot_i is the
loop charge, and its acceleration a_i is the loop current.  The Lagrangian

    L(x, v, t) = sum_k T*_k(v_branch) - sum_k U_k(x_branch)
                 + sum_sources x_branch * phi_e(t)

collects meminductor/inductor co-energy state functions T* (antiderivatives
of rho-hat over charge), memcapacitor/capacitor state functions U
(antiderivatives of phi-hat over sigma), and source potentials (phi_e is
the integrated source voltage).  Memristors and resistors enter through an
action function D(v) = sum integral of phi-hat_RM over charge, whose
velocity gradient joins the Euler-Lagrange equations:

    d/dt dL/dv_i - dL/dx_i + dD/dv_i = 0

These are the integrated Kirchhoff voltage laws of the circuit.  Node
analysis is the exact dual in integrated node fluxes (rho); the same code
assembles it with charge- and flux-sided roles swapped.

All partial derivatives are computed analytically from the per-element
term sums (chain rule through branch states); finite differences appear
only in cross-validation tests.  Because conventional linear elements are
degenerate memory elements, they are represented internally as linear
curves through the origin and handled by the same code paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .constitutive import Element, ElementKind, Modulation, ScalarCurve, SourceWaveform
from .errors import (
    AlgebraicSolveError,
    CircuitValidationError,
    CurveDomainError,
    DegenerateInertiaError,
    MemlagError,
)
from .netlist import Circuit, validate

__all__ = [
    "LagrangianSystem",
    "ABDecomposition",
    "FirstOrderSystem",
    "build_loop_system",
    "build_node_system",
    "naive_path_lagrangian",
    "el_residual",
    "extract_AB",
    "to_first_order",
]

_COND_LIMIT = 1e12
_NEWTON_TOL = 1e-12
_NEWTON_MAXITER = 100

# Term kinds.  KINETIC is an antiderivative of the element curve evaluated
# at the branch velocity (enters L with +), POTENTIAL the same at the branch
# position (enters L with -), ACTION the same at the branch velocity but in
# D, SOURCE a x_branch*phi_e(t) potential, and PATH a deliberately incorrect
# half-slope kinetic term 0.5*curve'(x_branch)*v_branch**2 used to reproduce
# the classical path-dependent construction.
_KINETIC = "kinetic"
_POTENTIAL = "potential"
_ACTION = "action"
_SOURCE = "source"
_PATH = "path"


@dataclass(frozen=True)
class _Term:
    kind: str
    coords: tuple[int, ...]  # 0-based coordinate indices
    signs: tuple[float, ...]
    element: str
    curve: ScalarCurve | None = None
    waveform: SourceWaveform | None = None

    def branch(self, vals) -> float:
        s = 0.0
        for c, sg in zip(self.coords, self.signs):
            s += sg * vals[c]
        return s

    def _curve_call(self, fn, arg: float) -> float:
        try:
            return fn(arg)
        except CurveDomainError as exc:
            raise CurveDomainError(f"element {self.element!r}: {exc}") from exc


@dataclass(frozen=True)
class LagrangianSystem:
    """Equations of motion of one circuit in one formulation.

    ``coordinate`` names what x_i is: "sigma" for loop systems, "rho" for
    node systems, "q" for the deliberately naive path construction.
    ``second_order_mask[i]`` is true when coordinate i carries an inertial
    element, i.e. its equation contains an acceleration.
    """

    n: int
    coordinate: str
    terms: tuple[_Term, ...]
    second_order_mask: tuple[bool, ...]

    # -- scalar functionals ---------------------------------------------

    def lagrangian(self, x, v, t: float = 0.0) -> float:
        """L(x, v, t), source potential terms included."""
        total = 0.0
        for tm in self.terms:
            if tm.kind == _KINETIC:
                total += tm._curve_call(tm.curve.antideriv, tm.branch(v))
            elif tm.kind == _POTENTIAL:
                total -= tm._curve_call(tm.curve.antideriv, tm.branch(x))
            elif tm.kind == _SOURCE:
                total += tm.branch(x) * tm.waveform.integral(t)
            elif tm.kind == _PATH:
                vb = tm.branch(v)
                total += 0.5 * tm._curve_call(tm.curve.deriv, tm.branch(x)) * vb * vb
        return total

    def action(self, v) -> float:
        """Dissipative action D(v); its v-gradient joins the EL equations."""
        total = 0.0
        for tm in self.terms:
            if tm.kind == _ACTION:
                total += tm._curve_call(tm.curve.antideriv, tm.branch(v))
        return total

    def forcing(self, t: float) -> np.ndarray:
        """Per-coordinate integrated source contribution at time t."""
        out = np.zeros(self.n)
        for tm in self.terms:
            if tm.kind == _SOURCE:
                fe = tm.waveform.integral(t)
                for c, sg in zip(tm.coords, tm.signs):
                    out[c] += sg * fe
        return out

    def energy(self, x, v) -> float:
        """Stored energy T* + U (kinetic plus potential state functions).

        Non-increasing along source-free trajectories whenever the kinetic
        storage is quadratic and the action is convex with minimum at 0.
        """
        total = 0.0
        for tm in self.terms:
            if tm.kind == _KINETIC:
                total += tm._curve_call(tm.curve.antideriv, tm.branch(v))
            elif tm.kind == _POTENTIAL:
                total += tm._curve_call(tm.curve.antideriv, tm.branch(x))
        return total

    # -- analytic pieces of the EL residual ------------------------------

    def residual(self, x, v, a, t: float = 0.0) -> np.ndarray:
        r = np.zeros(self.n)
        for tm in self.terms:
            if tm.kind == _KINETIC:
                w = tm._curve_call(tm.curve.deriv, tm.branch(v))
                ab = tm.branch(a)
                for c, sg in zip(tm.coords, tm.signs):
                    r[c] += sg * w * ab
            elif tm.kind == _POTENTIAL:
                val = tm._curve_call(tm.curve.value, tm.branch(x))
                for c, sg in zip(tm.coords, tm.signs):
                    r[c] += sg * val
            elif tm.kind == _ACTION:
                val = tm._curve_call(tm.curve.value, tm.branch(v))
                for c, sg in zip(tm.coords, tm.signs):
                    r[c] += sg * val
            elif tm.kind == _SOURCE:
                fe = tm.waveform.integral(t)
                for c, sg in zip(tm.coords, tm.signs):
                    r[c] -= sg * fe
            else:  # _PATH
                xb = tm.branch(x)
                vb = tm.branch(v)
                ab = tm.branch(a)
                slope = tm._curve_call(tm.curve.deriv, xb)
                slope_x = tm._curve_call(tm.curve.deriv2, xb)
                val = slope * ab + 0.5 * slope_x * vb * vb
                for c, sg in zip(tm.coords, tm.signs):
                    r[c] += sg * val
        return r

    def inertia(self, x, v) -> np.ndarray:
        """A(x, v): the coefficient matrix of the accelerations."""
        A = np.zeros((self.n, self.n))
        for tm in self.terms:
            if tm.kind == _KINETIC:
                w = tm._curve_call(tm.curve.deriv, tm.branch(v))
            elif tm.kind == _PATH:
                w = tm._curve_call(tm.curve.deriv, tm.branch(x))
            else:
                continue
            for ci, si in zip(tm.coords, tm.signs):
                for cj, sj in zip(tm.coords, tm.signs):
                    A[ci, cj] += si * sj * w
        return A

    def grad_x(self, x, v, t: float = 0.0) -> np.ndarray:
        """Analytic dL/dx (storage and source potentials)."""
        g = np.zeros(self.n)
        for tm in self.terms:
            if tm.kind == _POTENTIAL:
                val = -tm._curve_call(tm.curve.value, tm.branch(x))
            elif tm.kind == _SOURCE:
                val = tm.waveform.integral(t)
            elif tm.kind == _PATH:
                vb = tm.branch(v)
                val = 0.5 * tm._curve_call(tm.curve.deriv2, tm.branch(x)) * vb * vb
            else:
                continue
            for c, sg in zip(tm.coords, tm.signs):
                g[c] += sg * val
        return g

    def grad_v(self, x, v) -> np.ndarray:
        """Analytic dL/dv."""
        g = np.zeros(self.n)
        for tm in self.terms:
            if tm.kind == _KINETIC:
                val = tm._curve_call(tm.curve.value, tm.branch(v))
            elif tm.kind == _PATH:
                val = tm._curve_call(tm.curve.deriv, tm.branch(x)) * tm.branch(v)
            else:
                continue
            for c, sg in zip(tm.coords, tm.signs):
                g[c] += sg * val
        return g

    def _B_jacobians(self, x, v) -> tuple[np.ndarray, np.ndarray]:
        """Analytic (dB/dx, dB/dv) of the acceleration-free residual part."""
        dBx = np.zeros((self.n, self.n))
        dBv = np.zeros((self.n, self.n))
        for tm in self.terms:
            if tm.kind == _POTENTIAL:
                w = tm._curve_call(tm.curve.deriv, tm.branch(x))
                _accumulate(dBx, tm, w)
            elif tm.kind == _ACTION:
                w = tm._curve_call(tm.curve.deriv, tm.branch(v))
                _accumulate(dBv, tm, w)
            elif tm.kind == _PATH:
                # B-part is 0.5*slope'(xb)*vb^2; x-derivative needs the
                # curve's third derivative, which polynomial curves have.
                xb = tm.branch(x)
                vb = tm.branch(v)
                _accumulate(dBv, tm, tm._curve_call(tm.curve.deriv2, xb) * vb)
                _accumulate(dBx, tm, 0.5 * _deriv3(tm.curve, xb) * vb * vb)
        return dBx, dBv

    def _B_time_partial(self, t: float) -> np.ndarray:
        out = np.zeros(self.n)
        for tm in self.terms:
            if tm.kind == _SOURCE:
                e = tm.waveform.value(t)
                for c, sg in zip(tm.coords, tm.signs):
                    out[c] -= sg * e
        return out

    def domain_box(self, half_width: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """Per-coordinate symmetric bounds (x_box, v_box) that keep every
        branch state inside its curve domain, starting from +-half_width."""
        xb = np.full(self.n, half_width)
        vb = np.full(self.n, half_width)
        for tm in self.terms:
            if tm.curve is None:
                continue
            lo, hi = tm.curve.domain
            limit = min(-lo, hi)
            if limit <= 0:
                raise MemlagError(
                    f"element {tm.element!r}: curve domain does not "
                    f"surround 0, no symmetric operating box exists"
                )
            allowance = (1.0 - 1e-9) * limit / len(tm.coords)
            # PATH evaluates its curve at the branch position, like POTENTIAL.
            target = xb if tm.kind in (_POTENTIAL, _PATH) else vb
            for c in tm.coords:
                target[c] = min(target[c], allowance)
        return xb, vb


def _accumulate(mat: np.ndarray, tm: _Term, w: float):
    for ci, si in zip(tm.coords, tm.signs):
        for cj, sj in zip(tm.coords, tm.signs):
            mat[ci, cj] += si * sj * w


def _deriv3(curve: ScalarCurve, x: float) -> float:
    if curve.coeffs is None:
        return 0.0
    coeffs = curve.coeffs
    acc = 0.0
    for k in range(len(coeffs) - 1, 2, -1):
        acc = acc * x + coeffs[k] * k * (k - 1) * (k - 2)
    return acc


# ---------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------


def _linear_curve(slope: float) -> ScalarCurve:
    return ScalarCurve.poly((0.0, slope))


def _membership(el: Element) -> tuple[tuple[int, ...], tuple[float, ...]]:
    coords = tuple(idx - 1 for idx, _ in el.membership)
    signs = tuple(float(s) for _, s in el.membership)
    return coords, signs


def _checked(circuit: Circuit, formulation: str) -> None:
    if circuit.formulation != formulation:
        raise MemlagError(
            f"circuit {circuit.name!r} is a {circuit.formulation} "
            f"formulation, not {formulation}"
        )
    diags = validate(circuit)
    if not diags.ok:
        raise CircuitValidationError(diags)


def build_loop_system(circuit: Circuit) -> LagrangianSystem:
    """Assemble the loop (integrated-charge) system of a validated circuit.

    Meminductors and inductors contribute kinetic co-energy in the branch
    charge, memcapacitors and capacitors contribute potential energy in the
    branch sigma, memristors and resistors contribute the action, and
    voltage sources contribute x_branch*phi_e(t).
    """
    _checked(circuit, "loop")
    terms = []
    for el in circuit.elements:
        coords, signs = _membership(el)
        kind = el.kind
        if kind is ElementKind.MEMINDUCTOR:
            terms.append(_Term(_KINETIC, coords, signs, el.name, curve=el.curve))
        elif kind is ElementKind.INDUCTOR:
            terms.append(_Term(_KINETIC, coords, signs, el.name,
                               curve=_linear_curve(el.value)))
        elif kind is ElementKind.MEMCAPACITOR:
            terms.append(_Term(_POTENTIAL, coords, signs, el.name, curve=el.curve))
        elif kind is ElementKind.CAPACITOR:
            terms.append(_Term(_POTENTIAL, coords, signs, el.name,
                               curve=_linear_curve(1.0 / el.value)))
        elif kind is ElementKind.MEMRISTOR:
            terms.append(_Term(_ACTION, coords, signs, el.name, curve=el.curve))
        elif kind is ElementKind.RESISTOR:
            terms.append(_Term(_ACTION, coords, signs, el.name,
                               curve=_linear_curve(el.value)))
        else:  # voltage source
            terms.append(_Term(_SOURCE, coords, signs, el.name,
                               waveform=el.waveform))
    return LagrangianSystem(
        n=circuit.n_coords,
        coordinate="sigma",
        terms=tuple(terms),
        second_order_mask=_mask(circuit, (ElementKind.INDUCTOR,
                                          ElementKind.MEMINDUCTOR)),
    )


def build_node_system(circuit: Circuit) -> LagrangianSystem:
    """Assemble the node (integrated-flux) dual system.

    Memcapacitors and capacitors are the inertial storage here (co-energy in
    the branch flux), meminductors and inductors the potential storage in the
    branch rho, and current sources contribute x_branch*q_e(t).
    """
    _checked(circuit, "node")
    terms = []
    for el in circuit.elements:
        coords, signs = _membership(el)
        kind = el.kind
        if kind is ElementKind.MEMCAPACITOR:
            terms.append(_Term(_KINETIC, coords, signs, el.name, curve=el.curve))
        elif kind is ElementKind.CAPACITOR:
            terms.append(_Term(_KINETIC, coords, signs, el.name,
                               curve=_linear_curve(el.value)))
        elif kind is ElementKind.MEMINDUCTOR:
            terms.append(_Term(_POTENTIAL, coords, signs, el.name, curve=el.curve))
        elif kind is ElementKind.INDUCTOR:
            terms.append(_Term(_POTENTIAL, coords, signs, el.name,
                               curve=_linear_curve(1.0 / el.value)))
        elif kind is ElementKind.MEMRISTOR:
            terms.append(_Term(_ACTION, coords, signs, el.name, curve=el.curve))
        elif kind is ElementKind.RESISTOR:
            terms.append(_Term(_ACTION, coords, signs, el.name,
                               curve=_linear_curve(1.0 / el.value)))
        else:  # current source
            terms.append(_Term(_SOURCE, coords, signs, el.name,
                               waveform=el.waveform))
    return LagrangianSystem(
        n=circuit.n_coords,
        coordinate="rho",
        terms=tuple(terms),
        second_order_mask=_mask(circuit, (ElementKind.CAPACITOR,
                                          ElementKind.MEMCAPACITOR)),
    )


def _mask(circuit: Circuit, inertial_kinds) -> tuple[bool, ...]:
    mask = [False] * circuit.n_coords
    for el in circuit.elements:
        if el.kind in inertial_kinds:
            for idx, _ in el.membership:
                mask[idx - 1] = True
    return tuple(mask)


def naive_path_lagrangian(circuit: Circuit) -> LagrangianSystem:
    """The classical charge-coordinate Lagrangian, built the WRONG way.

    Treats the state-dependent meminductance like a constant inductance:
    L(q, qdot) = sum 0.5*L_M(q_branch)*qdot_branch**2 - sum q_branch**2/(2C).
    The factor 0.5 survives differentiation and produces half the correct
    Coriolis-like term, so the EL residual of this system differs from the
    true equation of motion by -0.5*L_M'(q)*qdot**2 per meminductor.  It
    exists for demonstrations and tests, not for simulation of real devices.

    Only charge-modulated meminductors and linear capacitors are accepted.
    """
    _checked(circuit, "loop")
    terms = []
    for el in circuit.elements:
        coords, signs = _membership(el)
        if el.kind is ElementKind.MEMINDUCTOR:
            if el.modulation is not Modulation.CHARGE:
                raise MemlagError(
                    f"element {el.name!r}: naive path construction needs "
                    f"charge modulation"
                )
            terms.append(_Term(_PATH, coords, signs, el.name, curve=el.curve))
        elif el.kind is ElementKind.CAPACITOR:
            terms.append(_Term(_POTENTIAL, coords, signs, el.name,
                               curve=_linear_curve(1.0 / el.value)))
        else:
            raise MemlagError(
                f"element {el.name!r}: unsupported element kind "
                f"{el.kind.value} for the naive path construction "
                f"(meminductors and linear capacitors only)"
            )
    return LagrangianSystem(
        n=circuit.n_coords,
        coordinate="q",
        terms=tuple(terms),
        second_order_mask=_mask(circuit, (ElementKind.MEMINDUCTOR,)),
    )


# ---------------------------------------------------------------------
# Residual and (A, B) extraction
# ---------------------------------------------------------------------


def el_residual(sys: LagrangianSystem, x, v, a, t: float = 0.0) -> np.ndarray:
    """Euler-Lagrange residual r = d/dt dL/dv - dL/dx + dD/dv.

    Zero along true trajectories; each component is one integrated
    Kirchhoff law.  All partials are analytic.
    """
    return sys.residual(np.asarray(x, float), np.asarray(v, float),
                        np.asarray(a, float), float(t))


@dataclass(frozen=True)
class ABDecomposition:
    """The residual split r = A(x,v,t)*a + B(x,v,t).

    ``A`` and ``B`` are plain callables so hand-written pairs can be
    checked with the same machinery as assembled systems.
    """

    n: int
    A: object  # callable (x, v, t) -> (n, n) array
    B: object  # callable (x, v, t) -> (n,) array


def extract_AB(sys: LagrangianSystem) -> ABDecomposition:
    """Split the EL residual into inertia matrix A and remainder B.

    Computed through residual calls (B at a=0, columns of A by unit
    accelerations), which is exact because the residual is affine in a.
    """
    n = sys.n

    def B(x, v, t=0.0):
        return sys.residual(np.asarray(x, float), np.asarray(v, float),
                            np.zeros(n), float(t))

    def A(x, v, t=0.0):
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        base = sys.residual(x, v, np.zeros(n), float(t))
        cols = np.empty((n, n))
        for j in range(n):
            unit = np.zeros(n)
            unit[j] = 1.0
            cols[:, j] = sys.residual(x, v, unit, float(t)) - base
        return cols

    return ABDecomposition(n=n, A=A, B=B)


# ---------------------------------------------------------------------
# First-order (state-space) reduction
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class FirstOrderSystem:
    """Semi-explicit state-space form of a LagrangianSystem.

    State y = (x_1..x_n, v_i for second-order i).  First-order coordinates
    (zero A row, e.g. a loop with resistance but no inductance) have their
    velocities fixed algebraically by their own EL rows; those rows are
    solved by damped Newton with a bisection fallback at every evaluation.
    """

    system: LagrangianSystem

    @cached_property
    def second_order(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.system.second_order_mask) if m)

    @cached_property
    def first_order(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.system.second_order_mask) if not m)

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def dim(self) -> int:
        return self.n + len(self.second_order)

    def pack(self, x0, v0) -> np.ndarray:
        """State vector from full initial coordinates and velocities.

        Velocities of first-order coordinates are not state: they are
        recomputed from the algebraic rows, and whatever is passed for them
        here is ignored.
        """
        x0 = np.asarray(x0, float)
        v0 = np.asarray(v0, float)
        if x0.shape != (self.n,) or v0.shape != (self.n,):
            raise MemlagError(
                f"expected {self.n} initial coordinates and velocities"
            )
        return np.concatenate([x0, v0[list(self.second_order)]])

    def unpack(self, y) -> tuple[np.ndarray, np.ndarray]:
        y = np.asarray(y, float)
        x = y[: self.n]
        v = np.zeros(self.n)
        for k, i in enumerate(self.second_order):
            v[i] = y[self.n + k]
        return x, v

    def _solve_velocities(self, x, v, t: float) -> np.ndarray:
        """Fill v at first-order coordinates so their residual rows vanish."""
        F = self.first_order
        if not F:
            return v
        sysm = self.system
        idx = list(F)

        def rows(vv):
            return sysm.residual(x, vv, np.zeros(self.n), t)[idx]

        g = rows(v)
        tol = _NEWTON_TOL * (1.0 + float(np.max(np.abs(g))))
        for _ in range(_NEWTON_MAXITER):
            if float(np.max(np.abs(g))) <= tol:
                return v
            _, dBv = sysm._B_jacobians(x, v)
            J = dBv[np.ix_(idx, idx)]
            try:
                step = np.linalg.solve(J, -g)
            except np.linalg.LinAlgError:
                if len(idx) == 1:
                    return self._bisect_velocity(x, v, t, idx[0], tol)
                raise AlgebraicSolveError(
                    "algebraic row unsolvable: singular velocity Jacobian"
                ) from None
            base = float(np.linalg.norm(g))
            lam = 1.0
            while lam >= 1e-10:
                trial = v.copy()
                trial[idx] += lam * step
                g_trial = rows(trial)
                if float(np.linalg.norm(g_trial)) < base:
                    v = trial
                    g = g_trial
                    break
                lam *= 0.5
            else:
                if len(idx) == 1:
                    return self._bisect_velocity(x, v, t, idx[0], tol)
                raise AlgebraicSolveError(
                    "algebraic row unsolvable: Newton found no descent"
                )
        raise AlgebraicSolveError(
            f"algebraic row unsolvable: no convergence in "
            f"{_NEWTON_MAXITER} Newton iterations"
        )

    def _bisect_velocity(self, x, v, t, row: int, tol: float) -> np.ndarray:
        sysm = self.system

        def g_of(val):
            vv = v.copy()
            vv[row] = val
            return sysm.residual(x, vv, np.zeros(self.n), t)[row]

        lo, hi = -1.0, 1.0
        glo, ghi = g_of(lo), g_of(hi)
        for _ in range(80):
            if glo <= 0.0 <= ghi:
                break
            lo *= 2.0
            hi *= 2.0
            glo, ghi = g_of(lo), g_of(hi)
        else:
            raise AlgebraicSolveError(
                f"algebraic row unsolvable: coordinate {row + 1} residual "
                f"does not bracket zero"
            )
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            gm = g_of(mid)
            if abs(gm) <= tol:
                v = v.copy()
                v[row] = mid
                return v
            if gm > 0.0:
                hi = mid
            else:
                lo = mid
        raise AlgebraicSolveError(
            f"algebraic row unsolvable: bisection stalled on coordinate "
            f"{row + 1}"
        )

    def _accelerations(self, x, v, t: float) -> np.ndarray:
        """Full acceleration vector; first-order rows by implicit
        differentiation of their algebraic constraint."""
        sysm = self.system
        S = list(self.second_order)
        F = list(self.first_order)
        a = np.zeros(self.n)
        B = sysm.residual(x, v, a, t)
        if S:
            A = sysm.inertia(x, v)
            A_SS = A[np.ix_(S, S)]
            cond = np.linalg.cond(A_SS)
            if not np.isfinite(cond) or cond > _COND_LIMIT:
                raise DegenerateInertiaError(
                    f"degenerate inertia: condition number {cond:.3g} of the "
                    f"second-order block exceeds {_COND_LIMIT:.0e}"
                )
            a[S] = np.linalg.solve(A_SS, -B[S])
        if F:
            # The constraint B_F(x, v, t) = 0 holds along the trajectory;
            # differentiate in time and solve for the first-order
            # accelerations.
            dBx, dBv = sysm._B_jacobians(x, v)
            dBt = sysm._B_time_partial(t)
            rhs = -(dBx[F] @ v + dBt[F])
            if S:
                rhs -= dBv[np.ix_(F, S)] @ a[S]
            J = dBv[np.ix_(F, F)]
            try:
                a[F] = np.linalg.solve(J, rhs)
            except np.linalg.LinAlgError:
                raise AlgebraicSolveError(
                    "algebraic row unsolvable: singular velocity Jacobian "
                    "while reconstructing accelerations"
                ) from None
        return a

    def rhs(self, t: float, y) -> np.ndarray:
        """State derivative: (xdot = v with algebraic rows solved, vdot_S)."""
        x, v = self.unpack(y)
        v = self._solve_velocities(x, v, t)
        a = self._accelerations(x, v, t)
        return np.concatenate([v, a[list(self.second_order)]])

    def expand(self, t: float, y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Full (x, v, a) at one state, algebraic rows re-solved."""
        x, v = self.unpack(y)
        v = self._solve_velocities(x, v, t)
        a = self._accelerations(x, v, t)
        return x, v, a


def to_first_order(sys: LagrangianSystem) -> FirstOrderSystem:
    """State-space reduction; see :class:`FirstOrderSystem`.

    Every coordinate must be second-order (its equation carries an
    acceleration) or solvable for its velocity (a dissipative first-order
    row).  Those are exactly the circuits :func:`memlag.netlist.validate`
    accepts, so assembled systems always qualify.
    """
    return FirstOrderSystem(system=sys)
