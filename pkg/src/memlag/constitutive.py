"""Constitutive relations for memory and conventional circuit elements.

A memory element is characterised by a strictly increasing curve between
two integrated electrical variables: a memristor relates charge and flux,
a meminductor relates charge and time-integrated flux, a memcapacitor
relates flux and time-integrated charge.  The incremental slope of the
curve is the state-dependent memristance / meminductance / memcapacitance,
and the antiderivative of the curve is the energy-like state function the
Lagrangian machinery is built from.

Two curve representations are supported, both with exact calculus
(derivative, antiderivative from zero, inverse, and antiderivative of the
inverse), so no quadrature error enters the energy bookkeeping:

* polynomial, ascending coefficients;
* piecewise linear through explicit breakpoints.

Curves carry a validity domain and refuse to extrapolate: evaluation
outside the domain raises :class:`~memlag.errors.CurveDomainError` instead
of silently returning nonsense.  When 0 lies in the domain the curve must
pass through the origin, so zero accumulated state maps to zero output.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CurveDomainError, CurveError, CurveRangeError

__all__ = [
    "ScalarCurve",
    "ElementKind",
    "Modulation",
    "SourceWaveform",
    "Element",
    "curve_eval",
    "curve_deriv",
    "curve_antideriv",
    "curve_inverse",
    "incremental_value",
    "legendre_residual",
    "parse_curve_literal",
    "parse_domain_literal",
    "format_curve_literal",
    "format_domain_literal",
    "DEFAULT_POLY_DOMAIN",
]

DEFAULT_POLY_DOMAIN = (-1e6, 1e6)

# Sample count for the strict-monotonicity check on polynomial curves.
_MONO_SAMPLES = 257
_INVERSE_TOL = 1e-12


def _poly_val(coeffs, x):
    # Horner, highest coefficient first.
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv_coeffs(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs) if k >= 1)


def _poly_antideriv_coeffs(coeffs):
    # Antiderivative with zero constant term, so P(0) = 0.
    return (0.0,) + tuple(c / (k + 1) for k, c in enumerate(coeffs))


@dataclass(frozen=True)
class ScalarCurve:
    """Strictly increasing scalar constitutive curve on a closed domain.

    Exactly one of ``coeffs`` (polynomial, ascending powers) or ``points``
    (piecewise-linear breakpoints, strictly increasing in x) is set.  Use
    the :meth:`poly` and :meth:`pwl` constructors rather than the raw
    dataclass fields.
    """

    coeffs: tuple[float, ...] | None = None
    points: tuple[tuple[float, float], ...] | None = None
    domain: tuple[float, float] = field(default=None)  # type: ignore[assignment]

    # -- construction -------------------------------------------------

    @classmethod
    def poly(cls, coeffs, domain=None) -> "ScalarCurve":
        """Polynomial curve ``c0 + c1*x + c2*x**2 + ...``.

        ``domain`` defaults to ``(-1e6, 1e6)``.
        """
        return cls(coeffs=tuple(float(c) for c in coeffs), domain=domain)

    @classmethod
    def pwl(cls, points, domain=None) -> "ScalarCurve":
        """Piecewise-linear curve through ``points``.

        The domain defaults to the breakpoint hull and may only shrink it:
        the curve never extrapolates beyond its breakpoints.
        """
        pts = tuple((float(x), float(y)) for x, y in points)
        return cls(points=pts, domain=domain)

    def __post_init__(self):
        if (self.coeffs is None) == (self.points is None):
            raise CurveError("curve needs exactly one of coeffs or points")
        if self.coeffs is not None:
            self._init_poly()
        else:
            self._init_pwl()
        lo, hi = self.domain
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise CurveError(f"invalid domain [{lo}, {hi}]")
        self._check_monotone()
        self._check_origin()

    def _init_poly(self):
        if len(self.coeffs) == 0:
            raise CurveError("polynomial curve needs at least one coefficient")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise CurveError("polynomial coefficients must be finite")
        if self.domain is None:
            object.__setattr__(self, "domain", DEFAULT_POLY_DOMAIN)
        else:
            object.__setattr__(
                self, "domain", (float(self.domain[0]), float(self.domain[1]))
            )

    def _init_pwl(self):
        pts = self.points
        if len(pts) < 2:
            raise CurveError("piecewise-linear curve needs at least two points")
        for x, y in pts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise CurveError("breakpoints must be finite")
        xs = [p[0] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise CurveError("breakpoint x values must be strictly increasing")
        hull = (xs[0], xs[-1])
        if self.domain is None:
            object.__setattr__(self, "domain", hull)
        else:
            lo, hi = float(self.domain[0]), float(self.domain[1])
            if lo < hull[0] or hi > hull[1]:
                raise CurveError(
                    f"domain [{lo}, {hi}] exceeds breakpoint hull "
                    f"[{hull[0]}, {hull[1]}]; a pwl curve does not extrapolate"
                )
            object.__setattr__(self, "domain", (lo, hi))

    def _check_monotone(self):
        lo, hi = self.domain
        if self.points is not None:
            # Exact check: every segment slope must be positive.
            for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
                if (y1 - y0) / (x1 - x0) <= 0.0:
                    raise CurveError(
                        f"curve is not strictly increasing: slope "
                        f"{(y1 - y0) / (x1 - x0):g} on segment [{x0:g}, {x1:g}]"
                    )
            return
        # Sampled check for polynomials; endpoints included.
        dcoef = self._dcoeffs
        for k in range(_MONO_SAMPLES):
            x = lo + (hi - lo) * k / (_MONO_SAMPLES - 1)
            if _poly_val(dcoef, x) <= 0.0:
                raise CurveError(
                    f"curve is not strictly increasing on its domain: "
                    f"derivative {_poly_val(dcoef, x):g} at x={x:g}"
                )

    def _check_origin(self):
        lo, hi = self.domain
        if not (lo <= 0.0 <= hi):
            return
        if self.coeffs is not None:
            if self.coeffs[0] != 0.0:
                raise CurveError(
                    f"curve must pass through the origin (0 is in the domain) "
                    f"but has constant term {self.coeffs[0]:g}"
                )
        else:
            y0 = self._pwl_value(0.0)
            scale = 1.0 + max(abs(y) for _, y in self.points)
            if abs(y0) > 1e-12 * scale:
                raise CurveError(
                    f"curve must pass through the origin (0 is in the domain) "
                    f"but interpolates to {y0:g} at x=0"
                )

    # -- cached helpers ------------------------------------------------

    @cached_property
    def _dcoeffs(self):
        return _poly_deriv_coeffs(self.coeffs)

    @cached_property
    def _ddcoeffs(self):
        return _poly_deriv_coeffs(self._dcoeffs)

    @cached_property
    def _acoeffs(self):
        return _poly_antideriv_coeffs(self.coeffs)

    @cached_property
    def _xs(self):
        return tuple(p[0] for p in self.points)

    @cached_property
    def _ys(self):
        return tuple(p[1] for p in self.points)

    @cached_property
    def _cumint(self):
        # Integral of the pwl curve from xs[0] to each breakpoint.
        xs, ys = self._xs, self._ys
        acc = [0.0]
        for k in range(len(xs) - 1):
            acc.append(acc[-1] + 0.5 * (ys[k] + ys[k + 1]) * (xs[k + 1] - xs[k]))
        return tuple(acc)

    @cached_property
    def _swapped(self):
        # Inverse of a pwl curve is the pwl curve with coordinates swapped.
        return ScalarCurve.pwl(
            tuple((y, x) for x, y in self.points),
            domain=(self._pwl_value(self.domain[0]), self._pwl_value(self.domain[1])),
        )

    # -- evaluation ----------------------------------------------------

    def _require_in_domain(self, x: float):
        lo, hi = self.domain
        if not (lo <= x <= hi):
            raise CurveDomainError(
                f"x={x:g} outside domain [{lo:g}, {hi:g}] of curve "
                f"{format_curve_literal(self)}"
            )

    def _segment(self, x: float) -> int:
        # Index k with xs[k] <= x <= xs[k+1]; right-continuous at breakpoints.
        xs = self._xs
        k = bisect_right(xs, x) - 1
        return min(max(k, 0), len(xs) - 2)

    def _pwl_value(self, x: float) -> float:
        k = self._segment(x)
        x0, y0 = self.points[k]
        x1, y1 = self.points[k + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def value(self, x: float) -> float:
        """Curve value at ``x``; raises outside the domain."""
        x = float(x)
        self._require_in_domain(x)
        if self.coeffs is not None:
            return _poly_val(self.coeffs, x)
        return self._pwl_value(x)

    __call__ = value

    def deriv(self, x: float) -> float:
        """Incremental slope at ``x``.

        Piecewise-linear curves use the right-hand segment slope at interior
        breakpoints and the final segment slope at the right endpoint.
        """
        x = float(x)
        self._require_in_domain(x)
        if self.coeffs is not None:
            return _poly_val(self._dcoeffs, x)
        xs = self._xs
        k = bisect_right(xs, x) - 1
        k = min(max(k, 0), len(xs) - 2)
        x0, y0 = self.points[k]
        x1, y1 = self.points[k + 1]
        return (y1 - y0) / (x1 - x0)

    def deriv2(self, x: float) -> float:
        """Second derivative at ``x`` (zero for piecewise-linear curves)."""
        x = float(x)
        self._require_in_domain(x)
        if self.coeffs is not None:
            return _poly_val(self._ddcoeffs, x)
        return 0.0

    def antideriv(self, x: float) -> float:
        """Exact integral of the curve from 0 to ``x``.

        Requires 0 in the domain; this is the state-function value at ``x``.
        """
        x = float(x)
        self._require_in_domain(x)
        self._require_in_domain(0.0)
        if self.coeffs is not None:
            return _poly_val(self._acoeffs, x)
        return self._pwl_cumint(x) - self._pwl_cumint(0.0)

    def _pwl_cumint(self, x: float) -> float:
        k = self._segment(x)
        x0 = self._xs[k]
        y0 = self._ys[k]
        return self._cumint[k] + 0.5 * (y0 + self._pwl_value(x)) * (x - x0)

    def y_range(self) -> tuple[float, float]:
        """Range of the curve over its domain."""
        return (self.value(self.domain[0]), self.value(self.domain[1]))

    def inverse(self, y: float) -> float:
        """Point x in the domain with curve(x) = y.

        Satisfies ``|curve(x) - y| <= 1e-12 * (1 + |y|)``.  Raises
        :class:`CurveRangeError` when ``y`` lies outside the curve range.
        """
        y = float(y)
        ylo, yhi = self.y_range()
        if not (ylo <= y <= yhi):
            raise CurveRangeError(
                f"y={y:g} outside range [{ylo:g}, {yhi:g}] of curve "
                f"{format_curve_literal(self)}"
            )
        if self.points is not None:
            # Exact solve on the containing segment.
            ys = self._ys
            k = bisect_right(ys, y) - 1
            k = min(max(k, 0), len(ys) - 2)
            x0, y0 = self.points[k]
            x1, y1 = self.points[k + 1]
            x = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            return min(max(x, self.domain[0]), self.domain[1])
        return self._poly_inverse(y)

    def _poly_inverse(self, y: float) -> float:
        lo, hi = self.domain
        tol = _INVERSE_TOL * (1.0 + abs(y))
        x = 0.5 * (lo + hi)
        for _ in range(200):
            f = _poly_val(self.coeffs, x) - y
            if abs(f) <= tol:
                return x
            if f > 0.0:
                hi = x
            else:
                lo = x
            d = _poly_val(self._dcoeffs, x)
            xn = x - f / d if d > 0.0 else x
            # Newton step when it stays inside the bracket, else bisect.
            x = xn if lo < xn < hi else 0.5 * (lo + hi)
        return x

    def co_antideriv(self, y: float) -> float:
        """Exact integral of the inverse curve from 0 to ``y``.

        This is the Legendre-dual state function: with x = inverse(y) it
        equals x*y - antideriv(x).
        """
        y = float(y)
        if self.points is not None:
            return self._swapped.antideriv(y)
        # Substituting s = curve(u) turns the integral of the inverse into
        # the integral of u*curve'(u) from 0 to inverse(y), which is exact
        # polynomial calculus plus one inversion.
        x = self._poly_inverse_checked(y)
        shifted = (0.0,) + self._dcoeffs  # u * curve'(u)
        return _poly_val(_poly_antideriv_coeffs(shifted), x)

    def _poly_inverse_checked(self, y: float) -> float:
        ylo, yhi = self.y_range()
        if not (ylo <= y <= yhi):
            raise CurveRangeError(
                f"y={y:g} outside range [{ylo:g}, {yhi:g}] of curve "
                f"{format_curve_literal(self)}"
            )
        return self._poly_inverse(y)


# ---------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------


class ElementKind(enum.Enum):
    RESISTOR = "R"
    INDUCTOR = "L"
    CAPACITOR = "C"
    MEMRISTOR = "MR"
    MEMINDUCTOR = "ML"
    MEMCAPACITOR = "MC"
    SOURCE = "SRC"

    @property
    def is_memory(self) -> bool:
        return self in (ElementKind.MEMRISTOR, ElementKind.MEMINDUCTOR,
                        ElementKind.MEMCAPACITOR)

    @property
    def is_conventional(self) -> bool:
        return self in (ElementKind.RESISTOR, ElementKind.INDUCTOR,
                        ElementKind.CAPACITOR)


class Modulation(enum.Enum):
    """Which integrated variable modulates a memory element's slope."""

    CHARGE = "q"
    FLUX = "phi"
    INTEGRATED_FLUX = "rho"
    INTEGRATED_CHARGE = "sigma"


# Modulations each memory kind admits: a memristor is a charge/flux relation,
# a meminductor relates charge to integrated flux, a memcapacitor relates
# flux to integrated charge.
ALLOWED_MODULATIONS = {
    ElementKind.MEMRISTOR: (Modulation.CHARGE, Modulation.FLUX),
    ElementKind.MEMINDUCTOR: (Modulation.CHARGE, Modulation.INTEGRATED_FLUX),
    ElementKind.MEMCAPACITOR: (Modulation.INTEGRATED_CHARGE, Modulation.FLUX),
}


@dataclass(frozen=True)
class SourceWaveform:
    """Ideal source waveform with closed-form time integral.

    ``shape`` is "dc" or "sin".  The sinusoid is
    ``amplitude * sin(omega * t + phase)``.
    """

    shape: str
    amplitude: float
    omega: float | None = None
    phase: float | None = None

    def __post_init__(self):
        if self.shape not in ("dc", "sin"):
            raise CurveError(f"unknown waveform shape {self.shape!r}")
        if not math.isfinite(self.amplitude):
            raise CurveError("waveform amplitude must be finite")
        if self.shape == "sin":
            if self.omega is None or not (math.isfinite(self.omega) and self.omega > 0):
                raise CurveError("sin waveform needs omega > 0")
            if self.phase is None:
                object.__setattr__(self, "phase", 0.0)
        else:
            if self.omega is not None or self.phase is not None:
                raise CurveError("dc waveform takes no omega or phase")

    def value(self, t: float) -> float:
        if self.shape == "dc":
            return self.amplitude
        return self.amplitude * math.sin(self.omega * t + self.phase)

    __call__ = value

    def integral(self, t: float) -> float:
        """Integral of the waveform from 0 to ``t``."""
        if self.shape == "dc":
            return self.amplitude * t
        return (self.amplitude / self.omega) * (
            math.cos(self.phase) - math.cos(self.omega * t + self.phase)
        )

    def derivative(self, t: float) -> float:
        if self.shape == "dc":
            return 0.0
        return self.amplitude * self.omega * math.cos(self.omega * t + self.phase)


@dataclass(frozen=True)
class Element:
    """One circuit element and its coordinate membership.

    ``membership`` lists ``(coordinate index, sign)`` pairs with 1-based
    indices and signs +1/-1: the element's branch variable is the signed sum
    of the coordinates it belongs to.  Exactly one of ``value`` (conventional
    kinds), ``curve`` + ``modulation`` (memory kinds), or ``waveform`` +
    ``source_role`` (sources) is populated.
    """

    name: str
    kind: ElementKind
    membership: tuple[tuple[int, int], ...]
    value: float | None = None
    curve: ScalarCurve | None = None
    modulation: Modulation | None = None
    waveform: SourceWaveform | None = None
    source_role: str | None = None  # "voltage" | "current"
    line: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.name:
            raise CurveError("element needs a name")
        if not self.membership:
            raise CurveError(f"element {self.name!r} belongs to no coordinate")
        seen = set()
        for idx, sign in self.membership:
            if idx < 1:
                raise CurveError(
                    f"element {self.name!r}: coordinate index {idx} is not positive"
                )
            if idx in seen:
                raise CurveError(
                    f"element {self.name!r}: coordinate {idx} listed twice"
                )
            seen.add(idx)
            if sign not in (1, -1):
                raise CurveError(
                    f"element {self.name!r}: membership sign must be +1 or -1"
                )
        k = self.kind
        if k.is_conventional:
            self._expect(self.value is not None, "needs value=")
            self._expect(self.curve is None and self.modulation is None,
                         "takes no curve")
            self._expect(self.waveform is None and self.source_role is None,
                         "takes no waveform")
            if not (math.isfinite(self.value) and self.value > 0.0):
                raise CurveError(
                    f"element {self.name!r}: value must be strictly positive, "
                    f"got {self.value!r}"
                )
        elif k.is_memory:
            self._expect(self.curve is not None, "needs a curve")
            self._expect(self.modulation is not None, "needs a modulation")
            self._expect(self.value is None, "takes no value=")
            self._expect(self.waveform is None and self.source_role is None,
                         "takes no waveform")
            if self.modulation not in ALLOWED_MODULATIONS[k]:
                allowed = "/".join(m.value for m in ALLOWED_MODULATIONS[k])
                raise CurveError(
                    f"element {self.name!r}: modulation "
                    f"{self.modulation.value!r} not valid for {k.value} "
                    f"(expected {allowed})"
                )
            lo, hi = self.curve.domain
            if not (lo <= 0.0 <= hi):
                raise CurveError(
                    f"element {self.name!r}: memory curve domain must contain 0"
                )
        elif k is ElementKind.SOURCE:
            self._expect(self.waveform is not None, "needs a waveform")
            self._expect(self.source_role in ("voltage", "current"),
                         "needs a source role of voltage or current")
            self._expect(self.value is None and self.curve is None
                         and self.modulation is None, "takes only a waveform")
        else:  # pragma: no cover - enum is closed
            raise CurveError(f"unhandled kind {k}")

    def _expect(self, ok: bool, what: str):
        if not ok:
            raise CurveError(f"element {self.name!r} ({self.kind.value}) {what}")


# ---------------------------------------------------------------------
# Module-level curve operations
# ---------------------------------------------------------------------


def curve_eval(curve: ScalarCurve, x: float) -> float:
    """Evaluate the curve at ``x``; domain-checked, never extrapolates."""
    return curve.value(x)


def curve_deriv(curve: ScalarCurve, x: float) -> float:
    """Incremental slope at ``x`` (right-hand slope at pwl breakpoints)."""
    return curve.deriv(x)


def curve_antideriv(curve: ScalarCurve, x: float) -> float:
    """Integral of the curve from 0 to ``x`` (exact for both representations)."""
    return curve.antideriv(x)


def curve_inverse(curve: ScalarCurve, y: float) -> float:
    """Invert the curve: the x with ``curve(x) = y`` to 1e-12*(1+|y|)."""
    return curve.inverse(y)


def incremental_value(element: Element, state: float) -> float:
    """State-dependent slope of an element's constitutive relation.

    For memory elements this is the memristance / meminductance /
    memcapacitance at the given modulating state; conventional linear
    elements return their constant parameter regardless of ``state``, which
    is exactly the sense in which they are degenerate memory elements.
    """
    if element.kind.is_memory:
        return element.curve.deriv(state)
    if element.kind.is_conventional:
        return element.value
    raise CurveError(f"element {element.name!r} (source) has no incremental value")


def legendre_residual(curve: ScalarCurve, x: float) -> float:
    """Duality defect ``F(x) + F*(y) - x*y`` with ``y = curve(x)``.

    ``F`` is the antiderivative of the curve and ``F*`` the antiderivative
    of its inverse.  For any strictly increasing curve through the origin
    the two state functions are Legendre duals, so the residual vanishes up
    to inversion round-off.
    """
    y = curve.value(x)
    return curve.antideriv(x) + curve.co_antideriv(y) - x * y


# ---------------------------------------------------------------------
# Curve literals (the textual form used by netlists)
# ---------------------------------------------------------------------


def _parse_reals(body: str, what: str) -> list[float]:
    out = []
    for piece in body.split(","):
        piece = piece.strip()
        if not piece:
            raise CurveError(f"empty number in {what}")
        try:
            out.append(float(piece))
        except ValueError:
            raise CurveError(f"bad number {piece!r} in {what}") from None
    return out


def parse_curve_literal(text: str, domain: tuple[float, float] | None = None
                        ) -> ScalarCurve:
    """Parse ``poly(c0,c1,...)`` or ``pwl((x0,y0),(x1,y1),...)``."""
    text = text.strip()
    if text.startswith("poly(") and text.endswith(")"):
        coeffs = _parse_reals(text[len("poly("):-1], "poly literal")
        return ScalarCurve.poly(coeffs, domain=domain)
    if text.startswith("pwl(") and text.endswith(")"):
        body = text[len("pwl("):-1]
        pts = []
        i = 0
        while i < len(body):
            if body[i] in ", ":
                i += 1
                continue
            if body[i] != "(":
                raise CurveError(f"expected '(' at position {i} of pwl literal")
            j = body.find(")", i)
            if j < 0:
                raise CurveError("unbalanced parentheses in pwl literal")
            pair = _parse_reals(body[i + 1:j], "pwl point")
            if len(pair) != 2:
                raise CurveError("pwl points need exactly two numbers")
            pts.append((pair[0], pair[1]))
            i = j + 1
        return ScalarCurve.pwl(pts, domain=domain)
    raise CurveError(f"unrecognised curve literal {text!r}")


def parse_domain_literal(text: str) -> tuple[float, float]:
    """Parse ``[a,b]``."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise CurveError(f"bad domain literal {text!r}, expected [a,b]")
    vals = _parse_reals(text[1:-1], "domain literal")
    if len(vals) != 2:
        raise CurveError("domain literal needs exactly two numbers")
    return (vals[0], vals[1])


def _fmt(x: float) -> str:
    return repr(float(x))


def format_curve_literal(curve: ScalarCurve) -> str:
    if curve.coeffs is not None:
        return "poly(" + ",".join(_fmt(c) for c in curve.coeffs) + ")"
    return "pwl(" + ",".join(f"({_fmt(x)},{_fmt(y)})" for x, y in curve.points) + ")"


def format_domain_literal(curve: ScalarCurve) -> str | None:
    """Domain literal ``[a,b]``, or None when the domain is the default."""
    if curve.coeffs is not None:
        default = DEFAULT_POLY_DOMAIN
    else:
        default = (curve.points[0][0], curve.points[-1][0])
    if curve.domain == default:
        return None
    return f"[{_fmt(curve.domain[0])},{_fmt(curve.domain[1])}]"
