"""Random-instance generators shared across the test modules."""

from __future__ import annotations

import numpy as np

from memlag.constitutive import (
    Element,
    ElementKind,
    Modulation,
    ScalarCurve,
    SourceWaveform,
)
from memlag.lagrangian import build_loop_system, build_node_system
from memlag.netlist import Circuit


def build_system(circuit: Circuit):
    if circuit.formulation == "loop":
        return build_loop_system(circuit)
    return build_node_system(circuit)


def random_monotone_poly(rng, scale=1.0, domain=(-2.0, 2.0)) -> ScalarCurve:
    """Strictly increasing polynomial through the origin.

    The derivative is assembled from even powers with positive
    coefficients, so monotonicity holds on the whole real line and the
    declared domain never clips it.
    """
    n_terms = int(rng.integers(1, 4))
    deriv_coeffs = rng.uniform(0.2, 1.5, n_terms) * scale
    coeffs = [0.0] * (2 * n_terms)
    for k, dk in enumerate(deriv_coeffs):
        coeffs[2 * k + 1] = dk / (2 * k + 1)
    return ScalarCurve.poly(tuple(coeffs), domain=domain)


def random_pwl(rng, n_segments=4, half_width=2.0) -> ScalarCurve:
    """Strictly increasing piecewise-linear curve through the origin."""
    gaps = rng.uniform(0.5, 1.5, n_segments)
    xs = -half_width + 2.0 * half_width * np.concatenate(
        [[0.0], np.cumsum(gaps)]) / np.sum(gaps)
    slopes = rng.uniform(0.3, 2.0, n_segments)
    ys = np.concatenate([[0.0], np.cumsum(slopes * np.diff(xs))])
    ys = ys - np.interp(0.0, xs, ys)
    return ScalarCurve.pwl(tuple(zip(xs, ys)))


def random_curve(rng, poly_only=False) -> ScalarCurve:
    if poly_only or rng.random() < 0.6:
        return random_monotone_poly(rng)
    return random_pwl(rng)


def _membership(rng, n: int, anchor: int | None = None):
    """One- or two-coordinate signed membership, optionally through anchor."""
    first = anchor if anchor is not None else int(rng.integers(1, n + 1))
    sign = 1 if rng.random() < 0.8 else -1
    entries = [(first, sign)]
    if n > 1 and rng.random() < 0.35:
        others = [i for i in range(1, n + 1) if i != first]
        second = int(rng.choice(others))
        entries.append((second, 1 if rng.random() < 0.5 else -1))
    return tuple(entries)


def random_circuit(rng, formulation=None, poly_only=False,
                   allow_sources=True, conservative=False) -> Circuit:
    """A structurally valid random circuit that passes validate().

    Every coordinate receives one inertial element; extra storage,
    dissipative, and source elements are sprinkled on random memberships.
    With ``conservative=True`` no resistor or memristor is drawn, so the
    assembled equations stay self-adjoint.
    """
    if formulation is None:
        formulation = "loop" if rng.random() < 0.5 else "node"
    loop = formulation == "loop"
    n = int(rng.integers(1, 4))
    elements = []
    counter = [0]

    def fresh(prefix: str) -> str:
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    for i in range(1, n + 1):
        if rng.random() < 0.5:
            kind = ElementKind.INDUCTOR if loop else ElementKind.CAPACITOR
            elements.append(Element(
                name=fresh("L" if loop else "C"), kind=kind,
                membership=_membership(rng, n, anchor=i),
                value=float(rng.uniform(0.5, 2.0))))
        elif loop:
            elements.append(Element(
                name=fresh("ML"), kind=ElementKind.MEMINDUCTOR,
                membership=_membership(rng, n, anchor=i),
                curve=random_curve(rng, poly_only),
                modulation=Modulation.CHARGE))
        else:
            elements.append(Element(
                name=fresh("MC"), kind=ElementKind.MEMCAPACITOR,
                membership=_membership(rng, n, anchor=i),
                curve=random_curve(rng, poly_only),
                modulation=Modulation.FLUX))

    for _ in range(int(rng.integers(0, 4))):
        roll = rng.random()
        if conservative:
            roll *= 0.5
        if roll < 0.3:
            kind = ElementKind.CAPACITOR if loop else ElementKind.INDUCTOR
            elements.append(Element(
                name=fresh("C" if loop else "L"), kind=kind,
                membership=_membership(rng, n),
                value=float(rng.uniform(0.5, 2.0))))
        elif roll < 0.5:
            if loop:
                elements.append(Element(
                    name=fresh("MC"), kind=ElementKind.MEMCAPACITOR,
                    membership=_membership(rng, n),
                    curve=random_curve(rng, poly_only),
                    modulation=Modulation.INTEGRATED_CHARGE))
            else:
                elements.append(Element(
                    name=fresh("ML"), kind=ElementKind.MEMINDUCTOR,
                    membership=_membership(rng, n),
                    curve=random_curve(rng, poly_only),
                    modulation=Modulation.INTEGRATED_FLUX))
        elif roll < 0.75:
            elements.append(Element(
                name=fresh("R"), kind=ElementKind.RESISTOR,
                membership=_membership(rng, n),
                value=float(rng.uniform(0.5, 2.0))))
        else:
            elements.append(Element(
                name=fresh("MR"), kind=ElementKind.MEMRISTOR,
                membership=_membership(rng, n),
                curve=random_curve(rng, poly_only),
                modulation=Modulation.CHARGE if loop else Modulation.FLUX))

    if allow_sources and rng.random() < 0.3:
        phase = float(rng.uniform(0.0, 3.0)) if rng.random() < 0.5 else 0.0
        elements.append(Element(
            name=fresh("S"), kind=ElementKind.SOURCE,
            membership=_membership(rng, n),
            waveform=SourceWaveform(
                shape="sin", amplitude=float(rng.uniform(0.2, 1.5)),
                omega=float(rng.uniform(0.5, 3.0)), phase=phase),
            source_role="voltage" if loop else "current"))

    return Circuit(name=f"rand{int(rng.integers(0, 10**6))}",
                   formulation=formulation, n_coords=n,
                   elements=tuple(elements))


def interior_points(rng, system, count: int, shrink: float = 0.9):
    """Random (x, v) evaluation points inside the system's operating box."""
    xb, vb = system.domain_box()
    X = rng.uniform(-shrink * xb, shrink * xb, (count, system.n))
    V = rng.uniform(-shrink * vb, shrink * vb, (count, system.n))
    return X, V


def pwl_breakpoints(system) -> list[tuple[tuple[int, ...], tuple[int, ...], np.ndarray]]:
    """(coords, signs, interior breakpoints) per piecewise-linear term."""
    out = []
    for tm in system.terms:
        if tm.curve is not None and tm.curve.points is not None:
            xs = np.array([p[0] for p in tm.curve.points])
            out.append((tm.coords, tm.signs, xs))
    return out


def away_from_breakpoints(system, x, v, margin: float) -> bool:
    """True when every pwl branch state clears its breakpoints by margin.

    Central finite differences across a slope break measure the wrong
    thing, so smoothness-based comparisons resample until this holds.
    """
    for coords, signs, xs in pwl_breakpoints(system):
        for vec in (x, v):
            b = sum(s * vec[c] for c, s in zip(coords, signs))
            if np.any(np.abs(xs - b) < margin):
                return False
    return True
