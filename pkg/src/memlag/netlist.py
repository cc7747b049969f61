"""Textual circuit descriptions: parsing, validation, serialization.

A netlist is line-oriented.  ``#`` starts a comment, blank lines are
ignored, tokens are whitespace-separated (the circuit name may be quoted
to contain spaces).  The first meaningful line is the header::

    circuit "two loop" formulation loop coords 2

followed by one line per element::

    element L1  L  value=1.0 coords +1
    element RM1 MR curve=poly(0.0,1.0,0.0,0.33) mod=q coords +1
    element CM1 MC curve=pwl((-1.0,-2.0),(0.0,0.0),(1.0,2.0)) mod=sigma coords +1 -2
    element E1  VSRC shape=sin amp=1.0 omega=2.0 coords +1

Kinds are R, L, C (conventional, ``value=``), MR, ML, MC (memory,
``curve=`` with optional ``domain=[a,b]`` and a ``mod=`` state variable),
and VSRC / ISRC sources (``shape=`` dc or sin, ``amp=``, optional
``omega=`` and ``phase=``).  ``coords`` lists signed 1-based coordinate
indices; the element's branch variable is the signed sum of those
coordinates.

Parsing performs structural checks only (every error carries a line
number).  :func:`validate` performs the formulation-dependent physics
checks and returns diagnostics rather than raising, so callers can present
all findings at once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constitutive import (
    ALLOWED_MODULATIONS,
    Element,
    ElementKind,
    Modulation,
    SourceWaveform,
    format_curve_literal,
    format_domain_literal,
    parse_curve_literal,
    parse_domain_literal,
)
from .errors import CurveError, NetlistSyntaxError

__all__ = ["Circuit", "Diagnostic", "Diagnostics", "parse", "validate",
           "serialize"]


_KIND_TOKENS = {
    "R": (ElementKind.RESISTOR, None),
    "L": (ElementKind.INDUCTOR, None),
    "C": (ElementKind.CAPACITOR, None),
    "MR": (ElementKind.MEMRISTOR, None),
    "ML": (ElementKind.MEMINDUCTOR, None),
    "MC": (ElementKind.MEMCAPACITOR, None),
    "VSRC": (ElementKind.SOURCE, "voltage"),
    "ISRC": (ElementKind.SOURCE, "current"),
}

_TOKEN_FOR_KIND = {
    ElementKind.RESISTOR: "R",
    ElementKind.INDUCTOR: "L",
    ElementKind.CAPACITOR: "C",
    ElementKind.MEMRISTOR: "MR",
    ElementKind.MEMINDUCTOR: "ML",
    ElementKind.MEMCAPACITOR: "MC",
}


@dataclass(frozen=True)
class Circuit:
    """Parsed circuit: a name, a formulation, and elements over coordinates.

    ``formulation`` is "loop" (coordinates are integrated loop charges) or
    "node" (coordinates are integrated node fluxes).  Structural validity
    (indices in range, unique names) is guaranteed by construction; the
    physics checks live in :func:`validate`.
    """

    name: str
    formulation: str
    n_coords: int
    elements: tuple[Element, ...]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    line: int

    def __str__(self):
        return f"{self.severity}[{self.code}] line {self.line}: {self.message}"


class Diagnostics(tuple):
    """Immutable list of diagnostics with error/warning accessors."""

    @property
    def errors(self):
        return tuple(d for d in self if d.severity == "error")

    @property
    def warnings(self):
        return tuple(d for d in self if d.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors


# ---------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------


def _strip_comment(line: str) -> str:
    out = []
    quoted = False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def _tokenize(line: str, lineno: int) -> list[tuple[str, int]]:
    """Split into (token, 1-based column) pairs; quoted strings are one token."""
    toks = []
    i = 0
    n = len(line)
    while i < n:
        if line[i].isspace():
            i += 1
            continue
        start = i
        if line[i] == '"':
            j = line.find('"', i + 1)
            if j < 0:
                raise NetlistSyntaxError("unterminated quote", lineno, i + 1)
            i = j + 1
            # Quoted token must end at whitespace.
            if i < n and not line[i].isspace():
                raise NetlistSyntaxError("text after closing quote", lineno, i + 1)
        else:
            while i < n and not line[i].isspace():
                i += 1
        toks.append((line[start:i], start + 1))
    return toks


class _Cursor:
    def __init__(self, tokens, lineno):
        self.tokens = tokens
        self.lineno = lineno
        self.pos = 0

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def next(self, what: str) -> tuple[str, int]:
        if self.pos >= len(self.tokens):
            last_col = self.tokens[-1][1] if self.tokens else 1
            raise NetlistSyntaxError(f"expected {what}", self.lineno, last_col)
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, literal: str):
        tok, col = self.next(f"{literal!r}")
        if tok != literal:
            raise NetlistSyntaxError(
                f"expected {literal!r}, got {tok!r}", self.lineno, col
            )

    def done(self) -> bool:
        return self.pos >= len(self.tokens)


def _is_name(tok: str) -> bool:
    return tok[:1].isalpha() or tok[:1] == "_" and bool(tok)


def _valid_name(tok: str) -> bool:
    return bool(tok) and (tok[0].isalpha() or tok[0] == "_") and all(
        c.isalnum() or c == "_" for c in tok
    )


def _parse_int(tok: str, lineno: int, col: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise NetlistSyntaxError(f"bad {what} {tok!r}", lineno, col) from None


def _parse_real(tok: str, lineno: int, col: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise NetlistSyntaxError(f"bad {what} {tok!r}", lineno, col) from None


def _split_kv(tok: str, lineno: int, col: int) -> tuple[str, str]:
    if "=" not in tok:
        raise NetlistSyntaxError(
            f"expected key=value parameter, got {tok!r}", lineno, col
        )
    key, _, val = tok.partition("=")
    if not key or not val:
        raise NetlistSyntaxError(f"malformed parameter {tok!r}", lineno, col)
    return key, val


# ---------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------


def parse(text: str) -> Circuit:
    """Parse netlist text into a :class:`Circuit`.

    Raises :class:`~memlag.errors.NetlistSyntaxError` (with line and column)
    on the first structural problem.
    """
    header = None
    elements: list[Element] = []
    names: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw)
        tokens = _tokenize(stripped, lineno)
        if not tokens:
            continue
        cur = _Cursor(tokens, lineno)
        first, col = cur.next("a directive")
        if header is None:
            if first != "circuit":
                raise NetlistSyntaxError(
                    f"expected 'circuit' header, got {first!r}", lineno, col
                )
            header = _parse_header(cur)
            continue
        if first == "circuit":
            raise NetlistSyntaxError("duplicate 'circuit' header", lineno, col)
        if first != "element":
            raise NetlistSyntaxError(
                f"expected 'element', got {first!r}", lineno, col
            )
        el = _parse_element(cur, header[2])
        if el.name in names:
            raise NetlistSyntaxError(
                f"duplicate element name {el.name!r} "
                f"(first defined on line {names[el.name]})",
                lineno,
            )
        names[el.name] = lineno
        elements.append(el)

    if header is None:
        raise NetlistSyntaxError("empty netlist: no 'circuit' header", 1)
    if not elements:
        raise NetlistSyntaxError("circuit has no elements", 1)
    name, formulation, n_coords = header
    return Circuit(name=name, formulation=formulation, n_coords=n_coords,
                   elements=tuple(elements))


def _parse_header(cur: _Cursor) -> tuple[str, str, int]:
    tok, col = cur.next("circuit name")
    if tok.startswith('"'):
        name = tok[1:-1]
    else:
        name = tok
    if not name:
        raise NetlistSyntaxError("empty circuit name", cur.lineno, col)
    cur.expect("formulation")
    form, col = cur.next("'loop' or 'node'")
    if form not in ("loop", "node"):
        raise NetlistSyntaxError(
            f"formulation must be 'loop' or 'node', got {form!r}",
            cur.lineno, col,
        )
    cur.expect("coords")
    tok, col = cur.next("coordinate count")
    n = _parse_int(tok, cur.lineno, col, "coordinate count")
    if n < 1:
        raise NetlistSyntaxError(
            f"coordinate count must be positive, got {n}", cur.lineno, col
        )
    if not cur.done():
        tok, col = cur.next("")
        raise NetlistSyntaxError(f"unexpected token {tok!r}", cur.lineno, col)
    return name, form, n


def _parse_element(cur: _Cursor, n_coords: int) -> Element:
    lineno = cur.lineno
    name, col = cur.next("element name")
    if not _valid_name(name):
        raise NetlistSyntaxError(f"bad element name {name!r}", lineno, col)
    kind_tok, col = cur.next("element kind")
    if kind_tok not in _KIND_TOKENS:
        raise NetlistSyntaxError(
            f"unknown element kind {kind_tok!r} "
            f"(expected one of {', '.join(_KIND_TOKENS)})",
            lineno, col,
        )
    kind, role = _KIND_TOKENS[kind_tok]

    params: dict[str, tuple[str, int]] = {}
    while not cur.done() and cur.peek() != "coords":
        tok, col = cur.next("parameter")
        key, val = _split_kv(tok, lineno, col)
        if key in params:
            raise NetlistSyntaxError(f"duplicate parameter {key!r}", lineno, col)
        params[key] = (val, col)

    cur.expect("coords")
    membership: list[tuple[int, int]] = []
    while not cur.done():
        tok, col = cur.next("coordinate index")
        idx = _parse_int(tok, lineno, col, "coordinate index")
        if idx == 0:
            raise NetlistSyntaxError("coordinate index 0 is invalid", lineno, col)
        sign = 1 if idx > 0 else -1
        idx = abs(idx)
        if idx > n_coords:
            raise NetlistSyntaxError(
                f"coordinate index {idx} exceeds declared coords {n_coords}",
                lineno, col,
            )
        membership.append((idx, sign))
    if not membership:
        raise NetlistSyntaxError("element lists no coordinates", lineno)

    def take(key: str, required: bool = True):
        if key not in params:
            if required:
                raise NetlistSyntaxError(
                    f"element {name!r} ({kind_tok}) needs {key}=", lineno
                )
            return None
        return params.pop(key)

    try:
        if kind.is_conventional:
            val, col = take("value")
            element = Element(
                name=name, kind=kind, membership=tuple(membership),
                value=_parse_real(val, lineno, col, "value"), line=lineno,
            )
        elif kind.is_memory:
            curve_tok, col = take("curve")
            dom_entry = take("domain", required=False)
            domain = None
            if dom_entry is not None:
                domain = parse_domain_literal(dom_entry[0])
            mod_tok, mcol = take("mod")
            try:
                mod = Modulation(mod_tok)
            except ValueError:
                raise NetlistSyntaxError(
                    f"unknown modulation {mod_tok!r} "
                    f"(expected q, phi, rho, or sigma)", lineno, mcol
                ) from None
            curve = parse_curve_literal(curve_tok, domain=domain)
            element = Element(
                name=name, kind=kind, membership=tuple(membership),
                curve=curve, modulation=mod, line=lineno,
            )
        else:  # source
            shape, _ = take("shape")
            amp, acol = take("amp")
            omega_entry = take("omega", required=False)
            phase_entry = take("phase", required=False)
            omega = None
            phase = None
            if omega_entry is not None:
                omega = _parse_real(omega_entry[0], lineno, omega_entry[1], "omega")
            if phase_entry is not None:
                phase = _parse_real(phase_entry[0], lineno, phase_entry[1], "phase")
            if shape == "sin" and omega is None:
                omega = 1.0
            waveform = SourceWaveform(
                shape=shape, amplitude=_parse_real(amp, lineno, acol, "amp"),
                omega=omega, phase=phase,
            )
            element = Element(
                name=name, kind=kind, membership=tuple(membership),
                waveform=waveform, source_role=role, line=lineno,
            )
    except CurveError as exc:
        raise NetlistSyntaxError(str(exc), lineno) from exc

    if params:
        extra = ", ".join(params)
        raise NetlistSyntaxError(
            f"unknown parameter(s) {extra} for kind {kind_tok}", lineno
        )
    return element


# ---------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------

# Modulations admissible per formulation.  Loop analysis integrates charges,
# so slopes must be functions of charge-like states; node analysis is the
# flux-side dual.
_LOOP_MODS = {
    ElementKind.MEMRISTOR: Modulation.CHARGE,
    ElementKind.MEMINDUCTOR: Modulation.CHARGE,
    ElementKind.MEMCAPACITOR: Modulation.INTEGRATED_CHARGE,
}
_NODE_MODS = {
    ElementKind.MEMRISTOR: Modulation.FLUX,
    ElementKind.MEMINDUCTOR: Modulation.INTEGRATED_FLUX,
    ElementKind.MEMCAPACITOR: Modulation.FLUX,
}


def validate(circuit: Circuit) -> Diagnostics:
    """Physics checks for one formulation; returns diagnostics, never raises.

    Errors: a memory element whose modulating variable is not available in
    this formulation, and a source of the wrong type (current sources drive
    node analysis, voltage sources drive loop analysis).  Each coordinate
    must be touched by an inertial or dissipative element, otherwise its
    equation has no dynamic content.  A coordinate with dissipation but no
    inertia yields a first-order equation; that is supported and flagged as
    a warning.
    """
    loop = circuit.formulation == "loop"
    mods = _LOOP_MODS if loop else _NODE_MODS
    inertial_kinds = (
        (ElementKind.INDUCTOR, ElementKind.MEMINDUCTOR)
        if loop
        else (ElementKind.CAPACITOR, ElementKind.MEMCAPACITOR)
    )
    dissipative_kinds = (ElementKind.RESISTOR, ElementKind.MEMRISTOR)
    source_role = "voltage" if loop else "current"
    analysis = "loop" if loop else "node"
    other = "node" if loop else "loop"

    out: list[Diagnostic] = []
    inertial = [False] * (circuit.n_coords + 1)
    dissipative = [False] * (circuit.n_coords + 1)

    for el in circuit.elements:
        if el.kind.is_memory and el.modulation is not mods[el.kind]:
            out.append(Diagnostic(
                "error", "mod-formulation",
                f"element {el.name!r}: {el.modulation.value} modulation "
                f"requires {other} analysis",
                el.line,
            ))
        if el.kind is ElementKind.SOURCE and el.source_role != source_role:
            out.append(Diagnostic(
                "error", "source-formulation",
                f"element {el.name!r}: a {el.source_role} source cannot "
                f"drive {analysis} analysis",
                el.line,
            ))
        for idx, _ in el.membership:
            if el.kind in inertial_kinds:
                inertial[idx] = True
            if el.kind in dissipative_kinds:
                dissipative[idx] = True

    for idx in range(1, circuit.n_coords + 1):
        if inertial[idx]:
            continue
        if dissipative[idx]:
            out.append(Diagnostic(
                "warning", "first-order",
                f"coordinate {idx} is first-order: dissipation but no "
                f"inertia, its equation fixes the velocity algebraically",
                0,
            ))
        else:
            out.append(Diagnostic(
                "error", "no-dynamics",
                f"coordinate {idx} has no inertial or dissipative element; "
                f"its equation has no dynamic content",
                0,
            ))
    return Diagnostics(out)


# ---------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------


def serialize(circuit: Circuit) -> str:
    """Canonical netlist text; ``parse(serialize(c))`` equals ``c``."""
    lines = [
        f'circuit "{circuit.name}" formulation {circuit.formulation} '
        f"coords {circuit.n_coords}"
    ]
    for el in circuit.elements:
        lines.append(_serialize_element(el))
    return "\n".join(lines) + "\n"


def _serialize_element(el: Element) -> str:
    if el.kind is ElementKind.SOURCE:
        kind_tok = "VSRC" if el.source_role == "voltage" else "ISRC"
        w = el.waveform
        params = f"shape={w.shape} amp={w.amplitude!r}"
        if w.shape == "sin":
            params += f" omega={w.omega!r}"
            if w.phase != 0.0:
                params += f" phase={w.phase!r}"
    elif el.kind.is_memory:
        kind_tok = _TOKEN_FOR_KIND[el.kind]
        params = f"curve={format_curve_literal(el.curve)}"
        dom = format_domain_literal(el.curve)
        if dom is not None:
            params += f" domain={dom}"
        params += f" mod={el.modulation.value}"
    else:
        kind_tok = _TOKEN_FOR_KIND[el.kind]
        params = f"value={el.value!r}"
    coords = " ".join(f"{'+' if s > 0 else '-'}{i}" for i, s in el.membership)
    return f"element {el.name} {kind_tok} {params} coords {coords}"
