"""Numerical verification of the Helmholtz self-adjointness conditions.

A second-order system A(x, v)·a + B(x, v) = 0 derives from a Lagrangian
exactly when four integrability conditions hold identically:

  symmetry           A_ij = A_ji
  A_v_compatibility  dA_ik/dv_j = dA_jk/dv_i
  B_curl             dB_i/dx_j - dB_j/dx_i
                       = 1/2 * d/dx_k (dB_i/dv_j - dB_j/dv_i) * v_k
  B_v_symmetry       dB_i/dv_j + dB_j/dv_i = 2 * dA_ij/dx_k * v_k

The state-dependent inertia form is the general one; with dA/dx = 0 the
fourth condition reduces to the classical velocity-only statement, so one
implementation covers both.  Conditions are identities; this module tests
them at low-discrepancy sample points with central finite differences and
reports the worst violation per condition, so a positive verdict is always
"self-adjoint on the sampled region at the stated tolerance".
"""

from __future__ import annotations

import inspect
import json
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import CurveDomainError, NumericError
from .lagrangian import ABDecomposition, LagrangianSystem, extract_AB

__all__ = [
    "ConditionResult",
    "SAReport",
    "check_self_adjoint",
    "default_region",
    "CONDITION_NAMES",
]

CONDITION_NAMES = ("symmetry", "A_v_compatibility", "B_curl", "B_v_symmetry")

DEFAULT_SAMPLES = 512
DEFAULT_TOL = 1e-6
DEFAULT_FD_STEP = 1e-5


@dataclass(frozen=True)
class ConditionResult:
    name: str
    max_violation: float
    worst_point: tuple[tuple[float, ...], tuple[float, ...]]  # (x, v)


@dataclass(frozen=True)
class SAReport:
    verdict: str  # "self_adjoint" | "not_self_adjoint"
    conditions: tuple[ConditionResult, ...]
    samples: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.verdict == "self_adjoint"

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def worst_condition(self) -> str:
        """Name of the condition with the largest violation."""
        return max(self.conditions, key=lambda c: c.max_violation).name

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "conditions": [
                {
                    "name": c.name,
                    "max_violation": c.max_violation,
                    "worst_point": {
                        "x": list(c.worst_point[0]),
                        "v": list(c.worst_point[1]),
                    },
                }
                for c in self.conditions
            ],
            "samples": self.samples,
            "tol": self.tol,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def default_region(system: LagrangianSystem, half_width: float = 1.0
                   ) -> tuple[np.ndarray, np.ndarray]:
    """The hypercube [-half_width, half_width]^2n shrunk to fit every
    element curve domain of the system."""
    xb, vb = system.domain_box(half_width)
    bound = np.concatenate([xb, vb])
    return -bound, bound


def _normalize_region(region, n: int) -> tuple[np.ndarray, np.ndarray]:
    if region is None:
        lo, hi = -1.0, 1.0
    else:
        lo, hi = region
    lo = np.broadcast_to(np.asarray(lo, float), (2 * n,)).copy()
    hi = np.broadcast_to(np.asarray(hi, float), (2 * n,)).copy()
    if np.any(hi <= lo):
        raise ValueError("region upper bounds must exceed lower bounds")
    return lo, hi


def check_self_adjoint(target, region=None, samples: int = DEFAULT_SAMPLES,
                       tol: float = DEFAULT_TOL, *, t: float = 0.0,
                       seed: int = 0, fd_step: float = DEFAULT_FD_STEP
                       ) -> SAReport:
    """Check the four Helmholtz conditions at Halton sample points.

    ``target`` is an :class:`~memlag.lagrangian.ABDecomposition` or a
    :class:`~memlag.lagrangian.LagrangianSystem` (which is first split with
    :func:`~memlag.lagrangian.extract_AB`; its default region is then the
    unit box intersected with the element curve domains).

    ``region`` is a pair (lo, hi), scalars or length-2n arrays over the
    concatenated (x, v) dimensions.  All partial derivatives use central
    differences with per-coordinate step ``fd_step * (1 + |coordinate|)``.
    """
    if isinstance(target, LagrangianSystem):
        if region is None:
            region = default_region(target)
        ab = extract_AB(target)
    else:
        ab = target
    n = ab.n
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = _normalize_region(region, n)

    sampler = qmc.Halton(d=2 * n, scramble=True, seed=seed)
    unit = sampler.random(samples)
    points = lo + unit * (hi - lo)

    worst = {name: (0.0, (np.zeros(n), np.zeros(n))) for name in CONDITION_NAMES}

    for row in points:
        x = row[:n].copy()
        v = row[n:].copy()
        try:
            viols = _violations_at(ab, x, v, t, fd_step)
        except CurveDomainError as exc:
            raise CurveDomainError(
                f"{exc} -- while sampling at x={x.tolist()}, v={v.tolist()}"
            ) from exc
        for name, value in viols.items():
            if not np.isfinite(value):
                raise NumericError(
                    f"non-finite {name} evaluation at x={x.tolist()}, "
                    f"v={v.tolist()}"
                )
            if value > worst[name][0]:
                worst[name] = (value, (x.copy(), v.copy()))

    conditions = tuple(
        ConditionResult(
            name=name,
            max_violation=worst[name][0],
            worst_point=(tuple(worst[name][1][0]), tuple(worst[name][1][1])),
        )
        for name in CONDITION_NAMES
    )
    verdict = ("self_adjoint"
               if all(c.max_violation <= tol for c in conditions)
               else "not_self_adjoint")
    return SAReport(verdict=verdict, conditions=conditions,
                    samples=samples, tol=tol)


def _accepts_time(fn) -> bool:
    """True when the callable takes (x, v, t) rather than just (x, v)."""
    try:
        sig = inspect.signature(fn)
    except (TypeError, ValueError):
        return True
    positional = [p for p in sig.parameters.values()
                  if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
    variadic = any(p.kind is p.VAR_POSITIONAL
                   for p in sig.parameters.values())
    return variadic or len(positional) >= 3


def _violations_at(ab: ABDecomposition, x, v, t: float, fd_step: float
                   ) -> dict[str, float]:
    n = ab.n
    hx = fd_step * (1.0 + np.abs(x))
    hv = fd_step * (1.0 + np.abs(v))

    if _accepts_time(ab.A):
        def A_at(xx, vv):
            return np.asarray(ab.A(xx, vv, t), float)
    else:
        def A_at(xx, vv):
            return np.asarray(ab.A(xx, vv), float)

    if _accepts_time(ab.B):
        def B_at(xx, vv):
            return np.asarray(ab.B(xx, vv, t), float)
    else:
        def B_at(xx, vv):
            return np.asarray(ab.B(xx, vv), float)

    A0 = A_at(x, v)
    if A0.shape != (n, n):
        raise NumericError(f"A must return an ({n}, {n}) matrix")

    viol_sym = float(np.max(np.abs(A0 - A0.T))) if n else 0.0

    def shift(vec, j, h):
        out = vec.copy()
        out[j] += h
        return out

    # dA/dv_j and dA/dx_k, each an (n, n) matrix.
    dAdv = [
        (A_at(x, shift(v, j, hv[j])) - A_at(x, shift(v, j, -hv[j]))) / (2 * hv[j])
        for j in range(n)
    ]
    dAdx = [
        (A_at(shift(x, k, hx[k]), v) - A_at(shift(x, k, -hx[k]), v)) / (2 * hx[k])
        for k in range(n)
    ]

    # dB matrices: dBv[i, j] = dB_i/dv_j, dBx[i, j] = dB_i/dx_j.
    dBv = np.column_stack([
        (B_at(x, shift(v, j, hv[j])) - B_at(x, shift(v, j, -hv[j]))) / (2 * hv[j])
        for j in range(n)
    ])
    dBx = np.column_stack([
        (B_at(shift(x, j, hx[j]), v) - B_at(shift(x, j, -hx[j]), v)) / (2 * hx[j])
        for j in range(n)
    ])

    viol_compat = 0.0
    for i in range(n):
        for jj in range(i + 1, n):
            diff = dAdv[jj][i, :] - dAdv[i][jj, :]
            viol_compat = max(viol_compat, float(np.max(np.abs(diff))))

    # B_v_symmetry: dB_i/dv_j + dB_j/dv_i = 2 dA_ij/dx_k v_k.
    Ax_dot_v = np.zeros((n, n))
    for k in range(n):
        Ax_dot_v += dAdx[k] * v[k]
    viol_bv = float(np.max(np.abs(dBv + dBv.T - 2.0 * Ax_dot_v)))

    # B_curl: dB_i/dx_j - dB_j/dx_i = 1/2 d/dx_k (dB_i/dv_j - dB_j/dv_i) v_k.
    lhs = dBx - dBx.T
    rhs = np.zeros((n, n))
    for k in range(n):
        xp = shift(x, k, hx[k])
        xm = shift(x, k, -hx[k])
        Gp = np.column_stack([
            (B_at(xp, shift(v, j, hv[j])) - B_at(xp, shift(v, j, -hv[j])))
            / (2 * hv[j])
            for j in range(n)
        ])
        Gm = np.column_stack([
            (B_at(xm, shift(v, j, hv[j])) - B_at(xm, shift(v, j, -hv[j])))
            / (2 * hv[j])
            for j in range(n)
        ])
        dG = ((Gp - Gp.T) - (Gm - Gm.T)) / (2 * hx[k])
        rhs += 0.5 * dG * v[k]
    viol_curl = float(np.max(np.abs(lhs - rhs)))

    return {
        "symmetry": viol_sym,
        "A_v_compatibility": viol_compat,
        "B_curl": viol_curl,
        "B_v_symmetry": viol_bv,
    }
