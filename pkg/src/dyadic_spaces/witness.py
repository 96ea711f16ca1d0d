"""Nested-tower counterexample sequences and growth certification.

The tower witness places one coefficient on each cube [0, 2**-j)**n for
j = 0..J, with magnitude |R_j| ** (s/n + 1/2 + tau - 1/p).  On this family
the coarse-exponent Besov norm grows without bound in J while the target
norm stays under an explicit geometric-series bound, certifying that the two
scales cannot be equivalent.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from ._log2 import NEG_INF, log2_sum
from .dyadic import DyadicCube
from .seqspace import CubeSequence, Family, SpaceParams, b_type_norm, f_type_norm

INF = math.inf

DEFAULT_DEPTHS_1D = (4, 8, 16, 32, 64)
DEFAULT_DEPTHS_ND = (4, 8, 16)

# Relative growth a log-norm sequence must show before "diverges" is claimed.
_DIVERGENCE_MARGIN = 10 * np.finfo(float).eps
# Fraction of the known theoretical growth exponent the fit must reach.
_FIT_FRACTION = 0.8


@dataclass(frozen=True)
class TowerWitness:
    s: float
    tau: float
    p: float
    dim: int
    depth: int
    sequence: CubeSequence


@dataclass(frozen=True)
class GrowthReport:
    """Norm growth of a witness family along a truncation-depth schedule."""

    space: str
    depths: tuple[int, ...]
    log2_values: tuple[float, ...]
    fitted_exponent: float
    verdict: str  # "bounded" | "diverges"
    theoretical_exponent: float | None = None
    bound_log2: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "space": self.space,
            "depths": list(self.depths),
            "log2_values": list(self.log2_values),
            "fitted_exponent": self.fitted_exponent,
            "verdict": self.verdict,
            "theoretical_exponent": self.theoretical_exponent,
            "bound_log2": self.bound_log2,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["depth", "log2_norm"])
        for d, v in zip(self.depths, self.log2_values):
            writer.writerow([d, repr(v)])
        return buf.getvalue()


def build_tower(s: float, tau: float, p: float, n: int, J: int) -> TowerWitness:
    """Truncated nested tower with magnitudes computed in the log domain."""
    if J < 0:
        raise ValueError("J must be >= 0")
    exponent = float(s) + n / 2.0 + n * (float(tau) - _inv(p))
    values = {
        DyadicCube(n, j, (0,) * n): -j * exponent for j in range(J + 1)
    }
    seq = CubeSequence.from_log2_values(values, root=DyadicCube.unit(n), max_depth=J)
    return TowerWitness(float(s), float(tau), float(p), n, J, seq)


def _inv(x: float) -> float:
    x = float(x)
    return 0.0 if x == INF else 1.0 / x


def tower_b_closed_form(tau: float, p: float, q: float, n: int, J: int) -> float:
    """log2 of the coarse-exponent Besov norm of the depth-J tower.

    For q < inf this is sup_k 2**(k n a') * (sum_{j=k..J} 2**(-j n a))**(1/q)
    with a = (tau - 1/p) q + 1 and a' = tau + 1/q - 1/p; at q = inf the inner
    sum becomes a supremum.  The value does not depend on s.
    """
    tau, p, q = float(tau), float(p), float(q)
    delta = tau - _inv(p)
    if q == INF:
        # weights grow toward depth J whenever delta < 0
        return max(
            k * n * delta + max(-j * n * delta for j in range(k, J + 1))
            for k in range(J + 1)
        )
    a = delta * q + 1.0
    a_prime = tau + 1.0 / q - _inv(p)
    best = NEG_INF
    for k in range(J + 1):
        tail = log2_sum(np.array([-j * n * a for j in range(k, J + 1)]))
        best = max(best, k * n * a_prime + tail / q)
    return best


def separation_f_bound_log2(tau: float, p: float, n: int) -> float:
    """log2 of the uniform geometric-series bound for the F-side tower norm."""
    return -_inv(p) * math.log2(1.0 - 2.0 ** (-n * float(tau) * float(p)))


def separation_b_bound_log2(tau: float, q: float, n: int) -> float:
    """log2 of the uniform bound for the B-side tower norm (0 when q = inf)."""
    if float(q) == INF:
        return 0.0
    return -1.0 / float(q) * math.log2(1.0 - 2.0 ** (-n * float(tau) * float(q)))


def _fit_exponent(depths, log2_values) -> float:
    """Least-squares slope of log2 norm against log2 depth."""
    if len(depths) < 2:
        return 0.0
    x = np.log2(np.asarray(depths, dtype=float))
    y = np.asarray(log2_values, dtype=float)
    return float(np.polyfit(x, y, 1)[0])


def _divergence_report(space, depths, values, theoretical) -> GrowthReport:
    fitted = _fit_exponent(depths, values)
    growing = values[-1] > values[0] * (1.0 + _DIVERGENCE_MARGIN) or (
        values[0] <= 0 and values[-1] > values[0] + _DIVERGENCE_MARGIN
    )
    ok = growing and fitted > 0
    if theoretical is not None:
        ok = ok and fitted >= _FIT_FRACTION * theoretical
    return GrowthReport(
        space,
        tuple(depths),
        tuple(values),
        fitted,
        "diverges" if ok else "bounded",
        theoretical_exponent=theoretical,
    )


def _bounded_report(space, depths, values, bound_log2) -> GrowthReport:
    fitted = _fit_exponent(depths, values)
    within = all(v <= bound_log2 + 1e-9 for v in values)
    return GrowthReport(
        space,
        tuple(depths),
        tuple(values),
        fitted,
        "bounded" if within else "diverges",
        bound_log2=bound_log2,
    )


def validate_separation_params(s, p, q, tau, family: str = "f") -> None:
    """Hypothesis region of the counterexample construction."""
    p, q, tau = float(p), float(q), float(tau)
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    if q <= p:
        raise ValueError(f"the counterexample needs q > p, got p={p}, q={q}")
    if q == INF:
        lo_ok = tau > 0 if family == "f" else tau >= 0
        if not (lo_ok and tau < _inv(p)):
            raise ValueError(
                f"with q = inf the counterexample needs tau in "
                f"{'(0, 1/p)' if family == 'f' else '[0, 1/p)'}, got tau={tau}"
            )
    else:
        if not (0 < tau <= _inv(p) - 1.0 / q):
            raise ValueError(
                f"the counterexample needs tau in (0, 1/p - 1/q], got tau={tau}"
            )


def certify_separation(
    s: float,
    p: float,
    q: float,
    tau: float,
    n: int = 1,
    depths: tuple[int, ...] | None = None,
    family: str = "f",
) -> tuple[GrowthReport, GrowthReport]:
    """Grow the tower and certify (divergent coarse norm, bounded target norm).

    ``family`` selects the bounded side: "f" for the Triebel-Lizorkin-type
    target, "b" for the Besov-type target.
    """
    if family not in ("f", "b"):
        raise ValueError(f"family must be 'f' or 'b', got {family!r}")
    validate_separation_params(s, p, q, tau, family)
    s, p, q, tau = float(s), float(p), float(q), float(tau)
    if depths is None:
        depths = DEFAULT_DEPTHS_1D if n == 1 else DEFAULT_DEPTHS_ND
    depths = tuple(int(J) for J in depths)

    tau_prime = tau + _inv(q) - _inv(p)
    div_vals = []
    tgt_vals = []
    for J in depths:
        tower = build_tower(s, tau, p, n, J).sequence
        bq = SpaceParams(Family.B_TYPE, s, tau_prime, q, q)
        div_vals.append(
            b_type_norm(tower, bq, allow_negative_tau=True).log2_value
        )
        if family == "f":
            tgt = f_type_norm(tower, SpaceParams(Family.F_TYPE, s, tau, p, q))
        else:
            tgt = b_type_norm(tower, SpaceParams(Family.B_TYPE, s, tau, p, q))
        tgt_vals.append(tgt.log2_value)

    if q < INF and abs(tau - (_inv(p) - 1.0 / q)) < 1e-12:
        theoretical = 1.0 / q  # norm is exactly (J+1)**(1/q) at the boundary
    else:
        theoretical = None
    div_name = f"b^(s,{tau_prime:g})_({q:g},{q:g})"
    divergent = _divergence_report(div_name, depths, div_vals, theoretical)

    if family == "f":
        bound = separation_f_bound_log2(tau, p, n)
        tgt_name = f"f^(s,{tau:g})_({p:g},{q:g})"
    else:
        bound = separation_b_bound_log2(tau, q, n)
        tgt_name = f"b^(s,{tau:g})_({p:g},{q:g})"
    bounded = _bounded_report(tgt_name, depths, tgt_vals, bound)
    return divergent, bounded


def reports_to_json(divergent: GrowthReport, bounded: GrowthReport) -> str:
    return json.dumps(
        {"divergent": divergent.to_json_dict(), "bounded": bounded.to_json_dict()},
        sort_keys=True,
    )
