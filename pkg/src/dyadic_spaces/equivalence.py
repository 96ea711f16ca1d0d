"""Two-sided norm comparisons with explicit constants.

The collapse of the Morrey-weighted scales onto the infinity-infinity scale
holds with lower constant exactly 1 and upper constant

    C = (1 - 2**(-n (tau - 1/p) q)) ** (-1/q)      (q < inf, tau > 1/p)
    C = 1                                          (q = inf, tau >= 1/p)

obtained by summing the geometric tail of per-level weights.  This module
verifies the bounds sample-by-sample, together with the exact identities
between the Carleson-style norms and their Morrey-weighted counterparts and
the constant-1 Hoelder embeddings.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._log2 import NEG_INF, log2_to_linear
from .dyadic import DyadicCube
from .seqspace import (
    CubeSequence,
    Family,
    ParamError,
    SpaceParams,
    b_type_norm,
    bbmo_norm,
    cmo_norm,
    f_inf_inf_norm,
    f_type_norm,
)

INF = math.inf


def _inv(x: float) -> float:
    x = float(x)
    return 0.0 if x == INF else 1.0 / x


def identity_tolerance(p: float, q: float) -> float:
    """Relative tolerance for identity checks.

    Powering by large exponent ratios amplifies rounding, so the tolerance
    relaxes from 1e-12 to 1e-9 once the exponent ratio exceeds 8.
    """
    p, q = float(p), float(q)
    if p == INF or q == INF:
        return 1e-12
    ratio = max(p / q, q / p)
    return 1e-9 if ratio > 8 else 1e-12


def collapse_upper_constant_log2(s, tau, p, q, n: int) -> float:
    """log2 of the upper constant of the infinity-infinity collapse."""
    tau, p, q = float(tau), float(p), float(q)
    delta = tau - _inv(p)
    if q == INF:
        if delta < 0:
            raise ParamError("q = inf requires tau >= 1/p", rule="Theorem 1")
        return 0.0
    if delta <= 0:
        raise ParamError("q < inf requires tau > 1/p", rule="Theorem 1")
    return -1.0 / q * math.log2(1.0 - 2.0 ** (-n * delta * q))


@dataclass
class EquivalenceReport:
    """Outcome of a two-sided comparison over one or many sample sequences."""

    check: str
    lower_ok: bool
    upper_ok: bool
    lower_constant: float
    upper_constant: float
    worst_ratio_low: float
    worst_ratio_high: float
    samples: int
    tol: float
    vacuous: int = 0
    rows: list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return self.lower_ok and self.upper_ok

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "lower_constant": self.lower_constant,
            "upper_constant": self.upper_constant,
            "worst_ratio_low": self.worst_ratio_low,
            "worst_ratio_high": self.worst_ratio_high,
            "samples": self.samples,
            "vacuous": self.vacuous,
            "tol": self.tol,
        }

    def rows_to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["sample_id", "ratio_low", "ratio_high"])
        for sid, lo, hi in self.rows:
            writer.writerow([sid, repr(lo), repr(hi)])
        return buf.getvalue()


def _as_sequences(t) -> list[CubeSequence]:
    return [t] if isinstance(t, CubeSequence) else list(t)


def _uniform_dim(seqs: list[CubeSequence]) -> int:
    """Ambient dimension shared by a batch (the constants depend on it)."""
    if not seqs:
        return 1
    dims = {seq.dim for seq in seqs}
    if len(dims) > 1:
        raise ValueError(f"mixed dimensions in one comparison batch: {sorted(dims)}")
    return dims.pop()


def _ratio_report(
    check: str,
    pairs: Iterable[tuple[float, float]],
    lower_constant: float,
    upper_constant: float,
    tol: float,
) -> EquivalenceReport:
    worst_low = INF
    worst_high = -INF
    rows = []
    vacuous = 0
    n = 0
    for i, (num_log2, den_log2) in enumerate(pairs):
        n += 1
        if num_log2 == NEG_INF and den_log2 == NEG_INF:
            vacuous += 1
            continue
        ratio = log2_to_linear(num_log2 - den_log2)
        worst_low = min(worst_low, ratio)
        worst_high = max(worst_high, ratio)
        rows.append((i, ratio, ratio))
    if worst_high == -INF:  # all samples vacuous
        worst_low, worst_high = lower_constant, lower_constant
    lower_ok = worst_low >= lower_constant * (1.0 - tol)
    upper_ok = worst_high <= upper_constant * (1.0 + tol)
    return EquivalenceReport(
        check,
        lower_ok,
        upper_ok,
        lower_constant,
        upper_constant,
        worst_low,
        worst_high,
        n,
        tol,
        vacuous,
        rows,
    )


def check_collapse_f(t, s, tau, p, q, tol: float = 1e-9) -> EquivalenceReport:
    """Two-sided collapse check for the Triebel-Lizorkin-type scale."""
    seqs = _as_sequences(t)
    if float(p) == INF:
        raise ParamError("the F-type scale requires p < inf", rule="Definition 1(i)")
    n_dim = _uniform_dim(seqs)
    c_log2 = collapse_upper_constant_log2(s, tau, p, q, n_dim)
    s_eff = float(s) + n_dim * (float(tau) - _inv(p))

    def pairs():
        params = SpaceParams(Family.F_TYPE, s, tau, p, q)
        for seq in seqs:
            yield f_type_norm(seq, params).log2_value, f_inf_inf_norm(
                seq, s_eff
            ).log2_value

    return _ratio_report(
        "collapse_f", pairs(), 1.0, log2_to_linear(c_log2), tol
    )


def check_collapse_b(t, s, tau, p, q, tol: float = 1e-9) -> EquivalenceReport:
    """Two-sided collapse check for the Besov-type scale (p = inf allowed)."""
    seqs = _as_sequences(t)
    n_dim = _uniform_dim(seqs)
    c_log2 = collapse_upper_constant_log2(s, tau, p, q, n_dim)
    s_eff = float(s) + n_dim * (float(tau) - _inv(p))

    def pairs():
        params = SpaceParams(Family.B_TYPE, s, tau, p, q)
        for seq in seqs:
            yield b_type_norm(seq, params).log2_value, f_inf_inf_norm(
                seq, s_eff
            ).log2_value

    return _ratio_report(
        "collapse_b", pairs(), 1.0, log2_to_linear(c_log2), tol
    )


def check_holder_embeddings(t, s, tau, p, q, tol: float | None = None) -> EquivalenceReport:
    """Constant-1 embeddings into the diagonal scale at shifted Morrey exponent.

    For q > p, both the F-type and the B-type norms at (s, tau, p, q) are
    dominated by the diagonal Besov-type norm at exponent tau + 1/q - 1/p;
    Hoelder's inequality on the cube carries the measure factor into the
    exponent shift, with constant exactly 1.
    """
    p_f, q_f = float(p), float(q)
    if not q_f > p_f:
        raise ParamError(f"the embedding needs q > p, got p={p}, q={q}")
    if tol is None:
        tol = identity_tolerance(p_f, q_f)
    seqs = _as_sequences(t)
    tau_shift = float(tau) + _inv(q_f) - _inv(p_f)
    diag = SpaceParams(Family.B_TYPE, s, tau_shift, q, q)
    params_f = SpaceParams(Family.F_TYPE, s, tau, p, q) if p_f < INF else None
    params_b = SpaceParams(Family.B_TYPE, s, tau, p, q)

    worst_low = INF
    worst_high = -INF
    rows = []
    vacuous = 0
    for i, seq in enumerate(seqs):
        rhs = b_type_norm(seq, diag, allow_negative_tau=True).log2_value
        if rhs == NEG_INF:
            vacuous += 1
            continue
        ratios = []
        if params_f is not None:
            ratios.append(log2_to_linear(f_type_norm(seq, params_f).log2_value - rhs))
        ratios.append(log2_to_linear(b_type_norm(seq, params_b).log2_value - rhs))
        worst_low = min(worst_low, *ratios)
        worst_high = max(worst_high, *ratios)
        if params_f is not None:
            rows.append((i, ratios[0], ratios[-1]))
        else:
            rows.append((i, ratios[-1], ratios[-1]))
    if worst_high == -INF:
        worst_low = worst_high = 0.0
    report = EquivalenceReport(
        "holder_embeddings",
        True,
        worst_high <= 1.0 + tol,
        0.0,
        1.0,
        worst_low,
        worst_high,
        len(seqs),
        tol,
        vacuous,
        rows,
    )
    return report


def check_exact_identities(t, s, p, q, r, tol: float | None = None) -> EquivalenceReport:
    """Exact identities: Carleson-style norms equal their Morrey-weighted twins."""
    if float(r) < 0:
        raise ParamError("r must be >= 0", rule="Definition 4(i)")
    if tol is None:
        tol = identity_tolerance(p, q)
    seqs = _as_sequences(t)
    q_f = float(q)

    worst_low = INF
    worst_high = -INF
    rows = []
    vacuous = 0
    for i, seq in enumerate(seqs):
        a = cmo_norm(seq, s, q, r).log2_value
        if q_f == INF:
            b = f_inf_inf_norm(seq, s).log2_value
        else:
            b = f_type_norm(
                seq, SpaceParams(Family.F_TYPE, s, float(r) / q_f, q, q)
            ).log2_value
        c = bbmo_norm(seq, s, p, q).log2_value
        d = b_type_norm(seq, SpaceParams(Family.B_TYPE, s, _inv(p), p, q)).log2_value
        pair_ratios = []
        for num, den in ((a, b), (c, d)):
            if num == NEG_INF and den == NEG_INF:
                continue
            pair_ratios.append(log2_to_linear(num - den))
        if not pair_ratios:
            vacuous += 1
            continue
        worst_low = min(worst_low, *pair_ratios)
        worst_high = max(worst_high, *pair_ratios)
        rows.append((i, min(pair_ratios), max(pair_ratios)))
    if worst_high == -INF:
        worst_low = worst_high = 1.0
    return EquivalenceReport(
        "exact_identities",
        worst_low >= 1.0 - tol,
        worst_high <= 1.0 + tol,
        1.0,
        1.0,
        worst_low,
        worst_high,
        len(seqs),
        tol,
        vacuous,
        rows,
    )


def check_collapse_inhomogeneous(t, s, tau, p, q, family: str = "f", tol: float = 1e-9) -> EquivalenceReport:
    """Inhomogeneous collapse check; constants identical to the homogeneous case.

    Sequences must be supported at levels >= 0 (the inhomogeneous scale has no
    coarser frequencies to compare against).
    """
    seqs = _as_sequences(t)
    for seq in seqs:
        lvl = seq.min_support_level()
        if lvl is not None and lvl < 0:
            raise ParamError(
                "inhomogeneous comparison requires support at levels >= 0",
                rule="Definition 5",
            )
    if family == "f" and float(p) == INF:
        raise ParamError("the F-type scale requires p < inf", rule="Definition 1(i)")
    n_dim = _uniform_dim(seqs)
    c_log2 = collapse_upper_constant_log2(s, tau, p, q, n_dim)
    s_eff = float(s) + n_dim * (float(tau) - _inv(p))
    fam = Family.F_TYPE if family == "f" else Family.B_TYPE
    evaluator = f_type_norm if family == "f" else b_type_norm
    params = SpaceParams(fam, s, tau, p, q, homogeneous=False)

    def pairs():
        for seq in seqs:
            yield evaluator(seq, params).log2_value, f_inf_inf_norm(
                seq, s_eff
            ).log2_value

    return _ratio_report(
        f"collapse_inhomogeneous_{family}", pairs(), 1.0, log2_to_linear(c_log2), tol
    )


# ---------------------------------------------------------------------------
# sample generation
# ---------------------------------------------------------------------------


def random_sequence(
    rng: np.random.Generator,
    dim: int,
    max_depth: int,
    retain: float = 0.6,
    log2_low: float = -20.0,
    log2_high: float = 20.0,
    root: DyadicCube | None = None,
) -> CubeSequence:
    """Random subtree of the dyadic tree under the root.

    The root is always kept; each child of a kept cube survives with
    probability ``retain`` down to the depth bound.  Magnitudes are log2-
    uniform over [log2_low, log2_high], exercising extreme dynamic range.
    """
    if root is None:
        root = DyadicCube.unit(dim)
    cubes = [root]
    frontier = [root]
    for _ in range(max_depth):
        nxt = []
        for cube in frontier:
            for child in cube.children():
                if rng.random() < retain:
                    nxt.append(child)
        cubes.extend(nxt)
        frontier = nxt
        if not frontier:
            break
    levels = rng.uniform(log2_low, log2_high, size=len(cubes))
    values = dict(zip(cubes, levels.tolist()))
    return CubeSequence.from_log2_values(values, root=root, max_depth=max_depth)


def random_sample_set(
    seed: int,
    count: int,
    dims: Sequence[int] = (1, 2),
    depth_1d: int = 10,
    depth_nd: int = 5,
    retain: float = 0.6,
) -> list[CubeSequence]:
    """Deterministic batch of random sequences cycling over the dimensions."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        dim = dims[i % len(dims)]
        depth_cap = depth_1d if dim == 1 else depth_nd
        depth = int(rng.integers(0, depth_cap + 1))
        out.append(random_sequence(rng, dim, depth, retain))
    return out


def saturated_tree_sequence(
    dim: int, depth: int, delta: float, s: float = 0.0
) -> CubeSequence:
    """Every cube of the unit tree to the given depth, equal effective weights.

    Magnitudes are chosen so |Q|**(-s/n - delta - 1/2) |t_Q| = 1 on every
    cube; this family attains the upper collapse constant as depth grows.
    """
    root = DyadicCube.unit(dim)
    exponent = float(s) + dim / 2.0 + dim * float(delta)
    values: dict[DyadicCube, float] = {}
    frontier = [root]
    values[root] = 0.0
    for j in range(1, depth + 1):
        nxt = []
        for cube in frontier:
            for child in cube.children():
                values[child] = -j * exponent
                nxt.append(child)
        frontier = nxt
    return CubeSequence.from_log2_values(values, root=root, max_depth=depth)


def saturated_ratio_log2(q: float, delta: float, n: int, depth: int) -> float:
    """Closed-form log2 ratio (norm over weighted-sup norm) of the saturated tree."""
    alpha = float(q) * float(delta) * n
    if float(q) == INF:
        return 0.0
    return (
        math.log2(sum(2.0 ** (-j * alpha) for j in range(depth + 1)))
    ) / float(q)
