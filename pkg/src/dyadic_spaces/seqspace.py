"""Sequence-space norms on finitely supported dyadic coefficient fields.

Evaluates the discrete Triebel-Lizorkin-type and Besov-type norms, their
infinity-infinity collapse, and the generalized Carleson-measure style norms,
for coefficient fields supported on finitely many dyadic cubes.

The outer supremum over cubes P is taken over every dyadic subcube of the
root that contains at least one support cube, plus the root itself; for
nonnegative Morrey exponents this candidate set realizes the supremum over
all dyadic cubes (the value at any strict ancestor of the root is dominated
by the value at the root).  All arithmetic runs in the base-2 log domain.
"""
from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from ._log2 import NEG_INF, log2_sum, log2_to_linear
from .dyadic import DyadicCube, SupportTree

INF = math.inf


class Family(str, Enum):
    F_TYPE = "F_type"
    B_TYPE = "B_type"
    CMO = "CMO"
    BBMO = "BBMO"
    F_INF_INF = "F_inf_inf"
    B_INF_INF = "B_inf_inf"


class ParamError(ValueError):
    """Invalid space parameters; ``rule`` names the violated constraint."""

    def __init__(self, message: str, rule: str | None = None):
        if rule:
            message = f"{message} [{rule}]"
        super().__init__(message)
        self.rule = rule


class SequenceFormatError(ValueError):
    """Malformed coefficient-sequence file."""


@dataclass(frozen=True)
class SpaceParams:
    """Parameter tuple (family, s, tau, p, q) with extended p, q in (0, inf]."""

    family: Family
    s: float
    tau: float
    p: float
    q: float
    homogeneous: bool = True

    def __post_init__(self):
        p = float(self.p)
        q = float(self.q)
        if not p > 0:
            raise ParamError(f"p must be positive, got {self.p}")
        if not q > 0:
            raise ParamError(f"q must be positive, got {self.q}")
        if self.family == Family.F_TYPE and p == INF:
            raise ParamError(
                "the F-type scale requires p < inf", rule="Definition 1(i)"
            )
        if math.isnan(float(self.s)) or math.isnan(float(self.tau)):
            raise ParamError("s and tau must be finite reals")


@dataclass(frozen=True)
class NormValue:
    """A norm carried in the log2 domain with a linear-scale view."""

    log2_value: float
    linear_value: float
    attained_at: DyadicCube

    @classmethod
    def from_log2(cls, v: float, cube: DyadicCube) -> "NormValue":
        return cls(v, log2_to_linear(v), cube)

    @property
    def is_zero(self) -> bool:
        return self.log2_value == NEG_INF


class _Candidate(NamedTuple):
    cube: DyadicCube
    level: int
    lo: int
    hi: int
    sup_anc: int  # index of nearest support cube strictly containing the candidate


class _Geometry:
    """Compiled support geometry shared by all norm evaluations of a sequence."""

    def __init__(self, root: DyadicCube, entries: list[tuple[DyadicCube, float]]):
        self.root = root
        self.dim = root.dim
        order = sorted(range(len(entries)), key=lambda i: entries[i][0].path_from(root))
        self.nodes = [entries[i][0] for i in order]
        self.paths = [q.path_from(root) for q in self.nodes]
        m = len(self.nodes)
        self.m = m
        self.level = np.array([q.level for q in self.nodes], dtype=np.int64)
        self.level_f = self.level.astype(float)
        self.log2t = np.array([entries[i][1] for i in order], dtype=float)
        self.log2vol = -self.level_f * self.dim
        self.min_level = root.level
        self.max_level = int(self.level.max()) if m else root.level

        self._path_pos = {p: i for i, p in enumerate(self.paths)}
        self.parent = np.full(m, -1, dtype=np.int64)
        self.end = np.full(m, m, dtype=np.int64)
        stack: list[int] = []
        for i, pth in enumerate(self.paths):
            while stack and self.paths[stack[-1]] != pth[: len(self.paths[stack[-1]])]:
                self.end[stack.pop()] = i
            if stack:
                self.parent[i] = stack[-1]
            stack.append(i)

        # Shell measures: node volume minus the volume of its support children,
        # exact in integer arithmetic at the common scale 2**(max_level*dim).
        scale = (self.max_level - self.min_level) * self.dim
        vol_int = [1 << (scale - (q.level - self.min_level) * self.dim) for q in self.nodes]
        child_vol = [0] * m
        for i in range(m):
            par = int(self.parent[i])
            if par >= 0:
                child_vol[par] += vol_int[i]
        self.mu_log2 = np.array(
            [
                math.log2(vol_int[i] - child_vol[i]) - scale - self.min_level * self.dim
                if vol_int[i] > child_vol[i]
                else NEG_INF
                for i in range(m)
            ],
            dtype=float,
        )

        # When the support is a connected tree hanging from the root, the
        # candidate set coincides with the node set; otherwise enumerate all
        # ancestor prefixes of support paths.
        connected = (
            m > 0
            and self.paths[0] == ()
            and bool(
                np.all(
                    (self.parent[1:] >= 0)
                    & (self.level[np.maximum(self.parent[1:], 0)] == self.level[1:] - 1)
                )
            )
        )
        if connected:
            self.candidates = [
                _Candidate(
                    self.nodes[i],
                    int(self.level[i]),
                    i,
                    int(self.end[i]),
                    int(self.parent[i]),
                )
                for i in range(m)
            ]
        else:
            cand_paths = {(): None}
            for pth in self.paths:
                for cut in range(len(pth) + 1):
                    cand_paths[pth[:cut]] = None
            self.candidates = []
            sentinel = 1 << self.dim
            for pth in sorted(cand_paths):
                cube = root.descendant(pth)
                lo = bisect_left(self.paths, pth)
                hi = bisect_left(self.paths, pth + (sentinel,))
                self.candidates.append(
                    _Candidate(cube, cube.level, lo, hi, self._strict_sup_anc(pth))
                )

    def _strict_sup_anc(self, pth: tuple[int, ...]) -> int:
        for cut in range(len(pth) - 1, -1, -1):
            idx = self._path_pos.get(pth[:cut])
            if idx is not None:
                return idx
        return -1

    def locate(self, cube: DyadicCube) -> _Candidate | None:
        """Candidate record for an arbitrary cube (not restricted to the list)."""
        if cube.contains(self.root):
            return _Candidate(cube, cube.level, 0, self.m, -1)
        if not self.root.contains(cube):
            return None
        pth = cube.path_from(self.root)
        lo = bisect_left(self.paths, pth)
        hi = bisect_left(self.paths, pth + (1 << self.dim,))
        sup = self._path_pos.get(pth)
        anc = int(self.parent[sup]) if sup is not None else self._strict_sup_anc(pth)
        return _Candidate(cube, cube.level, lo, hi, anc)

    def tops(self, cand: _Candidate) -> np.ndarray:
        """Indices of support nodes directly under the candidate (forest tops)."""
        if cand.lo == cand.hi:
            return np.empty(0, dtype=np.int64)
        sl = self.parent[cand.lo : cand.hi]
        return cand.lo + np.nonzero(sl < cand.lo)[0]


class CubeSequence:
    """Finitely supported map from dyadic cubes to coefficient magnitudes.

    Only magnitudes are stored: every implemented norm depends on the
    coefficients through their absolute values alone.
    """

    def __init__(self, tree: SupportTree, log2_values: Mapping[DyadicCube, float]):
        self.tree = tree
        items = {}
        for cube, lv in log2_values.items():
            lv = float(lv)
            if lv == NEG_INF:
                continue
            if not math.isfinite(lv):
                raise ValueError(f"non-finite log2 magnitude {lv} at {cube}")
            if cube not in tree.nodes:
                raise ValueError(f"value attached to {cube} outside the support tree")
            items[cube] = lv
        self._log2 = dict(sorted(items.items(), key=lambda kv: kv[0].sort_key()))
        self._geometry: _Geometry | None = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_values(
        cls,
        values: Mapping[DyadicCube, float],
        root: DyadicCube | None = None,
        max_depth: int | None = None,
    ) -> "CubeSequence":
        log2_values = {}
        for cube, v in values.items():
            v = float(v)
            if v < 0 or not math.isfinite(v):
                raise ValueError(f"magnitude must be finite and >= 0, got {v} at {cube}")
            if v > 0:
                log2_values[cube] = math.log2(v)
        return cls.from_log2_values(log2_values, root, max_depth, keys=values.keys())

    @classmethod
    def from_log2_values(
        cls,
        log2_values: Mapping[DyadicCube, float],
        root: DyadicCube | None = None,
        max_depth: int | None = None,
        keys: Iterable[DyadicCube] | None = None,
    ) -> "CubeSequence":
        nodes = set(keys) if keys is not None else set(log2_values.keys())
        if root is None and not nodes:
            raise ValueError("an empty sequence needs an explicit root")
        tree = SupportTree.build(nodes, root=root, max_depth=max_depth)
        return cls(tree, log2_values)

    @classmethod
    def zero(cls, root: DyadicCube) -> "CubeSequence":
        return cls(SupportTree(root, frozenset(), 0), {})

    # -- views ----------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.tree.root.dim

    @property
    def root(self) -> DyadicCube:
        return self.tree.root

    @property
    def support(self) -> tuple[DyadicCube, ...]:
        return tuple(self._log2.keys())

    @property
    def log2_magnitudes(self) -> dict[DyadicCube, float]:
        return dict(self._log2)

    def log2_value(self, cube: DyadicCube) -> float:
        return self._log2.get(cube, NEG_INF)

    def value(self, cube: DyadicCube) -> float:
        return log2_to_linear(self.log2_value(cube))

    @property
    def is_zero(self) -> bool:
        return not self._log2

    def min_support_level(self) -> int | None:
        return min((q.level for q in self._log2), default=None)

    # -- derived sequences ------------------------------------------------------

    def scaled_log2(self, shift: float) -> "CubeSequence":
        """The sequence with every magnitude multiplied by 2**shift."""
        return CubeSequence(self.tree, {q: v + shift for q, v in self._log2.items()})

    def with_entry(self, cube: DyadicCube, log2_value: float) -> "CubeSequence":
        values = dict(self._log2)
        values[cube] = log2_value
        root = self.root if self.root.contains(cube) else None
        return CubeSequence.from_log2_values(values, root=root)

    @property
    def geometry(self) -> _Geometry:
        if self._geometry is None:
            self._geometry = _Geometry(self.root, list(self._log2.items()))
        return self._geometry

    def __len__(self) -> int:
        return len(self._log2)

    def __repr__(self) -> str:
        return f"CubeSequence(dim={self.dim}, entries={len(self)}, root={self.root})"


# ---------------------------------------------------------------------------
# evaluation kernels
# ---------------------------------------------------------------------------


class _FKernel:
    """Per-candidate values of the F-type expression for fixed parameters.

    Chain sums are re-accumulated from the candidate downward on every call
    (sums of positive terms only); subtracting an above-candidate prefix from
    a global chain sum would cancel catastrophically on deep towers.
    """

    def __init__(self, geo: _Geometry, s: float, tau: float, p: float, q: float):
        self.geo = geo
        self.tau = tau
        self.p = p
        self.q = q
        n = geo.dim
        logw = geo.level_f * (s + n / 2.0) + geo.log2t
        if q == INF:
            L = geo.max_level - geo.min_level + 1
            M = np.full((geo.m, L), NEG_INF)
            for i in range(geo.m):
                par = int(geo.parent[i])
                if par >= 0:
                    M[i] = M[par]
                rel = int(geo.level[i]) - geo.min_level
                np.maximum(M[i, : rel + 1], logw[i], out=M[i, : rel + 1])
            self.chain_max = M
        else:
            self.logwq = (q * logw).tolist()
            self.parent_list = geo.parent.tolist()
            self.mu_list = geo.mu_log2.tolist()
            self._rsub = [NEG_INF] * geo.m
            self._terms = np.empty(geo.m)

    def value(self, cand: _Candidate) -> float:
        geo, p, q = self.geo, self.p, self.q
        if cand.lo == cand.hi:
            return NEG_INF
        if q == INF:
            rel = max(cand.level, geo.min_level) - geo.min_level
            mu = geo.mu_log2[cand.lo : cand.hi]
            terms = mu + p * self.chain_max[cand.lo : cand.hi, rel]
        else:
            ppow = p / q
            rsub = self._rsub
            logwq = self.logwq
            parent = self.parent_list
            mu_list = self.mu_list
            terms_buf = self._terms
            log2 = math.log2
            lo = cand.lo
            for i in range(lo, cand.hi):
                par = parent[i]
                base = rsub[par] if par >= lo else NEG_INF
                w = logwq[i]
                if base == NEG_INF:
                    v = w
                elif base >= w:
                    v = base + log2(1.0 + 2.0 ** (w - base))
                else:
                    v = w + log2(1.0 + 2.0 ** (base - w))
                rsub[i] = v
                mu_i = mu_list[i]
                terms_buf[i] = mu_i + ppow * v if mu_i != NEG_INF else NEG_INF
            terms = terms_buf[cand.lo : cand.hi]
        logI = log2_sum(terms)
        if logI == NEG_INF:
            return NEG_INF
        return self.tau * geo.dim * cand.level + logI / p


class _LevelTable:
    """Per-node subtree aggregates by level, shared by the B-style kernels.

    ``sums`` holds linear-domain level sums of 2**(weight) shifted by a global
    maximum (max-factored); ``maxes`` holds log-domain level maxima.
    """

    def __init__(self, geo: _Geometry, z: np.ndarray, want_max: bool):
        self.geo = geo
        L = geo.max_level - geo.min_level + 1
        self.L = L
        rel = (geo.level - geo.min_level).astype(np.int64)
        if want_max:
            SV = np.full((geo.m, L), NEG_INF)
            for i in range(geo.m - 1, -1, -1):
                r = int(rel[i])
                if z[i] > SV[i, r]:
                    SV[i, r] = z[i]
                par = int(geo.parent[i])
                if par >= 0:
                    np.maximum(SV[par], SV[i], out=SV[par])
            self.table = SV
            self.shift = 0.0
        else:
            self.shift = float(z.max()) if geo.m else 0.0
            lin = np.exp2(z - self.shift)
            SV = np.zeros((geo.m, L))
            for i in range(geo.m - 1, -1, -1):
                SV[i, rel[i]] += lin[i]
                par = int(geo.parent[i])
                if par >= 0:
                    SV[par] += SV[i]
            self.table = SV
        self.want_max = want_max

    def level_vector(self, cand: _Candidate) -> np.ndarray | None:
        """Aggregate over the candidate's forest tops; None when empty."""
        tops = self.geo.tops(cand)
        if tops.size == 0:
            return None
        rows = self.table[tops]
        return rows.max(axis=0) if self.want_max else rows.sum(axis=0)

    def level_logs(self, vec: np.ndarray) -> np.ndarray:
        """Per-level log2 values from an aggregated vector."""
        if self.want_max:
            return vec
        out = np.full(vec.shape, NEG_INF)
        pos = vec > 0
        out[pos] = np.log2(vec[pos]) + self.shift
        return out


def _aggregate_levels(level_logs: np.ndarray, q: float) -> float:
    if level_logs.size == 0:
        return NEG_INF
    if q == INF:
        return float(level_logs.max())
    return log2_sum(q * level_logs) / q


class _BKernel:
    """Per-candidate values of the B-type expression for fixed parameters."""

    def __init__(self, geo: _Geometry, s: float, tau: float, p: float, q: float):
        self.geo = geo
        self.tau = tau
        self.p = p
        self.q = q
        n = geo.dim
        logw = geo.level_f * (s + n / 2.0) + geo.log2t
        if p == INF:
            self.table = _LevelTable(geo, logw, want_max=True)
        else:
            self.table = _LevelTable(geo, p * logw + geo.log2vol, want_max=False)

    def value(self, cand: _Candidate, inhomogeneous: bool) -> float:
        geo, p, q = self.geo, self.p, self.q
        vec = self.table.level_vector(cand)
        if vec is None:
            return NEG_INF
        start = max(cand.level, 0) if inhomogeneous else cand.level
        vec = vec[max(start - geo.min_level, 0) :]
        level_logs = self.table.level_logs(vec)
        if p != INF:
            level_logs = level_logs / p
        agg = _aggregate_levels(level_logs, q)
        if agg == NEG_INF:
            return NEG_INF
        return self.tau * geo.dim * cand.level + agg


def _best_candidate(
    geo: _Geometry,
    values: Iterable[tuple[_Candidate, float]],
) -> tuple[float, DyadicCube]:
    """Maximize over candidates; ties broken toward the coarsest level, then
    the lexicographically smallest index."""
    best = NEG_INF
    best_cube = geo.root
    best_key = None
    seen = False
    for cand, v in values:
        key = cand.cube.sort_key()
        if not seen or v > best or (v == best and best_key is not None and key < best_key):
            best, best_cube, best_key, seen = v, cand.cube, key, True
    return best, best_cube


def _iter_candidates(geo: _Geometry, homogeneous: bool):
    for cand in geo.candidates:
        if not homogeneous and cand.level < 0:
            continue
        yield cand


def _check_tau(tau: float, allow_negative_tau: bool):
    if tau < 0 and not allow_negative_tau:
        raise ParamError(
            "tau < 0 collapses the space to polynomials; use the classifier",
            rule="Proposition 1(iv)",
        )


def f_type_norm(
    t: CubeSequence, params: SpaceParams, *, allow_negative_tau: bool = False
) -> NormValue:
    """Discrete Triebel-Lizorkin-type norm of a coefficient field."""
    if params.family != Family.F_TYPE:
        raise ParamError(f"f_type_norm requires the F-type family, got {params.family}")
    s, tau, p, q = float(params.s), float(params.tau), float(params.p), float(params.q)
    _check_tau(tau, allow_negative_tau)
    geo = t.geometry
    kern = _FKernel(geo, s, tau, p, q)
    vals = ((c, kern.value(c)) for c in _iter_candidates(geo, params.homogeneous))
    return NormValue.from_log2(*_best_candidate(geo, vals))


def b_type_norm(
    t: CubeSequence, params: SpaceParams, *, allow_negative_tau: bool = False
) -> NormValue:
    """Discrete Besov-type norm of a coefficient field.

    Same-level cubes are disjoint, so each per-level integral reduces exactly
    to a weighted power sum over the level; the evaluator uses that reduction.
    """
    if params.family != Family.B_TYPE:
        raise ParamError(f"b_type_norm requires the B-type family, got {params.family}")
    s, tau, p, q = float(params.s), float(params.tau), float(params.p), float(params.q)
    _check_tau(tau, allow_negative_tau)
    geo = t.geometry
    kern = _BKernel(geo, s, tau, p, q)
    vals = (
        (c, kern.value(c, not params.homogeneous))
        for c in _iter_candidates(geo, params.homogeneous)
    )
    return NormValue.from_log2(*_best_candidate(geo, vals))


def f_inf_inf_norm(t: CubeSequence, s_eff: float) -> NormValue:
    """sup over support cubes of |Q|**(-s_eff/n - 1/2) |t_Q|.

    The same formula serves both infinity-infinity scales.
    """
    geo = t.geometry
    if geo.m == 0:
        return NormValue.from_log2(NEG_INF, geo.root)
    arr = geo.level_f * (float(s_eff) + geo.dim / 2.0) + geo.log2t
    vmax = float(arr.max())
    best = min(
        (geo.nodes[i] for i in np.nonzero(arr == vmax)[0]),
        key=lambda c: c.sort_key(),
    )
    return NormValue.from_log2(vmax, best)


b_inf_inf_norm = f_inf_inf_norm


def cmo_norm(t: CubeSequence, s: float, q: float, r: float) -> NormValue:
    """Generalized Carleson-measure norm.

    Evaluated by exact term-wise integration: the integral over P of the
    summed q-th powers is the plain weighted sum of |Q| over support cubes
    inside P, so no shell decomposition is needed.  At q = inf the usual
    modification degenerates to the weighted supremum and r drops out.
    """
    s, q, r = float(s), float(q), float(r)
    if not q > 0:
        raise ParamError(f"q must be positive, got {q}")
    if r < 0:
        raise ParamError(
            "r < 0 is classifier territory (the space degenerates)",
            rule="Proposition 1(iv)",
        )
    geo = t.geometry
    n = geo.dim
    logw = geo.level_f * (s + n / 2.0) + geo.log2t
    if q == INF:
        table = _LevelTable(geo, logw, want_max=True)

        def value(cand: _Candidate) -> float:
            vec = table.level_vector(cand)
            return NEG_INF if vec is None else float(vec.max())

    else:
        table = _LevelTable(geo, q * logw + geo.log2vol, want_max=False)

        def value(cand: _Candidate) -> float:
            vec = table.level_vector(cand)
            if vec is None:
                return NEG_INF
            tot = float(vec.sum())
            if tot <= 0:
                return NEG_INF
            logD = math.log2(tot) + table.shift
            return (r * n * cand.level + logD) / q

    vals = ((c, value(c)) for c in geo.candidates)
    return NormValue.from_log2(*_best_candidate(geo, vals))


def bbmo_norm(t: CubeSequence, s: float, p: float, q: float) -> NormValue:
    """Besov-flavoured BMO norm: per-level averages over P, then an l^q sum.

    Must agree with the B-type norm at Morrey exponent 1/p; the arrangement
    here keeps the |P| factor inside each level term.
    """
    s, p, q = float(s), float(p), float(q)
    if not p > 0 or not q > 0:
        raise ParamError(f"p and q must be positive, got p={p}, q={q}")
    geo = t.geometry
    n = geo.dim
    logw = geo.level_f * (s + n / 2.0) + geo.log2t

    if p == INF:
        table = _LevelTable(geo, logw, want_max=True)
    else:
        table = _LevelTable(geo, p * logw + geo.log2vol, want_max=False)

    def value(cand: _Candidate) -> float:
        vec = table.level_vector(cand)
        if vec is None:
            return NEG_INF
        vec = vec[max(cand.level - geo.min_level, 0) :]
        level_logs = table.level_logs(vec)
        if p == INF:
            return _aggregate_levels(level_logs, q)
        logA = n * cand.level + level_logs  # per-level average over P
        if q == INF:
            finite = logA[level_logs != NEG_INF]
            return NEG_INF if finite.size == 0 else float(finite.max()) / p
        masked = np.where(level_logs == NEG_INF, NEG_INF, (q / p) * logA)
        tot = log2_sum(masked)
        return NEG_INF if tot == NEG_INF else tot / q

    vals = ((c, value(c)) for c in geo.candidates)
    return NormValue.from_log2(*_best_candidate(geo, vals))


def norm(t: CubeSequence, params: SpaceParams, **kwargs) -> NormValue:
    """Family dispatch; F_inf_inf/B_inf_inf read the effective smoothness off s."""
    if params.family == Family.F_TYPE:
        return f_type_norm(t, params, **kwargs)
    if params.family == Family.B_TYPE:
        return b_type_norm(t, params, **kwargs)
    if params.family in (Family.F_INF_INF, Family.B_INF_INF):
        return f_inf_inf_norm(t, params.s)
    raise ParamError(f"norm() does not dispatch family {params.family}")


def candidate_value(t: CubeSequence, params: SpaceParams, region: DyadicCube) -> float:
    """The single-cube term of the outer supremum, as a log2 value.

    Accepts any dyadic cube that is comparable to the root (inside it, equal
    to it, or an ancestor of it); cubes disjoint from the root give -inf.
    """
    geo = t.geometry
    cand = geo.locate(region)
    if cand is None:
        return NEG_INF
    s, tau, p, q = float(params.s), float(params.tau), float(params.p), float(params.q)
    if params.family == Family.F_TYPE:
        return _FKernel(geo, s, tau, p, q).value(cand)
    if params.family == Family.B_TYPE:
        return _BKernel(geo, s, tau, p, q).value(cand, not params.homogeneous)
    raise ParamError(f"candidate_value supports F/B families, got {params.family}")


# ---------------------------------------------------------------------------
# JSON Lines interchange
# ---------------------------------------------------------------------------


def save_jsonl(t: CubeSequence, path: str | Path) -> None:
    """Write header + one record per cube; log2 magnitudes round-trip exactly."""
    root = t.root
    lines = [
        json.dumps(
            {
                "dim": t.dim,
                "root": {"j": root.level, "k": list(root.index)},
                "depth": t.tree.max_depth,
            },
            sort_keys=True,
        )
    ]
    for cube, lv in t.log2_magnitudes.items():
        lines.append(
            json.dumps(
                {
                    "j": cube.level,
                    "k": list(cube.index),
                    "v": log2_to_linear(lv),
                    "log2v": lv,
                },
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_jsonl(path: str | Path) -> CubeSequence:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SequenceFormatError(f"{path}: empty sequence file")
    try:
        header = json.loads(lines[0])
        dim = int(header["dim"])
        root = DyadicCube(dim, int(header["root"]["j"]), tuple(header["root"]["k"]))
        depth = int(header["depth"])
        log2_values: dict[DyadicCube, float] = {}
        for ln in lines[1:]:
            rec = json.loads(ln)
            cube = DyadicCube(dim, int(rec["j"]), tuple(rec["k"]))
            if "log2v" in rec:
                lv = float(rec["log2v"])
            else:
                v = float(rec["v"])
                if v < 0 or not math.isfinite(v):
                    raise SequenceFormatError(f"{path}: bad magnitude {v}")
                lv = math.log2(v) if v > 0 else NEG_INF
            if lv != NEG_INF:
                log2_values[cube] = lv
    except SequenceFormatError:
        raise
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise SequenceFormatError(f"{path}: {exc}") from exc
    try:
        return CubeSequence.from_log2_values(log2_values, root=root, max_depth=depth)
    except ValueError as exc:
        raise SequenceFormatError(f"{path}: {exc}") from exc
