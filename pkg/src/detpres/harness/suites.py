"""Named verification suites with deterministic sharding.

Every suite enumerates a finite set of cases indexed 0..total-1. The index
range is cut into contiguous shards, each shard runs independently (in
worker processes when ``shards > 1``) and the results are merged in index
order, so a report depends only on the suite parameters and never on the
shard count.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..canonical import distinguishing_witness_skew, distinguishing_witness_sym, skew_canonical, sym_diagonalize
from ..decomposer import (FAST, PAPER, adjugate_series, decompose_pair_skew, decompose_pair_sym, decompose_two_alphas,
                          series_residual, verify_det_compat)
from ..errors import DetPresError, OddDimension, SearchSpaceTooLarge, UnknownSuite, UsageError
from ..field import Field, make_field
from ..maps import AnalyticMap, CanonicalCongruence, ShiftedMap, canonical_pair, random_canonical, random_invertible
from ..matrix import Matrix, congruence, cofactor, cofactor_bump, det, inverse, unit
from ..space import SKEW_SPACE, SYM, Space
from ..trace_pack import LinearOperator, pack_col, pack_row
from ..verify import EXHAUSTIVE, MAX_EXHAUSTIVE_PAIRS, MAX_EXHAUSTIVE_POINTS, Verification, sampled

MAX_REPORTED_VIOLATIONS = 100


@dataclass
class SuiteReport:
    """Outcome of a suite; ``passed`` iff there are no violations."""

    suite: str
    params: dict
    cases: int = 0
    violations: list = field(default_factory=list)
    violation_count: int = 0
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_json(self, with_time: bool = True) -> dict:
        out = {"suite": self.suite, "params": self.params, "cases": self.cases, "passed": self.passed,
               "violation_count": self.violation_count, "violations": self.violations}
        if self.extra:
            out["extra"] = self.extra
        if with_time:
            out["wall_time"] = round(self.wall_time, 3)
        return out


@dataclass
class ShardResult:
    cases: int = 0
    violations: list = field(default_factory=list)
    violation_count: int = 0

    def add(self, ok: bool, witness: Callable[[], dict]):
        self.cases += 1
        if not ok:
            self.violation_count += 1
            if len(self.violations) < MAX_REPORTED_VIOLATIONS:
                self.violations.append(witness())


@dataclass(frozen=True)
class Suite:
    name: str
    defaults: dict
    total: Callable[[dict], int]
    run: Callable[[dict, int, int], ShardResult]
    describe: str = ""


def _field(params: dict) -> Field:
    if params.get("field") == "rational":
        return make_field("rational")
    return make_field("prime", params["p"])


def _finite_size(p: int, k: int, limit: int = MAX_EXHAUSTIVE_POINTS) -> int:
    if p ** k > limit:
        raise SearchSpaceTooLarge(f"{p}^{k} cases is beyond exhaustive range")
    return p ** k


def _mjson(a: Matrix) -> list:
    return [[a.field.format(x) for x in r] for r in a.rows]


# witnesses for pairs of distinct points


def _pair_total(kind: str):
    def total(params):
        sp = Space(kind, params["n"])
        N = _finite_size(params["p"], sp.dim)
        if N * N > MAX_EXHAUSTIVE_PAIRS:
            raise SearchSpaceTooLarge(f"{N}^2 pairs is beyond exhaustive range")
        return N * N
    return total


def _witness_ok(a: Matrix, b: Matrix, w: Matrix) -> bool:
    return det(a + w) != det(b + w)


def _run_lemma21(params, start, stop) -> ShardResult:
    F, sp = _field(params), Space(SYM, params["n"])
    pts = list(sp.elements(F))
    N = len(pts)
    res = ShardResult()
    for k in range(start, stop):
        i, j = divmod(k, N)
        if i == j:
            continue
        a, b = pts[i], pts[j]
        w = distinguishing_witness_sym(a, b)
        res.add(w.is_symmetric() and _witness_ok(a, b, w),
                lambda: {"a": _mjson(a), "b": _mjson(b), "z": _mjson(w)})
    return res


def _lemma24_total(params):
    if params["n"] % 2:
        raise OddDimension("the skew witness needs even n")
    N = _finite_size(params["p"], Space(SKEW_SPACE, params["n"]).dim)
    return N + _pair_total(SKEW_SPACE)(params)


def _run_lemma24(params, start, stop) -> ShardResult:
    """Indices [0, N) round-trip skew_canonical; [N, N + N^2) check witnesses for a != b."""
    F, sp = _field(params), Space(SKEW_SPACE, params["n"])
    pts = list(sp.elements(F))
    N = len(pts)
    res = ShardResult()
    for k in range(start, stop):
        if k < N:
            c = pts[k]
            form = skew_canonical(c)
            ok = congruence(form.p, c) == form.d and form.rank % 2 == 0 and det(form.p) != 0
            res.add(ok, lambda: {"c": _mjson(c), "rank": form.rank})
            continue
        i, j = divmod(k - N, N)
        if i == j:
            continue
        a, b = pts[i], pts[j]
        w = distinguishing_witness_skew(a, b)
        res.add(w.is_skew() and _witness_ok(a, b, w), lambda: {"a": _mjson(a), "b": _mjson(b), "z": _mjson(w)})
    return res


# cofactor bump over all of M_n


def _lemma23_total(params):
    n = params["n"]
    if n < 2:
        raise UsageError("the cofactor bump needs n >= 2")
    return _finite_size(params["p"], n * n)


def _run_lemma23(params, start, stop) -> ShardResult:
    """Case k is the k-th matrix of M_n(GF(p)); each case covers every t and every i != j."""
    F, n, p = _field(params), params["n"], params["p"]
    units = {(i, j): unit(F, n, i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j}
    res = ShardResult()
    for k in range(start, stop):
        digits = [(k // p ** e) % p for e in range(n * n - 1, -1, -1)]
        a = Matrix._trusted(F, tuple(tuple(digits[r * n:(r + 1) * n]) for r in range(n)))
        bad = None
        for (i, j), e in units.items():
            for t in range(p):
                if cofactor(a + e.scale(t), j, i) != cofactor_bump(a, t, i, j):
                    bad = (i, j, t)
                    break
            if bad:
                break
        res.add(bad is None, lambda: {"a": _mjson(a), "i": bad[0], "j": bad[1], "t": bad[2]})
    return res


def _run_sym_roundtrip_forms(params, start, stop) -> ShardResult:
    F, sp = _field(params), Space(SYM, params["n"])
    pts = list(sp.elements(F))
    res = ShardResult()
    for k in range(start, stop):
        a = pts[k]
        form = sym_diagonalize(a)
        d = form.d
        diag_ok = all(d.rows[i][j] == 0 for i in range(d.n) for j in range(d.n) if i != j)
        res.add(congruence(form.p, a) == d and diag_ok and det(form.p) != 0,
                lambda: {"a": _mjson(a), "rank": form.rank})
    return res


# trace pairing


def _run_trace_pairing(params, start, stop) -> ShardResult:
    """Pairs (a, b) with a in [start, stop); sym: pairing == tr(ab), skew: 2 pairing == tr(ab)."""
    kind = params.get("space", SYM)
    F, sp, p = _field(params), Space(kind, params["n"]), params["p"]
    pts = list(sp.elements(F))
    N = len(pts)
    rows = np.array([pack_row(a).coords for a in pts], dtype=np.int64)
    cols = np.array([pack_col(a).coords for a in pts], dtype=np.int64)
    full = sp.coords_to_arrays(sp.all_coords(p), p).reshape(N, -1)
    fullT = sp.coords_to_arrays(sp.all_coords(p), p).transpose(0, 2, 1).reshape(N, -1)
    factor = 1 if kind == SYM else 2
    res = ShardResult()
    for i in range(start, stop):
        pair = rows[i] @ cols.T % p
        tr = full[i] @ fullT.T % p
        bad = np.flatnonzero(factor * pair % p != tr)
        res.cases += N
        res.violation_count += bad.size
        for j in bad[: MAX_REPORTED_VIOLATIONS - len(res.violations)]:
            res.violations.append({"a": _mjson(pts[i]), "b": _mjson(pts[int(j)])})
    return res


def _trace_total(params):
    sp = Space(params.get("space", SYM), params["n"])
    _pair_total(sp.kind)(params)
    return _finite_size(params["p"], sp.dim)


# odd skew singularity


def _odd_total(params):
    if params["n"] % 2 == 0:
        raise UsageError("odd_skew_singular needs odd n")
    return _finite_size(params["p"], Space(SKEW_SPACE, params["n"]).dim)


def _run_odd_skew(params, start, stop) -> ShardResult:
    F, sp, p = _field(params), Space(SKEW_SPACE, params["n"]), params["p"]
    res = ShardResult()
    for k in range(start, stop):
        coords = [(k // p ** e) % p for e in range(sp.dim - 1, -1, -1)]
        x = sp.from_coords(F, coords)
        res.add(det(x) == 0, lambda: {"x": _mjson(x)})
    return res


# sampled suites over random canonical data


def _instance_rng(params, k) -> random.Random:
    return random.Random(params["seed"] * 1_000_003 + k)


def _sampled_or_exhaustive(sp: Space, F: Field, params, k) -> Verification:
    size = sp.size(F)
    if size is not None and size * size <= params.get("exhaustive_pairs", 10 ** 6):
        return Verification(EXHAUSTIVE)
    return sampled(params["samples"], params["seed"] * 1_000_003 + k)


def _count_total(params):
    return params["count"]


def _run_adjugate_series(params, start, stop) -> ShardResult:
    """For random compatible pairs: (phi0(a / alpha))^-1 == sum alpha^i chi_i and the residual vanishes."""
    F, sp = _field(params), Space(SYM, params["n"])
    res = ShardResult()
    for k in range(start, stop):
        rng = _instance_rng(params, k)
        form = random_canonical(sp, F, rng)
        phi, psi = canonical_pair(form.beta, form.u, form.x0)
        a0 = psi(sp.zero(F))
        phi0, psi0 = ShiftedMap(phi, a0), ShiftedMap(psi, -a0)
        while True:
            a = sp.from_coords(F, [F.random(rng) for _ in range(sp.dim)])
            if det(a) != 0:
                break
        series = adjugate_series(phi0, psi0, a)
        y = sp.from_coords(F, [F.random(rng) for _ in range(sp.dim)])
        alphas = [F.element(i) for i in range(1, min(F.order or 8, 8))]
        bad = None
        for al in alphas:
            if inverse(phi0(a.scale(F.inv(al)))) != series(al):
                bad = ("series", al)
                break
            if series_residual(series, psi0, y, al) != 0:
                bad = ("residual", al)
                break
        res.add(bad is None, lambda: {"canonical": form.to_json(), "a": _mjson(a), "check": bad[0],
                                      "alpha": F.format(bad[1])})
    return res


def _run_roundtrip_sym(params, start, stop) -> ShardResult:
    """Random (beta, u, x0): the interpolation path recovers the gauge-fixed data and agrees with the fast path."""
    F, sp = _field(params), Space(SYM, params["n"])
    res = ShardResult()
    for k in range(start, stop):
        rng = _instance_rng(params, k)
        form = random_canonical(sp, F, rng)
        phi, psi = canonical_pair(form.beta, form.u, form.x0)
        v = _sampled_or_exhaustive(sp, F, params, k)
        err = None
        try:
            rep = verify_det_compat(phi, psi, v)
            if not rep.ok:
                err = "generated pair is not determinant-compatible"
            else:
                paper = decompose_pair_sym(phi, psi, PAPER, v)
                fast = decompose_pair_sym(phi, psi, FAST, v)
                if paper.phi_form != fast.phi_form:
                    err = "paper and fast paths disagree"
                elif paper.phi_form != form.gauge_fixed():
                    err = "recovered data differs from the generating data"
        except DetPresError as exc:
            err = f"{type(exc).__name__}: {exc}"
        res.add(err is None, lambda: {"canonical": form.to_json(), "error": err})
    return res


def random_unimodular_congruence(F: Field, n: int, rng: random.Random) -> Matrix:
    """Random p with det(p) = +-1 (sign chosen at random)."""
    u = random_invertible(F, n, rng)
    s = F(rng.choice([1, -1]))
    f = F(s * F.inv(det(u)))
    rows = [list(r) for r in u.rows]
    rows[0] = [F(f * x) for x in rows[0]]
    return Matrix(F, rows)


def _run_roundtrip_skew(params, start, stop) -> ShardResult:
    """phi = psi = x -> p x p^T with det(p)^2 = 1: the recovered operator is the direct one."""
    F, sp = _field(params), Space(SKEW_SPACE, params["n"])
    if sp.n % 2:
        raise OddDimension("roundtrip_skew needs even n")
    res = ShardResult()
    for k in range(start, stop):
        rng = _instance_rng(params, k)
        pm = random_unimodular_congruence(F, sp.n, rng)
        form = CanonicalCongruence(F(1), pm, sp.zero(F))
        t = AnalyticMap(form)
        v = _sampled_or_exhaustive(sp, F, params, k)
        err = None
        try:
            out = decompose_pair_skew(t, t, PAPER, v)
            direct = LinearOperator.from_function(sp, F, lambda x: congruence(pm, x))
            if out.operator != direct:
                err = "recovered operator differs from the direct packed operator"
        except DetPresError as exc:
            err = f"{type(exc).__name__}: {exc}"
        res.add(err is None, lambda: {"p": _mjson(pm), "error": err})
    return res


def _run_corollary13(params, start, stop) -> ShardResult:
    """Identity at two distinct alphas: recovered x0 == 0 and phi == gamma."""
    F, sp = _field(params), Space(SYM, params["n"])
    res = ShardResult()
    nonzero = [x for x in (F.element(i) for i in range(1, 40)) if x != 0]
    if F.order is not None:
        nonzero = list(range(1, F.order))
    for k in range(start, stop):
        rng = _instance_rng(params, k)
        form = random_canonical(sp, F, rng, with_x0=False)
        g = AnalyticMap(form)
        a1, a2 = rng.sample(nonzero, 2)
        v = _sampled_or_exhaustive(sp, F, params, k)
        err = None
        try:
            out = decompose_two_alphas(g, g, a1, a2, verification=v)
            if not out.x0.is_zero():
                err = "x0 is not zero"
            elif out != form.gauge_fixed():
                err = "recovered data differs from the generating data"
        except DetPresError as exc:
            err = f"{type(exc).__name__}: {exc}"
        res.add(err is None, lambda: {"canonical": form.to_json(), "alphas": [F.format(a1), F.format(a2)],
                                      "error": err})
    return res


_COUNTED = {"count": 20, "seed": 0, "samples": 10_000}

SUITES: dict[str, Suite] = {s.name: s for s in [
    Suite("lemma21", {"n": 2, "p": 5}, _pair_total(SYM), _run_lemma21,
          "det(a + z) != det(b + z) for the witness of every ordered pair a != b in Sigma_n"),
    Suite("lemma23", {"n": 3, "p": 3}, _lemma23_total, _run_lemma23,
          "A_ji(a + t e_ij) == A_ji(a) - t det(a^ij) for every a in M_n, t, i != j"),
    Suite("lemma24", {"n": 4, "p": 3}, _lemma24_total, _run_lemma24,
          "skew_canonical round trips with even rank; skew witnesses are valid for every pair a != b"),
    Suite("sym_diagonalize", {"n": 2, "p": 5}, lambda pr: _finite_size(pr["p"], Space(SYM, pr["n"]).dim),
          _run_sym_roundtrip_forms, "p a p^T == d with d diagonal for every a in Sigma_n"),
    Suite("trace_pairing", {"n": 2, "p": 5, "space": SYM}, _trace_total, _run_trace_pairing,
          "pairing(a, b) == tr(ab) on Sigma_n and 2 pairing(a, b) == tr(ab) on Q_n, all pairs"),
    Suite("odd_skew_singular", {"n": 3, "p": 3}, _odd_total, _run_odd_skew,
          "det(x) == 0 for every x in Q_n, n odd"),
    Suite("adjugate_series", {"n": 2, "p": 5, **_COUNTED}, _count_total, _run_adjugate_series,
          "recovered adjugate series inverts phi(a / alpha) and its determinant residual vanishes"),
    Suite("roundtrip_sym", {"n": 2, "p": 5, **_COUNTED}, _count_total, _run_roundtrip_sym,
          "decompose_pair_sym recovers random canonical data; paper and fast paths agree"),
    Suite("roundtrip_skew", {"n": 4, "p": 17, **_COUNTED}, _count_total, _run_roundtrip_skew,
          "decompose_pair_skew recovers x -> p x p^T with det(p)^2 = 1"),
    Suite("corollary13", {"n": 2, "p": 7, **_COUNTED}, _count_total, _run_corollary13,
          "identity at two distinct alphas forces x0 == 0 and phi == gamma"),
]}


def suite_params(name: str, **overrides) -> dict:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    params = dict(SUITES[name].defaults)
    params.update({k: v for k, v in overrides.items() if v is not None})
    return params


def shard_ranges(total: int, shards: int) -> list[tuple[int, int]]:
    """Split [0, total) into ``shards`` contiguous ranges of near-equal length."""
    shards = max(1, min(shards, total or 1))
    bounds = [total * s // shards for s in range(shards + 1)]
    return list(zip(bounds[:-1], bounds[1:]))


def _run_shard(name, params, start, stop) -> ShardResult:
    return SUITES[name].run(params, start, stop)


def merge(results: list[ShardResult]) -> ShardResult:
    out = ShardResult()
    for r in results:
        out.cases += r.cases
        out.violation_count += r.violation_count
        out.violations.extend(r.violations)
    out.violations = out.violations[:MAX_REPORTED_VIOLATIONS]
    return out


def run_sharded(fn, args: tuple, total: int, shards: int) -> list:
    """Call fn(*args, start, stop) on each shard, in worker processes when shards > 1; results in index order."""
    ranges = shard_ranges(total, shards)
    if len(ranges) == 1:
        return [fn(*args, *ranges[0])]
    with ProcessPoolExecutor(max_workers=len(ranges)) as pool:
        futures = [pool.submit(fn, *args, a, b) for a, b in ranges]
        return [f.result() for f in futures]


def run_suite(name: str, params: dict | None = None, shards: int = 1) -> SuiteReport:
    """Run a named suite; ``params`` override the suite defaults."""
    params = suite_params(name, **(params or {}))
    suite = SUITES[name]
    _field(params)
    t0 = time.perf_counter()
    total = suite.total(params)
    merged = merge(run_sharded(_run_shard, (name, params), total, shards))
    report = SuiteReport(name, params, merged.cases, merged.violations, merged.violation_count,
                         time.perf_counter() - t0)
    report.extra["checks"] = suite.describe
    return report


def suite_names() -> list[str]:
    return sorted(SUITES)


__all__ = ["SuiteReport", "SUITES", "run_suite", "suite_names", "suite_params", "shard_ranges", "merge",
           "run_sharded", "random_unimodular_congruence"]
