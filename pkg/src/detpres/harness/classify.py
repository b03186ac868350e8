"""Brute-force classification of linear determinant preservers.

Every m x m matrix over GF(p) (m = dim of the space) is read as a linear
operator on packed coordinates. An operator survives if det(L(x)) = det(x)
for every x in the space; survivors are then factored as x -> beta u x u^T.
The count of survivors is compared with an independent enumeration of the
distinct maps x -> beta u x u^T with beta^n det(u)^2 = 1.
"""

from __future__ import annotations

import itertools
import time

import numpy as np

from ..decomposer import factor_linear_sym_preserver
from ..errors import NotCongruenceForm, OddDimension, SearchSpaceTooLarge, UsageError
from ..field import Field
from ..matrix import Matrix, batch_det_mod, inverse_table
from ..space import SYM, Space
from ..trace_pack import LinearOperator
from .suites import MAX_REPORTED_VIOLATIONS, SuiteReport, run_sharded

MAX_OPERATORS = 10 ** 8
CHUNK = 1 << 16


def _det_of_coords(sp: Space, coords: np.ndarray, p: int, invtab: np.ndarray) -> np.ndarray:
    if sp.n == 2 and sp.kind == SYM:
        return (coords[..., 0] * coords[..., 2] - coords[..., 1] * coords[..., 1]) % p
    flat = coords.reshape(-1, sp.dim)
    return batch_det_mod(sp.coords_to_arrays(flat, p), p, invtab).reshape(coords.shape[:-1])


def _operators(start: int, stop: int, m: int, p: int) -> np.ndarray:
    """Operators with index in [start, stop) as (k, m, m); row-major digits, most significant first."""
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((idx.size, m * m), dtype=np.int64)
    for e in range(m * m - 1, -1, -1):
        digits[:, e] = idx % p
        idx = idx // p
    return digits.reshape(-1, m, m)


def _screen_order(dets: np.ndarray) -> np.ndarray:
    """Check invertible points first: they reject most operators immediately."""
    return np.argsort(dets == 0, kind="stable")


def survivors_in_range(kind: str, n: int, p: int, start: int, stop: int) -> list[int]:
    """Indices in [start, stop) of operators preserving det on every point."""
    sp = Space(kind, n)
    m = sp.dim
    inv = inverse_table(p)
    pts = sp.all_coords(p)
    dets = _det_of_coords(sp, pts, p, inv)
    order = _screen_order(dets)
    found = []
    for lo in range(start, stop, CHUNK):
        hi = min(lo + CHUNK, stop)
        ops = _operators(lo, hi, m, p)
        alive = np.arange(hi - lo)
        for k in order:
            if alive.size == 0:
                break
            img = ops[alive] @ pts[k] % p
            alive = alive[_det_of_coords(sp, img, p, inv) == dets[k]]
        found.extend(int(lo + a) for a in alive)
    return found


def oracle_maps(sp: Space, F: Field) -> set:
    """Distinct operators x -> beta u x u^T, beta^n det(u)^2 = 1, by enumerating all (beta, u)."""
    p, n = F.order, sp.n
    inv = inverse_table(p)
    basis = sp.coords_to_arrays(np.eye(sp.dim, dtype=np.int64), p)
    us = np.array(list(itertools.product(range(p), repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    du = batch_det_mod(us, p, inv)
    keep = du != 0
    us, du = us[keep], du[keep]
    maps = set()
    for beta in range(1, p):
        ok = (pow(beta, n, p) * du * du) % p == 1
        for u in us[ok]:
            imgs = beta * (u[None] @ basis @ u.T[None]) % p
            q = sp.arrays_to_coords(imgs).T
            maps.add(q.tobytes())
    return maps


def classify_linear_preservers(space: str | Space, n: int | None = None, F: Field | None = None,
                               shards: int = 1) -> SuiteReport:
    """Enumerate all p^(m^2) operators, keep the determinant preservers and factor each one."""
    sp = space if isinstance(space, Space) else Space(space, n)
    if F is None or F.order is None:
        raise UsageError("classification needs a prime field")
    if sp.kind != SYM and sp.n % 2:
        raise OddDimension("every operator preserves det on Q_n for odd n")
    p, m = F.order, sp.dim
    total = p ** (m * m) if m * m * np.log10(p) < 18 else None
    if total is None or total > MAX_OPERATORS:
        raise SearchSpaceTooLarge(f"{p}^{m * m} operators is beyond brute-force range")
    t0 = time.perf_counter()
    parts = run_sharded(survivors_in_range, (sp.kind, sp.n, p), total, shards)
    found = [k for part in parts for k in part]
    oracle = oracle_maps(sp, F)

    factored, violations, failed = 0, [], 0
    for k in found:
        q = _operators(k, k + 1, m, p)[0]
        if sp.kind == SYM:
            try:
                factor_linear_sym_preserver(LinearOperator(sp, Matrix(F, q.tolist())))
                ok = True
            except NotCongruenceForm:
                ok = False
        else:
            ok = q.tobytes() in oracle
        if ok:
            factored += 1
        else:
            failed += 1
            if len(violations) < MAX_REPORTED_VIOLATIONS:
                violations.append({"operator_index": k, "operator": q.tolist()})
    count_ok = len(found) == len(oracle)
    if not count_ok:
        violations.append({"survivors": len(found), "oracle": len(oracle)})
    report = SuiteReport("classify", {"space": sp.kind, "n": sp.n, "p": p}, total, violations,
                         failed + (0 if count_ok else 1), time.perf_counter() - t0)
    report.extra = {"operators": total, "det_preserving": len(found), "factored": factored, "failed": failed,
                    "oracle_count": len(oracle)}
    return report
