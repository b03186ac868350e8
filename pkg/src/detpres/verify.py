"""Pointwise verification of maps over a space.

Checks run either over every point of the space (finite fields only) or
over a seeded random sample. Over GF(p) the work is vectorised with numpy
on packed coordinates; over the rationals it falls back to a Python loop
on `Matrix` values.

A map here is anything with ``space``, ``field``, ``__call__(Matrix)`` and,
for the numpy path, ``images(coords) -> coords``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import SearchSpaceTooLarge, UsageError
from .matrix import Matrix, batch_det_mod, det, inverse_table
from .space import Space

EXHAUSTIVE, SAMPLED = "exhaustive", "sampled"
MAX_EXHAUSTIVE_DIM = 6
MAX_EXHAUSTIVE_POINTS = 10 ** 8
MAX_EXHAUSTIVE_PAIRS = 10 ** 9
BATCH = 1 << 15


@dataclass(frozen=True)
class Verification:
    mode: str = EXHAUSTIVE
    samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (EXHAUSTIVE, SAMPLED):
            raise UsageError(f"unknown verification mode {self.mode!r}")

    def to_json(self) -> dict:
        if self.mode == EXHAUSTIVE:
            return {"mode": self.mode}
        return {"mode": self.mode, "samples": self.samples, "seed": self.seed}


def sampled(samples: int = 10_000, seed: int = 0) -> Verification:
    return Verification(SAMPLED, samples, seed)


def is_prime_field(F) -> bool:
    return F.kind == "prime"


def check_exhaustive_size(space: Space, F):
    if F.order is None:
        raise UsageError("exhaustive verification needs a finite field; use sampled mode")
    if space.dim > MAX_EXHAUSTIVE_DIM or F.order ** space.dim > MAX_EXHAUSTIVE_POINTS:
        raise SearchSpaceTooLarge(
            f"{F.order}^{space.dim} points is beyond exhaustive range; use sampled verification")


def coord_batches(space: Space, F, verification: Verification | None) -> Iterator[np.ndarray]:
    """Yield (k, m) coordinate arrays covering the points to check, in order."""
    v = verification or Verification()
    p, m = F.order, space.dim
    if v.mode == EXHAUSTIVE:
        check_exhaustive_size(space, F)
        total = p ** m
        weights = p ** np.arange(m - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, BATCH):
            idx = np.arange(start, min(start + BATCH, total), dtype=np.int64)
            yield (idx[:, None] // weights[None, :]) % p
    else:
        rng = np.random.default_rng(v.seed)
        left = v.samples
        while left > 0:
            k = min(left, BATCH)
            yield rng.integers(0, p, size=(k, m), dtype=np.int64)
            left -= k


def matrix_points(space: Space, F, verification: Verification | None) -> Iterator[Matrix]:
    v = verification or Verification()
    if v.mode == EXHAUSTIVE:
        check_exhaustive_size(space, F)
        yield from space.elements(F)
        return
    rng = random.Random(v.seed)
    for _ in range(v.samples):
        yield space.from_coords(F, [F.random(rng) for _ in range(space.dim)])


def _default(verification, F):
    if verification is None:
        return Verification() if F.order is not None else sampled()
    return verification


@dataclass
class CheckResult:
    ok: bool = True
    checked: int = 0
    witness: tuple | None = None
    extra: dict = field(default_factory=dict)


def _first_row(mask: np.ndarray) -> int | None:
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else None


def check_operator(t, op, verification: Verification | None = None):
    """First point y (in check order) with t(y) != op(y), or None."""
    F = t.field
    v = _default(verification, F)
    if is_prime_field(F):
        q = op.to_numpy()
        p = F.order
        for coords in coord_batches(t.space, F, v):
            want = coords @ q.T % p
            got = t.images(coords)
            k = _first_row(np.any(want != got, axis=1))
            if k is not None:
                return t.space.from_coords(F, coords[k].tolist())
        return None
    for y in matrix_points(t.space, F, v):
        if t(y) != op(y):
            return y
    return None


def check_equal(f, g, verification: Verification | None = None) -> CheckResult:
    """Pointwise comparison of two maps on the same space."""
    F = f.field
    v = _default(verification, F)
    res = CheckResult()
    if is_prime_field(F):
        for coords in coord_batches(f.space, F, v):
            diff = np.any(f.images(coords) != g.images(coords), axis=1)
            k = _first_row(diff)
            if k is not None:
                res.ok = False
                res.checked += k + 1
                res.witness = (f.space.from_coords(F, coords[k].tolist()),)
                return res
            res.checked += coords.shape[0]
        return res
    for x in matrix_points(f.space, F, v):
        res.checked += 1
        if f(x) != g(x):
            res.ok, res.witness = False, (x,)
            return res
    return res


def check_det_preserving(t, verification: Verification | None = None) -> CheckResult:
    """det(t(x)) == det(x) at every checked point."""
    F = t.field
    v = _default(verification, F)
    res = CheckResult()
    sp = t.space
    if is_prime_field(F):
        p = F.order
        inv = inverse_table(p)
        for coords in coord_batches(sp, F, v):
            d0 = batch_det_mod(sp.coords_to_arrays(coords, p), p, inv)
            d1 = batch_det_mod(sp.coords_to_arrays(t.images(coords), p), p, inv)
            k = _first_row(d0 != d1)
            if k is not None:
                res.ok = False
                res.checked += k + 1
                res.witness = (sp.from_coords(F, coords[k].tolist()),)
                return res
            res.checked += coords.shape[0]
        return res
    for x in matrix_points(sp, F, v):
        res.checked += 1
        if det(t(x)) != det(x):
            res.ok, res.witness = False, (x,)
            return res
    return res


def det_compat(phi, psi, verification: Verification | None = None) -> CheckResult:
    """Check det(phi(x) + psi(y)) == det(x + y).

    Exhaustive mode walks all pairs with x as the outer index, so the
    reported witness is the first violation in packed order.
    """
    F = phi.field
    v = _default(verification, F)
    sp = phi.space
    res = CheckResult()
    if not is_prime_field(F):
        rng = random.Random(v.seed)
        if v.mode == EXHAUSTIVE:
            raise UsageError("exhaustive verification needs a finite field")
        for _ in range(v.samples):
            x = sp.from_coords(F, [F.random(rng) for _ in range(sp.dim)])
            y = sp.from_coords(F, [F.random(rng) for _ in range(sp.dim)])
            res.checked += 1
            if det(phi(x) + psi(y)) != det(x + y):
                res.ok, res.witness = False, (x, y)
                return res
        return res

    p = F.order
    inv = inverse_table(p)
    if v.mode == SAMPLED:
        rng = np.random.default_rng(v.seed)
        left = v.samples
        while left > 0:
            k = min(left, BATCH)
            xs = rng.integers(0, p, size=(k, sp.dim), dtype=np.int64)
            ys = rng.integers(0, p, size=(k, sp.dim), dtype=np.int64)
            lhs = batch_det_mod(sp.coords_to_arrays((phi.images(xs) + psi.images(ys)) % p, p), p, inv)
            rhs = batch_det_mod(sp.coords_to_arrays((xs + ys) % p, p), p, inv)
            bad = _first_row(lhs != rhs)
            if bad is not None:
                res.ok = False
                res.checked += bad + 1
                res.witness = (sp.from_coords(F, xs[bad].tolist()), sp.from_coords(F, ys[bad].tolist()))
                return res
            res.checked += k
            left -= k
        return res

    check_exhaustive_size(sp, F)
    N = p ** sp.dim
    if N * N > MAX_EXHAUSTIVE_PAIRS:
        raise SearchSpaceTooLarge(f"{N}^2 pairs is beyond exhaustive range; use sampled verification")
    pts = sp.all_coords(p)
    # every sum of two points is again a point, so one determinant table serves both sides
    dets = batch_det_mod(sp.coords_to_arrays(pts, p), p, inv)
    fi, gi = phi.images(pts), psi.images(pts)
    weights = p ** np.arange(sp.dim - 1, -1, -1, dtype=np.int64)
    step = max(1, BATCH * 4 // N)
    for start in range(0, N, step):
        stop = min(start + step, N)
        lhs = dets[((fi[start:stop, None, :] + gi[None, :, :]) % p) @ weights]
        rhs = dets[((pts[start:stop, None, :] + pts[None, :, :]) % p) @ weights]
        bad = np.flatnonzero((lhs != rhs).ravel())
        if bad.size:
            k = int(bad[0])
            i, j = start + k // N, k % N
            res.ok = False
            res.checked += k + 1
            res.witness = (sp.from_coords(F, pts[i].tolist()), sp.from_coords(F, pts[j].tolist()))
            return res
        res.checked += (stop - start) * N
    return res
