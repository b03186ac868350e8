"""Black-box maps on Sigma_n / Q_n.

A `MapTable` is a total map on a space. Concrete backings:

* `TableMap` - a materialized table over GF(p), row k holding the packed
  coordinates of the image of the k-th point (lexicographic order);
* `AnalyticMap` - the closure x -> beta u (x +/- x0) u^T of a
  `CanonicalCongruence`;
* `FunctionMap` - any Python callable on matrices;
* `ShiftedMap` / `TwistedMap` - x -> t(x) + c and x -> alpha t(x / alpha).

Every backing supports single-point evaluation and, over GF(p), the
vectorised ``images(coords)`` used by the verification loops.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (DeterminantConditionViolated, NotInImage, SearchSpaceTooLarge, UsageError, ZeroAlpha)
from .field import Field, Scalar, field_from_json
from .matrix import Matrix, det, identity, inverse
from .space import Space, space_of
from .verify import MAX_EXHAUSTIVE_DIM, MAX_EXHAUSTIVE_POINTS, check_exhaustive_size, coord_batches

GAUGE = "row-major-first-1"
PLUS, MINUS = "plus", "minus"


def _np_mod_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return np.matmul(a, b) % p


@dataclass(frozen=True)
class CanonicalCongruence:
    """x -> beta u (x + x0) u^T (side "plus") or beta u (x - x0) u^T ("minus")."""

    beta: Scalar
    u: Matrix
    x0: Matrix
    side: str = PLUS

    def __post_init__(self):
        if self.side not in (PLUS, MINUS):
            raise UsageError(f"side must be plus or minus, not {self.side!r}")
        F = self.u.field
        b = F(self.beta)
        if b == 0 or F(b ** self.u.n * det(self.u) ** 2) != 1:
            raise DeterminantConditionViolated("beta^n det(u)^2 must equal 1")

    @property
    def field(self) -> Field:
        return self.u.field

    @property
    def space(self) -> Space:
        return space_of(self.x0)

    def __call__(self, x: Matrix) -> Matrix:
        s = x + self.x0 if self.side == PLUS else x - self.x0
        out = (self.u @ s @ self.u.T).scale(self.beta)
        return Matrix._trusted(out.field, out.rows, self.x0.structure)

    def inverse_image(self, target: Matrix) -> Matrix:
        F = self.field
        uinv = inverse(self.u)
        y = (uinv @ target @ uinv.T).scale(F.inv(self.beta))
        y = Matrix._trusted(F, y.rows, self.x0.structure)
        return y - self.x0 if self.side == PLUS else y + self.x0

    def with_side(self, side: str) -> CanonicalCongruence:
        return CanonicalCongruence(self.beta, self.u, self.x0, side)

    def gauge_fixed(self) -> CanonicalCongruence:
        """Scale u so its first nonzero entry (row-major) is 1, folding the square into beta."""
        F = self.field
        f = next(x for r in self.u.rows for x in r if x != 0)
        return CanonicalCongruence(F(self.beta * f * f), self.u.scale(F.inv(f)), self.x0, self.side)

    def to_json(self) -> dict:
        F = self.field
        return {"beta": F.format(self.beta), "u": self.u.to_json(), "x0": self.x0.to_json(),
                "side": self.side, "gauge": GAUGE}

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> CanonicalCongruence:
        u = Matrix.from_json(obj["u"], field)
        x0 = Matrix.from_json(obj["x0"], u.field)
        return cls(u.field.parse(obj["beta"]), u, x0, obj.get("side", PLUS))


class MapTable:
    """Base class; subclasses provide ``__call__`` and optionally faster paths."""

    space: Space
    field: Field

    def __call__(self, x: Matrix) -> Matrix:
        raise NotImplementedError

    @property
    def domain_size(self) -> int | None:
        return self.space.size(self.field)

    def images(self, coords: np.ndarray) -> np.ndarray:
        sp, F = self.space, self.field
        out = np.empty_like(coords)
        for k, c in enumerate(coords.tolist()):
            out[k] = sp.coords(self(sp.from_coords(F, c)))
        return out

    def preimage(self, target: Matrix) -> Matrix:
        """First point, in packed order, mapped onto target."""
        sp, F = self.space, self.field
        if F.order is None:
            raise UsageError("preimage search needs a finite field or an analytic map")
        check_exhaustive_size(sp, F)
        want = np.array(sp.coords(target), dtype=np.int64)
        for coords in coord_batches(sp, F, None):
            hit = np.flatnonzero(np.all(self.images(coords) == want, axis=1))
            if hit.size:
                return sp.from_coords(F, coords[hit[0]].tolist())
        raise NotInImage(f"{target!r} is not in the image")

    def is_surjective(self) -> bool | None:
        """True/False when decidable, None when unknown."""
        F = self.field
        if F.order is None or self.domain_size > MAX_EXHAUSTIVE_POINTS:
            return None
        return self.materialize().is_surjective()

    def materialize(self) -> TableMap:
        sp, F = self.space, self.field
        if F.order is None:
            raise UsageError("only maps over GF(p) can be materialized")
        check_exhaustive_size(sp, F)
        return TableMap(sp, F, self.images(sp.all_coords(F.order)))

    def to_json(self) -> dict:
        return self.materialize().to_json()


class TableMap(MapTable):
    def __init__(self, space: Space, field: Field, table: np.ndarray):
        if field.order is None:
            raise UsageError("tables need a finite field")
        table = np.asarray(table, dtype=np.int64) % field.order
        if table.shape != (field.order ** space.dim, space.dim):
            raise UsageError(f"table has shape {table.shape}, expected {(field.order ** space.dim, space.dim)}")
        self.space, self.field, self.table = space, field, table
        self.table.setflags(write=False)

    @classmethod
    def from_function(cls, space: Space, field: Field, f: Callable[[Matrix], Matrix]) -> TableMap:
        check_exhaustive_size(space, field)
        return cls(space, field, np.array([space.coords(f(x)) for x in space.elements(field)],
                                          dtype=np.int64).reshape(-1, space.dim))

    def __call__(self, x: Matrix) -> Matrix:
        k = self.space.index(self.space.coords(x), self.field.order)
        return self.space.from_coords(self.field, self.table[k].tolist())

    def images(self, coords: np.ndarray) -> np.ndarray:
        return self.table[self.space.index_array(coords, self.field.order)]

    def preimage(self, target: Matrix) -> Matrix:
        want = np.array(self.space.coords(target), dtype=np.int64)
        hit = np.flatnonzero(np.all(self.table == want, axis=1))
        if not hit.size:
            raise NotInImage(f"{target!r} is not in the image")
        return self.space.point(self.field, int(hit[0]))

    def is_surjective(self) -> bool:
        idx = self.space.index_array(self.table, self.field.order)
        return np.unique(idx).size == idx.size

    def materialize(self) -> TableMap:
        return self

    def with_entry(self, x: Matrix, image: Matrix) -> TableMap:
        """Copy of the table with one entry replaced."""
        t = self.table.copy()
        t[self.space.index(self.space.coords(x), self.field.order)] = self.space.coords(image)
        return TableMap(self.space, self.field, t)

    def to_json(self) -> dict:
        sp, F = self.space, self.field
        keys = sp.all_coords(F.order)
        return {
            "format": "detpres-map",
            "space": sp.to_json(),
            "field": F.to_json(),
            "backing": "table",
            "table": {",".join(map(str, k)): [str(v) for v in row] for k, row in zip(keys.tolist(), self.table.tolist())},
        }


class AnalyticMap(MapTable):
    def __init__(self, form: CanonicalCongruence):
        self.form = form
        self.space = form.space
        self.field = form.field

    def __call__(self, x: Matrix) -> Matrix:
        return self.form(x)

    def images(self, coords: np.ndarray) -> np.ndarray:
        F, sp = self.field, self.space
        if F.kind != "prime":
            return super().images(coords)
        p = F.order
        X = sp.coords_to_arrays(coords, p)
        x0 = self.form.x0.to_numpy()
        S = (X + x0) % p if self.form.side == PLUS else (X - x0) % p
        u = self.form.u.to_numpy()
        out = _np_mod_matmul(_np_mod_matmul(u, S, p), u.T, p) * int(self.form.beta) % p
        return sp.arrays_to_coords(out)

    def preimage(self, target: Matrix) -> Matrix:
        return self.form.inverse_image(target)

    def is_surjective(self) -> bool:
        return True  # beta != 0 and u invertible are enforced by the form

    def to_json(self) -> dict:
        return {
            "format": "detpres-map",
            "space": self.space.to_json(),
            "field": self.field.to_json(),
            "backing": "analytic",
            "canonical": self.form.to_json(),
        }


class FunctionMap(MapTable):
    def __init__(self, space: Space, field: Field, f: Callable[[Matrix], Matrix]):
        self.space, self.field, self.f = space, field, f

    def __call__(self, x: Matrix) -> Matrix:
        return self.f(x)


class ShiftedMap(MapTable):
    """x -> base(x) + offset."""

    def __init__(self, base: MapTable, offset: Matrix):
        base.space.check(offset)
        self.base, self.offset = base, offset
        self.space, self.field = base.space, base.field

    def __call__(self, x: Matrix) -> Matrix:
        return self.base(x) + self.offset

    def images(self, coords: np.ndarray) -> np.ndarray:
        if self.field.kind != "prime":
            return super().images(coords)
        off = np.array(self.space.coords(self.offset), dtype=np.int64)
        return (self.base.images(coords) + off) % self.field.order

    def preimage(self, target: Matrix) -> Matrix:
        return self.base.preimage(target - self.offset)

    def is_surjective(self) -> bool | None:
        return self.base.is_surjective()


class TwistedMap(MapTable):
    """x -> alpha * base(alpha^-1 x)."""

    def __init__(self, base: MapTable, alpha: Scalar):
        F = base.field
        alpha = F(alpha)
        if alpha == 0:
            raise ZeroAlpha("alpha must be nonzero")
        self.base, self.alpha = base, alpha
        self.space, self.field = base.space, F

    def __call__(self, x: Matrix) -> Matrix:
        F = self.field
        return self.base(x.scale(F.inv(self.alpha))).scale(self.alpha)

    def images(self, coords: np.ndarray) -> np.ndarray:
        F = self.field
        if F.kind != "prime":
            return super().images(coords)
        p = F.order
        a, ainv = int(self.alpha), int(F.inv(self.alpha))
        return self.base.images(coords * ainv % p) * a % p

    def preimage(self, target: Matrix) -> Matrix:
        F = self.field
        return self.base.preimage(target.scale(F.inv(self.alpha))).scale(self.alpha)

    def is_surjective(self) -> bool | None:
        return self.base.is_surjective()


def alpha_twist(gamma: MapTable, alpha) -> MapTable:
    """The map x -> alpha * gamma(alpha^-1 x)."""
    return TwistedMap(gamma, alpha)


def identity_map(space: Space, F: Field) -> MapTable:
    return AnalyticMap(CanonicalCongruence(F(1), identity(F, space.n), space.zero(F)))


def canonical_pair(beta, u: Matrix, x0: Matrix) -> tuple[AnalyticMap, AnalyticMap]:
    """(phi, psi) with phi(x) = beta u (x + x0) u^T and psi(x) = beta u (x - x0) u^T."""
    F = u.field
    form = CanonicalCongruence(F(beta), u, x0, PLUS)
    return AnalyticMap(form), AnalyticMap(form.with_side(MINUS))


def map_from_json(obj: dict) -> MapTable:
    if obj.get("format", "detpres-map") != "detpres-map":
        raise UsageError(f"unknown map format {obj.get('format')!r}")
    F = field_from_json(obj["field"])
    sp = Space.from_json(obj["space"])
    backing = obj.get("backing")
    if backing == "analytic":
        form = CanonicalCongruence.from_json(obj["canonical"], F)
        if form.space != sp:
            raise UsageError("canonical data does not live in the declared space")
        return AnalyticMap(form)
    if backing == "table":
        if F.order is None:
            raise UsageError("tables need a finite field")
        if sp.dim > MAX_EXHAUSTIVE_DIM or F.order ** sp.dim > MAX_EXHAUSTIVE_POINTS:
            raise SearchSpaceTooLarge("table too large to materialize")
        table = np.zeros((F.order ** sp.dim, sp.dim), dtype=np.int64)
        seen = np.zeros(F.order ** sp.dim, dtype=bool)
        for key, image in obj["table"].items():
            k = sp.index([F.parse(c) for c in key.split(",")], F.order)
            if len(image) != sp.dim:
                raise UsageError(f"image for {key} has wrong length")
            table[k] = [F.parse(c) for c in image]
            seen[k] = True
        if not seen.all():
            raise UsageError(f"table is not total: {int((~seen).sum())} points missing")
        return TableMap(sp, F, table)
    raise UsageError(f"unknown backing {backing!r}")


def random_invertible(F: Field, n: int, rng: random.Random) -> Matrix:
    while True:
        u = Matrix(F, [[F.random(rng) for _ in range(n)] for _ in range(n)])
        if det(u) != 0:
            return u


def random_canonical(space: Space, F: Field, rng: random.Random, with_x0: bool = True) -> CanonicalCongruence:
    """Random (beta, u, x0) with beta^n det(u)^2 = 1, side "plus"."""
    n = space.n
    if F.order is None:
        u = random_invertible(F, n, rng)
        d = det(u)
        rows = [list(r) for r in u.rows]
        for r in rows:
            r[0] = F(r[0] / d)
        u = Matrix(F, rows)
        betas = [F(1), F(-1)] if n % 2 == 0 else [F(1)]
    else:
        while True:
            u = random_invertible(F, n, rng)
            target = F.inv(F(det(u) ** 2))
            betas = [b for b in range(1, F.order) if pow(b, n, F.order) == target]
            if betas:
                break
    beta = betas[rng.randrange(len(betas))]
    x0 = space.from_coords(F, [F.random(rng) for _ in range(space.dim)]) if with_x0 else space.zero(F)
    return CanonicalCongruence(beta, u, x0, PLUS)
