"""The decomposer refuses inputs that break its hypotheses, and says why.

Run with ``python3 demos/02_what_goes_wrong.py``.
"""

import random

from detpres import Space, canonical_pair, decompose_pair_sym, identity_map, make_field, random_canonical
from detpres.errors import DetPresError

F = make_field("prime", 5)
sp = Space("sym", 2)
e11 = sp.from_coords(F, [1, 0, 0])


def attempt(label, phi, psi, **kw):
    try:
        r = decompose_pair_sym(phi, psi, **kw)
        print(f"{label}: ok, beta={r.beta}, exploration={r.exploration}")
    except DetPresError as exc:
        print(f"{label}: {type(exc).__name__}: {exc}")


ident = identity_map(sp, F)
form = random_canonical(sp, F, random.Random(1))
other_phi, _ = canonical_pair(form.beta, form.u, form.x0)

# %% mismatched maps: a concrete witness pair (x, y) is reported
attempt("mismatched pair", other_phi, ident)

# %% a table that misses part of the space
stuck = ident.materialize().with_entry(e11, sp.zero(F))
attempt("non-surjective table", stuck, stuck)

# %% GF(3) is below the |F| >= n^2 + 1 bound for n = 2
F3 = make_field("prime", 3)
small = identity_map(sp, F3)
attempt("strict mode over GF(3)", small, small)
attempt("explore mode over GF(3)", small, small, strict=False)
