"""Brute-force every linear operator on 2x2 symmetric matrices over GF(5),
then look at the skew-symmetric side.

Run with ``python3 demos/03_classify_and_skew.py``.
"""

import random

from detpres import LinearOperator, Space, congruence, decompose_pair_skew, det, make_field, sampled
from detpres.harness import classify_linear_preservers, run_suite
from detpres.harness.suites import random_unimodular_congruence
from detpres.maps import AnalyticMap, CanonicalCongruence

F5 = make_field("prime", 5)

# %% all 5^9 operators on packed coordinates; survivors must be x -> beta u x u^T
report = classify_linear_preservers("sym", 2, F5)
print("classification:", report.extra)

# %% odd skew matrices are always singular, so every map preserves det there
print("odd skew singular:", run_suite("odd_skew_singular", {"n": 3, "p": 5}).passed)

# %% even n: x -> p x p^T with det(p) = +-1 is recovered as a packed operator
F17 = make_field("prime", 17)
sp = Space("skew", 4)
pm = random_unimodular_congruence(F17, 4, random.Random(3))
t = AnalyticMap(CanonicalCongruence(F17(1), pm, sp.zero(F17)))
out = decompose_pair_skew(t, t, verification=sampled(5000, 0))
print("det(p) =", det(pm))
print("operator matches direct packing:",
      out.operator == LinearOperator.from_function(sp, F17, lambda x: congruence(pm, x)))
