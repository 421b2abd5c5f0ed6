"""
Crossing models and hypothesis validation
=========================================

The engine works on a pair of analytic potential curves that cross
transversally at x = 0: channel 1 carries a well left of the crossing,
channel 2 falls off to the right (the dissociative exit).  Everything
downstream — turning points, action integrals, the width formula — assumes
this geometry, so the model object checks the crossing at construction
and a validator scores every geometric hypothesis over an energy window.
"""

import json

from predissoc import (
    EnergyWindow,
    PotentialSystem,
    crossing_data,
    validate_assumptions,
)
from predissoc.errors import CrossingMismatch

# ---------------------------------------------------------------------------
# The reference instance: a Gaussian well against a falling tanh tail
# ---------------------------------------------------------------------------
V1 = "2 - 2*exp(-(x+2)^2)"
V2 = "1.9633687222225316 - 1.2*tanh(x)"   # constant term equals v1(0)

sys_ = PotentialSystem.from_strings(V1, V2, r0="1", r1="0")
cd = crossing_data(sys_)
print("crossing value v1(0) = v2(0) =", cd.v1_at_0)
print("slopes at 0: v1' =", cd.dv1_at_0, "  v2' =", cd.dv2_at_0)
print("slope gap v1'(0) - v2'(0)    =", cd.slope_gap)

# construction refuses curves that do not actually cross at 0
try:
    PotentialSystem.from_strings(V1, "2.1 - 1.2*tanh(x)")
except CrossingMismatch as exc:
    print("\nmismatched pair ->", exc)

# ---------------------------------------------------------------------------
# Validate the working hypotheses over an energy window
# ---------------------------------------------------------------------------
window = EnergyWindow(e_ref=1.0, half_width=0.2, im_depth_coeff=5.0)
print(f"\nwindow: [{window.lo}, {window.hi}]")

report = validate_assumptions(sys_, window)
print("validation passed:", report.passed)
print("turning points at e_ref: a =", round(report.a0, 6),
      " b =", round(report.b0, 6), " c =", round(report.c0, 6))

# inequality clauses carry a margin: how far they are from failing
for name, ok in sorted(report.clauses.items()):
    margin = report.margins.get(name)
    tail = f"margin={margin:+.3e}" if margin is not None else ""
    print(f"  {name:22} {'ok' if ok else 'FAIL':4}  {tail}")

# the report serializes cleanly for pipelines
payload = json.dumps(report.as_dict(), indent=None, sort_keys=True)
print("\nas JSON:", payload[:90], "...")
