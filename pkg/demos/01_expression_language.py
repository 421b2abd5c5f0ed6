"""
The analytic expression language
================================

Potentials and couplings enter the engine as strings in a tiny analytic
language: numbers, ``x``, ``+ - * / ^`` with integer powers, and the
functions ``exp``, ``tanh``, ``sin``, ``cos``.  Parsed expressions are
plain callables that accept scalars, numpy arrays and complex arguments,
and they differentiate symbolically — the same derivative code that the
turning-point Newton polish and the quantization solver rely on.
"""

import numpy as np

from predissoc import differentiate, parse_expression
from predissoc.errors import EvalDomainError, ExpressionError

# ---------------------------------------------------------------------------
# Parse once, evaluate anywhere: scalars, arrays, complex points
# ---------------------------------------------------------------------------
well = parse_expression("2 - 2*exp(-(x+2)^2)")
print("well(0)       =", well(0.0))
print("well(-2)      =", well(-2.0), "(the minimum)")

xs = np.linspace(-4.0, 0.0, 5)
print("well(grid)    =", np.round(well(xs), 6))

# complex arguments matter: the direct solver evaluates every potential on
# a deformed contour z = x + i theta f(x)
print("well(1+0.2j)  =", well(1.0 + 0.2j))

# ---------------------------------------------------------------------------
# Symbolic differentiation
# ---------------------------------------------------------------------------
dwell = differentiate(well)
print("\nd/dx [", well, "] =", dwell)
print("dwell(-2) =", dwell(-2.0), "(stationary at the bottom)")

# a central difference agrees to ~1e-10
d = 1e-5
fd = (well(0.5 + d) - well(0.5 - d)) / (2 * d)
print(f"dwell(0.5) = {dwell(0.5):.12f}   finite difference = {fd:.12f}")

# ---------------------------------------------------------------------------
# Errors are informative: position-tagged parse errors, domain errors
# ---------------------------------------------------------------------------
for bad in ("2 +", "x^1.5", "foo(x)"):
    try:
        parse_expression(bad)
    except ExpressionError as exc:
        print(f"parse {bad!r:10} -> {exc}")

try:
    parse_expression("1/x")(0.0)
except EvalDomainError as exc:
    print("eval 1/x at 0 ->", exc)
