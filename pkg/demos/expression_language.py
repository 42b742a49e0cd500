"""The scalar expression language used in problem files.

Run from the repository root:  python demos/expression_language.py
"""

import math

from hilferbvp import EvalError, ParseError, evaluate, parse, pretty

# Right-hand sides f(t, z) and growth bounds rho(t) are entered as strings;
# rational constants like 1/16 are ordinary division expressions, so values
# from the literature can be written exactly as printed.
rhs = parse("(1/16)*t*sin(abs(z))")
print("tree reprints as:", pretty(rhs))
print("f(1, pi/2) =", evaluate(rhs, 1.0, math.pi / 2))

# '^' is right-associative and unary minus binds tighter than its base.
print("2^3^2      =", evaluate(parse("2^3^2"), 0, 0))
print("-2^2       =", evaluate(parse("-2^2"), 0, 0))

# Parse errors carry the offset of the failure.
for bad in ("sin(", "1 + ", "frob(t)", ""):
    try:
        parse(bad)
    except ParseError as exc:
        print(f"parse({bad!r}) -> error at offset {exc.offset}: {exc}")

# Evaluation refuses to propagate NaN silently.
for source, t in (("log(t)", -1.0), ("1/t", 0.0), ("sqrt(t)", -4.0)):
    try:
        evaluate(parse(source), t, 0.0)
    except EvalError as exc:
        print(f"evaluate({source!r}, t={t}) -> {exc}")
