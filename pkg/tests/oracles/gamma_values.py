"""High-precision gamma-function reference values (frozen into tests).

Independent oracle for the library's gamma wrapper: mpmath at 50 digits,
printed to 20 significant digits. Run:

    python tests/oracles/gamma_values.py
"""

import mpmath

mpmath.mp.dps = 50

POINTS = [0.5, 1.1, 1.2, 1.3, 2.5, 0.75, 1.5, 3.7]

if __name__ == "__main__":
    for x in POINTS:
        val = mpmath.gamma(mpmath.mpf(str(x)))
        print(f"gamma({x}) = {mpmath.nstr(val, 20)}")
