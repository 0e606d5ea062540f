"""Dilogarithm and Lobachevsky function."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

__all__ = ["dilog", "lobachevsky", "clausen2", "bloch_wigner"]

PI2_6 = math.pi ** 2 / 6


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> tuple[Fraction, ...]:
    """B_0..B_n with B_1 = -1/2."""
    b = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a = [Fraction(0)] * (m + 1)
        for j in range(m + 1):
            a[j] = Fraction(1, j + 1)
            for k in range(j, 0, -1):
                a[k - 1] = k * (a[k - 1] - a[k])
        b[m] = a[0]
    b[1] = Fraction(-1, 2)
    return tuple(b)


_NB = 40
# Li2(z) = sum_n B_n u^(n+1) / (n+1)!,  u = -log(1 - z)
_DILOG_BERN = tuple(float(bn / math.factorial(n + 1))
                    for n, bn in enumerate(_bernoulli(_NB)))
# Cl2(x) = x - x log|x| + sum_k |B_2k| x^(2k+1) / (2k (2k+1)!)
_CLAUSEN = tuple(float(abs(_bernoulli(2 * _NB)[2 * k]) / (2 * k * math.factorial(2 * k + 1)))
                 for k in range(1, _NB + 1))


def _series(z: complex) -> complex:
    # |z| <= 1/2: 2^-n convergence
    total = 0j
    term = z
    n = 1
    while True:
        add = term / (n * n)
        total += add
        if abs(add) <= 1e-17 * abs(total):
            return total
        n += 1
        term *= z


def _bernoulli_series(z: complex) -> complex:
    # |z| <= 1, Re z <= 1/2 keeps |u| well inside the radius 2*pi
    u = -cmath.log(1 - z)
    u2 = u * u
    total = u + _DILOG_BERN[1] * u2  # n = 0, 1; odd n > 1 vanish
    power = u
    for n in range(2, _NB + 1, 2):
        power *= u2
        add = _DILOG_BERN[n] * power
        total += add
        if abs(add) <= 1e-17 * abs(total):
            break
    return total


def dilog(w: complex) -> complex:
    """Principal branch of Li_2.

    Power series for ``|w| <= 1/2``; inversion maps ``|w| > 1`` into the
    disc, reflection maps ``Re w > 1/2`` to ``1 - w``, and the remaining
    band is summed as a Bernoulli series in ``-log(1 - w)``.  On the cut
    ``w > 1`` the value is the limit from below (``Im Li_2 = -pi log w``),
    matching ``d/dw Li_2(w) = -log(1 - w) / w`` with the principal log.
    """
    w = complex(w)
    if w == 0:
        return 0j
    if w == 1:
        return complex(PI2_6)
    r = abs(w)
    if r <= 0.5:
        return _series(w)
    if r > 1:
        if w.imag == 0 and w.real > 1:
            # limit from below of the inversion formula
            lw = cmath.log(-complex(w.real, -0.0))
        else:
            lw = cmath.log(-w)
        return -PI2_6 - 0.5 * lw * lw - dilog(1 / w)
    if w.real > 0.5:
        return PI2_6 - cmath.log(w) * cmath.log(1 - w) - dilog(1 - w)
    return _bernoulli_series(w)


def bloch_wigner(w: complex) -> float:
    """D(w) = Im Li_2(w) + arg(1 - w) log|w|."""
    w = complex(w)
    if w == 0 or w == 1:
        return 0.0
    return dilog(w).imag + cmath.phase(1 - w) * math.log(abs(w))


def clausen2(x: float) -> float:
    """Cl_2(x) = sum_{n>=1} sin(n x) / n^2."""
    x = math.remainder(float(x), 2 * math.pi)  # into [-pi, pi]
    if x == 0:
        return 0.0
    total = x - x * math.log(abs(x))
    x2 = x * x
    power = x
    for coeff in _CLAUSEN:
        power *= x2
        add = coeff * power
        total += add
        if abs(add) < 1e-18:
            break
    return total


def lobachevsky(theta: float) -> float:
    """Lambda(theta) = (1/2) sum_{n>=1} sin(2 n theta) / n^2.

    Evaluated through the term-wise integrated small-angle expansion of the
    sine series (Bernoulli coefficients), which converges geometrically on
    the reduced range ``|2 theta| <= pi``.
    """
    return 0.5 * clausen2(2.0 * theta)
