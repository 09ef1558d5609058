"""Stable scalar special functions used by the propagation formulas.

Hermite and generalized Laguerre polynomials are evaluated through their
three-term recurrences.  Combinatorial factors that would overflow as plain
floats (2^m m!, (2l)! and friends) are carried as log magnitude plus an
explicit sign, and the Gaussian moment

    integral over the real line of  x**n * exp(-p*x**2 + 2*q*x) dx

is evaluated in a regrouped form that stays finite as q -> 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DivergentIntegralError, UnsupportedOrderError

MAX_POLY_ORDER = 64
MAX_BINOMIAL_N = 128

_LOG4 = math.log(4.0)

# Log-factorials up to the binomial cap, from exact integer factorials.
_LOG_FACTORIAL = [0.0] * (2 * MAX_BINOMIAL_N + 1)
for _i in range(2, len(_LOG_FACTORIAL)):
    _LOG_FACTORIAL[_i] = math.log(math.factorial(_i))


def log_factorial(n: int) -> float:
    """Natural log of n!, exact-integer based for the supported range."""
    if n < 0:
        raise ValueError(f"factorial of negative n={n}")
    return _LOG_FACTORIAL[n]


@dataclass(frozen=True)
class LogSignedValue:
    """A real number stored as sign and natural log of its magnitude.

    ``sign`` is 0 exactly when the represented value is zero, in which case
    ``log_magnitude`` carries no information.
    """

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")

    @classmethod
    def from_real(cls, x: float) -> "LogSignedValue":
        if x == 0.0:
            return cls(0.0, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def to_real(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogSignedValue") -> "LogSignedValue":
        if self.sign == 0 or other.sign == 0:
            return LogSignedValue(0.0, 0)
        return LogSignedValue(
            self.log_magnitude + other.log_magnitude, self.sign * other.sign
        )

    def __truediv__(self, other: "LogSignedValue") -> "LogSignedValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogSignedValue")
        if self.sign == 0:
            return LogSignedValue(0.0, 0)
        return LogSignedValue(
            self.log_magnitude - other.log_magnitude, self.sign * other.sign
        )


def hermite(order: int, x: float) -> float:
    """Physicists' Hermite polynomial H_order(x) by the three-term recurrence.

    H_0 = 1, H_1 = 2x, H_{i+1} = 2x H_i - 2i H_{i-1}.  Orders above
    ``MAX_POLY_ORDER`` are rejected to guard against float overflow.
    """
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    if order > MAX_POLY_ORDER:
        raise UnsupportedOrderError(
            f"Hermite order {order} above supported cap {MAX_POLY_ORDER}"
        )
    if order == 0:
        return 1.0
    h_prev, h_curr = 1.0, 2.0 * x
    for i in range(1, order):
        h_prev, h_curr = h_curr, 2.0 * x * h_curr - 2.0 * i * h_prev
    return h_curr


def binomial(n: int, k: int) -> LogSignedValue:
    """Binomial coefficient C(n, k) as a LogSignedValue (sign always +1).

    The log magnitude is taken from the exact integer coefficient, so
    conversion back to a float is correct to rounding.
    """
    if n < 0 or k < 0:
        raise ValueError(f"binomial needs nonnegative arguments, got ({n}, {k})")
    if k > n:
        raise ValueError(f"binomial requires k <= n, got k={k} > n={n}")
    if n > MAX_BINOMIAL_N:
        raise ValueError(f"binomial n={n} above supported cap {MAX_BINOMIAL_N}")
    c = math.comb(n, k)
    return LogSignedValue(0.0 if c == 1 else math.log(c), 1)


def laguerre(n: int, alpha: float, x: float) -> float:
    """Generalized Laguerre polynomial L_n^alpha(x) by recurrence.

    L_0 = 1, L_1 = 1 + alpha - x,
    (k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}.
    """
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if n > MAX_POLY_ORDER:
        raise UnsupportedOrderError(
            f"Laguerre order {n} above supported cap {MAX_POLY_ORDER}"
        )
    if n == 0:
        return 1.0
    l_prev, l_curr = 1.0, 1.0 + alpha - x
    for k in range(1, n):
        l_prev, l_curr = (
            l_curr,
            ((2.0 * k + 1.0 + alpha - x) * l_curr - (k + alpha) * l_prev) / (k + 1.0),
        )
    return l_curr


def gaussian_moment(n: int, p: float, q: complex) -> complex:
    """Closed form of the Gaussian moment integral x^n exp(-p x^2 + 2 q x).

    Equal to

        n! exp(q^2/p) sqrt(pi/p) * sum_j q^(n-2j) p^(j-n) 4^(-j) / ((n-2j)! j!)

    for j = 0 .. floor(n/2), which is the textbook result with the powers of
    q/p and p/(4 q^2) combined so that q = 0 needs no division: only the
    j = n/2 term survives there (even n), and odd moments vanish.
    """
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if n > MAX_POLY_ORDER:
        raise UnsupportedOrderError(
            f"moment order {n} above supported cap {MAX_POLY_ORDER}"
        )
    if p <= 0.0:
        raise DivergentIntegralError(
            f"Gaussian moment diverges for p={p}; p must be positive"
        )
    q = complex(q)
    log_p = math.log(p)

    if q == 0:
        if n % 2 == 1:
            return 0.0 + 0.0j
        j = n // 2
        log_mag = (
            log_factorial(n)
            - log_factorial(j)
            + (j - n) * log_p
            - j * _LOG4
            + 0.5 * (math.log(math.pi) - log_p)
        )
        return complex(math.exp(log_mag))

    r = abs(q)
    unit = q / r
    log_r = math.log(r)

    # Scaled sum: keep per-term log magnitudes, subtract the max, sum the
    # scaled complex terms, then restore the scale with the prefactors.
    logs = []
    phases = []
    for j in range(n // 2 + 1):
        logs.append(
            log_factorial(n)
            - log_factorial(n - 2 * j)
            - log_factorial(j)
            + (n - 2 * j) * log_r
            + (j - n) * log_p
            - j * _LOG4
        )
        phases.append(unit ** (n - 2 * j))
    top = max(logs)
    re = math.fsum(math.exp(lg - top) * ph.real for lg, ph in zip(logs, phases))
    im = math.fsum(math.exp(lg - top) * ph.imag for lg, ph in zip(logs, phases))

    prefactor = cmath.exp(q * q / p) * math.sqrt(math.pi / p)
    return prefactor * math.exp(top) * complex(re, im)
