"""Integer-order Bessel functions of the first kind and their positive zeros.

J_n(x) is evaluated with Miller's downward recurrence normalised by
J_0 + 2 sum_k J_{2k} = 1, and by the ascending series for small |x|.
"""
from __future__ import annotations

import math

MAX_ORDER = 64
MAX_ARG = 1e4
MAX_ZERO_ORDER = 16
MAX_ZERO_INDEX = 16

_SERIES_LIMIT = 1.0
_RESCALE = 1e250


def _series(n: int, x: float) -> float:
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term
    q = -half * half
    k = 0
    while abs(term) > 1e-17 * abs(total) or k < 2:
        k += 1
        term *= q / (k * (k + n))
        total += term
        if term == 0.0:
            break
    return total


def _miller(n: int, x: float) -> float:
    # start index well above both n and x so the seeded error decays below 1e-15
    top = max(n, int(x)) + 40 + int(math.sqrt(80.0 * max(n, x, 1.0)))
    top += top % 2
    tox = 2.0 / x
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    result = 0.0
    for k in range(top, 0, -1):
        j_prev = k * tox * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds the unnormalised J_{k-1}
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            result /= _RESCALE
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if k - 1 == n:
            result = j_cur
    norm += j_cur  # J_0 term
    return result / norm


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for integer |n| <= 64 and real |x| <= 1e4."""
    if int(n) != n:
        raise ValueError(f"order must be an integer, got {n!r}")
    n = int(n)
    x = float(x)
    if abs(n) > MAX_ORDER:
        raise ValueError(f"order {n} outside |n| <= {MAX_ORDER}")
    if not abs(x) <= MAX_ARG:
        raise ValueError(f"argument {x} outside |x| <= {MAX_ARG:g}")
    sign = 1.0
    if n < 0:
        n = -n
        sign = -1.0 if n % 2 else 1.0
    if x < 0:
        x = -x
        if n % 2:
            sign = -sign
    if x == 0.0:
        return sign * (1.0 if n == 0 else 0.0)
    if x < _SERIES_LIMIT:
        return sign * _series(n, x)
    return sign * _miller(n, x)


def bessel_j_prime(n: int, x: float) -> float:
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))


def bessel_zero(n: int, s: int) -> float:
    """s-th positive zero of J_n, accurate to about 1e-12."""
    if int(n) != n or not 0 <= n <= MAX_ZERO_ORDER:
        raise ValueError(f"order must be an integer in 0..{MAX_ZERO_ORDER}, got {n!r}")
    if int(s) != s or not 1 <= s <= MAX_ZERO_INDEX:
        raise ValueError(f"zero index must be an integer in 1..{MAX_ZERO_INDEX}, got {s!r}")
    n, s = int(n), int(s)

    # Zeros of J_n are spaced by more than 2.4, and the first lies above n.
    step = 0.5
    a = max(float(n), step)
    fa = bessel_j(n, a)
    found = 0
    while True:
        b = a + step
        fb = bessel_j(n, b)
        if fa == 0.0:
            found += 1
            if found == s:
                return a
        elif fa * fb < 0:
            found += 1
            if found == s:
                break
        a, fa = b, fb

    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = bessel_j(n, mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
        if b - a < 1e-6:
            break
    x = 0.5 * (a + b)
    for _ in range(20):
        dx = bessel_j(n, x) / bessel_j_prime(n, x)
        x -= dx
        if abs(dx) < 1e-15 * x:
            break
    return x
