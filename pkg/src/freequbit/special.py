r"""Modified Bessel functions :math:`K_0, K_1` and integer-order Bessel :math:`J_n`.

For :math:`x \le 2` the K functions use the ascending series

.. math::
    K_0(x) = -(\ln(x/2) + \gamma_E) I_0(x) + \sum_{k\ge1} H_k \frac{(x^2/4)^k}{(k!)^2}

and its order-one analogue. For :math:`x > 2` the series loses digits to
cancellation, so the Steed/Temme continued fraction for
:math:`K_1/K_0` is used together with the normalisation sum that yields
:math:`K_0` directly; this is the convergent form of the large-argument
expansion :math:`\sqrt{\pi/2x}\,e^{-x}\,(1 + \dots)`.

The integer-order :math:`J_n` ladder used for PINEM amplitudes is computed by
Miller's backward recurrence, or by two series terms when :math:`|x| < 10^{-6}`
(where one recurrence step would overflow).
"""

import math

import numpy as np

from ._accel import njit

_EULER_GAMMA = 0.57721566490153286061
_SERIES_MAX_X = 2.0
_EPS = 1e-17
_MAXIT = 10000


@njit
def _k01_series(x):
    t = 0.25 * x * x
    lg = math.log(0.5 * x)
    # term_k = t^k / (k!)^2 ; term1_k = t^k / (k! (k+1)!)
    term = 1.0
    term1 = 1.0
    harm = 0.0
    i0 = 1.0
    s0 = 0.0
    i1 = 0.5 * x
    s1 = -2.0 * _EULER_GAMMA + 1.0  # psi(1) + psi(2)
    k = 0
    while True:
        k += 1
        term *= t / (k * k)
        term1 *= t / (k * (k + 1))
        harm += 1.0 / k
        i0 += term
        s0 += harm * term
        i1 += 0.5 * x * term1
        dpsi = 2.0 * (harm - _EULER_GAMMA) + 1.0 / (k + 1)
        s1 += dpsi * term1
        if term < _EPS * i0 and term1 < _EPS:
            break
        if k > 200:
            break
    k0 = -(lg + _EULER_GAMMA) * i0 + s0
    k1 = 1.0 / x + lg * i1 - 0.25 * x * s1
    return k0, k1


@njit
def _k01_steed(x):
    # Continued fraction CF2 (Steed's algorithm, Temme normalisation), nu = 0.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


@njit
def k01(x):
    """Return ``(K0(x), K1(x))`` for ``x > 0``."""
    if x <= _SERIES_MAX_X:
        return _k01_series(x)
    return _k01_steed(x)


def bessel_k(order, x):
    """Modified Bessel function of the second kind, order 0 or 1.

    Parameters
    ----------
    order : int
        0 or 1.
    x : float
        Strictly positive argument. Values large enough that ``K`` is not
        representable underflow to 0.

    Raises
    ------
    ValueError
        If ``x <= 0`` or ``order`` is not 0 or 1.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order!r}")
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"K_{order}(x) diverges for x <= 0 (got x={x})")
    if x > 745.0:
        return 0.0
    return k01(x)[order]


def bessel_k_array(order, x):
    """Vectorised :func:`bessel_k`."""
    x = np.asarray(x, dtype=float)
    out = np.array([bessel_k(order, xi) for xi in x.ravel()])
    return out.reshape(x.shape)


def bessel_j_ladder(nmax, x):
    """Return ``J_n(x)`` for ``n = 0 .. nmax`` by backward recurrence.

    The recurrence ``J_{k-1} = (2k/x) J_k - J_{k+1}`` is started well above
    both ``nmax`` and ``x`` and normalised with ``J_0 + 2 sum J_{2k} = 1``.
    """
    nmax = int(nmax)
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    x = float(x)
    out = np.zeros(nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    sign = 1.0
    if x < 0.0:
        x = -x
        sign = -1.0
    if x < 1e-6:
        # one recurrence step would overflow; two series terms are exact here
        h = 0.5 * x
        term = 1.0
        for n in range(nmax + 1):
            out[n] = term * (1.0 - h * h / (n + 1))
            term *= h / (n + 1)
        if sign < 0.0:
            out[1::2] *= -1.0
        return out
    start = max(nmax, int(x)) + 20 + int(math.sqrt(40.0 * max(nmax, x, 1.0)))
    start += start % 2
    jp1 = 0.0
    j = 1e-300
    norm = 0.0
    for k in range(start, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        jp1, j = j, jm1
        # j now holds the (unnormalised) J_{k-1}
        if k - 1 <= nmax:
            out[k - 1] = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
        if abs(j) > 1e250:
            j *= 1e-250
            jp1 *= 1e-250
            out *= 1e-250
            norm *= 1e-250
    norm += j
    out /= norm
    if sign < 0.0:
        out[1::2] *= -1.0
    return out


def bessel_j(n, x):
    """Integer-order Bessel function ``J_n(x)`` (any sign of ``n``)."""
    n = int(n)
    val = bessel_j_ladder(abs(n), x)[abs(n)]
    if n < 0 and n % 2:
        val = -val
    return val
