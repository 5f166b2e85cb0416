"""Hot numeric kernels with numba and pure-numpy implementations.

Each public kernel dispatches on ``backend`` (``"numba"`` / ``"numpy"``);
the default follows :data:`freequbit._accel.USE_NUMBA`, i.e. the
``FREEQUBIT_DISABLE_NUMBA`` environment flag.
"""

import numpy as np

from . import _accel
from ._accel import njit


def _resolve(backend):
    if backend is None:
        return _accel.backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not _accel.USE_NUMBA:
        # numba disabled by flag: the jitted symbols are plain Python
        return "numba-interpreted"
    return backend


# --------------------------------------------------------------------------
# Ordered product of SU(2) steps  exp(-i (w s+ + w* s- + z s_z)),  basis (g, e)
# --------------------------------------------------------------------------


@njit
def _ordered_product_nb(w, kz):
    u00 = 1.0 + 0j
    u01 = 0j
    u10 = 0j
    u11 = 1.0 + 0j
    for k in range(w.shape[0]):
        wk = w[k]
        zk = kz[k]
        lam = np.sqrt(abs(wk) ** 2 + zk * zk)
        c = np.cos(lam)
        sc = np.sin(lam) / lam if lam > 0.0 else 1.0
        # step matrix cos(lam) - i sinc(lam) [[-z, w*], [w, z]]
        m00 = c + 1j * sc * zk
        m11 = c - 1j * sc * zk
        m01 = -1j * sc * wk.conjugate()
        m10 = -1j * sc * wk
        n00 = m00 * u00 + m01 * u10
        n01 = m00 * u01 + m01 * u11
        n10 = m10 * u00 + m11 * u10
        n11 = m10 * u01 + m11 * u11
        u00, u01, u10, u11 = n00, n01, n10, n11
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = u00
    out[0, 1] = u01
    out[1, 0] = u10
    out[1, 1] = u11
    return out


def _step_matrices(w, kz):
    lam = np.sqrt(np.abs(w) ** 2 + kz * kz)
    c = np.cos(lam)
    safe = np.where(lam > 0, lam, 1.0)
    sc = np.where(lam > 0, np.sin(lam) / safe, 1.0)
    m = np.empty((w.size, 2, 2), dtype=complex)
    m[:, 0, 0] = c + 1j * sc * kz
    m[:, 1, 1] = c - 1j * sc * kz
    m[:, 0, 1] = -1j * sc * np.conj(w)
    m[:, 1, 0] = -1j * sc * w
    return m


def _ordered_product_np(w, kz):
    m = _step_matrices(w, kz)
    if m.shape[0] == 0:
        return np.eye(2, dtype=complex)
    # pairwise tree reduction, later factors multiply from the left
    while m.shape[0] > 1:
        if m.shape[0] % 2:
            m = np.concatenate([m, np.eye(2, dtype=complex)[None]], axis=0)
        m = np.matmul(m[1::2], m[0::2])
    return m[0]


def ordered_product(w, kz=None, backend=None):
    """``prod_k exp(-i (w_k s+ + conj(w_k) s- + kz_k s_z))``, ``k = 0`` applied first.

    ``s_z = |e><e| - |g><g|``; ``kz`` defaults to zero.
    """
    w = np.ascontiguousarray(w, dtype=np.complex128)
    if kz is None:
        kz = np.zeros(w.shape[0])
    kz = np.ascontiguousarray(kz, dtype=np.float64)
    if kz.shape != w.shape:
        raise ValueError("w and kz must have the same length")
    if _resolve(backend) == "numpy":
        return _ordered_product_np(w, kz)
    return _ordered_product_nb(w, kz)


# --------------------------------------------------------------------------
# RK4 propagation of dU/ds = -i H(s) U, H = [[0, f*], [f, 0]]
# --------------------------------------------------------------------------


@njit
def _rk4_nb(f_nodes, f_mid, h):
    u = np.eye(2, dtype=np.complex128)
    for k in range(f_mid.shape[0]):
        fa = f_nodes[k]
        fm = f_mid[k]
        fb = f_nodes[k + 1]
        k1 = np.empty((2, 2), dtype=np.complex128)
        k2 = np.empty((2, 2), dtype=np.complex128)
        k3 = np.empty((2, 2), dtype=np.complex128)
        k4 = np.empty((2, 2), dtype=np.complex128)
        for j in range(2):
            k1[0, j] = -1j * fa.conjugate() * u[1, j]
            k1[1, j] = -1j * fa * u[0, j]
        for j in range(2):
            k2[0, j] = -1j * fm.conjugate() * (u[1, j] + 0.5 * h * k1[1, j])
            k2[1, j] = -1j * fm * (u[0, j] + 0.5 * h * k1[0, j])
        for j in range(2):
            k3[0, j] = -1j * fm.conjugate() * (u[1, j] + 0.5 * h * k2[1, j])
            k3[1, j] = -1j * fm * (u[0, j] + 0.5 * h * k2[0, j])
        for j in range(2):
            k4[0, j] = -1j * fb.conjugate() * (u[1, j] + h * k3[1, j])
            k4[1, j] = -1j * fb * (u[0, j] + h * k3[0, j])
        for i in range(2):
            for j in range(2):
                u[i, j] += h / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
    return u


def _rk4_np(f_nodes, f_mid, h):
    u = np.eye(2, dtype=complex)

    def rhs(f, x):
        return -1j * np.array([[0, np.conj(f)], [f, 0]]) @ x

    for k in range(f_mid.size):
        k1 = rhs(f_nodes[k], u)
        k2 = rhs(f_mid[k], u + 0.5 * h * k1)
        k3 = rhs(f_mid[k], u + 0.5 * h * k2)
        k4 = rhs(f_nodes[k + 1], u + h * k3)
        u = u + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def rk4_propagate(f_nodes, f_mid, h, backend=None):
    """RK4 propagator for a 2x2 off-diagonal Hamiltonian sampled on a uniform grid."""
    f_nodes = np.ascontiguousarray(f_nodes, dtype=np.complex128)
    f_mid = np.ascontiguousarray(f_mid, dtype=np.complex128)
    if f_nodes.size != f_mid.size + 1:
        raise ValueError("need one more node value than midpoint values")
    if _resolve(backend) == "numpy":
        return _rk4_np(f_nodes, f_mid, float(h))
    return _rk4_nb(f_nodes, f_mid, float(h))


# --------------------------------------------------------------------------
# Symmetric Dicke cascade  dp_m/dt = G_{m+1} p_{m+1} - G_m p_m
# (m = number of excitations, G_m = gamma m (N - m + 1))
# --------------------------------------------------------------------------


@njit
def _cascade_rhs_nb(p, rates, out):
    n = p.shape[0]
    for m in range(n):
        v = -rates[m] * p[m]
        if m + 1 < n:
            v += rates[m + 1] * p[m + 1]
        out[m] = v


@njit
def _dicke_rk4_nb(p0, rates, t_out, hmax):
    n = p0.shape[0]
    nt = t_out.shape[0]
    pops = np.empty((nt, n))
    emitted = np.empty(nt)
    p = p0.copy()
    w = 0.0
    t = 0.0
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    for j in range(nt):
        span = t_out[j] - t
        nsub = int(np.ceil(span / hmax)) if span > 0.0 else 0
        for _ in range(nsub):
            h = span / nsub
            i1 = 0.0
            _cascade_rhs_nb(p, rates, k1)
            for m in range(n):
                i1 += rates[m] * p[m]
                tmp[m] = p[m] + 0.5 * h * k1[m]
            i2 = 0.0
            _cascade_rhs_nb(tmp, rates, k2)
            for m in range(n):
                i2 += rates[m] * tmp[m]
                tmp[m] = p[m] + 0.5 * h * k2[m]
            i3 = 0.0
            _cascade_rhs_nb(tmp, rates, k3)
            for m in range(n):
                i3 += rates[m] * tmp[m]
                tmp[m] = p[m] + h * k3[m]
            i4 = 0.0
            _cascade_rhs_nb(tmp, rates, k4)
            for m in range(n):
                i4 += rates[m] * tmp[m]
            for m in range(n):
                p[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m])
            w += h / 6.0 * (i1 + 2.0 * i2 + 2.0 * i3 + i4)
        t = t_out[j]
        pops[j, :] = p
        emitted[j] = w
    return pops, emitted


def _dicke_rk4_np(p0, rates, t_out, hmax):
    def rhs(p):
        d = -rates * p
        d[:-1] += rates[1:] * p[1:]
        return d

    p = p0.copy()
    w = 0.0
    t = 0.0
    pops = np.empty((t_out.size, p0.size))
    emitted = np.empty(t_out.size)
    for j, tj in enumerate(t_out):
        span = tj - t
        nsub = int(np.ceil(span / hmax)) if span > 0 else 0
        for _ in range(nsub):
            h = span / nsub
            k1 = rhs(p)
            y2 = p + 0.5 * h * k1
            k2 = rhs(y2)
            y3 = p + 0.5 * h * k2
            k3 = rhs(y3)
            y4 = p + h * k3
            k4 = rhs(y4)
            w += h / 6.0 * (rates @ p + 2 * (rates @ y2) + 2 * (rates @ y3) + rates @ y4)
            p = p + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = tj
        pops[j] = p
        emitted[j] = w
    return pops, emitted


def dicke_rk4(p0, rates, t_out, hmax, backend=None):
    """Integrate the cascade from ``t = 0`` and sample at ``t_out``.

    Returns ``(populations, emitted)`` where ``emitted[j]`` is the integral of
    ``sum_m rates[m] p_m`` (energy radiated in quanta) up to ``t_out[j]``.
    """
    p0 = np.ascontiguousarray(p0, dtype=np.float64)
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    t_out = np.ascontiguousarray(t_out, dtype=np.float64)
    if _resolve(backend) == "numpy":
        return _dicke_rk4_np(p0, rates, t_out, float(hmax))
    return _dicke_rk4_nb(p0, rates, t_out, float(hmax))
