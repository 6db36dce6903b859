"""Hot numerical loops, each in a numba and a pure-numpy flavour.

The public dispatchers at the bottom pick the flavour from ``_backend``.
Both flavours implement the same arithmetic; results agree to rounding, not
bit-for-bit.

Collective state layout (9 complex numbers, ``rho_gg`` implied by the trace):
``ee, ss, aa, as, se, ae, gs, ga, eg`` with ``xy`` meaning ``<x|rho|y>``.
"""
import math

import numpy as np

from ._backend import njit, use_numba

IEE, ISS, IAA, IAS, ISE, IAE, IGS, IGA, IEG = range(9)

_JACOBI_MAX_SWEEPS = 50


# --------------------------------------------------------------------------
# product-basis master equation:  drho = -i (Heff rho - rho Heff^+) + sum_k c_k L_k rho R_k
# --------------------------------------------------------------------------


@njit
def _product_rhs_nb(rho, heff, heffd, jl, jr, jc, tmp, out):
    for i in range(4):
        for j in range(4):
            acc = 0.0j
            for k in range(4):
                acc += heff[i, k] * rho[k, j] - rho[i, k] * heffd[k, j]
            out[i, j] = -1.0j * acc
    for m in range(jc.shape[0]):
        c = jc[m]
        for i in range(4):
            for j in range(4):
                acc = 0.0j
                for k in range(4):
                    acc += jl[m, i, k] * rho[k, j]
                tmp[i, j] = acc
        for i in range(4):
            for j in range(4):
                acc = 0.0j
                for k in range(4):
                    acc += tmp[i, k] * jr[m, k, j]
                out[i, j] += c * acc


@njit
def _rk4_product_nb(rho0, heff, jl, jr, jc, dt, n_steps, store_steps):
    heffd = heff.conj().T.copy()
    rho = rho0.copy()
    k1 = np.empty((4, 4), dtype=np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    y = np.empty_like(k1)
    tmp = np.empty_like(k1)
    out = np.empty((store_steps.shape[0], 4, 4), dtype=np.complex128)
    nxt = 0
    if store_steps[0] == 0:
        out[0] = rho
        nxt = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        _product_rhs_nb(rho, heff, heffd, jl, jr, jc, tmp, k1)
        for i in range(4):
            for j in range(4):
                y[i, j] = rho[i, j] + half * k1[i, j]
        _product_rhs_nb(y, heff, heffd, jl, jr, jc, tmp, k2)
        for i in range(4):
            for j in range(4):
                y[i, j] = rho[i, j] + half * k2[i, j]
        _product_rhs_nb(y, heff, heffd, jl, jr, jc, tmp, k3)
        for i in range(4):
            for j in range(4):
                y[i, j] = rho[i, j] + dt * k3[i, j]
        _product_rhs_nb(y, heff, heffd, jl, jr, jc, tmp, k4)
        for i in range(4):
            for j in range(4):
                rho[i, j] += sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        if nxt < store_steps.shape[0] and store_steps[nxt] == step:
            out[nxt] = rho
            nxt += 1
    return out


def _rk4_product_np(rho0, heff, jl, jr, jc, dt, n_steps, store_steps):
    heffd = heff.conj().T
    weights = jc[:, None, None]

    def rhs(r):
        return -1j * (heff @ r - r @ heffd) + (weights * (jl @ r @ jr)).sum(axis=0)

    rho = rho0.copy()
    out = np.empty((len(store_steps), 4, 4), dtype=complex)
    nxt = 0
    if store_steps[0] == 0:
        out[0] = rho
        nxt = 1
    for step in range(1, n_steps + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if nxt < len(store_steps) and store_steps[nxt] == step:
            out[nxt] = rho
            nxt += 1
    return out


# --------------------------------------------------------------------------
# collective-basis equations of motion
# --------------------------------------------------------------------------


@njit
def _collective_rhs_nb(y, g, g12, w12, delta, w0, out):
    ee = y[IEE].real
    ss = y[ISS].real
    aa = y[IAA].real
    rho_as = y[IAS]
    se = y[ISE]
    ae = y[IAE]
    gs = y[IGS]
    ga = y[IGA]
    eg = y[IEG]
    flow = 1.0j * delta * (rho_as - np.conj(rho_as))
    out[IEE] = -2.0 * g * ee
    out[ISS] = (-(g + g12) * (ss - ee) + flow).real
    out[IAA] = (-(g - g12) * (aa - ee) - flow).real
    out[IAS] = -(g - 2.0j * w12) * rho_as + 1.0j * delta * (ss - aa)
    out[ISE] = -(0.5 * (3.0 * g + g12) - 1.0j * (w0 - w12)) * se + 1.0j * delta * ae
    out[IAE] = -(0.5 * (3.0 * g - g12) - 1.0j * (w0 + w12)) * ae + 1.0j * delta * se
    out[IGS] = -(0.5 * (g + g12) - 1.0j * (w0 + w12)) * gs + (g + g12) * se - 1.0j * delta * ga
    out[IGA] = -(0.5 * (g - g12) - 1.0j * (w0 - w12)) * ga - (g - g12) * ae - 1.0j * delta * gs
    out[IEG] = -(g + 2.0j * w0) * eg


@njit
def _rk4_collective_nb(y0, g, g12, w12, delta, w0, dt, n_steps, store_steps):
    y = y0.copy()
    k1 = np.empty(9, dtype=np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    z = np.empty_like(k1)
    out = np.empty((store_steps.shape[0], 9), dtype=np.complex128)
    nxt = 0
    if store_steps[0] == 0:
        out[0] = y
        nxt = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        _collective_rhs_nb(y, g, g12, w12, delta, w0, k1)
        for i in range(9):
            z[i] = y[i] + half * k1[i]
        _collective_rhs_nb(z, g, g12, w12, delta, w0, k2)
        for i in range(9):
            z[i] = y[i] + half * k2[i]
        _collective_rhs_nb(z, g, g12, w12, delta, w0, k3)
        for i in range(9):
            z[i] = y[i] + dt * k3[i]
        _collective_rhs_nb(z, g, g12, w12, delta, w0, k4)
        for i in range(9):
            y[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if nxt < store_steps.shape[0] and store_steps[nxt] == step:
            out[nxt] = y
            nxt += 1
    return out


def collective_rhs_np(y, g, g12, w12, delta, w0):
    """Vectorized collective right-hand side; `y` has shape (..., 9)."""
    y = np.asarray(y, dtype=complex)
    ee, ss, aa = y[..., IEE].real, y[..., ISS].real, y[..., IAA].real
    rho_as, se, ae, gs, ga, eg = (y[..., k] for k in (IAS, ISE, IAE, IGS, IGA, IEG))
    flow = 1j * delta * (rho_as - np.conj(rho_as))
    out = np.empty_like(y)
    out[..., IEE] = -2.0 * g * ee
    out[..., ISS] = (-(g + g12) * (ss - ee) + flow).real
    out[..., IAA] = (-(g - g12) * (aa - ee) - flow).real
    out[..., IAS] = -(g - 2j * w12) * rho_as + 1j * delta * (ss - aa)
    out[..., ISE] = -(0.5 * (3 * g + g12) - 1j * (w0 - w12)) * se + 1j * delta * ae
    out[..., IAE] = -(0.5 * (3 * g - g12) - 1j * (w0 + w12)) * ae + 1j * delta * se
    out[..., IGS] = -(0.5 * (g + g12) - 1j * (w0 + w12)) * gs + (g + g12) * se - 1j * delta * ga
    out[..., IGA] = -(0.5 * (g - g12) - 1j * (w0 - w12)) * ga - (g - g12) * ae - 1j * delta * gs
    out[..., IEG] = -(g + 2j * w0) * eg
    return out


def _rk4_collective_np(y0, g, g12, w12, delta, w0, dt, n_steps, store_steps):
    def rhs(v):
        return collective_rhs_np(v, g, g12, w12, delta, w0)

    y = y0.copy()
    out = np.empty((len(store_steps), 9), dtype=complex)
    nxt = 0
    if store_steps[0] == 0:
        out[0] = y
        nxt = 1
    for step in range(1, n_steps + 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if nxt < len(store_steps) and store_steps[nxt] == step:
            out[nxt] = y
            nxt += 1
    return out


# --------------------------------------------------------------------------
# cyclic Jacobi for small complex Hermitian matrices
# --------------------------------------------------------------------------


@njit
def _jacobi_eigh_nb(m):
    n = m.shape[0]
    a = m.astype(np.complex128).copy()
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(a[i, j]) ** 2
    thresh = (1e-17 * math.sqrt(scale)) ** 2
    for _sweep in range(_JACOBI_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # J = [[c, s*phase], [-s*conj(phase), c]] on (p, q); a <- J^H a J
                jpq = s * phase
                jqp = -s * np.conj(phase)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * c + akq * jqp
                    a[k, q] = akp * jpq + akq * c
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk + np.conj(jqp) * aqk
                    a[q, k] = np.conj(jpq) * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * c + vkq * jqp
                    v[k, q] = vkp * jpq + vkq * c
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w)
    return w[order], v[:, order]


def jacobi_eigh(m):
    """Cyclic Jacobi regardless of backend (compiled under numba, interpreted otherwise)."""
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if use_numba():
        return _jacobi_eigh_nb(m)
    return getattr(_jacobi_eigh_nb, "py_func", _jacobi_eigh_nb)(m)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def store_schedule(n_steps, stride):
    """Step indices that are kept: every `stride`-th step plus the last one."""
    steps = np.arange(0, n_steps + 1, stride, dtype=np.int64)
    if steps[-1] != n_steps:
        steps = np.append(steps, np.int64(n_steps))
    return steps


def rk4_product(rho0, heff, jl, jr, jc, dt, n_steps, store_steps):
    args = (
        np.ascontiguousarray(rho0, dtype=np.complex128),
        np.ascontiguousarray(heff, dtype=np.complex128),
        np.ascontiguousarray(jl, dtype=np.complex128),
        np.ascontiguousarray(jr, dtype=np.complex128),
        np.ascontiguousarray(jc, dtype=np.float64),
        float(dt),
        int(n_steps),
        np.ascontiguousarray(store_steps, dtype=np.int64),
    )
    if use_numba():
        return _rk4_product_nb(*args)
    # blow-ups are reported by the caller's invariant check
    with np.errstate(over="ignore", invalid="ignore"):
        return _rk4_product_np(*args)


def rk4_collective(y0, g, g12, w12, delta, w0, dt, n_steps, store_steps):
    args = (
        np.ascontiguousarray(y0, dtype=np.complex128),
        float(g), float(g12), float(w12), float(delta), float(w0),
        float(dt),
        int(n_steps),
        np.ascontiguousarray(store_steps, dtype=np.int64),
    )
    if use_numba():
        return _rk4_collective_nb(*args)
    with np.errstate(over="ignore", invalid="ignore"):
        return _rk4_collective_np(*args)


def eigh(m):
    """Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.

    numba backend: cyclic Jacobi. numpy backend: LAPACK ``zheevd`` through
    ``numpy.linalg.eigh``.
    """
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if use_numba():
        return _jacobi_eigh_nb(m)
    return np.linalg.eigh(m)
