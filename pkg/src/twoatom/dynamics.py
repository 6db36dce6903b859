"""Time evolution of the two-atom density matrix.

Two independent engines integrate the same physics with a fixed-step RK4:

``product``
    The master equation in the product basis, built from the single-atom
    operators: free evolution ``omega_i S^z_i``, the coherent exchange
    ``omega12 (S+_1 S-_2 + S+_2 S-_1)`` and the dissipator with the decay-rate
    matrix ``[[gamma, gamma12], [gamma12, gamma]]``.

``collective``
    The nine coupled equations for the collective-basis elements
    ``ee, ss, aa, as, se, ae, gs, ga, eg`` (``rho_gg`` follows from the trace).

The atoms have ``omega_1 = omega0 - delta`` and ``omega_2 = omega0 + delta``.
The ``as`` element (``<a|rho|s>``) rotates as ``exp(+2i omega12 t)``: the
symmetric state sits ``2 omega12`` above the antisymmetric one.
"""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .couplings import CouplingParams, collective_damping, dipole_dipole_shift
from .hilbert import (
    BasisTag,
    DensityMatrix,
    PSD_SLACK,
    E, S, A, G,
    basis_change,
    to_collective_array,
    to_product_array,
)

__all__ = [
    "SystemParams",
    "Trajectory",
    "NumericalInvariantError",
    "ENGINES",
    "DEFAULT_DT",
    "LOWERING",
    "RAISING",
    "SZ",
    "product_liouvillian_rhs",
    "collective_rhs",
    "collective_vector",
    "collective_matrix",
    "integrate",
]

log = logging.getLogger(__name__)

ENGINES = ("product", "collective")
DEFAULT_DT = 1e-3

TRACE_RENORM_TOL = 1e-10
TRACE_ABORT_TOL = 1e-6

_sm = np.array([[0.0, 0.0], [1.0, 0.0]])  # |g><e| with single-atom order (e, g)
_sz = np.diag([0.5, -0.5])
_id = np.eye(2)

LOWERING = (np.kron(_sm, _id).astype(complex), np.kron(_id, _sm).astype(complex))
RAISING = tuple(op.conj().T.copy() for op in LOWERING)
SZ = (np.kron(_sz, _id).astype(complex), np.kron(_id, _sz).astype(complex))
for _op in (*LOWERING, *RAISING, *SZ):
    _op.setflags(write=False)


class NumericalInvariantError(RuntimeError):
    """Trace drift or loss of positivity during integration."""


@dataclass(frozen=True)
class SystemParams:
    """Rates and frequencies of the pair, all in units of gamma.

    ``gamma12 == gamma`` (the small-sample Dicke limit) is only accepted with
    ``dicke=True``; spatially separated atoms always have ``|gamma12| < gamma``.
    """

    gamma12: float
    omega12: float
    delta: float = 0.0
    omega0: float = 0.0
    gamma: float = 1.0
    dicke: bool = False

    def __post_init__(self):
        for name in ("gamma12", "omega12", "delta", "omega0", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if abs(self.gamma12) > self.gamma * (1 + 1e-12):
            raise ValueError(f"|gamma12| = {abs(self.gamma12)} exceeds gamma = {self.gamma}")
        if abs(self.gamma12) >= self.gamma and not self.dicke:
            raise ValueError("gamma12 = gamma is the Dicke limit; pass dicke=True to allow it")

    @classmethod
    def from_couplings(cls, couplings, delta=0.0, omega0=0.0):
        c = couplings
        return cls(c.gamma12, c.omega12, delta, omega0, dicke=abs(c.gamma12) >= 1.0)

    @classmethod
    def from_config(cls, cfg):
        """Couplings computed from the geometry of an ``AtomPairConfig``."""
        return cls(
            collective_damping(cfg),
            dipole_dipole_shift(cfg),
            cfg.delta,
            cfg.omega0,
            cfg.gamma,
        )

    @property
    def couplings(self):
        return CouplingParams(self.gamma12 / self.gamma, self.omega12 / self.gamma)

    @property
    def atom_frequencies(self):
        return self.omega0 - self.delta, self.omega0 + self.delta

    @property
    def decay_matrix(self):
        return np.array([[self.gamma, self.gamma12], [self.gamma12, self.gamma]])


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------


def _as_product_array(rho):
    if isinstance(rho, DensityMatrix):
        if rho.basis is not BasisTag.PRODUCT:
            raise ValueError("product_liouvillian_rhs needs a product-basis matrix; convert first")
        return rho.entries
    m = np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    return m


def product_liouvillian_rhs(rho, params):
    """d(rho)/dt of the product-basis master equation, term by term.

    `rho` is a product-basis ``DensityMatrix`` (or a raw 4x4 array, taken to be
    in the product basis). Returns a 4x4 complex array.
    """
    r = _as_product_array(rho)

    def comm(op):
        return op @ r - r @ op

    out = np.zeros((4, 4), dtype=complex)
    for w, sz in zip(params.atom_frequencies, SZ):
        out += -1j * w * comm(sz)
    for i in range(2):
        for j in range(2):
            if i != j:
                out += -1j * params.omega12 * comm(RAISING[i] @ LOWERING[j])
    gmat = params.decay_matrix
    for i in range(2):
        for j in range(2):
            pm = RAISING[i] @ LOWERING[j]
            out += -0.5 * gmat[i, j] * (r @ pm + pm @ r - 2.0 * LOWERING[j] @ r @ RAISING[i])
    return out


def _product_generator(params):
    """Effective Hamiltonian and jump terms used by the product-engine kernel."""
    gmat = params.decay_matrix
    h = sum(w * sz for w, sz in zip(params.atom_frequencies, SZ))
    h = h + params.omega12 * (RAISING[0] @ LOWERING[1] + RAISING[1] @ LOWERING[0])
    k = sum(gmat[i, j] * RAISING[i] @ LOWERING[j] for i in range(2) for j in range(2))
    heff = h - 0.5j * k
    pairs = [(i, j) for i in range(2) for j in range(2) if gmat[i, j] != 0.0]
    jl = np.array([LOWERING[j] for i, j in pairs])
    jr = np.array([RAISING[i] for i, j in pairs])
    jc = np.array([gmat[i, j] for i, j in pairs])
    return heff, jl, jr, jc


def collective_vector(rho):
    """Collective-basis element vector (ee, ss, aa, as, se, ae, gs, ga, eg)."""
    if isinstance(rho, DensityMatrix):
        m = basis_change(rho, BasisTag.COLLECTIVE).entries
    else:
        m = np.asarray(rho, dtype=complex)
    return np.array(
        [
            m[E, E].real, m[S, S].real, m[A, A].real,
            m[A, S], m[S, E], m[A, E], m[G, S], m[G, A], m[E, G],
        ],
        dtype=complex,
    )


def collective_matrix(y):
    """Inverse of ``collective_vector``; works on a stack of shape (..., 9)."""
    y = np.asarray(y, dtype=complex)
    m = np.zeros(y.shape[:-1] + (4, 4), dtype=complex)
    ee, ss, aa = y[..., 0].real, y[..., 1].real, y[..., 2].real
    m[..., E, E] = ee
    m[..., S, S] = ss
    m[..., A, A] = aa
    m[..., G, G] = 1.0 - ee - ss - aa
    for (x, z), k in (((A, S), 3), ((S, E), 4), ((A, E), 5), ((G, S), 6), ((G, A), 7), ((E, G), 8)):
        m[..., x, z] = y[..., k]
        m[..., z, x] = np.conj(y[..., k])
    return m


def collective_rhs(state, params):
    """Derivative of the collective element vector.

    `state` holds ``(ee, ss, aa, as, se, ae, gs, ga, eg)``; populations are
    real and ``gg`` is implied by the unit trace.
    """
    p = params
    return _kernels.collective_rhs_np(state, p.gamma, p.gamma12, p.omega12, p.delta, p.omega0)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------


@dataclass
class Trajectory:
    """Stored states of one integration.

    ``rho`` has shape ``(n, 4, 4)`` and is expressed in ``basis``; ``derived``
    holds per-time observables once the scenario layer fills it.
    """

    times: np.ndarray
    rho: np.ndarray
    basis: BasisTag
    params: SystemParams
    engine: str
    derived: dict = field(default_factory=dict)
    max_trace_drift: float = 0.0  # before any renormalization

    def __len__(self):
        return len(self.times)

    def state(self, i):
        return DensityMatrix(self.rho[i], self.basis)

    @property
    def states(self):
        return [self.state(i) for i in range(len(self))]

    def in_basis(self, target):
        target = BasisTag.parse(target)
        if target is self.basis:
            return self
        conv = to_collective_array if target is BasisTag.COLLECTIVE else to_product_array
        return replace(self, rho=conv(self.rho), basis=target, derived=dict(self.derived))

    def collective(self):
        return self.in_basis(BasisTag.COLLECTIVE).rho

    def product(self):
        return self.in_basis(BasisTag.PRODUCT).rho


def _check_states(rho, engine):
    """Apply the trace/positivity contract to a stack of stored states (in place).

    Returns the largest trace drift seen before renormalization.
    """
    finite = np.all(np.isfinite(rho), axis=(1, 2))
    if not finite.all():
        raise NumericalInvariantError(
            f"{engine} engine: non-finite state at stored step {int(np.argmin(finite))}; "
            "the step size is likely beyond the stability limit"
        )
    tr = np.trace(rho, axis1=1, axis2=2).real
    drift = np.abs(tr - 1.0)
    worst = int(np.argmax(drift))
    if drift[worst] > TRACE_ABORT_TOL:
        raise NumericalInvariantError(
            f"{engine} engine: trace drifted by {drift[worst]:.3e} at stored step {worst}"
        )
    fix = drift > TRACE_RENORM_TOL
    if np.any(fix):
        log.warning(
            "%s engine: renormalized %d stored states (max trace drift %.3e)",
            engine, int(fix.sum()), drift[worst],
        )
        rho[fix] /= tr[fix][:, None, None]
    lam_min = np.linalg.eigvalsh(rho)[:, 0]
    bad = int(np.argmin(lam_min))
    if lam_min[bad] < -PSD_SLACK:
        raise NumericalInvariantError(
            f"{engine} engine: negative eigenvalue {lam_min[bad]:.3e} at stored step {bad}"
        )
    return float(drift[worst])


def _step_count(t_end, dt):
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end >= 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    n = int(round(t_end / dt))
    if abs(n * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"t_end = {t_end} is not a whole number of steps of dt = {dt}")
    return n


def integrate(rho0, params, t_end, dt=DEFAULT_DT, engine="collective", stride=1, basis=None):
    """Integrate from `rho0` up to time `t_end` with fixed-step RK4.

    Parameters
    ----------
    rho0 : DensityMatrix
        Initial state, in either basis.
    params : SystemParams
    t_end, dt : float
        Final time and step, in units of 1/gamma. `t_end` must be a whole
        number of steps.
    engine : {"collective", "product"}
    stride : int
        Keep every `stride`-th step (the final step is always kept).
    basis : BasisTag or str, optional
        Basis of the returned states; defaults to the basis of `rho0`.

    Raises
    ------
    NumericalInvariantError
        If a stored state drifts in trace by more than 1e-6 or acquires an
        eigenvalue below -1e-8.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if int(stride) < 1:
        raise ValueError("stride must be a positive integer")
    basis = rho0.basis if basis is None else BasisTag.parse(basis)
    n_steps = _step_count(t_end, dt)
    steps = _kernels.store_schedule(n_steps, int(stride))
    times = steps * dt

    if engine == "product":
        heff, jl, jr, jc = _product_generator(params)
        rho = _kernels.rk4_product(rho0.product(), heff, jl, jr, jc, dt, n_steps, steps)
        if basis is BasisTag.COLLECTIVE:
            rho = to_collective_array(rho)
    else:
        p = params
        ys = _kernels.rk4_collective(
            collective_vector(rho0), p.gamma, p.gamma12, p.omega12, p.delta, p.omega0,
            dt, n_steps, steps,
        )
        rho = collective_matrix(ys)
        if basis is BasisTag.PRODUCT:
            rho = to_product_array(rho)

    drift = _check_states(rho, engine)
    return Trajectory(times, rho, basis, params, engine, max_trace_drift=drift)
