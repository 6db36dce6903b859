"""Entanglement measures for two qubits.

Concurrence follows Wootters: with the spin-flipped state
``rho~ = (sy x sy) rho* (sy x sy)``, the square roots of the eigenvalues of
``rho rho~`` (taken as the eigenvalues of the Hermitian ``sqrt(rho) rho~ sqrt(rho)``)
give ``C = max(0, l1 - l2 - l3 - l4)``. Negativity is ``-2`` times the sum of
the negative eigenvalues of the partial transpose.

All general-purpose routines accept a ``DensityMatrix`` in either basis and
work in the product basis.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hilbert import BasisTag, DensityMatrix, PSD_SLACK, basis_change

__all__ = [
    "MeasureResult",
    "CriterionResult",
    "SIGMA_Y",
    "hermitian_eigenvalues",
    "spin_flip",
    "wootters_spectrum",
    "concurrence",
    "x_state_concurrence",
    "one_excited_concurrence",
    "partial_transpose",
    "negativity",
    "pt_spectrum",
    "pt_spectrum_one_excited",
    "one_excited_pt_criterion",
    "diagonal_criterion",
    "measures",
]

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Y.setflags(write=False)
_YY = np.kron(SIGMA_Y, SIGMA_Y)

HERMITIAN_INPUT_TOL = 1e-10
# Wootters eigenvalues below this are rounding noise and are set to zero
NOISE_CLAMP = 1e-12
# partial-transpose eigenvalues above -PT_NOISE count as non-negative
PT_NOISE = 1e-14
PATTERN_TOL = 1e-12
POPULATION_SUM_TOL = 1e-8

_X_MASK = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=bool
)


@dataclass(frozen=True)
class MeasureResult:
    concurrence: float
    negativity: float
    pt_spectrum: tuple  # ascending
    wootters_spectrum: tuple  # eigenvalues of rho rho~, descending


@dataclass(frozen=True)
class CriterionResult:
    entangled: bool
    margin: float

    def __bool__(self):
        return bool(self.entangled)


def hermitian_eigenvalues(m):
    """Ascending eigenvalues of a 4x4 Hermitian matrix.

    Uses the cyclic complex Jacobi method under the numba backend and LAPACK
    under the numpy backend; both are deterministic.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    defect = np.max(np.abs(m - m.conj().T))
    if defect > HERMITIAN_INPUT_TOL:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    w, _ = _kernels.eigh(0.5 * (m + m.conj().T))
    return np.asarray(w, dtype=float)


def _product_entries(rho):
    if not isinstance(rho, DensityMatrix):
        raise TypeError("expected a DensityMatrix")
    return basis_change(rho, BasisTag.PRODUCT).entries


def spin_flip(m):
    """``(sy x sy) m* (sy x sy)`` for a product-basis matrix."""
    return _YY @ np.conj(m) @ _YY


def _psd_sqrt(m):
    w, v = _kernels.eigh(m)
    if w[0] < -PSD_SLACK:
        raise ValueError(f"state is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def wootters_spectrum(rho):
    """Eigenvalues of ``rho rho~`` in descending order, noise clamped to zero."""
    p = _product_entries(rho)
    root = _psd_sqrt(p)
    r = root @ spin_flip(p) @ root
    lam = hermitian_eigenvalues(0.5 * (r + r.conj().T))[::-1]
    if lam[-1] < -PSD_SLACK:
        raise ValueError(f"negative Wootters eigenvalue {lam[-1]:.3e}; state is not physical")
    return np.where(lam < NOISE_CLAMP, 0.0, lam)


def _concurrence_from_spectrum(lam):
    s = np.sqrt(lam)
    return float(min(1.0, max(0.0, s[0] - s[1] - s[2] - s[3])))


def concurrence(rho):
    """Wootters concurrence of a two-qubit state, in [0, 1]."""
    return _concurrence_from_spectrum(wootters_spectrum(rho))


def x_state_concurrence(rho):
    """Closed-form concurrence for states with the product-basis X pattern.

    ``C = 2 max(0, |r23| - sqrt(r11 r44), |r14| - sqrt(r22 r33))`` (1-based).
    """
    p = _product_entries(rho)
    stray = np.max(np.abs(np.where(_X_MASK, 0.0, p)))
    if stray > PATTERN_TOL:
        raise ValueError(f"not an X state (off-pattern weight {stray:.3e})")
    d = np.clip(np.diag(p).real, 0.0, None)
    a = abs(p[1, 2]) - math.sqrt(d[0] * d[3])
    b = abs(p[0, 3]) - math.sqrt(d[1] * d[2])
    return float(2.0 * max(0.0, a, b))


def one_excited_concurrence(ss, aa, rho_as):
    """``sqrt((ss - aa)^2 + 4 (Im rho_as)^2)`` for states with no |e> weight
    and no coherence to |g>."""
    return np.sqrt((np.asarray(ss) - aa) ** 2 + 4.0 * np.imag(rho_as) ** 2)


def partial_transpose(rho, subsystem="atom2"):
    """Partial transpose over one atom of a product-basis matrix.

    `rho` may be a product-basis ``DensityMatrix`` or a raw 4x4 array (taken to
    be in the product basis). Returns a 4x4 array.
    """
    if isinstance(rho, DensityMatrix):
        if rho.basis is not BasisTag.PRODUCT:
            raise ValueError("partial_transpose needs a product-basis matrix; convert first")
        m = rho.entries
    else:
        m = np.asarray(rho, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    t = m.reshape(2, 2, 2, 2)  # (row atom1, row atom2, col atom1, col atom2)
    if subsystem == "atom2":
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == "atom1":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"subsystem must be 'atom1' or 'atom2', got {subsystem!r}")
    return t.reshape(4, 4).copy()


def pt_spectrum(rho, subsystem="atom2"):
    """Ascending eigenvalues of the partial transpose."""
    return hermitian_eigenvalues(partial_transpose(_product_density(rho), subsystem))


def _product_density(rho):
    return basis_change(rho, BasisTag.PRODUCT)


def _negativity_from_spectrum(mu):
    return float(min(1.0, max(0.0, -2.0 * np.sum(mu[mu < -PT_NOISE]))))


def negativity(rho, subsystem="atom2"):
    """``max(0, -2 sum of negative PT eigenvalues)``."""
    return _negativity_from_spectrum(pt_spectrum(rho, subsystem))


def _check_one_excited(ss, aa, rho_as, gg):
    for name, v in (("rho_ss", ss), ("rho_aa", aa), ("rho_gg", gg)):
        if v < -PATTERN_TOL:
            raise ValueError(f"{name} = {v} is negative")
    if abs(ss + aa + gg - 1.0) > POPULATION_SUM_TOL:
        raise ValueError(f"populations sum to {ss + aa + gg!r}, expected 1")
    if abs(rho_as) ** 2 > ss * aa + 1e-10:
        raise ValueError("|rho_as|^2 exceeds rho_ss rho_aa; not a valid state")


def pt_spectrum_one_excited(ss, aa, rho_as, gg):
    """Closed-form PT eigenvalues ``(mu1, mu2, mu+, mu-)`` of a one-excited state.

    The state has support on {|s>, |a>, |g>} with only the s-a coherence.
    ``mu1, mu2 = (ss + aa -/+ 2 Re rho_as)/2`` and
    ``mu+- = (gg +- sqrt(gg^2 + (ss - aa)^2 - (rho_as - rho_sa)^2))/2``.
    Since ``rho_as - rho_sa = 2i Im rho_as`` the radicand is
    ``gg^2 + (ss - aa)^2 + 4 (Im rho_as)^2``.
    """
    rho_as = complex(rho_as)
    _check_one_excited(ss, aa, rho_as, gg)
    mu1 = 0.5 * (ss + aa - 2.0 * rho_as.real)
    mu2 = 0.5 * (ss + aa + 2.0 * rho_as.real)
    diff = rho_as - rho_as.conjugate()
    root = math.sqrt(gg * gg + (ss - aa) ** 2 - (diff * diff).real)
    return np.array([mu1, mu2, 0.5 * (gg + root), 0.5 * (gg - root)])


def one_excited_pt_criterion(ss, aa, rho_as, gg):
    """Whether ``mu-`` is negative, with margin ``(ss - aa)^2 - (rho_as - rho_sa)^2``.

    The margin equals ``(ss - aa)^2 + 4 (Im rho_as)^2``: a one-excited state is
    entangled whenever the populations differ or the coherence has an
    imaginary part. (``gg = 0`` with a vanishing margin is the one boundary
    case where ``mu-`` is zero.)
    """
    rho_as = complex(rho_as)
    _check_one_excited(ss, aa, rho_as, gg)
    diff = rho_as - rho_as.conjugate()
    margin = (ss - aa) ** 2 - (diff * diff).real
    return CriterionResult(bool(margin > 0.0), float(margin))


def diagonal_criterion(ee, ss, aa, gg):
    """Entanglement test for a state diagonal in the collective basis.

    Entangled iff ``|ss - aa| > 2 sqrt(ee gg)``; the returned margin
    ``|ss - aa| - 2 sqrt(ee gg)`` equals the concurrence when positive.
    """
    pops = (ee, ss, aa, gg)
    for name, v in zip(("rho_ee", "rho_ss", "rho_aa", "rho_gg"), pops):
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"{name} = {v} is not a valid population")
    if abs(sum(pops) - 1.0) > POPULATION_SUM_TOL:
        raise ValueError(f"populations sum to {sum(pops)!r}, expected 1")
    margin = abs(ss - aa) - 2.0 * math.sqrt(ee * gg)
    return CriterionResult(bool(margin > 0.0), float(margin))


def measures(rho):
    """Concurrence, negativity and both spectra in one pass."""
    lam = wootters_spectrum(rho)
    mu = pt_spectrum(rho)
    return MeasureResult(
        concurrence=_concurrence_from_spectrum(lam),
        negativity=_negativity_from_spectrum(mu),
        pt_spectrum=tuple(float(x) for x in mu),
        wootters_spectrum=tuple(float(x) for x in lam),
    )
