"""Closed-form solutions for identical atoms (delta = 0).

These serve as oracles for the numerical engines. All rates are in units of
``params.gamma``; times are plain times in the same units.
"""
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import BasisTag, DensityMatrix, E, S, A, G, basis_change

__all__ = [
    "DiagonalDecomposition",
    "one_excited_solution",
    "one_excited_elements",
    "diagonal_decomposition",
    "both_excited_populations",
    "both_excited_populations_dicke",
]

ZERO_PATTERN_TOL = 1e-12


def _require_identical(params):
    if params.delta != 0.0:
        raise ValueError("closed forms exist only for identical atoms (delta = 0)")


def one_excited_elements(t, params):
    """``(ss, aa, as, gg)`` for the pair started in |e1 g2>.

    ``as`` is ``<a|rho|s>``; it rotates at ``+2 omega12`` because the symmetric
    state lies ``2 omega12`` above the antisymmetric one.
    """
    _require_identical(params)
    g, g12, w12 = params.gamma, params.gamma12, params.omega12
    t = np.asarray(t, dtype=float)
    ss = 0.5 * np.exp(-(g + g12) * t)
    aa = 0.5 * np.exp(-(g - g12) * t)
    as_ = 0.5 * np.exp(-(g - 2j * w12) * t)
    gg = 1.0 - np.exp(-g * t) * np.cosh(g12 * t)
    return ss, aa, as_, gg


def one_excited_solution(t, params):
    """Collective-basis density matrix at time `t` for the initial state |e1 g2>."""
    ss, aa, as_, gg = (complex(v) for v in one_excited_elements(float(t), params))
    m = np.zeros((4, 4), dtype=complex)
    m[S, S], m[A, A], m[G, G] = ss.real, aa.real, gg.real
    m[A, S] = as_
    m[S, A] = as_.conjugate()
    return DensityMatrix(m, BasisTag.COLLECTIVE)


@dataclass(frozen=True)
class DiagonalDecomposition:
    """Spectral form ``rho = sum_i P_i |Psi_i><Psi_i|`` of a one-excited state.

    ``states`` is a 4x4 array whose rows are the collective-basis vectors
    Psi_1..Psi_4; ``populations`` holds P_1..P_4. Psi_3 is |g> and Psi_4 is |e>.
    """

    states: np.ndarray
    populations: np.ndarray

    def reconstruct(self):
        m = np.einsum("i,ij,ik->jk", self.populations, self.states, self.states.conj())
        return DensityMatrix(0.5 * (m + m.conj().T), BasisTag.COLLECTIVE)

    @property
    def entangled_component(self):
        """``(P_1, Psi_1)``: the populated superposition of |s> and |a>."""
        return self.populations[0], self.states[0]


def diagonal_decomposition(rho):
    """Rediagonalize a state living on the {|s>, |a>, |g>} block.

    The s-a block is diagonalized in closed form. When ``|rho_as|^2 = ss aa``
    (pure decay from a one-excited product state) the second population
    vanishes and ``Psi_1 = (e^{i phi} sqrt(ss)|s> + sqrt(aa)|a>)/sqrt(ss + aa)``
    with ``phi = -arg(rho_as)``, i.e. the coherence phase sits on |s>.
    """
    m = basis_change(rho, BasisTag.COLLECTIVE).entries
    allowed = np.zeros((4, 4), dtype=bool)
    for i in (S, A):
        for j in (S, A):
            allowed[i, j] = True
    allowed[G, G] = True
    stray = np.max(np.abs(np.where(allowed, 0.0, m)))
    if stray > ZERO_PATTERN_TOL:
        raise ValueError(
            f"state has weight {stray:.3e} outside the s/a coherence block and |g><g|"
        )

    ss, aa, gg = m[S, S].real, m[A, A].real, m[G, G].real
    c = m[A, S]  # <a|rho|s>
    half_sum = 0.5 * (ss + aa)
    radius = math.hypot(0.5 * (ss - aa), abs(c))
    p1, p2 = half_sum + radius, max(half_sum - radius, 0.0)

    psi = np.zeros((4, 4), dtype=complex)
    if radius == 0.0:
        psi[0, S] = 1.0
        psi[1, A] = 1.0
    else:
        # eigenvector of [[ss, conj(c)], [c, aa]] (rows/cols s, a) for p1;
        # pick the numerically larger of the two equivalent forms
        v_a = np.array([np.conj(c), p1 - ss])
        v_b = np.array([p1 - aa, c])
        v = v_a if np.linalg.norm(v_a) >= np.linalg.norm(v_b) else v_b
        v = v / np.linalg.norm(v)
        # fix the global phase so the |a> amplitude is real and non-negative
        if abs(v[1]) > 0.0:
            v = v * (abs(v[1]) / v[1])
        psi[0, S], psi[0, A] = v
        psi[1, S], psi[1, A] = -np.conj(v[1]), np.conj(v[0])
    psi[2, G] = 1.0
    psi[3, E] = 1.0
    pops = np.array([p1, p2, gg, 0.0])
    return DiagonalDecomposition(psi, pops)


def _check_both_excited(params):
    _require_identical(params)
    if params.gamma12 >= params.gamma:
        raise ValueError(
            "gamma12 = gamma is the Dicke limit where the prefactors diverge; "
            "use both_excited_populations_dicke"
        )


def both_excited_populations(t, params):
    """``(ee, ss, aa, gg)`` for the pair started in |e1 e2>.

    Written with ``expm1`` so the bracketed differences of exponentials keep
    full relative precision as ``gamma12 -> gamma`` and at short times; the
    result tends continuously to ``both_excited_populations_dicke``.
    """
    _check_both_excited(params)
    g, g12 = params.gamma, params.gamma12
    t = np.asarray(t, dtype=float)
    gp, gm = g + g12, g - g12
    ee = np.exp(-2.0 * g * t)
    # (gp/gm)[e^{-gp t} - e^{-2g t}] = gp e^{-gp t} (1 - e^{-gm t}) / gm
    ss = -gp * np.exp(-gp * t) * np.expm1(-gm * t) / gm
    # (gm/gp)[e^{-gm t} - e^{-2g t}] = gm e^{-gm t} (1 - e^{-gp t}) / gp
    aa = -gm * np.exp(-gm * t) * np.expm1(-gp * t) / gp
    gg = 1.0 - ee - ss - aa
    return ee, ss, aa, gg


def both_excited_populations_dicke(t, params):
    """Dicke-limit (``gamma12 = gamma``) populations for the pair started in |e1 e2>.

    The antisymmetric state is never populated and ``ss = 2 gamma t e^{-2 gamma t}``.
    """
    _require_identical(params)
    g = params.gamma
    t = np.asarray(t, dtype=float)
    ee = np.exp(-2.0 * g * t)
    ss = 2.0 * g * t * ee
    aa = np.zeros_like(t)
    return ee, ss, aa, 1.0 - ee - ss
