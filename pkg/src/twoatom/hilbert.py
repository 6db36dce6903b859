"""Two-qubit states in the product and collective bases.

Basis orderings are fixed and part of the public contract:

* product:    |e1 e2>, |e1 g2>, |g1 e2>, |g1 g2>
* collective: |e>, |s>, |a>, |g>

with |s> = (|e1 g2> + |g1 e2>)/sqrt(2) and |a> = (|e1 g2> - |g1 e2>)/sqrt(2).
Matrix elements are ``rho[x, y] = <x|rho|y>``.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BasisTag",
    "DensityMatrix",
    "MixingCoefficients",
    "COLLECTIVE_FROM_PRODUCT",
    "E", "S", "A", "G",
    "basis_change",
    "pure_state_density",
    "nonidentical_mixing",
    "total_spin_squared",
    "to_collective_array",
    "to_product_array",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_SLACK = 1e-8
NULL_NORM = 1e-6

# collective-basis indices
E, S, A, G = 0, 1, 2, 3

_R = 1.0 / math.sqrt(2.0)
# columns are |e>, |s>, |a>, |g> written in the product basis; real, symmetric
# and its own inverse
COLLECTIVE_FROM_PRODUCT = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, _R, _R, 0.0],
        [0.0, _R, -_R, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)
COLLECTIVE_FROM_PRODUCT.setflags(write=False)


class BasisTag(enum.Enum):
    PRODUCT = "product"
    COLLECTIVE = "collective"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown basis {value!r}; expected 'product' or 'collective'") from None


def to_collective_array(m):
    """Product-basis matrix (or stack of matrices) -> collective basis."""
    u = COLLECTIVE_FROM_PRODUCT
    return u @ m @ u


def to_product_array(m):
    u = COLLECTIVE_FROM_PRODUCT
    return u @ m @ u


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """4x4 two-qubit density matrix tagged with its basis.

    Construction checks Hermiticity, unit trace and positivity (with slack
    ``PSD_SLACK`` on the smallest eigenvalue). The entries array is stored
    read-only.
    """

    entries: np.ndarray
    basis: BasisTag = BasisTag.PRODUCT

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix has non-finite entries")
        herm = np.max(np.abs(m - m.conj().T))
        if herm >= HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian (defect {herm:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) >= TRACE_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < -PSD_SLACK:
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {lam_min:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "basis", BasisTag.parse(self.basis))

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.basis is other.basis and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def to(self, target):
        return basis_change(self, target)

    def product(self):
        return basis_change(self, BasisTag.PRODUCT).entries

    def collective(self):
        return basis_change(self, BasisTag.COLLECTIVE).entries

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)

    def allclose(self, other, atol=1e-12):
        return np.allclose(self.entries, other.to(self.basis).entries, rtol=0.0, atol=atol)

    # --- plain-text form -------------------------------------------------

    def to_text(self):
        """Serialize as a ``basis: <tag>`` header plus 4 rows of ``a+bi`` entries."""
        lines = [f"basis: {self.basis.value}"]
        for row in self.entries:
            lines.append(" ".join(_format_complex(z) for z in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        rows = [ln for ln in rows if ln]
        if not rows or not rows[0].lower().startswith("basis:"):
            raise ValueError("density matrix text must start with a 'basis: <tag>' line")
        basis = BasisTag.parse(rows[0].split(":", 1)[1])
        body = rows[1:]
        if len(body) != 4:
            raise ValueError(f"expected 4 matrix rows, got {len(body)}")
        m = np.empty((4, 4), dtype=complex)
        for i, line in enumerate(body):
            tokens = line.split()
            if len(tokens) != 4:
                raise ValueError(f"row {i + 1}: expected 4 entries, got {len(tokens)}")
            for j, tok in enumerate(tokens):
                m[i, j] = parse_complex(tok)
        return cls(m, basis)


def _format_complex(z):
    re_, im_ = float(z.real) + 0.0, float(z.imag) + 0.0  # drop negative zeros
    return f"{re_!r}{'+' if im_ >= 0 else '-'}{abs(im_)!r}i"


def parse_complex(token):
    """Parse ``a+bi`` / ``a-bi`` / ``a`` / ``bi`` (``j`` also accepted)."""
    tok = token.strip()
    try:
        z = complex(tok.replace("i", "j"))
    except ValueError:
        raise ValueError(f"malformed complex entry {token!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex entry {token!r}")
    return z


def basis_change(rho, target):
    """Express `rho` in the `target` basis (identity if already there)."""
    target = BasisTag.parse(target)
    if rho.basis is target:
        return rho
    m = to_collective_array(rho.entries) if target is BasisTag.COLLECTIVE else to_product_array(rho.entries)
    # exact Hermitian symmetrization only removes rounding in the last bit
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m, target)


def pure_state_density(amplitudes, basis=BasisTag.PRODUCT):
    """Projector onto the state with the given four amplitudes.

    The norm must be within 1e-6 of one; the residual is normalized away.
    Near-null vectors are rejected rather than rescaled.
    """
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got {psi.size}")
    norm = np.linalg.norm(psi)
    if norm < NULL_NORM:
        raise ValueError("amplitude vector is (near) zero")
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"amplitude vector has norm {norm:.9g}; normalize it first")
    psi = psi / norm
    return DensityMatrix(np.outer(psi, psi.conj()), basis)


@dataclass(frozen=True)
class MixingCoefficients:
    """Mixing of |s> and |a> into the eigenstates of a detuned pair."""

    alpha: float
    beta: float
    d: float

    def states(self):
        """Return (|s'>, |a'>) as collective-basis vectors."""
        a, b = self.alpha, self.beta
        s_prime = np.array([0.0, a + b, b - a, 0.0]) * _R
        a_prime = np.array([0.0, a - b, a + b, 0.0]) * _R
        return s_prime, a_prime


def nonidentical_mixing(delta, omega12):
    """Mixing coefficients (alpha, beta, d) for detuning `delta` and shift `omega12`.

    ``d = delta + sqrt(omega12**2 + delta**2)``,
    ``alpha = d / sqrt(d**2 + omega12**2)``, ``beta = omega12 / sqrt(d**2 + omega12**2)``.
    """
    d = delta + math.hypot(omega12, delta)
    norm = math.hypot(d, omega12)
    if norm == 0.0:
        raise ValueError("mixing is undefined for delta <= 0 with omega12 = 0")
    return MixingCoefficients(d / norm, omega12 / norm, d)


def total_spin_squared(rho):
    """Expectation of the total spin squared, ``2 - 2 rho_aa``."""
    return 2.0 - 2.0 * basis_change(rho, BasisTag.COLLECTIVE).entries[A, A].real
