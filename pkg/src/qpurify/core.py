"""Qubit linear algebra: density matrices, pure states, Bloch vectors.

Everything here works on 2x2 Hermitian matrices with closed-form spectral
formulas, so there is no call into a general eigensolver on the hot path.

Bloch coordinates follow the layout

    rho = 1/2 [[1 + a1,      a3 - i a2],
               [a3 + i a2,   1 - a1   ]]

i.e. ``a1`` multiplies sigma_z, ``a2`` sigma_y and ``a3`` sigma_x.  Use
:meth:`BlochVector.from_xyz` / :attr:`BlochVector.xyz` to work in the
conventional (x, y, z) order instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BlochOutOfBall,
    NotHermitian,
    NotNormalized,
    NotPositive,
    TraceNotOne,
)

TAU_HERM = 1e-10
TAU_TRACE = 1e-10
TAU_ORTH = 1e-10
TAU_PSD = 1e-10
TAU_RECON = 1e-12
TAU_NORM = 1e-10
TAU_PHASE = 1e-12
# eigenvalue gap at or below which the spectrum is treated as degenerate
DEGENERACY_GAP = 1e-12

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _readonly(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def fix_global_phase(vec, tol=TAU_PHASE):
    """Rotate ``vec`` so its first component with modulus > ``tol`` is real and >= 0."""
    vec = np.asarray(vec, dtype=complex)
    for i, comp in enumerate(vec):
        mag = abs(comp)
        if mag > tol:
            out = vec * (mag / comp)
            out[i] = mag
            return out
    return vec.copy()


class PureState:
    """Normalized qubit state vector ``alpha |0> + beta |1>``.

    The global phase is fixed on construction so that two vectors describing
    the same ray compare equal entrywise.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, normalize=False):
        vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if vec.shape != (2,):
            raise ValueError(f"expected 2 amplitudes, got shape {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise NotNormalized("amplitudes must be finite")
        norm = math.sqrt(float(np.vdot(vec, vec).real))
        if normalize:
            if norm == 0.0:
                raise NotNormalized("cannot normalize the zero vector", residual=1.0)
            vec = vec / norm
        elif abs(norm * norm - 1.0) > TAU_NORM:
            raise NotNormalized(
                f"|alpha|^2 + |beta|^2 = {norm * norm!r}, expected 1",
                residual=abs(norm * norm - 1.0),
            )
        object.__setattr__(self, "amplitudes", _readonly(fix_global_phase(vec)))

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    @property
    def alpha(self) -> complex:
        return complex(self.amplitudes[0])

    @property
    def beta(self) -> complex:
        return complex(self.amplitudes[1])

    def inner(self, other: PureState) -> complex:
        """Return <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.projector(), validate=False)

    def orthogonal(self) -> PureState:
        """The complement ``(-conj(beta), conj(alpha))``, phase-fixed."""
        a, b = self.amplitudes
        return PureState([-np.conj(b), np.conj(a)])

    def isclose(self, other: PureState, atol=1e-10) -> bool:
        return bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))

    def __repr__(self):
        a, b = self.amplitudes
        return f"PureState({a:.6g}, {b:.6g})"


def pure(alpha, beta) -> PureState:
    """Shorthand for a normalized :class:`PureState` from two amplitudes."""
    return PureState([alpha, beta], normalize=True)


def _hermiticity_residual(m):
    return float(np.max(np.abs(m - m.conj().T)))


def _eig2_values(m):
    """Closed-form eigenvalues (larger first) of a Hermitian 2x2 matrix."""
    a = m[0, 0].real
    d = m[1, 1].real
    p = m[0, 1]
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(p))
    lam_plus = mean + radius
    det = a * d - abs(p) ** 2
    # the small eigenvalue via det / lam_plus avoids cancellation in mean - radius
    if mean > 0.0:
        lam_minus = det / lam_plus
    else:
        lam_minus = mean - radius
    return lam_plus, lam_minus


class DensityMatrix:
    """Validated 2x2 density matrix (Hermitian, unit trace, PSD).

    Construct through :func:`make_density` for user data; internal code that
    already knows the invariants hold passes ``validate=False``.
    """

    __slots__ = ("matrix",)

    def __init__(self, entries, validate=True):
        m = np.asarray(entries, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if validate:
            _validate_density(m)
        object.__setattr__(self, "matrix", _readonly(m))

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    @property
    def a(self) -> float:
        """Upper-left population."""
        return float(self.matrix[0, 0].real)

    @property
    def p(self) -> complex:
        """Upper-right coherence."""
        return complex(self.matrix[0, 1])

    @property
    def purity(self) -> float:
        return overlap(self, self)

    def is_pure(self, tol=TAU_NORM) -> bool:
        return abs(self.purity - 1.0) <= tol

    def isclose(self, other, atol=1e-10) -> bool:
        return bool(np.allclose(self.matrix, np.asarray(other), rtol=0, atol=atol))

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.matrix, precision=6)})"


def _validate_density(m):
    if not np.all(np.isfinite(m)):
        raise NotHermitian("entries must be finite", residual=math.inf)
    herm = _hermiticity_residual(m)
    if herm > TAU_HERM:
        raise NotHermitian(f"matrix is not Hermitian (residual {herm:.3e})", residual=herm)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TAU_TRACE:
        raise TraceNotOne(f"trace is {tr!r}, expected 1", residual=abs(tr - 1.0))
    _, lam_minus = _eig2_values(m)
    if lam_minus < -TAU_PSD:
        raise NotPositive(
            f"minimum eigenvalue {lam_minus:.6g} is negative", residual=-lam_minus
        )


def make_density(entries) -> DensityMatrix:
    """Validate ``entries`` and wrap them as a :class:`DensityMatrix`.

    Raises
    ------
    NotHermitian, TraceNotOne, NotPositive
        Each carries the measured residual in ``.residual``.
    """
    return DensityMatrix(entries, validate=True)


@dataclass(frozen=True)
class BlochVector:
    """Bloch coordinates with ``a1`` on sigma_z, ``a2`` on sigma_y, ``a3`` on sigma_x."""

    a1: float
    a2: float
    a3: float

    @classmethod
    def from_xyz(cls, x, y, z) -> BlochVector:
        return cls(a1=float(z), a2=float(y), a3=float(x))

    @property
    def xyz(self) -> tuple[float, float, float]:
        return (self.a3, self.a2, self.a1)

    @property
    def norm(self) -> float:
        return math.sqrt(self.a1**2 + self.a2**2 + self.a3**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])


def from_bloch(b: BlochVector) -> DensityMatrix:
    """``(I + a1 sz + a2 sy + a3 sx) / 2``; raises :class:`BlochOutOfBall` if ``|A| > 1``."""
    n2 = b.a1**2 + b.a2**2 + b.a3**2
    if n2 > 1.0 + TAU_NORM:
        raise BlochOutOfBall(f"|A|^2 = {n2!r} exceeds 1", residual=n2 - 1.0)
    off = 0.5 * complex(b.a3, -b.a2)
    m = np.array(
        [[0.5 * (1.0 + b.a1), off], [off.conjugate(), 0.5 * (1.0 - b.a1)]],
        dtype=complex,
    )
    return DensityMatrix(m, validate=False)


def pure_from_bloch(b: BlochVector) -> PureState:
    """Pure state on the ray of ``b``; the vector is rescaled to unit length."""
    n = b.norm
    if n == 0.0:
        raise BlochOutOfBall("zero Bloch vector has no pure state", residual=1.0)
    a1, a2, a3 = b.a1 / n, b.a2 / n, b.a3 / n
    if a1 >= 0.0:
        alpha = math.sqrt(0.5 * (1.0 + a1))
        beta = complex(a3, a2) / (2.0 * alpha)
    else:
        beta_mag = math.sqrt(0.5 * (1.0 - a1))
        alpha = complex(a3, -a2) / (2.0 * beta_mag)
        beta = beta_mag
    return PureState([alpha, beta], normalize=True)


def to_bloch(rho: DensityMatrix) -> BlochVector:
    m = np.asarray(rho)
    off = m[0, 1]
    return BlochVector(
        a1=float((m[0, 0] - m[1, 1]).real),
        a2=float(-2.0 * off.imag),
        a3=float(2.0 * off.real),
    )


@dataclass(frozen=True)
class Spectrum2:
    """Eigen-decomposition of a qubit density matrix, larger eigenvalue first."""

    eigenvalues: tuple[float, float]
    eigenvectors: tuple[PureState, PureState]
    degenerate: bool = False

    @property
    def lam_plus(self) -> float:
        return self.eigenvalues[0]

    @property
    def lam_minus(self) -> float:
        return self.eigenvalues[1]

    @property
    def top(self) -> PureState:
        return self.eigenvectors[0]

    def reconstruct(self) -> np.ndarray:
        (lp, lm), (vp, vm) = self.eigenvalues, self.eigenvectors
        return lp * vp.projector() + lm * vm.projector()


def hermitian_spectrum(m) -> Spectrum2:
    """Closed-form eigen-decomposition of any Hermitian 2x2 matrix."""
    m = np.asarray(m, dtype=complex)
    lam_plus, lam_minus = _eig2_values(m)
    if lam_plus - lam_minus <= DEGENERACY_GAP:
        vecs = (PureState([1.0, 0.0]), PureState([0.0, 1.0]))
        return Spectrum2((lam_plus, lam_minus), vecs, degenerate=True)
    a = m[0, 0].real
    d = m[1, 1].real
    p = m[0, 1]
    # pick whichever of the two null-space formulas has the larger pivot
    if a >= d:
        v = np.array([lam_plus - d, np.conj(p)])
    else:
        v = np.array([p, lam_plus - a])
    top = PureState(v, normalize=True)
    return Spectrum2((lam_plus, lam_minus), (top, top.orthogonal()))


def spectral(rho: DensityMatrix) -> Spectrum2:
    """Eigenvalues and eigenvectors of ``rho``.

    The eigenvalue gap threshold is :data:`DEGENERACY_GAP`; below it the
    computational basis is returned and ``degenerate`` is set.
    """
    return hermitian_spectrum(np.asarray(rho))


def overlap(r1, r2) -> float:
    """``tr(r1 r2)`` for two density matrices (equal to |<a|b>|^2 when both are pure)."""
    m1 = np.asarray(r1)
    m2 = np.asarray(r2)
    return float(np.sum(m1 * m2.T).real)


def entropy_from_spectrum(eigenvalues) -> float:
    """``-sum l ln l`` with ``0 ln 0 = 0``; tiny negative round-off is clipped."""
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    lam = lam[lam > 0.0]
    # + 0.0 turns -0.0 into 0.0
    return float(-np.sum(lam * np.log(lam))) + 0.0


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in nats."""
    return entropy_from_spectrum(_eig2_values(np.asarray(rho)))


def determinant(rho: DensityMatrix) -> float:
    m = np.asarray(rho)
    return float((m[0, 0] * m[1, 1]).real - abs(m[0, 1]) ** 2)


def eigenvalues_from_determinant(det: float) -> tuple[float, float]:
    """``(1 +- sqrt(1 - 4 det)) / 2`` for a unit-trace qubit state."""
    u = math.sqrt(max(0.0, 1.0 - 4.0 * det))
    lam_plus = 0.5 * (1.0 + u)
    return lam_plus, (det / lam_plus if lam_plus > 0 else 0.0)


def entropy_from_determinant(det: float) -> float:
    return entropy_from_spectrum(eigenvalues_from_determinant(det))


def entropy_determinant_derivative(det: float) -> float:
    """dS/d(det) = ln((1 + u) / (1 - u)) / u with ``u = sqrt(1 - 4 det)``.

    Returns ``inf`` at ``det = 0`` and the limit value 2 at ``det = 1/4``.
    """
    if not 0.0 <= det <= 0.25:
        raise ValueError(f"determinant {det!r} outside [0, 1/4]")
    u = math.sqrt(1.0 - 4.0 * det)
    if u == 0.0:
        return 2.0
    if u == 1.0:
        return math.inf
    return 2.0 * math.atanh(u) / u
