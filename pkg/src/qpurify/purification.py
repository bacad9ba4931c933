"""Entanglement-free purification of a qubit mixed state.

Two maps are provided:

* probability-preserving purification (:func:`purify_a`): the output keeps
  the weights ``p1, p2`` of the two orthogonal components and leaves one
  relative phase free;
* maximal-overlap purification (:func:`purify_b`): the output is the
  eigenvector of the largest eigenvalue, the pure state maximising
  ``tr(rho sigma)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    TAU_ORTH,
    TAU_PHASE,
    TAU_TRACE,
    DensityMatrix,
    PureState,
    spectral,
)
from .errors import DegenerateProjector, InvalidStateError, NotOrthogonal


@dataclass(frozen=True)
class OrthogonalMixture:
    """``p1 |k1><k1| + p2 |k2><k2|`` with orthonormal ``k1``, ``k2``."""

    p1: float
    p2: float
    ket1: PureState
    ket2: PureState

    def __post_init__(self):
        if self.p1 < -TAU_TRACE or self.p2 < -TAU_TRACE:
            raise InvalidStateError(f"negative weight in ({self.p1}, {self.p2})")
        if abs(self.p1 + self.p2 - 1.0) > TAU_TRACE:
            raise InvalidStateError(
                f"weights sum to {self.p1 + self.p2!r}",
                residual=abs(self.p1 + self.p2 - 1.0),
            )
        ov = abs(self.ket1.inner(self.ket2)) ** 2
        if ov > TAU_ORTH:
            raise NotOrthogonal(f"tr(rho1 rho2) = {ov:.3e}", residual=ov)

    @property
    def rho1(self) -> DensityMatrix:
        return self.ket1.density()

    @property
    def rho2(self) -> DensityMatrix:
        return self.ket2.density()

    def density(self) -> DensityMatrix:
        m = self.p1 * self.ket1.projector() + self.p2 * self.ket2.projector()
        return DensityMatrix(m, validate=False)


@dataclass(frozen=True)
class ProjectionChoice:
    """The free datum of probability-preserving purification.

    Either a projector onto ``chi = mu |k1> + nu |k2>`` (coordinates in the
    mixture's own basis) or the relative phase ``phi`` directly.
    """

    chi: PureState | None = None
    phi: float | None = None

    def __post_init__(self):
        if (self.chi is None) == (self.phi is None):
            raise ValueError("give exactly one of chi or phi")
        if self.chi is not None:
            mu, nu = self.chi.amplitudes
            if abs(mu) <= TAU_PHASE or abs(nu) <= TAU_PHASE:
                raise DegenerateProjector(
                    f"projector is orthogonal to a mixture component (mu={mu}, nu={nu})"
                )

    @classmethod
    def projector(cls, mu, nu) -> ProjectionChoice:
        return cls(chi=PureState([mu, nu], normalize=True))

    @classmethod
    def phase(cls, phi) -> ProjectionChoice:
        return cls(phi=float(phi))

    @property
    def angle(self) -> float:
        """``phi`` in (-pi, pi]; for a projector, the phase of ``mu conj(nu)``."""
        if self.phi is not None:
            return self.phi
        mu, nu = self.chi.amplitudes
        phi = cmath.phase(mu * np.conj(nu))
        if phi <= -math.pi:
            phi += 2.0 * math.pi
        return phi


def decompose(rho: DensityMatrix) -> OrthogonalMixture:
    """Split ``rho`` into its eigen-mixture, larger weight first."""
    spec = spectral(rho)
    lp, lm = spec.eigenvalues
    return OrthogonalMixture(lp, lm, *spec.eigenvectors)


def _as_phase(choice) -> float:
    if isinstance(choice, ProjectionChoice):
        return choice.angle
    return float(choice)


def purify_a_amplitudes(mix: OrthogonalMixture, phases) -> np.ndarray:
    """Vectorised :func:`purify_a`: one row of amplitudes per phase.

    Rows are *not* phase-fixed; use them for overlaps, not for equality tests.
    """
    phases = np.asarray(phases, dtype=float).reshape(-1, 1)
    w1 = math.sqrt(max(mix.p1, 0.0))
    w2 = math.sqrt(max(mix.p2, 0.0))
    return w1 * mix.ket1.amplitudes[None, :] + w2 * np.exp(-1j * phases) * mix.ket2.amplitudes[None, :]


def purify_a(mix: OrthogonalMixture, choice) -> PureState:
    """``sqrt(p1) |k1> + sqrt(p2) exp(-i phi) |k2>``.

    ``choice`` is a :class:`ProjectionChoice` or a bare phase in radians.
    """
    amps = purify_a_amplitudes(mix, [_as_phase(choice)])[0]
    return PureState(amps, normalize=True)


def purify_a_via_projection(mix: OrthogonalMixture, choice: ProjectionChoice) -> DensityMatrix:
    """Build the purified state from the projector itself.

    ``p1 r1 + p2 r2 + sqrt(p1 p2) (r1 P r2 + r2 P r1) / sqrt(tr(r1 P) tr(r2 P))``
    """
    if choice.chi is None:
        raise ValueError("projector form required")
    # evaluated in the mixture's own basis, where r1, r2 are diagonal; forming
    # chi in the computational basis first loses ~eps/|nu| in <k2|chi>
    chi = choice.chi.amplitudes
    proj = np.outer(chi, chi.conj())
    r1 = np.diag([1.0, 0.0]).astype(complex)
    r2 = np.diag([0.0, 1.0]).astype(complex)
    t1 = np.trace(r1 @ proj).real
    t2 = np.trace(r2 @ proj).real
    if t1 <= TAU_PHASE**2 or t2 <= TAU_PHASE**2:
        raise DegenerateProjector("projector is orthogonal to a mixture component")
    cross = (r1 @ proj @ r2 + r2 @ proj @ r1) / math.sqrt(t1 * t2)
    p1, p2 = max(mix.p1, 0.0), max(mix.p2, 0.0)
    m = p1 * r1 + p2 * r2 + math.sqrt(p1 * p2) * cross
    basis = np.column_stack([mix.ket1.amplitudes, mix.ket2.amplitudes])
    return DensityMatrix(basis @ m @ basis.conj().T, validate=False)


@dataclass(frozen=True)
class PurifiedState:
    """Output of :func:`purify_b` with the achieved overlap and degeneracy flag."""

    state: PureState
    overlap: float
    degenerate: bool

    def density(self) -> DensityMatrix:
        return self.state.density()


def purify_b(rho: DensityMatrix) -> PurifiedState:
    """Pure state of maximal overlap with ``rho``: its top eigenvector.

    For a degenerate ``rho`` every pure state is optimal; ``|0>`` is returned
    and ``degenerate`` is set.
    """
    spec = spectral(rho)
    return PurifiedState(spec.top, spec.lam_plus, spec.degenerate)

