"""Post-measurement state reconstruction from spin-component probabilities.

A record holds the probability of the ``+`` outcome along one, two or three
axes (always canonicalised to z, then y, then x).  From it we build the
*unbiased* state, the equal-weight average of the per-axis post-measurement
mixtures, and the maximum-entropy state consistent with the data.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .core import (
    BlochVector,
    DensityMatrix,
    PureState,
    from_bloch,
    pure_from_bloch,
)
from .errors import BlochOutOfBall, InconsistentRecord, MaxEntNotPositive

TAU_CONSIST = 1e-8
# tolerance on user-supplied probabilities straying outside [0, 1]
TAU_PROB = 1e-12

AXIS_ORDER = ("z", "y", "x")

_SQRT_HALF = math.sqrt(0.5)
# "+" eigenvectors of sigma_z, sigma_y, sigma_x in the z basis
PLUS_STATES = {
    "z": np.array([1.0, 0.0], dtype=complex),
    "y": np.array([_SQRT_HALF, 1j * _SQRT_HALF]),
    "x": np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex),
}


def canonical_axes(k: int) -> tuple[str, ...]:
    if k not in (1, 2, 3):
        raise ValueError(f"measurement count must be 1, 2 or 3, got {k!r}")
    return AXIS_ORDER[:k]


@dataclass(frozen=True)
class MeasurementRecord:
    """Exact ``+``-outcome probabilities for the measured spin components.

    ``probs[i]`` belongs to ``axes[i]``.  Axes are stored in z, y, x order;
    pass them in any order and the probabilities are permuted to match.
    """

    axes: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        axes = tuple(self.axes)
        probs = tuple(float(p) for p in self.probs)
        if len(axes) != len(probs):
            raise ValueError(f"{len(axes)} axes but {len(probs)} probabilities")
        if set(axes) != set(canonical_axes(len(axes))) or len(set(axes)) != len(axes):
            raise ValueError(
                f"axes {axes} are not one of {{z}}, {{z, y}}, {{z, y, x}}"
            )
        for ax, p in zip(axes, probs):
            if not (-TAU_PROB <= p <= 1.0 + TAU_PROB) or math.isnan(p):
                raise ValueError(f"probability for axis {ax} is {p!r}, outside [0, 1]")
        order = sorted(range(len(axes)), key=lambda i: AXIS_ORDER.index(axes[i]))
        object.__setattr__(self, "axes", tuple(axes[i] for i in order))
        object.__setattr__(
            self, "probs", tuple(min(1.0, max(0.0, probs[i])) for i in order)
        )

    @classmethod
    def from_probs(cls, probs) -> MeasurementRecord:
        probs = tuple(probs)
        return cls(canonical_axes(len(probs)), probs)

    @property
    def k(self) -> int:
        return len(self.axes)

    @property
    def bloch_components(self) -> tuple[float, ...]:
        """``A_j = 2 p_j - 1`` in the stored axis order."""
        return tuple(2.0 * p - 1.0 for p in self.probs)

    @property
    def bloch_norm(self) -> float:
        """Length of the measured part of the Bloch vector."""
        return math.sqrt(sum(a * a for a in self.bloch_components))

    def bloch(self) -> BlochVector:
        """Measured components with unmeasured ones set to zero."""
        comps = self.bloch_components + (0.0,) * (3 - self.k)
        return BlochVector(*comps)


def probabilities_from_state(psi: PureState, axes=AXIS_ORDER) -> MeasurementRecord:
    """Born-rule probabilities of the ``+`` outcome along each axis."""
    axes = tuple(axes)
    probs = [abs(np.vdot(PLUS_STATES[ax], psi.amplitudes)) ** 2 for ax in axes]
    return MeasurementRecord(axes, probs)


def unbiased_state(rec: MeasurementRecord) -> DensityMatrix:
    """Equal-weight mixture of the per-axis post-measurement states."""
    a = rec.bloch_components
    if rec.k == 3:
        a1, a2, a3 = a
        m = np.array([[a1 + 3, a3 - 1j * a2], [a3 + 1j * a2, 3 - a1]]) / 6.0
    elif rec.k == 2:
        a1, a2 = a
        m = np.array([[a1 + 2, -1j * a2], [1j * a2, 2 - a1]]) / 4.0
    else:
        p1 = rec.probs[0]
        m = np.diag([p1, 1.0 - p1]).astype(complex)
    return DensityMatrix(m)


def maxent_state(rec: MeasurementRecord) -> DensityMatrix:
    """Maximum-entropy state reproducing the record.

    Unmeasured Bloch components are zero.  For one axis this coincides with
    the unbiased state.

    Raises
    ------
    MaxEntNotPositive
        When the measured components have ``|A| > 1``.
    """
    try:
        return from_bloch(rec.bloch())
    except BlochOutOfBall as exc:
        raise MaxEntNotPositive(
            f"record implies |A| = {rec.bloch_norm:.12g} > 1; no density matrix fits"
        ) from exc


@dataclass(frozen=True)
class InitialStateFamily:
    """Pure states ``(sqrt(p1), sqrt(1 - p1) exp(i theta))`` left open by a z-only record."""

    p1: float

    def state(self, theta: float) -> PureState:
        return PureState(
            [math.sqrt(self.p1), math.sqrt(1.0 - self.p1) * complex(math.cos(theta), math.sin(theta))],
            normalize=True,
        )

    def density(self, theta: float) -> DensityMatrix:
        return self.state(theta).density()

    def states(self, n: int) -> Iterator[PureState]:
        """Yield states on a uniform ``n``-point grid of ``theta`` in [0, 2 pi)."""
        for j in range(n):
            yield self.state(2.0 * math.pi * j / n)


def compatible_initial_states(rec: MeasurementRecord):
    """Pure states that reproduce ``rec``.

    Returns a tuple of :class:`PureState` for two or three axes (two
    candidates differing in the sign of the x component, or one when that
    component vanishes) and an :class:`InitialStateFamily` for one axis.
    """
    if rec.k == 1:
        return InitialStateFamily(rec.probs[0])
    n2 = rec.bloch_norm**2
    if rec.k == 3:
        if abs(n2 - 1.0) > TAU_CONSIST:
            raise InconsistentRecord(
                f"|A|^2 = {n2:.12g}; a pure initial state needs |A| = 1"
            )
        return (pure_from_bloch(rec.bloch()),)
    if n2 > 1.0 + TAU_CONSIST:
        raise InconsistentRecord(f"|A|^2 = {n2:.12g} exceeds 1")
    a1, a2 = rec.bloch_components
    c = math.sqrt(max(0.0, 1.0 - n2))
    if c <= TAU_CONSIST:
        return (pure_from_bloch(BlochVector(a1, a2, 0.0)),)
    return tuple(pure_from_bloch(BlochVector(a1, a2, s * c)) for s in (1.0, -1.0))
