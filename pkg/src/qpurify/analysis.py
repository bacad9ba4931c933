"""Fidelity bookkeeping for the reconstruct-then-purify pipeline.

For an initial pure state and k measured spin components, four candidate
reconstructions are compared against the initial state:

* the unbiased post-measurement state itself (``f_mixed``),
* its probability-preserving purification, averaged over the free phase
  (``f_protocol_a_avg``),
* its maximal-overlap purification (``f_protocol_b``),
* the maximum-entropy state (``f_maxent``), plus the two purifications of it.

:func:`analytic_fidelities` evaluates the closed forms; :func:`empirical_fidelities`
builds every state explicitly and measures overlaps, so the two can be checked
against each other.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import DEGENERACY_GAP, BlochVector, DensityMatrix, PureState, from_bloch, overlap
from .purification import OrthogonalMixture, decompose, purify_a_amplitudes, purify_b
from .reconstruction import (
    MeasurementRecord,
    canonical_axes,
    compatible_initial_states,
    maxent_state,
    probabilities_from_state,
    unbiased_state,
)

TAU_INEQ = 1e-9
TAU_MC_GRID = 1e-8
TAU_MC_POINT = 1e-10
# the bound that holds for tr(rho_unb,2 rho_A), not for the phase-averaged fidelity
FIVE_EIGHTHS = 5.0 / 8.0

PHASE_MODES = ("uniform", "optimal-pair-average")


@dataclass(frozen=True)
class HaarSampler:
    """Counter-based source of Haar-random qubit states.

    A draw depends only on ``(seed, stream, counter)``, so sweeps can be split
    or reordered without changing any sample.  ``stream`` separates
    independent sequences built from the same seed.
    """

    seed: int = 0
    counter: int = 0
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.counter < 0:
            raise ValueError("counter must be non-negative")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, self.stream, self.counter]))

    def advance(self, n: int = 1) -> HaarSampler:
        return HaarSampler(self.seed, self.counter + n, self.stream)


def haar_pure(sampler: HaarSampler) -> PureState:
    """Normalised pair of independent standard complex Gaussians."""
    g = sampler.rng().standard_normal(4)
    return PureState([complex(g[0], g[1]), complex(g[2], g[3])], normalize=True)


def haar_states(seed: int, n: int, start: int = 0):
    """Yield ``n`` Haar-random states for indices ``start .. start + n - 1``."""
    for i in range(start, start + n):
        yield haar_pure(HaarSampler(seed, i))


def random_density(sampler: HaarSampler) -> DensityMatrix:
    """Random mixed qubit state with Bloch vector uniform in the unit ball."""
    g = sampler.rng()
    v = g.standard_normal(3)
    v *= g.random() ** (1.0 / 3.0) / np.linalg.norm(v)
    return from_bloch(BlochVector(*v))


@dataclass(frozen=True)
class FidelityReport:
    """Overlaps of each reconstruction with the initial pure state."""

    k: int
    f_mixed: float
    f_protocol_a_avg: float
    f_protocol_b: float
    f_maxent: float
    bloch_norm: float
    degeneracy_flag: bool
    f_maxent_protocol_a_avg: float = math.nan
    f_maxent_protocol_b: float = math.nan
    # phase-averaged tr(rho_unb rho_A): overlap of the purified state with its parent mixture
    mixed_purified_overlap: float = math.nan
    phase_mode: str = "uniform"

    def as_dict(self) -> dict:
        return asdict(self)


def analytic_from_record(rec: MeasurementRecord) -> FidelityReport:
    """Closed-form fidelities; they depend on the record only."""
    if rec.k == 3:
        return FidelityReport(
            k=3,
            f_mixed=2.0 / 3.0,
            f_protocol_a_avg=2.0 / 3.0,
            f_protocol_b=1.0,
            f_maxent=1.0,
            bloch_norm=rec.bloch_norm,
            degeneracy_flag=False,
            f_maxent_protocol_a_avg=1.0,
            f_maxent_protocol_b=1.0,
            mixed_purified_overlap=5.0 / 9.0,
        )
    if rec.k == 2:
        a = rec.bloch_norm
        f_unb = (2.0 + a * a) / 4.0
        f_max = (1.0 + a * a) / 2.0
        f_b = (1.0 + a) / 2.0
        return FidelityReport(
            k=2,
            f_mixed=f_unb,
            f_protocol_a_avg=f_unb,
            f_protocol_b=f_b,
            f_maxent=f_max,
            bloch_norm=a,
            degeneracy_flag=a / 2.0 <= DEGENERACY_GAP,
            f_maxent_protocol_a_avg=f_max,
            f_maxent_protocol_b=f_b,
            mixed_purified_overlap=0.5 + a * a / 8.0,
        )
    p1 = rec.probs[0]
    f_unb = p1 * p1 + (1.0 - p1) ** 2
    f_b = max(p1, 1.0 - p1)
    return FidelityReport(
        k=1,
        f_mixed=f_unb,
        f_protocol_a_avg=f_unb,
        f_protocol_b=f_b,
        f_maxent=f_unb,
        bloch_norm=abs(2.0 * p1 - 1.0),
        degeneracy_flag=abs(2.0 * p1 - 1.0) <= DEGENERACY_GAP,
        f_maxent_protocol_a_avg=f_unb,
        f_maxent_protocol_b=f_b,
        mixed_purified_overlap=f_unb,
    )


def analytic_fidelities(psi: PureState, k: int) -> FidelityReport:
    return analytic_from_record(probabilities_from_state(psi, canonical_axes(k)))


def uniform_phases(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def protocol_a_fidelities(mix: OrthogonalMixture, psi: PureState, phases) -> np.ndarray:
    """``|<psi|purify_a(mix, phi)>|^2`` for each phase."""
    amps = purify_a_amplitudes(mix, phases)
    return np.abs(amps @ psi.amplitudes.conj()) ** 2


def _optimal_phase(mix: OrthogonalMixture, target: PureState) -> float:
    # the phase aligning the two terms of <target|psi_A(phi)>
    c1 = target.inner(mix.ket1)
    c2 = target.inner(mix.ket2)
    if abs(c1) == 0.0 or abs(c2) == 0.0:
        return 0.0
    return float(np.angle(c2) - np.angle(c1))


def optimal_pair_phases(mix: OrthogonalMixture, rec: MeasurementRecord) -> np.ndarray:
    """Phases at which the purified state best matches each compatible initial state."""
    if rec.k == 1:
        raise ValueError("optimal-pair averaging needs a finite candidate set (k = 2 or 3)")
    cands = compatible_initial_states(rec)
    return np.array([_optimal_phase(mix, c) for c in cands])


def _phase_average(mix, psi, rec, phase_grid, mode):
    if mode == "uniform":
        phases = uniform_phases(phase_grid)
    elif mode == "optimal-pair-average":
        phases = optimal_pair_phases(mix, rec)
    else:
        raise ValueError(f"unknown phase mode {mode!r}; expected one of {PHASE_MODES}")
    return phases, float(np.mean(protocol_a_fidelities(mix, psi, phases)))


def empirical_fidelities(
    psi: PureState, k: int, phase_grid: int = 64, mode: str = "uniform"
) -> FidelityReport:
    """Build every reconstruction explicitly and measure its overlap with ``psi``.

    Parameters
    ----------
    psi : PureState
        The initial state.
    k : int
        Number of measured components (z; z, y; z, y, x).
    phase_grid : int
        Points in the uniform grid used to average over the free phase of
        probability-preserving purification.  Ignored for the overlaps
        themselves in ``optimal-pair-average`` mode.
    mode : str
        ``"uniform"`` or ``"optimal-pair-average"``.
    """
    if phase_grid < 8:
        raise ValueError("phase_grid must be at least 8")
    rec = probabilities_from_state(psi, canonical_axes(k))
    rho_ini = psi.density()
    unb = unbiased_state(rec)
    mx = maxent_state(rec)

    mix_unb = decompose(unb)
    mix_max = decompose(mx)
    _, f_a = _phase_average(mix_unb, psi, rec, phase_grid, mode)
    _, f_a_max = _phase_average(mix_max, psi, rec, phase_grid, mode)

    # tr(rho_unb rho_A) over the uniform grid
    amps = purify_a_amplitudes(mix_unb, uniform_phases(phase_grid))
    m = np.asarray(unb)
    mixed_purified = float(np.mean(np.einsum("ni,ij,nj->n", amps.conj(), m, amps).real))

    b_unb = purify_b(unb)
    b_max = purify_b(mx)
    return FidelityReport(
        k=k,
        f_mixed=overlap(rho_ini, unb),
        f_protocol_a_avg=f_a,
        f_protocol_b=overlap(rho_ini, b_unb.density()),
        f_maxent=overlap(rho_ini, mx),
        bloch_norm=rec.bloch_norm,
        degeneracy_flag=b_unb.degenerate,
        f_maxent_protocol_a_avg=f_a_max,
        f_maxent_protocol_b=overlap(rho_ini, b_max.density()),
        mixed_purified_overlap=mixed_purified,
        phase_mode=mode,
    )


def phase_average_adjudication(psi: PureState, phase_grid: int = 1000) -> dict:
    """Which quantity the 5/8 bound governs, for two-axis measurements.

    Returns the uniform and optimal-pair phase averages of the
    probability-preserving fidelity, the per-candidate optimal fidelity, and
    ``tr(rho_unb,2 rho_A)``, each next to its closed form.
    """
    rec = probabilities_from_state(psi, canonical_axes(2))
    a2 = rec.bloch_norm**2
    mix = decompose(unbiased_state(rec))
    uniform = float(np.mean(protocol_a_fidelities(mix, psi, uniform_phases(phase_grid))))
    pair_phases = optimal_pair_phases(mix, rec)
    pair = float(np.mean(protocol_a_fidelities(mix, psi, pair_phases)))
    best = [
        float(protocol_a_fidelities(mix, c, [_optimal_phase(mix, c)])[0])
        for c in compatible_initial_states(rec)
    ]
    m = np.asarray(unbiased_state(rec))
    amps = purify_a_amplitudes(mix, uniform_phases(phase_grid))
    mixed_purified = np.einsum("ni,ij,nj->n", amps.conj(), m, amps).real
    return {
        "bloch_norm": math.sqrt(a2),
        "f_a_uniform_average": uniform,
        "f_a_optimal_pair_average": pair,
        "f_a_per_candidate_optimum_mean": float(np.mean(best)),
        "f_a_closed_form": (2.0 + a2) / 4.0,
        "mixed_purified_overlap_min": float(mixed_purified.min()),
        "mixed_purified_overlap_max": float(mixed_purified.max()),
        "mixed_purified_overlap_closed_form": 0.5 + a2 / 8.0,
        "five_eighths_bound_holds_for": "mixed_purified_overlap",
        "f_a_average_exceeds_five_eighths": (2.0 + a2) / 4.0 > FIVE_EIGHTHS + TAU_MC_POINT,
    }


CHAIN_LINKS = (
    # (name, lhs field, rhs field, relation)
    ("fB_max == fB_unb", "f_maxent_protocol_b", "f_protocol_b", "eq"),
    ("fB_unb >= f_max", "f_protocol_b", "f_maxent", "ge"),
    ("f_max == fA_avg_max", "f_maxent", "f_maxent_protocol_a_avg", "eq"),
    ("f_max >= f_unb", "f_maxent", "f_mixed", "ge"),
    ("f_unb == fA_avg_unb", "f_mixed", "f_protocol_a_avg", "eq"),
)


@dataclass
class LinkStats:
    violations: int = 0
    min_slack: float = math.inf
    max_slack: float = -math.inf

    def update(self, slack: float, relation: str, tol: float) -> bool:
        self.min_slack = min(self.min_slack, slack)
        self.max_slack = max(self.max_slack, slack)
        bad = abs(slack) > tol if relation == "eq" else slack < -tol
        self.violations += int(bad)
        return bad


def check_chain(report: FidelityReport, stats: dict[str, LinkStats] | None = None, tol=TAU_INEQ):
    """Accumulate the slack of every chain link for one report; returns ``stats``."""
    if stats is None:
        stats = {name: LinkStats() for name, *_ in CHAIN_LINKS}
    for name, lhs, rhs, rel in CHAIN_LINKS:
        stats[name].update(getattr(report, lhs) - getattr(report, rhs), rel, tol)
    return stats


@dataclass
class ChainSummary:
    samples: int
    seed: int
    links: dict[str, LinkStats]

    @property
    def violations(self) -> int:
        return sum(s.violations for s in self.links.values())

    def as_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "violations": self.violations,
            "links": {name: asdict(s) for name, s in self.links.items()},
        }


def verify_inequality_chain(
    samples: int, seed: int = 0, phase_grid: int = 64, tol: float = TAU_INEQ
) -> ChainSummary:
    """Check the two-axis fidelity ordering on ``samples`` Haar-random states."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    stats = None
    for psi in haar_states(seed, samples):
        stats = check_chain(empirical_fidelities(psi, 2, phase_grid), stats, tol)
    return ChainSummary(samples, seed, stats)
