"""Entanglement-free purification and state reconstruction for qubits."""

from .analysis import (
    FidelityReport,
    HaarSampler,
    analytic_fidelities,
    analytic_from_record,
    empirical_fidelities,
    haar_pure,
    haar_states,
    phase_average_adjudication,
    verify_inequality_chain,
)
from .core import (
    BlochVector,
    DensityMatrix,
    PureState,
    Spectrum2,
    determinant,
    entropy_determinant_derivative,
    entropy_from_determinant,
    from_bloch,
    make_density,
    overlap,
    pure,
    pure_from_bloch,
    spectral,
    to_bloch,
    von_neumann_entropy,
)
from .errors import (
    BlochOutOfBall,
    ConfigError,
    DegenerateProjector,
    InconsistentRecord,
    MaxEntNotPositive,
    NotHermitian,
    NotPositive,
    QPurifyError,
    TraceNotOne,
)
from .kraus import (
    CompositeState,
    KrausChannel,
    PurificationBasis,
    apply_channel,
    dilation_unitary,
    entropy_audit,
    evolve_composite,
    kraus_from_unitary,
    partial_trace_env,
    partial_trace_sys,
    project_environment,
    purifying_channel,
)
from .purification import (
    OrthogonalMixture,
    ProjectionChoice,
    decompose,
    purify_a,
    purify_a_via_projection,
    purify_b,
)
from .reconstruction import (
    MeasurementRecord,
    compatible_initial_states,
    maxent_state,
    probabilities_from_state,
    unbiased_state,
)

__version__ = "0.1.0"
