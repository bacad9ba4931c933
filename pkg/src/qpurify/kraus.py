"""Kraus-operator form of qubit purification and its entropy accounting.

The purifying operation sends every input to a fixed pure state ``psi``.  It
is realised by a unitary on system (x) environment, with the environment a
qubit starting in ``|0_E>``.  Composite states are 4x4 matrices in
system-major order: basis ``|0,0_E>, |0,1_E>, |1,0_E>, |1,1_E>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    TAU_HERM,
    TAU_ORTH,
    TAU_PSD,
    TAU_RECON,
    TAU_TRACE,
    DensityMatrix,
    PureState,
    determinant,
    entropy_from_spectrum,
    hermitian_spectrum,
    spectral,
    von_neumann_entropy,
)
from .errors import NotHermitian, NotOrthogonal, NotPositive, TraceNotOne

TAU_INEQ = 1e-9
# off-diagonal magnitude below which the purification basis counts as an eigenbasis
TAU_DIAGONAL = 1e-10

ENV_ZERO = np.array([1.0, 0.0], dtype=complex)
ENV_ONE = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class PurificationBasis:
    """Orthonormal basis ``|0>, |1>`` plus the target state ``psi``."""

    basis0: PureState
    basis1: PureState
    target: PureState

    def __post_init__(self):
        ov = abs(self.basis0.inner(self.basis1))
        if ov > TAU_ORTH:
            raise NotOrthogonal(f"|<0|1>| = {ov:.3e}", residual=ov)

    @classmethod
    def computational(cls, target: PureState) -> PurificationBasis:
        return cls(PureState([1.0, 0.0]), PureState([0.0, 1.0]), target)

    @classmethod
    def eigenbasis(cls, rho: DensityMatrix, target: PureState) -> PurificationBasis:
        """Use the eigenvectors of ``rho`` as purification basis."""
        return cls(*spectral(rho).eigenvectors, target)

    @classmethod
    def from_unitary(cls, u, target: PureState) -> PurificationBasis:
        u = np.asarray(u, dtype=complex)
        return cls(PureState(u[:, 0]), PureState(u[:, 1]), target)

    @property
    def complement(self) -> PureState:
        """The state orthogonal to ``target``, ``(-conj(beta), conj(alpha))``."""
        return self.target.orthogonal()

    def matrix(self) -> np.ndarray:
        """Basis vectors as columns."""
        return np.column_stack([self.basis0.amplitudes, self.basis1.amplitudes])

    def express(self, rho) -> np.ndarray:
        """Matrix elements ``<i|rho|j>`` in this basis."""
        b = self.matrix()
        return b.conj().T @ np.asarray(rho) @ b


class KrausChannel:
    """Ordered list of 2x2 Kraus operators acting as ``rho -> sum A rho A^dag``."""

    __slots__ = ("operators",)

    def __init__(self, operators):
        ops = []
        for op in operators:
            a = np.array(op, dtype=complex)
            if a.shape != (2, 2):
                raise ValueError(f"Kraus operators must be 2x2, got {a.shape}")
            a.setflags(write=False)
            ops.append(a)
        if not ops:
            raise ValueError("a channel needs at least one operator")
        object.__setattr__(self, "operators", tuple(ops))

    def __setattr__(self, name, value):
        raise AttributeError("KrausChannel is immutable")

    def __len__(self):
        return len(self.operators)

    def gram(self) -> np.ndarray:
        """``sum A^dag A``; the identity for a trace-preserving channel."""
        return sum(a.conj().T @ a for a in self.operators)

    def outer_gram(self) -> np.ndarray:
        """``sum A A^dag``."""
        return sum(a @ a.conj().T for a in self.operators)

    def completeness_residual(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(2))))

    @property
    def is_trace_preserving(self) -> bool:
        return self.completeness_residual() <= TAU_RECON

    @property
    def is_selective(self) -> bool:
        """Trace non-increasing but not trace preserving."""
        return not self.is_trace_preserving and _below_identity(self.gram())

    def completeness_report(self) -> dict:
        """Both operator orderings, checked separately."""
        g, h = self.gram(), self.outer_gram()
        return {
            "adjoint_first_residual": float(np.max(np.abs(g - np.eye(2)))),
            "adjoint_first_below_identity": _below_identity(g),
            "adjoint_last_residual": float(np.max(np.abs(h - np.eye(2)))),
            "adjoint_last_below_identity": _below_identity(h),
            "trace_preserving": self.is_trace_preserving,
            "selective": self.is_selective,
        }


def _below_identity(m) -> bool:
    return hermitian_spectrum(np.eye(2) - m).lam_minus >= -TAU_PSD


def purifying_channel(pb: PurificationBasis) -> KrausChannel:
    """``A_0 = |psi><0|``, ``A_1 = |psi><1|``: every input goes to ``|psi><psi|``."""
    psi = pb.target.amplitudes
    return KrausChannel(
        [np.outer(psi, pb.basis0.amplitudes.conj()), np.outer(psi, pb.basis1.amplitudes.conj())]
    )


def apply_channel(ch: KrausChannel, rho):
    """Apply ``ch`` to ``rho``.

    Returns a :class:`DensityMatrix` for a trace-preserving channel.  For a
    selective channel the (sub-normalised) output matrix is returned as a
    plain array; its trace is the selection probability.
    """
    m = np.asarray(rho)
    out = sum(a @ m @ a.conj().T for a in ch.operators)
    if ch.is_trace_preserving:
        return DensityMatrix(out)
    return out


def dilation_unitary(pb: PurificationBasis) -> np.ndarray:
    """``U = sum_s |psi, s_E><s, 0_E| + |xi, s_E><s, 1_E|`` (system-major)."""
    psi = pb.target.amplitudes
    xi = pb.complement.amplitudes
    u = np.zeros((4, 4), dtype=complex)
    for s, (b, e) in enumerate([(pb.basis0, ENV_ZERO), (pb.basis1, ENV_ONE)]):
        bra = b.amplitudes.conj()
        u += np.outer(np.kron(psi, e), np.kron(bra, ENV_ZERO))
        u += np.outer(np.kron(xi, e), np.kron(bra, ENV_ONE))
    return u


def kraus_from_unitary(u) -> KrausChannel:
    """``A_k = <k_E| U |0_E>`` for an environment starting in ``|0_E>``."""
    u4 = np.asarray(u, dtype=complex).reshape(2, 2, 2, 2)
    # axes: system out, env out, system in, env in
    return KrausChannel([u4[:, k, :, 0] for k in range(2)])


class CompositeState:
    """Validated 4x4 density matrix on system (x) environment."""

    __slots__ = ("matrix",)

    def __init__(self, entries, validate=True):
        m = np.array(entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected 4x4, got {m.shape}")
        if validate:
            herm = float(np.max(np.abs(m - m.conj().T)))
            if herm > TAU_HERM:
                raise NotHermitian(f"composite not Hermitian ({herm:.3e})", residual=herm)
            tr = float(np.trace(m).real)
            if abs(tr - 1.0) > TAU_TRACE:
                raise TraceNotOne(f"composite trace {tr!r}", residual=abs(tr - 1.0))
            low = float(np.linalg.eigvalsh(m)[0])
            if low < -TAU_PSD:
                raise NotPositive(f"composite eigenvalue {low:.3e}", residual=-low)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("CompositeState is immutable")

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    @classmethod
    def product(cls, rho_sys, rho_env) -> CompositeState:
        return cls(np.kron(np.asarray(rho_sys), np.asarray(rho_env)))

    def entropy(self) -> float:
        return entropy_from_spectrum(np.linalg.eigvalsh(self.matrix))


def partial_trace_env(cs: CompositeState) -> DensityMatrix:
    """Reduced state of the system."""
    t = np.asarray(cs).reshape(2, 2, 2, 2)
    return DensityMatrix(np.einsum("iaja->ij", t))


def partial_trace_sys(cs: CompositeState) -> DensityMatrix:
    """Reduced state of the environment."""
    t = np.asarray(cs).reshape(2, 2, 2, 2)
    return DensityMatrix(np.einsum("aiaj->ij", t))


def factorization_residual(cs: CompositeState) -> float:
    """Max-entry distance between ``cs`` and the product of its reductions."""
    prod = np.kron(np.asarray(partial_trace_env(cs)), np.asarray(partial_trace_sys(cs)))
    return float(np.max(np.abs(np.asarray(cs) - prod)))


def evolve_composite(pb: PurificationBasis, rho0: DensityMatrix) -> CompositeState:
    """``U (rho0 (x) |0_E><0_E|) U^dag``."""
    u = dilation_unitary(pb)
    start = np.kron(np.asarray(rho0), np.outer(ENV_ZERO, ENV_ZERO))
    return CompositeState(u @ start @ u.conj().T)


def project_environment(cs: CompositeState) -> DensityMatrix:
    """Environment state after a non-selective measurement in its own basis."""
    out = np.zeros((4, 4), dtype=complex)
    for e in (ENV_ZERO, ENV_ONE):
        q = np.kron(np.eye(2), np.outer(e, e))
        out += q @ np.asarray(cs) @ q
    return partial_trace_sys(CompositeState(out))


@dataclass(frozen=True)
class EntropyAudit:
    s_before: float
    s_composite_after_unitary: float
    s_env_after_unitary: float
    s_env_final: float
    det_before: float
    det_after: float
    factorization_residual: float
    basis_diagonalizes: bool

    @property
    def s_after_unitary(self) -> float:
        return self.s_composite_after_unitary

    @property
    def entropy_increase(self) -> float:
        return self.s_env_final - self.s_before

    @property
    def entropy_ok(self) -> bool:
        return self.entropy_increase >= -TAU_INEQ

    @property
    def determinant_ok(self) -> bool:
        return self.det_after - self.det_before >= -TAU_INEQ

    def as_dict(self) -> dict:
        return {
            "s_before": self.s_before,
            "s_after_unitary": self.s_composite_after_unitary,
            "s_env_after_unitary": self.s_env_after_unitary,
            "s_env_final": self.s_env_final,
            "entropy_increase": self.entropy_increase,
            "det_before": self.det_before,
            "det_after": self.det_after,
            "factorization_residual": self.factorization_residual,
            "basis_diagonalizes": self.basis_diagonalizes,
            "entropy_ok": self.entropy_ok,
            "determinant_ok": self.determinant_ok,
        }


def entropy_audit(pb: PurificationBasis, rho0: DensityMatrix) -> EntropyAudit:
    """Entropy and determinant before and after the purifying operation."""
    cs = evolve_composite(pb, rho0)
    env_final = project_environment(cs)
    in_basis = pb.express(rho0)
    dephased_det = float((in_basis[0, 0] * in_basis[1, 1]).real)
    return EntropyAudit(
        s_before=von_neumann_entropy(rho0),
        s_composite_after_unitary=cs.entropy(),
        s_env_after_unitary=von_neumann_entropy(partial_trace_sys(cs)),
        s_env_final=von_neumann_entropy(env_final),
        det_before=determinant(rho0),
        det_after=dephased_det,
        factorization_residual=factorization_residual(cs),
        basis_diagonalizes=bool(abs(in_basis[0, 1]) <= TAU_DIAGONAL),
    )
