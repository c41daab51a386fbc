"""Finite-dimensional bipartite states, observables, Schmidt analysis and channels.

Conventions: a joint ket on H_A (x) H_B with local dimensions (dim_a, dim_b)
is a complex vector of length dim_a*dim_b in A-major order, i.e. amplitude
index i*dim_b + j addresses |i>_A |j>_B.  All container types are immutable
(arrays are stored read-only) and every operation is a pure function, so
everything here is safe to use concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGEN_ATOL = 1e-10
ORTHO_ATOL = 1e-10
KRAUS_ATOL = 1e-12
NPT_EIG_ATOL = 1e-10

CHANNEL_SIDES = ("A", "B", "both-local")


def _frozen(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _check_dims(dim_a: int, dim_b: int) -> None:
    if int(dim_a) != dim_a or int(dim_b) != dim_b or dim_a < 1 or dim_b < 1:
        raise ValueError(f"local dimensions must be positive integers, got ({dim_a}, {dim_b})")


def _check_hermitian(matrix: np.ndarray, what: str) -> None:
    if np.max(np.abs(matrix - matrix.conj().T)) > HERMITIAN_ATOL:
        raise ValueError(f"{what} is not Hermitian within {HERMITIAN_ATOL:g}")


@dataclass(frozen=True)
class PureState:
    """Normalized pure state of a bipartite system, amplitudes in A-major order."""

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_dims(self.dim_a, self.dim_b)
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != self.dim_a * self.dim_b:
            raise ValueError(
                f"amplitude vector has length {amp.size}, expected {self.dim_a * self.dim_b}"
            )
        norm_sq = float(np.vdot(amp, amp).real)
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to the (dim_a, dim_b) coefficient matrix."""
        return self.amplitudes.reshape(self.dim_a, self.dim_b)

    def projector(self) -> "DensityOperator":
        """Rank-one density operator |psi><psi|."""
        return DensityOperator(self.dim_a, self.dim_b, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive-semidefinite, unit-trace operator on the joint space."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_dims(self.dim_a, self.dim_b)
        n = self.dim_a * self.dim_b
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (n, n):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({n}, {n})")
        _check_hermitian(mat, "density matrix")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix has trace {tr!r}, expected 1")
        if float(np.linalg.eigvalsh(mat)[0]) < -EIGEN_ATOL:
            raise ValueError("density matrix has a negative eigenvalue beyond tolerance")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True)
class HermitianObservable:
    """Hermitian observable on the joint space."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_dims(self.dim_a, self.dim_b)
        n = self.dim_a * self.dim_b
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (n, n):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({n}, {n})")
        _check_hermitian(mat, "observable")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt form of a bipartite pure state.

    ``coefficients`` are the singular values sqrt(p_i), nonincreasing;
    ``basis_a``/``basis_b`` hold the local orthonormal vectors as rows.
    ``swapped`` records that the source state had dim_a > dim_b, i.e. the
    second subsystem played the small-dimension role in the convention
    d = min(dim_a, dim_b).
    """

    dim_a: int
    dim_b: int
    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray
    swapped: bool = False

    def __post_init__(self):
        _check_dims(self.dim_a, self.dim_b)
        d = min(self.dim_a, self.dim_b)
        coeff = np.array(self.coefficients, dtype=float)
        ba = np.array(self.basis_a, dtype=complex)
        bb = np.array(self.basis_b, dtype=complex)
        if coeff.shape != (d,):
            raise ValueError(f"expected {d} Schmidt coefficients, got shape {coeff.shape}")
        if np.any(coeff < -0.0) or np.any(np.diff(coeff) > 0):
            raise ValueError("Schmidt coefficients must be nonnegative and nonincreasing")
        if abs(float(np.sum(coeff**2)) - 1.0) > NORM_ATOL:
            raise ValueError("squared Schmidt coefficients must sum to 1")
        if ba.shape != (d, self.dim_a) or bb.shape != (d, self.dim_b):
            raise ValueError("Schmidt basis arrays have inconsistent shapes")
        for name, basis in (("A", ba), ("B", bb)):
            gram = basis @ basis.conj().T
            if np.max(np.abs(gram - np.eye(d))) > ORTHO_ATOL:
                raise ValueError(f"Schmidt basis on side {name} is not orthonormal")
        coeff.setflags(write=False)
        ba.setflags(write=False)
        bb.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)
        object.__setattr__(self, "basis_a", ba)
        object.__setattr__(self, "basis_b", bb)

    @property
    def probabilities(self) -> np.ndarray:
        """Squared Schmidt coefficients p_i."""
        return self.coefficients**2

    def reconstruct(self) -> PureState:
        """Rebuild the state sum_i sqrt(p_i) |a_i>|b_i>."""
        amp = np.einsum("k,ki,kj->ij", self.coefficients, self.basis_a, self.basis_b)
        return PureState(self.dim_a, self.dim_b, amp.reshape(-1))


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive trace-preserving map given by local Kraus operators.

    ``acting_side`` selects where the single-subsystem operators act: on A,
    on B, or independently on both ("both-local"; requires dim_a == dim_b).
    """

    operators: tuple
    acting_side: str = "both-local"

    def __post_init__(self):
        if self.acting_side not in CHANNEL_SIDES:
            raise ValueError(f"acting_side must be one of {CHANNEL_SIDES}, got {self.acting_side!r}")
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise ValueError("all Kraus operators must be square with a common dimension")
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(d))) > KRAUS_ATOL:
            raise ValueError("Kraus operators do not satisfy sum K^dag K = I")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def local_dim(self) -> int:
        return self.operators[0].shape[0]


def tensor_product(a: Sequence[complex], b: Sequence[complex]) -> PureState:
    """Product state |a>|b> of two normalized local kets."""
    va = np.asarray(a, dtype=complex).reshape(-1)
    vb = np.asarray(b, dtype=complex).reshape(-1)
    for name, v in (("a", va), ("b", vb)):
        if abs(float(np.vdot(v, v).real) - 1.0) > NORM_ATOL:
            raise ValueError(f"input {name} is not normalized")
    return PureState(va.size, vb.size, np.kron(va, vb))


def fidelity_pure(psi: PureState, phi: PureState) -> float:
    """Squared overlap |<phi|psi>|^2 of two pure states."""
    if (psi.dim_a, psi.dim_b) != (phi.dim_a, phi.dim_b):
        raise ValueError("states live on different bipartite spaces")
    return float(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2)


def _leading_phase(vec: np.ndarray, tol: float = 1e-12) -> complex:
    idx = np.flatnonzero(np.abs(vec) > tol)
    if idx.size == 0:
        return 1.0 + 0.0j
    z = vec[idx[0]]
    return z / abs(z)


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    """Schmidt decomposition via SVD of the coefficient matrix.

    Coefficients come back sorted nonincreasing.  Phases are fixed for
    reproducibility: each A-side vector has its leading nonzero amplitude
    real and nonnegative.  For nonzero coefficients the B-side vector absorbs
    the compensating phase so the Schmidt sum reproduces the input exactly;
    vectors attached to (numerically) zero coefficients are free, so both
    sides are canonicalized independently.
    """
    c = psi.coefficient_matrix
    u, s, vh = np.linalg.svd(c, full_matrices=False)
    basis_a = np.ascontiguousarray(u.T)
    basis_b = np.ascontiguousarray(vh)
    for k in range(s.size):
        ph = _leading_phase(basis_a[k])
        basis_a[k] = basis_a[k] / ph
        if s[k] > 1e-12:
            basis_b[k] = basis_b[k] * ph
        else:
            basis_b[k] = basis_b[k] / _leading_phase(basis_b[k])
    return SchmidtDecomposition(
        dim_a=psi.dim_a,
        dim_b=psi.dim_b,
        coefficients=s,
        basis_a=basis_a,
        basis_b=basis_b,
        swapped=psi.dim_a > psi.dim_b,
    )


def expectation(w: HermitianObservable, state: PureState | DensityOperator) -> float:
    """Expectation value <psi|W|psi> or Tr(W rho)."""
    if (w.dim_a, w.dim_b) != (state.dim_a, state.dim_b):
        raise ValueError("observable and state live on different bipartite spaces")
    if isinstance(state, PureState):
        value = complex(np.vdot(state.amplitudes, w.matrix @ state.amplitudes))
    else:
        value = complex(np.einsum("ij,ji->", w.matrix, state.matrix))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation value has imaginary residue {value.imag!r}")
    return float(value.real)


def partial_trace(rho: DensityOperator, side: str) -> np.ndarray:
    """Trace out subsystem ``side`` ("A" or "B"); returns the reduced matrix."""
    r4 = rho.matrix.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    if side == "A":
        return np.einsum("ijil->jl", r4)
    if side == "B":
        return np.einsum("ijkj->ik", r4)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def _joint_kraus(ch: KrausChannel, dim_a: int, dim_b: int) -> list[np.ndarray]:
    d = ch.local_dim
    if ch.acting_side == "A":
        if d != dim_a:
            raise ValueError(f"Kraus dimension {d} does not match dim_a = {dim_a}")
        return [np.kron(k, np.eye(dim_b)) for k in ch.operators]
    if ch.acting_side == "B":
        if d != dim_b:
            raise ValueError(f"Kraus dimension {d} does not match dim_b = {dim_b}")
        return [np.kron(np.eye(dim_a), k) for k in ch.operators]
    if dim_a != dim_b or d != dim_a:
        raise ValueError("both-local channels require dim_a == dim_b == Kraus dimension")
    return [np.kron(k1, k2) for k1 in ch.operators for k2 in ch.operators]


def apply_channel(rho: DensityOperator, ch: KrausChannel) -> DensityOperator:
    """Apply sum_K K rho K^dag; trace and positivity are preserved."""
    ops = _joint_kraus(ch, rho.dim_a, rho.dim_b)
    out = sum(k @ rho.matrix @ k.conj().T for k in ops)
    out = 0.5 * (out + out.conj().T)  # scrub roundoff asymmetry
    return DensityOperator(rho.dim_a, rho.dim_b, out)


def partial_transpose(rho: DensityOperator) -> np.ndarray:
    """Partial transpose over subsystem B."""
    r4 = rho.matrix.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    n = rho.dim_a * rho.dim_b
    return r4.transpose(0, 3, 2, 1).reshape(n, n)


def ppt_entangled(rho: DensityOperator) -> bool:
    """True iff the partial transpose over B has a negative eigenvalue.

    For 2x2 and 2x3 systems this is equivalent to entanglement; for larger
    dimensions a True answer still certifies entanglement but False is
    inconclusive.
    """
    return float(np.linalg.eigvalsh(partial_transpose(rho))[0]) < -NPT_EIG_ATOL


def dephasing_channel(p: float, acting_side: str = "both-local") -> KrausChannel:
    """Single-qubit Z-dephasing rho -> (1-p) rho + p Z rho Z."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing probability must lie in [0, 1], got {p!r}")
    k0 = np.sqrt(1.0 - p) * np.eye(2, dtype=complex)
    k1 = np.sqrt(p) * np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return KrausChannel(operators=(k0, k1), acting_side=acting_side)
