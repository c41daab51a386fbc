"""Fidelity-witness construction, normal forms, detection volume and optimality.

A fidelity witness is the observable ``alpha*I - |psi><psi|`` built from an
entangled pure seed state, where alpha is the largest squared overlap of the
seed with any product state (equal to its largest squared Schmidt
coefficient).  Any Hermitian observable not proportional to the identity has
a unique rescaled normal form ``alpha*I - rho`` with rho a density operator;
``lambda - alpha`` (lambda the top eigenvalue of rho) measures the volume of
states the witness detects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .paulis import PAIR_LABELS, pauli_pair, pauli_sum
from .states import (
    DensityOperator,
    HermitianObservable,
    PureState,
    SchmidtDecomposition,
    schmidt_decompose,
)

PRODUCT_ALPHA_THRESHOLD = 1.0 - 1e-9
FREE_PHASE_P_ATOL = 1e-12
WITNESS_NEG_ATOL = 1e-9


@dataclass(frozen=True)
class FidelityWitness:
    """Witness alpha*I - |psi><psi| together with its seed state."""

    alpha: float
    seed_state: PureState
    observable: HermitianObservable

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        p_max = float(schmidt_decompose(self.seed_state).coefficients[0] ** 2)
        if abs(self.alpha - p_max) > 1e-12:
            raise ValueError("alpha does not match the seed state's largest squared Schmidt coefficient")
        evals = np.linalg.eigvalsh(self.observable.matrix)
        negative = evals[evals < -1e-10]
        if negative.size != 1 or abs(float(negative[0]) - (self.alpha - 1.0)) > 1e-10:
            raise ValueError("observable must have exactly one negative eigenvalue equal to alpha - 1")


@dataclass(frozen=True)
class WitnessNormalForm:
    """Unique decomposition W = scale*(alpha*I - rho) of a Hermitian observable.

    beta is the largest eigenvalue of the source W, scale = beta*delta - Tr W,
    alpha = beta/scale and lambda_ is the largest eigenvalue of rho.
    """

    alpha: float
    rho: DensityOperator
    beta: float
    lambda_: float
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("normal-form scale must be positive")
        if abs(self.alpha - self.beta / self.scale) > 1e-12:
            raise ValueError("alpha is inconsistent with beta / scale")

    @property
    def detection_volume(self) -> float:
        return self.lambda_ - self.alpha

    def to_observable(self) -> HermitianObservable:
        """Rebuild the source observable scale*(alpha*I - rho)."""
        n = self.rho.dim_a * self.rho.dim_b
        mat = self.scale * (self.alpha * np.eye(n) - self.rho.matrix)
        return HermitianObservable(self.rho.dim_a, self.rho.dim_b, mat)


@dataclass(frozen=True)
class MaxEntangledFamily:
    """Closest maximally entangled states to a seed, built on its Schmidt bases.

    Terms with p_i = 0 carry a free phase; all other phases are pinned to 1.
    ``representative`` realizes one family member.
    """

    dim_a: int
    dim_b: int
    basis_a: np.ndarray
    basis_b: np.ndarray
    free_phase_indices: frozenset[int]

    def __post_init__(self):
        ba = np.array(self.basis_a, dtype=complex)
        bb = np.array(self.basis_b, dtype=complex)
        d = min(self.dim_a, self.dim_b)
        if ba.shape != (d, self.dim_a) or bb.shape != (d, self.dim_b):
            raise ValueError("family basis arrays have inconsistent shapes")
        if not all(0 <= i < d for i in self.free_phase_indices):
            raise ValueError("free phase indices out of range")
        ba.setflags(write=False)
        bb.setflags(write=False)
        object.__setattr__(self, "basis_a", ba)
        object.__setattr__(self, "basis_b", bb)
        object.__setattr__(self, "free_phase_indices", frozenset(self.free_phase_indices))

    @property
    def schmidt_count(self) -> int:
        return self.basis_a.shape[0]

    @property
    def base_terms(self) -> tuple:
        """The d pairs (|a_i>, |b_i>) spanning the family."""
        return tuple((self.basis_a[k], self.basis_b[k]) for k in range(self.schmidt_count))

    def representative(self, phases: Mapping[int, float] | None = None, strict: bool = False) -> PureState:
        """Family member sum_i e^{i phi_i}/sqrt(d) |a_i>|b_i|.

        ``phases`` assigns angles to free indices; everything else is fixed at
        phase 1.  With ``strict`` every free index must be supplied.
        """
        d = self.schmidt_count
        given = dict(phases or {})
        constrained = set(given) - self.free_phase_indices
        if constrained:
            raise ValueError(f"phases supplied for constrained indices {sorted(constrained)}")
        if strict:
            missing = self.free_phase_indices - set(given)
            if missing:
                raise ValueError(f"missing phases for free indices {sorted(missing)}")
        phase_vec = np.zeros(d)
        for idx, value in given.items():
            phase_vec[idx] = value
        weights = np.exp(1j * phase_vec) / np.sqrt(d)
        amp = np.einsum("k,ki,kj->ij", weights, self.basis_a, self.basis_b)
        return PureState(self.dim_a, self.dim_b, amp.reshape(-1))


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of verify_witness."""

    min_product_expectation: float
    min_eigenvalue: float
    is_witness: bool
    approximate: bool = False


def alpha_from_state(psi: PureState) -> float:
    """Largest squared Schmidt coefficient: the maximal product-state overlap."""
    return float(schmidt_decompose(psi).coefficients[0] ** 2)


def _fidelity_observable(alpha: float, psi: PureState) -> HermitianObservable:
    n = psi.dim_a * psi.dim_b
    mat = alpha * np.eye(n) - np.outer(psi.amplitudes, psi.amplitudes.conj())
    return HermitianObservable(psi.dim_a, psi.dim_b, mat)


def build_fidelity_witness(psi: PureState) -> FidelityWitness:
    """Fidelity witness alpha*I - |psi><psi| of an entangled seed state."""
    alpha = alpha_from_state(psi)
    if alpha >= PRODUCT_ALPHA_THRESHOLD:
        raise ValueError(
            "seed state is a product state within tolerance (alpha ~ 1); "
            "the resulting observable would not be an entanglement witness"
        )
    return FidelityWitness(alpha=alpha, seed_state=psi, observable=_fidelity_observable(alpha, psi))


def normal_form(w: HermitianObservable) -> WitnessNormalForm:
    """Unique rescaling W/(beta*delta - Tr W) = alpha*I - rho.

    Rejects observables proportional to the identity, which cannot witness
    entanglement.
    """
    n = w.dim_a * w.dim_b
    trace = float(np.trace(w.matrix).real)
    if np.max(np.abs(w.matrix - (trace / n) * np.eye(n))) <= 1e-10:
        raise ValueError("observable is proportional to the identity and cannot be an entanglement witness")
    evals = np.linalg.eigvalsh(w.matrix)
    beta = float(evals[-1])
    scale = beta * n - trace
    rho = DensityOperator(w.dim_a, w.dim_b, (beta * np.eye(n) - w.matrix) / scale)
    lambda_ = (beta - float(evals[0])) / scale
    return WitnessNormalForm(alpha=beta / scale, rho=rho, beta=beta, lambda_=lambda_, scale=scale)


def detection_volume(nf: WitnessNormalForm) -> float:
    """Size lambda - alpha of the detected region around the normal-form rho."""
    return nf.detection_volume


def closest_max_entangled(psi: PureState) -> MaxEntangledFamily:
    """Family of maximally entangled states closest to ``psi`` in fidelity.

    Built on the Schmidt bases of psi; indices whose p_i vanishes keep a free
    phase, so the family has one member exactly when the Schmidt number
    equals min(dim_a, dim_b).
    """
    sd = schmidt_decompose(psi)
    free = frozenset(int(i) for i in np.flatnonzero(sd.probabilities <= FREE_PHASE_P_ATOL))
    return MaxEntangledFamily(
        dim_a=psi.dim_a,
        dim_b=psi.dim_b,
        basis_a=sd.basis_a,
        basis_b=sd.basis_b,
        free_phase_indices=free,
    )


def optimal_witness(
    psi: PureState,
    phases: Mapping[int, float] | None = None,
    strict: bool = False,
) -> FidelityWitness:
    """Fidelity witness (1/d)*I - |theta><theta| from the closest family member."""
    family = closest_max_entangled(psi)
    theta_state = family.representative(phases, strict=strict)
    alpha = 1.0 / family.schmidt_count
    return FidelityWitness(
        alpha=alpha,
        seed_state=theta_state,
        observable=_fidelity_observable(alpha, theta_state),
    )


def expectation_gap(psi: PureState) -> float:
    """Expectation -(1/d) sum_{i != j} sqrt(p_i p_j) of the optimal witness on psi."""
    sd = schmidt_decompose(psi)
    s = float(np.sum(sd.coefficients))
    return -(s * s - 1.0) / sd.coefficients.size


def pauli_decompose(w: HermitianObservable) -> dict[str, float]:
    """Two-qubit Pauli coefficients c_ab = Tr(W sigma_a (x) sigma_b)/4."""
    if (w.dim_a, w.dim_b) != (2, 2):
        raise ValueError("Pauli decomposition is defined for two-qubit observables")
    coeffs = {}
    for label in PAIR_LABELS:
        value = complex(np.einsum("ij,ji->", w.matrix, pauli_pair(label))) / 4.0
        if abs(value.imag) > 1e-10:
            raise ValueError(f"coefficient {label} has imaginary residue {value.imag!r}")
        coeffs[label] = float(value.real)
    return coeffs


def pauli_compose(coefficients: Mapping[str, float]) -> HermitianObservable:
    """Inverse of pauli_decompose: assemble sum c_ab sigma_a (x) sigma_b."""
    unknown = set(coefficients) - set(PAIR_LABELS)
    if unknown:
        raise ValueError(f"unknown Pauli pair labels: {sorted(unknown)}")
    return HermitianObservable(2, 2, pauli_sum(coefficients))


def _bloch_kets(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Qubit kets cos(t/2)|0> + e^{i phi} sin(t/2)|1>, stacked in rows."""
    return np.stack(
        [np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)],
        axis=-1,
    )


def _conditional_matrix(w4: np.ndarray, a: np.ndarray) -> np.ndarray:
    """B-side matrix M(a)_{jl} = <a| (x) <j| W |a> (x) |l>."""
    return np.einsum("i,ijkl,k->jl", a.conj(), w4, a)


def _alternating_descent(w4: np.ndarray, a0: np.ndarray, max_iter: int = 200, tol: float = 1e-14) -> float:
    """Minimize <a|<b|W|a>|b> by exact alternating eigenvector updates."""
    a = a0
    best = np.inf
    for _ in range(max_iter):
        mb = _conditional_matrix(w4, a)
        evals_b, evecs_b = np.linalg.eigh(mb)
        b = evecs_b[:, 0]
        ma = np.einsum("j,ijkl,l->ik", b.conj(), w4, b)
        evals_a, evecs_a = np.linalg.eigh(ma)
        a = evecs_a[:, 0]
        value = float(evals_a[0])
        if best - value < tol:
            return min(best, value)
        best = value
    return best


def verify_witness(w: HermitianObservable, grid: int = 64, refine_seeds: int = 8) -> WitnessReport:
    """Check the two defining witness properties of an observable.

    Minimizes the product-state expectation over a Bloch-angle seed grid on
    side A (the optimal B vector for a fixed |a> is an eigenvector problem
    and is solved exactly), then refines the best seeds by alternating exact
    minimization.  is_witness requires a nonnegative product minimum and at
    least one strictly negative eigenvalue.  For anything larger than two
    qubits the search uses seeded random product starts and the report is
    flagged approximate.
    """
    min_eig = float(np.linalg.eigvalsh(w.matrix)[0])
    w4 = w.matrix.reshape(w.dim_a, w.dim_b, w.dim_a, w.dim_b)

    if (w.dim_a, w.dim_b) == (2, 2):
        t = (np.arange(grid) + 0.5) * np.pi / grid
        p = np.arange(grid) * 2.0 * np.pi / grid
        tt, pp = np.meshgrid(t, p, indexing="ij")
        kets = _bloch_kets(tt.reshape(-1), pp.reshape(-1))
        mats = np.einsum("ni,ijkl,nk->njl", kets.conj(), w4, kets)
        grid_minima = np.linalg.eigvalsh(mats)[:, 0]
        order = np.argsort(grid_minima)
        seeds = [kets[i] for i in order[:refine_seeds]]
        seeds.extend(
            np.asarray(v, dtype=complex)
            for v in (
                [1, 0],
                [0, 1],
                [2**-0.5, 2**-0.5],
                [2**-0.5, -(2**-0.5)],
                [2**-0.5, 1j * 2**-0.5],
                [2**-0.5, -1j * 2**-0.5],
            )
        )
        approximate = False
    else:
        rng = np.random.default_rng(0)
        seeds = []
        for _ in range(max(64, refine_seeds)):
            v = rng.normal(size=(2, w.dim_a)).view(complex).reshape(-1)[: w.dim_a]
            v = rng.normal(size=w.dim_a) + 1j * rng.normal(size=w.dim_a)
            seeds.append(v / np.linalg.norm(v))
        approximate = True

    min_product = min(_alternating_descent(w4, a) for a in seeds)
    is_witness = (min_product >= -WITNESS_NEG_ATOL) and (min_eig < -WITNESS_NEG_ATOL)
    return WitnessReport(
        min_product_expectation=min_product,
        min_eigenvalue=min_eig,
        is_witness=is_witness,
        approximate=approximate,
    )
