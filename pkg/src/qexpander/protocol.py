"""Merlin-Arthur verification of non-expander instances.

Merlin encodes a traceless matrix A (with ||A||_F = 1) as the state
|psi_A> = sum_ij a_ij |i>|j> on the doubled space.  Arthur runs two checks:

1. Orthogonality to |phi> = vec(I)/sqrt(N), which certifies tr A = 0
   (tr A = sqrt(N) <phi|psi_A>).
2. An estimate of <psi_A| W^dag W |psi_A> = ||Phi(A)||_F^2, assembled from
   Hadamard tests of the pair unitaries

       V_{d,e} = (U_d^dag (x) U_d^T)(U_e (x) conj(U_e))

   through the identity (for a D-regular channel)

       <psi|W^dag W|psi> = 1/D + (2/D^2) sum_{d<e} Re <psi|V_{d,e}|psi>.

Arthur accepts when the estimate exceeds alpha^2 minus a margin of three
propagated standard errors.  Only real parts enter the identity, so the
plain (no S-gate) Hadamard test suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import Channel
from .linalg import phi_state, rng_from
from .spectral import NonExpanderInstance, spectral_gap

#: Sentinel shot counts meaning "exact expectation values".
EXACT = None


@dataclass(frozen=True, eq=False)
class HadamardTestSpec:
    """One pair unitary V_{d,e} on the doubled space, with d < e."""

    d: int
    e: int
    unitary: np.ndarray


def pair_unitary(channel: Channel, d: int, e: int) -> np.ndarray:
    """V_{d,e} = (U_d (x) conj(U_d))^dag (U_e (x) conj(U_e))."""
    ud, ue = channel.kraus[d], channel.kraus[e]
    wd = np.kron(ud, ud.conj())
    we = np.kron(ue, ue.conj())
    return wd.conj().T @ we


def hadamard_pair(channel: Channel, d: int, e: int) -> HadamardTestSpec:
    if not 0 <= d < e < channel.degree:
        raise ValueError(f"need 0 <= d < e < {channel.degree}, got ({d}, {e})")
    return HadamardTestSpec(d, e, pair_unitary(channel, d, e))


def _check_unit_vector(psi: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state is not normalized: ||psi|| = {norm!r}")
    return psi


def hadamard_test_probability(v: np.ndarray, psi: np.ndarray) -> float:
    """Exact Pr(ancilla = 0) = (1 + Re<psi|V|psi>)/2 of the Hadamard test."""
    psi = _check_unit_vector(psi)
    v = np.asarray(v, dtype=complex)
    if v.shape != (psi.size, psi.size):
        raise ValueError(f"unitary shape {v.shape} does not match state length {psi.size}")
    return 0.5 * (1.0 + float(np.real(np.vdot(psi, v @ psi))))


def sample_hadamard_test(v: np.ndarray, psi: np.ndarray, shots: int, seed: int = 0) -> float:
    """Fraction of 0 outcomes over `shots` Bernoulli draws; deterministic
    given the seed.  Standard error is at most sqrt(1/(4 shots))."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p0 = hadamard_test_probability(v, psi)
    rng = seed if isinstance(seed, np.random.Generator) else rng_from(seed)
    return float(rng.binomial(shots, min(max(p0, 0.0), 1.0))) / shots


def estimate_contraction_sq(
    channel: Channel,
    psi: np.ndarray,
    shots_per_pair: int | None = EXACT,
    seed: int = 0,
) -> float:
    """Estimate <psi|W^dag W|psi> for a D-regular channel.

    With ``shots_per_pair=None`` the D(D-1)/2 Hadamard tests are evaluated
    exactly, and the result equals ||Phi(unvec(psi))||_F^2 to rounding.
    Sampled mode derives one stream per (d, e) pair from (seed, d, e), so
    results are independent of evaluation order.
    """
    if not hasattr(channel, "kraus"):
        raise ValueError(
            "the verification protocol needs a channel with explicit Kraus operators; "
            "composite channels expose no pair unitaries"
        )
    if not channel.is_regular:
        raise ValueError("the pair-sum identity requires a D-regular channel (uniform weights)")
    psi = _check_unit_vector(psi)
    deg = channel.degree
    total = 1.0 / deg
    for d in range(deg):
        for e in range(d + 1, deg):
            v = pair_unitary(channel, d, e)
            if shots_per_pair is EXACT or shots_per_pair == math.inf:
                frac0 = hadamard_test_probability(v, psi)
            else:
                frac0 = sample_hadamard_test(v, psi, shots_per_pair, seed=rng_from(seed, d, e))
            real_part = 2.0 * frac0 - 1.0
            total += (2.0 / deg**2) * real_part
    return total


def check_orthogonality(psi: np.ndarray, tol: float = 1e-9) -> bool:
    """Exact check |<phi|psi>| <= tol certifying tr(unvec(psi)) = 0."""
    psi = _check_unit_vector(psi)
    phi = phi_state(int(round(np.sqrt(psi.size))))
    return bool(abs(np.vdot(phi, psi)) <= tol)


def sample_orthogonality(psi: np.ndarray, seed: int = 0) -> tuple[bool, np.ndarray]:
    """Projective measurement of |phi><phi| versus its complement.

    Accepts (returns True) on the complement outcome, with probability
    1 - |<phi|psi>|^2, and returns the renormalized post-measurement state.
    On the |phi> outcome the check fails and |phi> itself is returned.
    """
    psi = _check_unit_vector(psi)
    phi = phi_state(int(round(np.sqrt(psi.size))))
    overlap = np.vdot(phi, psi)
    p_reject = min(max(abs(overlap) ** 2, 0.0), 1.0)
    rng = seed if isinstance(seed, np.random.Generator) else rng_from(seed)
    if rng.random() < p_reject:
        return False, phi.copy()
    post = psi - overlap * phi
    norm = np.linalg.norm(post)
    if norm < 1e-15:
        return False, phi.copy()
    return True, post / norm


@dataclass(frozen=True)
class VerifierOutcome:
    accepted: bool
    estimated_contraction_sq: float
    orthogonality_passed: bool
    samples_used: int
    confidence: float


def contraction_standard_error(degree: int, shots_per_pair: int) -> float:
    """Worst-case standard error of the assembled D-regular estimate.

    Each pair contributes (2/D^2) Re_{d,e} with Var(Re) <= 1/shots, so
    Var(estimate) <= (4/D^4) * D(D-1)/2 * 1/shots = 2(D-1)/(D^3 shots).
    """
    return math.sqrt(2.0 * (degree - 1) / (degree**3 * shots_per_pair))


def arthur_verify(
    instance: NonExpanderInstance,
    psi: np.ndarray,
    shots: int | None = EXACT,
    seed: int = 0,
) -> VerifierOutcome:
    """Run Arthur's full check on a claimed witness state.

    Accepts iff the (sampled) orthogonality projection succeeds and the
    contraction estimate exceeds alpha^2 - margin, where margin is three
    propagated standard errors (zero in exact mode).  `shots` counts
    Hadamard-test shots per Kraus pair.
    """
    channel = instance.channel
    psi = _check_unit_vector(psi)
    if shots is EXACT:
        orth = check_orthogonality(psi)
        post = psi
        samples = 0
        margin = 0.0
        confidence = 1.0
    else:
        orth, post = sample_orthogonality(psi, seed=rng_from(seed))
        samples = 1 + shots * channel.degree * (channel.degree - 1) // 2
        margin = 3.0 * contraction_standard_error(channel.degree, shots)
        confidence = 0.9973  # two-sided 3-sigma normal level
    if not orth:
        return VerifierOutcome(
            accepted=False,
            estimated_contraction_sq=0.0,
            orthogonality_passed=False,
            samples_used=samples,
            confidence=confidence,
        )
    estimate = estimate_contraction_sq(channel, post, shots_per_pair=shots, seed=seed)
    accepted = estimate > instance.alpha**2 - margin
    return VerifierOutcome(
        accepted=accepted,
        estimated_contraction_sq=estimate,
        orthogonality_passed=True,
        samples_used=samples,
        confidence=confidence,
    )


def merlin_witness(channel, method: str = "auto", **kwargs) -> np.ndarray:
    """The optimal honest Merlin: the spectral module's gap witness."""
    return spectral_gap(channel, method=method, **kwargs).witness


def suggested_shots(instance: NonExpanderInstance) -> int:
    """Shot budget 100/s^2 from the squared-threshold separation
    s = alpha^2 - beta^2."""
    s = instance.alpha**2 - instance.beta**2
    return max(1, math.ceil(100.0 / s**2))
