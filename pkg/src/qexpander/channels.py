"""Unital channels built from unitary Kraus operators.

A channel here is a weighted mixture of unitary conjugations,

    Phi(A) = sum_d w_d U_d A U_d^dag,      sum_d w_d = 1,  w_d >= 0,

acting on operators over m qubits.  The D-regular case (all weights 1/D)
is the quantum-expander form; non-uniform weights arise from weak-coupling
thermalization models.  Every such channel is trace preserving and unital.

Two representations coexist:

* :class:`Channel` stores the Kraus list explicitly.
* :class:`CompositeChannel` is a lazy composition of stages, applied
  first-to-last.  Its Kraus set (all weighted products) is never
  materialized; its superoperator is the product of the stage
  superoperators.  Power compositions of expanders and the hardness
  reduction use this form, since their flattened degree grows
  geometrically.

Both expose the same surface: ``dim``, ``qubits``, ``degree``,
``is_regular``, ``apply``, ``adjoint`` and ``superoperator``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import ATOL, check_unitary, frobenius, haar_unitary, paulis, qubits_for_dim


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _freeze_float(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Channel:
    """Weighted mixture of unitary conjugations on an m-qubit space.

    Invariants checked at construction: all elements unitary
    (||U^dag U - I||_F <= 1e-10 * N), weights nonnegative and summing to 1
    within 1e-12, and unitality ||Phi(I) - I||_F <= 1e-10 (automatic for
    unitary Kraus mixtures, asserted anyway).
    """

    kraus: tuple[np.ndarray, ...]
    weights: np.ndarray

    def __post_init__(self):
        if not self.kraus:
            raise ValueError("channel needs at least one Kraus operator")
        elements = tuple(_freeze(check_unitary(u)) for u in self.kraus)
        dim = elements[0].shape[0]
        if any(u.shape[0] != dim for u in elements):
            raise ValueError("all Kraus operators must share one dimension")
        qubits_for_dim(dim)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size != len(elements):
            raise ValueError(f"{w.size} weights for {len(elements)} Kraus operators")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "kraus", elements)
        object.__setattr__(self, "weights", _freeze_float(w))
        defect = frobenius(self.apply(np.eye(dim)) - np.eye(dim))
        if defect > ATOL:
            raise ValueError(f"channel is not unital: ||Phi(I) - I||_F = {defect:.3e}")

    @classmethod
    def uniform(cls, kraus) -> "Channel":
        """D-regular channel: uniform weights 1/D."""
        kraus = tuple(kraus)
        return cls(kraus, np.full(len(kraus), 1.0 / len(kraus)))

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def qubits(self) -> int:
        return qubits_for_dim(self.dim)

    @property
    def degree(self) -> int:
        return len(self.kraus)

    @property
    def is_regular(self) -> bool:
        """True iff all weights equal 1/D."""
        return bool(np.allclose(self.weights, 1.0 / self.degree, rtol=0, atol=1e-12))

    def apply(self, a: np.ndarray) -> np.ndarray:
        """Phi(A) = sum_d w_d U_d A U_d^dag.  Summation order is fixed."""
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.dim, self.dim):
            raise ValueError(f"operator shape {a.shape} does not match channel dimension {self.dim}")
        out = np.zeros_like(a)
        for w, u in zip(self.weights, self.kraus):
            out += w * (u @ a @ u.conj().T)
        return out

    def adjoint(self) -> "Channel":
        """The Hilbert-Schmidt adjoint: same weights, Kraus set {U_d^dag}."""
        return Channel(tuple(u.conj().T for u in self.kraus), self.weights)

    def superoperator(self) -> np.ndarray:
        """Dense N^2 x N^2 matrix W = sum_d w_d U_d (x) conj(U_d).

        Satisfies W vec(A) = vec(Phi(A)) under row-major vectorization.
        """
        n2 = self.dim**2
        w_mat = np.zeros((n2, n2), dtype=complex)
        for w, u in zip(self.weights, self.kraus):
            w_mat += w * np.kron(u, u.conj())
        return w_mat

    def element_sum(self) -> np.ndarray:
        """sum_d U_d over the signed operation-element list (no weights)."""
        return np.sum(self.kraus, axis=0)


@dataclass(frozen=True, eq=False)
class CompositeChannel:
    """Composition of channels, applied first-to-last.

    Equivalent to the channel whose Kraus set is all weighted products of
    the stage Kraus sets; the products are never materialized.  ``degree``
    is the product of stage degrees (a plain Python int, possibly huge).
    """

    stages: tuple = field(default_factory=tuple)

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise ValueError("composite channel needs at least one stage")
        dim = stages[0].dim
        if any(s.dim != dim for s in stages):
            raise ValueError("all stages must share one dimension")
        object.__setattr__(self, "stages", stages)

    @property
    def dim(self) -> int:
        return self.stages[0].dim

    @property
    def qubits(self) -> int:
        return qubits_for_dim(self.dim)

    @property
    def degree(self) -> int:
        d = 1
        for s in self.stages:
            d *= s.degree
        return d

    @property
    def is_regular(self) -> bool:
        return all(s.is_regular for s in self.stages)

    def apply(self, a: np.ndarray) -> np.ndarray:
        for s in self.stages:
            a = s.apply(a)
        return a

    def adjoint(self) -> "CompositeChannel":
        return CompositeChannel(tuple(s.adjoint() for s in reversed(self.stages)))

    def superoperator(self) -> np.ndarray:
        out = self.stages[0].superoperator()
        for s in self.stages[1:]:
            out = s.superoperator() @ out
        return out


#: Cap on materialized Kraus products in :func:`compose`.
COMPOSE_TERM_CAP = 4096


def compose(outer, inner, max_terms: int = COMPOSE_TERM_CAP) -> Channel:
    """Materialized composition: (outer . inner)(A) = outer(inner(A)).

    The Kraus set is the weighted products {U_o U_i}.  Beyond `max_terms`
    products, use :class:`CompositeChannel` instead.
    """
    if outer.dim != inner.dim:
        raise ValueError(f"dimension mismatch: {outer.dim} vs {inner.dim}")
    terms = outer.degree * inner.degree
    if terms > max_terms:
        raise ValueError(
            f"composition would materialize {terms} Kraus terms (cap {max_terms}); "
            "use CompositeChannel for the lazy form"
        )
    kraus = []
    weights = []
    for wo, uo in zip(outer.weights, outer.kraus):
        for wi, ui in zip(inner.weights, inner.kraus):
            kraus.append(uo @ ui)
            weights.append(wo * wi)
    return Channel(tuple(kraus), np.array(weights))


def tensor(left: Channel, right: Channel) -> Channel:
    """Tensor product channel acting on the combined space."""
    kraus = []
    weights = []
    for wl, ul in zip(left.weights, left.kraus):
        for wr, ur in zip(right.weights, right.kraus):
            kraus.append(np.kron(ul, ur))
            weights.append(wl * wr)
    return Channel(tuple(kraus), np.array(weights))


def channel_power(channel, r: int) -> CompositeChannel:
    """The r-fold composition Phi^r as a lazy composite."""
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    return CompositeChannel((channel,) * r)


def identity_channel(qubits: int = 1) -> Channel:
    return Channel.uniform((np.eye(2**qubits, dtype=complex),))


def complete_depolarizer(signed: bool = True) -> Channel:
    """The single-qubit complete depolarizer, D(sigma) = I tr(sigma)/2.

    With ``signed=True`` (default) the operation elements are
    {I, X, Y, Z, -I, -X, -Y, -Z}/8, which additionally satisfy the
    zero-sum condition sum_d U_d = 0 needed for controlled use.
    """
    base = list(paulis())
    if signed:
        base = base + [-p for p in base]
    return Channel.uniform(tuple(base))


def random_unitary_channel(qubits: int, degree: int, rng: np.random.Generator) -> Channel:
    """D-regular channel with Haar-random elements."""
    dim = 2**qubits
    return Channel.uniform(tuple(haar_unitary(dim, rng) for _ in range(degree)))


def unitality_defect(channel) -> float:
    eye = np.eye(channel.dim, dtype=complex)
    return frobenius(channel.apply(eye) - eye)


def zero_sum_defect(channel) -> float:
    """||sum_d U_d||_F over the operation-element list.

    Zero for sign-doubled sets; finite composites report the worst stage.
    """
    if isinstance(channel, CompositeChannel):
        return max(zero_sum_defect(s) for s in channel.stages)
    return frobenius(channel.element_sum())
