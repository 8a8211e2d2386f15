"""Dense complex linear algebra helpers shared across the toolkit.

Conventions used everywhere:

* Operators on m qubits are dense (2^m x 2^m) complex128 arrays.
* Vectorization is row-major: the amplitude at index i*N + j of vec(A)
  equals A[i, j], i.e. vec(A) pairs |i> (x) |j> with the entry a_ij.
  With this choice, vec(U A V^T) = (U (x) V) vec(A), so a unitary
  conjugation A -> U A U^dag acts on vec(A) as U (x) conj(U).
* Qubit 0 is the most significant bit of a basis-state index.
"""

from __future__ import annotations

import numpy as np

#: Default absolute tolerance on Frobenius-norm checks.  Chosen for
#: double-precision accumulation over sums of at most ~2^14 terms.
ATOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

for _p in (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z):
    _p.setflags(write=False)


def paulis() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return the single-qubit Pauli basis (sigma_0..sigma_3) = (I, X, Y, Z)."""
    return PAULI_I, PAULI_X, PAULI_Y, PAULI_Z


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm sqrt(sum_ij |a_ij|^2) = sqrt(tr(A^dag A))."""
    return float(np.linalg.norm(np.asarray(a)))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    return complex(np.vdot(a, b))


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def unitarity_defect(u: np.ndarray) -> float:
    """||U^dag U - I||_F, zero iff U is unitary."""
    u = np.asarray(u)
    return frobenius(u.conj().T @ u - np.eye(u.shape[0]))


def check_unitary(u: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Validate that a square matrix is unitary; returns it as complex128.

    The default tolerance scales with the dimension, ||U^dag U - I||_F <= 1e-10 * N.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    n = u.shape[0]
    if tol is None:
        tol = 1e-10 * n
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"matrix is not unitary: ||U^dag U - I||_F = {defect:.3e}")
    return u


def check_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def qubits_for_dim(dim: int) -> int:
    """Number of qubits m with 2^m = dim; raises if dim is not a power of two."""
    m = int(dim).bit_length() - 1
    if dim <= 0 or (1 << m) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return m


def vec(a: np.ndarray) -> np.ndarray:
    """Row-major vectorization: vec(A)[i*N + j] = A[i, j]."""
    return check_square(a).reshape(-1).copy()


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`; rejects vectors of non-square length."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape(n, n).copy()


def phi_state(dim: int) -> np.ndarray:
    """The maximally entangled unit vector |phi> = vec(I)/sqrt(N)."""
    return vec(np.eye(dim, dtype=complex)) / np.sqrt(dim)


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def embed(op: np.ndarray, qubits: tuple[int, ...] | list[int], num_qubits: int) -> np.ndarray:
    """Lift an operator acting on the given qubits to the full m-qubit space.

    `op` is a 2^k x 2^k matrix whose tensor factors correspond, in order, to
    `qubits` (each an index in [0, num_qubits), qubit 0 = most significant bit).
    """
    qubits = tuple(int(q) for q in qubits)
    k = len(qubits)
    if len(set(qubits)) != k:
        raise ValueError(f"duplicate qubit indices in {qubits}")
    if any(q < 0 or q >= num_qubits for q in qubits):
        raise ValueError(f"qubit indices {qubits} out of range for {num_qubits} qubits")
    op = check_square(op)
    if op.shape[0] != 2**k:
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    m = num_qubits
    rest = [q for q in range(m) if q not in qubits]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    # `full` is ordered (qubits..., rest...); gather into natural qubit order:
    # idx[x] is the index in `full`'s ordering of the natural basis state x.
    order = qubits + tuple(rest)
    idx = np.zeros(2**m, dtype=np.intp)
    for pos, q in enumerate(order):
        bit = (np.arange(2**m) >> (m - 1 - q)) & 1
        idx |= bit << (m - 1 - pos)
    return full[np.ix_(idx, idx)]


def bit_projector(num_qubits: int, qubit: int, value: int) -> np.ndarray:
    """Projector onto basis states whose bit at `qubit` equals `value`."""
    if value not in (0, 1):
        raise ValueError(f"bit value must be 0 or 1, got {value}")
    n = 2**num_qubits
    bits = (np.arange(n) >> (num_qubits - 1 - qubit)) & 1
    return np.diag((bits == value).astype(complex))


def pattern_projector(num_qubits: int, qubits: tuple[int, ...], values: tuple[int, ...]) -> np.ndarray:
    """Projector onto basis states matching the given bit pattern."""
    if len(qubits) != len(values):
        raise ValueError("qubits and values must have equal length")
    n = 2**num_qubits
    mask = np.ones(n, dtype=bool)
    for q, v in zip(qubits, values):
        bits = (np.arange(n) >> (num_qubits - 1 - q)) & 1
        mask &= bits == v
    return np.diag(mask.astype(complex))


# ---------------------------------------------------------------------------
# Seeded randomness.  All randomness in the toolkit flows from a single
# 64-bit seed through numpy's SeedSequence into the counter-based Philox
# generator; derived streams append integer context (e.g. Kraus pair
# indices) to the entropy, which makes parallel sampling reproducible and
# schedule-independent.
# ---------------------------------------------------------------------------


def rng_from(seed: int, *context: int) -> np.random.Generator:
    """Derive a reproducible generator from a root seed plus integer context."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, context)])))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_operator(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_traceless(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = random_operator(dim, rng)
    return a - np.trace(a) / dim * np.eye(dim)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = random_operator(dim, rng)
    return (a + a.conj().T) / 2


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix (normalized Wishart)."""
    g = random_operator(dim, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
