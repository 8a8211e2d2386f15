import numpy as np
import pytest

from qexpander.channels import Channel
from qexpander.linalg import frobenius, haar_unitary, paulis, random_density, rng_from
from qexpander.spectral import spectral_gap_dense
from qexpander.thermalization import (
    ThermalModel,
    decay_bound_check,
    evolve,
    is_adjoint_closed,
)

I, X, Y, Z = paulis()


def pauli_model(r0=0.7, r1=0.3):
    return ThermalModel((I, X, Y, Z), r0=r0, r1=r1)


def random_closed_model(seed, qubits=2, pairs=2, r0=0.4, r1=1.1):
    rng = rng_from(seed)
    us = [haar_unitary(2**qubits, rng) for _ in range(pairs)]
    us = us + [u.conj().T for u in us]
    return ThermalModel(tuple(us), r0=r0, r1=r1)


def test_model_validation():
    with pytest.raises(ValueError, match="positive"):
        ThermalModel((I,), r0=0.0, r1=1.0)
    with pytest.raises(ValueError, match="unitary"):
        ThermalModel((np.diag([1.0, 0.5]),), r0=1.0, r1=1.0)


def test_channel_weights_and_rate():
    m = pauli_model(0.7, 0.3)
    assert m.degree == 4
    assert m.rate == pytest.approx(4.0)
    assert m.channel.degree == 8
    assert m.channel.weights.sum() == pytest.approx(1.0)


def test_adjoint_closed_detection():
    assert is_adjoint_closed((I, X, Y, Z))
    rng = rng_from(0)
    u = haar_unitary(4, rng)
    assert not is_adjoint_closed((u,))
    assert is_adjoint_closed((u, u.conj().T))
    # closure up to a global phase counts
    assert is_adjoint_closed((u, np.exp(0.3j) * u.conj().T))


def test_adjoint_closed_channel_equals_uniform_form():
    model = random_closed_model(1)
    assert model.adjoint_closed
    uniform = Channel.uniform(model.unitaries)
    rng = rng_from(2)
    rho = random_density(4, rng)
    assert frobenius(model.channel.apply(rho) - uniform.apply(rho)) < 1e-12


def test_evolve_at_time_zero_returns_input():
    model = pauli_model()
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    traj = evolve(model, rho0, [0.0])
    assert frobenius(traj.states[0] - rho0) < 1e-12


def test_maximally_mixed_is_fixed():
    model = pauli_model()
    traj = evolve(model, np.eye(2) / 2, np.linspace(0, 4, 9))
    assert np.max(traj.residuals) < 1e-12


def test_depolarizer_equality_case():
    # Phi - I = -1 on traceless inputs, so the bound is an equality
    model = pauli_model()
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    times = np.linspace(0, 3, 15)
    traj = evolve(model, rho0, times)
    a0 = frobenius(rho0 - np.eye(2) / 2)
    assert np.max(np.abs(traj.residuals - np.exp(-model.rate * times) * a0)) < 1e-8


def test_series_matches_dense():
    model = random_closed_model(3)
    rho0 = random_density(4, rng_from(4))
    times = np.linspace(0, 1.5, 7)
    dense = evolve(model, rho0, times, method="dense")
    series = evolve(model, rho0, times, method="series")
    err = max(frobenius(a - b) for a, b in zip(dense.states, series.states))
    assert err < 1e-10


def test_trajectory_invariants():
    model = random_closed_model(5)
    rho0 = random_density(4, rng_from(6))
    traj = evolve(model, rho0, np.linspace(0, 6, 25))
    for state in traj.states:
        assert abs(np.trace(state) - 1) < 1e-9
        assert np.max(np.abs(state - state.conj().T)) < 1e-9
    assert np.all(np.diff(traj.residuals) <= 1e-10)


def test_convergence_to_maximally_mixed():
    model = random_closed_model(7)
    kappa = spectral_gap_dense(model.channel).kappa
    assert kappa < 1
    horizon = 20.0 / (model.rate * (1 - kappa))
    rho0 = random_density(4, rng_from(8))
    traj = evolve(model, rho0, [0.0, horizon])
    assert traj.residuals[-1] <= 1e-6 * traj.residuals[0]


def test_semigroup_property():
    model = random_closed_model(9)
    rho0 = random_density(4, rng_from(10))
    t1, t2 = 0.31, 0.77
    mid = evolve(model, rho0, [t1]).states[0]
    mid = (mid + mid.conj().T) / 2
    mid /= np.trace(mid).real
    chained = evolve(model, mid, [t2]).states[0]
    direct = evolve(model, rho0, [t1 + t2]).states[0]
    assert frobenius(chained - direct) < 1e-8


def test_decay_bound_random_models():
    for seed in range(3):
        model = random_closed_model(20 + seed)
        rho0 = random_density(4, rng_from(30 + seed))
        gamma_eff = model.rate * (1 - spectral_gap_dense(model.channel).kappa)
        times = np.geomspace(1e-3, 10.0 / gamma_eff, 20)
        report = decay_bound_check(model, rho0, times)
        assert report.satisfied
        assert report.worst_margin >= -1e-8


def test_decay_bound_identity_model_is_trivial():
    model = ThermalModel((I,), r0=1.0, r1=1.0)
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    report = decay_bound_check(model, rho0, np.linspace(0, 2, 9))
    assert report.kappa == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(report.residuals - report.residuals[0])) < 1e-10


def test_decay_bound_strict_raises_on_fake_kappa():
    model = pauli_model()
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    with pytest.raises(ValueError, match="violated"):
        decay_bound_check(model, rho0, [0.5, 1.0], kappa=-1.0)
    report = decay_bound_check(model, rho0, [0.5, 1.0], kappa=-1.0, strict=False)
    assert not report.satisfied


def test_evolve_input_validation():
    model = pauli_model()
    with pytest.raises(ValueError, match="trace"):
        evolve(model, np.eye(2), [0.0])
    with pytest.raises(ValueError, match="Hermitian"):
        evolve(model, np.array([[1, 1], [0, 0]], dtype=complex), [0.0])
    with pytest.raises(ValueError, match="positive semidefinite"):
        evolve(model, np.diag([1.5, -0.5]).astype(complex), [0.0])
    with pytest.raises(ValueError, match="nonnegative"):
        evolve(model, np.diag([1.0, 0.0]).astype(complex), [-1.0])
    with pytest.raises(ValueError, match="nondecreasing"):
        evolve(model, np.diag([1.0, 0.0]).astype(complex), [1.0, 0.5])
