"""qexpander: simulation and analysis toolkit for quantum expanders.

Construct unital channels from unitary Kraus operators, compute and sample
their spectral gaps, run the Merlin-Arthur verification protocol for the
non-expander problem, build hardness-reduction channels from verifier
circuits, and simulate the associated open-system thermalization.
"""

__version__ = "0.1.0"

from .channels import (
    Channel,
    CompositeChannel,
    channel_power,
    complete_depolarizer,
    compose,
    identity_channel,
    random_unitary_channel,
    tensor,
)
from .circuits import (
    Gate,
    GateCircuit,
    RegisterLayout,
    load_circuit,
    multi_controlled,
    parse_circuit,
    save_circuit,
    serialize_circuit,
    simulate_unitary,
)
from .linalg import frobenius, paulis, phi_state, rng_from, unvec, vec
from .protocol import (
    VerifierOutcome,
    arthur_verify,
    check_orthogonality,
    estimate_contraction_sq,
    hadamard_test_probability,
    merlin_witness,
    sample_hadamard_test,
)
from .reduction import (
    ControlledChannel,
    ReductionSpec,
    build_base_expander,
    build_reduction,
    controlled_channel,
    controlled_depolarizer,
    make_reduction_spec,
    no_verifier,
    noisy_verifier,
    sign_double,
    thresholds,
    yes_verifier,
    yes_witness,
)
from .spectral import (
    Decision,
    GapReport,
    NonExpanderInstance,
    build_w,
    decide,
    spectral_gap,
    spectral_gap_dense,
    spectral_gap_iterative,
)
from .thermalization import ThermalModel, Trajectory, decay_bound_check, evolve

__all__ = [
    "Channel",
    "CompositeChannel",
    "ControlledChannel",
    "Decision",
    "Gate",
    "GateCircuit",
    "GapReport",
    "NonExpanderInstance",
    "ReductionSpec",
    "RegisterLayout",
    "ThermalModel",
    "Trajectory",
    "VerifierOutcome",
    "arthur_verify",
    "build_base_expander",
    "build_reduction",
    "build_w",
    "channel_power",
    "check_orthogonality",
    "complete_depolarizer",
    "compose",
    "controlled_channel",
    "controlled_depolarizer",
    "decay_bound_check",
    "decide",
    "estimate_contraction_sq",
    "evolve",
    "frobenius",
    "hadamard_test_probability",
    "identity_channel",
    "load_circuit",
    "make_reduction_spec",
    "merlin_witness",
    "multi_controlled",
    "no_verifier",
    "noisy_verifier",
    "parse_circuit",
    "paulis",
    "phi_state",
    "random_unitary_channel",
    "rng_from",
    "sample_hadamard_test",
    "save_circuit",
    "serialize_circuit",
    "sign_double",
    "simulate_unitary",
    "spectral_gap",
    "spectral_gap_dense",
    "spectral_gap_iterative",
    "tensor",
    "thresholds",
    "unvec",
    "vec",
    "yes_verifier",
    "yes_witness",
]
