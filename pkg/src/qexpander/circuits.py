"""Gate-level circuits: representation, file format, and dense simulation.

Circuits describe verifier unitaries and explicit Kraus operators.  The
gate set is deliberately small: single-qubit X/Y/Z/H/S/T, CNOT/CZ/TOFFOLI,
a native multi-controlled gate MCU (arbitrary controls with per-control
polarity, base either a named single-qubit gate or an inline 2x2 unitary),
and GLOBAL_PHASE.  GLOBAL_PHASE is first-class because sign doubling needs
-U as a circuit.  Multi-controlled gates are simulator primitives; the
ancilla-free n_a^2-gate decomposition is never performed (its gate count is
only ever reported symbolically).

Qubit 0 is the most significant bit of a basis-state index, consistently
with the register layout below.

File format: a UTF-8 JSON object {"qubits": m, "gates": [...]} where each
gate is {"kind", "targets", "controls"?, "polarities"?, "base"?,
"matrix"?, "phase"?}; matrices are row-major arrays of [re, im] pairs and
phases single [re, im] pairs.  The canonical serializer is bit-exact under
round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linalg import PAULI_X, PAULI_Y, PAULI_Z, check_unitary, embed, pattern_projector

NAMED_BASES = {
    "X": PAULI_X,
    "Y": PAULI_Y,
    "Z": PAULI_Z,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
}

SINGLE_QUBIT_KINDS = frozenset(NAMED_BASES)
CONTROLLED_KINDS = frozenset({"CNOT", "CZ", "TOFFOLI"})
GATE_KINDS = SINGLE_QUBIT_KINDS | CONTROLLED_KINDS | {"MCU", "GLOBAL_PHASE"}

#: Dense simulation cap (qubits).
SIM_CAP_QUBITS = 10


class CircuitFormatError(ValueError):
    """Parse/validation failure, carrying a location when one is known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[int, ...] = ()
    polarities: tuple[int, ...] = ()
    base: str | None = None
    matrix: np.ndarray | None = None
    phase: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "polarities", tuple(int(p) for p in self.polarities))
        if self.kind not in GATE_KINDS:
            raise CircuitFormatError(f"unknown gate kind {self.kind!r}")
        if self.kind == "GLOBAL_PHASE":
            if self.targets or self.controls:
                raise CircuitFormatError("GLOBAL_PHASE takes no qubits")
            if self.phase is None or abs(abs(complex(self.phase)) - 1.0) > 1e-12:
                raise CircuitFormatError(f"GLOBAL_PHASE needs a unit-modulus phase, got {self.phase!r}")
            return
        if len(self.targets) != 1:
            raise CircuitFormatError(f"{self.kind} needs exactly one target, got {self.targets}")
        expected_controls = {"CNOT": 1, "CZ": 1, "TOFFOLI": 2}
        if self.kind in expected_controls:
            if len(self.controls) != expected_controls[self.kind]:
                raise CircuitFormatError(
                    f"{self.kind} needs {expected_controls[self.kind]} control(s), got {self.controls}"
                )
            if not self.polarities:
                object.__setattr__(self, "polarities", (1,) * len(self.controls))
        elif self.kind in SINGLE_QUBIT_KINDS:
            if self.controls:
                raise CircuitFormatError(f"{self.kind} takes no controls (use MCU)")
        elif self.kind == "MCU":
            if (self.base is None) == (self.matrix is None):
                raise CircuitFormatError("MCU needs exactly one of a named base or an inline matrix")
            if self.base is not None and self.base not in NAMED_BASES:
                raise CircuitFormatError(f"unknown MCU base {self.base!r}")
            if self.matrix is not None:
                mat = np.asarray(self.matrix, dtype=complex)
                if mat.shape != (2, 2):
                    raise CircuitFormatError(f"inline MCU matrix must be 2x2, got {mat.shape}")
                try:
                    mat = check_unitary(mat, tol=1e-10)
                except ValueError as exc:
                    raise CircuitFormatError(str(exc)) from exc
                mat.setflags(write=False)
                object.__setattr__(self, "matrix", mat)
            if not self.polarities:
                object.__setattr__(self, "polarities", (1,) * len(self.controls))
        if len(self.polarities) != len(self.controls):
            raise CircuitFormatError(
                f"{len(self.polarities)} polarities for {len(self.controls)} controls"
            )
        if any(p not in (0, 1) for p in self.polarities):
            raise CircuitFormatError(f"polarities must be bits, got {self.polarities}")
        overlap = set(self.targets) & set(self.controls)
        if overlap:
            raise CircuitFormatError(f"control and target sets overlap on qubits {sorted(overlap)}")
        if len(set(self.controls)) != len(self.controls):
            raise CircuitFormatError(f"duplicate control qubits in {self.controls}")

    def base_matrix(self) -> np.ndarray:
        if self.kind in SINGLE_QUBIT_KINDS:
            return NAMED_BASES[self.kind]
        if self.kind == "CNOT":
            return NAMED_BASES["X"]
        if self.kind == "CZ":
            return NAMED_BASES["Z"]
        if self.kind == "TOFFOLI":
            return NAMED_BASES["X"]
        if self.kind == "MCU":
            return NAMED_BASES[self.base] if self.base is not None else self.matrix
        raise ValueError(f"{self.kind} has no base matrix")


@dataclass(frozen=True, eq=False)
class GateCircuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitFormatError(f"num_qubits must be >= 1, got {self.num_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for i, gate in enumerate(self.gates):
            for q in gate.targets + gate.controls:
                if q < 0 or q >= self.num_qubits:
                    raise CircuitFormatError(
                        f"gate {i} ({gate.kind}) references qubit {q}, "
                        f"outside [0, {self.num_qubits})"
                    )

    def __len__(self) -> int:
        return len(self.gates)

    def extended(self, *gates: Gate) -> "GateCircuit":
        return GateCircuit(self.num_qubits, self.gates + tuple(gates))


def gate_matrix(gate: Gate, num_qubits: int) -> np.ndarray:
    """Full 2^m x 2^m matrix of one gate.

    Controlled gates use the projector form P * lift(base) + (I - P), where
    P selects basis states whose control bits match the polarities; on
    non-matching states the gate is the identity.
    """
    n = 2**num_qubits
    if gate.kind == "GLOBAL_PHASE":
        return complex(gate.phase) * np.eye(n, dtype=complex)
    lifted = embed(gate.base_matrix(), gate.targets, num_qubits)
    if not gate.controls:
        return lifted
    proj = pattern_projector(num_qubits, gate.controls, gate.polarities)
    return proj @ lifted + (np.eye(n, dtype=complex) - proj)


def simulate_unitary(circuit: GateCircuit, cap_qubits: int = SIM_CAP_QUBITS) -> np.ndarray:
    """Product of the gate matrices in circuit order.

    For small circuits (m <= 6) the unitarity of the result is asserted.
    """
    if circuit.num_qubits > cap_qubits:
        raise ValueError(
            f"{circuit.num_qubits}-qubit circuit exceeds the dense simulation cap ({cap_qubits})"
        )
    u = np.eye(2**circuit.num_qubits, dtype=complex)
    for gate in circuit.gates:
        u = gate_matrix(gate, circuit.num_qubits) @ u
    if circuit.num_qubits <= 6:
        check_unitary(u)
    return u


def multi_controlled(base, target: int, controls, polarities=None) -> Gate:
    """Native multi-controlled gate applying `base` on `target` iff every
    control matches its polarity bit (polarity 0 = control on |0>).

    `base` may be a gate name, a 2x2 unitary, or a single-qubit circuit.
    """
    if isinstance(base, GateCircuit):
        if base.num_qubits != 1:
            raise ValueError(f"circuit base must act on one qubit, got {base.num_qubits}")
        base = simulate_unitary(base)
    controls = tuple(int(c) for c in controls)
    if polarities is None:
        polarities = (1,) * len(controls)
    if isinstance(base, str):
        return Gate("MCU", targets=(target,), controls=controls, polarities=tuple(polarities), base=base)
    return Gate(
        "MCU",
        targets=(target,),
        controls=controls,
        polarities=tuple(polarities),
        matrix=np.asarray(base, dtype=complex),
    )


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def _complex_pair(value, what: str) -> complex:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise CircuitFormatError(f"{what} must be an [re, im] pair, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _matrix_from_json(rows, what: str) -> np.ndarray:
    try:
        flat = [_complex_pair(entry, what) for entry in rows]
    except TypeError as exc:
        raise CircuitFormatError(f"{what} must be a row-major list of [re, im] pairs") from exc
    n = int(round(np.sqrt(len(flat))))
    if n * n != len(flat):
        raise CircuitFormatError(f"{what} has {len(flat)} entries, not a square matrix")
    return np.array(flat, dtype=complex).reshape(n, n)


def _matrix_to_json(mat: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(mat, dtype=complex).reshape(-1)]


def parse_circuit(text: str) -> GateCircuit:
    """Parse the JSON circuit format, with located diagnostics."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise CircuitFormatError("circuit file must be a JSON object")
    if "qubits" not in doc:
        raise CircuitFormatError("missing required field 'qubits'")
    if "gates" not in doc or not isinstance(doc["gates"], list):
        raise CircuitFormatError("missing required list field 'gates'")
    gates = []
    for i, entry in enumerate(doc["gates"]):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise CircuitFormatError(f"gate {i} must be an object with a 'kind' field")
        known = {"kind", "targets", "controls", "polarities", "base", "matrix", "phase"}
        extra = set(entry) - known
        if extra:
            raise CircuitFormatError(f"gate {i} has unknown fields {sorted(extra)}")
        kind = entry["kind"]
        if kind not in GATE_KINDS:
            raise CircuitFormatError(f"gate {i} has unknown kind {kind!r}")
        kwargs = {
            "targets": tuple(entry.get("targets", ())),
            "controls": tuple(entry.get("controls", ())),
            "polarities": tuple(entry.get("polarities", ())),
            "base": entry.get("base"),
        }
        if entry.get("matrix") is not None:
            kwargs["matrix"] = _matrix_from_json(entry["matrix"], f"gate {i} matrix")
        if entry.get("phase") is not None:
            kwargs["phase"] = _complex_pair(entry["phase"], f"gate {i} phase")
        try:
            gates.append(Gate(kind, **kwargs))
        except CircuitFormatError as exc:
            raise CircuitFormatError(f"gate {i}: {exc.args[0]}") from exc
    return GateCircuit(int(doc["qubits"]), tuple(gates))


def serialize_circuit(circuit: GateCircuit) -> str:
    """Canonical serialization; parse(serialize(c)) reproduces c bit-exactly."""
    gates = []
    for gate in circuit.gates:
        entry: dict = {"kind": gate.kind, "targets": list(gate.targets)}
        if gate.controls:
            entry["controls"] = list(gate.controls)
            entry["polarities"] = list(gate.polarities)
        if gate.base is not None:
            entry["base"] = gate.base
        if gate.matrix is not None:
            entry["matrix"] = _matrix_to_json(gate.matrix)
        if gate.phase is not None:
            entry["phase"] = [float(gate.phase.real), float(gate.phase.imag)]
        if gate.kind == "GLOBAL_PHASE":
            entry.pop("targets")
        gates.append(json.dumps(entry, separators=(", ", ": ")))
    body = ",\n    ".join(gates)
    gate_block = f"[\n    {body}\n  ]" if gates else "[]"
    return f'{{\n  "qubits": {circuit.num_qubits},\n  "gates": {gate_block}\n}}\n'


def load_circuit(path) -> GateCircuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def save_circuit(circuit: GateCircuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_circuit(circuit))


# ---------------------------------------------------------------------------
# Register layout for verifier circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegisterLayout:
    """Witness / ancilla / indicator register assignment.

    Witness qubits occupy [0, n_w), ancillas [n_w, n_w + n_a); the single
    indicator qubit sits at index n_w + n_a.  The verifier's output ("top")
    qubit is the first witness qubit.
    """

    num_witness: int
    num_ancilla: int

    def __post_init__(self):
        if self.num_witness < 1 or self.num_ancilla < 1:
            raise ValueError(
                f"need at least one witness and one ancilla qubit, got "
                f"n_w={self.num_witness}, n_a={self.num_ancilla}"
            )

    @property
    def witness_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.num_witness))

    @property
    def ancilla_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.num_witness, self.num_witness + self.num_ancilla))

    @property
    def indicator_qubit(self) -> int:
        return self.num_witness + self.num_ancilla

    @property
    def top_qubit(self) -> int:
        return 0

    @property
    def verifier_qubits(self) -> int:
        """Qubits the verifier acts on (witness + ancilla)."""
        return self.num_witness + self.num_ancilla

    @property
    def total_qubits(self) -> int:
        return self.num_witness + self.num_ancilla + 1

    def mcu_gate_count(self, num_controls: int | None = None) -> int:
        """Symbolic gate count of the ancilla-free multi-controlled
        decomposition (n^2 with n controls); never actually expanded."""
        n = self.num_ancilla if num_controls is None else num_controls
        return n * n
