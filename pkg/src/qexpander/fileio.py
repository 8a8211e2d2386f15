"""Structured-text (JSON) container formats for instances, channels,
reduction specs, thermal models, and states.

All matrices are stored row-major as [re, im] pairs.  Kraus operators and
coupling unitaries may be given inline as such matrices or as paths to
circuit files (resolved relative to the referencing file), which are
simulated to their unitaries on load; unitarity of every element is
re-checked by the channel constructor.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import Channel, CompositeChannel
from .circuits import RegisterLayout, load_circuit, simulate_unitary
from .reduction import ReductionSpec, build_base_expander, make_reduction_spec
from .spectral import NonExpanderInstance
from .thermalization import ThermalModel


class FileFormatError(ValueError):
    pass


def matrix_to_json(mat: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(mat, dtype=complex).reshape(-1)]


def matrix_from_json(rows, what: str = "matrix") -> np.ndarray:
    try:
        flat = [complex(float(p[0]), float(p[1])) for p in rows]
    except (TypeError, IndexError) as exc:
        raise FileFormatError(f"{what} must be a row-major list of [re, im] pairs") from exc
    n = int(round(np.sqrt(len(flat))))
    if n * n != len(flat):
        raise FileFormatError(f"{what} has {len(flat)} entries, not a square matrix")
    return np.array(flat, dtype=complex).reshape(n, n)


def vector_from_json(rows, what: str = "amplitudes") -> np.ndarray:
    try:
        return np.array([complex(float(p[0]), float(p[1])) for p in rows], dtype=complex)
    except (TypeError, IndexError) as exc:
        raise FileFormatError(f"{what} must be a list of [re, im] pairs") from exc


def _load_json(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise FileFormatError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: expected a JSON object")
    return doc


def _kraus_entry(entry, base_dir: Path, qubits: int, what: str) -> np.ndarray:
    if isinstance(entry, str):
        circuit = load_circuit(base_dir / entry)
        if circuit.num_qubits != qubits:
            raise FileFormatError(
                f"{what}: circuit {entry!r} acts on {circuit.num_qubits} qubits, expected {qubits}"
            )
        return simulate_unitary(circuit)
    mat = matrix_from_json(entry, what)
    if mat.shape[0] != 2**qubits:
        raise FileFormatError(f"{what}: matrix dimension {mat.shape[0]} != 2^{qubits}")
    return mat


def _channel_from_doc(doc: dict, base_dir: Path, where: str):
    if "qubits" not in doc:
        raise FileFormatError(f"{where}: missing field 'qubits'")
    qubits = int(doc["qubits"])
    if "stages" in doc:
        stages = []
        for i, stage in enumerate(doc["stages"]):
            stages.append(_flat_channel(stage, base_dir, qubits, f"{where} stage {i}"))
        return CompositeChannel(tuple(stages))
    return _flat_channel(doc, base_dir, qubits, where)


def _flat_channel(doc: dict, base_dir: Path, qubits: int, where: str) -> Channel:
    if "kraus" not in doc or not isinstance(doc["kraus"], list) or not doc["kraus"]:
        raise FileFormatError(f"{where}: missing nonempty list field 'kraus'")
    kraus = [
        _kraus_entry(entry, base_dir, qubits, f"{where} kraus[{i}]")
        for i, entry in enumerate(doc["kraus"])
    ]
    if doc.get("weights") is not None:
        weights = np.array([float(w) for w in doc["weights"]])
    else:
        weights = np.full(len(kraus), 1.0 / len(kraus))
    try:
        return Channel(tuple(kraus), weights)
    except ValueError as exc:
        raise FileFormatError(f"{where}: {exc}") from exc


def load_channel(path):
    path = Path(path)
    return _channel_from_doc(_load_json(path), path.parent, str(path))


def load_instance(path) -> NonExpanderInstance:
    path = Path(path)
    doc = _load_json(path)
    channel = _channel_from_doc(doc, path.parent, str(path))
    for fieldname in ("alpha", "beta"):
        if fieldname not in doc:
            raise FileFormatError(f"{path}: missing field {fieldname!r}")
    try:
        return NonExpanderInstance(channel, float(doc["alpha"]), float(doc["beta"]))
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def save_channel(channel, path, alpha: float | None = None, beta: float | None = None) -> None:
    """Write a channel (flat or staged) with optional instance thresholds."""
    doc: dict = {"qubits": channel.qubits}
    if isinstance(channel, CompositeChannel):
        doc["stages"] = [
            {
                "weights": [float(w) for w in stage.weights],
                "kraus": [matrix_to_json(u) for u in stage.kraus],
            }
            for stage in channel.stages
        ]
        doc["degree"] = channel.degree
    else:
        doc["weights"] = [float(w) for w in channel.weights]
        doc["kraus"] = [matrix_to_json(u) for u in channel.kraus]
    if alpha is not None:
        doc["alpha"] = float(alpha)
    if beta is not None:
        doc["beta"] = float(beta)
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def load_reduction_spec(path) -> ReductionSpec:
    """Load a reduction spec: verifier circuit path, layout integers, (a, b),
    and either a base-expander channel file or synthesis parameters."""
    path = Path(path)
    doc = _load_json(path)
    for fieldname in ("circuit", "n_w", "n_a", "a", "b"):
        if fieldname not in doc:
            raise FileFormatError(f"{path}: missing field {fieldname!r}")
    layout = RegisterLayout(int(doc["n_w"]), int(doc["n_a"]))
    verifier = load_circuit(path.parent / doc["circuit"])
    has_file = doc.get("base_expander") is not None
    has_synth = doc.get("synthesize") is not None
    if has_file == has_synth:
        raise FileFormatError(f"{path}: need exactly one of 'base_expander' or 'synthesize'")
    kappa_f = None
    if has_file:
        base = _channel_from_doc(
            _load_json(path.parent / doc["base_expander"]),
            (path.parent / doc["base_expander"]).parent,
            str(doc["base_expander"]),
        )
    else:
        synth = doc["synthesize"]
        base, kappa_f = build_base_expander(
            layout.verifier_qubits,
            target_kappa=float(synth.get("target_kappa", 0.1)),
            degree_per_stage=int(synth.get("degree_per_stage", 8)),
            seed=int(synth.get("seed", 0)),
        )
    try:
        return make_reduction_spec(
            verifier,
            layout,
            a=float(doc["a"]),
            b=float(doc["b"]),
            base_expander=base,
            kappa_f=kappa_f,
            strict=bool(doc.get("strict", True)),
        )
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def load_thermal_model(path) -> ThermalModel:
    path = Path(path)
    doc = _load_json(path)
    for fieldname in ("qubits", "unitaries", "R0", "R1"):
        if fieldname not in doc:
            raise FileFormatError(f"{path}: missing field {fieldname!r}")
    qubits = int(doc["qubits"])
    unitaries = [
        _kraus_entry(entry, path.parent, qubits, f"{path} unitaries[{i}]")
        for i, entry in enumerate(doc["unitaries"])
    ]
    try:
        return ThermalModel(tuple(unitaries), float(doc["R0"]), float(doc["R1"]))
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def load_state_vector(path) -> np.ndarray:
    doc = _load_json(path)
    if "amplitudes" not in doc:
        raise FileFormatError(f"{path}: missing field 'amplitudes'")
    return vector_from_json(doc["amplitudes"])


def load_density_matrix(path) -> np.ndarray:
    doc = _load_json(path)
    if "matrix" not in doc:
        raise FileFormatError(f"{path}: missing field 'matrix'")
    return matrix_from_json(doc["matrix"])
