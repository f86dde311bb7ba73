"""JSON formats for matrices, states, and channel files.

Complex numbers serialize as two-element arrays ``[re, im]``; a matrix is
``{"rows": r, "cols": c, "data": [[re, im], ...]}`` with ``data`` holding
``r * c`` entries in row-major order.

A channel file is a JSON object tagged by ``kind``:

* ``{"kind": "mixed_unitary", "dim": d, "probs": [...], "unitaries": [matrix, ...]}``
* ``{"kind": "kraus", "dim": d, "operators": [matrix, ...]}``
* ``{"kind": "gpd", "dim": d, "probs": [...], "phases": [...]}``
  (phases: flat list for qubits, list of per-branch lists otherwise)
* ``{"kind": "named", "name": "...", "param": x}``

Schema problems raise :class:`FormatError` (a usage-level failure); values
that parse but violate physical invariants raise ``ValueError`` from the
type constructors (a validation-level failure).
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .channels import KrausChannel, MixedUnitaryChannel, controlled_phase_damping
from .dephasing import GPDChannel, amplitude_damping, depolarizing, make_gpd, phase_damping
from .fixtures import rotated_phase_mix, two_qubit_pair_mix, uniform_phase_triple
from .states import PureState


class FormatError(ValueError):
    """Malformed document: wrong structure, keys, or element types."""


PARAMETRIC_CHANNELS = {
    "phase_damping": phase_damping,
    "amplitude_damping": amplitude_damping,
    "depolarizing": depolarizing,
    "controlled_phase_damping": controlled_phase_damping,
}

FIXTURE_CHANNELS = {
    "rotated_phase_mix": rotated_phase_mix,
    "uniform_phase_triple": uniform_phase_triple,
    "two_qubit_pair_mix": two_qubit_pair_mix,
}

NAMED_STATES = {
    "|0>": (1, 0),
    "|1>": (0, 1),
    "|+>": (1 / np.sqrt(2), 1 / np.sqrt(2)),
    "|->": (1 / np.sqrt(2), -1 / np.sqrt(2)),
}
# bare aliases for shells where | and > are awkward
NAMED_STATES.update({"0": NAMED_STATES["|0>"], "1": NAMED_STATES["|1>"],
                     "+": NAMED_STATES["|+>"], "-": NAMED_STATES["|->"]})


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def complex_from_json(obj: Any) -> complex:
    if (not isinstance(obj, (list, tuple))) or len(obj) != 2:
        raise FormatError(f"complex entries are [re, im] pairs, got {obj!r}")
    re, im = obj
    if not all(isinstance(x, (int, float)) for x in (re, im)):
        raise FormatError(f"complex entries must be numbers, got {obj!r}")
    return complex(re, im)


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [complex_to_json(z) for z in m.reshape(-1)],
    }


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= set(obj):
        raise FormatError("matrix objects need rows, cols, and data")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int) and isinstance(data, list)):
        raise FormatError("matrix rows/cols must be integers and data a list")
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise FormatError(f"matrix data length {len(data)} != {rows}*{cols}")
    entries = [complex_from_json(e) for e in data]
    return np.array(entries, dtype=complex).reshape(rows, cols)


def state_from_json(obj: Any) -> PureState:
    """Pure state from an amplitude list; entries are [re, im] or bare reals."""
    if isinstance(obj, str):
        if obj not in NAMED_STATES:
            raise FormatError(f"unknown named state {obj!r}")
        return PureState(np.array(NAMED_STATES[obj], dtype=complex))
    if not isinstance(obj, list) or not obj:
        raise FormatError("state must be a nonempty amplitude list or a named state")
    amps = []
    for e in obj:
        if isinstance(e, (int, float)):
            amps.append(complex(e))
        else:
            amps.append(complex_from_json(e))
    return PureState(np.array(amps, dtype=complex))


def state_to_json(phi: PureState) -> list[list[float]]:
    return [complex_to_json(z) for z in phi.amplitudes]


def parse_state(text: str) -> PureState:
    """CLI state argument: named state or inline JSON amplitude list."""
    text = text.strip()
    if text.startswith("["):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad state JSON: {exc}") from exc
        return state_from_json(obj)
    return state_from_json(text)


def channel_to_json(channel) -> dict:
    if isinstance(channel, MixedUnitaryChannel):
        return {
            "kind": "mixed_unitary",
            "dim": channel.dim,
            "probs": [float(p) for p in channel.probs],
            "unitaries": [matrix_to_json(u) for u in channel.unitaries],
        }
    if isinstance(channel, KrausChannel):
        return {
            "kind": "kraus",
            "dim": channel.in_dim,
            "operators": [matrix_to_json(a) for a in channel.kraus_ops],
        }
    if isinstance(channel, GPDChannel):
        phases = channel.phases
        return {
            "kind": "gpd",
            "dim": channel.dim,
            "probs": [float(p) for p in channel.probs],
            "phases": phases.tolist(),
        }
    raise TypeError(f"cannot serialize {type(channel).__name__}")


def _require(obj: dict, key: str, types) -> Any:
    if key not in obj:
        raise FormatError(f"channel file is missing {key!r}")
    value = obj[key]
    if not isinstance(value, types):
        raise FormatError(f"channel file field {key!r} has the wrong type")
    return value


def channel_from_json(obj: Any):
    """Deserialize a channel file object into its typed channel."""
    if not isinstance(obj, dict):
        raise FormatError("channel file must be a JSON object")
    kind = _require(obj, "kind", str)
    if kind == "mixed_unitary":
        dim = _require(obj, "dim", int)
        probs = _require(obj, "probs", list)
        mats = [matrix_from_json(u) for u in _require(obj, "unitaries", list)]
        if any(m.shape != (dim, dim) for m in mats):
            raise FormatError("unitary shapes disagree with dim")
        return MixedUnitaryChannel(np.array(probs, dtype=float), tuple(mats))
    if kind == "kraus":
        dim = _require(obj, "dim", int)
        mats = [matrix_from_json(a) for a in _require(obj, "operators", list)]
        if any(m.shape[1] != dim for m in mats):
            raise FormatError("operator shapes disagree with dim")
        return KrausChannel(tuple(mats))
    if kind == "gpd":
        probs = _require(obj, "probs", list)
        phases = _require(obj, "phases", list)
        return make_gpd(probs, phases)
    if kind == "named":
        name = _require(obj, "name", str)
        if name in PARAMETRIC_CHANNELS:
            param = _require(obj, "param", (int, float))
            return PARAMETRIC_CHANNELS[name](float(param))
        if name in FIXTURE_CHANNELS:
            return FIXTURE_CHANNELS[name]()
        raise FormatError(f"unknown named channel {name!r}")
    raise FormatError(f"unknown channel kind {kind!r}")


def load_channel(path: str):
    """Read and deserialize a channel file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: malformed JSON: {exc}") from exc
    return channel_from_json(obj)


def save_channel(channel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_json(channel), fh, indent=2)
        fh.write("\n")
