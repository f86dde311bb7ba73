"""Gate-level synthesis of qubit phase-mixing channels and circuit simulation.

Register convention: qubit 0 is the most significant bit of a basis-state
index, so ``|q0 q1 ... q_{n-1}>`` sits at index ``sum_i bit(q_i) 2^{n-1-i}``.
Synthesized circuits place the ancillas first (qubits ``0..k-1``) and the
channel's target qubit last; ancillas start in ``|0>``, and the ancilla bit
pattern read big-endian is the branch index.

Circuit text format (one gate per line after a single header line)::

    qubits 3; target 2; ancilla 0,1;
    ry(1.234567890123457) q0
    cry(0.5) q0,q1
    cp(3.14159) q1,q2
    x q0
    cx q0,q1
    h q2

Angles are radians printed at 15 significant digits; lines starting with
``#`` are comments. ``parse_text`` inverts ``emit_text`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel, choi_distance
from .dephasing import GPDChannel, phase_matrices
from .linalg import HADAMARD, PAULI_X

MAX_SIM_QUBITS = 12

GATE_KINDS = {
    # kind: (qubit arity, parameter count)
    "ry": (1, 1),
    "cry": (2, 1),
    "cp": (2, 1),
    "x": (1, 0),
    "cx": (2, 0),
    "h": (1, 0),
}


class CircuitSyntaxError(ValueError):
    """Raised by :func:`parse_text` with the offending line number."""


@dataclass(frozen=True)
class Gate:
    """One gate application: kind, parameters, qubits (controls first)."""

    kind: str
    params: tuple[float, ...] = ()
    qubits: tuple[int, ...] = ()

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity, nparams = GATE_KINDS[kind]
        qubits = tuple(int(q) for q in self.qubits)
        params = tuple(float(p) for p in self.params)
        if len(qubits) != arity:
            raise ValueError(f"{kind} takes {arity} qubit(s), got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind} qubits must be distinct: {qubits}")
        if len(params) != nparams:
            raise ValueError(f"{kind} takes {nparams} parameter(s), got {len(params)}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "qubits", qubits)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    target: int
    ancillas: tuple[int, ...] = ()
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        n = int(self.num_qubits)
        if n < 1:
            raise ValueError("circuit needs at least one qubit")
        ancillas = tuple(int(a) for a in self.ancillas)
        if not 0 <= self.target < n:
            raise ValueError(f"target {self.target} out of range for {n} qubits")
        if self.target in ancillas:
            raise ValueError("target qubit cannot be an ancilla")
        if any(not 0 <= a < n for a in ancillas) or len(set(ancillas)) != len(ancillas):
            raise ValueError(f"invalid ancilla list {ancillas}")
        for g in self.gates:
            if any(q >= n for q in g.qubits):
                raise ValueError(f"gate {g.kind} addresses qubit outside register")
        object.__setattr__(self, "num_qubits", n)
        object.__setattr__(self, "ancillas", ancillas)
        object.__setattr__(self, "gates", tuple(self.gates))


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _phase(phi: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


def _kron_factors(factors) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)


def _embed_single(u: np.ndarray, n: int, q: int) -> np.ndarray:
    return _kron_factors(u if i == q else _I2 for i in range(n))


def _embed_controlled(u: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    off = _kron_factors(_P0 if i == control else _I2 for i in range(n))
    on = _kron_factors(
        _P1 if i == control else (u if i == target else _I2) for i in range(n)
    )
    return off + on


def gate_matrix(gate: Gate, num_qubits: int) -> np.ndarray:
    """Full-register unitary of one gate (identity padding, control projection)."""
    if any(q >= num_qubits for q in gate.qubits):
        raise ValueError(f"gate qubits {gate.qubits} exceed register size {num_qubits}")
    if gate.kind == "ry":
        return _embed_single(_ry(gate.params[0]), num_qubits, gate.qubits[0])
    if gate.kind == "x":
        return _embed_single(PAULI_X, num_qubits, gate.qubits[0])
    if gate.kind == "h":
        return _embed_single(HADAMARD, num_qubits, gate.qubits[0])
    if gate.kind == "cry":
        return _embed_controlled(_ry(gate.params[0]), num_qubits, *gate.qubits)
    if gate.kind == "cp":
        return _embed_controlled(_phase(gate.params[0]), num_qubits, *gate.qubits)
    if gate.kind == "cx":
        return _embed_controlled(PAULI_X, num_qubits, *gate.qubits)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Product of all gate matrices, first gate applied first."""
    if circuit.num_qubits > MAX_SIM_QUBITS:
        raise ValueError(f"register of {circuit.num_qubits} qubits exceeds simulation cap")
    v = np.eye(2 ** circuit.num_qubits, dtype=complex)
    for g in circuit.gates:
        v = gate_matrix(g, circuit.num_qubits) @ v
    return v


def circuit_to_channel(circuit: Circuit) -> KrausChannel:
    """Channel on the target qubit with ancillas prepared in |0> and traced out.

    With register unitary V, the Kraus operators are the target-space blocks
    ``<a| V |0...0>`` indexed by the ancilla basis states ``a``.
    """
    non_target = [q for q in range(circuit.num_qubits) if q != circuit.target]
    v = circuit_unitary(circuit)
    n = circuit.num_qubits

    def flat_index(target_bit: int, anc_bits: dict[int, int]) -> int:
        idx = 0
        for q in range(n):
            bit = target_bit if q == circuit.target else anc_bits[q]
            idx = (idx << 1) | bit
        return idx

    ops = []
    zeros = {q: 0 for q in non_target}
    for a in range(2 ** len(non_target)):
        bits = {q: (a >> (len(non_target) - 1 - pos)) & 1
                for pos, q in enumerate(non_target)}
        k = np.zeros((2, 2), dtype=complex)
        for i in (0, 1):
            for j in (0, 1):
                k[i, j] = v[flat_index(i, bits), flat_index(j, zeros)]
        ops.append(k)
    ops = [o for o in ops if np.abs(o).max() > 1e-14]
    if not ops:
        raise ValueError("circuit produced no Kraus operators")
    return KrausChannel(tuple(ops))


def _prep_angle(fraction: float) -> float:
    # |0>-amplitude sqrt(fraction) after RY(angle)
    return 2.0 * np.arccos(np.sqrt(min(1.0, max(0.0, fraction))))


def synth_gpd(gpd: GPDChannel) -> Circuit:
    """Circuit realization of a qubit phase-mixing channel with N <= 4 branches.

    Layout: an ancilla preparation tree of RY/CRY gates puts amplitude
    ``sqrt(p_i)`` on ancilla pattern ``i`` (big-endian, X conjugation for
    0-controls), then controlled phases write each branch's relative phase
    onto the target. Per-pattern phases over two ancillas decompose as
    ``theta(b0, b1) = alpha b0 + beta b1 + gamma (b0 xor b1)``, the XOR term
    realized by conjugating one controlled phase with CX.

    The construction is verified before returning: the rebuilt channel must
    match the requested one to a Choi distance of 1e-9.
    """
    if gpd.dim != 2:
        raise ValueError("synthesis targets qubit channels")
    n_branches = gpd.rank
    if n_branches > 4:
        raise ValueError(f"{n_branches} branches exceed the 2-ancilla budget")
    k = 1 if n_branches <= 2 else 2
    target = k
    probs = list(gpd.probs) + [0.0] * (2 ** k - n_branches)
    thetas = list(np.atleast_1d(gpd.phases)) + [0.0] * (2 ** k - n_branches)
    gates: list[Gate] = []

    if k == 1:
        if probs[1] > 0.0:
            gates.append(Gate("ry", (_prep_angle(probs[0]),), (0,)))
            if thetas[1] != 0.0:
                gates.append(Gate("cp", (thetas[1],), (0, target)))
    else:
        s01, s23 = probs[0] + probs[1], probs[2] + probs[3]
        gates.append(Gate("ry", (_prep_angle(s01),), (0,)))
        if s01 > 0.0 and probs[1] > 0.0:
            gates.append(Gate("x", (), (0,)))
            gates.append(Gate("cry", (_prep_angle(probs[0] / s01),), (0, 1)))
            gates.append(Gate("x", (), (0,)))
        if s23 > 0.0 and probs[3] > 0.0:
            gates.append(Gate("cry", (_prep_angle(probs[2] / s23),), (0, 1)))
        th00, th01, th10, th11 = thetas
        if probs[3] == 0.0:
            # free phase on the empty pattern: choose it to kill the XOR term
            th11 = th01 + th10 - th00
        alpha = (th10 + th11 - th00 - th01) / 2.0
        beta = (th01 + th11 - th00 - th10) / 2.0
        gamma = (th01 + th10 - th00 - th11) / 2.0
        if alpha != 0.0:
            gates.append(Gate("cp", (alpha,), (0, target)))
        if beta != 0.0:
            gates.append(Gate("cp", (beta,), (1, target)))
        if gamma != 0.0:
            gates.append(Gate("cx", (), (0, 1)))
            gates.append(Gate("cp", (gamma,), (1, target)))
            gates.append(Gate("cx", (), (0, 1)))

    circuit = Circuit(
        num_qubits=k + 1, target=target, ancillas=tuple(range(k)), gates=tuple(gates)
    )
    err = choi_distance(circuit_to_channel(circuit), to_channel(gpd))
    if err > 1e-9:
        raise AssertionError(f"synthesized circuit off by Choi distance {err:.3e}")
    return circuit


def to_channel(gpd: GPDChannel) -> KrausChannel:
    """Kraus form of a phase-mixing channel (scaled diagonal phase unitaries)."""
    return KrausChannel(
        tuple(np.sqrt(p) * d for p, d in zip(gpd.probs, phase_matrices(gpd)))
    )


def emit_text(circuit: Circuit) -> str:
    """Line-oriented text form; see the module docstring for the grammar."""
    ancilla = ",".join(str(a) for a in circuit.ancillas)
    lines = [f"qubits {circuit.num_qubits}; target {circuit.target}; ancilla {ancilla};"]
    for g in circuit.gates:
        qubits = ",".join(f"q{q}" for q in g.qubits)
        if g.params:
            lines.append(f"{g.kind}({g.params[0]:.15g}) {qubits}")
        else:
            lines.append(f"{g.kind} {qubits}")
    return "\n".join(lines) + "\n"


def parse_text(src: str) -> Circuit:
    """Inverse of :func:`emit_text`.

    Raises:
        CircuitSyntaxError: malformed header or gate line, unknown gate
            kind, or qubit index out of range; the message carries the
            1-based line number.
    """
    header = None
    gates: list[Gate] = []
    header_fields: dict[str, str] = {}
    for lineno, raw in enumerate(src.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line
            for clause in filter(None, (c.strip() for c in line.split(";"))):
                parts = clause.split(None, 1)
                key = parts[0]
                value = parts[1] if len(parts) > 1 else ""
                if key not in ("qubits", "target", "ancilla") or key in header_fields:
                    raise CircuitSyntaxError(f"line {lineno}: bad header clause {clause!r}")
                header_fields[key] = value
            if not {"qubits", "target"} <= set(header_fields):
                raise CircuitSyntaxError(f"line {lineno}: header must declare qubits and target")
            continue
        try:
            gates.append(_parse_gate_line(line))
        except CircuitSyntaxError:
            raise
        except ValueError as exc:
            raise CircuitSyntaxError(f"line {lineno}: {exc}") from exc
    if header is None:
        raise CircuitSyntaxError("line 1: missing circuit header")
    try:
        num_qubits = int(header_fields["qubits"])
        target = int(header_fields["target"])
        ancillas = tuple(
            int(a) for a in header_fields.get("ancilla", "").split(",") if a.strip() != ""
        )
    except ValueError as exc:
        raise CircuitSyntaxError(f"line 1: bad header value: {exc}") from exc
    try:
        return Circuit(num_qubits, target, ancillas, tuple(gates))
    except ValueError as exc:
        raise CircuitSyntaxError(str(exc)) from exc


def _parse_gate_line(line: str) -> Gate:
    head, _, tail = line.partition(" ")
    if not tail.strip():
        raise ValueError(f"gate line needs qubit operands: {line!r}")
    params: tuple[float, ...] = ()
    kind = head
    if "(" in head:
        if not head.endswith(")"):
            raise ValueError(f"unbalanced parameter parentheses: {head!r}")
        kind, arg = head[:-1].split("(", 1)
        params = (float(arg),)
    qubits = []
    for token in tail.strip().split(","):
        token = token.strip()
        if not token.startswith("q"):
            raise ValueError(f"qubit operands look like q0, q1, ...: got {token!r}")
        qubits.append(int(token[1:]))
    return Gate(kind, params, tuple(qubits))
