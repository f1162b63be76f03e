"""Classical reversible circuits, permutation gates and the states they prepare.

Wires are 0-indexed in memory and 1-indexed in every serialised form
(circuit JSON, permutation JSON, cycle notation).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadK, LengthMismatch, NotBijection, SchurSamplingError, TooLarge
from .schur_states import CTState, SchurLabel, SchurState, bits_to_str, to_bits

DEFAULT_GATE_BUDGET = 10**6

_KIND_CONTROLS = {"x": 0, "cx": 1, "ccx": 2}


@dataclass(frozen=True)
class Gate:
    kind: str
    controls: tuple[int, ...]
    target: int

    def __post_init__(self):
        if self.kind not in _KIND_CONTROLS:
            raise SchurSamplingError(f"unknown gate kind {self.kind!r}")
        if len(self.controls) != _KIND_CONTROLS[self.kind]:
            raise SchurSamplingError(f"{self.kind} takes {_KIND_CONTROLS[self.kind]} controls")
        wires = self.controls + (self.target,)
        if len(set(wires)) != len(wires):
            raise SchurSamplingError(f"gate {self} reuses a wire")

    def to_json(self) -> dict:
        obj = {"g": self.kind, "t": self.target + 1}
        if self.controls:
            obj["c"] = [c + 1 for c in self.controls]
        return obj


def X(t: int) -> Gate:
    return Gate("x", (), t)


def CNOT(c: int, t: int) -> Gate:
    return Gate("cx", (c,), t)


def Toffoli(c1: int, c2: int, t: int) -> Gate:
    return Gate("ccx", (c1, c2), t)


@dataclass(frozen=True)
class ReversibleCircuit:
    """An X / CNOT / Toffoli sequence on ``n_wires`` wires (0-indexed gates)."""

    n_wires: int
    gates: tuple[Gate, ...] = ()
    budget: int = field(default=DEFAULT_GATE_BUDGET, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_wires < 1:
            raise SchurSamplingError("a circuit needs at least one wire")
        if len(self.gates) > self.budget:
            raise TooLarge(f"{len(self.gates)} gates exceed the budget of {self.budget}")
        for g in self.gates:
            if max(g.controls + (g.target,)) >= self.n_wires or min(g.controls + (g.target,)) < 0:
                raise SchurSamplingError(f"gate {g} addresses a wire outside 0..{self.n_wires - 1}")

    def _run(self, bits: np.ndarray, gates) -> np.ndarray:
        out = to_bits(bits, self.n_wires).copy()
        for g in gates:
            if g.controls:
                mask = out[:, g.controls[0]].copy()
                for c in g.controls[1:]:
                    mask &= out[:, c]
                out[:, g.target] ^= mask
            else:
                out[:, g.target] ^= 1
        return out

    def apply_bits(self, bits: np.ndarray) -> np.ndarray:
        return self._run(bits, self.gates)

    def apply_inverse_bits(self, bits: np.ndarray) -> np.ndarray:
        # every gate is an involution
        return self._run(bits, reversed(self.gates))

    def to_json(self) -> dict:
        return {"wires": self.n_wires, "gates": [g.to_json() for g in self.gates]}

    @classmethod
    def from_json(cls, obj: dict, budget: int = DEFAULT_GATE_BUDGET) -> "ReversibleCircuit":
        gates = []
        for g in obj["gates"]:
            controls = tuple(int(c) - 1 for c in g.get("c", ()))
            gates.append(Gate(g["g"], controls, int(g["t"]) - 1))
        return cls(int(obj["wires"]), tuple(gates), budget)


def _apply_any(c, x, inverse: bool):
    single = isinstance(x, str)
    bits = to_bits(x)
    if bits.shape[1] != c.n_wires:
        raise LengthMismatch(f"expected {c.n_wires} bits, got {bits.shape[1]}")
    out = c.apply_inverse_bits(bits) if inverse else c.apply_bits(bits)
    return bits_to_str(out[0]) if single else out


def apply(c, x):
    """``w(x)`` for a bit string (returns a string) or a ``(rows, n)`` array."""
    return _apply_any(c, x, inverse=False)


def invert_apply(c, x):
    """``w^{-1}(x)``, running the gates in reverse order."""
    return _apply_any(c, x, inverse=True)


def random_reversible_circuit(
    n_wires: int, n_gates: int, rng: np.random.Generator, kinds: Sequence[str] = ("x", "cx", "ccx")
) -> ReversibleCircuit:
    kinds = [k for k in kinds if _KIND_CONTROLS[k] < n_wires]
    gates = []
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        wires = rng.choice(n_wires, size=_KIND_CONTROLS[kind] + 1, replace=False)
        gates.append(Gate(kind, tuple(int(w) for w in wires[:-1]), int(wires[-1])))
    return ReversibleCircuit(n_wires, tuple(gates))


# -- permutation gates -----------------------------------------------------

@dataclass(frozen=True)
class PermutationGate:
    """``U_pi |x_1 ... x_n> = |x_pi(1) ... x_pi(n)>`` with ``perm`` 0-indexed one-line."""

    perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        if sorted(self.perm) != list(range(len(self.perm))):
            raise NotBijection(f"{[p + 1 for p in self.perm]} is not a permutation")

    @property
    def n_wires(self) -> int:
        return len(self.perm)

    @property
    def inverse(self) -> "PermutationGate":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return PermutationGate(tuple(inv))

    def apply_bits(self, bits: np.ndarray) -> np.ndarray:
        return to_bits(bits, self.n_wires)[:, list(self.perm)]

    def apply_inverse_bits(self, bits: np.ndarray) -> np.ndarray:
        return to_bits(bits, self.n_wires)[:, list(self.inverse.perm)]

    def cycle_type(self) -> tuple[int, ...]:
        seen = [False] * len(self.perm)
        lengths = []
        for start in range(len(self.perm)):
            if seen[start]:
                continue
            length, i = 0, start
            while not seen[i]:
                seen[i] = True
                i = self.perm[i]
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths, reverse=True))

    def one_line(self) -> list[int]:
        return [p + 1 for p in self.perm]

    def to_json(self) -> dict:
        return {"perm": self.one_line()}

    @classmethod
    def from_one_line(cls, values: Sequence[int]) -> "PermutationGate":
        return cls(tuple(int(v) - 1 for v in values))

    @classmethod
    def from_cycles(cls, text: str, n: int) -> "PermutationGate":
        """Parse cycle notation such as ``"(1,2,3)(4,5)"``; ``i -> next(i)`` in each cycle."""
        perm = list(range(n))
        seen: set[int] = set()
        for body in re.findall(r"\(([^)]*)\)", text):
            items = [int(v) - 1 for v in re.split(r"[,\s]+", body.strip()) if v]
            for a, b in zip(items, items[1:] + items[:1]):
                if not (0 <= a < n) or a in seen:
                    raise NotBijection(f"bad cycle notation {text!r} for n={n}")
                seen.add(a)
                perm[a] = b
        return cls(tuple(perm))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "PermutationGate":
        text = text.strip()
        if text.startswith("("):
            if n is None:
                n = max(int(v) for v in re.findall(r"\d+", text))
            return cls.from_cycles(text, n)
        values = [int(v) for v in re.split(r"[,\s]+", text.strip("[] ")) if v]
        gate = cls.from_one_line(values)
        if n is not None and gate.n_wires != n:
            raise LengthMismatch(f"permutation acts on {gate.n_wires} wires, expected {n}")
        return gate


def perm_to_circuit_semantics(p: PermutationGate, x):
    return apply(p, x)


def build_uswaps(n: int, k: int) -> PermutationGate:
    """Swap gate on ``k + n`` wires exchanging wire ``i`` with wire ``k + i`` (1 <= i <= k).

    With a k-qubit state on the first wires and an n-qubit state after it,
    this exchanges the k-qubit register with the first k qubits of the
    n-qubit register.
    """
    if not 1 <= k <= n:
        raise BadK(f"need 1 <= k <= n, got k={k}, n={n}")
    perm = list(range(n + k))
    for i in range(k):
        perm[i], perm[k + i] = k + i, i
    return PermutationGate(tuple(perm))


def load_circuit(obj: dict | str, budget: int = DEFAULT_GATE_BUDGET):
    """A :class:`ReversibleCircuit` or :class:`PermutationGate` from JSON text or a dict."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "perm" in obj:
        return PermutationGate.from_one_line(obj["perm"])
    return ReversibleCircuit.from_json(obj, budget)


# -- prepared states -------------------------------------------------------

class PreparedState(CTState):
    """``W (|J, M> (x) |0^k>)`` for a classical circuit ``W`` on ``n + k`` wires."""

    def __init__(self, circuit, label: SchurLabel):
        if circuit is None:
            circuit = ReversibleCircuit(label.n)
        if circuit.n_wires < label.n:
            raise LengthMismatch(
                f"circuit has {circuit.n_wires} wires but the input needs {label.n}"
            )
        self.circuit = circuit
        self.label = label
        self.base = SchurState(label)
        self.n = circuit.n_wires
        self.ancillas = circuit.n_wires - label.n

    def amplitudes(self, bits: np.ndarray) -> np.ndarray:
        pre = self.circuit.apply_inverse_bits(to_bits(bits, self.n))
        amp = self.base.amplitudes(pre[:, : self.label.n])
        if self.ancillas:
            amp = np.where(pre[:, self.label.n :].any(axis=1), 0.0, amp)
        return amp

    def sample_counts(self, counts, rng):
        origin, bits, cnt = self.base.sample_counts(counts, rng)
        if self.ancillas:
            bits = np.concatenate(
                [bits, np.zeros((bits.shape[0], self.ancillas), dtype=np.uint8)], axis=1
            )
        return origin, self.circuit.apply_bits(bits), cnt


def prepared_amplitude(s: PreparedState, x) -> float:
    return s.amplitude(x)


def prepared_sample(s: PreparedState, rng: np.random.Generator) -> str:
    return s.sample(rng)


class PermutedState(CTState):
    """``U |inner>`` for a wire permutation (or any bijective classical circuit) ``U``."""

    def __init__(self, gate, inner: CTState):
        if gate.n_wires != inner.n:
            raise LengthMismatch(f"gate has {gate.n_wires} wires, state has {inner.n}")
        self.gate = gate
        self.inner = inner
        self.n = inner.n

    def amplitudes(self, bits):
        return self.inner.amplitudes(self.gate.apply_inverse_bits(to_bits(bits, self.n)))

    def sample_counts(self, counts, rng):
        origin, bits, cnt = self.inner.sample_counts(counts, rng)
        return origin, self.gate.apply_bits(bits), cnt
