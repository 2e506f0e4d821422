"""
Arithmetic circuits and their rank-1 constraint systems.

A circuit is a topologically ordered list of ``mul``/``add`` gates over named
wires. Compilation to R1CS emits one constraint per multiplication gate;
addition gates never cost a constraint, they only grow the linear
combination carried by their output wire. Each public output whose value is
a linear combination gets a single binding constraint ``lc * 1 = out``.

R1CS wire layout: ``[1, public inputs..., public outputs..., private inputs...,
mul outputs...]``; the first ``num_instance`` wires form the statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import DimensionError, MalformedEncoding
from .field import P, FieldElement
from .model import QuantizedModel

ONE = "one"

Sparse = dict[int, int]


@dataclass(frozen=True)
class Gate:
    kind: str  # "mul" | "add"
    left: str
    right: str
    out: str


@dataclass(frozen=True)
class Circuit:
    public_inputs: tuple[str, ...]
    private_inputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    public_outputs: tuple[str, ...]

    def evaluate(self, values: dict[str, int]) -> dict[str, int]:
        env = {ONE: 1, **{k: v % P for k, v in values.items()}}
        for g in self.gates:
            a, b = env[g.left], env[g.right]
            env[g.out] = (a * b if g.kind == "mul" else a + b) % P
        return env


@dataclass(frozen=True)
class R1CSSystem:
    num_instance: int
    num_witness: int
    constraints: tuple[tuple[Sparse, Sparse, Sparse], ...]
    wire_names: tuple[str, ...] = ()
    circuit: Circuit | None = field(default=None, compare=False)

    @property
    def num_wires(self) -> int:
        return self.num_instance + self.num_witness

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)


@dataclass(frozen=True)
class Witness:
    assignment: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.assignment)

    def public_inputs(self, sys: R1CSSystem) -> list[FieldElement]:
        return [FieldElement(v) for v in self.assignment[1:sys.num_instance]]

    def perturbed(self, wire: int, delta: int = 1) -> "Witness":
        z = list(self.assignment)
        z[wire] = (z[wire] + delta) % P
        return Witness(tuple(z))


def linear_circuit(n_features: int) -> Circuit:
    """Gates for ``y = bias + sum_i a_i * x_i``; weights and bias are private."""
    if n_features < 1:
        raise ValueError("n_features must be >= 1")
    xs = tuple(f"x{i}" for i in range(1, n_features + 1))
    ws = tuple(f"a{i}" for i in range(1, n_features + 1))
    gates = [Gate("mul", w, x, f"prod{i}") for i, (w, x) in enumerate(zip(ws, xs), 1)]
    acc = "bias"
    for i in range(1, n_features + 1):
        out = "y" if i == n_features else f"sum{i}"
        gates.append(Gate("add", acc, f"prod{i}", out))
        acc = out
    return Circuit(xs, ("bias",) + ws, tuple(gates), ("y",))


def compile_circuit(c: Circuit) -> R1CSSystem:
    names = [ONE, *c.public_inputs, *c.public_outputs]
    num_instance = len(names)
    names += list(c.private_inputs)
    index = {n: i for i, n in enumerate(names)}
    lc: dict[str, Sparse] = {n: {i: 1} for n, i in index.items()
                             if n not in c.public_outputs}
    constraints = []

    for g in c.gates:
        left, right = lc[g.left], lc[g.right]
        if g.kind == "add":
            merged = dict(left)
            for k, v in right.items():
                merged[k] = (merged.get(k, 0) + v) % P
            lc[g.out] = {k: v for k, v in merged.items() if v}
        elif g.kind == "mul":
            if g.out in c.public_outputs:
                out_idx = index[g.out]
            else:
                out_idx = len(names)
                names.append(g.out)
                index[g.out] = out_idx
            constraints.append((dict(left), dict(right), {out_idx: 1}))
            lc[g.out] = {out_idx: 1}
        else:
            raise ValueError(f"unknown gate kind {g.kind!r}")

    for out in c.public_outputs:
        if lc[out] != {index[out]: 1}:
            constraints.append((lc[out], {0: 1}, {index[out]: 1}))

    return R1CSSystem(num_instance, len(names) - num_instance, tuple(constraints),
                      tuple(names), c)


def compile_linear(n_features: int) -> R1CSSystem:
    return compile_circuit(linear_circuit(n_features))


def count_constraints_by_gates(c: Circuit) -> int:
    """Independent count: mul gates plus one binding per add-driven output."""
    driven_by_add = {g.out for g in c.gates if g.kind == "add"}
    return (sum(g.kind == "mul" for g in c.gates)
            + sum(o in driven_by_add for o in c.public_outputs))


def generate_witness(sys: R1CSSystem, model: QuantizedModel,
                     x: Sequence[FieldElement | int]) -> Witness:
    """Evaluate the circuit on quantized inputs.

    The bias wire carries the intercept at the product scale 2^(2*scale_bits)
    so the output is a single fixed-point number at that scale.
    """
    c = sys.circuit
    if c is None:
        raise ValueError("system was not compiled from a circuit")
    if len(x) != len(c.public_inputs) or model.n_features != len(c.public_inputs):
        raise DimensionError(f"circuit takes {len(c.public_inputs)} inputs, got "
                             f"{len(x)} inputs and {model.n_features} weights")
    values = {"bias": model.intercept.value << model.scale_bits}
    for i, (w, xi) in enumerate(zip(model.weights, x), 1):
        values[f"a{i}"] = int(w)
        values[f"x{i}"] = int(xi)
    env = c.evaluate(values)
    return Witness(tuple(env[n] for n in sys.wire_names))


def _dot(row: Sparse, z: Sequence[int]) -> int:
    return sum(c * z[i] for i, c in row.items()) % P


def check_r1cs(sys: R1CSSystem, z: Witness | Sequence[int]) -> bool:
    assignment = z.assignment if isinstance(z, Witness) else tuple(z)
    if len(assignment) != sys.num_wires:
        raise DimensionError(f"assignment has {len(assignment)} wires, "
                             f"system has {sys.num_wires}")
    if assignment[0] % P != 1:
        return False
    return all(_dot(a, assignment) * _dot(b, assignment) % P == _dot(c, assignment)
               for a, b, c in sys.constraints)


# textual dump

def _fmt(row: Sparse) -> str:
    return " ".join(f"{i}:{row[i]}" for i in sorted(row))


def dump_r1cs(sys: R1CSSystem) -> str:
    lines = [f"r1cs {sys.num_instance} {sys.num_witness} {sys.num_constraints}"]
    lines += [" | ".join((_fmt(a), _fmt(b), _fmt(c))) for a, b, c in sys.constraints]
    return "\n".join(lines) + "\n"


def parse_r1cs(text: str) -> R1CSSystem:
    lines = text.strip("\n").split("\n")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "r1cs":
        raise MalformedEncoding("missing r1cs header")
    ni, nw, m = map(int, head[1:])
    rows = []
    for line in lines[1:]:
        parts = line.split(" | ")
        if len(parts) != 3:
            raise MalformedEncoding(f"bad constraint line {line!r}")
        rows.append(tuple({int(i): int(c) for i, c in (t.split(":") for t in part.split())}
                          for part in parts))
    if len(rows) != m:
        raise MalformedEncoding("constraint count mismatch")
    return R1CSSystem(ni, nw, tuple(rows))
