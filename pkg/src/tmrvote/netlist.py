"""Combinational netlists: data model, zero-delay evaluation, depth, text format.

A netlist is a DAG of cell instances over dense net ids. Each net is either a
primary input or the output of exactly one instance; there is a single
primary output. Input vectors are ordered as the primary inputs are listed,
and pattern ``i`` of a truth table assigns the first input the most
significant bit of ``i``.

Text format::

    # comment
    inputs X Y Z
    output V
    w = XOR2(X, Y)
    V = AO22(w, Z, X, Y)
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

from .gatelib import CELL_FUNCTIONS, CellKind, CellTable, StructuralError, default_cell_table

MAX_TRUTH_TABLE_INPUTS = 20

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
RESERVED = frozenset({"inputs", "output"})


class ArityError(StructuralError):
    pass


class CycleError(StructuralError):
    pass


class MultiplyDrivenError(StructuralError):
    pass


class UndrivenNetError(StructuralError):
    pass


class UnreachableOutputError(StructuralError):
    pass


class NetlistSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Net(NamedTuple):
    id: int
    name: Optional[str]


@dataclass(frozen=True)
class Instance:
    kind: CellKind
    inputs: tuple[int, ...]
    output: int


@dataclass(frozen=True)
class Netlist:
    """Immutable combinational netlist with one primary output.

    Construction does not check the structure; :func:`validate` does, and
    every analysis calls it before doing work.
    """

    net_names: tuple[Optional[str], ...]
    primary_inputs: tuple[int, ...]
    primary_output: int
    instances: tuple[Instance, ...] = field(default=())

    @property
    def nets(self) -> list[Net]:
        return [Net(i, n) for i, n in enumerate(self.net_names)]

    @property
    def num_nets(self) -> int:
        return len(self.net_names)

    @cached_property
    def names(self) -> tuple[str, ...]:
        """Display name per net; unnamed nets get a unique ``n<id>`` label."""
        taken = {n for n in self.net_names if n is not None}
        out = []
        for i, n in enumerate(self.net_names):
            if n is None:
                n = f"n{i}"
                while n in taken:
                    n += "_"
                taken.add(n)
            out.append(n)
        return tuple(out)

    def net_id(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no net named {name!r}") from None

    @cached_property
    def drivers(self) -> dict[int, int]:
        """Map net id -> index of the driving instance."""
        return {inst.output: i for i, inst in enumerate(self.instances)}

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Instance indices in topological order, ties broken by creation index."""
        validate(self)
        return _topo_order(self)

    def instance_output_nets(self) -> list[int]:
        return [self.instances[i].output for i in self.topological_order]


def _topo_order(nl: Netlist) -> tuple[int, ...]:
    drivers = {inst.output: i for i, inst in enumerate(nl.instances)}
    indegree = [0] * len(nl.instances)
    fanout: list[list[int]] = [[] for _ in nl.instances]
    for i, inst in enumerate(nl.instances):
        for src in set(inst.inputs):
            d = drivers.get(src)
            if d is not None:
                indegree[i] += 1
                fanout[d].append(i)
    ready = [i for i, deg in enumerate(indegree) if deg == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in fanout[i]:
            indegree[j] -= 1
            if indegree[j] == 0:
                heapq.heappush(ready, j)
    if len(order) != len(nl.instances):
        stuck = min(i for i, deg in enumerate(indegree) if deg > 0)
        raise CycleError(
            f"combinational cycle through instance {stuck} "
            f"(drives {nl.names[nl.instances[stuck].output]!r})"
        )
    return tuple(order)


def validate(nl: Netlist) -> None:
    """Raise the first structural violation found; return None when valid."""
    n = len(nl.net_names)

    def check_ref(net, what):
        if not isinstance(net, int) or not 0 <= net < n:
            raise UndrivenNetError(f"{what} references undefined net {net!r}")

    named = [x for x in nl.net_names if x is not None]
    if len(set(named)) != len(named):
        dup = next(x for x in named if named.count(x) > 1)
        raise StructuralError(f"net name {dup!r} used for more than one net")

    for net in nl.primary_inputs:
        check_ref(net, "primary input list")
    if len(set(nl.primary_inputs)) != len(nl.primary_inputs):
        raise StructuralError("primary input listed twice")
    check_ref(nl.primary_output, "primary output")

    driven = {net: None for net in nl.primary_inputs}
    for i, inst in enumerate(nl.instances):
        if len(inst.inputs) != inst.kind.arity:
            raise ArityError(
                f"instance {i} ({inst.kind}) has {len(inst.inputs)} inputs, "
                f"expected {inst.kind.arity}"
            )
        for net in inst.inputs:
            check_ref(net, f"instance {i} ({inst.kind})")
        check_ref(inst.output, f"instance {i} ({inst.kind}) output")
        if inst.output in driven:
            other = driven[inst.output]
            source = "a primary input" if other is None else f"instance {other}"
            raise MultiplyDrivenError(
                f"net {nl.names[inst.output]!r} driven by instance {i} and {source}"
            )
        driven[inst.output] = i

    for net in range(n):
        if net not in driven:
            raise UndrivenNetError(f"net {nl.names[net]!r} is neither an input nor driven")

    _topo_order(nl)

    # Walk the output cone back to the inputs.
    drivers = {inst.output: i for i, inst in enumerate(nl.instances)}
    pis = set(nl.primary_inputs)
    stack, seen = [nl.primary_output], set()
    while stack:
        net = stack.pop()
        if net in pis:
            return
        if net in seen:
            continue
        seen.add(net)
        stack.extend(nl.instances[drivers[net]].inputs)
    raise UnreachableOutputError(
        f"primary output {nl.names[nl.primary_output]!r} is not reachable from any input"
    )


class NetlistBuilder:
    """Incremental construction helper used by the voter constructors.

    >>> b = NetlistBuilder(["A"])
    >>> b.add(CellKind.INV, "A", name="Q")
    1
    >>> b.build("Q").names
    ('A', 'Q')
    """

    def __init__(self, inputs: Iterable[str] = ("X", "Y", "Z")):
        self._names: list[Optional[str]] = []
        self._index: dict[str, int] = {}
        self._instances: list[Instance] = []
        self.inputs = [self.net(name) for name in inputs]

    def net(self, name: Optional[str] = None) -> int:
        if name is not None:
            if name in self._index:
                raise StructuralError(f"net {name!r} already exists")
            self._index[name] = len(self._names)
        self._names.append(name)
        return len(self._names) - 1

    def ref(self, net) -> int:
        return self._index[net] if isinstance(net, str) else net

    def add(self, kind, *inputs, name: Optional[str] = None) -> int:
        if isinstance(kind, str):
            kind = CellKind.parse(kind)
        out = self.net(name)
        self._instances.append(Instance(kind, tuple(self.ref(x) for x in inputs), out))
        return out

    def build(self, output, check: bool = True) -> Netlist:
        nl = Netlist(
            net_names=tuple(self._names),
            primary_inputs=tuple(self.inputs),
            primary_output=self.ref(output),
            instances=tuple(self._instances),
        )
        if check:
            validate(nl)
        return nl


# --- evaluation -------------------------------------------------------------

Override = Callable[[int, int], int]


def simulate(
    nl: Netlist,
    words: Sequence[int],
    mask: int,
    overrides: Optional[dict[int, Override]] = None,
) -> list[int]:
    """Bit-parallel zero-delay simulation.

    ``words[k]`` carries primary input ``k`` for every pattern bit in ``mask``.
    ``overrides`` maps a net id to ``f(value, mask)``; it is applied right after
    the net gets its value, so every fanout branch sees the overridden value.
    """
    if len(words) != len(nl.primary_inputs):
        raise ValueError(f"expected {len(nl.primary_inputs)} input words, got {len(words)}")
    order = nl.topological_order
    values = [0] * nl.num_nets
    for net, w in zip(nl.primary_inputs, words):
        values[net] = w & mask
        if overrides and net in overrides:
            values[net] = overrides[net](values[net], mask) & mask
    for i in order:
        inst = nl.instances[i]
        v = CELL_FUNCTIONS[inst.kind](mask, *(values[x] for x in inst.inputs))
        if overrides and inst.output in overrides:
            v = overrides[inst.output](v, mask)
        values[inst.output] = v & mask
    return values


def evaluate(
    nl: Netlist,
    inputs: Sequence[int],
    overrides: Optional[dict[int, Override]] = None,
) -> list[int]:
    """Evaluate one input vector; returns the value of every net by id."""
    for bit in inputs:
        if bit not in (0, 1):
            raise ValueError(f"inputs must be bits, got {bit!r}")
    return simulate(nl, [int(b) for b in inputs], 1, overrides)


def input_columns(n: int) -> tuple[list[int], int]:
    """Input words enumerating all ``2**n`` patterns in ascending order."""
    size = 1 << n
    mask = (1 << size) - 1
    cols = []
    for k in range(n):
        run = 1 << (n - 1 - k)
        period = ((1 << run) - 1) << run
        word, width = period, 2 * run
        while width < size:
            word |= word << width
            width *= 2
        cols.append(word & mask)
    return cols, mask


def pattern_bits(word: int, n_patterns: int) -> tuple[int, ...]:
    return tuple((word >> i) & 1 for i in range(n_patterns))


def truth_table(nl: Netlist) -> tuple[int, ...]:
    """Output value for every input pattern, ``000..0`` first."""
    n = len(nl.primary_inputs)
    if n > MAX_TRUTH_TABLE_INPUTS:
        raise ValueError(f"truth table over {n} inputs exceeds the {MAX_TRUTH_TABLE_INPUTS}-input guard")
    cols, mask = input_columns(n)
    out = simulate(nl, cols, mask)[nl.primary_output]
    return pattern_bits(out, 1 << n)


def logic_depth(nl: Netlist, table: Optional[CellTable] = None, unit: bool = False):
    """Longest primary-input to primary-output path.

    With ``unit`` every instance counts 1; otherwise the cells' delay weights
    are summed along the path.
    """
    if table is None and not unit:
        table = default_cell_table()
    arrival = [0] * nl.num_nets
    for i in nl.topological_order:
        inst = nl.instances[i]
        w = 1 if unit else table[inst.kind].delay_weight
        arrival[inst.output] = max(arrival[x] for x in inst.inputs) + w
    return arrival[nl.primary_output]


# --- text format ------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[=(),]))")


def _tokenize(line: str, lineno: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = line.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise NetlistSyntaxError(f"unexpected character {text[col - 1]!r}", lineno, col)
        kind = "ident" if m.group("ident") else "punct"
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start + 1))
        pos = m.end()
    return tokens


def parse_netlist(text: str) -> Netlist:
    """Parse the netlist text format; raises on syntax or structural errors."""
    inputs: Optional[list[str]] = None
    output: Optional[str] = None
    gates: list[tuple[str, CellKind, list[tuple[str, int, int]], int]] = []
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0]
        toks = _tokenize(line, lineno)
        if not toks:
            continue
        kind0, val0, col0 = toks[0]
        if kind0 != "ident":
            raise NetlistSyntaxError(f"unexpected {val0!r}", lineno, col0)
        is_assign = len(toks) > 1 and toks[1][1] == "="
        if val0 == "inputs" and not is_assign:
            if inputs is not None:
                raise NetlistSyntaxError("duplicate 'inputs' header", lineno, col0)
            for k, v, c in toks[1:]:
                if k != "ident" or v in RESERVED:
                    raise NetlistSyntaxError(f"expected net name, got {v!r}", lineno, c)
            inputs = [v for _, v, _ in toks[1:]]
            if not inputs:
                raise NetlistSyntaxError("'inputs' needs at least one net", lineno, col0)
            continue
        if val0 == "output" and not is_assign:
            if output is not None:
                raise NetlistSyntaxError("duplicate 'output' header", lineno, col0)
            if len(toks) < 2 or toks[1][0] != "ident" or toks[1][1] in RESERVED:
                col = toks[1][2] if len(toks) > 1 else col0 + len(val0)
                raise NetlistSyntaxError("'output' takes exactly one net name", lineno, col)
            if len(toks) > 2:
                raise NetlistSyntaxError("'output' takes exactly one net name", lineno, toks[2][2])
            output = toks[1][1]
            continue
        gates.append(_parse_instance(toks, lineno, len(line.rstrip()) + 1))

    if inputs is None:
        raise NetlistSyntaxError("missing 'inputs' header", last_line + 1, 1)
    if output is None:
        raise NetlistSyntaxError("missing 'output' header", last_line + 1, 1)

    index: dict[str, int] = {}
    names: list[str] = []
    for name in inputs:
        if name in index:
            raise StructuralError(f"primary input {name!r} listed twice")
        index[name] = len(names)
        names.append(name)
    for out, _, _, lineno in gates:
        if out in index:
            raise MultiplyDrivenError(f"line {lineno}: net {out!r} is already driven")
        index[out] = len(names)
        names.append(out)

    instances = []
    for out, kind, args, lineno in gates:
        ids = []
        for name, line_no, col in args:
            if name not in index:
                raise UndrivenNetError(f"line {line_no}, column {col}: undefined net {name!r}")
            ids.append(index[name])
        instances.append(Instance(kind, tuple(ids), index[out]))
    if output not in index:
        raise UndrivenNetError(f"output net {output!r} is undefined")

    nl = Netlist(tuple(names), tuple(range(len(inputs))), index[output], tuple(instances))
    validate(nl)
    return nl


def _parse_instance(toks, lineno, eol_col):
    def expect(pos, want):
        if pos >= len(toks):
            raise NetlistSyntaxError(f"expected {want}, got end of line", lineno, eol_col)
        k, v, c = toks[pos]
        if want == "identifier":
            if k != "ident":
                raise NetlistSyntaxError(f"expected identifier, got {v!r}", lineno, c)
        elif v != want:
            raise NetlistSyntaxError(f"expected {want!r}, got {v!r}", lineno, c)
        return toks[pos]

    _, out, ocol = expect(0, "identifier")
    if out in RESERVED:
        raise NetlistSyntaxError(f"{out!r} is a reserved word", lineno, ocol)
    expect(1, "=")
    _, kind_name, kcol = expect(2, "identifier")
    try:
        kind = CellKind[kind_name]
    except KeyError:
        raise NetlistSyntaxError(f"unknown cell kind {kind_name!r}", lineno, kcol) from None
    expect(3, "(")
    args = []
    pos = 4
    while True:
        _, name, col = expect(pos, "identifier")
        if name in RESERVED:
            raise NetlistSyntaxError(f"{name!r} is a reserved word", lineno, col)
        args.append((name, lineno, col))
        pos += 1
        if pos < len(toks) and toks[pos][1] == ",":
            pos += 1
            continue
        expect(pos, ")")
        pos += 1
        break
    if pos != len(toks):
        raise NetlistSyntaxError(f"trailing {toks[pos][1]!r}", lineno, toks[pos][2])
    return out, kind, args, lineno


def export_netlist(nl: Netlist) -> str:
    """Canonical text: instances in topological order, every net named."""
    names = nl.names
    for name in names:
        if not IDENT_RE.fullmatch(name) or name in RESERVED:
            raise StructuralError(f"net name {name!r} cannot be written in the text format")
    lines = [
        "inputs " + " ".join(names[i] for i in nl.primary_inputs),
        "output " + names[nl.primary_output],
    ]
    for i in nl.topological_order:
        inst = nl.instances[i]
        args = ", ".join(names[x] for x in inst.inputs)
        lines.append(f"{names[inst.output]} = {inst.kind.value}({args})")
    return "\n".join(lines) + "\n"


def structure(nl: Netlist) -> tuple:
    """Name-based canonical form; equal for structurally identical netlists."""
    names = nl.names
    return (
        tuple(names[i] for i in nl.primary_inputs),
        names[nl.primary_output],
        tuple(
            (names[nl.instances[i].output], nl.instances[i].kind,
             tuple(names[x] for x in nl.instances[i].inputs))
            for i in nl.topological_order
        ),
    )


def structurally_equal(a: Netlist, b: Netlist) -> bool:
    return structure(a) == structure(b)
