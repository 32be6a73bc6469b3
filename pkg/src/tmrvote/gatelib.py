"""Cell catalog: gate kinds, their Boolean functions and physical proxy parameters.

Every cell function works on Python integers used as bit-parallel words.
``mask`` has one bit set per simulated pattern; a single-pattern evaluation
uses ``mask=1``. Inversion is always ``~a & mask``.
"""

from __future__ import annotations

import enum
import io
import os
import re
import warnings
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, replace
from typing import Callable, TextIO, Union


class StructuralError(ValueError):
    """A circuit or cell invocation violates a structural rule."""


class CellConfigError(ValueError):
    """A cell configuration file is malformed or violates the catalog rules."""


class CellConfigWarning(UserWarning):
    pass


class CellKind(enum.Enum):
    INV = "INV"
    AND2 = "AND2"
    OR2 = "OR2"
    OR3 = "OR3"
    NAND2 = "NAND2"
    NAND3 = "NAND3"
    XOR2 = "XOR2"
    XNOR2 = "XNOR2"
    AO21 = "AO21"
    OA21 = "OA21"
    AO22 = "AO22"
    OA22 = "OA22"
    AO222 = "AO222"
    OA222 = "OA222"
    MUX2 = "MUX2"
    MUX4 = "MUX4"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @classmethod
    def parse(cls, name: str) -> "CellKind":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown cell kind {name!r}") from None

    def __str__(self) -> str:
        return self.value


_ARITY = {
    CellKind.INV: 1,
    CellKind.AND2: 2, CellKind.OR2: 2, CellKind.NAND2: 2,
    CellKind.XOR2: 2, CellKind.XNOR2: 2,
    CellKind.OR3: 3, CellKind.NAND3: 3, CellKind.AO21: 3,
    CellKind.OA21: 3, CellKind.MUX2: 3,
    CellKind.AO22: 4, CellKind.OA22: 4,
    CellKind.AO222: 6, CellKind.OA222: 6, CellKind.MUX4: 6,
}


def _mux2(m, s, d0, d1):
    return (~s & m & d0) | (s & d1)


def _mux4(m, s1, s0, d0, d1, d2, d3):
    ns1, ns0 = ~s1 & m, ~s0 & m
    return (ns1 & ns0 & d0) | (ns1 & s0 & d1) | (s1 & ns0 & d2) | (s1 & s0 & d3)


# Signature: f(mask, *inputs) -> word. Input order is the pin order used in netlists.
CELL_FUNCTIONS: dict[CellKind, Callable[..., int]] = {
    CellKind.INV: lambda m, a: ~a & m,
    CellKind.AND2: lambda m, a, b: a & b,
    CellKind.OR2: lambda m, a, b: a | b,
    CellKind.OR3: lambda m, a, b, c: a | b | c,
    CellKind.NAND2: lambda m, a, b: ~(a & b) & m,
    CellKind.NAND3: lambda m, a, b, c: ~(a & b & c) & m,
    CellKind.XOR2: lambda m, a, b: a ^ b,
    CellKind.XNOR2: lambda m, a, b: ~(a ^ b) & m,
    CellKind.AO21: lambda m, a, b, c: (a & b) | c,
    CellKind.OA21: lambda m, a, b, c: (a | b) & c,
    CellKind.AO22: lambda m, a, b, c, d: (a & b) | (c & d),
    CellKind.OA22: lambda m, a, b, c, d: (a | b) & (c | d),
    CellKind.AO222: lambda m, a, b, c, d, e, f: (a & b) | (c & d) | (e & f),
    CellKind.OA222: lambda m, a, b, c, d, e, f: (a | b) & (c | d) & (e | f),
    CellKind.MUX2: _mux2,
    CellKind.MUX4: _mux4,
}


def cell_eval(kind: CellKind, inputs) -> int:
    """Evaluate one cell on a bit vector.

    MUX2 pins are ``(sel, d0, d1)``; MUX4 pins are ``(s1, s0, d0, d1, d2, d3)``
    and select ``d[2*s1 + s0]``.
    """
    inputs = tuple(inputs)
    if len(inputs) != kind.arity:
        raise StructuralError(f"{kind} takes {kind.arity} inputs, got {len(inputs)}")
    for bit in inputs:
        if bit not in (0, 1):
            raise ValueError(f"cell inputs must be bits, got {bit!r}")
    return CELL_FUNCTIONS[kind](1, *(int(b) for b in inputs))


@dataclass(frozen=True)
class CellParams:
    kind: CellKind
    transistors: int
    delay_weight: float
    load_weight: float

    def __post_init__(self):
        if self.transistors < 2:
            raise CellConfigError(f"{self.kind}: transistor count must be >= 2")
        if not self.delay_weight > 0:
            raise CellConfigError(f"{self.kind}: delay_weight must be positive")
        if not self.load_weight > 0:
            raise CellConfigError(f"{self.kind}: load_weight must be positive")


# Counts stated outright for the complex cells; loading a table may not change
# them silently.
ANCHORED_TRANSISTORS = {
    CellKind.AO22: 10,
    CellKind.OA22: 10,
    CellKind.AO222: 12,
    CellKind.OA222: 12,
}

DEFAULT_TRANSISTORS = {
    CellKind.INV: 2,
    CellKind.NAND2: 4,
    CellKind.NAND3: 6,
    CellKind.AND2: 6,
    CellKind.OR2: 6,
    CellKind.OR3: 8,
    CellKind.XOR2: 12,
    CellKind.XNOR2: 12,
    CellKind.AO21: 8,
    CellKind.OA21: 8,
    CellKind.MUX2: 12,
    CellKind.MUX4: 28,
    **ANCHORED_TRANSISTORS,
}

_SLOW_CELLS = {CellKind.XOR2, CellKind.XNOR2, CellKind.MUX2, CellKind.MUX4}


class CellTable(Mapping):
    """Immutable map from every :class:`CellKind` to its :class:`CellParams`."""

    def __init__(self, entries: Mapping[CellKind, CellParams]):
        missing = [k.value for k in CellKind if k not in entries]
        if missing:
            raise CellConfigError(f"cell table lacks entries for {', '.join(missing)}")
        for kind, params in entries.items():
            if params.kind is not kind:
                raise CellConfigError(f"entry for {kind} describes {params.kind}")
        self._entries = {k: entries[k] for k in CellKind}

    def __getitem__(self, kind: CellKind) -> CellParams:
        return self._entries[kind]

    def __iter__(self) -> Iterator[CellKind]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other):
        if isinstance(other, CellTable):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._entries.values()))

    def __repr__(self):
        return f"CellTable({len(self)} kinds)"

    def serialize(self) -> str:
        """Render in the ``KIND.field = value`` config format."""
        lines = []
        for kind, p in self._entries.items():
            lines.append(f"{kind.value}.transistors = {p.transistors}")
            lines.append(f"{kind.value}.delay_weight = {p.delay_weight!r}")
            lines.append(f"{kind.value}.load_weight = {p.load_weight!r}")
        return "\n".join(lines) + "\n"


def default_cell_table() -> CellTable:
    entries = {}
    for kind in CellKind:
        t = DEFAULT_TRANSISTORS[kind]
        entries[kind] = CellParams(
            kind=kind,
            transistors=t,
            delay_weight=2.0 if kind in _SLOW_CELLS else 1.0,
            load_weight=t / 2,
        )
    return CellTable(entries)


_LINE_RE = re.compile(r"^\s*([A-Za-z0-9_]+)\s*\.\s*([A-Za-z_]+)\s*=\s*(\S+)\s*$")
_FIELDS = ("transistors", "delay_weight", "load_weight")


def load_cell_table(
    source: Union[str, os.PathLike, TextIO],
    allow_override: bool = False,
) -> CellTable:
    """Overlay the defaults with entries from a cell config file.

    ``source`` is a path or an open text stream. Lines look like
    ``XOR2.delay_weight = 2``; ``#`` starts a comment. A duplicate key keeps
    the last value and emits :class:`CellConfigWarning`. Changing an anchored
    transistor count (AO22, OA22, AO222, OA222) requires ``allow_override``.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
        where = os.fspath(source)
    else:
        text = source.read()
        where = getattr(source, "name", "<stream>")

    updates: dict[CellKind, dict[str, float]] = {}
    seen: set[tuple[CellKind, str]] = set()
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise CellConfigError(f"{where}:{lineno}: expected 'KIND.field = value'")
        kind_name, field, value = m.groups()
        try:
            kind = CellKind.parse(kind_name)
        except ValueError:
            raise CellConfigError(f"{where}:{lineno}: unknown cell kind {kind_name!r}") from None
        if field not in _FIELDS:
            raise CellConfigError(f"{where}:{lineno}: unknown field {field!r}")
        try:
            number = int(value) if field == "transistors" else float(value)
        except ValueError:
            raise CellConfigError(f"{where}:{lineno}: bad number {value!r}") from None
        if (kind, field) in seen:
            warnings.warn(
                f"{where}:{lineno}: duplicate key {kind.value}.{field}, last value wins",
                CellConfigWarning,
                stacklevel=2,
            )
        seen.add((kind, field))
        updates.setdefault(kind, {})[field] = number

    base = default_cell_table()
    entries = {}
    for kind in CellKind:
        fields = updates.get(kind, {})
        t = fields.get("transistors")
        if (
            t is not None
            and kind in ANCHORED_TRANSISTORS
            and t != ANCHORED_TRANSISTORS[kind]
            and not allow_override
        ):
            raise CellConfigError(
                f"{kind.value}.transistors is fixed at {ANCHORED_TRANSISTORS[kind]}; "
                "pass allow_override to change it"
            )
        entries[kind] = replace(base[kind], **fields) if fields else base[kind]
    return CellTable(entries)
