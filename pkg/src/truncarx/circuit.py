"""Register-machine circuits over fixed-width words.

Six opcodes — ADD (optionally carry-truncated), XOR, ROTL, PERMB (bit
permutation), PERMW (word permutation over all registers), CONST —
are enough to express ARX/APX algorithms.  A circuit can be run two
ways:

* concretely (`eval_concrete`), with an optional override replacing
  the truncation of *every* ADD (the H -> H_m transformation), and an
  instrumented count of executed additions;
* symbolically (`eval_symbolic`), propagating one AnfPoly per register
  bit and producing the encoding polynomials of the output bits.

Collision and preimage polynomial systems are built from the symbolic
route and exported in a stable text format.

File format (line-based; `#` starts a comment)::

    circuit n=<width> regs=<count>
    input r0 r1 ...
    const r<i> 0x<hex>
    add r<d> r<a> r<b>            # full addition (m = n-1)
    add[<m>] r<d> r<a> r<b>       # m-truncated
    xor r<d> r<a> r<b>
    rotl r<d> r<a> <r>
    permb r<d> r<a> <p0> ... <p_{n-1}>   # bit i of dest = bit p_i of src
    permw <t0> ... <t_{R-1}>             # word i = old word t_i
    output r0 r1 ...
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from .anf import DEFAULT_MONOMIAL_BUDGET, AnfPoly, MonomialBudgetError, parse_poly, poly_mul
from .words import Word, rotl, trunc_add_fast

__all__ = [
    "CircuitError",
    "CircuitParseError",
    "Instruction",
    "Circuit",
    "parse_circuit",
    "render_circuit",
    "eval_concrete",
    "encode_bit_add",
    "eval_symbolic",
    "circuit_degree",
    "PolySystem",
    "build_collision_system",
    "build_preimage_system",
    "export_system",
    "parse_system",
]

MAX_REGS = 256

OPCODES = ("add", "xor", "rotl", "permb", "permw", "const")


class CircuitError(Exception):
    pass


class CircuitParseError(CircuitError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Instruction:
    op: str
    dest: int | None = None
    a: int | None = None
    b: int | None = None
    m: int | None = None  # add only; None means full (n-1)
    rot: int | None = None
    perm: tuple[int, ...] | None = None
    value: int | None = None

    def render(self) -> str:
        if self.op == "add":
            name = "add" if self.m is None else f"add[{self.m}]"
            return f"{name} r{self.dest} r{self.a} r{self.b}"
        if self.op == "xor":
            return f"xor r{self.dest} r{self.a} r{self.b}"
        if self.op == "rotl":
            return f"rotl r{self.dest} r{self.a} {self.rot}"
        if self.op == "permb":
            return f"permb r{self.dest} r{self.a} " + " ".join(map(str, self.perm))
        if self.op == "permw":
            return "permw " + " ".join(map(str, self.perm))
        if self.op == "const":
            return f"const r{self.dest} {self.value:#x}"
        raise CircuitError(f"unknown opcode {self.op!r}")


def _is_perm(seq: Sequence[int], size: int) -> bool:
    return len(seq) == size and sorted(seq) == list(range(size))


def _tagged(msg: str, where) -> "CircuitError":
    # `where` lets parse_circuit map a semantic error back to a source line
    e = CircuitError(msg)
    e.where = where
    return e


@dataclass(frozen=True)
class Circuit:
    width: int
    nregs: int
    inputs: tuple[int, ...]
    instructions: tuple[Instruction, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        n, r = self.width, self.nregs
        if not 2 <= n <= 64:
            raise _tagged(f"width must be in [2, 64], got {n}", "header")
        if not 1 <= r <= MAX_REGS:
            raise _tagged(
                f"register count must be in [1, {MAX_REGS}], got {r}", "header"
            )
        if len(set(self.inputs)) != len(self.inputs):
            raise _tagged("duplicate input register", "inputs")
        for reg in self.inputs:
            try:
                self._check_reg(reg)
            except CircuitError as e:
                raise _tagged(str(e), "inputs") from None
        for reg in self.outputs:
            try:
                self._check_reg(reg)
            except CircuitError as e:
                raise _tagged(str(e), "outputs") from None
        written = set(self.inputs)
        for idx, ins in enumerate(self.instructions):
            try:
                written = self._check_instruction(ins, written)
            except CircuitError as e:
                raise _tagged(f"instruction {idx}: {e}", ("ins", idx)) from None
        for reg in self.outputs:
            if reg not in written:
                raise _tagged(f"output register r{reg} is never written", "outputs")

    def _check_reg(self, reg: int | None) -> None:
        if reg is None or not 0 <= reg < self.nregs:
            raise CircuitError(f"register r{reg} out of range (regs={self.nregs})")

    def _check_instruction(self, ins: Instruction, written: set[int]) -> set[int]:
        n = self.width

        def read(reg: int | None) -> None:
            self._check_reg(reg)
            if reg not in written:
                raise CircuitError(f"reads uninitialized register r{reg}")

        if ins.op in ("add", "xor"):
            read(ins.a)
            read(ins.b)
            self._check_reg(ins.dest)
            if ins.op == "add" and ins.m is not None and not 0 <= ins.m <= n - 1:
                raise CircuitError(
                    f"truncation m={ins.m} out of range for width {n}"
                )
            return written | {ins.dest}
        if ins.op == "rotl":
            read(ins.a)
            self._check_reg(ins.dest)
            if not 0 <= ins.rot < n:
                raise CircuitError(f"rotation {ins.rot} out of range for width {n}")
            return written | {ins.dest}
        if ins.op == "permb":
            read(ins.a)
            self._check_reg(ins.dest)
            if ins.perm is None or not _is_perm(ins.perm, n):
                raise CircuitError("permb needs a permutation of bit indices 0..n-1")
            return written | {ins.dest}
        if ins.op == "permw":
            if ins.perm is None or not _is_perm(ins.perm, self.nregs):
                raise CircuitError("permw needs a permutation of all registers")
            return {i for i in range(self.nregs) if ins.perm[i] in written}
        if ins.op == "const":
            self._check_reg(ins.dest)
            if ins.value is None or not 0 <= ins.value < (1 << n):
                raise CircuitError(f"constant out of range for width {n}")
            return written | {ins.dest}
        raise CircuitError(f"unknown opcode {ins.op!r}")

    @property
    def input_bits(self) -> int:
        return len(self.inputs) * self.width

    def add_count(self) -> int:
        return sum(1 for ins in self.instructions if ins.op == "add")

    def digest(self) -> str:
        return hashlib.sha256(render_circuit(self).encode("ascii")).hexdigest()


def render_circuit(c: Circuit) -> str:
    lines = [f"circuit n={c.width} regs={c.nregs}"]
    lines.append("input" + "".join(f" r{i}" for i in c.inputs))
    lines.extend(ins.render() for ins in c.instructions)
    lines.append("output" + "".join(f" r{i}" for i in c.outputs))
    return "\n".join(lines) + "\n"


def _parse_reg(tok: str, line: int) -> int:
    if not tok.startswith("r"):
        raise CircuitParseError(line, f"expected register, got {tok!r}")
    try:
        return int(tok[1:])
    except ValueError:
        raise CircuitParseError(line, f"bad register {tok!r}") from None


def _parse_int(tok: str, line: int) -> int:
    try:
        return int(tok, 16) if tok.lower().startswith("0x") else int(tok)
    except ValueError:
        raise CircuitParseError(line, f"bad integer {tok!r}") from None


def parse_circuit(text: str) -> Circuit:
    """Parse the circuit file format; errors carry a 1-based line number."""
    header = None
    inputs: tuple[int, ...] | None = None
    outputs: tuple[int, ...] | None = None
    instructions: list[Instruction] = []
    header_line = input_line = output_line = 1
    ins_lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        toks = stripped.split()
        op = toks[0]
        if outputs is not None:
            raise CircuitParseError(lineno, "content after output line")
        if header is None:
            if op != "circuit":
                raise CircuitParseError(lineno, "expected circuit header first")
            kv = {}
            for tok in toks[1:]:
                if "=" not in tok:
                    raise CircuitParseError(lineno, f"bad header field {tok!r}")
                key, _, val = tok.partition("=")
                kv[key] = _parse_int(val, lineno)
            if set(kv) != {"n", "regs"}:
                raise CircuitParseError(lineno, "header needs n=<width> regs=<count>")
            header = (kv["n"], kv["regs"])
            header_line = lineno
            continue
        if inputs is None:
            if op != "input":
                raise CircuitParseError(lineno, "expected input line after header")
            inputs = tuple(_parse_reg(t, lineno) for t in toks[1:])
            input_line = lineno
            continue
        if op == "output":
            outputs = tuple(_parse_reg(t, lineno) for t in toks[1:])
            output_line = lineno
        elif op == "add" or (op.startswith("add[") and op.endswith("]")):
            m = None
            if op != "add":
                m = _parse_int(op[4:-1], lineno)
            if len(toks) != 4:
                raise CircuitParseError(lineno, "add needs dest and two sources")
            instructions.append(
                Instruction(
                    "add",
                    dest=_parse_reg(toks[1], lineno),
                    a=_parse_reg(toks[2], lineno),
                    b=_parse_reg(toks[3], lineno),
                    m=m,
                )
            )
        elif op == "xor":
            if len(toks) != 4:
                raise CircuitParseError(lineno, "xor needs dest and two sources")
            instructions.append(
                Instruction(
                    "xor",
                    dest=_parse_reg(toks[1], lineno),
                    a=_parse_reg(toks[2], lineno),
                    b=_parse_reg(toks[3], lineno),
                )
            )
        elif op == "rotl":
            if len(toks) != 4:
                raise CircuitParseError(lineno, "rotl needs dest, source, amount")
            instructions.append(
                Instruction(
                    "rotl",
                    dest=_parse_reg(toks[1], lineno),
                    a=_parse_reg(toks[2], lineno),
                    rot=_parse_int(toks[3], lineno),
                )
            )
        elif op == "permb":
            if len(toks) < 4:
                raise CircuitParseError(lineno, "permb needs dest, source, indices")
            instructions.append(
                Instruction(
                    "permb",
                    dest=_parse_reg(toks[1], lineno),
                    a=_parse_reg(toks[2], lineno),
                    perm=tuple(_parse_int(t, lineno) for t in toks[3:]),
                )
            )
        elif op == "permw":
            instructions.append(
                Instruction(
                    "permw",
                    perm=tuple(_parse_int(t, lineno) for t in toks[1:]),
                )
            )
        elif op == "const":
            if len(toks) != 3:
                raise CircuitParseError(lineno, "const needs dest and value")
            instructions.append(
                Instruction(
                    "const",
                    dest=_parse_reg(toks[1], lineno),
                    value=_parse_int(toks[2], lineno),
                )
            )
        else:
            raise CircuitParseError(lineno, f"unknown opcode {op!r}")
        if len(instructions) > len(ins_lines):
            ins_lines.append(lineno)
    if header is None:
        raise CircuitParseError(1, "missing circuit header")
    if inputs is None:
        raise CircuitParseError(1, "missing input line")
    if outputs is None:
        raise CircuitParseError(1, "missing output line")
    try:
        return Circuit(header[0], header[1], inputs, tuple(instructions), outputs)
    except CircuitError as e:
        where = getattr(e, "where", None)
        line = header_line
        if where == "inputs":
            line = input_line
        elif where == "outputs":
            line = output_line
        elif isinstance(where, tuple) and where[0] == "ins":
            line = ins_lines[where[1]]
        raise CircuitParseError(line, str(e)) from None


def _coerce_inputs(c: Circuit, inputs: Sequence[int | Word]) -> list[int]:
    if len(inputs) != len(c.inputs):
        raise CircuitError(
            f"circuit takes {len(c.inputs)} input words, got {len(inputs)}"
        )
    vals = []
    for v in inputs:
        if isinstance(v, Word):
            if v.width != c.width:
                raise CircuitError(f"input width {v.width} != circuit width {c.width}")
            v = v.value
        if not 0 <= v < (1 << c.width):
            raise CircuitError(f"input {v:#x} out of range for width {c.width}")
        vals.append(v)
    return vals


def eval_concrete(
    c: Circuit,
    inputs: Sequence[int | Word],
    trunc_override: int | None = None,
) -> tuple[tuple[int, ...], int]:
    """Run the circuit on concrete words.

    With trunc_override set, *every* ADD uses that truncation instead
    of its own m (one circuit artifact serves all H_m).  Returns the
    output words and the number of ADD instructions executed.
    """
    n = c.width
    if trunc_override is not None and not 0 <= trunc_override <= n - 1:
        raise CircuitError(f"override m={trunc_override} out of range for width {n}")
    regs: list[int | None] = [None] * c.nregs
    for reg, v in zip(c.inputs, _coerce_inputs(c, inputs)):
        regs[reg] = v
    add_count = 0
    for ins in c.instructions:
        if ins.op == "add":
            m_eff = trunc_override
            if m_eff is None:
                m_eff = ins.m if ins.m is not None else n - 1
            regs[ins.dest] = trunc_add_fast(regs[ins.a], regs[ins.b], m_eff, n)
            add_count += 1
        elif ins.op == "xor":
            regs[ins.dest] = regs[ins.a] ^ regs[ins.b]
        elif ins.op == "rotl":
            regs[ins.dest] = rotl(regs[ins.a], ins.rot, n)
        elif ins.op == "permb":
            src = regs[ins.a]
            v = 0
            for i, p in enumerate(ins.perm):
                v |= ((src >> p) & 1) << i
            regs[ins.dest] = v
        elif ins.op == "permw":
            regs = [regs[p] for p in ins.perm]
        else:  # const
            regs[ins.dest] = ins.value
    return tuple(regs[r] for r in c.outputs), add_count


def encode_bit_add(
    i: int, m: int, xvars: Sequence[int], yvars: Sequence[int]
) -> AnfPoly:
    """ANF of bit i of the m-truncated sum of words with bits x, y.

    (x_i + y_i) + sum_{k=1}^{min(i,m)} x_{i-k} y_{i-k}
                  prod_{j=i-k+1}^{i-1} (x_j + y_j)
    """
    if i < 0 or m < 0:
        raise ValueError("i and m must be >= 0")
    poly = AnfPoly.var(xvars[i]) + AnfPoly.var(yvars[i])
    prod = AnfPoly.one()
    top = min(i, m)
    for k in range(1, top + 1):
        gen = AnfPoly.var(xvars[i - k]) * AnfPoly.var(yvars[i - k])
        poly = poly + gen * prod
        if k < top:
            prod = prod * (AnfPoly.var(xvars[i - k]) + AnfPoly.var(yvars[i - k]))
    return poly


def _symbolic_add(
    abits: list[AnfPoly], bbits: list[AnfPoly], m: int, budget: int
) -> list[AnfPoly]:
    # encode_bit_add composed with the operand polynomials; the product
    # over propagate terms is grown incrementally per bit.
    n = len(abits)
    out = []
    for i in range(n):
        acc = abits[i] + bbits[i]
        prod = AnfPoly.one()
        top = min(i, m)
        for k in range(1, top + 1):
            gen = poly_mul(abits[i - k], bbits[i - k], budget)
            acc = acc + poly_mul(gen, prod, budget)
            if k < top:
                prod = poly_mul(prod, abits[i - k] + bbits[i - k], budget)
        out.append(acc)
    return out


def eval_symbolic(
    c: Circuit,
    trunc_override: int | None = None,
    budget: int = DEFAULT_MONOMIAL_BUDGET,
) -> list[AnfPoly]:
    """Encoding polynomials of the output bits.

    Variable allocation is frozen: input registers in declaration
    order, bit index ascending within each word — input word w, bit b
    is variable w*n + b.  Output polynomials follow the same order
    over output registers.
    """
    n = c.width
    if trunc_override is not None and not 0 <= trunc_override <= n - 1:
        raise CircuitError(f"override m={trunc_override} out of range for width {n}")
    regs: list[list[AnfPoly] | None] = [None] * c.nregs
    for w, reg in enumerate(c.inputs):
        regs[reg] = [AnfPoly.var(w * n + b) for b in range(n)]
    for idx, ins in enumerate(c.instructions):
        try:
            if ins.op == "add":
                m_eff = trunc_override
                if m_eff is None:
                    m_eff = ins.m if ins.m is not None else n - 1
                regs[ins.dest] = _symbolic_add(regs[ins.a], regs[ins.b], m_eff, budget)
            elif ins.op == "xor":
                a, b = regs[ins.a], regs[ins.b]
                regs[ins.dest] = [a[i] + b[i] for i in range(n)]
            elif ins.op == "rotl":
                src = regs[ins.a]
                regs[ins.dest] = [src[(i - ins.rot) % n] for i in range(n)]
            elif ins.op == "permb":
                src = regs[ins.a]
                regs[ins.dest] = [src[p] for p in ins.perm]
            elif ins.op == "permw":
                regs = [regs[p] for p in ins.perm]
            else:  # const
                regs[ins.dest] = [
                    AnfPoly.const((ins.value >> b) & 1) for b in range(n)
                ]
        except MonomialBudgetError as e:
            err = MonomialBudgetError(
                f"instruction {idx} ({ins.render()}): {e}", e.monomials, e.budget
            )
            err.instruction = idx
            raise err from None
    out = []
    for reg in c.outputs:
        out.extend(regs[reg])
    return out


def circuit_degree(
    c: Circuit,
    trunc_override: int | None = None,
    budget: int = DEFAULT_MONOMIAL_BUDGET,
) -> int:
    """Maximum degree over the output-bit encoding polynomials."""
    return max(p.degree for p in eval_symbolic(c, trunc_override, budget))


SYSTEM_KINDS = ("collision", "preimage", "encoding")


@dataclass(frozen=True)
class PolySystem:
    """Polynomials over GF(2), each required to equal zero."""

    nvars: int
    polys: tuple[AnfPoly, ...]
    kind: str
    source_digest: str = ""

    def __post_init__(self) -> None:
        if self.kind not in SYSTEM_KINDS:
            raise ValueError(f"kind must be one of {SYSTEM_KINDS}, got {self.kind!r}")
        if self.nvars < 0:
            raise ValueError("nvars must be >= 0")
        for p in self.polys:
            vs = p.variables()
            if vs and vs[-1] >= self.nvars:
                raise ValueError(
                    f"polynomial uses x{vs[-1]} but nvars={self.nvars}"
                )
        if self.kind == "collision" and self.nvars % 2 != 0:
            raise ValueError("collision system needs an even variable count")


def build_collision_system(
    c: Circuit,
    trunc_override: int | None = None,
    budget: int = DEFAULT_MONOMIAL_BUDGET,
) -> PolySystem:
    """System whose solutions (x, x') satisfy H(x) = H(x').

    Variables 0..V-1 are the first input copy, V..2V-1 the second
    (V = input_bits).  Only off-diagonal solutions are collisions;
    the solver's `nontrivial` flag applies that filter.
    """
    ys = eval_symbolic(c, trunc_override, budget)
    v = c.input_bits
    polys = tuple(y + y.shift(v) for y in ys)
    return PolySystem(2 * v, polys, "collision", c.digest())


def build_preimage_system(
    c: Circuit,
    target: Sequence[int | Word],
    trunc_override: int | None = None,
    budget: int = DEFAULT_MONOMIAL_BUDGET,
) -> PolySystem:
    """System whose solutions are preimages of the target words."""
    n = c.width
    if len(target) != len(c.outputs):
        raise CircuitError(
            f"target has {len(target)} words, circuit outputs {len(c.outputs)}"
        )
    tvals = []
    for v in target:
        if isinstance(v, Word):
            if v.width != n:
                raise CircuitError(f"target width {v.width} != circuit width {n}")
            v = v.value
        if not 0 <= v < (1 << n):
            raise CircuitError(f"target word {v:#x} out of range for width {n}")
        tvals.append(v)
    ys = eval_symbolic(c, trunc_override, budget)
    polys = []
    for i, y in enumerate(ys):
        bit = (tvals[i // n] >> (i % n)) & 1
        polys.append(y + AnfPoly.const(bit))
    return PolySystem(c.input_bits, tuple(polys), "preimage", c.digest())


def export_system(s: PolySystem) -> str:
    """Deterministic text export: header line, then one poly per line."""
    lines = [f"anf vars={s.nvars} polys={len(s.polys)} kind={s.kind}"]
    lines.extend(p.to_text() for p in s.polys)
    return "\n".join(lines) + "\n"


def parse_system(text: str) -> PolySystem:
    """Inverse of export_system (source digest is not recoverable)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty system text")
    toks = lines[0].split()
    if len(toks) != 4 or toks[0] != "anf":
        raise ValueError(f"bad system header {lines[0]!r}")
    fields = {}
    for tok in toks[1:]:
        key, _, val = tok.partition("=")
        fields[key] = val
    if set(fields) != {"vars", "polys", "kind"}:
        raise ValueError(f"bad system header {lines[0]!r}")
    nvars = int(fields["vars"])
    npolys = int(fields["polys"])
    if len(lines) - 1 != npolys:
        raise ValueError(f"header says {npolys} polys, found {len(lines) - 1}")
    polys = tuple(parse_poly(ln) for ln in lines[1:])
    return PolySystem(nvars, polys, fields["kind"])
