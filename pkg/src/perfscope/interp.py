"""Profiling evaluator for PerfC.

Two modes share one tree-walking core:

profile   the instrumented run: tracked comparisons are decided by the
          large configuration, annotated loops run at most
          ``max_iterations`` times (default 2) and their counter deltas
          are scaled to the symbolic trip count, heap indices are
          clamped (modulo block length) because control flow follows
          the large configuration while storage is sized for the small
          one. Computed program outputs are expected to be wrong; the
          counters are the product.

exact     a faithful execution: comparisons use the concrete small
          values, every loop runs fully, indices are bounds-checked.
          This is the brute-force oracle the profile formulas are
          validated against.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NoReturn, Optional, Union

from .analysis import (
    COMM_BUILTINS, COMM_KIND_OF, MPI_DATATYPES, TRACKED_BLOCK, TRACKED_FLOAT,
    TRACKED_INT, AnalysisResult, Decl,
)
from .ast_nodes import (
    AddrOf, AssignStmt, Binary, Block, Call, CompoundAssign, DeclStmt, Expr,
    ExprStmt, FloatLit, For, FuncDef, Ident, If, IncrDecr, Index, IntLit,
    Malloc, Return, SizeofDeref, SizeofType, Stmt, Unary, While,
)
from .diagnostics import Loc
from .runtime import Context, MemoryMisuseError, ProfileResult
from .values import (
    Num, TrackedDivisionByZero, TrackedFloat, TrackedOverflow, _trunc_div,
    _trunc_mod, as_num, float_binop, float_compare, num_binop, num_compare,
    num_compare_small, num_from_literal, num_neg,
)

MAX_CALL_DEPTH = 10_000

_INT_CMP = {
    "<": operator.lt, "<=": operator.le, ">": operator.gt,
    ">=": operator.ge, "==": operator.eq, "!=": operator.ne,
}


class PerfRuntimeError(Exception):
    """A runtime fault in the profiled program, with its source location."""

    def __init__(self, message: str, loc: Loc | None = None):
        super().__init__(f"{loc}: {message}" if loc else message)
        self.message = message
        self.loc = loc


class RunConfigError(ValueError):
    """The run options do not match the program (unbound main parameter, ...)."""


class _UninitType:
    def __repr__(self) -> str:  # pragma: no cover
        return "UNINIT"


UNINIT = _UninitType()


@dataclass(frozen=True)
class BlockHandle:
    """A live or dead heap block: id, element kind, element count."""

    block_id: int
    elem: str  # "int" | "double"
    count: Num


Value = Union[int, Num, TrackedFloat, BlockHandle, None, _UninitType]


@dataclass
class RunOptions:
    inputs: list[tuple[str, int, int]] = field(default_factory=list)
    mode: str = "profile"  # "profile" | "exact"
    max_iterations: int = 2
    max_call_depth: int = MAX_CALL_DEPTH


class _Return(Exception):
    def __init__(self, value: Value):
        self.value = value


class Interpreter:
    def __init__(self, analysis: AnalysisResult, options: RunOptions):
        if analysis.diagnostics:
            first = analysis.diagnostics[0]
            raise RunConfigError(f"program has diagnostics: {first.format()}")
        if options.mode not in ("profile", "exact"):
            raise RunConfigError(f"unknown mode {options.mode!r}")
        self.program = analysis.program
        self.res = analysis.resolution
        self.marks = analysis.trackedness
        self.annotations = analysis.annotations
        self.mode = options.mode
        self.max_call_depth = options.max_call_depth
        self.ctx = Context(options.inputs, max_iterations=options.max_iterations)
        self.storage: dict[int, list] = {}
        self.frames: list[dict[Decl, Value]] = []
        self.depth = 0

    # -- entry -----------------------------------------------------------

    def run(self) -> ProfileResult:
        main = self.program.function("main")
        configured = {name for name, _, _ in self.ctx.inputs}
        args: list[Value] = []
        for p in main.params:
            if p.name not in configured:
                raise RunConfigError(
                    f"main parameter '{p.name}' has no input size; "
                    f"pass --input {p.name}=small:large")
            args.append(self.ctx.input_num(p.name))
        try:
            ret = self.call_function(main, args, main.loc)
        except RecursionError:
            raise PerfRuntimeError(
                "evaluator stack exhausted (recursion too deep for the host); "
                "lower max_call_depth or simplify the program", main.loc) from None
        result = self.ctx.finalize(mode=self.mode)
        result.main_return = ret
        return result

    # -- helpers ------------------------------------------------------------

    def error(self, message: str, loc: Loc | None) -> NoReturn:
        raise PerfRuntimeError(message, loc)

    @staticmethod
    def _kind_name(value: Value) -> str:
        if isinstance(value, bool):
            return "bool"
        if isinstance(value, int):
            return "int"
        if isinstance(value, Num):
            return "tracked int"
        if isinstance(value, TrackedFloat):
            return "double"
        if isinstance(value, BlockHandle):
            return "pointer"
        if value is UNINIT:
            return "uninitialized"
        return "void"

    def as_float(self, value: Value, loc: Loc | None) -> float:
        if isinstance(value, TrackedFloat):
            return value.value
        if isinstance(value, Num):
            return float(value.small)  # conversion charges no FLOPs
        if isinstance(value, int):
            return float(value)
        self.error(f"expected a number, got {self._kind_name(value)}", loc)

    def as_int_like(self, value: Value, loc: Loc | None, what: str) -> Num:
        if isinstance(value, Num):
            return value
        if isinstance(value, int):
            return num_from_literal(value)
        self.error(f"{what} must be an integer, got {self._kind_name(value)}", loc)

    # -- functions --------------------------------------------------------------

    def call_function(self, func: FuncDef, args: list[Value], loc: Loc) -> Value:
        if self.depth >= self.max_call_depth:
            self.error(f"call depth exceeded {self.max_call_depth} "
                       f"in '{func.name}'", loc)
        self.depth += 1
        self.ctx.enter_function(func.name)
        frame: dict[Decl, Value] = {}
        for pdecl, arg in zip(self.res.params[func.name], args):
            frame[pdecl] = self.coerce(arg, pdecl, loc)
        self.frames.append(frame)
        try:
            ret: Value = None
            try:
                self.exec_stmt(func.body)
            except _Return as r:
                ret = r.value
            return self.coerce_return(ret, func, loc)
        finally:
            self.frames.pop()
            self.ctx.exit_function()
            self.depth -= 1

    def coerce(self, value: Value, decl: Decl, loc: Loc | None) -> Value:
        if value is UNINIT:
            return UNINIT
        marker = self.marks.marker(decl)
        if marker == TRACKED_FLOAT:
            return TrackedFloat(self.as_float(value, loc))
        if marker == TRACKED_INT:
            if isinstance(value, Num):
                return value
            if isinstance(value, int):
                return num_from_literal(value)
            self.error(f"cannot store {self._kind_name(value)} in int "
                       f"variable '{decl.name}'", loc)
        if marker == TRACKED_BLOCK or decl.type.pointer:
            if isinstance(value, BlockHandle):
                return value
            self.error(f"cannot store {self._kind_name(value)} in pointer "
                       f"variable '{decl.name}'", loc)
        # plain int declaration
        if isinstance(value, int):
            return value
        if isinstance(value, Num):
            # The fixpoint promotes any declaration that can receive a
            # tracked value; reaching this means an analysis bug.
            self.error(f"internal: tracked value reached untracked "
                       f"variable '{decl.name}'", loc)
        self.error(f"cannot store {self._kind_name(value)} in int "
                   f"variable '{decl.name}'", loc)

    def coerce_return(self, value: Value, func: FuncDef, loc: Loc) -> Value:
        if func.ret_type.base == "void" or value is None:
            return None
        if func.ret_type.base == "double" and not func.ret_type.pointer:
            return TrackedFloat(self.as_float(value, loc))
        return value

    # -- statements -----------------------------------------------------------------

    def exec_stmt(self, stmt: Stmt) -> None:
        if isinstance(stmt, Block):
            for s in stmt.stmts:
                self.exec_stmt(s)
        elif isinstance(stmt, DeclStmt):
            decl = self.res.decl_of_stmt[stmt]
            value: Value = UNINIT if stmt.init is None else self.eval(stmt.init)
            self.frames[-1][decl] = self.coerce(value, decl, stmt.loc)
        elif isinstance(stmt, AssignStmt):
            self.assign(stmt.target, self.eval(stmt.expr))
        elif isinstance(stmt, CompoundAssign):
            self.read_modify_write(stmt.target, stmt.op, self.eval(stmt.expr),
                                   stmt.loc)
        elif isinstance(stmt, IncrDecr):
            op = "+" if stmt.op == "++" else "-"
            self.read_modify_write(stmt.target, op, 1, stmt.loc)
        elif isinstance(stmt, If):
            if self.truthy(self.eval(stmt.cond), stmt.cond.loc):
                self.exec_stmt(stmt.then)
            elif stmt.els is not None:
                self.exec_stmt(stmt.els)
        elif isinstance(stmt, For):
            self.exec_for(stmt)
        elif isinstance(stmt, While):
            self.exec_while(stmt)
        elif isinstance(stmt, Return):
            raise _Return(None if stmt.expr is None else self.eval(stmt.expr))
        elif isinstance(stmt, ExprStmt):
            self.eval(stmt.expr)
        else:  # pragma: no cover
            raise AssertionError(f"unhandled statement {type(stmt).__name__}")

    def assign(self, target: Union[Ident, Index], value: Value) -> None:
        if isinstance(target, Ident):
            decl = self.res.decl_of[target]
            self.frames[-1][decl] = self.coerce(value, decl, target.loc)
        else:
            handle, idx = self.locate(target)
            self.write_cell(handle, idx, value, target.loc)

    def read_modify_write(self, target: Union[Ident, Index], op: str,
                          rhs: Value, loc: Loc) -> None:
        if isinstance(target, Ident):
            decl = self.res.decl_of[target]
            old = self.frames[-1].get(decl, UNINIT)
            if old is UNINIT:
                self.error(f"use of uninitialized variable '{target.name}'", loc)
            new = self.arith(op, old, rhs, loc)
            self.frames[-1][decl] = self.coerce(new, decl, loc)
        else:
            handle, idx = self.locate(target)
            old = self.read_cell(handle, idx)
            new = self.arith(op, old, rhs, loc)
            self.write_cell(handle, idx, new, loc)

    def exec_for(self, stmt: For) -> None:
        ann = self.annotations.get(stmt)
        self.exec_stmt(stmt.init)
        if self.mode == "exact" or ann is None or ann.is_exact:
            while self.truthy(self.eval(stmt.cond), stmt.cond.loc):
                self.exec_stmt(stmt.body)
                self.exec_stmt(stmt.step)
            return
        trip = self.eval_trip(ann.trip, stmt.loc)
        scope = self.ctx.loop_enter(trip, stmt.loc)
        try:
            while self.truthy(self.eval(stmt.cond), stmt.cond.loc):
                if not self.ctx.loop_iteration(scope):
                    break
                self.exec_stmt(stmt.body)
                self.exec_stmt(stmt.step)
        finally:
            self.ctx.loop_exit(scope)

    def exec_while(self, stmt: While) -> None:
        ann = self.annotations.get(stmt)
        if self.mode == "exact" or ann is None or ann.is_exact:
            while self.truthy(self.eval(stmt.cond), stmt.cond.loc):
                self.exec_stmt(stmt.body)
            return
        trip = self.eval_trip(ann.trip, stmt.loc)
        scope = self.ctx.loop_enter(trip, stmt.loc)
        try:
            while self.truthy(self.eval(stmt.cond), stmt.cond.loc):
                if not self.ctx.loop_iteration(scope):
                    break
                self.exec_stmt(stmt.body)
        finally:
            self.ctx.loop_exit(scope)

    def eval_trip(self, expr: Expr, loc: Loc) -> Num:
        trip = self.as_int_like(self.eval(expr), loc, "loop trip count")
        if trip.small < 0:
            self.error(f"negative loop trip count {trip.small}", loc)
        return trip

    # -- expressions ------------------------------------------------------------------

    def eval(self, expr: Expr) -> Value:
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, FloatLit):
            return TrackedFloat(expr.value)
        if isinstance(expr, Ident):
            decl = self.res.decl_of[expr]
            value = self.frames[-1].get(decl, UNINIT)
            if value is UNINIT:
                self.error(f"use of uninitialized variable '{expr.name}'", expr.loc)
            return value
        if isinstance(expr, Binary):
            if expr.op in ("&&", "||"):
                return self.logical(expr)
            lhs = self.eval(expr.lhs)
            rhs = self.eval(expr.rhs)
            if expr.op in _INT_CMP:
                return self.compare(expr.op, lhs, rhs, expr.loc)
            return self.arith(expr.op, lhs, rhs, expr.loc)
        if isinstance(expr, Unary):
            v = self.eval(expr.operand)
            if expr.op == "!":
                return int(not self.truthy(v, expr.loc))
            if isinstance(v, TrackedFloat):
                return TrackedFloat(-v.value)  # sign flips are free
            if isinstance(v, Num):
                try:
                    return num_neg(v)
                except TrackedOverflow as e:
                    self.error(str(e), expr.loc)
            if isinstance(v, int):
                return -v
            self.error(f"cannot negate {self._kind_name(v)}", expr.loc)
        if isinstance(expr, Index):
            handle, idx = self.locate(expr)
            return self.read_cell(handle, idx)
        if isinstance(expr, Call):
            return self.eval_call(expr)
        if isinstance(expr, Malloc):
            return self.eval_malloc(expr)
        if isinstance(expr, SizeofType):
            return expr.type.elem_size
        if isinstance(expr, SizeofDeref):
            decl = self.res.decl_of[expr.pointer]
            return decl.type.elem_size
        if isinstance(expr, AddrOf):  # pragma: no cover - resolution rejects
            self.error("address-of outside a communication builtin", expr.loc)
        raise AssertionError(f"unhandled expression {type(expr).__name__}")

    def logical(self, expr: Binary) -> int:
        lhs_true = self.truthy(self.eval(expr.lhs), expr.lhs.loc)
        if expr.op == "&&":
            if not lhs_true:
                return 0
            return int(self.truthy(self.eval(expr.rhs), expr.rhs.loc))
        if lhs_true:
            return 1
        return int(self.truthy(self.eval(expr.rhs), expr.rhs.loc))

    def truthy(self, value: Value, loc: Loc | None) -> bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, int):
            return value != 0
        if isinstance(value, TrackedFloat):
            return value.value != 0.0
        if isinstance(value, Num):
            if self.mode == "exact":
                return value.small != 0
            small_true = value.small != 0
            large_true = value.large != 0
            if small_true != large_true:
                self.ctx.warn(
                    "comparison-divergence", loc,
                    f"condition decided by the large configuration "
                    f"({str(large_true).lower()}) but the small configuration "
                    f"disagrees ({str(small_true).lower()})")
            return large_true
        if isinstance(value, BlockHandle):
            return True
        if value is UNINIT:
            self.error("use of uninitialized value in condition", loc)
        self.error("void value used in a condition", loc)

    def compare(self, op: str, lhs: Value, rhs: Value, loc: Loc) -> int:
        if isinstance(lhs, BlockHandle) or isinstance(rhs, BlockHandle):
            if op in ("==", "!=") and isinstance(lhs, BlockHandle) \
                    and isinstance(rhs, BlockHandle):
                same = lhs.block_id == rhs.block_id
                return int(same if op == "==" else not same)
            self.error("pointers support only == and != against pointers", loc)
        if isinstance(lhs, TrackedFloat) or isinstance(rhs, TrackedFloat):
            a = TrackedFloat(self.as_float(lhs, loc))
            b = TrackedFloat(self.as_float(rhs, loc))
            return int(float_compare(op, a, b))
        if isinstance(lhs, Num) or isinstance(rhs, Num):
            a = as_num(self._int_operand(lhs, loc))
            b = as_num(self._int_operand(rhs, loc))
            if self.mode == "exact":
                return int(num_compare_small(op, a, b))
            small_out = num_compare_small(op, a, b)
            large_out = num_compare(op, a, b, self.ctx.warn_sink(loc))
            if small_out != large_out:
                self.ctx.warn(
                    "comparison-divergence", loc,
                    f"comparison decided by the large configuration "
                    f"({str(large_out).lower()}) but the small configuration "
                    f"disagrees ({str(small_out).lower()})")
            return int(large_out)
        a = self._int_operand(lhs, loc)
        b = self._int_operand(rhs, loc)
        return int(_INT_CMP[op](a, b))

    def _int_operand(self, value: Value, loc: Loc | None):
        if isinstance(value, (int, Num)):
            return value
        self.error(f"expected an integer operand, got {self._kind_name(value)}", loc)

    def arith(self, op: str, lhs: Value, rhs: Value, loc: Loc) -> Value:
        if isinstance(lhs, BlockHandle) or isinstance(rhs, BlockHandle):
            self.error("pointer arithmetic is not supported; use indexing", loc)
        if isinstance(lhs, TrackedFloat) or isinstance(rhs, TrackedFloat):
            if op == "%":
                self.error("modulo requires integer operands", loc)
            a = TrackedFloat(self.as_float(lhs, loc))
            b = TrackedFloat(self.as_float(rhs, loc))
            return float_binop(op, a, b, self.ctx)
        if isinstance(lhs, Num) or isinstance(rhs, Num):
            a = as_num(self._int_operand(lhs, loc))
            b = as_num(self._int_operand(rhs, loc))
            try:
                return num_binop(op, a, b, self.ctx.warn_sink(loc))
            except (TrackedDivisionByZero, TrackedOverflow) as e:
                self.error(str(e), loc)
        a = self._int_operand(lhs, loc)
        b = self._int_operand(rhs, loc)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op in ("/", "%"):
            if b == 0:
                self.error("division by zero" if op == "/" else "modulo by zero", loc)
            return _trunc_div(a, b) if op == "/" else _trunc_mod(a, b)
        raise AssertionError(f"unhandled operator {op}")  # pragma: no cover

    # -- heap ---------------------------------------------------------------------------

    def eval_malloc(self, expr: Malloc) -> BlockHandle:
        size = self.as_int_like(self.eval(expr.size), expr.loc, "allocation size")
        elem = self.res.malloc_elem[expr]
        try:
            count = num_binop("/", size, num_from_literal(elem.elem_size),
                              self.ctx.warn_sink(expr.loc))
            block_id = self.ctx.mem_alloc(size)
        except (MemoryMisuseError, TrackedDivisionByZero) as e:
            self.error(str(e), expr.loc)
        default = 0.0 if elem.base == "double" else 0
        self.storage[block_id] = [default] * count.small
        return BlockHandle(block_id, elem.base, count)

    def locate(self, expr: Index) -> tuple[BlockHandle, int]:
        base = self.eval(expr.base)
        if not isinstance(base, BlockHandle):
            self.error(f"cannot index {self._kind_name(base)}", expr.loc)
        if not self.ctx.block_is_live(base.block_id):
            self.error("use of freed memory block", expr.loc)
        idx_v = self.eval(expr.index)
        idx_n = self.as_int_like(idx_v, expr.index.loc, "index")
        idx = idx_n.small
        cells = self.storage[base.block_id]
        if self.mode == "profile":
            if not cells:
                self.error("index into an empty block", expr.loc)
            # Control flow follows the large configuration while storage
            # is sized for the small one; clamp rather than fault.
            idx %= len(cells)
        elif not 0 <= idx < len(cells):
            self.error(f"index {idx} out of bounds for block of "
                       f"{len(cells)} element(s)", expr.loc)
        return base, idx

    def read_cell(self, handle: BlockHandle, idx: int) -> Value:
        raw = self.storage[handle.block_id][idx]
        if handle.elem == "double":
            return TrackedFloat(raw)
        return raw

    def write_cell(self, handle: BlockHandle, idx: int, value: Value,
                   loc: Loc | None) -> None:
        if handle.elem == "double":
            self.storage[handle.block_id][idx] = self.as_float(value, loc)
        else:
            if not isinstance(value, (int, Num)):
                self.error(f"cannot store {self._kind_name(value)} in an "
                           "int block", loc)
            self.storage[handle.block_id][idx] = value

    # -- calls -------------------------------------------------------------------------------

    def eval_call(self, expr: Call) -> Value:
        name = expr.name
        if name in self.res.functions:
            args = [self.eval(a) for a in expr.args]
            return self.call_function(self.res.functions[name], args, expr.loc)
        if name == "free":
            v = self.eval(expr.args[0])
            if not isinstance(v, BlockHandle):
                self.error(f"free expects a pointer, got {self._kind_name(v)}",
                           expr.loc)
            try:
                self.ctx.mem_free(v.block_id)
            except MemoryMisuseError as e:
                self.error(str(e), expr.loc)
            return None
        if name in COMM_BUILTINS:
            return self.eval_comm(expr)
        self.error(f"unknown function '{name}'", expr.loc)  # pragma: no cover

    def eval_comm(self, expr: Call) -> None:
        name = expr.name
        kind = COMM_KIND_OF[name]
        roles = COMM_BUILTINS[name]
        count_pos = roles.index("val")  # the count argument in every builtin
        dtype_pos = roles.index("dtype")

        count = self.as_int_like(self.eval(expr.args[count_pos]),
                                 expr.args[count_pos].loc, "element count")
        dtype_arg = expr.args[dtype_pos]
        assert isinstance(dtype_arg, Ident)
        elem_bytes = MPI_DATATYPES[dtype_arg.name]
        try:
            nbytes = num_binop("*", count, num_from_literal(elem_bytes),
                               self.ctx.warn_sink(expr.loc))
            self.ctx.comm_event(kind, nbytes)
        except (TrackedOverflow, MemoryMisuseError) as e:
            self.error(str(e), expr.loc)

        # Evaluate the remaining numeric arguments (dest/tag/src) for their
        # effects; the "sym" identifiers stay uninterpreted.
        for arg, role in zip(expr.args, roles):
            if role == "val" and arg is not expr.args[count_pos]:
                self.eval(arg)

        if name == "MPI_Allreduce":
            send, recv = expr.args[0], expr.args[1]
            assert isinstance(send, AddrOf) and isinstance(recv, AddrOf)
            value = self.eval(send.target)  # a 1-rank reduce is the identity
            self.assign(recv.target, value)
        elif name == "MPI_Recv":
            target = expr.args[0]
            assert isinstance(target, AddrOf)
            decl = self.res.decl_of[target.target]
            fill: Value = TrackedFloat(0.0) if decl.type.base == "double" else 0
            self.assign(target.target, fill)
        return None


def run(analysis: AnalysisResult, options: RunOptions) -> ProfileResult:
    """Execute main under the given options and return the frozen result."""
    return Interpreter(analysis, options).run()


@dataclass(frozen=True)
class ExactPoint:
    size: int
    flops: int
    peak_bytes: int
    comm_bytes: int


def run_exact_series(
    analysis: AnalysisResult,
    vary: str,
    sizes: list[int],
    fixed: dict[str, int] | None = None,
) -> list[ExactPoint]:
    """Measure one input at several sizes by full execution (the oracle)."""
    points = []
    for size in sizes:
        inputs = [(vary, size, size)]
        inputs += [(k, v, v) for k, v in (fixed or {}).items()]
        result = run(analysis, RunOptions(inputs=inputs, mode="exact"))
        env = result.small_env()
        points.append(ExactPoint(
            size=size,
            flops=_exact_int(result.flops.eval(env)),
            peak_bytes=result.peak_large,
            comm_bytes=_exact_int(result.comm_byte_count().eval(env)),
        ))
    return points


def _exact_int(q: Fraction) -> int:
    if q.denominator != 1:
        raise ValueError(f"expected an integral counter, got {q}")
    return int(q)
