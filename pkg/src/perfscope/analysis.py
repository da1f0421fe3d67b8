"""Name resolution, the trackedness fixpoint, and loop annotation.

Trackedness decides which declarations hold instrumented values at run
time. Seeds: main's int parameters are tracked ints, every double is a
tracked float, every declaration initialized from malloc is a tracked
block. Propagation then runs to a fixpoint: an int declaration assigned
an expression containing a tracked value anywhere in its scope becomes
tracked, a parameter receiving a tracked argument at any call site
becomes tracked, and trackedness flows through return values. Markers
only ever move plain -> tracked over a finite set, so the fixpoint
terminates.

Loop annotation marks each loop either with a symbolic trip-count
expression (extrapolated: run at most twice, scale the counter deltas)
or as "exact" (run fully). A canonical for loop

    for (i = c0; i < bound; i += s)      (also <=, ++i, i = i + s)

whose bound or start is tracked gets trip = ceil((bound - c0) / s),
provided the body never modifies i and the header has no side effects.
Canonical loops over untracked bounds run exactly. Anything else needs
an explicit "#perf iterations(expr)" annotation; a while loop always
does. Induction variables are never promoted by their loop alone: only
assignments propagate trackedness, and a canonical loop never assigns
its induction variable a tracked expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .ast_nodes import (
    AddrOf, AssignStmt, Binary, Block, Call, CompoundAssign, DeclStmt, Expr,
    ExprStmt, FloatLit, For, FuncDef, Ident, If, IncrDecr, Index, IntLit,
    Malloc, Program, Return, SizeofDeref, SizeofType, Stmt, TypeSpec, Unary,
    While,
)
from .diagnostics import Diagnostic, Loc

PLAIN = "plain"
TRACKED_INT = "tracked-int"
TRACKED_FLOAT = "tracked-float"
TRACKED_BLOCK = "tracked-block"

MPI_DATATYPES = {"MPI_DOUBLE": 8, "MPI_INT": 4}

COMM_BUILTINS = {
    "MPI_Allreduce": ("addr", "addr", "val", "dtype", "sym", "sym"),
    "MPI_Send": ("addr", "val", "dtype", "val", "val", "sym"),
    "MPI_Recv": ("addr", "val", "dtype", "val", "val", "sym"),
}
COMM_KIND_OF = {"MPI_Allreduce": "allreduce", "MPI_Send": "send", "MPI_Recv": "recv"}

BUILTIN_ARITY = {"free": 1, **{k: len(v) for k, v in COMM_BUILTINS.items()}}


@dataclass(eq=False)
class Decl:
    """One declaration site: parameter, local, or for-init variable."""

    name: str
    type: TypeSpec
    func: str
    kind: str  # "param" | "local"
    loc: Loc


@dataclass
class Resolution:
    functions: dict[str, FuncDef] = field(default_factory=dict)
    params: dict[str, list[Decl]] = field(default_factory=dict)
    decl_of: dict[Ident, Decl] = field(default_factory=dict)
    decl_of_stmt: dict[DeclStmt, Decl] = field(default_factory=dict)
    all_decls: list[Decl] = field(default_factory=list)
    malloc_elem: dict[Malloc, TypeSpec] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)


class _Scopes:
    def __init__(self) -> None:
        self.stack: list[dict[str, Decl]] = []

    def push(self) -> None:
        self.stack.append({})

    def pop(self) -> None:
        self.stack.pop()

    def declare(self, decl: Decl) -> bool:
        if decl.name in self.stack[-1]:
            return False
        self.stack[-1][decl.name] = decl
        return True

    def lookup(self, name: str) -> Optional[Decl]:
        for scope in reversed(self.stack):
            if name in scope:
                return scope[name]
        return None


def resolve(program: Program) -> Resolution:
    res = Resolution()
    for f in program.functions:
        res.functions[f.name] = f

    for f in program.functions:
        scopes = _Scopes()
        scopes.push()
        param_decls = []
        for p in f.params:
            decl = Decl(p.name, p.type, f.name, "param", p.loc)
            if not scopes.declare(decl):
                res.diagnostics.append(Diagnostic(p.loc, f"duplicate parameter '{p.name}'"))
            param_decls.append(decl)
            res.all_decls.append(decl)
        res.params[f.name] = param_decls
        _resolve_block(f.body, scopes, f, res)
        scopes.pop()
    return res


def _resolve_block(block: Block, scopes: _Scopes, func: FuncDef, res: Resolution) -> None:
    scopes.push()
    for stmt in block.stmts:
        _resolve_stmt(stmt, scopes, func, res)
    scopes.pop()


def _resolve_stmt(stmt: Stmt, scopes: _Scopes, func: FuncDef, res: Resolution) -> None:
    diag = res.diagnostics
    if isinstance(stmt, DeclStmt):
        decl = Decl(stmt.name, stmt.type, func.name, "local", stmt.loc)
        if not scopes.declare(decl):
            diag.append(Diagnostic(stmt.loc, f"redeclaration of '{stmt.name}'"))
        res.all_decls.append(decl)
        res.decl_of_stmt[stmt] = decl
        if stmt.init is not None:
            # The declared name is in scope inside its own initializer
            # (needed for malloc(n * sizeof(*field))).
            _resolve_init(stmt.init, stmt.type, stmt.loc, scopes, res)
    elif isinstance(stmt, AssignStmt):
        _resolve_expr(stmt.target, scopes, res)
        if isinstance(stmt.expr, Malloc):
            target_type = _static_type(stmt.target, res)
            _record_malloc(stmt.expr, target_type, stmt.loc, res)
            _resolve_expr(stmt.expr.size, scopes, res)
        else:
            _resolve_expr(stmt.expr, scopes, res)
    elif isinstance(stmt, CompoundAssign):
        _resolve_expr(stmt.target, scopes, res)
        _resolve_expr(stmt.expr, scopes, res)
    elif isinstance(stmt, IncrDecr):
        _resolve_expr(stmt.target, scopes, res)
    elif isinstance(stmt, If):
        _resolve_expr(stmt.cond, scopes, res)
        _resolve_stmt_scoped(stmt.then, scopes, func, res)
        if stmt.els is not None:
            _resolve_stmt_scoped(stmt.els, scopes, func, res)
    elif isinstance(stmt, For):
        if stmt.perf_trip is not None:
            _resolve_expr(stmt.perf_trip, scopes, res)
        scopes.push()  # the init declaration is scoped to the loop
        _resolve_stmt(stmt.init, scopes, func, res)
        _resolve_expr(stmt.cond, scopes, res)
        _resolve_stmt(stmt.step, scopes, func, res)
        _resolve_stmt_scoped(stmt.body, scopes, func, res)
        scopes.pop()
    elif isinstance(stmt, While):
        if stmt.perf_trip is not None:
            _resolve_expr(stmt.perf_trip, scopes, res)
        _resolve_expr(stmt.cond, scopes, res)
        _resolve_stmt_scoped(stmt.body, scopes, func, res)
    elif isinstance(stmt, Return):
        if stmt.expr is not None:
            _resolve_expr(stmt.expr, scopes, res)
    elif isinstance(stmt, Block):
        _resolve_block(stmt, scopes, func, res)
    elif isinstance(stmt, ExprStmt):
        _resolve_expr(stmt.expr, scopes, res)
    else:  # pragma: no cover
        raise AssertionError(f"unhandled statement {type(stmt).__name__}")


def _resolve_stmt_scoped(stmt: Stmt, scopes: _Scopes, func: FuncDef, res: Resolution) -> None:
    # A non-block body still opens a scope so a lone declaration cannot
    # leak into the surrounding code.
    if isinstance(stmt, Block):
        _resolve_block(stmt, scopes, func, res)
    else:
        scopes.push()
        _resolve_stmt(stmt, scopes, func, res)
        scopes.pop()


def _resolve_init(init: Expr, decl_type: TypeSpec, loc: Loc, scopes: _Scopes,
                  res: Resolution) -> None:
    if isinstance(init, Malloc):
        _record_malloc(init, decl_type, loc, res)
        _resolve_expr(init.size, scopes, res)
    else:
        _resolve_expr(init, scopes, res)


def _record_malloc(node: Malloc, target_type: Optional[TypeSpec], loc: Loc,
                   res: Resolution) -> None:
    if target_type is None or not target_type.pointer:
        res.diagnostics.append(Diagnostic(
            loc, "malloc must initialize or be assigned to a pointer variable"))
        res.malloc_elem[node] = TypeSpec("double")  # keep going with a guess
    else:
        res.malloc_elem[node] = TypeSpec(target_type.base)


def _static_type(expr: Expr, res: Resolution) -> Optional[TypeSpec]:
    if isinstance(expr, Ident):
        decl = res.decl_of.get(expr)
        return decl.type if decl else None
    return None


def _resolve_expr(expr: Expr, scopes: _Scopes, res: Resolution) -> None:
    diag = res.diagnostics
    if isinstance(expr, (IntLit, FloatLit, SizeofType)):
        return
    if isinstance(expr, Ident):
        decl = scopes.lookup(expr.name)
        if decl is None:
            diag.append(Diagnostic(expr.loc, f"unbound variable '{expr.name}'"))
        else:
            res.decl_of[expr] = decl
        return
    if isinstance(expr, SizeofDeref):
        decl = scopes.lookup(expr.pointer.name)
        if decl is None:
            diag.append(Diagnostic(expr.loc, f"unbound variable '{expr.pointer.name}'"))
            return
        res.decl_of[expr.pointer] = decl
        if not decl.type.pointer:
            diag.append(Diagnostic(expr.loc,
                                   f"sizeof(*{expr.pointer.name}): not a pointer"))
        return
    if isinstance(expr, Binary):
        _resolve_expr(expr.lhs, scopes, res)
        _resolve_expr(expr.rhs, scopes, res)
        if expr.op in ("+", "-", "*", "/", "%"):
            for side in (expr.lhs, expr.rhs):
                t = _static_type(side, res)
                if (t is not None and t.pointer) or isinstance(side, Malloc):
                    diag.append(Diagnostic(
                        side.loc, "pointer arithmetic is not supported; "
                                  "use indexing"))
        return
    if isinstance(expr, Unary):
        _resolve_expr(expr.operand, scopes, res)
        return
    if isinstance(expr, Index):
        _resolve_expr(expr.base, scopes, res)
        _resolve_expr(expr.index, scopes, res)
        return
    if isinstance(expr, Malloc):
        diag.append(Diagnostic(
            expr.loc, "malloc must initialize or be assigned to a pointer variable"))
        res.malloc_elem.setdefault(expr, TypeSpec("double"))
        _resolve_expr(expr.size, scopes, res)
        return
    if isinstance(expr, AddrOf):
        diag.append(Diagnostic(
            expr.loc, "address-of is only valid as a communication-builtin argument"))
        _resolve_expr(expr.target, scopes, res)
        return
    if isinstance(expr, Call):
        _resolve_call(expr, scopes, res)
        return
    raise AssertionError(f"unhandled expression {type(expr).__name__}")  # pragma: no cover


def _resolve_call(call: Call, scopes: _Scopes, res: Resolution) -> None:
    diag = res.diagnostics
    if call.name in res.functions:
        f = res.functions[call.name]
        if len(call.args) != len(f.params):
            diag.append(Diagnostic(
                call.loc, f"'{call.name}' takes {len(f.params)} argument(s), "
                          f"got {len(call.args)}"))
        for arg in call.args:
            if isinstance(arg, AddrOf):
                diag.append(Diagnostic(
                    arg.loc, "address-of is only valid as a "
                             "communication-builtin argument"))
                _resolve_expr(arg.target, scopes, res)
            else:
                _resolve_expr(arg, scopes, res)
        return
    if call.name == "free":
        if len(call.args) != 1:
            diag.append(Diagnostic(call.loc, "free takes exactly 1 argument"))
        for arg in call.args:
            _resolve_expr(arg, scopes, res)
        return
    if call.name in COMM_BUILTINS:
        roles = COMM_BUILTINS[call.name]
        if len(call.args) != len(roles):
            diag.append(Diagnostic(
                call.loc, f"{call.name} takes {len(roles)} arguments, "
                          f"got {len(call.args)}"))
            return
        for arg, role in zip(call.args, roles):
            if role == "addr":
                if not isinstance(arg, AddrOf):
                    diag.append(Diagnostic(arg.loc,
                                           f"{call.name}: expected '&variable' here"))
                    continue
                decl = scopes.lookup(arg.target.name)
                if decl is None:
                    diag.append(Diagnostic(
                        arg.loc, f"unbound variable '{arg.target.name}'"))
                    continue
                res.decl_of[arg.target] = decl
                if decl.type.pointer:
                    diag.append(Diagnostic(
                        arg.loc, f"{call.name}: '&{arg.target.name}' must name "
                                 "a scalar variable"))
            elif role == "dtype":
                if not (isinstance(arg, Ident) and arg.name in MPI_DATATYPES):
                    diag.append(Diagnostic(
                        arg.loc, f"{call.name}: expected MPI_DOUBLE or MPI_INT"))
            elif role == "sym":
                if not isinstance(arg, Ident):
                    diag.append(Diagnostic(
                        arg.loc, f"{call.name}: expected an identifier here"))
                # Uninterpreted (MPI_SUM, MPI_COMM_WORLD, ...): not resolved.
            else:  # "val"
                if isinstance(arg, AddrOf):
                    diag.append(Diagnostic(arg.loc,
                                           f"{call.name}: unexpected '&' here"))
                else:
                    _resolve_expr(arg, scopes, res)
        return
    diag.append(Diagnostic(call.loc, f"unknown function '{call.name}'"))
    for arg in call.args:
        if not isinstance(arg, AddrOf):
            _resolve_expr(arg, scopes, res)


# -- walkers ------------------------------------------------------------------


def iter_stmts(stmt: Stmt) -> Iterator[Stmt]:
    """Preorder walk over a statement and everything nested in it."""
    yield stmt
    if isinstance(stmt, Block):
        for s in stmt.stmts:
            yield from iter_stmts(s)
    elif isinstance(stmt, If):
        yield from iter_stmts(stmt.then)
        if stmt.els is not None:
            yield from iter_stmts(stmt.els)
    elif isinstance(stmt, For):
        yield from iter_stmts(stmt.init)
        yield from iter_stmts(stmt.step)
        yield from iter_stmts(stmt.body)
    elif isinstance(stmt, While):
        yield from iter_stmts(stmt.body)


def stmt_exprs(stmt: Stmt) -> list[Expr]:
    """The expressions directly owned by one statement (no sub-statements)."""
    if isinstance(stmt, DeclStmt):
        return [stmt.init] if stmt.init is not None else []
    if isinstance(stmt, AssignStmt):
        return [stmt.target, stmt.expr]
    if isinstance(stmt, CompoundAssign):
        return [stmt.target, stmt.expr]
    if isinstance(stmt, IncrDecr):
        return [stmt.target]
    if isinstance(stmt, If):
        return [stmt.cond]
    if isinstance(stmt, For):
        return ([stmt.perf_trip] if stmt.perf_trip is not None else []) + [stmt.cond]
    if isinstance(stmt, While):
        return ([stmt.perf_trip] if stmt.perf_trip is not None else []) + [stmt.cond]
    if isinstance(stmt, Return):
        return [stmt.expr] if stmt.expr is not None else []
    if isinstance(stmt, ExprStmt):
        return [stmt.expr]
    return []


def walk_expr(expr: Expr) -> Iterator[Expr]:
    yield expr
    if isinstance(expr, Binary):
        yield from walk_expr(expr.lhs)
        yield from walk_expr(expr.rhs)
    elif isinstance(expr, Unary):
        yield from walk_expr(expr.operand)
    elif isinstance(expr, Index):
        yield from walk_expr(expr.base)
        yield from walk_expr(expr.index)
    elif isinstance(expr, Call):
        for a in expr.args:
            yield from walk_expr(a)
    elif isinstance(expr, Malloc):
        yield from walk_expr(expr.size)
    elif isinstance(expr, AddrOf):
        yield from walk_expr(expr.target)


def func_exprs(func: FuncDef) -> Iterator[Expr]:
    for stmt in iter_stmts(func.body):
        for top in stmt_exprs(stmt):
            yield from walk_expr(top)


# -- trackedness --------------------------------------------------------------


class TrackednessMap:
    """Marker per declaration plus a tracked-return flag per function."""

    def __init__(self) -> None:
        self.markers: dict[Decl, str] = {}
        self.returns_tracked: dict[str, bool] = {}

    def marker(self, decl: Decl) -> str:
        return self.markers.get(decl, PLAIN)

    def is_tracked(self, decl: Decl) -> bool:
        return self.marker(decl) != PLAIN

    def by_name(self, func_name: str) -> dict[str, str]:
        """name -> marker for one function (later declarations win)."""
        out: dict[str, str] = {}
        for decl, marker in self.markers.items():
            if decl.func == func_name:
                out[decl.name] = marker
        return out


def tracked_variant(t: TypeSpec) -> str:
    if t.pointer:
        return TRACKED_BLOCK
    return TRACKED_FLOAT if t.base == "double" else TRACKED_INT


def analyze_trackedness(program: Program, res: Resolution) -> TrackednessMap:
    marks = TrackednessMap()
    for f in program.functions:
        marks.returns_tracked[f.name] = False
    for decl in res.all_decls:
        marks.markers[decl] = PLAIN

    # Seeds: main's int parameters; every double; every malloc-initialized
    # declaration.
    for decl in res.all_decls:
        if decl.func == "main" and decl.kind == "param":
            marks.markers[decl] = TRACKED_INT
        if decl.type == TypeSpec("double"):
            marks.markers[decl] = TRACKED_FLOAT
    for f in program.functions:
        for stmt in iter_stmts(f.body):
            if isinstance(stmt, DeclStmt) and isinstance(stmt.init, Malloc):
                decl = res.decl_of_stmt.get(stmt)
                if decl is not None:
                    marks.markers[decl] = TRACKED_BLOCK

    while propagation_pass(program, res, marks):
        pass
    return marks


def expr_tracked(expr: Expr, res: Resolution, marks: TrackednessMap) -> bool:
    """Does evaluating this expression produce a tracked value?

    A call contributes through its return value only (its arguments
    promote the callee's parameters, not the call site); indexing
    contributes through the indexed block, not the index.
    """
    if isinstance(expr, Ident):
        decl = res.decl_of.get(expr)
        return decl is not None and marks.is_tracked(decl)
    if isinstance(expr, Malloc):
        return True
    if isinstance(expr, Call):
        return marks.returns_tracked.get(expr.name, False)
    if isinstance(expr, Binary):
        return expr_tracked(expr.lhs, res, marks) or expr_tracked(expr.rhs, res, marks)
    if isinstance(expr, Unary):
        return expr_tracked(expr.operand, res, marks)
    if isinstance(expr, Index):
        return expr_tracked(expr.base, res, marks)
    return False  # literals, sizeof, address-of


def propagation_pass(program: Program, res: Resolution, marks: TrackednessMap) -> bool:
    """One monotone pass; returns True if any marker changed."""
    changed = False

    def promote(decl: Decl) -> None:
        nonlocal changed
        variant = tracked_variant(decl.type)
        if marks.markers.get(decl) != variant:
            marks.markers[decl] = variant
            changed = True

    for f in program.functions:
        for stmt in iter_stmts(f.body):
            if isinstance(stmt, DeclStmt) and stmt.init is not None:
                if expr_tracked(stmt.init, res, marks):
                    decl = res.decl_of_stmt.get(stmt)
                    if decl is not None:
                        promote(decl)
            elif isinstance(stmt, (AssignStmt, CompoundAssign)):
                if isinstance(stmt.target, Ident) and \
                        expr_tracked(stmt.expr, res, marks):
                    decl = res.decl_of.get(stmt.target)
                    if decl is not None:
                        promote(decl)
            elif isinstance(stmt, Return) and stmt.expr is not None:
                if expr_tracked(stmt.expr, res, marks) and \
                        not marks.returns_tracked[f.name]:
                    marks.returns_tracked[f.name] = True
                    changed = True
        # Tracked arguments promote the callee's parameters.
        for node in func_exprs(f):
            if isinstance(node, Call) and node.name in res.functions:
                for arg, pdecl in zip(node.args, res.params[node.name]):
                    if not isinstance(arg, AddrOf) and \
                            expr_tracked(arg, res, marks):
                        promote(pdecl)
    return changed


# -- loop annotation ----------------------------------------------------------


@dataclass
class LoopAnnotation:
    """trip is the symbolic iteration-count expression; None means exact
    (run the loop fully, no extrapolation)."""

    trip: Optional[Expr]

    @property
    def is_exact(self) -> bool:
        return self.trip is None


def annotate_loops(
    program: Program, res: Resolution, marks: TrackednessMap
) -> tuple[dict[Stmt, LoopAnnotation], list[Diagnostic]]:
    annotations: dict[Stmt, LoopAnnotation] = {}
    diagnostics: list[Diagnostic] = []

    for f in program.functions:
        for stmt in iter_stmts(f.body):
            if isinstance(stmt, While):
                if stmt.perf_trip is not None:
                    annotations[stmt] = LoopAnnotation(stmt.perf_trip)
                else:
                    diagnostics.append(Diagnostic(
                        stmt.loc,
                        "while loop is not analyzable; add "
                        "'#perf iterations(expr)' on the preceding line"))
                    annotations[stmt] = LoopAnnotation(None)
            elif isinstance(stmt, For):
                if stmt.perf_trip is not None:
                    annotations[stmt] = LoopAnnotation(stmt.perf_trip)
                    continue
                annotations[stmt] = _annotate_for(stmt, res, marks, diagnostics)
    return annotations, diagnostics


def _annotate_for(loop: For, res: Resolution, marks: TrackednessMap,
                  diagnostics: list[Diagnostic]) -> LoopAnnotation:
    shape = _canonical_shape(loop, res)
    if shape is None:
        header = list(stmt_exprs(loop.init)) + [loop.cond] + list(stmt_exprs(loop.step))
        if any(expr_tracked(e, res, marks) for e in header):
            diagnostics.append(Diagnostic(
                loop.loc, "loop is not analyzable; add '#perf iterations(expr)' "
                          "on the preceding line"))
        return LoopAnnotation(None)

    start, op, bound, step = shape
    if not (expr_tracked(bound, res, marks) or expr_tracked(start, res, marks)):
        return LoopAnnotation(None)  # untracked bound: run it exactly

    # trip = ceil((bound' - start) / step), bound' = bound (+1 for "<=").
    eff = bound if op == "<" else _fold_add(bound, 1)
    if isinstance(start, IntLit) and start.value == 0:
        diff = eff
    else:
        diff = Binary(loop.loc, "-", eff, start)
    if step == 1:
        return LoopAnnotation(diff)
    trip = Binary(loop.loc, "/", _fold_add(diff, step - 1), IntLit(loop.loc, step))
    return LoopAnnotation(trip)


def _fold_add(expr: Expr, k: int) -> Expr:
    if k == 0:
        return expr
    if isinstance(expr, IntLit):
        return IntLit(expr.loc, expr.value + k)
    return Binary(expr.loc, "+", expr, IntLit(expr.loc, k))


def _canonical_shape(loop: For, res: Resolution):
    """Return (start, op, bound, step) for a canonical counting loop, else None."""
    # init: i = start (declaration or assignment)
    if isinstance(loop.init, DeclStmt):
        if loop.init.type != TypeSpec("int") or loop.init.init is None:
            return None
        var_name, start = loop.init.name, loop.init.init
        var_decl = res.decl_of_stmt.get(loop.init)
    elif isinstance(loop.init, AssignStmt) and isinstance(loop.init.target, Ident):
        var_name, start = loop.init.target.name, loop.init.expr
        var_decl = res.decl_of.get(loop.init.target)
    else:
        return None
    if var_decl is None:
        return None

    # cond: i < bound | i <= bound
    cond = loop.cond
    if not (isinstance(cond, Binary) and cond.op in ("<", "<=")
            and isinstance(cond.lhs, Ident)
            and res.decl_of.get(cond.lhs) is var_decl):
        return None
    bound = cond.rhs

    # step: ++i / i++ / i += s / i = i + s, with a positive literal s
    step = _step_amount(loop.step, var_name)
    if step is None or step <= 0:
        return None

    # The header must be side-effect free and must not read i in the bound.
    for e in (start, bound):
        for node in walk_expr(e):
            if isinstance(node, (Call, Malloc)):
                return None
            if isinstance(node, Ident) and res.decl_of.get(node) is var_decl:
                return None

    # The body must never modify (or take the address of) i.
    for stmt in iter_stmts(loop.body):
        if isinstance(stmt, (AssignStmt, CompoundAssign, IncrDecr)):
            target = stmt.target
            if isinstance(target, Ident) and res.decl_of.get(target) is var_decl:
                return None
        for top in stmt_exprs(stmt):
            for node in walk_expr(top):
                if isinstance(node, AddrOf) and \
                        res.decl_of.get(node.target) is var_decl:
                    return None

    return (start, cond.op, bound, step)


def _step_amount(step: Stmt, var_name: str) -> Optional[int]:
    if isinstance(step, IncrDecr) and step.target.name == var_name:
        return 1 if step.op == "++" else None
    if isinstance(step, CompoundAssign) and isinstance(step.target, Ident) \
            and step.target.name == var_name and step.op == "+" \
            and isinstance(step.expr, IntLit):
        return step.expr.value
    if isinstance(step, AssignStmt) and isinstance(step.target, Ident) \
            and step.target.name == var_name:
        e = step.expr
        if isinstance(e, Binary) and e.op == "+" and isinstance(e.lhs, Ident) \
                and e.lhs.name == var_name and isinstance(e.rhs, IntLit):
            return e.rhs.value
    return None


# -- driver ----------------------------------------------------------------------


@dataclass
class AnalysisResult:
    program: Program
    resolution: Resolution
    trackedness: TrackednessMap
    annotations: dict[Stmt, LoopAnnotation]
    diagnostics: list[Diagnostic]


def analyze_program(program: Program) -> AnalysisResult:
    """Resolve names, run the trackedness fixpoint, annotate loops."""
    res = resolve(program)
    marks = analyze_trackedness(program, res)
    annotations, loop_diags = annotate_loops(program, res, marks)
    return AnalysisResult(
        program=program,
        resolution=res,
        trackedness=marks,
        annotations=annotations,
        diagnostics=res.diagnostics + loop_diags,
    )
