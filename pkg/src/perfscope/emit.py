"""Readable instrumented-source rendering.

Shows what the profiler effectively executes: tracked int declarations
become ``Num``, tracked doubles ``Double``, tracked heap blocks
``DynamicMem<T>`` allocated through ``perf_malloc<T>``; extrapolated
loops carry a ``LOOP(<trip>)`` prefix and an ``ITERATION`` marker;
every function body is bracketed by ``ENTERFUNCTION``/``EXITFUNCTION``.
Untracked code renders verbatim. Output is deterministic and diffable.
"""

from __future__ import annotations

from .analysis import (
    TRACKED_BLOCK, TRACKED_FLOAT, TRACKED_INT, AnalysisResult, Decl,
)
from .ast_nodes import (
    AddrOf, AssignStmt, Binary, Block, Call, CompoundAssign, DeclStmt, Expr,
    ExprStmt, FloatLit, For, FuncDef, Ident, If, IncrDecr, Index, IntLit,
    Malloc, Param, Return, SizeofDeref, SizeofType, Stmt, TypeSpec, Unary,
    While,
)

INDENT = "  "

_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7


def emit_instrumented(analysis: AnalysisResult) -> str:
    return _Emitter(analysis).render()


class _Emitter:
    def __init__(self, analysis: AnalysisResult):
        self.res = analysis.resolution
        self.marks = analysis.trackedness
        self.annotations = analysis.annotations
        self.program = analysis.program

    def render(self) -> str:
        chunks = [self.func_lines(f) for f in self.program.functions]
        out: list[str] = []
        for i, chunk in enumerate(chunks):
            if i:
                out.append("")
            out.extend(chunk)
        return "\n".join(out) + "\n"

    # -- declarations -------------------------------------------------

    def decl_type_text(self, decl: Decl) -> str:
        marker = self.marks.marker(decl)
        if marker == TRACKED_INT:
            return "Num"
        if marker == TRACKED_FLOAT:
            return "Double"
        if marker == TRACKED_BLOCK:
            elem = "Double" if decl.type.base == "double" else "Num"
            return f"DynamicMem<{elem}>"
        return f"{decl.type.base} *" if decl.type.pointer else decl.type.base

    @staticmethod
    def _join_type_name(type_text: str, name: str) -> str:
        # "double *" abuts its declarator: "double *field"
        return f"{type_text}{name}" if type_text.endswith("*") else f"{type_text} {name}"

    def param_text(self, func: FuncDef, param: Param, decl: Decl) -> str:
        return self._join_type_name(self.decl_type_text(decl), param.name)

    # -- functions ----------------------------------------------------------

    def func_lines(self, func: FuncDef) -> list[str]:
        params = ", ".join(
            self.param_text(func, p, d)
            for p, d in zip(func.params, self.res.params[func.name])
        )
        ret = str(func.ret_type)
        head = self._join_type_name(ret, func.name)
        lines = [f"{head}({params}) {{ENTERFUNCTION"]
        for stmt in func.body.stmts:
            lines.extend(self.stmt_lines(stmt, 1))
        lines.append("EXITFUNCTION}")
        return lines

    # -- statements ------------------------------------------------------------

    def stmt_lines(self, stmt: Stmt, indent: int) -> list[str]:
        pad = INDENT * indent
        if isinstance(stmt, Block):
            lines = [pad + "{"]
            for s in stmt.stmts:
                lines.extend(self.stmt_lines(s, indent + 1))
            lines.append(pad + "}")
            return lines
        if isinstance(stmt, DeclStmt):
            decl = self.res.decl_of_stmt[stmt]
            text = self._join_type_name(self.decl_type_text(decl), stmt.name)
            if stmt.init is not None:
                text += f" = {self.expr(stmt.init)}"
            return [pad + text + ";"]
        if isinstance(stmt, (AssignStmt, CompoundAssign, IncrDecr)):
            return [pad + self.simple_text(stmt) + ";"]
        if isinstance(stmt, Return):
            if stmt.expr is None:
                return [pad + "return;"]
            return [pad + f"return {self.expr(stmt.expr)};"]
        if isinstance(stmt, ExprStmt):
            return [pad + self.expr(stmt.expr) + ";"]
        if isinstance(stmt, If):
            lines = [pad + f"if ({self.expr(stmt.cond)})"]
            lines = self._attach_body(lines, stmt.then, indent)
            if stmt.els is not None:
                lines.append(pad + "else")
                lines = self._attach_body(lines, stmt.els, indent)
            return lines
        if isinstance(stmt, For):
            ann = self.annotations.get(stmt)
            header = (f"for ({self.simple_text(stmt.init)}; "
                      f"{self.expr(stmt.cond)}; {self.simple_text(stmt.step)})")
            if ann is not None and not ann.is_exact:
                header = f"LOOP({self.expr(ann.trip)}) {header} ITERATION"
            return self._attach_body([pad + header], stmt.body, indent)
        if isinstance(stmt, While):
            header = f"while ({self.expr(stmt.cond)})"
            ann = self.annotations.get(stmt)
            if ann is not None and not ann.is_exact:
                header = f"LOOP({self.expr(ann.trip)}) {header} ITERATION"
            return self._attach_body([pad + header], stmt.body, indent)
        raise AssertionError(f"unhandled statement {type(stmt).__name__}")

    def _attach_body(self, lines: list[str], body: Stmt, indent: int) -> list[str]:
        if isinstance(body, Block):
            lines[-1] += " {"
            for s in body.stmts:
                lines.extend(self.stmt_lines(s, indent + 1))
            lines.append(INDENT * indent + "}")
        else:
            lines.extend(self.stmt_lines(body, indent + 1))
        return lines

    def simple_text(self, stmt: Stmt) -> str:
        if isinstance(stmt, DeclStmt):
            decl = self.res.decl_of_stmt[stmt]
            text = self._join_type_name(self.decl_type_text(decl), stmt.name)
            if stmt.init is not None:
                text += f" = {self.expr(stmt.init)}"
            return text
        if isinstance(stmt, AssignStmt):
            return f"{self.expr(stmt.target)} = {self.expr(stmt.expr)}"
        if isinstance(stmt, CompoundAssign):
            return f"{self.expr(stmt.target)} {stmt.op}= {self.expr(stmt.expr)}"
        if isinstance(stmt, IncrDecr):
            if stmt.prefix:
                return f"{stmt.op}{stmt.target.name}"
            return f"{stmt.target.name}{stmt.op}"
        raise AssertionError(f"not a simple statement: {type(stmt).__name__}")

    # -- expressions ----------------------------------------------------------------

    def expr(self, e: Expr, parent_prec: int = 0) -> str:
        if isinstance(e, IntLit):
            return str(e.value)
        if isinstance(e, FloatLit):
            return repr(e.value)
        if isinstance(e, Ident):
            return e.name
        if isinstance(e, Binary):
            p = _PREC[e.op]
            text = f"{self.expr(e.lhs, p)} {e.op} {self.expr(e.rhs, p + 1)}"
            return f"({text})" if p < parent_prec else text
        if isinstance(e, Unary):
            return f"{e.op}{self.expr(e.operand, _UNARY_PREC)}"
        if isinstance(e, Index):
            return f"{self.expr(e.base, _UNARY_PREC + 1)}[{self.expr(e.index)}]"
        if isinstance(e, Call):
            args = ", ".join(self.expr(a) for a in e.args)
            return f"{e.name}({args})"
        if isinstance(e, Malloc):
            elem_type = self.res.malloc_elem.get(e, TypeSpec("double"))
            elem = "Double" if elem_type.base == "double" else "Num"
            return f"perf_malloc<{elem}>({self.expr(e.size)})"
        if isinstance(e, SizeofType):
            return f"sizeof({e.type.base})"
        if isinstance(e, SizeofDeref):
            return f"sizeof(*{e.pointer.name})"
        if isinstance(e, AddrOf):
            return f"&{e.target.name}"
        raise AssertionError(f"unhandled expression {type(e).__name__}")
