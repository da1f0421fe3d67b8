"""Rendering of profile results: a Graphviz DOT call tree and a
plain-text complexity report.

Both renderings are pure functions of the result with a fixed layout,
so identical runs produce byte-identical output (a golden-file
contract). The DOT document has one node per call path ("n<id>", in id
order), one edge per parent-child pair, and the global peak on the root
node; each function node lists calls, FLOPs with their big-O class,
allocated bytes, and communication volume.
"""

from __future__ import annotations

from .runtime import ProfileResult


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(result: ProfileResult) -> str:
    lines = ["digraph calltree {"]
    for stats in result.nodes:
        node = stats.node
        if node.parent is None:
            label_parts = [
                node.name,
                f"peak: {result.peak_term} B (large: {result.peak_large})",
            ]
        else:
            label_parts = [
                node.name,
                f"calls: {stats.calls}",
                f"flops: {stats.flops} = {stats.flops.big_o()}",
                f"alloc: {stats.alloc_bytes} B",
                f"comm: {stats.comm_calls} calls, {stats.comm_bytes} B",
            ]
        label = "\\n".join(_dot_escape(part) for part in label_parts)
        lines.append(f'  n{node.id} [label="{label}"];')
    for stats in result.nodes:
        node = stats.node
        if node.parent is not None:
            lines.append(f"  n{node.parent} -> n{node.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_text(result: ProfileResult) -> str:
    lines = []
    if result.inputs:
        inputs = ", ".join(f"{n} = {s}:{l}" for n, s, l in result.inputs)
    else:
        inputs = "(none)"
    lines.append(f"inputs: {inputs}")
    if result.mode == "exact":
        lines.append("mode: exact (full execution)")
    else:
        lines.append(f"mode: profile (at most {result.max_iterations} "
                     "iteration(s) per extrapolated loop)")
    lines.append("")

    header = ("function", "calls", "flops", "big-O", "alloc", "comm")
    rows = [
        (
            f.name,
            str(f.calls),
            str(f.flops),
            str(f.flops_big_o),
            f"{f.alloc_bytes} B",
            f"{f.comm_calls} call, {f.comm_bytes} B",
        )
        for f in result.functions
    ]
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    lines.append(" | ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines.append("-+-".join("-" * w for w in widths))
    for row in rows:
        lines.append(" | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    lines.append("")
    lines.append(f"peak memory: {result.peak_term} B (large: {result.peak_large})")

    if result.warnings:
        lines.append("warnings:")
        for w in result.warnings:
            where = str(w.loc) if w.loc is not None else "-"
            lines.append(f"  {where}: {w.kind}: {w.message}")
    else:
        lines.append("warnings: none")
    return "\n".join(lines) + "\n"
