import re
from pathlib import Path

from perfscope import to_dot, to_text
from perfscope.runtime import Context
from support import FIG1_INPUTS, FIG1_SOURCE, profile

GOLDEN = Path(__file__).parent / "golden" / "fig1_calltree.dot"

_NODE_RE = re.compile(r'^  n(\d+) \[label="((?:[^"\\]|\\.)*)"\];$')
_EDGE_RE = re.compile(r"^  n(\d+) -> n(\d+);$")


def assert_valid_dot(text: str) -> tuple[list[int], list[tuple[int, int]]]:
    """Structural parse: header, quoted node labels, edges, footer."""
    lines = text.splitlines()
    assert lines[0] == "digraph calltree {"
    assert lines[-1] == "}"
    assert text.endswith("}\n")
    nodes: list[int] = []
    edges: list[tuple[int, int]] = []
    for line in lines[1:-1]:
        node = _NODE_RE.match(line)
        edge = _EDGE_RE.match(line)
        assert node or edge, f"unparseable DOT line: {line!r}"
        if node:
            assert not edges, "nodes must precede edges"
            nodes.append(int(node.group(1)))
        else:
            edges.append((int(edge.group(1)), int(edge.group(2))))
    assert nodes == sorted(nodes), "node ids must be emitted in order"
    declared = set(nodes)
    for src, dst in edges:
        assert src in declared and dst in declared
    return nodes, edges


def test_fig1_dot_matches_golden(fig1_result):
    assert to_dot(fig1_result) == GOLDEN.read_text()


def test_fig1_dot_is_structurally_valid(fig1_result):
    nodes, edges = assert_valid_dot(to_dot(fig1_result))
    assert nodes == [0, 1, 2]
    assert edges == [(0, 1), (1, 2)]


def test_dot_node_content(fig1_result):
    dot = to_dot(fig1_result)
    assert 'label="<program>\\npeak: 8*n B (large: 2048)"' in dot
    assert "execute\\ncalls: 1\\nflops: n = O(n)\\nalloc: 8*n B\\n" \
           "comm: 1 calls, 8 B" in dot


def test_empty_context_dot():
    result = Context([("n", 8, 256)]).finalize()
    dot = to_dot(result)
    assert_valid_dot(dot)
    assert dot == ('digraph calltree {\n'
                   '  n0 [label="<program>\\npeak: 0 B (large: 0)"];\n'
                   '}\n')


def test_two_level_tree_edges():
    ctx = Context([("n", 1, 1)])
    ctx.enter_function("f")
    ctx.exit_function()
    nodes, edges = assert_valid_dot(to_dot(ctx.finalize()))
    assert edges == [(0, 1)]


def test_every_node_appears_once_in_both_renderings(fig1_result):
    dot = to_dot(fig1_result)
    text = to_text(fig1_result)
    for stats in fig1_result.nodes:
        assert dot.count(f"n{stats.node.id} [label=") == 1
    for f in fig1_result.functions:
        rows = [l for l in text.splitlines() if l.startswith(f.name + " ")]
        assert len(rows) == 1


def test_rendering_is_deterministic():
    a = profile(FIG1_SOURCE, FIG1_INPUTS)
    b = profile(FIG1_SOURCE, FIG1_INPUTS)
    assert to_dot(a) == to_dot(b)
    assert to_text(a) == to_text(b)


def test_text_report_table_row(fig1_result):
    text = to_text(fig1_result)
    row = next(l for l in text.splitlines() if l.startswith("execute"))
    cells = [c.strip() for c in row.split("|")]
    assert cells == ["execute", "1", "n", "O(n)", "8*n B", "1 call, 8 B"]


def test_text_report_header_and_peak(fig1_result):
    text = to_text(fig1_result)
    assert text.splitlines()[0] == "inputs: n = 8:256"
    assert "peak memory: 8*n B (large: 2048)" in text


def test_text_report_warnings_section(fig1_result):
    text = to_text(fig1_result)
    assert "warnings:" in text
    warning_line = next(l for l in text.splitlines()
                        if "comparison-divergence" in l)
    assert re.match(r"^  \d+:\d+: comparison-divergence: ", warning_line)


def test_text_report_without_warnings():
    result = Context([("n", 8, 256)]).finalize()
    assert "warnings: none" in to_text(result)


def test_text_report_aggregates_paths():
    ctx = Context([("n", 1, 1)])
    for parent in ("a", "b"):
        ctx.enter_function(parent)
        ctx.enter_function("leaf")
        ctx.charge_flops(1)
        ctx.exit_function()
        ctx.exit_function()
    text = to_text(ctx.finalize())
    row = next(l for l in text.splitlines() if l.startswith("leaf"))
    cells = [c.strip() for c in row.split("|")]
    assert cells[1] == "2" and cells[2] == "2"
