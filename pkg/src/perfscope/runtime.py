"""Profiling state for one run.

A ``Context`` owns everything one execution accumulates: Term-valued
counters (global and per call-tree node), the loop stack implementing
the at-most-twice iteration protocol with snapshot/scale extrapolation,
heap bookkeeping with a large-value peak rule, communication events, and
the calling-context tree. Counters are per-context, never process
global, so independent runs can proceed in parallel.

Loop extrapolation works on deltas: entering a loop snapshots every
counter; leaving it replaces each counter by

    snapshot + (current - snapshot) * trip / executed

so whatever the body charged over the iterations that actually ran is
scaled to the full symbolic trip count. Live-memory large values scale
the same way with integer arithmetic rounding toward zero, and the peak
rule re-runs afterwards so leaked-in-loop memory stays visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .diagnostics import Loc
from .terms import TERM_ZERO, BigO, Term
from .values import Num, _trunc_div, num_input

# Counter keys are plain tuples: ("flops",), ("comm_calls", kind),
# ("node_flops", node_id), ...
CounterKey = tuple

FLOPS: CounterKey = ("flops",)
ALLOC_TOTAL: CounterKey = ("alloc_bytes_total",)
LIVE_BYTES: CounterKey = ("live_bytes",)

COMM_KINDS = ("allreduce", "send", "recv")


def comm_calls(kind: str) -> CounterKey:
    return ("comm_calls", kind)


def comm_bytes(kind: str) -> CounterKey:
    return ("comm_bytes", kind)


def node_calls(node_id: int) -> CounterKey:
    return ("node_calls", node_id)


def node_flops(node_id: int) -> CounterKey:
    return ("node_flops", node_id)


def node_comm_calls(node_id: int) -> CounterKey:
    return ("node_comm_calls", node_id)


def node_comm_bytes(node_id: int) -> CounterKey:
    return ("node_comm_bytes", node_id)


def node_alloc_bytes(node_id: int) -> CounterKey:
    return ("node_alloc_bytes", node_id)


class ProfilerInvariantError(RuntimeError):
    """Scope or tree bookkeeping went out of balance: an interpreter bug."""


class MemoryMisuseError(RuntimeError):
    """Double free, unknown block, or negative allocation size."""


class ConfigError(ValueError):
    """Bad run configuration (duplicate input names, ...)."""


class CounterStore:
    """Keyed Term-valued counters; absent key means zero."""

    __slots__ = ("_counters",)

    def __init__(self) -> None:
        self._counters: dict[CounterKey, Term] = {}

    def get(self, key: CounterKey) -> Term:
        return self._counters.get(key, TERM_ZERO)

    def add(self, key: CounterKey, amount: Term | int) -> None:
        self._counters[key] = self.get(key) + amount

    def set(self, key: CounterKey, value: Term) -> None:
        self._counters[key] = value

    def snapshot(self) -> dict[CounterKey, Term]:
        return dict(self._counters)

    def restore(self, snap: dict[CounterKey, Term]) -> None:
        self._counters = dict(snap)

    def scale_from(self, snap: dict[CounterKey, Term], factor: Term) -> None:
        # counter := snapshot + (counter - snapshot) * factor, per key.
        for key in set(self._counters) | set(snap):
            base = snap.get(key, TERM_ZERO)
            delta = self._counters.get(key, TERM_ZERO) - base
            if not delta.is_zero:
                self._counters[key] = base + delta * factor

    def items(self) -> list[tuple[CounterKey, Term]]:
        return list(self._counters.items())


@dataclass
class CallNode:
    """One node of the calling-context tree: a distinct call path."""

    id: int
    name: str
    parent: int | None
    children: dict[str, int] = field(default_factory=dict)


@dataclass
class LoopScope:
    trip: Num
    loc: Loc | None
    snapshot: dict[CounterKey, Term]
    live_large_snapshot: int
    executed: int = 0


@dataclass
class Block:
    size: Num
    live: bool = True


@dataclass(frozen=True)
class ProfWarning:
    kind: str
    loc: Loc | None
    message: str


@dataclass
class NodeStats:
    node: CallNode
    calls: Term
    flops: Term
    alloc_bytes: Term
    comm_calls: Term
    comm_bytes: Term


@dataclass
class FunctionStats:
    """Per-function totals, aggregated over every call path."""

    name: str
    calls: Term
    flops: Term
    alloc_bytes: Term
    comm_calls: Term
    comm_bytes: Term
    flops_big_o: BigO


@dataclass
class ProfileResult:
    inputs: tuple[tuple[str, int, int], ...]
    max_iterations: int
    nodes: list[NodeStats]
    functions: list[FunctionStats]
    counters: dict[CounterKey, Term]
    peak_term: Term
    peak_large: int
    warnings: list[ProfWarning]
    mode: str = "profile"
    main_return: object | None = None

    @property
    def flops(self) -> Term:
        return self.counters.get(FLOPS, TERM_ZERO)

    @property
    def alloc_total(self) -> Term:
        return self.counters.get(ALLOC_TOTAL, TERM_ZERO)

    @property
    def live_bytes(self) -> Term:
        return self.counters.get(LIVE_BYTES, TERM_ZERO)

    def comm_call_count(self, kind: str | None = None) -> Term:
        if kind is not None:
            return self.counters.get(comm_calls(kind), TERM_ZERO)
        total = TERM_ZERO
        for k in COMM_KINDS:
            total = total + self.counters.get(comm_calls(k), TERM_ZERO)
        return total

    def comm_byte_count(self, kind: str | None = None) -> Term:
        if kind is not None:
            return self.counters.get(comm_bytes(kind), TERM_ZERO)
        total = TERM_ZERO
        for k in COMM_KINDS:
            total = total + self.counters.get(comm_bytes(k), TERM_ZERO)
        return total

    def small_env(self) -> dict[str, Fraction]:
        return {name: Fraction(small) for name, small, _ in self.inputs}

    def large_env(self) -> dict[str, Fraction]:
        return {name: Fraction(large) for name, _, large in self.inputs}


class Context:
    """All mutable profiling state for a single run. Single-threaded."""

    def __init__(
        self,
        inputs: list[tuple[str, int, int]] | tuple[tuple[str, int, int], ...] = (),
        max_iterations: int = 2,
    ):
        names = [name for name, _, _ in inputs]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate input names in {names}")
        if max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        # num_input validates 0 <= small <= large per entry.
        self.inputs = tuple((n, s, l) for n, s, l in inputs)
        self._input_nums = {n: num_input(n, s, l) for n, s, l in self.inputs}
        self.max_iterations = max_iterations
        self.small_env = {n: Fraction(s) for n, s, _ in self.inputs}
        self.large_env = {n: Fraction(l) for n, _, l in self.inputs}

        self.counters = CounterStore()
        self.nodes: list[CallNode] = [CallNode(0, "<program>", None)]
        self.current_node = 0
        self.loop_stack: list[LoopScope] = []

        self.blocks: dict[int, Block] = {}
        self._next_block = 0
        self.live_large = 0
        self.peak_large = 0
        self.peak_term: Term = TERM_ZERO

        self.warnings: list[ProfWarning] = []
        self._warned_sites: set[tuple[str, Loc | None]] = set()

    def input_num(self, name: str) -> Num:
        return self._input_nums[name]

    # -- warnings -------------------------------------------------------

    def warn(self, kind: str, loc: Loc | None, message: str) -> None:
        # One warning per (kind, site): loop iterations must not spam.
        key = (kind, loc)
        if key in self._warned_sites:
            return
        self._warned_sites.add(key)
        self.warnings.append(ProfWarning(kind, loc, message))

    def warn_sink(self, loc: Loc | None):
        """Curry a source location into the values-module warn callback."""
        return lambda kind, message: self.warn(kind, loc, message)

    # -- call tree --------------------------------------------------------

    def enter_function(self, name: str) -> int:
        parent = self.nodes[self.current_node]
        child_id = parent.children.get(name)
        if child_id is None:
            child_id = len(self.nodes)
            self.nodes.append(CallNode(child_id, name, parent.id))
            parent.children[name] = child_id
        self.current_node = child_id
        self.counters.add(node_calls(child_id), 1)
        return child_id

    def exit_function(self) -> None:
        node = self.nodes[self.current_node]
        if node.parent is None:
            raise ProfilerInvariantError("exit_function at the root node")
        self.current_node = node.parent

    # -- counters ---------------------------------------------------------

    def charge_flops(self, amount: Term | int) -> None:
        self.counters.add(FLOPS, amount)
        self.counters.add(node_flops(self.current_node), amount)

    def comm_event(self, kind: str, nbytes: Num) -> None:
        if nbytes.small < 0:
            raise MemoryMisuseError(f"negative communication size {nbytes.small}")
        self.counters.add(comm_calls(kind), 1)
        self.counters.add(comm_bytes(kind), nbytes.term)
        self.counters.add(node_comm_calls(self.current_node), 1)
        self.counters.add(node_comm_bytes(self.current_node), nbytes.term)

    # -- loops --------------------------------------------------------------

    def loop_enter(self, trip: Num, loc: Loc | None = None) -> LoopScope:
        if trip.small < 0:
            raise ProfilerInvariantError(f"negative loop trip count {trip.small}")
        scope = LoopScope(
            trip=trip,
            loc=loc,
            snapshot=self.counters.snapshot(),
            live_large_snapshot=self.live_large,
        )
        self.loop_stack.append(scope)
        return scope

    def loop_iteration(self, scope: LoopScope) -> bool:
        if not self.loop_stack or self.loop_stack[-1] is not scope:
            raise ProfilerInvariantError("loop_iteration on a scope not on top")
        if scope.executed < min(self.max_iterations, scope.trip.small):
            scope.executed += 1
            return True
        return False

    def loop_exit(self, scope: LoopScope) -> None:
        if not self.loop_stack or self.loop_stack[-1] is not scope:
            raise ProfilerInvariantError("loop_exit on a scope not on top")
        self.loop_stack.pop()
        if scope.executed == 0:
            self.counters.restore(scope.snapshot)
            self.live_large = scope.live_large_snapshot
            self.warn(
                "zero-iterations",
                scope.loc,
                "loop ran zero iterations at the small configuration; "
                "it contributes nothing to the formulas",
            )
            return
        factor = scope.trip.term / scope.executed
        self.counters.scale_from(scope.snapshot, factor)
        delta = self.live_large - scope.live_large_snapshot
        self.live_large = scope.live_large_snapshot + _trunc_div(
            delta * scope.trip.large, scope.executed
        )
        self._update_peak()

    # -- memory ---------------------------------------------------------------

    def mem_alloc(self, size: Num) -> int:
        if size.small < 0 or size.large < 0:
            raise MemoryMisuseError(
                f"negative allocation size (small={size.small}, large={size.large})"
            )
        block_id = self._next_block
        self._next_block += 1
        self.blocks[block_id] = Block(size)
        self.counters.add(LIVE_BYTES, size.term)
        self.counters.add(ALLOC_TOTAL, size.term)
        self.counters.add(node_alloc_bytes(self.current_node), size.term)
        self.live_large += size.large
        self._update_peak()
        return block_id

    def mem_free(self, block_id: int) -> None:
        block = self.blocks.get(block_id)
        if block is None:
            raise MemoryMisuseError(f"free of unknown block {block_id}")
        if not block.live:
            raise MemoryMisuseError(f"double free of block {block_id}")
        block.live = False
        self.counters.add(LIVE_BYTES, -block.size.term)
        self.live_large -= block.size.large

    def block_is_live(self, block_id: int) -> bool:
        block = self.blocks.get(block_id)
        return block is not None and block.live

    def _update_peak(self) -> None:
        if self.live_large > self.peak_large:
            self.peak_large = self.live_large
            self.peak_term = self.counters.get(LIVE_BYTES)

    # -- result -----------------------------------------------------------------

    def finalize(self, mode: str = "profile") -> ProfileResult:
        if self.loop_stack:
            raise ProfilerInvariantError(
                f"{len(self.loop_stack)} loop scope(s) still open at finalize"
            )
        if self.current_node != 0:
            raise ProfilerInvariantError("finalize with unbalanced function scopes")

        node_stats = [
            NodeStats(
                node=node,
                calls=self.counters.get(node_calls(node.id)),
                flops=self.counters.get(node_flops(node.id)),
                alloc_bytes=self.counters.get(node_alloc_bytes(node.id)),
                comm_calls=self.counters.get(node_comm_calls(node.id)),
                comm_bytes=self.counters.get(node_comm_bytes(node.id)),
            )
            for node in self.nodes
        ]

        by_name: dict[str, list[NodeStats]] = {}
        order: list[str] = []
        for stats in node_stats[1:]:  # skip the synthetic root
            if stats.node.name not in by_name:
                by_name[stats.node.name] = []
                order.append(stats.node.name)
            by_name[stats.node.name].append(stats)

        functions = []
        for name in order:
            group = by_name[name]
            flops = _sum(s.flops for s in group)
            functions.append(
                FunctionStats(
                    name=name,
                    calls=_sum(s.calls for s in group),
                    flops=flops,
                    alloc_bytes=_sum(s.alloc_bytes for s in group),
                    comm_calls=_sum(s.comm_calls for s in group),
                    comm_bytes=_sum(s.comm_bytes for s in group),
                    flops_big_o=flops.big_o(),
                )
            )

        return ProfileResult(
            inputs=self.inputs,
            max_iterations=self.max_iterations,
            nodes=node_stats,
            functions=functions,
            counters=dict(self.counters.snapshot()),
            peak_term=self.peak_term,
            peak_large=self.peak_large,
            warnings=list(self.warnings),
            mode=mode,
        )


def _sum(terms) -> Term:
    total = TERM_ZERO
    for t in terms:
        total = total + t
    return total
