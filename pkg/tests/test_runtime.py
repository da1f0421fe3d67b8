import pytest

from perfscope.runtime import (
    ALLOC_TOTAL, FLOPS, LIVE_BYTES, ConfigError, Context, MemoryMisuseError,
    ProfilerInvariantError, comm_bytes, comm_calls, node_calls, node_flops,
)
from perfscope.terms import Term
from perfscope.values import num_from_literal, num_input

N_INPUT = ("n", 8, 256)
M_INPUT = ("m", 4, 128)


def ctx_n(max_iterations=2):
    return Context([N_INPUT], max_iterations=max_iterations)


def test_new_context_is_empty():
    ctx = ctx_n()
    assert ctx.counters.get(FLOPS) == Term.const(0)
    assert ctx.nodes[0].name == "<program>"
    assert ctx.peak_large == 0


def test_two_variable_context():
    ctx = Context([N_INPUT, M_INPUT])
    assert ctx.small_env == {"n": 8, "m": 4}
    assert ctx.large_env == {"n": 256, "m": 128}


def test_duplicate_inputs_rejected():
    with pytest.raises(ConfigError):
        Context([N_INPUT, ("n", 1, 2)])


def test_invalid_configuration_rejected():
    from perfscope.values import InputConfigError
    with pytest.raises(InputConfigError):
        Context([("n", 8, 4)])


# -- counters & call tree -----------------------------------------------------


def test_charge_accumulates():
    ctx = ctx_n()
    ctx.charge_flops(1)
    ctx.charge_flops(1)
    assert ctx.counters.get(FLOPS) == Term.const(2)


def test_enter_exit_and_node_counts():
    ctx = ctx_n()
    nid = ctx.enter_function("execute")
    ctx.exit_function()
    assert ctx.counters.get(node_calls(nid)) == Term.const(1)
    for _ in range(3):
        ctx.enter_function("execute")
        ctx.exit_function()
    assert ctx.counters.get(node_calls(nid)) == Term.const(4)
    # one node per distinct path, not per dynamic call
    assert len([n for n in ctx.nodes if n.name == "execute"]) == 1


def test_calling_context_tree_distinguishes_paths():
    ctx = ctx_n()
    a = ctx.enter_function("a")
    leaf_under_a = ctx.enter_function("leaf")
    ctx.exit_function()
    ctx.exit_function()
    b = ctx.enter_function("b")
    leaf_under_b = ctx.enter_function("leaf")
    ctx.exit_function()
    ctx.exit_function()
    assert leaf_under_a != leaf_under_b
    assert ctx.nodes[leaf_under_a].parent == a
    assert ctx.nodes[leaf_under_b].parent == b


def test_exit_at_root_is_invariant_error():
    ctx = ctx_n()
    with pytest.raises(ProfilerInvariantError):
        ctx.exit_function()


def test_flops_mirror_into_current_node():
    ctx = ctx_n()
    nid = ctx.enter_function("f")
    ctx.charge_flops(1)
    ctx.exit_function()
    assert ctx.counters.get(node_flops(nid)) == Term.const(1)


# -- loop protocol ---------------------------------------------------------------


def test_loop_runs_body_at_most_twice():
    ctx = ctx_n()
    scope = ctx.loop_enter(ctx.input_num("n"))  # small trip 8
    runs = []
    while ctx.loop_iteration(scope):
        runs.append(scope.executed)
    assert runs == [1, 2]
    ctx.loop_exit(scope)


@pytest.mark.parametrize("small,expected", [(8, 2), (1, 1), (0, 0)])
def test_loop_iteration_counts(small, expected):
    ctx = Context([("z", small, max(small, 1) * 10 if small else 0)])
    scope = ctx.loop_enter(ctx.input_num("z"))
    count = 0
    while ctx.loop_iteration(scope):
        count += 1
    assert count == expected
    ctx.loop_exit(scope)


def test_loop_scaling_one_flop_per_iteration():
    ctx = ctx_n()
    scope = ctx.loop_enter(ctx.input_num("n"))
    while ctx.loop_iteration(scope):
        ctx.charge_flops(1)
    ctx.loop_exit(scope)
    assert ctx.counters.get(FLOPS) == Term.var("n")


def test_loop_with_empty_body_changes_nothing():
    ctx = ctx_n()
    ctx.charge_flops(5)
    scope = ctx.loop_enter(ctx.input_num("n"))
    while ctx.loop_iteration(scope):
        pass
    ctx.loop_exit(scope)
    assert ctx.counters.get(FLOPS) == Term.const(5)


def test_zero_trip_loop_restores_snapshot_and_warns():
    ctx = Context([("z", 0, 0)])
    ctx.charge_flops(3)
    scope = ctx.loop_enter(ctx.input_num("z"))
    assert not ctx.loop_iteration(scope)
    ctx.loop_exit(scope)
    assert ctx.counters.get(FLOPS) == Term.const(3)
    assert [w.kind for w in ctx.warnings] == ["zero-iterations"]


def test_nested_loops_compose():
    ctx = Context([N_INPUT, M_INPUT])
    outer = ctx.loop_enter(ctx.input_num("n"))
    while ctx.loop_iteration(outer):
        inner = ctx.loop_enter(ctx.input_num("m"))
        while ctx.loop_iteration(inner):
            ctx.charge_flops(1)
        ctx.loop_exit(inner)
    ctx.loop_exit(outer)
    assert ctx.counters.get(FLOPS) == Term.var("n") * Term.var("m")


def test_triple_nest_with_constant_body():
    ctx = Context([N_INPUT, M_INPUT, ("k", 2, 16)])
    n, m, k = (ctx.input_num(v) for v in "nmk")
    s1 = ctx.loop_enter(n)
    while ctx.loop_iteration(s1):
        s2 = ctx.loop_enter(m)
        while ctx.loop_iteration(s2):
            s3 = ctx.loop_enter(k)
            while ctx.loop_iteration(s3):
                ctx.charge_flops(3)
            ctx.loop_exit(s3)
        ctx.loop_exit(s2)
    ctx.loop_exit(s1)
    expected = Term.const(3) * Term.var("n") * Term.var("m") * Term.var("k")
    assert ctx.counters.get(FLOPS) == expected


def test_max_iterations_is_configurable():
    ctx = ctx_n(max_iterations=5)
    scope = ctx.loop_enter(ctx.input_num("n"))
    count = 0
    while ctx.loop_iteration(scope):
        ctx.charge_flops(1)
        count += 1
    ctx.loop_exit(scope)
    assert count == 5
    assert ctx.counters.get(FLOPS) == Term.var("n")  # 5 * n / 5


def test_loop_exit_requires_top_scope():
    ctx = ctx_n()
    outer = ctx.loop_enter(ctx.input_num("n"))
    ctx.loop_enter(num_from_literal(1))
    with pytest.raises(ProfilerInvariantError):
        ctx.loop_exit(outer)


# -- memory -------------------------------------------------------------------------


def test_alloc_tracks_live_and_peak():
    ctx = ctx_n()
    size = num_binop_bytes(ctx, 8)  # 8*n bytes
    block = ctx.mem_alloc(size)
    assert ctx.counters.get(LIVE_BYTES) == Term.const(8) * Term.var("n")
    assert ctx.peak_large == 2048
    assert ctx.peak_term == Term.const(8) * Term.var("n")
    ctx.mem_free(block)
    assert ctx.counters.get(LIVE_BYTES) == Term.const(0)
    assert ctx.peak_large == 2048  # peak is monotone
    assert ctx.peak_term == Term.const(8) * Term.var("n")


def num_binop_bytes(ctx, elem_size):
    from perfscope.values import num_binop
    return num_binop("*", ctx.input_num("n"), num_from_literal(elem_size))


def test_two_allocation_peak_rule():
    # sizes with terms n and m, larges 256 and 128: peak must combine them
    ctx = Context([N_INPUT, M_INPUT])
    a = ctx.mem_alloc(ctx.input_num("n"))
    assert ctx.peak_large == 256
    b = ctx.mem_alloc(ctx.input_num("m"))
    assert ctx.peak_large == 384  # 256 + 128 exceeds 256
    assert ctx.peak_term == Term.var("n") + Term.var("m")
    ctx.mem_free(a)
    ctx.mem_free(b)
    assert ctx.peak_large == 384
    assert ctx.peak_term == Term.var("n") + Term.var("m")


def test_alloc_total_is_monotone_under_free():
    ctx = ctx_n()
    block = ctx.mem_alloc(num_from_literal(64))
    ctx.mem_free(block)
    assert ctx.counters.get(ALLOC_TOTAL) == Term.const(64)
    assert ctx.counters.get(LIVE_BYTES) == Term.const(0)


def test_double_free_and_unknown_block():
    ctx = ctx_n()
    block = ctx.mem_alloc(num_from_literal(8))
    ctx.mem_free(block)
    with pytest.raises(MemoryMisuseError):
        ctx.mem_free(block)
    with pytest.raises(MemoryMisuseError):
        ctx.mem_free(12345)


def test_negative_allocation_rejected():
    ctx = ctx_n()
    from perfscope.terms import Term as T
    from perfscope.values import Num
    with pytest.raises(MemoryMisuseError):
        ctx.mem_alloc(Num(-8, T.const(-8), -8))


def test_alloc_free_inside_loop_scales_totals():
    ctx = Context([N_INPUT, M_INPUT])
    from perfscope.values import num_binop
    per_iter = num_binop("*", ctx.input_num("m"), num_from_literal(8))
    scope = ctx.loop_enter(ctx.input_num("n"))
    while ctx.loop_iteration(scope):
        block = ctx.mem_alloc(per_iter)
        ctx.mem_free(block)
    ctx.loop_exit(scope)
    n, m = Term.var("n"), Term.var("m")
    assert ctx.counters.get(ALLOC_TOTAL) == Term.const(8) * m * n
    assert ctx.counters.get(LIVE_BYTES) == Term.const(0)
    assert ctx.peak_term == Term.const(8) * m
    assert ctx.peak_large == 8 * 128


def test_leaked_allocations_in_loop_extrapolate():
    ctx = ctx_n()
    scope = ctx.loop_enter(ctx.input_num("n"))
    while ctx.loop_iteration(scope):
        ctx.mem_alloc(num_from_literal(8))
    ctx.loop_exit(scope)
    n = Term.var("n")
    assert ctx.counters.get(LIVE_BYTES) == Term.const(8) * n
    assert ctx.live_large == 8 * 256
    assert ctx.peak_large == 8 * 256  # peak rule re-runs at loop exit
    assert ctx.peak_term == Term.const(8) * n


def test_peak_large_is_nondecreasing():
    ctx = ctx_n()
    peaks = []
    for size in (8, 64, 16, 128, 8):
        block = ctx.mem_alloc(num_from_literal(size))
        peaks.append(ctx.peak_large)
        ctx.mem_free(block)
        peaks.append(ctx.peak_large)
    assert peaks == sorted(peaks)


# -- communication ----------------------------------------------------------------------


def test_comm_event_counts_calls_and_bytes():
    ctx = ctx_n()
    ctx.comm_event("allreduce", num_from_literal(8))
    assert ctx.counters.get(comm_calls("allreduce")) == Term.const(1)
    assert ctx.counters.get(comm_bytes("allreduce")) == Term.const(8)


def test_comm_event_in_loop_scales():
    ctx = ctx_n()
    scope = ctx.loop_enter(ctx.input_num("n"))
    while ctx.loop_iteration(scope):
        ctx.comm_event("send", num_from_literal(8))
    ctx.loop_exit(scope)
    n = Term.var("n")
    assert ctx.counters.get(comm_calls("send")) == n
    assert ctx.counters.get(comm_bytes("send")) == Term.const(8) * n


def test_zero_byte_send():
    ctx = ctx_n()
    ctx.comm_event("send", num_from_literal(0))
    assert ctx.counters.get(comm_calls("send")) == Term.const(1)
    assert ctx.counters.get(comm_bytes("send")) == Term.const(0)


# -- finalize ---------------------------------------------------------------------------


def test_finalize_empty_context():
    result = ctx_n().finalize()
    assert result.flops == Term.const(0)
    assert result.peak_large == 0
    assert len(result.nodes) == 1
    assert result.functions == []


def test_finalize_rejects_open_loops():
    ctx = ctx_n()
    ctx.loop_enter(ctx.input_num("n"))
    with pytest.raises(ProfilerInvariantError):
        ctx.finalize()


def test_finalize_rejects_unbalanced_functions():
    ctx = ctx_n()
    ctx.enter_function("f")
    with pytest.raises(ProfilerInvariantError):
        ctx.finalize()


def test_finalize_aggregates_functions_across_paths():
    ctx = ctx_n()
    ctx.enter_function("a")
    ctx.enter_function("leaf")
    ctx.charge_flops(1)
    ctx.exit_function()
    ctx.exit_function()
    ctx.enter_function("b")
    ctx.enter_function("leaf")
    ctx.charge_flops(1)
    ctx.exit_function()
    ctx.exit_function()
    result = ctx.finalize()
    leaf = next(f for f in result.functions if f.name == "leaf")
    assert leaf.calls == Term.const(2)
    assert leaf.flops == Term.const(2)


def test_warning_dedup_per_site():
    ctx = ctx_n()
    from perfscope.diagnostics import Loc
    for _ in range(5):
        ctx.warn("comparison-divergence", Loc(3, 7), "msg")
    ctx.warn("comparison-divergence", Loc(4, 1), "msg")
    assert len(ctx.warnings) == 2
