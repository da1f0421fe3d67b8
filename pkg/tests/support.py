"""Shared helpers and fixture programs for the test suite."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from perfscope import (
    AnalysisResult, ProfileResult, RunOptions, analyze_program, parse, run,
)

FIG1_SOURCE = """\
void execute(int n) {
  double *field = malloc(n * sizeof(*field));
  double localSum = 0;
  for (int i = 0; i < n; ++i)
    localSum += field[i];
  double globalSum;
  if (n > 128)
    MPI_Allreduce(&localSum, &globalSum, 1, MPI_DOUBLE, MPI_SUM, MPI_COMM_WORLD);
  free(field);
}

int main(int n) {
  execute(n);
  return 0;
}
"""

FIG1_INPUTS = [("n", 8, 256)]


def analyze(source: str) -> AnalysisResult:
    analysis = analyze_program(parse(source))
    assert not analysis.diagnostics, [d.format() for d in analysis.diagnostics]
    return analysis


def profile(source: str, inputs, max_iterations: int = 2) -> ProfileResult:
    return run(analyze(source),
               RunOptions(inputs=list(inputs), max_iterations=max_iterations))


def exact(source: str, sizes: dict[str, int]) -> ProfileResult:
    inputs = [(name, v, v) for name, v in sizes.items()]
    return run(analyze(source), RunOptions(inputs=inputs, mode="exact"))


def as_int(q: Fraction) -> int:
    assert q.denominator == 1, f"not integral: {q}"
    return int(q)


@dataclass(frozen=True)
class OracleFixture:
    """A program whose profile formulas must match full execution exactly."""

    name: str
    source: str
    inputs: tuple[tuple[str, int, int], ...]  # profile configuration
    # assignments to check: the small configuration plus larger ones
    checks: tuple[dict[str, int], ...]


ORACLE_FIXTURES = [
    OracleFixture(
        name="straight_line",
        source="""\
int main(int n) {
  double a = 1.5;
  double b = a + 2.0;
  double c = b * a;
  double d = c / 4.0;
  double *buf = malloc(4 * sizeof(double));
  buf[0] = d;
  MPI_Send(&d, 2, MPI_DOUBLE, 0, 0, MPI_COMM_WORLD);
  free(buf);
  return 0;
}
""",
        inputs=(("n", 4, 64),),
        checks=({"n": 4}, {"n": 9}, {"n": 17}),
    ),
    OracleFixture(
        name="single_loop",
        source="""\
int main(int n) {
  double *field = malloc(n * sizeof(*field));
  double sum = 0;
  for (int i = 0; i < n; ++i)
    sum += field[i];
  free(field);
  return 0;
}
""",
        inputs=(("n", 8, 256),),
        checks=({"n": 8}, {"n": 13}, {"n": 32}),
    ),
    OracleFixture(
        name="two_sequential_loops",
        source="""\
int main(int n, int m) {
  double a = 0;
  for (int i = 0; i < n; ++i)
    a += 1.0;
  for (int j = 0; j < m; ++j) {
    a += 2.0;
    a *= 1.5;
  }
  return 0;
}
""",
        inputs=(("n", 5, 50), ("m", 3, 30)),
        checks=({"n": 5, "m": 3}, {"n": 11, "m": 7}, {"n": 20, "m": 1}),
    ),
    OracleFixture(
        name="nest_depth_2",
        source="""\
int main(int n, int m) {
  double acc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      acc += 1.0;
  return 0;
}
""",
        inputs=(("n", 4, 40), ("m", 3, 30)),
        checks=({"n": 4, "m": 3}, {"n": 7, "m": 5}, {"n": 12, "m": 2}),
    ),
    OracleFixture(
        name="nest_depth_3",
        source="""\
int main(int n, int m, int k) {
  double acc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < k; ++l) {
        acc += 1.0;
        acc *= 1.0;
      }
  return 0;
}
""",
        inputs=(("n", 3, 12), ("m", 4, 16), ("k", 2, 8)),
        checks=({"n": 3, "m": 4, "k": 2}, {"n": 5, "m": 2, "k": 6},
                {"n": 8, "m": 8, "k": 8}),
    ),
    OracleFixture(
        name="loop_alloc_free",
        source="""\
int main(int n, int m) {
  for (int i = 0; i < n; ++i) {
    double *t = malloc(m * sizeof(*t));
    t[0] = 1.0;
    free(t);
  }
  return 0;
}
""",
        inputs=(("n", 6, 60), ("m", 4, 40)),
        checks=({"n": 6, "m": 4}, {"n": 9, "m": 8}, {"n": 16, "m": 2}),
    ),
    OracleFixture(
        name="loop_comm",
        source="""\
int main(int n) {
  double x = 3.5;
  for (int i = 0; i < n; ++i)
    MPI_Send(&x, 1, MPI_DOUBLE, 0, 0, MPI_COMM_WORLD);
  return 0;
}
""",
        inputs=(("n", 4, 400),),
        checks=({"n": 4}, {"n": 10}, {"n": 33}),
    ),
    OracleFixture(
        name="call_in_loop",
        source="""\
double work(double x) {
  return x * 2.0;
}

int main(int n) {
  double acc = 1.0;
  for (int i = 0; i < n; ++i)
    acc = work(acc);
  return 0;
}
""",
        inputs=(("n", 6, 600),),
        checks=({"n": 6}, {"n": 14}, {"n": 25}),
    ),
    OracleFixture(
        name="size_arithmetic",
        source="""\
int main(int n, int m) {
  int total = n * m + n;
  double *grid = malloc(total * sizeof(double));
  double s = 0;
  for (int i = 0; i < total; ++i)
    s += grid[i];
  free(grid);
  return 0;
}
""",
        inputs=(("n", 3, 24), ("m", 4, 32)),
        checks=({"n": 3, "m": 4}, {"n": 6, "m": 2}, {"n": 10, "m": 10}),
    ),
    OracleFixture(
        name="allreduce_ints_in_loop",
        source="""\
int main(int n) {
  int v = 7;
  int w = 0;
  for (int i = 0; i < n; ++i)
    MPI_Allreduce(&v, &w, 3, MPI_INT, MPI_SUM, MPI_COMM_WORLD);
  return 0;
}
""",
        inputs=(("n", 5, 500),),
        checks=({"n": 5}, {"n": 12}, {"n": 40}),
    ),
    OracleFixture(
        name="annotated_while",
        source="""\
int main(int k) {
  double s = 0;
  int i = 0;
  #perf iterations(k)
  while (i < k) {
    s += 1.0;
    i = i + 1;
  }
  return 0;
}
""",
        inputs=(("k", 8, 80),),
        checks=({"k": 8}, {"k": 15}, {"k": 31}),
    ),
]
