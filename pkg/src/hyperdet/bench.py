"""Wall-clock comparison of the three engines across orders.

Timings come from an uncontrolled machine and are qualitative.  Each
measurement is the median of five runs after one warmup call; a run times
enough back-to-back calls to last at least ``min_run`` seconds and reports
the per-call time.
"""

from __future__ import annotations

import math
import random
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from . import core, verify
from .cache import ContractorStore
from .hdet import (
    CONTRACTOR_BUDGET,
    CROSS_ENGINE_RTOL,
    complexity_ratio,
    contractor_backend,
    contractor_entries,
    evaluate,
    hdet_naive,
)

ENGINES = ("naive", "levicivita", "symmetric")
#: naive and Levi-Civita rows are skipped past this many terms
MAX_TERMS = 2 * 10**5


@dataclass
class BenchRow:
    engine: str
    d: int
    N: int
    nanos: float | None
    value: object
    agreed: bool | None
    terms: int
    skipped: str | None = None
    log_ratio: float | None = None


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    symmetric_slope: float | None = None

    def jsonl(self) -> list[dict]:
        out = []
        for r in self.rows:
            value = r.value
            if value is not None and not isinstance(value, float):
                value = str(value)
            out.append({"engine": r.engine, "d": r.d, "N": r.N, "nanos": r.nanos,
                        "value": value, "agreed": r.agreed})
        return out


def time_call(fn, repeats: int = 5, min_run: float = 0.02) -> float:
    """Median per-call wall time in nanoseconds."""
    fn()
    number = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        if time.perf_counter() - t0 >= min_run or number >= 1 << 20:
            break
        number *= 2
    runs = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        for _ in range(number):
            fn()
        runs.append((time.perf_counter_ns() - t0) / number)
    return statistics.median(runs)


def term_count(engine: str, d: int, N: int) -> int:
    if engine == "naive":
        return math.factorial(d) ** (N - 1)
    if engine == "levicivita":
        return math.factorial(d) ** N
    return contractor_entries(d, N)


def prior_art_cost(d: int, N: int) -> int:
    """Operation count ``2^(d(N-1)) d^(N-1)`` of the prior method (analytic only)."""
    return 2 ** (d * (N - 1)) * d ** (N - 1)


def loglog_slope(Ns, times) -> float:
    x, y = np.log(np.asarray(Ns, float)), np.log(np.asarray(times, float))
    return float(np.polyfit(x, y, 1)[0])


def _agree(a, b, backend: str) -> bool:
    if backend == core.RATIONAL:
        return a == b
    return abs(a - b) <= CROSS_ENGINE_RTOL * max(abs(a), abs(b), 1e-300) or a == b


def run_bench(
    d: int = 2,
    Ns=(2, 4, 6, 8, 10, 12),
    engines=ENGINES,
    store: ContractorStore | None = None,
    backend: str = core.FLOAT64,
    max_terms: int = MAX_TERMS,
    contractor_budget: int = CONTRACTOR_BUDGET,
    seed: int = 0,
    repeats: int = 5,
    min_run: float = 0.02,
) -> BenchReport:
    store = store or ContractorStore()
    rng = random.Random(seed)
    report = BenchReport()
    sym_points = []
    for N in Ns:
        A = verify.random_symmetric(rng, d, N)
        if backend != core.RATIONAL:
            A = A.astype(backend)
        ratio = complexity_ratio(d, N) if d >= 2 and N >= 2 else None
        rows = []
        for engine in engines:
            terms = term_count(engine, d, N)
            limit = contractor_budget if engine == "symmetric" else max_terms
            if terms > limit:
                rows.append(BenchRow(engine, d, N, None, None, None, terms,
                                     f"{terms} terms over limit {limit}", ratio))
                continue
            if engine == "naive":
                fn = lambda A=A: hdet_naive(A)
            else:
                if engine == "symmetric":
                    store.contractor(d, N, contractor_backend(A.backend),
                                     budget=contractor_budget)
                else:
                    store.epsilon_power(d, N, budget=max_terms)
                fn = lambda A=A, e=engine: evaluate(
                    A, e, store, levicivita_budget=max_terms,
                    contractor_budget=contractor_budget).value
            value = fn()
            nanos = time_call(fn, repeats, min_run)
            rows.append(BenchRow(engine, d, N, nanos, value, None, terms, None, ratio))
            if engine == "symmetric":
                sym_points.append((N, nanos))
        ran = [r for r in rows if r.skipped is None]
        for r in ran:
            r.agreed = all(_agree(r.value, o.value, backend) for o in ran)
        report.rows.extend(rows)
    if len(sym_points) >= 2:
        tail = sorted(sym_points)[-3:]
        report.symmetric_slope = loglog_slope([n for n, _ in tail], [t for _, t in tail])
    return report


def format_table(report: BenchReport) -> str:
    head = f"{'engine':<11} {'d':>2} {'N':>3} {'terms':>12} {'time/us':>12} {'agree':>6} {'log-ratio':>9} {'prior-art ops':>15}  value"
    lines = [head, "-" * len(head)]
    for r in report.rows:
        t = "skipped" if r.nanos is None else f"{r.nanos / 1e3:.2f}"
        ratio = "" if r.log_ratio is None else f"{r.log_ratio:+.3f}"
        agreed = "" if r.agreed is None else ("yes" if r.agreed else "NO")
        value = r.skipped if r.skipped else r.value
        lines.append(
            f"{r.engine:<11} {r.d:>2} {r.N:>3} {r.terms:>12} {t:>12} {agreed:>6} {ratio:>9} "
            f"{prior_art_cost(r.d, r.N):>15}  {value}"
        )
    if report.symmetric_slope is not None:
        lines.append(f"symmetric-fast log-log slope over the largest three N: {report.symmetric_slope:.3f}")
    lines.append("timings are from an uncontrolled machine; treat them as qualitative")
    return "\n".join(lines)

