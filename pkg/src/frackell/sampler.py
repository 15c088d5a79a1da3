"""Monte Carlo draws of event counts by inverting the tabulated CDF."""
from __future__ import annotations

import decimal
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DomainError
from .poisson import DistributionTable, PmfParams, adaptive_pmf_table, pmf_table
from .precision import DEFAULT_DIGITS, PrecReal, working_context

RNG_ALGORITHM = "numpy PCG64, SeedSequence(seed).spawn per block of 65536 draws, float64 uniforms"
BLOCK_SIZE = 65536
MAX_TAIL = Decimal("1e-8")
MAX_MOMENT_ORDER = 6


@dataclass(frozen=True, eq=False)
class SampleRun:
    params: PmfParams
    count: int
    seed: int
    samples: np.ndarray
    table: DistributionTable

    @property
    def frequencies(self) -> np.ndarray:
        """Occurrences of each n = 0..table.n_max."""
        return np.bincount(self.samples, minlength=self.table.n_max + 1)


def _cdf(table: DistributionTable) -> np.ndarray:
    with decimal.localcontext(working_context(DEFAULT_DIGITS)):
        acc = Decimal(0)
        out = []
        for m in table.masses:
            acc += m.value
            out.append(float(acc))
    return np.array(out)


def _draw_block(cdf: np.ndarray, seed_seq: np.random.SeedSequence, size: int) -> np.ndarray:
    u = np.random.Generator(np.random.PCG64(seed_seq)).random(size)
    idx = np.searchsorted(cdf, u, side="right")
    # u beyond the last cumulative sum falls in the truncated tail; it lands on n_max
    return np.minimum(idx, len(cdf) - 1)


def sample_counts(
    params: PmfParams,
    count: int,
    seed: int,
    n_max: int | None = None,
    workers: int = 1,
) -> SampleRun:
    """Draw ``count`` event counts from P_mu(n, t).

    With ``n_max`` omitted, the table is grown until its tail bound is at
    most 1e-8. Draws are made in fixed blocks, each with its own spawned
    seed, so the result does not depend on ``workers``.
    """
    if not isinstance(count, int) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    if n_max is None:
        table = adaptive_pmf_table(params, tail_tol=MAX_TAIL)
    else:
        table = pmf_table(params, n_max)
        if table.tail_bound > MAX_TAIL:
            raise CapacityError(
                f"tail bound {table.tail_bound} exceeds {MAX_TAIL} at n_max={n_max}; use a larger n_max"
            )
    cdf = _cdf(table)
    n_blocks = -(-count // BLOCK_SIZE)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = [min(BLOCK_SIZE, count - i * BLOCK_SIZE) for i in range(n_blocks)]
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _draw_block(cdf, *a), zip(children, sizes)))
    else:
        parts = [_draw_block(cdf, c, s) for c, s in zip(children, sizes)]
    samples = np.concatenate(parts).astype(np.int64)
    return SampleRun(params, count, seed, samples, table)


def _raw_moments(run: SampleRun, m_max: int) -> list[Fraction]:
    freq = run.frequencies
    out = []
    for m in range(m_max + 1):
        total = sum(int(c) * n**m for n, c in enumerate(freq) if c)
        out.append(Fraction(total, run.count))
    return out


def empirical_moments(run: SampleRun, m_max: int, precision: int = DEFAULT_DIGITS) -> list[PrecReal]:
    """(1/count) sum samples^m for m = 0..m_max, computed exactly then rounded."""
    if not isinstance(m_max, int) or not 0 <= m_max <= MAX_MOMENT_ORDER:
        raise DomainError(f"m_max must be an integer in [0, {MAX_MOMENT_ORDER}], got {m_max!r}")
    out = []
    for f in _raw_moments(run, m_max):
        with decimal.localcontext(working_context(precision + 5)):
            v = Decimal(f.numerator) / f.denominator
        out.append(PrecReal.rounded(v, precision))
    return out


def moment_standard_errors(run: SampleRun, m_max: int) -> list[float]:
    """Standard error of each raw-moment estimate, from the sample itself."""
    if not isinstance(m_max, int) or not 0 <= m_max <= MAX_MOMENT_ORDER:
        raise DomainError(f"m_max must be an integer in [0, {MAX_MOMENT_ORDER}], got {m_max!r}")
    raw = _raw_moments(run, 2 * m_max)
    out = []
    for m in range(m_max + 1):
        var = raw[2 * m] - raw[m] ** 2
        out.append(math.sqrt(float(var) / run.count) if var > 0 else 0.0)
    return out
