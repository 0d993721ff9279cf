"""Random row-index generation for subsampled Fourier measurements.

Four schemes are supported:

- ``uniform``: m distinct indices, uniform without replacement.
- ``with_replacement``: m i.i.d. draws from a probability vector nu
  (repeats allowed, multiplicity expressed by repetition).
- ``without_replacement``: successive weighted sampling, i.e. draw from
  nu, remove the atom, renormalize, repeat m times.  Implemented via the
  exponential race: sorting E_j / nu_j with E_j i.i.d. standard
  exponential reproduces exactly that law.
- ``reweighted``: i.i.d. draws from nu until the m-th distinct atom
  appears, stopping at that draw; the pattern records the distinct atoms
  in first-appearance order, their multiplicities gamma, and the total
  draw count n = sum(gamma).

All samplers consume an integer seed and use numpy's default generator
(PCG64), so patterns are bit-reproducible for a fixed environment.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SCHEMES",
    "SamplingPattern",
    "AliasTable",
    "sample_uniform",
    "sample_with_replacement",
    "sample_without_replacement",
    "sample_reweighted",
    "expand_to_with_replacement",
    "pattern_to_text",
    "pattern_from_text",
    "save_pattern",
    "load_pattern",
]

SCHEMES = ("uniform", "with_replacement", "without_replacement", "reweighted")

# Block size floor for the reweighted sampler's draw-and-scan loop.
_MIN_BLOCK = 256


@dataclass(frozen=True)
class SamplingPattern:
    """Sampled row indices with multiplicities and provenance."""

    omega: np.ndarray
    gamma: np.ndarray
    n: int
    scheme: str
    seed: int

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=np.int64)
        gamma = np.asarray(self.gamma, dtype=np.int64)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "gamma", gamma)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if omega.ndim != 1 or omega.size == 0:
            raise ValueError("omega must be a nonempty index vector")
        if gamma.shape != omega.shape:
            raise ValueError("gamma must align with omega")
        if np.any(omega < 0):
            raise ValueError("negative index in omega")
        if np.any(gamma < 1):
            raise ValueError("multiplicities must be >= 1")
        if int(gamma.sum()) != self.n:
            raise ValueError("n must equal sum(gamma)")
        if self.scheme != "with_replacement":
            if np.unique(omega).size != omega.size:
                raise ValueError(f"scheme {self.scheme} requires distinct indices")
        if self.scheme != "reweighted" and np.any(gamma != 1):
            raise ValueError(f"scheme {self.scheme} requires unit multiplicities")

    @property
    def m(self) -> int:
        return int(self.omega.size)


class AliasTable:
    """Vose alias structure: O(N) build, O(1) per draw."""

    def __init__(self, probabilities):
        p = _validate_measure(probabilities)
        n = p.size
        scaled = p * n
        prob = np.ones(n)
        alias = np.arange(n)
        small = deque(np.flatnonzero(scaled < 1.0).tolist())
        large = deque(np.flatnonzero(scaled >= 1.0).tolist())
        while small and large:
            s = small.popleft()
            l = large.popleft()
            prob[s] = scaled[s]
            alias[s] = l
            scaled[l] += scaled[s] - 1.0
            if scaled[l] < 1.0:
                small.append(l)
            else:
                large.append(l)
        # leftovers are 1 up to rounding
        self._prob = prob
        self._alias = alias
        self._n = n

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.integers(0, self._n, size=size)
        accept = rng.random(size) < self._prob[idx]
        return np.where(accept, idx, self._alias[idx])


def _validate_measure(nu) -> np.ndarray:
    p = np.asarray(nu, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("nu must be a nonempty probability vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("nu entries must be finite and nonnegative")
    total = p.sum()
    if not np.isclose(total, 1.0, rtol=0, atol=1e-9):
        raise ValueError(f"nu must sum to 1, got {total!r}")
    return p / total


def _check_m(m: int, limit: int, what: str) -> int:
    m = int(m)
    if m < 1 or m > limit:
        raise ValueError(f"m={m} outside [1, {limit}] ({what})")
    return m


def sample_uniform(N: int, m: int, seed: int) -> SamplingPattern:
    """m distinct indices from [0, N), uniformly without replacement."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    m = _check_m(m, N, "uniform support")
    rng = np.random.default_rng(seed)
    omega = rng.permutation(N)[:m]
    return SamplingPattern(omega=omega, gamma=np.ones(m, dtype=np.int64), n=m, scheme="uniform", seed=int(seed))


def sample_with_replacement(nu, m: int, seed: int) -> SamplingPattern:
    """m i.i.d. draws from nu; repeats stay as repeated omega entries."""
    p = _validate_measure(nu)
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    omega = AliasTable(p).draw(rng, m)
    return SamplingPattern(
        omega=omega, gamma=np.ones(m, dtype=np.int64), n=m, scheme="with_replacement", seed=int(seed)
    )


def sample_without_replacement(nu, m: int, seed: int) -> SamplingPattern:
    """Successive weighted sampling: draw, remove, renormalize, m times.

    The exponential race realizes this law: atom j gets key E_j / nu_j
    with E_j standard exponential, and the m smallest keys in increasing
    order are distributed exactly as m successive draws.
    """
    p = _validate_measure(nu)
    support = int(np.count_nonzero(p))
    m = _check_m(m, support, "atoms with positive mass")
    rng = np.random.default_rng(seed)
    keys = np.full(p.size, np.inf)
    pos = p > 0
    keys[pos] = rng.exponential(size=support) / p[pos]
    winners = np.argpartition(keys, m - 1)[:m]
    omega = winners[np.argsort(keys[winners], kind="stable")]
    return SamplingPattern(
        omega=omega, gamma=np.ones(m, dtype=np.int64), n=m, scheme="without_replacement", seed=int(seed)
    )


def sample_reweighted(nu, m: int, seed: int) -> SamplingPattern:
    """Draw i.i.d. from nu until the m-th distinct atom appears.

    Stops at exactly the draw that reveals the m-th distinct atom, so the
    last atom in omega always has gamma = 1.  omega lists distinct atoms
    in first-appearance order; n counts every draw.
    """
    p = _validate_measure(nu)
    N = p.size
    support = int(np.count_nonzero(p))
    m = _check_m(m, support, "atoms with positive mass")
    rng = np.random.default_rng(seed)
    table = AliasTable(p)
    seen = np.zeros(N, dtype=bool)
    counts = np.zeros(N, dtype=np.int64)
    order: list[int] = []
    distinct = 0
    block = max(_MIN_BLOCK, 2 * m)
    while distinct < m:
        draws = table.draw(rng, block)
        uniq, first = np.unique(draws, return_index=True)
        fresh = ~seen[uniq]
        if distinct + int(np.count_nonzero(fresh)) >= m:
            # the (m - distinct)-th new atom inside this block stops the run
            stop = np.sort(first[fresh])[m - distinct - 1]
            draws = draws[: stop + 1]
            uniq, first = np.unique(draws, return_index=True)
            fresh = ~seen[uniq]
        appearance = np.argsort(first[fresh], kind="stable")
        order.extend(uniq[fresh][appearance].tolist())
        seen[uniq[fresh]] = True
        counts += np.bincount(draws, minlength=N)
        distinct += int(np.count_nonzero(fresh))
    omega = np.asarray(order, dtype=np.int64)
    gamma = counts[omega]
    return SamplingPattern(
        omega=omega, gamma=gamma, n=int(counts.sum()), scheme="reweighted", seed=int(seed)
    )


def expand_to_with_replacement(pattern: SamplingPattern) -> np.ndarray:
    """Length-n index multiset with each omega_i repeated gamma_i times."""
    return np.repeat(pattern.omega, pattern.gamma)


def pattern_to_text(pattern: SamplingPattern) -> str:
    """Three-line record: header (scheme seed m n), omega line, gamma line."""
    lines = [
        f"{pattern.scheme} {pattern.seed} {pattern.m} {pattern.n}",
        " ".join(str(int(i)) for i in pattern.omega),
        " ".join(str(int(g)) for g in pattern.gamma),
    ]
    return "\n".join(lines) + "\n"


def pattern_from_text(text: str) -> SamplingPattern:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 3:
        raise ValueError("pattern record must have header, omega, and gamma lines")
    scheme, seed, m, n = lines[0].split()
    omega = np.array([int(t) for t in lines[1].split()], dtype=np.int64)
    gamma = np.array([int(t) for t in lines[2].split()], dtype=np.int64)
    if omega.size != int(m):
        raise ValueError("omega length disagrees with header")
    return SamplingPattern(omega=omega, gamma=gamma, n=int(n), scheme=scheme, seed=int(seed))


def save_pattern(pattern: SamplingPattern, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(pattern_to_text(pattern))


def load_pattern(path: str) -> SamplingPattern:
    with open(path, "r", encoding="utf-8") as fh:
        return pattern_from_text(fh.read())
