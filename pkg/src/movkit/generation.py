"""Synthetic election generators for tests and experiments.

Three models:

* ImpartialCulture: every vote uniform over all m! rankings, i.i.d.;
* PlantedGap: a deterministic profile whose plurality score gap between the
  planted winner and the runner-up is exact, so the margin of victory is
  known in closed form;
* TwoCandidate: m = 2 with a prescribed fraction of a-first votes, the
  population family behind the sampling lower bound and the distinguisher.

Generation is deterministic given the model's seed. Ballot positions below
the top are filled in a fixed canonical order (ascending candidate index,
skipping the top candidate), which keeps generated profiles reproducible and
easy to analyze by hand.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from movkit.core import (
    ApprovalBallot,
    ApprovalProfile,
    InputError,
    RankedProfile,
    Ranking,
)


def _canonical_order(top: int, m: int) -> tuple[int, ...]:
    return (top,) + tuple(c for c in range(m) if c != top)


@dataclass(frozen=True)
class ImpartialCulture:
    """n i.i.d. uniformly random rankings of m candidates."""

    n: int
    m: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InputError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")


@dataclass(frozen=True)
class PlantedGap:
    """A profile with an exact plurality score gap.

    The planted winner gets ``gap`` more first places than the runner-up
    (the lowest-indexed other candidate); everyone else gets at most the
    runner-up's count. The construction is deterministic; ``seed`` is
    accepted for interface uniformity and ignored.
    """

    winner: int
    gap: int
    n: int
    m: int
    seed: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise InputError("a planted gap needs at least two candidates")
        if not 0 <= self.winner < self.m:
            raise InputError(f"winner {self.winner} out of range for m={self.m}")
        if not 1 <= self.gap <= self.n:
            raise InputError(f"gap must lie in [1, n], got gap={self.gap}, n={self.n}")


@dataclass(frozen=True)
class TwoCandidate:
    """m = 2 profile with floor(p*n) a-first votes and the rest b-first.

    Non-integral p*n rounds down; ``realized_top_fraction`` reports the
    fraction actually planted.
    """

    p: Fraction
    n: int
    seed: int = 0

    def __post_init__(self):
        p = Fraction(self.p)
        object.__setattr__(self, "p", p)
        if not 0 <= p <= 1:
            raise InputError(f"p must lie in [0, 1], got {p}")
        if self.n < 1:
            raise InputError(f"need n >= 1, got {self.n}")

    @property
    def top_count(self) -> int:
        return int(self.p * self.n)

    @property
    def realized_top_fraction(self) -> Fraction:
        return Fraction(self.top_count, self.n)


GenSpec = Union[ImpartialCulture, PlantedGap, TwoCandidate]


def _planted_counts(spec: PlantedGap) -> list[int]:
    """First-place counts per candidate realizing the exact plurality gap."""
    n, m, g = spec.n, spec.m, spec.gap
    if m == 2:
        if (n + g) % 2 != 0:
            raise InputError(
                f"gap {g} is unachievable with n={n} and m=2 (parity)"
            )
        top = (n + g) // 2
        counts = [0, 0]
        counts[spec.winner] = top
        counts[1 - spec.winner] = n - top
        return counts
    base = -((g - n) // m)  # ceil((n - g) / m)
    rest = n - 2 * base - g
    if rest < 0 or rest > (m - 2) * base:
        raise InputError(f"gap {g} is unachievable with n={n} and m={m}")
    others = [c for c in range(m) if c != spec.winner]
    counts = [0] * m
    counts[spec.winner] = base + g
    counts[others[0]] = base
    for c in others[1:]:
        take = min(base, rest)
        counts[c] = take
        rest -= take
    return counts


def generate(spec: GenSpec) -> RankedProfile:
    """Build the ranked profile a generation model describes."""
    if isinstance(spec, ImpartialCulture):
        rng = random.Random(spec.seed)
        votes = tuple(
            (Ranking(tuple(rng.sample(range(spec.m), spec.m))), 1)
            for _ in range(spec.n)
        )
        return RankedProfile(m=spec.m, votes=votes)
    if isinstance(spec, PlantedGap):
        counts = _planted_counts(spec)
        votes = tuple(
            (Ranking(_canonical_order(c, spec.m)), cnt)
            for c, cnt in enumerate(counts)
            if cnt > 0
        )
        return RankedProfile(m=spec.m, votes=votes)
    if isinstance(spec, TwoCandidate):
        a_count = spec.top_count
        votes = []
        if a_count > 0:
            votes.append((Ranking((0, 1)), a_count))
        if spec.n - a_count > 0:
            votes.append((Ranking((1, 0)), spec.n - a_count))
        return RankedProfile(m=2, votes=tuple(votes))
    raise InputError(f"unknown generation model: {spec!r}")


def ranked_to_approval(
    profile: RankedProfile,
    k: Union[int, str] = "uniform",
    seed: int = 0,
) -> ApprovalProfile:
    """Approval profile from a ranked one by approving top-k prefixes.

    ``k`` is either a fixed depth in [0, m] or "uniform", which draws an
    independent depth uniformly from 0..m for every ballot (deterministic
    per seed, iterating ballots in canonical profile order).
    """
    m = profile.m
    if isinstance(k, str):
        if k != "uniform":
            raise InputError(f'k must be an integer or "uniform", got {k!r}')
        rng = random.Random(seed)
        depths = [rng.randint(0, m) for _ in range(profile.n)]
    else:
        if not 0 <= k <= m:
            raise InputError(f"k must lie in [0, m], got k={k}, m={m}")
        depths = [k] * profile.n
    votes = tuple(
        (ApprovalBallot(ballot.prefix(depth)), 1)
        for ballot, depth in zip(profile.expand(), depths)
    )
    return ApprovalProfile(m=m, votes=votes, names=profile.names)
