"""Ballots, profiles, voting rules, and winner determination.

Candidates are integers ``0..m-1``. Profiles store a multiset of distinct
ballots with positive multiplicities, canonically sorted so that equal
multisets compare equal. Scores are exact: integers where possible,
`fractions.Fraction` otherwise. Whenever a rule needs a single representative
winner, the canonical tie-break is the lowest candidate index.

Six rule families are supported: positional scoring, k-approval, approval,
Bucklin (strict majority, more than half of the votes), maximin, and
Copeland with tie parameter alpha.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union


class InputError(ValueError):
    """Invalid election data, rule parameters, or argument combination."""


# ---------------------------------------------------------------------------
# ballots


@dataclass(frozen=True, slots=True)
class Ranking:
    """A strict total order over candidates, most preferred first."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(len(order))):
            raise InputError(f"not a permutation of 0..{len(order) - 1}: {order!r}")

    @property
    def m(self) -> int:
        return len(self.order)

    def position(self, candidate: int) -> int:
        """1-based position of a candidate in this ranking."""
        return self.order.index(candidate) + 1

    def prefix(self, k: int) -> frozenset[int]:
        return frozenset(self.order[:k])


@dataclass(frozen=True, slots=True)
class ApprovalBallot:
    """A set of approved candidates; empty and full sets are both legal."""

    approved: frozenset[int]

    def __post_init__(self):
        approved = frozenset(self.approved)
        object.__setattr__(self, "approved", approved)
        if any(not isinstance(c, int) or c < 0 for c in approved):
            raise InputError(f"approval ballot must contain candidate indices: {approved!r}")

    def sort_key(self) -> tuple[int, ...]:
        return tuple(sorted(self.approved))


Ballot = Union[Ranking, ApprovalBallot]


def _validate_names(names, m):
    if names is None:
        return None
    names = tuple(names)
    if len(names) != m:
        raise InputError(f"expected {m} candidate names, got {len(names)}")
    seen = set()
    for name in names:
        if not name or not all(ch.isalnum() or ch in "_.-" for ch in name):
            raise InputError(f"bad candidate name {name!r}")
        if name in seen:
            raise InputError(f"duplicate candidate name {name!r}")
        seen.add(name)
    return names


@dataclass(frozen=True)
class RankedProfile:
    """A multiset of rankings over m candidates.

    ``votes`` is canonicalised on construction: duplicates merged, entries
    sorted by ballot order. ``names`` optionally labels candidates for I/O.
    """

    m: int
    votes: tuple[tuple[Ranking, int], ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.m < 1:
            raise InputError("profile needs at least one candidate")
        merged: Counter[Ranking] = Counter()
        for ballot, mult in self.votes:
            if not isinstance(ballot, Ranking):
                ballot = Ranking(tuple(ballot))
            if ballot.m != self.m:
                raise InputError(f"ballot {ballot.order!r} does not rank all {self.m} candidates")
            if not isinstance(mult, int) or mult < 1:
                raise InputError(f"multiplicity must be a positive integer, got {mult!r}")
            merged[ballot] += mult
        if not merged:
            raise InputError("profile must contain at least one vote")
        canonical = tuple(sorted(merged.items(), key=lambda kv: kv[0].order))
        object.__setattr__(self, "votes", canonical)
        object.__setattr__(self, "names", _validate_names(self.names, self.m))

    @property
    def n(self) -> int:
        return sum(mult for _, mult in self.votes)

    def expand(self) -> list[Ranking]:
        """All n ballots individually, in canonical order (stable indexing)."""
        out: list[Ranking] = []
        for ballot, mult in self.votes:
            out.extend([ballot] * mult)
        return out


@dataclass(frozen=True)
class ApprovalProfile:
    """A multiset of approval ballots over m candidates."""

    m: int
    votes: tuple[tuple[ApprovalBallot, int], ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.m < 1:
            raise InputError("profile needs at least one candidate")
        merged: Counter[ApprovalBallot] = Counter()
        for ballot, mult in self.votes:
            if not isinstance(ballot, ApprovalBallot):
                ballot = ApprovalBallot(frozenset(ballot))
            if any(c >= self.m for c in ballot.approved):
                raise InputError(f"ballot approves unknown candidate: {sorted(ballot.approved)!r}")
            if not isinstance(mult, int) or mult < 1:
                raise InputError(f"multiplicity must be a positive integer, got {mult!r}")
            merged[ballot] += mult
        if not merged:
            raise InputError("profile must contain at least one vote")
        canonical = tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_key()))
        object.__setattr__(self, "votes", canonical)
        object.__setattr__(self, "names", _validate_names(self.names, self.m))

    @property
    def n(self) -> int:
        return sum(mult for _, mult in self.votes)

    def expand(self) -> list[ApprovalBallot]:
        out: list[ApprovalBallot] = []
        for ballot, mult in self.votes:
            out.extend([ballot] * mult)
        return out


Profile = Union[RankedProfile, ApprovalProfile]


# ---------------------------------------------------------------------------
# score vectors


def _fractions(values) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InputError(f"score entries must be rationals: {values!r}") from exc


@dataclass(frozen=True)
class ScoreVector:
    """Per-position scores for a positional scoring rule.

    Entries must be non-increasing with a strictly larger first entry than
    last; this rules out constant vectors and single-candidate vectors.
    """

    alphas: tuple[Fraction, ...]

    def __post_init__(self):
        alphas = _fractions(self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if len(alphas) < 2:
            raise InputError("score vector needs at least two positions")
        if any(a < b for a, b in zip(alphas, alphas[1:])):
            raise InputError(f"score vector must be non-increasing: {alphas!r}")
        if alphas[0] == alphas[-1]:
            raise InputError("constant score vector does not define a rule")

    @property
    def m(self) -> int:
        return len(self.alphas)

    @property
    def alpha1(self) -> Fraction:
        return self.alphas[0]

    @property
    def is_normalized(self) -> bool:
        """Last entry zero, and a unit step down to the trailing zero block."""
        if self.alphas[-1] != 0:
            return False
        j = max(i for i, a in enumerate(self.alphas) if a > 0)
        return self.alphas[j] == 1

    def normalized(self) -> "ScoreVector":
        return normalize_score_vector(self.alphas)

    @classmethod
    def borda(cls, m: int) -> "ScoreVector":
        return cls(tuple(Fraction(m - 1 - i) for i in range(m)))

    @classmethod
    def k_approval(cls, m: int, k: int) -> "ScoreVector":
        if not 1 <= k <= m - 1:
            raise InputError(f"k must be in [1, m-1], got k={k}, m={m}")
        return cls(tuple(Fraction(1) if i < k else Fraction(0) for i in range(m)))

    @classmethod
    def plurality(cls, m: int) -> "ScoreVector":
        return cls.k_approval(m, 1)


def normalize_score_vector(raw: Sequence) -> ScoreVector:
    """Shift and rescale a score vector to its canonical normalized form.

    Subtracts the last entry, then divides by the value of the last strictly
    positive entry, so the result ends in zero and steps down by exactly one
    into its trailing zero block. Winner sets are unchanged by this affine
    rescaling. Constant vectors are rejected.
    """
    values = _fractions(raw)
    if len(values) < 2:
        raise InputError("score vector needs at least two positions")
    if any(a < b for a, b in zip(values, values[1:])):
        raise InputError(f"score vector must be non-increasing: {values!r}")
    shift = values[-1]
    shifted = tuple(v - shift for v in values)
    positives = [v for v in shifted if v > 0]
    if not positives:
        raise InputError("constant score vector does not define a rule")
    scale = positives[-1]
    return ScoreVector(tuple(v / scale for v in shifted))


# ---------------------------------------------------------------------------
# rules


class Rule:
    """Marker base class for voting rules."""

    kind: str = ""


@dataclass(frozen=True)
class Scoring(Rule):
    vector: ScoreVector
    kind = "scoring"


@dataclass(frozen=True)
class KApproval(Rule):
    k: int
    kind = "kapproval"

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InputError(f"k must be a positive integer, got {self.k!r}")


@dataclass(frozen=True)
class Approval(Rule):
    kind = "approval"


@dataclass(frozen=True)
class Bucklin(Rule):
    kind = "bucklin"


@dataclass(frozen=True)
class Maximin(Rule):
    kind = "maximin"


@dataclass(frozen=True)
class Copeland(Rule):
    alpha: Fraction = Fraction(1, 2)
    kind = "copeland"

    def __post_init__(self):
        try:
            alpha = Fraction(self.alpha)
        except (TypeError, ValueError) as exc:
            raise InputError(f"copeland alpha must be rational: {self.alpha!r}") from exc
        object.__setattr__(self, "alpha", alpha)
        if not 0 <= alpha <= 1:
            raise InputError(f"copeland alpha must lie in [0, 1], got {alpha}")


# ---------------------------------------------------------------------------
# tallies


def positional_scores(profile: RankedProfile, vector: ScoreVector) -> dict[int, Fraction]:
    """Total positional score of every candidate under the given vector."""
    _require_ranked(profile)
    if vector.m != profile.m:
        raise InputError(f"score vector has {vector.m} entries for {profile.m} candidates")
    scores = {c: Fraction(0) for c in range(profile.m)}
    for ballot, mult in profile.votes:
        for pos, cand in enumerate(ballot.order):
            scores[cand] += mult * vector.alphas[pos]
    return scores


def approval_scores(profile: ApprovalProfile) -> dict[int, int]:
    """Number of ballots approving each candidate."""
    _require_approval(profile)
    scores = {c: 0 for c in range(profile.m)}
    for ballot, mult in profile.votes:
        for cand in ballot.approved:
            scores[cand] += mult
    return scores


def top_k_counts(profile: RankedProfile) -> tuple[tuple[int, ...], ...]:
    """Counts of votes placing each candidate within the top-k positions.

    Returns a tuple of rows, one per candidate; row ``x`` has entry
    ``counts[x][k-1]`` = number of votes ranking ``x`` within its first
    ``k`` positions, for k = 1..m. Rows are non-decreasing and end at n.
    """
    _require_ranked(profile)
    m = profile.m
    at_pos = [[0] * m for _ in range(m)]
    for ballot, mult in profile.votes:
        for pos, cand in enumerate(ballot.order):
            at_pos[cand][pos] += mult
    rows = []
    for x in range(m):
        running = 0
        row = []
        for pos in range(m):
            running += at_pos[x][pos]
            row.append(running)
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class PairwiseMatrix:
    """Antisymmetric pairwise margins: d[x][y] = #(x above y) - #(y above x)."""

    d: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        d = tuple(tuple(row) for row in self.d)
        object.__setattr__(self, "d", d)
        m = len(d)
        if any(len(row) != m for row in d):
            raise InputError("pairwise matrix must be square")
        for x in range(m):
            if d[x][x] != 0:
                raise InputError("pairwise diagonal must be zero")
            for y in range(m):
                if d[x][y] != -d[y][x]:
                    raise InputError("pairwise matrix must be antisymmetric")
                if x != y and (abs(d[x][y]) > self.n or (d[x][y] - self.n) % 2 != 0):
                    raise InputError(
                        f"pairwise entry {d[x][y]} impossible with n={self.n} votes"
                    )

    @property
    def m(self) -> int:
        return len(self.d)

    def __getitem__(self, pair: tuple[int, int]) -> int:
        x, y = pair
        return self.d[x][y]


def pairwise_matrix(profile: RankedProfile) -> PairwiseMatrix:
    """Pairwise margin matrix of a ranked profile."""
    _require_ranked(profile)
    m = profile.m
    above = [[0] * m for _ in range(m)]
    for ballot, mult in profile.votes:
        order = ballot.order
        for i in range(m):
            for j in range(i + 1, m):
                above[order[i]][order[j]] += mult
    d = tuple(
        tuple(above[x][y] - above[y][x] for y in range(m)) for x in range(m)
    )
    return PairwiseMatrix(d=d, n=profile.n)


def bucklin_scores(profile: RankedProfile) -> dict[int, int]:
    """Smallest k at which each candidate is ranked in the top k positions
    by strictly more than half of the votes. Always exists since every
    candidate appears within the top m positions of every vote.
    """
    counts = top_k_counts(profile)
    n = profile.n
    scores = {}
    for x in range(profile.m):
        scores[x] = next(k + 1 for k in range(profile.m) if 2 * counts[x][k] > n)
    return scores


def maximin_scores(profile: RankedProfile) -> dict[int, int]:
    """Worst pairwise margin of each candidate against any rival."""
    _require_ranked(profile)
    if profile.m == 1:
        return {0: 0}
    d = pairwise_matrix(profile).d
    return {
        x: min(d[x][y] for y in range(profile.m) if y != x) for x in range(profile.m)
    }


def copeland_scores(profile: RankedProfile, alpha: Fraction) -> dict[int, Fraction]:
    """Pairwise wins plus alpha credit per pairwise tie, for each candidate."""
    _require_ranked(profile)
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise InputError(f"copeland alpha must lie in [0, 1], got {alpha}")
    d = pairwise_matrix(profile).d
    scores = {}
    for x in range(profile.m):
        wins = sum(1 for y in range(profile.m) if y != x and d[x][y] > 0)
        ties = sum(1 for y in range(profile.m) if y != x and d[x][y] == 0)
        scores[x] = wins + alpha * ties
    return scores


# ---------------------------------------------------------------------------
# winners


@dataclass(frozen=True)
class WinnerResult:
    """Winning candidates (ascending) plus the per-candidate scores used."""

    winners: tuple[int, ...]
    scores: Mapping[int, Fraction | int]


def _argmax_set(scores: Mapping[int, Fraction | int]) -> tuple[int, ...]:
    best = max(scores.values())
    return tuple(c for c in sorted(scores) if scores[c] == best)


def top_two(scores: Mapping[int, Fraction | int]) -> tuple[int, int]:
    """Highest and second-highest scoring candidates, ties broken by lowest
    index. Requires at least two candidates."""
    if len(scores) < 2:
        raise InputError("need at least two candidates to pick a top two")
    ordered = sorted(scores, key=lambda c: (-scores[c], c))
    return ordered[0], ordered[1]


def winner_set(profile: Profile, rule: Rule) -> WinnerResult:
    """Winner set of a profile under a rule.

    Approval rules require approval profiles and vice versa; every other
    rule requires a ranked profile. The winner set is never empty.
    """
    if isinstance(rule, Approval):
        scores = approval_scores(profile)
        return WinnerResult(_argmax_set(scores), scores)
    if isinstance(rule, Scoring):
        scores = positional_scores(profile, rule.vector)
        return WinnerResult(_argmax_set(scores), scores)
    if isinstance(rule, KApproval):
        _require_ranked(profile)
        if rule.k > profile.m - 1:
            raise InputError(f"k-approval needs k <= m-1, got k={rule.k}, m={profile.m}")
        vector = ScoreVector.k_approval(profile.m, rule.k)
        scores = {c: int(s) for c, s in positional_scores(profile, vector).items()}
        return WinnerResult(_argmax_set(scores), scores)
    if isinstance(rule, Bucklin):
        scores = bucklin_scores(profile)
        best = min(scores.values())
        winners = tuple(c for c in sorted(scores) if scores[c] == best)
        return WinnerResult(winners, scores)
    if isinstance(rule, Maximin):
        scores = maximin_scores(profile)
        return WinnerResult(_argmax_set(scores), scores)
    if isinstance(rule, Copeland):
        scores = copeland_scores(profile, rule.alpha)
        return WinnerResult(_argmax_set(scores), scores)
    raise InputError(f"unknown rule: {rule!r}")


def _require_ranked(profile) -> None:
    if not isinstance(profile, RankedProfile):
        raise InputError("this operation needs a ranked profile")


def _require_approval(profile) -> None:
    if not isinstance(profile, ApprovalProfile):
        raise InputError("this operation needs an approval profile")


def ranked_profile(m: int, votes: Iterable[tuple[Sequence[int], int]], names=None) -> RankedProfile:
    """Convenience constructor accepting plain tuples as ballots."""
    return RankedProfile(
        m=m, votes=tuple((Ranking(tuple(b)), mult) for b, mult in votes), names=names
    )


def approval_profile(m: int, votes: Iterable[tuple[Iterable[int], int]], names=None) -> ApprovalProfile:
    """Convenience constructor accepting plain iterables as ballots."""
    return ApprovalProfile(
        m=m, votes=tuple((ApprovalBallot(frozenset(b)), mult) for b, mult in votes), names=names
    )
