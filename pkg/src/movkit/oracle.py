"""Exact margin of victory and scale-free sandwich bounds.

The margin of victory (MoV) of an election is the minimum number of votes
that must be *replaced* to change the winner set. Set semantics throughout:
moving from {w} to {w, x} counts as a change, so MoV >= 1 and creating a tie
is enough.

Three layers live here:

* an exhaustive brute-force oracle (iterative deepening over how many votes
  change), the trusted ground truth at small scale;
* polynomial-time structural quantities: score gaps, the Bucklin level gap
  and change floor, and the pairwise relative margin;
* sandwich bounds built from those quantities, valid at any profile size.

Infinite quantities use the ``math.inf`` sentinel.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from movkit.core import (
    Approval,
    ApprovalBallot,
    ApprovalProfile,
    Bucklin,
    Copeland,
    InputError,
    KApproval,
    Maximin,
    PairwiseMatrix,
    Profile,
    RankedProfile,
    Ranking,
    Rule,
    Scoring,
    approval_scores,
    bucklin_scores,
    maximin_scores,
    pairwise_matrix,
    top_k_counts,
    top_two,
    winner_set,
)

DEFAULT_WORK_LIMIT = 5_000_000


class WorkLimitError(RuntimeError):
    """Brute-force search exceeded its evaluation budget (a resource guard,
    not a statement about the margin itself)."""


class TiedWinnersError(ValueError):
    """A closed form that presumes a unique winner was given a tied profile."""


# ---------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class ExactMovResult:
    """Outcome of the brute-force search.

    ``value`` is the exact margin when found within ``budget`` changed votes,
    else None. ``witness`` realizes the change: (vote index, replacement
    ballot) pairs, indices into ``profile.expand()``.
    """

    value: int | None
    budget: int
    witness: tuple[tuple[int, Union[Ranking, ApprovalBallot]], ...] | None
    evaluations: int

    @property
    def is_exact(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class MovBounds:
    """A validated sandwich lower <= MoV <= upper.

    ``upper`` may be ``math.inf`` (Bucklin profiles where no vote change can
    dislodge the winner through the level-gap argument). ``source`` names the
    argument that produced the bounds.
    """

    lower: Fraction
    upper: Union[Fraction, float]
    source: str

    def __post_init__(self):
        lower = Fraction(self.lower)
        upper = self.upper if self.upper == math.inf else Fraction(self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower < 0:
            raise InputError(f"lower bound must be non-negative, got {lower}")
        if not upper > 0:
            raise InputError(f"upper bound must be positive, got {upper}")
        if lower > upper:
            raise InputError(f"bounds out of order: {lower} > {upper}")


# ---------------------------------------------------------------------------
# incremental tally engines for the brute force
#
# Each engine holds integer tallies for one (profile, rule) pair, supports
# add(ballot, sign) to retract or insert one ballot, and reports the current
# winner set as a bitmask. Raw ballot forms (order tuples, frozensets) keep
# the inner loop cheap.


class _ScoringEngine:
    def __init__(self, profile: RankedProfile, weights: Sequence[int]):
        self.weights = tuple(weights)
        self.m = profile.m
        self.score = [0] * profile.m
        for ballot, mult in profile.votes:
            for pos, cand in enumerate(ballot.order):
                self.score[cand] += mult * self.weights[pos]

    def add(self, order, sign: int) -> None:
        for pos, cand in enumerate(order):
            self.score[cand] += sign * self.weights[pos]

    def winner_mask(self) -> int:
        best = max(self.score)
        mask = 0
        for cand in range(self.m):
            if self.score[cand] == best:
                mask |= 1 << cand
        return mask


class _ApprovalEngine:
    def __init__(self, profile: ApprovalProfile):
        self.m = profile.m
        self.score = [0] * profile.m
        for ballot, mult in profile.votes:
            for cand in ballot.approved:
                self.score[cand] += mult

    def add(self, approved, sign: int) -> None:
        for cand in approved:
            self.score[cand] += sign

    def winner_mask(self) -> int:
        best = max(self.score)
        mask = 0
        for cand in range(self.m):
            if self.score[cand] == best:
                mask |= 1 << cand
        return mask


class _BucklinEngine:
    def __init__(self, profile: RankedProfile):
        self.m = profile.m
        self.n = profile.n
        self.at_pos = [[0] * profile.m for _ in range(profile.m)]
        for ballot, mult in profile.votes:
            for pos, cand in enumerate(ballot.order):
                self.at_pos[cand][pos] += mult

    def add(self, order, sign: int) -> None:
        for pos, cand in enumerate(order):
            self.at_pos[cand][pos] += sign

    def winner_mask(self) -> int:
        cum = [0] * self.m
        for level in range(self.m):
            mask = 0
            for cand in range(self.m):
                cum[cand] += self.at_pos[cand][level]
                if 2 * cum[cand] > self.n:
                    mask |= 1 << cand
            if mask:
                return mask
        raise AssertionError("every candidate reaches a majority by the last level")


class _PairwiseEngine:
    """Shared base for rules scored off the pairwise comparison matrix."""

    def __init__(self, profile: RankedProfile):
        self.m = profile.m
        self.above = [[0] * profile.m for _ in range(profile.m)]
        for ballot, mult in profile.votes:
            order = ballot.order
            for i in range(profile.m):
                for j in range(i + 1, profile.m):
                    self.above[order[i]][order[j]] += mult

    def add(self, order, sign: int) -> None:
        for i in range(self.m):
            for j in range(i + 1, self.m):
                self.above[order[i]][order[j]] += sign

    def _mask_of_best(self, scores) -> int:
        best = max(scores)
        mask = 0
        for cand in range(self.m):
            if scores[cand] == best:
                mask |= 1 << cand
        return mask


class _MaximinEngine(_PairwiseEngine):
    def winner_mask(self) -> int:
        above = self.above
        scores = [
            min(above[x][y] - above[y][x] for y in range(self.m) if y != x)
            for x in range(self.m)
        ]
        return self._mask_of_best(scores)


class _CopelandEngine(_PairwiseEngine):
    def __init__(self, profile: RankedProfile, alpha: Fraction):
        super().__init__(profile)
        # score q*wins + p*ties is an integer proxy for wins + (p/q)*ties
        self.tie_num = alpha.numerator
        self.tie_den = alpha.denominator

    def winner_mask(self) -> int:
        above = self.above
        scores = []
        for x in range(self.m):
            wins = ties = 0
            for y in range(self.m):
                if y == x:
                    continue
                diff = above[x][y] - above[y][x]
                if diff > 0:
                    wins += 1
                elif diff == 0:
                    ties += 1
            scores.append(self.tie_den * wins + self.tie_num * ties)
        return self._mask_of_best(scores)


def _integer_weights(vector) -> tuple[int, ...]:
    scale = math.lcm(*(a.denominator for a in vector.alphas))
    return tuple(int(a * scale) for a in vector.alphas)


def _make_engine(profile: Profile, rule: Rule):
    """Engine plus the raw expanded ballots and the replacement universe."""
    if isinstance(rule, Approval):
        if not isinstance(profile, ApprovalProfile):
            raise InputError("approval rule needs an approval profile")
        engine = _ApprovalEngine(profile)
        raw = [b.approved for b in profile.expand()]
        universe = [
            frozenset(c for c in range(profile.m) if mask >> c & 1)
            for mask in range(2 ** profile.m)
        ]
        wrap = ApprovalBallot
        return engine, raw, universe, wrap
    if not isinstance(profile, RankedProfile):
        raise InputError("this rule needs a ranked profile")
    if isinstance(rule, Scoring):
        if rule.vector.m != profile.m:
            raise InputError(
                f"score vector has {rule.vector.m} entries for {profile.m} candidates"
            )
        engine = _ScoringEngine(profile, _integer_weights(rule.vector))
    elif isinstance(rule, KApproval):
        if rule.k > profile.m - 1:
            raise InputError(f"k-approval needs k <= m-1, got k={rule.k}, m={profile.m}")
        engine = _ScoringEngine(
            profile, [1] * rule.k + [0] * (profile.m - rule.k)
        )
    elif isinstance(rule, Bucklin):
        engine = _BucklinEngine(profile)
    elif isinstance(rule, Maximin):
        engine = _MaximinEngine(profile)
    elif isinstance(rule, Copeland):
        engine = _CopelandEngine(profile, rule.alpha)
    else:
        raise InputError(f"unknown rule: {rule!r}")
    raw = [b.order for b in profile.expand()]
    universe = list(itertools.permutations(range(profile.m)))
    wrap = Ranking
    return engine, raw, universe, wrap


def mov_brute_force(
    profile: Profile,
    rule: Rule,
    budget: int,
    work_limit: int = DEFAULT_WORK_LIMIT,
) -> ExactMovResult:
    """Exact margin of victory by iterative deepening, up to ``budget`` changes.

    For t = 1, 2, ..., budget, tries every size-t set of vote indices and
    every tuple of replacement ballots (all rankings, or all approval sets),
    skipping replacements identical to the original vote. The first change of
    the winner set fixes the margin; deepening guarantees minimality, and the
    witness is the first hit in deterministic enumeration order (index sets
    lexicographic, replacements in ranking/subset order).

    Returns ``value=None`` when no change within the budget flips the winner
    set. Raises WorkLimitError once more than ``work_limit`` candidate
    modifications have been scored.
    """
    if profile.m < 2:
        raise InputError("margin of victory needs at least two candidates")
    if budget < 1:
        raise InputError(f"budget must be at least 1, got {budget}")
    engine, raw, universe, wrap = _make_engine(profile, rule)
    base_mask = engine.winner_mask()
    n = len(raw)
    options = [[u for u in universe if u != raw[i]] for i in range(n)]
    evaluations = 0
    for t in range(1, min(budget, n) + 1):
        for combo in itertools.combinations(range(n), t):
            originals = [raw[i] for i in combo]
            for replacement in itertools.product(*(options[i] for i in combo)):
                evaluations += 1
                if evaluations > work_limit:
                    raise WorkLimitError(
                        f"exceeded work limit of {work_limit} evaluations"
                    )
                for old, new in zip(originals, replacement):
                    engine.add(old, -1)
                    engine.add(new, +1)
                changed = engine.winner_mask() != base_mask
                for old, new in zip(originals, replacement):
                    engine.add(new, -1)
                    engine.add(old, +1)
                if changed:
                    witness = tuple(
                        (i, wrap(r)) for i, r in zip(combo, replacement)
                    )
                    return ExactMovResult(
                        value=t, budget=budget, witness=witness, evaluations=evaluations
                    )
    return ExactMovResult(value=None, budget=budget, witness=None, evaluations=evaluations)


def apply_changes(
    profile: Profile,
    changes: Sequence[tuple[int, Union[Ranking, ApprovalBallot]]],
) -> Profile:
    """Replace the votes at the given expanded indices, returning a new profile.

    Indices refer to ``profile.expand()`` order and must be distinct; this is
    the format of ``ExactMovResult.witness``.
    """
    expanded = profile.expand()
    seen: set[int] = set()
    for index, ballot in changes:
        if not 0 <= index < len(expanded):
            raise InputError(f"vote index {index} out of range 0..{len(expanded) - 1}")
        if index in seen:
            raise InputError(f"vote index {index} changed twice")
        seen.add(index)
        if isinstance(profile, RankedProfile):
            if not isinstance(ballot, Ranking) or ballot.m != profile.m:
                raise InputError(f"replacement {ballot!r} is not a ranking of {profile.m}")
        else:
            if not isinstance(ballot, ApprovalBallot):
                raise InputError(f"replacement {ballot!r} is not an approval ballot")
            if any(c >= profile.m for c in ballot.approved):
                raise InputError(f"replacement approves unknown candidate: {ballot!r}")
        expanded[index] = ballot
    votes = tuple((b, 1) for b in expanded)
    if isinstance(profile, RankedProfile):
        return RankedProfile(m=profile.m, votes=votes, names=profile.names)
    return ApprovalProfile(m=profile.m, votes=votes, names=profile.names)


# ---------------------------------------------------------------------------
# closed forms and structural quantities


def _gap_closed_form(scores) -> int:
    w, z = top_two(scores)
    gap = scores[w] - scores[z]
    if gap == 0:
        raise TiedWinnersError(
            "closed form applies only to a unique winner; use brute force"
        )
    return (gap + 1) // 2


def mov_kapproval_closed_form(profile: RankedProfile, k: int) -> int:
    """Exact k-approval margin for a unique winner: ceil(gap / 2).

    The margin M satisfies 2(M - 1) < gap <= 2M, so ceil(gap / 2) is the only
    integer candidate. Raises TiedWinnersError when the top score is shared.
    """
    result = winner_set(profile, KApproval(k))
    return _gap_closed_form(result.scores)


def mov_approval_closed_form(profile: ApprovalProfile) -> int:
    """Exact approval margin for a unique winner: ceil(gap / 2).

    Same two-sided argument as k-approval, applied to approval scores.
    """
    result = winner_set(profile, Approval())
    return _gap_closed_form(result.scores)


def bucklin_gap(profile: RankedProfile) -> Union[int, float]:
    """Upper-bound quantity for the Bucklin margin.

    Minimum of n_l(w) - n_l(x) + 1 over levels l in 1..m-1 where the
    canonical winner w holds a strict majority and some x != w does not.
    Changing that many votes (moving x up, w down) hands x a strictly earlier
    majority, so the value bounds the margin from above. Returns ``math.inf``
    when no level qualifies (then this argument gives no finite bound).
    """
    counts = top_k_counts(profile)
    scores = bucklin_scores(profile)
    best_level = min(scores.values())
    w = min(c for c, s in scores.items() if s == best_level)
    n = profile.n
    best: Union[int, float] = math.inf
    for level in range(1, profile.m):
        if 2 * counts[w][level - 1] > n:
            for x in range(profile.m):
                if x != w and 2 * counts[x][level - 1] <= n:
                    best = min(best, counts[w][level - 1] - counts[x][level - 1] + 1)
    return best


def bucklin_change_floor(profile: RankedProfile) -> Union[int, float]:
    """Lower-bound quantity for the Bucklin margin.

    Any change of the winner set must (a) cost some winner its majority at
    the winning level, (b) lift a non-winner to a majority at the winning
    level, or (c) lift some candidate to a majority at a strictly earlier
    level (which only matters if it isn't already the unique winner). One
    changed vote moves each count by at most one, so the margin is at least
    the cheapest of these events. Returns ``math.inf`` when no event is
    feasible (single-candidate profiles only).
    """
    counts = top_k_counts(profile)
    scores = bucklin_scores(profile)
    best_level = min(scores.values())
    winners = {c for c, s in scores.items() if s == best_level}
    n = profile.n
    half = n // 2
    costs: list[int] = []
    if best_level <= profile.m - 1:
        for w in winners:
            costs.append(counts[w][best_level - 1] - half)
        for x in range(profile.m):
            if x not in winners:
                costs.append(half + 1 - counts[x][best_level - 1])
    for level in range(1, best_level):
        for y in range(profile.m):
            if y not in winners or len(winners) >= 2:
                costs.append(half + 1 - counts[y][level - 1])
    return min(costs) if costs else math.inf


# ---------------------------------------------------------------------------
# relative margin (pairwise-score family)


def _score_shifted(get_margin, m: int, z: int, threshold, alpha: Fraction) -> Fraction:
    """Count of rivals whose margin over z is below ``threshold``, weighting
    exact hits by alpha."""
    total = Fraction(0)
    for u in range(m):
        if u == z:
            continue
        margin = get_margin(u, z)
        if margin < threshold:
            total += 1
        elif margin == threshold:
            total += alpha
    return total


def relative_margin_generic(
    get_margin: Callable[[int, int], Union[int, Fraction]],
    m: int,
    n: int,
    x: int,
    y: int,
    alpha: Fraction,
) -> int:
    """Relative margin of x over y from an arbitrary margin accessor.

    Finds the least integer shift t such that x's tie-weighted count of
    dominating rivals at threshold -2t does not exceed y's count at
    threshold +2t. The predicate is monotone in t (one side only loses
    members, the other only gains), so binary search over
    t in [-(ceil(n/2)+1), ceil(n/2)+1] is exact; the upper endpoint always
    satisfies the predicate. Accepts exact rational margins, so it serves
    both true pairwise matrices and sampled estimates scaled to n.
    """
    if x == y:
        raise InputError("relative margin needs two distinct candidates")
    if not (0 <= x < m and 0 <= y < m):
        raise InputError(f"candidate out of range for m={m}")
    alpha = Fraction(alpha)
    hi = (n + 1) // 2 + 1
    lo = -hi

    def holds(t: int) -> bool:
        left = _score_shifted(get_margin, m, x, -2 * t, alpha)
        right = _score_shifted(get_margin, m, y, 2 * t, alpha)
        return left <= right

    while lo < hi:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def relative_margin(profile: RankedProfile, x: int, y: int, alpha) -> int:
    """Relative margin of candidate x over y on a ranked profile."""
    matrix = pairwise_matrix(profile)
    return relative_margin_generic(
        lambda u, v: matrix.d[u][v], profile.m, profile.n, x, y, Fraction(alpha)
    )


def copeland_margin(profile: RankedProfile, alpha) -> int:
    """Smallest relative margin of the canonical Copeland winner over a rival.

    Non-negative; zero exactly when the winner set is tied. With a unique
    winner this bounds the margin of victory from below, and times
    2*(ceil(log2 m) + 1) from above.
    """
    if profile.m < 2:
        raise InputError("relative margin needs at least two candidates")
    alpha = Fraction(alpha)
    result = winner_set(profile, Copeland(alpha))
    w = result.winners[0]
    matrix = pairwise_matrix(profile)
    return min(
        relative_margin_generic(
            lambda u, v: matrix.d[u][v], profile.m, profile.n, w, x, alpha
        )
        for x in range(profile.m)
        if x != w
    )


def copeland_log_factor(m: int) -> int:
    """ceil(log2 m): the pairwise-elimination depth used by the Copeland
    upper bound."""
    if m < 2:
        raise InputError("needs at least two candidates")
    return (m - 1).bit_length()


# ---------------------------------------------------------------------------
# sandwich bounds


def mov_bounds(profile: Profile, rule: Rule) -> MovBounds:
    """Scale-free sandwich bounds on the margin of victory.

    Every bound holds under winner-set semantics, tied winner sets included,
    where the tie special cases below apply:

    * positional scoring (normalized vector): [gap/(2*a1), gap/a1 + 1];
    * k-approval and approval: [1, 1] on a tie (one change always creates or
      breaks one), else [gap/2, ceil(gap/2)];
    * Bucklin: [change floor, level gap] (upper may be ``math.inf``);
    * maximin: [1, 1] on a tie, else [gap/4, gap/2];
    * Copeland: [1, n] on a tie, else [G, 2*(ceil(log2 m)+1)*G] with G the
      winner's smallest relative margin.
    """
    if profile.m < 2:
        raise InputError("margin of victory needs at least two candidates")
    if isinstance(rule, Scoring):
        vector = rule.vector.normalized()
        result = winner_set(profile, Scoring(vector))
        w, z = top_two(result.scores)
        gap = result.scores[w] - result.scores[z]
        return MovBounds(
            lower=gap / (2 * vector.alpha1),
            upper=gap / vector.alpha1 + 1,
            source="positional score gap",
        )
    if isinstance(rule, (KApproval, Approval)):
        result = winner_set(profile, rule)
        w, z = top_two(result.scores)
        gap = result.scores[w] - result.scores[z]
        label = "top-k score gap" if isinstance(rule, KApproval) else "approval score gap"
        if gap == 0:
            return MovBounds(lower=Fraction(1), upper=Fraction(1), source="tied winners")
        return MovBounds(
            lower=Fraction(gap, 2), upper=Fraction((gap + 1) // 2), source=label
        )
    if isinstance(rule, Bucklin):
        lower = bucklin_change_floor(profile)
        upper = bucklin_gap(profile)
        return MovBounds(
            lower=Fraction(lower), upper=upper, source="majority level analysis"
        )
    if isinstance(rule, Maximin):
        result = winner_set(profile, rule)
        w, z = top_two(result.scores)
        gap = result.scores[w] - result.scores[z]
        if gap == 0:
            return MovBounds(lower=Fraction(1), upper=Fraction(1), source="tied winners")
        return MovBounds(
            lower=Fraction(gap, 4), upper=Fraction(gap, 2), source="pairwise score gap"
        )
    if isinstance(rule, Copeland):
        gamma = copeland_margin(profile, rule.alpha)
        if gamma < 1:
            return MovBounds(
                lower=Fraction(1), upper=Fraction(profile.n), source="tied winners"
            )
        factor = 2 * (copeland_log_factor(profile.m) + 1)
        return MovBounds(
            lower=Fraction(gamma),
            upper=Fraction(factor * gamma),
            source="relative margin",
        )
    raise InputError(f"unknown rule: {rule!r}")
