"""Election file parsing/serialization and experiment CSV output.

Election file grammar (UTF-8, line oriented):

    # comment lines and blank lines are ignored
    m 3
    candidates alice,bob,carol     (optional)
    2: alice>bob>carol             (ranked ballot, count first)
    1: {alice,carol}               (approval ballot; {} is legal)

The first significant line must be ``m <int>``. A file holds ranked ballots
or approval ballots, never both. Candidate tokens are declared names, bare
0-based integer indices, or (when no names are declared and m <= 26) the
default letters a, b, c, ... Declared names win over integer literals.

Serialization is canonical: duplicates merged, ballots sorted, names kept
when present, default letters used otherwise (indices once m > 26), so
write(parse(text)) is idempotent and parse(write(profile)) == profile.
"""

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from movkit.core import (
    ApprovalBallot,
    ApprovalProfile,
    InputError,
    Profile,
    RankedProfile,
    Ranking,
)

_DEFAULT_NAMES = "abcdefghijklmnopqrstuvwxyz"


class ParseError(ValueError):
    """Malformed election text; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _significant_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield number, line


def _resolve(token: str, names: Optional[Sequence[str]], m: int, line: int) -> int:
    token = token.strip()
    if not token:
        raise ParseError("empty candidate token", line)
    if names is not None and token in names:
        return names.index(token)
    if token.isdigit():
        index = int(token)
        if index >= m:
            raise ParseError(f"candidate index {index} out of range for m={m}", line)
        return index
    if names is None and m <= 26 and len(token) == 1 and token in _DEFAULT_NAMES[:m]:
        return _DEFAULT_NAMES.index(token)
    raise ParseError(f"unknown candidate {token!r}", line)


def parse_election(text: str) -> Profile:
    """Parse election text into a ranked or approval profile."""
    lines = _significant_lines(text)
    try:
        number, line = next(lines)
    except StopIteration:
        raise ParseError("missing 'm <count>' header", 1) from None
    parts = line.split()
    if len(parts) != 2 or parts[0] != "m" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise ParseError("first line must be 'm <count>' with a positive count", number)
    m = int(parts[1])

    names: Optional[tuple[str, ...]] = None
    ranked: list[tuple[Ranking, int]] = []
    approval: list[tuple[ApprovalBallot, int]] = []
    for number, line in lines:
        if names is None and not ranked and not approval and line.startswith("candidates"):
            rest = line[len("candidates"):].strip()
            declared = tuple(tok.strip() for tok in rest.split(","))
            if len(declared) != m:
                raise ParseError(f"expected {m} candidate names, got {len(declared)}", number)
            seen = set()
            for name in declared:
                if not name or not all(ch.isalnum() or ch in "_.-" for ch in name):
                    raise ParseError(f"bad candidate name {name!r}", number)
                if name in seen:
                    raise ParseError(f"duplicate candidate name {name!r}", number)
                seen.add(name)
            names = declared
            continue
        count_part, sep, ballot_part = line.partition(":")
        if not sep:
            raise ParseError("expected 'COUNT: ballot'", number)
        count_part = count_part.strip()
        if not count_part.isdigit() or int(count_part) < 1:
            raise ParseError(f"count must be a positive integer, got {count_part!r}", number)
        count = int(count_part)
        ballot_part = ballot_part.strip()
        if ballot_part.startswith("{"):
            if ranked:
                raise ParseError("approval ballot in a ranked file", number)
            if not ballot_part.endswith("}"):
                raise ParseError("unterminated approval set", number)
            inner = ballot_part[1:-1].strip()
            members: set[int] = set()
            if inner:
                for token in inner.split(","):
                    cand = _resolve(token, names, m, number)
                    if cand in members:
                        raise ParseError(f"candidate {token.strip()!r} listed twice", number)
                    members.add(cand)
            approval.append((ApprovalBallot(frozenset(members)), count))
        else:
            if approval:
                raise ParseError("ranked ballot in an approval file", number)
            tokens = ballot_part.split(">")
            if len(tokens) != m:
                raise ParseError(f"ranking must list all {m} candidates", number)
            order = tuple(_resolve(token, names, m, number) for token in tokens)
            if sorted(order) != list(range(m)):
                raise ParseError("ranking repeats a candidate", number)
            ranked.append((Ranking(order), count))
    if not ranked and not approval:
        raise ParseError("no ballot lines", number)
    try:
        if ranked:
            return RankedProfile(m=m, votes=tuple(ranked), names=names)
        return ApprovalProfile(m=m, votes=tuple(approval), names=names)
    except InputError as exc:
        raise ParseError(str(exc), 1) from exc


def _labels(profile: Profile) -> list[str]:
    if profile.names is not None:
        return list(profile.names)
    if profile.m <= 26:
        return list(_DEFAULT_NAMES[: profile.m])
    return [str(c) for c in range(profile.m)]


def write_election(profile: Profile) -> str:
    """Canonical text form of a profile; see the module grammar."""
    labels = _labels(profile)
    out = [f"m {profile.m}"]
    if profile.names is not None:
        out.append("candidates " + ",".join(profile.names))
    for ballot, mult in profile.votes:
        if isinstance(ballot, Ranking):
            body = ">".join(labels[c] for c in ballot.order)
        else:
            body = "{" + ",".join(labels[c] for c in sorted(ballot.approved)) + "}"
        out.append(f"{mult}: {body}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# experiment CSV


CSV_COLUMNS = (
    "trial", "seed", "rule", "n", "m", "epsilon", "delta", "ell",
    "mov_exact", "mov_lower", "mov_upper", "estimate", "abs_error",
    "within_guarantee",
)


@dataclass(frozen=True)
class ExperimentRow:
    """One estimation trial, ready for CSV serialization.

    ``mov_exact`` is None when the trial carried no exact reference (bounds
    policy, exhausted oracle budget, or an inapplicable closed form); the
    bounds columns are None unless the bounds policy ran. ``within_guarantee``
    is None exactly when the trial has no reference to judge against.
    """

    trial: int
    seed: int
    rule: str
    n: int
    m: int
    epsilon: Fraction
    delta: Fraction
    ell: int
    mov_exact: Optional[int]
    mov_lower: Optional[Fraction]
    mov_upper: Optional[Union[Fraction, float]]
    estimate: Fraction
    abs_error: Optional[Fraction]
    within_guarantee: Optional[bool]


def _decimal(value: Optional[Union[Fraction, float]], padded: bool) -> str:
    """Decimal cell with 10 significant digits; '#' keeps trailing zeros."""
    if value is None:
        return ""
    value = float(value)
    if math.isinf(value):
        return "inf"
    return format(value, "#.10g" if padded else ".10g")


def write_experiment_csv(rows: Iterable[ExperimentRow]) -> str:
    """Serialize experiment rows to CSV (RFC-4180-style, minimal quoting)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row.trial,
            row.seed,
            row.rule,
            row.n,
            row.m,
            _decimal(row.epsilon, padded=False),
            _decimal(row.delta, padded=False),
            row.ell,
            "" if row.mov_exact is None else row.mov_exact,
            _decimal(row.mov_lower, padded=True),
            _decimal(row.mov_upper, padded=True),
            _decimal(row.estimate, padded=True),
            _decimal(row.abs_error, padded=True),
            "" if row.within_guarantee is None else str(row.within_guarantee).lower(),
        ])
    return buffer.getvalue()
