"""Spatial electorate on the political axis [-1, +1].

Candidates and voters sit on a line. Every voter sees each candidate through
a private, noisy and clipped view, and votes for the candidate whose viewed
position is closest to their own belief. A pro-target message moves the belief
a fixed step towards the target as that voter sees it.

Positions, views and votes are plain numpy arrays. :class:`Electorate` bundles
them into an immutable snapshot.
"""

from __future__ import annotations

import io
import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import CapabilityError, ConfigurationError, ParseError

LOW, HIGH = -1.0, 1.0


# ---------------------------------------------------------------------------
# Noise on the voters' view of candidate positions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroNoise:
    """Exact views: every voter sees the true candidate positions."""

    def sample(self, rng, size, position=None):
        return np.zeros(size)

    @property
    def label(self):
        return "0"


@dataclass(frozen=True)
class UniformNoise:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigurationError(f"uniform noise needs lo < hi, got {self.lo}, {self.hi}")

    def sample(self, rng, size, position=None):
        return rng.uniform(self.lo, self.hi, size)

    @property
    def label(self):
        return f"U({_fmt(self.lo)};{_fmt(self.hi)})"


@dataclass(frozen=True)
class GaussianNoise:
    """Normal noise parametrised by mean and *variance*, written N(mean;variance)."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ConfigurationError(f"negative variance {self.variance}")

    def sample(self, rng, size, position=None):
        return rng.normal(self.mean, np.sqrt(self.variance), size)

    @property
    def label(self):
        return f"N({_fmt(self.mean)};{_fmt(self.variance)})"


@dataclass(frozen=True)
class GaussianMixtureNoise:
    components: tuple  # of (weight, mean, variance)

    def __post_init__(self):
        comps = tuple(tuple(float(x) for x in c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ConfigurationError("empty mixture")
        if abs(sum(w for w, _, _ in comps) - 1.0) > 1e-9:
            raise ConfigurationError("mixture weights must sum to 1")
        if any(w < 0 or v < 0 for w, _, v in comps):
            raise ConfigurationError("mixture weights and variances must be non-negative")

    def sample(self, rng, size, position=None):
        weights = np.array([c[0] for c in self.components])
        means = np.array([c[1] for c in self.components])
        stds = np.sqrt([c[2] for c in self.components])
        which = rng.choice(len(weights), size=size, p=weights)
        return rng.normal(means[which], stds[which])

    @property
    def label(self):
        return "+".join(f"{_fmt(w)}*N({_fmt(m)};{_fmt(v)})" for w, m, v in self.components)


def _fmt(x):
    return f"{x:g}"


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_GAUSS = re.compile(rf"N\(\s*({_NUM})\s*[;,]\s*({_NUM})\s*\)$")
_UNIF = re.compile(rf"U\(\s*({_NUM})\s*[;,]\s*({_NUM})\s*\)$")
_MIXTERM = re.compile(rf"({_NUM})\s*\*\s*N\(\s*({_NUM})\s*[;,]\s*({_NUM})\s*\)$")


def parse_noise(text):
    """Parse a noise label such as ``0``, ``U(-0.2;0.2)``, ``N(0;0.08)`` or
    ``0.5*N(-0.7;1)+0.5*N(0.7;1)``. Inverse of the ``label`` property."""
    s = str(text).strip().replace(" ", "")
    if s.lower() in ("0", "zero", "none"):
        return ZeroNoise()
    if m := _UNIF.match(s):
        return UniformNoise(float(m[1]), float(m[2]))
    if m := _GAUSS.match(s):
        return GaussianNoise(float(m[1]), float(m[2]))
    terms = re.split(r"\+(?=[\d.])", s)
    comps = []
    for term in terms:
        m = _MIXTERM.match(term)
        if not m:
            raise ConfigurationError(f"cannot parse noise spec {text!r}")
        comps.append((float(m[1]), float(m[2]), float(m[3])))
    return GaussianMixtureNoise(tuple(comps))


def sample_views(candidates, n_voters, noise, rng):
    """Draw every voter's clipped view of every candidate, shape (n_voters, m)."""
    candidates = np.asarray(candidates, dtype=float)
    if candidates.size == 0:
        raise ConfigurationError("no candidates")
    draws = noise.sample(rng, (n_voters, candidates.size), position=candidates)
    return np.clip(candidates[None, :] + draws, LOW, HIGH)


# ---------------------------------------------------------------------------
# Preferences, tallies and margins
# ---------------------------------------------------------------------------


def preferred_candidate(position, view_row, tiebreak_hint=None):
    dist = np.abs(position - np.asarray(view_row, dtype=float))
    best = dist.min()
    if tiebreak_hint is not None and dist[tiebreak_hint] == best:
        return int(tiebreak_hint)
    return int(np.flatnonzero(dist == best)[0])


def preferences(positions, views, hints=None):
    """Vectorised :func:`preferred_candidate` over all voters.

    ``hints`` holds each voter's previous vote (sticky tie-break) or is None.
    """
    positions = np.asarray(positions, dtype=float)
    views = np.asarray(views, dtype=float)
    dist = np.abs(positions[:, None] - views)
    ties = dist == dist.min(axis=1, keepdims=True)
    votes = ties.argmax(axis=1)
    if hints is not None:
        hints = np.asarray(hints)
        keep = ties[np.arange(len(positions)), hints]
        votes = np.where(keep, hints, votes)
    return votes


def ranking(position, view_row):
    """Candidates by increasing distance from ``position``; ties by id."""
    dist = np.abs(position - np.asarray(view_row, dtype=float))
    return [int(c) for c in np.lexsort((np.arange(dist.size), dist))]


def count_votes(votes, n_candidates):
    return np.bincount(np.asarray(votes), minlength=n_candidates)


def margin_of_victory(votes, target):
    """Votes of ``target`` minus those of its strongest opponent."""
    votes = np.asarray(votes)
    others = np.delete(votes, target)
    return int(votes[target] - others.max())


def best_opponent(votes, target):
    votes = np.asarray(votes)
    others = [c for c in range(len(votes)) if c != target]
    return max(others, key=lambda c: (votes[c], -c))


def delta_mov(before, after, target):
    return margin_of_victory(after, target) - margin_of_victory(before, target)


def max_delta_mov(votes, target):
    """Largest achievable change of margin: ``|V| - |V_target| + |V_best_opponent|``."""
    votes = np.asarray(votes)
    return int(votes.sum() - votes[target] + votes[best_opponent(votes, target)])


def apply_influence(position, target_view, delta):
    """Move ``position`` by at most ``delta`` towards ``target_view``.

    Works elementwise on arrays. A voter closer than ``delta`` lands exactly
    on the target.
    """
    position = np.asarray(position, dtype=float)
    target_view = np.asarray(target_view, dtype=float)
    gap = target_view - position
    moved = position + np.minimum(delta, np.abs(gap)) * np.sign(gap)
    out = np.where(np.abs(gap) <= delta, target_view, moved)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Electorate snapshot
# ---------------------------------------------------------------------------


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Electorate:
    """Immutable snapshot of candidate positions, beliefs, views and votes.

    ``votes`` are the current votes. When omitted they are derived from the
    views with the smallest-id tie-break.
    """

    candidates: np.ndarray
    voters: np.ndarray
    views: np.ndarray
    target: int
    votes: np.ndarray = field(default=None)

    def __post_init__(self):
        cands = _frozen(self.candidates, float)
        voters = _frozen(self.voters, float)
        views = _frozen(self.views, float)
        object.__setattr__(self, "candidates", cands)
        object.__setattr__(self, "voters", voters)
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "target", int(self.target))
        if cands.ndim != 1 or cands.size < 2:
            raise ConfigurationError("need at least two candidates")
        if not 0 <= self.target < cands.size:
            raise ConfigurationError(f"target {self.target} is not a candidate id")
        if views.shape != (voters.size, cands.size):
            raise ConfigurationError(
                f"views must have shape {(voters.size, cands.size)}, got {views.shape}"
            )
        for name, arr in (("candidate", cands), ("voter", voters), ("view", views)):
            if arr.size and (arr.min() < LOW or arr.max() > HIGH):
                raise ConfigurationError(f"{name} positions must lie in [-1, 1]")
        if self.votes is None:
            votes = preferences(voters, views)
        else:
            votes = self.votes
        object.__setattr__(self, "votes", _frozen(votes, np.int64))

    @property
    def n_voters(self):
        return self.voters.size

    @property
    def n_candidates(self):
        return self.candidates.size

    def moved(self, positions):
        """New snapshot with updated beliefs; votes re-derived with sticky ties."""
        positions = np.asarray(positions, dtype=float)
        votes = preferences(positions, self.views, hints=self.votes)
        return Electorate(self.candidates, positions, self.views, self.target, votes)

    def with_target(self, target):
        return Electorate(self.candidates, self.voters, self.views, target, self.votes)


def tally(electorate):
    return count_votes(electorate.votes, electorate.n_candidates)


def influence_voters(electorate, voters, delta):
    """Apply one pro-target message to ``voters`` (ids) and re-tally."""
    voters = np.asarray(sorted(set(int(v) for v in voters)), dtype=np.int64)
    positions = electorate.voters.copy()
    if voters.size:
        target_view = electorate.views[voters, electorate.target]
        positions[voters] = apply_influence(positions[voters], target_view, delta)
    return electorate.moved(positions)


def predicted_votes(electorate, positions=None):
    """Votes as the manipulator predicts them from *true* candidate positions.

    The current actual vote is used as the tie hint, so with exact views the
    prediction coincides with the real votes.
    """
    if positions is None:
        positions = electorate.voters
    views = np.broadcast_to(electorate.candidates, electorate.views.shape)
    return preferences(positions, views, hints=electorate.votes)


def random_electorate(n_voters, n_candidates, noise, rng, target="random"):
    """Uniform positions on [-1, 1] for candidates and voters.

    ``target`` is ``"random"``, ``"rightmost"`` or a candidate id.
    """
    candidates = rng.uniform(LOW, HIGH, n_candidates)
    voters = rng.uniform(LOW, HIGH, n_voters)
    views = sample_views(candidates, n_voters, noise, rng)
    return Electorate(candidates, voters, views, choose_target(candidates, target, rng))


def choose_target(candidates, rule, rng=None):
    if rule == "random":
        return int(rng.integers(len(candidates)))
    if rule == "rightmost":
        return int(np.argmax(candidates))
    if isinstance(rule, (int, np.integer)) and 0 <= rule < len(candidates):
        return int(rule)
    raise ConfigurationError(f"unknown target rule {rule!r}")


# ---------------------------------------------------------------------------
# Distance from single-peakedness
# ---------------------------------------------------------------------------

MAX_SWAP_CANDIDATES = 10


def is_single_peaked(order, axis):
    """True if ``order`` (best first) is single-peaked along ``axis``.

    Read from worst to best, every candidate must sit at an end of the
    interval of the axis not yet consumed.
    """
    pos = {c: i for i, c in enumerate(axis)}
    lo, hi = 0, len(axis) - 1
    for c in reversed(order):
        if pos[c] == lo:
            lo += 1
        elif pos[c] == hi:
            hi -= 1
        else:
            return False
    return True


@lru_cache(maxsize=64)
def single_peaked_rankings(axis):
    """All 2**(m-1) rankings single-peaked on ``axis`` (a tuple), best first."""
    axis = tuple(axis)
    m = len(axis)
    out = []
    # bit i set: the (i+1)-th worst candidate is taken from the right end
    for bits in range(2 ** max(m - 1, 0)):
        lo, hi = 0, m - 1
        worst_first = []
        for i in range(m - 1):
            if bits >> i & 1:
                worst_first.append(axis[hi])
                hi -= 1
            else:
                worst_first.append(axis[lo])
                lo += 1
        worst_first.append(axis[lo])
        out.append(tuple(reversed(worst_first)))
    return tuple(out)


def kendall_tau_distance(a, b):
    """Number of candidate pairs ordered differently by ``a`` and ``b``."""
    pos = {c: i for i, c in enumerate(b)}
    seq = [pos[c] for c in a]
    return sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])


@lru_cache(maxsize=65536)
def _swap_distance(order, axis):
    return min(kendall_tau_distance(order, sp) for sp in single_peaked_rankings(axis))


def swap_distance_to_single_peaked(order, axis):
    """Fewest adjacent swaps turning ``order`` into a ranking single-peaked on ``axis``."""
    order, axis = tuple(int(c) for c in order), tuple(int(c) for c in axis)
    if len(axis) > MAX_SWAP_CANDIDATES:
        raise CapabilityError(f"swap distance enumeration limited to {MAX_SWAP_CANDIDATES} candidates")
    if sorted(order) != sorted(axis):
        raise ConfigurationError("ranking must be a permutation of the axis")
    return _swap_distance(order, axis)


def electorate_swap_distance(electorate):
    """Mean per-voter swap distance w.r.t. the axis of true candidate positions."""
    axis = tuple(int(c) for c in np.argsort(electorate.candidates, kind="stable"))
    total = sum(
        swap_distance_to_single_peaked(ranking(x, row), axis)
        for x, row in zip(electorate.voters, electorate.views)
    )
    return total / electorate.n_voters


# ---------------------------------------------------------------------------
# Text serialisation
# ---------------------------------------------------------------------------


def format_electorate(electorate):
    buf = io.StringIO()
    buf.write(f"candidates {electorate.n_candidates}\n")
    for i, x in enumerate(electorate.candidates):
        buf.write(f"{i} {float(x)!r}\n")
    buf.write(f"voters {electorate.n_voters}\n")
    for i, x in enumerate(electorate.voters):
        buf.write(f"{i} {float(x)!r}\n")
    buf.write("views\n")
    for row in electorate.views:
        buf.write(" ".join(repr(float(x)) for x in row) + "\n")
    buf.write(f"target {electorate.target}\n")
    return buf.getvalue()


def save_electorate(electorate, path):
    Path(path).write_text(format_electorate(electorate))


def parse_electorate(text, path=None):
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks and not toks[0].startswith("#")]
    pos = 0

    def take(expect):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected {expect}", path)
        lineno, toks = lines[pos]
        pos += 1
        return lineno, toks

    def number(tok, kind, lineno):
        try:
            return kind(tok)
        except ValueError:
            raise ParseError(f"bad number {tok!r}", path, lineno) from None

    def block(keyword):
        lineno, toks = take(f"'{keyword} <count>'")
        if toks[0] != keyword or len(toks) != 2:
            raise ParseError(f"expected '{keyword} <count>'", path, lineno)
        values = np.empty(number(toks[1], int, lineno))
        for k in range(values.size):
            lineno, toks = take(f"'{k} <position>'")
            if len(toks) != 2 or number(toks[0], int, lineno) != k:
                raise ParseError(f"expected '{k} <position>'", path, lineno)
            values[k] = number(toks[1], float, lineno)
        return values

    candidates = block("candidates")
    voters = block("voters")
    views = None
    lineno, toks = take("'views' or 'target'")
    if toks == ["views"]:
        views = np.empty((voters.size, candidates.size))
        for k in range(voters.size):
            lineno, toks = take("a views row")
            if len(toks) != candidates.size:
                raise ParseError("malformed views row", path, lineno)
            views[k] = [number(t, float, lineno) for t in toks]
        lineno, toks = take("'target <id>'")
    if toks[0] != "target" or len(toks) != 2:
        raise ParseError("expected 'target <id>'", path, lineno)
    target = number(toks[1], int, lineno)
    if views is None:
        views = np.broadcast_to(candidates, (voters.size, candidates.size))
    try:
        return Electorate(candidates, voters, views, target)
    except ConfigurationError as exc:
        raise ParseError(str(exc), path) from None


def load_electorate(path):
    return parse_electorate(Path(path).read_text(), path=path)
