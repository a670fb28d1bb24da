"""Ingestion and canonical indexing of unary and pairwise marginal probabilities.

A problem instance over n binary variables A_1..A_n consists of the n
complement probabilities P(not A_i) and the n(n-1)/2 conjunction
probabilities P(A_i A_j), i < j, each measured in its own experimental
context.  This module validates such instances, arranges them into the
canonical diagonal vector consumed by the density construction, and
estimates them from raw per-context observations.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import IncompleteCoverageError, SchemaError


def parse_probability(value) -> float:
    """Convert a JSON/CSV probability entry to float.

    Strings are parsed exactly as rationals first ("9/20", "0.45") and
    converted to binary floating point once, so fractional inputs carry
    no decimal-rounding ambiguity.
    """
    if isinstance(value, bool):
        raise SchemaError(f"probability must be a number, got {value!r}")
    if isinstance(value, (int, float)):
        p = float(value)
    elif isinstance(value, str):
        try:
            p = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"cannot parse probability {value!r}") from exc
    else:
        raise SchemaError(f"probability must be a number or string, got {type(value).__name__}")
    if not math.isfinite(p):
        raise SchemaError(f"probability must be finite, got {value!r}")
    return p


def pair_keys(n: int) -> list[tuple[int, int]]:
    """All pairs (i, j), 1 <= i < j <= n, in lexicographic order."""
    return [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]


def lambda_slot(n: int, i: int, j: int) -> int:
    """1-based slot of P(A_i A_j) in the canonical diagonal of length n(n+1)/2.

    Slots 1..n hold the complement probabilities; pair (i, j) lands at
    slot (n(n-1) - (n-i)(n-i-1))/2 + j, which enumerates pairs
    lexicographically.
    """
    if not (1 <= i < j <= n):
        raise SchemaError(f"invalid pair ({i}, {j}) for n={n}")
    return (n * (n - 1) - (n - i) * (n - i - 1)) // 2 + j


def slot_pair(n: int, k: int) -> tuple[int, int]:
    """Inverse of :func:`lambda_slot`: the pair stored at 1-based slot k > n."""
    if not (n < k <= n * (n + 1) // 2):
        raise SchemaError(f"slot {k} is not a pair slot for n={n}")
    return pair_keys(n)[k - n - 1]


@dataclass(frozen=True)
class MarginalSet:
    """Complete set of unary-complement and pairwise marginals.

    ``pbar[i-1]`` is P(not A_i); ``pjoint`` holds P(A_i A_j) for pairs in
    lexicographic order.  Instances are immutable; construct through
    :meth:`from_maps` to get completeness and range checks.
    """

    n: int
    pbar: tuple[float, ...]
    pjoint: tuple[float, ...]

    @classmethod
    def from_maps(
        cls,
        n: int,
        pbar: Mapping[int, object],
        pjoint: Mapping[tuple[int, int], object],
    ) -> "MarginalSet":
        if not isinstance(n, int) or n < 2:
            raise SchemaError(f"n must be an integer >= 2, got {n!r}")
        missing = [f"pbar[{i}]" for i in range(1, n + 1) if i not in pbar]
        missing += [f"pjoint[{i},{j}]" for (i, j) in pair_keys(n) if (i, j) not in pjoint]
        if missing:
            raise SchemaError("missing entries: " + ", ".join(missing))
        extra = [str(k) for k in pbar if not (isinstance(k, int) and 1 <= k <= n)]
        extra += [str(k) for k in pjoint if tuple(k) not in set(pair_keys(n))]
        if extra:
            raise SchemaError("unexpected entries: " + ", ".join(extra))
        pb = tuple(parse_probability(pbar[i]) for i in range(1, n + 1))
        pj = tuple(parse_probability(pjoint[(i, j)]) for (i, j) in pair_keys(n))
        bad = [f"pbar[{i + 1}]={v}" for i, v in enumerate(pb) if not 0.0 <= v <= 1.0]
        bad += [
            f"pjoint[{i},{j}]={v}"
            for (i, j), v in zip(pair_keys(n), pj)
            if not 0.0 <= v <= 1.0
        ]
        if bad:
            raise SchemaError("probabilities outside [0, 1]: " + ", ".join(bad))
        return cls(n=n, pbar=pb, pjoint=pj)

    def p_not(self, i: int) -> float:
        """P(not A_i)."""
        if not 1 <= i <= self.n:
            raise SchemaError(f"variable index {i} out of range 1..{self.n}")
        return self.pbar[i - 1]

    def p_single(self, i: int) -> float:
        """P(A_i) = 1 - P(not A_i)."""
        return 1.0 - self.p_not(i)

    def p_pair(self, i: int, j: int) -> float:
        """P(A_i A_j) for any i != j."""
        if i > j:
            i, j = j, i
        return self.pjoint[lambda_slot(self.n, i, j) - self.n - 1]

    def pairs(self) -> list[tuple[int, int]]:
        return pair_keys(self.n)

    def restrict(self, triple: Sequence[int]) -> "MarginalSet":
        """Sub-instance over the given distinct variables, renumbered 1..len."""
        idx = list(triple)
        if len(set(idx)) != len(idx) or not all(1 <= v <= self.n for v in idx):
            raise SchemaError(f"invalid variable subset {triple!r}")
        pbar = {a + 1: self.pbar[v - 1] for a, v in enumerate(idx)}
        pjoint = {
            (a + 1, b + 1): self.p_pair(idx[a], idx[b])
            for a in range(len(idx))
            for b in range(a + 1, len(idx))
        }
        return MarginalSet.from_maps(len(idx), pbar, pjoint)


@dataclass(frozen=True)
class LambdaVector:
    """The m = n(n+1)/2 marginals in canonical slot order (the diagonal of the
    constraint matrix): complements first, then pairs lexicographically."""

    n: int
    entries: tuple[float, ...]

    def __post_init__(self):
        m = self.n * (self.n + 1) // 2
        if len(self.entries) != m:
            raise SchemaError(f"expected {m} entries for n={self.n}, got {len(self.entries)}")


def to_lambda(ms: MarginalSet) -> LambdaVector:
    """Arrange a marginal set into canonical slot order (lossless)."""
    m = ms.n * (ms.n + 1) // 2
    entries = [0.0] * m
    for i in range(1, ms.n + 1):
        entries[i - 1] = ms.p_not(i)
    for (i, j) in ms.pairs():
        entries[lambda_slot(ms.n, i, j) - 1] = ms.p_pair(i, j)
    return LambdaVector(n=ms.n, entries=tuple(entries))


def from_lambda(lv: LambdaVector) -> MarginalSet:
    """Inverse of :func:`to_lambda`."""
    n = lv.n
    pbar = {i: lv.entries[i - 1] for i in range(1, n + 1)}
    pjoint = {
        (i, j): lv.entries[lambda_slot(n, i, j) - 1] for (i, j) in pair_keys(n)
    }
    return MarginalSet.from_maps(n, pbar, pjoint)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    errors: tuple[str, ...]
    warnings: tuple[str, ...]


def validate(ms: MarginalSet, strict: bool = False) -> ValidationReport:
    """Check range and within-context consistency constraints.

    Range violations and structural defects are always errors.  The
    cross-entry constraint P(A_i A_j) <= min(P(A_i), P(A_j)) is an error
    only under ``strict``; by default it is a warning, since the density
    construction is defined regardless of whether the contexts agree.
    """
    errors: list[str] = []
    warnings: list[str] = []
    n = ms.n
    if len(ms.pbar) != n or len(ms.pjoint) != n * (n - 1) // 2:
        errors.append("entry count does not match n")
        return ValidationReport(False, tuple(errors), tuple(warnings))
    for i in range(1, n + 1):
        v = ms.p_not(i)
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            errors.append(f"pbar[{i}]={v} outside [0, 1]")
    for (i, j) in ms.pairs():
        v = ms.p_pair(i, j)
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            errors.append(f"pjoint[{i},{j}]={v} outside [0, 1]")
    if not errors:
        for (i, j) in ms.pairs():
            cap = min(ms.p_single(i), ms.p_single(j))
            if ms.p_pair(i, j) > cap + 1e-15:
                msg = (
                    f"pjoint[{i},{j}]={ms.p_pair(i, j)} exceeds "
                    f"min(P(A_{i}), P(A_{j}))={cap}"
                )
                (errors if strict else warnings).append(msg)
    return ValidationReport(not errors, tuple(errors), tuple(warnings))


@dataclass(frozen=True)
class ContextSample:
    """Raw observations from one experimental context.

    ``variables`` names the measured variables (one or two indices);
    each observation is a tuple of 0/1 values of the same arity.
    """

    variables: tuple[int, ...]
    observations: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.variables) not in (1, 2):
            raise SchemaError(f"context arity must be 1 or 2, got {self.variables!r}")
        if len(self.variables) == 2 and len(set(self.variables)) != 2:
            raise SchemaError(f"pair context must name two distinct variables: {self.variables!r}")
        for obs in self.observations:
            if len(obs) != len(self.variables) or any(b not in (0, 1) for b in obs):
                raise SchemaError(f"bad observation {obs!r} for context {self.variables!r}")

    @property
    def count(self) -> int:
        return len(self.observations)


def estimate_from_contexts(samples: Iterable[ContextSample]) -> MarginalSet:
    """Relative-frequency estimates pooled over contexts.

    Unary probabilities P(not A_i) come from unary contexts for i; pair
    probabilities P(A_i A_j) from pair contexts.  Contexts measuring the
    same variables are pooled by total observation count.  Every unary
    index and every pair must be covered by at least one nonempty
    context.
    """
    unary_hits: dict[int, int] = {}
    unary_tot: dict[int, int] = {}
    pair_hits: dict[tuple[int, int], int] = {}
    pair_tot: dict[tuple[int, int], int] = {}
    n = 0
    for s in samples:
        n = max(n, *s.variables)
        if len(s.variables) == 1:
            i = s.variables[0]
            unary_hits[i] = unary_hits.get(i, 0) + sum(1 for (b,) in s.observations if b == 0)
            unary_tot[i] = unary_tot.get(i, 0) + s.count
        else:
            i, j = s.variables
            key, flip = ((i, j), False) if i < j else ((j, i), True)
            ones = sum(1 for obs in s.observations if obs[0] == 1 and obs[1] == 1)
            pair_hits[key] = pair_hits.get(key, 0) + ones
            pair_tot[key] = pair_tot.get(key, 0) + s.count
    if n < 2:
        raise SchemaError("context samples must involve at least two variables")
    missing = [f"unary {i}" for i in range(1, n + 1) if unary_tot.get(i, 0) == 0]
    missing += [f"pair {i},{j}" for (i, j) in pair_keys(n) if pair_tot.get((i, j), 0) == 0]
    if missing:
        raise IncompleteCoverageError(missing)
    pbar = {i: unary_hits[i] / unary_tot[i] for i in range(1, n + 1)}
    pjoint = {k: pair_hits[k] / pair_tot[k] for k in pair_keys(n)}
    return MarginalSet.from_maps(n, pbar, pjoint)


# ---------------------------------------------------------------------------
# External input formats


@dataclass(frozen=True)
class ParsedInput:
    """A marginal set plus the raw entries as given (for exact echoing)."""

    ms: MarginalSet
    raw_pbar: dict[str, object]
    raw_pjoint: dict[str, object]


def marginals_from_json_dict(obj: Mapping) -> ParsedInput:
    """Parse ``{"n": int, "pbar": {"1": p, ...}, "pjoint": {"1,2": p, ...}}``.

    Values may be numbers or exact fraction strings.
    """
    if not isinstance(obj, Mapping):
        raise SchemaError("top-level JSON value must be an object")
    unknown = set(obj) - {"n", "pbar", "pjoint"}
    if unknown:
        raise SchemaError("unknown top-level keys: " + ", ".join(sorted(unknown)))
    try:
        n = obj["n"]
        raw_pbar = dict(obj["pbar"])
        raw_pjoint = dict(obj["pjoint"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"missing or malformed top-level key: {exc}") from exc
    pbar: dict[int, object] = {}
    for key, val in raw_pbar.items():
        try:
            pbar[int(key)] = val
        except ValueError as exc:
            raise SchemaError(f"bad pbar key {key!r}") from exc
    pjoint: dict[tuple[int, int], object] = {}
    for key, val in raw_pjoint.items():
        parts = str(key).split(",")
        try:
            i, j = (int(p) for p in parts)
        except ValueError as exc:
            raise SchemaError(f"bad pjoint key {key!r}, expected 'i,j'") from exc
        pjoint[(i, j)] = val
    ms = MarginalSet.from_maps(n, pbar, pjoint)
    return ParsedInput(ms=ms, raw_pbar=raw_pbar, raw_pjoint=raw_pjoint)


def marginals_from_csv(text: str) -> ParsedInput:
    """Parse the tagged CSV format.

    Records are ``unary,i,p`` and ``pair,i,j,p``.  Header lines
    ``unary,i,p`` / ``pair,i,j,p`` naming the columns are accepted and
    define a section whose untagged rows inherit the record type.
    """
    pbar: dict[int, object] = {}
    pjoint: dict[tuple[int, int], object] = {}
    raw_pbar: dict[str, object] = {}
    raw_pjoint: dict[str, object] = {}
    section: str | None = None
    for row in csv.reader(io.StringIO(text)):
        row = [c.strip() for c in row if c.strip() != ""]
        if not row:
            continue
        tag = row[0].lower()
        if tag in ("unary", "pair"):
            if [c.lower() for c in row[1:]] in (["i", "p"], ["i", "j", "p"]):
                section = tag
                continue
            fields = row[1:]
        elif section is not None:
            tag, fields = section, row
        else:
            raise SchemaError(f"unrecognized CSV row {row!r}")
        if tag == "unary":
            if len(fields) != 2:
                raise SchemaError(f"unary row needs i,p: {row!r}")
            i = _parse_index(fields[0])
            if i in pbar:
                raise SchemaError(f"duplicate unary entry for {i}")
            pbar[i] = fields[1]
            raw_pbar[str(i)] = fields[1]
        else:
            if len(fields) != 3:
                raise SchemaError(f"pair row needs i,j,p: {row!r}")
            i, j = _parse_index(fields[0]), _parse_index(fields[1])
            if (i, j) in pjoint:
                raise SchemaError(f"duplicate pair entry for {i},{j}")
            pjoint[(i, j)] = fields[2]
            raw_pjoint[f"{i},{j}"] = fields[2]
    if not pbar:
        raise SchemaError("no unary rows found")
    n = max(max(pbar), max((j for (_, j) in pjoint), default=0))
    ms = MarginalSet.from_maps(n, pbar, pjoint)
    return ParsedInput(ms=ms, raw_pbar=raw_pbar, raw_pjoint=raw_pjoint)


def context_from_csv(text: str) -> ContextSample:
    """Parse one context file: a header row of variable indices, then one
    0/1 observation per row."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise SchemaError("empty context file")
    variables = tuple(_parse_index(c) for c in rows[0] if c.strip())
    observations = []
    for r in rows[1:]:
        try:
            observations.append(tuple(int(c) for c in r if c.strip() != ""))
        except ValueError as exc:
            raise SchemaError(f"bad observation row {r!r}") from exc
    return ContextSample(variables=variables, observations=tuple(observations))


def _parse_index(text: str) -> int:
    try:
        i = int(text)
    except ValueError as exc:
        raise SchemaError(f"bad variable index {text!r}") from exc
    if i < 1:
        raise SchemaError(f"variable indices are 1-based, got {i}")
    return i
