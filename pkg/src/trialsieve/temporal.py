"""Temporal expression parsing and event-date resolution.

Temporal rules pair a token pattern (with NUM/ANY wildcards) with an
interpretation tag. Parsed expressions carry calendar intervals, never
point guesses: month-only and year-only expressions widen to the full
month/year, decades map to explicit year ranges.
"""

from __future__ import annotations

import re
from calendar import monthrange
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Optional

from .matcher import Match, OverlapPolicy, Token, TokenTrie
from .ner import Mention

DEFAULT_HISTORY_THRESHOLD_DAYS = 30
DEFAULT_EXPRESSION_WINDOW_TOKENS = 10

_MONTHS = {m: i + 1 for i, m in enumerate(
    ["january", "february", "march", "april", "may", "june", "july",
     "august", "september", "october", "november", "december"])}

_DECADE_RE = re.compile(r"(\d+)0s")


@dataclass(frozen=True)
class TemporalExpression:
    begin: int
    end: int
    token_begin: int
    token_end: int
    earliest: date
    latest: date
    kind: str   # absolute | relative | decade | duration


@dataclass(frozen=True)
class ResolvedEventDate:
    earliest: Optional[date]
    latest: Optional[date]
    basis: str  # "expression" | "document_date" | "undatable"


def add_months(d: date, delta: int) -> date:
    y, m = divmod(d.year * 12 + (d.month - 1) + delta, 12)
    return date(y, m + 1, min(d.day, monthrange(y, m + 1)[1]))


def _safe_date(y: int, m: int, d: int) -> Optional[date]:
    try:
        return date(y, m, d)
    except ValueError:
        return None


def _month_interval(y: int, m: int):
    return date(y, m, 1), date(y, m, monthrange(y, m)[1])


def _year_interval(y: int):
    return date(y, 1, 1), date(y, 12, 31)


def _decade_base(token: str, anchor: Optional[date]) -> Optional[int]:
    m = _DECADE_RE.fullmatch(token)
    if not m:
        return None
    d = int(m.group(1)) * 10
    if d >= 1000:
        return d
    if anchor is None:
        return 1900 + d
    # largest century placement whose decade starts at or before the anchor
    base = anchor.year - ((anchor.year - d) % 100)
    return base


def _interpret(tag: str, toks: list[Token], anchor: Optional[date]):
    """Return (earliest, latest, kind) or None if the match is not a date."""
    nums = [t.surface for t in toks if t.norm.isdigit()]
    if tag == "ymd" and len(nums) == 3:
        d = _safe_date(int(nums[0]), int(nums[1]), int(nums[2]))
        return (d, d, "absolute") if d and len(nums[0]) == 4 else None
    if tag == "mdy" and len(nums) == 3:
        d = _safe_date(int(nums[2]), int(nums[0]), int(nums[1]))
        return (d, d, "absolute") if d and len(nums[2]) == 4 else None
    if tag == "month_year" and nums:
        month = _MONTHS.get(toks[0].norm)
        y = int(nums[-1])
        if month is None or not 1000 <= y <= 2999:
            return None
        return (*_month_interval(y, month), "absolute")
    if tag == "year" and nums:
        y = int(nums[0])
        if not 1900 <= y <= 2199:
            return None
        return (*_year_interval(y), "absolute")
    if tag in ("days_ago", "weeks_ago", "months_ago", "years_ago"):
        if anchor is None or not nums:
            return None
        n = int(nums[0])
        if tag == "days_ago":
            d = anchor - timedelta(days=n)
        elif tag == "weeks_ago":
            d = anchor - timedelta(weeks=n)
        elif tag == "months_ago":
            d = add_months(anchor, -n)
        else:
            d = add_months(anchor, -12 * n)
        return (d, d, "relative")
    if tag == "yesterday" and anchor:
        d = anchor - timedelta(days=1)
        return (d, d, "relative")
    if tag == "today" and anchor:
        return (anchor, anchor, "relative")
    if tag == "last_week" and anchor:
        d = anchor - timedelta(weeks=1)
        return (d, anchor, "relative")
    if tag == "last_month" and anchor:
        prev = add_months(anchor.replace(day=1), -1)
        return (*_month_interval(prev.year, prev.month), "relative")
    if tag == "last_year" and anchor:
        return (*_year_interval(anchor.year - 1), "relative")
    if tag.startswith("decade"):
        base = _decade_base(toks[-1].norm, anchor)
        if base is None:
            return None
        qualifier = tag.partition("_")[2]
        lo, hi = {"early": (0, 3), "mid": (4, 6), "late": (7, 9)}.get(
            qualifier, (0, 9))
        return (date(base + lo, 1, 1), date(base + hi, 12, 31), "decade")
    return None


def find_expressions(tokens: list[Token], temporal_trie: TokenTrie,
                     anchor_date: Optional[date]) -> list[TemporalExpression]:
    """All temporal expressions in a token list, longest-span preferred.

    Expressions fully contained in a longer parsed expression are dropped
    (a bare year inside a full date, for instance).
    """
    parsed = []
    for m in temporal_trie.scan(tokens, OverlapPolicy.ALL):
        toks = list(tokens[m.token_begin:m.token_end])
        for rule in m.rule_ids:
            result = _interpret(rule.tag, toks, anchor_date)
            if result is not None:
                earliest, latest, kind = result
                parsed.append(TemporalExpression(
                    m.begin, m.end, m.token_begin, m.token_end,
                    earliest, latest, kind))
                break
    parsed.sort(key=lambda e: (e.token_begin, -(e.token_end - e.token_begin)))
    kept: list[TemporalExpression] = []
    for e in parsed:
        if any(k.token_begin <= e.token_begin and k.token_end >= e.token_end
               and (k.token_begin, k.token_end) != (e.token_begin, e.token_end)
               for k in kept):
            continue
        if any((k.token_begin, k.token_end) == (e.token_begin, e.token_end)
               for k in kept):
            continue
        kept.append(e)
    return kept


def parse_temporal_expression(tokens: list[Token], temporal_trie: TokenTrie,
                              anchor_date: Optional[date]
                              ) -> Optional[TemporalExpression]:
    """First temporal expression in a token list, if any."""
    found = find_expressions(tokens, temporal_trie, anchor_date)
    return found[0] if found else None


def resolve_event_date(mention: Mention,
                       expressions: list[TemporalExpression],
                       record_date: Optional[date],
                       window_tokens: int = DEFAULT_EXPRESSION_WINDOW_TOKENS
                       ) -> ResolvedEventDate:
    """Date interval for a mention: nearest same-sentence expression within
    the token window, else the document record date, else undatable."""
    best = None
    for e in expressions:
        if e.token_begin >= mention.token_end:
            gap = e.token_begin - mention.token_end + 1
        elif e.token_end <= mention.token_begin:
            gap = mention.token_begin - e.token_end + 1
        else:
            gap = 0
        if gap > window_tokens:
            continue
        # ties go to the expression that follows the mention
        key = (gap, 0 if e.token_begin >= mention.token_end else 1,
               e.token_begin)
        if best is None or key < best[0]:
            best = (key, e)
    if best is not None:
        e = best[1]
        return ResolvedEventDate(e.earliest, e.latest, "expression")
    if record_date is not None:
        return ResolvedEventDate(record_date, record_date, "document_date")
    return ResolvedEventDate(None, None, "undatable")


def classify_temporality(resolved: ResolvedEventDate, record_date: date,
                         history_threshold_days: int =
                         DEFAULT_HISTORY_THRESHOLD_DAYS) -> Optional[str]:
    """historical iff the interval ends strictly before the record date
    minus the threshold; None when the interval is empty."""
    if resolved.latest is None:
        return None
    cutoff = record_date - timedelta(days=history_threshold_days)
    return "historical" if resolved.latest < cutoff else "present"
