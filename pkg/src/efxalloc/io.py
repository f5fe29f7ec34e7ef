"""Line-oriented text formats for instances, allocations and traces.

Instance::

    efx-instance v1
    n 3
    m 4
    agent 0 additive: 5 4 3/2 1
    agent 1 table: 0 1 1 2 ...        (2^m values, bitmask-ascending)

Allocation::

    agent 0: 0 1
    agent 1:
    agent 2: 2 3
"""

from __future__ import annotations

import json
from typing import Optional

from .errors import MalformedInputError
from .model import (
    AdditiveValuation,
    Allocation,
    IterTrace,
    Profile,
    StrictifiedValuation,
    TableValuation,
    Valuation,
    as_value,
    bundle,
    format_value,
    members,
)

HEADER = "efx-instance v1"


def format_valuation(i: int, v: Valuation) -> str:
    if isinstance(v, AdditiveValuation):
        return f"agent {i} additive: " + " ".join(format_value(w) for w in v.weights)
    if isinstance(v, TableValuation):
        return f"agent {i} table: " + " ".join(format_value(x) for x in v.values)
    if isinstance(v, StrictifiedValuation):
        raise MalformedInputError(
            "strictified valuations are not serialised; write the wrapped valuation instead"
        )
    raise MalformedInputError(f"cannot serialise {type(v).__name__}")


def format_instance(profile: Profile) -> str:
    lines = [HEADER, f"n {profile.n}", f"m {profile.m}"]
    lines += [format_valuation(i, v) for i, v in enumerate(profile)]
    return "\n".join(lines) + "\n"


def _content_lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _int_field(line: str, name: str) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != name:
        raise MalformedInputError(f"expected '{name} <int>', got {line!r}")
    try:
        return int(parts[1])
    except ValueError as exc:
        raise MalformedInputError(f"expected '{name} <int>', got {line!r}") from exc


def parse_instance(text: str) -> Profile:
    lines = _content_lines(text)
    if len(lines) < 3 or lines[0] != HEADER:
        raise MalformedInputError(f"instance must start with {HEADER!r}")
    n = _int_field(lines[1], "n")
    m = _int_field(lines[2], "m")
    if n < 2 or m < 1:
        raise MalformedInputError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    body = lines[3:]
    if len(body) != n:
        raise MalformedInputError(f"expected {n} agent lines, found {len(body)}")
    vals = []
    for i, line in enumerate(body):
        head, sep, rest = line.partition(":")
        words = head.split()
        if not sep or len(words) != 3 or words[0] != "agent" or words[1] != str(i):
            raise MalformedInputError(f"bad agent line {line!r} (expected 'agent {i} <kind>: ...')")
        kind = words[2]
        nums = tuple(as_value(tok) for tok in rest.split())
        if kind == "additive":
            if len(nums) != m:
                raise MalformedInputError(f"agent {i}: expected {m} weights, got {len(nums)}")
            vals.append(AdditiveValuation(nums))
        elif kind == "table":
            if len(nums) != 1 << m:
                raise MalformedInputError(f"agent {i}: expected {1 << m} values, got {len(nums)}")
            vals.append(TableValuation(nums))
        else:
            raise MalformedInputError(f"agent {i}: unknown valuation kind {kind!r}")
    return Profile(tuple(vals))


def format_allocation(alloc: Allocation) -> str:
    return "".join(
        f"agent {i}:" + "".join(f" {g}" for g in members(b)) + "\n"
        for i, b in enumerate(alloc.bundles)
    )


def allocation_json(alloc: Allocation) -> str:
    return json.dumps({"bundles": alloc.as_lists()}, separators=(",", ":"))


def parse_allocation(text: str, n: Optional[int] = None) -> Allocation:
    """Read the line format, or the single-line JSON mirror."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            lists = data["bundles"]
            return Allocation.from_lists([[int(g) for g in goods] for goods in lists])
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedInputError(f"bad allocation JSON: {exc}") from exc
    bundles = []
    for i, line in enumerate(_content_lines(text)):
        head, sep, rest = line.partition(":")
        if not sep or head.split() != ["agent", str(i)]:
            raise MalformedInputError(f"bad allocation line {line!r} (expected 'agent {i}: ...')")
        try:
            goods = [int(tok) for tok in rest.split()]
        except ValueError as exc:
            raise MalformedInputError(f"bad good index in {line!r}") from exc
        if len(set(goods)) != len(goods):
            raise MalformedInputError(f"agent {i} lists a good twice")
        bundles.append(bundle(goods))
    if n is not None and len(bundles) != n:
        raise MalformedInputError(f"allocation lists {len(bundles)} agents, expected {n}")
    return Allocation(tuple(bundles))


def trace_json(trace: IterTrace) -> str:
    rows = [
        {
            "c": rec.c,
            "W": members(rec.w),
            "Y": members(rec.y),
            "max_size": rec.max_size,
            "case": rec.case.value if rec.case else None,
            "outcome": rec.outcome.value,
            "agent1": members(rec.agent1_bundle),
            "allocation": [members(b) for b in rec.allocation],
        }
        for rec in trace
    ]
    return json.dumps(rows, separators=(",", ":"))
