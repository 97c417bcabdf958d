"""Text and JSON formats for rules, configurations and trajectories."""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path

from .errors import AddressError, FormatError, PreconditionError
from .quotient import OneDimConfig, OneDimRule
from .rules import Rule, _ball_positions, ball_to_string, count_canonical_balls, is_well_formed, parse_ball
from .simulation import FiniteConfig
from .topology import TreeParams, format_vertex, parse_vertex


# -- tree rules ------------------------------------------------------------------

def rule_to_dict(rule: Rule) -> dict:
    return {
        "k": rule.k,
        "alphabet_size": rule.alphabet_size,
        "radius": rule.radius,
        "index": str(rule.index),
        "table": [{"ball": ball_to_string(b), "out": o} for b, o in zip(rule.balls, rule.outputs)],
    }


def rule_from_dict(data: dict) -> Rule:
    try:
        k, size, r = int(data["k"]), int(data["alphabet_size"]), int(data["radius"])
        entries = data["table"]
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"rule file needs k, alphabet_size, radius and table: {e}") from None
    try:
        TreeParams(k)
    except PreconditionError as e:
        raise FormatError(str(e)) from None
    if size < 1 or r < 0:
        raise FormatError(f"bad alphabet size {size} or radius {r}")
    positions = _ball_positions(k, size, r) if count_canonical_balls(k, size, r) <= 10**6 else None
    if positions is None:
        raise FormatError("rule table too large for a rule file")
    outputs = [None] * len(positions)
    for entry in entries:
        try:
            ball = parse_ball(str(entry["ball"]))
            out = int(entry["out"])
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"bad table entry {entry!r}: {e}") from None
        if not is_well_formed(ball, k, size, r):
            raise FormatError(f"ball {entry['ball']!r} is not a radius-{r} ball for k={k}, |A|={size}")
        if not 0 <= out < size:
            raise FormatError(f"output {out} outside alphabet")
        i = positions[ball]
        if outputs[i] is not None:
            raise FormatError(f"duplicate table entry for {ball_to_string(ball)}")
        outputs[i] = out
    missing = sum(o is None for o in outputs)
    if missing:
        raise FormatError(f"rule table is missing {missing} of {len(outputs)} canonical balls")
    rule = Rule(k, size, r, tuple(outputs))
    if "index" in data and str(data["index"]) != str(rule.index):
        raise FormatError(f"index field {data['index']} does not match the table (index {rule.index})")
    return rule


def save_rule(rule: Rule, path) -> None:
    Path(path).write_text(json.dumps(rule_to_dict(rule), indent=1) + "\n")


def load_rule(path) -> Rule:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from None
    return rule_from_dict(data)


# -- tree configurations ------------------------------------------------------------

def _pairs(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'position symbol', got {line!r}")
        yield lineno, parts[0], parts[1]


def parse_config(text: str, k: int, alphabet_size: int) -> FiniteConfig:
    cells = {}
    for lineno, word, sym in _pairs(text):
        try:
            v = parse_vertex(word, k)
            s = int(sym)
        except (AddressError, ValueError) as e:
            raise FormatError(f"line {lineno}: {e}") from None
        if v in cells:
            raise FormatError(f"line {lineno}: vertex {word} listed twice")
        if not 0 <= s < alphabet_size:
            raise FormatError(f"line {lineno}: symbol {s} outside alphabet of size {alphabet_size}")
        cells[v] = s
    return FiniteConfig(k, alphabet_size, cells)


def format_config(x: FiniteConfig) -> str:
    return "".join(f"{format_vertex(v)} {s}\n" for v, s in x.items_sorted())


def load_config(path, k: int, alphabet_size: int) -> FiniteConfig:
    return parse_config(Path(path).read_text(), k, alphabet_size)


def save_config(x: FiniteConfig, path) -> None:
    Path(path).write_text(format_config(x))


def format_trajectory(configs) -> str:
    return "".join(f"## step {n}\n" + format_config(x) for n, x in enumerate(configs))


def trajectory_to_json(configs, profile=None) -> str:
    steps = []
    for n, x in enumerate(configs):
        entry = {"step": n, "cells": {format_vertex(v): s for v, s in x.items_sorted()}}
        if profile is not None:
            entry["support_excess"] = profile[n]
        steps.append(entry)
    k = configs[0].k if configs else None
    return json.dumps({"k": k, "steps": steps}, indent=1) + "\n"


# -- one-dimensional rules and configurations ------------------------------------------

def oned_rule_to_dict(rule: OneDimRule) -> dict:
    if rule.alphabet_size > 10:
        raise FormatError("window strings need alphabet size <= 10")
    width = 2 * rule.radius + 1
    return {
        "alphabet_size": rule.alphabet_size,
        "radius": rule.radius,
        "table": [{"window": "".join(map(str, w)), "out": o}
                  for w, o in zip(product(range(rule.alphabet_size), repeat=width), rule.outputs)],
    }


def oned_rule_from_dict(data: dict) -> OneDimRule:
    try:
        size, r = int(data["alphabet_size"]), int(data["radius"])
        entries = data["table"]
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"1D rule file needs alphabet_size, radius and table: {e}") from None
    width = 2 * r + 1
    outputs = [None] * size**width
    for entry in entries:
        try:
            w = str(entry["window"])
            out = int(entry["out"])
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"bad table entry {entry!r}: {e}") from None
        if len(w) != width or not w.isdigit() or any(int(c) >= size for c in w):
            raise FormatError(f"bad window {w!r}")
        idx = 0
        for c in w:
            idx = idx * size + int(c)
        if not 0 <= out < size:
            raise FormatError(f"output {out} outside alphabet")
        if outputs[idx] is not None:
            raise FormatError(f"duplicate window {w}")
        outputs[idx] = out
    if any(o is None for o in outputs):
        raise FormatError("1D rule table is not total")
    return OneDimRule(size, r, tuple(outputs))


def save_oned_rule(rule: OneDimRule, path) -> None:
    Path(path).write_text(json.dumps(oned_rule_to_dict(rule), indent=1) + "\n")


def load_oned_rule(path) -> OneDimRule:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from None
    return oned_rule_from_dict(data)


def parse_oned_config(text: str, alphabet_size: int) -> OneDimConfig:
    cells = {}
    for lineno, level, sym in _pairs(text):
        try:
            i, s = int(level), int(sym)
        except ValueError as e:
            raise FormatError(f"line {lineno}: {e}") from None
        if i in cells:
            raise FormatError(f"line {lineno}: level {i} listed twice")
        if not 0 <= s < alphabet_size:
            raise FormatError(f"line {lineno}: symbol {s} outside alphabet")
        cells[i] = s
    return OneDimConfig(alphabet_size, cells)


def format_oned_config(x: OneDimConfig) -> str:
    return "".join(f"{i} {s}\n" for i, s in sorted(x.cells.items()))
