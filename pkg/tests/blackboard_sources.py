"""Access to the shipped blackboard `.arch` units for tests."""
from __future__ import annotations

from archcheck.blackboard import load_blackboard_sources
from archcheck.parser import parse_unit


def source_text(name: str) -> str:
    return load_blackboard_sources()[name]


def bundle_units() -> dict:
    units = {}
    for name, text in load_blackboard_sources().items():
        unit, diagnostics = parse_unit(text)
        assert unit is not None, (name, [d.render() for d in diagnostics])
        units[name] = unit
    return units
