"""Outcomes of fuel-bounded evaluation: partiality is a value, not an exception."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Value:
    payload: Any
    precision: int


@dataclass(frozen=True)
class NeedFuel:
    consumed: int


@dataclass(frozen=True)
class Inconsistent:
    witness: tuple


EvalOutcome = Value | NeedFuel | Inconsistent
