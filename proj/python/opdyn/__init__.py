"""Dynamics of scaled weighted shifts: ratio classification, frequently
universal vectors, Szemeredi-type searches and certificate checking.

Every function returns plain Python data (dicts, lists, numbers) decoded from
the same JSON the command-line tool writes.
"""

from __future__ import annotations

import json as _json
from typing import Any, Iterable, Sequence

from . import _opdyn
from ._opdyn import (
    InfeasibleDecay,
    ParseError,
    ResourceCapExceeded,
    SchemaError,
    VerificationFailed,
)

__all__ = [
    "InfeasibleDecay",
    "ParseError",
    "ResourceCapExceeded",
    "SchemaError",
    "VerificationFailed",
    "build_fu",
    "classify_symbol",
    "eigen_check",
    "find_ap",
    "fhc_series_check",
    "hitting_set",
    "mr_invertible_check",
    "mr_shift_check",
    "mr_witness",
    "ratio_classify",
    "run_scenario",
    "salas_check",
    "verify_report",
]


def _load(text: str) -> Any:
    return _json.loads(text)


def ratio_classify(sequence: str, tau: int = 1, horizon: int = 1_000_000, tol: float = 1e-4,
                   modulus: int = 1, residue: int = 0) -> dict:
    """Windowed ratio test of |lambda_n| / |lambda_{n+tau}| over [horizon/2, horizon]."""
    return _load(_opdyn.ratio_classify(sequence, tau, horizon, tol, modulus, residue))


def salas_check(weights: str, eps: float, q: int, n_max: int) -> dict:
    return _load(_opdyn.salas_check(weights, eps, q, n_max))


def mr_shift_check(weights: str, m: int, q: int, eps: float, n_max: int) -> dict:
    return _load(_opdyn.mr_shift_check(weights, m, q, eps, n_max))


def mr_invertible_check(weights: str, m: int, n_max: int, G: float) -> dict:
    return _load(_opdyn.mr_invertible_check(weights, m, n_max, G))


def fhc_series_check(weights: str, n_max: int = 1_000_000, cap: float = 12.0) -> dict:
    return _load(_opdyn.fhc_series_check(weights, n_max, cap))


def hitting_set(x: str, sequence: str, side: str, weights: str, premult: str, center: str,
                radius: float, N: int, workers: int = 0) -> list[int]:
    """Indices n <= N with lambda_n T^n x inside the open ball B(center, radius)."""
    return _opdyn.hitting_set(x, sequence, side, weights, premult, center, radius, N, workers)


def find_ap(members: Iterable[int], n_max: int, m: int, tau: int = 1, K: int = 0,
            workers: int = 0) -> dict | None:
    """Smallest-k progression a, a + tau k, ..., a + m tau k inside the set, or None."""
    return _load(_opdyn.find_ap(list(members), n_max, m, tau, K, workers))


def build_fu(sequence: str, side: str, weights: str, premult: str,
             targets: Sequence[tuple[str, float]], N: int, g: int = 0, workers: int = 0) -> dict:
    """Builds and verifies a frequently universal vector; g = 0 uses the default gap."""
    return _load(_opdyn.build_fu(sequence, side, weights, premult, list(targets), N, g, workers))


def mr_witness(sequence: str, side: str, weights: str, premult: str, y: str, eps: float, m: int,
               tau: int = 1, N: int = 100_000, K: int = 0, g: int = 0, workers: int = 0) -> dict:
    return _load(_opdyn.mr_witness(sequence, side, weights, premult, y, eps, m, tau, N, K, g, workers))


def classify_symbol(symbol: str) -> dict:
    return _load(_opdyn.classify_symbol(symbol))


def eigen_check(symbol: str, z: complex, N: int = 400) -> dict:
    return _load(_opdyn.eigen_check(symbol, complex(z), N))


def run_scenario(config: dict | str, workers: int = 0) -> dict:
    """Runs a scenario config (dict or JSON text) and returns the report."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _load(_opdyn.run_scenario(text, workers))


def verify_report(report: dict | str, workers: int = 0) -> list[dict]:
    text = report if isinstance(report, str) else _json.dumps(report)
    return _load(_opdyn.verify_report(text, workers))
