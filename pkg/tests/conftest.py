"""Shared numeric comparison helpers.

Comparisons are relative with a small absolute floor: when the true value
of a centered moment is near zero, both computation paths land within
machine-noise distance of zero and a pure relative test would divide by
nothing.  The floors are far above that noise and far below any error a
formula bug would introduce at the tested data scale (values up to 1e6).
"""

import math


def rel_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


def close(a: float, b: float, rel: float = 1e-9, floor: float = 1e-6) -> bool:
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), floor)


def assert_close(a: float, b: float, rel: float = 1e-9, floor: float = 1e-6, label: str = "") -> None:
    assert close(a, b, rel, floor), f"{label} {a!r} vs {b!r} (rel gap {rel_gap(a, b):.3g})"


def ulps_apart(a: float, b: float) -> float:
    return abs(a - b) / math.ulp(max(abs(a), abs(b), 1e-300))
