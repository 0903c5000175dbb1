"""Witness collection over many places and the resulting generation report."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor

from . import groups
from .funcfield import PlaceFin, places_up_to
from .module import FrobModule
from .solver import DEFAULT_M_MAX, Witness, extract_witness

log = logging.getLogger(__name__)


def thread_count(default: int = 1) -> int:
    raw = os.environ.get("DGW_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"DGW_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError("DGW_THREADS must be a positive integer")
    return n


def collect_witnesses(m: FrobModule, d_max: int, N: int = 8, M_max: int = DEFAULT_M_MAX,
                      threads: int = 1, seed=None, places: list[PlaceFin] | None = None,
                      skip=()) -> list[Witness]:
    """Witnesses at every finite place of degree <= d_max, in place order."""
    if places is None:
        places = [pl for pl in places_up_to(m.F, d_max) if pl not in set(skip)]

    def one(pl):
        return extract_witness(m, pl, N, M_max, seed)

    if threads <= 1:
        return [one(pl) for pl in places]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, places))


def certify(m: FrobModule, d_max: int = 3, N: int = 1, M_max: int = DEFAULT_M_MAX,
            threads: int = 1) -> tuple[groups.GenerationReport, list[Witness]]:
    """Generation report from the constant terms of all witnesses up to degree d_max."""
    witnesses = collect_witnesses(m, d_max, N, M_max, threads)
    report = groups.generation_report(m.F, m.n, [w.h0_codes() for w in witnesses],
                                      [w.place.label() for w in witnesses])
    return report, witnesses
