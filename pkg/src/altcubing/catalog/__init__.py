"""Bundled diagrams.

Only the three links built from regular ideal polyhedra carry a volume;
their values come from the Lobachevsky function, never from the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from ..special import lobachevsky

__all__ = ["CatalogEntry", "CATALOG_DIR", "names", "entry", "entries"]

CATALOG_DIR = Path(__file__).resolve().parent

# name -> (multiplicity, angle, provenance)
_ORACLES = {
    "4_1": (6, math.pi / 3, "6*Lambda(pi/3): two regular ideal tetrahedra"),
    "L5a1": (8, math.pi / 4, "8*Lambda(pi/4): one regular ideal octahedron"),
    "L6a4": (16, math.pi / 4, "16*Lambda(pi/4): two regular ideal octahedra"),
}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    title: str
    path: Path
    pd_text: str
    expected_volume: float | None
    provenance: str | None
    expected_flags: tuple = (("alternating", True), ("reduced", True),
                             ("prime", True), ("crossing_count_ok", True))


def names() -> list[str]:
    return sorted(p.stem for p in CATALOG_DIR.glob("*.pd"))


def entry(name: str) -> CatalogEntry:
    path = CATALOG_DIR / f"{name}.pd"
    if not path.exists():
        raise KeyError(f"no catalog entry {name!r}; have {names()}")
    text = path.read_text(encoding="utf-8")
    title = text.splitlines()[0].lstrip("# ").strip()
    vol, prov = None, None
    if name in _ORACLES:
        k, theta, prov = _ORACLES[name]
        vol = k * lobachevsky(theta)
    return CatalogEntry(name, title, path, text, vol, prov)


def entries() -> list[CatalogEntry]:
    return [entry(n) for n in names()]
