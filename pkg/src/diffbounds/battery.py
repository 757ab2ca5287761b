"""Standard instance batteries for the verification commands.

The point sets span the structural range the bounds claim universality
over: periodic, quasiperiodic, random hard-core packings, and a
pathological configuration (a tight cluster at the minimal distance plus
far outliers) that no regularity assumption would cover.
"""

from __future__ import annotations

import numpy as np

from .observables import gaussian
from .pointset import PointSet, fibonacci_chain, hardcore_random, lattice

__all__ = ["norm_battery", "small_enumeration_battery", "pathological_set"]


def pathological_set(dim: int = 1) -> PointSet:
    """Cluster at exactly the hard-core distance plus far outliers."""
    if dim == 1:
        pts = np.array([[0.0], [1.0], [2.0], [3.0], [50.0], [120.0]])
    else:
        pts = np.array(
            [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [40.0, 0.0], [0.0, 90.0]]
        )
    return PointSet(dim=dim, points=pts, min_dist=1.0, label=f"cluster+outliers(dim={dim})")


def _norm_point_sets() -> list[PointSet]:
    return [
        lattice(1, 1.0, 8.0),
        lattice(1, 0.5, 5.0),
        fibonacci_chain(21, 1.0),
        hardcore_random(1, 1.0, 12.0, seed=101),
        pathological_set(1),
        lattice(2, 1.0, 3.0),
        hardcore_random(2, 1.0, 4.5, seed=202),
    ]


def norm_battery() -> list[dict]:
    """Instances for the domination checks: >= 50 (set, sigma, delta) combos.

    Entries carry {"pointset", "sigma", "delta"}; delta None requests the
    plain norm domination, a number requests the seminorm domination
    (delta is chosen as a fraction of the certified minimal distance so the
    contracted scale stays positive).
    """
    sets = _norm_point_sets()
    instances: list[dict] = []
    for ps in sets:
        for sigma in (0.25, 0.5, 1.0, 2.0):
            instances.append({"pointset": ps, "sigma": sigma, "delta": None})
    for ps in (sets[0], sets[2], sets[4], sets[5], sets[6]):
        for sigma in (0.5, 1.0, 2.0):
            for frac in (1.0 / 8.0, 1.0 / 16.0):
                instances.append(
                    {"pointset": ps, "sigma": sigma, "delta": frac * ps.min_dist}
                )
    return instances


def small_enumeration_battery() -> list[PointSet]:
    """Point sets small enough for full configuration enumeration (<= 12 sites)."""
    return [
        lattice(1, 1.0, 4.0),
        fibonacci_chain(10, 1.0),
        lattice(2, 1.0, 1.5),
        hardcore_random(1, 1.0, 5.5, seed=77),
        pathological_set(1),
    ]


def observables_for(instances: list[dict]) -> dict:
    """Shared observable objects per (dim, sigma), so norm caches hit."""
    out = {}
    for inst in instances:
        key = (inst["pointset"].dim, inst["sigma"])
        if key not in out:
            out[key] = gaussian(*key)
    return out
