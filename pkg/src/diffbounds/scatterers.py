"""Per-site randomness: amplitude draws (kind A) and dislocation draws (kind B).

Distributions are finite-support so that means, variances and full
configuration enumerations are exact. Sites may carry individual
distributions (non-identically distributed disorder is first-class);
a default distribution covers all sites without an override.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .pointset import PointSet

__all__ = [
    "SiteDistribution",
    "AmplitudeSpec",
    "AmplitudeBounds",
    "DislocationSpec",
    "Sample",
    "sample",
    "sample_values_many",
    "bounds_of",
    "delta_of",
    "spec_from_json",
    "spec_to_json",
]

PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SiteDistribution:
    """Finite-support distribution: values[i] drawn with probability probs[i].

    values is (m,) complex for amplitudes or (m, dim) float for dislocations.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        probs = np.asarray(self.probs, dtype=float)
        if len(vals) != len(probs) or len(vals) == 0:
            raise ValueError("values and probs must be equal-length and non-empty")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        if not np.all(np.isfinite(vals.view(float) if vals.dtype.kind == "c" else vals)):
            raise ValueError("support values must be finite")
        vals.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "probs", probs)

    def mean(self):
        return (self.values.T @ self.probs).T if self.values.ndim > 1 else self.values @ self.probs


def _site_table(default: SiteDistribution, overrides: dict, n: int) -> list[SiteDistribution]:
    out = []
    for i in range(n):
        out.append(overrides.get(i, default))
    return out


@dataclass(frozen=True, eq=False)
class AmplitudeSpec:
    """Kind-A disorder: independent complex scattering amplitudes per site."""

    default: SiteDistribution
    overrides: dict[int, SiteDistribution] = field(default_factory=dict)

    kind = "A"

    def __post_init__(self):
        if self.default.values.ndim != 1:
            raise ValueError("amplitude support must be scalar complex values")
        for i, d in self.overrides.items():
            if i < 0:
                raise ValueError(f"negative site index {i}")
            if d.values.ndim != 1:
                raise ValueError("amplitude support must be scalar complex values")

    def site_distributions(self, n: int) -> list[SiteDistribution]:
        bad = [i for i in self.overrides if i >= n]
        if bad:
            raise ValueError(f"override site indices {bad} out of range for {n} sites")
        return _site_table(self.default, self.overrides, n)


@dataclass(frozen=True)
class AmplitudeBounds:
    """Uniform bounds across sites: |mean| <= M, |value - mean| <= B; K = 2MB + B^2."""

    M: float
    B: float
    K: float

    def __post_init__(self):
        if self.M < 0 or self.B < 0:
            raise ValueError("bounds must be non-negative")
        expected = 2.0 * self.M * self.B + self.B**2
        if not math.isclose(self.K, expected, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError(f"K={self.K!r} inconsistent with 2MB+B^2={expected!r}")


@dataclass(frozen=True, eq=False)
class DislocationSpec:
    """Kind-B disorder: independent bounded displacement vectors per site."""

    dim: int
    default: SiteDistribution
    delta: float
    overrides: dict[int, SiteDistribution] = field(default_factory=dict)

    kind = "B"

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        for d in [self.default, *self.overrides.values()]:
            vals = np.atleast_2d(np.asarray(d.values, dtype=float))
            if vals.shape[1] != self.dim:
                raise ValueError(f"dislocation vectors must have dim {self.dim}")
            mags = np.sqrt(np.sum(vals**2, axis=1))
            if np.any(mags > self.delta):
                raise ValueError(
                    f"support vector of magnitude {mags.max()!r} exceeds delta={self.delta!r}"
                )

    def site_distributions(self, n: int) -> list[SiteDistribution]:
        bad = [i for i in self.overrides if i >= n]
        if bad:
            raise ValueError(f"override site indices {bad} out of range for {n} sites")
        return _site_table(self.default, self.overrides, n)


@dataclass(frozen=True, eq=False)
class Sample:
    """One drawn disorder realization, indexed like the point set.

    values: (n,) complex for kind A, (n, dim) float for kind B.
    """

    kind: str
    values: np.ndarray
    seed: int

    def __post_init__(self):
        if self.kind not in ("A", "B"):
            raise ValueError(f"kind must be 'A' or 'B', got {self.kind!r}")
        v = np.asarray(self.values)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]


def _site_uniforms(seed: int, n: int) -> np.ndarray:
    """The i-th entry depends only on (seed, i): one shared counter stream."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    return rng.random(n)


def _values_from_uniforms(dists: list[SiteDistribution], u: np.ndarray, kind: str, dim: int):
    n = len(dists)
    if kind == "A":
        out = np.empty(n, dtype=complex)
    else:
        out = np.empty((n, dim), dtype=float)
    for i, d in enumerate(dists):
        edges = np.cumsum(d.probs)
        idx = min(int(np.searchsorted(edges, u[i], side="right")), len(d.probs) - 1)
        vals = d.values if kind == "A" else np.atleast_2d(np.asarray(d.values, dtype=float))
        out[i] = vals[idx]
    return out


def sample(spec, ps: PointSet, seed: int) -> Sample:
    """Draw one independent realization; deterministic in (spec, seed).

    Site i's draw is a function of (seed, i) only, so realizations stay
    aligned with site indices across runs.
    """
    n = len(ps)
    dists = spec.site_distributions(n)
    u = _site_uniforms(seed, n)
    if spec.kind == "A":
        values = _values_from_uniforms(dists, u, "A", 0)
    else:
        if spec.dim != ps.dim:
            raise ValueError(f"spec dim {spec.dim} != point set dim {ps.dim}")
        values = _values_from_uniforms(dists, u, "B", ps.dim)
    return Sample(kind=spec.kind, values=values, seed=int(seed))


def derived_seed(seed: int, k: int) -> np.random.SeedSequence:
    """Per-draw child seed used by Monte Carlo loops."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(int(k),))


def sample_index_matrix(
    spec, ps: PointSet, seed: int, n_samples: int, start: int = 0
) -> np.ndarray:
    """(n_samples, n) support indices; row k is the draw for child seed start+k.

    Indices refer to each site's own distribution support. Sites sharing a
    distribution are resolved in one vectorized pass.
    """
    n = len(ps)
    dists = spec.site_distributions(n)
    u = np.empty((n_samples, n), dtype=float)
    for k in range(n_samples):
        rng = np.random.Generator(np.random.PCG64(derived_seed(seed, start + k)))
        u[k] = rng.random(n)
    out = np.empty((n_samples, n), dtype=np.int64)
    for d, cols in _group_by_distribution(dists).items():
        edges = np.cumsum(d.probs)
        idx = np.searchsorted(edges, u[:, cols], side="right")
        out[:, cols] = np.minimum(idx, len(d.probs) - 1)
    return out


def _group_by_distribution(dists: list[SiteDistribution]) -> dict[SiteDistribution, list[int]]:
    groups: dict[SiteDistribution, list[int]] = {}
    for i, d in enumerate(dists):
        groups.setdefault(d, []).append(i)
    return groups


def sample_values_many(spec, ps: PointSet, seed: int, n_samples: int, start: int = 0):
    """Stack of draws: (n_samples, n) complex for A, (n_samples, n, dim) for B."""
    idx = sample_index_matrix(spec, ps, seed, n_samples, start=start)
    dists = spec.site_distributions(len(ps))
    if spec.kind == "A":
        out = np.empty(idx.shape, dtype=complex)
        for i, d in enumerate(dists):
            out[:, i] = d.values[idx[:, i]]
    else:
        out = np.empty((*idx.shape, ps.dim), dtype=float)
        for i, d in enumerate(dists):
            vals = np.atleast_2d(np.asarray(d.values, dtype=float))
            out[:, i, :] = vals[idx[:, i]]
    return out


def bounds_of(spec: AmplitudeSpec, n_sites: int | None = None) -> AmplitudeBounds:
    """Exact uniform bounds M, B and the combined constant K = 2MB + B^2.

    Without n_sites, the default distribution and all overrides are scanned
    (a superset of any site table, hence still valid bounds).
    """
    dists = (
        spec.site_distributions(n_sites)
        if n_sites is not None
        else [spec.default, *spec.overrides.values()]
    )
    M = 0.0
    B = 0.0
    for d in dists:
        m = d.mean()
        M = max(M, abs(m))
        B = max(B, float(np.max(np.abs(d.values - m))))
    return AmplitudeBounds(M=M, B=B, K=2.0 * M * B + B**2)


def delta_of(spec: DislocationSpec, n_sites: int | None = None) -> float:
    """Exact max |w| over all site supports; never exceeds spec.delta."""
    dists = (
        spec.site_distributions(n_sites)
        if n_sites is not None
        else [spec.default, *spec.overrides.values()]
    )
    best = 0.0
    for d in dists:
        vals = np.atleast_2d(np.asarray(d.values, dtype=float))
        best = max(best, float(np.max(np.sqrt(np.sum(vals**2, axis=1)))))
    return best


def _dist_from_json(obj: dict, kind: str) -> SiteDistribution:
    support = obj["support"]
    probs = obj["probs"]
    if kind == "A":
        vals = np.array([complex(re, im) for re, im in support])
    else:
        vals = np.asarray(support, dtype=float)
    return SiteDistribution(values=vals, probs=np.asarray(probs, dtype=float))


def _dist_to_json(d: SiteDistribution, kind: str) -> dict:
    if kind == "A":
        support = [[float(v.real), float(v.imag)] for v in d.values]
    else:
        support = np.atleast_2d(np.asarray(d.values, dtype=float)).tolist()
    return {"support": support, "probs": [float(p) for p in d.probs]}


def spec_from_json(doc: dict | str):
    """Parse the scatterer wire format.

    {"kind":"A"|"B", "default":{"support":...,"probs":...},
     "overrides":{"<site>":{...}}, "delta":<num, kind B>, "dim":<int, kind B>}
    """
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc.get("kind")
    if kind not in ("A", "B"):
        raise ValueError(f"kind must be 'A' or 'B', got {kind!r}")
    default = _dist_from_json(doc["default"], kind)
    overrides = {
        int(i): _dist_from_json(sub, kind) for i, sub in doc.get("overrides", {}).items()
    }
    if kind == "A":
        extra = set(doc) - {"kind", "default", "overrides"}
        if extra:
            raise ValueError(f"unknown keys in amplitude spec: {sorted(extra)}")
        return AmplitudeSpec(default=default, overrides=overrides)
    extra = set(doc) - {"kind", "default", "overrides", "delta", "dim"}
    if extra:
        raise ValueError(f"unknown keys in dislocation spec: {sorted(extra)}")
    arr = np.atleast_2d(np.asarray(default.values, dtype=float))
    dim = int(doc.get("dim", arr.shape[1]))
    return DislocationSpec(dim=dim, default=default, delta=float(doc["delta"]), overrides=overrides)


def spec_to_json(spec) -> dict:
    """Inverse of spec_from_json."""
    doc = {
        "kind": spec.kind,
        "default": _dist_to_json(spec.default, spec.kind),
        "overrides": {str(i): _dist_to_json(d, spec.kind) for i, d in spec.overrides.items()},
    }
    if spec.kind == "B":
        doc["delta"] = float(spec.delta)
        doc["dim"] = int(spec.dim)
    return doc
