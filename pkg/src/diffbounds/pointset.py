"""Finite point sets with a certified minimal distance.

Every downstream computation (discrete norms, autocorrelation sums,
concentration experiments) consumes a finite point configuration in
R^nu together with a lower bound `min_dist` on its pairwise distances.
Three generators span the structural range: a periodic lattice ball,
a golden-ratio substitution chain, and a hard-core random packing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PointSet",
    "GeneratorError",
    "lattice",
    "fibonacci_chain",
    "hardcore_random",
    "verify_min_distance",
    "write_csv",
    "read_csv",
]

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

# consecutive rejected candidates before random sequential adsorption stops
RSA_REJECTION_BUDGET = 1000


class GeneratorError(RuntimeError):
    """A point-set generator could not produce a valid configuration."""


@dataclass(frozen=True, eq=False)
class PointSet:
    """An ordered finite set of points in R^dim.

    `min_dist` is a certified lower bound on all pairwise Euclidean
    distances; construction verifies it exhaustively. The point order is
    part of the value: samples are indexed positionally against it.
    """

    dim: int
    points: np.ndarray  # shape (n, dim), read-only
    min_dist: float
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        pts = np.ascontiguousarray(pts)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim}), got {pts.shape}")
        if pts.shape[0] == 0:
            raise ValueError("point set must be non-empty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if not (self.min_dist > 0):
            raise ValueError(f"min_dist must be positive, got {self.min_dist}")
        if "\n" in self.label:
            raise ValueError("label must be single-line")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if len(pts) > 1:
            actual = verify_min_distance(self)
            # exact >=, no epsilon: generators are responsible for declaring
            # a min_dist their floating-point coordinates actually satisfy
            if not (actual >= self.min_dist):
                raise ValueError(
                    f"pairwise distance {actual!r} below declared min_dist {self.min_dist!r}"
                )
            if actual == 0.0:
                raise ValueError("points must be pairwise distinct")

    def __len__(self) -> int:
        return self.points.shape[0]

    def __repr__(self) -> str:
        return (
            f"PointSet(dim={self.dim}, n={len(self)}, "
            f"min_dist={self.min_dist:g}, label={self.label!r})"
        )


def _pairwise_min(pts: np.ndarray) -> float:
    """Exact minimum pairwise distance of an (n, dim) array; inf if n < 2."""
    n = len(pts)
    if n < 2:
        return math.inf
    best = math.inf
    for i in range(n - 1):
        d2 = np.sum((pts[i + 1 :] - pts[i]) ** 2, axis=1)
        m = float(np.sqrt(d2.min()))
        if m < best:
            best = m
    return best


def verify_min_distance(ps: PointSet) -> float:
    """Exact minimum over all pairwise Euclidean distances.

    Single-point sets have no pairs; returns math.inf as the sentinel.
    Exhaustive O(n^2).
    """
    return _pairwise_min(ps.points)


def _certified(nominal: float, pts: np.ndarray, dim: int, label: str) -> PointSet:
    """Build a PointSet whose declared min_dist is guaranteed by the data.

    Rounded coordinates (irrational gaps, non-representable spacings) can
    land a hair below the nominal spacing, so the certificate is the
    smaller of nominal and the verified floating-point minimum.
    """
    pts = np.asarray(pts, dtype=float)
    return PointSet(
        dim=dim, points=pts, min_dist=min(nominal, _pairwise_min(pts)), label=label
    )


def lattice(dim: int, spacing: float, radius: float) -> PointSet:
    """All points of spacing*Z^dim inside the closed ball of `radius`.

    Enumeration order is lexicographic in the integer coordinates, so the
    output is deterministic.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not (spacing > 0):
        raise ValueError(f"spacing must be positive, got {spacing}")
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    kmax = int(math.floor(radius / spacing + 1e-9))
    axes = [np.arange(-kmax, kmax + 1)] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    # closed ball: |n|^2 * spacing^2 <= radius^2
    keep = np.sum(grid.astype(float) ** 2, axis=1) * spacing**2 <= radius**2
    ints = grid[keep]
    order = np.lexsort(tuple(ints[:, c] for c in range(dim - 1, -1, -1)))
    pts = ints[order].astype(float) * spacing
    if len(pts) == 0:
        raise GeneratorError("radius too small: lattice ball is empty")
    return _certified(spacing, pts, dim, f"lattice(dim={dim},spacing={spacing:g},radius={radius:g})")


def _fibonacci_word(n_letters: int) -> str:
    """Prefix of the substitution fixed point L -> LS, S -> L, seeded with L."""
    word = "L"
    while len(word) < n_letters:
        word = "".join("LS" if c == "L" else "L" for c in word)
    return word[:n_letters]


def fibonacci_chain(n_points: int, short_len: float) -> PointSet:
    """Left endpoints of the golden-ratio substitution tiling of the line.

    Segment lengths are GOLDEN*short_len (letter L) and short_len (letter S);
    the first n_points cumulative endpoints starting at 0 are returned.
    """
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    if not (short_len > 0):
        raise ValueError(f"short_len must be positive, got {short_len}")
    word = _fibonacci_word(n_points - 1)
    gaps = np.where(np.frombuffer(word.encode(), dtype="S1") == b"L", GOLDEN * short_len, short_len)
    pts = np.concatenate([[0.0], np.cumsum(gaps)]).reshape(-1, 1)
    return _certified(short_len, pts, 1, f"fibonacci(n={n_points},short={short_len:g})")


def hardcore_random(dim: int, min_dist: float, radius: float, seed: int) -> PointSet:
    """Random sequential adsorption in the closed ball of `radius`.

    Uniform candidates are accepted iff they keep all pairwise distances
    >= min_dist; generation stops after RSA_REJECTION_BUDGET consecutive
    rejections. Deterministic for a fixed seed.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not (min_dist > 0):
        raise ValueError(f"min_dist must be positive, got {min_dist}")
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed), 0x9A11))))
    accepted: list[np.ndarray] = []
    rejects = 0
    while rejects < RSA_REJECTION_BUDGET:
        cand = rng.uniform(-radius, radius, size=dim)
        if np.sum(cand**2) > radius**2:
            continue  # outside the ball, not a hard-core rejection
        if accepted:
            d2 = np.sum((np.asarray(accepted) - cand) ** 2, axis=1)
            if not np.all(d2 >= min_dist**2):
                rejects += 1
                continue
        accepted.append(cand)
        rejects = 0
    if not accepted:
        raise GeneratorError("no points accepted: radius too small for the hard core")
    pts = np.asarray(accepted)
    return PointSet(
        dim=dim,
        points=pts,
        min_dist=min_dist,
        label=f"hardcore(dim={dim},min_dist={min_dist:g},radius={radius:g},seed={seed})",
    )


def write_csv(ps: PointSet, path) -> None:
    """Serialize to CSV with a provenance header and 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# dim={ps.dim} min_dist={ps.min_dist:.17g} label={ps.label}\n")
        for row in ps.points:
            fh.write(",".join(f"{c:.17g}" for c in row) + "\n")


def read_csv(path) -> PointSet:
    """Inverse of write_csv."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# "):
            raise ValueError(f"missing header line in {path}")
        body = header[2:]
        dim_s, rest = body.split(" min_dist=", 1)
        md_s, label = rest.split(" label=", 1)
        dim = int(dim_s.removeprefix("dim="))
        rows = [[float(c) for c in line.split(",")] for line in fh if line.strip()]
    return PointSet(dim=dim, points=np.asarray(rows), min_dist=float(md_s), label=label)
