"""Finite-volume autocorrelation functionals and their exact disorder moments.

The measured quantity is gamma_r(alpha) = (1/n) sum over ordered site
pairs of the pair contribution (amplitude products for kind A, displaced
differences for kind B). The centered, non-normalized variable is
X = n (gamma_r - mean(gamma_r)); its exact mean and second moment follow
from per-site moments by independence, in O(n^2 m^2) for supports of
size m, with a brute-force configuration enumeration as the fallback
certifier on tiny instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import norms
from .observables import Observable
from .pointset import PointSet
from .scatterers import (
    AmplitudeSpec,
    DislocationSpec,
    Sample,
    bounds_of,
    delta_of,
)

__all__ = [
    "CorrelationValue",
    "CenteredStats",
    "autocorr_A",
    "autocorr_B",
    "autocorr_A_many",
    "autocorr_B_many",
    "exact_mean_A",
    "exact_mean_B",
    "mean_density_B",
    "debye_waller_density",
    "centered_value",
    "exact_variance",
]

REALNESS_TOL = 1e-10
FAST_PATH_MAX_ENTRIES = 2**27  # cap on m^2 n^2 alpha-matrix storage


@dataclass(frozen=True)
class CorrelationValue:
    """One evaluated autocorrelation functional."""

    value: complex
    normalized: bool = True  # divided by the number of sites


@dataclass(frozen=True)
class CenteredStats:
    """Exact moments of the centered variable X (or Y for kind B)."""

    mean: complex  # disorder mean of gamma_r(alpha)
    variance: float  # E[X^2], real for admissible observables
    s_or_q: float  # normalized variance s_r (kind A) or q_r (kind B)
    method: str  # "moment-decomposition" | "enumeration"


def _alpha_matrix(obs: Observable, ps: PointSet, shift=None):
    diffs = ps.points[:, None, :] - ps.points[None, :, :]
    if shift is not None:
        diffs = diffs + shift
    vals = np.asarray(obs.eval_x(diffs))
    return vals


def _as_real(value, what: str):
    if np.iscomplexobj(value):
        scale = max(1.0, float(np.max(np.abs(value))))
        if np.max(np.abs(np.imag(value))) > REALNESS_TOL * scale:
            raise ValueError(f"{what} has non-negligible imaginary part")
        return np.real(value)
    return value


def autocorr_A(ps: PointSet, sample: Sample, obs: Observable) -> CorrelationValue:
    """(1/n) sum over ordered pairs (x, x') of eta_x conj(eta_x') alpha(x - x')."""
    if sample.kind != "A" or len(sample) != len(ps):
        raise ValueError("sample must be kind A and match the point set")
    A = _alpha_matrix(obs, ps)
    eta = np.asarray(sample.values, dtype=complex)
    val = np.dot(eta @ A, np.conj(eta)) / len(ps)
    return CorrelationValue(value=complex(val))


def autocorr_A_many(ps: PointSet, values: np.ndarray, obs: Observable) -> np.ndarray:
    """Row-wise autocorr_A over a (n_samples, n) amplitude stack."""
    A = _alpha_matrix(obs, ps)
    E = np.asarray(values, dtype=complex)
    return np.einsum("ki,ij,kj->k", E, A, np.conj(E), optimize=True) / len(ps)


def autocorr_B(ps: PointSet, sample: Sample, obs: Observable) -> CorrelationValue:
    """(1/n) sum over ordered pairs of alpha(x - x' + w_x - w_x')."""
    if sample.kind != "B" or len(sample) != len(ps):
        raise ValueError("sample must be kind B and match the point set")
    w = np.asarray(sample.values, dtype=float)
    shift = w[:, None, :] - w[None, :, :]
    vals = _alpha_matrix(obs, ps, shift=shift)
    return CorrelationValue(value=complex(vals.sum() / len(ps)))


def _union_support(spec: DislocationSpec, n: int):
    """Union of site supports as (m, dim) array plus per-site probability
    rows aligned to it (zero where a vector is absent from a site)."""
    dists = spec.site_distributions(n)
    seen: dict[bytes, int] = {}
    vectors: list[np.ndarray] = []
    for d in dists:
        vals = np.atleast_2d(np.asarray(d.values, dtype=float))
        for row in vals:
            key = row.tobytes()
            if key not in seen:
                seen[key] = len(vectors)
                vectors.append(row)
    U = np.asarray(vectors)
    P = np.zeros((n, len(vectors)))
    for i, d in enumerate(dists):
        vals = np.atleast_2d(np.asarray(d.values, dtype=float))
        for row, prob in zip(vals, d.probs):
            P[i, seen[row.tobytes()]] += prob
    return U, P


def _shifted_alpha_stack(obs: Observable, ps: PointSet, U: np.ndarray):
    """AB[a, b] = alpha matrix with shift U_a - U_b; (m, m, n, n)."""
    n = len(ps)
    m = len(U)
    if m * m * n * n > FAST_PATH_MAX_ENTRIES:
        raise MemoryError(
            f"support-indexed path needs {m * m * n * n} matrix entries; "
            "reduce sites or support size"
        )
    first = _alpha_matrix(obs, ps, shift=(U[0] - U[0]))
    AB = np.empty((m, m, n, n), dtype=first.dtype)
    for a in range(m):
        for b in range(m):
            AB[a, b] = first if (a == b == 0) else _alpha_matrix(obs, ps, shift=(U[a] - U[b]))
    return AB


def autocorr_B_many(
    ps: PointSet, spec: DislocationSpec, index_matrix: np.ndarray, obs: Observable
) -> np.ndarray:
    """Batch autocorr_B from support indices (n_samples, n) drawn for spec.

    Uses the support-indexed quadratic-form path: one matrix product per
    ordered support pair, so the per-sample cost is independent of the
    observable.
    """
    n = len(ps)
    dists = spec.site_distributions(n)
    U, _ = _union_support(spec, n)
    # map per-site support index -> union index
    lut = np.zeros((n, max(len(d.probs) for d in dists)), dtype=np.int64)
    seen = {row.tobytes(): i for i, row in enumerate(U)}
    for i, d in enumerate(dists):
        vals = np.atleast_2d(np.asarray(d.values, dtype=float))
        for j, row in enumerate(vals):
            lut[i, j] = seen[row.tobytes()]
    uidx = lut[np.arange(n)[None, :], index_matrix]
    AB = _shifted_alpha_stack(obs, ps, U)
    m = len(U)
    out = np.zeros(index_matrix.shape[0], dtype=AB.dtype)
    for a in range(m):
        Ea = (uidx == a).astype(float)
        if not Ea.any():
            continue
        for b in range(m):
            Eb = (uidx == b).astype(float)
            if not Eb.any():
                continue
            out += np.einsum("kj,kj->k", Ea @ AB[a, b], Eb, optimize=True)
    return out / n


def _amp_moments(spec: AmplitudeSpec, n: int):
    """Per-site moments: mean, E eta^2, E |eta|^2, E eta|eta|^2, E |eta|^4."""
    dists = spec.site_distributions(n)
    m = np.empty(n, dtype=complex)
    p = np.empty(n, dtype=complex)
    q = np.empty(n, dtype=float)
    r = np.empty(n, dtype=complex)
    t = np.empty(n, dtype=float)
    for i, d in enumerate(dists):
        v = np.asarray(d.values, dtype=complex)
        w = d.probs
        m[i] = np.dot(w, v)
        p[i] = np.dot(w, v * v)
        q[i] = np.dot(w, np.abs(v) ** 2).real
        r[i] = np.dot(w, v * np.abs(v) ** 2)
        t[i] = np.dot(w, np.abs(v) ** 4).real
    return m, p, q, r, t


def exact_mean_A(ps: PointSet, spec: AmplitudeSpec, obs: Observable) -> complex:
    """Exact disorder mean of gamma_r(alpha) for kind A.

    Mean-field pair sum with the amplitudes replaced by their means, plus
    the diagonal second-moment term alpha(0) * mean(|eta|^2) per site.
    """
    n = len(ps)
    m, _, q, _, _ = _amp_moments(spec, n)
    A = _alpha_matrix(obs, ps)
    alpha0 = complex(np.asarray(obs.eval_x(np.zeros(ps.dim))))
    A0 = A.copy()
    np.fill_diagonal(A0, 0.0)
    off = np.dot(m @ A0, np.conj(m))
    return complex((off + alpha0 * q.sum()) / n)


def exact_mean_B(ps: PointSet, spec: DislocationSpec, obs: Observable) -> complex:
    """Exact disorder mean of gamma_r(alpha) for kind B.

    Off-diagonal pairs average alpha over the product of the two site
    supports (independence); diagonal pairs contribute alpha(0) each.
    """
    n = len(ps)
    U, P = _union_support(spec, n)
    AB = _shifted_alpha_stack(obs, ps, U)
    F = np.einsum("ia,jb,abij->ij", P, P, AB, optimize=True)
    np.fill_diagonal(F, 0.0)
    alpha0 = complex(np.asarray(obs.eval_x(np.zeros(ps.dim))))
    return complex(F.sum() / n + alpha0)


def mean_density_B(ps: PointSet, spec: DislocationSpec, k) -> float:
    """k-space disorder-mean density of the kind-B diffraction measure.

    (1/n) sum over ordered pairs of E[exp(i k.(x - x' + w_x - w_x'))],
    computed from the general pair expectation (no i.i.d. assumption).
    """
    k = np.asarray(k, dtype=float).reshape(-1)
    n = len(ps)
    U, P = _union_support(spec, n)
    # characteristic values per site: c_x = E exp(i k.w_x)
    phases = np.exp(1j * (U @ k))
    c = P @ phases
    site_phase = np.exp(1j * (ps.points @ k))
    amp = site_phase * c
    total = np.sum(amp)
    diag = np.sum(np.abs(amp) ** 2)
    return float((np.abs(total) ** 2 - diag) / n + 1.0)


def debye_waller_density(ps: PointSet, spec: DislocationSpec, k) -> float:
    """Factorized i.i.d. form: gamma0_hat(k) |mu_hat(k)|^2 + (1 - |mu_hat(k)|^2).

    Only valid when all sites share one dislocation law; raises otherwise.
    """
    k = np.asarray(k, dtype=float).reshape(-1)
    n = len(ps)
    dists = spec.site_distributions(n)
    first = dists[0]
    for d in dists[1:]:
        same = (
            d is first
            or (
                np.array_equal(
                    np.atleast_2d(np.asarray(d.values, float)),
                    np.atleast_2d(np.asarray(first.values, float)),
                )
                and np.array_equal(d.probs, first.probs)
            )
        )
        if not same:
            raise ValueError("factorized form requires identically distributed sites")
    vals = np.atleast_2d(np.asarray(first.values, dtype=float))
    mu_hat = np.dot(first.probs, np.exp(1j * (vals @ k)))
    dw = float(np.abs(mu_hat) ** 2)
    site_phase = np.exp(1j * (ps.points @ k))
    gamma0 = float(np.abs(site_phase.sum()) ** 2) / n
    return gamma0 * dw + (1.0 - dw)


def centered_value(ps: PointSet, spec, sample: Sample, obs: Observable) -> complex:
    """X = n (gamma_r(sample) - exact mean); Y likewise for kind B."""
    n = len(ps)
    if spec.kind == "A":
        g = autocorr_A(ps, sample, obs).value
        mean = exact_mean_A(ps, spec, obs)
    else:
        g = autocorr_B(ps, sample, obs).value
        mean = exact_mean_B(ps, spec, obs)
    return n * (g - mean)


def _variance_A(ps: PointSet, spec: AmplitudeSpec, obs: Observable) -> complex:
    """E[X^2] by covariance bookkeeping over site coincidence patterns."""
    n = len(ps)
    m, p, q, r, t = _amp_moments(spec, n)
    A = _alpha_matrix(obs, ps).astype(complex)
    alpha0 = A[0, 0]
    A0 = A.copy()
    np.fill_diagonal(A0, 0.0)

    mbar = np.conj(m)
    S = A0 @ mbar            # S_i = sum_{j != i} A_ij conj(m_j)
    T = A0.T @ m             # T_i = sum_{k != i} A_ki m_k
    A0sq = A0 * A0
    cross = (A0 * A0.T) @ (np.abs(m) ** 2)

    diag_var = alpha0**2 * np.sum(t - q * q)
    off_diag = alpha0 * (
        np.dot(r - m * q, S) + np.dot(np.conj(r) - mbar * q, T)
    )
    same_pair = np.sum(A0sq * (p[:, None] * np.conj(p)[None, :] - (m**2)[:, None] * (mbar**2)[None, :]))
    transposed = np.sum(A0 * A0.T * (q[:, None] * q[None, :] - (np.abs(m) ** 2)[:, None] * (np.abs(m) ** 2)[None, :]))
    head_head = np.dot(p - m * m, S * S - A0sq @ (mbar * mbar))
    tail_tail = np.dot(np.conj(p) - mbar * mbar, T * T - A0sq.T @ (m * m))
    head_tail = 2.0 * np.dot(q - np.abs(m) ** 2, S * T - cross)

    return diag_var + 2.0 * off_diag + same_pair + transposed + head_head + tail_tail + head_tail


def _variance_B(ps: PointSet, spec: DislocationSpec, obs: Observable) -> complex:
    """E[Y^2] via head/tail conditional means on the union support."""
    n = len(ps)
    U, P = _union_support(spec, n)
    AB = _shifted_alpha_stack(obs, ps, U).astype(complex)
    for a in range(len(U)):
        for b in range(len(U)):
            np.fill_diagonal(AB[a, b], 0.0)

    F = np.einsum("ia,jb,abij->ij", P, P, AB, optimize=True)
    H = np.einsum("abij,jb->ija", AB, P, optimize=True)  # head-conditional
    T = np.einsum("abij,ia->ijb", AB, P, optimize=True)  # tail-conditional

    Ef2 = np.einsum("ia,jb,abij->ij", P, P, AB * AB, optimize=True)
    ABt = AB.transpose(1, 0, 3, 2)  # [a,b,i,j] -> AB[b,a,j,i]
    Efji = np.einsum("ia,jb,abij->ij", P, P, AB * ABt, optimize=True)

    same_pair = np.sum(Ef2 - F * F)
    transposed = np.sum(Efji - F * F.T)

    RH = H.sum(axis=1)            # (n, m): sum over partners j of H[i, j, a]
    sumH2 = np.einsum("ija,ija->ia", H, H)
    CT = T.sum(axis=0)            # (n, m): sum over partners i of T[i, j, b]
    sumT2 = np.einsum("ijb,ijb->jb", T, T)
    RF = F.sum(axis=1)
    CF = F.sum(axis=0)
    sumF2_row = np.einsum("ij,ij->i", F, F)
    sumF2_col = np.einsum("ij,ij->j", F, F)
    cross_FFt = np.einsum("ij,ji->j", F, F)  # sum_i F_ij F_ji per shared site

    head_head = np.sum(P * (RH * RH - sumH2)) - np.sum(RF * RF - sumF2_row)
    tail_tail = np.sum(P * (CT * CT - sumT2)) - np.sum(CF * CF - sumF2_col)
    cross_d = np.einsum("ijb,jib->jb", T, H)
    tail_head = np.sum(P * (CT * RH - cross_d)) - np.sum(CF * RF - cross_FFt)
    cross_e = np.einsum("ija,jia->ia", H, T)
    head_tail = np.sum(P * (RH * CT - cross_e)) - np.sum(RF * CF - cross_FFt)

    return same_pair + transposed + head_head + tail_tail + tail_head + head_tail


def _enumerated_variance(ps: PointSet, spec, obs: Observable) -> complex:
    from .experiments import enumerate_exact  # deferred: experiments imports us

    dist = enumerate_exact(ps, spec, obs)
    return complex(np.dot(dist.probs, dist.values**2))


ENUMERATION_FALLBACK_MAX_SITES = 12


def exact_variance(
    ps: PointSet, spec, obs: Observable, method: str = "auto"
) -> CenteredStats:
    """Exact E[X^2] (kind A) or E[Y^2] (kind B) with its normalization.

    The normalized variance divides by n and by the squared bound scale
    (K ||alpha||_Gamma for kind A, ||alpha||_{Gamma,delta} for kind B); it
    is the measured counterpart of the worst-case constant 4.
    """
    n = len(ps)
    if spec.kind == "A":
        mean = exact_mean_A(ps, spec, obs)
    else:
        mean = exact_mean_B(ps, spec, obs)

    if method not in ("auto", "moment", "enumeration"):
        raise ValueError(f"unknown method {method!r}")
    if method == "enumeration":
        if n > ENUMERATION_FALLBACK_MAX_SITES:
            raise ValueError("enumeration fallback limited to small instances")
        var = _enumerated_variance(ps, spec, obs)
        used = "enumeration"
    else:
        var = _variance_A(ps, spec, obs) if spec.kind == "A" else _variance_B(ps, spec, obs)
        used = "moment-decomposition"
    var_real = float(_as_real(np.asarray(var), "variance"))
    if var_real < 0:
        if var_real < -1e-9 * max(1.0, abs(var_real)):
            raise ValueError(f"negative variance {var_real!r}")
        var_real = 0.0

    if spec.kind == "A":
        scale = bounds_of(spec, n).K * norms.gamma_norm(obs, ps).value
    else:
        scale = norms.gamma_delta_seminorm(obs, ps, delta_of(spec, n)).value
    s_or_q = var_real / (n * scale * scale) if scale > 0 else 0.0
    return CenteredStats(mean=mean, variance=var_real, s_or_q=s_or_q, method=used)
