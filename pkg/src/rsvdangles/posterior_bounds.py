"""Posterior (a posteriori) deterministic certificates from residual norms.

Two families:

* ratio bounds: per-index min of two residual-spectrum-to-spectrum ratios,
  valid for any orthonormal basis whose range lies inside the column (row)
  space of the matrix;
* gap bounds: bounds driven by the norms of the residual blocks of the
  delivered rank-l approximation together with spectral gaps at index k.

With ``ahat = u * sigma @ v.T`` the three residual ingredients are computed
through the norm identities

    in-basis residual      ||(a - ahat) @ v||
    beyond-k residual      ||(a - ahat) @ v[:, k:]||_2
    out-of-basis residual  ||a - a @ v @ v.T||_2

and the gaps, defined whenever sigma_k exceeds both sigma_hat_{k+1} and the
out-of-basis residual norm, are

    gap_sigma_1 = (sigma_k^2 - sigma_hat_{k+1}^2) / sigma_k
    gap_sigma_2 = (sigma_k^2 - sigma_hat_{k+1}^2) / sigma_hat_{k+1}
    gap_resid_1 = (sigma_k^2 - out^2) / sigma_k
    gap_resid_2 = (sigma_k^2 - out^2) / out

All bound values are emitted in ascending-angle order; per-index variants
carry the factor sigma_k / sigma_i at position i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import Spectrum, as_matrix, spectral_norm_power, svd_full
from .prior_bounds import BoundReport, make_report
from .rsvd import RsvdOutput


@dataclass(frozen=True)
class ResidualStats:
    """Residual norms of a rank-l approximation plus the index-k gaps.

    Gap fields are None when the assumptions sigma_k > sigma_hat_{k+1} and
    sigma_k > out-of-basis norm fail; that is a value state, not an error.
    """

    resid_in_basis_2: float
    resid_in_basis_fro: float
    resid_beyond_k_2: float
    resid_out_of_basis_2: float
    sigma_hat_next: float
    sigma_k: float
    gap_sigma_1: float | None = None
    gap_sigma_2: float | None = None
    gap_resid_1: float | None = None
    gap_resid_2: float | None = None

    @property
    def gaps_present(self) -> bool:
        return self.gap_resid_1 is not None


def residual_spectrum(a, basis, side: str) -> Spectrum:
    """Full singular spectrum of the projected residual.

    side "left" gives sigma((I - Q Q^T) a), side "right" sigma(a (I - Q Q^T)).
    """
    a = as_matrix(a)
    basis = as_matrix(basis, "basis")
    if side == "left":
        resid = a - basis @ (basis.T @ a)
    elif side == "right":
        resid = a - (a @ basis) @ basis.T
    else:
        raise ValueError("side must be 'left' or 'right'")
    return Spectrum.from_values(np.linalg.svd(resid, compute_uv=False))


def residual_ratio_bounds(residual: Spectrum, true_spectrum: Spectrum, k: int,
                          side: str = "left") -> BoundReport:
    """Per-index bound min(residual_{k-i+1} / sigma_k, residual_1 / sigma_i).

    ``residual`` is the projected-residual spectrum from
    :func:`residual_spectrum`; sigma values come from ``true_spectrum``
    (which may equally be a padded approximation). Requires sigma_k > 0.
    """
    if k < 1 or k > residual.size:
        raise ValueError("k out of range for the residual spectrum")
    if k > true_spectrum.size or true_spectrum.values[k - 1] == 0.0:
        raise ValueError("target rank exceeds numerical rank")
    sigma_k = true_spectrum.values[k - 1]
    res = residual.values
    # ascending-angle position i pairs with residual value sigma_{k-i+1}(res)
    by_gap = res[k - 1::-1] / sigma_k
    by_index = res[0] / true_spectrum.values[:k]
    vals = np.minimum(by_gap, by_index)
    params = {"residual_top": float(res[0]), "sigma_k": float(sigma_k)}
    return make_report(vals, "residual_ratio", side, params)


def _spec_norm(x: np.ndarray, power_iters: int | None, seed: int) -> float:
    if power_iters is None:
        s = np.linalg.svd(x, compute_uv=False)
        return float(s[0]) if s.size else 0.0
    return spectral_norm_power(x, iters=power_iters, seed=seed)


def residual_blocks(a, out: RsvdOutput, k: int, sigma_k: float | None = None,
                    power_iters: int | None = None, power_seed: int = 0) -> ResidualStats:
    """Residual-block norms and gaps for a delivered rank-l approximation.

    Norms are exact by default (dense SVD); pass ``power_iters`` to estimate
    the three spectral norms with the randomized power method instead. When
    ``sigma_k`` is omitted it is taken from the exact spectrum of ``a``.
    """
    a = as_matrix(a)
    f = out.factors
    l = f.width
    if not 1 <= k < l:
        raise ValueError("need 1 <= k < l")
    if sigma_k is None:
        sigma_k = float(svd_full(a).sigma[k - 1])
    err = a - f.reconstruct()
    in_basis = err @ f.v
    in_basis_2 = _spec_norm(in_basis, power_iters, power_seed)
    in_basis_fro = float(np.linalg.norm(in_basis))
    beyond_k_2 = _spec_norm(err @ f.v[:, k:], power_iters, power_seed)
    out_of_basis = a - (a @ f.v) @ f.v.T
    out_2 = _spec_norm(out_of_basis, power_iters, power_seed)
    sigma_hat_next = float(f.sigma[k])
    gaps = _gaps(sigma_k, sigma_hat_next, out_2)
    return ResidualStats(in_basis_2, in_basis_fro, beyond_k_2, out_2,
                         sigma_hat_next, float(sigma_k), *gaps)


def _gaps(sigma_k: float, sigma_hat_next: float, out_2: float):
    if sigma_k <= sigma_hat_next or sigma_k <= out_2:
        return (None, None, None, None)
    d_sigma = sigma_k**2 - sigma_hat_next**2
    d_resid = sigma_k**2 - out_2**2
    g1 = d_sigma / sigma_k
    g2 = d_sigma / sigma_hat_next if sigma_hat_next > 0 else np.inf
    r1 = d_resid / sigma_k
    r2 = d_resid / out_2 if out_2 > 0 else np.inf
    return (g1, g2, r1, r2)


def gap_bounds(stats: ResidualStats, spectrum: Spectrum, k: int) -> list[BoundReport]:
    """All eight gap-bound reports for one ResidualStats record.

    Kinds: gap_norm_rank_l / gap_norm_rank_k (spectral-norm bounds, the
    scalar replicated across indices) and gap_anglewise_rank_l /
    gap_anglewise_rank_k (per-index variants), each for side "left"
    (comparing against the rank-l or rank-k left basis) and "right". The
    gaps are recomputed from ``spectrum`` so one call per spectrum source
    stays self-consistent. Raises when the gap assumptions fail.
    """
    if k > spectrum.size or k < 1:
        raise ValueError("k out of range for the spectrum")
    sigma_k = float(spectrum.values[k - 1])
    shat = stats.sigma_hat_next
    out2 = stats.resid_out_of_basis_2
    if sigma_k <= shat or sigma_k <= out2:
        raise ValueError(
            "gap assumption violated (sigma_k <= sigma_hat_{k+1} or sigma_k <= residual norm)")
    g1, g2, r1, r2 = _gaps(sigma_k, shat, out2)
    in2 = stats.resid_in_basis_2
    infro = stats.resid_in_basis_fro
    e32 = stats.resid_beyond_k_2
    base = in2 / r1
    factors = sigma_k / spectrum.values[:k]  # ascending, <= 1
    common = {"sigma_k": sigma_k, "sigma_hat_next": shat,
              "gap_sigma_1": g1, "gap_sigma_2": g2,
              "gap_resid_1": r1, "gap_resid_2": r2}

    def rep(vals, kind, side, **extra):
        return make_report(vals, kind, side, {**common, **extra})

    k_left_amp = np.sqrt(1.0 + (factors * e32 / g2) ** 2)
    k_right_amp = np.sqrt((factors * e32 / g1) ** 2 + (out2 / sigma_k) ** 2)
    return [
        rep(np.full(k, base), "gap_norm_rank_l", "left", frobenius_bound=infro / r1),
        rep(np.full(k, in2 / r2), "gap_norm_rank_l", "right", frobenius_bound=infro / r2),
        rep(np.full(k, base * np.sqrt(1.0 + (e32 / g2) ** 2)), "gap_norm_rank_k", "left",
            frobenius_bound=(infro / r1) * np.sqrt(1.0 + (e32 / g2) ** 2)),
        rep(np.full(k, base * np.sqrt((e32 / g1) ** 2 + (out2 / sigma_k) ** 2)),
            "gap_norm_rank_k", "right",
            frobenius_bound=(infro / r1) * np.sqrt((e32 / g1) ** 2 + (out2 / sigma_k) ** 2)),
        rep(factors * base, "gap_anglewise_rank_l", "left"),
        rep(factors * (in2 / r2), "gap_anglewise_rank_l", "right"),
        rep(base * k_left_amp, "gap_anglewise_rank_k", "left"),
        rep(base * k_right_amp, "gap_anglewise_rank_k", "right"),
    ]
