"""Bandpass filter banks on the normalized spectrum, applied via the
Chebyshev three-term recurrence.

A band [a, b] in raw eigenvalue units maps onto [-1, 1] through
``x = 2 * lam / lambda_max - 1``. The truncated Chebyshev expansion of
the band indicator has the closed-form coefficients

    theta_0 = (arccos(a~) - arccos(b~)) / pi
    theta_k = 2 * (sin(k * arccos(a~)) - sin(k * arccos(b~))) / (k * pi)

obtained from the weighted integral of T_k over the band by the
substitution lam = cos(phi). Filtering a signal never touches
eigenvectors: ``T_k(Op) f`` is built by the recurrence
``T_{k+1} = 2 Op T_k - T_{k-1}`` at the cost of one sparse multiply per
order, and one recurrence sweep is shared by every filter in the bank.

For a bank whose bands tile [0, lambda_max], the coefficient rows
telescope: summed over bands they equal the identity filter, so the
mean channel plus all band outputs reconstructs the input up to
rounding (the bank is a partition of unity).

Bank file format
----------------
JSON object with keys ``lambda_max`` (float), ``K`` (int order),
``design`` ("uniform" | "dyadic" | "custom"), ``include_mean`` (bool),
``bands`` (list of [lo, hi] pairs in raw eigenvalue units). Expansion
coefficients are recomputed on load.
"""

import json
import math
from functools import cached_property
from pathlib import Path

import numpy as np

from .operator import NormalizedOperator

DEFAULT_ORDER = 5000

#: interval between finite-value checks during the recurrence
_CHECK_STRIDE = 1


class RecurrenceDivergenceError(RuntimeError):
    """Non-finite values appeared mid-recurrence (spectrum escaped [-1, 1])."""

    def __init__(self, iteration):
        super().__init__(
            f"non-finite values at recurrence order k={iteration}; the "
            f"operator spectrum likely escaped [-1, 1] (lambda_max too small)"
        )
        self.iteration = iteration


class FilterBank:
    """Bandpass bands plus an optional exact mean channel.

    Parameters
    ----------
    bands : array_like
        (L, 2) band intervals in raw eigenvalue units, lower < upper.
    lambda_max : float
        Normalization constant the bands were designed against.
    order : int
        Chebyshev truncation order K.
    include_mean : bool
        Whether the bank carries the distinguished mean channel. The
        mean is computed exactly as the area-weighted average, not as a
        Chebyshev band at the bottom of the spectrum.
    design : str
        Provenance label ("uniform", "dyadic", or "custom").
    """

    def __init__(self, bands, lambda_max, order=DEFAULT_ORDER,
                 include_mean=True, design="custom"):
        bands = np.atleast_2d(np.asarray(bands, dtype=np.float64))
        if bands.ndim != 2 or bands.shape[1] != 2:
            raise ValueError(f"bands must be (L, 2), got {bands.shape}")
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if lambda_max <= 0:
            raise ValueError(f"lambda_max must be positive, got {lambda_max}")
        lo, hi = bands[:, 0], bands[:, 1]
        if (lo < 0).any() or (lo >= hi).any() or (hi > lambda_max * (1 + 1e-12)).any():
            raise ValueError("each band needs 0 <= lower < upper <= lambda_max")
        bands.setflags(write=False)
        self.bands = bands
        self.lambda_max = float(lambda_max)
        self.order = int(order)
        self.include_mean = bool(include_mean)
        self.design = design

    @property
    def num_bands(self) -> int:
        return self.bands.shape[0]

    @property
    def num_channels(self) -> int:
        """Permutation channels: the bands plus the mean channel if present."""
        return self.num_bands + (1 if self.include_mean else 0)

    @cached_property
    def theta(self) -> np.ndarray:
        """(L, K) expansion coefficients, recomputed on demand."""
        return bank_coefficients(self.bands, self.lambda_max, self.order)

    def __repr__(self):
        return (
            f"FilterBank({self.num_bands} bands, K={self.order}, "
            f"lambda_max={self.lambda_max:.6g}, design={self.design!r})"
        )


def band_coefficients(band, lambda_max: float, order: int) -> np.ndarray:
    """Chebyshev coefficients of the indicator of ``band`` mapped to [-1, 1]."""
    a, b = float(band[0]), float(band[1])
    if not 0.0 <= a < b <= lambda_max * (1 + 1e-12):
        raise ValueError(f"band must satisfy 0 <= a < b <= lambda_max, got ({a}, {b})")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    return bank_coefficients([[a, b]], lambda_max, order)[0]


def bank_coefficients(bands, lambda_max: float, order: int) -> np.ndarray:
    """Coefficient rows for several bands at once; see :func:`band_coefficients`."""
    bands = np.atleast_2d(np.asarray(bands, dtype=np.float64))
    at = np.clip(2.0 * bands[:, 0] / lambda_max - 1.0, -1.0, 1.0)
    bt = np.clip(2.0 * bands[:, 1] / lambda_max - 1.0, -1.0, 1.0)
    pa = np.arccos(at)[:, None]
    pb = np.arccos(bt)[:, None]
    k = np.arange(1, order)[None, :]
    theta = np.empty((bands.shape[0], order))
    theta[:, :1] = (pa - pb) / math.pi
    theta[:, 1:] = 2.0 * (np.sin(k * pa) - np.sin(k * pb)) / (k * math.pi)
    return theta


def evaluate_response(theta: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_k theta_k T_k(x)`` on scalar grid points in [-1, 1].

    Uses the Clenshaw recurrence, vectorized over the grid. ``theta`` may
    be one coefficient row (K,) or a stack (L, K); the result matches
    (grid,) or (L, grid).
    """
    theta = np.asarray(theta, dtype=np.float64)
    squeeze = theta.ndim == 1
    rows = np.atleast_2d(theta)
    x = np.asarray(grid, dtype=np.float64)
    two_x = 2.0 * x
    b1 = np.zeros((rows.shape[0],) + x.shape)
    b2 = np.zeros_like(b1)
    for k in range(rows.shape[1] - 1, 0, -1):
        b1, b2 = rows[:, k, None] + two_x * b1 - b2, b1
    out = rows[:, 0, None] + x * b1 - b2
    return out[0] if squeeze else out


def design_uniform(lambda_max: float, band_width: float,
                   include_mean: bool = True, order: int = DEFAULT_ORDER) -> FilterBank:
    """Tile [0, lambda_max] with contiguous equal-width bands.

    The last band is clamped to end exactly at ``lambda_max``.
    """
    if band_width <= 0:
        raise ValueError(f"band_width must be positive, got {band_width}")
    if band_width >= lambda_max:
        raise ValueError(
            f"band_width {band_width} must be smaller than lambda_max "
            f"{lambda_max}"
        )
    count = math.ceil(lambda_max / band_width - 1e-9)
    edges = [i * band_width for i in range(count)] + [lambda_max]
    bands = np.column_stack([edges[:-1], edges[1:]])
    return FilterBank(bands, lambda_max, order=order,
                      include_mean=include_mean, design="uniform")


def design_dyadic(lambda_max: float, levels: int,
                  include_mean: bool = True, order: int = DEFAULT_ORDER) -> FilterBank:
    """Octave-style tiling: finer bands toward the bottom of the spectrum.

    Level m (1-based) splits [0, lambda_max / 4**(m-1)] into 2**(m+1)
    equal bands and keeps those not covered by the next finer level,
    i.e. the bands above lambda_max / 4**m; the deepest level keeps all
    of its bands. The result tiles (0, lambda_max] disjointly; levels=5
    yields 64 + 24 + 12 + 6 + 3 = 109 bands.
    """
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    bands = []
    for m in range(levels, 0, -1):  # finest (lowest frequencies) first
        top = lambda_max / 4.0 ** (m - 1)
        count = 2 ** (m + 1)
        width = top / count
        start = 0 if m == levels else count // 4
        bands += [(i * width, (i + 1) * width) for i in range(start, count)]
    return FilterBank(np.array(bands), lambda_max, order=order,
                      include_mean=include_mean, design="dyadic")


def mean_channel(signals, areas: np.ndarray) -> np.ndarray:
    """Area-weighted per-signal surface average, one value per observation."""
    data = np.atleast_2d(getattr(signals, "data", signals))
    return (data @ areas) / areas.sum()


def _chebyshev_sweep(opn: NormalizedOperator, block: np.ndarray, order: int,
                     consume) -> None:
    """Drive the three-term recurrence, handing (k, T_k block) to ``consume``.

    ``block`` is (V, n). Only two recurrence states are kept. Non-finite
    values abort with :class:`RecurrenceDivergenceError` naming the order
    at which they appeared.
    """
    t_curr = block
    t_prev = None
    # overflow is handled explicitly by the finite check below
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(order):
            if k == 1:
                t_curr, t_prev = opn.apply(t_curr), t_curr
            elif k > 1:
                t_next = opn.apply(t_curr)
                t_next *= 2.0
                t_next -= t_prev
                t_curr, t_prev = t_next, t_curr
            if k % _CHECK_STRIDE == 0 and not np.isfinite(t_curr).all():
                raise RecurrenceDivergenceError(k)
            consume(k, t_curr)


def _fused_filter_sum(opn, block: np.ndarray, theta: np.ndarray,
                      perms: np.ndarray | None = None) -> np.ndarray:
    """Sum of filtered signals over all coefficient rows, one sweep.

    ``block`` is (V, n). For row l, observation i receives
    ``theta[l, k] * T_k(block column perms[l, i])`` accumulated over k;
    ``perms=None`` means identity for every row. No per-filter output is
    materialized: three (V, n) work arrays plus the accumulator.
    """
    num_rows = theta.shape[0]
    out = np.zeros_like(block)
    tmp = np.empty_like(block)

    if perms is None:
        # same row-by-row accumulation order as the permuted path, so the
        # identity plan reproduces it bit for bit
        def consume(k, t_k):
            for l in range(num_rows):
                np.multiply(t_k, theta[l, k], out=tmp)
                np.add(out, tmp, out=out)
    else:
        perms = np.asarray(perms)
        if perms.shape != (num_rows, block.shape[1]):
            raise ValueError(
                f"permutation block {perms.shape} does not match "
                f"{num_rows} rows x {block.shape[1]} observations"
            )

        def consume(k, t_k):
            for l in range(num_rows):
                np.take(t_k, perms[l], axis=1, out=tmp)
                np.multiply(tmp, theta[l, k], out=tmp)
                np.add(out, tmp, out=out)

    _chebyshev_sweep(opn, block, theta.shape[1], consume)
    return out


def apply_recurrence(opn: NormalizedOperator, signals, theta: np.ndarray,
                     ) -> np.ndarray:
    """Filter signals by each coefficient row in one shared recurrence sweep.

    Parameters
    ----------
    opn : NormalizedOperator
        Spectrum-normalized operator.
    signals : (n, V) array or object with ``.data``
        One observation per row.
    theta : (K,) or (L, K) array
        Chebyshev coefficient rows, e.g. ``bank.theta``.

    Returns
    -------
    (L, n, V) array (or (n, V) if a single row was given): the k-th
    Chebyshev term vectors are computed once and reused by all rows.
    """
    theta = np.asarray(theta, dtype=np.float64)
    squeeze = theta.ndim == 1
    rows = np.atleast_2d(theta)
    data = np.atleast_2d(getattr(signals, "data", signals))
    if data.shape[1] != opn.num_vertices:
        raise ValueError(
            f"signals have {data.shape[1]} vertices, operator has "
            f"{opn.num_vertices}"
        )
    block = np.ascontiguousarray(data.T)
    out = np.zeros((rows.shape[0],) + block.shape)

    def consume(k, t_k):
        for l in range(rows.shape[0]):
            out[l] += rows[l, k] * t_k

    _chebyshev_sweep(opn, block, rows.shape[1], consume)
    result = out.transpose(0, 2, 1)
    return result[0] if squeeze else result


def reconstruct(opn: NormalizedOperator, bank: FilterBank, signals) -> np.ndarray:
    """Mean channel plus the sum of all band outputs (identity resampling).

    For a tiling bank this reproduces the input up to rounding; the
    per-signal mean is removed before band filtering and restored by the
    mean channel so the constant mode is not double counted by the
    lowest band.
    """
    data = np.atleast_2d(getattr(signals, "data", signals))
    if data.shape[1] != opn.num_vertices:
        raise ValueError(
            f"signals have {data.shape[1]} vertices, operator has "
            f"{opn.num_vertices}"
        )
    if bank.include_mean:
        h0 = mean_channel(data, opn.areas)
        centered = np.ascontiguousarray((data - h0[:, None]).T)
        total = _fused_filter_sum(opn, centered, bank.theta)
        return total.T + h0[:, None]
    block = np.ascontiguousarray(data.T)
    return _fused_filter_sum(opn, block, bank.theta).T


def transition_width(theta: np.ndarray, lambda_max: float,
                     grid_resolution: float | None = None) -> float:
    """10%-90% rise width of a filter response at its passband's lower edge.

    The scalar Chebyshev sum is evaluated on a dense grid over [-1, 1]
    and the width is measured, in normalized units, between the response
    crossings of 0.1 and 0.9 just below the passband (the contiguous
    region with response >= 0.9). A response that is already in its
    passband at the bottom of the spectrum (e.g. the identity filter)
    has no lower transition and reports 0.

    Parameters
    ----------
    grid_resolution : float, optional
        Grid step in raw eigenvalue units; at most ``1e-5 * lambda_max``
        (the default).
    """
    if grid_resolution is None:
        grid_resolution = 1e-5 * lambda_max
    if grid_resolution > 1e-5 * lambda_max * (1 + 1e-9):
        raise ValueError(
            f"grid resolution {grid_resolution} too coarse; need <= "
            f"{1e-5 * lambda_max}"
        )
    step = 2.0 * grid_resolution / lambda_max
    grid = np.arange(-1.0, 1.0 + step, step)
    grid[-1] = 1.0
    resp = evaluate_response(theta, grid)

    passband = resp >= 0.9
    if not passband.any():
        raise ValueError(
            "no passband resolved (response never reaches 0.9); the band "
            "is narrower than the filter's transition at this order"
        )
    start = int(np.argmax(passband))
    if start == 0:
        return 0.0

    def cross_left(idx, level):
        # walk left from idx to the first grid point below `level`
        j = idx
        while j > 0 and resp[j] >= level:
            j -= 1
        if resp[j] >= level:
            return None
        frac = (level - resp[j]) / (resp[j + 1] - resp[j])
        return grid[j] + frac * (grid[j + 1] - grid[j])

    x_hi = cross_left(start, 0.9)
    x_lo = cross_left(start, 0.1)
    if x_hi is None or x_lo is None:
        raise ValueError("transition extends past the bottom of the spectrum")
    return float(x_hi - x_lo)


def save_bank(bank: FilterBank, path) -> None:
    """Serialize design parameters as JSON; coefficients are not stored."""
    payload = {
        "lambda_max": bank.lambda_max,
        "K": bank.order,
        "design": bank.design,
        "include_mean": bank.include_mean,
        "bands": [[float(a), float(b)] for a, b in bank.bands],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_bank(path) -> FilterBank:
    """Rebuild a bank from :func:`save_bank` output (coefficients recomputed)."""
    payload = json.loads(Path(path).read_text())
    return FilterBank(
        np.array(payload["bands"], dtype=np.float64),
        lambda_max=payload["lambda_max"],
        order=payload["K"],
        include_mean=payload.get("include_mean", True),
        design=payload.get("design", "custom"),
    )
