"""Augmentation by per-channel permutation of spectral content.

Both methods resample real observations channel by channel with
independent uniform permutations drawn from a seeded plan:

* ``lb_eig_da`` permutes eigenfunction coefficients (one channel per
  basis mode) and reconstructs through the inverse spectral transform;
* ``c_pda`` permutes bandpass-filtered signals (one channel per filter
  plus the exact mean channel) inside the fused Chebyshev recurrence,
  so no per-filter intermediate is ever materialized.

Permuting a channel reorders a finite sum over observations, so the
per-vertex batch mean of the output equals that of the (reconstructed)
input; augmentation is performed per class to keep class means intact.

Signal file formats
-------------------
CSV: one observation per row, first column the class label, remaining V
columns the per-vertex values (shortest round-trip float formatting);
no header. Binary: ``b"SASS0001"`` magic, uint64 n, uint64 V, float64
data row-major (little-endian), with a ``<path>.json`` sidecar holding
``{"labels": [...], "provenance": {...}}``.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import spectrum
from .filters import FilterBank, _fused_filter_sum, mean_channel
from .operator import NormalizedOperator

_MAGIC = b"SASS0001"


@dataclass
class SignalSet:
    """n observations of a per-vertex scalar, with class labels.

    ``provenance`` records how the set was produced: ``{"kind": "real"}``
    or ``{"kind": "augmented", "method": ..., "seed": ...}``.
    """

    data: np.ndarray
    labels: np.ndarray
    provenance: dict = field(default_factory=lambda: {"kind": "real"})

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=np.float64))
        self.labels = np.asarray(self.labels)
        if self.data.shape[0] != self.labels.shape[0]:
            raise ValueError(
                f"{self.data.shape[0]} observations but "
                f"{self.labels.shape[0]} labels"
            )
        if self.data.shape[0] < 1:
            raise ValueError("signal set needs at least one observation")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("signal data contains non-finite values")

    @property
    def num_observations(self) -> int:
        return self.data.shape[0]

    @property
    def num_vertices(self) -> int:
        return self.data.shape[1]

    def classes(self) -> np.ndarray:
        return np.unique(self.labels)


@dataclass
class PermutationPlan:
    """Seeded bundle of per-channel permutations of {0..n-1}.

    ``seed`` is whatever entropy built the plan (an int, or a list of
    ints for derived plans); ``perms`` has one row per channel.
    """

    seed: object
    perms: np.ndarray

    @property
    def num_channels(self) -> int:
        return self.perms.shape[0]

    @property
    def num_observations(self) -> int:
        return self.perms.shape[1]


def make_plan(n: int, channels: int, seed) -> PermutationPlan:
    """Draw ``channels`` independent uniform permutations of {0..n-1}.

    Reproducible: the same (n, channels, seed) always yields the same
    plan. ``seed`` may be an int or a sequence of ints.
    """
    if n < 2:
        raise ValueError(f"need at least 2 observations to permute, got {n}")
    if channels < 1:
        raise ValueError(f"need at least one channel, got {channels}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perms = np.empty((channels, n), dtype=np.int64)
    for c in range(channels):
        perms[c] = rng.permutation(n)
    return PermutationPlan(seed=seed, perms=perms)


def _require_single_class(real: SignalSet, method: str):
    classes = real.classes()
    if classes.size != 1:
        raise ValueError(
            f"{method} operates on one class at a time, got labels "
            f"{classes.tolist()}; use augment_dataset for multi-class input"
        )


def lb_eig_da(basis: spectrum.EigenBasis, real: SignalSet,
              plan: PermutationPlan) -> SignalSet:
    """Augment one class by permuting eigenfunction coefficients.

    Coefficient column j is shuffled across observations by the plan's
    j-th permutation, then signals are rebuilt from the permuted
    coefficients. With a complete basis the per-vertex batch mean of the
    output matches the input to rounding; a truncated basis confines the
    output to the span of its modes.
    """
    _require_single_class(real, "lb_eig_da")
    if plan.num_channels != basis.num_modes:
        raise ValueError(
            f"plan has {plan.num_channels} channels, basis has "
            f"{basis.num_modes} modes"
        )
    if plan.num_observations != real.num_observations:
        raise ValueError(
            f"plan covers {plan.num_observations} observations, set has "
            f"{real.num_observations}"
        )
    coeffs = spectrum.forward(basis, real)
    cols = np.arange(basis.num_modes)
    permuted = coeffs[plan.perms.T, cols[None, :]]
    out = spectrum.inverse(basis, permuted)
    return SignalSet(
        data=out,
        labels=real.labels.copy(),
        provenance={"kind": "augmented", "method": "lb-eigda", "seed": plan.seed},
    )


def c_pda(opn: NormalizedOperator, bank: FilterBank, real: SignalSet,
          plan: PermutationPlan) -> SignalSet:
    """Augment one class by permuting bandpass-filtered signals.

    Channel 0 carries the exact area-weighted mean; channels 1..L the
    bank's bands applied to the mean-removed signals. The k-th Chebyshev
    term of every filter is scattered to its permuted destination inside
    one recurrence sweep.
    """
    _require_single_class(real, "c_pda")
    if plan.num_channels != bank.num_bands + 1:
        raise ValueError(
            f"plan has {plan.num_channels} channels, bank needs "
            f"{bank.num_bands + 1} (mean + bands)"
        )
    if plan.num_observations != real.num_observations:
        raise ValueError(
            f"plan covers {plan.num_observations} observations, set has "
            f"{real.num_observations}"
        )
    if opn.num_vertices != real.num_vertices:
        raise ValueError(
            f"signals have {real.num_vertices} vertices, operator has "
            f"{opn.num_vertices}"
        )
    rel = abs(opn.lambda_max - bank.lambda_max) / bank.lambda_max
    if rel > 1e-6:
        raise ValueError(
            f"operator lambda_max {opn.lambda_max!r} and bank lambda_max "
            f"{bank.lambda_max!r} disagree (relative {rel:.2e})"
        )

    h0 = mean_channel(real, opn.areas)
    centered = np.ascontiguousarray((real.data - h0[:, None]).T)
    total = _fused_filter_sum(opn, centered, bank.theta, perms=plan.perms[1:])
    out = total.T + h0[plan.perms[0]][:, None]
    return SignalSet(
        data=out,
        labels=real.labels.copy(),
        provenance={"kind": "augmented", "method": "c-pda", "seed": plan.seed},
    )


def augment_dataset(real: SignalSet, method: str, counts: dict | None,
                    seed: int, *, basis=None, opn=None, bank=None,
                    threads: int = 1) -> SignalSet:
    """Augment a multi-class set, per class, to requested output counts.

    Each class is processed with fresh plans; one plan yields one
    augmented sample per source observation, and requests beyond the
    class size repeat with derived seeds ``[seed, class_index, round]``.

    Parameters
    ----------
    real : SignalSet
        Mixed-class input; every class needs >= 2 observations.
    method : {"lb-eigda", "c-pda"}
        Selects the resampling route; pass ``basis`` for lb-eigda or
        ``opn`` and ``bank`` for c-pda.
    counts : dict or None
        Output count per class label; None reproduces the class sizes.
    threads : int
        Worker threads across (class, round) jobs. Output is identical
        for any thread count: jobs are seeded independently and
        assembled in a fixed order.
    """
    if method == "lb-eigda":
        if basis is None:
            raise ValueError("lb-eigda needs an eigenbasis (basis=...)")
        channels = basis.num_modes
        run = lambda subset, plan: lb_eig_da(basis, subset, plan)
    elif method == "c-pda":
        if opn is None or bank is None:
            raise ValueError("c-pda needs a normalized operator and a bank")
        channels = bank.num_bands + 1
        run = lambda subset, plan: c_pda(opn, bank, subset, plan)
    else:
        raise ValueError(f"unknown method {method!r}; use 'lb-eigda' or 'c-pda'")

    classes = real.classes()
    jobs = []
    for ci, label in enumerate(classes):
        members = np.nonzero(real.labels == label)[0]
        if members.size < 2:
            raise ValueError(
                f"class {label!r} has {members.size} observation(s); "
                f"permutation augmentation needs at least 2"
            )
        want = counts.get(label, members.size) if counts else members.size
        subset = SignalSet(
            data=real.data[members],
            labels=real.labels[members],
            provenance=real.provenance,
        )
        rounds = -(-int(want) // members.size)
        for r in range(rounds):
            jobs.append((ci, r, subset, int(want)))

    def run_job(job):
        ci, r, subset, _ = job
        plan = make_plan(subset.num_observations, channels, [seed, ci, r])
        return run(subset, plan)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_job, jobs))
    else:
        results = [run_job(job) for job in jobs]

    pieces, label_pieces = [], []
    taken = {label: 0 for label in classes.tolist()}
    for (ci, r, subset, want), result in zip(jobs, results):
        label = classes[ci]
        room = want - taken[label]
        take = min(room, result.num_observations)
        if take > 0:
            pieces.append(result.data[:take])
            label_pieces.append(result.labels[:take])
            taken[label] += take
    return SignalSet(
        data=np.concatenate(pieces, axis=0),
        labels=np.concatenate(label_pieces),
        provenance={"kind": "augmented", "method": method, "seed": seed},
    )


# ---------------------------------------------------------------------------
# signal I/O


def save_signals(signals: SignalSet, path) -> None:
    """Write a set as CSV (.csv) or binary-with-sidecar (anything else)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, "w") as fh:
            for label, row in zip(signals.labels, signals.data):
                fh.write(
                    str(label) + ","
                    + ",".join(repr(float(x)) for x in row) + "\n"
                )
        return
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(np.array(signals.data.shape, dtype="<u8").tobytes())
        fh.write(signals.data.astype("<f8").tobytes())
    sidecar = {
        "labels": [_json_label(x) for x in signals.labels],
        "provenance": signals.provenance,
    }
    Path(str(path) + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )


def load_signals(path) -> SignalSet:
    """Read a set written by :func:`save_signals`."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        labels, rows = [], []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                head, _, rest = line.partition(",")
                labels.append(_parse_label(head))
                rows.append(np.array(rest.split(","), dtype=np.float64))
        return SignalSet(data=np.array(rows), labels=np.array(labels))
    raw = path.read_bytes()
    if raw[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not a signal file (bad magic)")
    n, nv = (int(x) for x in np.frombuffer(raw, dtype="<u8", count=2,
                                           offset=len(_MAGIC)))
    data = np.frombuffer(raw, dtype="<f8", count=n * nv,
                         offset=len(_MAGIC) + 16).reshape(n, nv).copy()
    sidecar = json.loads(Path(str(path) + ".json").read_text())
    return SignalSet(
        data=data,
        labels=np.array(sidecar["labels"]),
        provenance=sidecar.get("provenance", {"kind": "real"}),
    )


def _json_label(x):
    return x.item() if isinstance(x, np.generic) else x


def _parse_label(text):
    try:
        return int(text)
    except ValueError:
        return text
