"""Post-processing: series oracle, strobe sampling, sweeps, attractor statistics."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ._textio import fmt17, open_for_write
from .errors import FracsimError, NonFiniteStateError, SweepRunError, ValidationError
from .parallel import solve_parallel
from .partition import PartitionPlan
from .problem import Problem, Trajectory
from .solver import solve_sequential
from .systems import LcrParams, make_lcr_rhs

__all__ = [
    "mittag_leffler",
    "StrobeSet",
    "strobe",
    "BifurcationRow",
    "BifurcationTable",
    "sweep_bifurcation",
    "AttractorStats",
    "attractor_stats",
    "write_strobe_csv",
    "write_stats_csv",
]

_SERIES_CAP = 200_000


def _ml_reciprocal_series(alpha: float, x: float, tol: float) -> float | None:
    """Large-negative-argument expansion of E_alpha(-x), or None if it
    cannot reach ``tol`` here.

    E_alpha(-x) ~ sum_{m>=1} (-1)^(m-1) x^(-m) / Gamma(1 - alpha*m), with
    1/Gamma(1-s) rewritten via reflection as Gamma(s)*sin(pi*s)/pi.  The
    sin factor passes through zero whenever alpha*m is an integer, so the
    stop/bail logic tracks the smooth envelope x^(-m)*Gamma(alpha*m)/pi
    rather than raw term magnitudes.  Truncation error is at the scale of
    the first omitted envelope value; summing stops two decades below tol
    so that scale is already negligible.
    """
    floor = tol * 1e-2
    terms: list[float] = []
    inv_x = 1.0 / x
    power = 1.0
    prev_env = math.inf
    for m in range(1, 100000):
        power *= inv_x
        s = alpha * m
        if s >= 170.0:  # gamma overflow; accuracy question already settled
            return None
        g = math.gamma(s)
        envelope = power * g / math.pi
        if envelope >= prev_env and envelope > floor:
            return None  # terms started growing before reaching tol
        term = power * g * math.sin(math.pi * s) / math.pi
        terms.append(term if m % 2 == 1 else -term)
        if envelope < floor:
            return math.fsum(terms)
        prev_env = envelope
    return None


def mittag_leffler(alpha: float, z: float, tol: float = 1e-12) -> float:
    """One-parameter Mittag-Leffler function E_alpha(z) to ~tol accuracy.

    Three evaluation routes cover the domain.  Strongly negative arguments
    go through a reciprocal-power expansion (the power series is hopeless
    there: its terms peak near exp(|z|^(1/alpha)) before collapsing to an
    O(1) answer).  Where the power series is benign it is summed directly
    in binary64 with exact-rounding ordering.  Between the two regimes the
    series is re-run in decimal arithmetic wide enough to absorb the peak,
    because binary64 rounding of huge near-cancelling terms would poison
    the sum well before the terms themselves overflow.  For positive
    arguments whose sum provably exceeds binary64 range the honest answer
    is inf.  This is the independent oracle the solver's convergence
    checks compare against: same function, different math.

    Args:
        alpha: order, 0 < alpha <= 1.
        z: argument with |z| <= 5 (the range enforced here).
        tol: positive truncation tolerance.

    Raises:
        ValidationError: alpha or z outside the supported range, bad tol.
        FracsimError: no evaluation route converged (pathologically small
            alpha with z just above 1).
    """
    if not (isinstance(alpha, (int, float, np.floating)) and 0.0 < float(alpha) <= 1.0):
        raise ValidationError(f"order alpha must be in (0, 1], got {alpha!r}")
    z = float(z)
    if not math.isfinite(z) or abs(z) > 5.0:
        raise ValidationError(
            f"argument z={z!r} is outside the series-safe range |z| <= 5"
        )
    if not tol > 0.0:
        raise ValidationError(f"tolerance must be positive, got {tol!r}")
    if z == 0.0:
        return 1.0
    alpha = float(alpha)
    if z < 0.0:
        estimate = _ml_reciprocal_series(alpha, -z, tol)
        if estimate is not None:
            return estimate
    log_abs_z = math.log(abs(z))
    # Truncating right at tol would leave a remainder of the same scale, so
    # the series is sized three decades deeper; the extra terms are few
    # because the tail decays faster than geometrically.
    log_cut = math.log(tol) - 7.0
    count = None
    peak = 0.0
    prev_log = math.inf
    for k in range(_SERIES_CAP):
        log_term = k * log_abs_z - math.lgamma(alpha * k + 1.0)
        if z > 0.0 and log_term > 710.0:
            return math.inf  # one term alone exceeds binary64 range
        peak = max(peak, log_term)
        if log_term < log_cut and log_term < prev_log:
            count = k + 1
            break
        prev_log = log_term
    if count is None:
        raise FracsimError(
            f"series for E_{alpha}({z}) did not converge within {_SERIES_CAP} terms"
        )
    negative = z < 0.0
    # Alternating cancellation amplifies per-term rounding by exp(peak), so
    # binary64 is only trusted while that amplification stays under tol.
    cancel_safe = peak <= math.log(tol) + 30.0
    if (negative and cancel_safe) or (not negative and peak <= 690.0):
        terms = []
        for k in range(count):
            arg = alpha * k + 1.0
            if arg < 170.0 and abs(k * log_abs_z) < 700.0:
                magnitude = abs(z) ** k / math.gamma(arg)
            else:
                magnitude = math.exp(k * log_abs_z - math.lgamma(arg))
            terms.append(-magnitude if (negative and k % 2 == 1) else magnitude)
        return math.fsum(terms)
    import mpmath

    digits = int(peak / math.log(10.0)) + int(-math.log10(tol)) + 20
    with mpmath.workdps(digits):
        al = mpmath.mpf(alpha)
        zz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        for k in range(count):
            total += power / mpmath.gamma(al * k + 1)
            power *= zz
        return float(total)


@dataclass(frozen=True, slots=True)
class StrobeSet:
    """Trajectory samples taken once per strobe period.

    samples[j] is the state at the grid point nearest t = phase + j*period;
    indices/sample_times record where each sample came from.  Sample times
    sit within half a grid step of their targets by construction.
    """

    phase: float
    period: float
    samples: np.ndarray
    indices: np.ndarray
    sample_times: np.ndarray


def strobe(trajectory: Trajectory, period: float, phase: float = 0.0) -> StrobeSet:
    """Sample the trajectory at t = phase + k*period, nearest grid point.

    No interpolation: with the step sizes these runs use, grid error is far
    below attractor structure.

    Raises:
        ValidationError: period <= 0, phase < 0, or period < 2h (a strobe
            finer than two grid steps cannot be resolved).
    """
    if not period > 0.0:
        raise ValidationError(f"strobe period must be positive, got {period!r}")
    if phase < 0.0:
        raise ValidationError(f"strobe phase must be >= 0, got {phase!r}")
    h = trajectory.h
    if period < 2.0 * h:
        raise ValidationError(
            f"strobe period {period:.6g} is below two grid steps (2h = {2 * h:.6g}); "
            f"the sampling cannot be resolved on this grid"
        )
    T = trajectory.problem.horizon
    steps = trajectory.problem.steps
    if phase > T + 0.5 * h:
        raise ValidationError(
            f"strobe phase {phase:.6g} lies beyond the horizon {T:.6g}"
        )
    count = int(math.floor((T - phase + 0.5 * h) / period)) + 1
    targets = phase + period * np.arange(count, dtype=np.float64)
    indices = np.rint(targets / h).astype(np.int64)
    indices = indices[indices <= steps]
    samples = np.ascontiguousarray(trajectory.states[indices], dtype=np.float64)
    samples.setflags(write=False)
    indices.setflags(write=False)
    sample_times = np.asarray(trajectory.times, dtype=np.float64)[indices]
    return StrobeSet(
        phase=float(phase),
        period=float(period),
        samples=samples,
        indices=indices,
        sample_times=sample_times,
    )


@dataclass(frozen=True, slots=True)
class BifurcationRow:
    """Post-transient strobe output for one forcing amplitude.

    Multi-seed runs keep per-seed sample blocks; ``samples`` concatenates
    them in seed order.
    """

    f: float
    transient: int
    period: float
    phase: float
    samples_by_seed: tuple[np.ndarray, ...]

    @property
    def samples(self) -> np.ndarray:
        blocks = [s for s in self.samples_by_seed if len(s)]
        if not blocks:
            return np.empty((0, 2))
        return np.vstack(blocks)


@dataclass(frozen=True, slots=True)
class BifurcationTable:
    """Rows ordered by strictly increasing forcing amplitude."""

    rows: tuple[BifurcationRow, ...]

    def __post_init__(self):
        fs = [row.f for row in self.rows]
        if any(b <= a for a, b in zip(fs, fs[1:])):
            raise ValidationError(f"forcing amplitudes must be strictly increasing, got {fs}")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


def _seed_to_init(seed, base: Problem) -> tuple:
    """A seed is a flat state (x, y) or a full per-component init structure."""
    entries = []
    for comp in seed:
        if isinstance(comp, (Sequence, np.ndarray)) and not isinstance(comp, str):
            entries.append(tuple(float(v) for v in comp))
        else:
            entries.append((float(comp),))
    return tuple(entries)


def sweep_bifurcation(
    base: Problem,
    params: LcrParams,
    f_values: Sequence[float],
    transient: int,
    plan: PartitionPlan | None = None,
    seeds: Sequence | None = None,
    phase: float = 0.0,
) -> BifurcationTable:
    """Solve the circuit across forcing amplitudes and strobe each run.

    For each f (strictly increasing): rebuild the rhs with that amplitude,
    solve from each seed, discard the first ``transient`` steps, and strobe
    at the forcing period 2*pi/omega.

    Args:
        base: problem template; its orders/init/horizon/steps are used, its
            rhs is replaced per amplitude.  Must be 2-dimensional.
        params: circuit parameters; the f field is overridden per row.
        f_values: forcing amplitudes, strictly increasing (may be empty).
        transient: steps to discard before strobing, 0 <= transient < N.
        plan: optional worker partition; omitted means sequential.
        seeds: initial states, one solve per seed (default: base.init).
        phase: strobe phase offset.

    Raises:
        ValidationError: non-increasing f_values, bad transient, dim != 2.
        SweepRunError: a solve aborted; carries the offending f and seed.
    """
    if base.dim != 2:
        raise ValidationError(f"circuit sweeps need a 2-component problem, got dim={base.dim}")
    fs = [float(f) for f in f_values]
    if any(b <= a for a, b in zip(fs, fs[1:])):
        raise ValidationError(f"f_values must be strictly increasing, got {fs}")
    if not isinstance(transient, (int, np.integer)) or transient < 0 or transient >= base.steps:
        raise ValidationError(
            f"transient must satisfy 0 <= transient < steps={base.steps}, got {transient!r}"
        )
    seed_inits = (
        [base.init] if seeds is None else [_seed_to_init(s, base) for s in seeds]
    )
    period = params.period
    rows = []
    for f in fs:
        params_f = dataclasses.replace(params, f=f)
        rhs = make_lcr_rhs(params_f)
        per_seed = []
        for seed in seed_inits:
            prob = dataclasses.replace(base, rhs=rhs, init=seed)
            try:
                traj = solve_sequential(prob) if plan is None else solve_parallel(prob, plan)
            except NonFiniteStateError as exc:
                raise SweepRunError(
                    f"solve diverged at f={f:.17g} from seed {seed}: {exc}", f=f
                ) from exc
            ss = strobe(traj, period, phase)
            keep = ss.indices >= transient
            per_seed.append(np.ascontiguousarray(ss.samples[keep]))
        rows.append(
            BifurcationRow(
                f=f,
                transient=int(transient),
                period=period,
                phase=float(phase),
                samples_by_seed=tuple(per_seed),
            )
        )
    return BifurcationTable(rows=tuple(rows))


@dataclass(frozen=True, slots=True)
class AttractorStats:
    """Cluster/extent summary of a strobed sample set.

    clusters counts the connected components of the threshold-distance graph
    (single linkage); cluster_spans[c] says whether component c's first
    coordinate takes both signs, and spans_both_signs is their disjunction
    -- the double-scroll discriminator: the two-attractor regime has two
    clusters each confined to one sign, the merged regime one cluster
    covering both.
    """

    n_samples: int
    threshold: float
    clusters: int
    labels: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray
    cluster_sizes: tuple[int, ...]
    cluster_spans: tuple[bool, ...]
    spans_both_signs: bool


def attractor_stats(samples, threshold: float = 0.3) -> AttractorStats:
    """Single-linkage clustering and bounding box of a sample set.

    Args:
        samples: StrobeSet or array of shape (K, d), K >= 1.
        threshold: linkage distance; points within it join a cluster.

    Raises:
        ValidationError: empty sample set or non-positive threshold.
    """
    if isinstance(samples, StrobeSet):
        samples = samples.samples
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, np.newaxis]
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValidationError("attractor statistics need at least one sample")
    if not threshold > 0.0:
        raise ValidationError(f"cluster threshold must be positive, got {threshold!r}")
    n = arr.shape[0]
    pairs = cKDTree(arr).query_pairs(r=threshold, output_type="ndarray")
    graph = csr_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)
    )
    n_clusters, labels = connected_components(graph, directed=False)
    sizes = []
    spans = []
    for c in range(n_clusters):
        xs = arr[labels == c, 0]
        sizes.append(int(len(xs)))
        spans.append(bool((xs > 0.0).any() and (xs < 0.0).any()))
    labels = labels.astype(np.int64)
    labels.setflags(write=False)
    mins = arr.min(axis=0)
    maxs = arr.max(axis=0)
    mins.setflags(write=False)
    maxs.setflags(write=False)
    return AttractorStats(
        n_samples=n,
        threshold=float(threshold),
        clusters=int(n_clusters),
        labels=labels,
        mins=mins,
        maxs=maxs,
        cluster_sizes=tuple(sizes),
        cluster_spans=tuple(spans),
        spans_both_signs=bool(any(spans)),
    )


def write_strobe_csv(table: BifurcationTable, path) -> None:
    """f,k,x,y rows; k numbers samples within each amplitude's row."""
    with open_for_write(path) as fh:
        fh.write("f,k,x,y\n")
        for row in table:
            for k, point in enumerate(row.samples):
                fh.write(f"{fmt17(row.f)},{k},{fmt17(point[0])},{fmt17(point[1])}\n")


def write_stats_csv(table: BifurcationTable, path, threshold: float = 0.3) -> None:
    """Per-amplitude cluster statistics; spans_both_signs written as 0/1.

    Raises:
        ValidationError: a row has no post-transient samples to summarize.
    """
    with open_for_write(path) as fh:
        fh.write("f,clusters,xmin,xmax,ymin,ymax,spans_both_signs\n")
        for row in table:
            samples = row.samples
            if len(samples) == 0:
                raise ValidationError(
                    f"row f={row.f:.17g} has no post-transient samples to summarize"
                )
            st = attractor_stats(samples, threshold)
            fh.write(
                f"{fmt17(row.f)},{st.clusters},{fmt17(st.mins[0])},{fmt17(st.maxs[0])},"
                f"{fmt17(st.mins[1])},{fmt17(st.maxs[1])},{1 if st.spans_both_signs else 0}\n"
            )
