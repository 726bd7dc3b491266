"""Monte Carlo estimation of logical failure rates under iid Pauli noise."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .code import TetrahedralCode, boundary_bulk_ratio
from .gf2 import Membership, PauliType, stabilizer_membership
from .xdecoder import DecodeOutcome, LiftConfig, decode_x, extract_x_syndrome
from .zdecoder import decode_z, extract_z_syndrome

CSV_COLUMNS = ("d", "n_qubits", "beta", "error_type", "p", "trials", "failures",
               "heralded_failures", "p_fail", "std_err", "seed")
CHUNK = 256


@dataclass(frozen=True)
class NoiseModel:
    error_type: PauliType
    p: float

    def __post_init__(self):
        object.__setattr__(self, "error_type", PauliType.parse(self.error_type))
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class RunStats:
    d: int
    n_qubits: int
    beta: float
    error_type: str
    p: float
    trials: int
    failures: int
    heralded_failures: int
    p_fail: float
    std_err: float
    seed: int
    wall_time: float = 0.0

    def csv_row(self) -> list[str]:
        return [str(self.d), str(self.n_qubits), _fmt(self.beta), self.error_type, _fmt(self.p),
                str(self.trials), str(self.failures), str(self.heralded_failures),
                _fmt(self.p_fail), _fmt(self.std_err), str(self.seed)]


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.10g}"


def standard_error(p_fail: float, trials: int) -> float:
    return math.sqrt(p_fail * (1.0 - p_fail) / trials)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox keyed by the seed, counter word 1 = trial."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, trial, 0, 0]))


def sample_iid_error(n: int, model: NoiseModel, rng: np.random.Generator) -> frozenset[int]:
    if model.p <= 0.0:
        return frozenset()
    draws = rng.random(n)
    return frozenset(np.flatnonzero(draws < model.p).tolist())


def extract_syndrome(code: TetrahedralCode, error: Iterable[int], kind: PauliType):
    if kind is PauliType.X:
        return extract_x_syndrome(code, error).members
    return extract_z_syndrome(code, error)


def decode(code: TetrahedralCode, syndrome, kind: PauliType, cfg: LiftConfig) -> DecodeOutcome:
    if kind is PauliType.X:
        return decode_x(code, syndrome, cfg)
    return decode_z(code, syndrome, cfg)


def logical_failure(code: TetrahedralCode, error: Iterable[int], outcome: DecodeOutcome,
                    kind: PauliType | str, check: bool = False) -> bool:
    """Whether error plus correction is a non-trivial logical (heralded failures count).

    Both logicals act on every qubit and every check has even weight, so a
    residual with zero syndrome is logical exactly when its weight is odd.
    ``check=True`` confirms this against the linear-algebra classification.
    """
    if outcome.heralded_failure:
        return True
    kind = PauliType.parse(kind)
    residual = frozenset(error) ^ outcome.correction.members
    fast = len(residual) % 2 == 1
    if check:
        cls = stabilizer_membership(code, residual, kind)
        if cls is Membership.OUTSIDE_NORMALIZER:
            raise AssertionError("residual has a non-zero syndrome")
        if fast != (cls is Membership.LOGICAL):
            raise AssertionError("parity shortcut disagrees with the stabilizer oracle")
    return fast


# parallel driver ---------------------------------------------------------------

_WORKER: dict = {}


def _init_worker(code, model, cfg, seed, check):
    _WORKER.update(code=code, model=model, cfg=cfg, seed=seed, check=check)


def _run_chunk(bounds: tuple[int, int]) -> tuple[int, int]:
    code, model, cfg = _WORKER["code"], _WORKER["model"], _WORKER["cfg"]
    seed, check = _WORKER["seed"], _WORKER["check"]
    kind = model.error_type
    failures = heralded = 0
    for trial in range(*bounds):
        error = sample_iid_error(code.n_qubits, model, trial_rng(seed, trial))
        if not error:
            continue
        syndrome = extract_syndrome(code, error, kind)
        outcome = decode(code, syndrome, kind, cfg)
        if check and not outcome.heralded_failure:
            if extract_syndrome(code, outcome.correction.members, kind) != syndrome:
                raise AssertionError(f"trial {trial}: correction does not reproduce the syndrome")
        if outcome.heralded_failure:
            heralded += 1
        if logical_failure(code, error, outcome, kind, check):
            failures += 1
    return failures, heralded


def run_trials(code: TetrahedralCode, model: NoiseModel, trials: int, seed: int, workers: int = 1,
               cfg: LiftConfig = LiftConfig(), check: bool = False) -> RunStats:
    """Estimate the logical failure rate from ``trials`` independent samples.

    Trial ``i`` always draws from ``trial_rng(seed, i)``, so the counts do
    not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    start = time.perf_counter()
    chunks = [(lo, min(lo + CHUNK, trials)) for lo in range(0, trials, CHUNK)]
    if workers <= 1 or len(chunks) == 1:
        _init_worker(code, model, cfg, seed, check)
        results = [_run_chunk(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(code, model, cfg, seed, check)) as pool:
            results = list(pool.map(_run_chunk, chunks))
    failures = sum(f for f, _ in results)
    heralded = sum(h for _, h in results)
    p_fail = failures / trials
    beta = boundary_bulk_ratio(code)
    return RunStats(
        d=code.d, n_qubits=code.n_qubits, beta=float(beta), error_type=model.error_type.value,
        p=model.p, trials=trials, failures=failures, heralded_failures=heralded, p_fail=p_fail,
        std_err=standard_error(p_fail, trials), seed=seed, wall_time=time.perf_counter() - start,
    )


def sweep_probabilities(codes: Sequence[TetrahedralCode], error_type: PauliType | str, ps: Sequence[float],
                        trials: int, seed: int, workers: int = 1, cfg: LiftConfig = LiftConfig(),
                        progress=None) -> list[RunStats]:
    """One row per (code, p); every row reuses ``seed`` so curves share their random draws."""
    if not ps:
        raise ValueError("probability grid is empty")
    rows = []
    for code in codes:
        for p in ps:
            row = run_trials(code, NoiseModel(error_type, p), trials, seed, workers, cfg)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def probability_grid(p_min: float, p_max: float, steps: int, log: bool = True) -> list[float]:
    if steps < 1:
        raise ValueError("grid needs at least one point")
    if steps == 1:
        return [p_min]
    if log:
        if p_min <= 0:
            raise ValueError("log-spaced grid needs p_min > 0")
        return [float(x) for x in np.geomspace(p_min, p_max, steps)]
    return [float(x) for x in np.linspace(p_min, p_max, steps)]


# CSV ---------------------------------------------------------------------------


def write_csv(rows: Iterable[RunStats], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_row())


def to_csv(rows: Iterable[RunStats]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(stream) -> list[RunStats]:
    out = []
    for rec in csv.DictReader(stream):
        out.append(RunStats(
            d=int(rec["d"]), n_qubits=int(rec["n_qubits"]), beta=float(rec["beta"]),
            error_type=rec["error_type"], p=float(rec["p"]), trials=int(rec["trials"]),
            failures=int(rec["failures"]), heralded_failures=int(rec["heralded_failures"]),
            p_fail=float(rec["p_fail"]), std_err=float(rec["std_err"]), seed=int(rec["seed"]),
        ))
    return out


# crossings ---------------------------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    p: float
    low: float
    high: float

    def as_dict(self) -> dict:
        return asdict(self)


def _zero_crossings(xs: Sequence[float], ys: Sequence[float]) -> list[float]:
    """Sign changes of a piecewise-linear curve; ties (both curves equal) alone are not crossings."""
    nonzero = [i for i, y in enumerate(ys) if y != 0]
    out = []
    for i, j in zip(nonzero, nonzero[1:]):
        if ys[i] * ys[j] > 0:
            continue
        if j == i + 1:
            t = ys[i] / (ys[i] - ys[j])
            out.append(xs[i] + t * (xs[j] - xs[i]))
        else:
            # exact zeros between opposite signs: take the middle of the run
            out.append((xs[i + 1] + xs[j - 1]) / 2)
    return out


def estimate_crossing(curve_a: Sequence[RunStats], curve_b: Sequence[RunStats], width: float = 1.0) -> Crossing | None:
    """Where two failure-rate curves cross, interpolating linearly in log p.

    The interval comes from shifting the difference by ``width`` combined
    standard errors either way; a shifted curve that never changes sign
    extends the interval to the end of the grid.  None when the curves do
    not cross inside the grid.
    """
    ps = [r.p for r in curve_a]
    if ps != [r.p for r in curve_b]:
        raise ValueError("curves must share their probability grid")
    if any(p <= 0 for p in ps):
        raise ValueError("log interpolation needs p > 0")
    order = sorted(range(len(ps)), key=ps.__getitem__)
    xs = [math.log(ps[i]) for i in order]
    diff = [curve_a[i].p_fail - curve_b[i].p_fail for i in order]
    sigma = [math.hypot(curve_a[i].std_err, curve_b[i].std_err) for i in order]
    centre = _zero_crossings(xs, diff)
    if not centre:
        return None
    x0 = centre[0]
    ends = []
    for sign in (1, -1):
        shifted = [dv + sign * width * s for dv, s in zip(diff, sigma)]
        zs = _zero_crossings(xs, shifted)
        if zs:
            ends.append(min(zs, key=lambda z: abs(z - x0)))
        else:
            # the shifted curve stays on one side: the band reaches the grid edge
            ends.append(xs[0] if (shifted[0] > 0) == (diff[-1] > diff[0]) else xs[-1])
    lo, hi = min(ends + [x0]), max(ends + [x0])
    return Crossing(math.exp(x0), math.exp(lo), math.exp(hi))
