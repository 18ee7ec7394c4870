"""Experiment front end: configuration, single-run reproduction, Monte Carlo
pole clouds, and Bode data emission.

Artifacts are plain JSON and CSV so figures can be rendered by external
tools.  Every run seed is derived from the config's master seed and the run
index, so identical configs produce byte-identical artifacts regardless of
how the runs are scheduled.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arxfit import ArxOrders, estimate_arx
from .errors import ArxidError, RankDeficient, RootOnUnitCircle
from .ltisys import FreqGrid, RationalTF, SystemSpec, make_G, make_H, sensitivity
from .polyq import Poly
from .recoverkit import compare_models, recover
from .simkit import DEFAULT_WARMUP, derive_run_seed, simulate_closed_loop

DEFAULT_GRID = (1e-2, float(np.pi), 200)
DEFAULT_MASTER_SEED = 20260810
CLUSTER_RADIUS = 0.2     # pole-cloud matching radius across runs
CLUSTER_MIN_FRAC = 0.5   # fraction of runs a cluster must cover to be tracked
MAX_FAILURE_FRAC = 0.1


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Log-spaced Bode grid specification."""

    omega_min: float = DEFAULT_GRID[0]
    omega_max: float = DEFAULT_GRID[1]
    points: int = DEFAULT_GRID[2]

    def __post_init__(self):
        if not (0.0 < self.omega_min < self.omega_max <= np.pi + 1e-12):
            raise ValueError("grid range must satisfy 0 < omega_min < omega_max <= pi")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")

    def to_grid(self) -> FreqGrid:
        return FreqGrid.log_spaced(self.omega_min, self.omega_max, self.points)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    spec: SystemSpec
    N: int
    orders: ArxOrders
    runs: int
    master_seed: int
    grid: GridSpec
    warmup: int = DEFAULT_WARMUP
    output_dir: str = "results"

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.N <= 2 * (self.orders.n_a + self.orders.n_b):
            raise ValueError("N must exceed twice the parameter count")
        if self.warmup < 0:
            raise ValueError("warmup must be nonnegative")

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "N": self.N,
            "orders": {"n_a": self.orders.n_a, "n_b": self.orders.n_b},
            "runs": self.runs,
            "master_seed": self.master_seed,
            "grid": {
                "omega_min": self.grid.omega_min,
                "omega_max": self.grid.omega_max,
                "points": self.grid.points,
            },
            "warmup": self.warmup,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        return cls(
            spec=SystemSpec.from_json(data["spec"]),
            N=int(data["N"]),
            orders=ArxOrders(int(data["orders"]["n_a"]), int(data["orders"]["n_b"])),
            runs=int(data["runs"]),
            master_seed=int(data["master_seed"]),
            grid=GridSpec(
                float(data["grid"]["omega_min"]),
                float(data["grid"]["omega_max"]),
                int(data["grid"]["points"]),
            ),
            warmup=int(data.get("warmup", DEFAULT_WARMUP)),
            output_dir=str(data.get("output_dir", "results")),
        )

    def save(self, path) -> None:
        _write_json(path, self.to_json())

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def default_system() -> SystemSpec:
    """The bundled study system: unit-gain feedback around a plant with a
    complex anti-stable pole pair at 1 +- i and a first-order noise model."""
    return SystemSpec(
        L=Poly([0.0, 1.0, -1.7]),
        Gamma=Poly([1.0]),
        F=Poly([1.0, -2.0, 2.0]),
        C=Poly([1.0, 0.2]),
        D=Poly([1.0, -0.9]),
        K=RationalTF.constant(1.0),
        lambda_e=1.0,
        lambda_r=1.0,
    )


def default_single_config(master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentConfig:
    return ExperimentConfig(
        spec=default_system(),
        N=100000,
        orders=ArxOrders(15, 15),
        runs=1,
        master_seed=master_seed,
        grid=GridSpec(),
        output_dir="results/single",
    )


def default_montecarlo_config(
    order: int = 15, master_seed: int = DEFAULT_MASTER_SEED
) -> ExperimentConfig:
    # The Monte Carlo sample size is not fixed by the study reproduction at
    # 1e5; 1e4 keeps order-100 estimation well posed while the pole scatter
    # stays visible.
    return ExperimentConfig(
        spec=default_system(),
        N=10000,
        orders=ArxOrders(order, order),
        runs=50,
        master_seed=master_seed,
        grid=GridSpec(),
        output_dir=f"results/mc_n{order}",
    )


# ---------------------------------------------------------------------------
# artifact writers


def _write_json(path, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _roots_json(rts: np.ndarray) -> list[dict]:
    ordered = sorted((complex(p) for p in rts), key=lambda p: (p.imag, p.real))
    return [{"re": float(p.real), "im": float(p.imag)} for p in ordered]


def _bode_rows(omegas: np.ndarray, responses: list[np.ndarray]):
    mags = [20.0 * np.log10(np.abs(v)) for v in responses]
    phases = [np.degrees(np.angle(v)) for v in responses]
    for i, om in enumerate(omegas):
        row = [float(om)]
        for mag, ph in zip(mags, phases):
            row += [float(mag[i]), float(ph[i])]
        yield row


# ---------------------------------------------------------------------------
# commands


def cmd_single(config: ExperimentConfig, out=None) -> dict:
    """Simulate, estimate, recover; write summary.json, bode_G.csv,
    bode_H.csv and comparison.csv.  Returns the summary dict."""
    out = Path(out if out is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = derive_run_seed(config.master_seed, 0)
    record = simulate_closed_loop(config.spec, config.N, seed, config.warmup)
    est = estimate_arx(record.y, record.u, config.orders)
    rec = recover(est)
    grid = config.grid.to_grid()

    summary = {
        "J_hat": est.J_hat,
        "lambda_hat": rec.lambda_hat,
        "gain": rec.gain,
        "A_a_roots": _roots_json(np.roots(rec.A_a.coeffs) if rec.A_a.degree else []),
        "A": est.A.to_list(),
        "B": est.B.to_list(),
        "n_a": config.orders.n_a,
        "n_b": config.orders.n_b,
        "N": config.N,
        "N_eff": est.N_eff,
        "seed": seed,
        "master_seed": config.master_seed,
        "warmup": config.warmup,
    }
    _write_json(out / "summary.json", summary)

    om = grid.omegas
    g_true, g_hat = make_G(config.spec).at_freq(om), rec.G_hat.at_freq(om)
    h_true, h_hat = make_H(config.spec).at_freq(om), rec.H_hat.at_freq(om)
    h_unc = rec.H_uncorrected.at_freq(om)
    _write_csv(
        out / "bode_G.csv",
        "omega,mag_G_db,phase_G_deg,mag_G_hat_db,phase_G_hat_deg",
        _bode_rows(om, [g_true, g_hat]),
    )
    _write_csv(
        out / "bode_H.csv",
        "omega,mag_H_db,phase_H_deg,mag_H_hat_db,phase_H_hat_deg,mag_H_uncorr_db,phase_H_uncorr_deg",
        _bode_rows(om, [h_true, h_hat, h_unc]),
    )
    compare_models(rec, config.spec, grid).to_csv(out / "comparison.csv")
    return summary


def _cluster_roots(per_run: list[np.ndarray], radius: float = CLUSTER_RADIUS):
    """Greedy clustering of anti-stable roots pooled across runs.

    Returns a list of dicts with the cluster centroid, per-coordinate
    spread, and member count.  Deterministic: candidates are chosen by
    neighbor count with lexicographic tie-breaking.
    """
    nonempty = [r for r in per_run if len(r)]
    pool = np.concatenate(nonempty) if nonempty else np.empty(0, complex)
    pool = pool[np.lexsort((pool.imag, pool.real))]
    clusters = []
    while pool.size:
        counts = np.array([np.sum(np.abs(pool - p) <= radius) for p in pool])
        center = pool[int(np.argmax(counts))]
        members = pool[np.abs(pool - center) <= radius]
        for _ in range(2):  # refine centroid
            new_center = members.mean()
            new_members = pool[np.abs(pool - new_center) <= radius]
            if new_members.size == 0:
                break
            center, members = new_center, new_members
        clusters.append(
            {
                "mean_re": float(members.real.mean()),
                "mean_im": float(members.imag.mean()),
                "std_re": float(members.real.std(ddof=1)) if members.size > 1 else 0.0,
                "std_im": float(members.imag.std(ddof=1)) if members.size > 1 else 0.0,
                "count": int(members.size),
            }
        )
        pool = pool[np.abs(pool - center) > radius]
    return sorted(clusters, key=lambda c: (c["mean_im"], c["mean_re"]))


def _std(values) -> float:
    arr = np.asarray(values, dtype=float)
    return float(arr.std(ddof=1)) if arr.size > 1 else 0.0


@dataclass(frozen=True, eq=False)
class MonteCarloSummary:
    """Per-run records plus pooled statistics; the statistics can always be
    recomputed from per_run."""

    per_run: list
    failed_runs: list
    unstable_roots: list       # tracked clusters with mean/std per coordinate
    n_untracked_antistable: int
    lambda_mean: float
    lambda_std: float
    J_mean: float
    J_std: float
    stable_root_pooled_std: float
    unstable_root_pooled_std: float

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def cmd_montecarlo(config: ExperimentConfig, out=None) -> MonteCarloSummary:
    """Independent simulate/estimate/recover pipelines with derived seeds.

    Writes poles_n{n_a}.csv (all roots of every successful run) and
    mc_summary.json.  A run whose estimated A has a root inside the
    unit-circle tolerance band, or whose regression is rank deficient, is
    recorded as failed; more than MAX_FAILURE_FRAC failures aborts.
    """
    out = Path(out if out is not None else config.output_dir)
    per_run, failed, pole_rows = [], [], []
    per_run_anti, per_run_stable = [], []
    for i in range(config.runs):
        seed = derive_run_seed(config.master_seed, i)
        try:
            record = simulate_closed_loop(config.spec, config.N, seed, config.warmup)
            est = estimate_arx(record.y, record.u, config.orders)
            rec = recover(est)
        except (RootOnUnitCircle, RankDeficient) as exc:
            failed.append({"run": i, "seed": seed, "reason": f"{type(exc).__name__}: {exc}"})
            continue
        all_roots = np.roots(est.A.coeffs)
        anti = all_roots[np.abs(all_roots) > 1.0]
        per_run_anti.append(anti)
        per_run_stable.append(all_roots[np.abs(all_roots) < 1.0])
        for p in sorted(all_roots, key=lambda p: (p.imag, p.real)):
            label = "antistable" if abs(p) > 1.0 else "stable"
            pole_rows.append([i, float(p.real), float(p.imag), label])
        per_run.append(
            {
                "run": i,
                "seed": seed,
                "J_hat": est.J_hat,
                "lambda_hat": rec.lambda_hat,
                "gain": rec.gain,
                "antistable_roots": _roots_json(anti),
            }
        )
    if len(failed) > MAX_FAILURE_FRAC * config.runs:
        raise RuntimeError(
            f"{len(failed)} of {config.runs} Monte Carlo runs failed "
            f"(limit {MAX_FAILURE_FRAC:.0%}); first: {failed[0]['reason']}"
        )

    n_ok = len(per_run)
    clusters = _cluster_roots(per_run_anti)
    tracked = [c for c in clusters if c["count"] >= CLUSTER_MIN_FRAC * n_ok]
    untracked = sum(c["count"] for c in clusters) - sum(c["count"] for c in tracked)
    stable_pool = (
        np.concatenate([r for r in per_run_stable if len(r)])
        if any(len(r) for r in per_run_stable)
        else np.empty(0, complex)
    )
    stable_std = (
        float(np.sqrt(stable_pool.real.var(ddof=1) + stable_pool.imag.var(ddof=1)))
        if stable_pool.size > 1
        else 0.0
    )
    unstable_std = (
        float(np.sqrt(np.mean([c["std_re"] ** 2 + c["std_im"] ** 2 for c in tracked])))
        if tracked
        else 0.0
    )
    summary = MonteCarloSummary(
        per_run=per_run,
        failed_runs=failed,
        unstable_roots=tracked,
        n_untracked_antistable=int(untracked),
        lambda_mean=float(np.mean([r["lambda_hat"] for r in per_run])),
        lambda_std=_std([r["lambda_hat"] for r in per_run]),
        J_mean=float(np.mean([r["J_hat"] for r in per_run])),
        J_std=_std([r["J_hat"] for r in per_run]),
        stable_root_pooled_std=stable_std,
        unstable_root_pooled_std=unstable_std,
    )
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / f"poles_n{config.orders.n_a}.csv", "run,re,im,class", pole_rows)
    payload = summary.to_json()
    payload.update(
        {
            "N": config.N,
            "n_a": config.orders.n_a,
            "n_b": config.orders.n_b,
            "runs": config.runs,
            "master_seed": config.master_seed,
            "warmup": config.warmup,
        }
    )
    _write_json(out / "mc_summary.json", payload)
    return summary


def cmd_bode(config: ExperimentConfig, out=None, which=("G", "H", "S")) -> list[Path]:
    """Evaluate true-system transfer functions on the log grid; one CSV per
    curve with columns omega,mag_db,phase_deg."""
    out = Path(out if out is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = make_G(config.spec)
    tfs = {"G": g, "H": make_H(config.spec), "S": sensitivity(g, config.spec.K)}
    grid = config.grid.to_grid()
    written = []
    for name in which:
        if name not in tfs:
            raise ValueError(f"unknown transfer function {name!r}; choose from {sorted(tfs)}")
        path = out / f"curve_{name}.csv"
        _write_csv(path, "omega,mag_db,phase_deg", _bode_rows(grid.omegas, [tfs[name].at_freq(grid.omegas)]))
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# command line


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.runs is not None:
        updates["runs"] = args.runs
    if args.na is not None or args.nb is not None:
        updates["orders"] = ArxOrders(
            args.na if args.na is not None else config.orders.n_a,
            args.nb if args.nb is not None else config.orders.n_b,
        )
    if args.out is not None:
        updates["output_dir"] = args.out
    return dataclasses.replace(config, **updates) if updates else config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arxid",
        description="High-order ARX identification experiments for unstable closed-loop plants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("single", "one simulate/estimate/recover run with Bode artifacts"),
        ("montecarlo", "repeated runs with pole-cloud and variance statistics"),
        ("bode", "frequency-response data for the true system"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        p.add_argument("--runs", type=int, default=None, help="Monte Carlo run count (overrides config)")
        p.add_argument("--na", type=int, default=None, help="order of A (overrides config)")
        p.add_argument("--nb", type=int, default=None, help="order of B (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _apply_overrides(ExperimentConfig.load(args.config), args)
        out = Path(config.output_dir)
        if args.command == "single":
            summary = cmd_single(config)
            print(
                f"wrote {out / 'summary.json'}  "
                f"J_hat={summary['J_hat']:.4f} lambda_hat={summary['lambda_hat']:.4f} "
                f"gain={summary['gain']:.4f}"
            )
        elif args.command == "montecarlo":
            summary = cmd_montecarlo(config)
            print(
                f"wrote {out / 'mc_summary.json'}  "
                f"runs={config.runs} failed={len(summary.failed_runs)} "
                f"lambda_mean={summary.lambda_mean:.4f} J_mean={summary.J_mean:.4f}"
            )
        elif args.command == "bode":
            for path in cmd_bode(config):
                print(f"wrote {path}")
    except (ArxidError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
