"""Experiment drivers behind the command-line interface.

Each driver takes a validated ExperimentConfig plus an output directory and
writes self-describing artifacts: CSVs (with '#' provenance comments naming
the package version, experiment kind, seed, and config hash), JSON
summaries, checkpoints, and rendered figures.  Reruns with the same config
and seed produce byte-identical CSV and JSON artifacts; worker count and
output location never influence content.

Sweep trials are independent jobs.  Seeds are derived per job from the base
seed and the job's grid coordinates, so results do not depend on scheduling,
and jobs are merged in grid order regardless of completion order.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._version import VERSION
from .analysis import (
    eigenvalue_histogram,
    gamma_norm,
    param_count_comparison,
    r2_score,
    spectral_prune,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ExperimentConfig
from .datasets import add_bias_column, gen_family, gen_teacher, save_csv
from .errors import ConfigError, TrainingDivergedError
from .ioutil import format_float, write_csv
from .network import backward, finite_difference_gradients, forward, mse_grad
from .spectral import (
    SpectralParams,
    assemble_dense_adjacency,
    binomial_identities,
    export_direct,
    init_perceptron,
    nilpotency_residual,
    phi_dense,
    phi_inverse_blocks,
    phi_inverse_polynomial,
    random_params,
    weight_blocks,
)
from .training import TrainConfig, train

__all__ = [
    "VerifyReport",
    "GradcheckReport",
    "run_verify",
    "run_gradcheck",
    "run_paramcount",
    "run_family_sweep",
    "run_teacher_student",
    "run_export",
]


def _provenance(cfg: ExperimentConfig) -> list[str]:
    return [
        f"version: sparcs-{VERSION}",
        f"kind: {cfg.kind}",
        f"seed: {cfg.seed}",
        f"config: sha256:{cfg.config_hash}",
    ]


def _resolve_parallel(cfg: ExperimentConfig) -> int:
    return cfg.parallel if cfg.parallel >= 1 else (os.cpu_count() or 1)


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="ascii")


def _job_seeds(base: int, *coords: int) -> list[int]:
    """Deterministic child seeds from the base seed and grid coordinates."""
    ss = np.random.SeedSequence((base,) + coords)
    return [int(v) for v in ss.generate_state(3)]


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@dataclass
class VerifyReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def lines(self) -> list[str]:
        return [
            f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
            for name, passed, detail in self.checks
        ]


def run_verify(
    seed: int = 42,
    max_b: int = 6,
    trials: int = 100,
    max_size: int = 8,
    binomial_max_b: int = 25,
) -> VerifyReport:
    """Cross-check every closed form against its independent dense oracle.

    Draws random configurations and compares: the polynomial inverse against
    the identity, the closed-form inverse blocks against the polynomial
    inverse, the closed-form weight bundles against sub-blocks of the dense
    reassembled adjacency matrix, and the nilpotency of the shifted
    eigenvector matrix.  Also evaluates the exact binomial identities.
    """
    rng = np.random.default_rng(seed)
    report = VerifyReport()

    worst = {"inverse": 0.0, "blocks": 0.0, "weights": 0.0, "diag": 0.0, "nilpotency": 0.0}
    first_fail: dict[str, str] = {}

    def note(check: str, value: float, tol: float, desc: str) -> None:
        worst[check] = max(worst[check], value)
        if value >= tol and check not in first_fail:
            first_fail[check] = f"{desc} residual {value:.3e}"

    for t in range(trials):
        b = int(rng.integers(1, max_b + 1))
        sizes = tuple(int(v) for v in rng.integers(1, max_size + 1, size=b + 1))
        params = random_params(sizes, rng)
        desc = f"trial {t} sizes {sizes}"

        full = phi_dense(params)
        inv = phi_inverse_polynomial(params)
        total = full.shape[0]
        note("inverse", float(np.max(np.abs(full @ inv - np.eye(total)))), 1e-10, desc)

        offsets = np.cumsum((0,) + sizes)
        closed = phi_inverse_blocks(params)
        res = 0.0
        for (i, j), s in closed.items():
            sub = inv[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]]
            res = max(res, float(np.max(np.abs(s - sub))))
        note("blocks", res, 1e-10, desc)

        dense = assemble_dense_adjacency(params)
        res = 0.0
        for (i, j), w in weight_blocks(params).items():
            sub = dense[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]]
            res = max(res, float(np.max(np.abs(w - sub))))
        for i in range(b + 1):
            for j in range(i + 1, b + 1):
                sub = dense[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]]
                res = max(res, float(np.max(np.abs(sub))))
        note("weights", res, 1e-10, desc)

        res = 0.0
        for l in range(b + 1):
            sub = dense[offsets[l] : offsets[l + 1], offsets[l] : offsets[l + 1]]
            res = max(res, float(np.max(np.abs(sub - np.diag(params.eig[l])))))
        note("diag", res, 1e-12, desc)

        note("nilpotency", nilpotency_residual(params), 1e-9, desc)

    tols = {"inverse": 1e-10, "blocks": 1e-10, "weights": 1e-10, "diag": 1e-12, "nilpotency": 1e-9}
    names = {
        "inverse": "polynomial inverse times eigenvector matrix is identity",
        "blocks": "closed-form inverse blocks match polynomial inverse",
        "weights": "closed-form weight bundles match dense adjacency",
        "diag": "dense adjacency diagonal blocks carry the eigenvalues",
        "nilpotency": "shifted eigenvector matrix is nilpotent",
    }
    for check in worst:
        passed = check not in first_fail
        detail = (
            f"worst residual {worst[check]:.3e} over {trials} trials (tol {tols[check]:.0e})"
            if passed
            else first_fail[check]
        )
        report.checks.append((names[check], passed, detail))

    bn = binomial_identities(binomial_max_b)
    detail = (
        f"{bn.unit_sums_checked} unit sums and {bn.vanishing_sums_checked} vanishing sums exact"
        if bn.ok
        else "; ".join(bn.failures[:3])
    )
    report.checks.append((f"binomial identities up to B={binomial_max_b}", bn.ok, detail))
    return report


# ---------------------------------------------------------------------------
# gradcheck
# ---------------------------------------------------------------------------


@dataclass
class GradcheckReport:
    configs: int
    params_checked: int
    kink_excluded: int
    worst_rel: float

    def ok(self, tol: float = 1e-4) -> bool:
        return self.worst_rel < tol


# Entries where both gradient routes fall below this magnitude are compared
# on the scale of the floor itself; relative error is meaningless against
# finite-difference roundoff there.
_GRAD_FLOOR = 1e-4


def compare_gradients(
    params: SpectralParams, x: np.ndarray, y: np.ndarray, eps: float = 1e-6
) -> tuple[float, int, int]:
    """Worst relative disagreement between analytic and FD gradients.

    The finite-difference side is central differences at two step sizes
    combined by Richardson extrapolation, which cancels the quadratic
    truncation term and leaves roundoff far below the comparison floor.
    Parameters flagged kinked at either step size are excluded.  Returns
    (worst relative error, entries compared, entries kink-excluded).
    """
    yhat, trace = forward(params, x)
    analytic = backward(params, trace, mse_grad(yhat, y))
    coarse = finite_difference_gradients(params, x, y, eps=2.0 * eps)
    fine = finite_difference_gradients(params, x, y, eps=eps)

    worst = 0.0
    checked = 0
    kinked = 0
    pairs = list(zip(analytic.d_phi, coarse.grads.d_phi, fine.grads.d_phi,
                     coarse.kink_phi, fine.kink_phi))
    pairs += list(zip(analytic.d_eig, coarse.grads.d_eig, fine.grads.d_eig,
                      coarse.kink_eig, fine.kink_eig))
    for a, c, f, kc, kf in pairs:
        extrap = (4.0 * f - c) / 3.0
        mask = ~(kc | kf)
        kinked += int(np.sum(~mask))
        if not np.any(mask):
            continue
        denom = np.maximum(np.maximum(np.abs(a), np.abs(extrap)), _GRAD_FLOOR)
        rel = np.abs(a - extrap) / denom
        worst = max(worst, float(np.max(rel[mask])))
        checked += int(np.sum(mask))
    return worst, checked, kinked


def run_gradcheck(
    seed: int = 42,
    configs: int = 50,
    eps: float = 1e-6,
    max_b: int = 3,
    max_size: int = 5,
) -> GradcheckReport:
    """Analytic vs finite-difference gradients over random configurations."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    kinked = 0
    for _ in range(configs):
        b = int(rng.integers(1, max_b + 1))
        sizes = tuple(int(v) for v in rng.integers(1, max_size + 1, size=b + 1))
        frozen = bool(rng.integers(0, 2))
        params = random_params(sizes, rng, frozen_input=frozen)
        n = int(rng.integers(1, 9))
        x = rng.uniform(-1.0, 1.0, size=(n, sizes[0]))
        y = rng.uniform(-1.0, 1.0, size=(n, sizes[-1]))
        w, c, k = compare_gradients(params, x, y, eps=eps)
        worst = max(worst, w)
        checked += c
        kinked += k
    return GradcheckReport(configs, checked, kinked, worst)


# ---------------------------------------------------------------------------
# paramcount
# ---------------------------------------------------------------------------


def run_paramcount(cfg: ExperimentConfig, out_dir: str | None) -> list[str]:
    """Tabulate spectral vs direct parameter counts; returns printable lines.

    With an output directory, also writes param_counts.csv and one figure
    per width.
    """
    widths = cfg.get("paramcount", "widths")
    depths = cfg.get("paramcount", "depths")
    lines = []
    rows = []
    for width in widths:
        for depth in depths:
            if depth < 2:
                raise ConfigError(f"depths must be >= 2 layers, got {depth}")
            sizes = (width,) * depth
            pc = param_count_comparison(sizes)
            phi_sum = "+".join(str(t) for t in pc.phi_terms)
            eig_sum = "+".join(str(t) for t in pc.eig_terms)
            direct_sum = "+".join(str(t) for _, _, t in pc.direct_terms)
            lines.append(
                f"layers={depth} width={width}: "
                f"spectral=({phi_sum})+({eig_sum})={pc.spectral_total}  "
                f"direct=({direct_sum})={pc.direct_total}  "
                f"smaller={'spectral' if pc.spectral_total < pc.direct_total else 'direct'}"
            )
            rows.append(
                [depth, width, sum(pc.phi_terms), sum(pc.eig_terms),
                 pc.spectral_total, pc.direct_total]
            )
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(
            out / "param_counts.csv",
            ["depth", "width", "spectral_phi", "spectral_eig", "spectral_total", "direct_total"],
            rows,
            comments=_provenance(cfg),
        )
        from .figures import save_param_counts

        for width in widths:
            pts = [(r[0], r[4], r[5]) for r in rows if r[1] == width]
            save_param_counts(out / f"param_counts_w{width}.png", pts)
    return lines


# ---------------------------------------------------------------------------
# family sweep
# ---------------------------------------------------------------------------


def _family_job(job: dict) -> dict:
    """One training run of the interpolation-family sweep (worker process)."""
    ds = gen_family(job["alpha"], job["beta"], job["n"], job["d"], job["data_seed"])
    x = add_bias_column(ds.x) if job["bias"] else ds.x
    layers = (x.shape[1],) + tuple(job["hidden"]) + (1,)
    params = init_perceptron(layers, job["init_seed"])
    tc = TrainConfig(
        learning_rate=job["learning_rate"],
        batch_size=job["batch_size"],
        epochs=job["epochs"],
        reg_type=job["reg_type"],
        reg_strength=job["reg_strength"],
        validation_fraction=job["validation_fraction"],
        seed=job["train_seed"],
    )
    out = {k: job[k] for k in ("alpha", "beta", "trial", "data_seed", "init_seed", "train_seed")}
    try:
        params, hist = train(params, x, ds.y, tc)
    except TrainingDivergedError as exc:
        out.update(status="failed", error=str(exc), final_train_loss=float("nan"),
                   final_val_loss=float("nan"), gamma_norm=float("nan"),
                   eig_norm=float("nan"), history=None)
        return out
    hidden_eigs = np.concatenate([params.eig[l] for l in params.hidden_indices])
    out.update(
        status="ok",
        error="",
        final_train_loss=hist.train_loss[-1],
        final_val_loss=hist.val_loss[-1],
        gamma_norm=gamma_norm(params) if params.b == 2 else float("nan"),
        eig_norm=float(np.linalg.norm(hidden_eigs)),
        history=(hist.header(), hist.rows()) if job["save_histories"] else None,
    )
    return out


def _normalized_curves(betas, alphas, cell_values) -> list[list[float]]:
    """Aggregate per-cell trial values into normalized mean/std curves.

    cell_values[(bi, ai)] is the list of per-trial scalars.  Mean and
    population std are taken over successful trials, then both are scaled by
    the maximum mean across the alpha grid of that beta, so every curve tops
    out at one.
    """
    rows = []
    for bi, beta in enumerate(betas):
        means, stds = [], []
        for ai in range(len(alphas)):
            vals = [v for v in cell_values[(bi, ai)] if np.isfinite(v)]
            means.append(float(np.mean(vals)) if vals else float("nan"))
            stds.append(float(np.std(vals)) if vals else float("nan"))
        finite = [m for m in means if np.isfinite(m)]
        peak = max(finite) if finite else float("nan")
        scale = peak if peak and peak > 0 else 1.0
        for ai, alpha in enumerate(alphas):
            rows.append([alpha, beta, means[ai] / scale, stds[ai] / scale])
    return rows


def run_family_sweep(cfg: ExperimentConfig, out_dir: str) -> dict:
    """Train across the (alpha, beta, trial) grid and report recruitment.

    For every dataset of the interpolation family, trains fresh students and
    records how strongly the hidden layer was recruited: the norm of the
    hidden-path product tensor and the norm of the hidden eigenvalues.
    Writes normalized mean/std curves, the per-run table, per-run histories,
    figures, and a JSON summary.
    """
    hidden = cfg.get("model", "hidden")
    if len(hidden) != 1:
        raise ConfigError(
            f"family sweep needs exactly one hidden layer, got {hidden}"
        )
    alphas = list(cfg.get("data", "alphas"))
    betas = list(cfg.get("data", "betas"))
    trials = cfg.get("data", "trials")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = []
    for bi, beta in enumerate(betas):
        for ai, alpha in enumerate(alphas):
            data_seed = _job_seeds(cfg.seed, bi, ai)[0]
            for t in range(trials):
                _, init_seed, train_seed = _job_seeds(cfg.seed, bi, ai, t)
                jobs.append(
                    {
                        "alpha": float(alpha),
                        "beta": float(beta),
                        "trial": t,
                        "data_seed": data_seed,
                        "init_seed": init_seed,
                        "train_seed": train_seed,
                        "d": cfg.get("data", "d"),
                        "n": cfg.get("data", "n"),
                        "bias": cfg.get("model", "bias"),
                        "hidden": tuple(hidden),
                        "learning_rate": cfg.get("train", "learning_rate"),
                        "batch_size": cfg.get("train", "batch_size"),
                        "epochs": cfg.get("train", "epochs"),
                        "reg_type": cfg.get("train", "reg_type"),
                        "reg_strength": cfg.get("train", "reg_strength"),
                        "validation_fraction": cfg.get("train", "validation_fraction"),
                        "save_histories": cfg.get("report", "save_histories"),
                    }
                )

    workers = _resolve_parallel(cfg)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_family_job, jobs, chunksize=1))
    else:
        results = []
        for i, job in enumerate(jobs):
            results.append(_family_job(job))
            if (i + 1) % 25 == 0:
                print(f"  family sweep: {i + 1}/{len(jobs)} runs done", flush=True)

    comments = _provenance(cfg)
    run_rows = []
    gamma_cells: dict[tuple[int, int], list[float]] = {}
    eig_cells: dict[tuple[int, int], list[float]] = {}
    hist_dir = out / "histories"
    if cfg.get("report", "save_histories"):
        hist_dir.mkdir(exist_ok=True)
    idx = 0
    for bi, beta in enumerate(betas):
        for ai, alpha in enumerate(alphas):
            gamma_cells[(bi, ai)] = []
            eig_cells[(bi, ai)] = []
            for t in range(trials):
                r = results[idx]
                idx += 1
                ok = r["status"] == "ok"
                run_rows.append(
                    [r["alpha"], r["beta"], t, r["status"], r["data_seed"],
                     r["init_seed"], r["train_seed"], r["final_train_loss"],
                     r["final_val_loss"], r["gamma_norm"], r["eig_norm"]]
                )
                if ok:
                    gamma_cells[(bi, ai)].append(r["gamma_norm"])
                    eig_cells[(bi, ai)].append(r["eig_norm"])
                if r["history"] is not None:
                    header, rows = r["history"]
                    write_csv(
                        hist_dir / f"history_b{bi}_a{ai}_t{t}.csv",
                        header,
                        rows,
                        comments=comments
                        + [f"alpha: {format_float(alpha)}", f"beta: {format_float(beta)}",
                           f"trial: {t}"],
                    )

    write_csv(
        out / "runs.csv",
        ["alpha", "beta", "trial", "status", "data_seed", "init_seed",
         "train_seed", "final_train_loss", "final_val_loss", "gamma_norm", "eig_norm"],
        run_rows,
        comments=comments,
    )
    gamma_rows = _normalized_curves(betas, alphas, gamma_cells)
    eig_rows = _normalized_curves(betas, alphas, eig_cells)
    write_csv(out / "gamma_vs_alpha.csv", ["alpha", "beta", "mean", "std"],
              gamma_rows, comments=comments)
    write_csv(out / "eig_norm_vs_alpha.csv", ["alpha", "beta", "mean", "std"],
              eig_rows, comments=comments)

    n_failed = sum(1 for r in results if r["status"] != "ok")
    summary = {
        "kind": cfg.kind,
        "seed": cfg.seed,
        "config": f"sha256:{cfg.config_hash}",
        "alphas": [float(a) for a in alphas],
        "betas": [float(b) for b in betas],
        "trials": trials,
        "runs": len(results),
        "failed_runs": n_failed,
    }
    _write_json(out / "summary.json", summary)

    if cfg.get("report", "figures"):
        from .figures import save_sweep_curves

        save_sweep_curves(out / "gamma_vs_alpha.png", gamma_rows,
                          "normalized hidden-path norm", "hidden-layer recruitment")
        save_sweep_curves(out / "eig_norm_vs_alpha.png", eig_rows,
                          "normalized eigenvalue norm", "hidden eigenvalue norm")
    return summary


# ---------------------------------------------------------------------------
# teacher-student
# ---------------------------------------------------------------------------


def run_teacher_student(cfg: ExperimentConfig, out_dir: str) -> dict:
    """Train a deep student on a shallow teacher, then prune it back down.

    Emits the training history, eigenvalue histograms for every hidden
    layer, the pruning curve, pruned and unpruned checkpoints, figures, and
    a JSON summary comparing the pruned student against an ordinary linear
    least-squares baseline on the same validation split.
    """
    d = cfg.get("data", "d")
    n = cfg.get("data", "n")
    hidden = cfg.get("model", "hidden")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    comments = _provenance(cfg)

    data_seed, init_seed, train_seed = _job_seeds(cfg.seed, 0, 0, 0)
    dataset, teacher = gen_teacher(d, d, n, data_seed)
    x = add_bias_column(dataset.x) if cfg.get("model", "bias") else dataset.x
    layers = (x.shape[1],) + tuple(hidden) + (d,)
    params = init_perceptron(layers, init_seed)
    tc = TrainConfig(
        learning_rate=cfg.get("train", "learning_rate"),
        batch_size=cfg.get("train", "batch_size"),
        epochs=cfg.get("train", "epochs"),
        reg_type=cfg.get("train", "reg_type"),
        reg_strength=cfg.get("train", "reg_strength"),
        validation_fraction=cfg.get("train", "validation_fraction"),
        seed=train_seed,
    )
    print(f"  training student {layers} on teacher d={d} (n={n}) ...", flush=True)
    params, hist = train(params, x, dataset.y, tc)

    write_csv(out / "history.csv", hist.header(), hist.rows(), comments=comments)
    save_checkpoint(params, out / "trained_checkpoint.txt")

    x_val, y_val = x[hist.val_indices], dataset.y[hist.val_indices]
    threshold = cfg.get("prune", "threshold_pct")
    pruned, curve = spectral_prune(params, x_val, y_val, threshold)
    save_checkpoint(pruned, out / "pruned_checkpoint.txt")
    write_csv(
        out / "pruning_curve.csv",
        ["active_neurons", "relative_loss_increase"],
        list(zip(curve.active_neurons, curve.rel_increase)),
        comments=comments + [f"baseline_val_loss: {format_float(curve.baseline_loss)}",
                             f"threshold_pct: {format_float(threshold)}",
                             f"correspondence_warning: {int(curve.correspondence_warning)}"],
    )

    hist_csvs = []
    for l in params.hidden_indices:
        counts, edges = eigenvalue_histogram(params, l)
        rows = [[edges[i], edges[i + 1], int(counts[i])] for i in range(len(counts))]
        path = out / f"eig_hist_layer{l + 1}.csv"
        write_csv(path, ["bin_left", "bin_right", "count"], rows, comments=comments)
        hist_csvs.append((l, counts, edges))

    # Baseline: ordinary least squares (with intercept) on the identical split.
    from .linalg import least_squares

    xa = add_bias_column(dataset.x)
    beta_ols = least_squares(xa[hist.train_indices], dataset.y[hist.train_indices])
    r2_ols = r2_score(xa[hist.val_indices] @ beta_ols, y_val)
    r2_unpruned = r2_score(forward(params, x_val)[0], y_val)
    r2_pruned = r2_score(forward(pruned, x_val)[0], y_val)

    active_before = int(sum(np.count_nonzero(params.eig[l]) for l in params.hidden_indices))
    summary = {
        "kind": cfg.kind,
        "seed": cfg.seed,
        "config": f"sha256:{cfg.config_hash}",
        "layers": list(layers),
        "teacher_d": d,
        "n": n,
        "baseline_val_loss": curve.baseline_loss,
        "threshold_pct": threshold,
        "r2_ols": r2_ols,
        "r2_unpruned": r2_unpruned,
        "r2_pruned": r2_pruned,
        "active_hidden_before": active_before,
        "active_hidden_after": curve.chosen_active,
        "removable_layers": curve.removable_layers,
        "correspondence_warning": curve.correspondence_warning,
        "eig_mean_abs": {
            str(l + 1): float(np.mean(np.abs(params.eig[l])))
            for l in params.hidden_indices
        },
    }
    _write_json(out / "summary.json", summary)

    if cfg.get("report", "save_datasets"):
        save_csv(dataset, out / f"teacher_d{d}_seed{data_seed}.csv")
    if cfg.get("report", "figures"):
        from .figures import save_eig_histogram, save_history_curves, save_pruning_curve

        save_history_curves(out / "history.png", hist.epochs, hist.train_loss,
                            hist.val_loss, f"student {layers}")
        for l, counts, edges in hist_csvs:
            save_eig_histogram(out / f"eig_hist_layer{l + 1}.png", counts, edges,
                               f"layer {l + 1} eigenvalue magnitudes")
        save_pruning_curve(out / "pruning_curve.png", curve.active_neurons,
                           curve.rel_increase, threshold)
    return summary


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def run_export(cfg: ExperimentConfig, out_dir: str) -> dict:
    """Materialize a checkpoint into an explicit direct-space weight list."""
    ckpt = cfg.get("export", "checkpoint")
    threshold = cfg.get("export", "threshold")
    params = load_checkpoint(ckpt)
    model = export_direct(params, threshold)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    obj = {
        "layer_sizes": list(model.layer_sizes),
        "active_sizes": [model.active_size(l) for l in range(len(model.layer_sizes))],
        "kept": [[int(i) for i in k] for k in model.kept],
        "removed_layers": [l + 1 for l in model.removed_layers()],
        "threshold": threshold,
        "bundles": [
            {
                "dst": dst + 1,
                "src": src + 1,
                "rows": w.shape[0],
                "cols": w.shape[1],
                "weights": [float(v) for v in w.ravel()],
            }
            for dst, src, w in model.entries
        ],
    }
    _write_json(out / "direct_model.json", obj)
    return obj
