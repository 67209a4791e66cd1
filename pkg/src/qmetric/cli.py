"""Reproducible experiment runner.

Reads a JSON config, dispatches to the library, and emits machine-readable
reports: a CSV/JSON table with stable columns and a run manifest.  For a
fixed config and seed the emitted table is byte-identical across runs
(wall-clock time lives only in the manifest).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__, metrics, models, seminorms, triples
from .errors import ConfigInvalid, QmetricError
from .linalg import SIGMA_1, SIGMA_3
from .opsys import OperatorSystem, TensorSystem

COMMANDS = ("axioms", "mk-dist", "diameter", "defect", "ergodic", "torus",
            "product", "tensor-certify", "covering")
CSV_COLUMNS = ("experiment_id", "level_s", "quantity", "value", "bound",
               "certificate", "seed")
TOP_LEVEL_FIELDS = {"schema", "command", "seed", "model", "solver"}
SOLVER_FIELDS = {"restarts", "iterations", "trials", "max_level", "grid",
                 "tolerance", "eps"}


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    return "%.12g" % float(x)


def row(experiment_id, level_s, quantity, value, bound, certificate, seed):
    return {"experiment_id": experiment_id, "level_s": level_s,
            "quantity": quantity, "value": _fmt(value), "bound": _fmt(bound),
            "certificate": certificate, "seed": seed}


def load_config(path: str, seed_override=None) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config must be a JSON object")
    unknown = set(cfg) - TOP_LEVEL_FIELDS
    if unknown:
        raise ConfigInvalid(f"unknown config fields: {sorted(unknown)}")
    if cfg.get("schema") != 1:
        raise ConfigInvalid("config must declare schema: 1")
    if cfg.get("command") not in COMMANDS:
        raise ConfigInvalid(f"command must be one of {COMMANDS}")
    if seed_override is not None:
        cfg["seed"] = int(seed_override)
    if "seed" not in cfg or not isinstance(cfg["seed"], int):
        raise ConfigInvalid("an integer seed is mandatory (config or --seed)")
    solver = cfg.setdefault("solver", {})
    if not isinstance(solver, dict) or set(solver) - SOLVER_FIELDS:
        raise ConfigInvalid(f"solver fields limited to {sorted(SOLVER_FIELDS)}")
    cfg.setdefault("model", {})
    return cfg


def thread_count() -> int:
    raw = os.environ.get("QMS_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _atomic_write(path: str, data: str):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qmetric-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(rows: list, out_dir: str, name: str, fmt: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    if fmt == "csv":
        import io
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        path = os.path.join(out_dir, f"{name}.csv")
        _atomic_write(path, buf.getvalue())
    elif fmt == "json":
        path = os.path.join(out_dir, f"{name}.json")
        _atomic_write(path, json.dumps(rows, indent=2) + "\n")
    else:
        raise ConfigInvalid(f"unknown format {fmt!r}")
    return path


# ---------------------------------------------------------------------------
# model construction from config


def _metric_space(model: dict) -> metrics.FiniteMetricSpace:
    if "dist" not in model:
        raise ConfigInvalid("metric model needs a 'dist' matrix")
    return metrics.FiniteMetricSpace(np.asarray(model["dist"], dtype=float))


def build_family(model: dict):
    """(family, system, descriptor) from a model block."""
    kind = model.get("kind", "fuzzy")
    if kind == "fuzzy":
        m = models.GroupActionModel(int(model.get("q", 3)), int(model.get("p", 1)))
        return m.seminorm(), m.system, m
    if kind == "fuzzy-dirac":
        t = models.fuzzy_dirac_triple(int(model.get("q", 3)), int(model.get("p", 1)))
        return t.family(), t.system, t
    if kind == "metric":
        sp = _metric_space(model)
        return sp.family(), sp.system, sp
    raise ConfigInvalid(f"unknown model kind {kind!r}")


def _standard_triples():
    diag2 = OperatorSystem([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], check=False)
    units = [np.eye(2)[:, [i]] @ np.eye(2)[[j], :] for i in range(2) for j in range(2)]
    even = triples.LipschitzTriple(diag2, SIGMA_1, SIGMA_3)
    odd = triples.LipschitzTriple(OperatorSystem(units, check=False), SIGMA_3)
    return even, odd


# ---------------------------------------------------------------------------
# command runners: each returns (rows, checks)


def run_axioms(cfg, oracle):
    family, _, _ = build_family(cfg["model"])
    solver = cfg["solver"]
    trials = int(solver.get("trials", 50))
    max_level = int(solver.get("max_level", 3))
    rep = seminorms.check_axioms(family, max_level, trials, cfg["seed"])
    rows, checks = [], []
    for name, value in (("direct_sum_max_residual", rep.direct_sum_max_residual),
                        ("bimodule_violation", rep.bimodule_violation),
                        ("star_residual", rep.star_residual),
                        ("scalar_residual", rep.scalar_residual)):
        rows.append(row("axioms", max_level, name, value, 1e-9, "sampled", cfg["seed"]))
        checks.append((name, value <= 1e-9))
    return rows, checks


def run_mk_dist(cfg, oracle):
    model = cfg["model"]
    family, system, ctx = build_family(model)
    pts = model.get("states", [0, 1])
    if isinstance(ctx, metrics.FiniteMetricSpace):
        phi, psi = ctx.dirac_state(int(pts[0])), ctx.dirac_state(int(pts[1]))
    else:
        raise ConfigInvalid("mk-dist currently runs on metric models")
    problem = metrics.MkProblem(family, system, phi, psi)
    solver = cfg["solver"]
    rep = metrics.mk_distance(problem, seed=cfg["seed"],
                              restarts=int(solver.get("restarts", 8)),
                              iterations=int(solver.get("iterations", 500)),
                              oracle=oracle)
    rows = [row("mk-dist", 1, "distance", rep.value, "", rep.certificate, cfg["seed"])]
    checks = [("finite", not rep.infinite)]
    return rows, checks


def run_diameter(cfg, oracle):
    family, _, ctx = build_family(cfg["model"])
    solver = cfg["solver"]
    rep = metrics.finite_diameter_constant(
        family, int(solver.get("max_level", 2)), int(solver.get("trials", 50)),
        cfg["seed"])
    bound = ctx.eta_ell() if isinstance(ctx, models.GroupActionModel) else ""
    rows = [row("diameter", int(solver.get("max_level", 2)), "diameter_constant",
                rep.value, bound, rep.certificate, cfg["seed"])]
    checks = []
    if bound != "":
        checks.append(("diameter_below_eta", rep.value <= bound + 1e-9))
    return rows, checks


def _fuzzy_defect(cfg, r):
    model = cfg["model"]
    m = models.GroupActionModel(int(model.get("q", 3)), int(model.get("p", 1)))
    weight = m.fejer_weight(r)
    pair = metrics.ApproxPair(m.system, np.eye(m.system.dim),
                              m.averaging_coordinate_matrix(weight),
                              {"completely_positive": True},
                              eps_analytic=m.analytic_defect_bound(weight),
                              label=f"fejer-{r}")
    solver = cfg["solver"]
    rep = metrics.approximation_defect(
        pair, m.seminorm(), int(solver.get("max_level", 2)),
        int(solver.get("trials", 40)), cfg["seed"])
    return m, rep, pair


def run_defect(cfg, oracle):
    r = int(cfg["model"].get("fejer_r", 0))
    _, rep, pair = _fuzzy_defect(cfg, r)
    rows = [row("defect", int(cfg["solver"].get("max_level", 2)),
                f"defect_fejer_{r}", rep.value, pair.eps_analytic,
                rep.certificate, cfg["seed"])]
    checks = [("defect_below_bound", rep.value <= pair.eps_analytic + 1e-9)]
    return rows, checks


def run_ergodic(cfg, oracle):
    model = cfg["model"]
    q = int(model.get("q", 3))
    m = models.GroupActionModel(q, int(model.get("p", 1)))
    rows, checks = [], []
    prev = None
    for r in m.fejer_sequence():
        _, rep, pair = _fuzzy_defect(cfg, r)
        rows.append(row("ergodic", int(cfg["solver"].get("max_level", 2)),
                        f"defect_fejer_{r}", rep.value, pair.eps_analytic,
                        rep.certificate, cfg["seed"]))
        checks.append((f"defect_bound_r{r}", rep.value <= pair.eps_analytic + 1e-9))
        if prev is not None:
            checks.append((f"defect_monotone_r{r}", rep.value <= prev + 1e-9))
        prev = rep.value

    rng = np.random.default_rng(cfg["seed"])
    a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    total = sum(m.spectral_projection((r_, t_), a)
                for r_ in range(q) for t_ in range(q))
    resid = float(np.linalg.norm(total - a))
    idem = max(float(np.linalg.norm(
        m.spectral_projection(g, m.spectral_projection(g, a))
        - m.spectral_projection(g, a))) for g in m.group)
    rows.append(row("ergodic", 1, "projection_completeness_residual", resid,
                    1e-10, "exact-sum", cfg["seed"]))
    rows.append(row("ergodic", 1, "projection_idempotent_residual", idem,
                    1e-10, "exact-sum", cfg["seed"]))
    checks.append(("projections_complete", resid <= 1e-10))
    checks.append(("projections_idempotent", idem <= 1e-10))
    return rows, checks


def run_torus(cfg, oracle):
    model = cfg["model"]
    alg = models.TorusAlgebra(int(model.get("q", 3)), int(model.get("p", 1)))
    solver = cfg["solver"]
    grid = int(solver.get("grid", 48))
    degree = int(model.get("degree", 3))
    rows, checks = [], []
    for s in (1, 2):
        rep = models.check_action_vs_dirac(alg, s, int(solver.get("trials", 20)),
                                           cfg["seed"] + s, degree=degree, grid=grid)
        for name in ("action_violation", "partial_violation"):
            rows.append(row("torus", s, name, rep[name], 0.0, "sampled", cfg["seed"]))
            checks.append((f"{name}_s{s}", rep[name] <= 0.0))
    x = alg.random_polynomial(np.random.default_rng(cfg["seed"]), 1, degree)
    coarse, err = x.dirac_seminorm(grid)
    fine, _ = x.dirac_seminorm(2 * grid)
    rows.append(row("torus", 1, "grid_refinement_delta", fine - coarse, err,
                    "certified", cfg["seed"]))
    checks.append(("grid_monotone", fine >= coarse - 1e-12))
    checks.append(("grid_within_certified_error", fine - coarse <= err + 1e-12))
    return rows, checks


def run_product(cfg, oracle):
    even, odd = _standard_triples()
    solver = cfg["solver"]
    s = int(solver.get("max_level", 2))
    trials = int(solver.get("trials", 50))
    rows, checks = [], []
    for t1, t2 in ((even, even), (even, odd), (odd, even), (odd, odd)):
        p = triples.external_product(t1, t2)
        rep = triples.check_product_inequality(p, s, trials, cfg["seed"])
        rows.append(row("product", s, f"{p.parity_case}_violation",
                        rep["violation"], 1e-9, "sampled", cfg["seed"]))
        rows.append(row("product", s, f"{p.parity_case}_recovery_residual",
                        rep["recovery_residual"], 1e-10, "sampled", cfg["seed"]))
        checks.append((f"{p.parity_case}_violation", rep["violation"] <= 1e-9))
        checks.append((f"{p.parity_case}_recovery",
                       rep["recovery_residual"] <= 1e-10))
    sigma = triples.external_product(even, even)
    spectrum = np.linalg.eigvalsh(sigma.result.dirac)
    for i, lam in enumerate(spectrum):
        rows.append(row("product", 1, f"sigma_spectrum_{i}", lam, "",
                        "exact", cfg["seed"]))
    checks.append(("sigma_spectrum_sqrt2",
                   bool(np.allclose(np.abs(spectrum), np.sqrt(2), atol=1e-10))))
    return rows, checks


def run_tensor_certify(cfg, oracle):
    model = cfg["model"]
    q = int(model.get("q", 3))
    r = int(model.get("fejer_r", 1))
    mx = models.GroupActionModel(q, int(model.get("p", 1)))
    my = models.GroupActionModel(q, int(model.get("p", 1)))
    tsys = TensorSystem(mx.system, my.system)
    left = seminorms.tensor_lift(mx.seminorm(), tsys, "left")
    right = seminorms.tensor_lift(my.seminorm(), tsys, "right")
    m_family = seminorms.max_seminorm(left, right)

    def avg_pair(m, label):
        w = m.fejer_weight(r)
        return metrics.ApproxPair(m.system, np.eye(m.system.dim),
                                  m.averaging_coordinate_matrix(w),
                                  {"completely_positive": True},
                                  eps_analytic=m.analytic_defect_bound(w),
                                  label=label), m.analytic_defect_bound(w)

    pair_x, eps_x = avg_pair(mx, "fejer-x")
    pair_y, eps_y = avg_pair(my, "fejer-y")
    solver = cfg["solver"]
    report = metrics.tensor_product_certification(
        tsys, m_family, left, right, pair_x, pair_y, eps_x, eps_y,
        mx.eta_ell(), my.eta_ell(), D=1.0,
        max_level=int(solver.get("max_level", 2)),
        trials=int(solver.get("trials", 30)), seed=cfg["seed"])
    rows = [
        row("tensor-certify", 2, "tensor_defect", report["defect"],
            report["defect_bound"], "lower_bound", cfg["seed"]),
        row("tensor-certify", 2, "tensor_diameter", report["diameter"],
            report["diameter_bound"], "lower_bound", cfg["seed"]),
    ]
    checks = [("tensor_defect", report["defect_ok"]),
              ("tensor_diameter", report["diameter_ok"])]
    return rows, checks


def run_covering(cfg, oracle):
    family, _, _ = build_family(cfg["model"])
    solver = cfg["solver"]
    eps_list = cfg["model"].get("eps", [1.0, 0.5])
    samples = int(solver.get("trials", 100))
    rows, checks = [], []
    prev = 0
    for eps in eps_list:
        size = metrics.covering_diagnostic(family, float(eps), samples, cfg["seed"])
        rows.append(row("covering", 1, f"net_size_eps_{eps:g}", size, "",
                        "lower_bound", cfg["seed"]))
        checks.append((f"net_monotone_eps_{eps:g}", size >= prev))
        prev = size
    return rows, checks


RUNNERS = {"axioms": run_axioms, "mk-dist": run_mk_dist, "diameter": run_diameter,
           "defect": run_defect, "ergodic": run_ergodic, "torus": run_torus,
           "product": run_product, "tensor-certify": run_tensor_certify,
           "covering": run_covering}


def run(cfg: dict, out_dir: str, fmt: str, oracle: bool) -> dict:
    start = time.time()
    rows, checks = RUNNERS[cfg["command"]](cfg, oracle)
    table_path = emit(rows, out_dir, cfg["command"], fmt)
    manifest = {
        "schema": 1,
        "command": cfg["command"],
        "config_sha256": hashlib.sha256(
            json.dumps(cfg, sort_keys=True).encode()).hexdigest(),
        "version": __version__,
        "seed": cfg["seed"],
        "threads": thread_count(),
        "wall_seconds": time.time() - start,
        "checks": [{"name": n, "passed": bool(p)} for n, p in checks],
        "files": [table_path],
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    _atomic_write(manifest_path, json.dumps(manifest, indent=2) + "\n")
    return manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qmetric",
        description="Finite-dimensional quantum metric geometry workbench")
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--oracle", action="store_true",
                        help="enable brute-force validation paths")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
        manifest = run(cfg, args.out, args.format, args.oracle)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QmetricError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 3
    failed = [c["name"] for c in manifest["checks"] if not c["passed"]]
    for c in manifest["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}")
    if failed:
        print(f"{len(failed)} check(s) failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
