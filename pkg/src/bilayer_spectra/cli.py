"""Experiment runner: command dispatch, sweep orchestration, CSV/JSON output.

Every command is deterministic given its config; rows are canonically ordered
and floats emitted at 17 significant digits, so identical configs produce
byte-identical CSV files.  Each row carries the config hash.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .bounds import lq_norm, n_q, thm1_lhs, thm2_regions
from .config import (ConfigError, ExperimentConfig, known_commands,
                     load_config)
from .fermi import find_critical_points, trace_level_set
from .operators import (BirmanSchwinger, Grid, NearSingularError,
                        OperatorSizeError, PotentialField,
                        SupportTooLargeError, bs_norm, build_grid,
                        eigenvalues_bs_scan, eigenvalues_dense,
                        frequency_cutoffs, schatten_norm)
from .oscillatory import cancellation_sup, decay_exponent
from .potentials import build_potential
from .symbols import BILAYER, TRIG


class EmitError(RuntimeError):
    """Record list failed the emission invariants (NaN/Inf or bad path)."""


@dataclass
class RunResult:
    command: str
    columns: List[str]
    records: List[Dict]
    summary: Dict
    config: ExperimentConfig

    @property
    def config_hash(self) -> str:
        return self.config.config_hash


def _model_kind(cfg: ExperimentConfig) -> str:
    return BILAYER if cfg.model == "bilayer" else TRIG


def _grid(cfg: ExperimentConfig) -> Grid:
    return build_grid(cfg.grid_n, cfg.grid_l)


def _potential(cfg: ExperimentConfig, grid: Grid) -> PotentialField:
    return build_potential(cfg.potential_family, grid,
                           cfg.potential_amplitude, cfg.potential_width)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_critical_points(cfg: ExperimentConfig) -> RunResult:
    pts = find_critical_points()
    rows = [dict(x=float(p.location[0]), y=float(p.location[1]),
                 value=p.value, kind=p.kind,
                 hess_eig_1=p.hessian_eigs[0], hess_eig_2=p.hessian_eigs[1],
                 grad_norm=p.grad_norm) for p in pts]
    summary = dict(count=len(pts),
                   n_minima=sum(1 for p in pts if p.kind == "minimum"),
                   n_saddles=sum(1 for p in pts if p.kind == "saddle"))
    return RunResult("critical-points",
                     ["x", "y", "value", "kind", "hess_eig_1", "hess_eig_2",
                      "grad_norm"], rows, summary, cfg)


def _cmd_fermi(cfg: ExperimentConfig) -> RunResult:
    curve = trace_level_set(cfg.lam, step=cfg.step)
    rows = []
    for ci in range(curve.n_components):
        verts = curve.components[ci]
        s = curve.arclength[ci]
        kap = curve.curvature[ci]
        for vi in range(len(verts)):
            rows.append(dict(component=ci, vertex=vi, s=float(s[vi]),
                             x1=float(verts[vi, 0]), x2=float(verts[vi, 1]),
                             curvature=float(kap[vi])))
    summary = dict(lam=cfg.lam, n_components=curve.n_components,
                   perimeters=[float(s[-1]) for s in curve.arclength])
    return RunResult("fermi", ["component", "vertex", "s", "x1", "x2",
                               "curvature"], rows, summary, cfg)


def _cmd_ft_decay(cfg: ExperimentConfig) -> RunResult:
    curve = trace_level_set(cfg.lam, step=cfg.step)
    cutoff = None
    if cfg.cutoff_radius is not None:
        cx = cfg.cutoff_center_x or 0.0
        cy = cfg.cutoff_center_y or 0.0
        rad = cfg.cutoff_radius

        def cutoff(pts, _c=(cx, cy), _r=rad):
            u = np.hypot(np.asarray(pts)[..., 0] - _c[0],
                         np.asarray(pts)[..., 1] - _c[1]) / _r
            out = np.zeros_like(u)
            m = u < 1.0
            out[m] = np.exp(1.0 - 1.0 / (1.0 - u[m] ** 2))
            return out

    radii = np.logspace(math.log10(cfg.radii_min), math.log10(cfg.radii_max),
                        cfg.radii_count)
    fit = decay_exponent(curve, radii, n_directions=cfg.n_directions,
                         cutoff=cutoff)
    rows = [dict(radius=float(r), sup_ft=float(v))
            for r, v in zip(fit.radii, fit.sup_values)]
    summary = dict(exponent=fit.exponent, residual=fit.residual,
                   n_directions=cfg.n_directions, lam=cfg.lam)
    return RunResult("ft-decay", ["radius", "sup_ft"], rows, summary, cfg)


def _cmd_cancellation(cfg: ExperimentConfig) -> RunResult:
    rhos = np.logspace(math.log10(cfg.rho_min), math.log10(cfg.rho_max),
                       cfg.rho_count)
    sweep = cancellation_sup(rhos)
    rows = [dict(rho=float(r), kernel=float(v))
            for r, v in zip(sweep.rhos, sweep.values)]
    summary = dict(sup=sweep.sup, argmax_rho=sweep.argmax_rho,
                   monotone_last_decade=sweep.monotone_last_decade(),
                   tolerance=sweep.tolerance)
    return RunResult("cancellation", ["rho", "kernel"], rows, summary, cfg)


def _cmd_bs_norm(cfg: ExperimentConfig) -> RunResult:
    grid = _grid(cfg)
    pot = _potential(cfg, grid)
    kind = _model_kind(cfg)
    res = np.linspace(cfg.z_re_min, cfg.z_re_max, cfg.z_re_steps)
    ims = np.linspace(cfg.z_im_min, cfg.z_im_max, cfg.z_im_steps) \
        if cfg.z_im_steps > 1 else [0.5 * (cfg.z_im_min + cfg.z_im_max)]
    rows = []
    for im in ims:
        for re in res:
            z = complex(re, im)
            rows.append(dict(re_z=float(re), im_z=float(im),
                             bs_norm=bs_norm(kind, z, cfg.m, pot, grid)))
    vals = [r["bs_norm"] for r in rows]
    summary = dict(max=max(vals), min=min(vals), count=len(vals))
    return RunResult("bs-norm", ["re_z", "im_z", "bs_norm"], rows, summary, cfg)


def _eig_rows(evs, method, cfg, vq):
    rows = []
    for e in evs:
        lhs = thm1_lhs(e.z, cfg.m, cfg.q) if abs(e.z - cfg.m) > 1e-12 \
            and abs(e.z + cfg.m) > 1e-12 else 0.0
        rows.append(dict(method=method, re_z=float(e.z.real),
                         im_z=float(e.z.imag), residual=float(e.residual),
                         thm1_lhs=float(lhs), vq_norm=float(vq),
                         ratio=float(lhs / vq) if vq > 0 else 0.0,
                         q=cfg.q, m=cfg.m))
    return rows


def _cmd_eig(cfg: ExperimentConfig) -> RunResult:
    grid = _grid(cfg)
    pot = _potential(cfg, grid)
    kind = _model_kind(cfg)
    vq = lq_norm(pot, cfg.q, grid)
    im_lo, im_hi = cfg.z_im_min, cfg.z_im_max
    if im_lo == im_hi:
        # a line window still accepts eigenvalues within rounding of the line
        im_lo, im_hi = im_lo - 1e-6, im_hi + 1e-6
    window = (cfg.z_re_min, cfg.z_re_max, im_lo, im_hi)
    rows = []
    summary: Dict = dict(vq_norm=vq)
    dense = scan = None
    if cfg.method in ("dense", "both"):
        dense = eigenvalues_dense(kind, cfg.m, pot, grid, window=window)
        rows += _eig_rows(dense, "dense", cfg, vq)
        summary["n_dense"] = len(dense)
    if cfg.method in ("bs-scan", "both"):
        scan = eigenvalues_bs_scan(kind, cfg.m, pot, grid, window=window,
                                   n_re=cfg.z_re_steps, n_im=cfg.z_im_steps)
        rows += _eig_rows(scan, "bs-scan", cfg, vq)
        summary["n_scan"] = len(scan)
    if dense is not None and scan is not None and dense and scan:
        summary["max_match_dist"] = max(
            min(abs(d.z - s.z) for s in scan) for d in dense)
    ratios = [r["ratio"] for r in rows if r["ratio"] > 0]
    if ratios:
        summary["c_hat"] = max(ratios)
    return RunResult("eig", ["method", "re_z", "im_z", "residual", "thm1_lhs",
                             "vq_norm", "ratio", "q", "m"], rows, summary, cfg)


def _cmd_verify_thm1(cfg: ExperimentConfig) -> RunResult:
    if cfg.m != 0.0:
        raise ConfigError("field 'm': verify-thm1 uses the massless dilation "
                          "family; set m = 0")
    kind = _model_kind(cfg)
    base_grid = _grid(cfg)
    base_pot = _potential(cfg, base_grid)
    base = eigenvalues_dense(kind, 0.0, base_pot, base_grid)
    cands = sorted((e for e in base if abs(e.z.imag) >= cfg.im_floor),
                   key=lambda e: -abs(e.z.imag))[:cfg.n_eigs]
    if not cands:
        raise ConfigError("field 'im_floor': no eigenvalues with |Im z| above "
                          f"{cfg.im_floor}; lower the floor or strengthen the "
                          "potential")
    rows = []
    spreads = []
    for ref_i, ref in enumerate(cands):
        ratios = []
        for lam in cfg.dilation_lams:
            g = build_grid(cfg.grid_n, cfg.grid_l / lam)
            pot = PotentialField(values=lam ** 2 * base_pot.values,
                                 family=base_pot.family)
            evs = eigenvalues_dense(kind, 0.0, pot, g)
            target = lam ** 2 * ref.z
            near = min(evs, key=lambda e: abs(e.z - target))
            vq = lq_norm(pot, cfg.q, g)
            lhs = thm1_lhs(near.z, 0.0, cfg.q)
            ratio = lhs / vq
            ratios.append(ratio)
            rows.append(dict(ref=ref_i, lam=float(lam), re_z=float(near.z.real),
                             im_z=float(near.z.imag), thm1_lhs=float(lhs),
                             vq_norm=float(vq), ratio=float(ratio)))
        spreads.append((max(ratios) - min(ratios)) / max(ratios))
    summary = dict(c_hat=max(r["ratio"] for r in rows),
                   max_ratio_spread=float(max(spreads)),
                   n_reference_eigs=len(cands))
    return RunResult("verify-thm1", ["ref", "lam", "re_z", "im_z", "thm1_lhs",
                                     "vq_norm", "ratio"], rows, summary, cfg)


def _cmd_verify_thm2(cfg: ExperimentConfig) -> RunResult:
    if cfg.model != "trig":
        raise ConfigError("field 'model': verify-thm2 probes the trigonally "
                          "warped operator; set model = trig")
    grid = _grid(cfg)
    pot = _potential(cfg, grid)
    saddles = np.array([p.location for p in find_critical_points()
                        if p.kind == "saddle"])
    chi1, _, _ = frequency_cutoffs(grid, cfg.delta, centers=saddles)
    op = BirmanSchwinger(TRIG, 0.0, pot, grid, chi=chi1)
    vq = lq_norm(pot, cfg.q, grid)
    v1 = lq_norm(pot, 1.0, grid)
    q0 = min(cfg.q, 1.25)
    vq0 = lq_norm(pot, q0, grid)
    ts = np.logspace(math.log10(cfg.t_min), math.log10(cfg.t_max), cfg.t_count)
    rows = []
    for t in ts:
        z = 1.0 / 16.0 + t + 1e-6j       # imaginary floor off the real axis
        norm = op.norm(z)
        nq = n_q(z, cfg.q)
        mem = thm2_regions(z, cfg.q, vq, v1, cfg.constant_c)
        rows.append(dict(t=float(t), loc_bs_norm=float(norm), n_q=float(nq),
                         norm_over_nq=float(norm / nq),
                         member_i=bool(mem.region_i),
                         member_ii=bool(mem.region_ii),
                         member_iii=bool(mem.region_iii)))
    lt = np.log([r["t"] for r in rows])
    ln = np.log([r["loc_bs_norm"] for r in rows])
    a = np.vstack([lt, np.ones(len(lt))]).T
    coef = np.linalg.lstsq(a, ln, rcond=None)[0]
    summary = dict(growth_slope=float(-coef[0]), vq_norm=vq, v1_norm=v1,
                   q0=q0, vq0_norm=vq0, delta=cfg.delta)
    return RunResult("verify-thm2", ["t", "loc_bs_norm", "n_q", "norm_over_nq",
                                     "member_i", "member_ii", "member_iii"],
                     rows, summary, cfg)


def _cmd_schatten_sweep(cfg: ExperimentConfig) -> RunResult:
    if cfg.model != "bilayer" or cfg.m != 0.0:
        raise ConfigError("field 'model'/'m': schatten-sweep runs on the "
                          "massless bilayer model (model = bilayer, m = 0)")
    grid = _grid(cfg)
    pot = _potential(cfg, grid)
    op = BirmanSchwinger(BILAYER, 0.0, pot, grid)
    vq = lq_norm(pot, cfg.q, grid) ** (1.0 / cfg.q)
    ims = np.logspace(math.log10(cfg.im_z_min), math.log10(cfg.im_z_max),
                      cfg.im_z_count)
    rows = []
    for t in ims:
        z = complex(math.sqrt(max(0.0, 1.0 - t * t)), t)   # |z| = 1, |k(z)| = 1
        val = schatten_norm(op.matrix(z), cfg.alpha)
        rows.append(dict(im_z=float(t), re_z=float(z.real),
                         schatten=float(val), ratio=float(val / vq)))
    ratios = [r["ratio"] for r in rows]
    summary = dict(alpha=cfg.alpha, vq=vq, max_ratio=max(ratios),
                   min_ratio=min(ratios),
                   variation_factor=max(ratios) / min(ratios))
    return RunResult("schatten-sweep", ["im_z", "re_z", "schatten", "ratio"],
                     rows, summary, cfg)


_DISPATCH = {
    "critical-points": _cmd_critical_points,
    "fermi": _cmd_fermi,
    "ft-decay": _cmd_ft_decay,
    "cancellation": _cmd_cancellation,
    "bs-norm": _cmd_bs_norm,
    "eig": _cmd_eig,
    "verify-thm1": _cmd_verify_thm1,
    "verify-thm2": _cmd_verify_thm2,
    "schatten-sweep": _cmd_schatten_sweep,
}


def run(command: str, cfg: ExperimentConfig) -> RunResult:
    if command not in _DISPATCH:
        raise ConfigError(f"unknown command {command!r}; expected one of "
                          f"{known_commands()}")
    return _DISPATCH[command](cfg)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise EmitError(f"non-finite value {v!r} in record")
        return f"{float(v):.16e}"
    if isinstance(v, str):
        return v
    raise EmitError(f"cannot emit value of type {type(v).__name__}: {v!r}")


def _check_records(records: Sequence[Dict], columns: Sequence[str]) -> None:
    for i, rec in enumerate(records):
        for c in columns:
            if c not in rec:
                raise EmitError(f"record {i} is missing column {c!r}")
            v = rec[c]
            if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                raise EmitError(f"record {i} column {c!r} is non-finite: {v!r}")


def _canonical_rows(records: Sequence[Dict], columns: Sequence[str]):
    def key(rec):
        return tuple(str(type(rec[c]).__name__) + _format_cell(rec[c])
                     for c in columns)
    return sorted(records, key=key)


def emit_csv(result: RunResult, path: str) -> None:
    _check_records(result.records, result.columns)
    rows = _canonical_rows(result.records, result.columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(result.columns) + ["config_hash"])
        for rec in rows:
            writer.writerow([_format_cell(rec[c]) for c in result.columns]
                            + [result.config_hash])


def emit_json(result: RunResult, path: str) -> None:
    _check_records(result.records, result.columns)
    rows = _canonical_rows(result.records, result.columns)
    doc = {
        "schema_version": result.config.schema_version,
        "version": f"bilayer-spectra-{__version__}",
        "command": result.command,
        "config_hash": result.config_hash,
        "config": result.config.canonical_text(),
        "summary": _jsonable(result.summary),
        "records": [_jsonable(r) for r in rows],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def emit(result: RunResult, fmt: str, path: str) -> None:
    if fmt == "csv":
        emit_csv(result, path)
    elif fmt == "json":
        emit_json(result, path)
    else:
        raise EmitError(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def read_csv_records(path: str) -> List[Dict[str, str]]:
    """Read an emitted CSV back as raw string records (round-trip helper)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="bilayer-spectra",
        description="Spectral experiments for bilayer-graphene operators")
    parser.add_argument("command", choices=known_commands())
    parser.add_argument("--config", required=True, help="key = value config file")
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--format", default="csv", choices=("csv", "json"))
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        result = run(args.command, cfg)
        out = args.out or f"{args.command}.{args.format}"
        emit(result, args.format, out)
    except (ConfigError, EmitError, OperatorSizeError, SupportTooLargeError,
            NearSingularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command}: {len(result.records)} records -> {out} "
          f"[config {result.config_hash}]")
    for k in sorted(result.summary):
        print(f"  {k} = {result.summary[k]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
