"""Experiment orchestration: bound comparisons, balance study, CSV/SVG output.

``run_experiment`` executes a grid of (k, l, q) sketch configurations over a
set of algorithm seeds on one target matrix. For every run it records the
true canonical sines and every bound/estimate family, each evaluated against
both the true spectrum and the padded approximated spectrum, as one CSV row
per (matrix, side, k, l, q, seed, i, kind, spectrum_source, value, status).

Per-bound failures (violated gap assumptions, tails too short for the
estimator or the lower bound) are recorded in the status column and never
abort a sweep. Re-running with an identical config reproduces identical CSV
bytes.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .angles import canonical_sines
from .estimator import unbiased_estimate
from .linalg import Spectrum, svd_full
from .matgen import (gen_gaussian_decay, gen_snn, gen_step_spectrum,
                     load_mnist, spectrum_faster, spectrum_slower)
from .mmio import read_matrix
from .posterior_bounds import (gap_bounds, residual_blocks,
                               residual_ratio_bounds, residual_spectrum)
from .prior_bounds import (BoundReport, DistortionParams, space_agnostic_lower,
                           space_agnostic_upper, subspace_aware_upper)
from .rsvd import SketchConfig, gaussian_sketch, rsvd

SCHEMA_VERSION = 1
CSV_HEADER = "matrix,side,k,l,q,seed,i,kind,spectrum_source,value,status"
OUTDIR_ENV = "RSVDANGLES_OUTDIR"

STATUS_OK = "ok"
STATUS_GAP = "gap_violated"
STATUS_TAIL = "tail_short"
STATUS_TRIVIAL = "trivial_bound"


@dataclass(frozen=True)
class Row:
    matrix: str
    side: str
    k: int
    l: int
    q: int
    seed: int
    i: int
    kind: str
    spectrum_source: str
    value: float
    status: str


_SORT_KEY = lambda r: (r.matrix, r.side, r.k, r.l, r.q, r.seed, r.i, r.kind,
                       r.spectrum_source)


@dataclass
class ExperimentConfig:
    """One target matrix, a (k, l, q) grid, and the evaluation options."""

    matrix: dict
    grid: list[tuple[int, int, int]]
    sides: tuple[str, ...] = ("left", "right")
    estimator_trials: int = 3
    n_seeds: int = 1
    base_seed: int = 0
    upper_c: float = 1.0
    lower_c: float = 2.0
    outdir: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if not self.grid:
            raise ValueError("grid must be nonempty")
        for k, l, q in self.grid:
            if not (1 <= k < l):
                raise ValueError(f"grid point (k={k}, l={l}, q={q}) needs k < l")
            if q < 0:
                raise ValueError("q must be >= 0")
        for s in self.sides:
            if s not in ("left", "right"):
                raise ValueError(f"unknown side {s!r}")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        version = raw.pop("schema_version", None)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version!r}")
        grid = [(int(g["k"]), int(g["l"]), int(g["q"])) for g in raw.pop("grid")]
        sides = tuple(raw.pop("sides", ("left", "right")))
        return cls(matrix=raw.pop("matrix"), grid=grid, sides=sides, **raw)


def build_matrix(desc: dict):
    """Materialize a matrix descriptor.

    Returns (name, a, factors, true_spectrum, pad_rank, has_known_factors).
    File-backed and image matrices get exact factors from a dense SVD for
    ground-truth evaluation, but are treated as having unknown subspaces for
    the comparator bound; their padding rank is min(m, n).
    """
    gen = desc.get("generator")
    if gen == "gaussian_decay":
        spec = _spectrum_from_desc(desc["spectrum"])
        pm = gen_gaussian_decay(int(desc["m"]), int(desc["n"]), spec,
                                int(desc.get("seed", 0)),
                                name=desc.get("name", "gaussian_decay"))
        return pm.name, pm.a, pm.factors, pm.spectrum(), spec.declared_rank, True
    if gen == "snn":
        pm = gen_snn(int(desc["m"]), int(desc["n"]), int(desc["r1"]),
                     float(desc["a"]), float(desc.get("density", 0.05)),
                     int(desc.get("seed", 0)), name=desc.get("name", "snn"))
        spec = pm.spectrum()
        return pm.name, pm.a, pm.factors, spec, spec.declared_rank, True
    if gen == "mnist":
        a = load_mnist(desc["path"], int(desc["n_samples"]), int(desc.get("seed", 0)))
        name = desc.get("name", "mnist")
    elif "path" in desc:
        a = read_matrix(desc["path"])
        name = desc.get("name", os.path.splitext(os.path.basename(desc["path"]))[0])
    else:
        raise ValueError(f"unrecognized matrix descriptor: {desc}")
    f = svd_full(a)
    return name, a, f, Spectrum.from_values(f.sigma), min(a.shape), False


def _spectrum_from_desc(sd: dict) -> Spectrum:
    kind = sd["kind"]
    if kind == "slower":
        return spectrum_slower(int(sd["r"]), int(sd["r1"]))
    if kind == "faster":
        return spectrum_faster(int(sd["r"]), int(sd["r1"]))
    if kind == "step":
        return gen_step_spectrum(int(sd["k"]), float(sd["beta"]), float(sd["gap"]))
    raise ValueError(f"unknown spectrum kind {kind!r}")


def pad_spectrum(approx: Spectrum, r: int) -> Spectrum:
    """Extend an approximated spectrum to length r by repeating its last value."""
    if r < approx.size:
        raise ValueError("padding length below the approximated spectrum size")
    values = np.concatenate([approx.values, np.full(r - approx.size, approx.values[-1])])
    return Spectrum.from_values(values)


def _report_rows(report: BoundReport, ctx: dict) -> list[Row]:
    raw = report.params.get("raw_values")
    rows = []
    for i, v in enumerate(report.values, start=1):
        status = STATUS_OK
        if raw is not None and raw[i - 1] > 1.0:
            status = STATUS_TRIVIAL
        rows.append(Row(kind=report.kind, spectrum_source=report.spectrum_source,
                        side=report.side, i=i, value=float(v), status=status, **ctx))
    return rows


def _error_rows(kind: str, side: str, source: str, status: str, k: int,
                ctx: dict) -> list[Row]:
    return [Row(kind=kind, spectrum_source=source, side=side, i=i,
                value=float("nan"), status=status, **ctx)
            for i in range(1, k + 1)]


def _value_rows(values, kind: str, side: str, source: str, ctx: dict) -> list[Row]:
    return [Row(kind=kind, spectrum_source=source, side=side, i=i,
                value=float(v), status=STATUS_OK, **ctx)
            for i, v in enumerate(values, start=1)]


GAP_KINDS = ("gap_norm_rank_l", "gap_norm_rank_k",
             "gap_anglewise_rank_l", "gap_anglewise_rank_k")


def _run_single(a, factors, true_spec, pad_rank, has_known, name, sides,
                k, l, q, seed, n_trials, upper_c, lower_c) -> list[Row]:
    out = rsvd(a, SketchConfig(k, l, q, seed))
    ctx_base = {"matrix": name, "k": k, "l": l, "q": q, "seed": seed}
    padded = pad_spectrum(Spectrum.from_values(out.sigma), pad_rank)
    sources = (("true", true_spec), ("padded", padded))
    dp_up = DistortionParams(c1=upper_c, c2=upper_c)
    dp_low = DistortionParams(c1=lower_c, c2=lower_c)
    stats = residual_blocks(a, out, k, sigma_k=float(true_spec.values[k - 1]))
    rows: list[Row] = []

    if has_known:
        omega = gaussian_sketch(a.shape[1], l, seed)
        r = true_spec.declared_rank
        omega1 = factors.v[:, :k].T @ omega
        omega2 = factors.v[:, k:r].T @ omega

    for source, spec in sources:
        try:
            reports = gap_bounds(stats, spec, k)
        except ValueError:
            reports = None
        for side in sides:
            basis = out.u if side == "left" else out.v
            truth = (factors.u if side == "left" else factors.v)[:, :k]
            if source == "true":
                rows += _value_rows(canonical_sines(basis, truth),
                                    "true_angle", side, source, ctx_base)
                rows += _value_rows(canonical_sines(basis[:, :k], truth),
                                    "true_angle_rank_k", side, source, ctx_base)
            rows += _report_rows(replace(
                space_agnostic_upper(spec, k, l, q, side, dp_up),
                spectrum_source=source), ctx_base)
            try:
                rows += _report_rows(replace(
                    space_agnostic_lower(spec, k, l, q, side, dp_low),
                    spectrum_source=source), ctx_base)
            except ValueError:
                rows += _error_rows("space_agnostic_lower", side, source,
                                    STATUS_TAIL, k, ctx_base)
            if has_known:
                rows += _report_rows(replace(
                    subspace_aware_upper(spec, omega1, omega2, k, q, side),
                    spectrum_source=source), ctx_base)
            try:
                est = unbiased_estimate(spec, k, l, q, n_trials, side, seed)
                rows += _value_rows(est.mean, "estimate", side, source, ctx_base)
            except ValueError:
                rows += _error_rows("estimate", side, source, STATUS_TAIL, k, ctx_base)
            resid = residual_spectrum(a, basis, side)
            try:
                rows += _report_rows(replace(
                    residual_ratio_bounds(resid, spec, k, side),
                    spectrum_source=source), ctx_base)
            except ValueError:
                rows += _error_rows("residual_ratio", side, source,
                                    STATUS_TAIL, k, ctx_base)
            if reports is None:
                for kind in GAP_KINDS:
                    rows += _error_rows(kind, side, source, STATUS_GAP, k, ctx_base)
            else:
                for rep in reports:
                    if rep.side == side:
                        rows += _report_rows(replace(rep, spectrum_source=source),
                                             ctx_base)
    return rows


def run_experiment(cfg: ExperimentConfig) -> list[Row]:
    """Execute the full sweep and (when an outdir is set) write CSV and SVGs."""
    name, a, factors, true_spec, pad_rank, has_known = build_matrix(cfg.matrix)
    seeds = range(cfg.base_seed, cfg.base_seed + cfg.n_seeds)
    tasks = [(k, l, q, seed) for (k, l, q) in cfg.grid for seed in seeds]

    def work(task):
        k, l, q, seed = task
        return _run_single(a, factors, true_spec, pad_rank, has_known, name,
                           cfg.sides, k, l, q, seed, cfg.estimator_trials,
                           cfg.upper_c, cfg.lower_c)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(work, tasks))
    else:
        chunks = [work(t) for t in tasks]
    rows = sorted((r for chunk in chunks for r in chunk), key=_SORT_KEY)

    if cfg.outdir:
        os.makedirs(cfg.outdir, exist_ok=True)
        emit_csv(rows, os.path.join(cfg.outdir, f"{name}_bounds.csv"))
        for panel, fname in experiment_panels(rows):
            emit_svg(panel, os.path.join(cfg.outdir, fname))
    return rows


# --- balance study ---------------------------------------------------------


@dataclass(frozen=True)
class BalanceConfig:
    """Fixed-budget study: budget_factor*k matvecs split between the sample
    size l = floor(budget_factor*k / (2q+1)) and the power count q."""

    k: int
    budget_factor: float
    tail_factor: float
    oversample_factor: float
    gap: float
    trials: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.oversample_factor <= 1.0:
            raise ValueError("oversample_factor must exceed 1")
        if self.budget_factor / self.oversample_factor**2 < 1.0:
            raise ValueError("budget admits no feasible q")
        if self.gap < 1.0:
            raise ValueError("gap must be >= 1")
        if self.budget_factor > 1.0 + self.tail_factor:
            raise ValueError("budget exceeds the matrix size")
        tail = self.tail_factor * self.k
        if abs(tail - round(tail)) > 1e-9:
            raise ValueError("(1 + tail_factor) * k must be integral")

    @property
    def size(self) -> int:
        return self.k + int(round(self.tail_factor * self.k))


def feasible_powers(cfg: BalanceConfig) -> list[int]:
    ratio = cfg.budget_factor / cfg.oversample_factor**2
    return list(range(int((ratio - 1.0) / 2.0 + 1e-12) + 1))


def fixed_budget_bound(q: int, cfg: BalanceConfig) -> float:
    """Upper-bound value reachable with the budget split at power count q.

    Closed form of the space-agnostic upper bound on the step spectrum with
    l = budget/(2q+1) and distortion multipliers at the oversampling factor;
    evaluated with a log-domain power so large gaps and q stay finite.
    """
    a, b, g = cfg.budget_factor, cfg.tail_factor, cfg.oversample_factor
    passes = 2 * q + 1
    if passes > a / g**2 + 1e-12:
        raise ValueError("budget exceeded")
    num = a - g * math.sqrt(a * passes)
    den = b * passes + g * math.sqrt(a * b * passes)
    coef = num / den
    if coef <= 0.0:
        return 1.0
    t = math.log(coef) + (4.0 * q + 2.0) * math.log(cfg.gap)
    return float(np.exp(-0.5 * np.logaddexp(0.0, t)))


def balance_sweep(cfg: BalanceConfig) -> list[dict]:
    """Evaluate the budget curve and, per trial, the realized largest sine.

    One row per (q, trial): {gap, k, q, l, phi, trial, largest_sine}; with
    trials=0 a single phi-only row per q (trial = -1, sine nan).
    """
    rows = []
    spec = gen_step_spectrum(cfg.k, cfg.tail_factor, cfg.gap)
    r = cfg.size
    for q in feasible_powers(cfg):
        l = int(cfg.budget_factor * cfg.k / (2 * q + 1))
        phi = fixed_budget_bound(q, cfg)
        base = {"gap": cfg.gap, "k": cfg.k, "q": q, "l": l, "phi": phi}
        if cfg.trials == 0:
            rows.append({**base, "trial": -1, "largest_sine": float("nan")})
            continue
        for trial in range(cfg.trials):
            pm = gen_gaussian_decay(r, r, spec, cfg.seed + 100_000 * (q + 1) + trial,
                                    name="step")
            out = rsvd(pm.a, SketchConfig(cfg.k, l, q, cfg.seed + 200_000 * (q + 1) + trial))
            sines = canonical_sines(out.u, pm.factors.u[:, :cfg.k])
            rows.append({**base, "trial": trial, "largest_sine": float(sines[-1])})
    return rows


def emit_balance_csv(rows: list[dict], path) -> None:
    cols = ("gap", "k", "q", "l", "phi", "trial", "largest_sine")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(row[c]) for c in cols) + "\n")


def balance_panel(rows: list[dict]) -> "Panel":
    by_q: dict[int, list[float]] = {}
    phi_by_q: dict[int, float] = {}
    for row in rows:
        phi_by_q[row["q"]] = row["phi"]
        if row["trial"] >= 0 and np.isfinite(row["largest_sine"]):
            by_q.setdefault(row["q"], []).append(row["largest_sine"])
    qs = sorted(phi_by_q)
    series = [Series("budget curve", "#d62728", False,
                     [float(q) for q in qs], [phi_by_q[q] for q in qs])]
    if by_q:
        for label, agg in (("largest sine (mean)", np.mean),
                           ("largest sine (min)", np.min),
                           ("largest sine (max)", np.max)):
            series.append(Series(label, "#000000", label != "largest sine (mean)",
                                 [float(q) for q in sorted(by_q)],
                                 [float(agg(by_q[q])) for q in sorted(by_q)]))
    gap = rows[0]["gap"] if rows else float("nan")
    return Panel(f"budget split, gap {gap:g}", "power iterations q", "sine", series)


# --- CSV / SVG emission ----------------------------------------------------


def _format_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def emit_csv(rows: list[Row], path) -> None:
    """Write rows in the canonical sort order; bytes are a pure function of
    the table."""
    rows = sorted(rows, key=_SORT_KEY)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(f"{r.matrix},{r.side},{r.k},{r.l},{r.q},{r.seed},{r.i},"
                     f"{r.kind},{r.spectrum_source},{r.value:.17g},{r.status}\n")


def read_csv(path) -> list[Row]:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header")
        for line in fh:
            m, side, k, l, q, seed, i, kind, src, value, status = line.strip().split(",")
            rows.append(Row(m, side, int(k), int(l), int(q), int(seed), int(i),
                            kind, src, float(value), status))
    return rows


@dataclass(frozen=True)
class Series:
    label: str
    color: str
    dashed: bool
    xs: list[float]
    ys: list[float]


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)


_KIND_COLORS = {
    "true_angle": "#000000",
    "true_angle_rank_k": "#6e6e6e",
    "space_agnostic_upper": "#d62728",
    "space_agnostic_lower": "#1f77b4",
    "estimate": "#17becf",
    "subspace_aware_upper": "#c51b8a",
    "residual_ratio": "#ff7f0e",
    "gap_norm_rank_l": "#2ca02c",
    "gap_norm_rank_k": "#1f6f1f",
    "gap_anglewise_rank_l": "#74c476",
    "gap_anglewise_rank_k": "#0b4d0b",
}


def experiment_panels(rows: list[Row]):
    """Group experiment rows into one panel per (matrix, k, l, side, q)."""
    keys = sorted({(r.matrix, r.k, r.l, r.side, r.q) for r in rows})
    for matrix, k, l, side, q in keys:
        sel = [r for r in rows
               if (r.matrix, r.k, r.l, r.side, r.q) == (matrix, k, l, side, q)]
        series = []
        combos = sorted({(r.kind, r.spectrum_source) for r in sel})
        for kind, source in combos:
            pts: dict[int, list[float]] = {}
            for r in sel:
                if r.kind == kind and r.spectrum_source == source and np.isfinite(r.value):
                    pts.setdefault(r.i, []).append(r.value)
            if not pts:
                continue
            xs = sorted(pts)
            ys = [float(np.mean(pts[x])) for x in xs]
            label = kind if source == "true" else f"{kind} (padded)"
            series.append(Series(label, _KIND_COLORS.get(kind, "#555555"),
                                 source == "padded", [float(x) for x in xs], ys))
        panel = Panel(f"{matrix}: k={k}, l={l}, q={q}, {side} subspace",
                      "angle index", "sine", series)
        yield panel, f"{matrix}_k{k}_l{l}_{side}_q{q}.svg"


_SVG_W, _SVG_H = 860, 520
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 240, 40, 50
_FLOOR = 1e-16


def emit_svg(panel: Panel, path) -> None:
    """Standalone SVG: one polyline per series on a log-scale y axis."""
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B
    xs_all = [x for s in panel.series for x in s.xs]
    ys_all = [max(y, _FLOOR) for s in panel.series for y in s.ys if np.isfinite(y)]
    x_lo, x_hi = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    y_lo = math.floor(math.log10(min(ys_all))) if ys_all else -2
    y_hi = math.ceil(math.log10(max(ys_all))) if ys_all else 0
    if y_hi == y_lo:
        y_hi += 1

    def px(x):
        return _MARGIN_L + plot_w * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        ly = math.log10(max(y, _FLOOR))
        return _MARGIN_T + plot_h * (y_hi - ly) / (y_hi - y_lo)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_MARGIN_L}" y="24" font-family="sans-serif" font-size="15">'
        f'{_xml_escape(panel.title)}</text>',
    ]
    axis = (f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
            f'height="{plot_h}" fill="none" stroke="#333333"/>')
    parts.append(axis)
    for dec in range(y_lo, y_hi + 1):
        y = py(10.0 ** dec)
        parts.append(f'<line x1="{_MARGIN_L}" y1="{y:.2f}" x2="{_MARGIN_L + plot_w}" '
                     f'y2="{y:.2f}" stroke="#dddddd"/>')
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">1e{dec}</text>')
    n_ticks = min(8, max(2, int(x_hi - x_lo)))
    for t in range(n_ticks + 1):
        x = x_lo + (x_hi - x_lo) * t / n_ticks
        parts.append(f'<text x="{px(x):.2f}" y="{_MARGIN_T + plot_h + 18}" '
                     f'text-anchor="middle" font-family="sans-serif" font-size="11">'
                     f'{x:g}</text>')
    parts.append(f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_SVG_H - 12}" '
                 f'text-anchor="middle" font-family="sans-serif" font-size="12">'
                 f'{_xml_escape(panel.xlabel)}</text>')
    parts.append(f'<text x="18" y="{_MARGIN_T + plot_h / 2:.2f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2:.2f})">'
                 f'{_xml_escape(panel.ylabel)}</text>')
    legend_y = _MARGIN_T + 10
    for s in panel.series:
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.xs, s.ys)
                       if np.isfinite(y))
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        if pts:
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{s.color}" '
                         f'stroke-width="1.6"{dash}/>')
        lx = _MARGIN_L + plot_w + 14
        parts.append(f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 26}" y2="{legend_y}" '
                     f'stroke="{s.color}" stroke-width="2"{dash}/>')
        parts.append(f'<text x="{lx + 32}" y="{legend_y + 4}" font-family="sans-serif" '
                     f'font-size="11">{_xml_escape(s.label)}</text>')
        legend_y += 18
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _xml_escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
