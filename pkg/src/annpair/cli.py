"""Batch front end: construct the family, verify its claimed properties,
audit the lattice-counting hypotheses, export tables.

Exit codes: 0 all checks pass, 1 a hard check failed, 2 bad configuration.
Every output file carries the sha256 digest of the run configuration.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import counting
from .bump import build_bump
from .construction import GAP, GAP_PERIOD, build_family
from .errors import AnnpairError
from .intervals import (
    Interval,
    IntervalSet,
    PeriodicBlockUnion,
    epsilon_thin_check,
    periodic_gap_check,
    sigma_from_gap,
)
from .trig import shifted_fejer

__all__ = ["RunConfig", "main"]


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_lo: int = 2
    n_hi: int = 4
    target_c: float = 3.0
    n_cap: int = 2**24
    grid_refinement: int = 4
    sigma: float | None = None  # None: derive from the gap of the support union
    j_max: int = 20
    alpha_samples: int = 100
    lambda_count: int = 4
    thin_cap: float = 4.0
    table_stride: int = 16
    seed: int = 0
    out: str = "out"
    family: str | None = None

    def digest(self) -> str:
        fields = {k: v for k, v in asdict(self).items() if k not in ("out", "family")}
        payload = json.dumps(fields, sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def _parse_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError as exc:
        raise ConfigError(f"bad n-range {text!r}, expected like 2..4") from exc
    if not 2 <= lo <= hi:
        raise ConfigError("need 2 <= n_lo <= n_hi")
    return lo, hi


def _coerce_scalar(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path: Path, payload: dict, digest: str) -> None:
    payload = dict(payload)
    payload["_config_digest"] = digest
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=1, default=_coerce_scalar) + "\n"
    )


def _write_csv(path: Path, header: list[str], rows, digest: str) -> None:
    with path.open("w", newline="") as fh:
        fh.write(f"# config {digest}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _load_family_data(path: Path) -> dict:
    data = json.loads(path.read_text())
    return {
        "support": IntervalSet.from_json(data["support_union"]),
        "cells": PeriodicBlockUnion.from_json(data["cell_union"]),
        "placements": data["placements"],
        "levels": data["levels"],
        "target_c": data["target_c"],
    }


def _family_path(cfg: RunConfig, out: Path) -> Path:
    return Path(cfg.family) if cfg.family else out / "family.json"


def cmd_construct(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    bump = build_bump()
    family = build_family(cfg.n_lo, cfg.n_hi, bump=bump, target_c=cfg.target_c, n_cap=cfg.n_cap)
    digest = cfg.digest()
    _write_json(out / "family.json", family.to_json(), digest)
    _write_json(out / "support_set.json", {"set": family.support_union.to_json()}, digest)
    _write_json(out / "cell_union.json", family.cell_union.to_json(), digest)
    for lv in family.levels:
        _write_json(out / f"instance_n{lv.params.n}.json", lv.to_json(), digest)
    print(f"constructed levels n={cfg.n_lo}..{cfg.n_hi} into {out}")
    return 0


def block_probes(row: dict, rng: np.random.Generator, n_random: int = 128) -> np.ndarray:
    """Probe points for one placed block: cell centers across the whole
    index range, a few edges and mid-gaps, and the block boundaries."""
    n, N, offset = row["n"], row["N"], row["offset"]
    n_sq = N * N
    js = {-n_sq + 1, -n_sq // 2, -N, -1, 0, 1, N, n_sq // 2, n_sq - 1}
    j = 1
    while j < n_sq - 1:
        js.update((j, -j))
        j *= 4
    js.update(int(v) for v in rng.integers(-n_sq + 1, n_sq, size=n_random))
    centers = offset + (np.array(sorted(js), dtype=np.float64) + 0.5) / N
    extras = offset + np.array([-N, -N + 0.25 / N, N - 0.25 / N, N]) * 1.0
    half_w = min(1.0 / n, 0.5) / N
    edges = centers[:8] + half_w
    return np.concatenate([centers, extras, edges])


def _verify_checks(fam: dict, cfg: RunConfig) -> tuple[list[tuple[str, bool, str]], dict]:
    checks: list[tuple[str, bool, str]] = []
    support, cells = fam["support"], fam["cells"]
    placements = fam["placements"]

    gap_ok = periodic_gap_check(support, GAP, GAP_PERIOD)
    checks.append(("support_gap", gap_ok, f"gap [{GAP.lo},{GAP.hi}) period {GAP_PERIOD}"))
    smeas = support.measure()
    checks.append(("support_measure_le_1", smeas <= 1.0, f"|S| = {smeas}"))

    ratios = [lv["report"]["ratio"] for lv in fam["levels"] if "report" in lv]
    ns = [lv["params"]["n"] for lv in fam["levels"]]
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    checks.append(("ratios_strictly_decreasing", decreasing, f"{ratios}"))
    fitted = max(n * r for n, r in zip(ns, ratios))
    checks.append(
        ("ratio_le_target", all(r <= fam["target_c"] / n for n, r in zip(ns, ratios)), f"C = {fitted}")
    )

    left_rows = [p for p in placements if p["density_at_left"] is not None]
    dens = [(p["n"], p["density_at_left"]) for p in left_rows]
    dens_ok = all(d <= 1.0 / (n * n) for n, d in dens) and all(
        b < a for (_, a), (_, b) in zip(dens, dens[1:])
    )
    checks.append(("density_left_edges", dens_ok, f"{dens}"))

    rng = np.random.default_rng(cfg.seed)
    eps_rows = []
    for p in placements:
        probes = block_probes(p, rng)
        rep = epsilon_thin_check(cells, eps=1.0, probes=probes)
        eps_rows.append((p["n"], rep.required_eps))
    c_thin = max(n * e for n, e in eps_rows)
    thin_ok = c_thin <= cfg.thin_cap and eps_rows[-1][1] < eps_rows[0][1]
    for p, (n, e) in zip(placements, eps_rows):
        probes = block_probes(p, np.random.default_rng(cfg.seed + n))
        if not epsilon_thin_check(cells, eps=c_thin / n, probes=probes).passed:
            thin_ok = False
    checks.append(("thinness_blockwise", thin_ok, f"C_thin = {c_thin}, eps rows {eps_rows}"))

    extras = {
        "fitted_c": fitted,
        "c_thin": c_thin,
        "eps_rows": eps_rows,
        "density_rows": dens,
    }
    return checks, extras


def cmd_verify(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fam = _load_family_data(_family_path(cfg, out))
    digest = cfg.digest()
    checks, extras = _verify_checks(fam, cfg)

    rows = []
    for lv in fam["levels"]:
        p, r = lv["params"], lv.get("report", {})
        rows.append(
            [
                p["n"], p["d"], p["N"], p["L"],
                r.get("total_mass"), r.get("mass_off_q_in_window"),
                r.get("tail_bound"), r.get("ratio"), extras["fitted_c"],
            ]
        )
    _write_csv(
        out / "concentration.csv",
        ["n", "d", "N", "L", "total_mass", "mass_off", "tail_bound", "ratio", "fitted_c"],
        rows,
        digest,
    )
    radii = sorted(
        {p["left_edge"] for p in fam["placements"] if p["left_edge"] > 0}
        | {p["right_edge"] for p in fam["placements"]}
    )
    prof = [(r, fam["cells"].measure_within(-r, r) / r) for r in radii]
    _write_csv(out / "density_profile.csv", ["r", "density"], prof, digest)
    _write_json(
        out / "verify_report.json",
        {
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks],
            "fitted_c": extras["fitted_c"],
            "c_thin": extras["c_thin"],
        },
        digest,
    )
    failed = [n for n, ok, _ in checks if not ok]
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 1 if failed else 0


def cmd_bm_audit(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fam = _load_family_data(_family_path(cfg, out))
    digest = cfg.digest()
    cells = fam["cells"]
    if cfg.sigma is not None:
        sigma = cfg.sigma
    else:
        sigma = sigma_from_gap(fam["support"], GAP_PERIOD, GAP).sigma

    rng = np.random.default_rng(cfg.seed)
    alphas = rng.random(cfg.alpha_samples)
    cert_rows = []
    tail_fail = 0
    tail_start = max(0, cfg.j_max - max(2, cfg.j_max // 4))
    for alpha in alphas:
        audit = counting.block_audit(float(alpha), cells, sigma, cfg.j_max)
        if not audit.tail_passes_from(tail_start):
            tail_fail += 1
        for c in audit.certificates:
            cert_rows.append([c.alpha, c.j, c.count, c.threshold, c.passed])
    _write_csv(
        out / "block_certificates.csv",
        ["alpha", "j", "count", "threshold", "passed"],
        cert_rows,
        digest,
    )

    ident_rows = []
    er_rows = []
    r = 64.0
    while r <= 2.0 ** cfg.j_max:
        try:
            rep = counting.averaged_identity(cells, r)
            e_set = counting.high_density_alphas(cells, r, sigma)
        except MemoryError:
            break
        ident_rows.append([r, rep.lhs, rep.rhs, rep.gap])
        er_rows.append([r, e_set.measure()])
        r *= 2.0
    _write_csv(out / "averaged_identity.csv", ["r", "lhs", "rhs", "gap"], ident_rows, digest)
    _write_csv(out / "high_density_measure.csv", ["r", "measure"], er_rows, digest)

    span_hi = fam["cells"].span()[1]
    window = Interval(0.0, max(1024.0, 2.0 * span_hi))
    assembly = counting.assemble_points(
        cells, sigma, cfg.lambda_count, window, cfg.j_max
    )
    _write_json(out / "point_assembly.json", assembly.to_json(), digest)

    frac_pass = 1.0 - tail_fail / max(1, len(alphas))
    print(
        f"sigma = {sigma}; {len(alphas)} alphas audited, "
        f"{frac_pass:.1%} pass all blocks with j >= {tail_start}"
    )
    print(f"assembly: {len(assembly.alphas)} shifts, {assembly.points.size} points, 0 inside Q")
    if ident_rows and max(row[3] for row in ident_rows) > 1e-12:
        print("FAIL averaged identity")
        return 1
    return 0


def cmd_export(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fam = _load_family_data(_family_path(cfg, out))
    digest = cfg.digest()
    for lv in fam["levels"]:
        m = lv["degree_cert"]["m"]
        coeffs = shifted_fejer(m).symmetric_coeffs
        ks = range(-(m - 1), m)
        _write_csv(
            out / f"kernel_coeffs_n{lv['params']['n']}.csv",
            ["k", "coefficient"],
            [[k, c] for k, c in zip(ks, coeffs)],
            digest,
        )
    bump = build_bump()
    stride = max(1, cfg.table_stride)
    tab = bump.table[1:-1:stride]
    ss = np.arange(0, tab.size) * bump.table_step * stride
    _write_csv(
        out / "bump_table.csv",
        ["s", "g"],
        [[float(s), float(g)] for s, g in zip(ss, tab)],
        digest,
    )
    _write_json(out / "sets_export.json", {
        "support_union": fam["support"].to_json(),
        "cell_union": fam["cells"].to_json(),
    }, digest)
    print(f"exported kernel tables and sets into {out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annpair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("construct", "verify", "bm-audit", "export"):
        p = sub.add_parser(name)
        p.add_argument("--n-range", default="2..4", help="levels to build, like 2..4")
        p.add_argument("--target-c", type=float, default=3.0)
        p.add_argument("--n-cap", type=int, default=2**24)
        p.add_argument("--grid-refinement", type=int, default=4)
        p.add_argument("--sigma", type=float, default=None)
        p.add_argument("--j-max", type=int, default=20)
        p.add_argument("--alpha-samples", type=int, default=100)
        p.add_argument("--lambda-count", type=int, default=4)
        p.add_argument("--thin-cap", type=float, default=4.0)
        p.add_argument("--table-stride", type=int, default=16)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")
        p.add_argument("--family", default=None, help="family.json path (default <out>/family.json)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        n_lo, n_hi = _parse_range(args.n_range)
        if args.target_c <= 0 or args.n_cap < 1 or args.grid_refinement < 1:
            raise ConfigError("target-c, n-cap and grid-refinement must be positive")
        if args.sigma is not None and not 0 < args.sigma < 1:
            raise ConfigError("sigma must lie in (0, 1)")
        cfg = RunConfig(
            command=args.command,
            n_lo=n_lo,
            n_hi=n_hi,
            target_c=args.target_c,
            n_cap=args.n_cap,
            grid_refinement=args.grid_refinement,
            sigma=args.sigma,
            j_max=args.j_max,
            alpha_samples=args.alpha_samples,
            lambda_count=args.lambda_count,
            thin_cap=args.thin_cap,
            table_stride=args.table_stride,
            seed=args.seed,
            out=args.out,
            family=args.family,
        )
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    handlers = {
        "construct": cmd_construct,
        "verify": cmd_verify,
        "bm-audit": cmd_bm_audit,
        "export": cmd_export,
    }
    try:
        return handlers[cfg.command](cfg)
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except AnnpairError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
