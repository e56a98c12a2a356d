"""Command-line orchestration: twist scans, Gaussian-law verification,
squarefree-ideal counting, and the exact-invariant audit.

All output is file-based and byte-deterministic: CSV with fixed column
order, LF line endings and '.' decimals; JSON with sorted keys and a
schema_version field; standalone SVG with exactly two data polylines.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import ekstats, quadfield as qf, selmer

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    command: str = ""
    a: int = 1
    b: int = -1
    field_m: object = "Q"  # "Q" or squarefree integer m
    X: int = 10**4
    f_name: str = "omega"
    k_list: tuple[int, ...] = (2, 4)
    r_list: tuple[int, ...] = (1, 2)
    q_spec: str = ""
    d_spec: str = ""
    seed: int = 0
    out: str = "out"
    workers: int = 1
    inject_fault: bool = False

    def validate(self):
        if self.X < 2:
            raise ValueError("X must be >= 2")


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _load_config_file(path: str) -> dict:
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {line!r}")
        key, val = (t.strip() for t in line.split("=", 1))
        values[key] = val
    return values


def _parse_ideal_spec(fieldK, spec: str) -> qf.IdealK:
    """Ideal spec: comma-separated p:idx tokens; repeats raise the exponent."""
    if not spec:
        return qf.ONE_IDEAL
    factors = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        p_str, _, idx_str = token.partition(":")
        p, idx = int(p_str), int(idx_str or 0)
        primes = qf.split_prime(fieldK, p)
        if idx >= len(primes):
            raise ValueError(f"no prime with conjugate index {idx} above {p}")
        factors.append((primes[idx], 1))
    return qf.make_ideal(factors)


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_scan(cfg: RunConfig) -> int:
    pair = selmer.make_pair(cfg.a, cfg.b)
    if not pair.eligible:
        raise ValueError(
            f"curve ({cfg.a}, {cfg.b}) is ineligible: needs a^2-4b and b*(a^2-4b) both nonsquare"
        )
    rows = ["d,g_chi,correction,ord2T,dim_selphi,dim_selphihat,d2_lower_bound"]
    ord2t_values = []
    for res in selmer.scan_twists(pair, cfg.X, workers=cfg.workers):
        rows.append(
            f"{res.d},{res.g_chi},{res.correction},{res.ord2T_product},"
            f"{res.dim_selphi},{res.dim_selphihat},{selmer.selmer2_lower_bound(res)}"
        )
        ord2t_values.append(res.ord2T_product)
    out = Path(cfg.out)
    _write_text(out / "twists.csv", "\n".join(rows) + "\n")

    counts: dict[str, int] = {}
    for v in ord2t_values:
        counts[str(v)] = counts.get(str(v), 0) + 1
    mean = sum(ord2t_values) / len(ord2t_values)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "curve": {"a": cfg.a, "b": cfg.b},
        "X": cfg.X,
        "n_twists": len(ord2t_values),
        "ord2T_counts": counts,
        "tail_fractions": {
            str(r): ekstats.tail_fraction(ord2t_values, r) for r in cfg.r_list
        },
        "normalization": {
            "center": mean,
            "scale": ekstats.sigma_g_predicted(cfg.X) if cfg.X >= 3 else None,
        },
    }
    _write_text(out / "summary.json", _json_dumps(summary))
    return 0


def _cdf_svg(report: ekstats.DistributionReport) -> str:
    """Standalone SVG: two polylines (empirical and Gaussian CDF), labeled axes."""
    width, height, margin = 640, 480, 50
    zs = report.grid
    z_lo, z_hi = min(zs), max(zs)
    span = (z_hi - z_lo) or 1.0

    def sx(z):
        return margin + (z - z_lo) / span * (width - 2 * margin)

    def sy(p):
        return height - margin - p * (height - 2 * margin)

    def polyline(points, color):
        pts = " ".join(f"{sx(z):.2f},{sy(p):.2f}" for z, p in points)
        return f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'

    emp = polyline(list(zip(zs, report.empirical_cdf)), "#d62728")
    gau = polyline(list(zip(zs, report.gaussian_cdf)), "#1f77b4")
    axes = (
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>'
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>'
    )
    labels = (
        f'<text x="{width // 2}" y="{height - 10}" text-anchor="middle" font-size="14">z</text>'
        f'<text x="15" y="{height // 2}" text-anchor="middle" font-size="14" transform="rotate(-90 15 {height // 2})">CDF</text>'
        f'<text x="{width - margin}" y="{margin - 10}" text-anchor="end" font-size="12">'
        f"empirical (red) vs Gaussian (blue), KS = {report.ks:.4f}</text>"
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">{axes}{emp}{gau}{labels}</svg>\n'
    )


def cmd_ek(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    if cfg.f_name == "omega":
        if cfg.field_m == "Q":
            f = ekstats.omega_spec()
        else:
            f = ekstats.omega_spec(qf.make_field(int(cfg.field_m)))
        moments = []
        for k in cfg.k_list:
            rep = ekstats.empirical_moment(f, cfg.X, k)
            moments.append(
                {
                    "X": rep.X,
                    "z": rep.z,
                    "k": rep.k,
                    "empirical": rep.empirical,
                    "predicted": rep.predicted,
                    "ratio": rep.ratio,
                    "within_uniform_range": rep.within_uniform_range,
                }
            )
        # distribution of f over C(Q, X) against the Gaussian
        from .characters import enumerate_characters, eval_additive

        if cfg.field_m == "Q":
            import numpy as np

            from .ekstats import _sqfree_bytes

            weighted = np.zeros(cfg.X, dtype=np.float64)
            for p in ekstats.sieve_primes(cfg.X).primes:
                weighted[p::p] += 1.0
            flags = np.frombuffer(_sqfree_bytes(cfg.X), dtype=np.uint8).astype(bool)
            values = weighted[1:][flags[1:]]
        else:
            fieldK = qf.make_field(int(cfg.field_m))
            values = [eval_additive(f, chi) for chi in enumerate_characters(fieldK, cfg.X)]
        center, scale = ekstats.mu_f(f, cfg.X), ekstats.sigma_f(f, cfg.X)
        report = ekstats.distribution_report(values, (center, scale), X=cfg.X)
    elif cfg.f_name == "curve-g":
        from .arith import sieve_squarefree

        pair = selmer.make_pair(cfg.a, cfg.b)
        moments = []  # the twist statistic is not [0,1]-bounded; no moment reports
        values = [selmer.g_chi_of_twist(pair, d) for d in sieve_squarefree(cfg.X)]
        center = sum(values) / len(values)
        scale = ekstats.sigma_g_predicted(cfg.X)
        report = ekstats.distribution_report(values, (center, scale), X=cfg.X)
    else:
        raise ValueError(f"unknown additive function {cfg.f_name!r}")

    _write_text(out / "moments.json", _json_dumps({"schema_version": SCHEMA_VERSION, "moments": moments}))
    rows = ["grid,empirical,gaussian"]
    for z, e, gau in zip(report.grid, report.empirical_cdf, report.gaussian_cdf):
        rows.append(f"{z!r},{e!r},{gau!r}")
    _write_text(out / "cdf.csv", "\n".join(rows) + "\n")
    _write_text(out / "cdf.svg", _cdf_svg(report))
    return 0


def cmd_ideal_count(cfg: RunConfig) -> int:
    fieldK = qf.make_field(int(cfg.field_m))
    q = _parse_ideal_spec(fieldK, cfg.q_spec)
    d = _parse_ideal_spec(fieldK, cfg.d_spec)
    rows = ["X,class,q,d,brute_count,main_term,gap,normalized_gap"]
    omega_q = len(q.factorization)
    for c_idx, c in enumerate(fieldK.class_data.representatives):
        brute = qf.count_sf(fieldK, cfg.X, c, q, d)
        main = qf.mainterm_sf(fieldK, cfg.X, c, q, d)
        gap = brute - main
        norm_gap = gap / (math.sqrt(cfg.X) * 3**omega_q)
        rows.append(
            f"{cfg.X},{c_idx},{cfg.q_spec or '(1)'},{cfg.d_spec or '(1)'},"
            f"{brute},{main!r},{gap!r},{norm_gap!r}"
        )
    _write_text(Path(cfg.out) / "sfcount.csv", "\n".join(rows) + "\n")
    return 0


def cmd_audit(cfg: RunConfig) -> int:
    try:
        pair = selmer.make_pair(cfg.a, cfg.b)
    except ValueError as exc:
        print(_json_dumps({"ok": False, "error": f"configuration: {exc}"}), end="")
        return 2
    report = selmer.audit_curve(pair, cfg.X, seed=cfg.seed, inject_fault=cfg.inject_fault)
    print(_json_dumps({k: report[k] for k in ("ok", "n_twists", "n_cross_checks", "n_corrections", "failures")}), end="")
    return 0 if report["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistselmer", description=__doc__)
    ap.add_argument("--config", help="key=value config file; command-line flags override")
    sub = ap.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scan", help="descent data for every squarefree twist |d| < X")
    sc.add_argument("--a", type=int)
    sc.add_argument("--b", type=int)
    sc.add_argument("--X", type=int)
    sc.add_argument("--r", dest="r_list", help="tail thresholds, comma separated")
    sc.add_argument("--out")
    sc.add_argument("--workers", type=int)

    ek = sub.add_parser("ek", help="moment and CDF reports for an additive function")
    ek.add_argument("--f", dest="f_name", choices=["omega", "curve-g"])
    ek.add_argument("--X", type=int)
    ek.add_argument("--k", dest="k_list", help="moment orders, comma separated")
    ek.add_argument("--field", dest="field_m", help="'Q' or a squarefree integer m")
    ek.add_argument("--a", type=int)
    ek.add_argument("--b", type=int)
    ek.add_argument("--out")

    ic = sub.add_parser("ideal-count", help="squarefree-ideal counts against the main term")
    ic.add_argument("--m", dest="field_m")
    ic.add_argument("--X", type=int)
    ic.add_argument("--q", dest="q_spec", help="ideal spec: comma-separated p:idx tokens")
    ic.add_argument("--d", dest="d_spec", help="ideal spec: comma-separated p:idx tokens")
    ic.add_argument("--out")

    au = sub.add_parser("audit", help="exact invariant suite; exit 1 on violation")
    au.add_argument("--a", type=int)
    au.add_argument("--b", type=int)
    au.add_argument("--X", type=int)
    au.add_argument("--seed", type=int)
    au.add_argument("--inject-fault", dest="inject_fault", action="store_true", default=None,
                    help="test hook: corrupt one local table entry")

    return ap


_CONFIG_TYPES = {
    "a": int,
    "b": int,
    "X": int,
    "seed": int,
    "workers": int,
    "k_list": _parse_int_list,
    "r_list": _parse_int_list,
}


def config_from_args(argv) -> RunConfig:
    ap = build_parser()
    ns = ap.parse_args(argv)
    cfg = RunConfig(command=ns.command)
    if getattr(ns, "config", None):
        for key, raw in _load_config_file(ns.config).items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            typ = _CONFIG_TYPES.get(key, str)
            setattr(cfg, key, typ(raw))
    for key, val in vars(ns).items():
        if key in ("command", "config") or val is None:
            continue
        if key in ("k_list", "r_list") and isinstance(val, str):
            val = _parse_int_list(val)
        setattr(cfg, key, val)
    if cfg.field_m != "Q" and not isinstance(cfg.field_m, int):
        cfg.field_m = int(cfg.field_m)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except (ValueError, SystemExit) as exc:
        if isinstance(exc, SystemExit):
            return int(exc.code or 0)
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    handlers = {
        "scan": cmd_scan,
        "ek": cmd_ek,
        "ideal-count": cmd_ideal_count,
        "audit": cmd_audit,
    }
    try:
        return handlers[cfg.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
