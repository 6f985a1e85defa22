"""Command-line pipeline: enumerate points, verify witnesses and coverings,
enumerate relations, simplify and abelianize.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .covering import read_certificate, render_covering, verify_certificate
from .engine import (
    ExponentBounds,
    assemble_presentation,
    build_witness_set,
    enumerate_relations,
    exponent_bounds,
    verify_witness,
)
from .fpgroups import abelianization, read_presentation, tietze_simplify, write_presentation
from .hermitian import read_matrix_file
from .points import (
    depth_histogram,
    diff_against_fixture,
    enumerate_points,
    read_table,
    write_table,
)
from .rings import parse_rational

COVER_DEPTH = {2: 16, 11: 43}
PUBLISHED_MAXIMA = {11: (Fraction(25661, 10**4), Fraction(26901, 10**4))}


@dataclass
class PipelineConfig:
    d: int = 2
    max_depth: int | None = None
    height: Fraction | None = None
    bounds: tuple[int, int, int] | None = None
    points_file: str | None = None
    witnesses_file: str | None = None
    certificate: str | None = None
    outdir: str = "out"
    workers: int = 1
    audit_n: int = 64
    seed: int = 0
    strict: bool = False
    render: bool = False
    preserve: str = ""
    max_rounds: int = 50
    elimination_limit: int | None = None


def _read_config_file(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            out[key.strip()] = val.strip()
    return out


def load_config(args) -> PipelineConfig:
    cfg = PipelineConfig()
    if getattr(args, "config", None):
        for key, val in _read_config_file(args.config).items():
            _set_config(cfg, key, val)
    for key in vars(cfg):
        cli_val = getattr(args, key, None)
        if cli_val is not None and cli_val != "":
            _set_config(cfg, key, cli_val)
    if cfg.d not in COVER_DEPTH:
        raise ValueError(f"unsupported pipeline d={cfg.d} (supported: 2, 11)")
    return cfg


def _set_config(cfg: PipelineConfig, key: str, val) -> None:
    if not hasattr(cfg, key):
        raise ValueError(f"unknown config key {key!r}")
    cur = getattr(PipelineConfig, key, None)
    if key == "height":
        val = parse_rational(str(val))
    elif key == "bounds":
        if isinstance(val, str):
            val = tuple(int(x) for x in val.split(","))
        if len(val) != 3:
            raise ValueError("bounds override needs n,m,l")
    elif key in ("d", "max_depth", "workers", "audit_n", "seed", "max_rounds",
                 "elimination_limit"):
        val = int(val)
    elif key in ("strict", "render"):
        val = val if isinstance(val, bool) else val.lower() in ("1", "true", "yes")
    setattr(cfg, key, val)


def _fixture(name: str) -> Path:
    return Path(str(resources.files("picardmod") / "fixtures" / name))


def _default_points_fixture(d: int) -> Path | None:
    p = _fixture(f"points_d{d}.txt")
    return p if p.exists() else None


def _default_witnesses(d: int) -> Path | None:
    p = _fixture(f"witnesses_d{d}.txt")
    return p if p.exists() else None


def _outdir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- subcommands ------------------------------------------------------------------


def cmd_enumerate_points(cfg: PipelineConfig) -> int:
    n = cfg.max_depth or COVER_DEPTH[cfg.d]
    t0 = time.time()
    table = enumerate_points(cfg.d, n)
    out = _outdir(cfg)
    write_table(out / f"points_d{cfg.d}.txt", table)
    hist = depth_histogram(table)
    print(f"d={cfg.d} max_depth={n}: {table.total()} representatives "
          f"({time.time() - t0:.1f}s)")
    print("histogram:", hist)
    fixture_path = cfg.points_file or _default_points_fixture(cfg.d)
    rc = 0
    if fixture_path:
        fixture = read_table(fixture_path, d=cfg.d)
        fixture.rows = {k: v for k, v in fixture.rows.items() if k <= n}
        diff = diff_against_fixture(table, fixture)
        lines = [f"matched: {len(diff.matched)}"]
        for k, p, td in diff.fixture_only:
            lines.append(f"fixture-only: depth {k} : {p.text()} (true depth {td})")
        for k, p, other in diff.fixture_duplicates:
            lines.append(
                f"fixture-duplicate: depth {k} : {p.text()} ~ {other.text()}"
            )
        for k, p in diff.enumerated_only:
            lines.append(f"enumerated-only: depth {k} : {p.text()}")
        report = "\n".join(lines) + "\n"
        (out / f"points_diff_d{cfg.d}.txt").write_text(report)
        print(report, end="")
        if cfg.strict and not diff.clean:
            rc = 1
    return rc


def cmd_verify_witnesses(cfg: PipelineConfig) -> int:
    from .hermitian import INFINITY, Infinity

    n = cfg.max_depth or COVER_DEPTH[cfg.d]
    table = enumerate_points(cfg.d, n)
    path = cfg.witnesses_file or _default_witnesses(cfg.d)
    if path is None:
        print(f"no witness file for d={cfg.d}; pass witnesses_file", file=sys.stderr)
        return 2
    mats = read_matrix_file(path)
    fixture_path = cfg.points_file or _default_points_fixture(cfg.d)
    fixture = read_table(fixture_path, d=cfg.d) if fixture_path else None
    fixture_pts = (
        {(k, p.key()) for k, p in fixture.all_points()} if fixture else None
    )
    lines = [f"witness verification d={cfg.d}: {len(mats)} matrices"]
    failures = 0
    per_depth: dict[int, int] = {}
    for M in mats:
        img = M.apply(INFINITY)
        if isinstance(img, Infinity):
            lines.append(f"{M.name}: FAIL (fixes the cusp)")
            failures += 1
            continue
        ok = verify_witness(M, img)
        from .hermitian import depth as _depth

        k = _depth(img, M.ring)
        per_depth[k] = per_depth.get(k, 0) + 1
        named = (
            "matches a listed point"
            if fixture_pts and (k, img.key()) in fixture_pts
            else "image not in the point table"
        )
        lines.append(
            f"{M.name}: {'ok' if ok else 'FAIL'} depth {k} -> {img.text()} ({named})"
        )
        if not ok or (fixture_pts and (k, img.key()) not in fixture_pts):
            failures += 1
    ws = build_witness_set(table, mats)
    lines.append(
        f"orbit coverage: {len(ws.witnesses)}/{len(ws.witnesses) + len(ws.missing)}"
    )
    for a, b in ws.duplicates:
        lines.append(f"duplicate orbit: {a} matches the orbit of {b}")
    for p in ws.missing:
        lines.append(f"no witness for orbit: {p.text()}")
    if fixture:
        fh = {k: len(v) for k, v in sorted(fixture.rows.items())}
        for k in sorted(set(fh) | set(per_depth)):
            if fh.get(k, 0) != per_depth.get(k, 0):
                lines.append(
                    f"depth {k}: {per_depth.get(k, 0)} matrices vs "
                    f"{fh.get(k, 0)} listed points"
                )
    notes = _header_notes(path)
    if notes:
        lines.append("source notes:")
        lines.extend(f"  {s}" for s in notes)
    report = "\n".join(lines) + "\n"
    out = _outdir(cfg)
    (out / f"witness_report_d{cfg.d}.txt").write_text(report)
    print(report, end="")
    return 1 if failures or ws.missing else 0


def _header_notes(path) -> list[str]:
    notes = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line.startswith("#"):
                break
            notes.append(line.lstrip("# "))
    return notes


def cmd_verify_covering(cfg: PipelineConfig) -> int:
    if not cfg.certificate:
        default = _fixture(f"certificate_d{cfg.d}.txt")
        if not default.exists():
            print("no certificate file; pass certificate=", file=sys.stderr)
            return 2
        cfg.certificate = str(default)
    cert = read_certificate(cfg.certificate)
    if cfg.height is not None:
        cert.u = cfg.height
    rep = verify_certificate(cert, audit_n=cfg.audit_n)
    out = _outdir(cfg)
    lines = [f"certificate d={cert.d} u={cert.u} audit_n={rep.audit_n} "
             f"backend={rep.backend}"]
    for r in rep.region_reports:
        status = "pass" if r.passed else f"FAIL at {', '.join(r.failing)}"
        lines.append(f"{r.name} in {r.ball}: {status}")
        for vname, _, disp in r.distances:
            lines.append(f"  {vname}: {disp:.6f}")
    lines.append(f"ball heights ok: {rep.ball_heights_ok}")
    lines.append(f"uncovered samples: {len(rep.uncovered)}")
    for p in rep.uncovered[:50]:
        lines.append(f"  uncovered: ({p[0]}, {p[1]}, {p[2]})")
    report = "\n".join(lines) + "\n"
    (out / f"covering_report_d{cert.d}.txt").write_text(report)
    print(report, end="")
    if cfg.render:
        svg = out / f"covering_d{cert.d}_t0.svg"
        render_covering(cert, "t=0", svg)
        print(f"rendered {svg}")
    return 0 if rep.passed else 1


def cmd_render_covering(cfg: PipelineConfig, slice_spec: str) -> int:
    if not cfg.certificate:
        default = _fixture(f"certificate_d{cfg.d}.txt")
        if default.exists():
            cfg.certificate = str(default)
        elif cfg.d == 11:
            cfg.certificate = str(_fixture("balls_d11.txt"))
        else:
            print("no certificate file; pass certificate=", file=sys.stderr)
            return 2
    cert = read_certificate(cfg.certificate)
    out = _outdir(cfg)
    tag = slice_spec.replace("=", "").replace("/", "_")
    path = out / f"covering_d{cert.d}_{tag}.svg"
    render_covering(cert, slice_spec, path)
    print(f"rendered {path}")
    return 0


def _build_all(cfg: PipelineConfig):
    n = cfg.max_depth or COVER_DEPTH[cfg.d]
    table = enumerate_points(cfg.d, n)
    path = cfg.witnesses_file or _default_witnesses(cfg.d)
    if path is None:
        raise FileNotFoundError(
            f"no witness matrices for d={cfg.d}; pass witnesses_file="
        )
    mats = read_matrix_file(path)
    ws = build_witness_set(table, mats)
    return n, table, ws


def cmd_relations(cfg: PipelineConfig) -> int:
    t0 = time.time()
    n, table, ws = _build_all(cfg)
    if ws.missing:
        print(f"witness gaps for {len(ws.missing)} orbits:")
        for p in ws.missing:
            print(f"  {p.text()}  (relations through this orbit are skipped)")
    if cfg.d in PUBLISHED_MAXIMA and cfg.bounds is None:
        computed = exponent_bounds(
            cfg.d, n, published_maxima=PUBLISHED_MAXIMA[cfg.d]
        )
    else:
        computed = exponent_bounds(cfg.d, n, table=table, witnesses=ws)
    bounds = computed
    if cfg.bounds is not None:
        bounds = ExponentBounds(*cfg.bounds, computed.rhs_display)
        if cfg.bounds < computed.box():
            print(
                f"warning: bounds override {cfg.bounds} is below the computed "
                f"{computed.box()}; the relation set may be incomplete"
            )
    print(f"bounds: |n|<={bounds.n} |m|<={bounds.m} |l|<={bounds.l}")
    run = enumerate_relations(cfg.d, table, ws, bounds, workers=cfg.workers)
    pres = assemble_presentation(cfg.d, ws, run)
    out = _outdir(cfg)
    with open(out / f"relations_d{cfg.d}.log", "w") as fh:
        for rel in run.relations:
            fh.write(rel.line() + "\n")
    write_presentation(out / f"presentation_d{cfg.d}.txt", pres)
    print(
        f"generators: {len(pres.generators)}  relations: raw {run.raw_count} "
        f"dedup {run.dedup_count} (reference raw count for d=2: 5837; "
        f"counting conventions differ)"
    )
    print(f"cases: {run.case_counts}  ({time.time() - t0:.1f}s)")
    return 0


def cmd_simplify(cfg: PipelineConfig, path: str) -> int:
    pres = read_presentation(path)
    preserve = frozenset(x for x in cfg.preserve.split(",") if x)
    res = tietze_simplify(
        pres,
        max_rounds=cfg.max_rounds,
        preserve=preserve,
        elimination_limit=cfg.elimination_limit,
    )
    out = _outdir(cfg)
    dst = out / (Path(path).stem + "_simplified.txt")
    write_presentation(dst, res.presentation)
    print(
        f"{len(pres.generators)} gens / {len(pres.relators)} relators -> "
        f"{len(res.presentation.generators)} gens / "
        f"{len(res.presentation.relators)} relators"
    )
    print(f"wrote {dst}")
    return 0


def cmd_abelianize(path: str) -> int:
    pres = read_presentation(path)
    inv = abelianization(pres)
    print(f"abelianization: {inv}")
    print(f"invariant factors: {', '.join(map(str, inv.torsion)) or '(none)'}; "
          f"free rank {inv.free_rank}")
    return 0


def cmd_pipeline(cfg: PipelineConfig) -> int:
    rc = cmd_enumerate_points(cfg)
    rc2 = cmd_relations(cfg)
    if rc2:
        return rc2
    out = _outdir(cfg)
    pres_path = out / f"presentation_d{cfg.d}.txt"
    pres = read_presentation(pres_path)
    inv = abelianization(pres)
    print(f"raw abelianization: {inv}")
    res = tietze_simplify(pres, max_rounds=cfg.max_rounds)
    write_presentation(out / f"presentation_d{cfg.d}_simplified.txt", res.presentation)
    inv2 = abelianization(res.presentation)
    print(
        f"simplified: {len(res.presentation.generators)} gens / "
        f"{len(res.presentation.relators)} relators; abelianization {inv2}"
    )
    if inv != inv2:
        print("ERROR: simplification changed the abelianization", file=sys.stderr)
        return 1
    return rc


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="picardmod",
        description="Presentations of the Euclidean Picard modular groups "
        "(d=2, 11) by horoball covering.",
    )
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--d", type=int)
    ap.add_argument("--max-depth", dest="max_depth", type=int)
    ap.add_argument("--height", help="rational override for the horosphere height")
    ap.add_argument("--bounds", help="n,m,l cusp exponent override")
    ap.add_argument("--points-file", dest="points_file")
    ap.add_argument("--witnesses-file", dest="witnesses_file")
    ap.add_argument("--certificate")
    ap.add_argument("--outdir")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--audit-n", dest="audit_n", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--strict", action="store_const", const=True)
    ap.add_argument("--render", action="store_const", const=True)
    ap.add_argument("--preserve", help="comma-separated generators to keep")
    ap.add_argument("--max-rounds", dest="max_rounds", type=int)
    ap.add_argument("--elimination-limit", dest="elimination_limit", type=int)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate-points")
    sub.add_parser("verify-witnesses")
    sub.add_parser("verify-covering")
    sub.add_parser("relations")
    p = sub.add_parser("simplify")
    p.add_argument("presentation")
    p = sub.add_parser("abelianize")
    p.add_argument("presentation")
    sub.add_parser("pipeline")
    p = sub.add_parser("render-covering")
    p.add_argument("slice", help="t=<rational> or x=<rational>")

    args = ap.parse_args(argv)
    try:
        cfg = load_config(args)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "enumerate-points":
            return cmd_enumerate_points(cfg)
        if args.command == "verify-witnesses":
            return cmd_verify_witnesses(cfg)
        if args.command == "verify-covering":
            return cmd_verify_covering(cfg)
        if args.command == "relations":
            return cmd_relations(cfg)
        if args.command == "simplify":
            return cmd_simplify(cfg, args.presentation)
        if args.command == "abelianize":
            return cmd_abelianize(args.presentation)
        if args.command == "pipeline":
            return cmd_pipeline(cfg)
        if args.command == "render-covering":
            return cmd_render_covering(cfg, args.slice)
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
