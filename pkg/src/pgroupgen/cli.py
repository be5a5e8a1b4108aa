"""Command line entry point: pgroupgen {classify,cover,descendants,orbits,verify-paper}."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from .action import AutGroup, gl_automorphisms
from .classify import ClassifyConfig, classify, name_records, relations_text, verify
from .descend import DescendantRecord, immediate_descendants
from .fp import check_prime
from .orbits import OrbitConfig, ResourceCapExceeded, subspace_orbits, vector_orbits
from .pcover import build_cover
from .pcpres import PcPresentation

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass
class CliConfig:
    command: str
    p: int | None = None
    max_order_exponent: int = 5
    input: str | None = None
    output: str | None = None
    format: str = "json"
    threads: int = 1
    heavy_ok: bool = False

    def validate(self):
        if self.p is not None:
            check_prime(self.p)
        if not 1 <= self.max_order_exponent <= 5:
            raise ValueError("max exponent must lie in 1..5")
        if self.format not in ("json", "table"):
            raise ValueError("format must be json or table")
        if self.threads < 1:
            raise ValueError("threads must be positive")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pgroupgen", description="Classify p-groups of order up to p^5 (p > 3).")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, need_p=True, need_input=False):
        if need_p:
            sp.add_argument("--p", type=int, required=True, help="prime > 3")
        sp.add_argument("--max-exponent", "-n", type=int, default=5, dest="max_order_exponent")
        sp.add_argument("--input", "-i", required=need_input)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("json", "table"), default="json")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--heavy-ok", action="store_true", help="allow orbit runs above the default point cap")
        sp.add_argument("--verbose", "-v", action="store_true")

    common(sub.add_parser("classify", help="classify all groups of order p^1..p^n"))
    common(sub.add_parser("cover", help="p-cover of a presentation file"), need_p=False, need_input=True)
    common(sub.add_parser("descendants", help="immediate descendants of a presentation file"), need_p=False,
           need_input=True)
    common(sub.add_parser("orbits", help="orbit-size histogram of a matrix group job file"), need_p=False,
           need_input=True)
    common(sub.add_parser("verify-paper", help="classify and check every known count"))
    return ap


def _write(cfg: CliConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc


def _orbit_config(cfg: CliConfig) -> OrbitConfig:
    return OrbitConfig(heavy_ok=cfg.heavy_ok)


def catalog_table(catalog, names=None) -> str:
    names = names or {}
    lines = [f"p = {catalog.p}"]
    for n in sorted(catalog.groups):
        recs = sorted(catalog.groups[n], key=lambda r: (r.d, r.p_class, r.record_id))
        lines.append(f"order p^{n}: {len(recs)} groups")
        lines.append(f"  {'#':>3}  {'d':>1}  {'cl':>2}  {'parent':<18} {'name':<12} relations")
        for k, r in enumerate(recs, 1):
            nm = names.get(r.record_id) or ""
            lines.append(
                f"  {k:>3}  {r.d:>1}  {r.p_class:>2}  {str(r.parent_id or '-'):<18} {nm:<12} {relations_text(r.presentation)}"
            )
    return "\n".join(lines)


def report_table(report) -> str:
    lines = [f"verification at p = {report.p}: {'PASS' if report.ok else 'FAIL'}"]
    for c in report.checks:
        lines.append(f"  [{c.status.upper():>7}] {c.name}: expected {c.expected}, got {c.actual} {c.detail}".rstrip())
    return "\n".join(lines)


def cmd_classify(cfg: CliConfig) -> int:
    ccfg = ClassifyConfig(cfg.p, cfg.max_order_exponent, cfg.threads, _orbit_config(cfg))
    cat = classify(cfg.p, cfg.max_order_exponent, ccfg)
    if cfg.format == "json":
        _write(cfg, json.dumps(cat.to_dict(), sort_keys=True))
    else:
        _write(cfg, catalog_table(cat, name_records(cat)))
    return EXIT_OK


def cmd_cover(cfg: CliConfig) -> int:
    pres = PcPresentation.from_dict(_read_json(cfg.input))
    cd = build_cover(pres)
    if cfg.format == "json":
        _write(cfg, json.dumps(cd.to_dict(), sort_keys=True))
    else:
        _write(cfg, f"cover on {cd.cover.n} generators, multiplicator {list(cd.multiplicator_gens)}, "
                    f"nucleus {list(cd.nucleus_gens)}\n{relations_text(cd.cover)}")
    return EXIT_OK


def cmd_descendants(cfg: CliConfig) -> int:
    data = _read_json(cfg.input)
    pres_data = data.get("presentation", data)
    pres = PcPresentation.from_dict(pres_data)
    auts_data = data.get("automorphisms")
    if auts_data is not None:
        auts = AutGroup.from_dict(auts_data)
    elif pres.n == pres.d:
        auts = AutGroup(pres.n, pres.d, gl_automorphisms(pres))
    else:
        raise ValueError("a non-elementary presentation needs an 'automorphisms' entry")
    rid = str(data.get("id", "input"))
    cls = int(data.get("class", pres.p_class))
    record = DescendantRecord(pres, data.get("parent"), rid, pres.n, cls, auts)
    kids = immediate_descendants(record, cfg.max_order_exponent, _orbit_config(cfg))
    if cfg.format == "json":
        _write(cfg, json.dumps([k.to_dict() for k in kids], sort_keys=True))
    else:
        _write(cfg, "\n".join(f"{k.record_id}  p^{k.order_exponent}  class {k.p_class}  "
                              f"{relations_text(k.presentation)}" for k in kids) or "(terminal)")
    return EXIT_OK


def cmd_orbits(cfg: CliConfig) -> int:
    job = _read_json(cfg.input)
    try:
        p = int(job["p"])
        gens = [np.array(g, dtype=np.int64) for g in job["gens"]]
        m = int(job.get("m", gens[0].shape[0] if gens else 0))
        dim = int(job.get("dim", 1))
        vectors = bool(job.get("vectors", False))
        scalar = bool(job.get("scalar_closure", False))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed orbit job: {exc}") from exc
    check_prime(p)
    if vectors:
        run = vector_orbits(gens, m, p, scalar, _orbit_config(cfg))
    else:
        run = subspace_orbits(gens, dim, m, p, _orbit_config(cfg))
    out = {"n_orbits": run.n_orbits, "sizes": run.orbit_sizes, "histogram": run.histogram(),
           "representative_ranks": run.rep_ranks}
    if cfg.format == "json":
        _write(cfg, json.dumps(out, sort_keys=True))
    else:
        _write(cfg, "\n".join(f"size {s}: {c} orbits" for s, c in run.histogram().items()))
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    ccfg = ClassifyConfig(cfg.p, cfg.max_order_exponent, cfg.threads, _orbit_config(cfg))
    cat = classify(cfg.p, cfg.max_order_exponent, ccfg)
    report = verify(cat)
    if cfg.format == "json":
        out = report.to_dict()
        out["counts"] = cat.counts()
        _write(cfg, json.dumps(out, sort_keys=True))
    else:
        _write(cfg, f"counts {cat.counts()}\n" + report_table(report))
    return EXIT_OK if report.ok else EXIT_FAILED


COMMANDS = {
    "classify": cmd_classify,
    "cover": cmd_cover,
    "descendants": cmd_descendants,
    "orbits": cmd_orbits,
    "verify-paper": cmd_verify,
}


def run(cfg: CliConfig) -> int:
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except ResourceCapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    threads = int(os.environ.get("PGROUPGEN_THREADS", args.threads))
    cfg = CliConfig(
        command=args.command,
        p=getattr(args, "p", None),
        max_order_exponent=args.max_order_exponent,
        input=args.input,
        output=args.output,
        format=args.format,
        threads=threads,
        heavy_ok=args.heavy_ok,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
