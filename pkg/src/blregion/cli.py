"""Command-line entry point: pipeline, reports and chart emission."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .adams import (
    AdamsPage,
    AmbiguityError,
    adams_no_differentials,
    divisibility_table,
    install_hidden_rho_extensions,
    mahowald_invariant_of_2k,
    region_classes,
)
from .bockstein import (
    ConflictError,
    EngineError,
    census_report,
    check_structural_constraints,
    run_bockstein,
)
from .catalog import CatalogError, load_catalog
from .charts import chart_from_page, ko_chart, render
from .degrees import Window
from .monomials import degree_of, display
from .rules import load_rule_overrides

USAGE_ERROR, CONSTRAINT_ERROR, IO_ERROR = 2, 3, 4

REPORT_KINDS = ("divisibility", "fixed-points", "two-divisibility", "mahowald", "census")
CHART_KINDS = ("e2", "einf", "ko", "none")


@dataclass
class RunConfig:
    max_stem: int = 24
    coweight_min: int = -2
    coweight_max: int = 1
    catalog_path: Optional[str] = None
    report: Optional[str] = None
    chart: str = "none"
    fmt: str = "svg"
    out: Optional[str] = None
    rules_override: Optional[str] = None
    strict: bool = False

    def validate(self) -> None:
        if self.report and self.max_stem < 8:
            raise ValueError(
                "reports need --max-stem >= 8: the first torsion-witness tower "
                "differential lives on the eighth stem"
            )
        if self.chart != "none" and self.fmt not in ("svg", "tikz"):
            raise ValueError(f"unsupported chart format {self.fmt!r}")


def _parse_args(argv: Sequence[str]) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="blregion",
        description=(
            "Compute the coweight-0 wedge of the C2-equivariant stable stems "
            "and its number-theoretic consequences."
        ),
    )
    parser.add_argument("--max-stem", type=int, default=24)
    parser.add_argument(
        "--coweights", default="-2..1",
        help="MIN..MAX, default -2..1; write --coweights=-2..1 for negative bounds",
    )
    parser.add_argument("--catalog", default=None)
    parser.add_argument("--report", choices=REPORT_KINDS, default=None)
    parser.add_argument("--chart", choices=CHART_KINDS, default="none")
    parser.add_argument("--format", dest="fmt", choices=("svg", "tikz"), default="svg")
    parser.add_argument("--out", default=None)
    parser.add_argument("--rules-override", default=None)
    parser.add_argument(
        "--strict", action="store_true", help="turn census warnings into errors"
    )
    ns = parser.parse_args(argv)
    lo, _, hi = ns.coweights.partition("..")
    try:
        cw_min, cw_max = int(lo), int(hi)
    except ValueError:
        parser.error(f"bad --coweights {ns.coweights!r}")
    return RunConfig(
        max_stem=ns.max_stem,
        coweight_min=cw_min,
        coweight_max=cw_max,
        catalog_path=ns.catalog,
        report=ns.report,
        chart=ns.chart,
        fmt=ns.fmt,
        out=ns.out,
        rules_override=ns.rules_override,
        strict=ns.strict,
    )


def _table(header: List[str], rows: List[List[str]]) -> str:
    """Pretty table plus the same rows tab-separated, for machine reading."""
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    lines.append("")
    lines.extend("\t".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def report_tables(page: AdamsPage, kind: str, k_max: int = 20) -> str:
    """Render one report kind as pretty text plus tab-separated rows."""
    if kind == "divisibility":
        rows = [
            [str(rec.k), f"rho^{rec.max_rho_power}", str(rec.max_rho_power)]
            for rec in divisibility_table(page, k_max)
        ]
        return _table(["k", "max rho power dividing eta^k", "exponent"], rows)
    if kind == "fixed-points":
        rows = [
            [str(rec.k), f"2^{rec.fixed_point_generator_exponent}",
             str(rec.fixed_point_generator_exponent)]
            for rec in divisibility_table(page, k_max)
        ]
        return _table(["k", "fixed-point image generator", "exponent"], rows)
    if kind == "two-divisibility":
        rows = [
            [str(rec.k), f"2^{rec.max_two_power}", str(rec.max_two_power)]
            for rec in divisibility_table(page, k_max)
            if rec.max_two_power is not None
        ]
        return _table(["k", "max 2-power dividing eta^k", "exponent"], rows)
    if kind == "mahowald":
        rows = []
        for k in range(0, min(k_max, 12) + 1):
            det = mahowald_invariant_of_2k(page, k)
            rows.append([f"2^{k}", display(det), "not computed"])
        return _table(["class", "Mahowald invariant detector", "indeterminacy"], rows)
    if kind == "census":
        cat = page.cat
        rows = []
        for m in region_classes(page.run):
            d = degree_of(cat, m)
            rows.append([str(d.s), str(d.f), str(d.w), display(m)])
        rows.sort(key=lambda r: (int(r[0]), int(r[1]), r[3]))
        return _table(["stem", "filtration", "weight", "class"], rows)
    raise ValueError(f"unknown report kind {kind!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = _parse_args(list(sys.argv[1:] if argv is None else argv))
        cfg.validate()
    except SystemExit as exc:  # argparse reports usage problems itself
        return USAGE_ERROR if exc.code not in (0, None) else 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    try:
        cat = load_catalog(cfg.catalog_path)
    except (CatalogError, OSError) as exc:
        print(f"catalog error: {exc}", file=sys.stderr)
        return IO_ERROR if isinstance(exc, OSError) else CONSTRAINT_ERROR

    extra_rules = ()
    if cfg.rules_override:
        try:
            extra_rules = load_rule_overrides(cat, cfg.rules_override)
        except OSError as exc:
            print(f"rule override error: {exc}", file=sys.stderr)
            return IO_ERROR
        except ValueError as exc:
            print(f"rule override error: {exc}", file=sys.stderr)
            return USAGE_ERROR

    window = Window(
        max_stem=cfg.max_stem,
        min_coweight=cfg.coweight_min,
        max_coweight=cfg.coweight_max,
    )
    try:
        run = run_bockstein(cat, window, extra_rules=extra_rules)
    except (ConflictError, EngineError) as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return CONSTRAINT_ERROR

    structural = check_structural_constraints(run)
    census = census_report(run)
    adams = adams_no_differentials(run)
    page = install_hidden_rho_extensions(run)

    failed = False
    for label, rep in (("structural", structural), ("census", census), ("adams", adams)):
        for v in rep.violations:
            print(f"{label} violation: {v}", file=sys.stderr)
            failed = True
        for w in rep.warnings:
            print(f"{label} warning: {w}", file=sys.stderr)
            if cfg.strict:
                failed = True
    if failed:
        return CONSTRAINT_ERROR

    out_stream = sys.stdout
    if cfg.report:
        try:
            out_stream.write(report_tables(page, cfg.report))
        except AmbiguityError as exc:
            print(f"derivation error: {exc}", file=sys.stderr)
            return CONSTRAINT_ERROR

    if cfg.chart != "none":
        doc = ko_chart() if cfg.chart == "ko" else chart_from_page(
            page if cfg.chart == "einf" else run, cfg.chart
        )
        data = render(doc, cfg.fmt)
        if cfg.out:
            try:
                with open(cfg.out, "wb") as fh:
                    fh.write(data)
            except OSError as exc:
                print(f"cannot write chart: {exc}", file=sys.stderr)
                return IO_ERROR
        else:
            out_stream.write(data.decode("utf-8"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
