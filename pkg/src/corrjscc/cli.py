"""Command-line front end: parameter sweeps with CSV or JSON output.

Every command writes one record per sweep point. Distortion columns are
accompanied by ``<name>_db`` columns holding ``-10*log10`` of the value.
Without ``--out`` the file goes to ``$CORRJSCC_OUT_DIR/<command>.<format>``
when that variable is set, and to standard output otherwise.

Errors are reported on standard error as a single JSON line
``{"error": <kind>, "message": <text>}`` with a nonzero exit status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import bounds, cognitive, mismatch, schemes
from .mc_oracle import McConfig, oracle_checks, random_case
from .model import (Allocation, ChannelSpec, CognitiveConfig, InfeasibleError, ModelError,
                    RegimeError, Scheme, SourceModel, ValidationError)
from .optimizer import NonFiniteObjective

OUT_DIR_ENV = "CORRJSCC_OUT_DIR"

EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NONFINITE = 4

Record = dict[str, Any]


class CliError(Exception):
    def __init__(self, kind: str, message: str, status: int = EXIT_USAGE) -> None:
        super().__init__(message)
        self.kind = kind
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        raise CliError("usage", message)


# -- helpers --------------------------------------------------------------------

def db(x: float) -> float:
    """``-10*log10(x)``; a zero distortion maps to ``inf``."""
    return math.inf if x == 0.0 else -10.0 * math.log10(x)


def _with_db(record: Record, keys: Sequence[str]) -> Record:
    for k in keys:
        record[f"{k}_db"] = db(record[k])
    return record


def _check_finite(records: list[Record], keys: Sequence[str]) -> None:
    for i, r in enumerate(records):
        for k in keys:
            if not math.isfinite(r[k]):
                raise CliError("non-finite", f"{k} is not finite at record {i}", EXIT_NONFINITE)


def _grid(lo: float, hi: float, points: int) -> list[float]:
    if points < 1:
        raise CliError("usage", "--points must be >= 1")
    if points == 1:
        return [float(lo)]
    return [float(x) for x in np.linspace(lo, hi, points)]


def _sweep(ns: argparse.Namespace, allowed: Sequence[str]) -> tuple[Optional[str], list[float]]:
    """Resolve the single sweep axis among ``allowed``; ``(None, [])`` when
    no range flag was given."""
    given = []
    for name in allowed:
        lo, hi = getattr(ns, f"{name}_from", None), getattr(ns, f"{name}_to", None)
        if (lo is None) != (hi is None):
            raise CliError("usage", f"--{name.replace('_', '-')}-from and -to must be given together")
        if lo is not None:
            given.append((name, lo, hi))
    if len(given) > 1:
        raise CliError("usage", "exactly one sweep axis is allowed, got "
                       + ", ".join(g[0].replace("_", "-") for g in given))
    if not given:
        return None, []
    name, lo, hi = given[0]
    return name, _grid(lo, hi, ns.points)


def _power(ns: argparse.Namespace, snr_db: Optional[float]) -> float:
    if snr_db is not None:
        return ns.n * 10.0 ** (snr_db / 10.0)
    return ns.p


def _snr_db(p: float, n: float) -> float:
    return 10.0 * math.log10(p / n) if p > 0 else -math.inf


def _format_csv_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return ""
        return "%.17g" % v
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(records: list[Record], fmt: str, request: dict[str, Any]) -> str:
    if fmt == "json":
        doc = {"request": {k: _json_value(v) for k, v in request.items()},
               "records": [{k: _json_value(v) for k, v in r.items()} for r in records]}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(records[0]) if records else []
    writer.writerow(header)
    for r in records:
        writer.writerow([_format_csv_value(r[k]) for k in header])
    return buf.getvalue()


# -- commands -------------------------------------------------------------------

def _source(ns: argparse.Namespace, rho: Optional[float] = None) -> SourceModel:
    return SourceModel(ns.sigma_v2, ns.sigma_s2, ns.rho if rho is None else rho)


def _points(ns: argparse.Namespace) -> list[tuple[float, float]]:
    """``(rho, snr_db or None)`` per sweep point for commands that sweep
    either the correlation or the SNR."""
    axis, values = _sweep(ns, ("rho", "snr_db"))
    if axis == "rho":
        return [(r, ns.snr_db) for r in values]
    if axis == "snr_db":
        return [(ns.rho, s) for s in values]
    return [(ns.rho, ns.snr_db)]


def cmd_bounds(ns: argparse.Namespace) -> list[Record]:
    records = []
    for rho, snr in _points(ns):
        model = _source(ns, rho)
        ch = ChannelSpec(_power(ns, snr), ns.n)
        records.append(_with_db({
            "sigma_v2": model.sigma_v2, "sigma_s2": model.sigma_s2, "rho": rho,
            "p": ch.p, "n": ch.n_design, "snr_db": _snr_db(ch.p, ch.n_design),
            "d_ob1": bounds.outer_bound_1(model, ch),
            "d_ob2": bounds.outer_bound_2(model, ch),
            "d_ob": bounds.combined_outer(model, ch),
        }, ("d_ob1", "d_ob2", "d_ob")))
    _check_finite(records, ("d_ob1", "d_ob2", "d_ob"))
    return records


_SCHEME_ORDER = (Scheme.UNCODED, Scheme.NAIVE_DPC, Scheme.DIGITAL_DPC, Scheme.HDA)


def _col(scheme: Scheme) -> str:
    return scheme.value.replace("-", "_")


def cmd_schemes(ns: argparse.Namespace) -> list[Record]:
    chosen = _SCHEME_ORDER if ns.scheme == "all" else (Scheme(ns.scheme),)
    if ns.optimize and ns.pa is not None:
        raise CliError("usage", "--pa fixes the allocation and cannot be combined with --optimize")
    optimize = ns.optimize or ns.pa is None
    records = []
    dist_cols = ["d_ob"]
    for rho, snr in _points(ns):
        model = _source(ns, rho)
        ch = ChannelSpec(_power(ns, snr), ns.n)
        r: Record = {"sigma_v2": model.sigma_v2, "sigma_s2": model.sigma_s2, "rho": rho,
                     "p": ch.p, "n": ch.n_design, "snr_db": _snr_db(ch.p, ch.n_design),
                     "d_ob": bounds.combined_outer(model, ch)}
        for sc in chosen:
            key = f"d_{_col(sc)}"
            if sc in (Scheme.DIGITAL_DPC, Scheme.HDA):
                if optimize:
                    best = schemes.optimize_scheme(model, ch, sc).best
                    alloc, d = best.allocation, best.distortion
                else:
                    alloc = Allocation(ns.gamma, ns.pa)
                    d = schemes.scheme_distortion(model, ch, alloc, sc)
                r[f"gamma_{_col(sc)}"] = alloc.gamma
                r[f"pa_{_col(sc)}"] = alloc.pa
            else:
                d = schemes.scheme_distortion(model, ch, Allocation(1.0, 0.0), sc)
            r[key] = d
        records.append(r)
    dist_cols += [f"d_{_col(sc)}" for sc in chosen]
    for r in records:
        _with_db(r, dist_cols)
    _check_finite(records, dist_cols)
    return records


def cmd_mismatch(ns: argparse.Namespace) -> list[Record]:
    axis, values = _sweep(ns, ("actual_snr_db", "pa", "d_star_actual_db"))
    if axis == "d_star_actual_db":
        return _wz_records(ns, values)
    model = _source(ns)
    p = ns.n * 10.0 ** (ns.design_snr_db / 10.0)
    design = ChannelSpec(p, ns.n)
    if axis == "pa":
        if ns.actual_snr_db is None:
            raise CliError("usage", "a --pa sweep needs --actual-snr-db")
        cases = [(ns.actual_snr_db, pa) for pa in values]
    else:
        actual = values if axis else [ns.actual_snr_db if ns.actual_snr_db is not None else ns.design_snr_db]
        cases = [(a, ns.pa) for a in actual]
    if ns.mi and model.rho != 0.0:
        raise CliError("usage", "--mi requires --rho 0")

    fixed = None
    if any(pa is None for _, pa in cases):
        fixed = mismatch.design_allocation(model, design, gamma=ns.gamma)
    records = []
    for actual_db, pa in cases:
        if pa is not None and not 0.0 <= pa <= p:
            raise ValidationError("pa exceeds power budget")
        alloc = fixed if pa is None else Allocation(1.0 if ns.gamma is None else ns.gamma, pa)
        n_a = p / 10.0 ** (actual_db / 10.0)
        ch = ChannelSpec(p, ns.n, n_a)
        informed = schemes.optimize_scheme(model, ChannelSpec(p, n_a), Scheme.DIGITAL_DPC).best.distortion
        r: Record = {"sigma_v2": model.sigma_v2, "sigma_s2": model.sigma_s2, "rho": model.rho,
                     "p": p, "n_design": ns.n, "n_actual": n_a,
                     "design_snr_db": ns.design_snr_db, "actual_snr_db": actual_db,
                     "gamma": alloc.gamma, "pa": alloc.pa,
                     "d_digital_dpc": mismatch.mismatch_distortion(model, ch, Scheme.DIGITAL_DPC, alloc),
                     "d_hda": mismatch.mismatch_distortion(model, ch, Scheme.HDA, alloc),
                     "d_informed": informed}
        if ns.mi:
            r["mi_digital"] = mismatch.mi_refinement_digital(model, ch, alloc)
            r["mi_hda"] = mismatch.mi_refinement_hda(model, ch, alloc)
        records.append(_with_db(r, ("d_digital_dpc", "d_hda", "d_informed")))
    _check_finite(records, ("d_digital_dpc", "d_hda", "d_informed"))
    return records


def _wz_records(ns: argparse.Namespace, values: list[float]) -> list[Record]:
    """Side-information mismatch of a Wyner-Ziv code: the design distortion
    defaults to ``d_star / (1 + P/N)`` with P and N from ``--p``/``--n``."""
    d_star = ns.d_star
    d = ns.d_design if ns.d_design is not None else d_star / (1.0 + ns.p / ns.n)
    records = []
    for x in values:
        d_a = 10.0 ** (-x / 10.0)
        res = mismatch.wz_mismatch(mismatch.WzMismatchInputs(d_star, d_a, d))
        records.append(_with_db({
            "d_star": d_star, "d_design": d, "d_star_actual": d_a, "d_star_actual_db": x,
            "d_wz": res.distortion, "d_informed": d_a * d / d_star,
            "worse_side_information": res.worse_side_information,
        }, ("d_wz", "d_informed")))
    _check_finite(records, ("d_wz", "d_informed"))
    return records


def _cognitive(ns: argparse.Namespace, rho: Optional[float] = None) -> CognitiveConfig:
    cfg = CognitiveConfig(p1=ns.p1, p2=ns.p2, h1=ns.h1, h2=ns.h2, n1=ns.n1, n2=ns.n2,
                          sigma_v1_2=ns.sigma_v1_2, sigma_v2_2=ns.sigma_v2_2,
                          rho=ns.rho if rho is None else rho)
    regime = cognitive.classify_regime(cfg)
    if regime.value != ns.regime:
        raise RegimeError(f"parameters are in the {regime} regime, not {ns.regime}")
    return cfg


def cmd_region(ns: argparse.Namespace) -> list[Record]:
    cfg = _cognitive(ns)
    inner = cognitive.inner_region(cfg, grid_points=ns.grid_points, thresholds=ns.thresholds)
    outer = cognitive.outer_region(cfg, rho_x_points=ns.rho_x_points, split_points=ns.split_points)
    records = []
    for kind, frontier in (("inner", inner), ("outer", outer)):
        for pt in frontier.points:
            records.append(_with_db({"kind": kind, "rho": cfg.rho, "d1": pt.d1, "d2": pt.d2,
                                     "gamma": pt.gamma, "pa": pt.pa, "rho_x": pt.rho_x},
                                    ("d1", "d2")))
    _check_finite(records, ("d1", "d2"))
    return records


def cmd_coexist(ns: argparse.Namespace) -> list[Record]:
    axis, values = _sweep(ns, ("rho",))
    records = []
    for rho in (values if axis else [ns.rho]):
        cfg = _cognitive(ns, rho)
        res = cognitive.coexistence(cfg)
        records.append(_with_db({
            "rho": rho, "h1": cfg.h1, "h2": cfg.h2, "p1": cfg.p1, "p2": cfg.p2,
            "d1_target": res.d1_target, "d1_achieved": res.d1_achieved,
            "d_outer": res.outer, "d_achievable": res.achievable,
            "gamma": res.allocation.gamma, "pa": res.allocation.pa, "rho_x": res.rho_x,
        }, ("d_outer", "d_achievable")))
    _check_finite(records, ("d_outer", "d_achievable"))
    return records


def cmd_verify(ns: argparse.Namespace) -> list[Record]:
    cases = []
    if ns.random:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([ns.seed, 1])))
        cases = [random_case(rng) for _ in range(ns.random)]
    else:
        for rho, snr in _points(ns):
            p = _power(ns, snr)
            n_a = ns.n if ns.actual_snr_db is None else p / 10.0 ** (ns.actual_snr_db / 10.0)
            pa = p / 2.0 if ns.pa is None else ns.pa
            cases.append((_source(ns, rho), ChannelSpec(p, ns.n, n_a), Allocation(ns.gamma, pa)))
    records = []
    for i, (model, ch, alloc) in enumerate(cases):
        mc = McConfig(seed=(ns.seed + i) % 2**64, samples=ns.samples, workers=ns.workers)
        r: Record = {"case": i, "seed": mc.seed, "samples": mc.samples,
                     "sigma_v2": model.sigma_v2, "sigma_s2": model.sigma_s2, "rho": model.rho,
                     "p": ch.p, "n_design": ch.n_design, "n_actual": ch.n_actual,
                     "gamma": alloc.gamma, "pa": alloc.pa}
        for chk in oracle_checks(model, ch, alloc, mc):
            r[chk.name] = chk.analytic
            r[f"{chk.name}_mc"] = chk.simulated.value
            r[f"{chk.name}_se"] = chk.simulated.stderr
            r[f"{chk.name}_z"] = chk.z
        records.append(r)
    # mismatch columns are only present for cases with n_actual < n_design
    keys = list(dict.fromkeys(k for r in records for k in r))
    for r in records:
        for k in keys:
            r.setdefault(k, math.nan)
    return [{k: r[k] for k in keys} for r in records]


# -- parser ---------------------------------------------------------------------

def _range(p: argparse.ArgumentParser, name: str, help_: str) -> None:
    p.add_argument(f"--{name}-from", type=float, help=f"{help_}: sweep start")
    p.add_argument(f"--{name}-to", type=float, help=f"{help_}: sweep end")


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma-v2", type=float, default=1.0, help="source variance")
    p.add_argument("--sigma-s2", type=float, default=1.0, help="interference variance")
    p.add_argument("--rho", type=float, default=0.0, help="source/interference correlation")


def _add_channel(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, default=10.0, help="transmit power (linear)")
    p.add_argument("--n", type=float, default=1.0, help="noise variance")
    p.add_argument("--snr-db", type=float, help="SNR in dB; sets P = N * 10^(snr/10)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help=f"output path (default: ${OUT_DIR_ENV}/<command>.<format> or stdout)")
    p.add_argument("--points", type=int, default=21, help="sweep points")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_cognitive(p: argparse.ArgumentParser) -> None:
    p.add_argument("--regime", choices=("weak", "very-strong"), required=True)
    p.add_argument("--h1", type=float, required=True)
    p.add_argument("--h2", type=float, required=True)
    p.add_argument("--p1", type=float, default=1.0)
    p.add_argument("--p2", type=float, default=1.0)
    p.add_argument("--n1", type=float, default=1.0)
    p.add_argument("--n2", type=float, default=1.0)
    p.add_argument("--sigma-v1-2", type=float, default=1.0)
    p.add_argument("--sigma-v2-2", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.0)


COMMANDS: dict[str, Callable[[argparse.Namespace], list[Record]]] = {
    "bounds": cmd_bounds,
    "schemes": cmd_schemes,
    "mismatch": cmd_mismatch,
    "region": cmd_region,
    "coexist": cmd_coexist,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="corrjscc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="outer bounds")
    _add_source(p)
    _add_channel(p)
    _range(p, "rho", "correlation")
    _range(p, "snr-db", "SNR in dB")
    _add_output(p)

    p = sub.add_parser("schemes", help="distortion of the transmission schemes")
    _add_source(p)
    _add_channel(p)
    _range(p, "rho", "correlation")
    _range(p, "snr-db", "SNR in dB")
    p.add_argument("--scheme", choices=[s.value for s in Scheme] + ["all"], default="all")
    p.add_argument("--optimize", action="store_true", help="optimize gamma and pa (default without --pa)")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--pa", type=float, help="analog power; evaluates at (gamma, pa) instead of optimizing")
    _add_output(p)

    p = sub.add_parser("mismatch", help="distortion under SNR or side-information mismatch")
    _add_source(p)
    p.add_argument("--n", type=float, default=1.0, help="design noise variance")
    p.add_argument("--p", type=float, default=1.0, help="power for the side-information sweep")
    p.add_argument("--design-snr-db", type=float, default=10.0)
    p.add_argument("--actual-snr-db", type=float, help="fixed actual SNR for a --pa sweep")
    _range(p, "actual-snr-db", "actual SNR in dB")
    _range(p, "pa", "analog power")
    p.add_argument("--pa", type=float, help="analog power (default: design optimum)")
    p.add_argument("--gamma", type=float, help="mixing coefficient (default: design optimum)")
    p.add_argument("--mi", action="store_true", help="add refinement-layer mutual information (rho = 0)")
    p.add_argument("--d-star", type=float, default=0.1, help="designed side-information MSE")
    p.add_argument("--d-design", type=float, help="designed distortion (default d_star/(1+P/N))")
    _range(p, "d-star-actual-db", "actual side-information quality -10log10(D*_a)")
    _add_output(p)

    p = sub.add_parser("region", help="cognitive radio distortion region")
    _add_cognitive(p)
    p.add_argument("--grid-points", type=int, default=64)
    p.add_argument("--thresholds", type=int, default=64)
    p.add_argument("--rho-x-points", type=int, default=256)
    p.add_argument("--split-points", type=int, default=64)
    _add_output(p)

    p = sub.add_parser("coexist", help="secondary distortion under coexistence conditions")
    _add_cognitive(p)
    _range(p, "rho", "correlation")
    _add_output(p)

    p = sub.add_parser("verify", help="Monte-Carlo check of the analytic distortions")
    _add_source(p)
    _add_channel(p)
    _range(p, "rho", "correlation")
    _range(p, "snr-db", "SNR in dB")
    p.add_argument("--actual-snr-db", type=float, help="actual SNR for the mismatch checks")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--pa", type=float, help="analog power (default P/2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--random", type=int, default=0, metavar="K",
                   help="check K random parameter tuples instead of a sweep")
    p.add_argument("--workers", type=int, default=1)
    _add_output(p)
    return parser


def _destination(ns: argparse.Namespace) -> Optional[str]:
    if ns.out:
        return ns.out
    out_dir = os.environ.get(OUT_DIR_ENV)
    if out_dir:
        return os.path.join(out_dir, f"{ns.command}.{ns.format}")
    return None


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": " ".join(str(message).split())}) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        records = COMMANDS[ns.command](ns)
        request = {k: v for k, v in vars(ns).items() if k not in ("verbose", "out")}
        text = render(records, ns.format, request)
        dest = _destination(ns)
        if dest is None:
            sys.stdout.write(text)
        else:
            parent = os.path.dirname(dest)
            if parent:
                os.makedirs(parent, exist_ok=True)
            with open(dest, "w", newline="") as fh:
                fh.write(text)
    except CliError as exc:
        _error(exc.kind, str(exc))
        return exc.status
    except InfeasibleError as exc:
        _error("infeasible", str(exc))
        return EXIT_INFEASIBLE
    except NonFiniteObjective as exc:
        _error("non-finite", str(exc))
        return EXIT_NONFINITE
    except RegimeError as exc:
        _error("regime", str(exc))
        return EXIT_USAGE
    except (ModelError, ValueError) as exc:
        _error("validation", str(exc))
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
