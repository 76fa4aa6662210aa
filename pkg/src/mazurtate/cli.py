"""Command-line front end.

Subcommands: curve, msym, theta, plfunc, kurihara, qexp, verify.
Global flags: --catalog <path>, --json, --no-timing, --threads <n>.
Exit codes: 0 all checks pass or vacuous, 1 check failure, 2 usage or
input error.  Structured output is one JSON object per run with the
fields of the run report; numbers are serialized as decimal strings and
exact rationals as "p/q".
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import ModInt
from .curves import CatalogError, curve_by_label, euler_factor
from .groupring import all_characters
from .modsym import build_space, calibrate_periods, cusp_count, genus_x0
from .nt import primes_up_to
from .oracle import OracleError, lvalue_and_period
from .qexp import (
    GatedFeatureError,
    QExpError,
    TorsionPoint,
    ZetaParameterError,
    check_c_relation,
    eisenstein_00,
    dlog_d_eisenstein,
    f_series,
    rationalized_g_qexp,
    siegel_theta_qexp,
    zeta_modular_form,
)
from .theta import adjudicate_norm_relations, eigen_pair, theta_element


class UsageError(ValueError):
    pass


@dataclass
class Check:
    name: str
    status: str  # pass | fail | vacuous
    witness: str | None = None


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    timing: float | None = None

    def exit_code(self) -> int:
        return 0 if all(c.status in ("pass", "vacuous") for c in self.checks) else 1


def _ser(x):
    """Serialize values: rationals as 'p/q', numbers as decimal strings."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, ModInt):
        return f"{x.residue} mod {x.modulus}"
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, float)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _ser(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_ser(v) for v in x]
    return str(x)


def emit(report: RunReport, args) -> int:
    if args.no_timing:
        report.timing = None
    if args.json:
        obj = {
            "command": report.command,
            "inputs": _ser(report.inputs),
            "outputs": _ser(report.outputs),
            "checks": [
                {"name": c.name, "status": c.status, "witness": c.witness}
                for c in report.checks
            ],
        }
        if report.timing is not None:
            obj["timing"] = f"{report.timing:.3f}"
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(f"== {report.command}")
        for k, v in report.inputs.items():
            print(f"   {k} = {_ser(v)}")
        for k, v in report.outputs.items():
            print(f"{k}: {_text_block(v)}")
        for c in report.checks:
            mark = {"pass": "ok", "fail": "FAIL", "vacuous": "--"}[c.status]
            extra = f"  [{c.witness}]" if c.witness and c.status == "fail" else ""
            print(f"[{mark:>4}] {c.name}{extra}")
        if report.timing is not None:
            print(f"({report.timing:.3f}s)")
    return report.exit_code()


def _text_block(v):
    v = _ser(v)
    if isinstance(v, dict):
        return "\n" + "\n".join(f"    {k} = {val}" for k, val in v.items())
    if isinstance(v, list):
        return "\n" + "\n".join(f"    {item}" for item in v)
    return v


def _get_curve(label: str, args):
    try:
        return curve_by_label(label, args.catalog)
    except CatalogError as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_curve(args) -> RunReport:
    curve = _get_curve(args.label, args)
    report = RunReport(
        "curve",
        {"label": args.label, "ap_bound": args.ap_bound},
    )
    report.outputs["model"] = (
        f"y^2 + {curve.a1} xy + {curve.a3} y = "
        f"x^3 + {curve.a2} x^2 + {curve.a4} x + {curve.a6}"
    )
    report.outputs["conductor"] = curve.conductor
    report.outputs["discriminant"] = curve.discriminant()
    if curve.fricke_sign is not None:
        report.outputs["fricke"] = curve.fricke_sign
    if curve.known_rank is not None:
        report.outputs["rank"] = curve.known_rank
    ap = {}
    reduction = {}
    factors = {}
    for ell in primes_up_to(args.ap_bound):
        ap[ell] = curve.ap(ell)
        factors[ell] = repr(euler_factor(curve, ell))
        if curve.conductor % ell == 0:
            reduction[ell] = {1: "split multiplicative", -1: "nonsplit multiplicative", 0: "additive"}[
                ap[ell]
            ]
    report.outputs["a_ell"] = ap
    if reduction:
        report.outputs["reduction"] = reduction
    report.outputs["euler_factors"] = factors
    return report


def cmd_msym(args) -> RunReport:
    curve = _get_curve(args.label, args) if args.label else None
    N = curve.conductor if curve else args.level
    if N is None:
        raise UsageError("msym needs --level or a curve label")
    space = build_space(N)
    report = RunReport("msym", {"level": N, "label": args.label})
    report.outputs["dimension"] = space.dimension
    report.outputs["genus"] = genus_x0(N)
    report.outputs["cusps"] = cusp_count(N)
    report.checks.append(
        Check(
            "dimension = 2g + cusps - 1",
            "pass"
            if space.dimension == 2 * genus_x0(N) + cusp_count(N) - 1
            else "fail",
        )
    )
    if curve is not None:
        plus, minus = eigen_pair(curve)
        report.outputs["eigen_plus"] = list(plus.vector)
        report.outputs["eigen_minus"] = list(minus.vector)
        report.outputs["value_plus_at_0"] = plus.value(0)
        if args.calibrate:
            try:
                lam = calibrate_periods(plus, curve)
                report.outputs["calibration_scalar"] = lam
                report.checks.append(Check("period calibration", "pass"))
            except Exception as exc:  # noqa: BLE001 - reported, not raised
                report.checks.append(Check("period calibration", "fail", str(exc)))
    return report


def cmd_theta(args) -> RunReport:
    curve = _get_curve(args.label, args)
    pair = eigen_pair(curve)
    if args.mode == "calibrated":
        calibrate_periods(pair[0], curve)
    theta = theta_element(curve, args.modulus, pair)
    report = RunReport(
        "theta", {"label": args.label, "M": args.modulus, "mode": args.mode}
    )
    report.outputs["coefficients"] = {
        f"sigma_{a}": v for a, v in sorted(theta.element.coeffs.items())
    }
    report.outputs["augmentation"] = theta.augmentation()
    flip = theta.element.conjugation_flip()
    cov = all(
        flip.coeffs[a] == theta.plus.coeffs[a] - theta.minus.coeffs[a]
        for a in theta.element.coeffs
    )
    report.checks.append(Check("conjugation covariance", "pass" if cov else "fail"))
    return report


def cmd_plfunc(args) -> RunReport:
    from .padic import interpolate_trivial, iwasawa_invariants, stabilize

    curve = _get_curve(args.label, args)
    report = RunReport(
        "plfunc",
        {"label": args.label, "p": args.p, "k": args.k, "n_max": args.n_max},
    )
    tower = stabilize(curve, args.p, args.k, args.n_max)
    report.outputs["alpha"] = tower.alpha
    report.outputs["variant"] = tower.variant
    report.outputs["layers"] = {
        f"n={n}": {f"sigma_{a}": v.residue for a, v in sorted(x.coeffs.items())}
        for n, x in tower.layers.items()
    }
    proj = tower.check_projectivity()
    for n, ok, wit in proj:
        report.checks.append(
            Check(
                f"projectivity layer {n+1} -> {n}",
                "pass" if ok else "fail",
                None if ok else str(wit),
            )
        )
    interp = interpolate_trivial(tower)
    report.checks.append(
        Check(
            "trivial-character interpolation",
            "pass" if interp.holds else "fail",
            None if interp.holds else f"expected {interp.expected}",
        )
    )
    if args.n_max >= 3:
        try:
            inv = iwasawa_invariants(tower)
            report.outputs["iwasawa"] = {
                "lambda": inv.lambda_,
                "mu": inv.mu,
                "layer": inv.layer,
                "stable": inv.stable,
            }
        except Exception as exc:  # noqa: BLE001
            report.outputs["iwasawa"] = f"unavailable: {exc}"
    return report


def cmd_kurihara(args) -> RunReport:
    from .kurihara import nonvanishing_search, sieve_admissible

    curve = _get_curve(args.label, args)
    report = RunReport(
        "kurihara",
        {
            "label": args.label,
            "p": args.p,
            "k": args.k,
            "bound": args.bound,
            "max_nu": args.nu,
        },
    )
    prime_set = sieve_admissible(curve, args.p, args.k, args.bound)
    report.outputs["admissible_primes"] = prime_set.primes
    table = nonvanishing_search(curve, args.p, args.k, args.nu, args.bound, prime_set)
    report.outputs["table"] = [
        {
            "n": r.n,
            "factors": list(r.factors),
            "value": r.value,
            "unit_class": r.unit_class,
            "vanishes": r.vanishes,
        }
        for r in table.rows
    ]
    report.outputs["summary"] = table.summary()
    return report


def _parse_point(text: str) -> TorsionPoint:
    try:
        a_s, b_s = text.split(",")
        a_n, a_d = a_s.split("/")
        b_n, b_d = b_s.split("/")
        if a_d != b_d:
            raise ValueError
        return TorsionPoint(int(a_n), int(b_n), int(a_d))
    except ValueError:
        raise UsageError(f"point must look like a/N,b/N with equal N: {text!r}")


def _series_rows(series):
    return [
        {"exponent": e, "coefficient": list(coords)}
        for e, coords in series.serialized_rows()
    ]


def cmd_qexp(args) -> RunReport:
    report = RunReport(
        "qexp",
        {
            "target": args.target,
            "point": args.point,
            "c": args.c,
            "d": args.d,
            "k": args.weight,
            "prec": args.prec,
        },
    )
    try:
        if args.target == "siegel":
            pt = _parse_point(args.point)
            s = siegel_theta_qexp(pt, args.c, args.prec)
            report.outputs["grid"] = s.grid
            report.outputs["lead_exponent"] = s.lead_exponent
            report.outputs["truncation"] = s.trunc_exponent
            report.outputs["series"] = _series_rows(s)
        elif args.target == "g-unit":
            pt = _parse_point(args.point)
            g = rationalized_g_qexp(pt, args.prec, args.c)
            report.outputs["lead_exponent"] = g.lead_exponent
            report.outputs["root_order"] = g.root_order
            report.outputs["lead_base"] = list(g.lead_base.coords)
            report.outputs["unit_series"] = _series_rows(g.unit)
        elif args.target == "eisenstein":
            pt = _parse_point(args.point)
            s = dlog_d_eisenstein(pt, args.c, args.weight, args.prec)
            report.outputs["series"] = _series_rows(s)
        elif args.target == "e00":
            s = eisenstein_00(args.weight, args.c, args.aux, args.prec)
            report.outputs["series"] = _series_rows(s)
        elif args.target == "f":
            pt = _parse_point(args.point)
            s = f_series(args.weight, pt, args.prec)
            report.outputs["series"] = _series_rows(s)
        elif args.target == "zeta":
            z = zeta_modular_form(
                args.big_m, args.big_n, args.weight, args.r, args.rp, args.prec
            )
            for name, s in z.branches.items():
                report.outputs[f"branch {name}"] = _series_rows(s)
        elif args.target == "c-relation":
            pt = _parse_point(args.point)
            rep = check_c_relation(pt, args.c, args.d, args.prec)
            report.checks.append(
                Check(
                    f"c,d-relation c={args.c} d={args.d}",
                    "pass" if rep.holds else "fail",
                    None if rep.holds else str(rep.witness),
                )
            )
        else:
            raise UsageError(f"unknown qexp target {args.target!r}")
    except (QExpError, GatedFeatureError, ZetaParameterError) as exc:
        raise UsageError(str(exc))
    return report


# ---------------------------------------------------------------------------
# Verification suites


def _suite_norm_relations(args):
    curves = [curve_by_label(label, args.catalog) for label in ("11a1", "37a1")]
    summary = adjudicate_norm_relations(curves, args.max_product)
    checks = []
    non_vac = summary.non_vacuous()
    checks.append(
        Check(
            f"single variant across {len(non_vac)} non-vacuous cases "
            f"(of {len(summary.reports)})",
            "pass" if summary.consistent else "fail",
            None if summary.consistent else str({r.status for r in non_vac}),
        )
    )
    outputs = {"variant": summary.variant}
    return outputs, checks


def _suite_projectivity(args):
    from .padic import stabilize

    checks = []
    for label, p in (("11a1", 3), ("11a1", 7), ("37a1", 5)):
        curve = curve_by_label(label, args.catalog)
        tower = stabilize(curve, p, args.k, args.n_max)
        for n, ok, wit in tower.check_projectivity():
            checks.append(
                Check(
                    f"{label} p={p}: layer {n+1} -> {n} mod {p}^{args.k}",
                    "pass" if ok else "fail",
                    None if ok else str(wit),
                )
            )
    return {}, checks


def _suite_interpolation(args):
    from .padic import interpolate_character, interpolate_trivial, stabilize

    checks = []
    for label, p in (("11a1", 3), ("11a1", 7), ("37a1", 5)):
        curve = curve_by_label(label, args.catalog)
        tower = stabilize(curve, p, args.k, min(args.n_max, 2))
        rep = interpolate_trivial(tower)
        checks.append(
            Check(
                f"{label} p={p}: trivial character",
                "pass" if rep.holds else "fail",
            )
        )
    curve = curve_by_label("11a1", args.catalog)
    tower = stabilize(curve, 3, args.k, 2)
    chi = next(c for c in all_characters(9) if c.is_primitive())
    rep = interpolate_character(tower, chi, curve)
    checks.append(
        Check("11a1 p=3: order-3 character mod 9", "pass" if rep.holds else "fail")
    )
    return {}, checks


def _suite_kolyvagin(args):
    from .groupring import telescoping_check
    from .nt import is_primitive_root

    bad = []
    total = 0
    for ell in primes_up_to(args.max_l):
        if ell == 2:
            continue
        for eta in range(2, ell):
            if not is_primitive_root(eta, ell):
                continue
            total += 1
            if not telescoping_check(ell, eta):
                bad.append((ell, eta))
    checks = [
        Check(
            f"(sigma_eta - 1) D_ell = (ell-1) - N_ell for {total} pairs (ell <= {args.max_l})",
            "pass" if not bad else "fail",
            str(bad[:3]) if bad else None,
        )
    ]
    return {}, checks


def _suite_gauss(args):
    from .arith import CycElt
    from .groupring import gauss_sum

    bad = []
    total = 0
    for d in range(1, 14):
        for chi in all_characters(d):
            if not chi.is_primitive():
                continue
            total += 1
            prod = gauss_sum(chi) * gauss_sum(chi.conjugate())
            if prod != CycElt.rational(chi.parity() * d, prod.conductor):
                bad.append((d, chi.exponents))
    checks = [
        Check(
            f"tau(chi) tau(chi-bar) = chi(-1) d for {total} primitive chi, d <= 13",
            "pass" if not bad else "fail",
            str(bad[:3]) if bad else None,
        )
    ]
    return {}, checks


def _suite_siegel_c(args):
    pt = TorsionPoint(0, 1, 5)
    g1 = rationalized_g_qexp(pt, 10, 11)
    g2 = rationalized_g_qexp(pt, 10, 31)
    agree, wit = g1.unit.agreement(g2.unit)
    checks = [
        Check(
            "rationalized g unit parts agree (c = 11 vs 31, N = 5, q^10)",
            "pass" if agree and g1.lead_exponent == g2.lead_exponent else "fail",
            None if agree else str(wit),
        )
    ]
    rep = check_c_relation(pt, 7, 11, 8)
    checks.append(
        Check(
            "c,d-symmetric theta relation (c=7, d=11, q^8)",
            "pass" if rep.holds else "fail",
            None if rep.holds else str(rep.witness),
        )
    )
    return {}, checks


def _suite_eisenstein_a(args):
    checks = []
    for k in (1, 3):
        ea = eisenstein_00(k, 5, 2, args.prec)
        eb = eisenstein_00(k, 5, 3, args.prec)
        agree, wit = ea.agreement(eb)
        checks.append(
            Check(
                f"E^({k})_00 independent of a (a = 2 vs 3, c = 5, q^{args.prec})",
                "pass" if agree else "fail",
                None if agree else str(wit),
            )
        )
    return {}, checks


SUITES = {
    "norm-relations": _suite_norm_relations,
    "projectivity": _suite_projectivity,
    "interpolation": _suite_interpolation,
    "kolyvagin-identity": _suite_kolyvagin,
    "gauss": _suite_gauss,
    "siegel-c": _suite_siegel_c,
    "eisenstein-a": _suite_eisenstein_a,
}


def cmd_verify(args) -> RunReport:
    if args.suite not in SUITES and args.suite != "all":
        raise UsageError(
            f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)} or 'all'"
        )
    names = list(SUITES) if args.suite == "all" else [args.suite]
    report = RunReport("verify", {"suite": args.suite})
    if args.threads > 1 and len(names) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(lambda n: (n, SUITES[n](args)), names))
    else:
        results = [(n, SUITES[n](args)) for n in names]
    for name, (outputs, checks) in results:  # ordered assembly
        for k, v in outputs.items():
            report.outputs[f"{name}.{k}"] = v
        for c in checks:
            report.checks.append(Check(f"{name}: {c.name}", c.status, c.witness))
    return report


def cmd_oracle(args) -> RunReport:
    curve = _get_curve(args.label, args)
    oracle = lvalue_and_period(curve)
    report = RunReport("oracle", {"label": args.label})
    report.outputs["lvalue"] = f"{oracle.lvalue:.12g}"
    report.outputs["omega_plus"] = f"{oracle.omega_plus:.12g}"
    report.outputs["ratio"] = f"{oracle.normalized:.12g}"
    report.outputs["tail_bound"] = f"{oracle.tail_bound:.3g}"
    report.outputs["real_components"] = oracle.real_components
    return report


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a pre-subcommand global flag from being clobbered by
    # the subparser's default; real defaults are filled in main()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--catalog", default=argparse.SUPPRESS, help="curve catalog file"
    )
    common.add_argument(
        "--json",
        action="store_true",
        default=argparse.SUPPRESS,
        help="structured output",
    )
    common.add_argument("--no-timing", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    parser = argparse.ArgumentParser(
        prog="mazurtate",
        description="Exact modular-symbol, theta-element, p-adic L-function, "
        "Kurihara-number, and q-expansion computations for rational elliptic curves.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("curve", help="model, a_ell table, Euler factors")
    p.add_argument("label")
    p.add_argument("--ap-bound", type=int, default=20)
    p.set_defaults(func=cmd_curve)

    p = add_parser("msym", help="modular symbol space and eigen-symbols")
    p.add_argument("label", nargs="?", default=None)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--calibrate", action="store_true")
    p.set_defaults(func=cmd_msym)

    p = add_parser("theta", help="Mazur-Tate element at a modulus")
    p.add_argument("label")
    p.add_argument("modulus", type=int)
    p.add_argument("--mode", choices=["integral", "calibrated"], default="integral")
    p.set_defaults(func=cmd_theta)

    p = add_parser("plfunc", help="p-stabilized tower and invariants")
    p.add_argument("label")
    p.add_argument("-p", type=int, required=True, dest="p")
    p.add_argument("-k", type=int, default=4, dest="k")
    p.add_argument("-n", type=int, default=3, dest="n_max")
    p.set_defaults(func=cmd_plfunc)

    p = add_parser("kurihara", help="admissible primes and delta_n table")
    p.add_argument("label")
    p.add_argument("-p", type=int, required=True, dest="p")
    p.add_argument("-k", type=int, default=1, dest="k")
    p.add_argument("--bound", type=int, default=200)
    p.add_argument("--nu", type=int, default=1)
    p.set_defaults(func=cmd_kurihara)

    p = add_parser("qexp", help="theta/Siegel/Eisenstein expansions")
    p.add_argument(
        "target",
        choices=["siegel", "g-unit", "eisenstein", "e00", "f", "zeta", "c-relation"],
    )
    p.add_argument("--point", default="0/5,1/5")
    p.add_argument("--c", type=int, default=7)
    p.add_argument("--d", type=int, default=11)
    p.add_argument("--weight", "-k", type=int, default=1)
    p.add_argument("--aux", type=int, default=2)
    p.add_argument("--prec", type=Fraction, default=Fraction(8))
    p.add_argument("--big-m", type=int, default=5)
    p.add_argument("--big-n", type=int, default=7)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--rp", type=int, default=1)
    p.set_defaults(func=cmd_qexp)

    p = add_parser("oracle", help="numeric L(E,1) and real period")
    p.add_argument("label")
    p.set_defaults(func=cmd_oracle)

    p = add_parser("verify", help="named identity suites")
    p.add_argument("suite")
    p.add_argument("--max-l", type=int, default=100, dest="max_l")
    p.add_argument("--max-product", type=int, default=60)
    p.add_argument("-k", type=int, default=4, dest="k")
    p.add_argument("-n", type=int, default=3, dest="n_max")
    p.add_argument("--prec", type=int, default=15)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    for name, default in (
        ("catalog", None),
        ("json", False),
        ("no_timing", False),
        ("threads", 1),
    ):
        if not hasattr(args, name):
            setattr(args, name, default)
    t0 = time.time()
    try:
        report = args.func(args)
    except (UsageError, CatalogError, OracleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report.timing = time.time() - t0
    return emit(report, args)


if __name__ == "__main__":
    sys.exit(main())
