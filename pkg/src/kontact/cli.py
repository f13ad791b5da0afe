"""Command-line verification driver.

``kontact verify {s3,s5,s7}`` builds the shipped pair of commuting
contact structures on the chosen sphere, runs the full residual suite at
seeded sample points, and emits a machine-readable report (JSON or CSV).
Exit status: 0 when every check passes, 1 on any failing check, 2 on
usage errors.  ``describe`` prints the generators, frozen sign
conventions, and golden constants; ``energy`` estimates the energy of a
unit field by Monte Carlo.

The environment variable ``KONTACT_THREADS`` bounds check-level
parallelism (unset: serial; 0: one thread per CPU).  Report order and
content are independent of the thread count, and rerunning a config
reproduces the output byte for byte (timestamps are opt-in).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .contact import (
    D_ALPHA_CONVENTION,
    check_axiom_ii,
    check_axiom_iii,
    check_axiom_volume,
    check_kcontact,
    check_sasakian,
    volume_form_constant,
)
from .double_kcontact import (
    ANGLE_PROFILE,
    GRADIENT_PAIRING,
    DoubleKContact,
    commuting_invariants_check,
    dim_theorem_check,
    expected_laplacian_profile,
    gradient_identity_check,
    hessian_restriction_check,
    laplacian_formula_check,
    phi_product_spectrum_check,
    ricci_normal_check,
    standard_pair,
    transnormal_b_check,
)
from .harmonic import (
    critical_condition_check,
    energy,
    harmonicity_check,
    normalized_gradient_unit_field,
    reeb_energy_closed_form,
    reeb_unit_field,
)
from .manifold import sample_points
from .report import ResidualReport
from .scalar_fields import check_geodesic, mean_curvature_identity_check
from .errors import GeometryError

MANIFOLDS = {"s3": 3, "s5": 5, "s7": 7}
ENERGY_SAMPLES = 20_000
MAX_TOLERANCE = 1e-3

CONVENTION_LEDGER = {
    "curvature_sign": "R(u,v)w = g(v,w)u - g(u,w)v; sectional curvature +1",
    "ricci_sign": ("ric(u,v) = sum_i g(R(E_i,u)v, E_i) = (m-1) g(u,v); "
                   "the Ricci endomorphism sends any Reeb field to (m-1) itself"),
    "laplacian_sign": ("laplacian = -div grad; restricted degree-2 harmonic "
                       "polynomials have eigenvalue 2(m+1)"),
    "exterior_derivative": D_ALPHA_CONVENTION + " (no 1/2 factor)",
    "phi_orientation": ("phi(u) = sigma (J u + alpha(u) p), sigma fixed at "
                        "build time by the d(alpha) compatibility axiom"),
    "gradient_pairing": GRADIENT_PAIRING,
    "mean_curvature_sign": "h = -sum_i g(cov_deriv(N, E_i), E_i) over the level frame",
}


@dataclass
class SuiteConfig:
    """Configuration of one verification run."""

    manifold: str
    samples: int = 500
    seed: int = 42
    exclusion: float = 0.9
    tol_overrides: dict = field(default_factory=dict)
    output_path: Optional[str] = None
    format: str = "json"
    include_timestamp: bool = False

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise ValueError(f"unknown manifold {self.manifold!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not (0.0 < self.exclusion < 1.0):
            raise ValueError("exclusion must lie in (0, 1)")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")
        for name, tol in self.tol_overrides.items():
            if tol > MAX_TOLERANCE:
                raise ValueError(
                    f"override {name}={tol} loosens beyond {MAX_TOLERANCE}")

    def as_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "samples": self.samples,
            "seed": self.seed,
            "exclusion": self.exclusion,
            "tol_overrides": dict(sorted(self.tol_overrides.items())),
            "format": self.format,
        }


def combine_scaled(name: str, reports: Sequence[ResidualReport], tol: float,
                   provenance: str) -> ResidualReport:
    """Aggregate sub-reports, rescaling each residual by tol/sub-tolerance
    so that `max <= tol` still means every sub-check met its own bound."""
    count = sum(r.count for r in reports)
    skipped = sum(r.skipped for r in reports)
    mx = max((r.max * (tol / r.tolerance) for r in reports), default=0.0)
    mean = (sum(r.mean * (tol / r.tolerance) * r.count for r in reports) / count
            if count else 0.0)
    return ResidualReport(check_name=name, count=count, skipped=skipped,
                          max=float(mx), mean=float(mean), tolerance=float(tol),
                          passed=bool(mx <= tol), provenance=provenance)


def _check_catalog(pair: DoubleKContact, points, config: SuiteConfig
                   ) -> list[tuple[str, Callable[[float], ResidualReport]]]:
    """Ordered catalog of suite checks; each entry maps a tolerance to a
    report.  Declaration order here is the report order in the output."""
    f = pair.angle_function()
    n_field = normalized_gradient_unit_field(f)
    dim = pair.dim

    def contact_axioms(tol):
        subs = []
        for s in (pair.s_alpha, pair.s_beta):
            subs.extend([check_axiom_ii(s, points),
                         check_axiom_iii(s, points),
                         check_axiom_volume(s, points)])
        return combine_scaled(
            "contact_axioms", subs, tol,
            "axioms i-iii for both structures, sub-residuals scaled")

    def kcontact(tol):
        subs = [check_kcontact(s, points) for s in (pair.s_alpha, pair.s_beta)]
        return combine_scaled("kcontact", subs, tol,
                              "both Reeb fields are infinitesimal isometries")

    def sasakian(tol):
        subs = [check_sasakian(s, points) for s in (pair.s_alpha, pair.s_beta)]
        return combine_scaled("sasakian", subs, tol,
                              "covariant derivative identity for both structures")

    def dimension_theorem(tol):
        if dim == 3:
            return dim_theorem_check(pair, points, tol_dim3=tol)
        return dim_theorem_check(pair, points, tol_dim5=tol)

    def energy_reeb(tol):
        est = energy(reeb_unit_field(pair.s_alpha), ENERGY_SAMPLES,
                     config.seed + 1, pair.ambient_dim)
        closed = reeb_energy_closed_form(dim)
        residual = abs(est.estimate - closed)
        eff_tol = tol if tol is not None else (3.0 * est.stderr + 1e-9 * closed)
        return ResidualReport(
            check_name="energy_reeb", count=est.samples, skipped=est.skipped,
            max=float(residual), mean=float(residual), tolerance=float(eff_tol),
            passed=bool(residual <= eff_tol),
            provenance=(f"Monte Carlo energy of the first Reeb field vs "
                        f"closed form {closed!r}"))

    catalog: list[tuple[str, Callable]] = [
        ("contact_axioms", lambda tol=1e-8: contact_axioms(tol)),
        ("kcontact", lambda tol=1e-9: kcontact(tol)),
        ("sasakian", lambda tol=1e-8: sasakian(tol)),
        ("double_invariants",
         lambda tol=1e-10: commuting_invariants_check(pair, points, tol=tol)),
        ("gradient_identity",
         lambda tol=1e-9: gradient_identity_check(pair, points, tol=tol)),
        ("transnormal_profile",
         lambda tol=1e-9: transnormal_b_check(pair, points, tol=tol)),
        ("laplacian_formula",
         lambda tol=1e-7: laplacian_formula_check(pair, points, tol=tol)),
    ]
    if dim in (3, 5):
        default_dim_tol = 1e-7 if dim == 3 else 1e-6
        catalog.append(("dimension_theorem",
                        lambda tol=default_dim_tol: dimension_theorem(tol)))
    if dim >= 5:
        catalog.append(("phi_product_spectrum",
                        lambda tol=1e-7: phi_product_spectrum_check(
                            pair, points, tol=tol)))
        catalog.append(("hessian_restricted",
                        lambda tol=1e-7: hessian_restriction_check(
                            pair, points, tol=tol)))
    catalog.extend([
        ("geodesic_field", lambda tol=1e-7: check_geodesic(f, points, tol=tol)),
        ("mean_curvature_identity",
         lambda tol=1e-7: mean_curvature_identity_check(
             f, ANGLE_PROFILE, points, tol=tol)),
        ("ricci_normal",
         lambda tol=1e-8: ricci_normal_check(pair, points, tol=tol)),
        ("nu_form", lambda tol=1e-6: harmonicity_check(n_field, points, tol=tol)),
        ("critical_condition",
         lambda tol=1e-5: critical_condition_check(n_field, points, tol=tol)),
        ("energy_reeb", lambda tol=None: energy_reeb(tol)),
    ])
    return catalog


def check_names(manifold: str) -> list[str]:
    dim = MANIFOLDS[manifold]
    names = ["contact_axioms", "kcontact", "sasakian", "double_invariants",
             "gradient_identity", "transnormal_profile", "laplacian_formula"]
    if dim in (3, 5):
        names.append("dimension_theorem")
    if dim >= 5:
        names.extend(["phi_product_spectrum", "hessian_restricted"])
    names.extend(["geodesic_field", "mean_curvature_identity", "ricci_normal",
                  "nu_form", "critical_condition", "energy_reeb"])
    return names


def _thread_budget() -> int:
    raw = os.environ.get("KONTACT_THREADS")
    if raw is None:
        return 1
    try:
        k = int(raw)
    except ValueError:
        return 1
    if k == 0:
        return os.cpu_count() or 1
    return max(1, k)


def run_suite(config: SuiteConfig) -> list[ResidualReport]:
    """Run every check for the configured manifold, in declaration order."""
    dim = MANIFOLDS[config.manifold]
    valid = set(check_names(config.manifold))
    for name in config.tol_overrides:
        if name not in valid:
            raise ValueError(f"unknown check name in tolerance override: {name}")
    pair = standard_pair(dim)
    f = pair.angle_function()
    cutoff = config.exclusion
    points = sample_points(config.samples, config.seed, pair.ambient_dim,
                           exclusion=lambda p: abs(f.value(p)) > cutoff)
    catalog = _check_catalog(pair, points, config)

    def run_one(entry):
        name, fn = entry
        if name in config.tol_overrides:
            return fn(config.tol_overrides[name])
        return fn()

    workers = _thread_budget()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_one, catalog))
    else:
        reports = [run_one(entry) for entry in catalog]
    return reports


def describe(manifold: str) -> dict:
    """Generators, sign conventions, and golden constants for a manifold."""
    if manifold not in MANIFOLDS:
        raise ValueError(f"unknown manifold {manifold!r}")
    dim = MANIFOLDS[manifold]
    pair = standard_pair(dim)
    slope, offset = expected_laplacian_profile(pair)
    return {
        "manifold": manifold,
        "dimension": dim,
        "J1_blocks": list(pair.j1_blocks),
        "J2_blocks": list(pair.j2_blocks),
        "sigma_alpha": pair.s_alpha.sigma,
        "sigma_beta": pair.s_beta.sigma,
        "convention_ledger": dict(CONVENTION_LEDGER),
        "golden": {
            "laplacian_slope": slope,
            "laplacian_offset": offset,
            "transnormal_profile": "b(t) = 4(1 - t^2)",
            "reeb_energy": reeb_energy_closed_form(dim),
            "volume_form_magnitude": volume_form_constant(pair.n),
        },
    }


# ---------------------------------------------------------------------------
# serialization

def document(config: SuiteConfig, reports: Sequence[ResidualReport]) -> dict:
    doc = {
        "config": config.as_dict(),
        "convention_ledger": dict(CONVENTION_LEDGER),
        "reports": [r.as_dict() for r in reports],
    }
    if config.include_timestamp:
        import datetime
        doc["timestamp"] = datetime.datetime.now(
            datetime.timezone.utc).isoformat()
    return doc


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


CSV_COLUMNS = ["check_name", "count", "skipped", "max", "mean", "tolerance", "pass"]


def render_csv(reports: Sequence[ResidualReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow([r.check_name, r.count, r.skipped,
                         format(r.max, ".17g"), format(r.mean, ".17g"),
                         format(r.tolerance, ".17g"),
                         "true" if r.passed else "false"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument parsing

def _parse_tol(raw: str) -> tuple[str, float]:
    if "=" not in raw:
        raise argparse.ArgumentTypeError(f"expected name=value, got {raw!r}")
    name, _, val = raw.partition("=")
    try:
        return name.strip(), float(val)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kontact",
        description="verify contact-geometry identities on round spheres")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run the residual suite")
    verify.add_argument("manifold", choices=sorted(MANIFOLDS))
    verify.add_argument("--samples", type=int, default=500)
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--exclusion", type=float, default=0.9,
                        help="skip sample points with |angle| above this")
    verify.add_argument("--tol", action="append", type=_parse_tol, default=[],
                        metavar="NAME=VALUE", help="override a check tolerance")
    verify.add_argument("--out", dest="output_path", default=None)
    verify.add_argument("--format", choices=["json", "csv"], default="json")
    verify.add_argument("--timestamp", action="store_true",
                        help="include a timestamp in the document")

    desc = sub.add_parser("describe", help="print generators and conventions")
    desc.add_argument("manifold", choices=sorted(MANIFOLDS))

    en = sub.add_parser("energy", help="Monte Carlo energy of a unit field")
    en.add_argument("manifold", choices=sorted(MANIFOLDS))
    en.add_argument("--field", choices=["reeb_alpha", "reeb_beta", "gradient"],
                    default="reeb_alpha")
    en.add_argument("--samples", type=int, default=100_000)
    en.add_argument("--seed", type=int, default=42)
    en.add_argument("--exclusion", type=float, default=None,
                    help="restrict the gradient field's domain to |angle| <= X")
    return parser


def _cmd_verify(args) -> int:
    try:
        config = SuiteConfig(manifold=args.manifold, samples=args.samples,
                             seed=args.seed, exclusion=args.exclusion,
                             tol_overrides=dict(args.tol),
                             output_path=args.output_path, format=args.format,
                             include_timestamp=args.timestamp)
        reports = run_suite(config)
    except (ValueError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.check_name}: max={r.max:.3e} "
              f"tol={r.tolerance:.3e} (count={r.count}, skipped={r.skipped})",
              file=sys.stderr)
    if config.format == "json":
        payload = render_json(document(config, reports))
    else:
        payload = render_csv(reports)
    if config.output_path:
        with open(config.output_path, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    failures = [r for r in reports if not r.passed]
    if failures:
        for r in failures:
            print(f"failed: {r.check_name} (max {r.max:.6e} > "
                  f"tol {r.tolerance:.6e})", file=sys.stderr)
        return 1
    return 0


def _cmd_describe(args) -> int:
    sys.stdout.write(render_json(describe(args.manifold)))
    return 0


def _cmd_energy(args) -> int:
    dim = MANIFOLDS[args.manifold]
    pair = standard_pair(dim)
    closed = None
    if args.field == "reeb_alpha":
        zf = reeb_unit_field(pair.s_alpha)
        closed = reeb_energy_closed_form(dim)
    elif args.field == "reeb_beta":
        zf = reeb_unit_field(pair.s_beta)
        closed = reeb_energy_closed_form(dim)
    else:
        f = pair.angle_function()
        zf = normalized_gradient_unit_field(f)
        if args.exclusion is not None:
            cutoff = args.exclusion
            base_guard_batch = zf.guard_batch

            def guard_batch(points):
                fv = np.asarray([f.eval(row) for row in points])
                return base_guard_batch(points) & (np.abs(fv) <= cutoff)

            from .harmonic import UnitVectorField
            zf = UnitVectorField(zf.field, guard=zf.guard,
                                 guard_batch=guard_batch, label=zf.label)
    est = energy(zf, args.samples, args.seed, pair.ambient_dim)
    doc = {
        "manifold": args.manifold,
        "field": args.field,
        "samples": est.samples,
        "skipped": est.skipped,
        "seed": args.seed,
        "estimate": est.estimate,
        "stderr": est.stderr,
    }
    if closed is not None:
        doc["closed_form"] = closed
    if args.exclusion is not None:
        doc["exclusion"] = args.exclusion
    sys.stdout.write(render_json(doc))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "describe":
        return _cmd_describe(args)
    if args.command == "energy":
        return _cmd_energy(args)
    parser.error("unknown command")
    return 2


if __name__ == "__main__":
    sys.exit(main())
