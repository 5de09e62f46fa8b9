"""Command line interface: point evaluation, parameter sweeps, self-validation.

Configuration is a flat key = value file; every key can also be given as a
command line flag, and flags override the file. Sweep results are CSV with
17 significant digits so a written value reparses to the identical float,
rows ascending in the swept variable, header first, LF line endings, UTF-8.
Reruns of the same configuration produce byte-identical output.

Average SNRs enter in dB, matching how operating points are usually quoted,
and are converted to linear scale exactly once at the configuration
boundary.

Exit codes: 0 success, 1 configuration or usage error, 2 numerical or
evaluation failure (including partially failed sweeps, whose unresolved
cells are left empty), 3 validation check-suite failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import functools
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .channel import ChannelParams, check_normalization, fit_mixed_gamma
from .exceptions import GkSecrecyError, InvalidParameterError, NonIntegerOrderError
from .montecarlo import McConfig, mc_sop
from .secrecy import (
    SecrecyConfig,
    asop_closed_form,
    asop_quadrature,
    sop_closed_form,
    sop_conventional,
    sop_quadrature,
)

_METHODS = ("closed", "quadrature", "asymptotic", "mc", "conventional")
_SWEEP_KEYS = ("d_gamma_bar_db_sweep", "e_gamma_bar_db_sweep", "rate_rs_sweep")
_AXIS_OF_SWEEP = {
    "d_gamma_bar_db_sweep": "d_gamma_bar_db",
    "e_gamma_bar_db_sweep": "e_gamma_bar_db",
    "rate_rs_sweep": "rate_rs",
}

_FLOAT_KEYS = ("d_k", "d_m", "d_gamma_bar_db", "e_k", "e_m", "e_gamma_bar_db", "rate_rs", "mu")
_INT_KEYS = ("L", "mc_samples", "seed", "workers")
_STR_KEYS = ("methods", "mc_law") + _SWEEP_KEYS

_DEFAULTS = {
    "mu": 0.0,
    "L": 15,
    "methods": "closed",
    "mc_samples": 10_000_000,
    "seed": 0,
    "mc_law": "exact_gk",
    "workers": 1,
}

_REQUIRED_POINT = ("d_k", "d_m", "d_gamma_bar_db", "e_k", "e_m", "e_gamma_bar_db", "rate_rs")

# Operating point used by `validate` when not overridden: a mid-SNR wiretap
# setup where every estimator family is exercised on a nontrivial value.
_VALIDATE_DEFAULTS = {
    "d_k": 3.0,
    "d_m": 2.0,
    "d_gamma_bar_db": 30.0,
    "e_k": 3.0,
    "e_m": 2.0,
    "e_gamma_bar_db": 0.0,
    "rate_rs": 1.0,
    "mu": 3.0,
}


class UsageError(Exception):
    """Configuration or command line problem; maps to exit code 1."""


@dataclass(frozen=True)
class SweepSpec:
    """One resolved sweep: a single swept axis over explicit values.

    Exactly one variable sweeps per run; everything else is fixed by
    ``settings``. ``methods`` lists the output columns in CSV order.
    """

    axis: str
    values: tuple
    methods: tuple
    settings: dict

    def __post_init__(self):
        if self.axis not in _AXIS_OF_SWEEP.values():
            raise InvalidParameterError(f"unknown sweep axis {self.axis!r}")
        if len(self.values) < 1:
            raise InvalidParameterError("sweep needs at least one value")
        if not self.methods:
            raise InvalidParameterError("methods must not be empty")
        for m in self.methods:
            if m not in _METHODS:
                raise InvalidParameterError(f"unknown method {m!r}")


def _parse_config_file(path):
    settings = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise UsageError(f"{path}:{lineno}: empty key or value")
        if key in settings:
            raise UsageError(f"{path}:{lineno}: duplicate key {key!r}")
        settings[key] = value
    return settings


def _coerce(key, value):
    if key in _FLOAT_KEYS:
        try:
            return float(value)
        except ValueError as exc:
            raise UsageError(f"{key} must be a number, got {value!r}") from exc
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError as exc:
            raise UsageError(f"{key} must be an integer, got {value!r}") from exc
    if key in _STR_KEYS:
        return value
    raise UsageError(f"unknown configuration key {key!r}")


def _resolve_settings(args, defaults=None):
    settings = dict(_DEFAULTS)
    if defaults:
        settings.update(defaults)
    if args.config is not None:
        for key, value in _parse_config_file(args.config).items():
            settings[key] = _coerce(key, value)
    for key in _FLOAT_KEYS + _INT_KEYS + _STR_KEYS:
        override = getattr(args, key, None)
        if override is not None:
            settings[key] = _coerce(key, override)
    return settings


def _parse_sweep_values(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"sweep must be start:end:step, got {text!r}")
    try:
        start, end, step = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"sweep bounds must be numbers, got {text!r}") from exc
    if step <= 0 or end <= start:
        raise UsageError("sweep needs step > 0 and end > start")
    values = []
    i = 0
    while True:
        v = start + i * step
        if v > end + 1e-9 * step:
            break
        values.append(v)
        i += 1
    return tuple(values)


def _parse_methods(text):
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    if not methods:
        raise UsageError("methods must not be empty")
    seen = set()
    for m in methods:
        if m not in _METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(_METHODS)}")
        if m in seen:
            raise UsageError(f"method {m!r} listed twice")
        seen.add(m)
    return methods


def _require(settings, keys):
    missing = [k for k in keys if k not in settings]
    if missing:
        raise UsageError(f"missing required settings: {', '.join(missing)}")


@dataclass(frozen=True)
class _Point:
    """One resolved operating point with lazily fitted mixture models."""

    d_params: ChannelParams
    e_params: ChannelParams
    cfg: SecrecyConfig
    order: int

    def d_model(self):
        return _fit_cached(self.d_params, self.order)

    def e_model(self):
        return _fit_cached(self.e_params, self.order)


@functools.lru_cache(maxsize=256)
def _fit_cached(params, order):
    # Sweeps refit only the swept link; the fixed link's model is shared.
    return fit_mixed_gamma(params, order)


def _build_point(settings):
    _require(settings, _REQUIRED_POINT)
    if not isinstance(settings["L"], int) or not 1 <= settings["L"] <= 64:
        raise UsageError(f"L must be an integer in [1, 64], got {settings['L']!r}")
    try:
        d_params = ChannelParams.from_db(
            settings["d_k"], settings["d_m"], settings["d_gamma_bar_db"]
        )
        e_params = ChannelParams.from_db(
            settings["e_k"], settings["e_m"], settings["e_gamma_bar_db"]
        )
        cfg = SecrecyConfig(rate_rs=settings["rate_rs"], mu=settings["mu"])
    except GkSecrecyError as exc:
        raise UsageError(str(exc)) from exc
    return _Point(d_params=d_params, e_params=e_params, cfg=cfg, order=settings["L"])


def _asymptotic_estimate(point):
    try:
        return asop_closed_form(point.d_params, point.e_model(), point.cfg)
    except NonIntegerOrderError:
        return asop_quadrature(point.d_params, point.e_model(), point.cfg)


def _mc_config(settings):
    try:
        return McConfig(
            samples=settings["mc_samples"],
            seed=settings["seed"],
            law=settings["mc_law"],
            workers=settings["workers"],
        )
    except GkSecrecyError as exc:
        raise UsageError(str(exc)) from exc


def _evaluate_row(settings, methods, mc):
    """Compute every requested method; failures leave empty cells.

    Returns (cells, failures) with one cell per CSV column.
    """
    cells = []
    failures = []
    point = _build_point(settings)
    for method in methods:
        try:
            if method == "closed":
                cells.append(sop_closed_form(point.d_model(), point.e_model(), point.cfg).value)
            elif method == "quadrature":
                cells.append(sop_quadrature(point.d_model(), point.e_model(), point.cfg).value)
            elif method == "asymptotic":
                cells.append(_asymptotic_estimate(point).value)
            elif method == "conventional":
                cells.append(
                    sop_conventional(point.d_model(), point.e_model(), point.cfg.rate_rs).value
                )
            else:
                est = mc_sop(point.d_params, point.e_params, point.cfg, mc, order=point.order)
                cells.append(est.value)
                cells.append(est.stderr)
        except GkSecrecyError as exc:
            failures.append(f"{method}: {exc}")
            cells.append(None)
            if method == "mc":
                cells.append(None)
    return cells, failures


def _columns(methods):
    cols = []
    for m in methods:
        cols.append(m)
        if m == "mc":
            cols.append("mc_stderr")
    return cols


def _format_cell(value):
    if value is None:
        return ""
    return format(float(value), ".17g")


def _write_csv(path, header, rows):
    text = "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _cmd_point(args):
    settings = _resolve_settings(args)
    methods = _parse_methods(settings["methods"])
    mc = _mc_config(settings) if "mc" in methods else None
    cells, failures = _evaluate_row(settings, methods, mc)
    header = _columns(methods)
    print(
        "operating point: "
        f"d(k={settings['d_k']:g}, m={settings['d_m']:g}, "
        f"gamma_bar={settings['d_gamma_bar_db']:g} dB), "
        f"e(k={settings['e_k']:g}, m={settings['e_m']:g}, "
        f"gamma_bar={settings['e_gamma_bar_db']:g} dB), "
        f"rate_rs={settings['rate_rs']:g}, mu={settings['mu']:g}, L={settings['L']}"
    )
    for name, cell in zip(header, cells):
        shown = "failed" if cell is None else format(cell, ".12e")
        print(f"{name} = {shown}")
    if args.out is not None:
        _write_csv(args.out, header, [[_format_cell(c) for c in cells]])
    for failure in failures:
        print(f"error: {failure}", file=sys.stderr)
    return 2 if failures else 0


def _cmd_sweep(args):
    settings = _resolve_settings(args)
    methods = _parse_methods(settings["methods"])
    present = [k for k in _SWEEP_KEYS if k in settings]
    if len(present) != 1:
        raise UsageError(
            f"sweep needs exactly one of {', '.join(_SWEEP_KEYS)}, found {len(present)}"
        )
    sweep_key = present[0]
    axis = _AXIS_OF_SWEEP[sweep_key]
    values = _parse_sweep_values(settings[sweep_key])
    base = {k: v for k, v in settings.items() if k not in _SWEEP_KEYS}
    spec = SweepSpec(axis=axis, values=values, methods=methods, settings=base)
    # Validate the fixed settings once up front so a typo fails fast with a
    # usage error instead of one runtime failure per row.
    probe = dict(spec.settings)
    probe[axis] = values[0]
    _build_point(probe)
    mc = _mc_config(settings) if "mc" in methods else None

    def run_one(value):
        row_settings = dict(spec.settings)
        row_settings[axis] = value
        return _evaluate_row(row_settings, spec.methods, mc)

    workers = max(1, min(int(settings["workers"]), len(values)))
    if workers == 1:
        results = [run_one(v) for v in values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_one, v) for v in values]
            results = [f.result() for f in futures]
    rows = []
    failures = []
    for value, (cells, row_failures) in zip(values, results):
        rows.append([_format_cell(value)] + [_format_cell(c) for c in cells])
        for failure in row_failures:
            failures.append(f"{axis}={value:g} {failure}")
    header = [axis] + _columns(methods)
    _write_csv(args.out, header, rows)
    for failure in failures:
        print(f"error: {failure}", file=sys.stderr)
    return 2 if failures else 0


def _decade_slope(point, low_db, high_db):
    """log-log slope of the closed-form SOP between two main-link SNRs."""
    vals = []
    for snr_db in (low_db, high_db):
        params = ChannelParams.from_db(point.d_params.k, point.d_params.m, snr_db)
        d_model = _fit_cached(params, point.order)
        vals.append(sop_closed_form(d_model, point.e_model(), point.cfg).value)
    return (math.log10(vals[1]) - math.log10(vals[0])) / ((high_db - low_db) / 10.0)


def _normalization_check(params, order, field, tol, label, fault):
    def run():
        model = fit_mixed_gamma(params, order)
        if fault == "weights":
            bad = model.big_a.copy()
            bad[0] += 1e-6
            model = dataclasses.replace(model, big_a=bad)
        checks = check_normalization(model)
        return checks[field] <= tol, f"{label} = {checks[field]:.3e}"

    return run


def _validation_checks(settings, level):
    """Build the self-check battery as (name, thunk) pairs.

    Each thunk returns (passed, detail); the runner executes them in
    isolation so one broken model cannot abort the remaining checks.
    """
    fault = os.environ.get("GKSECRECY_FAULT", "").strip()
    point = _build_point(settings)
    checks = []

    for label, params in (("main", point.d_params), ("eavesdropper", point.e_params)):
        for field, tol, detail_label in (
            ("weight_sum_error", 1e-10, "|sum A_j - 1|"),
            ("pdf_integral_error", 1e-9, "|integral - 1|"),
            ("cdf_ccdf_gap", 1e-12, "max gap"),
        ):
            checks.append(
                (
                    f"{label} mixture {field.replace('_', ' ')}",
                    _normalization_check(
                        params, point.order, field, tol, detail_label, fault
                    ),
                )
            )

    def symmetry():
        # The composite law treats the two fading orders as an exchangeable
        # product, so swapping them must not move the result.
        base_val = sop_closed_form(point.d_model(), point.e_model(), point.cfg).value
        swap_d = _fit_cached(
            ChannelParams(point.d_params.m, point.d_params.k, point.d_params.gamma_bar),
            point.order,
        )
        swap_e = _fit_cached(
            ChannelParams(point.e_params.m, point.e_params.k, point.e_params.gamma_bar),
            point.order,
        )
        swap_val = sop_closed_form(swap_d, swap_e, point.cfg).value
        scale = max(abs(base_val), 1e-12)
        return (
            abs(base_val - swap_val) <= 1e-10 * scale,
            f"(k,m) = {base_val:.12e}, (m,k) = {swap_val:.12e}",
        )

    checks.append(("fading-order symmetry of the closed form", symmetry))

    def closed_vs_quad(cell):
        def run():
            pt = _build_point(cell)
            closed = sop_closed_form(pt.d_model(), pt.e_model(), pt.cfg).value
            if fault == "closed_form":
                closed += 1e-6
            quad = sop_quadrature(pt.d_model(), pt.e_model(), pt.cfg).value
            scale = max(abs(quad), 1e-12)
            return (
                abs(closed - quad) <= 1e-8 * scale,
                f"closed = {closed:.12e}, quadrature = {quad:.12e}",
            )

        return run

    grid = [
        dict(settings),
        {**settings, "d_gamma_bar_db": 10.0, "rate_rs": 0.5},
        {**settings, "d_gamma_bar_db": 45.0, "mu": 0.0},
    ]
    for i, cell in enumerate(grid):
        checks.append((f"closed form vs quadrature, grid point {i}", closed_vs_quad(cell)))

    def conventional_identity():
        conv = sop_conventional(point.d_model(), point.e_model(), point.cfg.rate_rs).value
        ref = sop_closed_form(
            point.d_model(), point.e_model(), dataclasses.replace(point.cfg, mu=0.0)
        ).value
        return (
            conv == ref,
            f"conventional = {conv:.12e}, closed(mu=0) = {ref:.12e}",
        )

    checks.append(("conventional equals closed form at mu = 0", conventional_identity))

    v = min(point.d_params.k, point.d_params.m)
    if abs(point.d_params.k - point.d_params.m) > 1e-9 and abs(v - round(v)) <= 1e-9:

        def asymptote_agreement():
            a_closed = asop_closed_form(point.d_params, point.e_model(), point.cfg).value
            a_quad = asop_quadrature(point.d_params, point.e_model(), point.cfg).value
            scale = max(abs(a_quad), 1e-12)
            return (
                abs(a_closed - a_quad) <= 1e-8 * scale,
                f"closed = {a_closed:.12e}, quadrature = {a_quad:.12e}",
            )

        checks.append(("asymptote closed form vs quadrature", asymptote_agreement))

    if level == "full":

        def mc_agreement():
            closed = sop_closed_form(point.d_model(), point.e_model(), point.cfg).value
            mc = mc_sop(
                point.d_params,
                point.e_params,
                point.cfg,
                McConfig(
                    samples=10_000_000,
                    seed=settings["seed"],
                    workers=settings["workers"],
                ),
                order=point.order,
            )
            bound = max(3.0 * mc.stderr, 0.02 * closed)
            return (
                abs(mc.value - closed) <= bound,
                f"mc = {mc.value:.6e} +- {mc.stderr:.2e}, closed = {closed:.6e}",
            )

        checks.append(("10^7-sample Monte Carlo agrees with closed form", mc_agreement))

        def slope_check(m):
            def run():
                pt = dataclasses.replace(
                    point, d_params=ChannelParams(3.0, m, point.d_params.gamma_bar)
                )
                slope = _decade_slope(pt, 50.0, 60.0)
                target = -min(3.0, m)
                return (
                    abs(slope - target) <= 0.02 * abs(target),
                    f"slope = {slope:.4f}, target = {target:g}",
                )

            return run

        for m in (1.0, 2.0, 4.0, 5.0):
            checks.append((f"high-SNR slope, m = {m:g}", slope_check(m)))

    return checks


def _cmd_validate(args):
    settings = _resolve_settings(args, defaults=_VALIDATE_DEFAULTS)
    failed = 0
    total = 0
    for name, thunk in _validation_checks(settings, args.level):
        total += 1
        try:
            passed, detail = thunk()
        except GkSecrecyError as exc:
            passed, detail = False, str(exc)
        status = "PASS" if passed else "FAIL"
        print(f"{status} {name}: {detail}")
        if not passed:
            failed += 1
    if failed:
        print(f"validation failed: {failed} of {total} checks", file=sys.stderr)
        return 3
    print(f"validation passed: {total} checks")
    return 0


def _add_common_arguments(parser):
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--out", help="CSV output path (default: stdout for sweeps)")
    for key in _FLOAT_KEYS + _INT_KEYS + _STR_KEYS:
        parser.add_argument(f"--{key}", dest=key, help=f"override {key}")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gksecrecy",
        description="Secrecy outage probability of wiretap links under composite fading",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("point", "evaluate the configured operating point"),
        ("sweep", "sweep one variable and write a CSV table"),
        ("validate", "run internal consistency checks"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common_arguments(p)
        if name == "validate":
            p.add_argument(
                "--level",
                choices=("fast", "full"),
                default="fast",
                help="fast: analytical cross-checks; full: adds Monte Carlo and slope fits",
            )
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; fold that into the config-error code.
        return 0 if not exc.code else 1
    try:
        if args.command == "point":
            return _cmd_point(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_validate(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GkSecrecyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
