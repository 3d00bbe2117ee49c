"""Command-line entry point: ``fracns {params,simulate,analyze,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 usage/config error, 3 blow-up abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .checkpoint import CheckpointError, read_checkpoint
from .config import ConfigError, load
from .criterion import DomainError, delta_max, gn_alpha, gradient_theta, solve_scaling, theta_p_identity
from .decay import derive_params
from .grid import to_physical
from .io import format_report, read_csv, write_csv
from .solver import BlowUpError
from .turbulence import (
    InsufficientDataError,
    ShellSpectrum,
    exceptional_set,
    fit_spectrum_model,
    flux_deviation_bound,
    gradient_magnitude,
    kappa_eps,
    lim_field,
    shell_spectrum,
    structure_functions,
    tail_fit,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BLOWUP = 0, 1, 2, 3

log = logging.getLogger("fracns")


def params_table(s: float, q: float, eta: float) -> str:
    p = solve_scaling(s, q)
    dp = derive_params(s, q, eta)
    tp, is_two = theta_p_identity(s, q)
    rows = [
        ("s", s),
        ("q", q),
        ("eta", eta),
        ("p", p),
        ("delta_0", delta_max(s, q)),
        ("theta", gradient_theta(q)),
        ("alpha", gn_alpha(q)),
        ("mu", dp.mu),
        ("gamma", dp.gamma),
        ("theta_p", tp),
        ("theta_p_equals_2", is_two),
    ]
    width = max(len(k) for k, _ in rows)
    lines = []
    for k, v in rows:
        val = str(v).lower() if isinstance(v, bool) else f"{v:.12g}"
        lines.append(f"{k:<{width}}  {val}")
    return "\n".join(lines) + "\n"


def cmd_params(args) -> int:
    try:
        sys.stdout.write(params_table(args.s, args.q, args.eta))
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .experiment import simulate

    try:
        cfg = load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = simulate(cfg, args.output, resume=args.resume)
    except BlowUpError as exc:
        print(f"blow-up abort at t={exc.t:.6g}: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (CheckpointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    last = result.records[-1]
    print(
        format_report(
            {
                "outdir": result.outdir,
                "samples": len(result.records),
                "t_final": last["t"],
                "energy_final": last["energy"],
                "criterion_integral": last["criterion_integral"],
                "energy_inequality_all": all(r["energy_inequality"] for r in result.records),
            }
        ),
        end="",
    )
    return EXIT_OK


def _spectrum_from_file(path: Path) -> ShellSpectrum:
    cols = read_csv(path)
    k = np.asarray(cols["k"], float)
    e = np.asarray(cols["e_k"], float)
    eps = float(cols["eps"][0]) if "eps" in cols else 0.0
    return ShellSpectrum(k, e, eps=eps)


def cmd_analyze(args) -> int:
    outdir = Path(args.output)
    report: dict = {}
    try:
        if args.spectrum_file and args.fit_spectrum:
            spec = _spectrum_from_file(Path(args.spectrum_file))
            fit = fit_spectrum_model(spec, args.k0, args.delta, k_max=args.k_max)
            report.update(fit_c_kolm=fit.c_kolm, fit_beta=fit.beta_t, fit_residual=fit.residual)
            print(format_report(report), end="")
            return EXIT_OK
        if args.checkpoint is None:
            print("error: a checkpoint path is required", file=sys.stderr)
            return EXIT_USAGE
        u, t = read_checkpoint(args.checkpoint)
    except CheckpointError as exc:
        print(f"checkpoint error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InsufficientDataError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report["t"] = t
    report["n"] = u.box.n
    everything = args.all
    try:
        spec = None
        if everything or args.spectra or args.flux or args.fit_spectrum:
            spec = shell_spectrum(u, args.nu, with_transfer=True)
            write_csv(outdir / "spectrum.csv", ["k", "e_k", "t_k", "pi_k"], zip(spec.k, spec.e_k, spec.t_k, spec.pi_k))
            report["shells_nonzero"] = int(np.count_nonzero(spec.e_k > 1e-30))
            report["eps"] = spec.eps
            report["transfer_sum"] = float(np.sum(spec.t_k))
        if (everything or args.flux) and spec is not None and spec.eps > 0:
            fr = flux_deviation_bound(spec.pi_k, spec.eps, args.k0, args.s, args.delta, spec.k)
            report["flux_empirical_c"] = fr.empirical_c
            report["flux_weight_exponent"] = fr.weight_exponent
        if everything or args.structure:
            orders = [float(p) for p in args.orders.split(",")]
            sf = structure_functions(to_physical(u), orders, args.max_r)
            write_csv(
                outdir / "structure.csv",
                ["r"] + [f"S_{p:g}" for p in sf.orders],
                ([r] + list(sf.s_p[:, i]) for i, r in enumerate(sf.r)),
            )
            report["structure_orders"] = args.orders
        if everything or args.lim is not None:
            r = args.lim if args.lim is not None else 1
            lim = lim_field(to_physical(u), r)
            report.update(lim_r=r, lim_max=float(lim.field.max()), lim_mean=float(lim.field.mean()))
            report["lim_degenerate"] = lim.degenerate
            np.save(outdir / f"lim_r{r}.npy", lim.field)
        if everything or args.exceptional is not None:
            frac = args.exceptional if args.exceptional is not None else 0.05
            g = gradient_magnitude(u)
            thr = float(np.quantile(g, 1.0 - frac))
            if thr > 0:
                _, measure = exceptional_set(g, thr)
                report.update(exceptional_threshold=thr, exceptional_fraction=measure)
                report["kappa_eps"] = kappa_eps(frac, args.delta)
                outside = g[g <= thr]
                report["grad_sup_outside"] = float(outside.max())
        if (everything or args.fit_spectrum) and spec is not None:
            try:
                fit = fit_spectrum_model(spec, args.k0, args.delta, k_max=args.k_max)
                report.update(fit_c_kolm=fit.c_kolm, fit_beta=fit.beta_t, fit_residual=fit.residual)
            except InsufficientDataError as exc:
                report["fit_error"] = str(exc)
        if everything or args.tail:
            g = gradient_magnitude(u).ravel()
            if np.ptp(g) > 0:
                g = g / g.mean()
            tf = tail_fit(g, args.delta)
            report.update(tail_c=tf.c, tail_rate=tf.c_rate, tail_residual=tf.residual, tail_degenerate=tf.degenerate)
    except (ValueError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outdir.mkdir(parents=True, exist_ok=True)
    text = format_report(report)
    (outdir / "analysis.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suite

    if args.suite != "all" and args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {sorted(SUITES) + ['all']}", file=sys.stderr)
        return EXIT_USAGE
    if args.suite == "commutator" and args.seed is not None:
        from .verify import commutator_checks

        checks = commutator_checks(seed=args.seed)
    else:
        checks = run_suite(args.suite)
    passed = all(c["passed"] for c in checks)
    summary = {"suite": args.suite, "passed": passed, "checks": checks}
    text = json.dumps(summary, indent=2, default=float)
    if args.json:
        Path(args.json).write_text(text)
    print(text)
    return EXIT_OK if passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracns", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print the regularity/decay parameter chain")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--eta", type=float, default=0.01)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("simulate", help="run a configured simulation")
    p.add_argument("config")
    p.add_argument("-o", "--output", default=None, help="run directory (overrides outputs.directory)")
    p.add_argument("--resume", default=None, help="checkpoint to resume from")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="offline analysis of a checkpoint")
    p.add_argument("checkpoint", nargs="?")
    p.add_argument("-o", "--output", default="analysis")
    p.add_argument("--all", action="store_true")
    p.add_argument("--spectra", action="store_true")
    p.add_argument("--flux", action="store_true")
    p.add_argument("--structure", action="store_true")
    p.add_argument("--orders", default="2,3,4")
    p.add_argument("--max-r", type=int, default=4)
    p.add_argument("--lim", type=int, default=None, metavar="R")
    p.add_argument("--exceptional", type=float, default=None, metavar="FRACTION")
    p.add_argument("--fit-spectrum", action="store_true")
    p.add_argument("--spectrum-file", default=None, help="CSV with k,e_k[,eps] columns to fit instead of a checkpoint")
    p.add_argument("--tail", action="store_true")
    p.add_argument("--nu", type=float, default=0.1)
    p.add_argument("--k0", type=float, default=1.0)
    p.add_argument("--k-max", type=float, default=None)
    p.add_argument("--s", type=float, default=0.75)
    p.add_argument("--delta", type=float, default=0.05)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run an identity/inequality suite")
    p.add_argument("suite")
    p.add_argument("--seed", type=int, default=None, help="fresh seed for the commutator ensemble")
    p.add_argument("--json", default=None, help="also write the summary to this file")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
