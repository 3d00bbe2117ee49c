"""Simulation pipeline: solver + monitors + persistence for one configured run."""

from __future__ import annotations

import json
import logging
import subprocess
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .checkpoint import decode, encode, read_checkpoint, write_checkpoint
from .config import RunConfig
from .criterion import CriterionMonitor, smallness_check, theta_p_identity
from .decay import DecayMonitor
from .grid import BoxSpec, to_physical
from .io import write_csv, write_records
from .solver import BlowUpError, make_initial, run
from .turbulence import shell_spectrum, structure_functions

log = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = [
    "t",
    "energy",
    "dissipation_integral",
    "energy_balance",
    "energy_inequality",
    "frac_lq",
    "criterion_integrand",
    "criterion_integral",
    "ys_l2",
    "envelope",
    "comparison_ode",
]


@dataclass
class RunResult:
    records: list[dict]
    outdir: Path
    status: str
    final_checkpoint: Path | None


def version_stamp() -> str:
    try:
        rev = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if rev.returncode == 0 and rev.stdout.strip():
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


class _FieldWriter:
    """Monitor writing per-sample spectra and structure functions."""

    def __init__(self, cfg: RunConfig, outdir: Path):
        self.cfg = cfg
        self.outdir = outdir

    def __call__(self, snap) -> dict:
        o = self.cfg.outputs
        tag = f"{snap.step_index:06d}"
        if o.emit_spectra:
            spec = shell_spectrum(snap.u, snap.nu, with_transfer=True)
            write_csv(
                self.outdir / "spectra" / f"spectrum_{tag}.csv",
                ["k", "e_k", "t_k", "pi_k"],
                zip(spec.k, spec.e_k, spec.t_k, spec.pi_k),
            )
        if o.emit_structure:
            sf = structure_functions(to_physical(snap.u), o.structure_orders, o.structure_max_r)
            cols = ["r"] + [f"S_{p:g}" for p in sf.orders]
            write_csv(
                self.outdir / "structure" / f"structure_{tag}.csv",
                cols,
                ([r] + list(sf.s_p[:, i]) for i, r in enumerate(sf.r)),
            )
        return {}


def simulate(cfg: RunConfig, outdir: str | Path | None = None, resume: str | Path | None = None) -> RunResult:
    """Run the configured experiment and write its artefacts.

    Writes ``diagnostics.csv``, ``spectra/``, ``structure/``, ``checkpoints/``
    and ``manifest.json``.  Raises :class:`BlowUpError` after the diagnostic
    trail has been written.
    """
    cfg.validate()
    outdir = Path(outdir or cfg.outputs.directory)
    outdir.mkdir(parents=True, exist_ok=True)
    ckdir = outdir / "checkpoints"
    ckdir.mkdir(exist_ok=True)
    box = BoxSpec(cfg.grid.n)
    scfg = cfg.solver_config()
    params = cfg.criterion_params()
    c = cfg.criterion

    if resume is not None:
        u0, t0 = read_checkpoint(resume)
        if u0.box.n != box.n:
            raise ValueError(f"checkpoint grid n={u0.box.n} does not match config n={box.n}")
    else:
        u0, t0 = make_initial(cfg.init_spec(), box), 0.0

    small, lhs, rhs = smallness_check(u0, params, c.c0)
    theta_p, theta_p_is_two = theta_p_identity(c.s, c.q)
    last = _LastState()
    monitors = [CriterionMonitor(params), DecayMonitor(c.s, c.q, c.eta, c.c_fit), _FieldWriter(cfg, outdir), last]

    every = cfg.outputs.checkpoint_every

    def on_step(state):
        if every and state.step_index % every == 0 and state.step_index < scfg.n_steps:
            data = encode(state.u, state.t)
            (ckdir / f"ckpt_{state.step_index:06d}.fns").write_bytes(data)
            return decode(data)[0]
        return None

    status = "ok"
    records: list[dict]
    final = None
    try:
        records = run(u0, scfg, monitors, t0=t0, on_step=on_step)
    except BlowUpError as exc:
        status = "blowup"
        records = exc.records
        log.error("blow-up: %s", exc)
        blowup = exc
    else:
        blowup = None
        final = ckdir / "final.fns"
        write_checkpoint(final, last.u, records[-1]["t"])

    write_records(outdir / "diagnostics.csv", records, DIAGNOSTIC_COLUMNS)
    manifest = {
        "version": version_stamp(),
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "resume_from": str(resume) if resume else None,
        "t_start": t0,
        "status": status,
        "samples": len(records),
        "smallness": {"holds": small, "lhs": lhs, "rhs": rhs, "c0": c.c0},
        "p": params.p,
        "theta_p": theta_p,
        "theta_p_equals_2": theta_p_is_two,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    (outdir / "config.toml").write_text(cfg.dumps())
    if blowup is not None:
        raise blowup
    return RunResult(records, outdir, status, final)


class _LastState:
    """Keeps the most recent sampled state for the final checkpoint."""

    def __init__(self):
        self.u = None

    def __call__(self, snap) -> dict:
        self.u = snap.u
        return {}
