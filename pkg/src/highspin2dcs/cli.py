"""Command-line front end.

Every subcommand prints a JSON summary on stdout and writes its artifacts
(CSV tables, JSON summaries, a config echo) under ``--out``.  Failures print
a JSON error object on stderr and exit non-zero.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .encoding import code_map, encoded_spin
from .exact import fidelity, model_eigen
from .presets import PRESETS, preset, preset_command
from .reporting import ConfigError, RunConfig, ScalingTable, powerlaw_fit, read_csv, to_jsonable, write_csv, write_json

COMMANDS = (
    "encode",
    "hamiltonian",
    "eigen",
    "ground",
    "evolve",
    "onedcs",
    "twodcs",
    "susceptibility",
    "meanfield",
    "resources",
)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named workload")
    p.add_argument("--ci", action="store_true", help="coarse delay grid for 2D presets")
    p.add_argument("--engine", choices=["avqds", "ed", "trotter", "meanfield"])
    p.add_argument("--encoding", choices=["std", "gray"])
    p.add_argument("--out", type=Path, help="artifact directory")
    p.add_argument("--threads", type=int, default=1, help="worker processes for delay scans")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="highspin2dcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    p = sub.add_parser("encode", parents=[common], help="Pauli expansion of single-site spin operators")
    p.add_argument("--spin", default=None, help="spin magnitude, e.g. 3/2")
    sub.add_parser("hamiltonian", parents=[common], help="qubit Hamiltonian terms and Trotter cost")
    sub.add_parser("eigen", parents=[common], help="exact spectrum of H0")
    sub.add_parser("ground", parents=[common], help="variational ground state")
    sub.add_parser("evolve", parents=[common], help="M^z(t) under the configured drive")
    sub.add_parser("onedcs", parents=[common], help="single-pulse spectrum")
    p = sub.add_parser("twodcs", parents=[common], help="two-pulse nonlinear spectrum")
    p.add_argument("--input", type=Path, help="reuse a nonlinear-surface CSV written by a run with the same config")
    p = sub.add_parser("susceptibility", parents=[common], help="eigenstate expansion of chi(2), chi(3)")
    p.add_argument("--fmax", type=float, default=0.5)
    p.add_argument("--points", type=int, default=201)
    p = sub.add_parser("meanfield", parents=[common], help="mean-field counterpart of onedcs/twodcs")
    p.add_argument("--two-d", action="store_true", help="run the delay scan instead of a single pulse")
    p = sub.add_parser("resources", parents=[common], help="CNOT tables and power-law fits across spins")
    p.add_argument("--spins", default="1/2,1,3/2,2,5/2")
    p.add_argument("--evolve", action="store_true", help="also run AVQDS for saturated counts")
    p.add_argument("--t-final", type=float, default=None)
    return parser


def _config(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    if args.preset:
        cfg = preset(args.preset, ci=args.ci)
    elif args.config:
        cfg = RunConfig.load(args.config)
    else:
        cfg = RunConfig()
    over = {}
    if args.engine:
        over["engine"] = {"name": args.engine}
    if args.encoding:
        over["model"] = {"encoding": args.encoding}
    if args.out:
        over["output"] = {"dir": str(args.out)}
    return cfg.with_overrides(**over) if over else cfg


def _emit(cfg: RunConfig, name: str, summary: dict) -> dict:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "config.json", cfg.echo())
    write_json(out / f"{name}.json", summary, cfg.hash)
    return summary


# --- subcommands -------------------------------------------------------------------------


def cmd_encode(args, cfg: RunConfig) -> dict:
    spin = Fraction(args.spin) if args.spin else Fraction(cfg.data["model"]["s"])
    enc = cfg.data["model"]["encoding"]
    ops = encoded_spin(spin, enc)
    d = int(2 * spin + 1)
    summary = {
        "spin": str(spin),
        "encoding": enc,
        "code_map": {str(k): v for k, v in code_map(enc, d).items()},
        "operators": {k: [[str(t.string.text()), complex(t.coefficient).real, complex(t.coefficient).imag] for t in op.terms] for k, op in ops.items()},
    }
    rows = [(k, t.string.text(), t.coefficient) for k, op in ops.items() for t in op.terms]
    write_csv(
        cfg.out_dir / "encoding.csv",
        {"component": np.array(["xyz".index(r[0]) for r in rows]), "coeff": np.array([r[2] for r in rows], dtype=complex)},
        {"strings": [r[1] for r in rows], "spin": str(spin), "encoding": enc, "component_labels": "0=x,1=y,2=z"},
        cfg.hash,
    )
    return _emit(cfg, "encode", summary)


def cmd_hamiltonian(args, cfg: RunConfig) -> dict:
    spec = cfg.model
    ops = spec.operators
    h0, hz = ops.H0, ops.Hz
    full = ops.full(1.0)
    strings = sorted({t.string for t in h0.terms} | {t.string for t in hz.terms}, key=lambda s: s.sort_key())
    c0 = h0.as_dict()
    cz = hz.as_dict()
    write_csv(
        cfg.out_dir / "hamiltonian.csv",
        {
            "h0": np.array([c0.get(s, 0.0) for s in strings], dtype=complex),
            "hz": np.array([cz.get(s, 0.0) for s in strings], dtype=complex),
            "weight": np.array([s.weight for s in strings]),
        },
        {"strings": [s.text() for s in strings]},
        cfg.hash,
    )
    summary = {
        "model": spec.as_dict(),
        "n_qubits": spec.n_qubits,
        "terms_h0": len(h0),
        "terms_h0_plus_zeeman": len(strings),
        "terms_driven_hamiltonian": len(full),
        "weight_histogram": {str(k): v for k, v in h0.weight_histogram().items()},
        "trotter_cnots_per_step": full.trotter_cnots(),
    }
    return _emit(cfg, "hamiltonian", summary)


def cmd_eigen(args, cfg: RunConfig) -> dict:
    spec = cfg.model
    eig = model_eigen(spec)
    e = eig.physical_energies
    write_csv(cfg.out_dir / "eigen.csv", {"index": np.arange(e.size), "energy": e, "gap": e - e[0]}, {}, cfg.hash)
    summary = {
        "model": spec.as_dict(),
        "n_physical": eig.n_physical,
        "ground_energy": eig.ground_energy,
        "gap": eig.gap(1),
        "omega_af": eig.omega_af,
        "energies": e,
    }
    return _emit(cfg, "eigen", summary)


def _ground(cfg: RunConfig):
    from .ground_state import prepare_ground_state, verify_spin

    spec = cfg.model
    eng = cfg.data["engine"]
    res = prepare_ground_state(spec, eng.get("ground", "adapt-vqe"), eng.get("ground_pool"))
    psi = res.ansatz.prepare()
    info = {
        "method": eng.get("ground", "adapt-vqe"),
        "energy": res.energy,
        "iterations": res.iterations,
        "n_params": res.ansatz.n_params,
        "cnots": res.ansatz.cnot_count(),
        "generators": [g.text() for g in res.ansatz.generators],
        "spin_check": verify_spin(psi, spec),
    }
    if spec.n_qubits <= 14:
        info["infidelity"] = 1.0 - fidelity(psi, model_eigen(spec).ground_state)
    return res, info


def cmd_ground(args, cfg: RunConfig) -> dict:
    res, info = _ground(cfg)
    write_csv(cfg.out_dir / "ground_history.csv", {"iteration": np.arange(len(res.history)), "energy": np.array(res.history)}, {}, cfg.hash)
    return _emit(cfg, "ground", info)


def _simulate(cfg: RunConfig, protocol, workers: int = 1):
    from .spectroscopy import simulate_magnetization

    spec = cfg.model
    sp = cfg.spectroscopy
    kw = {"dt_out": sp["dt_out"]}
    if cfg.engine == "avqds":
        res, _ = _ground(cfg)
        kw.update(ansatz=res.ansatz, config=cfg.evolution, track_exact=spec.n_qubits <= 14)
    if cfg.engine == "trotter":
        kw["trotter_dt"] = cfg.data["engine"]["trotter_dt"]
    return simulate_magnetization(spec, protocol, sp["t_final"], cfg.engine, **kw)


def _trace_columns(run) -> tuple[dict, dict]:
    cols = {"time": run.series.times, "mz": run.series.values}
    summary = {}
    rec = run.info.get("record")
    if rec is not None:
        a = rec.arrays()
        for key in ("dt", "n_theta", "cnots", "l2"):
            cols[key] = a[key]
        if rec.infidelity:
            cols["mz_exact"] = a["mz_exact"]
            cols["infidelity"] = a["infidelity"]
        summary.update(rec.summary())
    for key in ("cnots_per_step", "n_steps", "cumulative_cnots"):
        if key in run.info:
            summary[key] = run.info[key]
    return cols, summary


def cmd_evolve(args, cfg: RunConfig) -> dict:
    run = _simulate(cfg, cfg.protocol)
    cols, summary = _trace_columns(run)
    write_csv(cfg.out_dir / "trace.csv", cols, {"engine": cfg.engine}, cfg.hash)
    summary.update({"engine": cfg.engine, "model": cfg.model.as_dict(), "final_mz": float(run.series.values[-1])})
    return _emit(cfg, "evolve", summary)


def _onedcs(cfg: RunConfig, name: str) -> dict:
    from .spectroscopy import _grid_spacing, find_peaks_1d, harmonic_ratios, transform_1d

    spec = cfg.model
    run = _simulate(cfg, cfg.protocol)
    cols, summary = _trace_columns(run)
    write_csv(cfg.out_dir / "trace.csv", cols, {"engine": cfg.engine}, cfg.hash)
    series = run.series
    dt = _grid_spacing(series.times)
    n = int(round((series.times[-1] - series.times[0]) / dt))
    uniform = series.resample(series.times[0] + dt * np.arange(n + 1))
    spectrum = transform_1d(uniform, cfg.window("window"), cfg.spectroscopy["padding"])
    write_csv(cfg.out_dir / "spectrum.csv", {"freq": spectrum.freqs, "amplitude": spectrum.amplitude}, {"bin_width": spectrum.bin_width}, cfg.hash)
    f_af = model_eigen(spec).omega_af
    summary.update(
        {
            "engine": cfg.engine,
            "model": spec.as_dict(),
            "omega_af": f_af,
            "bin_width": spectrum.bin_width,
            "peaks": find_peaks_1d(spectrum)[:10],
            "harmonic_ratios": harmonic_ratios(spectrum.freqs, spectrum.amplitude, f_af, 5),
        }
    )
    return _emit(cfg, name, summary)


def cmd_onedcs(args, cfg: RunConfig) -> dict:
    return _onedcs(cfg, "onedcs")


def _twodcs(cfg: RunConfig, name: str, workers: int, reuse: Path | None = None) -> dict:
    from .spectroscopy import NonlinearSurface, find_peaks_2d, harmonic_ratios, nonlinear_response, slice_spectrum, transform_2d

    spec = cfg.model
    sp = cfg.spectroscopy
    pulses = cfg.pulses
    p1 = pulses[0][0]
    p2 = pulses[1][0] if len(pulses) > 1 else None
    if reuse is not None:
        meta, cols = read_csv(reuse, expected_hash=cfg.hash)
        times = np.array(meta["times"])
        taus = np.array(meta["taus"])
        surface = NonlinearSurface(times, taus, cols["m_nl"].reshape(times.size, taus.size), np.zeros(times.size))
    else:
        kw = {}
        if cfg.engine == "avqds":
            res, _ = _ground(cfg)
            kw.update(ansatz=res.ansatz, config=cfg.evolution)
        surface = nonlinear_response(spec, p1, p2, cfg.taus, cfg.engine, sp["t_final"], workers, **kw)
        write_csv(
            cfg.out_dir / "surface.csv",
            {"m_nl": surface.values.ravel()},
            {"times": surface.times, "taus": surface.taus, "layout": "row-major (t, tau)"},
            cfg.hash,
        )
    spectrum = transform_2d(surface.times, surface.taus, surface.values, cfg.window("t_window"), cfg.window("tau_window"), sp["padding"])
    ft, fu = np.meshgrid(spectrum.f_t, spectrum.f_tau, indexing="ij")
    write_csv(
        cfg.out_dir / "spectrum2d.csv",
        {"f_t": ft.ravel(), "f_tau": fu.ravel(), "amplitude": spectrum.amplitude.ravel()},
        {"shape": list(spectrum.amplitude.shape), "bin_widths": list(spectrum.bin_widths)},
        cfg.hash,
    )
    f_af = model_eigen(spec).omega_af
    summary = {
        "engine": cfg.engine,
        "model": spec.as_dict(),
        "omega_af": f_af,
        "n_tau": int(surface.taus.size),
        "bin_widths": list(spectrum.bin_widths),
        "peaks": [(a, b, c, a / f_af, b / f_af) for a, b, c in find_peaks_2d(spectrum, 0.02)[:12]],
    }
    if "slice_tau" in sp:
        sl = slice_spectrum(surface, sp["slice_tau"], cfg.window("t_window"), sp["padding"])
        write_csv(cfg.out_dir / "slice.csv", {"freq": sl.freqs, "amplitude": sl.amplitude}, {"tau": sp["slice_tau"]}, cfg.hash)
        summary["slice_harmonic_ratios"] = harmonic_ratios(sl.freqs, sl.amplitude, f_af, 7)
    return _emit(cfg, name, summary)


def cmd_twodcs(args, cfg: RunConfig) -> dict:
    return _twodcs(cfg, "twodcs", args.threads, args.input)


def cmd_susceptibility(args, cfg: RunConfig) -> dict:
    from .susceptibility import chi2_2d, chi3_2d, chi_1d, dipole_data

    spec = cfg.model
    eta = cfg.spectroscopy["eta"]
    eig = model_eigen(spec)
    data = dipole_data(eig, spec.operators.Hz, spec.n_sites)
    f = np.linspace(-args.fmax, args.fmax, args.points)
    fp = f[f >= 0]
    grids = {
        "chi2": chi2_2d(data, fp, f, eta),
        "chi3_t_tau_0": chi3_2d(data, fp, f, "t,tau,0", eta),
        "chi3_t_0_tau": chi3_2d(data, fp, f, "t,0,tau", eta),
    }
    ft, fu = np.meshgrid(fp, f, indexing="ij")
    for name, g in grids.items():
        write_csv(cfg.out_dir / f"{name}.csv", {"f_t": ft.ravel(), "f_tau": fu.ravel(), "value": g.values.ravel()}, {"eta": eta}, cfg.hash)
    one = {f"chi{o}": chi_1d(data, fp, o, eta).values for o in (1, 2, 3)}
    write_csv(cfg.out_dir / "chi_1d.csv", {"f": fp, **one}, {"eta": eta}, cfg.hash)
    m3 = max(grids["chi3_t_tau_0"].magnitude().max(), grids["chi3_t_0_tau"].magnitude().max())
    summary = {
        "model": spec.as_dict(),
        "omega_af": eig.omega_af,
        "eta": eta,
        "max_abs": {k: float(g.magnitude().max()) for k, g in grids.items()},
        "chi2_over_chi3": float(grids["chi2"].magnitude().max() / m3) if m3 > 0 else None,
    }
    return _emit(cfg, "susceptibility", summary)


def cmd_meanfield(args, cfg: RunConfig) -> dict:
    from .meanfield import canting_angle, mf_ground_state

    cfg = cfg.with_overrides(engine={"name": "meanfield"})
    spec = cfg.model
    st = mf_ground_state(spec)
    extra = {
        "canting_angle": canting_angle(spec.J, spec.D, spec.K_a, spec.K_c),
        "ground_moments": st.moments,
    }
    summary = _twodcs(cfg, "meanfield", args.threads) if args.two_d else _onedcs(cfg, "meanfield")
    summary.update(extra)
    return _emit(cfg, "meanfield", summary)


def cmd_resources(args, cfg: RunConfig) -> dict:
    from .ground_state import prepare_ground_state

    spins = [Fraction(s) for s in args.spins.split(",")]
    tables = {}
    rows = []
    for enc in ("gray", "std"):
        init, sat = ScalingTable(), ScalingTable()
        for s in spins:
            c = cfg.with_overrides(model={"s": str(s), "encoding": enc})
            spec = c.model
            gs = prepare_ground_state(spec, "adapt-vqe")
            row = {
                "encoding": enc,
                "s": str(s),
                "n_qubits": spec.n_qubits,
                "terms": len(spec.operators.full(1.0)),
                "trotter_cnots_per_step": spec.operators.full(1.0).trotter_cnots(),
                "initial_cnots": gs.ansatz.cnot_count(),
            }
            init.add(spec.n_qubits, max(gs.ansatz.cnot_count(), 1), enc)
            if args.evolve:
                from .avqds import evolve

                t_final = args.t_final or c.spectroscopy["t_final"]
                rec, final = evolve(gs.ansatz, spec.operators, c.protocol, c.evolution, t_final)
                row["saturated_cnots"] = final.cnot_count()
                row["steps"] = rec.n_steps
                sat.add(spec.n_qubits, max(final.cnot_count(), 1), enc)
            rows.append(row)
        tables[enc] = {"initial": init}
        if args.evolve:
            tables[enc]["saturated"] = sat
    fits = {}
    for enc, t in tables.items():
        for kind, table in t.items():
            if len(set(table.x)) >= 3:
                fit = powerlaw_fit(_dedupe(table))
                fits[f"{enc}_{kind}"] = {"alpha": fit.alpha, "beta": fit.beta, "r_squared": fit.r_squared}
    keys = sorted({k for r in rows for k in r})
    write_csv(
        cfg.out_dir / "resources.csv",
        {k: np.array([r.get(k, -1) for r in rows]) for k in keys if k not in ("encoding", "s")},
        {"encoding": [r["encoding"] for r in rows], "s": [r["s"] for r in rows]},
        cfg.hash,
    )
    return _emit(cfg, "resources", {"rows": rows, "fits": fits})


def _dedupe(table: ScalingTable) -> ScalingTable:
    """Average rows that share an ``x`` (spins with equal qubit counts)."""
    out = ScalingTable()
    for x in sorted(set(table.x)):
        ys = [y for xx, y, _ in table.rows if xx == x]
        out.add(int(x), float(np.mean(ys)))
    return out


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.preset and args.command in ("onedcs", "twodcs") and preset_command(args.preset) != args.command:
            raise ConfigError(f"preset {args.preset} belongs to {preset_command(args.preset)}")
        summary = HANDLERS[args.command](args, cfg)
        print(json.dumps(to_jsonable(summary), sort_keys=True, indent=2))
        return 0
    except Exception as exc:  # noqa: BLE001
        err = {
            "error": type(exc).__name__,
            "message": str(exc),
            "command": args.command,
        }
        if not isinstance(exc, (ConfigError, ValueError, KeyError)):
            err["traceback"] = traceback.format_exc().splitlines()[-3:]
        print(json.dumps(err), file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
