"""``collapse-bound`` command-line interface.

    collapse-bound <subcommand> --config <path> --out <dir> [--bounds <csv>]

Exit codes: 0 success, 1 configuration error, 2 numeric failure, 3 I/O error.
"""
import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from importlib import resources

import numpy as np

from . import __version__, csl, electromech, noise
from ._jit import backend as jit_backend
from .config import (ExperimentConfig, default_config_text, env_tol_scale, env_workers,
                     load_config)
from .dynamics import (CycleConfig, IntegratorSpec, ModeRegister, NoiseRates, System,
                       bose_occupation, cooling_protocol, protocol_schedule,
                       swap_efficiency, swap_window, trajectory_rows)
from .errors import (CollapseBoundError, ConfigError, ConvergenceError, DomainError,
                     IntegrationError, ScanError)
from .numerics.quadrature import DEFAULT_QUADRATURE

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class BoundsFileError(ConfigError):
    pass


# ---------------------------------------------------------------- output helpers

class Outputs:
    """Collects artifacts in memory; written together with the manifest."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.files = {}

    def fmt(self, v):
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return self.cfg.output.float_format % float(v)
        return str(v)

    def csv(self, name, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([self.fmt(v) for v in row])
        self.files[name] = buf.getvalue()

    def json(self, name, obj):
        self.files[name] = json.dumps(_jsonable(obj), indent=2, sort_keys=True,
                                      allow_nan=True) + "\n"

    def text(self, name, content):
        self.files[name] = content

    def write(self, out_dir, subcommand):
        os.makedirs(out_dir, exist_ok=True)
        artifacts = []
        for name in sorted(self.files):
            data = self.files[name].encode("utf-8")
            with open(os.path.join(out_dir, name), "wb") as fh:
                fh.write(data)
            artifacts.append({"path": name, "sha256": hashlib.sha256(data).hexdigest(),
                              "bytes": len(data)})
        manifest = {
            "tool": "collapse-bound",
            "version": __version__,
            "subcommand": subcommand,
            "config_sha256": self.cfg.sha256(),
            "artifacts": artifacts,
        }
        with open(os.path.join(out_dir, "manifest.json"), "wb") as fh:
            fh.write((json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8"))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


# ---------------------------------------------------------------- model builders

def _quadrature():
    return DEFAULT_QUADRATURE.scaled(env_tol_scale())


def _integrator(cfg):
    s = env_tol_scale()
    return IntegratorSpec(rtol=cfg.simulation.rtol * s, atol=cfg.simulation.atol * s)


def _geometry(cfg, mode_number=None):
    r = cfg.resonator
    geom = csl.ResonatorGeometry.from_height(r.radius, r.height, r.mode_number, r.density,
                                             r.frequency)
    return geom if mode_number is None else geom.with_mode_number(mode_number)


def _piezo(cfg):
    p = cfg.piezo
    return electromech.PiezoQubitParams(p.d33, p.c33, p.E0, p.electrode_diameter,
                                        p.cavity_diameter, p.v_l, p.v_t, tuple(p.qubit_band))


def _register(cfg):
    params = _piezo(cfg)
    modes = [electromech.make_mode(l, m, cfg.resonator.height, params)
             for l, m in cfg.simulation.register]
    return ModeRegister.from_modes(modes, cfg.simulation.fock_cutoff)


def _rates(cfg, Gamma_QP=None, n_dot_c=None):
    n = cfg.noise
    n_th = n.n_th
    if n_th is None:
        n_th = bose_occupation(cfg.resonator.frequency, n.temperature)
    return NoiseRates(n.gamma_q, n.gamma_phi, n.gamma_r,
                      n.Gamma_QP if Gamma_QP is None else Gamma_QP, n.Gamma_P, n_th,
                      n.n_dot_c if n_dot_c is None else n_dot_c)


def _readout(cfg):
    ro = cfg.readout
    a = ro.a
    if a is None:
        a = noise.threshold_for_true_positive(ro.snr, ro.target_true_positive)
    return noise.ReadoutParams(ro.snr, a, ro.epsilon_drive, ro.g_readout, ro.Delta, ro.kappa,
                               ro.n_bar, ro.measurement_time_tau)


def _map(func, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2 * workers:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


def _cross_section_at(geom, mass_model, spec, r_c):
    return csl.cross_section(geom, r_c, mass_model, spec)


# ---------------------------------------------------------------- subcommands

def cmd_cross_section(cfg, out: Outputs, workers):
    spec = _quadrature()
    geom = _geometry(cfg)
    single = geom.with_mode_number(1)
    mm = cfg.resonator.mass_model
    rc = cfg.collapse.r_c
    D_single = csl.cross_section(single, rc, mm, spec)
    D_l = csl.cross_section(geom, rc, mm, spec)
    params = csl.CollapseParams(cfg.collapse.lambda_c, rc, cfg.collapse.omega_cutoff)
    lam_opt = csl.optimal_wavelength(rc, geom, n_points=cfg.collapse.lambda_scan_points,
                                     ratio_range=tuple(cfg.collapse.lambda_scan_ratio),
                                     mass_model=mm, spec=spec)
    grid = cfg.collapse.r_c_grid.values()
    d_vals = _map(partial(_cross_section_at, geom, mm, spec), grid, workers)
    d1_vals = _map(partial(_cross_section_at, single, mm, spec), grid, workers)
    out.csv("cross_section.csv", ["r_c_m", "D_at_l", "D_single_node"],
            zip(grid, d_vals, d1_vals))
    zpm = csl.zero_point_motion(geom, geom.omega, mm)
    out.json("summary.json", {
        "r_c_m": rc,
        "mode_number": geom.mode_number,
        "wavelength_m": geom.wavelength,
        "mass_model": mm,
        "effective_mass_kg": zpm.effective_mass,
        "D_single_node": D_single,
        "D_at_l": D_l,
        "diffusion_constant_per_m2": csl.diffusion_constant(geom, rc, spec),
        "optimal_lambda": lam_opt,
        "optimal_lambda_over_r_c": lam_opt / rc,
        "n_dot_c_per_s": csl.heating_rate(params, D_l, cfg.resonator.frequency),
        "colour_factor": csl.colour_factor(cfg.collapse.omega_cutoff, cfg.resonator.frequency),
        "grid_points": len(grid),
    })


def cmd_coupling_map(cfg, out: Outputs, workers):
    params = _piezo(cfg)
    h = cfg.resonator.height
    two_pi = 2.0 * math.pi
    header = ["l", "m", "frequency_hz", "g_over_2pi_hz"]
    reg = [electromech.make_mode(l, m, h, params) for l, m in cfg.simulation.register]
    out.csv("register_modes.csv", header,
            [(md.l, md.m, md.omega / two_pi, md.g / two_pi) for md in reg])
    band = electromech.enumerate_modes(params, h)
    out.csv("band_modes.csv", header,
            [(md.l, md.m, md.omega / two_pi, md.g / two_pi) for md in band])
    coupled = [md for md in band if md.g > 0]
    out.json("summary.json", {
        "qubit_band_hz": list(params.qubit_band),
        "n_modes_in_band": len(band),
        "n_coupled_modes_in_band": len(coupled),
        "free_spectral_range_hz": params.v_l / (2.0 * h),
        "register": [{"l": md.l, "m": md.m, "frequency_hz": md.omega / two_pi,
                      "g_over_2pi_hz": md.g / two_pi, "beta": md.beta} for md in reg],
    })


def _swap(cfg, system):
    return swap_efficiency(system, n_samples=cfg.simulation.swap_samples, spec=_integrator(cfg))


def cmd_simulate_swap(cfg, out: Outputs, workers):
    reg = _register(cfg)
    system = System(reg, _rates(cfg, n_dot_c=0.0), backend=cfg.simulation.backend)
    res = _swap(cfg, system)
    g = abs(reg.couplings[0])
    if cfg.output.trajectory_csv:
        header, rows = trajectory_rows(res.trajectory, reg.labels)
        header.insert(1, "g_t")
        rows = [[r[0], g * r[0], *r[1:]] for r in rows]
        out.csv("swap_trajectory.csv", header, rows)
    out.json("summary.json", {
        "eta_swap": res.efficiency,
        "swap_time_s": res.time,
        "g_t_at_swap": g * res.time,
        "window_s": swap_window(reg),
        "hilbert_dimension": reg.dimension,
        "max_trace_error": float(np.max(res.trajectory.trace_error)),
        "max_hermiticity_defect": float(np.max(res.trajectory.hermiticity)),
        "min_eigenvalue": float(np.nanmin(res.trajectory.min_eigenvalue))
        if np.any(np.isfinite(res.trajectory.min_eigenvalue)) else None,
    })


def _cooling(cfg, system, Gamma_QP, swap_time):
    rates = _rates(cfg, Gamma_QP=Gamma_QP, n_dot_c=0.0)
    sys2 = System(system.register, rates, backend=cfg.simulation.backend)
    return cooling_protocol(sys2, cfg.simulation.n_swaps, swap_time=swap_time,
                            initial_excited=cfg.simulation.cooling_initial_excited,
                            spec=_integrator(cfg))


def cmd_simulate_cooling(cfg, out: Outputs, workers):
    reg = _register(cfg)
    system = System(reg, _rates(cfg, n_dot_c=0.0), backend=cfg.simulation.backend)
    swap = _swap(cfg, system)
    cur = _cooling(cfg, system, cfg.noise.Gamma_QP, swap.time)
    imp = _cooling(cfg, system, cfg.noise.Gamma_QP_improved, swap.time)
    rows = [(i, a, b) for i, (a, b) in enumerate(zip(cur.occupations, imp.occupations))]
    out.csv("cooling.csv", ["swap_index", "excited_current", "excited_improved"], rows)
    out.json("summary.json", {
        "swap_time_s": swap.time,
        "eta_swap": swap.efficiency,
        "current": {"Gamma_QP_hz": cfg.noise.Gamma_QP, "per_swap": cur.occupations,
                    "floor": cur.floor, "saturation": cur.saturation},
        "improved": {"Gamma_QP_hz": cfg.noise.Gamma_QP_improved, "per_swap": imp.occupations,
                     "floor": imp.floor, "saturation": imp.saturation},
    })


def _heating(cfg):
    geom = _geometry(cfg)
    D = csl.cross_section(geom, cfg.collapse.r_c, cfg.resonator.mass_model, _quadrature())
    params = csl.CollapseParams(cfg.collapse.lambda_c, cfg.collapse.r_c, cfg.collapse.omega_cutoff)
    return D, csl.heating_rate(params, D, cfg.resonator.frequency)


def cmd_simulate_protocol(cfg, out: Outputs, workers):
    D, n_dot = _heating(cfg)
    reg = _register(cfg)
    rates = _rates(cfg, n_dot_c=n_dot)
    eta_swap = cfg.simulation.eta_swap
    swap_time = None
    if eta_swap is None:
        res = _swap(cfg, System(reg, _rates(cfg, n_dot_c=0.0), backend=cfg.simulation.backend))
        eta_swap, swap_time = res.efficiency, res.time
    if swap_time is None:
        swap_time = 0.5 * swap_window(reg)
    ro = _readout(cfg)
    eta_disp = noise.true_positive_prob(ro)
    band = electromech.enumerate_modes(_piezo(cfg), cfg.resonator.height)
    n_res = max(1, sum(1 for md in band if md.g > 0))
    cyc = CycleConfig(swap_time=swap_time, measure_time=ro.measurement_time_tau,
                      tune_time=cfg.simulation.tune_time, n_cycles=cfg.simulation.n_cycles,
                      init_swaps=cfg.simulation.init_swaps)
    sched = protocol_schedule(n_res, rates, cyc, eta_swap, eta_disp)
    out.csv("schedule.csv", ["kind", "mode", "start_s", "duration_s"],
            [(e.kind, e.mode, e.start, e.duration) for e in sched.events])
    t_formula = noise.measurement_time(n_dot, eta_swap, eta_disp, n_res)
    out.json("summary.json", {
        "D": D,
        "n_dot_c_per_s": n_dot,
        "eta_swap": eta_swap,
        "eta_disp": eta_disp,
        "n_resonators": n_res,
        "cycle_duration_s": sched.cycle_duration,
        "expected_true_positives_per_cycle": sched.expected_true_positives_per_cycle,
        "detection_rate_per_s": sched.detection_rate,
        "mean_time_to_detection_s": (1.0 / sched.detection_rate
                                     if sched.detection_rate > 0 else math.inf),
        "measurement_time_formula_s": t_formula,
        "event_counts": sched.counts(),
    })


def _qp_floors(cfg):
    s = cfg.simulation
    eta, cur, imp = s.eta_swap, s.qp_current, s.qp_improved
    if eta is not None and cur is not None and imp is not None:
        return eta, cur, imp
    reg = _register(cfg)
    system = System(reg, _rates(cfg, n_dot_c=0.0), backend=s.backend)
    swap = _swap(cfg, system)
    if eta is None:
        eta = swap.efficiency
    if cur is None:
        cur = _cooling(cfg, system, cfg.noise.Gamma_QP, swap.time).floor
    if imp is None:
        imp = _cooling(cfg, system, cfg.noise.Gamma_QP_improved, swap.time).floor
    return eta, cur, imp


def _budget(cfg, floors=None):
    D, _ = _heating(cfg)
    eta, cur, imp = floors or _qp_floors(cfg)
    ro = _readout(cfg)
    inp = noise.BudgetInputs(D=D, readout=ro, gamma_r=cfg.noise.gamma_r,
                             gamma_q=cfg.noise.gamma_q, frequency=cfg.resonator.frequency,
                             temperature=cfg.noise.temperature, eta_swap=eta,
                             eta_disp=noise.true_positive_prob(ro),
                             lambda_c_signal=cfg.collapse.lambda_c, qp_current=cur,
                             qp_improved=imp)
    budget = noise.assemble_budget(inp)
    budget.details["purcell_rate_filtered_hz"] = noise.purcell_rate(ro, cfg.readout.purcell_filter)
    return budget


def cmd_budget(cfg, out: Outputs, workers):
    budget = _budget(cfg)
    out.text("budget.txt", budget.to_table())
    out.json("budget.json", budget.to_dict())


def read_bounds(path):
    """Parse a published-bounds CSV (``#`` comments allowed).

    Columns: ``source,bound,r_c_m,lambda_c_per_s``; ``bound`` is ``lower`` or
    ``upper``. Raises :class:`BoundsFileError` naming the offending line.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    rows, header = [], None
    for lineno, raw in enumerate(lines, 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        cells = next(csv.reader([raw]))
        if header is None:
            header = [c.strip() for c in cells]
            if header != ["source", "bound", "r_c_m", "lambda_c_per_s"]:
                raise BoundsFileError(f"{path}:{lineno}: unexpected header {header}")
            continue
        if len(cells) != 4:
            raise BoundsFileError(f"{path}:{lineno}: expected 4 fields, got {len(cells)}")
        source, bound, rc, lam = (c.strip() for c in cells)
        if bound not in ("lower", "upper"):
            raise BoundsFileError(f"{path}:{lineno}: bound must be 'lower' or 'upper'")
        try:
            rc_v, lam_v = float(rc), float(lam)
        except ValueError:
            raise BoundsFileError(f"{path}:{lineno}: non-numeric r_c or lambda_c") from None
        if not (rc_v > 0 and lam_v > 0 and math.isfinite(rc_v) and math.isfinite(lam_v)):
            raise BoundsFileError(f"{path}:{lineno}: r_c and lambda_c must be positive")
        rows.append((source, bound, rc_v, lam_v))
    return rows


def default_bounds_path():
    return str(resources.files("collapse_bound").joinpath("data/published_bounds.csv"))


def cmd_exclusion(cfg, out: Outputs, workers, bounds_path=None):
    bounds = read_bounds(bounds_path or default_bounds_path())
    spec = _quadrature()
    geom = _geometry(cfg)
    floors = _qp_floors(cfg)
    eta = floors[0]
    budget = _budget(cfg, floors)
    occ_cur = budget.total("current").occupation
    occ_imp = budget.total("improved").occupation
    grid = cfg.collapse.r_c_grid.values()
    d_vals = _map(partial(_cross_section_at, geom, cfg.resonator.mass_model, spec), grid, workers)
    g_r = cfg.noise.gamma_r
    rows = []
    for rc, D in zip(grid, d_vals):
        if D > 0:
            rows.append((rc, D, noise.min_testable_rate(occ_cur, D, g_r, eta),
                         noise.min_testable_rate(occ_imp, D, g_r, eta)))
    out.csv("exclusion_curves.csv",
            ["r_c_m", "D", "lambda_min_current", "lambda_min_improved"], rows)
    # diffusion-constant trade-off: design point and the single-node reference
    points = []
    for label, g in (("design", geom), ("single_node", geom.with_mode_number(1))):
        r_star, eta_max = csl.optimal_correlation_length(g, spec=spec)
        points.append((label, g.mode_number, r_star, eta_max))
    out.csv("tradeoff_points.csv", ["label", "mode_number", "r_c_star_m", "eta_max_per_m2"],
            points)
    anchor = points[1]
    ref = csl.reference_trend(grid, anchor[2], anchor[3]) if grid else []
    out.csv("reference_line.csv", ["r_c_m", "eta_per_m2"], zip(grid, ref))
    out.csv("published_bounds.csv", ["source", "bound", "r_c_m", "lambda_c_per_s"], bounds)
    rc0 = cfg.collapse.r_c
    D0 = csl.cross_section(geom, rc0, cfg.resonator.mass_model, spec)
    out.json("summary.json", {
        "r_c_m": rc0,
        "D": D0,
        "eta_swap": eta,
        "occupation_current": occ_cur,
        "occupation_improved": occ_imp,
        "lambda_min_current": noise.min_testable_rate(occ_cur, D0, g_r, eta),
        "lambda_min_improved": noise.min_testable_rate(occ_imp, D0, g_r, eta),
        "design_point_above_trend": points[0][3] > float(
            csl.reference_trend(points[0][2], anchor[2], anchor[3])),
        "n_published_bounds": len(bounds),
        "grid_points": len(grid),
    })


SUBCOMMANDS = {
    "cross-section": cmd_cross_section,
    "coupling-map": cmd_coupling_map,
    "budget": cmd_budget,
    "exclusion": cmd_exclusion,
}
SIMULATIONS = {
    "swap": cmd_simulate_swap,
    "cooling": cmd_simulate_cooling,
    "protocol": cmd_simulate_protocol,
}


def build_parser():
    p = argparse.ArgumentParser(prog="collapse-bound",
                                description="CSL heating, coupling, dynamics and noise budget.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, bounds=False):
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", required=True, help="output directory")
        if bounds:
            sp.add_argument("--bounds", help="published-bounds CSV (default: packaged file)")

    for name in SUBCOMMANDS:
        common(sub.add_parser(name), bounds=(name == "exclusion"))
    sim = sub.add_parser("simulate")
    sim.add_argument("kind", choices=sorted(SIMULATIONS))
    common(sim)
    sub.add_parser("show-config", help="print the packaged default config")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "show-config":
        sys.stdout.write(default_config_text())
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        workers = env_workers()
        out = Outputs(cfg)
        if args.command == "simulate":
            SIMULATIONS[args.kind](cfg, out, workers)
            label = f"simulate {args.kind}"
        elif args.command == "exclusion":
            cmd_exclusion(cfg, out, workers, args.bounds)
            label = args.command
        else:
            SUBCOMMANDS[args.command](cfg, out, workers)
            label = args.command
        out.write(args.out, label)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, IntegrationError, ScanError, DomainError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CollapseBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {len(out.files) + 1} files to {args.out} (backend: {jit_backend()})")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
