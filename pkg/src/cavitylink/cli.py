"""Command-line front end.

Subcommands emit CSV (and optionally a PNG figure next to it); exit codes
are 0 on success, 1 when a verification threshold is breached and 2 for
invalid input.  A flat key = value config file can supply defaults for any
subcommand; explicit flags win, unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import cmt, dynamics, fullmodel, lindblad, phases, plots, units
from .errors import CavityLinkError, SingularPhase
from .hilbert import two_qubit_space

_SETTINGS_ROWS_1Q = ("hold", "rabi", "phase")
_SETTINGS_ROWS_2Q = ("A", "B", "C", "D", "feed-rabi", "feed-phase", "hold-2q")


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _load_config(path: str, allowed: set[str]) -> dict:
    """Flat key = value file; '#' starts a comment; unknown keys rejected."""
    values = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, text = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in allowed:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = text.strip()
    return values


def _apply_config(args: argparse.Namespace, parser_defaults: dict) -> None:
    """Overlay config-file values under explicitly-given CLI options."""
    if not getattr(args, "config", None):
        return
    allowed = {key for key in parser_defaults if key not in ("config", "func", "command")}
    raw = _load_config(args.config, allowed)
    for key, text in raw.items():
        if getattr(args, key) != parser_defaults[key]:
            continue  # explicit flag wins
        default = parser_defaults[key]
        if isinstance(default, bool):
            value = text.lower() in ("1", "true", "yes", "on")
        elif isinstance(default, int) and not isinstance(default, bool):
            value = int(text)
        elif isinstance(default, float):
            value = float(text)
        else:
            value = text
        setattr(args, key, value)


def _write_csv(path: str, header_lines: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in header_lines:
            handle.write(line + "\n")
        for row in rows:
            handle.write(",".join(row) + "\n")


# ---------------------------------------------------------------------------
# effective-params
# ---------------------------------------------------------------------------

def cmd_effective_params(args) -> int:
    if args.row:
        row = args.row
        if row in _SETTINGS_ROWS_1Q:
            params = phases.effective_params_1q(phases.standard_settings_1q(row))
        else:
            step = "hold" if row == "hold-2q" else row
            settings, _ = phases.standard_settings_2q(step)
            params = phases.effective_params_2q(settings)
    elif args.one_qubit:
        settings = phases.PhaseSettings1Q(*args.one_qubit)
        params = phases.effective_params_1q(settings)
    elif args.two_qubit:
        settings = phases.PhaseSettings2Q(*args.two_qubit)
        params = phases.effective_params_2q(settings)
    else:
        print("error: provide --row, --one-qubit or --two-qubit", file=sys.stderr)
        return 2
    if isinstance(params, phases.EffectiveParams1Q):
        items = [("omega_c1_eff", params.omega_c1_eff),
                 ("omega_c2_eff", params.omega_c2_eff),
                 ("g12_eff", params.g12_eff)]
    else:
        items = list(params.as_dict().items())
    for name, value in items:
        print(f"{name:14s} {_fmt(value)}")
    return 0


# ---------------------------------------------------------------------------
# truth-table
# ---------------------------------------------------------------------------

def _dominant_label(space, psi) -> str:
    return space.basis_label(int(np.argmax(np.abs(psi))))


def cmd_truth_table(args) -> int:
    space = two_qubit_space()
    seg_a, seg_b, seg_c = dynamics.qcnot_program().steps
    rows = []
    align = None
    worst = 0.0
    for a in (0, 1):
        for b in (0, 1):
            psi = dynamics.logical_state_2q(space, a, b)
            input_label = _dominant_label(space, psi)
            after_a = dynamics.run_program(dynamics.PhaseProgram((seg_a,)), psi, space)
            after_b = dynamics.run_program(dynamics.PhaseProgram((seg_b,)), after_a, space)
            final = dynamics.run_program(dynamics.PhaseProgram((seg_c,)), after_b, space)
            sign = -1 if b else 1
            ideal = sign * dynamics.logical_state_2q(space, a ^ b, b)
            if align is None:
                # one global phase common to all rows
                align = np.exp(-1j * np.angle(ideal.conj() @ final))
            deviation = float(np.max(np.abs(align * final - ideal)))
            worst = max(worst, deviation)
            rows.append((input_label, _dominant_label(space, after_a),
                         _dominant_label(space, after_b), _dominant_label(space, final),
                         f"{sign:+d}", f"{deviation:.3e}"))
    header = ["input,after_step_a,after_step_b,final,sign,max_deviation"]
    csv_rows = [tuple(row) for row in rows]
    if args.out:
        _write_csv(args.out, header, csv_rows)
        print(f"wrote {args.out} (worst deviation {worst:.3e})")
    else:
        print(header[0])
        for row in csv_rows:
            print(",".join(row))
    return 0


# ---------------------------------------------------------------------------
# fidelity-sweep
# ---------------------------------------------------------------------------

def cmd_fidelity_sweep(args) -> int:
    gamma = units.gamma_from_quarter_period_ps(args.gamma_inv_ps)
    omega0 = units.omega_from_wavelength(args.wavelength_um * 1e-6)
    fixed = lindblad.DecoherenceParams(
        gamma_phase=units.dephasing_rate_from_linewidth_uev(args.dephasing_uev),
        q_factor=args.q_factor if args.q_factor > 0 else math.inf,
        omega0_si=omega0,
    )
    if args.points < 1:
        print("error: --points must be >= 1", file=sys.stderr)
        return 2
    if args.axis == "dephasing":
        grid_display = np.linspace(args.min, args.max, args.points)
        grid = np.array([units.dephasing_rate_from_linewidth_uev(u) for u in grid_display])
        axis_label = "linewidth_uev"
    else:
        if args.min <= 0:
            print("error: Q grid must be positive", file=sys.stderr)
            return 2
        grid_display = np.logspace(math.log10(args.min), math.log10(args.max), args.points)
        grid = grid_display
        axis_label = "q_factor"
    if args.points == 1:
        grid = grid[:1]
        grid_display = grid_display[:1]
    result = lindblad.fidelity_sweep(args.axis, grid, fixed, gamma,
                                     definition=args.definition)
    gate_ps = units.qcnot_time_ps(args.gamma_inv_ps)
    header = [
        f"# axis={args.axis} definition={args.definition}",
        f"# gamma_inv_ps={_fmt(args.gamma_inv_ps)} gate_time_ps={_fmt(gate_ps)}",
        f"# wavelength_um={_fmt(args.wavelength_um)}",
        f"{axis_label},fidelity",
    ]
    rows = [( _fmt(x), f"{f:.12f}") for x, f in zip(grid_display, result.fidelities)]
    _write_csv(args.out, header, rows)
    crossing = lindblad.crossing(grid_display, result.fidelities, 0.9)
    print(f"two-qubit gate time: {gate_ps:.1f} ps")
    if crossing is not None:
        print(f"fidelity crosses 0.9 at {axis_label} = {crossing:.6g}")
    print(f"wrote {args.out}")
    if args.plot:
        fig_path = args.out.rsplit(".", 1)[0] + ".png"
        plots.fidelity_sweep_figure(grid_display, result.fidelities, args.axis,
                                    fig_path, crossing)
        print(f"wrote {fig_path}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    ok = True
    if args.which == "full-vs-effective":
        rabi = fullmodel.compare_effective(
            phases.standard_settings_1q("rabi"), tau_p_gamma=args.tau_p_gamma,
            n_modes=args.modes, strict=False)
        hold = fullmodel.compare_effective(
            phases.standard_settings_1q("hold"), tau_p_gamma=args.tau_p_gamma,
            n_modes=args.modes, strict=False)
        doubled = fullmodel.compare_effective(
            phases.standard_settings_1q("rabi"), tau_p_gamma=args.tau_p_gamma,
            n_modes=2 * args.modes - 1, strict=False)
        conv = abs(rabi.rabi_frequency - doubled.rabi_frequency) / doubled.rabi_frequency
        checks = [
            ("rabi frequency error < 5%", rabi.rabi_rel_error, rabi.rabi_rel_error < 0.05),
            ("mean mode leakage < 1e-2", rabi.mean_fp_leakage, rabi.mean_fp_leakage < 1e-2),
            ("hold retention > 0.99", hold.hold_retention, hold.hold_retention > 0.99),
            ("window-doubling shift < 0.5%", conv, conv < 5e-3),
        ]
        print(f"# tau_p*Gamma_c = {_fmt(args.tau_p_gamma)}, modes = {args.modes}")
        print(f"peak mode leakage (reported): {rabi.peak_fp_leakage:.6g}")
        print(f"detuning error (Gamma_c units): {rabi.detuning_error:.6g}")
        for name, value, passed in checks:
            ok = ok and passed
            print(f"{'PASS' if passed else 'FAIL'}  {name}: {value:.6g}")
    else:
        settings = phases.standard_settings_1q(args.settings)
        cfg, omega0 = fullmodel.network_from_settings(settings, tau_p_gamma=args.tau_p_gamma)
        report = cmt.compare_full_model(cfg, n_modes=args.modes, horizon=args.horizon,
                                        frame_omega=omega0)
        checks = [
            ("population agreement < 1e-3", report.max_deviation, report.max_deviation < 1e-3),
            ("energy bookkeeping < 1e-6", report.energy_residual, report.energy_residual < 1e-6),
        ]
        print(f"# settings = {args.settings}, tau_p*Gamma_c = {_fmt(args.tau_p_gamma)}, "
              f"modes = {args.modes}, horizon = {_fmt(args.horizon)}")
        for n_half in (args.modes // 2, args.modes):
            smaller = cmt.compare_full_model(cfg, n_modes=n_half + 1 - (n_half % 2),
                                             horizon=args.horizon, frame_omega=omega0)
            print(f"convergence: {smaller.n_modes} modes -> deviation {smaller.max_deviation:.6g}")
        for name, value, passed in checks:
            ok = ok and passed
            print(f"{'PASS' if passed else 'FAIL'}  {name}: {value:.6g}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# entangle
# ---------------------------------------------------------------------------

def cmd_entangle(args) -> int:
    space = two_qubit_space()
    psi, _program = dynamics.entangled_source(seed=args.seed, space=space)
    bell = dynamics.bell_state(space)
    fidelity = float(abs(bell.conj() @ psi) ** 2)
    rho = dynamics.logical_density(psi, space)
    conc = dynamics.concurrence(rho)
    ground = dynamics.qd_ground_population(psi, space)
    header = ["basis,re,im"]
    rows = []
    for index in np.flatnonzero(np.abs(psi) > 1e-12):
        rows.append((space.basis_label(int(index)),
                     _fmt(float(psi[index].real)), _fmt(float(psi[index].imag))))
    rows.append(("summary",
                 f"concurrence={conc:.12f}", f"bell_fidelity={fidelity:.12f}"))
    _write_csv(args.out, header, rows)
    print(f"bell fidelity {fidelity:.12f}, concurrence {conc:.12f}, "
          f"dot ground population {ground:.12f}")
    print(f"wrote {args.out}")
    if args.plot:
        labels = [space.basis_label(int(i)) for i in np.flatnonzero(np.abs(psi) > 1e-12)]
        amps = psi[np.abs(psi) > 1e-12]
        fig_path = args.out.rsplit(".", 1)[0] + ".png"
        plots.amplitudes_figure(labels, amps, fig_path)
        print(f"wrote {fig_path}")
    return 0


# ---------------------------------------------------------------------------
# run-program
# ---------------------------------------------------------------------------

#: Built-in protocols available to `run-program --protocol`.
_PROTOCOLS = {
    "qcnot": dynamics.qcnot_program,
    "cnot": dynamics.cnot_program,
    "entangler": dynamics.entangler_program,
    "feed-c3": lambda: dynamics.feed_photon("c3"),
    "feed-c4": lambda: dynamics.feed_photon("c4"),
    "feed-c5": lambda: dynamics.feed_photon("c5"),
    "feed-c6": lambda: dynamics.feed_photon("c6"),
}


def parse_program_file(path: str) -> dynamics.PhaseProgram:
    """Line-oriented phase-program format.

    One step per line ('#' starts a comment):
      pulse x|y                      instantaneous dot preparation
      segment <ROW> [duration]       named settings row; duration in 1/Gamma
                                     (required for rows without a table value)
      angles-1q M1 M2 T12 duration   explicit one-qubit segment
      angles-2q M3 T34 T4Y MY MX T5X T56 M6 duration
    """
    steps = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            kind = fields[0].lower()
            where = f"{path}:{lineno}"
            if kind == "pulse" and len(fields) == 2:
                steps.append(dynamics.Pulse(fields[1].lower()))
            elif kind == "segment" and len(fields) in (2, 3):
                row = fields[1]
                if row in _SETTINGS_ROWS_1Q:
                    settings, duration = phases.standard_settings_1q(row), None
                else:
                    step = "hold" if row == "hold-2q" else row
                    settings, duration = phases.standard_settings_2q(step)
                if len(fields) == 3:
                    duration = float(fields[2])
                if duration is None:
                    raise ValueError(f"{where}: row {row!r} needs an explicit duration")
                steps.append(dynamics.Segment(settings, duration))
            elif kind == "angles-1q" and len(fields) == 5:
                settings = phases.PhaseSettings1Q(*map(float, fields[1:4]))
                steps.append(dynamics.Segment(settings, float(fields[4])))
            elif kind == "angles-2q" and len(fields) == 10:
                settings = phases.PhaseSettings2Q(*map(float, fields[1:9]))
                steps.append(dynamics.Segment(settings, float(fields[9])))
            else:
                raise ValueError(f"{where}: cannot parse {line!r}")
    return dynamics.PhaseProgram(tuple(steps))


def _parse_initial(label: str, space) -> np.ndarray:
    if label == "vacuum":
        return space.vacuum("g")
    occupations, _, level = label.partition(":")
    return space.state([int(c) for c in occupations], level or "g")


def cmd_run_program(args) -> int:
    if bool(args.program) == bool(args.protocol):
        print("error: provide exactly one of --program or --protocol", file=sys.stderr)
        return 2
    if args.protocol:
        program = _PROTOCOLS[args.protocol]()
    else:
        program = parse_program_file(args.program)
    if program.is_two_qubit():
        space = two_qubit_space()
    else:
        from .hilbert import one_qubit_space
        space = one_qubit_space()
    psi0 = _parse_initial(args.initial, space)
    psi = dynamics.run_program(program, psi0, space)
    header = [f"# steps={len(program.steps)} duration={_fmt(program.total_duration)}",
              "basis,re,im"]
    rows = [(space.basis_label(int(i)), _fmt(float(psi[i].real)), _fmt(float(psi[i].imag)))
            for i in np.flatnonzero(np.abs(psi) > 1e-12)]
    if args.out:
        _write_csv(args.out, header, rows)
        print(f"wrote {args.out}")
    else:
        for line in header:
            print(line)
        for row in rows:
            print(",".join(row))
    return 0


# ---------------------------------------------------------------------------
# cmt-trace
# ---------------------------------------------------------------------------

def cmd_cmt_trace(args) -> int:
    settings = phases.standard_settings_1q(args.settings)
    cfg, omega0 = fullmodel.network_from_settings(settings, tau_p_gamma=args.tau_p_gamma)
    dt = cmt.default_dt(cfg)
    trace = cmt.cmt_evolve(cfg, [1.0, 0.0], args.horizon, dt, frame_omega=omega0)
    stride = max(1, len(trace.times) // max(args.points, 2))
    header = [
        f"# settings={args.settings} tau_p_gamma={_fmt(args.tau_p_gamma)} "
        f"frame_omega={_fmt(omega0)}",
        "t,re_a_c1,im_a_c1,re_a_c2,im_a_c2,energy_c1,energy_c2",
    ]
    rows = []
    for k in range(0, len(trace.times), stride):
        a1 = trace.amplitudes[0, k]
        a2 = trace.amplitudes[1, k]
        rows.append((_fmt(trace.times[k]), _fmt(a1.real), _fmt(a1.imag),
                     _fmt(a2.real), _fmt(a2.imag),
                     _fmt(abs(a1) ** 2), _fmt(abs(a2) ** 2)))
    _write_csv(args.out, header, rows)
    print(f"energy bookkeeping residual: {trace.max_residual:.3e}")
    print(f"wrote {args.out}")
    if args.plot:
        fig_path = args.out.rsplit(".", 1)[0] + ".png"
        sub = trace.energies()[:, ::stride]
        plots.cmt_trace_figure(trace.times[::stride], sub, fig_path)
        print(f"wrote {fig_path}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavitylink",
        description="Simulate phase-programmed gates on waveguide-linked cavity qubits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("effective-params",
                       help="print effective detunings and couplings for a settings row")
    p.add_argument("--row", choices=_SETTINGS_ROWS_1Q + _SETTINGS_ROWS_2Q)
    p.add_argument("--one-qubit", nargs=3, type=float, metavar=("M1", "M2", "T12"))
    p.add_argument("--two-qubit", nargs=8, type=float,
                   metavar=("M3", "T34", "T4Y", "MY", "MX", "T5X", "T56", "M6"))
    p.add_argument("--config")
    p.set_defaults(func=cmd_effective_params)

    p = sub.add_parser("truth-table", help="two-qubit gate truth table as CSV")
    p.add_argument("--out", default="")
    p.add_argument("--config")
    p.set_defaults(func=cmd_truth_table)

    p = sub.add_parser("fidelity-sweep", help="gate fidelity vs dephasing or Q factor")
    p.add_argument("--axis", choices=("dephasing", "qfactor"), default="dephasing")
    p.add_argument("--min", type=float, default=0.25)
    p.add_argument("--max", type=float, default=6.0)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--gamma-inv-ps", type=float, default=units.DEFAULT_QUARTER_PERIOD_PS,
                   help="quarter emission period 1/(4*Gamma) in ps")
    p.add_argument("--definition", choices=("state", "process"), default="state")
    p.add_argument("--dephasing-uev", type=float, default=0.0,
                   help="fixed dephasing linewidth (ueV) for the qfactor axis")
    p.add_argument("--q-factor", type=float, default=0.0,
                   help="fixed Q for the dephasing axis (0 = lossless)")
    p.add_argument("--wavelength-um", type=float, default=1.55)
    p.add_argument("--out", default="fidelity_sweep.csv")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_fidelity_sweep)

    p = sub.add_parser("verify", help="cross-validate the model hierarchy")
    p.add_argument("--which", choices=("full-vs-effective", "cmt-vs-full"),
                   default="full-vs-effective")
    p.add_argument("--tau-p-gamma", type=float, default=0.01)
    p.add_argument("--modes", type=int, default=0,
                   help="mode window (default 101 or 201 by check)")
    p.add_argument("--settings", choices=_SETTINGS_ROWS_1Q, default="phase")
    p.add_argument("--horizon", type=float, default=3.0)
    p.add_argument("--config")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("entangle", help="run the entangled-photon source protocol")
    p.add_argument("--out", default="state.csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("run-program", help="apply a phase program to a basis state")
    p.add_argument("--program", help="phase-program file (see parse_program_file)")
    p.add_argument("--protocol", choices=sorted(_PROTOCOLS))
    p.add_argument("--initial", default="vacuum",
                   help="basis label like 0101:g, or 'vacuum'")
    p.add_argument("--out", default="")
    p.add_argument("--config")
    p.set_defaults(func=cmd_run_program)

    p = sub.add_parser("cmt-trace", help="classical network trace as CSV")
    p.add_argument("--settings", choices=_SETTINGS_ROWS_1Q, default="rabi")
    p.add_argument("--tau-p-gamma", type=float, default=0.01)
    p.add_argument("--horizon", type=float, default=3.0)
    p.add_argument("--points", type=int, default=600)
    p.add_argument("--out", default="cmt_trace.csv")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_cmt_trace)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        # this subcommand's defaults, for the config-file overlay
        defaults = vars(build_parser().parse_args([args.command]))
        _apply_config(args, defaults)
        if args.command == "verify" and args.modes == 0:
            args.modes = 101 if args.which == "full-vs-effective" else 201
        return args.func(args)
    except SingularPhase as exc:
        print(f"error: singular phase: {exc}", file=sys.stderr)
        return 2
    except (CavityLinkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
