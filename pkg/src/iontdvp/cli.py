"""Command-line entry point: ``iontdvp <command> --config FILE``."""
import argparse
import logging
import sys

import numpy as np

from . import __version__
from . import config as cfgmod
from .disk import CoherentProductState
from .dynamics import (
    MODES,
    integrate,
    mathieu_grid,
    quasienergy_spectrum,
    rotation_angle,
    stability_scan,
)
from .errors import ConfigError, IonTDVPError, StiffnessError
from .husimi import assemble, evaluate, evaluate_grid, find_equilibria, real_hessian
from .output import Table
from .su11 import build_truncated_rep, coherent_expectation_K, displacement_numeric, s_moment
from .trap import mode_weights

log = logging.getLogger("iontdvp")

VERIFY_TOL = 1e-8
EXIT_OK, EXIT_FATAL, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3


class Outcome:
    """A table plus the verification verdict of one command."""

    def __init__(self, table, verify_delta=None, verify_tol=VERIFY_TOL, fatal=False):
        self.table = table
        self.verify_delta = verify_delta
        self.verify_tol = verify_tol
        self.fatal = fatal


def _state(sc):
    wa, wr = mode_weights(sc.trap)
    return CoherentProductState.from_coordinates(
        sc.run["z_a"], sc.run["z_r"], k_a=wa.k, l=sc.trap.l, m_a=wa.m, m_r=wr.m
    )


def _table(sc, command, columns, rows, notes=()):
    return Table(command, columns, rows, sc.echo(), __version__, notes)


# ------------------------------------------------------------------- commands


def cmd_expect(sc, verify=False):
    s = _state(sc)
    cols = ["mode", "k", "m", "z_re", "z_im", "K0", "Kplus_re", "Kplus_im", "Kminus_re", "Kminus_im", "S1", "S2", "S3"]
    if verify:
        cols += ["delta_K0", "delta_Kplus", "delta_S1", "delta_S2", "delta_S3"]
    rows, worst = [], 0.0
    for name, ms in zip(MODES, (s.axial, s.radial)):
        w, z = ms.weight, ms.z
        k0, kp, km = coherent_expectation_K(z, w)
        S = [s_moment(j, z, w) for j in (1, 2, 3)]
        row = [name, float(w.k), w.m, z.real, z.imag, k0, kp.real, kp.imag, km.real, km.imag] + S
        if verify:
            rep = build_truncated_rep(w, sc.run["cutoff"])
            psi = displacement_numeric(z, w, sc.run["cutoff"])
            two_e = 2.0 * (rep.K0 + rep.K1)

            def ev(op):
                return np.vdot(psi, op @ psi)

            o_k0, o_kp = ev(rep.K0).real, ev(rep.Kplus)
            v, o_s = psi, []
            for _ in range(3):
                v = two_e @ v
                o_s.append(np.vdot(psi, v).real)
            deltas = [abs(k0 - o_k0) / abs(o_k0), abs(kp - o_kp) / max(abs(o_kp), 1.0)]
            deltas += [abs(a - b) / abs(b) for a, b in zip(S, o_s)]
            worst = max(worst, *deltas)
            row += deltas
        rows.append(row)
    return Outcome(_table(sc, "expect", cols, rows), worst if verify else None)


def cmd_husimi(sc, verify=False):
    r = sc.run
    re = np.linspace(r["re_min"], r["re_max"], r["re_n"])
    im = np.linspace(r["im_min"], r["im_max"], r["im_n"])
    X, Y = np.meshgrid(re, im)
    Z = X + 1j * Y
    if np.any(np.abs(Z) >= 1.0 - 1e-12):
        raise ConfigError("husimi grid touches |z| >= 1 - 1e-12")
    h = assemble(sc.trap, r["t"])
    other = r["z_r"] if r["mode"] == "axial" else r["z_a"]
    E = evaluate_grid(h, Z, other) if r["mode"] == "axial" else evaluate_grid(h, other, Z)
    rows = [[X[i, j], Y[i, j], E[i, j]] for i in range(len(im)) for j in range(len(re))]
    delta = None
    if verify:
        from .oracle import hamiltonian_expectation, mode_oracles

        orcs = mode_oracles(sc.trap, r["cutoff"])
        wa, wr = mode_weights(sc.trap)
        picks = {(0, 0), (len(im) - 1, len(re) - 1), (len(im) // 2, len(re) // 2)}
        delta = 0.0
        for i, j in sorted(picks):
            za, zr = (Z[i, j], other) if r["mode"] == "axial" else (other, Z[i, j])
            s = CoherentProductState.from_coordinates(za, zr, k_a=wa.k, l=sc.trap.l, m_a=wa.m, m_r=wr.m)
            ref = hamiltonian_expectation(sc.trap, s, r["t"], oracles=orcs).real
            delta = max(delta, abs(E[i, j] - ref) / max(abs(ref), h.energy_scale))
    return Outcome(_table(sc, "husimi", [f"re_z_{r['mode'][0]}", f"im_z_{r['mode'][0]}", "energy"], rows), delta)


def cmd_evolve(sc, verify=False):
    r = sc.run
    s0 = _state(sc)
    t_eval = np.linspace(r["t0"], r["t1"], r["n_out"])
    traj = integrate(sc.trap, s0, (r["t0"], r["t1"]), tol=r["tol"], t_eval=t_eval,
                     conservation_tol=r.get("conservation_tol"))
    xa, ea, xr, er = traj.xi_eta()
    z2, rho2 = traj.position_moments(sc.trap)
    cols = ["t", "za_re", "za_im", "zr_re", "zr_im", "xi_a", "eta_a", "xi_r", "eta_r", "z2", "rho2", "energy"]
    rows = [
        [t, za.real, za.imag, zr.real, zr.imag, a, b, c, d, p, q, e]
        for t, (za, zr), a, b, c, d, p, q, e in zip(traj.times, traj.z, xa, ea, xr, er, z2, rho2, traj.energy)
    ]
    notes = [f"steps accepted={traj.step_stats['accepted']} rejected={traj.step_stats['rejected']}"]
    delta = None
    if verify:
        if sc.trap.drive_mode == "time_dependent":
            notes.append("verify: energy is not conserved under a time-dependent drive; reporting energy drift only")
        delta = traj.energy_drift
        notes.append(f"relative energy drift={delta!r}")
    tol = max(10 * r["tol"], VERIFY_TOL)
    return Outcome(_table(sc, "evolve", cols, rows, notes), delta if sc.trap.drive_mode != "time_dependent" else None, tol)


def cmd_equilibria(sc, verify=False):
    h = assemble(sc.trap, 0.0)
    eq = find_equilibria(sc.trap)
    cols = ["za_re", "za_im", "zr_re", "zr_im", "energy", "classification", "hessian_min_eig", "hessian_max_eig"]
    rows = []
    for s, kind in eq:
        x = np.array([s.axial.z.real, s.axial.z.imag, s.radial.z.real, s.radial.z.imag])
        ev = np.linalg.eigvalsh(real_hessian(h, x))
        rows.append([x[0], x[1], x[2], x[3], evaluate(h, s), kind, ev[0], ev[-1]])
    notes = [] if rows else ["no critical point found"]
    return Outcome(_table(sc, "equilibria", cols, rows, notes))


def cmd_stability(sc, verify=False, threads=1):
    r = sc.run
    xs = np.linspace(r["x_min"], r["x_max"], r["x_n"])
    ys = np.linspace(r["y_min"], r["y_max"], r["y_n"])
    grid = mathieu_grid(xs, ys)
    recs = stability_scan(sc.trap, grid, kind=r["grid"], tol=min(r["tol"], 1e-12), threads=threads)
    names = ("a_z", "q_z") if r["grid"] == "mathieu" else ("U0", "V0")
    cols = list(names) + [
        "trace_a", "trace_r", "stable_a", "stable_r", "marginal_a", "marginal_r",
        "floquet_exponent_a", "floquet_exponent_r", "det_error", "diagnostic",
    ]
    rows = [
        [rc.scan_coords[0], rc.scan_coords[1], rc.trace_a, rc.trace_r, rc.stable_a, rc.stable_r,
         rc.marginal_a, rc.marginal_r, rc.floquet_exponent_a, rc.floquet_exponent_r, rc.det_error,
         (rc.diagnostic or "").replace(",", ";")]
        for rc in recs
    ]
    failed = sum(rc.diagnostic is not None for rc in recs)
    notes = [f"failed points={failed}"]
    # bracket of the axial stable -> unstable transition along each row, if any
    for i in range(len(xs)):
        row = recs[i * len(ys):(i + 1) * len(ys)]
        for a, b in zip(row, row[1:]):
            if a.stable_a and not b.stable_a:
                notes.append(f"axial edge at {names[0]}={float(xs[i])!r}: {names[1]} in [{a.scan_coords[1]!r}, {b.scan_coords[1]!r}]")
                break
    delta = max((rc.det_error for rc in recs if rc.diagnostic is None), default=None) if verify else None
    return Outcome(_table(sc, "stability", cols, rows, notes), delta, 1e-9, fatal=failed == len(recs))


def cmd_quasienergy(sc, verify=False):
    r = sc.run
    mode = r["mode"]
    levels = quasienergy_spectrum(sc.trap, mode, r["n_levels"])
    i = MODES.index(mode)
    w = mode_weights(sc.trap)[i]
    mu = rotation_angle(sc.trap, mode)
    cols = ["level", "kappa", "quasienergy", "phase"]
    rows = []
    for m, e in enumerate(levels):
        kappa = float(w.k) + m
        rows.append([m, kappa, e, float(np.mod(2 * kappa * mu, 2 * np.pi))])
    delta = None
    if verify:
        from .oracle import quantum_quasienergy_phases

        ph, _ = quantum_quasienergy_phases(sc.trap, mode, r["n_levels"])
        cols.append("quantum_phase")
        d = []
        for row, q in zip(rows, ph):
            row.append(float(q))
            d.append(abs(np.angle(np.exp(1j * (q - row[3])))))
        delta = max(d)
    notes = [f"lifted rotation angle per period={mu!r}"]
    return Outcome(_table(sc, "quasienergy", cols, rows, notes), delta, 1e-4)


COMMANDS = {
    "expect": cmd_expect,
    "husimi": cmd_husimi,
    "evolve": cmd_evolve,
    "equilibria": cmd_equilibria,
    "stability": cmd_stability,
    "quasienergy": cmd_quasienergy,
}


def build_parser():
    p = argparse.ArgumentParser(prog="iontdvp", description="Coherent-state trap dynamics scenarios.")
    p.add_argument("--version", action="version", version=f"iontdvp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="key=value scenario file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--verify", action="store_true", help="compare against the matrix oracle")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for stability scans")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def run(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        sc = cfgmod.load(args.config, args.command)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fn = COMMANDS[args.command]
    try:
        if args.command == "stability":
            outcome = fn(sc, args.verify, threads=args.threads)
        else:
            outcome = fn(sc, args.verify)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StiffnessError as exc:
        print(f"error at t={exc.t!r}: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except IonTDVPError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL

    text = outcome.table.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if outcome.fatal:
        print("error: every scan point failed", file=sys.stderr)
        return EXIT_FATAL
    if args.verify:
        if outcome.verify_delta is None:
            print("verify: no oracle comparison available for this configuration", file=sys.stderr)
            return EXIT_OK
        ok = outcome.verify_delta <= outcome.verify_tol
        print(f"max oracle delta: {float(outcome.verify_delta)!r} ({'ok' if ok else 'FAIL'}, tol {outcome.verify_tol:g})",
              file=sys.stderr)
        return EXIT_OK if ok else EXIT_VERIFY
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
