"""Command-line surface.

Data products are CSV (plot-ready, self-describing header comment) or JSON
(single results); human summaries go to stdout.  Exit codes: 0 success and
all reference checks passed, 1 reference checks failed, 2 invalid scheme or
configuration, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import __version__, distance, linksim, optimizer, report, spectrum
from .modulator import modulate, phase_trajectory
from .pulses import ConfigError, ConvergenceError
from .schemefile import load_scheme

ENV_OUTDIR = "SSBFSK_OUT"


def _outdir(args) -> str:
    out = args.out or os.environ.get(ENV_OUTDIR) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _scheme(args):
    if not args.scheme:
        raise ConfigError("this command needs --scheme <file.json>")
    return load_scheme(args.scheme)


def _scheme_note(sch) -> str:
    sp = sch.pulse.spec
    return (f"family={sp.family} M={sch.M} h={sch.h} L={sp.L} w={sp.w} bt={sp.bt} "
            f"Ts={sp.Ts} sps={sch.pulse.samples_per_symbol} alphabet={sch.alphabet}")


def cmd_pulse(args) -> int:
    sch = _scheme(args)
    p = sch.pulse
    t = np.arange(len(p.g)) * (sch.Ts / sch.sps)
    report.write_csv(os.path.join(_outdir(args), "pulse.csv"),
                     ["t", "g", "phi0"], zip(t, p.g, p.phi0), _scheme_note(sch))
    print(f"pulse.csv written ({len(t)} samples, mu={p.mu:.6f})")
    return 0


def cmd_modulate(args) -> int:
    sch = _scheme(args)
    if args.symbols:
        syms = [int(x) for x in args.symbols.split(",")]
    else:
        rng = np.random.default_rng(args.seed)
        syms = rng.choice(sch.alphabet_values, size=args.random).tolist()
    traj = phase_trajectory(sch, syms)
    sig = modulate(sch, syms)
    report.write_csv(os.path.join(_outdir(args), "modulate.csv"),
                     ["t", "re", "im", "phi"],
                     zip(traj.t, sig.real, sig.imag, traj.phi),
                     _scheme_note(sch) + f" n_symbols={len(syms)}")
    print(f"modulate.csv written ({len(syms)} symbols)")
    return 0


def cmd_dmin(args) -> int:
    sch = _scheme(args)
    res = distance.d_min(sch, m=args.m, N_max=args.nmax)
    doc = {"d_squared": res.d_squared, "achieved_by": list(res.achieved_by.gamma),
           "N_used": res.N_used, "converged": res.converged}
    path = os.path.join(_outdir(args), "dmin.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
    print(json.dumps(doc))
    return 0


def cmd_dmin_sweep(args) -> int:
    sch = _scheme(args)
    hs = np.round(np.arange(args.h_start, args.h_stop + args.h_step / 2, args.h_step), 10)
    rows = []
    for h in hs:
        s = dataclasses.replace(sch, h=float(h))
        dB, _ = distance.upper_bound(s, args.m)
        res = distance.d_min(s, m=args.m, N_max=args.nmax)
        rows.append((float(h), dB, res.d_squared, res.N_used))
    report.write_csv(os.path.join(_outdir(args), "dmin_sweep.csv"),
                     ["h", "d_B2", "d_min2", "N_used"], rows,
                     _scheme_note(sch) + f" m={args.m} N_max={args.nmax}")
    print(f"dmin_sweep.csv written ({len(rows)} index points)")
    return 0


def _psd_for(args, sch):
    est = spectrum.psd(sch)
    if abs(est.total_power - 1.0) > 1e-3:
        raise ConvergenceError(
            f"PSD power integrates to {est.total_power:.6f}; grid span/resolution "
            "insufficient for this configuration")
    return est


def cmd_psd(args) -> int:
    sch = _scheme(args)
    est = _psd_for(args, sch)
    rows = report.psd_rows(sch, est)
    report.write_csv(os.path.join(_outdir(args), "psd.csv"),
                     ["f_Ts", "S", "is_line"], rows,
                     _scheme_note(sch) + f" total_power={est.total_power:.6g}"
                     " (line rows carry power, not density)")
    print(f"psd.csv written ({len(est.freq)} points, {len(est.lines)} lines)")
    return 0


def cmd_occupancy(args) -> int:
    sch = _scheme(args)
    est = _psd_for(args, sch)
    occ = spectrum.occupancy(est, args.fraction, sch.M)
    lo, hi = occ.windows[args.fraction]
    doc = {"fraction": args.fraction, "btb": occ.btb[args.fraction],
           "f_low": lo, "f_high": hi, "ssb_loss_percent": occ.ssb_loss_percent}
    path = os.path.join(_outdir(args), "occupancy.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
    print(json.dumps(doc))
    return 0


def cmd_ssb_loss(args) -> int:
    sch = _scheme(args)
    est = _psd_for(args, sch)
    loss = spectrum.ssb_loss(est)
    print(f"ssb_loss_percent: {loss:.6f}")
    with open(os.path.join(_outdir(args), "ssb_loss.json"), "w") as fh:
        json.dump({"ssb_loss_percent": loss}, fh, indent=2)
    return 0


def cmd_wlim(args) -> int:
    Ls = [int(x) for x in args.L.split(",")]
    rows = [(L, optimizer.w_lim(L)) for L in Ls]
    report.write_csv(os.path.join(_outdir(args), "wlim.csv"), ["L", "w_lim"],
                     rows, f"width limit per pulse length, L={Ls}, 0.1 grid, eps<=0.1")
    for L, wl in rows:
        print(f"L={L:3d}  w_lim={wl}")
    return 0


def cmd_pareto(args) -> int:
    outdir = _outdir(args)
    if args.space:
        with open(args.space) as fh:
            space = optimizer.DesignSpace.from_dict(json.load(fh))
    elif args.full:
        space = optimizer.DesignSpace.full(fraction=args.fraction)
    else:
        space = optimizer.DesignSpace.desk(fraction=args.fraction)

    def progress(done, total):
        if done % 50 == 0 or done == total:
            print(f"  evaluated {done}/{total}", file=sys.stderr)

    pts = optimizer.run_grid(space, checkpoint=args.checkpoint,
                             jobs=args.jobs, progress=progress)
    front = optimizer.pareto_front(pts)
    ref = optimizer.evaluate_scheme(report.gmsk_reference_scheme(),
                                    space.occupancy_fraction)
    filtered = optimizer.filter_reference(front, ref)

    def rows(ps):
        return [(p.M, p.h, p.L, p.w, p.dmin_sq, p.btb, p.ssb_loss_percent,
                 p.N_used, p.f1, p.f2) for p in ps]

    hdr = ["M", "h", "L", "w", "dmin2", "btb", "ssb_loss", "N", "f1_db", "f2"]
    note = (f"fraction={space.occupancy_fraction} M={space.M_values} "
            f"L={space.L_values} h=[{space.h_values[0]}..{space.h_values[-1]}] "
            f"w_step={space.w_step} extras={len(space.extra_points)}")
    report.write_csv(os.path.join(outdir, "pareto_cloud.csv"), hdr, rows(pts), note)
    report.write_csv(os.path.join(outdir, "pareto_front.csv"), hdr, rows(front), note)
    report.write_csv(os.path.join(outdir, "pareto_filtered.csv"), hdr, rows(filtered),
                     note + f" reference dmin2={ref.dmin_sq:.4f} btb={ref.btb:.4f}")

    def draw(ax):
        ax.plot([p.btb for p in pts], [p.f1 for p in pts], ".", ms=2, alpha=0.3,
                label="cloud")
        ax.plot([p.btb for p in front], [p.f1 for p in front], "o-", ms=4,
                label="weak Pareto front")
        ax.plot([ref.btb], [ref.f1], "x", ms=10, label="GMSK reference")
        ax.set_xlabel("bandwidth occupancy $B\\,T_b$")
        ax.set_ylabel("$10\\log_{10}(d_{min}^2/2)$ (dB)")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    report.render_figure(os.path.join(outdir, "pareto_front.png"), draw)
    print(f"pareto: {len(pts)} configs, front {len(front)}, "
          f"{len(filtered)} at/above the reference")
    return 0


def cmd_ber(args) -> int:
    sch = _scheme(args)
    ebn0 = [float(x) for x in args.ebn0.split(",")]
    pts = linksim.simulate_ber(sch, ebn0, max_bits=args.max_bits,
                               target_errors=args.target_errors, seed=args.seed)
    report.write_csv(os.path.join(_outdir(args), "ber.csv"),
                     ["ebn0_db", "bits", "errors", "ber", "union_bound"],
                     [(p.ebn0_db, p.bits, p.bit_errors, p.ber, p.union_bound)
                      for p in pts], _scheme_note(sch) + f" seed={args.seed}")
    for p in pts:
        print(f"Eb/N0={p.ebn0_db:5.2f} dB  BER={p.ber:.3e}  bound={p.union_bound:.3e}"
              f"  ({p.bit_errors} errors / {p.bits} bits)")
    return 0


def cmd_reproduce(args) -> int:
    outdir = _outdir(args)
    kwargs = {}
    if args.recipe == "fig6":
        kwargs = {"seed": args.seed, "target_errors": args.target_errors,
                  "max_bits": args.max_bits}
    checks = report.run_recipe(args.recipe, outdir, **kwargs)
    ok = True
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        ok &= c.passed
        print(f"[{status}] {args.recipe}: {c.name}  ({c.detail})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ssbfsk",
                                 description="single-sideband CPM analysis toolkit")
    ap.add_argument("--version", action="version", version=f"ssbfsk {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        p.add_argument("--out", default=None,
                       help=f"output directory (default: ${ENV_OUTDIR} or cwd)")
        if scheme:
            p.add_argument("--scheme", default=None, help="scheme JSON file")

    p = sub.add_parser("pulse", help="emit the frequency pulse and phase response")
    common(p)
    p.set_defaults(func=cmd_pulse)

    p = sub.add_parser("modulate", help="synthesize a baseband signal")
    common(p)
    p.add_argument("--symbols", default=None, help="comma-separated symbol values")
    p.add_argument("--random", type=int, default=64, help="random symbol count")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_modulate)

    p = sub.add_parser("dmin", help="minimum squared Euclidean distance")
    common(p)
    p.add_argument("--m", type=int, default=3, help="merger count for the bound")
    p.add_argument("--nmax", type=int, default=30, help="max observation symbols")
    p.set_defaults(func=cmd_dmin)

    p = sub.add_parser("dmin-sweep", help="bound and minimum distance over h")
    common(p)
    p.add_argument("--h-start", type=float, default=0.05)
    p.add_argument("--h-stop", type=float, default=2.0)
    p.add_argument("--h-step", type=float, default=0.05)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--nmax", type=int, default=30)
    p.set_defaults(func=cmd_dmin_sweep)

    p = sub.add_parser("psd", help="power spectral density")
    common(p)
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("occupancy", help="bandwidth occupancy report")
    common(p)
    p.add_argument("--fraction", type=float, choices=[0.99, 0.999], default=0.99)
    p.set_defaults(func=cmd_occupancy)

    p = sub.add_parser("ssb-loss", help="suppressed-sideband power percentage")
    common(p)
    p.set_defaults(func=cmd_ssb_loss)

    p = sub.add_parser("wlim", help="pulse width limit per pulse length")
    common(p, scheme=False)
    p.add_argument("--L", default="2,4,6,8,10,12", help="comma-separated lengths")
    p.set_defaults(func=cmd_wlim)

    p = sub.add_parser("pareto", help="design-space sweep and Pareto front")
    common(p, scheme=False)
    p.add_argument("--space", default=None, help="design-space JSON file")
    p.add_argument("--full", action="store_true", help="published full grid")
    p.add_argument("--fraction", type=float, choices=[0.99, 0.999], default=0.99)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--checkpoint", default=None,
                   help="append-only results CSV enabling resume")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("ber", help="Viterbi MLSD bit error rate over AWGN")
    common(p)
    p.add_argument("--ebn0", default="3,4,5,6,7", help="comma-separated Eb/N0 dB")
    p.add_argument("--max-bits", type=int, default=1_000_000)
    p.add_argument("--target-errors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("reproduce", help="run a named reproduction recipe")
    common(p, scheme=False)
    p.add_argument("recipe", choices=sorted(report.RECIPES))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--target-errors", type=int, default=100)
    p.add_argument("--max-bits", type=int, default=2_000_000)
    p.set_defaults(func=cmd_reproduce)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
