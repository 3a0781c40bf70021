"""``defectkit`` command-line front end.

Exit codes: 0 success, 1 input error (including bad flags), 2 numerical
non-convergence (e.g. the Ewald sum).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__, pipeline
from .constants import DEBYE_IN_E_ANGSTROM
from .errors import ConvergenceError, DefectKitError
from .io.manifest import read_manifest
from .screening import Criteria, report_json
from .svg import envelope_svg, normalized_ctl_svg
from .thermo import chem_potentials, condition_lambda, diagram_data, formation_energy, normalized_ctl


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _num(x: float, full: bool) -> str:
    return repr(float(x)) if full else f"{x:.3f}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _select(m, args):
    recs = list(m.defects)
    if getattr(args, "label", None):
        recs = [r for r in recs if r.label == args.label]
    if getattr(args, "charge", None) is not None:
        recs = [r for r in recs if r.charge == args.charge]
    return recs


# subcommands


def cmd_formation(args, m) -> int:
    lam = condition_lambda(args.condition)
    host = pipeline.host_reference(m)
    mu = chem_potentials(host, lam)
    entries = pipeline.defect_entries(m, tol=args.tol)
    rows = []
    for e in sorted(entries, key=lambda e: (e.label, e.q)):
        if e.q != 0 and not args.all_charges:
            continue
        ef = formation_energy(e, host, mu, 0.0)
        rows.append([e.label, e.q, _num(lam, args.full_precision), _num(ef, args.full_precision)])
    _emit(_csv(["defect", "charge", "lambda", "E_form_eV"], rows), args.out)
    return 0


def cmd_ctl(args, m) -> int:
    lam = condition_lambda(args.condition)
    entries = pipeline.defect_entries(m, tol=args.tol)
    profiles = pipeline.charge_profiles(m, lam, entries)
    gap = m.host.E_gap
    rows = []
    for label, p in profiles.items():
        for t in p.transition_levels():
            rows.append([label, t.notation, t.q_low, t.q_high, _num(t.energy, args.full_precision),
                         _num(normalized_ctl(t, gap), args.full_precision)])
    _emit(_csv(["defect", "transition", "q_low", "q_high", "energy_eV", "normalized"], rows), args.out)
    if args.svg:
        Path(args.svg).write_text(envelope_svg(diagram_data(profiles), gap), encoding="utf-8", newline="\n")
    return 0


def cmd_diagram(args, m) -> int:
    lam = condition_lambda(args.condition)
    profiles = pipeline.charge_profiles(m, lam, pipeline.defect_entries(m, tol=args.tol))
    gap = m.host.E_gap
    levels = {label: [(t.notation, normalized_ctl(t, gap)) for t in p.transition_levels()]
              for label, p in profiles.items()}
    _emit(normalized_ctl_svg(levels), args.svg or args.out)
    return 0


def cmd_lifetime(args, m) -> int:
    recs = [r for r in _select(m, args) if r.transition is not None and "wavefunctions" in r.files]
    if not recs:
        raise ValueError("no manifest entries with a transition and a wavefunction file")
    results = pipeline.parallel_map(lambda r: pipeline.record_lifetime(m, r), recs)
    f = args.full_precision
    rows = [[r["label"], r["charge"], _num(r["E"], f), _num(r["mu_bar"], f),
             _num(r["mu_bar"] / DEBYE_IN_E_ANGSTROM, f), _num(r["tau_ns"], f)] for r in results]
    _emit(_csv(["defect", "charge", "E_eV", "mu_bar_eA", "mu_bar_debye", "tau_ns"], rows), args.out)
    return 0


def cmd_hyperfine(args, m) -> int:
    recs = [r for r in _select(m, args) if "spin_density" in r.files and r.nuclei]
    if not recs:
        raise ValueError("no manifest entries with a spin-density file and nuclei")
    results = pipeline.parallel_map(pipeline.record_hyperfine, recs)
    f = args.full_precision
    rows = []
    for rec, res in zip(recs, results):
        for h in res:
            rows.append([rec.label, rec.charge, h["nucleus"], h["isotope"], _num(h["A_xx"], f),
                         _num(h["A_yy"], f), _num(h["A_zz"], f), _num(h["a_iso"], f)])
    _emit(_csv(["defect", "charge", "nucleus", "isotope", "A_xx_MHz", "A_yy_MHz", "A_zz_MHz",
                "a_iso_MHz"], rows), args.out)
    return 0


def cmd_zfs(args, m) -> int:
    recs = [r for r in _select(m, args) if r.files.get("orbitals")]
    if not recs:
        raise ValueError("no manifest entries with orbital grids")
    results = pipeline.parallel_map(lambda r: pipeline.record_zfs(r, args.all_occupied), recs)
    f = args.full_precision
    rows = [[r["label"], r["charge"], _num(r["D"], f), _num(r["E"], f)] for r in results]
    _emit(_csv(["defect", "charge", "D_GHz", "E_GHz"], rows), args.out)
    return 0


def cmd_correction(args, m) -> int:
    recs = [r for r in _select(m, args) if r.charge != 0]
    results = pipeline.parallel_map(
        lambda r: pipeline.record_correction(m, r, tol=args.tol, eta=args.eta), recs
    )
    f = args.full_precision
    rows = [[r.label, r.charge, _num(c.E_image, f), _num(c.E_align, f), _num(c.E_corr, f), _num(c.eta, f)]
            for r, c in zip(recs, results)]
    _emit(_csv(["defect", "charge", "E_image_eV", "E_align_eV", "E_corr_eV", "eta_invA"], rows), args.out)
    return 0


def cmd_screen(args, m) -> int:
    c = Criteria(
        require_paramagnetic=not args.allow_diamagnetic,
        min_gap_levels=args.min_gap_levels,
        allow_bound_exciton=not args.no_bound_exciton,
        max_zfs_for_microwave=args.max_zfs,
    )
    lam = condition_lambda(args.condition)
    text = report_json(pipeline.dossiers(m, lam, pipeline.defect_entries(m, tol=args.tol)), c)
    _emit(text, args.report or args.out)
    return 0


COMMANDS = {
    "formation": (cmd_formation, "Table 2-style formation energies at the VBM (CSV)"),
    "ctl": (cmd_ctl, "charge transition levels (CSV) and envelope diagram (--svg)"),
    "lifetime": (cmd_lifetime, "transition dipoles and radiative lifetimes from wavefunction files"),
    "hyperfine": (cmd_hyperfine, "hyperfine principal values from spin-density grids"),
    "zfs": (cmd_zfs, "zero-field splitting D and E from orbital grids"),
    "correction": (cmd_correction, "image-charge and alignment corrections for charged entries"),
    "screen": (cmd_screen, "qubit screening report (JSON)"),
    "diagram": (cmd_diagram, "normalized CTL diagram (SVG)"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="defectkit", description="Post-DFT point-defect analysis for hBN and similar hosts.")
    p.add_argument("--version", action="version", version=f"defectkit {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text, description=help_text)
        s.add_argument("--manifest", required=True, help="project manifest (JSON)")
        s.add_argument("--out", help="output file (default: stdout)")
        s.add_argument("--condition", default="n-rich", help="n-rich, b-rich or a lambda value in [0, 1]")
        s.add_argument("--tol", type=float, default=1e-8, help="Ewald convergence tolerance (eV)")
        s.add_argument("--full-precision", action="store_true", help="shortest round-trip floats instead of 3 decimals")
        s.add_argument("--label", help="restrict to one defect label")
        s.add_argument("--charge", type=int, help="restrict to one charge state")
        if name == "formation":
            s.add_argument("--all-charges", action="store_true", help="include charged entries")
        if name in ("ctl", "diagram"):
            s.add_argument("--svg", help="SVG output path")
        if name == "zfs":
            s.add_argument("--all-occupied", action="store_true", help="use every listed orbital, not only localized ones")
        if name == "correction":
            s.add_argument("--eta", type=float, help="Ewald splitting parameter (1/Angstrom)")
        if name == "screen":
            s.add_argument("--report", help="JSON report path")
            s.add_argument("--min-gap-levels", type=int, default=2)
            s.add_argument("--max-zfs", type=float, default=20.0, help="microwave threshold (GHz)")
            s.add_argument("--allow-diamagnetic", action="store_true")
            s.add_argument("--no-bound-exciton", action="store_true")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"defectkit: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        manifest = read_manifest(args.manifest)
        return COMMANDS[args.command][0](args, manifest)
    except ConvergenceError as exc:
        print(f"defectkit: convergence failure: {exc}", file=sys.stderr)
        return 2
    except (DefectKitError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"defectkit: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
