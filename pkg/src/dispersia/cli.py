"""
Command-line front end: ``dispersia <subcommand> [options]``.

Every subcommand writes one JSON object (sorted keys, so identical inputs
give identical bytes) to ``--out`` or standard output, or with
``--format csv`` a two-column ``parameter,value`` table of the same data.
Exit status is 0 when the checked property holds, 2 when it fails and 1 on
usage or input errors.
"""

import os

# Pin BLAS/LAPACK to one thread before numpy loads: reductions inside
# threaded BLAS may change rounding with the thread count.
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import argparse  # noqa: E402
import csv  # noqa: E402
import io as _io  # noqa: E402
import json  # noqa: E402
import math  # noqa: E402
import sys  # noqa: E402

import numpy as np  # noqa: E402

from . import __version__  # noqa: E402

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pairs(text):
    try:
        out = []
        for item in text.split(","):
            n, m = item.split(":")
            out.append((int(n), int(m)))
        return out
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected pairs like 1:1,2:2, got {text!r}") from None


def sanitize(obj):
    """Plain JSON types only; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [sanitize(obj.real), sanitize(obj.imag)]
    return obj


def flatten(obj, prefix=""):
    """``(parameter, value)`` rows for every scalar leaf, keys joined by dots."""
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows += flatten(v, f"{prefix}[{i}]")
    else:
        rows.append((prefix, obj))
    return rows


def load_schema(command):
    """JSON schema of a subcommand's output, shipped with the package."""
    from importlib.resources import files

    return json.loads(files("dispersia").joinpath("schemas", f"{command}.json").read_text())


def render(result, fmt):
    if fmt == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["parameter", "value"])
        for k, v in flatten(result):
            if v is None:
                v = ""
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif not isinstance(v, str):
                v = repr(v)
            writer.writerow([k, v])
        return buf.getvalue()
    return json.dumps(result, sort_keys=True, indent=2, allow_nan=False) + "\n"


# subcommands ----------------------------------------------------------------

def cmd_multipole(args):
    from .io import read_density
    from .multipole import first_nonvanishing_order, multipole_moment

    rho = read_density(args.density)
    tensor = multipole_moment(rho, args.order)
    try:
        leading = first_nonvanishing_order(rho)
    except ValueError as exc:
        leading = f"undefined: {exc}"
    return {"label": rho.label, "order": args.order, "tensor": tensor.to_json(),
            "first_nonvanishing_order": leading, "passed": True}


def cmd_expand(args):
    from .coulomb import verify_expansion_order
    from .io import parse_configuration, read_density

    rho1, rho2 = read_density(args.rho1), read_density(args.rho2)
    U = V = np.eye(3)
    if args.orientation:
        tau = parse_configuration(args.orientation)
        U, V = tau.U, tau.V
    report = verify_expansion_order(rho1, rho2, U, V, args.K, args.L)
    out = report.to_json()
    out["passed"] = bool(report.success)
    return out


def cmd_vdw(args):
    from .energy import drude_oscillator, vdw_by_diagonalization, vdw_coefficient
    from .io import read_toy
    from .rotations import rotation_to_list, sample_so3_pairs

    if args.mol1 or args.mol2:
        if not (args.mol1 and args.mol2):
            raise UsageError("--mol1 and --mol2 go together")
        mol1, mol2, model = read_toy(args.mol1), read_toy(args.mol2), "files"
    else:
        mol1 = mol2 = drude_oscillator()
        model = "drude"
    pairs = [(np.eye(3), np.eye(3))] + list(sample_so3_pairs(args.samples, args.seed))
    values = [float(vdw_coefficient(mol1, mol2, U, V)[0]) for U, V in pairs]
    diag = vdw_by_diagonalization(mol1, mol2, np.eye(3), np.eye(3), args.L) if args.L else []
    return {
        "model": model,
        "orientations": [{"U": rotation_to_list(U), "V": rotation_to_list(V)} for U, V in pairs],
        "C_vdw": values,
        "C_min": min(values),
        "C_spread": max(values) - min(values),
        "diagonalization_L": list(args.L or []),
        "diagonalization_C": [float(c) for c in diag],
        "passed": bool(min(values) > 1e-12),
    }


def cmd_feshbach(args):
    from .energy import BracketError, ground_state_energy_fixed_point, random_hermitian

    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    errors, skipped = [], 0
    for _ in range(args.count):
        H = random_hermitian(args.dim, rng)
        w, vecs = np.linalg.eigh(H)
        dominant = np.sort(np.argsort(-np.abs(vecs[:, 0]), kind="stable")[: args.rank])
        P = np.zeros((args.dim, args.dim))
        P[dominant, dominant] = 1.0
        try:
            E = ground_state_energy_fixed_point(H, P)
        except BracketError:
            skipped += 1
            continue
        errors.append(abs(E - w[0]))
    return {"count": args.count, "dim": args.dim, "rank": args.rank, "skipped": skipped,
            "max_error": max(errors) if errors else None,
            "passed": bool(errors and max(errors) <= 1e-8)}


def cmd_pseudomin(args):
    from .pathopt import negativity_at_pseudomin

    runs = [negativity_at_pseudomin(n, m, args.delta, args.trials, args.seed) for n, m in args.orders]
    return {"runs": runs, "passed": all(r["passed"] for r in runs)}


def cmd_sublevel(args):
    from .pathopt import sublevel_connectivity

    n, m = args.order
    return sublevel_connectivity(n, m, args.delta, args.samples, args.seed)


def cmd_mountainpass(args):
    from .io import parse_configuration, read_surface
    from .pathopt import minmax_optimize

    surface = read_surface(args.surface)
    tau0, tau1 = parse_configuration(args.tau0), parse_configuration(args.tau1)
    res = minmax_optimize(surface, tau0, tau1, nodes=args.nodes, seed=args.seed, max_moves=args.max_moves)
    out = res.to_json()
    out["passed"] = bool(res.converged)
    return out


def cmd_boundpath(args):
    from .io import read_path, read_surface
    from .pathopt import bounded_minmax_path, choose_L_cut

    surface = read_surface(args.surface)
    path = read_path(args.path)
    L_cut = args.Lcut if args.Lcut is not None else choose_L_cut(surface, args.delta)
    res = bounded_minmax_path(surface, path, L_cut, seed=args.seed, grid_n=args.samples)
    out = res.to_json()
    bound = max(surface.E_infinity, res.input_max) + 1e-9
    out["energy_bound"] = bound
    out["passed"] = bool(res.path.max_L() <= L_cut and res.output_max <= bound)
    return out


def cmd_semirel(args):
    from .semirel import experiments as ex

    kwargs = {}
    if args.grid is not None:
        kwargs["n"] = args.grid
    if args.box is not None:
        kwargs["half_width"] = args.box / 2.0
    if args.experiment in ("symbol", "commutator", "decay"):
        kwargs["seed"] = args.seed
    return ex.EXPERIMENTS[args.experiment](**kwargs)


COMMANDS = {
    "multipole": (cmd_multipole, "multipole tensor of a density"),
    "expand": (cmd_expand, "multipole expansion remainder against the exact Coulomb sum"),
    "vdw": (cmd_vdw, "van der Waals coefficient of a toy molecule pair"),
    "feshbach": (cmd_feshbach, "Feshbach fixed point against dense diagonalization"),
    "pseudomin": (cmd_pseudomin, "descent to pseudo-minima of multipolar interactions"),
    "sublevel": (cmd_sublevel, "connectivity of a negative sublevel set on SO(3) x SO(3)"),
    "mountainpass": (cmd_mountainpass, "min-max path between two minima of an energy surface"),
    "boundpath": (cmd_boundpath, "replace a path's far excursion by a detour at bounded separation"),
    "semirel": (cmd_semirel, "semirelativistic kinetic-operator experiments"),
}


def build_parser():
    parser = _Parser(prog="dispersia", description="Multipolar and dispersion interactions of rigid molecules.")
    parser.add_argument("--version", action="version", version=f"dispersia {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed for all randomness (default 0)")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    p = {name: sub.add_parser(name, parents=[common], help=text, description=text)
         for name, (_, text) in COMMANDS.items()}

    p["multipole"].add_argument("--density", required=True, help="density file (.json or .csv)")
    p["multipole"].add_argument("--order", type=int, required=True)

    p["expand"].add_argument("--rho1", required=True)
    p["expand"].add_argument("--rho2", required=True)
    p["expand"].add_argument("--K", type=int, default=4)
    p["expand"].add_argument("--L", type=_floats, default=[40.0, 80.0, 160.0, 320.0], help="comma-separated")
    p["expand"].add_argument("--orientation", help="configuration JSON (inline or file) supplying U and V")

    p["vdw"].add_argument("--mol1", help="toy model JSON (default: Drude oscillator)")
    p["vdw"].add_argument("--mol2")
    p["vdw"].add_argument("--samples", type=int, default=10, help="Haar-random orientations")
    p["vdw"].add_argument("--L", type=_floats, default=None, help="separations for the diagonalization fit")

    p["feshbach"].add_argument("--count", type=int, default=100)
    p["feshbach"].add_argument("--dim", type=int, default=8)
    p["feshbach"].add_argument("--rank", type=int, default=2)

    p["pseudomin"].add_argument("--orders", type=_pairs, default=[(1, 1), (1, 2), (2, 2)])
    p["pseudomin"].add_argument("--delta", type=float, default=0.1)
    p["pseudomin"].add_argument("--trials", type=int, default=50)

    p["sublevel"].add_argument("--order", type=lambda s: _pairs(s)[0], default=(1, 1))
    p["sublevel"].add_argument("--delta", type=float, default=0.1)
    p["sublevel"].add_argument("--samples", type=int, default=5000)

    p["mountainpass"].add_argument("--surface", required=True)
    p["mountainpass"].add_argument("--tau0", required=True, help="configuration JSON (inline or file)")
    p["mountainpass"].add_argument("--tau1", required=True)
    p["mountainpass"].add_argument("--nodes", type=int, default=32)
    p["mountainpass"].add_argument("--max-moves", type=int, default=100_000)

    p["boundpath"].add_argument("--surface", required=True)
    p["boundpath"].add_argument("--path", required=True, help="path JSON with a 'nodes' list")
    p["boundpath"].add_argument("--Lcut", type=float, default=None, help="default: chosen from --delta")
    p["boundpath"].add_argument("--delta", type=float, default=0.1)
    p["boundpath"].add_argument("--samples", type=int, default=2000, help="sublevel graph size")

    p["semirel"].add_argument("--experiment", required=True,
                              choices=("symbol", "kernel", "commutator", "ims", "decay", "zhislin"))
    p["semirel"].add_argument("--grid", type=int, default=None, help="points per axis")
    p["semirel"].add_argument("--box", type=float, default=None, help="box edge length")
    return parser


def run(argv=None):
    """Parse ``argv``, run the subcommand and return ``(exit_code, output_text, out_path)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE, "", None
    func = COMMANDS[args.command][0]
    from .io import ParseError

    try:
        result = func(args)
    except (OSError, ParseError, UsageError, ValueError) as exc:
        # unreadable or malformed input, or an input outside an operation's domain
        print(f"dispersia {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, "", None
    except RuntimeError as exc:
        # the computation ran but could not establish its property
        print(f"dispersia {args.command}: failed: {exc}", file=sys.stderr)
        result = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    result = sanitize(dict(result, command=args.command, seed=args.seed, version=__version__))
    return (EXIT_OK if result.get("passed") else EXIT_FAILED), render(result, args.format), args.out


def main(argv=None):
    try:
        code, text, out = run(argv)
    except SystemExit as exc:
        return exc.code
    if text:
        if out:
            with open(out, "w", newline="") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
