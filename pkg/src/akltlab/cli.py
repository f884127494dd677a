"""Command-line surface: every experiment as a subcommand emitting CSV or
JSON tables, plus a `verify` suite of analytic identities.

Heavy numeric imports happen after argument parsing so the thread-count flag
can pin BLAS/OpenMP pools before NumPy initializes them.
"""

import argparse
import json
import math
import os
import sys

from .errors import CapacityError, SolverError

_THREAD_ENV_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

_NONCONTIG_CLASSES = ["1-5"] * 5 + ["6-8"] * 3 + ["9"] + ["10-12"] * 3 + ["13-15"] * 3 + ["16"]
_HALF_INF_CLASSES = ["1-5"] * 5 + ["6-8"] * 3 + ["9-11"] * 3 + ["12-14"] * 3 + ["15", "16"]


def _size_or_inf(text):
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return int(text)


def _int_list(text):
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _size_list(text):
    return [_size_or_inf(tok) for tok in text.split(",") if tok.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output table format"
    )
    common.add_argument(
        "--output", default=None, help="output file path (default: standard output)"
    )
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="BLAS/OpenMP thread count (default: AKLTLAB_THREADS or all cores)",
    )
    common.add_argument(
        "--tol", type=float, default=1e-9, help="eigensolver residual tolerance"
    )

    parser = argparse.ArgumentParser(
        prog="akltlab",
        description="Entanglement spectra, string order, and scaling of the "
        "bilinear-biquadratic spin-1 chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_spec = sub.add_parser("spectrum", help="analytic entanglement spectra")
    spec_sub = p_spec.add_subparsers(dest="mode", required=True)
    p_cont = spec_sub.add_parser("contiguous", parents=[common])
    p_cont.add_argument("--l", type=int, required=True, help="block length")
    p_cont.add_argument("--n", type=_size_or_inf, required=True, help="ring size or inf")
    p_cont.add_argument("--normalized", action="store_true")
    p_ncont = spec_sub.add_parser("noncontiguous", parents=[common])
    p_ncont.add_argument("--la", type=int, required=True, help="A-block length")
    p_ncont.add_argument("--lb", type=int, required=True, help="B-block length")
    p_ncont.add_argument("--half-infinite", action="store_true")
    p_ncont.add_argument("--normalized", action="store_true")

    p_coup = sub.add_parser(
        "couplings", parents=[common], help="entanglement-Hamiltonian couplings"
    )
    p_coup.add_argument("--mode", choices=("contiguous", "noncontiguous"), required=True)
    p_coup.add_argument("--l", type=int)
    p_coup.add_argument("--n", type=_size_or_inf)
    p_coup.add_argument("--la", type=int)
    p_coup.add_argument("--lb", type=int)

    p_chi = sub.add_parser("chi-ratio", parents=[common], help="chi expansion of the EH ground state")
    p_chi.add_argument("--l", type=int, required=True)

    p_ovl = sub.add_parser("gs-overlap", parents=[common], help="Heisenberg ground-state overlap")
    p_ovl.add_argument("--l", type=int, required=True)

    p_gaps = sub.add_parser("gaps", parents=[common], help="physical / entanglement gap scans")
    p_gaps.add_argument("--theta", type=float, required=True)
    p_gaps.add_argument("--sizes", type=_int_list, required=True, help="comma list")
    p_gaps.add_argument("--which", choices=("phy", "ent", "both"), default="both")

    p_lev = sub.add_parser("levels", parents=[common], help="lowest levels and degeneracy profile")
    p_lev.add_argument("--theta", type=float, required=True)
    p_lev.add_argument("--n", type=int, required=True, help="chain size (phy) or block length (ent)")
    p_lev.add_argument("--k", type=int, default=15)
    p_lev.add_argument("--which", choices=("phy", "ent"), required=True)
    p_lev.add_argument("--rel-tol", type=float, default=1e-4, dest="rel_tol")

    p_fid = sub.add_parser("fidelity", parents=[common], help="bulk-edge ground-state fidelity")
    p_fid.add_argument(
        "--theta-range", required=True, dest="theta_range", help="START:STOP:STEP"
    )
    p_fid.add_argument("--l", type=int, required=True)

    p_sop = sub.add_parser("sop", parents=[common], help="string order parameter")
    p_sop.add_argument("--mode", choices=("ed", "transfer", "asymptotic"), required=True)
    p_sop.add_argument("--theta", type=float, default=None)
    p_sop.add_argument("--n", type=_size_list, required=True, help="comma list (inf allowed for asymptotic)")
    p_sop.add_argument("--boundary", choices=("open", "periodic"), default="open")
    p_sop.add_argument("--i", type=int, default=1, help="left endpoint site")
    p_sop.add_argument("--l", type=int, default=None, help="string length (default n-2)")
    p_sop.add_argument("--raw", action="store_true", help="skip state normalization (transfer mode)")

    p_fit = sub.add_parser("fit", parents=[common], help="exponential-decay fits")
    p_fit.add_argument("kind", choices=("gap", "sop"))
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--which", choices=("phy", "ent"), default=None)
    p_fit.add_argument("--theta", type=float, default=None)
    p_fit.add_argument("--asymptote", type=float, default=None)
    p_fit.add_argument("--allow-mixed-parity", action="store_true", dest="allow_mixed_parity")

    sub.add_parser("verify", parents=[common], help="run the analytic identity suite")

    return parser


def _apply_threads(args):
    count = getattr(args, "threads", None)
    if count is None:
        env = os.environ.get("AKLTLAB_THREADS")
        count = int(env) if env else None
    if count is not None:
        for var in _THREAD_ENV_VARS:
            os.environ[var] = str(count)
    return count


def _fmt_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.17g}"
    return str(value)


def _emit(args, command, flags, columns, rows):
    """Write one table.  flags echo the resolved configuration."""
    from . import __version__

    meta = {"command": command, "version": __version__}
    meta.update(flags)
    meta["format"] = args.format
    if getattr(args, "threads", None) is not None:
        meta["threads"] = args.threads
    if args.format == "csv":
        header = " ".join(f"{k}={_fmt_cell(v)}" for k, v in meta.items())
        lines = ["# " + header, ",".join(columns)]
        for row in rows:
            lines.append(",".join(_fmt_cell(row.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    else:
        payload = {"meta": meta, "columns": columns, "rows": rows}
        text = json.dumps(payload, indent=2, default=_fmt_cell) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_spectrum(args):
    from . import spectra

    if args.mode == "contiguous":
        s = spectra.contiguous_lambdas(args.l, args.n, normalized=args.normalized)
        rows = [{"index": i, "lambda": v} for i, v in enumerate(s.lambdas)]
        flags = {"l": args.l, "n": args.n, "normalized": args.normalized}
        _emit(args, "spectrum contiguous", flags, ["index", "lambda"], rows)
        return 0
    if args.half_infinite:
        s = spectra.noncontiguous_lambdas_half_infinite(args.la, args.lb)
        classes = _HALF_INF_CLASSES
    else:
        s = spectra.noncontiguous_lambdas(args.la, args.lb, normalized=args.normalized)
        classes = _NONCONTIG_CLASSES
    rows = [
        {"index": i + 1, "class": classes[i], "lambda": v}
        for i, v in enumerate(s.lambdas)
    ]
    flags = {
        "la": args.la,
        "lb": args.lb,
        "half_infinite": args.half_infinite,
        "normalized": s.normalized,
    }
    _emit(args, "spectrum noncontiguous", flags, ["index", "class", "lambda"], rows)
    return 0


def _run_couplings(args):
    from . import spectra

    if args.mode == "contiguous":
        if args.l is None or args.n is None:
            print("couplings --mode contiguous needs --l and --n", file=sys.stderr)
            return 2
        fit = spectra.eh_couplings_contiguous(args.l, args.n)
        flags = {"mode": args.mode, "l": args.l, "n": args.n}
    else:
        if args.la is None or args.lb is None:
            print("couplings --mode noncontiguous needs --la and --lb", file=sys.stderr)
            return 2
        fit = spectra.eh_couplings_noncontiguous(args.la, args.lb)
        flags = {"mode": args.mode, "la": args.la, "lb": args.lb}
    rows = [
        {
            "eps0": fit.eps0,
            "j1": fit.j1,
            "j2": fit.j2,
            "residual": fit.residual,
            "degenerate": fit.degenerate,
        }
    ]
    _emit(args, "couplings", flags, ["eps0", "j1", "j2", "residual", "degenerate"], rows)
    return 0


def _run_chi_ratio(args):
    from . import spectra

    rep = spectra.chi_ratio(args.l)
    rows = [{"l": rep.l, "chi1": rep.chi1, "chi2": rep.chi2, "ratio": rep.ratio}]
    _emit(args, "chi-ratio", {"l": args.l}, ["l", "chi1", "chi2", "ratio"], rows)
    return 0


def _run_gs_overlap(args):
    from . import spectra

    value = spectra.heisenberg_gs_overlap(args.l)
    rows = [{"l": args.l, "overlap_sq": value}]
    _emit(args, "gs-overlap", {"l": args.l}, ["l", "overlap_sq"], rows)
    return 0


def _run_gaps(args):
    from . import ed

    rows = []
    if args.which in ("phy", "both"):
        for n in args.sizes:
            point = ed.physical_gap(args.theta, n, tol=args.tol)
            rows.append({"which": "phy", "n": point.n, "delta": point.delta})
    if args.which in ("ent", "both"):
        for l in args.sizes:
            point, _ = ed.entanglement_gap(args.theta, l, tol=args.tol)
            rows.append({"which": "ent", "n": point.n, "delta": point.delta})
    flags = {
        "theta": args.theta,
        "sizes": ",".join(str(s) for s in args.sizes),
        "which": args.which,
    }
    _emit(args, "gaps", flags, ["which", "n", "delta"], rows)
    return 0


def _run_levels(args):
    from . import ed
    from .spin_ops import HamiltonianSpec, build_bbh

    if args.which == "phy":
        h = build_bbh(HamiltonianSpec(theta=args.theta, n_sites=args.n, boundary="open"))
        res = ed.lowest_eigenpairs(h, k=min(args.k, h.dimension), tol=args.tol)
        energies = list(res.values)
    else:
        _, report = ed.entanglement_gap(args.theta, args.n, tol=args.tol)
        energies = list(report.ent_energies[: args.k])
    profile = ed.degeneracy_profile(energies, rel_tol=args.rel_tol)
    rows = [{"index": i, "energy": e} for i, e in enumerate(energies)]
    flags = {
        "theta": args.theta,
        "n": args.n,
        "k": args.k,
        "which": args.which,
        "rel_tol": args.rel_tol,
        "profile": ",".join(str(m) for m in profile),
    }
    _emit(args, "levels", flags, ["index", "energy"], rows)
    return 0


def _parse_theta_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("theta range must be START:STOP:STEP")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("theta range step must be positive")
    grid = []
    theta = start
    while theta <= stop + 1e-12:
        grid.append(round(theta, 12))
        theta += step
    return grid


def _run_fidelity(args):
    from . import ed

    grid = _parse_theta_range(args.theta_range)
    rows = []
    for theta in grid:
        rep = ed.fidelity(theta, args.l, tol=args.tol)
        rows.append(
            {
                "theta": rep.theta,
                "f": rep.value,
                "gs_degeneracy": rep.gs_degeneracy_used,
                "rdm_top_degeneracy": rep.rdm_top_degeneracy,
            }
        )
    flags = {"theta_range": args.theta_range, "l": args.l}
    _emit(
        args,
        "fidelity",
        flags,
        ["theta", "f", "gs_degeneracy", "rdm_top_degeneracy"],
        rows,
    )
    return 0


def _run_sop(args):
    from . import ed, sop
    from .spin_ops import HamiltonianSpec, build_bbh

    rows = []
    if args.mode == "ed":
        if args.theta is None:
            print("sop --mode ed needs --theta", file=sys.stderr)
            return 2
        if args.raw:
            print("--raw applies to transfer mode only", file=sys.stderr)
            return 2
        for n in args.n:
            n = int(n)
            l = args.l if args.l is not None else n - 2
            h = build_bbh(
                HamiltonianSpec(theta=args.theta, n_sites=n, boundary=args.boundary)
            )
            res = ed.lowest_eigenpairs(h, k=1, tol=args.tol)
            point = sop.sop_ed(res.vectors[:, 0], n, args.i, l, theta=args.theta)
            rows.append(
                {"mode": "ed", "theta": args.theta, "n": n, "l": l, "value": point.value}
            )
    elif args.mode == "transfer":
        for n in args.n:
            n = int(n)
            l = args.l if args.l is not None else n - 2
            point = sop.sop_transfer_aklt(l, n, normalized=not args.raw)
            rows.append(
                {"mode": "transfer", "theta": None, "n": n, "l": l, "value": point.value}
            )
    else:
        for n in args.n:
            value = sop.sop_asymptotic(n)
            rows.append({"mode": "asymptotic", "theta": None, "n": n, "l": None, "value": value})
    flags = {
        "mode": args.mode,
        "theta": args.theta,
        "n": ",".join(str(int(n)) if n != math.inf else "inf" for n in args.n),
        "boundary": args.boundary,
        "i": args.i,
        "l": args.l,
        "raw": args.raw,
    }
    _emit(args, "sop", flags, ["mode", "theta", "n", "l", "value"], rows)
    return 0


def _read_table(path):
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        return payload.get("rows", [])
    import csv as _csv

    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(_csv.DictReader(lines))


def _numeric(row, key):
    value = row.get(key)
    if value is None or value == "":
        return None
    return float(value)


def _run_fit(args):
    from . import fits

    rows = _read_table(args.input)
    if args.kind == "gap":
        if args.which is not None:
            rows = [r for r in rows if r.get("which") == args.which]
        kinds = {r.get("which") for r in rows if "which" in r}
        if len(kinds) > 1:
            print(
                "input mixes phy and ent rows; pass --which to select one",
                file=sys.stderr,
            )
            return 2
        points = [(_numeric(r, "n"), _numeric(r, "delta")) for r in rows]
        points = [p for p in points if p[0] is not None and p[1] is not None]
        result = fits.fit_gap(points)
    else:
        points = [(_numeric(r, "n"), _numeric(r, "value")) for r in rows]
        points = [p for p in points if p[0] is not None and p[1] is not None]
        result = fits.fit_sop(
            points,
            theta=args.theta,
            asymptote=args.asymptote,
            allow_mixed_parity=args.allow_mixed_parity,
        )
    flags = {
        "kind": args.kind,
        "input": args.input,
        "which": args.which,
        "asymptote": args.asymptote,
        "allow_mixed_parity": args.allow_mixed_parity,
    }
    out_rows = [
        {
            "amplitude": result.amplitude,
            "asymptote": result.asymptote,
            "xi": result.xi,
            "rms_residual": result.rms_residual,
            "points_used": result.points_used,
        }
    ]
    _emit(
        args,
        "fit " + args.kind,
        flags,
        ["amplitude", "asymptote", "xi", "rms_residual", "points_used"],
        out_rows,
    )
    return 0


def _verify_checks():
    import numpy as np

    from . import mps, sop, spectra

    tensors = mps.aklt_tensors()
    stack = tensors.stacked()
    eye = np.eye(2)

    def canonical():
        r1 = np.abs(sum(a @ a.T for a in stack) - eye).max()
        r2 = np.abs(sum(a.T @ a for a in stack) - eye).max()
        return max(r1, r2) < 1e-14

    def transfer_spectrum():
        e = mps.transfer_matrix(tensors)
        if np.abs(e.power(1) - e.e).max() > 1e-14:
            return False
        if tuple(e.eigenvalues) != (1.0, mps.GAMMA, mps.GAMMA, mps.GAMMA):
            return False
        return all(
            abs(np.trace(np.linalg.matrix_power(e.e, n)) - (1 + 3 * mps.GAMMA**n)) < 1e-13
            for n in range(2, 13)
        )

    def gram_oracle():
        for l in range(1, 6):
            fam = mps.block_states(tensors, l)
            g = mps.block_overlap_gram(l).g
            for i, (a, b) in enumerate(mps.GRAM_ORDER):
                for j, (ap, bp) in enumerate(mps.GRAM_ORDER):
                    got = np.dot(fam.states[(a, b)], fam.states[(ap, bp)])
                    if abs(got - g[i, j]) > 1e-12:
                        return False
        return True

    def sum_rule():
        for la, lb in ((1, 1), (2, 2), (2, 3), (3, 3), (2, 4)):
            s = spectra.noncontiguous_lambdas(la, lb)
            n = 2 * (la + lb)
            if abs(sum(s.lambdas) - (1 + 3 * mps.GAMMA**n)) > 1e-14:
                return False
            gram_vals = spectra.noncontiguous_rdm_gram(la, lb)
            ana = np.sort(s.lambdas)[::-1]
            if np.abs(gram_vals - ana).max() > 1e-10:
                return False
        return True

    def half_infinite_sum():
        return all(
            abs(sum(spectra.noncontiguous_lambdas_half_infinite(la, lb).lambdas) - 1.0)
            < 1e-12
            for la, lb in ((1, 1), (2, 2), (3, 2), (2, 5))
        )

    def intertwining():
        r1, r2 = sop.intertwining_residuals(tensors)
        return max(r1, r2) < 1e-14

    return [
        ("canonical-form", canonical),
        ("transfer-spectrum", transfer_spectrum),
        ("gram-oracle", gram_oracle),
        ("eq15-sum-rule", sum_rule),
        ("half-infinite-sum", half_infinite_sum),
        ("intertwining", intertwining),
    ]


def _run_verify(args):
    failures = 0
    checks = _verify_checks()
    for name, check in checks:
        try:
            passed = check()
        except Exception as exc:  # surface the identity that broke, keep going
            passed = False
            print(f"FAIL {name} ({exc})")
            failures += 1
            continue
        if passed:
            print(f"ok {name}")
        else:
            print(f"FAIL {name}")
            failures += 1
    total = len(checks)
    print(f"verify: {total - failures}/{total} checks passed")
    return 0 if failures == 0 else 1


_HANDLERS = {
    "spectrum": _run_spectrum,
    "couplings": _run_couplings,
    "chi-ratio": _run_chi_ratio,
    "gs-overlap": _run_gs_overlap,
    "gaps": _run_gaps,
    "levels": _run_levels,
    "fidelity": _run_fidelity,
    "sop": _run_sop,
    "fit": _run_fit,
    "verify": _run_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_threads(args)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
