"""Command-line front end: construction, verification, certification, search.

Exit codes: 0 success / valid / found; 1 verification failed or search
NotFound; 2 usage or input error. `--json` replaces the human report with a
machine payload; randomized commands require `--seed` and honour
CONSTELLATION_KIT_WORKERS as the default worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import affine, latin, mub, search
from .errors import ConstellationKitError

_SUBSCRIPT = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _affine_sig(sizes, order: int) -> str:
    body = ",".join(str(s) for s in sizes)
    return f"⟨{body}⟩{str(order).translate(_SUBSCRIPT)}"


def _mu_sig(sizes, dim: int) -> str:
    body = ",".join(str(s) for s in sizes)
    return "{" + body + "}" + str(dim).translate(_SUBSCRIPT)


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    report: str
    payload: dict | None = None


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("CONSTELLATION_KIT_WORKERS", "1")))
    except ValueError:
        return 1


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _dump(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":"))


# -- subcommand handlers --

def _cmd_plane(args) -> CommandOutcome:
    C = affine.make_plane(args.order)
    doc = affine.constellation_to_dict(C)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(_dump(doc) + "\n")
    sig = affine.signature_of(C)
    report = (
        f"affine plane of order {args.order}: {_affine_sig(sig.sizes, sig.order)}, "
        f"{len(C.classes)} parallel classes"
    )
    return CommandOutcome(0, report, doc)


def _cmd_verify(args) -> CommandOutcome:
    C = affine.constellation_from_dict(_load_json(args.infile))
    rep = affine.verify_constellation(C)
    if rep.valid and args.plane_axioms:
        rep = affine.verify_plane_axioms(C)
    sig = affine.signature_of(C)
    name = _affine_sig(sig.sizes, sig.order)
    if rep.valid:
        return CommandOutcome(0, f"valid {name}", {"valid": True, "signature": list(sig.sizes)})
    lines = [f"invalid {name}"]
    for v in rep.violations[:10]:
        lines.append(
            f"  {v.kind} at {v.where}: observed {v.observed}, expected {v.expected}"
        )
    return CommandOutcome(
        1, "\n".join(lines), {"valid": False, "violations": len(rep.violations)}
    )


def _cmd_complete(args) -> CommandOutcome:
    C = affine.constellation_from_dict(_load_json(args.infile))
    cl = affine.complete_foliation_set(C)
    out = affine.AffineConstellation(C.order, C.classes + (cl,))
    doc = affine.constellation_to_dict(out)
    sig = affine.signature_of(out)
    return CommandOutcome(
        0, f"completed to {_affine_sig(sig.sizes, sig.order)}", doc
    )


def _macneish_for_order(n: int) -> list:
    """Fold the direct product over the prime-power factorization of n."""
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            pk = 1
            while m % p == 0:
                m //= p
                pk *= p
            factors.append(pk)
        p += 1
    if m > 1:
        factors.append(m)
    squares = latin.mols_prime_power(factors[0])
    for f in factors[1:]:
        nxt = latin.mols_prime_power(f)
        k = min(len(squares), len(nxt))
        squares = latin.macneish_product(squares[:k], nxt[:k])
    return squares


def _cmd_mols(args) -> CommandOutcome:
    if args.order < 2:
        return CommandOutcome(2, "--order must be >= 2")
    if args.method == "primepower":
        squares = latin.mols_prime_power(args.order)
    else:
        squares = _macneish_for_order(args.order)
    blocks = []
    for A in squares:
        blocks.append(
            "\n".join(" ".join(str(s + 1) for s in row) for row in A.grid)
        )
    report = (
        f"{len(squares)} mutually orthogonal Latin squares of order {args.order}\n\n"
        + "\n\n".join(blocks)
    )
    payload = {"order": args.order, "squares": [list(map(list, A.grid)) for A in squares]}
    return CommandOutcome(0, report, payload)


def _cmd_mate(args) -> CommandOutcome:
    with open(args.infile, encoding="utf-8") as fh:
        rows = [
            [int(tok) - 1 for tok in line.split()]
            for line in fh
            if line.strip()
        ]
    A = latin.make_square(rows)
    if not latin.is_latin(A):
        return CommandOutcome(2, "input grid is not a Latin square")
    B = latin.find_orthogonal_mate(A)
    if B is None:
        return CommandOutcome(
            1,
            f"no orthogonal mate exists for this order-{A.n} square",
            {"order": A.n, "mate": None},
        )
    text = "\n".join(" ".join(str(s + 1) for s in row) for row in B.grid)
    return CommandOutcome(
        0,
        f"orthogonal mate found\n{text}",
        {"order": A.n, "mate": [list(row) for row in B.grid]},
    )


def _cmd_certify(args) -> CommandOutcome:
    cert = latin.certify_no_mols6(
        workers=args.workers, checkpoint=args.checkpoint
    )
    payload = {
        "order": cert.order,
        "squares_examined": cert.squares_examined,
        "mates_found": cert.mates_found,
        "transversal_hist": {str(k): v for k, v in cert.transversal_hist.items()},
        "digest": cert.digest,
    }
    if cert.asserts_nonexistence:
        report = (
            f"examined all {cert.squares_examined} reduced Latin squares of "
            f"order 6: no orthogonal mate exists, hence no Graeco-Latin "
            f"square of order 6\ndigest {cert.digest}"
        )
        return CommandOutcome(0, report, payload)
    return CommandOutcome(
        1,
        f"found {cert.mates_found} mates among {cert.squares_examined} squares",
        payload,
    )


def _cmd_table1(args) -> CommandOutcome:
    C = affine.table1_constellation()
    doc = affine.constellation_to_dict(C)
    sig = affine.signature_of(C)
    name = _affine_sig(sig.sizes, sig.order)
    if args.verify:
        rep = affine.verify_constellation(C)
        if not rep.valid:
            return CommandOutcome(
                1, f"invalid {name}", {"valid": False, "constellation": doc}
            )
        return CommandOutcome(0, f"valid {name}", {"valid": True, "constellation": doc})
    return CommandOutcome(0, name, doc)


def _cmd_mub_make(args) -> CommandOutcome:
    kind = args.kind
    d = args.dim
    if kind == "standard":
        C = mub.MUConstellation(d, (mub.standard_basis(d),))
    elif kind == "fourier":
        C = mub.MUConstellation(d, (mub.fourier_basis(d),))
    elif kind == "fourier-family":
        if d != 6:
            return CommandOutcome(2, "--kind fourier-family requires --dim 6")
        C = mub.MUConstellation(6, (mub.fourier_family6(args.a, args.b),))
    elif kind == "tao":
        if d != 6:
            return CommandOutcome(2, "--kind tao requires --dim 6")
        C = mub.MUConstellation(6, (mub.tao_basis(),))
    elif kind == "hw-triple":
        C = mub.hw_triple(d)
    else:  # wf
        C = mub.wf_complete_set(d)
    doc = mub.bases_to_dict(C)
    return CommandOutcome(
        0, f"{kind} bases, dim {d}: {len(C.bases)} set(s)", doc
    )


def _cmd_mub_defect(args) -> CommandOutcome:
    C = mub.bases_from_dict(_load_json(args.infile))
    rep = mub.constellation_defect(C)
    lines = [f"constellation {_mu_sig(C.signature, C.dim)}"]
    for (i, j), v in rep.pair_defects.items():
        lines.append(f"  pair ({i},{j}): defect {v:.12e}")
    lines.append(f"  total defect {rep.total:.12e}")
    payload = {
        "dim": C.dim,
        "pair_defects": {f"{i},{j}": v for (i, j), v in rep.pair_defects.items()},
        "total": rep.total,
    }
    return CommandOutcome(0, "\n".join(lines), payload)


def _search_payload(res: search.SearchResult, cfg: search.SearchConfig) -> dict:
    # deterministic fields only: elapsed time stays out of the payload
    return {
        "status": res.status,
        "best_defect": res.best_defect,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "max_iterations": cfg.max_iterations,
        "found_at_restart": res.found_at_restart,
        "restarts_used": res.restarts_used,
        "iterations_used": res.iterations_used,
        "configuration": mub.bases_to_dict(res.best_configuration),
    }


def _search_report(res: search.SearchResult, label: str) -> str:
    if res.status == "Found":
        return (
            f"Found: {label} realized with defect {res.best_defect:.3e} "
            f"(restart {res.found_at_restart})"
        )
    return (
        f"NotFound: {label} not realized within {res.restarts_used} restarts; "
        f"best defect {res.best_defect:.3e}\n"
        "note: this is budgeted numerical evidence, not a proof of non-existence"
    )


def _cmd_mub_search(args) -> CommandOutcome:
    sizes = [int(tok) for tok in args.signature.split(",")]
    cfg = search.SearchConfig(
        seed=args.seed, restarts=args.restarts, workers=args.workers
    )
    res = search.search_constellation(sizes, args.dim, cfg)
    label = _mu_sig(sorted(sizes, reverse=True), args.dim)
    return CommandOutcome(
        0 if res.status == "Found" else 1,
        _search_report(res, label),
        _search_payload(res, cfg),
    )


def _cmd_mub_extend(args) -> CommandOutcome:
    C = mub.bases_from_dict(_load_json(args.infile))
    cfg = search.SearchConfig(
        seed=args.seed, restarts=args.restarts, workers=args.workers
    )
    res = search.extend_search(
        list(C.bases), args.vectors, args.orthonormal, cfg
    )
    kind = "orthonormal vectors" if args.orthonormal else "vectors"
    label = (
        f"extension of {_mu_sig(C.signature, C.dim)} by {args.vectors} {kind}"
    )
    return CommandOutcome(
        0 if res.status == "Found" else 1,
        _search_report(res, label),
        _search_payload(res, cfg),
    )


# -- parser --

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="constellation-kit",
        description="Affine constellations, Latin squares, and MU basis search.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    dw = _default_workers()

    sp = sub.add_parser("plane", help="construct the affine plane of prime-power order")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_plane)

    sp = sub.add_parser("verify", help="verify a constellation JSON document")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--plane-axioms", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("complete", help="append the implied extra foliation")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_complete)

    sp = sub.add_parser("mols", help="generate mutually orthogonal Latin squares")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--method", choices=("primepower", "macneish"), required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_mols)

    sp = sub.add_parser("mate", help="search a Latin square for an orthogonal mate")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_mate)

    sp = sub.add_parser(
        "certify-no-mols6",
        help="check every reduced order-6 Latin square for an orthogonal mate",
    )
    sp.add_argument("--workers", type=int, default=dw)
    sp.add_argument("--checkpoint", default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_certify)

    sp = sub.add_parser("table1", help="the order-6 reference constellation")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_table1)

    mp = sub.add_parser("mub", help="MU basis constructions and searches")
    msub = mp.add_subparsers(dest="mub_command", required=True)

    sp = msub.add_parser("make", help="emit a known construction as basis-set JSON")
    sp.add_argument(
        "--kind",
        choices=("standard", "fourier", "fourier-family", "tao", "hw-triple", "wf"),
        required=True,
    )
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=0.0)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_mub_make)

    sp = msub.add_parser("defect", help="defect report for a basis-set JSON file")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_mub_defect)

    sp = msub.add_parser("search", help="seeded search for an MU constellation")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--signature", required=True)
    sp.add_argument("--restarts", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--workers", type=int, default=dw)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_mub_search)

    sp = msub.add_parser("extend", help="seeded search for MU extension vectors")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--vectors", type=int, required=True)
    sp.add_argument("--orthonormal", action="store_true")
    sp.add_argument("--restarts", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--workers", type=int, default=dw)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_mub_extend)

    return p


def run_command(argv: list[str]) -> CommandOutcome:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed its diagnostic; normalize the code
        return CommandOutcome(2 if e.code else 0, "")
    try:
        return args.func(args)
    except (ConstellationKitError, OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        return CommandOutcome(2, f"error: {e}")


def main(argv: list[str] | None = None) -> int:
    out = run_command(sys.argv[1:] if argv is None else argv)
    if out.exit_code == 2 and out.report:
        print(out.report, file=sys.stderr)
        return out.exit_code
    emit_json = out.payload is not None and "--json" in (
        sys.argv[1:] if argv is None else argv
    )
    if emit_json:
        print(_dump(out.payload))
    elif out.report:
        print(out.report)
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
