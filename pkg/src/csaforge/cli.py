"""csa-forge: build and verify symbol algebras, Brauer transcripts, degree-8
classifying points and descent records.

Exit status: 0 when everything verifies, 1 on a verification failure (the
failing stage goes to stderr), 2 on usage or input errors.

    csa-forge symbol build --field F8 --a g --b 1
    csa-forge rowen sample --field F16 --count 1 --seed 7 --out pt.txt
    csa-forge rowen build pt.txt --out cert.txt
    csa-forge rowen verify cert.txt
    csa-forge dec descend --field F16 --basis 1,g --classes g,g^3
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
import tempfile

from . import FORMAT_HEADER, __version__, linalg
from .algcore import csa_test
from .brauercalc import rowen_replay, verify_transcript
from .decdescent import (InvalidBasis, SubspaceBasis, dec_upper_witness, descent_parameter,
                         verify_descent, verify_record_text)
from .exactfield import (ParseError, UnsupportedFieldError, field_from_descriptor, format_scalar,
                         parse_scalar)
from .symbols import (IndeterminateSearch, InvalidPresentation, NormWitness, SymbolPresentation,
                      norm_witness_search, split_iso, symbol_algebra)
from . import rowen82

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _field(text):
    try:
        return field_from_descriptor(text)
    except (ValueError, UnsupportedFieldError) as exc:
        raise UsageError(f"bad field descriptor {text!r}: {exc}") from None


def _scalar(text, field):
    try:
        return parse_scalar(text, field)
    except (ParseError, ValueError) as exc:
        raise UsageError(f"bad scalar {text!r}: {exc}") from None


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def write_atomic(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def fail(stage, message):
    print(f"verification failed [{stage}]: {message}", file=sys.stderr)
    return FAILED


# -- symbol ------------------------------------------------------------------------


def cmd_symbol_build(args):
    F = _field(args.field)
    try:
        pres = SymbolPresentation(args.p or F.p, _scalar(args.a, F), _scalar(args.b, F), F)
    except InvalidPresentation as exc:
        raise UsageError(str(exc)) from None
    A = symbol_algebra(pres)
    rep = csa_test(A)
    lines = [FORMAT_HEADER, f"symbol {pres.to_text()}", f"field {F.descriptor()}"]
    lines += A.to_lines()
    lines.append("report csa " + rep.to_text())
    write_atomic(args.out, "\n".join(lines) + "\n")
    return OK if rep.passed else fail("csa", rep.to_text())


def cmd_symbol_split(args):
    F = _field(args.field)
    a, b = _scalar(args.a, F), _scalar(args.b, F)
    try:
        pres = SymbolPresentation(2, a, b, F)
    except InvalidPresentation as exc:
        raise UsageError(str(exc)) from None
    if args.witness:
        parts = args.witness.split(",")
        if len(parts) != 2:
            raise UsageError("--witness takes x,y")
        w = NormWitness(a, b, _scalar(parts[0], F), _scalar(parts[1], F))
        if not w.verify():
            return fail("witness", f"{args.witness} is not a norm witness for b")
    else:
        try:
            w = norm_witness_search(a, b, F, bound=args.bound)
        except IndeterminateSearch as exc:
            return fail("search", f"indeterminate: {exc}")
        if w is None:
            return fail("search", f"{pres.to_text()} does not split: b is not a norm")
    hom = split_iso(pres, w)
    A = hom.source
    lines = [FORMAT_HEADER, f"split {pres.to_text()}", f"field {F.descriptor()}",
             f"witness {w.to_text()}"]
    for k, lab in enumerate(A.labels):
        img = hom.image_of_basis(k)
        lines.append(f"image {lab} " + " ".join(format_scalar(c) for c in img.coords))
    lines.append(f"report bijective rank={hom.rank()}/4")
    write_atomic(args.out, "\n".join(lines) + "\n")
    return OK


# -- brauer ----------------------------------------------------------------------------


def cmd_brauer_verify(args):
    res = verify_transcript(_read(args.transcript))
    if res.ok:
        print("transcript verified")
        return OK
    where = f"line {res.line}" if res.line else "transcript"
    return fail(where, res.error)


def cmd_brauer_replay(args):
    try:
        pt = rowen82.parse_point_text(_read(args.point))
    except rowen82.InvalidPoint as exc:
        return fail(exc.condition, str(exc))
    word, tr = rowen_replay(rowen82.chain_data_from_point(pt))
    write_atomic(args.out, tr.to_text())
    res = verify_transcript(tr.to_text())
    return OK if res.ok else fail("replay", res.error)


# -- rowen -----------------------------------------------------------------------------


def _sample_one(job):
    descriptor, seed, budget, degree = job
    F = field_from_descriptor(descriptor)
    try:
        pt = rowen82.sample_point(F, seed, budget=budget, degree=degree)
    except rowen82.SamplingError as exc:
        return seed, None, str(exc)
    return seed, pt.to_text([f"seed {seed}"]), None


def _pool_map(fn, jobs, nproc):
    if nproc <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with concurrent.futures.ProcessPoolExecutor(nproc) as ex:
        return list(ex.map(fn, jobs))


def cmd_rowen_sample(args):
    _field(args.field)
    if args.count < 1 or args.budget < 1:
        raise UsageError("--count and --budget must be positive")
    jobs = [(args.field, args.seed + i, args.budget, args.degree) for i in range(args.count)]
    results = _pool_map(_sample_one, jobs, args.jobs)
    status = OK
    for i, (seed, text, err) in enumerate(results):
        if text is None:
            status = fail("sample", f"seed {seed}: {err}")
            continue
        if args.count == 1 or args.out in (None, "-"):
            write_atomic(args.out, text)
        else:
            write_atomic(os.path.join(args.out, f"point_{seed:04d}.txt"), text)
    return status


def _build_one(job):
    path, text, check_split = job
    try:
        pt = rowen82.parse_point_text(text)
        cert = rowen82.build_B(pt, check_split=check_split)
    except rowen82.InvalidPoint as exc:
        return path, None, exc.condition, str(exc)
    except rowen82.CertificateError as exc:
        return path, None, exc.stage, str(exc)
    if check_split and cert.split_check is None and linalg.is_finite(pt.field):
        return path, None, "split", "no rank-one idempotent found"
    return path, cert.to_text(), None, None


def cmd_rowen_build(args):
    jobs = [(p, _read(p), args.check_split) for p in args.points]
    results = _pool_map(_build_one, jobs, args.jobs)
    status = OK
    for path, text, stage, msg in results:
        if text is None:
            status = fail(stage, f"{path}: {msg}")
            continue
        if len(args.points) == 1:
            write_atomic(args.out, text)
        else:
            out = args.out or "."
            name = os.path.splitext(os.path.basename(path))[0] + ".cert"
            write_atomic(os.path.join(out, name), text)
    return status


def _verify_one(job):
    path, text = job
    res = rowen82.verify_certificate(text)
    return path, res.ok, res.stage, res.message


def cmd_rowen_verify(args):
    jobs = [(p, _read(p)) for p in args.certificates]
    status = OK
    for path, ok, stage, msg in _pool_map(_verify_one, jobs, args.jobs):
        if ok:
            print(f"{path}: certificate verified")
        else:
            status = fail(stage, f"{path}: {msg}")
    return status


# -- dec ---------------------------------------------------------------------------------


def cmd_dec_descend(args):
    F = _field(args.field)
    E = _field(args.over) if args.over else F
    try:
        basis = SubspaceBasis([_scalar(t, F) for t in args.basis.split(",")], F)
    except InvalidBasis as exc:
        raise UsageError(str(exc)) from None
    classes = [_scalar(t, E) for t in args.classes.split(",")]
    if len(classes) != basis.r:
        raise UsageError(f"{len(classes)} classes for a basis of size {basis.r}")
    if args.bslots:
        bs = [_scalar(t, E) for t in args.bslots.split(",")]
        if len(bs) != basis.r:
            raise UsageError("--bslots needs one entry per class")
        rec = dec_upper_witness(list(zip(classes, bs)), basis, E)
    else:
        rec = descent_parameter(classes, basis, E)
    if rec.indeterminate:
        write_atomic(args.out, rec.to_text())
        return fail("recovery", "recovery constants not found")
    if linalg.is_finite(E):
        chk = verify_descent(rec)
        if not chk:
            return fail("oracle", chk.message)
    write_atomic(args.out, rec.to_text())
    return OK


def cmd_dec_verify(args):
    res = verify_record_text(_read(args.record))
    if res.ok:
        print(f"record verified: {res.message}")
        return OK
    return fail("dec", res.message)


# -- parser ------------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="csa-forge", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"csa-forge {__version__}")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for batches")
    parser.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    sub = parser.add_subparsers(dest="group", required=True)

    sym = sub.add_parser("symbol", help="symbol algebras [a,b)_p").add_subparsers(
        dest="cmd", required=True)
    p = sym.add_parser("build", help="structure constants and csa test")
    p.add_argument("--field", required=True)
    p.add_argument("--p", type=int, help="symbol degree (default: the characteristic)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_symbol_build)
    p = sym.add_parser("split", help="explicit isomorphism [a,b)_2 -> M_2")
    p.add_argument("--field", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--witness", help="x,y with b = x^2 + xy + a y^2")
    p.add_argument("--bound", type=int, default=1, help="search degree over function fields")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_symbol_split)

    br = sub.add_parser("brauer", help="witnessed Brauer transcripts").add_subparsers(
        dest="cmd", required=True)
    p = br.add_parser("verify", help="replay a transcript")
    p.add_argument("transcript")
    p.set_defaults(func=cmd_brauer_verify)
    p = br.add_parser("replay", help="write the Rowen chain transcript of a point")
    p.add_argument("point")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_brauer_replay)

    ro = sub.add_parser("rowen", help="degree-8 classifying points").add_subparsers(
        dest="cmd", required=True)
    p = ro.add_parser("sample", help="sample points (seeds SEED..SEED+COUNT-1)")
    p.add_argument("--field", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--budget", type=int, default=500, help="retries per point")
    p.add_argument("--degree", type=int, default=2, help="coordinate degree over F(t)")
    p.add_argument("--out", "-o", help="file for one point, directory for several")
    p.set_defaults(func=cmd_rowen_sample)
    p = ro.add_parser("build", help="build and certify B for point files")
    p.add_argument("points", nargs="+")
    p.add_argument("--check-split", action="store_true",
                   help="also find a rank-one idempotent (finite fields)")
    p.add_argument("--out", "-o", help="file for one point, directory for several")
    p.set_defaults(func=cmd_rowen_build)
    p = ro.add_parser("verify", help="verify certificates")
    p.add_argument("certificates", nargs="+")
    p.set_defaults(func=cmd_rowen_verify)

    dec = sub.add_parser("dec", help="descent of Artin-Schreier classes").add_subparsers(
        dest="cmd", required=True)
    p = dec.add_parser("descend", help="one-parameter descent")
    p.add_argument("--field", required=True, help="finite field holding the basis")
    p.add_argument("--over", help="field E of the classes (default: --field)")
    p.add_argument("--basis", required=True, help="comma separated lambda_i")
    p.add_argument("--classes", required=True, help="comma separated a_i")
    p.add_argument("--bslots", help="comma separated b_i for [a_i, b_i)")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_dec_descend)
    p = dec.add_parser("verify", help="verify a descent record")
    p.add_argument("record")
    p.set_defaults(func=cmd_dec_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"csa-forge: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
