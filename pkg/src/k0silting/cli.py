"""``k0silting`` command line: JSON reports on stdout, a short summary on stderr.

Exit codes: 0 pass, 1 a mathematical assertion failed, 2 usage or precondition error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib.resources import files
from pathlib import Path

from .exactmath import make_field
from .grothendieck import SamplerConfig
from .homotopycat import ComplexError, ProjComplex, hom_space, load_complex, shift
from .pathalgebra import PresentationError, load_algebra
from .silting import (
    CertificateError,
    NotInF,
    PreconditionError,
    SiltingCollection,
    class_in_k0sp,
    compute_N_subgroup,
    worked_example,
    extract_filtration,
    gamma,
    horseshoe_sample,
    jordan_holder_sample,
    sample_rng,
    silting_certificate,
    verify_fd_extension_closure,
    verify_hom_vanishing,
    verify_k0_isomorphism,
)

VERIFICATIONS = ("presilting", "silting-cert", "theorem-a", "jordan-holder", "horseshoe",
                 "fd-closure", "cluster-n", "example-4-3")
DEFAULT_SAMPLES = {"theorem-a": 200, "jordan-holder": 100, "horseshoe": 50, "fd-closure": 2, "cluster-n": 2}


class UsageError(Exception):
    pass


def fixture(name: str) -> str:
    return str(files("k0silting") / "fixtures" / name)


def _read_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


class Session:
    """Parsed inputs plus a digest of every file read."""

    def __init__(self, args):
        self.args = args
        try:
            self.field = make_field(args.field)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        self.digests: dict[str, str] = {}
        data = self._load("algebra", args.algebra or fixture("a3.algebra.json"))
        try:
            self.algebra = load_algebra(data, self.field)
        except PresentationError as exc:
            raise UsageError(f"algebra: {exc}") from exc

    def _load(self, role: str, path: str):
        data, text = _read_json(path)
        self.digests[role] = hashlib.sha256(text.encode()).hexdigest()[:16]
        return data

    def complex(self, role: str, path: str | None, default: str) -> ProjComplex:
        data = self._load(role, path or fixture(default))
        try:
            return load_complex(self.algebra, data)
        except (ComplexError, PresentationError, ValueError, KeyError) as exc:
            raise UsageError(f"{role}: {exc}") from exc

    def collection(self, default: str = "stalk_silting.json") -> SiltingCollection:
        data = self._load("silting", self.args.silting or fixture(default))
        try:
            return SiltingCollection.from_json(self.algebra, data)
        except (ComplexError, PresentationError, ValueError, KeyError) as exc:
            raise UsageError(f"silting: {exc}") from exc

    def verified(self, default: str = "stalk_silting.json") -> SiltingCollection:
        return verify_hom_vanishing(self.collection(default)).collection


# --------------------------------------------------------------------------
# commands; each returns (report, passed, summary)


def cmd_hom(s: Session):
    x = s.complex("complex", s.args.complex, "x_example.complex.json")
    y = s.complex("target", s.args.target, "x_example.complex.json") if s.args.target or not s.args.complex else x
    hs = hom_space(x, shift(y, s.args.shift))
    report = {
        "dimension": hs.dimension,
        "shift": s.args.shift,
        "chain_map_dimension": hs.chain_map_dimension,
        "null_homotopic_dimension": hs.null_homotopic_dimension,
        "basis": [{str(n): repr(b[n]) for n in sorted(b.components)} for b in hs.basis],
    }
    return report, True, f"dim Hom(x, Sigma^{s.args.shift} y) = {hs.dimension}"


def cmd_gamma(s: Session):
    m = s.verified()
    x = s.complex("complex", s.args.complex, "x_example.complex.json")
    try:
        if s.args.use_class:
            res = class_in_k0sp(x, m)
            report = {"class": res.value.to_json(), "shift": res.shift, "sign": res.sign,
                      "filtration": res.filtration.to_json()}
            return report, True, f"class = {res.value} (n = {res.shift}, sign {res.sign:+d})"
        filt = extract_filtration(x, m)
    except (NotInF, CertificateError) as exc:
        raise PreconditionError(f"not in F within bound: {exc}") from exc
    g = gamma(filt)
    return {"gamma": g.to_json(), "filtration": filt.to_json()}, True, f"gamma = {g}"


def _batch(fn, m: SiltingCollection, seed: int, count: int, jobs: int) -> list[dict]:
    if jobs <= 1:
        return [fn(m, seed, i) for i in range(count)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, [m] * count, [seed] * count, range(count)))


def verify(s: Session, which: str):
    a = s.args
    samples = a.samples if a.samples is not None else DEFAULT_SAMPLES.get(which, 0)
    if which == "presilting":
        m = s.collection()
        rep = verify_hom_vanishing(m, range(1, m.k_max() + 1))
        msg = "presilting" if rep.passed else f"not presilting: first failure at i = {rep.first_failure}"
        return rep.to_json(), rep.passed, msg
    if which == "example-4-3":
        x = s.complex("complex", a.complex, "x_example.complex.json")
        m = s.collection("rigid2.json")
        if set(m.summands) != {"S1", "S3"}:
            raise UsageError("example-4-3 needs a collection with summands S1 and S3")
        rep = worked_example(s.algebra, m.summands["S1"], m.summands["S3"], x)
        failed = [k for k, v in rep["checks"].items() if not v]
        return rep, rep["passed"], "example reproduced" if not failed else f"failed: {', '.join(failed)}"
    m = s.verified()
    if which == "silting-cert":
        if not m.verified_presilting:
            raise PreconditionError("collection is not verified presilting")
        rep = silting_certificate(m)
        return rep.to_json(), rep.certified, f"certificate shifts {rep.shifts}"
    if which == "theorem-a":
        rep = verify_k0_isomorphism(m, SamplerConfig(samples=samples, seed=a.seed))
        inv = rep.sampled.invariants
        return rep.to_json(), rep.passed, f"sampled K_0 = {inv}, split rank {rep.split_rank}"
    if which in ("jordan-holder", "horseshoe"):
        if not m.verified_presilting:
            raise PreconditionError("collection is not verified presilting")
        fn = jordan_holder_sample if which == "jordan-holder" else horseshoe_sample
        rows = _batch(fn, m, a.seed, samples, a.jobs)
        key = "equal" if which == "jordan-holder" else "passed"
        bad = [r["index"] for r in rows if not r[key]]
        return {"samples": samples, "failures": bad, "results": rows}, not bad, f"{samples - len(bad)}/{samples} agree"
    d = a.d if a.d is not None else m.d
    if d is None:
        raise UsageError(f"{which} needs --d for a presilting collection")
    if which == "fd-closure":
        rep = verify_fd_extension_closure(m, d, samples, sample_rng(a.seed, 0))
        return rep.to_json(), rep.closed, f"F_{d} closure tallies {dict(rep.tallies)}"
    if which == "cluster-n":
        rep = compute_N_subgroup(m, d, samples, sample_rng(a.seed, 0))
        report = rep.to_json()
        report["all_generators_zero"] = all(g.is_zero() for g in rep.generators)
        # for presilting collections every generator must vanish
        passed = report["all_generators_zero"] or not m.verified_presilting
        return report, passed, f"K_0^sp / N = {rep.quotient}"
    raise UsageError(f"unknown verification {which!r}")


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="algebra JSON (default: bundled A3)")
    common.add_argument("--silting", help="silting collection JSON (default: bundled stalk projectives)")
    common.add_argument("--complex", help="complex JSON")
    common.add_argument("--field", default="Q", help="Q or Fp:<prime>")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int)
    common.add_argument("--jobs", type=int, default=1)

    p = argparse.ArgumentParser(prog="k0silting", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    h = sub.add_parser("hom", parents=[common], help="dim Hom(x, Sigma^k y) in the homotopy category")
    h.add_argument("--target", help="complex y (default: x)")
    h.add_argument("--shift", type=int, default=0)
    v = sub.add_parser("verify", parents=[common], help="run a verification")
    v.add_argument("which", choices=VERIFICATIONS)
    v.add_argument("--d", type=int, help="rigidity parameter for fd-closure and cluster-n")
    g = sub.add_parser("gamma", parents=[common], help="gamma of a filtration, or the class with --class")
    g.add_argument("--class", dest="use_class", action="store_true")
    return p


def _check_bounds(args):
    if args.samples is not None and args.samples < 0:
        raise UsageError("--samples must be non-negative")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    if getattr(args, "d", None) is not None and args.d < 2:
        raise UsageError("--d must be at least 2")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    started = time.perf_counter()
    try:
        _check_bounds(args)
        s = Session(args)
        if args.command == "hom":
            report, passed, msg = cmd_hom(s)
        elif args.command == "gamma":
            report, passed, msg = cmd_gamma(s)
        else:
            report, passed, msg = verify(s, args.which)
    except (UsageError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    name = args.command if args.command != "verify" else f"verify {args.which}"
    out = {"command": name, "inputs": s.digests, "field": s.field.name, "seed": args.seed,
           "passed": passed, "report": report}
    json.dump(out, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    elapsed = time.perf_counter() - started
    print(f"{name}: {'PASS' if passed else 'FAIL'} - {msg} ({elapsed:.2f}s)", file=sys.stderr)
    return 0 if passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
