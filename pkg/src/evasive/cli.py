"""Command-line entry point: ``evasive <subcommand> ...``.

Machine output is JSON on stdout (or in the files given by ``--out`` and
friends); a short human summary goes to stderr.  Exit codes: 0 when the object
was produced or the claim holds, 3 when a claim is violated, 2 on usage
errors, 4 when a budget is exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import __version__
from . import bounds as bnd
from . import constructions as cons
from . import scattered35 as s35
from .duality import delsarte_dual, ordinary_dual
from .errors import BudgetExceeded, EvasiveError, NoKnownScattered, RecipeFailed
from .evasive_check import (
    EvasivenessCertificate,
    budget_from_env,
    profile,
    q_system_params,
    verify_certificate,
)
from .subspaces import FqSubspace, load_subspace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VIOLATED = 3
EXIT_BUDGET = 4


@dataclass
class RunManifest:
    """Provenance of one invocation."""

    subcommand: str
    argv: list[str]
    params: dict
    version: str
    jobs: int
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    elapsed_s: float = 0.0
    exit_code: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


class _Run:
    """Collects outputs and input digests for the manifest."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}

    def load(self, path: str) -> FqSubspace:
        self.inputs[path] = _digest(path)
        return load_subspace(path)

    def emit(self, obj, path: str | None = None) -> None:
        """Write JSON to ``path`` if given, else to stdout."""
        text = _dumps(obj)
        if path:
            with open(path, "w") as fh:
                fh.write(text)
            self.outputs[path] = _digest(path)
        else:
            sys.stdout.write(text)

    def say(self, msg: str) -> None:
        if not self.args.quiet:
            print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommand handlers


CONSTRUCTIONS = ("gabidulin", "subgeometry", "guruswami", "guruswami-sum", "direct-sum",
                 "extend", "lift", "b1", "ex00", "dual-of-scattered", "scattered")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage("missing option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


class _Usage(Exception):
    pass


def cmd_construct(run: _Run) -> int:
    a = run.args
    name = a.name
    if name == "gabidulin":
        _need(a, "q", "n", "r")
        U = cons.gabidulin(a.q, a.n, a.r)
    elif name == "subgeometry":
        _need(a, "q", "n", "r", "m")
        U = cons.subgeometry(a.q, a.n, a.r, a.m)
    elif name == "guruswami":
        _need(a, "q", "n", "r", "h")
        U = cons.guruswami(a.q, a.n, a.r, a.h)
    elif name == "guruswami-sum":
        _need(a, "q", "n", "r", "h", "copies")
        U = cons.guruswami_sum(a.q, a.n, a.r, a.h, a.copies)
    elif name == "direct-sum":
        if len(a.inputs) < 2:
            raise _Usage("direct-sum needs at least two --input files")
        U = cons.direct_sum_many([run.load(path) for path in a.inputs])
    elif name == "extend":
        _need(a, "s")
        if len(a.inputs) != 1:
            raise _Usage("extend needs one --input file")
        U = cons.extend_random(run.load(a.inputs[0]), a.s, a.seed)
    elif name == "lift":
        _need(a, "s")
        if len(a.inputs) != 1:
            raise _Usage("lift needs one --input file")
        U = cons.hyperplane_lift(run.load(a.inputs[0]), a.s, a.k)
    elif name == "b1":
        _need(a, "q", "n", "r", "k")
        U = cons.b1(a.q, a.n, a.r, a.k)
    elif name == "ex00":
        _need(a, "q", "n", "r", "k")
        U = cons.ex00(a.q, a.n, a.r, a.k, a.seed)
    elif name == "dual-of-scattered":
        _need(a, "q", "n", "r")
        U = cons.from_scattered_dual(a.q, a.n, a.r)
    else:  # scattered
        _need(a, "q", "n", "r")
        U = cons.known_scattered(a.q, a.n, a.r)
    run.emit(U.to_json(), a.out)
    run.say(f"{name}: F_q-dimension {U.t} in V({U.ambient.r}, {U.ambient.q}^{U.ambient.n})")
    return EXIT_OK


def cmd_check(run: _Run) -> int:
    a = run.args
    U = run.load(a.input)
    if a.verify_cert:
        with open(a.verify_cert) as fh:
            cert = EvasivenessCertificate.from_json(json.load(fh))
        run.inputs[a.verify_cert] = _digest(a.verify_cert)
        ok = verify_certificate(U, cert)
        run.emit({"certificate": a.verify_cert, "reproduced": ok}, a.out)
        run.say(f"witness {'reproduces' if ok else 'does NOT reproduce'} k* = {cert.k_star}")
        return EXIT_OK if ok else EXIT_VIOLATED
    budget = a.budget if a.budget is not None else budget_from_env()
    cert = profile(U, a.h, a.strategy, budget, a.jobs)
    out = cert.to_json(timing=False)
    holds = a.k is None or cert.k_star <= a.k
    if a.k is not None:
        out["claim"] = {"h": a.h, "k": a.k, "holds": holds}
    run.emit(out, a.out)
    verdict = "" if a.k is None else f"; ({a.h},{a.k})-evasive: {'yes' if holds else 'NO'}"
    run.say(f"k* = {cert.k_star} for h = {a.h} ({cert.strategy}, {cert.examined} examined){verdict}")
    return EXIT_OK if holds else EXIT_VIOLATED


def cmd_dual(run: _Run) -> int:
    U = run.load(run.args.input)
    D = ordinary_dual(U)
    run.emit(D.to_json(), run.args.out)
    run.say(f"ordinary dual: dimension {D.t}")
    return EXIT_OK


def cmd_delsarte(run: _Run) -> int:
    U = run.load(run.args.input)
    D = delsarte_dual(U)
    run.emit(D.to_json(), run.args.out)
    run.say(f"Delsarte dual: dimension {D.t} in V({D.ambient.r}, {D.ambient.q}^{D.ambient.n})")
    return EXIT_OK


def cmd_bounds(run: _Run) -> int:
    a = run.args
    rep = bnd.best_bounds(a.q, a.n, a.r, a.h, a.k)
    run.emit(rep.to_json(), a.out)
    run.say(rep.table())
    return EXIT_OK


def cmd_case_table(run: _Run) -> int:
    a = run.args
    reps = bnd.case_table(a.q, a.n, a.r)
    run.emit({"q": a.q, "n": a.n, "r": a.r,
              "rows": [{"h": rp.h, "k": rp.k, "bound": rp.binding, "by": rp.binding_names} for rp in reps]},
             a.out)
    run.say(f"n = {a.n}, r = {a.r}, q = {a.q}")
    for rp in reps:
        run.say(f"  (h,k) = ({rp.h},{rp.k})  dim <= {rp.binding}  [{', '.join(rp.binding_names)}]")
    return EXIT_OK


def _emit_instance(run: _Run, inst: s35.Instance, sweep: dict | None) -> None:
    """Certificate to --out; the kernel to --out-subspace, or embedded when none is given."""
    a = run.args
    cert = inst.to_json()
    if sweep is not None:
        cert["d_sweep"] = sweep
    subspace = inst.subspace().to_json()
    if a.out_subspace:
        run.emit(subspace, a.out_subspace)
    else:
        cert["subspace"] = subspace
    run.emit(cert, a.out)


def _maybe_sweep(run: _Run, inst: s35.Instance) -> dict | None:
    if not run.args.sweep:
        return None
    budget = run.args.budget if run.args.budget is not None else budget_from_env()
    res = s35.d_sweep(inst.alphas, inst.q, inst.L, jobs=run.args.jobs, budget=budget)
    out = res.to_json()
    out.pop("ms")
    return out


def cmd_verify_table1(run: _Run) -> int:
    a = run.args
    try:
        inst = s35.reproduce_table1(a.p, a.s)
    except RecipeFailed as exc:
        run.emit({"p": a.p, "s": a.s, "scattered": False, "error": str(exc)}, a.out)
        run.say(str(exc))
        return EXIT_VIOLATED
    sweep = _maybe_sweep(run, inst)
    _emit_instance(run, inst, sweep)
    ok = inst.scattered and (sweep is None or sweep["scattered"])
    run.say(f"(p,s) = ({a.p},{a.s}): recipe {inst.recipe}, dim {inst.dim}, k* = {inst.fiber.max_j}"
            + ("" if sweep is None else f", d-sweep over {sweep['N']} d: {'clean' if sweep['scattered'] else 'BAD'}"))
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_search35(run: _Run) -> int:
    a = run.args
    budget = a.budget if a.budget is not None else 10_000
    if a.lam is not None:
        hits = s35.search(a.p, a.s, budget=1, recipe=a.recipe, candidates=[a.lam])
    else:
        hits = s35.search(a.p, a.s, start=a.start, budget=budget, recipe=a.recipe, jobs=a.jobs)
    inst = hits[0]
    sweep = _maybe_sweep(run, inst)
    _emit_instance(run, inst, sweep)
    run.say(f"hit: lambda = xi^{inst.lam_exponent}, recipe {inst.recipe}, dim {inst.dim}")
    return EXIT_OK


def cmd_random_scan(run: _Run) -> int:
    a = run.args
    rep = s35.random_scan(a.q, a.samples, a.seed)
    run.emit(rep, a.out)
    lo, hi = rep["ci95"]
    run.say(f"q = {a.q}: {rep['scattered']}/{a.samples} scattered ({100 * rep['fraction']:.2f}%, "
            f"95% CI {100 * lo:.2f}-{100 * hi:.2f}%)")
    return EXIT_OK


def cmd_qsystem(run: _Run) -> int:
    a = run.args
    U = run.load(a.input)
    budget = a.budget if a.budget is not None else budget_from_env()
    m, r, d = q_system_params(U, budget=budget, jobs=a.jobs)
    run.emit({"m": m, "r": r, "d": d, "n": U.ambient.n, "q": U.ambient.q}, a.out)
    run.say(f"[m, r, d] = [{m}, {r}, {d}]")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", "-o", help="write the primary JSON here instead of stdout")
    common.add_argument("--manifest", help="write a run manifest (JSON) here")
    common.add_argument("--seed", type=int, default=0, help="seed for numpy's PCG64 generator")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--budget", type=int, default=None, help="enumeration budget (default: $EVASIVE_BUDGET or 10^7)")
    common.add_argument("--quiet", action="store_true", help="suppress the human summary")

    ap = argparse.ArgumentParser(prog="evasive", description="Evasive subspaces over finite fields.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("construct", parents=[common], help="build an explicit subspace")
    p.add_argument("name", choices=CONSTRUCTIONS)
    for opt in ("q", "n", "r", "h", "k", "m", "s", "copies"):
        p.add_argument(f"--{opt}", type=int)
    p.add_argument("--input", dest="inputs", action="append", default=[], help="input subspace file (repeatable)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("check", parents=[common], help="measure k* = max dim(U ∩ W) over h-dim W")
    p.add_argument("input")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--k", type=int, help="claimed k; exit 3 if k* > k")
    p.add_argument("--strategy", default="auto", choices=("auto", "full_enum", "span_enum", "fiber"))
    p.add_argument("--verify-cert", help="re-check the witness of an existing certificate instead")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dual", parents=[common], help="ordinary (trace) dual")
    p.add_argument("input")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("delsarte-dual", parents=[common], help="Delsarte dual via a parity-check matrix")
    p.add_argument("input")
    p.set_defaults(func=cmd_delsarte)

    p = sub.add_parser("bounds", parents=[common], help="upper bounds for (h,k)-evasive subspaces")
    for opt in ("q", "n", "r", "h", "k"):
        p.add_argument(f"--{opt}", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("case-table", parents=[common], help="bounds for all (h,k) rows at r = 3")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=3)
    p.set_defaults(func=cmd_case_table)

    out35 = argparse.ArgumentParser(add_help=False)
    out35.add_argument("--out-subspace", help="write the kernel as a subspace of V(3, q^5) here")
    out35.add_argument("--sweep", action="store_true", help="also run the exhaustive d-sweep")

    p = sub.add_parser("search35", parents=[common, out35], help="search lambda for a scattered kernel")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=int, help="test only lambda = xi^LAMBDA")
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--recipe", default="auto", choices=("auto",) + s35.RECIPES)
    p.set_defaults(func=cmd_search35)

    p = sub.add_parser("verify-table1", parents=[common, out35], help="verify a tabulated lambda")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.set_defaults(func=cmd_verify_table1)

    p = sub.add_parser("random-scan", parents=[common], help="fraction of scattered random 7-dim subspaces")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=cmd_random_scan)

    p = sub.add_parser("qsystem", parents=[common], help="[m, r, d] parameters of a q-system")
    p.add_argument("input")
    p.set_defaults(func=cmd_qsystem)
    return ap


USAGE_ERRORS = (ValueError, OSError, KeyError, NoKnownScattered, _Usage)


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.jobs < 1:
        print("evasive: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    r = _Run(args)
    handler: Callable[[_Run], int] = args.func
    t0 = time.perf_counter()
    try:
        code = handler(r)
    except BudgetExceeded as exc:
        print(f"evasive: budget exceeded: {exc}", file=sys.stderr)
        code = EXIT_BUDGET
    except USAGE_ERRORS as exc:
        print(f"evasive: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except EvasiveError as exc:
        print(f"evasive: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_VIOLATED
    if args.manifest:
        params = {k: v for k, v in vars(args).items() if k not in ("func", "manifest")}
        man = RunManifest(args.subcommand, argv, params, __version__, args.jobs,
                          r.inputs, r.outputs, round(time.perf_counter() - t0, 3), code)
        with open(args.manifest, "w") as fh:
            fh.write(_dumps(man.to_json()))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
