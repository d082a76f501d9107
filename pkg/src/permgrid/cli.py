"""Command-line interface: ``permgrid count|grid|series|stats|sample|verify``.

Exit status is 0 on success, 1 on a domain error (bad permutation, permutation
outside the class, size over a limit, failed verification) and 2 on a usage
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .errors import PermGridError, PreconditionError
from .perm import BASIS_D, BASIS_H, PatternBasis, enumerate_class, parse_perm

STREAM_BLOCK = 1024  # samples per random stream; stream j is seeded with seed + j


def _emit(args, human: str, record) -> None:
    print(json.dumps(record) if args.json else human)


# ---- count ------------------------------------------------------------------------------

def cmd_count(args) -> int:
    basis = PatternBasis.parse(args.basis)
    if args.method == "brute":
        counts = enumerate_class(basis, args.n, threads=args.threads).sequence()
    else:
        from .grammars import grammar_D, grammar_H

        if basis == BASIS_D:
            counts = grammar_D(max(args.n, 1), "one", "one").at_unity()[1:args.n + 1]
        elif basis == BASIS_H:
            counts = grammar_H(max(args.n, 1), "one").at_unity()[1:args.n + 1]
        else:
            raise PreconditionError(f"no grammar for basis {basis}; series method covers {BASIS_D} and {BASIS_H}")
    _emit(args, " ".join(map(str, counts)),
          {"basis": str(basis), "method": args.method, "n_max": args.n, "counts": counts})
    return 0


# ---- grid ---------------------------------------------------------------------------------

def cmd_grid(args) -> int:
    from .structure import canonical_gridding_D, canonical_gridding_H, render_ascii

    perm = parse_perm(args.perm)
    cg = canonical_gridding_D(perm) if args.cls == "D" else canonical_gridding_H(perm)
    rec = cg.to_record()
    left = ",".join(map(str, rec["left_values"]))
    top = ",".join(map(str, rec["top_values"]))
    human = f"{render_ascii(cg)}\nc={rec['c']}, r={rec['r']}, left={{{left}}}, top={{{top}}}\n{json.dumps(rec)}"
    _emit(args, human, rec)
    return 0


# ---- series ----------------------------------------------------------------------------------

def _markers(text: str | None, cls: str) -> tuple[str, str]:
    names = {m.strip() for m in (text or "").split(",") if m.strip()}
    unknown = names - {"t", "l"}
    if unknown:
        raise PreconditionError(f"unknown marker(s) {sorted(unknown)}; use t and/or l")
    if cls == "H" and "l" in names:
        raise PreconditionError("class H has no left points; only the t marker applies")
    return ("sym" if "t" in names else "one"), ("sym" if "l" in names else "one")


def _monomial(a: int, b: int) -> str:
    parts = []
    for name, k in (("t", a), ("l", b)):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return " ".join(parts) or "1"


def cmd_series(args) -> int:
    from .grammars import grammar_D, grammar_H

    t, l = _markers(args.markers, args.cls)
    if args.order < 1:
        raise PreconditionError("order must be at least 1")
    F = grammar_D(args.order, t, l) if args.cls == "D" else grammar_H(args.order, t)
    symbolic = "sym" in (t, l)
    if symbolic:
        coeffs = [{_monomial(a, b): str(c) for (a, b), c in sorted(F.terms(n).items())} for n in range(args.order + 1)]
        lines = [f"{n}: " + " + ".join(f"{c}*{m}" if m != "1" else c for m, c in row.items()) if row else f"{n}: 0"
                 for n, row in enumerate(coeffs)]
    else:
        coeffs = [str(c) for c in F.at_unity()]
        lines = [f"{n}: {c}" for n, c in enumerate(coeffs)]
    spec = ",".join(m for m, mode in (("t", t), ("l", l)) if mode == "sym")
    _emit(args, "\n".join(lines), {"class": args.cls, "order": args.order, "marker_spec": spec, "coefficients": coeffs})
    return 0


# ---- stats -----------------------------------------------------------------------------------

def cmd_stats(args) -> int:
    from .analysis import distribution
    from .grammars import closed_form_D, closed_form_H

    if args.n < 1:
        raise PreconditionError("n must be at least 1")
    if args.cls == "H":
        if args.stat != "top":
            raise PreconditionError("class H has no left points")
        F = closed_form_H(args.n, t="sym")
    else:
        F = closed_form_D(args.n, t="sym") if args.stat == "top" else closed_form_D(args.n, l="sym")
    probs = distribution(F, args.n, "t" if args.stat == "top" else "l")
    rows = [(args.n, k, p.numerator, p.denominator, float(p)) for k, p in enumerate(probs)]
    if args.json:
        print(json.dumps([dict(zip(("n", "k", "num", "den", "float"), r)) for r in rows]))
    else:
        print("n,k,num,den,float")
        for r in rows:
            print(f"{r[0]},{r[1]},{r[2]},{r[3]},{r[4]:.12g}")
    return 0


# ---- sample ----------------------------------------------------------------------------------

def _sample_block(job) -> list[str]:
    from .sampler import Sampler, make_rng

    n, cls, seed, count = job
    s = Sampler(n, cls)
    rng = make_rng(seed)
    return [" ".join(map(str, s.sample(n, rng).values)) for _ in range(count)]


def cmd_sample(args) -> int:
    if args.n < 1 or args.count < 0:
        raise PreconditionError("n must be positive and count non-negative")
    if args.stats:
        from .sampler import sample_stats

        st = sample_stats(args.n, max(args.count, 1), args.seed, args.cls)
        print(json.dumps(st.as_dict()))
        return 0
    jobs = []
    for j, start in enumerate(range(0, args.count, STREAM_BLOCK)):
        jobs.append((args.n, args.cls, args.seed + j, min(STREAM_BLOCK, args.count - start)))
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            blocks = list(pool.map(_sample_block, jobs))
    else:
        blocks = [_sample_block(job) for job in jobs]
    lines = [x for b in blocks for x in b]
    if args.json:
        print(json.dumps({"class": args.cls, "n": args.n, "seed": args.seed, "samples": lines}))
    else:
        sys.stdout.write("".join(x + "\n" for x in lines))
    return 0


# ---- verify -------------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    from . import acceptance

    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = []
    for r in acceptance.run("fast" if args.suite == "fast" else "full", only):
        results.append(r)
        if not args.json:
            print(r.line(), flush=True)
    passed = sum(r.passed for r in results)
    if args.json:
        print(json.dumps({"suite": args.suite, "passed": passed, "total": len(results),
                          "results": [r.__dict__ for r in results]}))
    else:
        print(f"{passed}/{len(results)} checks passed")
    return 0 if passed == len(results) else 1


# ---- wiring -------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable JSON output")
    common.add_argument("--threads", type=int, default=1, help="cap on worker processes")

    p = argparse.ArgumentParser(prog="permgrid", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="count a class for n = 1..N")
    c.add_argument("--basis", default="4213,2143")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--method", choices=("brute", "series"), default="brute")
    c.set_defaults(func=cmd_count)

    g = sub.add_parser("grid", parents=[common], help="canonical gridding of a permutation")
    g.add_argument("--perm", required=True, help='e.g. "2 4 1 3"')
    g.add_argument("--class", dest="cls", choices=("D", "H"), default="D")
    g.set_defaults(func=cmd_grid)

    s = sub.add_parser("series", parents=[common], help="generating-function coefficients")
    s.add_argument("--class", dest="cls", choices=("D", "H"), default="D")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--markers", default="", help="comma list of symbolic markers: t, l")
    s.set_defaults(func=cmd_series)

    st = sub.add_parser("stats", parents=[common], help="exact distribution of top or left points")
    st.add_argument("--class", dest="cls", choices=("D", "H"), default="D")
    st.add_argument("--n", type=int, required=True)
    st.add_argument("--stat", choices=("left", "top"), required=True)
    st.set_defaults(func=cmd_stats)

    sa = sub.add_parser("sample", parents=[common], help="uniform random permutations")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--count", type=int, default=1)
    sa.add_argument("--seed", type=int, default=0)
    sa.add_argument("--class", dest="cls", choices=("D", "H"), default="D")
    sa.add_argument("--stats", action="store_true", help="print summary statistics instead of samples")
    sa.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", parents=[common], help="run the cross-check suites")
    v.add_argument("--suite", choices=("all", "fast"), default="fast")
    v.add_argument("--only", default="", help="comma list of check numbers")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except PermGridError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
