"""Command-line entry point: ``borderrank <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 I/O error,
4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from . import checks
from .constructions import (
    BadDimsError, LambdaSource, aft_prime_parts, aft_prime_tensor, aft_tensor,
    eps_residual, graded_tensor, matmul_tensor, polymult_truncated, random_rank_sum,
    random_tensor,
)
from .exactmath import MERSENNE61, RETRY_PRIMES, rank_certified, rank_mod_p
from .griesser import (
    GRIESSER_PRIME, STRATEGIES, BadRError, make_instance, matmul_profile, witness_search,
)
from .tensor3 import (
    Tensor3, TensorFormatError, basis_change, find_A_specialization, load, reversal,
    save, specialize_A, to_dict, from_dict,
)
from .youngflat import (
    BadPError, SingularSliceError, best_border_rank_lb, border_rank_lb,
    commutator_det_test, factorization_check, young_rank,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3, 4
CERT_FORMAT = "borderrank-certificate"
CERT_VERSION = 1


class BadSpecError(ValueError):
    pass


INPUT_ERRORS = (BadSpecError, TensorFormatError, BadDimsError, BadPError, BadRError,
                SingularSliceError)


@dataclass
class RunConfig:
    subcommand: str
    source: str | None = None
    prime: int = MERSENNE61
    seed: int = 0
    p: int | None = None
    r: int | None = None
    samples: int = 10_000
    out: str | None = None
    format: str = "report"
    tolerance: float = 1e-8
    extra: dict = field(default_factory=dict)

    def primes(self) -> tuple[int, ...]:
        return (self.prime,) + tuple(q for q in RETRY_PRIMES if q != self.prime)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)


# Builder specs: "name:key=value,key=value".

def _parse_params(body: str) -> dict:
    params = {}
    for item in filter(None, body.split(",")):
        if "=" not in item:
            raise BadSpecError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    return params


def _int(params, key, default=None) -> int:
    if key not in params:
        if default is None:
            raise BadSpecError(f"missing parameter {key!r}")
        return default
    try:
        return int(params[key])
    except ValueError as exc:
        raise BadSpecError(f"{key} must be an integer, got {params[key]!r}") from exc


def parse_lambda(text: str) -> LambdaSource:
    kind, _, rest = text.partition(":")
    if kind == "explicit":
        return LambdaSource.explicit()
    if kind == "seeded":
        bits = rest.split(":") if rest else []
        try:
            seed = int(bits[0]) if bits else 0
            modulus = int(bits[1]) if len(bits) > 1 else MERSENNE61
        except ValueError as exc:
            raise BadSpecError(f"bad lambda spec {text!r}") from exc
        return LambdaSource.seeded(seed, modulus)
    raise BadSpecError(f"unknown lambda source {text!r} (use seeded:N or explicit)")


def _build_graded(q):
    m = _int(q, "m")
    return graded_tensor(m, _int(q, "p", (m - 1) // 2), parse_lambda(q.get("lambda", "seeded:0")))


def _build_aft_prime(q):
    return aft_prime_tensor(_int(q, "k"), padded=bool(_int(q, "padded", 0)))


def _build_matmul(q):
    return matmul_tensor(_int(q, "n"), q.get("presentation", "standard"))


def _build_random(q):
    return random_tensor(_int(q, "a"), _int(q, "b"), _int(q, "c"), _int(q, "seed", 0),
                         _int(q, "p", MERSENNE61))


def _build_ranksum(q):
    return random_rank_sum(_int(q, "a"), _int(q, "b"), _int(q, "c"), _int(q, "r"),
                           _int(q, "seed", 0), _int(q, "bound", 5))


BUILDERS = {
    "graded": _build_graded,
    "aft": lambda q: aft_tensor(_int(q, "k")),
    "aft-prime": _build_aft_prime,
    "matmul": _build_matmul,
    "polymult": lambda q: polymult_truncated(_int(q, "m")),
    "random": _build_random,
    "ranksum": _build_ranksum,
}


def split_spec(spec: str) -> tuple[str, dict]:
    name, _, body = spec.partition(":")
    if name not in BUILDERS:
        raise BadSpecError(f"unknown builder {name!r}; known: {', '.join(BUILDERS)}")
    return name, _parse_params(body)


def build(spec: str) -> Tensor3:
    name, params = split_spec(spec)
    try:
        return BUILDERS[name](params)
    except (BadDimsError, ValueError) as exc:
        if isinstance(exc, BadSpecError):
            raise
        raise BadSpecError(f"{spec}: {exc}") from exc


def load_source(source: str) -> Tensor3:
    """A builder spec, or a path to a tensor file."""
    if source is None:
        raise BadSpecError("a tensor source is required")
    name = source.partition(":")[0]
    if name in BUILDERS:
        return build(source)
    path = Path(source)
    if not path.exists():
        raise BadSpecError(f"{source!r} is neither a builder spec nor an existing file")
    return load(path)


# Upper bounds attached to known families.

def known_upper_bound(source: str | None, T: Tensor3, tolerance: float = 1e-8):
    """(upper, method, notes) for families with a verified decomposition, else None."""
    if source is None or source.partition(":")[0] not in ("aft", "aft-prime"):
        return None
    name, q = split_spec(source)
    k = _int(q, "k")
    m = 2 ** k
    P = polymult_truncated(m)
    Trev = basis_change(aft_tensor(k), gC=reversal(m))
    S = find_A_specialization(P, Trev)
    embeds = S is not None and specialize_A(P, S) == Trev
    res = eps_residual(m, 1e-3) / 1e-3
    if not embeds or abs(res - 1.0) > 0.1 + tolerance:
        return None
    if name == "aft":
        return m, "specialization-ub", [f"C-reversed tensor is a restriction of C[X]/(X^{m})",
                                        f"eps-family residual/eps = {res:.6f}"]
    base, extra = aft_prime_parts(k)
    rank_extra = max(rank_mod_p(extra.flatten(mode)) for mode in "ABC")
    if base + extra != aft_prime_tensor(k):
        return None
    return m + rank_extra, "specialization-ub", [
        f"AFT part (border rank {m}) plus an extra part of rank {rank_extra}",
        f"eps-family residual/eps = {res:.6f}"]


# Subcommands.  Each returns (payload dict, rendered text, passed flag).

def run_construct(cfg: RunConfig, T: Tensor3):
    if cfg.out:
        save(T, cfg.out)
    payload = {"dims": list(T.dims), "nnz": T.nnz, "digest": T.digest(), "out": cfg.out}
    text = f"dims = {T.dims}, nonzeros = {T.nnz}" + (f", written to {cfg.out}" if cfg.out else "")
    return payload, text, True


def run_slice(cfg: RunConfig, T: Tensor3):
    j = int(cfg.extra.get("index", 0))
    X = T.slice_A(j)
    rows = [[int(v) for v in row] for row in X]
    text = "\n".join(" ".join(f"{v:>4}" for v in row) for row in rows)
    return {"index": j, "slice": [[str(v) for v in row] for row in rows]}, text, True


def run_flatten_rank(cfg: RunConfig, T: Tensor3):
    out = {}
    for mode in cfg.extra.get("modes", "ABC"):
        rank, cert, prime = rank_certified(T.flatten(mode), cfg.primes())
        out[mode] = {"rank": rank, "certified": cert, "prime": prime}
    text = ", ".join(f"{m}: {v['rank']}" + ("" if v["certified"] else " (probabilistic)")
                     for m, v in out.items())
    return out, text, True


def run_young_rank(cfg: RunConfig, T: Tensor3):
    p = 1 if cfg.p is None else cfg.p
    rank, cert, prime = young_rank(T, p, cfg.primes())
    M_cols = T.dims[1] * comb(T.dims[0], p)
    payload = {"p": p, "rank": rank, "columns": M_cols, "kernel": M_cols - rank,
               "certified": cert, "prime": prime}
    text = f"p = {p}: rank {rank} of {M_cols} columns (kernel {M_cols - rank}), " + (
        "certified" if cert else "probabilistic")
    return payload, text, True


def run_bound(cfg: RunConfig, T: Tensor3):
    primes = cfg.primes()
    rep = border_rank_lb(T, cfg.p, primes) if cfg.p is not None else best_border_rank_lb(T, primes)
    rep.seed = cfg.seed
    a, b, c = T.dims
    if a % 2 == 1 and b == c and a >= 3:
        try:
            ct = commutator_det_test(T, primes, seed=cfg.seed)
            rep.params["reduced_det_nonzero"] = ct.reduced_nonzero
            rep.params["block_det_nonzero"] = ct.nonzero
            rep.notes.extend(ct.report.notes)
        except SingularSliceError as exc:
            rep.notes.append(f"commutator path skipped: {exc}")
    ub = known_upper_bound(cfg.source, T, cfg.tolerance)
    passed = True
    if ub is not None:
        rep.upper, method, notes = ub
        rep.notes.append(f"upper bound via {method}")
        rep.notes.extend(notes)
        passed = rep.lower <= rep.upper
        if not passed:
            rep.notes.append("lower bound exceeds upper bound")
    return rep.to_dict(), rep.render(), passed


def run_commutator_det(cfg: RunConfig, T: Tensor3):
    ct = commutator_det_test(T, cfg.primes(), seed=cfg.seed)
    ct.report.seed = cfg.seed
    text = (f"block determinant {'nonzero' if ct.nonzero else 'zero'}, "
            f"reduced determinant {'nonzero' if ct.reduced_nonzero else 'zero'}\n"
            + ct.report.render())
    return ct.report.to_dict(), text, True


def run_factor_check(cfg: RunConfig, T: Tensor3):
    rep = factorization_check(T)
    d = {k: (str(v) if isinstance(v, int) and not isinstance(v, bool) else v)
         for k, v in asdict(rep).items()}
    d["chain_factors"] = [str(f) for f in rep.chain_factors]
    text = (f"m = {rep.m}, p = {rep.p}\n"
            f"|det full| = det(lower-left)^2: {rep.square_holds}\n"
            f"chain sizes {rep.chain_sizes} (expected {rep.expected_sizes})\n"
            f"chain product = +-det(lower-left): {rep.product_matches}")
    return d, text, rep.product_matches


def run_griesser(cfg: RunConfig, T: Tensor3):
    if cfg.r is None:
        raise BadRError("--r is required")
    inst = make_instance(T, seed=cfg.seed)
    strategies = tuple(cfg.extra.get("strategies") or STRATEGIES)
    res = witness_search(inst, cfg.r, strategies, cfg.samples, cfg.seed, GRIESSER_PRIME)
    payload = {
        "r": res.r, "m": res.m, "target": res.target, "found": res.found,
        "strategies": res.strategies, "samples": res.samples, "seed": res.seed,
        "prime": res.prime, "normalization": inst.normalization,
        "witness": None if not res.found else {
            "E": [[str(int(v)) for v in row] for row in res.witness.E],
            "image_dim": res.witness.image_dim, "strategy": res.witness.strategy},
    }
    return payload, res.summary() + f"\nseed = {cfg.seed}", True


def run_griesser_matmul(cfg: RunConfig, T):
    n = int(cfg.extra.get("n", 2))
    m = n * n
    rs = [cfg.r] if cfg.r is not None else list(range(m + 1, 2 * m))
    rows, lines = [], []
    for r in rs:
        pr = matmul_profile(n, r)
        rows.append(asdict(pr) | {"status": pr.status})
        lines.append(f"r={r}: dim E={2 * m - r}, d={pr.d}, e={pr.e}, formula={pr.formula}, "
                     f"measured={pr.measured}, need<={pr.threshold}: {pr.status}")
    ok = all(row["formula"] == row["measured"] for row in rows)
    return {"n": n, "profile": rows}, "\n".join(lines), ok


SUBCOMMANDS = {
    "construct": run_construct,
    "slice": run_slice,
    "flatten-rank": run_flatten_rank,
    "young-rank": run_young_rank,
    "bound": run_bound,
    "commutator-det": run_commutator_det,
    "factor-check": run_factor_check,
    "griesser": run_griesser,
    "griesser-matmul": run_griesser_matmul,
}
NO_TENSOR = {"griesser-matmul"}


def execute(cfg: RunConfig, T: Tensor3 | None = None):
    if T is None and cfg.subcommand not in NO_TENSOR:
        T = load_source(cfg.source)
    return SUBCOMMANDS[cfg.subcommand](cfg, T)


def certificate(cfg: RunConfig, T: Tensor3 | None, payload: dict, passed: bool) -> dict:
    return {
        "format": CERT_FORMAT,
        "version": CERT_VERSION,
        "config": cfg.to_dict(),
        "tensor": None if T is None else to_dict(T),
        "result": _jsonable(payload),
        "passed": passed,
    }


def _jsonable(x):
    return json.loads(json.dumps(x, default=_default))


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def reverify(cert: dict) -> tuple[bool, dict]:
    """Recompute a certificate's result from its embedded config and tensor."""
    if cert.get("format") != CERT_FORMAT:
        raise TensorFormatError("not a borderrank certificate")
    cfg = RunConfig.from_dict(cert["config"])
    T = None if cert.get("tensor") is None else from_dict(cert["tensor"])
    if cfg.subcommand == "construct":
        cfg.out = None
    payload, _, passed = execute(cfg, T)
    fresh = _jsonable(payload)
    if cfg.subcommand == "construct":
        fresh["out"] = cert["result"].get("out")
    return fresh == cert["result"] and passed == cert.get("passed"), fresh


# Argument parsing.

def _common(sp, tensor=True):
    if tensor:
        sp.add_argument("source", help="builder spec (e.g. graded:m=5,p=2) or tensor file")
    sp.add_argument("--prime", type=int, default=MERSENNE61)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("report", "machine"), default="report")
    sp.add_argument("--tolerance", type=float, default=1e-8)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="borderrank", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)
    _common(sub.add_parser("construct", help="build a tensor and write it to --out"))
    sp = sub.add_parser("slice", help="print one A-slice")
    _common(sp)
    sp.add_argument("--index", type=int, default=0)
    sp = sub.add_parser("flatten-rank", help="ranks of the three flattenings")
    _common(sp)
    sp.add_argument("--modes", default="ABC")
    sp = sub.add_parser("young-rank", help="rank of the Young flattening")
    _common(sp)
    sp.add_argument("--p", type=int, default=1)
    sp = sub.add_parser("bound", help="border rank bounds (best over p unless --p)")
    _common(sp)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--best", action="store_true", help="maximize over p (the default)")
    _common(sub.add_parser("commutator-det", help="commutator block determinant test"))
    _common(sub.add_parser("factor-check", help="block determinant factorization check"))
    sp = sub.add_parser("griesser", help="witness search for the Griesser test")
    _common(sp)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--strategy", action="append", choices=STRATEGIES)
    sp = sub.add_parser("griesser-matmul", help="matrix multiplication image-dimension profile")
    _common(sp, tensor=False)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--r", type=int, default=None)
    sp = sub.add_parser("verify-paper", help="run every acceptance check")
    sp.add_argument("--only", action="append", default=None,
                    help=f"group ({', '.join(checks.GROUPS)}) or check id; repeatable")
    sp.add_argument("--m-max", type=int, default=7)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--tolerance", type=float, default=1e-8)
    sp.add_argument("--stretch", action="store_true", help="include the m = 9 case")
    sp.add_argument("--format", choices=("report", "machine"), default="report")
    sp = sub.add_parser("reverify", help="recompute a machine certificate and compare")
    sp.add_argument("certificate")
    return ap


def config_from_args(args) -> RunConfig:
    extra = {}
    for key in ("index", "modes", "n"):
        if hasattr(args, key):
            extra[key] = getattr(args, key)
    if getattr(args, "strategy", None):
        extra["strategies"] = list(args.strategy)
    return RunConfig(
        subcommand=args.subcommand, source=getattr(args, "source", None),
        prime=args.prime, seed=args.seed, p=getattr(args, "p", None), r=getattr(args, "r", None),
        samples=getattr(args, "samples", 10_000), out=args.out, format=args.format,
        tolerance=args.tolerance, extra=extra)


def _verify_paper(args) -> int:
    opts = checks.CheckOptions(m_max=args.m_max, seed=args.seed, samples=args.samples,
                               rel_tol=args.tolerance, stretch=args.stretch)
    only = set(args.only) if args.only else None
    if only and not only <= set(checks.GROUPS) | {str(i) for i in range(1, len(checks.CHECKS) + 1)}:
        raise BadSpecError(f"unknown --only value; groups are {', '.join(checks.GROUPS)}")
    results = checks.run_checks(only, opts)
    if args.format == "machine":
        print(json.dumps([asdict(r) for r in results], indent=1))
    else:
        print(f"seed = {args.seed}, m-max = {args.m_max}")
        for r in results:
            print(r.line())
            for d in r.details:
                print(f"    {d}")
        npass = sum(r.passed for r in results)
        print(f"{npass}/{len(results)} checks passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _reverify(args) -> int:
    cert = json.loads(Path(args.certificate).read_text())
    ok, _ = reverify(cert)
    print("certificate reproduced" if ok else "certificate does NOT match a fresh computation")
    return EXIT_OK if ok else EXIT_FAIL


def run(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.subcommand == "verify-paper":
        return _verify_paper(args)
    if args.subcommand == "reverify":
        return _reverify(args)
    cfg = config_from_args(args)
    T = None if cfg.subcommand in NO_TENSOR else load_source(cfg.source)
    payload, text, passed = execute(cfg, T)
    if cfg.format == "machine":
        cert = certificate(cfg, T, payload, passed)
        blob = json.dumps(cert, indent=1, sort_keys=True)
        if cfg.out and cfg.subcommand != "construct":
            Path(cfg.out).write_text(blob + "\n")
        else:
            print(blob)
    else:
        print(text)
        if cfg.out and cfg.subcommand != "construct":
            Path(cfg.out).write_text(text + "\n")
    return EXIT_OK if passed else EXIT_FAIL


def main(argv=None) -> int:
    try:
        code = run(argv)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_INPUT
    except (IndexError, KeyError) as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        code = EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_IO
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_INTERNAL
    return code


if __name__ == "__main__":
    sys.exit(main())
