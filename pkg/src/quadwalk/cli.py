"""Command-line entry point: ``quadwalk <subcommand> ...``.

Exit status is 0 when every check passes, 1 when a verification fails (the
failing item is named on stderr) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import InvalidModel, ParseError, QuadwalkError, TOutOfRange
from .model import StepModel, load_model

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
ORACLE_N = 30


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    n: int | None = None
    precision: int | None = None
    t: str | None = None
    y: str | None = None
    format: str = "json"
    path: str | None = None
    seed: int | None = None
    options: dict = field(default_factory=dict)


# -- argument handling -------------------------------------------------------------------


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers 'a,b', got {text!r}") from None
    return a, b


def _poles(text: str) -> tuple[tuple[Fraction, int], ...]:
    """``-1:2,1/2:1`` -> ``((-1, 2), (1/2, 1))``; a bare location has multiplicity 1."""
    out = []
    for item in filter(None, text.split(",")):
        loc, _, mult = item.partition(":")
        try:
            out.append((Fraction(loc), int(mult) if mult else 1))
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad pole spec {item!r}") from None
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadwalk", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None, help="seed for randomized sampling")
    sub = p.add_subparsers(dest="command", required=True)

    def model_cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("model", help="catalog name or JSON model file")
        s.add_argument("--lam", type=_fraction, default=None, help="value of the weight parameter lam")
        return s

    s = model_cmd("enumerate", "count quadrant walks")
    s.add_argument("-n", type=int, required=True, help="maximal length")
    s.add_argument("--start", type=_pair, default=(0, 0))
    s.add_argument("--format", choices=("csv", "json"), default="csv")

    s = model_cmd("group", "orbit of the group of the walk")
    s.add_argument("--bound", type=int, default=400)
    s.add_argument("--seed", type=int, default=None, dest="sub_seed")

    s = sub.add_parser("verify-cert", help="verify a certificate file")
    s.add_argument("path")

    s = sub.add_parser("verify-tables", help="verify every builtin certificate")
    s.add_argument("--jobs", type=int, default=4)

    s = model_cmd("search-decoupling", "search a decoupling function G(y)")
    s.add_argument("--range", type=_pair, default=(-2, 2), dest="laurent_range")
    s.add_argument("--poles", type=_poles, default=())
    s.add_argument("--format", choices=("json", "text"), default="json")

    s = sub.add_parser("certify-gessel", help="series certificates for Gessel walks")
    s.add_argument("-n", type=int, default=20)

    for name, help_ in (("gluing", "branch points, periods and invariants"),
                        ("evaluate-q", "tQ(0, y) against the enumeration oracle"),
                        ("curve", "samples of the curve L as CSV")):
        s = model_cmd(name, help_)
        s.add_argument("-t", type=_fraction, required=True)
        s.add_argument("--precision", type=int, default=None)
        if name == "evaluate-q":
            s.add_argument("-y", type=_fraction, required=True)
            s.add_argument("-n", type=int, default=ORACLE_N, help="oracle truncation order")
        if name == "curve":
            s.add_argument("-n", type=int, default=50, help="number of samples")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = getattr(args, "sub_seed", None)
    cfg = RunConfig(
        command=args.command,
        model=getattr(args, "model", None),
        n=getattr(args, "n", None),
        precision=getattr(args, "precision", None),
        t=str(args.t) if getattr(args, "t", None) is not None else None,
        y=str(args.y) if getattr(args, "y", None) is not None else None,
        format=getattr(args, "format", "json"),
        path=getattr(args, "path", None),
        seed=seed if seed is not None else args.seed,
    )
    for key in ("lam", "start", "bound", "jobs", "laurent_range", "poles"):
        if getattr(args, key, None) is not None:
            cfg.options[key] = getattr(args, key)
    if cfg.n is not None and cfg.n < 0:
        raise UsageError("-n must be nonnegative")
    if cfg.precision is not None and cfg.precision < 10:
        raise UsageError("--precision must be at least 10")
    return cfg


def _echo(cfg: RunConfig) -> dict:
    out = {k: v for k, v in asdict(cfg).items() if v is not None and k != "options"}
    for k, v in cfg.options.items():
        if k == "poles":
            v = [[str(p), m] for p, m in v]
        elif isinstance(v, Fraction):
            v = str(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


def _model(cfg: RunConfig) -> StepModel:
    m = load_model(cfg.model)
    lam = cfg.options.get("lam")
    if lam is not None:
        if "lam" not in m.weight_symbols:
            raise UsageError(f"{m.name} has no parameter lam")
        m = m.specialize(lam=lam)
    return m


def _numeric_model(cfg: RunConfig) -> StepModel:
    m = _model(cfg)
    if m.weight_symbols:
        raise UsageError(f"{m.name} has symbolic weights {list(m.weight_symbols)}; pass --lam")
    return m


# -- number serialization ------------------------------------------------------------------


def _number(v, mp, digits: int) -> dict:
    """Decimal string at ``digits`` significant digits plus a machine-double field."""
    if isinstance(v, (Fraction, int)):
        return {"exact": str(v), "float": float(v)}
    if v == mp.inf:
        return {"value": "inf", "float": None}
    if isinstance(v, mp.mpc) or isinstance(v, complex):
        v = mp.mpc(v)
        if v.imag == 0:
            v = v.real
        else:
            return {
                "re": mp.nstr(v.real, digits),
                "im": mp.nstr(v.imag, digits),
                "float": [float(v.real), float(v.imag)],
            }
    return {"value": mp.nstr(v, digits), "float": float(v)}


def _emit(report: dict, out) -> None:
    json.dump(report, out, indent=2, sort_keys=False)
    out.write("\n")


# -- commands --------------------------------------------------------------------------------


def cmd_enumerate(cfg: RunConfig, out) -> int:
    from .enumeration import count_walks

    m = _model(cfg)
    start = cfg.options.get("start", (0, 0))
    table = count_walks(m, cfg.n, start)
    rows = [(i, j, n, v) for n in range(cfg.n + 1) for (i, j), v in sorted(table.layer(n).items())]
    if cfg.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("i", "j", "n", "count"))
        for i, j, n, v in rows:
            w.writerow((i, j, n, v))
    else:
        _emit({
            "config": _echo(cfg),
            "model": m.name,
            "counts": [[i, j, n, str(v)] for i, j, n, v in rows],
            "q00": [str(table.q(0, 0, n)) for n in range(cfg.n + 1)],
        }, out)
    return EXIT_OK


def cmd_group(cfg: RunConfig, out) -> int:
    from .group import orbit

    m = _numeric_model(cfg)
    kwargs = {"bound": cfg.options.get("bound", 400)}
    if cfg.seed is not None:
        kwargs["seed"] = cfg.seed
    report = orbit(m, **kwargs)
    _emit({"config": _echo(cfg), "model": m.name, **report.to_dict()}, out)
    return EXIT_OK


def _check_lines(results) -> tuple[list[dict], list[str]]:
    lines, failed = [], []
    for name, kind, ok in results:
        lines.append({"item": name, "check": kind, "status": "PASS" if ok else "FAIL"})
        if not ok:
            failed.append(f"{name}:{kind}")
    return lines, failed


def _finish(report: dict, failed: list[str], out, err) -> int:
    report["ok"] = not failed
    _emit(report, out)
    for item in failed:
        err.write(f"FAILED {item}\n")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_verify_cert(cfg: RunConfig, out, err) -> int:
    from .certificates import parse_certificate_text, verify_decoupling, verify_invariant

    path = Path(cfg.path)
    if not path.exists():
        raise UsageError(f"no such certificate file {cfg.path!r}")
    cert = parse_certificate_text(path.read_text())
    name = cert.model.name
    results = []
    if cert.invariant is not None:
        results.append((name, "invariant", _safe(verify_invariant, cert.model, cert.invariant)))
    if cert.decoupling is not None:
        results.append((name, "decoupling", _safe(verify_decoupling, cert.model, cert.decoupling)))
    if not results:
        raise UsageError("certificate file has neither I1/I2 nor G")
    lines, failed = _check_lines(results)
    return _finish({"config": _echo(cfg), "results": lines}, failed, out, err)


def _safe(check, *args) -> bool:
    try:
        return bool(check(*args))
    except QuadwalkError:
        return False


def cmd_verify_tables(cfg: RunConfig, out, err) -> int:
    from .certificates import builtin_certificate_table, verify_entries

    table = builtin_certificate_table(check=False)
    # each entry is an independent pure check; results keep table order
    with ThreadPoolExecutor(max_workers=max(1, cfg.options.get("jobs", 4))) as pool:
        chunks = list(pool.map(lambda item: verify_entries([item]), table.items()))
    lines, failed = _check_lines([r for chunk in chunks for r in chunk])
    return _finish({"config": _echo(cfg), "results": lines}, failed, out, err)


def cmd_search_decoupling(cfg: RunConfig, out, err) -> int:
    from .certificates import Ansatz, format_certificate, search_decoupling, verify_decoupling

    m = _numeric_model(cfg) if cfg.options.get("lam") is not None else _model(cfg)
    try:
        ansatz = Ansatz(tuple(cfg.options.get("laurent_range", (-2, 2))), cfg.options.get("poles", ()))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    pair = search_decoupling(m, ansatz)
    if cfg.format == "text":
        out.write(format_certificate(m.name, None, pair) if pair else f"model: {m.name}\n# absent\n")
        return EXIT_OK
    report = {"config": _echo(cfg), "model": m.name, "found": pair is not None}
    failed = []
    if pair is not None:
        report.update(F=str(pair.F), G=str(pair.G))
        if not verify_decoupling(m, pair):
            failed.append(f"{m.name}:decoupling")
    return _finish(report, failed, out, err)


def cmd_certify_gessel(cfg: RunConfig, out, err) -> int:
    from .series_lab import certify_gessel

    report = certify_gessel(cfg.n)
    d = report.to_dict()
    failed = [k[:-3] for k in ("invariant_ok", "decoupling_ok", "cubic_ok", "z_ok") if not d[k]]
    return _finish({"config": _echo(cfg), **d}, failed, out, err)


def _context(cfg: RunConfig):
    from .analytic import GluingContext

    return GluingContext(_numeric_model(cfg), Fraction(cfg.t), cfg.precision)


def cmd_gluing(cfg: RunConfig, out) -> int:
    ctx = _context(cfg)
    mp, p = ctx.mp, ctx.precision
    num = lambda v: _number(v, mp, p)  # noqa: E731
    d = ctx.to_dict()
    report = {
        "config": _echo(cfg),
        "model": d["model"],
        "t": d["t"],
        "precision": p,
        "guard_digits": ctx.guard_digits,
        "branch_points": {k: [num(v) for v in d["branch_points"][k]] for k in ("x", "y")},
        "periods": {f"omega{k + 1}": num(v) for k, v in enumerate(d["periods"])},
        "g2": {"omega1_omega2": num(d["g2"][0]), "omega1_omega3": num(d["g2"][1])},
        "g3": {"omega1_omega2": num(d["g3"][0]), "omega1_omega3": num(d["g3"][1])},
        "pole_y2": num(d["pole_y2"]),
        "unbounded": d["unbounded"],
    }
    _emit(report, out)
    return EXIT_OK


def cmd_evaluate_q(cfg: RunConfig, out, err) -> int:
    from .analytic import evaluate_q0y, reversed_kreweras_q
    from .enumeration import count_walks, tail_bound, tq0y_truncation
    from .model import get_model

    ctx = _context(cfg)
    mp, p = ctx.mp, ctx.precision
    t, y = Fraction(cfg.t), Fraction(cfg.y)
    extra = {}
    if ctx.model.key() == get_model("reversed-kreweras").key():
        value, tq00 = reversed_kreweras_q(t, y, ctx=ctx)
        extra["tq00"] = _number(tq00, mp, p)
    else:
        value = evaluate_q0y(ctx.model, t, y, ctx=ctx)
    # y is real, so any imaginary part is rounding noise from the complex lattice
    if abs(mp.im(value)) <= ctx.tolerance * max(1, abs(value)):
        value = mp.re(value)
    n = cfg.n
    oracle = tq0y_truncation(count_walks(ctx.model, n), t, y)
    # truncation tail: the terms t^(k+1) q(0, j; k) y^j with k > n
    bound = tail_bound(ctx.model, t, n) * float(t) * max(1.0, float(abs(y))) ** (n + 1)
    tol = max(1e-6, bound)
    diff = abs(value - ctx.num(oracle))
    ok = bool(diff <= tol)
    report = {
        "config": _echo(cfg),
        "model": ctx.model.name,
        "value": _number(value, mp, p),
        "oracle": {"order": n, "value": _number(oracle, mp, p)},
        "difference": _number(diff, mp, 5),
        "tolerance": tol,
        **extra,
    }
    failed = [] if ok else [f"{ctx.model.name}:evaluate-q(t={t}, y={y})"]
    return _finish(report, failed, out, err)


def cmd_curve(cfg: RunConfig, out) -> int:
    ctx = _context(cfg)
    mp, p = ctx.mp, ctx.precision
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("x", "re_y0", "im_y0", "re_y1", "im_y1"))
    for x, y0, y1 in ctx.curve_points(cfg.n):
        y0, y1 = mp.mpc(y0), mp.mpc(y1)
        w.writerow([mp.nstr(v, p) for v in (x, y0.real, y0.imag, y1.real, y1.imag)])
    return EXIT_OK


_COMMANDS = {
    "enumerate": (cmd_enumerate, False),
    "group": (cmd_group, False),
    "verify-cert": (cmd_verify_cert, True),
    "verify-tables": (cmd_verify_tables, True),
    "search-decoupling": (cmd_search_decoupling, True),
    "certify-gessel": (cmd_certify_gessel, True),
    "gluing": (cmd_gluing, False),
    "evaluate-q": (cmd_evaluate_q, True),
    "curve": (cmd_curve, False),
}


def dispatch(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    fn, wants_err = _COMMANDS[cfg.command]
    try:
        return fn(cfg, out, err) if wants_err else fn(cfg, out)
    except (UsageError, InvalidModel, ParseError, TOutOfRange) as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except QuadwalkError as exc:
        err.write(f"FAILED {cfg.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
