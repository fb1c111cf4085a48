"""Command-line interface.

    gqp price {bs-call|holee-bond|propagate} ...
    gqp kernel ...
    gqp transform {bromwich|mellin|lct} ...
    gqp mc ...
    gqp verify [--only SUITES] [--json]

Options may also come from ``--config file.json`` (keys are the long
option names with dashes or underscores); flags given on the command line
win over the file, which wins over defaults.  Unknown keys are rejected.

Exit codes: 0 success, 1 failed verification, 2 invalid input,
3 numerical failure (truncation, divergence, variance blow-up).
"""
from __future__ import annotations

import argparse
import json
import math
import re
import secrets
import sys
import warnings

import numpy as np

from . import kernels as kn
from . import models as md
from . import transforms as tr
from .errors import DivergenceError, DomainError, TruncationError, TruncationWarning, VarianceBlowUp
from .group_core import ModelKind, ModelParams, SL2Matrix
from .mc_oracle import PathSpec, fk_price

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt(v, table: bool) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6g}" if table else f"{float(v):.17g}"


def _json_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        # 17 significant digits always round-trip a double exactly
        return f"{v:.17g}"
    return json.dumps(v)


def json_line(record: dict) -> str:
    return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in record.items()) + "}"


def emit(rows: list[dict], fmt: str, out=None) -> None:
    """Print records as an aligned table, CSV with a header, or JSON lines."""
    out = out or sys.stdout
    if not rows:
        return
    cols = list(rows[0])
    if fmt == "json":
        for r in rows:
            out.write(json_line(r) + "\n")
    elif fmt == "csv":
        out.write(",".join(cols) + "\n")
        for r in rows:
            out.write(",".join(_fmt(r[k], False) for k in cols) + "\n")
    else:
        cells = [[_fmt(r[k], True) for k in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
        for row in cells:
            out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _grid(text: str) -> np.ndarray:
    """'a:b:n' for a uniform grid, or a comma-separated list."""
    text = str(text)
    if ":" in text:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise UsageError("grid needs at least one point")
        return np.linspace(float(a), float(b), n)
    return np.array([float(v) for v in text.split(",") if v.strip()])


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _complexes(text) -> list[complex]:
    if isinstance(text, (list, tuple)):
        return [complex(v) for v in text]
    return [complex(v.replace(" ", "")) for v in str(text).split(",") if v.strip()]


def _payoff(text: str):
    """Payoff of the terminal state y.

    one | exp | y | call:K | put:K | gauss:m:s | bump:m:s  (call/put act on e^y)
    """
    parts = str(text).split(":")
    name, args = parts[0], [float(a) for a in parts[1:]]
    try:
        if name == "one":
            return (lambda y: np.ones_like(y)), ()
        if name == "exp":
            return np.exp, ()
        if name == "y":
            return (lambda y: np.asarray(y, float)), ()
        if name == "call":
            (k,) = args
            return (lambda y: np.maximum(np.exp(y) - k, 0.0)), (math.log(k),)
        if name == "put":
            (k,) = args
            return (lambda y: np.maximum(k - np.exp(y), 0.0)), (math.log(k),)
        if name in ("gauss", "bump"):
            m, s = args
            return (lambda y: np.exp(-((np.asarray(y) - m) ** 2) / (2 * s * s))), ()
    except ValueError:
        pass
    raise UsageError(f"bad payoff {text!r}; use one, exp, y, call:K, put:K or gauss:m:s")


def _params(a) -> ModelParams:
    return ModelParams(a.sigma, r=a.r, mu=a.mu, beta=a.beta, omega=a.omega)


COMMON = {"sigma": 0.2, "r": 0.0, "mu": 0.0, "beta": 0.0, "omega": 0.0}


def _add(p, name, default, type_=float, help_=None, **kw):
    p.add_argument("--" + name.replace("_", "-"), dest=name, type=type_, default=argparse.SUPPRESS,
                   help=(help_ or "") + (f" (default {default})" if default is not None else ""), **kw)
    p.set_defaults(**{"_default_" + name: default})


def _model_opts(p, **over):
    for k, v in COMMON.items():
        _add(p, k, over.get(k, v))


def _output_opts(p, default="table"):
    _add(p, "format", default, str, "output format", choices=["table", "csv", "json"])


def _mc_opts(p, paths=100_000):
    _add(p, "paths", paths, int, "Monte Carlo paths")
    _add(p, "steps", 200, int, "time steps per path")
    _add(p, "seed", None, int, "64-bit seed; generated and echoed when omitted")
    p.add_argument("--no-antithetic", dest="antithetic", action="store_false", default=argparse.SUPPRESS)
    p.set_defaults(_default_antithetic=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gqp", description="Group-quantization pricing kernels and checks.")
    ap.add_argument("--config", help="JSON file of option values")
    sub = ap.add_subparsers(dest="command", required=True)

    price = sub.add_parser("price", help="price an instrument").add_subparsers(dest="instrument", required=True)
    p = price.add_parser("bs-call", help="Black-Scholes call by several routes")
    _add(p, "spot", None)
    _add(p, "strike", None)
    _add(p, "tau", None)
    _add(p, "sigma", 0.2)
    _add(p, "r", 0.0)
    _add(p, "routes", "closed,mellin,kernel", str, "comma list of closed, mellin, kernel, mc")
    _add(p, "contour", "2", str, "Mellin abscissa c > 1, or 'saddle'")
    _mc_opts(p)
    _output_opts(p)

    p = price.add_parser("holee-bond", help="Ho-Lee zero-coupon bond")
    _add(p, "x", None, help_="short rate")
    _add(p, "tau", None)
    _add(p, "sigma", 0.01)
    _add(p, "mu", 0.0)
    _output_opts(p)

    p = price.add_parser("propagate", help="propagate a payoff with a kernel")
    _add(p, "kernel", "bs", str, choices=["bs", "holee", "mehler", "repulsive"])
    _add(p, "payoff", "one", str, "one, exp, y, call:K, put:K, gauss:m:s")
    _add(p, "tau", None)
    _add(p, "x_grid", "0", str, "a:b:n or comma list")
    _model_opts(p)
    _output_opts(p)

    p = sub.add_parser("kernel", help="dump K(x, x', tau) on a grid")
    _add(p, "kind", "bs", str, choices=["bs", "holee", "mehler", "repulsive"])
    _add(p, "x", "-1:1:3", str, "a:b:n or comma list")
    _add(p, "x_prime", "-1:1:3", str, "a:b:n or comma list")
    _add(p, "tau", 1.0)
    _model_opts(p)
    _output_opts(p, "csv")

    tsub = sub.add_parser("transform", help="transform utilities").add_subparsers(dest="transform", required=True)
    p = tsub.add_parser("bromwich", help="invert the Black-Scholes momentum kernel exp(E_r(p) tau)")
    _add(p, "x", "0", str, "points x - x' (a:b:n or comma list)")
    _add(p, "tau", 1.0)
    _add(p, "c", 0.0, help_="contour abscissa")
    _add(p, "half_width", 40.0)
    _add(p, "nodes", 4096, int)
    _model_opts(p, sigma=1.0)
    _output_opts(p)
    p = tsub.add_parser("mellin", help="Mellin transform of the call payoff vs closed form")
    _add(p, "strike", 100.0)
    _add(p, "z", "1.5,2,3", str, "comma list of complex z with Re z > 1")
    _output_opts(p)
    p = tsub.add_parser("lct", help="real LCT kernel W(M; x, x')")
    _add(p, "matrix", None, str, "a,b,c,d with ad - bc = 1 and b > 0")
    _add(p, "x", "0", str, "a:b:n or comma list")
    _add(p, "x_prime", "0", str, "a:b:n or comma list")
    _output_opts(p)

    p = sub.add_parser("mc", help="Feynman-Kac Monte Carlo with an analytic comparison")
    _add(p, "model", "holee", str, choices=["bs", "holee", "harmonic", "repulsive"])
    _add(p, "payoff", "one", str, "one, exp, y, call:K, put:K, gauss:m:s")
    _add(p, "x0", 0.03)
    _add(p, "horizon", 1.0)
    _add(p, "path_mu", None, help_="path drift (defaults to --mu)")
    _model_opts(p, sigma=0.01, beta=-1.0)
    _mc_opts(p)
    _output_opts(p)

    p = sub.add_parser("verify", help="run the invariant suites")
    _add(p, "only", None, str, "comma list of group, geometry, kernel, transform, model")
    p.add_argument("--json", dest="json", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(_default_json=False)
    return ap


def resolve(ns: argparse.Namespace, config: dict) -> argparse.Namespace:
    """Merge defaults < config file < explicit flags; reject unknown keys."""
    values = vars(ns)
    defaults = {k[len("_default_"):]: v for k, v in values.items() if k.startswith("_default_")}
    known = set(defaults)
    unknown = sorted(k for k in (key.replace("-", "_") for key in config) if k not in known)
    if unknown:
        raise UsageError(f"unknown config key(s) for this command: {', '.join(unknown)}")
    merged = dict(defaults)
    for k, v in config.items():
        merged[k.replace("-", "_")] = v
    for k, v in values.items():
        if not k.startswith("_default_") and k in known:
            merged[k] = v
    missing = sorted(k for k, v in merged.items() if v is None and k not in ("seed", "only", "path_mu"))
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    out = argparse.Namespace(**{k: v for k, v in values.items() if not k.startswith("_default_")})
    for k, v in merged.items():
        setattr(out, k, v)
    return out


def _seed(a) -> int:
    return a.seed if a.seed is not None else secrets.randbits(63)


def cmd_price(a) -> int:
    if a.instrument == "bs-call":
        spec = md.CallSpec(a.spot, a.strike, a.tau, a.sigma, a.r)
        routes = [r.strip() for r in a.routes.split(",") if r.strip()]
        bad = [r for r in routes if r not in ("closed", "mellin", "kernel", "mc")]
        if bad:
            raise UsageError(f"unknown route(s): {', '.join(bad)}")
        closed = md.bs_call_closed(spec)
        rows = []
        for route in routes:
            row = {"instrument": "bs-call", "route": route, "value": math.nan, "std_error": math.nan,
                   "rel_dev_vs_closed": math.nan}
            if route == "closed":
                row["value"] = closed
            elif route == "mellin":
                c = a.contour if a.contour == "saddle" else float(a.contour)
                row["value"] = md.bs_call_mellin(spec, c)
            elif route == "kernel":
                row["value"] = md.bs_call_kernel(spec)
            else:
                seed = _seed(a)
                ps = PathSpec(math.log(a.spot), md.martingale_mu(a.r, a.sigma), a.sigma, a.tau,
                              steps=a.steps, n_paths=a.paths, seed=seed, antithetic=a.antithetic)
                k = a.strike
                res = fk_price(ModelKind.BlackScholes, lambda y: np.maximum(np.exp(y) - k, 0.0), ps,
                               ModelParams(a.sigma, r=a.r))
                row["value"], row["std_error"] = res.estimate, res.std_error
                row["route"] = f"mc(seed={seed})"
            row["rel_dev_vs_closed"] = row["value"] / closed - 1.0
            rows.append(row)
        emit(rows, a.format)
        if a.format == "table" and len(rows) > 1:
            vals = [r["value"] for r in rows]
            print(f"max relative spread: {(max(vals) - min(vals)) / closed:.6g}")
        return EXIT_OK
    if a.instrument == "holee-bond":
        v = md.holee_bond(a.x, a.tau, ModelParams(a.sigma, mu=a.mu))
        emit([{"instrument": "holee-bond", "x": a.x, "tau": a.tau, "value": v}], a.format)
        return EXIT_OK
    payoff, breaks = _payoff(a.payoff)
    xs = _grid(a.x_grid)
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        vals = kn.propagate(a.kernel, payoff, a.tau, xs, _params(a), breaks=breaks)
    emit([{"x": x, "tau": a.tau, "value": v} for x, v in zip(xs, np.atleast_1d(vals))], a.format)
    return EXIT_OK


def cmd_kernel(a) -> int:
    xs, xps = _grid(a.x), _grid(a.x_prime)
    ke = kn.KernelEval(a.kind, _params(a))
    rows = [{"x": x, "x_prime": xp, "tau": a.tau, "k": ke(x, xp, a.tau)} for x in xs for xp in xps]
    emit(rows, a.format)
    return EXIT_OK


def cmd_transform(a) -> int:
    if a.transform == "bromwich":
        p = _params(a)
        q = tr.QuadratureSpec("bromwich", c=a.c, half_width=a.half_width, nodes=a.nodes)
        rows = []
        for x in _grid(a.x):
            res = tr.bromwich_invert(lambda z: kn.momentum_kernel_bs(z, -a.tau, p), q, x, full_output=True)
            ref = kn.bs_kernel(0.0, -x, a.tau, p)
            rows.append({"x": x, "value": res.value, "imag_residue": res.imag_residue,
                         "closed_form": ref, "abs_error": abs(res.value - ref)})
    elif a.transform == "mellin":
        k = a.strike
        q = tr.QuadratureSpec("real_line", c=math.log(k) + 20, half_width=40, breaks=(math.log(k),))
        rows = []
        for z in _complexes(a.z):
            num = tr.mellin_forward(lambda y: np.maximum(y - k, 0.0), z, q)
            ref = md.call_mellin_transform(z, k)
            rows.append({"re_z": z.real, "im_z": z.imag, "re": num.real, "im": num.imag,
                         "closed_re": ref.real, "closed_im": ref.imag, "rel_error": abs(num / ref - 1)})
    else:
        m = _floats(a.matrix)
        if len(m) != 4:
            raise UsageError("--matrix needs four numbers a,b,c,d")
        M = SL2Matrix(*m)
        rows = [{"x": x, "x_prime": xp, "w": tr.lct_kernel(M, x, xp)} for x in _grid(a.x) for xp in _grid(a.x_prime)]
    emit(rows, a.format)
    return EXIT_OK


def _mc_reference(model: ModelKind, payoff_text, payoff, breaks, a, params, path_mu):
    """Analytic value for the configured MC problem, or None."""
    if payoff_text == "one" and model is ModelKind.HoLee and params.beta == -1.0:
        return md.holee_bond(a.x0, a.horizon, ModelParams(a.sigma, mu=path_mu))
    kind = {ModelKind.BlackScholes: "bs", ModelKind.HoLee: "holee",
            ModelKind.Harmonic: "mehler", ModelKind.Repulsive: "repulsive"}[model]
    kp = params.replace(mu=path_mu)
    if model in (ModelKind.Harmonic, ModelKind.Repulsive) and path_mu != 0:
        return None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            return kn.propagate(kind, payoff, a.horizon, a.x0, kp, breaks=breaks)
    except DomainError:
        return None


def cmd_mc(a) -> int:
    model = ModelKind.parse(a.model)
    params = _params(a)
    payoff, breaks = _payoff(a.payoff)
    path_mu = a.mu if a.path_mu is None else a.path_mu
    seed = _seed(a)
    spec = PathSpec(a.x0, path_mu, a.sigma, a.horizon, steps=a.steps, n_paths=a.paths,
                    seed=seed, antithetic=a.antithetic)
    res = fk_price(model, payoff, spec, params)
    ref = _mc_reference(model, a.payoff, payoff, breaks, a, params, path_mu)
    row = {"model": model.value, "payoff": a.payoff, "seed": seed, "n_paths": res.n_paths,
           "estimate": res.estimate, "std_error": res.std_error,
           "analytic": math.nan if ref is None else ref,
           "z_score": math.nan if ref is None or res.std_error == 0 else (res.estimate - ref) / res.std_error}
    emit([row], a.format)
    return EXIT_OK


def cmd_verify(a) -> int:
    from .verify import run

    only = [s.strip() for s in a.only.split(",")] if a.only else None
    try:
        checks = run(only)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if a.json:
        for c in checks:
            print(json_line({"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "pass": c.passed}))
    else:
        emit([{"check": c.name, "residual": c.residual, "tolerance": c.tolerance,
               "result": "PASS" if c.passed else "FAIL"} for c in checks], "table")
        n_fail = sum(not c.passed for c in checks)
        print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


COMMANDS = {"price": cmd_price, "kernel": cmd_kernel, "transform": cmd_transform, "mc": cmd_mc, "verify": cmd_verify}


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--x -1:1:3`` into ``--x=-1:1:3`` so argparse does not read
    the value as an option."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        config = {}
        if ns.config:
            with open(ns.config, encoding="utf-8") as fh:
                config = json.load(fh)
            if not isinstance(config, dict):
                raise UsageError("config file must hold a JSON object")
        args = resolve(ns, config)
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as e:
        print(f"gqp: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (TruncationError, DivergenceError, VarianceBlowUp, TruncationWarning) as e:
        print(f"gqp: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
