"""Command-line front end: ``pmc``.

Loads model files, evaluates diagrams, runs inference and normal-form
queries, emits posterior curves, and checks the law suites.  Kernel-valued
results print as JSON, CSV or an aligned table; errors are single-line JSON
on stderr under ``--format json``.

Exit codes: 0 success, 1 usage error, 2 model or type error, 3 law-check
failure, 4 numeric error (for instance zero evidence).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from . import density as DN
from . import diagram as D
from . import exactnf
from . import inference as I
from . import kernel as K
from . import laws
from .kernel import FinObject, SubKernel, UNIT


class UsageError(Exception):
    pass


class LookupFailure(K.KernelError):
    pass


@dataclass
class CliConfig:
    law_tol: float = K.LAW_TOL
    zero_mass_tol: float = K.ZERO_MASS_TOL
    convention: I.Convention = I.Convention.UNIFORM_FILL
    fmt: str = "table"
    grid: int = 2001

    def __post_init__(self) -> None:
        if self.law_tol <= 0 or self.zero_mass_tol <= 0:
            raise UsageError("tolerances must be strictly positive")
        if self.zero_mass_tol > self.law_tol:
            raise UsageError("zero mass tolerance must not exceed the law tolerance")
        if self.fmt not in ("json", "csv", "table"):
            raise UsageError(f"unknown format {self.fmt!r}")
        if self.grid < 3 or self.grid % 2 == 0:
            raise UsageError("the quadrature grid needs an odd point count >= 3")


# --- serialization -------------------------------------------------------

def object_to_json(obj: FinObject) -> dict:
    return {"factors": [{"name": a.name, "labels": list(a.labels)} for a in obj.factors]}

def object_from_json(data: dict) -> FinObject:
    return FinObject(tuple(
        K.Atom(f["name"], tuple(f["labels"])) for f in data["factors"]))


def kernel_to_json(k: SubKernel) -> dict:
    rows: dict[str, dict[str, float]] = {}
    fail: dict[str, float] = {}
    masses = k.failure_mass()
    for i, in_lab in enumerate(k.dom.labels):
        row = {
            K.render_label(out_lab): float(w)
            for out_lab, w in zip(k.cod.labels, k.weights[i])
            if w != 0.0
        }
        rows[K.render_label(in_lab)] = row
        if masses[i] > 0.0:
            fail[K.render_label(in_lab)] = float(masses[i])
    out = {"dom": object_to_json(k.dom), "cod": object_to_json(k.cod), "rows": rows}
    if fail:
        out["fail"] = fail
    return out


def kernel_from_json(data: dict) -> SubKernel:
    dom = object_from_json(data["dom"])
    cod = object_from_json(data["cod"])
    rows = {
        K.parse_label(in_text): {
            K.parse_label(out_text): w for out_text, w in row.items()
        }
        for in_text, row in data["rows"].items()
    }
    return K.from_rows(dom, cod, rows)


def kernel_to_csv(k: SubKernel) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["input", "output", "weight"])
    masses = k.failure_mass()
    for i, in_lab in enumerate(k.dom.labels):
        for out_lab, w in zip(k.cod.labels, k.weights[i]):
            if w != 0.0:
                writer.writerow([K.render_label(in_lab), K.render_label(out_lab), repr(float(w))])
        if masses[i] > 0.0:
            writer.writerow([K.render_label(in_lab), "<fail>", repr(float(masses[i]))])
    return buffer.getvalue()


def kernel_to_table(k: SubKernel, name: str = "") -> str:
    lines = [f"{name + ': ' if name else ''}{k.dom} -> {k.cod}"]
    masses = k.failure_mass()
    for i, in_lab in enumerate(k.dom.labels):
        cells = [
            f"{K.render_label(out_lab)}: {float(w)!r}"
            for out_lab, w in zip(k.cod.labels, k.weights[i])
            if w != 0.0
        ]
        if masses[i] > 0.0:
            cells.append(f"fail: {float(masses[i])!r}")
        body = ", ".join(cells) if cells else "fail: 1.0"
        lines.append(f"  {K.render_label(in_lab)} -> {{ {body} }}")
    return "\n".join(lines)


def print_kernel(k: SubKernel, cfg: CliConfig, name: str = "") -> None:
    if cfg.fmt == "json":
        print(json.dumps(kernel_to_json(k), sort_keys=True))
    elif cfg.fmt == "csv":
        sys.stdout.write(kernel_to_csv(k))
    else:
        print(kernel_to_table(k, name))


# --- model plumbing ------------------------------------------------------

def load_model(path: str) -> D.Model:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise LookupFailure(f"cannot read model {path}: {err}") from err
    return D.parse(text)


def resolve(model: D.Model, name: str) -> SubKernel:
    """A named kernel, state, or evaluated diagram."""
    if name in model.diagrams:
        return D.evaluate(model.diagrams[name], model)
    if name in model.kernels:
        return model.kernels[name]
    if name in model.states:
        return model.states[name]
    raise LookupFailure(f"model does not declare {name!r}")


def resolve_state(model: D.Model, name: str) -> SubKernel:
    k = resolve(model, name)
    if k.dom != UNIT:
        raise LookupFailure(f"{name!r} is not a state: its domain is {k.dom}")
    return k


def resolve_predicate(model: D.Model, name: str) -> SubKernel:
    k = resolve(model, name)
    if k.cod != UNIT:
        raise LookupFailure(f"{name!r} is not a predicate: its codomain is {k.cod}")
    return k


# --- subcommands ---------------------------------------------------------

def cmd_eval(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model)
    print_kernel(resolve(model, args.term), cfg, args.term)
    return 0


def cmd_normalize(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model)
    k = resolve(model, args.term)
    print_kernel(
        I.normalize(k, convention=cfg.convention, zero_tol=cfg.zero_mass_tol),
        cfg, f"normalize({args.term})")
    return 0


def cmd_condition(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model)
    k = resolve(model, args.term)
    c = I.conditional(k, split=args.split, convention=cfg.convention,
                      zero_tol=cfg.zero_mass_tol)
    print_kernel(c, cfg, f"conditional({args.term}, split={args.split})")
    return 0


def cmd_invert(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model)
    g = resolve(model, args.kernel)
    p = resolve_state(model, args.prior)
    print_kernel(
        I.bayes_invert(g, p, convention=cfg.convention, zero_tol=cfg.zero_mass_tol),
        cfg, f"invert({args.kernel}, prior={args.prior})")
    return 0


def cmd_pearl(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model)
    p = resolve_state(model, args.prior)
    f = resolve(model, args.channel)
    q = resolve_predicate(model, args.predicate)
    updated = I.pearl_update(p, f, q, renorm=args.renorm,
                             convention=cfg.convention, zero_tol=cfg.zero_mass_tol)
    print_kernel(updated, cfg, "pearl" + (" (renormalised)" if args.renorm else " (raw)"))
    return 0


def cmd_jeffrey(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model)
    p = resolve_state(model, args.prior)
    f = resolve(model, args.channel)
    t = resolve_state(model, args.evidence)
    print_kernel(
        I.jeffrey_update(p, f, t, convention=cfg.convention,
                         zero_tol=cfg.zero_mass_tol),
        cfg, "jeffrey")
    return 0


def cmd_nf(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model)
    if args.term in model.diagrams:
        term: D.Term = model.diagrams[args.term]
    elif args.term in model.kernels or args.term in model.states:
        term = D.Gen(args.term)
    else:
        raise LookupFailure(f"model does not declare a term {args.term!r}")
    nf = exactnf.from_term(term, model, zero_tol=cfg.zero_mass_tol)
    payload = {
        "dom": object_to_json(nf.dom),
        "cod": object_to_json(nf.cod),
        "evidence": kernel_to_json(nf.evidence.as_sub()),
        "point": K.render_label(nf.point),
        "result": kernel_to_json(nf.result.as_sub()),
        "success": {
            K.render_label(lab): float(m)
            for lab, m in zip(nf.dom.labels, nf.success_mass())
        },
    }
    if cfg.fmt == "table":
        print(kernel_to_table(nf.evidence.as_sub(), "evidence h"))
        print(f"point z: {K.render_label(nf.point)}")
        print(kernel_to_table(nf.result.as_sub(), "result g"))
        success = ", ".join(f"{K.render_label(l)}: {float(m)!r}"
                            for l, m in zip(nf.dom.labels, nf.success_mass()))
        print(f"success mass: {{ {success} }}")
    else:
        print(json.dumps(payload, sort_keys=True))
    return 0


def _parse_prior(spec: str) -> DN.DensityState:
    kind, _, rest = spec.partition(":")
    try:
        parts = [float(p) for p in rest.split(",")] if rest else []
    except ValueError as err:
        raise UsageError(f"bad prior spec {spec!r}") from err
    if kind == "uniform" and len(parts) == 2:
        return DN.Uniform(parts[0], parts[1])
    if kind == "normal" and len(parts) == 2:
        return DN.Normal(parts[0], parts[1])
    raise UsageError(
        f"bad prior spec {spec!r}; expected uniform:LO,HI or normal:MU,SIGMA")


def _parse_channel(spec: str) -> DN.DensityChannel:
    kind, _, rest = spec.partition(":")
    if kind != "normal":
        raise UsageError(f"bad channel spec {spec!r}; expected normal:SIGMA")
    try:
        return DN.NormalMeanChannel(float(rest))
    except ValueError as err:
        raise UsageError(f"bad channel spec {spec!r}") from err


def cmd_posterior(args: argparse.Namespace, cfg: CliConfig) -> int:
    prior = _parse_prior(args.prior)
    channel = _parse_channel(args.channel)
    quad = DN.QuadratureSpec(n=cfg.grid)
    if args.out:
        xs, columns = DN.emit_posterior_csv(prior, channel, args.observe, quad, args.out)
    else:
        xs, columns = DN.posterior_table(prior, channel, args.observe, quad)
        writer = csv.writer(sys.stdout)
        writer.writerow(["m"] + [f"pdf_v{v:g}" for v in columns])
        for i, m in enumerate(xs):
            writer.writerow([f"{m:.15g}"] + [f"{col[i]:.15g}" for col in columns.values()])
    if args.plot:
        from .figures import save_posterior_figure

        save_posterior_figure(xs, columns, args.plot,
                              title=f"prior {args.prior}, channel {args.channel}")
    return 0


def cmd_check_laws(args: argparse.Namespace, cfg: CliConfig) -> int:
    model = load_model(args.model) if args.model else None
    results = laws.run_all(seed=args.seed, cases=args.cases,
                           tol=args.tol if args.tol is not None else cfg.law_tol,
                           model=model)
    if cfg.fmt == "json":
        print(json.dumps([
            {"name": r.name, "passed": r.passed, "cases": r.cases,
             "max_err": r.max_err, "note": r.note}
            for r in results
        ], sort_keys=True))
    else:
        for r in results:
            print(r.line())
        failed = sum(1 for r in results if not r.passed)
        print(f"{len(results) - failed}/{len(results)} laws passed")
    return 0 if all(r.passed for r in results) else 3


# --- driver --------------------------------------------------------------

class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="pmc", description=__doc__,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"),
                        default="table", help="output format")
    common.add_argument("--convention", choices=("uniform_fill", "zero_fill"),
                        default="uniform_fill",
                        help="row convention on zero-mass conditioning events")
    common.add_argument("--law-tol", type=float, default=K.LAW_TOL)
    common.add_argument("--zero-mass-tol", type=float, default=K.ZERO_MASS_TOL)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a term to a kernel table")
    p.add_argument("model")
    p.add_argument("--term", required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("normalize", parents=[common], help="rowwise normalisation of a term")
    p.add_argument("model")
    p.add_argument("--term", required=True)
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("condition", parents=[common],
                       help="conditional of a term with respect to leading codomain factors")
    p.add_argument("model")
    p.add_argument("--term", required=True)
    p.add_argument("--split", type=int, required=True,
                   help="number of codomain factors to condition on")
    p.set_defaults(fn=cmd_condition)

    p = sub.add_parser("invert", parents=[common], help="Bayesian inversion of a kernel")
    p.add_argument("model")
    p.add_argument("--kernel", required=True)
    p.add_argument("--prior", required=True)
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("pearl", parents=[common], help="Pearl's belief update")
    p.add_argument("model")
    p.add_argument("--prior", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--predicate", required=True)
    p.add_argument("--renorm", action="store_true")
    p.set_defaults(fn=cmd_pearl)

    p = sub.add_parser("jeffrey", parents=[common], help="Jeffrey's belief update")
    p.add_argument("model")
    p.add_argument("--prior", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--evidence", required=True)
    p.set_defaults(fn=cmd_jeffrey)

    p = sub.add_parser("nf", parents=[common],
                       help="normal form of a term: evidence channel, point, result channel")
    p.add_argument("model")
    p.add_argument("--term", required=True)
    p.set_defaults(fn=cmd_nf)

    p = sub.add_parser("posterior", parents=[common],
                       help="1-D posterior curves after exact observations")
    p.add_argument("--prior", required=True, help="uniform:LO,HI or normal:MU,SIGMA")
    p.add_argument("--channel", required=True, help="normal:SIGMA")
    p.add_argument("--observe", type=float, action="append", required=True,
                   metavar="V", help="observed value (repeatable)")
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--plot", help="also render the curves to this image file")
    p.set_defaults(fn=cmd_posterior)

    p = sub.add_parser("check-laws", parents=[common],
                       help="run the randomized law suites")
    p.add_argument("model", nargs="?")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--cases", type=int, default=200)
    p.set_defaults(fn=cmd_check_laws)

    return parser


def _emit_error(message: str, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps({"error": message}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    fmt = "table"
    try:
        args = build_parser().parse_args(argv)
        fmt = getattr(args, "format", "table")
        cfg = CliConfig(
            law_tol=args.law_tol,
            zero_mass_tol=args.zero_mass_tol,
            convention=I.Convention(args.convention),
            fmt=fmt,
            grid=getattr(args, "grid", 2001),
        )
        return args.fn(args, cfg)
    except UsageError as err:
        _emit_error(str(err), fmt)
        return 1
    except D.ParseError as err:
        for issue in err.issues:
            _emit_error(str(issue), fmt)
        return 2
    except (K.ValidationError, K.CompositionError, D.DiagramTypeError,
            LookupFailure, exactnf.NonTotalGeneratorError) as err:
        _emit_error(str(err), fmt)
        return 2
    except (DN.DensityError, I.SupportError, FloatingPointError) as err:
        _emit_error(str(err), fmt)
        return 4


if __name__ == "__main__":
    sys.exit(main())
