"""Command-line interface. Exit codes: 0 success, 2 validation error, 3 numerical failure."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from .errors import NumericalError, ValidationError
from .experiments import (feature_selection, format_table2, format_table3, repro_table2, repro_table3,
                          strip_timing)
from .infomodel import mi_edge_weights
from .io import dumps, load_model, load_oracle, load_tree, save_model, write_json
from .sfm import ENGINES
from .ssp import SspOptions, ssp_minimize
from .structlearn import (EAR_SIGNS, DiscriminativeLog, chow_liu_tree, evaluate_error, fit_tree_classifier,
                          make_discriminative_tree)
from .synth import SynthSpec, make_synth_model

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def parse_n_list(text: str) -> list[int]:
    """'5,6,...,15' -> 5..15; also accepts '6-10' ranges and plain comma lists."""
    out: list[int] = []
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        for k, p in enumerate(parts):
            if p == "...":
                if k < 2 or k + 1 >= len(parts):
                    raise ValidationError(f"'...' needs two values before and one after: {text!r}")
                step = out[-1] - out[-2]
                stop = int(parts[k + 1])
                if step <= 0 or (stop - out[-1]) % step:
                    raise ValidationError(f"cannot expand {text!r}")
                out.extend(range(out[-1] + step, stop, step))
            elif "-" in p[1:]:
                a, b = p.split("-", 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(p))
    except ValueError:
        raise ValidationError(f"bad --n list {text!r}") from None
    if not out or min(out) < 2:
        raise ValidationError(f"--n values must be >= 2: {text!r}")
    return out


def _ssp_opts(args) -> SspOptions:
    return SspOptions(delta=args.delta, seed=args.seed, restarts=args.restarts,
                      local_search_radius=args.local_search, engine=args.engine,
                      max_iterations=args.max_iterations)


def _add_ssp_flags(p, local_search=0, bits=True):
    p.add_argument("--delta", type=float, default=1e-9, help="strict-improvement threshold")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--local-search", type=int, choices=(0, 1, 2), default=local_search,
                   help="radius of the final exchange search (0 disables)")
    p.add_argument("--engine", choices=ENGINES, default="minnorm")
    p.add_argument("--max-iterations", type=int, default=100)
    if bits:
        p.add_argument("--bits", action="store_true", help="display the objective in bits")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_ssp_min(args):
    f, g = load_oracle(args.f), load_oracle(args.g)
    res, trace = ssp_minimize(f, g, _ssp_opts(args))
    scale = 1 / math.log(2) if args.bits else 1.0
    doc = {
        "subset_bitmask": res.minimizer,
        "subset": [f.ground.label(i) for i in res.members()],
        "objective": res.value * scale,
        "unit": "bits" if args.bits else "nats",
        "converged": res.converged,
        "iterations": res.iterations,
        "terminated_by": trace.terminated_by,
    }
    if args.trace:
        Path(args.trace).write_text(trace.to_jsonl())
    _emit(dumps(doc), args.out)


def _weights_variant(spec: str, model):
    if spec == "mi":
        return mi_edge_weights(model, "marginal-mi")
    if spec == "cmi":
        return mi_edge_weights(model, "conditional-mi")
    if spec.startswith("classwise:"):
        try:
            c = int(spec.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"bad class in {spec!r}") from None
        if not 1 <= c <= model.class_count:
            raise ValidationError(f"class must be in 1..{model.class_count}, got {c}", "--weights")
        return mi_edge_weights(model, "classwise-mi", c - 1)
    raise ValidationError(f"--weights must be mi, cmi or classwise:<c>, got {spec!r}")


def _tree_doc(tree, model, extra):
    doc = tree.to_json()
    if model.ground.labels:
        doc["labels"] = list(model.ground.labels)
    doc.update(extra)
    return doc


def cmd_tree_chowliu(args):
    model = load_model(args.model)
    w = _weights_variant(args.weights, model)
    tree = chow_liu_tree(w)
    _emit(dumps(_tree_doc(tree, model, {"weights": w.variant})), args.out)


def cmd_tree_disc(args):
    model = load_model(args.model)
    log = DiscriminativeLog()
    opts = SspOptions(seed=args.seed, restarts=args.restarts, engine=args.engine)
    tree = make_discriminative_tree(model, opts, ear_sign=args.ear_sign, trace=log)
    splits = [{"pivot": s.pivot, "part": list(s.part), "rest": list(s.rest), "ear": s.ear}
              for s in log.splits]
    _emit(dumps(_tree_doc(tree, model, {"ear_sign": args.ear_sign, "splits": splits})), args.out)


def cmd_eval(args):
    model = load_model(args.model)
    tree = load_tree(args.tree)
    if tree.n != model.n:
        raise ValidationError(f"tree has {tree.n} variables, model has {model.n}", args.tree)
    clf = fit_tree_classifier(model, tree)
    err = float(evaluate_error(model, clf, args.method, args.samples, args.seed))
    doc = {"error": err, "method": args.method}
    if args.method == "mc":
        doc.update(samples=args.samples, seed=args.seed)
    _emit(dumps(doc), args.out)


def cmd_repro_table2(args):
    report = repro_table2(args.ear_sign)
    if args.json:
        write_json(args.json, report.to_json())
    _emit(format_table2(report), args.out)


def cmd_repro_table3(args):
    spec = {}
    if args.shift_ratio is not None:
        spec["shift_ratio"] = args.shift_ratio
    report = repro_table3(parse_n_list(args.n), args.seeds, args.train, args.test, args.ear_sign,
                          args.jobs or os.cpu_count() or 1, spec or None)
    timing = not args.no_timing
    if args.json:
        write_json(args.json, report.to_json() if timing else strip_timing(report))
    _emit(format_table3(report, timing), args.out)


def cmd_synth(args):
    spec = SynthSpec(args.n, seed=args.seed, common_strength=args.common, disc_strength=args.disc,
                     diagonal_load=args.load, shift_ratio=args.shift_ratio)
    save_model(make_synth_model(spec), args.out)


def cmd_featsel(args):
    g, c = load_oracle(args.g), load_oracle(args.c)
    doc = feature_selection(g, c, args.k, _ssp_opts(args), args.maximize)
    _emit(dumps(doc), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="subsup", description="Difference-of-submodular minimization and tree classifiers.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ssp = sub.add_parser("ssp", help="submodular-supermodular procedure").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    q = ssp.add_parser("min", help="minimize f - g over proper non-empty subsets")
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    _add_ssp_flags(q)
    q.add_argument("--trace", help="write per-iteration JSONL here")
    q.add_argument("--out")
    q.set_defaults(func=cmd_ssp_min)

    tree = sub.add_parser("tree", help="learn a tree structure").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    q = tree.add_parser("chowliu", help="maximum-weight spanning tree on pairwise MI")
    q.add_argument("--model", required=True)
    q.add_argument("--weights", default="cmi", help="mi | cmi | classwise:<c> (c counts from 1)")
    q.add_argument("--out")
    q.set_defaults(func=cmd_tree_chowliu)
    q = tree.add_parser("disc", help="discriminative tree by the EAR criterion")
    q.add_argument("--model", required=True)
    q.add_argument("--ear-sign", choices=EAR_SIGNS, default="consistent")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--restarts", type=int, default=1)
    q.add_argument("--engine", choices=ENGINES, default="minnorm")
    q.add_argument("--out")
    q.set_defaults(func=cmd_tree_disc)

    q = sub.add_parser("eval", help="error rate of a tree classifier fitted to a model")
    q.add_argument("--model", required=True)
    q.add_argument("--tree", required=True)
    q.add_argument("--method", choices=("exact", "mc"), default="exact")
    q.add_argument("--samples", type=int, default=2000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_eval)

    repro = sub.add_parser("repro", help="reproduce the reported tables").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    q = repro.add_parser("table2", help="exact errors on the 3-variable example")
    q.add_argument("--ear-sign", choices=EAR_SIGNS, default="consistent")
    q.add_argument("--json", help="machine-readable sidecar")
    q.add_argument("--out")
    q.set_defaults(func=cmd_repro_table2)
    q = repro.add_parser("table3", help="synthetic Gaussian benchmark")
    q.add_argument("--n", default="5,6,...,15")
    q.add_argument("--seeds", type=int, default=10)
    q.add_argument("--train", type=int, default=2000)
    q.add_argument("--test", type=int, default=2000)
    q.add_argument("--ear-sign", choices=EAR_SIGNS, default="consistent")
    q.add_argument("--shift-ratio", type=float)
    q.add_argument("--jobs", type=int, default=0, help="worker processes (0 = all cores)")
    q.add_argument("--no-timing", action="store_true", help="omit wall times (byte-reproducible output)")
    q.add_argument("--json", help="machine-readable sidecar")
    q.add_argument("--out")
    q.set_defaults(func=cmd_repro_table3)

    q = sub.add_parser("synth", help="write a synthetic two-class Gaussian model")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--common", type=float, default=0.6)
    q.add_argument("--disc", type=float, default=0.2)
    q.add_argument("--load", type=float, default=None, help="diagonal load (default: smallest PD load)")
    q.add_argument("--shift-ratio", type=float, default=0.4)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_synth)

    q = sub.add_parser("featsel", help="budgeted feature selection g - k*c")
    q.add_argument("--g", required=True, help="information oracle")
    q.add_argument("--c", required=True, help="cost oracle")
    q.add_argument("--k", type=float, required=True)
    q.add_argument("--maximize", action="store_true", help="maximize g - k*c instead of minimizing it")
    _add_ssp_flags(q, local_search=1, bits=False)
    q.add_argument("--out")
    q.set_defaults(func=cmd_featsel)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
