"""Command line interface: ``qsp <command> ...``.

Every command prints one JSON document (or LaTeX/text where offered).
Exit codes: 0 success, 1 a requested verification failed, 2 usage error,
3 computational error (reported as a JSON diagnostic on stdout).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .algebra import DEFAULT_CAP
from .cartan import (
    CartanDatum,
    GimMatrix,
    affinize,
    cartan_from_json,
    cartan_to_json,
    gim_double,
    named_cartan,
    validate_gim,
)
from .classical import classical_normal_form, involution_check, specialize, specialize_B_check
from .errors import QSPError
from .maps import builtin, verify_morphism
from .qsp import (
    GIM3,
    SUITES,
    QSPParams,
    algebra_for,
    centralizer_probe,
    emit_presentation,
    gim_presentation,
    iwasawa_check,
    kc_central,
    make_B,
    menu_pairs,
    verify_suite,
)
from .schemas import CartanModel, PairModel, ParamsModel, read_model
from .weyl import enumerate_admissible, make_pair, pair_to_json, parameter_domains, validate_admissible

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _load_json(text: str):
    """A JSON file path, a bundled data file name or inline JSON."""
    p = Path(text)
    if p.exists():
        return json.loads(p.read_text())
    bundled = resources.files("qsympairs") / "data" / Path(text).name
    if text.endswith(".json") and bundled.is_file():
        return json.loads(bundled.read_text())
    return json.loads(text)


def load_cartan(spec: str):
    """A built-in name, a JSON file path or inline JSON."""
    try:
        return named_cartan(spec)
    except KeyError:
        pass
    try:
        obj = _load_json(spec)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--cartan {spec!r} is neither a known name nor readable JSON ({exc})") from None
    model = read_model(CartanModel, obj)
    return cartan_from_json(model.model_dump(exclude_none=True))


def _split_labels(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    return [t for t in re.split(r"[,\s]+", text) if t]


def parse_tau(d: CartanDatum, text: str | None) -> dict | None:
    """``id``, ``1:3,3:1`` or cycle notation ``(1 3)`` / ``(13)``."""
    if text is None or text.strip() in ("", "id"):
        return None
    text = text.strip()
    if ":" in text:
        out = {}
        for part in _split_labels(text):
            a, _, b = part.partition(":")
            out[a] = b
        return out
    out = {}
    for cyc in re.findall(r"\(([^)]*)\)", text):
        toks = _split_labels(cyc)
        if len(toks) == 1 and all(str(lab) in d._label_index and len(str(lab)) == 1 for lab in d.labels):
            toks = list(toks[0])
        for k, a in enumerate(toks):
            out[a] = toks[(k + 1) % len(toks)]
    if not out:
        raise UsageError(f"cannot read tau {text!r}")
    return out


def load_pair(args, d: CartanDatum, check: bool = True):
    spec = None
    if getattr(args, "pair", None):
        spec = _load_json(args.pair)
    elif args.X is None and args.tau is None and getattr(args, "params", None):
        spec = _load_json(args.params).get("pair")
    if spec is not None:
        model = read_model(PairModel, spec)
        return make_pair(d, model.X, {k: v for k, v in model.tau.items()} or None, check=check)
    X = _split_labels(args.X or "")
    return make_pair(d, X, parse_tau(d, args.tau), check=check)


def _param_map(pair, text: str | None, positional: Sequence[int]) -> dict:
    if not text:
        return {}
    d = pair.d
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if all("=" in p for p in parts):
        return {k.strip(): v.strip() for k, v in (p.split("=", 1) for p in parts)}
    if any("=" in p for p in parts):
        raise UsageError("mix of positional and label=value parameters")
    if len(parts) != len(positional):
        raise UsageError(f"expected {len(positional)} values (for {[d.labels[i] for i in positional]}), got {len(parts)}")
    return {str(d.labels[i]): v for i, v in zip(positional, parts)}


def load_params(args, pair) -> QSPParams:
    cap = getattr(args, "cap", DEFAULT_CAP)
    if getattr(args, "params", None):
        model = read_model(ParamsModel, {k: v for k, v in _load_json(args.params).items() if k in ("c", "s")})
        return QSPParams.build(pair, model.c or None, model.s, cap)
    c = _param_map(pair, getattr(args, "c", None), pair.not_X)
    s = _param_map(pair, getattr(args, "s", None), parameter_domains(pair).s_free)
    return QSPParams.build(pair, c or None, s, cap)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_admissible(args):
    d = load_cartan(args.cartan)
    if args.action == "list":
        orbits = enumerate_admissible(d)
        return {
            "cartan": cartan_to_json(d),
            "orbits": [{
                "representative": pair_to_json(o["representative"]),
                "label": o["representative"].label(),
                "degenerate": o["degenerate"],
                "members": [pair_to_json(m) for m in o["members"]],
            } for o in orbits],
        }, True
    pair = load_pair(args, d, check=False)
    rep = validate_admissible(d, pair.X, pair.tau)
    out = {"pair": pair_to_json(pair), **rep.to_json()}
    if rep.ok:
        out["parameters"] = parameter_domains(pair).to_json(d)
    return out, rep.ok


def cmd_affinize(args):
    d = load_cartan(args.cartan)
    pair = load_pair(args, d) if (args.X is not None or args.pair) else None
    ahat, marks, tau_hat = affinize(d, pair)
    out = {"cartan": cartan_to_json(ahat), "marks": list(marks), "K_c_central": kc_central(ahat, marks, args.cap)}
    if pair is not None:
        out["pair"] = {"X": [ahat.labels[x + 1] for x in pair.xs],
                       "tau": {str(ahat.labels[i]): ahat.labels[tau_hat(i)] for i in range(ahat.n)}}
    return out, out["K_c_central"]


def _load_gim(spec: str | None) -> GimMatrix:
    if spec is None:
        return validate_gim(GIM3)
    obj = _load_json(spec)
    model = read_model(CartanModel, obj)
    return validate_gim(model.matrix, model.labels)


def cmd_gim(args):
    g = _load_gim(args.gim)
    if args.action == "double":
        d, sigma, unoriented = gim_double(g)
        return {"double": cartan_to_json(d), "sigma": {str(d.labels[i]): d.labels[sigma(i)] for i in range(d.n)},
                "unoriented": unoriented}, True
    c = None
    if args.c:
        parts = [p.strip() for p in args.c.split(",") if p.strip()]
        if all("=" in p for p in parts):
            c = {k.strip(): v.strip() for k, v in (p.split("=", 1) for p in parts)}
        else:
            if len(parts) != g.n:
                raise UsageError(f"expected {g.n} values for c")
            c = {str(lab): v for lab, v in zip(g.labels, parts)}
    pres = gim_presentation(g, c, args.cap)
    return _presentation_output(pres, args.format), pres.ok


def _presentation_output(pres, fmt):
    if fmt == "latex":
        return pres.latex()
    if fmt == "text":
        return "\n".join(f"[{'ok' if r.verified else 'FAIL'}] {r.name}: {r.text()}" for r in pres.relations)
    return pres.to_json()


def cmd_qsp(args):
    d = load_cartan(args.cartan) if args.cartan else None
    if args.action == "verify" and args.all:
        reports = []
        for pair in menu_pairs():
            params = QSPParams.build(pair, cap=args.cap)
            reports.append(verify_suite(args.suite or "all", params))
        return {"menu": reports, "ok": all(r["ok"] for r in reports)}, all(r["ok"] for r in reports)
    if d is None:
        raise UsageError("--cartan is required")
    pair = load_pair(args, d)
    params = load_params(args, pair)
    if args.action == "generators":
        U = params.U
        gens = {f"B{U.label(i)}": str(make_B(params, i)) for i in range(d.n)}
        dom = parameter_domains(pair)
        return {"params": params.to_json(), "B": gens, "M_X": [f"{t}{d.labels[j]}" for j in pair.xs for t in "EFK"],
                "K_theta": [list(b) for b in dom.Q_theta_basis]}, True
    if args.action == "relations":
        pres = emit_presentation(params, args.source)
        return _presentation_output(pres, args.format), pres.ok
    rep = verify_suite(args.suite or "all", params)
    return rep, rep["ok"]


def cmd_specialize(args):
    d = load_cartan(args.cartan)
    if args.element is None and not args.pair and args.X is None:
        raise UsageError("give --element or a pair")
    if args.element is not None and args.classical:
        return {"element": str(classical_normal_form(d, args.element, args.cap))}, True
    if args.element is not None:
        U = algebra_for(d, args.cap)
        a = U.parse(args.element)
        x = specialize(a)
        return {"element": str(a), "specialized": str(x), "terms": x.to_json()}, True
    pair = load_pair(args, d, check=not args.force)
    out = {"pair": pair_to_json(pair), "involution": involution_check(pair, args.cap)}
    ok = out["involution"]["ok"]
    if args.force:
        return out, ok
    params = load_params(args, pair) if (args.c or args.s or args.params) else \
        QSPParams.build(pair, {str(d.labels[i]): "1" for i in pair.not_X}, cap=args.cap)
    out["B"] = specialize_B_check(params, args.cap)
    return out, ok and out["B"]["ok"]


def cmd_center(args):
    d = load_cartan(args.cartan)
    pair = load_pair(args, d)
    params = load_params(args, pair)
    if params.symbolic() and not args.c and not args.params:
        params = QSPParams.build(pair, {str(d.labels[i]): "1" for i in pair.not_X}, cap=args.cap)
    rep = centralizer_probe(params, args.degree)
    rep["params"] = params.to_json()
    return rep, True


def cmd_iwasawa(args):
    d = load_cartan(args.cartan)
    pair = load_pair(args, d)
    params = load_params(args, pair)
    rep = iwasawa_check(params, args.degree)
    return rep, rep["ok"]


def cmd_map(args):
    d = load_cartan(args.cartan)
    pair = load_pair(args, d) if (args.X is not None or args.pair) else None
    U = algebra_for(d, args.cap)
    m = builtin(U, args.map, pair)
    out = m.to_json()
    if args.element:
        out["result"] = str(m(U.parse(args.element)))
    if args.verify:
        out["verify"] = verify_morphism(m)
        return out, out["verify"]["ok"]
    return out, True


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _pair_args(p, required_cartan=True):
    p.add_argument("--cartan", required=required_cartan, help="built-in name (A3, affine-sl2, ...), JSON file or inline JSON")
    p.add_argument("--X", default=None, help="comma separated labels of X (empty string for the empty set)")
    p.add_argument("--tau", default=None, help="id, 1:3,3:1 or (1 3)")
    p.add_argument("--pair", default=None, help='pair JSON {"X": [...], "tau": {...}} (file or inline)')


def _param_args(p):
    p.add_argument("--c", default=None, help="c values: positional over I\\X or label=expr; default symbolic")
    p.add_argument("--s", default=None, help="s values: positional over the allowed indices or label=expr")
    p.add_argument("--params", default=None, help='params JSON {"c": {...}, "s": {...}}')


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsp", description="Quantum symmetric pairs for Kac-Moody algebras")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="height cap for weight computations")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("admissible", help="enumerate or check admissible pairs")
    p.add_argument("action", choices=["list", "check"])
    _pair_args(p)
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("affinize", help="untwisted affinization of a finite Cartan matrix")
    _pair_args(p)
    p.set_defaults(func=cmd_affinize)

    p = sub.add_parser("gim", help="GIM doubling and the quantized GIM presentation")
    p.add_argument("action", choices=["double", "present"])
    p.add_argument("--gim", default=None, help="GIM JSON (file or inline); default: the 3x3 mixed-sign example")
    p.add_argument("--c", default=None)
    p.add_argument("--format", choices=["json", "latex", "text"], default="json")
    p.set_defaults(func=cmd_gim)

    p = sub.add_parser("qsp", help="generators, relations and verification suites of B_{c,s}")
    p.add_argument("action", choices=["generators", "relations", "verify"])
    p.add_argument("suite", nargs="?", default=None, choices=sorted(SUITES) + ["all"])
    p.add_argument("--all", action="store_true", help="with verify: run over the built-in menu")
    p.add_argument("--source", choices=["closed", "extract"], default="closed")
    p.add_argument("--format", choices=["json", "latex", "text"], default="json")
    _pair_args(p, required_cartan=False)
    _param_args(p)
    p.set_defaults(func=cmd_qsp)

    p = sub.add_parser("specialize", help="q -> 1 specialization and the classical involution")
    _pair_args(p)
    _param_args(p)
    p.add_argument("--element", default=None, help="quantum element, e.g. 'E1 F1 K[1,0]'")
    p.add_argument("--classical", action="store_true", help="read --element as a classical expression in e/f/h")
    p.add_argument("--force", action="store_true", help="skip the admissibility check (negative controls)")
    p.set_defaults(func=cmd_specialize)

    p = sub.add_parser("center-probe", help="central elements of bounded degree")
    _pair_args(p)
    _param_args(p)
    p.add_argument("--degree", type=_positive, default=3)
    p.set_defaults(func=cmd_center)

    p = sub.add_parser("iwasawa-check", help="bounded-degree Iwasawa decomposition check")
    _pair_args(p)
    _param_args(p)
    p.add_argument("--degree", type=_positive, default=4)
    p.set_defaults(func=cmd_iwasawa)

    p = sub.add_parser("map", help="apply or verify a named morphism (theta_q, omega, T1, ...)")
    _pair_args(p)
    p.add_argument("--map", required=True)
    p.add_argument("--element", default=None)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_map)
    return ap


def _emit(obj) -> str:
    if isinstance(obj, str):
        return obj
    return json.dumps(obj, indent=2, ensure_ascii=False, default=str)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, ok = args.func(args)
    except UsageError as exc:
        print(f"qsp: error: {exc}", file=sys.stderr)
        return 2
    except (QSPError, KeyError, ValueError) as exc:
        err = exc.to_json() if isinstance(exc, QSPError) else {"error": type(exc).__name__, "message": str(exc).strip("'\"")}
        err["command"] = args.command
        print(_emit(err))
        return 3
    print(_emit(out))
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
