"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 budget exhausted.
All numbers are printed as exact expressions.  Options may also come from a
``key = value`` file given with ``--config``; explicit flags take precedence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field

from .algebra import Rational, format_scalar, rational
from .curve import DimensionWarning, qmtm_constant
from .forms import DiffForm
from .models import (DEFAULT_PAIRING_BUDGET, BudgetExceeded, connected_from_full, gaussian_model,
                     n_coefficients, npoly_to_scalar, quartic_connected, quartic_formal_model,
                     wick_trace_moments)
from .recursion import CorrelatorStore, MomentRecursion, check_linear, check_quadratic, moments, omega, stable

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
FORMATS = ("json", "csv", "form-text")


class InputError(ValueError):
    pass


@dataclass
class Check:
    anchor: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    rows: list = field(default_factory=list)      # dicts with string values
    checks: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(not c.ok for c in self.checks)

    def summary(self) -> str:
        return "".join(f"{'PASS' if c.ok else 'FAIL'} [{c.anchor}] {c.detail}".rstrip() + "\n"
                       for c in self.checks)

    def to_json(self) -> dict:
        return {"command": self.command, "rows": self.rows,
                "checks": [{"anchor": c.anchor, "ok": c.ok, "detail": c.detail} for c in self.checks],
                "status": "fail" if self.failed else "ok"}


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        if report.rows:
            cols = list(report.rows[0])
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in report.rows:
                w.writerow(r)
        if report.checks:
            w = csv.writer(buf, lineterminator="\n")
            if report.rows:
                buf.write("\n")
            w.writerow(["anchor", "status", "detail"])
            for c in report.checks:
                w.writerow([c.anchor, "pass" if c.ok else "fail", c.detail])
        return buf.getvalue()
    out = []
    for r in report.rows:
        out.append(" ".join(f"{k}={v}" for k, v in r.items()))
    return "\n".join(out) + ("\n" if out else "") + report.summary()


# ---------------------------------------------------------------------------
# argument helpers


def _ints(text: str, name: str) -> list:
    if text is None:
        raise InputError(f"--{name} is required")
    try:
        return [int(x) for x in str(text).split(",") if x.strip() != ""]
    except ValueError:
        raise InputError(f"--{name} expects comma-separated integers, got {text!r}") from None


def _rat(text: str, name: str):
    try:
        return rational(str(text))
    except (ValueError, ZeroDivisionError, SyntaxError):
        raise InputError(f"--{name} expects a rational number, got {text!r}") from None


def _alpha(text: str):
    if str(text).strip() == "alpha":
        return "alpha"
    a = _rat(text, "alpha")
    if a * a == 1:
        raise InputError("alpha = +-1 is degenerate")
    return str(a)


def _curve(args):
    kind = args.curve
    if kind == "gaussian":
        return gaussian_model()
    if kind == "quartic":
        if args.order is None or args.order < 0:
            raise InputError("quartic curve needs --order >= 0")
        return quartic_formal_model(args.order)
    raise InputError(f"unknown curve {kind!r}; colored targets use the qmtm command")


def _fmt(x) -> str:
    if isinstance(x, DiffForm):
        return x.to_str()
    if isinstance(x, (int, Rational)):
        return str(x)
    return format_scalar(x)


# ---------------------------------------------------------------------------
# commands


def cmd_compute(args) -> Report:
    if args.g is None or args.g < 0:
        raise InputError("--g must be a non-negative integer")
    cur = _curve(args)
    store = CorrelatorStore(cur)
    rep = Report("compute")
    if args.emit == "moments":
        powers = _ints(args.powers or "", "powers")
        if args.n is not None and args.n != len(powers):
            raise InputError("--n must equal the number of --powers")
        if not powers or any(p <= 0 for p in powers):
            raise InputError("--powers needs positive integers")
        val = moments(store, args.g, powers)
        rep.rows.append({"curve": args.curve, "g": str(args.g), "powers": " ".join(map(str, powers)),
                         "value": _fmt(val)})
        return rep
    if args.n is None or args.n < 1 or not stable(args.g, args.n):
        raise InputError("--n must give a stable (g, n)")
    w = omega(store, args.g, args.n)
    rep.rows.append({"curve": args.curve, "g": str(args.g), "n": str(args.n), "form": w.to_str()})
    return rep


def cmd_moments(args) -> Report:
    args.emit = "moments"
    return cmd_compute(args)


def _store(args, scale=None):
    cur = _curve(args)
    if scale is None:
        return CorrelatorStore(cur)
    B = cur.bergman.diag[cur.colors[0]]
    return CorrelatorStore(cur, omega2=B.scale(scale))


def cmd_verify_loop(args) -> Report:
    if args.max_chi < 1:
        raise InputError("--max-chi must be at least 1")
    scale = _rat(args.inject_scale, "inject-scale") if args.inject_scale else None
    store = _store(args, scale)
    rep = Report("verify loop-equations")
    for chi in range(1, args.max_chi + 1):
        for g in range(0, chi // 2 + 2):
            n = chi + 2 - 2 * g
            if n < 1:
                continue
            w = omega(store, g, n)
            lin = all(check_linear(w, v).is_zero() for v in w.vars)
            rep.checks.append(Check("linear loop equations", lin, f"curve={args.curve} g={g} n={n}"))
            orders = check_quadratic(store, g, n, 2)
            ok = all(v >= 2 for v in orders.values())
            det = " ".join(f"val({p})={orders[p]}" for p in sorted(orders))
            rep.checks.append(Check("quadratic loop equations, double zero at branch points", ok,
                                    f"curve={args.curve} g={g} n={n} {det}"))
    return rep


def cmd_verify_virasoro(args) -> Report:
    from .virasoro import (BASE, basis_polynomials, build_partition, check_annihilation,
                           check_commutators, format_monomial, max_safe_residual)
    if args.p_max < 1 or args.order < 0:
        raise InputError("--p-max >= 1 and --order >= 0 required")
    Z = build_partition(args.p_max, args.order, args.budget)
    if args.perturb:
        parts = args.perturb.split(":")
        mon = {}
        for tok in parts[0].split("*"):
            name, _, e = tok.partition("^")
            if not name.startswith("s"):
                raise InputError("--perturb expects e.g. s1*s2^2:1/3")
            mon[int(name[1:])] = int(e or 1)
        Z = Z.perturbed(mon, _rat(parts[1] if len(parts) > 1 else "1", "perturb"))
    rep = Report("verify virasoro")
    recs = check_annihilation(Z, range(args.p_max), sign=args.sign)
    for p in range(args.p_max):
        n, bad = max_safe_residual([r for r in recs if r.p == p])
        detail = f"p={p} sign={args.sign} window-safe={n} nonzero={len(bad)}"
        if bad:
            detail += f" first={format_monomial(bad[0].monomial)}:{format_scalar(bad[0].residual)}"
        rep.checks.append(Check("Virasoro constraints, annihilation", not bad, detail))
    polys = list(basis_polynomials(args.comm_degree, args.comm_max + 1))
    for p in range(args.comm_max + 1):
        for q in range(p + 1, args.comm_max + 1):
            bad = check_commutators(p, q, polys, shift=args.comm_shift, sign=args.sign)
            rep.checks.append(Check("Virasoro algebra, commutator", not bad,
                                    f"p={p} q={q} target=L_(p+q-{args.comm_shift}) defects={len(bad)}"))
    return rep


def _matrix_oracle_connected(powers, budget):
    def full(key):
        return wick_trace_moments(list(key), budget=budget).value
    return connected_from_full(full, list(powers))


def _partitions(total: int, maxpart: int | None = None):
    maxpart = total if maxpart is None else maxpart
    if total == 0:
        yield ()
        return
    for p in range(min(total, maxpart), 0, -1):
        for rest in _partitions(total - p, p):
            yield (p,) + rest


def cmd_verify_oracle(args) -> Report:
    rep = Report("verify oracle-match")
    mr = MomentRecursion(CorrelatorStore(gaussian_model()))
    for deg in range(2, args.max_degree + 1, 2):
        for powers in _partitions(deg):
            n = len(powers)
            conn = n_coefficients(_matrix_oracle_connected(powers, args.budget))
            for g in range(0, args.max_genus + 1):
                tr = mr.moment(g, powers)
                want = conn.get(2 - 2 * g - n, Rational(0))
                rep.checks.append(Check("Gaussian map enumeration, moments vs Wick pairings", tr == want,
                                        f"g={g} powers={','.join(map(str, powers))} tr={tr} oracle={want}"))
    if args.tensor:
        from .qmtm.colored import leading_resolvent_series
        from .qmtm.tensor import alpha_taylor, second_moment_alpha_coefficients
        got = second_moment_alpha_coefficients(args.d, args.m, args.budget)
        ref = alpha_taylor(leading_resolvent_series("alpha", args.d, 3)[3], 2 * len(got))
        for j, c in enumerate(got):
            rep.checks.append(Check("leading resolvent vs melonic tensor moment", c == ref[2 * j],
                                    f"d={args.d} m<={args.m} alpha^{2 * j}: tensor={c} resolvent={ref[2 * j]}"))
    return rep


def cmd_verify_qmtm(args) -> Report:
    from .qmtm.colored import PhiProvider, colored_base, colored_vars, leaf_var, normalized_omega, projector_P
    from .qmtm.weights import ColoredTower, P_recursion_check
    d = args.d
    alpha = _alpha(args.alpha)
    rep = Report("verify qmtm-structure")
    b = colored_base(d, alpha)
    a = b.ctx.alpha_value if b.ctx.alpha_value is not None else b.ctx.symbol("alpha")
    a2 = a * a
    display = -a2 * (d - 1) / (d * (2 * a2 - a2 * a2) + a2 * a2 - a2 - 1)
    rep.checks.append(Check("cross Bergman constant", b.c == display, f"d={d} alpha={alpha} c={_fmt(b.c)}"))
    b0 = colored_base(d, 0)
    gstore = CorrelatorStore(gaussian_model())
    tower0 = ColoredTower(b0)
    for g, n in [(0, 3), (1, 1), (0, 4), (1, 2)]:
        for i in (1, d):
            k = tuple(n if c == i else 0 for c in range(1, d + 1))
            ref = omega(gstore, g, n).rename({f"z{j}": leaf_var(i, j) for j in range(1, n + 1)})
            rep.checks.append(Check("decoupling at alpha = 0", tower0.get(g, k) == ref,
                                    f"g={g} k={','.join(map(str, k))}"))
    mixed = (2, 1) + (0,) * (d - 2)
    rep.checks.append(Check("decoupling at alpha = 0", tower0.get(0, mixed).is_zero(),
                            "g=0 k=2,1,0,...: mixed colors vanish"))
    f = DiffForm.pole("x1_1", 1, 3) + DiffForm.monomial("x1_1", 2)
    P = projector_P(f, "x1_1", b)
    rep.checks.append(Check("P/H decomposition", projector_P(P, "x1_1", b) == P, "P P = P on (z-1)^-3 + z^2"))
    tower = ColoredTower(b)
    for g, k, i in [(0, (2,) + (0,) * (d - 1), 1), (0, (1, 1) + (0,) * (d - 2), 1), (1, (0,) * d, 1)]:
        r = P_recursion_check(g, k, i, PhiProvider.zero(), b, tower=tower)
        rep.checks.append(Check("recursion for the polar part", r.is_zero(),
                                f"g={g} k={','.join(map(str, k))} i={i} alpha={alpha}"))
    return rep


def cmd_qmtm_curve(args) -> Report:
    from .qmtm.colored import colored_base
    b = colored_base(args.d, _alpha(args.alpha))
    rep = Report("qmtm curve")
    row = {"d": str(args.d), "alpha": str(b.alpha)}
    if args.emit in ("bergman", "all"):
        row["c"] = _fmt(b.c)
        row["omega_2e"] = b.omega_2e(1).to_str()
        if args.d > 1:
            row["omega_eiej"] = b.omega_eiej(1, 2).to_str()
    if args.emit in ("omega1", "all"):
        row["omega_e"] = b.omega_e(1).to_str()
        row["x"] = b.curve.component(1).x.to_str()
    rep.rows.append(row)
    return rep


def _split_arg(text, k, name):
    d = len(k)
    if text is None:
        return None
    groups = str(text).split("/")
    if len(groups) != d:
        raise InputError(f"--{name} needs {d} '/'-separated leaf lists")
    return tuple(set(_ints(gr, name)) for gr in groups)


def cmd_qmtm_graphs(args) -> Report:
    from .qmtm.graphs import enumerate_blob_graphs, format_graphs
    k = tuple(_ints(args.k, "k"))
    B = _split_arg(args.B, k, "B")
    if B is None:
        B = tuple(set(range(1, kc + 1)) for kc in k)
    A = tuple(set(range(1, kc + 1)) - Bi for kc, Bi in zip(k, B))
    try:
        graphs = enumerate_blob_graphs(args.g, k, A, B)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = Report("qmtm blob-graphs")
    rep.text = format_graphs(graphs)
    for n, G in enumerate(graphs):
        rep.rows.append({"graph": str(n), "vertices": str(G.n_vertices), "edges": str(G.n_edges),
                         "b1": str(G.b1), "aut": str(G.aut)})
    return rep


def cmd_qmtm_reconstruct(args) -> Report:
    from .qmtm.colored import PhiProvider, colored_base
    from .qmtm.weights import ColoredTower
    k = tuple(_ints(args.k, "k"))
    if len(k) != args.d:
        raise InputError(f"--k needs {args.d} entries")
    b = colored_base(args.d, _alpha(args.alpha))
    phi = PhiProvider.zero()
    if args.phi:
        try:
            with open(args.phi) as fh:
                phi = PhiProvider.loads(fh.read(), b.ctx)
        except OSError as exc:
            raise InputError(f"cannot read {args.phi}: {exc.strerror}") from None
    if 2 * args.g - 2 + sum(k) <= 0:
        raise InputError("unstable colored request")
    w = ColoredTower(b, phi).get(args.g, k)
    rep = Report("qmtm reconstruct")
    rep.rows.append({"d": str(args.d), "alpha": str(b.alpha), "g": str(args.g),
                     "k": ",".join(map(str, k)), "form": w.to_str()})
    return rep


def cmd_oracle_matrix(args) -> Report:
    powers = _ints(args.powers, "powers")
    if any(p < 0 for p in powers):
        raise InputError("--powers must be non-negative")
    rep = Report("oracle matrix")
    if args.quartic_order is not None:
        res = quartic_connected(powers, args.quartic_order, args.budget)
        for j, c in enumerate(res):
            rep.rows.append({"powers": " ".join(map(str, powers)), "t_order": str(j),
                             "value": _fmt(npoly_to_scalar(c, _nctx()))})
        return rep
    val = (_matrix_oracle_connected(powers, args.budget) if args.connected
           else wick_trace_moments(powers, budget=args.budget).value)
    rep.rows.append({"powers": " ".join(map(str, powers)), "connected": str(bool(args.connected)).lower(),
                     "value": _fmt(val)})
    return rep


def _nctx():
    from .algebra import Context
    return Context(["N"])


def cmd_oracle_tensor(args) -> Report:
    from .qmtm.tensor import tensor_wick_oracle
    obs = []
    for tok in str(args.observable).split(","):
        c, _, p = tok.partition(":")
        try:
            obs.append((int(c), int(p or 1)))
        except ValueError:
            raise InputError("--observable expects color:power pairs, e.g. 1:2") from None
    try:
        coeffs = tensor_wick_oracle(args.d, obs, args.m, budget=args.budget)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = Report("oracle tensor")
    for j, c in enumerate(coeffs):
        rep.rows.append({"d": str(args.d), "observable": args.observable, "lambda_order": str(j),
                         "value": _fmt(c)})
    return rep


# ---------------------------------------------------------------------------
# parser


def _common(p, fmt="form-text"):
    p.add_argument("--format", choices=FORMATS, default=fmt)
    p.add_argument("--budget", type=int, default=DEFAULT_PAIRING_BUDGET)
    p.add_argument("--output", help="write to this file (atomically) instead of stdout")
    p.add_argument("--config", help="key = value file; explicit flags win")


def _curve_opts(p):
    p.add_argument("--curve", choices=("gaussian", "quartic"), default="gaussian")
    p.add_argument("--order", type=int, default=2, help="t-order of the quartic curve")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toprec", description="exact topological recursion toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="correlators or moments of a one-component curve")
    _curve_opts(p)
    p.add_argument("--g", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--emit", choices=("form", "moments"), default="form")
    p.add_argument("--powers")
    _common(p, "csv")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("moments", help="connected moments <prod Tr M^p>_c at genus g")
    _curve_opts(p)
    p.add_argument("--g", type=int, default=0)
    p.add_argument("--n", type=int)
    p.add_argument("--powers", required=False)
    _common(p, "csv")
    p.set_defaults(func=cmd_moments)

    v = sub.add_parser("verify", help="verification suites").add_subparsers(dest="suite", required=True)
    p = v.add_parser("loop-equations")
    _curve_opts(p)
    p.add_argument("--max-chi", type=int, default=3)
    p.add_argument("--inject-scale", help="scale omega_2^0 by this factor (negative control)")
    _common(p)
    p.set_defaults(func=cmd_verify_loop)

    p = v.add_parser("virasoro")
    p.add_argument("--p-max", type=int, default=5)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--sign", choices=("corrected", "literal"), default="corrected")
    p.add_argument("--perturb", help="add a constant to one Z coefficient, e.g. s1*s2:1/3")
    p.add_argument("--comm-max", type=int, default=3)
    p.add_argument("--comm-degree", type=int, default=3)
    p.add_argument("--comm-shift", type=int, default=1,
                   help="commutator target L_(p+q-shift); 1 is the relation of this operator family")
    _common(p)
    p.set_defaults(func=cmd_verify_virasoro)

    p = v.add_parser("qmtm-structure")
    p.add_argument("--d", type=int, default=6)
    p.add_argument("--alpha", default="1/3")
    _common(p)
    p.set_defaults(func=cmd_verify_qmtm)

    p = v.add_parser("oracle-match")
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--max-genus", type=int, default=2)
    p.add_argument("--tensor", action="store_true", help="also compare the tensor-model resolvent")
    p.add_argument("--d", type=int, default=6)
    p.add_argument("--m", type=int, default=2)
    _common(p)
    p.set_defaults(func=cmd_verify_oracle)

    q = sub.add_parser("qmtm", help="colored tensor-model curve").add_subparsers(dest="action", required=True)
    p = q.add_parser("curve")
    p.add_argument("--d", type=int, default=6)
    p.add_argument("--alpha", default="alpha")
    p.add_argument("--emit", choices=("bergman", "omega1", "all"), default="all")
    _common(p, "json")
    p.set_defaults(func=cmd_qmtm_curve)

    p = q.add_parser("blob-graphs")
    p.add_argument("--g", type=int, default=0)
    p.add_argument("--k", required=False)
    p.add_argument("--B", help="per-color B-leaves, '/'-separated, e.g. 1,2/1//; default all")
    _common(p)
    p.set_defaults(func=cmd_qmtm_graphs)

    p = q.add_parser("reconstruct")
    p.add_argument("--d", type=int, default=6)
    p.add_argument("--alpha", default="0")
    p.add_argument("--g", type=int, default=0)
    p.add_argument("--k", required=False)
    p.add_argument("--phi", help="blob data file: lines 'g k1,...,kd <form>'")
    _common(p)
    p.set_defaults(func=cmd_qmtm_reconstruct)

    o = sub.add_parser("oracle", help="brute-force Wick oracles").add_subparsers(dest="which", required=True)
    p = o.add_parser("matrix")
    p.add_argument("--powers", default="2")
    p.add_argument("--connected", action="store_true")
    p.add_argument("--quartic-order", type=int)
    _common(p, "csv")
    p.set_defaults(func=cmd_oracle_matrix)

    p = o.add_parser("tensor")
    p.add_argument("--d", type=int, default=6)
    p.add_argument("--observable", default="1:2")
    p.add_argument("--m", type=int, default=1)
    _common(p, "csv")
    p.set_defaults(func=cmd_oracle_tensor)
    return ap


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    for ln, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{ln}: expected key = value")
        out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


def _apply_config(args, argv, parser_for_types):
    if not getattr(args, "config", None):
        return args
    cfg = read_config(args.config)
    given = {tok[2:].split("=", 1)[0].replace("-", "_") for tok in argv if tok.startswith("--")}
    for key, val in cfg.items():
        if key in given:
            continue
        if not hasattr(args, key):
            raise InputError(f"unknown config key {key!r}")
        cur = getattr(args, key)
        act = parser_for_types.get(key)
        if act is not None and act.type is int:
            try:
                val = int(val)
            except ValueError:
                raise InputError(f"config key {key!r} expects an integer") from None
        elif act is not None and act.nargs == 0:
            val = val.lower() in ("1", "true", "yes", "on")
        elif act is not None and act.choices and val not in act.choices:
            raise InputError(f"config key {key!r} must be one of {list(act.choices)}")
        elif isinstance(cur, int) and not isinstance(cur, bool):
            val = int(val)
        setattr(args, key, val)
    return args


def _actions_of(parser, argv) -> dict:
    """Actions of the innermost subparser selected by argv (for config typing)."""
    acts = {}
    cur = parser
    while True:
        for a in cur._actions:
            acts[a.dest] = a
        subs = [a for a in cur._actions if isinstance(a, argparse._SubParsersAction)]
        if not subs:
            break
        nxt = None
        for tok in argv:
            if tok in subs[0].choices:
                nxt = subs[0].choices[tok]
                break
        if nxt is None:
            break
        cur = nxt
    return acts


def _write(text: str, path: str | None) -> None:
    if not path:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".toprec-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        args = _apply_config(args, argv, _actions_of(parser, argv))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DimensionWarning)
            rep = args.func(args)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    text = getattr(rep, "text", None)
    if text is not None and args.format == "form-text":
        out = text
    else:
        out = render(rep, args.format)
    _write(out, args.output)
    if rep.failed:
        sys.stderr.write("".join(f"failed: {c.anchor} ({c.detail})\n" for c in rep.checks if not c.ok))
        return EXIT_FAIL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
