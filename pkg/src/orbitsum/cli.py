"""Command-line front end: ``orbitsum <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import json
import os
import sys

from .affine import build_A_alpha, growth_report, prop_p_iteration
from .fourier import dft_full, max_nonzero_ratio, spec_alpha
from .fp import CapExceeded
from .lab import (
    ALPHA_GRID,
    CHECKS,
    FAMILIES,
    InstanceConfig,
    gen_instance,
    load_configs,
    run_sweep,
    verify_all,
)
from .reports import FAIL, jsonable

LEMMAS = tuple(c.replace("_", "-") for c in CHECKS) + ("all",)


def _ints(text: str | None):
    if text is None:
        return None
    return tuple(int(x) for x in text.replace(" ", "").split(","))


def _floats(text: str | None):
    if text is None:
        return None
    return tuple(float(x) for x in text.split(","))


def _common(sp: argparse.ArgumentParser, sweep: bool = False) -> None:
    sp.add_argument("--p", type=str if sweep else int, required=not sweep, help="prime (comma list for sweep)")
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--family", choices=FAMILIES, default=None)
    sp.add_argument("--gens", help="JSON list of matrices, e.g. '[[[1,1],[0,1]]]'")
    sp.add_argument("--v", help="base point, comma separated")
    sp.add_argument("--alpha", help="threshold(s), comma separated")
    sp.add_argument("--eps-prime", type=float, default=0.5)
    sp.add_argument("--seed", type=str if sweep else int, default="0" if sweep else 0)
    sp.add_argument("--cap", action="append", default=[], metavar="NAME=VALUE", help="resource cap override")
    sp.add_argument("--out", choices=("text", "csv", "json"), default="csv" if sweep else "text")
    sp.add_argument("--exact", action="store_true", help="settle threshold ties in cyclotomic exact mode")
    sp.add_argument("--no-transpose", action="store_true", help="use the orbit H v instead of H^T v")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbitsum", description="Exponential sums over matrix-group orbits mod p.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name in ("orbit", "spectrum", "profile", "growth", "iterate"):
        _common(sub.add_parser(name))
    vp = sub.add_parser("verify")
    vp.add_argument("lemma", choices=LEMMAS)
    _common(vp)
    sw = sub.add_parser("sweep")
    _common(sw, sweep=True)
    sw.add_argument("--config", help="JSON config file (schema_version 1)")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--output", "-o", help="write here instead of stdout")
    sw.add_argument("--timing", action="store_true", help="fill the timing column (breaks byte-stability)")
    return ap


def _apply_caps(items: list[str]) -> None:
    for item in items:
        name, _, value = item.partition("=")
        if not value:
            raise SystemExit(f"--cap expects NAME=VALUE, got {item!r}")
        os.environ[f"ORBITSUM_CAP_{name.upper()}"] = value


def _config(args, p=None, seed=None) -> InstanceConfig:
    family = args.family or ("explicit-generators" if args.gens else "quadratic-residue")
    gens = tuple(tuple(tuple(r) for r in g) for g in json.loads(args.gens)) if args.gens else ()
    return InstanceConfig(
        p=args.p if p is None else p,
        d=args.d,
        family=family,
        v=_ints(args.v),
        transposed=not args.no_transpose,
        seed=args.seed if seed is None else seed,
        gens=gens,
        alphas=_floats(args.alpha) or ALPHA_GRID,
        eps_prime=args.eps_prime,
        exact=args.exact,
    )


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.out == "json":
        print(json.dumps(jsonable(payload), indent=1, sort_keys=True))
    elif args.out == "csv":
        keys = sorted(k for k, v in payload.items() if not isinstance(v, (list, dict)))
        print(",".join(keys))
        print(",".join(str(jsonable(payload[k])) for k in keys))
    else:
        print("\n".join(text_lines))


def _cmd_orbit(args) -> int:
    inst = gen_instance(_config(args))
    pts = [list(map(int, x)) for x in inst.orbit.points.points()]
    payload = {"p": args.p, "d": args.d, "H_order": inst.group.order, "I_size": len(pts), "points": pts}
    _emit(args, payload, [f"|H| = {inst.group.order}, |I| = {len(pts)}", *(" ".join(map(str, x)) for x in pts)])
    return 0


def _cmd_profile(args) -> int:
    pr = gen_instance(_config(args)).profile
    payload = {k: getattr(pr, k) for k in ("p", "d", "orbit_size", "delta_eff", "max_hyperplane_hit", "beta_eff")}
    _emit(args, payload, [f"{k} = {v}" for k, v in payload.items()])
    return 0


def _cmd_spectrum(args) -> int:
    cfg = _config(args)
    inst = gen_instance(cfg)
    field = dft_full(inst.orbit.points)
    ratio = max_nonzero_ratio(field)
    payload = {"p": cfg.p, "d": cfg.d, "I_size": len(inst.orbit.points), "max_nonzero_ratio": ratio, "spectra": []}
    lines = [f"max nonzero ratio = {ratio:.12g}"]
    for a in _floats(args.alpha) or (0.5,):
        S = spec_alpha(field, a, exact=args.exact)
        pts = [list(map(int, x)) for x in S.points.points()]
        flags = [list(map(int, x)) for x in S.margin_flags.points()]
        payload["spectra"].append({"alpha": a, "size": len(pts), "points": pts, "margin_flags": flags})
        lines.append(f"alpha = {a}: |Spec| = {len(pts)}, margin flags = {len(flags)}")
    _emit(args, payload, lines)
    return 0


def _cmd_growth(args) -> int:
    cfg = _config(args)
    inst = gen_instance(cfg)
    field = dft_full(inst.orbit.points)
    a = (_floats(args.alpha) or (0.5,))[0]
    A = build_A_alpha(inst.group, spec_alpha(field, a, exact=args.exact))
    g = growth_report(A)
    payload = {"alpha": a, **g.as_dict()}
    _emit(args, payload, [f"{k} = {v}" for k, v in payload.items()])
    return 0


def _cmd_iterate(args) -> int:
    cfg = _config(args)
    inst = gen_instance(cfg)
    sched, cert = prop_p_iteration(inst.group, inst.orbit, args.eps_prime, exact=args.exact, seed=cfg.seed)
    payload = {
        "J": sched.J,
        "eps0": sched.eps0,
        "alphas": sched.alphas,
        "spec_sizes": sched.spec_sizes,
        "chosen_j": sched.chosen_j,
        "c": sched.c,
        "phi": sched.phi,
        "F_size": cert.F_size,
        "E_size": cert.E_size,
        "bound": float(cert.bound),
        "checked": cert.checked_pairs,
        "full_check": cert.full_check,
        "violations": cert.violations,
        "verdict": cert.verdict,
    }
    _emit(args, payload, [f"{k} = {v}" for k, v in payload.items()])
    return 1 if cert.verdict == FAIL else 0


def _cmd_verify(args) -> int:
    cfg = _config(args)
    inst = gen_instance(cfg)
    reports = verify_all(inst)
    wanted = CHECKS if args.lemma == "all" else (args.lemma.replace("-", "_"),)
    chosen = {k: reports[k] for k in wanted}
    payload = {k: r.as_dict() for k, r in chosen.items()}
    _emit(args, payload, [f"{k:20s} {r.verdict}  {r.message}".rstrip() for k, r in chosen.items()])
    return 1 if any(r.verdict == FAIL for r in chosen.values()) else 0


def _cmd_sweep(args) -> int:
    if args.config:
        configs = load_configs(args.config)
    elif args.p:
        primes = _ints(args.p)
        seeds = _seed_range(args.seed)
        configs = [_config(args, p=p, seed=s) for p in primes for s in seeds]
    else:
        configs = []
    res = run_sweep(configs, jobs=args.jobs, timing=args.timing)
    text = res.to_json() + "\n" if args.out == "json" else res.to_csv()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return res.exit_code


def _seed_range(text: str) -> list[int]:
    """``"3"``, ``"0,4,7"`` or ``"0-9"``."""
    if "-" in text:
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    return list(_ints(text))


COMMANDS = {
    "orbit": _cmd_orbit,
    "spectrum": _cmd_spectrum,
    "profile": _cmd_profile,
    "growth": _cmd_growth,
    "iterate": _cmd_iterate,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _apply_caps(args.cap)
    try:
        return COMMANDS[args.cmd](args)
    except CapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
