"""Batch front-end: parse a JSON/TOML job file, run a verification suite or
a single computation, and emit a machine-readable report.

Exit codes: 0 all cases pass, 1 an identity fails, 2 a case did not
stabilize within its cap, 3 the job file is invalid.
"""

import argparse
import cmath
import json
import random
import sys
import time

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib
from fractions import Fraction

from .errors import (ConfigError, NeedsRefinement, NonStabilizing,
                     SingularFiber, WeilTransferError)
from .exactnum import CycNum
from .lfactor import SatakeData, assembly_check, lx_sharp, volume_x
from .padic import p_power_half, valuation
from .quadspace import QuadSpace, catalog_space, non_residue
from .schwartz import SchwartzFn
from .transfer import (basic_f_value, eval_weyl_pointwise, hecke_cosets,
                       hecke_translate, restrict_x, whittaker_orbital,
                       x_transfer_value)
from .weil import ELT_W, act_element, act_unipotent, act_weyl, elt_n, elt_t, \
    weil_index

COMMANDS = ("verify-transfer", "verify-fl", "verify-weil", "density",
            "lfactor", "hecke-check")


# ---------------------------------------------------------------- config

def load_config(path: str) -> dict:
    try:
        if path.endswith(".toml"):
            with open(path, "rb") as fh:
                return tomllib.load(fh)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError("cannot read job file %s: %s" % (path, exc))


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise ConfigError("floats are not exact; write '%s' as a string" % x)
    try:
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError("bad rational %r: %s" % (x, exc))


def parse_quadspace(data) -> QuadSpace:
    if not isinstance(data, dict) or "p" not in data:
        raise ConfigError("quadspace must be an object with a prime 'p'")
    try:
        if "dim" in data:
            return catalog_space(int(data["p"]), int(data["dim"]),
                                 data.get("kind", "split"))
        return QuadSpace(int(data["p"]), data["gram"],
                         [_frac(x) for x in data["v1"]])
    except (KeyError, WeilTransferError, ValueError, TypeError) as exc:
        raise ConfigError("bad quadspace: %s" % exc)


def _coeff(x, p) -> CycNum:
    if isinstance(x, dict):
        return CycNum.from_json(x, p)
    return CycNum.rational(_frac(x))


def parse_phi(data, Q) -> list:
    """One or more test functions. 'basic' is the lattice indicator; an
    explicit cell list or a seeded random recipe are also accepted."""
    if data in (None, "basic"):
        return [("basic", Q.basic_schwartz())]
    if isinstance(data, dict) and "cells" in data:
        cells = {}
        for cell in data["cells"]:
            key = (tuple(_frac(x) for x in cell["center"]),
                   int(cell["level"]))
            cells[key] = _coeff(cell["coeff"], Q.p)
        try:
            return [("phi", SchwartzFn(Q.p, Q.n, cells))]
        except (ValueError, WeilTransferError) as exc:
            raise ConfigError("bad phi: %s" % exc)
    if isinstance(data, dict) and "random" in data:
        r = data["random"]
        out = []
        seed = int(r.get("seed", 0))
        for i in range(int(r.get("count", 1))):
            out.append(("random-%d" % i, generate_random_phi(
                Q.p, Q.n, seed + i,
                level_range=tuple(r.get("level_range", (0, 1))),
                support_radius=int(r.get("support_radius", 1)),
                coeff_pool=r.get("coeff_pool"),
                n_cells=int(r.get("cells", 3)))))
        return out
    raise ConfigError("phi must be 'basic', a cell list, or a random recipe")


def generate_random_phi(p, n, seed, level_range=(0, 1), support_radius=1,
                        coeff_pool=None, n_cells=3) -> SchwartzFn:
    """Deterministic pseudo-random test function: n_cells disjoint cells
    with centers in p^{-support_radius} L and coefficients from the pool of
    rationals times small roots of unity."""
    rng = random.Random(seed)
    pool = [_frac(x) for x in (coeff_pool or ("1", "2", "1/2", "3", "2/3"))]
    cells = {}
    while len(cells) < n_cells:
        k = rng.randint(level_range[0], level_range[1])
        c = tuple(Fraction(rng.randrange(p ** (support_radius + k)),
                           p ** support_radius) for _ in range(n))
        clash = False
        for (d, k2), _ in cells.items():
            m = min(k, k2)
            if all(valuation(ci - di, p) >= m if ci != di else True
                   for ci, di in zip(c, d)):
                clash = True
                break
        if clash:
            continue
        co = CycNum.zeta(rng.choice((1, 1, 4)), rng.randrange(4)) \
            .scale(rng.choice(pool))
        cells[(c, k)] = co
    return SchwartzFn(p, n, cells)


def parse_grid_a(cfg, Q) -> list:
    grid = cfg.get("grid", {})
    if "a" in grid:
        vals = [_frac(x) for x in grid["a"]]
        if any(v == 0 for v in vals):
            raise ConfigError("a = 0 is not in the torus")
        return vals
    u = non_residue(Q.p)
    return [Fraction(s) * Fraction(Q.p) ** v
            for v in (-1, 0, 1) for s in (1, u)]


def parse_grid_alpha(cfg, Q) -> list:
    grid = cfg.get("grid", {})
    out = []
    for item in grid.get("alpha", ({"order": 1}, {"order": 4, "exp": 1},
                                   {"order": 5, "exp": 2})):
        if isinstance(item, dict) and "order" in item:
            out.append(SatakeData(Q.p, order=int(item["order"]),
                                  exp=int(item.get("exp", 1))))
        elif isinstance(item, (int, float)):
            out.append(SatakeData(Q.p, alpha=cmath.exp(2j * cmath.pi * item)))
        else:
            raise ConfigError("bad alpha entry %r" % (item,))
    return out


# ---------------------------------------------------------------- report

def _render(val) -> dict:
    if isinstance(val, CycNum):
        z = val.to_complex()
        return {"exact": val.to_json(), "float": [z.real, z.imag]}
    if isinstance(val, Fraction):
        return {"exact": str(val), "float": [float(val), 0.0]}
    if isinstance(val, complex):
        return {"exact": None, "float": [val.real, val.imag]}
    return {"exact": str(val), "float": None}


def make_case(cid, fn) -> dict:
    """Run one case; fn returns (lhs, rhs, equal, levels) and may raise."""
    t0 = time.monotonic()
    case = {"id": cid, "lhs": None, "rhs": None, "equal": False,
            "levels": {}, "ms": 0}
    try:
        lhs, rhs, equal, levels = fn()
        case.update(lhs=_render(lhs), rhs=_render(rhs) if rhs is not None
                    else None, equal=bool(equal), levels=levels)
    except (NonStabilizing, NeedsRefinement, SingularFiber) as exc:
        case["error"] = "non-stabilized: %s" % exc
    case["ms"] = round((time.monotonic() - t0) * 1000, 3)
    return case


# ---------------------------------------------------------------- suites

def suite_verify_transfer(cfg, Q):
    n_max = int(cfg.get("caps", {}).get("n_max", 16))
    cap = int(cfg.get("caps", {}).get("cap", 12))
    cases = []
    for name, phi in parse_phi(cfg.get("phi"), Q):
        for a in parse_grid_a(cfg, Q):
            def run(phi=phi, a=a):
                got = whittaker_orbital(phi, a, Q, n_max=n_max)
                rhs = x_transfer_value(phi, a, Q, cap=cap)
                return (got.value, rhs, got.value == rhs,
                        {"n": got.stabilized_at})
            cases.append(make_case("%s a=%s" % (name, a), run))
    return cases


def suite_verify_fl(cfg, Q):
    phi0 = Q.basic_schwartz()
    cases = []

    def run_restrict():
        lhs = restrict_x(phi0, Q)
        rhs = restrict_x(phi0.refine(1), Q)
        return ("restrict_x(basic)", "restrict_x(refined basic)",
                lhs == rhs and not lhs.is_zero(), {})
    cases.append(make_case("restrict-basic", run_restrict))
    for a in parse_grid_a(cfg, Q):
        def run(a=a):
            v = valuation(a, Q.p)
            got = basic_f_value(Q, elt_t(a), factors=(("t", a),))
            want = CycNum.rational(0)
            if v >= 0:
                want = p_power_half(Q.p, -Q.n * v)
                if Q.chi(a) == -1:
                    want = want.scale(Fraction(-1))
            return got, want, got == want, {}
        cases.append(make_case("basic-f a=%s" % a, run))
    cases += suite_verify_transfer({"grid": cfg.get("grid", {}),
                                    "caps": cfg.get("caps", {}),
                                    "phi": "basic"}, Q)
    return cases


def suite_verify_weil(cfg, Q):
    if Q.n % 2:
        raise ConfigError("verify-weil needs an even-dimensional space")
    seed = int(cfg.get("seed", 0))
    pairs = int(cfg.get("grid", {}).get("pairs", 10))
    rng = random.Random(seed)
    phi = Q.basic_schwartz().translate(tuple([1] + [0] * (Q.n - 1)))
    cases = []

    def run_gamma():
        g = weil_index(Q)
        want = CycNum.rational(Q.chi(-1))
        return g * g, want, g * g == want, {}
    cases.append(make_case("gamma-squared", run_gamma))

    def run_ww():
        ww = act_weyl(act_weyl(phi, Q), Q)
        minus = act_element(phi, elt_t(-1), Q)
        return ("w.w.phi", "reflection", ww.equals_ae(minus), {})
    cases.append(make_case("weyl-square", run_ww))

    def run_norm():
        g = act_weyl(phi, Q).simplify()
        n1 = _l2_norm_sq(phi)
        n2 = _l2_norm_sq(g)
        return n1, n2, n1 == n2, {}
    cases.append(make_case("plancherel", run_norm))

    done = 0
    while done < pairs:
        g1 = _random_tame(rng, Q.p)
        g2 = rng.choice([_random_tame(rng, Q.p),
                         elt_n(rng.randrange(-3, 4)) * ELT_W])
        if _word_cost(g1, Q.p) + _word_cost(g2, Q.p) > 3 or \
                _word_cost(g1 * g2, Q.p) > 3:
            continue

        def run(g1=g1, g2=g2):
            lhs = act_element(act_element(phi, g2, Q), g1, Q)
            rhs = act_element(phi, g1 * g2, Q)
            return ("act(g1)act(g2)", "act(g1*g2)", lhs.equals_ae(rhs), {})
        cases.append(make_case("group-law-%d" % done, run))
        done += 1
    return cases


def _l2_norm_sq(phi) -> CycNum:
    total = CycNum.rational(0)
    for (c, k), co in phi.cells.items():
        total = total + co.abs2().scale(Fraction(1, phi.p ** (phi.n * k)))
    return total


def _random_tame(rng, p):
    denoms = [d for d in (1, 2, 4, 5) if d % p]
    while True:
        nums = [rng.randrange(-5, 6) for _ in range(3)]
        a, b, c = (Fraction(x, rng.choice(denoms)) for x in nums)
        if a == 0 or c == 0 or valuation(a, p) or valuation(c, p):
            continue
        from .weil import SL2Elt
        return SL2Elt(a, b, c, (1 + b * c) / a)


def _word_cost(g, p):
    from .weil import bruhat_factor
    cost = 0
    for atom in bruhat_factor(g):
        if atom[0] == "n" and atom[1] != 0:
            cost += max(0, -valuation(atom[1], p))
        elif atom[0] == "t":
            cost += abs(valuation(atom[1], p))
    return cost


def suite_density(cfg, Q):
    cap = int(cfg.get("caps", {}).get("cap", 12))
    cases = []
    for name, phi in parse_phi(cfg.get("phi"), Q):
        for a in (cfg.get("grid", {}).get("a") and
                  [_frac(x) for x in cfg["grid"]["a"]] or [Fraction(1)]):
            def run(phi=phi, a=a):
                res = Q.fiber_volume(phi, a, cap=cap)
                val = res.value.as_fraction() if res.value.is_rational() \
                    else res.value
                return (val, None, res.certified,
                        {"stabilized_at": res.stabilized_at,
                         "certified": res.certified})
            case = make_case("%s a=%s" % (name, a), run)
            if case["lhs"]:
                case["value"] = case["lhs"]["exact"]
                case["stabilized_at"] = case["levels"].get("stabilized_at")
                case["certified"] = case["levels"].get("certified")
            cases.append(case)
    return cases


def suite_lfactor(cfg, Q):
    cases = []
    for i, sd in enumerate(parse_grid_alpha(cfg, Q)):
        def run(sd=sd):
            ok, res = assembly_check(Q, sd)
            val = lx_sharp(Q, sd)
            try:
                shown = val.as_fraction()
            except ValueError:
                shown = val.to_complex()
            return shown, None, ok, {"residual": res if res else 0}
        label = "order=%s exp=%s" % (sd.order, sd.exp) if sd.exact \
            else "alpha=%s" % sd.alpha_num
        cases.append(make_case("assembly %02d %s" % (i, label), run))

    def run_vol():
        return (volume_x(Q, "count"), volume_x(Q, "closed"),
                volume_x(Q, "count") == volume_x(Q, "closed"), {})
    cases.append(make_case("volume count=closed", run_vol))
    return cases


def suite_hecke_check(cfg, Q):
    if Q.n % 2:
        raise ConfigError("hecke-check needs an even-dimensional space")
    cases = []

    def run_cosets():
        reps = hecke_cosets(Q.p)
        want = Q.p * Q.p + Q.p
        return len(reps), want, len(reps) == want, {}
    cases.append(make_case("coset-count", run_cosets))
    T = hecke_translate(Q.basic_schwartz(), Q)

    def run_ninv():
        moved = act_unipotent(T, 1, Q)
        return ("n(1).T", "T", moved.equals_ae(T), {})
    cases.append(make_case("k-invariance-n", run_ninv))

    def run_winv():
        rng = random.Random(int(cfg.get("seed", 0)))
        for _ in range(12):
            v = tuple(Fraction(rng.randrange(-Q.p, Q.p + 1), 1)
                      for _ in range(Q.n))
            if eval_weyl_pointwise(T, v, Q) != T.evaluate(v):
                return ("w.T", "T", False, {})
        return ("w.T", "T", True, {"points": 12})
    cases.append(make_case("k-invariance-w", run_winv))
    n_max = int(cfg.get("caps", {}).get("n_max", 16))
    for a in parse_grid_a(cfg, Q):
        def run(a=a):
            got = whittaker_orbital(T, a, Q, n_max=n_max)
            rhs = x_transfer_value(T, a, Q)
            return (got.value, rhs, got.value == rhs,
                    {"n": got.stabilized_at})
        cases.append(make_case("transfer a=%s" % a, run))
    return cases


SUITES = {
    "verify-transfer": suite_verify_transfer,
    "verify-fl": suite_verify_fl,
    "verify-weil": suite_verify_weil,
    "density": suite_density,
    "lfactor": suite_lfactor,
    "hecke-check": suite_hecke_check,
}


def run_job(cfg: dict) -> dict:
    command = cfg.get("command")
    if command not in COMMANDS:
        raise ConfigError("command must be one of %s, got %r"
                          % (", ".join(COMMANDS), command))
    Q = parse_quadspace(cfg.get("quadspace"))
    cases = SUITES[command](cfg, Q)
    cases.sort(key=lambda c: c["id"])
    return {"suite": command, "cases": cases,
            "pass": all(c["equal"] for c in cases)}


def report_exit_code(report: dict) -> int:
    if any("error" in c for c in report["cases"]):
        return 2
    return 0 if report["pass"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ttl", description="exact p-adic transfer verification jobs")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON or TOML job")
    parser.add_argument("--out", help="write the JSON report here")
    parser.add_argument("--m-max", type=int, help="override caps.n_max")
    parser.add_argument("--threads", type=int, default=1,
                        help="accepted for interface compatibility; case "
                             "evaluation is sequential and deterministic")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.get("command") not in (None, args.command):
            raise ConfigError("job file says command=%r, CLI says %r"
                              % (cfg["command"], args.command))
        cfg["command"] = args.command
        if args.m_max is not None:
            cfg.setdefault("caps", {})["n_max"] = args.m_max
        report = run_job(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 3
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for case in report["cases"]:
        status = "PASS" if case["equal"] else \
            ("ERROR" if "error" in case else "FAIL")
        print("%-5s %s (%.0f ms)" % (status, case["id"], case["ms"]),
              file=sys.stderr)
    return report_exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
