"""Command-line front end: exact zeta(0) tables, X invariants, checks, Stark units.

Output is a JSON report.  Exit status is 0 when every check passes, 1 when
one fails and 2 when a recognition stays inconclusive at the top precision.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
from mpmath import mpf

from . import cones, exactnum, invariants, recognize, stark
from .qfield import QuadElem, QuadField, UnsupportedFieldError, make_field
from .rayclass import RayClassGroup, make_modulus, ray_class_group

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2
DIGIT_LADDER = (300, 600, 1000)
COMMANDS = ("zeta0", "xinv", "verify", "stark")
VERIFY_CHECKS = ("main", "replace2", "welldef", "keylemma", "identities", "example63")


def digits_to_bits(digits: int) -> int:
    return math.ceil(digits * math.log2(10))


@dataclass(frozen=True)
class JobConfig:
    d: int = 5
    modulus: str = "4"
    inf: tuple = (1, 2)
    precision_bits: int = 1000
    subgroup: tuple | None = None
    max_deg: int = 8
    max_height: int = 10 ** 6
    max_den: int = invariants.DEFAULT_MAX_DEN
    seed: int = 20240601
    points: int = 1000
    identity_count: int = 1000

    def echo(self) -> dict:
        return {
            "d": self.d, "modulus": self.modulus, "inf": list(self.inf),
            "precision_bits": self.precision_bits,
            "subgroup": None if self.subgroup is None else list(self.subgroup),
            "max_deg": self.max_deg, "max_height": self.max_height, "max_den": self.max_den,
            "seed": self.seed,
        }


def _int_list(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(t) for t in text.replace(" ", "").split(","))


_CONVERTERS = {
    "d": int, "modulus": str, "inf": _int_list, "precision_bits": int, "prec": int,
    "subgroup": _int_list, "max_deg": int, "max_height": int, "max_den": int, "seed": int,
    "points": int, "identity_count": int,
}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONVERTERS:
            raise ValueError(f"config line {n}: unknown key {key!r}")
        if key == "prec":
            key = "precision_bits"
        out[key] = _CONVERTERS[key](value)
    return out


_TERM = re.compile(r"([+-]?)\s*([0-9/]*)\s*\*?\s*(sqrt\(?(\d+)\)?|√(\d+))?")


def parse_element(text: str, field_: QuadField) -> QuadElem:
    """Parse forms such as ``4``, ``6+sqrt(5)``, ``-1-2*sqrt5``, ``1/2+1/2*sqrt(5)``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty element")
    p, q = Fraction(0), Fraction(0)
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse element {text!r}")
        sign, coef, root, r1, r2 = m.groups()
        if not coef and not root:
            raise ValueError(f"cannot parse element {text!r}")
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        if root:
            if int(r1 or r2) != field_.d:
                raise ValueError(f"sqrt({r1 or r2}) does not belong to Q(sqrt({field_.d}))")
            q += c
        else:
            p += c
        pos = m.end()
    return field_.elem(p, q)


def _is_example(cfg: JobConfig) -> bool:
    return cfg.d == 5 and cfg.modulus.replace(" ", "") == "4" and tuple(sorted(cfg.inf)) == (1, 2)


def build_group(cfg: JobConfig) -> RayClassGroup:
    if _is_example(cfg):
        return stark.example_preset().group
    F = make_field(cfg.d)
    f = make_modulus(F, parse_element(cfg.modulus, F), cfg.inf)
    return ray_class_group(F, f)


# ------------------------------------------------------------ formatting


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def real_str(x, bits: int) -> str:
    digits = max(15, int(bits * math.log10(2)))
    if x == 0:
        return "0"
    with mpmath.workprec(bits + 10):
        return mpmath.nstr(mpf(x), digits, min_fixed=-math.inf, max_fixed=math.inf)


def _sci(x) -> str:
    return "0" if x is None or x == 0 else mpmath.nstr(mpf(x), 6)


def group_info(g: RayClassGroup) -> dict:
    return {
        "field": f"Q(sqrt({g.field.d}))",
        "modulus": g.modulus.describe(),
        "order": len(g),
        "classes": {c.label: str(rep) for c, rep in zip(g.classes, g.representatives)},
        "eps_plus": str(g.field.totally_positive_unit),
    }


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    timing: dict | None = None

    def add_check(self, name: str, status: str, **info):
        entry = {"name": name, "status": status}
        entry.update(info)
        self.checks.append(entry)

    def exit_code(self) -> int:
        states = {c["status"] for c in self.checks}
        if "fail" in states:
            return EXIT_FAIL
        if recognize.INCONCLUSIVE in states:
            return EXIT_INCONCLUSIVE
        return EXIT_PASS

    def to_dict(self) -> dict:
        out = {"command": self.command, "inputs": self.inputs, "results": self.results,
               "checks": self.checks, "provenance": self.provenance,
               "status": ("pass", "fail", "inconclusive")[self.exit_code()]}
        if self.timing is not None:
            out["timing"] = self.timing
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)


def _default_provenance(g: RayClassGroup) -> dict:
    F = g.field
    return {
        "D": cones.shintani_domain(F).describe(),
        "a_c": str(F.unit_ideal().generator),
        "modulus_generator": str(g.modulus.m_ideal.generator),
    }


# ----------------------------------------------------------- commands


def cmd_zeta0(cfg: JobConfig) -> Report:
    g = build_group(cfg)
    rep = Report("zeta0", cfg.echo(), provenance=_default_provenance(g))
    rep.results["group"] = group_info(g)
    rep.results["zeta0"] = {c.label: frac_str(invariants.zeta0_exact(invariants.make_context(g, c)))
                            for c in g.classes}
    return rep


def cmd_xinv(cfg: JobConfig) -> Report:
    g = build_group(cfg)
    bits = cfg.precision_bits
    rep = Report("xinv", cfg.echo(), provenance=_default_provenance(g))
    rep.results["group"] = group_info(g)
    table = {}
    for c in g.classes:
        ctx = invariants.make_context(g, c)
        row = {}
        for iota in (1, 2):
            xv = invariants.x_invariant(ctx, iota, bits)
            row[f"iota{iota}"] = {"G": real_str(xv.g, bits), "W": real_str(xv.w, bits),
                                  "V": real_str(xv.v, bits), "X": real_str(xv.x, bits),
                                  "prec_bits": bits, "context_hash": xv.context_hash}
        table[c.label] = row
    rep.results["x"] = table
    return rep


def _tol(bits: int) -> mpf:
    return mpf(2) ** (-int(0.8 * bits))


def _unit_check_entry(chk: invariants.UnitExponentCheck) -> dict:
    return {"q": None if chk.q is None else frac_str(chk.q), "residual": _sci(chk.residual),
            "raw": real_str(chk.value, 64), "prec_bits": chk.prec}


def verify_main(cfg: JobConfig, rep: Report):
    g = build_group(cfg)
    bits = cfg.precision_bits
    if set(g.places) != {1, 2}:
        rep.add_check("main", "fail", reason="both infinite places must divide the modulus")
        return
    for c in g.classes:
        for i, j in ((1, 2), (2, 1)):
            chk = invariants.verify_theorem_main(g, c, i, j, bits, max_den=cfg.max_den)
            ok = chk.passes(_tol(bits))
            rep.add_check(f"main {c.label} i={i} j={j}", "pass" if ok else "fail", **_unit_check_entry(chk))


def alternative_domain(F: QuadField) -> cones.ConeSet:
    """C(eps_plus) and C(1, eps_plus): the same sector with the other boundary ray."""
    eps = F.totally_positive_unit
    return cones.ConeSet((cones.Cone((eps,)), cones.Cone((F.elem(1), eps))))


def verify_replace2(cfg: JobConfig, rep: Report):
    g = build_group(cfg)
    F = g.field
    bits = cfg.precision_bits
    D = cones.shintani_domain(F)
    alt_ideal = F.ideal(F.elem(3))
    variants = {
        "refine": (cones.refine_set(D, 1, "III"), None),
        "alt-domain": (alternative_domain(F), None),
        "a_c=(3)": (D, alt_ideal),
    }
    for c in g.classes:
        for name, second in variants.items():
            r1, r2 = invariants.verify_replace2(g, c, (D, None), second, bits, cfg.max_den)
            ok = r1.passes(_tol(bits)) and r2.passes(_tol(bits)) and r1.q == r2.q
            rep.add_check(f"replace2 {c.label} {name}", "pass" if ok else "fail",
                          iota1=_unit_check_entry(r1), iota2=_unit_check_entry(r2))


def welldef_cones(F: QuadField) -> cones.ConeSet:
    """C(1, nu) with nu = sqrt(d) - floor(sqrt(d)), positive at the first place only."""
    return cones.ConeSet((cones.Cone((F.elem(1), cones.keylemma_nu(F))),))


def verify_welldef(cfg: JobConfig, rep: Report):
    g = build_group(cfg)
    F = g.field
    bits = cfg.precision_bits
    if 2 not in g.places:
        rep.add_check("welldef", "fail", reason="the second infinite place must divide the modulus")
        return
    D = welldef_cones(F)
    refinements = {"I": cones.refine_set(D, 0, "I"), "II": cones.refine_set(D, 0, "II", (1, 2)),
                   "III": cones.refine_set(D, 0, "III")}
    for c in g.classes:
        base = invariants.x_fml(invariants.make_context(g, c, None, D, paired_place=2), 1, bits)
        for name, D2 in refinements.items():
            other = invariants.x_fml(invariants.make_context(g, c, None, D2, paired_place=2), 1, bits)
            diff = abs(other - base)
            rep.add_check(f"welldef {c.label} case {name}", "pass" if diff < _tol(bits) else "fail",
                          difference=_sci(diff), value=real_str(base, 64))


def verify_keylemma(cfg: JobConfig, rep: Report):
    F = make_field(cfg.d)
    data = cones.keylemma_construct(F)
    special = [F.elem(1), data.nu, data.eps1, data.eps1 * data.nu, F.elem(1) + data.nu]
    pts = cones.sample_points(F, cfg.points, cfg.seed, half_plane=True, special=special)
    bad = [str(z) for z in pts if not data.check_point(z)]
    rep.add_check("keylemma", "pass" if not bad else "fail", points=len(pts), failures=len(bad),
                  first_failures=bad[:5], X1=data.X1.describe(), nu=str(data.nu))


def verify_identities(cfg: JobConfig, rep: Report):
    for name in exactnum.IDENTITY_NAMES:
        passed, total = exactnum.run_identity_suite(name, cfg.identity_count, cfg.seed)
        rep.add_check(f"identity {name}", "pass" if passed == total else "fail", passed=passed, total=total)


@dataclass(frozen=True)
class Recognition:
    status: str
    poly: tuple | None
    digits: int | None
    residual: mpf | None
    trace: tuple

    def entry(self) -> dict:
        return {"outcome": self.status, "poly": None if self.poly is None else list(self.poly),
                "digits": self.digits, "verify_residual": _sci(self.residual), "trace": list(self.trace)}


def recognize_escalating(compute, max_deg: int, max_height: int, ladder=DIGIT_LADDER) -> Recognition:
    """algdep at 300, 600, then 1000 digits, re-verifying at twice the precision."""
    trace = []
    for digits in ladder:
        bits = digits_to_bits(digits)
        out = recognize.algdep(compute(bits), max_deg, max_height, bits, recompute=compute)
        trace.append(f"{digits} digits: {out.status}")
        if out.status == recognize.FOUND:
            r = out.result
            vdigits = int(r.verified_prec * math.log10(2))
            if r.residual < mpf(10) ** (-int(0.9 * digits)):
                return Recognition(recognize.FOUND, tuple(r.poly), digits, r.residual, tuple(trace))
            trace.append(f"{digits} digits: residual above 10^-{int(0.9 * digits)} at {vdigits} digits")
    final = recognize.INCONCLUSIVE
    return Recognition(final, None, None, None, tuple(trace))


def example_ratio(bits: int) -> mpf:
    """exp(4 X(c1, iota1)) / G for the shipped preset."""
    g = stark.example_preset().group
    wp = bits + 20
    with mpmath.workprec(wp):
        x = invariants.x_invariant(invariants.make_context(g, g.classes[0]), 1, wp).x
        out = mpmath.exp(4 * x) / stark.example_constant_G(wp)
    with mpmath.workprec(bits):
        return +out


def example_stark_value(bits: int) -> mpf:
    return stark.stark_unit(stark.example_stark_data(), "id", bits)


def verify_example63(cfg: JobConfig, rep: Report):
    g = stark.example_preset().group
    expected = [Fraction(1, 4), Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4)]
    got = [invariants.zeta0_exact(invariants.make_context(g, c)) for c in g.classes]
    rep.add_check("example63 zeta0", "pass" if got == expected else "fail",
                  values=[frac_str(v) for v in got])
    rec = recognize_escalating(example_ratio, cfg.max_deg, cfg.max_height)
    st = rec.status if rec.status != recognize.FOUND else "pass"
    rep.add_check("example63 exp(4X(c1))/G algebraic", st, **rec.entry())
    rec = recognize_escalating(example_stark_value, cfg.max_deg, cfg.max_height)
    if rec.status == recognize.FOUND:
        st = "pass" if abs(rec.poly[0]) == 1 and abs(rec.poly[-1]) == 1 else "fail"
    else:
        st = rec.status
    rep.add_check("example63 Stark unit", st, **rec.entry())


_VERIFIERS = {
    "main": verify_main, "replace2": verify_replace2, "welldef": verify_welldef,
    "keylemma": verify_keylemma, "identities": verify_identities, "example63": verify_example63,
}


def cmd_verify(cfg: JobConfig, which: str) -> Report:
    rep = Report("verify " + which, cfg.echo())
    if which not in ("keylemma", "identities"):
        g = build_group(cfg) if which != "example63" else stark.example_preset().group
        rep.provenance = _default_provenance(g)
    _VERIFIERS[which](cfg, rep)
    return rep


def cmd_stark(cfg: JobConfig) -> Report:
    g = build_group(cfg)
    if cfg.subgroup is None:
        sub = [0, 2] if _is_example(cfg) else [g.identity.index]
    else:
        sub = [i - 1 for i in cfg.subgroup]
    cd = stark.congruence_data(g, sub)
    rep = Report("stark", cfg.echo(), provenance=_default_provenance(g))
    rep.results["group"] = group_info(g)
    rep.results["subgroup"] = [c.label for c in cd.subgroup]
    rep.results["cosets"] = {k: [c.label for c in v] for k, v in cd.coset_labels.items()}

    cache: dict = {}

    def compute(bits: int) -> mpf:
        if bits not in cache:
            cache[bits] = stark.stark_unit(cd, "id", bits)
        return cache[bits]

    rec = recognize_escalating(compute, cfg.max_deg, cfg.max_height)
    bits = digits_to_bits(rec.digits or DIGIT_LADDER[0])
    value = compute(bits)
    rep.results["stark_unit"] = {"value": real_str(value, min(bits, 200)), "prec_bits": bits}
    rep.results["recognition"] = rec.entry()
    if rec.status != recognize.FOUND:
        rep.add_check("stark recognition", rec.status, trace=list(rec.trace))
        return rep
    rep.add_check("stark recognition", "pass", poly=list(rec.poly))
    is_unit = abs(rec.poly[0]) == 1 and abs(rec.poly[-1]) == 1
    rep.add_check("stark unit", "pass" if is_unit else "fail", constant_term=rec.poly[0])
    # the values on the other cosets are Galois conjugates: roots of the same polynomial
    with mpmath.workprec(bits + 20):
        for label in sorted(cd.coset_labels):
            if label == "id":
                continue
            v = stark.stark_unit(cd, label, bits)
            res = abs(recognize._poly_eval(rec.poly, v)) / max(1, abs(v)) ** (len(rec.poly) - 1)
            ok = res < mpf(10) ** (-int(0.9 * rec.digits))
            rep.add_check(f"stark conjugate {label}", "pass" if ok else "fail", residual=_sci(res))
    return rep


# -------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shintani-stark", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("which", nargs="?", choices=VERIFY_CHECKS, help="check to run for 'verify'")
    p.add_argument("--config", help="flat key = value file")
    p.add_argument("--d", type=int)
    p.add_argument("--modulus", help="generator of the finite part, e.g. 4 or 6+sqrt(5)")
    p.add_argument("--inf", type=_int_list, help="infinite places, e.g. 1,2")
    p.add_argument("--prec", type=int, help="working precision in bits")
    p.add_argument("--subgroup", type=_int_list, help="class numbers fixing K, e.g. 1,3")
    p.add_argument("--json", help="also write the report to this path")
    p.add_argument("--seed", type=int)
    p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    return p


def make_config(args) -> JobConfig:
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    for key, attr in (("d", "d"), ("modulus", "modulus"), ("inf", "inf"), ("prec", "precision_bits"),
                      ("subgroup", "subgroup"), ("seed", "seed")):
        v = getattr(args, key)
        if v is not None:
            values[attr] = v
    cfg = replace(JobConfig(), **values)
    if cfg.precision_bits < 128:
        raise ValueError("precision must be at least 128 bits")
    return cfg


def run(argv=None) -> tuple[Report, int]:
    args = build_parser().parse_args(argv)
    cfg = make_config(args)
    t0 = time.perf_counter()
    if args.command == "verify":
        if args.which is None:
            raise SystemExit("verify needs one of: " + ", ".join(VERIFY_CHECKS))
        rep = cmd_verify(cfg, args.which)
    elif args.command == "zeta0":
        rep = cmd_zeta0(cfg)
    elif args.command == "xinv":
        rep = cmd_xinv(cfg)
    else:
        rep = cmd_stark(cfg)
    if args.timing:
        rep.timing = {"seconds": round(time.perf_counter() - t0, 3)}
    text = rep.to_json()
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return rep, rep.exit_code()


def main(argv=None) -> int:
    try:
        rep, code = run(argv)
    except (ValueError, UnsupportedFieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(rep.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
