"""JSON emitters: rationals as "p/q" strings, never floats."""

from __future__ import annotations

from fractions import Fraction

from .exact import Cyclotomic
from .minimal import KacLabel
from .modinv import ModularInvariant
from .qseries import LaurentPoly, PuiseuxSeries
from .rcft import ModularData
from .sl2 import Sl2Label


def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cyclo_json(x: Cyclotomic) -> dict:
    return {"order": x.order, "coords": [frac_str(c) for c in x.coords]}


def label_json(label):
    if isinstance(label, Sl2Label):
        return label.j
    if isinstance(label, KacLabel):
        return [label.r, label.s]
    return label


def mdata_json(data: ModularData, include_s: bool = True) -> dict:
    doc = {
        "theory": {"family": data.theory_id[0], "param": data.theory_id[1]},
        "labels": [label_json(lab) for lab in data.labels],
        "c": frac_str(data.central_charge),
        "h": [frac_str(h) for h in data.weights],
        "s_scale": frac_str(data.s_scale),
        "t_phases": [frac_str(t) for t in data.t_phases],
    }
    if include_s:
        doc["S"] = [[cyclo_json(x) for x in data.s_row(i)]
                    for i in range(data.size)]
    return doc


def invariant_json(inv: ModularInvariant) -> dict:
    return {
        "basis": [label_json(lab) for lab in inv.basis],
        "matrix": [list(row) for row in inv.matrix],
        "tag": inv.tag,
    }


def series_json(s: PuiseuxSeries) -> dict:
    coeffs = []
    for c in s.coeffs:
        if isinstance(c, int):
            coeffs.append(str(c))
        else:
            coeffs.append([{"z_exp": e, "c": str(v)}
                           for e, v in sorted(c.coeffs.items())])
    return {"leading_exponent": frac_str(s.leading_exponent), "coeffs": coeffs}


def laurent_str(c) -> str:
    if isinstance(c, int):
        return str(c)
    if isinstance(c, LaurentPoly):
        if not c.coeffs:
            return "0"
        parts = []
        for e, v in sorted(c.coeffs.items()):
            if e == 0:
                parts.append(str(v))
            else:
                coef = "" if v == 1 else ("-" if v == -1 else f"{v}*")
                parts.append(f"{coef}z^{e}")
        return " + ".join(parts).replace("+ -", "- ")
    return str(c)
