"""Command-line frontend.

Exit codes: 0 all checks passed, 1 a mathematical check failed,
2 usage error.  Rationals print as "p/q"; floats appear only in the
clearly marked numeric columns.
"""

from __future__ import annotations

import functools
import json
import os
import re
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import click

from . import coset as coset_mod
from . import minimal as minimal_mod
from . import modinv, serialize, sl2 as sl2_mod
from .errors import ConsistencyError, UsageError
from .rcft import quantum_dims


@dataclass(frozen=True)
class RunConfig:
    order: int = 20
    precision_bits: int = 128
    cache_dir: Optional[str] = None
    output: str = "markdown"
    enumeration_caps: Optional[int] = None

    @staticmethod
    def load(path: Optional[str]) -> "RunConfig":
        cfg = RunConfig(cache_dir=os.environ.get("CFTKIT_CACHE_DIR"))
        if path is None:
            return cfg
        updates = {}
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip()
                if key in ("order", "precision_bits", "enumeration_caps"):
                    updates[key] = int(value)
                elif key in ("cache_dir", "output"):
                    updates[key] = value
                else:
                    raise UsageError(f"unknown config key {key!r}")
        cfg = replace(cfg, **updates)
        if cfg.order < 1 or cfg.precision_bits < 32:
            raise UsageError("config requires order >= 1 and precision_bits >= 32")
        return cfg


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UsageError as exc:
            click.echo(f"usage error: {exc}", err=True)
            sys.exit(2)
        except ConsistencyError as exc:
            click.echo(f"consistency failure: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _build_data(algebra: str, level: Optional[int], m: Optional[int]):
    if algebra == "sl2":
        if level is None:
            raise UsageError("sl2 needs --level")
        return sl2_mod.sl2_modular_data(level)
    if algebra == "minimal":
        if m is None:
            raise UsageError("minimal needs --m")
        return minimal_mod.minimal_modular_data(m)
    raise UsageError(f"unknown algebra {algebra!r} (expected sl2 or minimal)")


def _emit_json(doc) -> None:
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


def _table(headers, rows) -> None:
    click.echo("| " + " | ".join(headers) + " |")
    click.echo("|" + "|".join(" --- " for _ in headers) + "|")
    for row in rows:
        click.echo("| " + " | ".join(str(x) for x in row) + " |")


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="key=value config file mirroring the run defaults")
@click.pass_context
@guarded
def main(ctx, config_path):
    """Exact modular data and ADE modular invariants for sl2 WZW and
    Virasoro minimal models."""
    ctx.obj = RunConfig.load(config_path)


@main.command()
@click.argument("algebra")
@click.option("--level", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def mdata(cfg: RunConfig, algebra, level, m, as_json):
    """Print the modular data of a theory."""
    data = _build_data(algebra, level, m)
    if as_json:
        _emit_json(serialize.mdata_json(data))
        return
    click.echo(f"theory: {data.theory_id[0]} param={data.theory_id[1]}")
    click.echo(f"c = {serialize.frac_str(data.central_charge)}   "
               f"lambda = {serialize.frac_str(data.s_scale)}   "
               f"labels = {data.size}")
    qd = quantum_dims(data, cfg.precision_bits)
    rows = []
    for i, lab in enumerate(data.labels):
        ball = qd[i][1]
        rows.append((serialize.label_json(lab),
                     serialize.frac_str(data.weights[i]),
                     serialize.frac_str(data.t_phases[i]),
                     f"{ball.midpoint.real:.6f}"))
    _table(("label", "h", "t_phase", "qdim (numeric)"), rows)


@main.command()
@click.argument("algebra")
@click.option("--level", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--j", type=int, default=None)
@click.option("--r", type=int, default=None)
@click.option("--s", type=int, default=None)
@click.option("--order", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def char(cfg: RunConfig, algebra, level, m, j, r, s, order, as_json):
    """Print a character as a truncated q-series."""
    order = order or cfg.order
    if algebra == "sl2":
        if level is None or j is None:
            raise UsageError("sl2 character needs --level and --j")
        series = sl2_mod.sl2_character(level, j, order)
    elif algebra == "minimal":
        if m is None or r is None or s is None:
            raise UsageError("minimal character needs --m, --r, --s")
        label = minimal_mod.kac_canonical(m, r, s)
        series = minimal_mod.minimal_character(m, label, order)
    else:
        raise UsageError(f"unknown algebra {algebra!r}")
    if as_json:
        _emit_json(serialize.series_json(series))
        return
    rows = [(serialize.frac_str(series.leading_exponent + d),
             serialize.laurent_str(series.coeffs[d]))
            for d in range(series.order)]
    _table(("q-power", "coefficient"), rows)


@main.group()
def invariants():
    """Modular-invariant operations."""


def _print_invariants(invs, as_json):
    if as_json:
        _emit_json([serialize.invariant_json(inv) for inv in invs])
        return
    for inv in invs:
        click.echo(f"tag: {inv.tag}")
        for row in inv.matrix:
            click.echo("  " + " ".join(str(v) for v in row))


@invariants.command("enumerate")
@click.option("--algebra", required=True)
@click.option("--level", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.option("--cache", "use_cache", is_flag=True,
              help="read/write the commutant cache")
@click.pass_obj
@guarded
def enumerate_invariants(cfg: RunConfig, algebra, level, m, as_json, use_cache):
    """Enumerate all physical invariants of a theory."""
    data = _build_data(algebra, level, m)
    cache_dir = None
    if use_cache:
        cache_dir = cfg.cache_dir or os.path.join(
            os.path.expanduser("~"), ".cache", "cftkit")
    old = os.environ.get("CFTKIT_CACHE_DIR")
    try:
        if cache_dir:
            os.environ["CFTKIT_CACHE_DIR"] = cache_dir
        invs = modinv.enumerate_physical(data, caps=cfg.enumeration_caps,
                                         precision_bits=cfg.precision_bits)
    finally:
        if cache_dir:
            if old is None:
                os.environ.pop("CFTKIT_CACHE_DIR", None)
            else:
                os.environ["CFTKIT_CACHE_DIR"] = old
    _print_invariants(invs, as_json)


@invariants.command()
@click.option("--algebra", required=True)
@click.option("--level", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--tag", default=None)
@click.option("--matrix", "matrix_file", type=click.Path(exists=True), default=None)
@click.pass_obj
@guarded
def verify(cfg: RunConfig, algebra, level, m, tag, matrix_file):
    """Verify one invariant (a named table row or a matrix file)."""
    data = _build_data(algebra, level, m)
    if (tag is None) == (matrix_file is None):
        raise UsageError("need exactly one of --tag or --matrix")
    if tag is not None:
        matches = [inv for t, inv in modinv.expected_invariants(data)
                   if t == tag or tag in t.replace("(", "").replace(")", "").split(",")]
        if not matches:
            raise UsageError(f"no expected invariant with tag {tag!r}")
        if len(matches) > 1:
            raise UsageError(f"tag {tag!r} is ambiguous here")
        cand = matches[0]
    else:
        with open(matrix_file) as fh:
            doc = json.load(fh)
        cand = modinv.ModularInvariant(
            tuple(data.labels),
            tuple(tuple(int(v) for v in row) for row in doc["matrix"]))
    report = modinv.verify_invariant(cand, data)
    if report.passed:
        click.echo(f"pass: invariant (tag {cand.tag or 'untagged'}) satisfies "
                   f"(M1)-(M3) exactly")
    else:
        click.echo(f"FAIL: axiom {report.axiom} violated at {report.witness}")
        sys.exit(1)


@invariants.command("from-extension")
@click.option("--algebra", required=True)
@click.option("--level", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def from_extension(cfg: RunConfig, algebra, level, m, as_json):
    """Build and classify the invariant of every catalog extension."""
    data = _build_data(algebra, level, m)
    results = []
    for ext, dec, named in coset_mod.catalog_extensions(data.theory_id):
        inv = modinv.invariant_from_extension(dec, data)
        results.append((ext.name, named.tag, inv))
    if as_json:
        _emit_json([{"extension": name, "voa": tag,
                     "invariant": serialize.invariant_json(inv)}
                    for name, tag, inv in results])
        return
    if not results:
        click.echo("no catalog extensions for this theory")
    for name, tag, inv in results:
        click.echo(f"{name} [{tag}] -> invariant tag {inv.tag}")


@invariants.command()
@click.option("--algebra", required=True)
@click.option("--level", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def expected(cfg: RunConfig, algebra, level, m, as_json):
    """Print the classification table rows for a theory."""
    data = _build_data(algebra, level, m)
    invs = [inv for _, inv in modinv.expected_invariants(data)]
    _print_invariants(invs, as_json)


@main.group()
def coset():
    """GKO coset operations."""


@coset.command("verify")
@click.option("--m", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--eps", type=int, required=True)
@click.option("--order", type=int, default=None)
@click.pass_obj
@guarded
def coset_verify(cfg: RunConfig, m, n, eps, order):
    """Verify a GKO branching identity at the q-series level."""
    order = order or cfg.order
    report = coset_mod.verify_gko(m, n, eps, order)
    if report.passed:
        click.echo(f"pass: GKO decomposition (m={m}, n={n}, eps={eps}) "
                   f"verified to order {report.order_verified}")
    else:
        click.echo(f"FAIL: mismatch {report.mismatch}")
        sys.exit(1)


@coset.command("mirror")
@click.option("--m", type=int, required=True)
@click.option("--summands", required=True,
              help="comma-separated level m+1 labels, e.g. 0,6")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def coset_mirror(cfg: RunConfig, m, summands, as_json):
    """Mirror an extension of sl2 level m+1 to the minimal model m."""
    js = [int(x) for x in summands.split(",") if x.strip() != ""]
    if 0 not in js:
        raise UsageError("summand list must contain the vacuum 0")
    ordered = [0] + [j for j in js if j != 0]
    affine = coset_mod.ExtensionSpec(("sl2", m + 1),
                                     tuple((j, 1) for j in ordered),
                                     name=f"sl2 k={m + 1} {{{summands}}}")
    ext = coset_mod.mirror_extension(m, affine)
    if as_json:
        _emit_json({
            "base": list(ext.base),
            "summands": [[serialize.label_json(lab), mult]
                         for lab, mult in ext.summands],
            "weights": [serialize.frac_str(
                minimal_mod.minimal_weight(m, lab.r, lab.s))
                for lab, _ in ext.summands],
            "unitary": ext.unitary,
        })
        return
    click.echo(f"mirror extension at minimal model m={m}:")
    for lab, mult in ext.summands:
        h = minimal_mod.minimal_weight(m, lab.r, lab.s)
        click.echo(f"  ({lab.r},{lab.s}) x{mult}  h = {serialize.frac_str(h)}")
    click.echo(f"unitary: {ext.unitary}")


_KAC_RE = re.compile(r"\((\d+)\s*,\s*(\d+)\)")


@main.command()
@click.option("--c", "c_str", required=True, help='central charge as "p/q"')
@click.option("--summands", required=True, help='Kac labels, e.g. "(1,1),(7,1)"')
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def classify(cfg: RunConfig, c_str, summands, as_json):
    """Classify a preunitary extension by central charge and summands."""
    c = Fraction(c_str)
    pairs = _KAC_RE.findall(summands)
    if not pairs:
        raise UsageError(f"could not parse summands {summands!r}")
    m = coset_mod.solve_minimal_index(c)
    if m is not None:
        labels = [minimal_mod.KacLabel(m, int(r), int(s)) for r, s in pairs]
    else:
        labels = []
    result = coset_mod.classify_preunitary(c, labels)
    if isinstance(result, coset_mod.NamedVOA):
        if as_json:
            _emit_json({"result": "classified", "tag": result.tag,
                        "param": result.param})
        else:
            click.echo(f"classified: {result.tag} (m={result.param})")
    else:
        if as_json:
            _emit_json({"result": "rejected", "reason": result.reason})
        else:
            click.echo(f"rejected: {result.reason}")
        sys.exit(1)


@main.command()
@click.option("--algebra", required=True)
@click.option("--param", type=int, required=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
@guarded
def catalog(cfg: RunConfig, algebra, param, as_json):
    """Dump the extension catalog for a theory."""
    entries = coset_mod.catalog_extensions((algebra, param))
    if as_json:
        _emit_json([{
            "name": ext.name,
            "voa": named.tag,
            "summands": [[serialize.label_json(lab), mult]
                         for lab, mult in ext.summands],
            "rows": [list(row) for row in dec.rows],
            "unitary": ext.unitary,
        } for ext, dec, named in entries])
        return
    if not entries:
        click.echo("no catalog entries")
    for ext, dec, named in entries:
        labs = ", ".join(str(serialize.label_json(lab)) for lab, _ in ext.summands)
        click.echo(f"{ext.name} [{named.tag}] summands: {labs} "
                   f"({len(dec.rows)} module rows, unitary={ext.unitary})")


if __name__ == "__main__":
    main()
