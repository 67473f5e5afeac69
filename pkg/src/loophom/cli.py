"""Command-line interface: ``loophom compute | bv | verify | presets``."""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from . import errors
from .bv import bv_report
from .forms import PRESETS, base_change, preset, validate
from .homology import LoopComplex, compute, verify_complex
from .oracles import euler_check, random_form, random_unimodular, ucoeff_check
from .report import ReportDocument, bases_section, canonical_json, inline_verification
from .rings import GF, QQ, ZZ, parse_ring
from .tensor import UAlgebra, size_cap_from_env

FORMATS = ("table", "json", "csv")


def _parse_entries(text):
    if text is None:
        return None
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise errors.ValidationError(f"--entries must be comma-separated integers, got {text!r}") from exc


def _ring_arg(text):
    try:
        return parse_ring(text)
    except errors.LoopHomError:
        raise
    except (ValueError, TypeError) as exc:
        raise errors.InvalidRing(str(exc)) from exc


def load_form(opts: dict, default_ring: str = "Z"):
    """Resolve ``(form, ring, max_degree, source)`` from the shared options."""
    config = opts.get("config")
    chosen = opts.get("preset")
    if chosen is None and opts.get("n") is not None and config is None:
        chosen = "hyperbolic"
    if (config is None) == (chosen is None):
        raise errors.ValidationError("give exactly one of --config PATH or --preset NAME")
    max_degree = opts.get("max_degree")
    ring_text = opts.get("ring")
    if config is not None:
        try:
            raw = json.loads(Path(config).read_text())
        except OSError as exc:
            raise errors.ValidationError(f"cannot read config {config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise errors.ValidationError(f"config {config} is not valid JSON: {exc.msg}") from exc
        form = validate(raw, force=opts["force"], allow_nonunimodular=opts["allow_nonunimodular"])
        ring = _ring_arg(ring_text) if ring_text is not None else form.ring
        if max_degree is None:
            max_degree = raw.get("max_degree", 60)
        source = {"config": Path(config).name}
    else:
        if opts.get("n") is None:
            raise errors.ValidationError("--preset needs --n")
        ring = _ring_arg(ring_text if ring_text is not None else default_ring)
        form = preset(
            chosen,
            opts["n"],
            ring,
            g=opts.get("genus") or 1,
            entries=_parse_entries(opts.get("entries")),
            force=opts["force"],
            allow_nonunimodular=opts["allow_nonunimodular"],
        )
        source = {"preset": chosen, "n": opts["n"]}
        if chosen == "hyperbolic":
            source["genus"] = opts.get("genus") or 1
        if chosen == "diag":
            source["entries"] = _parse_entries(opts.get("entries")) or [1]
    if max_degree is None:
        max_degree = 60
    if isinstance(max_degree, bool) or not isinstance(max_degree, int) or max_degree < 0:
        raise errors.ValidationError(f"max_degree must be a nonnegative integer, got {max_degree!r}")
    return form.with_ring(ring), ring, max_degree, source


def _size_cap(opts):
    cap = opts.get("size_cap")
    return cap if cap is not None else size_cap_from_env()


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def common_options(f):
    options = [
        click.option("--config", "--input", "config", type=click.Path(dir_okay=False), help="JSON config with n and intersection_matrix."),
        click.option("--preset", type=click.Choice(PRESETS), help="Catalog form instead of a config file."),
        click.option("--n", type=int, help="Half dimension of the manifold."),
        click.option("--genus", "-g", type=int, help="Hyperbolic blocks for --preset hyperbolic."),
        click.option("--entries", help="Diagonal entries for --preset diag, e.g. 1,1,-1."),
        click.option("--ring", help="Z, Q, or a prime field such as F2 or Fp:5."),
        click.option("--max-degree", type=int, help="Largest total degree reported (default 60)."),
        click.option("--format", "fmt", type=click.Choice(FORMATS), default="table", show_default=True),
        click.option("--force", is_flag=True, help="Admit n < 3 and n in {4, 8} with a warning."),
        click.option("--allow-nonunimodular", is_flag=True, help="Admit |det C| != 1 with a warning."),
        click.option("--emit-bases", is_flag=True, help="Include the basis labels of each slice of U."),
        click.option("--threads", type=click.IntRange(min=1), help="Worker pool size (accepted; work runs in one thread)."),
        click.option("--size-cap", type=click.IntRange(min=1), help="Largest slice dimension allowed (env LOOPHOM_SIZE_CAP)."),
        click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the report here instead of stdout."),
        click.option("--timing", is_flag=True, help="Record wall-clock timings in the metadata (breaks byte identity)."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _timed(opts, start):
    return {"seconds": f"{time.perf_counter() - start:.3f}"} if opts["timing"] else None


@click.group()
@click.version_option(package_name="artifact", prog_name="loophom")
def main():
    """Free loop space homology of (n-1)-connected 2n-manifolds."""


@main.command("compute")
@common_options
def cmd_compute(**opts):
    """Homology of LM as Q + W + Z, degree by degree."""
    start = time.perf_counter()
    form, ring, max_degree, source = load_form(opts)
    cx = LoopComplex(form, ring, _size_cap(opts))
    summary = compute(form, ring, max_degree, complex_=cx)
    report = ReportDocument(form, ring, summary, "compute", source, inline_verification(summary, cx))
    if opts["emit_bases"]:
        report.bases = bases_section(cx, summary)
    report.timing = _timed(opts, start)
    _emit(report.render(opts["fmt"]), opts["output"])


@main.command("bv")
@common_options
def cmd_bv(**opts):
    """BV composites through abelianization (n odd, rational coefficients)."""
    start = time.perf_counter()
    form, ring, max_degree, source = load_form(opts, default_ring="Q")
    if ring.tag != "Q":
        raise errors.InvalidRing(f"the BV composites are computed over Q, not {ring.label()}", ring=ring.label())
    if form.n % 2 == 0:
        raise errors.ParityUnsupported(f"the BV composites need n odd, got n={form.n}", n=form.n)
    cx = LoopComplex(form, QQ, algebra=UAlgebra(form, QQ, _size_cap(opts), adapt=False))
    table = bv_report(form, max_degree, cx)
    summary = compute(form, QQ, max_degree, complex_=cx)
    report = ReportDocument(form, QQ, summary, "bv", source, inline_verification(summary, cx), bv=table.to_json())
    if opts["emit_bases"]:
        report.bases = bases_section(cx, summary)
    report.timing = _timed(opts, start)
    _emit(report.render(opts["fmt"]), opts["output"])


def _run_checks(form, max_degree, primes, samples, size_cap) -> list:
    results = []

    def record(check, passed, **details):
        results.append({"check": check, "passed": bool(passed), **details})
        if not passed:
            raise errors.VerificationFailed(f"check {check} failed", check=check, results=results)

    zcx = LoopComplex(form, ZZ, size_cap)
    summary_z = compute(form, ZZ, max_degree, complex_=zcx)
    top_w = max((p.word_length for p in summary_z.pieces if p.summand == "W"), default=0)
    rec = verify_complex(form, max(top_w - 1, 0), ZZ, zcx)
    record("d_after_dprime_zero", rec.ok, word_lengths=rec.checked)
    ell_max = max(p.word_length for p in summary_z.pieces if p.summand == "Q")
    for field in (QQ, GF(2)):
        res = euler_check(form, field, ell_max)
        record(f"euler_{field.label()}", res.passed, word_lengths=[2, ell_max] if ell_max >= 2 else [])
    for p in primes:
        summary_f = compute(form, GF(p), max_degree, size_cap)
        res = ucoeff_check(summary_z, summary_f, p)
        record(f"ucoeff_F{p}", res.passed, **({"mismatch": res.mismatch} if res.mismatch else {}))
    base = summary_z.signature()
    for s in range(samples):
        P = random_unimodular(form.m, s)
        other = compute(base_change(form, P), ZZ, max_degree, size_cap).signature()
        record("base_change_invariance", other == base, sample=s)
    return results


@main.command("verify")
@common_options
@click.option("--primes", default="2,3,5", show_default=True, help="Primes for the universal-coefficient check.")
@click.option("--samples", type=click.IntRange(min=0), default=3, show_default=True, help="Random basis changes to compare.")
@click.option("--seeds", type=click.IntRange(min=0), help="Sweep this many random forms of rank --m instead of one form.")
@click.option("--m", "rank_m", type=click.IntRange(min=1), help="Rank for --seeds.")
def cmd_verify(**opts):
    """Consistency checks: d.d' = 0, Euler counts, universal coefficients, basis invariance."""
    primes = _parse_entries(opts["primes"]) or []
    size_cap = _size_cap(opts)
    runs = []
    if opts["seeds"] is not None:
        if opts["n"] is None or opts["rank_m"] is None:
            raise errors.ValidationError("--seeds needs --n and --m")
        max_degree = opts["max_degree"] if opts["max_degree"] is not None else 30
        for s in range(opts["seeds"]):
            form = random_form(opts["n"], opts["rank_m"], s, force=opts["force"])
            runs.append({"seed": s, "form": form.to_json(), "checks": _run_checks(form, max_degree, primes, opts["samples"], size_cap)})
    else:
        form, _, max_degree, source = load_form(opts)
        runs.append({"source": source, "form": form.to_json(), "checks": _run_checks(form, max_degree, primes, opts["samples"], size_cap)})
    doc = {"command": "verify", "max_degree": max_degree, "runs": runs, "passed": True}
    if opts["fmt"] == "json":
        text = canonical_json(doc)
    else:
        lines = []
        for run in runs:
            head = f"seed {run['seed']}" if "seed" in run else json.dumps(run["source"], sort_keys=True)
            lines.append(f"{head}: C = {json.dumps(run['form']['intersection_matrix'])}")
            lines += [f"  {c['check']}: {'pass' if c['passed'] else 'FAIL'}" for c in run["checks"]]
        lines.append("all checks passed")
        text = "\n".join(lines) + "\n"
    _emit(text, opts["output"])


PRESET_INFO = {
    "hyperbolic": "g blocks [[0,1],[+-1,0]], sign matching the parity of n (any n)",
    "e8": "the E8 lattice, positive definite of rank 8 (n even)",
    "diag": "diagonal form with --entries, each +-1 (n even)",
}


@main.command("presets")
@click.option("--format", "fmt", type=click.Choice(("table", "json")), default="table", show_default=True)
def cmd_presets(fmt):
    """List the catalog of forms."""
    if fmt == "json":
        click.echo(canonical_json({name: PRESET_INFO[name] for name in PRESETS}), nl=False)
    else:
        for name in PRESETS:
            click.echo(f"{name:<11} {PRESET_INFO[name]}")


def run(argv=None) -> int:
    """Entry point with structured errors; returns the exit status."""
    try:
        main.main(args=argv, prog_name="loophom", standalone_mode=False)
        return 0
    except errors.LoopHomError as exc:
        payload = exc.to_json()
        payload["exit_status"] = exc.exit_status
        click.echo(json.dumps(payload, sort_keys=True, default=str), err=True)
        return exc.exit_status
    except click.exceptions.Abort:
        click.echo(json.dumps({"error": "Aborted", "exit_status": 1, "message": "aborted"}), err=True)
        return 1
    except click.ClickException as exc:
        click.echo(json.dumps({"error": "UsageError", "exit_status": 2, "message": exc.format_message()}, sort_keys=True), err=True)
        return 2
    except RecursionError as exc:
        click.echo(json.dumps({"error": "SizeCapExceeded", "exit_status": 3, "message": str(exc)}), err=True)
        return 3
    except MemoryError:
        click.echo(json.dumps({"error": "SizeCapExceeded", "exit_status": 3, "message": "out of memory"}), err=True)
        return 3


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
