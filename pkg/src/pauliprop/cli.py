"""Command-line front end: every pipeline stage with file-based, reproducible I/O.

Exit codes: 0 ok, 2 validation error, 3 resource/term explosion, 4 numeric
non-convergence. All CSV output uses '.' decimals and 17 significant digits.
"""

from __future__ import annotations

import csv
import functools
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import analysis, calculus, oracle, optimizer
from .errors import ConvergenceError, TermExplosionError, ValidationError
from .manifest import write_manifest
from .models import AnnniSpec, Boundary, Circuit, local_entangler
from .pauli import PauliWord, PropagatedObservable
from .propagation import TruncationConfig, propagate, term_statistics, trim

EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_NUMERIC = 4


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TermExplosionError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RESOURCE)
        except ConvergenceError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
        except (ValidationError, OverflowError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def parse_observable(value: str, n_qubits: int | None = None):
    """A Pauli letter string ("ZIII", qubit 0 leftmost) or a file of lines
    "<int coeff> <letters>"."""
    path = Path(value)
    if path.is_file():
        terms = []
        for lineno, line in enumerate(path.read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(
                    f"{path}:{lineno}: expected '<coeff> <letters>', got {line!r}"
                )
            try:
                coeff = int(parts[0])
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: coefficient {parts[0]!r} is not an integer"
                ) from None
            terms.append((coeff, PauliWord.from_string(parts[1])))
    else:
        terms = [(1, PauliWord.from_string(value))]
    if n_qubits is not None:
        for _, word in terms:
            if word.n_qubits != n_qubits:
                raise ValidationError(
                    f"observable word {word.to_string()!r} has {word.n_qubits} "
                    f"qubits, circuit has {n_qubits}"
                )
    return terms


def _read_theta_csv(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(csv.reader(fh), start=1):
            if not line or (len(line) == 1 and not line[0].strip()):
                continue
            try:
                rows.append([float(v) for v in line])
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise ValidationError(f"{path}:{lineno}: non-numeric theta entry") from None
    if not rows:
        raise ValidationError(f"{path}: no theta rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValidationError(f"{path}: inconsistent row lengths {sorted(widths)}")
    return np.asarray(rows, dtype=np.float64)


def _cuts(w_cut, nu_cut, max_terms) -> TruncationConfig:
    return TruncationConfig(
        w_cut=None if w_cut is None or w_cut < 0 else w_cut,
        nu_cut=None if nu_cut is None or nu_cut < 0 else nu_cut,
        max_terms=max_terms,
    )


def _parse_cut_list(text: str) -> list[int | None]:
    out: list[int | None] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if part in ("full", "none", "inf"):
            out.append(None)
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise ValidationError(f"bad cutoff entry {part!r}") from None
    if not out:
        raise ValidationError("empty cutoff list")
    return out


def _parse_float_list(text: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ValidationError(f"bad numeric list {text!r}") from None
    if not values:
        raise ValidationError("empty numeric list")
    return values


@click.group()
@click.option("--threads", type=int, default=None, help="cap numba worker threads")
def main(threads):
    """Symbolic Pauli propagation toolkit."""
    if threads is not None:
        import numba

        numba.set_num_threads(max(1, threads))


@main.command("propagate")
@click.option("--circuit", "circuit_path", required=True, type=click.Path())
@click.option("--observable", required=True, help="letter string or observable file")
@click.option("--w-cut", type=int, default=None, help="Pauli-weight cutoff (omit for unlimited)")
@click.option("--nu-cut", type=int, default=None, help="frequency cutoff (omit for unlimited)")
@click.option("--max-terms", type=int, default=50_000_000)
@click.option("--out", "out_path", required=True, type=click.Path())
@handle_errors
def propagate_cmd(circuit_path, observable, w_cut, nu_cut, max_terms, out_path):
    """Propagate an observable through a circuit; write JSONL + manifest."""
    start = time.perf_counter()
    circuit = Circuit.read_json(circuit_path)
    obs = parse_observable(observable, circuit.n_qubits)
    po = propagate(obs, circuit, _cuts(w_cut, nu_cut, max_terms))
    po.write_jsonl(out_path)
    inputs = [circuit_path] + ([observable] if Path(observable).is_file() else [])
    write_manifest(
        "propagate",
        {"observable": observable, "w_cut": w_cut, "nu_cut": nu_cut, "max_terms": max_terms},
        inputs,
        [out_path],
        time.perf_counter() - start,
    )
    click.echo(f"terms: {len(po)}")
    click.echo(f"discarded_by_weight: {po.meta.discarded_by_weight}")
    click.echo(f"discarded_by_frequency: {po.meta.discarded_by_frequency}")


def _load_poly(poly_path):
    po = PropagatedObservable.read_jsonl(poly_path)
    return trim(po)


@main.command("evaluate")
@click.option("--poly", "poly_path", required=True, type=click.Path())
@click.option("--theta", "theta_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@handle_errors
def evaluate_cmd(poly_path, theta_path, out_path):
    """Batch-evaluate a trimmed polynomial over theta rows."""
    start = time.perf_counter()
    poly = _load_poly(poly_path)
    thetas = _read_theta_csv(theta_path)
    if thetas.shape[1] < poly.n_params:
        raise ValidationError(
            f"theta rows have {thetas.shape[1]} columns, polynomial needs {poly.n_params}"
        )
    values = calculus.evaluate_batch(poly, thetas)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "value"])
        for i, v in enumerate(values):
            writer.writerow([i, _fmt(v)])
    write_manifest(
        "evaluate", {}, [poly_path, theta_path], [out_path], time.perf_counter() - start
    )
    click.echo(f"evaluated {len(values)} rows")


@main.command("grad")
@click.option("--poly", "poly_path", required=True, type=click.Path())
@click.option("--theta", "theta_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--check", type=click.Choice(["fd"]), default=None,
              help="cross-check analytic gradients against central finite differences")
@handle_errors
def grad_cmd(poly_path, theta_path, out_path, check):
    """Batch analytic gradients over theta rows."""
    start = time.perf_counter()
    poly = _load_poly(poly_path)
    thetas = _read_theta_csv(theta_path)
    grads = [calculus.gradient(poly, t) for t in thetas]
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row"] + [f"g{j}" for j in range(thetas.shape[1])])
        for i, g in enumerate(grads):
            writer.writerow([i] + [_fmt(v) for v in g])
    max_dev = None
    if check == "fd":
        max_dev = 0.0
        for t, g in zip(thetas, grads):
            fd = calculus.finite_difference_gradient(poly, t)
            max_dev = max(max_dev, float(np.max(np.abs(fd - g))))
        click.echo(f"fd-check max deviation: {_fmt(max_dev)}")
    write_manifest(
        "grad", {"check": check, "fd_max_deviation": max_dev},
        [poly_path, theta_path], [out_path], time.perf_counter() - start,
    )
    if max_dev is not None and max_dev > 1e-4:
        raise ConvergenceError(f"fd-check deviation {max_dev} exceeds 1e-4")
    click.echo(f"wrote gradients for {len(grads)} rows")


def _adam_options(fn):
    for deco in reversed([
        click.option("--adam-lr", type=float, default=0.05),
        click.option("--adam-beta1", type=float, default=0.9),
        click.option("--adam-beta2", type=float, default=0.999),
        click.option("--adam-eps", type=float, default=1e-8),
        click.option("--max-steps", type=int, default=1000),
        click.option("--init-scale", type=float, default=0.1),
        click.option("--seed", type=int, default=0),
    ]):
        fn = deco(fn)
    return fn


@main.command("vqe")
@click.option("--n", "n", required=True, type=int)
@click.option("--depth", required=True, type=int)
@click.option("--kappa", required=True, type=float)
@click.option("--h", "h", required=True, type=float)
@click.option("--w-cut", type=int, default=None)
@click.option("--nu-cut", type=int, default=None)
@click.option("--max-terms", type=int, default=50_000_000)
@click.option("--boundary", type=click.Choice(["open", "periodic"]), default="open")
@_adam_options
@click.option("--finetune-steps", type=int, default=0,
              help="parameter-shift refinement steps on the statevector after pre-training")
@click.option("--out-prefix", required=True)
@handle_errors
def vqe_cmd(n, depth, kappa, h, w_cut, nu_cut, max_terms, boundary,
            adam_lr, adam_beta1, adam_beta2, adam_eps, max_steps, init_scale,
            seed, finetune_steps, out_prefix):
    """Propagate the spin-chain observables, train, and compare with the oracle."""
    start = time.perf_counter()
    boundary = Boundary(boundary)
    cuts = _cuts(w_cut, nu_cut, max_terms)
    circuit, polys = optimizer.propagate_annni_surrogates(n, depth, cuts, boundary)
    cfg = optimizer.AdamConfig(
        learning_rate=adam_lr, beta1=adam_beta1, beta2=adam_beta2,
        epsilon=adam_eps, max_steps=max_steps, seed=seed, init_scale=init_scale,
    )
    trace = optimizer.vqe_train(polys, kappa, h, cfg)
    spec = AnnniSpec(n, boundary)
    click.echo(f"surrogate energy: {_fmt(trace.final_energy)}")
    if finetune_steps > 0:
        ft_cfg = optimizer.AdamConfig(
            learning_rate=adam_lr, beta1=adam_beta1, beta2=adam_beta2,
            epsilon=adam_eps, max_steps=finetune_steps,
        )
        ft = optimizer.finetune(circuit, trace.final_theta, spec, kappa, h, ft_cfg)
        offset = len(trace.steps)
        trace.steps.extend(
            (offset + step, energy, gn) for step, energy, gn in ft.steps
        )
        trace.final_theta = ft.final_theta
        click.echo(f"fine-tuned energy (statevector): {_fmt(ft.final_energy)}")

    trace_path = Path(f"{out_prefix}_trace.csv")
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "energy", "grad_norm"])
        for step, energy, grad_norm in trace.steps:
            writer.writerow([step, _fmt(energy), _fmt(grad_norm)])
    theta_path = Path(f"{out_prefix}_theta.csv")
    with open(theta_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "value"])
        for j, v in enumerate(trace.final_theta):
            writer.writerow([j, _fmt(v)])

    outputs = [trace_path, theta_path]
    comparison = {}
    if n <= oracle.MAX_QUBITS:
        e_true = optimizer.true_energy(circuit, trace.final_theta, spec, kappa, h)
        comparison["e_vqe_true"] = e_true
        click.echo(f"true energy (statevector): {_fmt(e_true)}")
        if n <= oracle.MAX_QUBITS:
            e_exact = oracle.ground_energy(spec, kappa, h)
            comparison["e_exact"] = e_exact
            rel = abs(e_true - e_exact) / abs(e_exact) if e_exact else float("nan")
            comparison["rel_error"] = rel
            click.echo(f"exact ground energy: {_fmt(e_exact)}")
            click.echo(f"relative error: {_fmt(rel)}")
    else:
        click.echo("oracle comparison unavailable at this size")
    write_manifest(
        "vqe",
        {
            "n": n, "depth": depth, "kappa": kappa, "h": h,
            "w_cut": w_cut, "nu_cut": nu_cut, "boundary": boundary.value,
            "adam": {"lr": adam_lr, "beta1": adam_beta1, "beta2": adam_beta2,
                     "eps": adam_eps, "max_steps": max_steps, "init_scale": init_scale},
            "finetune_steps": finetune_steps,
            "comparison": comparison,
        },
        [], outputs, time.perf_counter() - start, seed=seed,
    )


@main.command("histogram")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@handle_errors
def histogram_cmd(in_path, out_path):
    """Weight/frequency histograms of a propagated-observable JSONL file."""
    start = time.perf_counter()
    po = PropagatedObservable.read_jsonl(in_path)
    stats = term_statistics(po)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "bin", "count", "surviving"])
        for b in sorted(stats.weight_histogram):
            writer.writerow(["weight", b, stats.weight_histogram[b],
                             stats.surviving_weight_histogram.get(b, 0)])
        for b in sorted(stats.freq_histogram):
            writer.writerow(["frequency", b, stats.freq_histogram[b],
                             stats.surviving_freq_histogram.get(b, 0)])
    write_manifest("histogram", {}, [in_path], [out_path], time.perf_counter() - start)
    click.echo(f"histogram written for {len(po)} terms")


@main.command("sweep")
@click.option("--circuit", "circuit_path", required=True, type=click.Path())
@click.option("--observable", required=True)
@click.option("--w-cuts", required=True, help="comma list, 'full' for unlimited")
@click.option("--nu-cuts", required=True, help="comma list, 'full' for unlimited")
@click.option("--samples", type=int, default=1000)
@click.option("--seed", type=int, default=0)
@click.option("--fit-bound/--no-fit-bound", default=False,
              help="fit decay constants on the untruncated propagation and add a bound column")
@click.option("--max-terms", type=int, default=50_000_000)
@click.option("--out", "out_path", required=True, type=click.Path())
@handle_errors
def sweep_cmd(circuit_path, observable, w_cuts, nu_cuts, samples, seed,
              fit_bound, max_terms, out_path):
    """Mean-absolute-error sweep over cutoff pairs against the statevector."""
    start = time.perf_counter()
    circuit = Circuit.read_json(circuit_path)
    obs = parse_observable(observable, circuit.n_qubits)
    bound_params = None
    if fit_bound:
        po = propagate(obs, circuit, TruncationConfig(max_terms=max_terms))
        fit = analysis.fit_decay_constants(po, min(samples, 200), seed)
        try:
            bound_params = fit.params
        except ValidationError:
            click.echo(
                f"fitted decay constants (alpha={fit.alpha:.4g}, beta={fit.beta:.4g}) "
                "fall outside the bound's domain; bound column left empty",
                err=True,
            )
    result = analysis.mae_sweep(
        circuit, obs, _parse_cut_list(w_cuts), _parse_cut_list(nu_cuts),
        samples, seed, bound_params=bound_params, max_terms=max_terms,
    )
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["w_cut", "nu_cut", "mae", "stderr", "bound"])
        for cell in result.cells:
            writer.writerow([
                "full" if cell.w_cut is None else cell.w_cut,
                "full" if cell.nu_cut is None else cell.nu_cut,
                _fmt(cell.mae), _fmt(cell.stderr),
                "" if cell.bound is None else _fmt(cell.bound),
            ])
    inputs = [circuit_path] + ([observable] if Path(observable).is_file() else [])
    write_manifest(
        "sweep",
        {"w_cuts": w_cuts, "nu_cuts": nu_cuts, "samples": samples, "fit_bound": fit_bound},
        inputs, [out_path], time.perf_counter() - start, seed=seed,
    )
    click.echo(f"swept {len(result.cells)} cells")


@main.command("phase-diagram")
@click.option("--n", "n", required=True, type=int)
@click.option("--depth", required=True, type=int)
@click.option("--kappas", required=True, help="comma list of kappa values")
@click.option("--hs", required=True, help="comma list of h values")
@click.option("--w-cut", type=int, default=None)
@click.option("--nu-cut", type=int, default=None)
@click.option("--max-terms", type=int, default=50_000_000)
@click.option("--boundary", type=click.Choice(["open", "periodic"]), default="open")
@_adam_options
@click.option("--finetune-steps", type=int, default=0,
              help="parameter-shift refinement steps on the statevector after pre-training")
@click.option("--out", "out_path", required=True, type=click.Path())
@handle_errors
def phase_diagram_cmd(n, depth, kappas, hs, w_cut, nu_cut, max_terms, boundary,
                      adam_lr, adam_beta1, adam_beta2, adam_eps, max_steps,
                      init_scale, seed, finetune_steps, out_path):
    """Train a fresh VQE per (kappa, h) grid point; write the sweep CSV."""
    start = time.perf_counter()
    cfg = optimizer.AdamConfig(
        learning_rate=adam_lr, beta1=adam_beta1, beta2=adam_beta2,
        epsilon=adam_eps, max_steps=max_steps, seed=seed, init_scale=init_scale,
    )
    ft_cfg = None
    if finetune_steps > 0:
        ft_cfg = optimizer.AdamConfig(
            learning_rate=adam_lr, beta1=adam_beta1, beta2=adam_beta2,
            epsilon=adam_eps, max_steps=finetune_steps,
        )
    points = optimizer.phase_diagram_sweep(
        n, depth, _parse_float_list(kappas), _parse_float_list(hs), cfg,
        _cuts(w_cut, nu_cut, max_terms), Boundary(boundary),
        finetune_cfg=ft_cfg,
    )
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kappa", "h", "e_vqe_surrogate", "e_vqe_true",
                        "e_exact", "rel_error", "seed", "w_cut", "nu_cut"])
        for p in points:
            writer.writerow([
                _fmt(p.kappa), _fmt(p.h), _fmt(p.e_vqe_surrogate),
                "" if p.e_vqe_true is None else _fmt(p.e_vqe_true),
                "" if p.e_exact is None else _fmt(p.e_exact),
                "" if p.rel_error is None else _fmt(p.rel_error),
                p.seed,
                "" if w_cut is None else w_cut,
                "" if nu_cut is None else nu_cut,
            ])
    write_manifest(
        "phase-diagram",
        {"n": n, "depth": depth, "kappas": kappas, "hs": hs,
         "w_cut": w_cut, "nu_cut": nu_cut, "boundary": boundary,
         "finetune_steps": finetune_steps},
        [], [out_path], time.perf_counter() - start, seed=seed,
    )
    click.echo(f"trained {len(points)} grid points")


@main.command("bound")
@click.option("--c0", required=True, type=float)
@click.option("--alpha", required=True, type=float)
@click.option("--beta", required=True, type=float)
@click.option("--n", "n", required=True, type=int)
@click.option("--params", "n_params", required=True, type=int)
@click.option("--w-cut", required=True, type=int)
@click.option("--nu-cut", required=True, type=int)
@click.option("--out", "out_path", default=None, type=click.Path())
@handle_errors
def bound_cmd(c0, alpha, beta, n, n_params, w_cut, nu_cut, out_path):
    """Closed-form joint-truncation error bound."""
    start = time.perf_counter()
    bp = analysis.BoundParams(c0=c0, alpha=alpha, beta=beta, n_qubits=n, n_params=n_params)
    value = analysis.truncation_bound(bp, w_cut, nu_cut)
    click.echo(_fmt(value))
    if out_path:
        with open(out_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["c0", "alpha", "beta", "n", "params", "w_cut", "nu_cut", "bound"])
            writer.writerow([_fmt(c0), _fmt(alpha), _fmt(beta), n, n_params,
                             w_cut, nu_cut, _fmt(value)])
        write_manifest("bound", {"w_cut": w_cut, "nu_cut": nu_cut},
                       [], [out_path], time.perf_counter() - start)


@main.command("variance")
@click.option("--nu-max", type=int, default=8)
@click.option("--samples", type=int, default=1_000_000)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", required=True, type=click.Path())
@handle_errors
def variance_cmd(nu_max, samples, seed, out_path):
    """Monte Carlo check of the high-frequency 2^-nu variance law."""
    start = time.perf_counter()
    rows = analysis.frequency_variance_check(nu_max, samples, seed)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu", "estimate", "expected", "stderr"])
        for nu, est, expected, stderr in rows:
            writer.writerow([nu, _fmt(est), _fmt(expected), _fmt(stderr)])
    write_manifest("variance", {"nu_max": nu_max, "samples": samples},
                   [], [out_path], time.perf_counter() - start, seed=seed)
    click.echo(f"wrote {len(rows)} rows")


@main.command("oracle")
@click.option("--n", "n", required=True, type=int)
@click.option("--kappa", required=True, type=float)
@click.option("--h", "h", required=True, type=float)
@click.option("--boundary", type=click.Choice(["open", "periodic"]), default="open")
@click.option("--method", type=click.Choice(["auto", "dense", "lanczos"]), default="auto")
@click.option("--out", "out_path", default=None, type=click.Path())
@handle_errors
def oracle_cmd(n, kappa, h, boundary, method, out_path):
    """Exact ground energy of the spin chain."""
    start = time.perf_counter()
    energy = oracle.ground_energy(AnnniSpec(n, Boundary(boundary)), kappa, h, method=method)
    click.echo(_fmt(energy))
    if out_path:
        with open(out_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "kappa", "h", "boundary", "method", "energy"])
            writer.writerow([n, _fmt(kappa), _fmt(h), boundary, method, _fmt(energy)])
        write_manifest("oracle", {"n": n, "kappa": kappa, "h": h, "method": method},
                       [], [out_path], time.perf_counter() - start)


@main.command("circuit")
@click.option("--n", "n", required=True, type=int)
@click.option("--depth", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@handle_errors
def circuit_cmd(n, depth, out_path):
    """Write the local-entangler ansatz as a circuit JSON file."""
    start = time.perf_counter()
    circuit = local_entangler(n, depth)
    circuit.write_json(out_path)
    write_manifest("circuit", {"n": n, "depth": depth}, [], [out_path],
                   time.perf_counter() - start)
    click.echo(f"{len(circuit.gates)} gates, {circuit.n_params} parameters")


if __name__ == "__main__":
    main()
