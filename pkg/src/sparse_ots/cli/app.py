"""sparse-ots CLI application."""
import logging
import math
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from sparse_ots.attacks.trial import class1_run, class2_run, two_stage_cpa_trial
from sparse_ots.codec.cipher import (
    decrypt,
    encrypt,
    format_psnr,
    max_encryptions,
    sigma_for_pnr,
)
from sparse_ots.codec.io import (
    read_ciphertext,
    read_pgm,
    stack_columns,
    unstack_columns,
    write_ciphertext,
    write_pgm,
)
from sparse_ots.codec.omp import RecoverySettings
from sparse_ots.config import (
    get_settings,
    load_bound_grids,
    load_experiment_config,
    read_config_file,
)
from sparse_ots.core.errors import BoundInvalidError, SotsError
from sparse_ots.core.models import (
    Arrangement,
    AttackMode,
    BasisKind,
    CpaParams,
    ExperimentConfig,
    ExperimentKind,
    IndistParams,
    SecurityReport,
    SystemParams,
)
from sparse_ots.experiments.image import IMAGE_HEADER, run_image_pipeline
from sparse_ots.experiments.indist import INDIST_HEADER, run_indistinguishability
from sparse_ots.experiments.phase import PHASE_HEADER, frontier, run_phase_transition
from sparse_ots.experiments.tables import emit_bound_tables
from sparse_ots.export.csv_writer import Marker, render_csv, write_csv
from sparse_ots.export.html_report import SecurityReportGenerator
from sparse_ots.keystream.keyfile import generate_key, read_key_file, write_key_file
from sparse_ots.security.report import security_report, sweep_bounds
from sparse_ots.sensing.operator import build_sensing_key, dump_key
from sparse_ots.transforms.bases import Basis
from sparse_ots.transforms.statistics import estimate_c_max

app = typer.Typer(
    name="sots",
    help="sparse-ots - sparse one-time sensing encryption and its security calculus",
    add_completion=False,
)
bounds_app = typer.Typer(help="Evaluate the closed-form security bounds")
app.add_typer(bounds_app, name="bounds")

console = Console()
err_console = Console(stderr=True)


@dataclass
class CliState:
    """Global options shared by every command."""

    config: Path | None = None
    seed: int = 0
    out: Path | None = None


# ============================================================================
# Helpers
# ============================================================================


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Turn library failures into a red message and the matching exit code."""
    try:
        yield
    except SotsError as e:
        err_console.print(f"[red]{type(e).__name__}: {e}[/red]")
        raise typer.Exit(e.exit_code) from e
    except ValidationError as e:
        err_console.print(f"[red]Invalid parameters:[/red] {e}")
        raise typer.Exit(2) from e
    except FileNotFoundError as e:
        err_console.print(f"[red]{e}[/red]")
        raise typer.Exit(2) from e


def _state(ctx: typer.Context) -> CliState:
    if isinstance(ctx.obj, CliState):
        return ctx.obj
    return CliState(seed=get_settings().default_seed)


def _configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level: int | str = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = get_settings().log_level.upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _output_path(option: Path | None, state: CliState, what: str) -> Path:
    path = option or state.out
    if path is None:
        err_console.print(f"[red]No output path for {what}; pass --out[/red]")
        raise typer.Exit(2)
    return path


def _emit(text: str, target: Path | None) -> None:
    if target is None:
        typer.echo(text, nl=False)
    else:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")


def _read_plaintext(path: Path) -> tuple[np.ndarray, int | None]:
    """Plaintext vector and image side (None for plain number files)."""
    if path.suffix.lower() == ".pgm":
        pixels = read_pgm(path)
        return stack_columns(pixels), pixels.shape[0]
    if not path.exists():
        raise FileNotFoundError(f"Plaintext not found: {path}")
    return np.loadtxt(path, ndmin=1, dtype=np.float64).ravel(), None


def _seed(state: CliState, seed: int | None) -> int:
    return state.seed if seed is None else seed


def _experiment_config(
    state: CliState, kind: ExperimentKind, **overrides: Any
) -> ExperimentConfig:
    settings = get_settings()
    overrides["seed"] = _seed(state, overrides.get("seed"))
    if overrides.get("workers") is None:
        overrides["workers"] = settings.workers
    return load_experiment_config(state.config, kind, **overrides)


@app.callback()
def main(
    ctx: typer.Context,
    config: Path | None = typer.Option(
        None, "--config", "-c", help="key=value experiment config file"
    ),
    seed: int | None = typer.Option(None, "--seed", help="Base seed for experiment PRNGs"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output file or directory"),
    verbose: int = typer.Option(0, "--verbose", "-v", count=True, help="-v info, -vv debug"),
) -> None:
    """Encrypt with sparse one-time sensing, evaluate its bounds and run the attacks."""
    _configure_logging(verbose)
    ctx.obj = CliState(
        config=config,
        seed=get_settings().default_seed if seed is None else seed,
        out=out,
    )


# ============================================================================
# Key and Cipher Commands
# ============================================================================


@app.command()
def keygen(
    ctx: typer.Context,
    degree: int | None = typer.Option(None, "--degree", "-k", help="LFSR degree (key bits)"),
    taps: str | None = typer.Option(None, "--taps", help="Comma-separated feedback taps"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Key file to write"),
) -> None:
    """Sample a fresh key from OS randomness.

    Example:
        sots keygen --degree 256 --out alice.key
    """
    state = _state(ctx)
    path = _output_path(out, state, "the key file")
    with _exit_codes():
        tap_tuple = tuple(int(t) for t in taps.split(",") if t.strip()) if taps else None
        key_file = generate_key(degree or get_settings().default_degree, tap_tuple)
        write_key_file(path, key_file)
    console.print(
        f"[green]Key written to {path}[/green] "
        f"(degree {key_file.spec.degree}, taps {','.join(map(str, key_file.spec.taps))})"
    )


@app.command("encrypt")
def encrypt_command(
    ctx: typer.Context,
    key: Path = typer.Option(..., "--key", help="Key file; its stream position is advanced"),
    plaintext: Path = typer.Option(..., "--input", "-i", help="PGM image or text of numbers"),
    q: int = typer.Option(..., "--q", help="Nonzeros per sensing row"),
    m: int | None = typer.Option(None, "--m", help="Measurements M (default rho * N)"),
    rho: float = typer.Option(0.5, "--rho", help="M/N when --m is not given"),
    sigma: float = typer.Option(0.0, "--sigma", help="Noise standard deviation"),
    pnr: float | None = typer.Option(None, "--pnr", help="Set sigma from a target PNR"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Ciphertext file"),
    dump: Path | None = typer.Option(None, "--dump-key", help="Write the sensing key (debug)"),
) -> None:
    """Encrypt one plaintext with the next unused stretch of keystream.

    Example:
        sots encrypt --key alice.key --input photo.pgm --q 512 --out photo.sots
    """
    state = _state(ctx)
    path = _output_path(out, state, "the ciphertext")
    with _exit_codes():
        key_file = read_key_file(key)
        x, _ = _read_plaintext(plaintext)
        n = x.size
        if pnr is not None:
            sigma = sigma_for_pnr(x, m or round(rho * n), pnr)
        params = SystemParams.checked(
            n=n, m=m or round(rho * n), q=q, k=min(key_file.spec.degree, n), sigma=sigma
        )
        start = key_file.position
        source = key_file.open_source()
        if not get_settings().warn_period_reuse:
            source.period_warned = True
        ciphertext, sensing_key = encrypt(source, params, x, noise_seed=state.seed)
        write_ciphertext(path, ciphertext)
        key_file.position = source.raw_count
        key_file.emitted = source.keystream_count
        write_key_file(key, key_file)
        if dump is not None:
            dump.write_text(dump_key(sensing_key, params), encoding="utf-8")

    table = Table(title="Encryption")
    table.add_column("Field", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("N / M / q", f"{params.n} / {params.m} / {params.q}")
    table.add_row("stream position", str(start))
    table.add_row("keystream c_s + c_p", f"{sensing_key.c_s} + {sensing_key.c_p}")
    table.add_row("encryptions left (period)", str(max_encryptions(params, key_file.spec.degree)))
    table.add_row("ciphertext", str(path))
    console.print(table)
    console.print(f"[dim]Decrypt with --position {start}[/dim]")


@app.command("decrypt")
def decrypt_command(
    ctx: typer.Context,
    key: Path = typer.Option(..., "--key", help="Key file"),
    ciphertext_path: Path = typer.Option(..., "--input", "-i", help="Ciphertext file"),
    position: int = typer.Option(0, "--position", help="Raw stream position used to encrypt"),
    sparsity: int | None = typer.Option(None, "--sparsity", "-K", help="Pursuit budget K"),
    basis: BasisKind = typer.Option(BasisKind.DCT, "--basis", help="Sparsifying basis"),
    arrangement: Arrangement = typer.Option(
        Arrangement.ONE_D, "--arrangement", help="1d, or 2d for a separable basis on square images"
    ),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output .pgm or text file"),
) -> None:
    """Regenerate the sensing key at a stream position and recover the plaintext.

    Example:
        sots decrypt --key alice.key --input photo.sots --arrangement 2d --out photo.pgm
    """
    state = _state(ctx)
    path = _output_path(out, state, "the plaintext")
    with _exit_codes():
        key_file = read_key_file(key)
        key_file.position = position
        ciphertext = read_ciphertext(ciphertext_path)
        params = SystemParams.checked(
            n=ciphertext.n,
            m=ciphertext.m,
            q=ciphertext.q,
            k=min(key_file.spec.degree, ciphertext.n),
            sigma=ciphertext.sigma,
        )
        sensing_key = build_sensing_key(key_file.open_source(), params)
        settings = RecoverySettings(
            sparsity=sparsity or max(1, params.m // 4),
            basis=Basis(basis, params.n, arrangement),
            tolerance=get_settings().omp_tolerance,
        )
        x = decrypt(sensing_key, params, ciphertext, settings)
        if path.suffix.lower() == ".pgm":
            side = math.isqrt(params.n)
            if side * side != params.n:
                err_console.print(f"[red]N={params.n} is not a square image[/red]")
                raise typer.Exit(2)
            write_pgm(path, unstack_columns(x, side, side))
        else:
            np.savetxt(path, x)
    console.print(f"[green]Plaintext written to {path}[/green]")


@app.command()
def cmax(
    ctx: typer.Context,
    basis: BasisKind = typer.Option(BasisKind.DCT, "--basis", help="Sparsifying basis"),
    n: int = typer.Option(1024, "--n", help="Dimension N"),
    sparsity: int = typer.Option(1, "--k", help="Sparsity K"),
    trials: int = typer.Option(100_000, "--trials", help="Random plaintexts"),
    seed: int | None = typer.Option(None, "--seed", help="PRNG seed"),
) -> None:
    """Estimate c_max for K-sparse plaintexts as CSV basis,N,K,c_max."""
    state = _state(ctx)
    with _exit_codes():
        value = estimate_c_max(
            Basis(basis, n), sparsity, trials, _seed(state, seed)
        )
    rows = [{"basis": basis, "N": n, "K": sparsity, "c_max": value}]
    _emit(render_csv(("basis", "N", "K", "c_max"), rows), state.out)


# ============================================================================
# Bounds Commands
# ============================================================================


@dataclass
class BoundPoint:
    """Parameter point handed from the bounds group to its sweep."""

    state: CliState
    cpa: CpaParams
    indist: IndistParams | None
    bits: float | None
    html: Path | None


_SWEEP_ALIASES = {"L": "budget", "M": "m", "cmax": "c_max"}


def _report_csv(reports: list[SecurityReport]) -> str:
    rows = [r.flat() for r in reports]
    header = list(rows[0]) if rows else ["notes"]
    return render_csv(header, rows)


@bounds_app.callback(invoke_without_command=True)
def bounds(
    ctx: typer.Context,
    k: int = typer.Option(256, "--k", help="Key bits"),
    budget: float = typer.Option(128.0, "--L", help="Adversary log2 computing power"),
    rho: float = typer.Option(0.5, "--rho", help="M/N"),
    eps2: float = typer.Option(1e-5, "--eps2"),
    eps3: float = typer.Option(1e-5, "--eps3"),
    delta: float = typer.Option(0.5, "--delta"),
    q: int = typer.Option(256, "--q", help="Nonzeros per row"),
    gamma: float | None = typer.Option(None, "--gamma", help="Energy ratio; adds the p_d bound"),
    pnr: float = typer.Option(math.inf, "--pnr"),
    c_max: float = typer.Option(4.0, "--cmax"),
    m: int = typer.Option(256, "--M", help="Measurements for the p_d bound"),
    bits: float | None = typer.Option(None, "--bits", help="Keystream per encryption"),
    html: Path | None = typer.Option(None, "--html", help="Also write an HTML report"),
) -> None:
    """Print the security report for one parameter point as CSV.

    Exits with code 3 when any bound is invalid at the point; the CSV is still written.

    Example:
        sots bounds --k 256 --L 128 --q 256 --gamma 0.5
    """
    state = _state(ctx)
    with _exit_codes():
        cpa = CpaParams(k=k, q=q, rho=rho, budget=budget, eps2=eps2, delta=delta, eps3=eps3)
        indist = (
            IndistParams(m=m, q=q, gamma=gamma, pnr=pnr, c_max=c_max)
            if gamma is not None
            else None
        )
    ctx.obj = BoundPoint(state=state, cpa=cpa, indist=indist, bits=bits, html=html)
    if ctx.invoked_subcommand is not None:
        return
    report = security_report(cpa, indist, bits)
    _emit(_report_csv([report]), state.out)
    if html is not None:
        SecurityReportGenerator().generate([report], html)
    for note in report.notes:
        err_console.print(f"[yellow]{note}[/yellow]")
    if report.notes:
        raise typer.Exit(BoundInvalidError.exit_code)


@bounds_app.command("sweep")
def bounds_sweep(
    ctx: typer.Context,
    var: str = typer.Option(..., "--var", help="q, k, L, eps2, eps3, delta, rho, gamma or M"),
    start: float = typer.Option(..., "--from"),
    stop: float = typer.Option(..., "--to"),
    step: float = typer.Option(1.0, "--step"),
) -> None:
    """One CSV row per value of --var from --from to --to inclusive."""
    point: BoundPoint = ctx.obj
    if step <= 0:
        err_console.print("[red]--step must be positive[/red]")
        raise typer.Exit(2)
    count = math.floor((stop - start) / step + 1e-9) + 1
    values = [start + i * step for i in range(max(count, 0))]
    with _exit_codes():
        reports = sweep_bounds(
            _SWEEP_ALIASES.get(var, var), values, point.cpa, point.indist, point.bits
        )
    _emit(_report_csv(reports), point.state.out)
    if point.html is not None:
        SecurityReportGenerator().generate(reports, point.html)


# ============================================================================
# Attack Command
# ============================================================================


def _attack_params(
    params_file: Path | None, overrides: dict[str, Any]
) -> tuple[SystemParams, float]:
    values: dict[str, Any] = read_config_file(params_file) if params_file else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    budget = float(values.pop("budget", values.pop("l", 128.0)))
    return SystemParams.checked(**values), budget


@app.command()
def attack(
    ctx: typer.Context,
    mode: AttackMode = typer.Option(..., "--mode", help="class1, class2 or trial"),
    params_file: Path | None = typer.Option(None, "--params-file", help="key=value params"),
    n: int | None = typer.Option(None, "--n"),
    m: int | None = typer.Option(None, "--m"),
    q: int | None = typer.Option(None, "--q"),
    k: int | None = typer.Option(None, "--k", help="Key bits of the attacked generator"),
    budget: float | None = typer.Option(None, "--L", help="Adversary log2 computing power"),
    trials: int = typer.Option(1, "--trials", help="Independent runs"),
    seed: int | None = typer.Option(None, "--seed", help="Seed of the first run"),
    out: Path | None = typer.Option(None, "--out", "-o", help="JSON lines file"),
) -> None:
    """Run a chosen-plaintext attack at desk scale; one JSON line per run.

    Example:
        sots attack --mode trial --n 16 --m 4 --q 8 --k 8 --L 30 --trials 100 --seed 7
    """
    state = _state(ctx)
    lines = []
    with _exit_codes():
        params, limit = _attack_params(
            params_file, {"n": n, "m": m, "q": q, "k": k, "budget": budget}
        )
        for i in range(trials):
            run_seed = _seed(state, seed) + i
            match mode:
                case AttackMode.CLASS1:
                    record = class1_run(params, limit, run_seed)
                case AttackMode.CLASS2:
                    record = class2_run(params, run_seed)
                case AttackMode.TRIAL:
                    record = two_stage_cpa_trial(params, limit, run_seed)
            lines.append(record.model_dump_json(by_alias=True))
    _emit("".join(line + "\n" for line in lines), out or state.out)


# ============================================================================
# Experiment Commands
# ============================================================================


@app.command()
def phase(
    ctx: typer.Context,
    n: int | None = typer.Option(None, "--n"),
    q: int | None = typer.Option(None, "--q", help="Use q = N for the dense baseline"),
    basis: BasisKind | None = typer.Option(None, "--basis"),
    trials: int | None = typer.Option(None, "--trials"),
    rho_values: str | None = typer.Option(None, "--rho-values", help="Comma-separated M/N"),
    kappa_step: float | None = typer.Option(None, "--kappa-step"),
    kappa_max: float | None = typer.Option(None, "--kappa-max"),
    workers: int | None = typer.Option(None, "--workers"),
    seed: int | None = typer.Option(None, "--seed", help="Overrides the global --seed"),
) -> None:
    """Noiseless phase transition: CSV rho,kappa,success_rate."""
    state = _state(ctx)
    with _exit_codes():
        config = _experiment_config(
            state, ExperimentKind.PHASE, n=n, q=q, basis=basis, trials=trials,
            rho_values=rho_values, kappa_step=kappa_step, kappa_max=kappa_max, workers=workers,
            seed=seed,
        )
        rows = run_phase_transition(config)
    write_csv(
        state.out or config.output,
        PHASE_HEADER,
        [r if isinstance(r, Marker) else r.as_row() for r in rows],
    )
    edge = frontier(rows, config.threshold)
    table = Table(title=f"{config.threshold:.0%} success frontier")
    table.add_column("rho", justify="right")
    table.add_column("kappa", justify="right")
    for rho_value, kappa in edge.items():
        table.add_row(f"{rho_value:.4f}", f"{kappa:.2f}")
    err_console.print(table)


@app.command()
def image(
    ctx: typer.Context,
    path: Path | None = typer.Argument(None, help="PGM image (default: synthetic)"),
    q: int | None = typer.Option(None, "--q"),
    basis: BasisKind | None = typer.Option(None, "--basis"),
    sparsity: int | None = typer.Option(None, "--sparsity", "-K"),
    side: int | None = typer.Option(None, "--side", help="Synthetic image side"),
    seed: int | None = typer.Option(None, "--seed", help="Overrides the global --seed"),
) -> None:
    """Encrypt and decrypt an image; CSV image,N,q,rho,basis,psnr_db.

    Artifacts go to the --out directory (default: current directory).
    """
    state = _state(ctx)
    with _exit_codes():
        config = _experiment_config(
            state, ExperimentKind.IMAGE, q=q, basis=basis, sparsity=sparsity, image_side=side,
            seed=seed,
        )
        result = run_image_pipeline(
            config,
            path,
            state.out or config.output or Path.cwd(),
            tolerance=get_settings().omp_tolerance,
        )
    typer.echo(render_csv(IMAGE_HEADER, [result.as_row()]), nl=False)
    err_console.print(f"PSNR {format_psnr(result.psnr_db)} dB -> {result.decrypted_path}")


@app.command()
def indist(
    ctx: typer.Context,
    q: int | None = typer.Option(None, "--q"),
    m: int | None = typer.Option(None, "--m"),
    n: int | None = typer.Option(None, "--n"),
    gammas: str | None = typer.Option(None, "--gammas", help="Comma-separated energy ratios"),
    trials: int | None = typer.Option(None, "--trials"),
    sigma: float | None = typer.Option(None, "--sigma"),
    workers: int | None = typer.Option(None, "--workers"),
    seed: int | None = typer.Option(None, "--seed", help="Overrides the global --seed"),
) -> None:
    """Distinguishing game: CSV gamma,q,empirical_pd,bound_pd."""
    state = _state(ctx)
    with _exit_codes():
        config = _experiment_config(
            state, ExperimentKind.INDIST, q=q, m=m, n=n, gammas=gammas, trials=trials,
            sigma=sigma, workers=workers, seed=seed,
        )
        results = run_indistinguishability(config)
    write_csv(state.out or config.output, INDIST_HEADER, [r.as_row() for r in results])
    for result in results:
        if not result.dominated:
            err_console.print(f"[red]gamma={result.gamma}: empirical p_d above bound[/red]")


@app.command()
def tables(
    ctx: typer.Context,
    q_values: str | None = typer.Option(None, "--q-values", help="Comma-separated q grid"),
    k: int | None = typer.Option(None, "--k"),
    budget: float | None = typer.Option(None, "--L"),
) -> None:
    """Write the bound tables as CSV files into the --out directory."""
    state = _state(ctx)
    with _exit_codes():
        grids, output = load_bound_grids(state.config, q_values=q_values, k=k, budget=budget)
        written = emit_bound_tables(state.out or output or Path.cwd(), grids)
    for name, path in written.items():
        console.print(f"[green]{name}[/green] -> {path}")


def cli_entrypoint() -> None:
    """Console-script entry point."""
    app()


if __name__ == "__main__":
    cli_entrypoint()
