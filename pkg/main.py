#!/usr/bin/env python3
"""
flagmagic - flag-qubit magic state preparation toolkit
Main CLI Entry Point
"""
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

import click
from dotenv import load_dotenv
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.analysis.fits import fit_estimate_records, load_fits, save_fits
from src.analysis.overhead import (MekAcceptance, OverheadInputs, compare_schemes, detect_overhead, mek_overhead,
                                   scheme_models)
from src.circuits.circuit import Circuit, location_census
from src.circuits.ec import ec1, ec2, z_round
from src.circuits.gadgets import CORRECT_ORDER, color17_hmeas_2flag, h_prep_nonft, hmeas_correct, hmeas_detect
from src.circuits.protocols import PROTOCOLS, CorrectScheme, DetectScheme
from src.codes.stabilizer import color_17, steane
from src.engine.lifting import h_fits_by_level, noise_for_level, protocol_for_level
from src.engine.records import read_records, write_overhead, write_records
from src.engine.trials import run_trials
from src.errors import (EnumerationBudgetError, FitError, FlagMagicError, ProbabilityOverflowError,
                        UnreachableTargetError)
from src.ftcheck.flags import check_flag_property, check_hooks, without_flag_couplings
from src.ftcheck.ordering import distinguishability_search
from src.ftcheck.prep import check_state_prep_ft, verify_case_table
from src.ftcheck.report import DECODING, FtReport, Violation
from src.utils.config import load_config
from src.utils.logger import setup_logger
from src.utils.validators import (validate_output_format, validate_probability, validate_protocol_name,
                                  validate_seed, validate_source_url, validate_trials)

# Load environment variables
load_dotenv()

console = Console()
logger = setup_logger('flagmagic')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATIONS = 2
EXIT_RANGE = 3

CHECK_TARGETS = ['detect', 'correct', 'ec', 'z-round', 'case-table', 'color17', 'ch-ordering-search',
                 'broken-detect-selftest']


def display_banner():
    console.print(Panel("flagmagic: flag-qubit |H> preparation, verification and overhead",
                        style="bold blue"))


def _exit_for(exc: Exception) -> int:
    """Print and log an exception, returning its exit code"""
    if isinstance(exc, (ProbabilityOverflowError, UnreachableTargetError, FitError)):
        console.print(f"[red]Numeric range error: {exc}[/red]")
        logger.error(str(exc))
        return EXIT_RANGE
    if isinstance(exc, (ValueError, KeyError, FlagMagicError)):
        console.print(f"[red]Error: {exc}[/red]")
        logger.error(str(exc))
        return EXIT_USAGE
    console.print(f"\n[bold red]Error: {exc}[/bold red]")
    logger.exception("Command failed")
    return EXIT_USAGE


def _run_guarded(body) -> None:
    display_banner()
    try:
        code = body()
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        sys.exit(EXIT_USAGE)
    except Exception as e:
        sys.exit(_exit_for(e))
    sys.exit(code or EXIT_OK)


@click.group()
def cli():
    """flagmagic - simulate, verify and cost flag-qubit magic state preparation"""
    pass


# simulate

@cli.command()
@click.option('--protocol', '-P', help=f"One of: {', '.join(sorted(PROTOCOLS))}")
@click.option('--p', 'p_values', multiple=True, type=float, help='Physical error rate (repeatable)')
@click.option('--trials', '-n', type=int, help='Trials per error rate')
@click.option('--seed', type=int, help='Base seed (required)')
@click.option('--level', type=click.IntRange(1, 3), help='Concatenation level')
@click.option('--starred', is_flag=True, default=None, help='Detect-mode EC inside the |H> preparation')
@click.option('--idle-divisor', type=float, help='Idle locations fail with p / divisor')
@click.option('--threads', type=int, help='Worker threads')
@click.option('--rec-fits', type=click.Path(exists=True), help='Rec models for level lifting')
@click.option('--starred-rec-fits', type=click.Path(exists=True), help='Detect-mode Rec models (--starred)')
@click.option('--format', 'fmt', help='csv or json')
@click.option('--output-dir', '-o', help='Output directory')
@click.option('--config', 'config_file', type=click.Path(exists=True), help='YAML configuration file')
def simulate(protocol, p_values, trials, seed, level, starred, idle_divisor, threads, rec_fits,
             starred_rec_fits, fmt, output_dir, config_file):
    """Monte-Carlo estimates of acceptance and logical error rates"""

    def body():
        config = load_config(config_file, {
            'protocol': protocol, 'p_values': list(p_values) or None, 'trials': trials, 'seed': seed,
            'level': level, 'starred': starred, 'idle_divisor': idle_divisor, 'threads': threads,
            'fmt': fmt, 'output_dir': output_dir,
        })
        if not validate_protocol_name(config.protocol):
            console.print(f"[red]Error: unknown protocol '{config.protocol}'[/red]")
            return EXIT_USAGE
        if not validate_seed(config.seed):
            console.print("[red]Error: --seed is required for simulations[/red]")
            return EXIT_USAGE
        if not validate_trials(config.trials) or not validate_output_format(config.fmt):
            console.print("[red]Error: invalid trial count or output format[/red]")
            return EXIT_USAGE
        bad = [p for p in config.p_values if not validate_probability(p)]
        if bad:
            console.print(f"[red]Error: invalid error rate(s) {bad}[/red]")
            return EXIT_USAGE

        rec = load_fits(rec_fits) if rec_fits else None
        starred_rec = load_fits(starred_rec_fits) if starred_rec_fits else None
        h_fits = h_fits_by_level(load_fits(), starred=config.starred)
        model = protocol_for_level(config.protocol, config.level)

        records = []
        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                      console=console) as progress:
            for p in config.p_values:
                task = progress.add_task(f"{model.name} level {config.level} at p={p:.2e}", total=None)
                noise = noise_for_level(config.level, p, rec, h_fits, starred_rec, config.idle_divisor)
                result = run_trials(model, noise, config.trials, config.seed, config.threads)
                result.p = p
                records.append(result.to_record())
                progress.update(task, completed=True)

        _display_records(records)
        path = Path(config.output_dir) / f"simulate_{config.protocol}_l{config.level}.{config.fmt}"
        write_records(records, path, config.fmt)
        console.print(f"[green]Records saved to {path}[/green]")
        return EXIT_OK

    _run_guarded(body)


def _display_records(records: List[Dict]):
    table = Table(title="Estimates", show_header=True)
    for column in ('p', 'trials', 'accept', 'px', 'py', 'pz'):
        table.add_column(column, style="cyan" if column == 'p' else "green")
    for r in records:
        table.add_row(f"{r['p']:.3e}", str(r['trials']), f"{r['accept']:.5f}",
                      f"{r['px']:.3e}", f"{r['py']:.3e}", f"{r['pz']:.3e}")
    console.print(table)


# check

def _ordering_report() -> FtReport:
    report = FtReport('ch-ordering-search')
    unrestricted = distinguishability_search(hmeas_correct)
    excluding = distinguishability_search(hmeas_correct, exclude=3)
    report.checked_fault_sets = 2
    report.notes.append(f"{len(unrestricted)} orderings pass; {len(excluding)} pass excluding the fourth C_H")
    if unrestricted:
        report.violations.append(Violation((), str(unrestricted[0]), '', DECODING,
                                           "ordering passes without any exclusion"))
    if CORRECT_ORDER not in excluding:
        report.violations.append(Violation((), str(CORRECT_ORDER), '', DECODING,
                                           "does not pass with the fourth C_H excluded"))
    return report


def _run_check(target: str, max_weight: int, budget: Optional[int], subsample: Optional[int],
               seed: int) -> FtReport:
    code = steane()
    if target == 'detect':
        return check_state_prep_ft(DetectScheme(), t=1, budget=budget, subsample=subsample, seed=seed).merge(
            check_flag_property(hmeas_detect(), code))
    if target == 'correct':
        return check_state_prep_ft(CorrectScheme(), t=1, budget=budget, subsample=subsample, seed=seed)
    if target == 'ec':
        report = check_hooks(ec1(), code)
        for rnd in (ec1(), ec2()):
            report = report.merge(check_flag_property(rnd, code))
        return report
    if target == 'z-round':
        return check_flag_property(z_round(True), code)
    if target == 'case-table':
        return verify_case_table(budget=budget)
    if target == 'color17':
        return check_flag_property(color17_hmeas_2flag(), color_17(), v_max=max(max_weight, 2),
                                   budget=budget, subsample=subsample, seed=seed)
    if target == 'broken-detect-selftest':
        return check_flag_property(without_flag_couplings(hmeas_detect()), code)
    raise ValueError(f"unknown check target '{target}'")


@cli.command()
@click.option('--target', '-t', required=True, type=click.Choice(CHECK_TARGETS), help='What to verify')
@click.option('--max-weight', type=click.IntRange(1, 2), help='Largest fault set size')
@click.option('--budget', type=int, help='Most fault sets before giving up')
@click.option('--subsample', type=int, help='Sample this many fault sets when over budget')
@click.option('--seed', type=int, default=0, help='Seed for subsampling')
@click.option('--output-dir', '-o', help='Output directory')
@click.option('--config', 'config_file', type=click.Path(exists=True), help='YAML configuration file')
def check(target, max_weight, budget, subsample, seed, output_dir, config_file):
    """Exhaustive fault-tolerance checks; exit code 2 when violations are found"""

    def body():
        config = load_config(config_file, {'max_weight': max_weight, 'budget': budget,
                                           'subsample': subsample, 'output_dir': output_dir})
        console.print(f"\n[bold cyan]Checking {target}[/bold cyan]")
        try:
            if target == 'ch-ordering-search':
                report = _ordering_report()
            else:
                report = _run_check(target, config.max_weight, config.budget, config.subsample, seed)
        except EnumerationBudgetError as e:
            console.print(f"[red]{e}; rerun with --subsample[/red]")
            return EXIT_USAGE

        path = Path(config.output_dir) / f"check_{target}.json"
        report.save(path)
        _display_report(report)
        console.print(f"[green]Report saved to {path}[/green]")
        return EXIT_OK if report.passed else EXIT_VIOLATIONS

    _run_guarded(body)


def _display_report(report: FtReport):
    table = Table(title=f"Check: {report.target}", show_header=True)
    table.add_column("Property", style="cyan", width=25)
    table.add_column("Value", style="green")
    table.add_row("Fault sets", str(report.checked_fault_sets))
    table.add_row("Violations", str(len(report.violations)))
    table.add_row("Result", "[green]pass[/green]" if report.passed else "[red]fail[/red]")
    console.print(table)
    for violation in report.violations[:10]:
        console.print(f"  [red]✗[/red] {', '.join(violation.faults)} -> {violation.error} "
                      f"[{violation.record}] {violation.detail}")
    for note in report.notes:
        console.print(f"  [italic]{note}[/italic]")


# overhead

@cli.command()
@click.option('--p', 'p_values', multiple=True, type=float, help='Physical error rate (repeatable)')
@click.option('--target', 'targets', multiple=True, type=float, help='Target logical error (repeatable)')
@click.option('--level', type=click.IntRange(1, 3), help='Cost this level instead of the lowest meeting target')
@click.option('--starred', is_flag=True, default=None, help='Use the detect-mode inner EC fits')
@click.option('--fits', 'fits_file', type=click.Path(exists=True), help='Local fits instead of the golden file')
@click.option('--format', 'fmt', help='csv or json')
@click.option('--output-dir', '-o', help='Output directory')
@click.option('--config', 'config_file', type=click.Path(exists=True), help='YAML configuration file')
def overhead(p_values, targets, level, starred, fits_file, fmt, output_dir, config_file):
    """Qubit and gate overhead of the detect scheme and of MEK distillation"""

    def body():
        config = load_config(config_file, {'p_values': list(p_values) or None, 'targets': list(targets) or None,
                                           'starred': starred, 'fmt': fmt, 'output_dir': output_dir})
        # Local fits override golden entries of the same name
        fits = {**load_fits(), **(load_fits(fits_file) if fits_file else {})}
        rows = []
        for p in config.p_values:
            if not validate_probability(p):
                console.print(f"[red]Error: invalid error rate {p}[/red]")
                return EXIT_USAGE
            if level:
                rows.extend(_fixed_level_rows(p, level, fits, config.starred))
                continue
            for target in config.targets:
                rows.extend(r.to_dict() for r in compare_schemes(p, target, fits, starred=config.starred))
        _display_overhead(rows)
        path = Path(config.output_dir) / f"overhead.{config.fmt}"
        write_overhead(rows, path, config.fmt)
        console.print(f"[green]Overhead saved to {path}[/green]")
        return EXIT_OK

    _run_guarded(body)


def _fixed_level_rows(p: float, level: int, fits, starred: bool) -> List[Dict]:
    h_fits = scheme_models('detect', fits, starred)
    inputs = OverheadInputs.from_fits(level, p, h_fits)
    rows = [detect_overhead(inputs).to_dict()]
    if level >= 2:
        full = OverheadInputs.from_fits(3, p, h_fits)
        accept = MekAcceptance.from_fits(fits, p)
        rows.append(mek_overhead('full', p, accept, full, level).to_dict())
        if level == 3:
            rows.append(mek_overhead('hybrid', p, accept, full).to_dict())
    return rows


def _display_overhead(rows: List[Dict]):
    table = Table(title="Overhead", show_header=True)
    for column in ('p', 'target', 'scheme', 'level', 'qubits', 'gates'):
        table.add_column(column, style="cyan" if column in ('p', 'scheme') else "green")
    for r in rows:
        target = r['details'].get('target')
        table.add_row(f"{r['p']:.2e}", f"{target:.0e}" if target else "-", r['scheme'], str(r['level']),
                      f"{r['qubits']:.4g}", f"{r['gates']:.4g}")
    console.print(table)


# fit

@cli.command()
@click.option('--input', '-i', 'inputs', multiple=True, required=True, type=click.Path(exists=True),
              help='Estimate records (CSV or JSON, repeatable)')
@click.option('--exponents', default='2', help='Comma-separated powers of p for the error classes')
@click.option('--accept-exponents', default='1', help='Comma-separated powers of p for the rejection')
@click.option('--name', default='fit', help='Model name')
@click.option('--source', help='Provenance URL stored with the fit')
@click.option('--output', '-o', default='output/fits.yaml', help='Fit file to write')
def fit(inputs, exponents, accept_exponents, name, source, output):
    """Fit polynomial error models to simulated records"""

    def body():
        if not validate_source_url(source):
            console.print(f"[red]Error: invalid source URL '{source}'[/red]")
            return EXIT_USAGE
        records = [r for path in inputs for r in read_records(Path(path))]
        powers = [int(k) for k in exponents.split(',') if k.strip()]
        accept_powers = [int(k) for k in accept_exponents.split(',') if k.strip()]
        model = fit_estimate_records(records, powers, accept_powers, name=name)
        save_fits({name: model}, Path(output), source=source)
        console.print(json.dumps(model.to_dict(), indent=2))
        console.print(f"[green]Fit saved to {output}[/green]")
        return EXIT_OK

    _run_guarded(body)


# circuits

def _named_circuits() -> Dict[str, Circuit]:
    found = {}
    for factory in PROTOCOLS.values():
        for circuit in factory().circuits():
            found.setdefault(circuit.name, circuit)
    found.setdefault(h_prep_nonft().name, h_prep_nonft())
    found.setdefault(z_round(False).circuit.name, z_round(False).circuit)
    return found


@cli.command()
@click.option('--emit', type=click.Path(), help='Write every built-in circuit to this directory')
@click.option('--load', 'load_path', type=click.Path(exists=True), help='Census of a circuit file')
def circuits(emit, load_path):
    """Location census of the built-in circuits or of a circuit file"""

    def body():
        if load_path:
            found = {Path(load_path).stem: Circuit.from_text(Path(load_path).read_text())}
        else:
            found = _named_circuits()
        table = Table(title="Location census", show_header=True)
        table.add_column("Circuit", style="cyan")
        table.add_column("Qubits", style="green")
        table.add_column("Locations", style="green")
        for name, circuit in sorted(found.items()):
            census = location_census(circuit)
            counts = ', '.join(f"{kind.value}={count}" for kind, count in
                               sorted(census.items(), key=lambda item: item[0].value))
            table.add_row(name, str(circuit.num_qubits), counts)
        console.print(table)
        if emit:
            directory = Path(emit)
            directory.mkdir(parents=True, exist_ok=True)
            for name, circuit in found.items():
                (directory / f"{name}.circ").write_text(circuit.to_text())
            console.print(f"[green]{len(found)} circuits written to {directory}[/green]")
        return EXIT_OK

    _run_guarded(body)


if __name__ == '__main__':
    cli()
