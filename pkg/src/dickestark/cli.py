"""Command-line front end.

Exit codes: 0 ok, 2 configuration error, 3 integration failure, 4 no
suppression (eta_plus == eta_minus), 5 Ito verification failed, 6 sweep
finished with failed rows.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from . import integrate as _integrate
from .algebra import Couplings, EnsembleSpec, format_m
from .config import (
    AGGREGATES,
    ConfigError,
    RunConfig,
    parse_int,
    parse_number,
    read_raw,
    run_config_from,
    sweep_config_from,
)
from .dynamics import evolve_diagonal, evolve_full, w_state_decay
from .errors import DomainError, IntegrationError, NoCriticalNumberError
from .observables import critical_numbers, delay_time_sum, emitted_fraction, peak_and_delay, stabilized_states
from .output import atomic_write, fmt, resolve_output, table_csv, write_trace
from .presets import BASE_CHI, FIELD_INTENSITIES, FIGURE_ATOMS, PRESETS, get_preset
from .states import FullState, TimeGrid
from .verify import verify_ito

EXIT_OK, EXIT_CONFIG, EXIT_INTEGRATION, EXIT_NO_SUPPRESSION, EXIT_VERIFY, EXIT_SWEEP = 0, 2, 3, 4, 5, 6

_RUN_FLAGS = {
    "n_atoms": ("--n-atoms", "number of atoms N_a"),
    "chi": ("--chi", "Raman coupling chi (base value before field-intensity scaling)"),
    "eta_plus": ("--eta-plus", "Stark parameter eta_plus; accepts expressions like pi/8"),
    "eta_minus": ("--eta-minus", "Stark parameter eta_minus"),
    "q": ("--q", "geometric factor"),
    "field_intensity": ("--field-intensity", "classical field intensity s, chi**2 -> s chi**2"),
    "initial": ("--initial", "fully_excited | semi_excited | w_state | m=<index> | p=<p_-r,...,p_r>"),
    "t_end": ("--t-end", "final dimensionless time"),
    "output_points": ("--points", "number of output samples (including tau=0)"),
}


def _add_run_flags(p, *, with_output=True):
    p.add_argument("--config", help="key=value or JSON configuration file; flags override it")
    for key, (flag, help_text) in _RUN_FLAGS.items():
        p.add_argument(flag, dest=key, default=None, help=help_text)
    if with_output:
        p.add_argument("--format", dest="format", choices=("csv", "json"), default=None)
        p.add_argument("--out", dest="output_path", default=None, help="output file")
        p.add_argument("--solver", choices=("diagonal", "full"), default=None)


def _overrides(args, keys):
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _load_run_config(args) -> RunConfig:
    raw = read_raw(args.config) if args.config else {}
    keys = list(_RUN_FLAGS) + ["format", "output_path", "solver"]
    return run_config_from(raw, _overrides(args, keys)).validate()


def metadata(config: RunConfig) -> dict:
    c = config.couplings()
    return {
        "artifact": "dickestark",
        "version": __version__,
        "config": config.to_dict(),
        "effective_couplings": {"chi": c.chi, "eta_plus": c.eta_plus, "eta_minus": c.eta_minus, "q": c.q},
        "outside_validity": c.outside_validity,
        "integrator": {"method": "dormand-prince-5(4)", "rtol": _integrate.RTOL, "atol": _integrate.ATOL},
    }


def run(config: RunConfig):
    """Evolve one configuration; returns (spec, trace)."""
    spec, couplings, grid = config.spec(), config.couplings(), config.grid()
    initial = config.initial_state()
    if config.solver == "full":
        _, trace = evolve_full(spec, couplings, FullState.from_ladder(initial), grid)
    else:
        trace = evolve_diagonal(spec, couplings, initial, grid)
    return spec, trace


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    config = _load_run_config(args)
    spec, trace = run(config)
    path = resolve_output(config.output_path, f"trace.{config.format}")
    write_trace(spec, trace, path, config.format, metadata(config))
    print(path)
    return EXIT_OK


def cmd_figure(args) -> int:
    try:
        preset = get_preset(args.preset)
    except DomainError as exc:
        raise ConfigError("preset", str(exc)) from exc
    chi0 = parse_number(args.chi0)
    t_end = parse_number(args.t_end)
    points = parse_int(args.points)
    rows = []
    for s in FIELD_INTENSITIES:
        config = RunConfig(
            n_atoms=FIGURE_ATOMS,
            chi=chi0,
            eta_plus=preset.eta_plus,
            eta_minus=preset.eta_minus,
            field_intensity=s,
            initial=preset.initial,
            t_end=t_end,
            output_points=points,
            format=args.format,
        ).validate()
        spec, trace = run(config)
        name = f"fig{preset.name}_s{s:g}.{args.format}"
        path = resolve_output(f"{args.out_dir}/{name}" if args.out_dir else None, name)
        meta = metadata(config) | {"figure": preset.name, "caption": preset.caption}
        write_trace(spec, trace, path, args.format, meta)
        peak, t_peak, delayed = peak_and_delay(trace)
        rows.append([fmt(s), path.as_posix(), fmt(peak), fmt(t_peak), fmt(delayed)])
    sys.stdout.write(table_csv(["field_intensity", "file", "peak_intensity", "peak_time", "has_delay"], rows))
    return EXIT_OK


def _couplings_from(args) -> Couplings:
    try:
        return Couplings(parse_number(args.chi), parse_number(args.eta_plus), parse_number(args.eta_minus), parse_number(args.q))
    except (DomainError, ValueError) as exc:
        raise ConfigError("couplings", str(exc)) from exc


def _spec_from(args) -> EnsembleSpec:
    try:
        return EnsembleSpec(parse_int(args.n_atoms))
    except (DomainError, ValueError) as exc:
        raise ConfigError("n_atoms", str(exc)) from exc


def cmd_analyze(args) -> int:
    couplings = _couplings_from(args)
    kind = args.kind
    if kind == "critical":
        try:
            cs = critical_numbers(couplings, parse_int(args.k_max))
        except NoCriticalNumberError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NO_SUPPRESSION
        header = ["k", "n_star", "nearest_integer", "f_at_nearest"]
        rows = [[k, v, n, f] for k, (v, n, f) in enumerate(zip(cs.values, cs.nearest_integers, cs.nearest_f), 1)]
    elif kind == "stabilized":
        spec = _spec_from(args)
        st = stabilized_states(spec, couplings, parse_number(args.tolerance))
        header = ["m", "k", "residual"]
        rows = [[format_m(s.m), s.k, s.residual] for s in st.members]
    elif kind == "wstate":
        spec = _spec_from(args)
        grid = TimeGrid(parse_number(args.t_end), parse_int(args.points))
        header = ["tau", "survival"]
        rows = [[t, w_state_decay(spec, couplings, t)] for t in grid.times]
    else:
        spec = _spec_from(args)
        gamma_w = couplings.chi**2 if args.gamma_w is None else parse_number(args.gamma_w)
        start = spec.r if args.initial == "fully_excited" else 0.0
        if args.initial == "semi_excited" and spec.n_atoms % 2:
            raise ConfigError("initial", "semi_excited needs an even atom count")
        top = spec.index_of(start)
        header = ["n_emitted", "mean_delay"]
        rows = [[n, delay_time_sum(spec, gamma_w, n, start)] for n in range(0, top + 1)]
    text = table_csv(header, rows)
    if args.output_path:
        atomic_write(args.output_path, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify_ito(args) -> int:
    n_max = parse_int(args.n_max)
    trials = parse_int(args.trials)
    seed = parse_int(args.seed)
    if not 1 <= n_max <= 8:
        raise ConfigError("n_max", f"must be in 1..8, got {n_max}")
    if trials < 0:
        raise ConfigError("trials", f"must be >= 0, got {trials}")
    report, results, passed = verify_ito(n_max, trials, seed)
    if args.output_path:
        atomic_write(args.output_path, report)
    else:
        sys.stdout.write(report)
    if not passed:
        worst = max(results, key=lambda r: r.worst_value)
        c = worst.worst
        print(
            f"verification failed: N_a={worst.n_atoms} chi={fmt(c.chi)} eta_plus={fmt(c.eta_plus)} "
            f"eta_minus={fmt(c.eta_minus)} deviation={fmt(worst.worst_value)}",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


def sweep_row(config: RunConfig, aggregates):
    """Aggregates for one sweep point, or (None, message) when the run fails."""
    try:
        config = config.validate()
        spec, trace = run(config)
    except (DomainError, IntegrationError) as exc:
        return None, str(exc)
    peak, t_peak, delayed = peak_and_delay(trace)
    values = {
        "peak_intensity": peak,
        "peak_time": t_peak,
        "has_delay": delayed,
        "emitted_fraction": emitted_fraction(spec, trace),
    }
    return [values[a] for a in aggregates], ""


def cmd_sweep(args) -> int:
    raw = read_raw(args.config) if args.config else {}
    keys = list(_RUN_FLAGS) + ["solver"]
    sweep = sweep_config_from(raw, _overrides(args, keys), args.param, args.aggregate)
    combos = sweep.combinations()
    configs = [sweep.base.replace(**combo) for combo in combos]
    jobs = parse_int(args.jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(sweep_row, configs, [sweep.aggregates] * len(configs)))
    else:
        results = [sweep_row(c, sweep.aggregates) for c in configs]
    names = [n for n, _ in sweep.parameters]
    header = names + ["status"] + list(sweep.aggregates) + ["error"]
    rows, failed = [], 0
    for combo, (values, message) in zip(combos, results):
        if values is None:
            failed += 1
            rows.append([combo[n] for n in names] + ["failed"] + [None] * len(sweep.aggregates) + [message])
        else:
            rows.append([combo[n] for n in names] + ["ok"] + values + [""])
    text = table_csv(header, rows)
    path = resolve_output(args.output_path, "sweep.csv")
    atomic_write(path, text)
    print(path)
    return EXIT_SWEEP if failed else EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dickestark", description="Non-Wiener Dicke superradiance simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="evolve one configuration and write its trace")
    _add_run_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("figure", help="reproduce the parameter sets of a pulse figure")
    p.add_argument("preset", help=f"one of {', '.join(PRESETS)}")
    p.add_argument("--chi0", default=str(BASE_CHI), help="coupling at unit field intensity")
    p.add_argument("--t-end", default="200")
    p.add_argument("--points", default="201")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", dest="out_dir", default=None, help="output directory")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("analyze", help="closed-form analyses")
    p.add_argument("kind", choices=("critical", "stabilized", "wstate", "delay"))
    p.add_argument("--n-atoms", default="8")
    p.add_argument("--chi", default="0.1")
    p.add_argument("--eta-plus", default="0")
    p.add_argument("--eta-minus", default="0")
    p.add_argument("--q", default="1")
    p.add_argument("--k-max", default="3", help="critical: number of critical values")
    p.add_argument("--tolerance", default="1e-12", help="stabilized: phase tolerance")
    p.add_argument("--t-end", default="100", help="wstate: final time")
    p.add_argument("--points", default="101", help="wstate: samples")
    p.add_argument("--gamma-w", default=None, help="delay: Wiener rate (default chi**2)")
    p.add_argument(
        "--initial",
        choices=("fully_excited", "semi_excited"),
        default="fully_excited",
        help="delay: start of the cascade; n photons traverse the n transitions below it",
    )
    p.add_argument("--out", dest="output_path", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify-ito", help="cross-check series-exponentiated and closed-form SDE coefficients")
    p.add_argument("--n-max", default="4")
    p.add_argument("--trials", default="50")
    p.add_argument("--seed", default="0")
    p.add_argument("--out", dest="output_path", default=None)
    p.set_defaults(func=cmd_verify_ito)

    p = sub.add_parser("sweep", help="run a one- or two-parameter grid and tabulate pulse aggregates")
    _add_run_flags(p, with_output=False)
    p.add_argument("--solver", choices=("diagonal", "full"), default=None)
    p.add_argument("--param", action="append", default=None, help="NAME=v1,v2,... or NAME=start:stop:step")
    p.add_argument("--aggregate", default=None, help=f"comma list from {', '.join(AGGREGATES)}")
    p.add_argument("--jobs", default="1")
    p.add_argument("--out", dest="output_path", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
