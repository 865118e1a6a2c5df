#!/usr/bin/env python3
"""
chaoscomm - experiment runner

Entry point for the chaos-communication experiments. Each subcommand reads a
configuration file, runs one experiment and writes its artifacts into the
output directory:

    simulate     trajectory.csv, sync_report.txt [, trajectory.svg]
    sync-scan    sync_scan.csv [, sync_scan.svg]
    mask         mask_residual.csv, mask_bits.csv, mask_report.txt [, mask.svg]
    ber          ber_curve.csv [, ber_curve.svg]
    complexity   complexity_report.txt, complexity_report.csv
    validate     prints the normalized configuration
"""

import argparse
import csv
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from chaoscomm.complexity.report import complexity_report
from chaoscomm.core.config_manager import ConfigManager
from chaoscomm.core.errors import ChaosCommError, ConfigError, InvalidParameter
from chaoscomm.dynamics.integrator import integrate
from chaoscomm.dynamics.trajectory import autocorrelation, load_trajectory, save_trajectory
from chaoscomm.modem.ber import BER_HEADER, ber_sweep, curve_summary, theoretical_ber
from chaoscomm.output import plots
from chaoscomm.output.writers import write_csv, write_key_values
from chaoscomm.scheduler.task_scheduler import TaskScheduler
from chaoscomm.sync.masking import (bit_error_rate, mask_recover, mask_transmit,
                                    spectral_deviation)
from chaoscomm.sync.report import sync_report
from chaoscomm.sync.scan import SCAN_HEADER, sync_scan
from chaoscomm.utils.seeding import purpose_key, rng_for

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE = "chaoscomm.log"
COMMANDS = ("simulate", "sync-scan", "mask", "ber", "complexity", "validate")
RESIDUAL_HEADER = ("t_s", "residual")
MASK_BITS_HEADER = ("bit", "t_start_s", "sent", "received", "residual_mean")

logger = logging.getLogger("chaoscomm")


def setup_logging(verbose: bool = False) -> None:
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT,
                        handlers=[logging.StreamHandler()])
    logging.getLogger("chaoscomm").setLevel(logging.DEBUG if verbose else logging.INFO)


def read_signal(path: Path, transient: float) -> Tuple[np.ndarray, float]:
    """Channels as rows and the sample period of a CSV signal file.

    A trajectory CSV (first column ``t``) keeps its time base and drops the
    transient; any other headered numeric CSV is taken as unit-step samples.
    """
    with open(path, "r", newline="") as f:
        header = next(csv.reader(f), None)
    if not header:
        raise InvalidParameter(f"{path} is empty")
    if header[0].strip() == "t":
        trajectory = load_trajectory(path, transient)
        return trajectory.post_transient(), trajectory.step
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data.T, 1.0


class ExperimentRunner:
    """Runs the experiment named in a configuration and writes its artifacts."""

    def __init__(self, config: ConfigManager, scheduler: Optional[TaskScheduler] = None):
        self.config = config
        self.out_dir = config.output_dir
        self.scheduler = scheduler or TaskScheduler()
        self.handlers: Dict[str, Callable[[], str]] = {}
        self._register_handlers()

    def _register_handlers(self):
        self.register_handler("simulate", self._run_simulate)
        self.register_handler("sync-scan", self._run_sync_scan)
        self.register_handler("mask", self._run_mask)
        self.register_handler("ber", self._run_ber)
        self.register_handler("complexity", self._run_complexity)

    def register_handler(self, experiment: str, handler: Callable[[], str]):
        self.handlers[experiment] = handler

    def run(self) -> str:
        """Run the configured experiment and return its one-line summary."""
        experiment = self.config.experiment
        handler = self.handlers.get(experiment)
        if handler is None:
            raise InvalidParameter(f"no handler for experiment {experiment!r}")
        logger.info(f"Starting {experiment} (seed {self.config.seed}) into {self.out_dir}")
        started = time.monotonic()
        summary = handler()
        logger.info(f"Finished {experiment} in {time.monotonic() - started:.1f} s")
        return summary

    def _simulation(self) -> Dict[str, Any]:
        c = self.config
        return {
            "duration": c.get("simulation.duration"),
            "step": c.get("simulation.step"),
            "transient": c.get("simulation.transient"),
            "seed": c.seed,
        }

    def _run_simulate(self) -> str:
        c = self.config
        params = c.node_params()
        run = integrate(params, c.coupling(), sample_every=c.get("simulation.sample_every"),
                        **self._simulation())
        save_trajectory(run, self.out_dir / "trajectory.csv")

        values: Dict[str, Any] = {"nodes": run.node_count, "samples": run.samples,
                                  "step_s": run.step}
        if run.node_count >= 2:
            report = sync_report(run.post_transient(0), run.post_transient(1), run.step,
                                 c.get("sync.max_lag"), start=run.transient_end * run.step)
            values.update(report.to_dict())
            summary = (f"simulate: {run.node_count} nodes, pearson={report.pearson:.4f}, "
                       f"lag={report.lag:g} s ({report.classification.value})")
        else:
            lag = int(round(0.2 / run.step))
            values["autocorrelation_0.2s"] = autocorrelation(run.post_transient(0), lag)
            values["min_v"] = float(run.post_transient(0).min())
            values["max_v"] = float(run.post_transient(0).max())
            summary = (f"simulate: 1 node, autocorrelation at 0.2 s = "
                       f"{values['autocorrelation_0.2s']:.4f}")
        write_key_values(self.out_dir / "sync_report.txt", values)

        if c.svg:
            plots.plot_trajectory(self.out_dir / "trajectory.svg", run.times(), run.data,
                                  title=f"{c.get('topology.kind')} coupling")
        return summary

    def _run_sync_scan(self) -> str:
        c = self.config
        parameter = c.get("sync_scan.parameter")
        rows = sync_scan(c.node_params()[0], parameter, c.get("sync_scan.values"),
                         node=c.get("sync_scan.node"), coupling=c.coupling(),
                         max_lag=c.get("sync.max_lag"), scheduler=self.scheduler,
                         **self._simulation())
        write_csv(self.out_dir / "sync_scan.csv", SCAN_HEADER, [r.as_row() for r in rows])
        if c.svg:
            plots.plot_sync_scan(self.out_dir / "sync_scan.svg", [r.value for r in rows],
                                 [r.report.pearson for r in rows], parameter)
        synced = sum(1 for r in rows if r.report.synchronized)
        return f"sync-scan: {len(rows)} values of {parameter}, {synced} synchronized"

    def _run_mask(self) -> str:
        c = self.config
        params = c.node_params()
        carrier = params[0]
        receiver = params[1] if len(params) > 1 else params[0]
        if c.get("mask.receiver_tau_f") is not None:
            receiver = receiver.replace(tau_f=c.get("mask.receiver_tau_f"))
        cfg = c.masking_config()
        cfg.check(receiver)

        bits = rng_for(c.seed, purpose_key("message")).integers(0, 2, size=c.get("mask.bits"))
        tx, truth = mask_transmit(carrier, bits, cfg, seed=c.seed)
        recovery = mask_recover(tx, receiver, cfg=cfg, seed=c.seed,
                                require_sync=c.get("mask.require_sync"))
        ber = bit_error_rate(bits, recovery.bits)
        start = cfg.transient_samples
        deviation = spectral_deviation(tx[start:], truth.node(0)[start:], cfg.step)

        spb = cfg.samples_per_bit
        first = cfg.message_start()
        means = recovery.residual[first: first + bits.size * spb].reshape(bits.size, spb).mean(axis=1)
        rows = [[i, (first + i * spb) * cfg.step, int(bits[i]), int(recovery.bits[i]), means[i]]
                for i in range(bits.size)]
        write_csv(self.out_dir / "mask_bits.csv", MASK_BITS_HEADER, rows)
        every = c.get("mask.residual_every")
        write_csv(self.out_dir / "mask_residual.csv", RESIDUAL_HEADER,
                  [[i * cfg.step, recovery.residual[i]] for i in range(start, tx.size, every)])
        write_key_values(self.out_dir / "mask_report.txt", {
            "bits": int(bits.size),
            "errors": int(np.count_nonzero(bits != recovery.bits)),
            "ber": ber,
            "epsilon": cfg.epsilon,
            "correlation": recovery.correlation,
            "lag_s": recovery.lag_samples * cfg.step,
            "polarity": recovery.polarity,
            "undecidable": recovery.undecidable,
            "spectral_deviation": deviation,
            "sent": "".join(str(b) for b in bits),
            "recovered": "".join(str(b) for b in recovery.bits),
        })
        if c.svg:
            plots.plot_masking(self.out_dir / "mask.svg", truth.times(), truth.node(0), tx,
                               recovery.residual)
        return (f"mask: {bits.size} bits, BER={ber:g}, receiver correlation="
                f"{recovery.correlation:.4f}" + (" (undecidable)" if recovery.undecidable else ""))

    def _run_ber(self) -> str:
        c = self.config
        scheme = c.get("ber.scheme")
        spreading = c.ber_spreading()
        curve = ber_sweep(scheme, c.channel_spec(), c.get("ber.ebn0_grid"), spreading=spreading,
                          bits_per_point=c.get("ber.bits_per_point"), seed=c.seed,
                          chip_kind=c.get("ber.chip_source"),
                          csk_reference=c.get("ber.csk_reference"), scheduler=self.scheduler)
        write_csv(self.out_dir / "ber_curve.csv", BER_HEADER, curve.rows())
        if c.svg:
            theory = None
            if c.get("channel.kind") == "awgn":
                theory = [theoretical_ber(scheme, p.ebn0_db, spreading) for p in curve.points]
            plots.plot_ber(self.out_dir / "ber_curve.svg", [p.ebn0_db for p in curve.points],
                           [p.ber for p in curve.points], [p.ci95[0] for p in curve.points],
                           [p.ci95[1] for p in curve.points], curve.channel.label, theory)
        summary = curve_summary(curve)
        last = curve.points[-1]
        return (f"ber: {summary['scheme']} over {summary['channel']}, {summary['points']} "
                f"point(s), BER={last.ber:.4g} at {last.ebn0_db:g} dB, "
                f"under-sampled: {summary['under_sampled']}")

    def _run_complexity(self) -> str:
        c = self.config
        source = c.get("complexity.input")
        if source:
            data, step = read_signal(Path(source), c.get("simulation.transient"))
        else:
            run = integrate(c.node_params(), c.coupling(),
                            sample_every=c.get("simulation.sample_every"), **self._simulation())
            data, step = run.post_transient(), run.step
        report = complexity_report(data, c.complexity_settings(step), c.get("complexity.column"))
        write_key_values(self.out_dir / "complexity_report.txt", report.to_dict())
        write_csv(self.out_dir / "complexity_report.csv", report.csv_header(), [report.csv_row()])
        return (f"complexity: H={report.shannon_bits:.4f} bits, h={report.entropy_rate_bits:.4f}, "
                f"E={report.excess_entropy_bits:.4f}, LMC={report.lmc:.4f}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Path to the experiment configuration")
    common.add_argument("--seed", type=int, help="Override the configured seed")
    common.add_argument("--out", help="Override the output directory")
    common.add_argument("--svg", action="store_true", help="Also write SVG figures")
    common.add_argument("--verbose", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(prog="chaoscomm",
                                     description="Chaos-based communication experiments")
    commands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        commands.add_parser(name, parents=[common])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; 0 on success, 2 on configuration errors, 1 otherwise."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)

    overrides: Dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out:
        overrides["output.dir"] = args.out
    if args.svg:
        overrides["output.svg"] = True

    try:
        config = ConfigManager.from_file(args.config, overrides)
    except ConfigError as e:
        for diagnostic in e.diagnostics:
            print(f"{args.config}: {diagnostic}", file=sys.stderr)
        return 2

    if args.command == "validate":
        sys.stdout.write(config.normalized_text())
        return 0
    if config.experiment != args.command:
        logger.error(f"Configuration is for '{config.experiment}', not '{args.command}'")
        return 2

    config.output_dir.mkdir(parents=True, exist_ok=True)
    file_handler = logging.FileHandler(config.output_dir / LOG_FILE)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(file_handler)
    try:
        summary = ExperimentRunner(config).run()
    except ChaosCommError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {str(e)}")
        return 1
    finally:
        logging.getLogger().removeHandler(file_handler)
        file_handler.close()
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
