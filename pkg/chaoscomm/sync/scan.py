"""
Correlation versus parameter mismatch.

Each sweep value replaces one oscillator field on one node of an otherwise
matched network, and the post-transient sync report between node 0 and that
node is recorded.
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from chaoscomm.core.errors import InvalidParameter
from chaoscomm.dynamics.integrator import DEFAULT_STEP, DEFAULT_TRANSIENT, integrate
from chaoscomm.dynamics.oscillator import OscillatorParams
from chaoscomm.network.coupling import CouplingSpec, bidirectional
from chaoscomm.scheduler.task_scheduler import TaskScheduler
from chaoscomm.sync.report import DEFAULT_MAX_LAG, SyncReport, sync_report

logger = logging.getLogger("chaoscomm.sync.scan")

SCAN_HEADER = ("value", "pearson", "lag_s", "classification")


@dataclass(frozen=True)
class SyncScanRow:
    value: float
    report: SyncReport

    def as_row(self) -> List[Any]:
        return [self.value, self.report.pearson, self.report.lag,
                self.report.classification.value]


def _scan_point(index: int, value: float, base: OscillatorParams, parameter: str,
                node: int, node_count: int, coupling: CouplingSpec, duration: float,
                step: float, transient: float, seed: int, max_lag: float) -> SyncScanRow:
    params = [base] * node_count
    params[node] = base.replace(**{parameter: value})
    run = integrate(params, coupling, duration=duration, step=step, seed=seed,
                    transient=transient)
    start = run.transient_end * run.step
    report = sync_report(run.post_transient(0), run.post_transient(node), run.step,
                         max_lag, start=start)
    logger.info(f"sync scan {parameter}={value:g}: pearson={report.pearson:.4f} "
                f"({report.classification.value})")
    return SyncScanRow(float(value), report)


def sync_scan(base: OscillatorParams, parameter: str, values: Sequence[float],
              node: int = 1, coupling: Optional[CouplingSpec] = None,
              duration: float = 2.0, step: float = DEFAULT_STEP,
              transient: float = DEFAULT_TRANSIENT, seed: int = 0,
              max_lag: float = DEFAULT_MAX_LAG,
              scheduler: Optional[TaskScheduler] = None) -> List[SyncScanRow]:
    """Sweep one oscillator field of ``node`` and report its sync with node 0.

    Args:
        base: Parameters shared by every node before the mismatch is applied.
        parameter: OscillatorParams field to vary (e.g. "tau_f").
        values: Sweep values for that field.
        node: Node receiving the mismatched value (not 0).
        coupling: Network; the bidirectional pair by default.
        duration, step, transient, seed: Integration settings for every point.
        max_lag: Lag search range of the sync report.
        scheduler: Pool for the sweep points.

    Returns:
        One row per value, in the order given.
    """
    fields = {f.name for f in dataclasses.fields(OscillatorParams)}
    if parameter not in fields:
        raise InvalidParameter(f"unknown oscillator parameter {parameter!r}")
    coupling = coupling or bidirectional(0, 1)
    if not 0 < node < coupling.node_count:
        raise InvalidParameter(f"scan node must be in 1..{coupling.node_count - 1}")
    if len(values) == 0:
        raise InvalidParameter("sync scan needs at least one value")

    settings: Dict[str, Any] = dict(base=base, parameter=parameter, node=node,
                                    node_count=coupling.node_count, coupling=coupling,
                                    duration=duration, step=step, transient=transient,
                                    seed=seed, max_lag=max_lag)
    scheduler = scheduler or TaskScheduler()
    return scheduler.map("sync_scan", _scan_point, [float(v) for v in values], **settings)
