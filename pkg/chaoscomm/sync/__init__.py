"""Synchronization measures and chaotic masking."""

from chaoscomm.sync.masking import (MaskingConfig, MaskRecovery, mask_recover,
                                    mask_transmit, spectral_deviation)
from chaoscomm.sync.report import SyncClass, SyncReport, sync_report
from chaoscomm.sync.scan import SyncScanRow, sync_scan

__all__ = [
    "MaskRecovery",
    "MaskingConfig",
    "SyncClass",
    "SyncReport",
    "SyncScanRow",
    "mask_recover",
    "mask_transmit",
    "spectral_deviation",
    "sync_report",
    "sync_scan",
]
