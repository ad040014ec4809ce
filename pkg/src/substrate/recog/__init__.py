"""Fibres, cuttings, period groups, LI-fixing powers and UC verification."""
from .cutting import RecognisabilityReport, cuttings_of_patch, recognisability_radius, verify_witness
from .fibre import Fibre, enumerate_fibre, phase_classes
from .lipower import LIPowerReport, li_fixing_power
from .periods import PeriodCertificate, certify_period, compute_periods
from .uc import UCReport, uc_verify

__all__ = [
    "Fibre",
    "LIPowerReport",
    "PeriodCertificate",
    "RecognisabilityReport",
    "UCReport",
    "certify_period",
    "compute_periods",
    "cuttings_of_patch",
    "enumerate_fibre",
    "li_fixing_power",
    "phase_classes",
    "recognisability_radius",
    "uc_verify",
    "verify_witness",
]
