"""Data models."""
from mcdw.models.params import Case2Constants, CaseTag, CongruenceReport, Family, FamilyParams
from mcdw.models.report import (
    CheckReport,
    CheckStatus,
    IsoCertificate,
    SearchBudget,
    SearchOutcome,
    SearchResult,
    SeriesReport,
    SeriesTerm,
)

__all__ = [
    'Case2Constants',
    'CaseTag',
    'CheckReport',
    'CheckStatus',
    'CongruenceReport',
    'Family',
    'FamilyParams',
    'IsoCertificate',
    'SearchBudget',
    'SearchOutcome',
    'SearchResult',
    'SeriesReport',
    'SeriesTerm',
]
