"""Classifier-based consistency tests for ensembles of simulation outputs."""

from ._hect import (
    Ensemble,
    HectError,
    PcaModel,
    Role,
    fit_pca,
    generate,
    gof_diagnose,
    gof_test,
    p_value,
    pca_ect,
    project,
    test_statistic,
    two_sample_test,
)

__all__ = [
    "Ensemble",
    "HectError",
    "PcaModel",
    "Role",
    "fit_pca",
    "generate",
    "gof_diagnose",
    "gof_test",
    "p_value",
    "pca_ect",
    "project",
    "test_statistic",
    "two_sample_test",
]
