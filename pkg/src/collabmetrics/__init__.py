"""Collaboration-aware bibliometric indices and their scaling with team size."""
from ._accel import backend_name
from .corpus import (Category, CitationIndex, Corpus, CorpusError, DuplicatePaperError,
                     PaperRecord, build_citation_index, classify_category,
                     group_official_collaborations, load_citation_sidecar, load_corpus,
                     parse_corpus)
from .metrics import (EntityNotFoundError, EntityProfile, ProfileTable, author_profile,
                      author_profiles, collaboration_profile, collaboration_profiles,
                      fractional_weight, h_index)
from .scaling import (BinnedCurve, InsufficientDataError, LogNormalFit, ScalingFit,
                      decompose_exponents, fit_lognormal, fit_power_law, log_bin)
from .synthcollab import (SynthConfig, generate, run_validation, solve_equilibrium_s,
                          theoretical_exponents)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "Category", "CitationIndex", "Corpus", "CorpusError", "DuplicatePaperError",
    "PaperRecord", "build_citation_index", "classify_category",
    "group_official_collaborations", "load_citation_sidecar", "load_corpus", "parse_corpus",
    "EntityNotFoundError", "EntityProfile", "ProfileTable", "author_profile",
    "author_profiles", "collaboration_profile", "collaboration_profiles",
    "fractional_weight", "h_index",
    "BinnedCurve", "InsufficientDataError", "LogNormalFit", "ScalingFit",
    "decompose_exponents", "fit_lognormal", "fit_power_law", "log_bin",
    "SynthConfig", "generate", "run_validation", "solve_equilibrium_s",
    "theoretical_exponents",
]
