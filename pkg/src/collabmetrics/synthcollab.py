"""Seeded generator of synthetic collaboration corpora.

A collaboration of n_aut authors splits into n_sub = round(n_aut**s)
sub-groups with independent competencies.  Each paper's citation count is
log-normal with median base_median_cit * sqrt(n_sub).  The expected number
of papers is papers_per_topic * n_aut / sqrt(n_sub), so the expected total
citations grow exactly like n_aut and fractionally counted citations stay
flat.  At s = 2/3 the paper count is papers_per_topic * n_sub, one batch of
papers per topic; other values of s trade papers against citations.
"""
import json
import logging
import math
import numbers
from dataclasses import asdict, dataclass, field

import numpy as np

from .metrics import profiles_from_groups
from .scaling import (DEFAULT_BINS_PER_DECADE, DEFAULT_MIN_BIN_COUNT, INDEX_FAMILIES,
                      decompose_exponents, fit_power_law, index_values, log_bin)

log = logging.getLogger(__name__)

# roughly 32M references over 1.3M papers in the HEP literature
DEFAULT_CITER_REFS = 25
_WRITE_WARN_LISTINGS = 10_000_000


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    s: float = 2.0 / 3.0
    n_collabs: int = 6000
    naut_min: int = 1
    naut_max: int = 3000
    papers_per_topic: float = 5.0
    sigma_log: float = 1.2
    base_median_cit: float = 10.0
    citer_refs: int = DEFAULT_CITER_REFS
    deterministic: bool = False

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, numbers.Integral) \
                or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if not 0.0 < self.s <= 1.0:
            raise ValueError(f"s must lie in (0, 1], got {self.s}")
        if self.n_collabs < 1:
            raise ValueError("n_collabs must be >= 1")
        if not 1 <= self.naut_min <= self.naut_max:
            raise ValueError("need 1 <= naut_min <= naut_max")
        if not self.papers_per_topic > 0:
            raise ValueError("papers_per_topic must be > 0")
        if not self.sigma_log >= 0:
            raise ValueError("sigma_log must be >= 0")
        if not self.base_median_cit > 0:
            raise ValueError("base_median_cit must be > 0")
        if self.citer_refs < 1:
            raise ValueError("citer_refs must be >= 1")

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EquilibriumSolution:
    s: float
    p_pap: float
    p_cit: float
    iterations: int


def solve_equilibrium_s(s0=1.0, tol=1e-12, max_iter=200):
    """Fixed point of s = 1 - s/2 (papers scale like the number of topics).

    Plain iteration; the map is a contraction with factor 1/2.
    """
    s = float(s0)
    for it in range(1, max_iter + 1):
        nxt = 1.0 - s / 2.0
        if abs(nxt - s) <= tol:
            # |nxt - s*| = |s - s*|/2 and |nxt - s| = 3|s - s*|/2, so one
            # more step keeps us well inside tol
            s = nxt
            break
        s = nxt
    else:  # pragma: no cover - cannot happen for a contraction
        raise RuntimeError("fixed-point iteration did not converge")
    return EquilibriumSolution(s=s, p_pap=1.0 - s / 2.0, p_cit=s / 2.0, iterations=it)


def theoretical_exponents(s):
    """Expected (p_pap, p_cit, p_totcit, p_fcit) for sub-collaboration exponent s.

    Works on any real type; pass a ``fractions.Fraction`` for exact results.
    """
    if not 0 < s <= 1:
        raise ValueError(f"s must lie in (0, 1], got {s}")
    half = s / 2
    return (1 - half, half, 1, 0)


@dataclass(frozen=True)
class SynthCollaboration:
    index: int
    name: str
    n_aut: int
    n_sub: int
    n_pap: int
    citations: np.ndarray = field(repr=False)


def collab_name(j):
    return f"synthC{j:06d}"


def paper_id(j, k):
    return f"{collab_name(j)}:p{k:05d}"


def author_id(j, k):
    return f"synth:{j:06d}:{k:05d}"


@dataclass(frozen=True, eq=False)
class SynthCorpus:
    config: SynthConfig
    n_aut: np.ndarray          # per collaboration
    n_sub: np.ndarray
    n_pap: np.ndarray
    paper_offsets: np.ndarray  # CSR over papers, collaboration order
    citations: np.ndarray      # per paper

    def __len__(self):
        return self.n_aut.shape[0]

    @property
    def n_papers(self):
        return int(self.paper_offsets[-1])

    @property
    def paper_naut(self):
        return np.repeat(self.n_aut, self.n_pap)

    @property
    def individual_citations(self):
        # every citing paper carries exactly citer_refs references
        return self.citations / float(self.config.citer_refs)

    def collaboration(self, j):
        a, b = self.paper_offsets[j], self.paper_offsets[j + 1]
        return SynthCollaboration(j, collab_name(j), int(self.n_aut[j]), int(self.n_sub[j]),
                                  int(self.n_pap[j]), self.citations[a:b])

    def collaborations(self):
        return [self.collaboration(j) for j in range(len(self))]

    def profiles(self, alpha=1.0):
        """Collaboration profiles straight from the generated arrays."""
        members = np.arange(self.n_papers, dtype=np.int64)
        names = [collab_name(j) for j in range(len(self))]
        return profiles_from_groups(names, self.paper_offsets, members, self.paper_naut,
                                    self.citations, self.individual_citations, alpha)

    # -- file emission ------------------------------------------------------

    def _paper_lines(self):
        for j in range(len(self)):
            authors = [author_id(j, k) for k in range(int(self.n_aut[j]))]
            for k in range(int(self.n_pap[j])):
                yield {"id": paper_id(j, k), "authors": authors, "collab": collab_name(j),
                       "cats": ["hep-ex"], "year": 2000, "refs": []}

    def write_corpus(self, fp, citations="sidecar"):
        """Write the line-delimited corpus.

        ``citations="sidecar"`` writes papers only; pair it with
        :meth:`write_sidecar`.  ``citations="stubs"`` also emits citing stub
        papers, each with exactly ``citer_refs`` references (padded with
        ids outside the corpus), so the ordinary citation index reproduces
        the generated counts.
        """
        listings = int(np.dot(self.n_aut, self.n_pap))
        if listings > _WRITE_WARN_LISTINGS:
            log.warning("writing %d author listings; the file will be large", listings)
        dumps = json.JSONEncoder(separators=(",", ":")).encode
        for obj in self._paper_lines():
            fp.write(dumps(obj) + "\n")
        if citations == "stubs":
            for obj in self._stub_lines():
                fp.write(dumps(obj) + "\n")
        elif citations != "sidecar":
            raise ValueError("citations must be 'sidecar' or 'stubs'")

    def _stub_lines(self):
        R = self.config.citer_refs
        total = int(self.citations.sum())
        if total == 0:
            return
        # every cited paper's copies are contiguous, so striding by n_stubs
        # never puts the same target twice into one stub
        n_stubs = max(-(-total // R), int(self.citations.max()))
        targets = np.repeat(np.arange(self.n_papers), self.citations)
        owner = np.repeat(np.arange(len(self)), self.n_pap)
        local = np.arange(self.n_papers) - self.paper_offsets[owner]
        for i in range(n_stubs):
            refs = [paper_id(int(owner[t]), int(local[t])) for t in targets[i::n_stubs]]
            refs.extend(f"synthX:{k:05d}" for k in range(R - len(refs)))
            yield {"id": f"synthS:{i:09d}", "authors": [f"synth:stub:{i:09d}"],
                   "cats": [], "year": 2000, "refs": refs}

    def write_sidecar(self, fp):
        fp.write("paper_id,n_cit,n_ref_of_citers_harmonic\n")
        icit = self.individual_citations
        for j in range(len(self)):
            a = int(self.paper_offsets[j])
            for k in range(int(self.n_pap[j])):
                fp.write(f"{paper_id(j, k)},{int(self.citations[a + k])},"
                         f"{float(icit[a + k])!r}\n")


def _sub_count(n_aut, s):
    return np.clip(np.rint(np.power(n_aut.astype(np.float64), s)), 1, n_aut).astype(np.int64)


def generate(config):
    """Draw a synthetic corpus; fully determined by ``config``.

    Collaboration j draws from its own stream spawned off the seed, so its
    papers do not depend on how many collaborations are generated.
    """
    root = np.random.SeedSequence(config.seed)
    size_seq, *collab_seqs = root.spawn(config.n_collabs + 1)

    rng = np.random.default_rng(size_seq)
    lo, hi = math.log(config.naut_min), math.log(config.naut_max + 1)
    # floor of a log-uniform draw: P(n) proportional to log((n+1)/n)
    n_aut = np.floor(np.exp(rng.uniform(lo, hi, size=config.n_collabs))).astype(np.int64)
    n_aut = np.clip(n_aut, config.naut_min, config.naut_max)
    n_sub = _sub_count(n_aut, config.s)
    # total work ~ n_aut: papers * sqrt(n_sub) citations each
    expected = config.papers_per_topic * n_aut / np.sqrt(n_sub)

    n_pap = np.empty(config.n_collabs, dtype=np.int64)
    cites = []
    for j, seq in enumerate(collab_seqs):
        crng = np.random.default_rng(seq)
        if config.deterministic:
            n_pap[j] = max(1, int(np.rint(expected[j])))
        else:
            # 1 + Poisson(lam - 1) keeps n_pap >= 1 with mean exactly lam
            n_pap[j] = 1 + crng.poisson(max(expected[j] - 1.0, 0.0))
        median = config.base_median_cit * math.sqrt(n_sub[j])
        draw = median * np.exp(config.sigma_log * crng.standard_normal(n_pap[j]))
        cites.append(np.rint(draw).astype(np.int64))

    offsets = np.zeros(config.n_collabs + 1, dtype=np.int64)
    np.cumsum(n_pap, out=offsets[1:])
    citations = np.concatenate(cites) if cites else np.zeros(0, dtype=np.int64)
    return SynthCorpus(config, n_aut, n_sub, n_pap, offsets, citations)


# --------------------------------------------------------------------------
# end-to-end validation

DEFAULT_TOLERANCE = 0.05
DEFAULT_TOTCIT_TOLERANCE = 0.07


@dataclass(frozen=True)
class ExponentDelta:
    family: str
    fitted: float
    stderr: float
    theoretical: float
    delta: float
    tolerance: float
    passed: bool


@dataclass(frozen=True, eq=False)
class ValidationReport:
    config: SynthConfig
    profiles: object
    curves: dict
    fits: dict
    deltas: list
    decomposition: object

    @property
    def passed(self):
        return all(d.passed for d in self.deltas)

    def write_delta_csv(self, fp):
        fp.write("index,fitted,stderr,theoretical,delta,tolerance,pass\n")
        for d in self.deltas:
            fp.write(f"{d.family},{d.fitted:.6f},{d.stderr:.6f},{d.theoretical:.6f},"
                     f"{d.delta:+.6f},{d.tolerance:.6g},{'yes' if d.passed else 'no'}\n")


def theoretical_by_family(s):
    p_pap, p_cit, p_totcit, p_fcit = theoretical_exponents(s)
    # individual citations are fractional citations over a fixed citer length
    return {"pap": p_pap, "cit": p_cit, "totcit": p_totcit, "fcit": p_fcit, "icit": p_fcit}


def validate_profiles(config, profiles, bins_per_decade=DEFAULT_BINS_PER_DECADE,
                      min_bin_count=DEFAULT_MIN_BIN_COUNT, estimator="mean",
                      tolerance=DEFAULT_TOLERANCE, totcit_tolerance=DEFAULT_TOTCIT_TOLERANCE):
    """Fit every index family on ``profiles`` and compare with theory."""
    theory = theoretical_by_family(config.s)
    curves, fits, deltas = {}, {}, []
    for family in INDEX_FAMILIES:
        curve = log_bin(profiles.mean_naut, index_values(profiles, family),
                        bins_per_decade, min_bin_count)
        fit = fit_power_law(curve, estimator)
        curves[family], fits[family] = curve, fit
        tol = totcit_tolerance if family == "totcit" else tolerance
        delta = fit.exponent - float(theory[family])
        deltas.append(ExponentDelta(family, fit.exponent, fit.exponent_stderr,
                                    float(theory[family]), delta, tol, abs(delta) <= tol))
    decomposition = decompose_exponents(fits["pap"], fits["cit"], fits["totcit"],
                                        totcit_tolerance)
    return ValidationReport(config, profiles, curves, fits, deltas, decomposition)


def run_validation(config, **kwargs):
    """simulate -> collaboration indices -> scaling fits, all in memory."""
    corpus = generate(config)
    return validate_profiles(config, corpus.profiles(alpha=1.0), **kwargs)
