"""Per-entity bibliometric indices with 1/N_aut**alpha co-author weighting.

An entity is either an author or an official collaboration.  For a set of
papers P and exponent alpha, with w(p) = n_aut(p)**-alpha:

    n_fcit        = sum_p n_cit(p)  * w(p)
    n_icit        = sum_p n_icit(p) * w(p)
    weighted_npap = sum_p w(p)

At alpha = 1 each paper's credit is split evenly and sums to one over its
authors; alpha = 0 gives plain counts.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

ALPHA_CITATIONS = 1.0
ALPHA_PAPERS_LARGE = 1.0 / 3.0
ALPHA_PAPERS_SMALL = 0.5
ALPHA_PRESETS = {
    "citations": ALPHA_CITATIONS,
    "papers-large": ALPHA_PAPERS_LARGE,
    "papers-small": ALPHA_PAPERS_SMALL,
}
ALPHA_MAX = 2.0

PROFILE_COLUMNS = ("entity_id", "n_pap", "n_totcit", "n_fcit", "n_icit",
                   "h_index", "mean_naut", "weighted_npap", "alpha")


class EntityNotFoundError(KeyError):
    pass


def check_alpha(alpha, max_alpha=ALPHA_MAX):
    """Validate a weight exponent; accepts preset names as well as numbers."""
    if isinstance(alpha, str):
        if alpha in ALPHA_PRESETS:
            return ALPHA_PRESETS[alpha]
        alpha = float(alpha)
    alpha = float(alpha)
    if not 0.0 <= alpha <= max_alpha:
        raise ValueError(f"alpha must lie in [0, {max_alpha}], got {alpha}")
    return alpha


def fractional_weight(n_aut, alpha):
    """Credit share n_aut**-alpha of one co-author; works on scalars and arrays."""
    alpha = check_alpha(alpha)
    n = np.asarray(n_aut, dtype=np.float64)
    if np.any(n < 1):
        raise ValueError("n_aut must be >= 1")
    w = np.power(n, -alpha)
    return float(w) if w.ndim == 0 else w


def h_index(citation_counts):
    """Largest h such that h entries are >= h."""
    c = np.sort(np.asarray(citation_counts, dtype=np.int64))[::-1]
    if c.size and c[-1] < 0:
        raise ValueError("citation counts must be nonnegative")
    return int(np.count_nonzero(c >= np.arange(1, c.size + 1)))


@dataclass(frozen=True)
class EntityProfile:
    entity_id: str
    n_pap: int
    n_totcit: int
    n_fcit: float
    n_icit: float
    h_index: int
    mean_naut: float
    weighted_npap: float
    alpha: float


@dataclass(frozen=True, eq=False)
class ProfileTable:
    """Columnar profiles for many entities, sorted by entity id."""
    entity_ids: list
    n_pap: np.ndarray
    n_totcit: np.ndarray
    n_fcit: np.ndarray
    n_icit: np.ndarray
    h_index: np.ndarray
    mean_naut: np.ndarray
    weighted_npap: np.ndarray
    alpha: float

    def __len__(self):
        return len(self.entity_ids)

    def __getitem__(self, i):
        return EntityProfile(
            self.entity_ids[i], int(self.n_pap[i]), int(self.n_totcit[i]),
            float(self.n_fcit[i]), float(self.n_icit[i]), int(self.h_index[i]),
            float(self.mean_naut[i]), float(self.weighted_npap[i]), self.alpha,
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def get(self, entity_id):
        try:
            return self[self.entity_ids.index(entity_id)]
        except ValueError:
            raise EntityNotFoundError(entity_id) from None

    def write_csv(self, fp):
        fp.write(",".join(PROFILE_COLUMNS) + "\n")
        for p in self:
            fp.write(
                f"{_csv_field(p.entity_id)},{p.n_pap},{p.n_totcit},{p.n_fcit:.6g},"
                f"{p.n_icit:.6g},{p.h_index},{p.mean_naut:.6g},"
                f"{p.weighted_npap:.6g},{p.alpha:.6g}\n"
            )


def _csv_field(text):
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def profiles_from_groups(entity_ids, offsets, members, n_aut, n_cit, n_icit, alpha):
    """Profiles for entities given as CSR groups of paper positions.

    Entities whose group is empty are dropped.  This is the array-level entry
    point shared by corpus-backed and synthetic pipelines.
    """
    alpha = check_alpha(alpha)
    n_aut_f = np.asarray(n_aut, dtype=np.float64)
    weight = np.power(n_aut_f, -alpha)
    n_pap, n_totcit, n_fcit, n_icit_w, h, naut_sum, wpap = _kernels.group_profiles(
        np.asarray(offsets, dtype=np.int64), np.asarray(members, dtype=np.int64),
        n_aut_f, np.asarray(n_cit, dtype=np.int64),
        np.asarray(n_icit, dtype=np.float64), weight,
    )
    keep = n_pap > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_naut = naut_sum / n_pap
    return ProfileTable(
        entity_ids=[e for e, k in zip(entity_ids, keep) if k],
        n_pap=n_pap[keep], n_totcit=n_totcit[keep], n_fcit=n_fcit[keep],
        n_icit=n_icit_w[keep], h_index=h[keep], mean_naut=mean_naut[keep],
        weighted_npap=wpap[keep], alpha=alpha,
    )


def _groups_by_code(codes, n_groups, mask=None):
    """CSR grouping of positions by integer code (negative codes skipped)."""
    positions = np.arange(codes.shape[0], dtype=np.int64)
    valid = codes >= 0
    if mask is not None:
        valid &= mask
    positions = positions[valid]
    order = np.argsort(codes[valid], kind="stable")
    counts = np.bincount(codes[valid], minlength=n_groups)
    offsets = np.zeros(n_groups + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, positions[order]


def _author_groups(corpus, mask=None):
    listing_paper = np.repeat(np.arange(len(corpus), dtype=np.int64), corpus.n_aut)
    listing_mask = None if mask is None else mask[listing_paper]
    offsets, listing = _groups_by_code(corpus.author_codes, len(corpus.author_vocab),
                                       listing_mask)
    return offsets, listing_paper[listing]


def author_profiles(corpus, index, alpha=ALPHA_CITATIONS, mask=None):
    """Profiles of every author, optionally restricted to papers in ``mask``."""
    offsets, members = _author_groups(corpus, mask)
    return profiles_from_groups(corpus.author_vocab, offsets, members,
                                index.n_aut, index.n_cit, index.n_icit, alpha)


def collaboration_profiles(corpus, index, alpha=ALPHA_CITATIONS, mask=None):
    """Profiles of every tagged collaboration."""
    offsets, members = _groups_by_code(corpus.collab_codes, len(corpus.collab_vocab), mask)
    return profiles_from_groups(corpus.collab_vocab, offsets, members,
                                index.n_aut, index.n_cit, index.n_icit, alpha)


def _single_profile(name, papers, index, alpha):
    papers = np.asarray(papers, dtype=np.int64)
    offsets = np.array([0, papers.shape[0]], dtype=np.int64)
    table = profiles_from_groups([name], offsets, papers, index.n_aut,
                                 index.n_cit, index.n_icit, alpha)
    return table[0]


def author_profile(author_id, corpus, index, alpha=ALPHA_CITATIONS):
    try:
        code = corpus.author_code(author_id)
    except KeyError:
        raise EntityNotFoundError(f"unknown author {author_id!r}") from None
    listing_paper = np.repeat(np.arange(len(corpus), dtype=np.int64), corpus.n_aut)
    return _single_profile(author_id, listing_paper[corpus.author_codes == code],
                           index, alpha)


def collaboration_profile(collab_name, corpus, index, alpha=ALPHA_CITATIONS):
    try:
        code = corpus.collab_code(collab_name)
    except KeyError:
        raise EntityNotFoundError(f"unknown collaboration {collab_name!r}") from None
    return _single_profile(collab_name, np.flatnonzero(corpus.collab_codes == code),
                           index, alpha)


def h_index_bound(n_pap, n_totcit):
    return min(n_pap, math.isqrt(n_totcit))
