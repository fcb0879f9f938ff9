"""Publication records, streaming corpus ingestion and the citation index.

A corpus file holds one JSON object per line::

    {"id": "p1", "authors": ["a1", "a2"], "collab": "ATLAS",
     "cats": ["hep-ex"], "year": 2012, "refs": ["p0", "x9"]}

``collab`` may be absent or null.  References may point at ids that are not
in the corpus; they count towards the citing paper's reference total but
never produce a citation edge.

Internally the corpus is columnar.  Papers, author ids, collaboration names
and reference ids are all stored in sorted order, so the parsed result does
not depend on the order of the input lines.
"""
import csv
import enum
import io
import json
import logging
from bisect import bisect_left
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels

log = logging.getLogger(__name__)


class CorpusError(ValueError):
    pass


class DuplicatePaperError(CorpusError):
    def __init__(self, paper_id, first_line, second_line):
        self.paper_id = paper_id
        self.first_line = first_line
        self.second_line = second_line
        super().__init__(
            f"duplicate paper id {paper_id!r} on lines {first_line} and {second_line}"
        )


class Rejection(NamedTuple):
    line_number: int
    reason: str


class Category(enum.Enum):
    EXPERIMENT = "experiment"
    THEORY = "theory"
    ASTRO_COSMO = "astro-cosmo"
    OTHER = "other"


EXPERIMENT_CODES = frozenset({"hep-ex", "nucl-ex"})
ASTRO_CODES = frozenset({"astro-ph"})
THEORY_CODES = frozenset({"hep-ph", "hep-th", "hep-lat", "nucl-th", "gr-qc"})

# stable small-int codes for the columnar category array
CATEGORY_ORDER = (Category.EXPERIMENT, Category.THEORY, Category.ASTRO_COSMO, Category.OTHER)
_CATEGORY_CODE = {c: i for i, c in enumerate(CATEGORY_ORDER)}


def _is_astro(code):
    # post-2009 arXiv splits astro-ph into astro-ph.CO, astro-ph.HE, ...
    return code in ASTRO_CODES or code.startswith("astro-ph.")


def category_of_codes(codes):
    """Map a list of arXiv-style category codes to a :class:`Category`.

    Precedence is Experiment > AstroCosmo > Theory over the whole list.
    """
    codes = list(codes)
    if any(c in EXPERIMENT_CODES for c in codes):
        return Category.EXPERIMENT
    if any(_is_astro(c) for c in codes):
        return Category.ASTRO_COSMO
    if any(c in THEORY_CODES for c in codes):
        return Category.THEORY
    return Category.OTHER


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    author_ids: tuple
    collaboration: Optional[str] = None
    categories: tuple = ()
    year: int = 0
    reference_ids: tuple = ()

    def __post_init__(self):
        if not self.author_ids:
            raise CorpusError(f"paper {self.paper_id!r}: empty authors")
        if self.paper_id in self.reference_ids:
            raise CorpusError(f"paper {self.paper_id!r} references itself")
        if len(set(self.reference_ids)) != len(self.reference_ids):
            raise CorpusError(f"paper {self.paper_id!r} has duplicate references")

    @property
    def n_aut(self):
        return len(self.author_ids)

    @property
    def n_ref(self):
        return len(self.reference_ids)

    def to_json(self):
        obj = {"id": self.paper_id, "authors": list(self.author_ids)}
        if self.collaboration is not None:
            obj["collab"] = self.collaboration
        obj["cats"] = list(self.categories)
        obj["year"] = self.year
        obj["refs"] = list(self.reference_ids)
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def classify_category(paper):
    return category_of_codes(paper.categories)


# --------------------------------------------------------------------------
# columnar corpus

def _csr_offsets(lengths):
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    return offsets


def _permute_csr(offsets, values, order):
    """Reorder CSR rows so that new row i is old row ``order[i]``."""
    lengths = np.diff(offsets)[order]
    new_offsets = _csr_offsets(lengths)
    # position of every element of the new layout inside the old values array
    starts = np.repeat(offsets[:-1][order] - new_offsets[:-1], lengths)
    gather = np.arange(new_offsets[-1], dtype=np.int64) + starts
    return new_offsets, values[gather]


def _sorted_vocab(codes_by_first_seen):
    """Return (sorted vocabulary, remap) where remap[old_code] = new_code."""
    vocab = list(codes_by_first_seen)
    order = sorted(range(len(vocab)), key=vocab.__getitem__)
    remap = np.empty(len(vocab), dtype=np.int64)
    remap[order] = np.arange(len(vocab), dtype=np.int64)
    return [vocab[i] for i in order], remap


class Corpus:
    """Validated set of papers in canonical (paper-id sorted) order.

    Build one with :func:`parse_corpus` or :meth:`Corpus.from_records`.
    ``rejections`` and ``warnings`` hold ``(line_number, reason)`` pairs
    from ingestion.
    """

    def __init__(self, paper_ids, id_vocab, paper_code, author_vocab,
                 author_offsets, author_codes, collab_vocab, collab_codes,
                 categories, years, ref_offsets, ref_codes,
                 rejections=(), warnings=()):
        self.paper_ids = paper_ids
        self.id_vocab = id_vocab
        self.paper_code = paper_code
        self.author_vocab = author_vocab
        self.author_offsets = author_offsets
        self.author_codes = author_codes
        self.collab_vocab = collab_vocab
        self.collab_codes = collab_codes
        self.categories = categories
        self.years = years
        self.ref_offsets = ref_offsets
        self.ref_codes = ref_codes
        self.rejections = list(rejections)
        self.warnings = list(warnings)

        self.n_aut = np.diff(author_offsets)
        self.n_ref = np.diff(ref_offsets)
        self.category_codes = np.array(
            [_CATEGORY_CODE[category_of_codes(c)] for c in categories], dtype=np.int8
        )
        vocab_to_paper = np.full(len(id_vocab), -1, dtype=np.int64)
        vocab_to_paper[paper_code] = np.arange(len(paper_ids), dtype=np.int64)
        self.ref_targets = vocab_to_paper[ref_codes]
        self._position = None

    @classmethod
    def from_records(cls, records):
        builder = _Builder()
        for lineno, rec in enumerate(records, 1):
            builder.add(lineno, rec.paper_id, rec.author_ids, rec.collaboration,
                        rec.categories, rec.year, rec.reference_ids)
        return builder.finish()

    def __len__(self):
        return len(self.paper_ids)

    def __iter__(self):
        return (self.record(i) for i in range(len(self)))

    def __eq__(self, other):
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.paper_ids == other.paper_ids
            and self.id_vocab == other.id_vocab
            and self.author_vocab == other.author_vocab
            and self.collab_vocab == other.collab_vocab
            and self.categories == other.categories
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("paper_code", "author_offsets", "author_codes",
                             "collab_codes", "years", "ref_offsets", "ref_codes")
            )
        )

    __hash__ = None

    def position(self, paper_id):
        if self._position is None:
            self._position = {pid: i for i, pid in enumerate(self.paper_ids)}
        try:
            return self._position[paper_id]
        except KeyError:
            raise KeyError(f"unknown paper id {paper_id!r}") from None

    def record(self, i):
        a0, a1 = self.author_offsets[i], self.author_offsets[i + 1]
        r0, r1 = self.ref_offsets[i], self.ref_offsets[i + 1]
        collab = self.collab_codes[i]
        return PaperRecord(
            paper_id=self.paper_ids[i],
            author_ids=tuple(self.author_vocab[c] for c in self.author_codes[a0:a1]),
            collaboration=self.collab_vocab[collab] if collab >= 0 else None,
            categories=self.categories[i],
            year=int(self.years[i]),
            reference_ids=tuple(self.id_vocab[c] for c in self.ref_codes[r0:r1]),
        )

    def __getitem__(self, paper_id):
        return self.record(self.position(paper_id))

    def author_code(self, author_id):
        i = bisect_left(self.author_vocab, author_id)
        if i == len(self.author_vocab) or self.author_vocab[i] != author_id:
            raise KeyError(author_id)
        return i

    def collab_code(self, name):
        i = bisect_left(self.collab_vocab, name)
        if i == len(self.collab_vocab) or self.collab_vocab[i] != name:
            raise KeyError(name)
        return i

    def paper_mask(self, category=None, year_min=None, year_max=None):
        """Boolean mask over papers; all filters are optional."""
        mask = np.ones(len(self), dtype=bool)
        if category is not None:
            mask &= self.category_codes == _CATEGORY_CODE[Category(category)]
        if year_min is not None:
            mask &= self.years >= year_min
        if year_max is not None:
            mask &= self.years <= year_max
        return mask


class _Builder:
    """Accumulates records in arrival order, then canonicalises."""

    def __init__(self):
        self.ids = {}          # every id seen (papers and references) -> code
        self.authors = {}
        self.collabs = {}
        self.first_line = {}
        self.paper_code = []
        self.author_len = []
        self.author_codes = []
        self.collab = []
        self.cats = []
        self.years = []
        self.ref_len = []
        self.ref_codes = []
        self.rejections = []
        self.warnings = []

    def _code(self, table, key):
        code = table.get(key)
        if code is None:
            code = table[key] = len(table)
        return code

    def add(self, lineno, paper_id, author_ids, collab, cats, year, refs):
        if paper_id in self.first_line:
            raise DuplicatePaperError(paper_id, self.first_line[paper_id], lineno)
        if not author_ids:
            self.rejections.append(Rejection(lineno, "empty authors"))
            return

        uniq_authors = list(dict.fromkeys(author_ids))
        if len(uniq_authors) != len(author_ids):
            self.warnings.append(Rejection(lineno, "duplicate author ids removed"))
        uniq_refs = list(dict.fromkeys(refs))
        if len(uniq_refs) != len(refs):
            self.warnings.append(Rejection(lineno, "duplicate references removed"))
        if paper_id in uniq_refs:
            uniq_refs.remove(paper_id)
            self.warnings.append(Rejection(lineno, "self reference removed"))

        if collab is not None:
            collab = collab.strip() or None

        self.first_line[paper_id] = lineno
        self.paper_code.append(self._code(self.ids, paper_id))
        self.author_len.append(len(uniq_authors))
        self.author_codes.extend(self._code(self.authors, a) for a in uniq_authors)
        self.collab.append(-1 if collab is None else self._code(self.collabs, collab))
        self.cats.append(tuple(cats))
        self.years.append(year)
        self.ref_len.append(len(uniq_refs))
        self.ref_codes.extend(self._code(self.ids, r) for r in uniq_refs)

    def finish(self):
        id_vocab, id_remap = _sorted_vocab(self.ids)
        author_vocab, author_remap = _sorted_vocab(self.authors)
        collab_vocab, collab_remap = _sorted_vocab(self.collabs)

        paper_code = id_remap[np.asarray(self.paper_code, dtype=np.int64)]
        order = np.argsort(paper_code, kind="stable")

        author_offsets, author_codes = _permute_csr(
            _csr_offsets(np.asarray(self.author_len, dtype=np.int64)),
            author_remap[np.asarray(self.author_codes, dtype=np.int64)],
            order,
        )
        ref_offsets, ref_codes = _permute_csr(
            _csr_offsets(np.asarray(self.ref_len, dtype=np.int64)),
            id_remap[np.asarray(self.ref_codes, dtype=np.int64)],
            order,
        )
        collab = np.asarray(self.collab, dtype=np.int64)
        collab_codes = np.full(collab.shape, -1, dtype=np.int64)
        tagged = collab >= 0
        collab_codes[tagged] = collab_remap[collab[tagged]]

        paper_code = paper_code[order]
        return Corpus(
            paper_ids=[id_vocab[c] for c in paper_code],
            id_vocab=id_vocab,
            paper_code=paper_code,
            author_vocab=author_vocab,
            author_offsets=author_offsets,
            author_codes=author_codes,
            collab_vocab=collab_vocab,
            collab_codes=collab_codes[order],
            categories=[self.cats[i] for i in order],
            years=np.asarray(self.years, dtype=np.int64)[order],
            ref_offsets=ref_offsets,
            ref_codes=ref_codes,
            rejections=self.rejections,
            warnings=self.warnings,
        )


# --------------------------------------------------------------------------
# ingestion

_REQUIRED = ("id", "authors", "cats", "year", "refs")


def _string_list(obj, key):
    value = obj[key]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValueError(f"field {key!r} must be an array of strings")
    return value


def _decode(lineno, raw):
    """Return (fields, None) or (None, reason)."""
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError:
            return None, "invalid utf-8"
    line = raw.rstrip("\r\n")
    if not line.strip():
        return None, "blank line"
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return None, f"malformed json: {exc.msg}"
    if not isinstance(obj, dict):
        return None, "record is not an object"
    for key in _REQUIRED:
        if key not in obj:
            return None, f"missing key {key!r}"
    try:
        pid = obj["id"]
        if not isinstance(pid, str) or not pid:
            raise ValueError("field 'id' must be a nonempty string")
        authors = _string_list(obj, "authors")
        cats = _string_list(obj, "cats")
        refs = _string_list(obj, "refs")
        year = obj["year"]
        if isinstance(year, bool) or not isinstance(year, int):
            raise ValueError("field 'year' must be an integer")
        collab = obj.get("collab")
        if collab is not None and not isinstance(collab, str):
            raise ValueError("field 'collab' must be a string")
    except ValueError as exc:
        return None, str(exc)
    return (pid, authors, collab, cats, year, refs), None


def parse_corpus(stream):
    """Parse line-delimited records from a binary or text stream.

    ``stream`` may be any iterable of ``bytes`` or ``str`` lines.  Bad lines
    land in ``corpus.rejections``; a repeated paper id raises
    :class:`DuplicatePaperError`.
    """
    builder = _Builder()
    for lineno, raw in enumerate(stream, 1):
        fields, reason = _decode(lineno, raw)
        if fields is None:
            builder.rejections.append(Rejection(lineno, reason))
            continue
        builder.add(lineno, *fields)
    corpus = builder.finish()
    if corpus.rejections:
        log.info("rejected %d of %d lines", len(corpus.rejections),
                 len(corpus) + len(corpus.rejections))
    return corpus


def load_corpus(path):
    with open(path, "rb") as fp:
        return parse_corpus(fp)


def _clean_reason(reason):
    return " ".join(str(reason).split())


def write_rejection_report(rejections, fp):
    for lineno, reason in rejections:
        fp.write(f"{lineno}\t{_clean_reason(reason)}\n")


# --------------------------------------------------------------------------
# citation index

class PaperCounts(NamedTuple):
    n_cit: int
    n_icit: float
    n_ref: int
    n_aut: int


@dataclass(frozen=True, eq=False)
class CitationIndex:
    """Per-paper counts aligned with ``corpus.paper_ids``."""
    paper_ids: list
    n_cit: np.ndarray
    n_icit: np.ndarray
    n_ref: np.ndarray
    n_aut: np.ndarray

    def __len__(self):
        return len(self.paper_ids)

    def lookup(self, paper_id):
        i = bisect_left(self.paper_ids, paper_id)
        if i == len(self.paper_ids) or self.paper_ids[i] != paper_id:
            raise KeyError(f"unknown paper id {paper_id!r}")
        return PaperCounts(int(self.n_cit[i]), float(self.n_icit[i]),
                           int(self.n_ref[i]), int(self.n_aut[i]))


def build_citation_index(corpus):
    n_cit, n_icit = _kernels.citation_counts(
        corpus.ref_offsets, corpus.ref_targets, len(corpus)
    )
    return CitationIndex(
        paper_ids=corpus.paper_ids,
        n_cit=n_cit,
        n_icit=n_icit,
        n_ref=corpus.n_ref.copy(),
        n_aut=corpus.n_aut.copy(),
    )


SIDECAR_HEADER = ("paper_id", "n_cit", "n_ref_of_citers_harmonic")


def load_citation_sidecar(fp, corpus):
    """Read a precomputed ``paper_id, n_cit, n_ref_of_citers_harmonic`` file.

    The third column is the sum over citing papers of 1/(their reference
    count), i.e. the individual citations.  Papers absent from the file get
    zero citations.
    """
    if isinstance(fp, (str, bytes)) or hasattr(fp, "__fspath__"):
        with open(fp, newline="", encoding="utf-8") as handle:
            return load_citation_sidecar(handle, corpus)
    n_cit = np.zeros(len(corpus), dtype=np.int64)
    n_icit = np.zeros(len(corpus), dtype=np.float64)
    reader = csv.reader(fp)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != SIDECAR_HEADER:
        raise CorpusError(f"sidecar header must be {','.join(SIDECAR_HEADER)}")
    for lineno, row in enumerate(reader, 2):
        if len(row) != 3:
            raise CorpusError(f"sidecar line {lineno}: expected 3 columns")
        try:
            i = corpus.position(row[0])
        except KeyError:
            raise CorpusError(f"sidecar line {lineno}: unknown paper id {row[0]!r}") from None
        try:
            n_cit[i] = int(row[1])
            n_icit[i] = float(row[2])
        except ValueError:
            raise CorpusError(f"sidecar line {lineno}: counts must be numbers") from None
    if np.any(n_cit < 0) or np.any(n_icit < 0) or np.any(n_icit > n_cit):
        raise CorpusError("sidecar counts violate 0 <= n_icit <= n_cit")
    return CitationIndex(corpus.paper_ids, n_cit, n_icit,
                         corpus.n_ref.copy(), corpus.n_aut.copy())


def group_official_collaborations(corpus):
    """Map collaboration tag -> list of its PaperRecords (paper-id order)."""
    groups = {}
    for i in np.flatnonzero(corpus.collab_codes >= 0):
        name = corpus.collab_vocab[corpus.collab_codes[i]]
        groups.setdefault(name, []).append(corpus.record(i))
    return dict(sorted(groups.items()))


def parse_text(text):
    """Convenience wrapper for tests and small inline corpora."""
    return parse_corpus(io.StringIO(text))
