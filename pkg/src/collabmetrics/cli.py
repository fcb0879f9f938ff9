"""Command-line front end.

    collabmetrics ingest   CORPUS --out DIR
    collabmetrics indices  CORPUS --out DIR [--alpha A] [--sidecar FILE]
    collabmetrics scaling  CORPUS --out DIR [--bins-per-decade K] [--estimator mean|median]
    collabmetrics simulate --seed N --out DIR [generator flags]
    collabmetrics validate --seed N --out DIR [generator and fit flags]
    collabmetrics report   DIR --out DIR

Every flag may also come from a flat ``key = value`` file passed with
``--config``; flags on the command line win over the file, which wins over
the built-in defaults.  Each run writes ``manifest.txt`` with the effective
parameters (and ``manifest.time`` with the wall-clock time, kept apart so
the other outputs stay byte-reproducible).

Exit status: 0 success, 1 I/O or data error, 2 usage error, 3 validation
tolerance exceeded.
"""
import argparse
import datetime
import logging
import sys
from pathlib import Path

from . import __version__, _accel
from .corpus import (CATEGORY_ORDER, CorpusError, build_citation_index,
                     load_citation_sidecar, load_corpus, write_rejection_report)
from .metrics import ALPHA_PRESETS, author_profiles, check_alpha, collaboration_profiles
from .scaling import (ESTIMATORS, INDEX_FAMILIES, InsufficientDataError, decompose_exponents,
                      fit_power_law, index_values, log_bin, read_curve_csv, read_fit_csv,
                      read_histogram_csv, size_histogram, write_histogram_csv)
from .svgplot import curve_svg, histogram_svg
from .synthcollab import SynthConfig, generate, run_validation, validate_profiles

log = logging.getLogger("collabmetrics")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3

CATEGORIES = tuple(c.value for c in CATEGORY_ORDER)
PANEL_SPLITS = ("all", "experiment", "theory", "astro-cosmo")
ENTITY_KINDS = ("collaborations", "authors")
_SYNTH_DEFAULTS = SynthConfig(seed=0)


class UsageError(Exception):
    pass


def _alpha(text):
    try:
        return check_alpha(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _bool(text):
    if isinstance(text, bool):
        return text
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


# name -> (type, default, choices, help); the flag is --name with dashes
PARAMS = {
    "out": (str, None, None, "output directory"),
    "sidecar": (str, None, None, "precomputed citation counts (paper_id,n_cit,"
                                 "n_ref_of_citers_harmonic) used instead of references"),
    "alpha": (_alpha, 1.0, None, "co-author weight exponent in [0, 2] or a preset: "
                                 + ", ".join(ALPHA_PRESETS)),
    "category": (str, "all", ("all",) + CATEGORIES, "restrict to one paper category"),
    "year_min": (int, None, None, "drop papers published before this year"),
    "year_max": (int, None, None, "drop papers published after this year"),
    "entities": (str, "both", ("both",) + ENTITY_KINDS, "entity kinds to analyse"),
    "bins_per_decade": (_positive_int, 5, None, "logarithmic bins per decade of N_aut"),
    "min_bin_count": (_positive_int, 3, None, "drop bins with fewer entities"),
    "estimator": (str, "mean", ESTIMATORS, "per-bin statistic to fit"),
    "fit_naut_min": (float, None, None, "ignore bins centred below this N_aut"),
    "fit_naut_max": (float, None, None, "ignore bins centred above this N_aut"),
    "seed": (int, None, None, "random seed (required)"),
    "s": (float, _SYNTH_DEFAULTS.s, None, "sub-collaboration exponent, N_sub = N_aut**s"),
    "n_collabs": (_positive_int, _SYNTH_DEFAULTS.n_collabs, None, "collaborations to draw"),
    "naut_min": (_positive_int, _SYNTH_DEFAULTS.naut_min, None, "smallest collaboration"),
    "naut_max": (_positive_int, _SYNTH_DEFAULTS.naut_max, None, "largest collaboration"),
    "papers_per_topic": (float, _SYNTH_DEFAULTS.papers_per_topic, None, "paper rate"),
    "sigma_log": (float, _SYNTH_DEFAULTS.sigma_log, None, "log-normal citation width"),
    "base_median_cit": (float, _SYNTH_DEFAULTS.base_median_cit, None,
                        "median citations of a one-topic paper"),
    "citer_refs": (_positive_int, _SYNTH_DEFAULTS.citer_refs, None,
                   "reference-list length of every synthetic citing paper"),
    "deterministic": (_bool, False, None, "round expected paper counts instead of drawing"),
    "citations": (str, "sidecar", ("sidecar", "stubs"), "how simulate encodes citations"),
    "tolerance": (float, 0.05, None, "allowed |fitted - theoretical| exponent gap"),
    "totcit_tolerance": (float, 0.07, None, "allowed gap for total citations"),
    "through_files": (_bool, False, None, "round-trip the synthetic corpus through files"),
}

_SYNTH = ("seed", "s", "n_collabs", "naut_min", "naut_max", "papers_per_topic",
          "sigma_log", "base_median_cit", "citer_refs", "deterministic")
_FIT = ("bins_per_decade", "min_bin_count", "estimator")

SUBCOMMANDS = {
    "ingest": ("validate a corpus file and write the rejection report", True, ("out",)),
    "indices": ("write author and collaboration profile CSVs", True,
                ("out", "sidecar", "alpha", "category", "year_min", "year_max")),
    "scaling": ("fit power laws of every index against N_aut", True,
                ("out", "sidecar", "alpha", "category", "year_min", "year_max", "entities")
                + _FIT + ("fit_naut_min", "fit_naut_max")),
    "simulate": ("write a synthetic corpus", False, ("out",) + _SYNTH + ("citations",)),
    "validate": ("simulate, fit and compare exponents with theory", False,
                 ("out",) + _SYNTH + _FIT + ("tolerance", "totcit_tolerance",
                                              "through_files")),
    "report": ("render curve and histogram CSVs as SVG", True, ("out",)),
}
REQUIRED = {"out"}
SEEDED = {"simulate", "validate"}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="collabmetrics",
        description="Collaboration-aware bibliometric indices and their scaling with team size.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    subs = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    for name, (help_text, takes_input, params) in SUBCOMMANDS.items():
        sub = subs.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        if takes_input:
            sub.add_argument("input", nargs="?", help="input corpus file or directory")
        sub.add_argument("--config", help="flat key = value file with default flags")
        for pname in params:
            ptype, default, choices, phelp = PARAMS[pname]
            flag = "--" + pname.replace("_", "-")
            if ptype is _bool:
                sub.add_argument(flag, dest=pname, action="store_true", help=phelp)
            else:
                sub.add_argument(flag, dest=pname, type=ptype, choices=choices,
                                 metavar=pname.upper(), help=f"{phelp} (default: {default})")
    return parser


def read_config_file(path):
    values = {}
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def resolve_params(command, args):
    """Merge built-in defaults, config file values and command-line flags."""
    _, takes_input, names = SUBCOMMANDS[command]
    allowed = set(names) | ({"input"} if takes_input else set())
    params = {n: PARAMS[n][1] for n in names}
    if takes_input:
        params["input"] = None

    config_path = getattr(args, "config", None)
    if config_path:
        for key, raw in read_config_file(config_path).items():
            if key not in allowed:
                raise UsageError(f"{config_path}: unknown key {key!r} for {command}")
            if key == "input":
                params[key] = raw
                continue
            ptype, _, choices, _ = PARAMS[key]
            try:
                value = ptype(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{config_path}: bad value for {key}: {exc}") from None
            if choices and value not in choices:
                raise UsageError(f"{config_path}: {key} must be one of {choices}")
            params[key] = value

    for key in allowed:
        if key in vars(args) and (key != "input" or args.input is not None):
            params[key] = getattr(args, key)

    missing = sorted(k for k in REQUIRED | ({"input"} if takes_input else set())
                     if params.get(k) is None)
    if command in SEEDED and params.get("seed") is None:
        missing.append("seed")
    if missing:
        raise UsageError("missing required parameter(s): " + ", ".join(missing))
    return params


def write_manifest(out, command, params):
    lines = [f"command = {command}", f"version = {__version__}",
             f"backend = {_accel.backend_name()}"]
    for key in sorted(params):
        value = params[key]
        lines.append(f"{key} = {'' if value is None else value}")
    (out / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    (out / "manifest.time").write_text(stamp + "\n", encoding="utf-8")


def _outdir(params):
    out = Path(params["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_inputs(params):
    corpus = load_corpus(params["input"])
    if params.get("sidecar"):
        index = load_citation_sidecar(params["sidecar"], corpus)
    else:
        index = build_citation_index(corpus)
    return corpus, index


def _mask(corpus, params, category=None):
    category = params.get("category") if category is None else category
    return corpus.paper_mask(category=None if category == "all" else category,
                             year_min=params.get("year_min"),
                             year_max=params.get("year_max"))


def _write(path, writer, *args):
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer(*args, fp)


# --------------------------------------------------------------------------
# subcommands

def cmd_ingest(params):
    corpus = load_corpus(params["input"])
    out = _outdir(params)
    _write(out / "rejections.tsv", write_rejection_report, corpus.rejections)
    _write(out / "warnings.tsv", write_rejection_report, corpus.warnings)
    write_manifest(out, "ingest", params)
    print(f"{len(corpus)} papers accepted, {len(corpus.rejections)} lines rejected, "
          f"{len(corpus.warnings)} warnings")
    return EXIT_OK


def cmd_indices(params):
    corpus, index = _load_inputs(params)
    out = _outdir(params)
    mask = _mask(corpus, params)
    authors = author_profiles(corpus, index, params["alpha"], mask)
    collabs = collaboration_profiles(corpus, index, params["alpha"], mask)
    _write(out / "profiles_authors.csv", lambda t, fp: t.write_csv(fp), authors)
    _write(out / "profiles_collaborations.csv", lambda t, fp: t.write_csv(fp), collabs)
    write_manifest(out, "indices", params)
    print(f"{len(authors)} author profiles, {len(collabs)} collaboration profiles")
    return EXIT_OK


_SUMMARY_HEADER = ("entities,split,index,exponent,stderr,amplitude,r2,n_bins,"
                   "estimator,status\n")


def _fit_family(profiles, family, params):
    curve = log_bin(profiles.mean_naut, index_values(profiles, family),
                    params["bins_per_decade"], params["min_bin_count"])
    fit = fit_power_law(curve, params["estimator"], params.get("fit_naut_min"),
                        params.get("fit_naut_max"))
    return curve, fit


def cmd_scaling(params):
    corpus, index = _load_inputs(params)
    out = _outdir(params)
    kinds = ENTITY_KINDS if params["entities"] == "both" else (params["entities"],)
    splits = PANEL_SPLITS if params["category"] == "all" else (params["category"],)
    builders = {"collaborations": collaboration_profiles, "authors": author_profiles}

    summary, decompositions, n_fits = [], [], 0
    for kind in kinds:
        for split in splits:
            profiles = builders[kind](corpus, index, params["alpha"],
                                      _mask(corpus, params, split))
            if kind == "collaborations" and split == splits[0] and len(profiles):
                _write(out / "histogram_collaborations.csv", write_histogram_csv,
                       size_histogram(profiles.mean_naut, params["bins_per_decade"]))
            fits = {}
            for family in INDEX_FAMILIES:
                tag = f"{kind}_{split}_{family}"
                if not len(profiles):
                    summary.append(f"{kind},{split},{family},,,,,,,skipped: no entities\n")
                    continue
                try:
                    curve, fit = _fit_family(profiles, family, params)
                except (InsufficientDataError, ValueError) as exc:
                    reason = " ".join(str(exc).replace(",", ";").split())
                    summary.append(f"{kind},{split},{family},,,,,,,skipped: {reason}\n")
                    continue
                _write(out / f"curve_{tag}.csv", lambda c, fp: c.write_csv(fp), curve)
                _write(out / f"fit_{tag}.csv", lambda f, fp: f.write_csv(fp), fit)
                fits[family] = fit
                n_fits += 1
                summary.append(
                    f"{kind},{split},{family},{fit.exponent:.6f},{fit.exponent_stderr:.6f},"
                    f"{fit.amplitude:.6g},{fit.r_squared:.6f},{fit.n_bins_used},"
                    f"{fit.estimator},ok\n")
            if all(f in fits for f in ("pap", "cit", "totcit")):
                try:
                    d = decompose_exponents(fits["pap"], fits["cit"], fits["totcit"])
                except ValueError:
                    continue
                decompositions.append(f"{kind},{split},{d.p_pap:.6f},{d.p_cit:.6f},"
                                      f"{d.p_totcit:.6f},{d.residual:+.6f}\n")

    (out / "fits_summary.csv").write_text(_SUMMARY_HEADER + "".join(summary), encoding="utf-8")
    (out / "decomposition.csv").write_text(
        "entities,split,p_pap,p_cit,p_totcit,residual\n" + "".join(decompositions),
        encoding="utf-8")
    write_manifest(out, "scaling", params)
    if n_fits == 0:
        raise InsufficientDataError("insufficient data: no index could be fitted "
                                    "(see fits_summary.csv)")
    print(f"{n_fits} fits written to {out}")
    return EXIT_OK


def _synth_config(params):
    try:
        return SynthConfig(**{k: params[k] for k in _SYNTH})
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(params):
    config = _synth_config(params)
    out = _outdir(params)
    synth = generate(config)
    with open(out / "corpus.jsonl", "w", encoding="utf-8", newline="\n") as fp:
        synth.write_corpus(fp, citations=params["citations"])
    if params["citations"] == "sidecar":
        _write(out / "citations.csv", lambda s, fp: s.write_sidecar(fp), synth)
    write_manifest(out, "simulate", params)
    print(f"{len(synth)} collaborations, {synth.n_papers} papers written to {out}")
    return EXIT_OK


def cmd_validate(params):
    config = _synth_config(params)
    out = _outdir(params)
    fit_args = {k: params[k] for k in _FIT}
    fit_args.update(tolerance=params["tolerance"],
                    totcit_tolerance=params["totcit_tolerance"])
    if params["through_files"]:
        synth = generate(config)
        with open(out / "corpus.jsonl", "w", encoding="utf-8", newline="\n") as fp:
            synth.write_corpus(fp, citations="sidecar")
        _write(out / "citations.csv", lambda s, fp: s.write_sidecar(fp), synth)
        corpus = load_corpus(out / "corpus.jsonl")
        index = load_citation_sidecar(out / "citations.csv", corpus)
        report = validate_profiles(config, collaboration_profiles(corpus, index, 1.0),
                                   **fit_args)
    else:
        report = run_validation(config, **fit_args)

    _write(out / "profiles_collaborations.csv", lambda t, fp: t.write_csv(fp),
           report.profiles)
    for family in INDEX_FAMILIES:
        _write(out / f"curve_synth_{family}.csv", lambda c, fp: c.write_csv(fp),
               report.curves[family])
        _write(out / f"fit_synth_{family}.csv", lambda f, fp: f.write_csv(fp),
               report.fits[family])
    _write(out / "deltas.csv", lambda r, fp: r.write_delta_csv(fp), report)
    d = report.decomposition
    (out / "decomposition.csv").write_text(
        "p_pap,p_cit,p_totcit,residual,tolerance,pass\n"
        f"{d.p_pap:.6f},{d.p_cit:.6f},{d.p_totcit:.6f},{d.residual:+.6f},"
        f"{d.tolerance:.6g},{'yes' if d.passed else 'no'}\n", encoding="utf-8")
    write_manifest(out, "validate", params)

    print(f"{'index':8s} {'fitted':>9s} {'theory':>9s} {'delta':>9s}  pass")
    for row in report.deltas:
        print(f"{row.family:8s} {row.fitted:9.4f} {row.theoretical:9.4f} "
              f"{row.delta:+9.4f}  {'yes' if row.passed else 'NO'}")
    print(f"p_totcit - (p_pap + p_cit) = {d.residual:+.4f}")
    if not (report.passed and d.passed):
        print("validation failed: exponent outside tolerance", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


_YLABELS = {"pap": "N_pap", "cit": "N_cit / N_pap", "totcit": "N_cit",
            "fcit": "N_fcit", "icit": "N_icit"}


def cmd_report(params):
    src = Path(params["input"])
    if not src.is_dir():
        raise FileNotFoundError(2, "not a directory", str(src))
    out = _outdir(params)
    written = 0
    for path in sorted(src.glob("curve_*.csv")):
        tag = path.stem[len("curve_"):]
        with open(path, encoding="utf-8") as fp:
            rows = read_curve_csv(fp)
        fit_path = src / f"fit_{tag}.csv"
        fit = None
        if fit_path.exists():
            with open(fit_path, encoding="utf-8") as fp:
                fit = read_fit_csv(fp)
        family = tag.rsplit("_", 1)[-1]
        xlabel = "<N_aut>" if tag.startswith("authors_") else "N_aut"
        try:
            svg = curve_svg(rows, fit, title=tag, xlabel=xlabel,
                            ylabel=_YLABELS.get(family, family))
        except ValueError as exc:
            log.warning("skipping %s: %s", path, exc)
            continue
        (out / f"{tag}.svg").write_text(svg, encoding="utf-8")
        written += 1
    for path in sorted(src.glob("histogram_*.csv")):
        with open(path, encoding="utf-8") as fp:
            rows = read_histogram_csv(fp)
        if rows:
            (out / f"{path.stem}.svg").write_text(histogram_svg(rows, title=path.stem),
                                                  encoding="utf-8")
            written += 1
    if written == 0:
        raise InsufficientDataError(f"no curve or histogram CSVs to render in {src}")
    write_manifest(out, "report", params)
    print(f"{written} plots written to {out}")
    return EXIT_OK


HANDLERS = {"ingest": cmd_ingest, "indices": cmd_indices, "scaling": cmd_scaling,
            "simulate": cmd_simulate, "validate": cmd_validate, "report": cmd_report}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        params = resolve_params(args.command, args)
        return HANDLERS[args.command](params)
    except UsageError as exc:
        print(f"collabmetrics {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        path = exc.filename if exc.filename is not None else ""
        print(f"error: {path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CorpusError, InsufficientDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
