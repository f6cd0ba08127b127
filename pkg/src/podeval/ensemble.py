"""Winner-take-all selection across feature layers and cross-method comparison tables.

a90/95 values are held as signed time relative to the event (negative means
before it); reports print ``seconds_before = -a90_95``. An earlier reliable
prediction is better, so the winner is the most negative value.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

from .errors import DomainError, EmptyInput, KeyMismatch, ParseError

__all__ = [
    "STANDARD",
    "MODIFIED",
    "EXTERNAL",
    "METHODS",
    "CandidateResult",
    "ComparisonRow",
    "WinnerRow",
    "winner_take_all",
    "comparison_table",
    "winner_table",
    "read_manifest",
    "write_manifest",
    "format_comparison",
    "format_winners",
    "comparison_csv",
    "winners_csv",
]

STANDARD = "standard_hm"
MODIFIED = "modified_hm"
EXTERNAL = "external_a_vs_a"
METHODS = (EXTERNAL, STANDARD, MODIFIED)
METHOD_ALIASES = {"shm": STANDARD, "mhm": MODIFIED, "avsa": EXTERNAL, "a_vs_a": EXTERNAL,
                  STANDARD: STANDARD, MODIFIED: MODIFIED, EXTERNAL: EXTERNAL}
SHORT_NAMES = {EXTERNAL: "a_vs_a", STANDARD: "SHM", MODIFIED: "MHM"}
DEFAULT_TIE_TOL = 1e-3


def _layer_key(layer):
    text = str(layer)
    return (0, int(text), "") if text.isdigit() else (1, 0, text)


def _sorted_layers(layers):
    return tuple(sorted(set(map(str, layers)), key=_layer_key))


def _fmt(value):
    if value is None:
        return ""
    return f"{round(value, 9) + 0.0:.10g}"


@dataclass(frozen=True)
class CandidateResult:
    classifier_id: str
    layer_id: str
    a90_95: float | None
    method: str
    fap: float | None = None
    driver_id: str = ""
    tied_layers: tuple = ()
    pool_layers: tuple = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        object.__setattr__(self, "classifier_id", str(self.classifier_id))
        object.__setattr__(self, "layer_id", str(self.layer_id))
        object.__setattr__(self, "driver_id", str(self.driver_id))

    @classmethod
    def from_seconds_before(cls, classifier_id, layer_id, seconds, method, **kw):
        a = None if seconds is None else 0.0 - float(seconds)
        return cls(classifier_id, layer_id, a, method, **kw)

    @property
    def seconds_before(self):
        return None if self.a90_95 is None else 0.0 - self.a90_95

    @property
    def layer_label(self):
        tied = self.tied_layers or (self.layer_id,)
        pool = self.pool_layers or (self.layer_id,)
        if len(tied) > 1 and set(tied) == set(pool):
            return "All"
        return "&".join(tied)


def winner_take_all(candidates, method=None, tie_tol=DEFAULT_TIE_TOL) -> CandidateResult:
    """Candidate with the earliest reliable prediction.

    Values within ``tie_tol`` seconds of the best are tied; the lowest layer
    id among them is returned and all of them are recorded in
    ``tied_layers``. Absent values lose to any present one; if every value
    is absent the result is absent with every layer tied.
    """
    candidates = list(candidates)
    if not candidates:
        raise EmptyInput("no candidates")
    methods = {c.method for c in candidates}
    if method is not None and methods != {method}:
        raise DomainError(f"all candidates must use method {method!r}, got {sorted(methods)}")
    if len(methods) > 1:
        raise DomainError(f"candidates mix methods {sorted(methods)}")
    pool = _sorted_layers(l for c in candidates for l in (c.pool_layers or (c.layer_id,)))
    present = [c for c in candidates if c.a90_95 is not None]
    if present:
        best = min(c.a90_95 for c in present)
        tied = [c for c in present if c.a90_95 <= best + tie_tol]
    else:
        tied = candidates
    tied_layers = _sorted_layers(l for c in tied for l in (c.tied_layers or (c.layer_id,)))
    winner = min(tied, key=lambda c: (_layer_key(c.layer_id), c.a90_95 if c.a90_95 is not None else 0.0))
    if not present:
        winner = replace(winner, a90_95=None)
    return replace(winner, tied_layers=tied_layers, pool_layers=pool)


# ---------------------------------------------------------------------------
# comparison across methods


def _check_unique(results):
    seen = set()
    for r in results:
        key = (r.classifier_id, r.layer_id, r.driver_id, r.method)
        if key in seen:
            raise DomainError(f"duplicate result for {key}")
        seen.add(key)


def _row_key(key):
    classifier, layer, driver = key
    return classifier, _layer_key(layer), _layer_key(driver)


@dataclass(frozen=True)
class ComparisonRow:
    classifier_id: str
    layer_id: str
    driver_id: str
    seconds: dict
    diff_standard: float | None
    diff_modified: float | None
    flagged: bool


def comparison_table(results):
    """One row per (classifier, layer, driver) with each method's a90/95.

    When the external reference method is present, absolute differences to
    the standard and modified results are added; ``flagged`` marks rows
    where the modified result is farther from the reference than the
    standard one. Absent values count as 0 s before the event.
    """
    results = list(results)
    if not results:
        raise EmptyInput("no results")
    _check_unique(results)
    methods = [m for m in METHODS if any(r.method == m for r in results)]
    table = {}
    for r in results:
        table.setdefault((r.classifier_id, r.layer_id, r.driver_id), {})[r.method] = r
    missing = [key for key, row in table.items() if set(row) != set(methods)]
    if missing:
        raise KeyMismatch(f"{len(missing)} rows lack some methods: "
                          + ", ".join("/".join(k) for k in sorted(missing, key=_row_key)), missing)
    rows = []
    for key in sorted(table, key=_row_key):
        row = table[key]
        seconds = {m: (row[m].seconds_before or 0.0) for m in methods}
        diff_s = diff_m = None
        if EXTERNAL in seconds and STANDARD in seconds:
            diff_s = round(abs(seconds[EXTERNAL] - seconds[STANDARD]), 9)
        if EXTERNAL in seconds and MODIFIED in seconds:
            diff_m = round(abs(seconds[EXTERNAL] - seconds[MODIFIED]), 9)
        flagged = diff_s is not None and diff_m is not None and diff_m > diff_s
        rows.append(ComparisonRow(*key, seconds, diff_s, diff_m, flagged))
    return rows


@dataclass(frozen=True)
class WinnerRow:
    classifier_id: str
    driver_id: str
    winners: dict
    fap: float | None


def winner_table(results, tie_tol=DEFAULT_TIE_TOL):
    """Winner-take-all over layers for every (classifier, driver, method).

    The FAP column is taken from the modified hit/miss winner when it has
    one, otherwise from any candidate of that classifier that carries it.
    """
    results = list(results)
    if not results:
        raise EmptyInput("no results")
    _check_unique(results)
    groups = {}
    for r in results:
        groups.setdefault((r.classifier_id, r.driver_id), {}).setdefault(r.method, []).append(r)
    faps = {}
    for r in results:
        if r.fap is not None:
            faps.setdefault(r.classifier_id, r.fap)
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], _layer_key(k[1]))):
        winners = {m: winner_take_all(groups[key][m], m, tie_tol)
                   for m in METHODS if m in groups[key]}
        fap = None
        if MODIFIED in winners and winners[MODIFIED].fap is not None:
            fap = winners[MODIFIED].fap
        else:
            fap = faps.get(key[0])
        rows.append(WinnerRow(key[0], key[1], winners, fap))
    return rows


# ---------------------------------------------------------------------------
# rendering


def _comparison_columns(rows):
    methods = [m for m in METHODS if rows and m in rows[0].seconds]
    header = ["classifier", "layer", "driver"] + [SHORT_NAMES[m] for m in methods]
    if rows and rows[0].diff_standard is not None:
        header.append("diff_a_vs_a_SHM")
    if rows and rows[0].diff_modified is not None:
        header.append("diff_a_vs_a_MHM")
    if rows and rows[0].diff_standard is not None and rows[0].diff_modified is not None:
        header.append("flag")
    body = []
    for r in rows:
        line = [r.classifier_id, r.layer_id, r.driver_id] + [_fmt(r.seconds[m]) for m in methods]
        if r.diff_standard is not None:
            line.append(_fmt(r.diff_standard))
        if r.diff_modified is not None:
            line.append(_fmt(r.diff_modified))
        if r.diff_standard is not None and r.diff_modified is not None:
            line.append("1" if r.flagged else "0")
        body.append(line)
    return header, body


def _winner_columns(rows):
    methods = [m for m in METHODS if any(m in r.winners for r in rows)]
    header = ["classifier", "driver"]
    header += [f"{SHORT_NAMES[m]}_a90_95" for m in methods]
    header += [f"{SHORT_NAMES[m]}_layer" for m in methods]
    header.append("fap")
    body = []
    for r in rows:
        values, layers = [], []
        for m in methods:
            w = r.winners.get(m)
            values.append("" if w is None else _fmt(w.seconds_before or 0.0))
            layers.append("" if w is None else w.layer_label)
        fap = "" if r.fap is None else f"{r.fap:.4g}"
        body.append([r.classifier_id, r.driver_id] + values + layers + [fap])
    return header, body


def _csv_text(header, body):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(body)
    return buf.getvalue()


def _aligned(header, body):
    widths = [max(len(str(row[i])) for row in [header] + body) for i in range(len(header))]
    lines = ["  ".join(str(v).rjust(w) for v, w in zip(row, widths)) for row in [header] + body]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def comparison_csv(rows):
    return _csv_text(*_comparison_columns(rows))


def format_comparison(rows):
    return _aligned(*_comparison_columns(rows))


def winners_csv(rows):
    return _csv_text(*_winner_columns(rows))


def format_winners(rows):
    return _aligned(*_winner_columns(rows))


# ---------------------------------------------------------------------------
# manifest I/O

MANIFEST_HEADER = ["classifier", "layer", "driver", "method", "a90_95", "fap"]


def read_manifest(path):
    """Read per-method results; ``a90_95`` is seconds before the event, blank if absent."""
    results = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInput(f"{path}: empty manifest")
        if [h.strip() for h in header] != MANIFEST_HEADER:
            raise ParseError(f"expected header {','.join(MANIFEST_HEADER)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise ParseError(f"expected {len(MANIFEST_HEADER)} fields, got {len(row)}", line=lineno)
            classifier, layer, driver, method, value, fap = (c.strip() for c in row)
            if method not in METHOD_ALIASES:
                raise ParseError(f"unknown method {method!r}", line=lineno)
            try:
                seconds = float(value) if value else None
                fap_value = float(fap) if fap else None
            except ValueError:
                raise ParseError(f"non-numeric value in {row!r}", line=lineno) from None
            results.append(CandidateResult.from_seconds_before(
                classifier, layer, seconds, METHOD_ALIASES[method], fap=fap_value, driver_id=driver))
    if not results:
        raise EmptyInput(f"{path}: no rows")
    return results


def write_manifest(results, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for r in results:
            writer.writerow([r.classifier_id, r.layer_id, r.driver_id, r.method,
                             _fmt(r.seconds_before), "" if r.fap is None else repr(r.fap)])
