"""Canonical JSON persistence for equation bundles.

Every rational is written as an exact "p/q" string, never a float, and the
writer is canonical (sorted keys, fixed separators), so serializing the same
bundle twice gives byte-identical text and parse-then-serialize is the
identity on anything this module wrote.  Wall-clock timings are deliberately
not persisted: two builds of the same bundle must serialize identically.

Any malformed, incomplete, or wrong-version document raises FormatError;
the command-line layer maps that to its usage-error exit code.
"""

from __future__ import annotations

import json

from .errors import FormatError
from .patching import PatchSolution
from .pipeline import EquationBundle, VerificationReport
from .rational import Poly, Rat, RatFunc, rat, rat_str
from .rootdata import RootDatum
from .seeds import FAMILIES, LocalSeed
from .series import INF, TMatrix, TSeries
from .tower import ReconstructionResult

FORMAT_VERSION = 1

_CHECK_STATUSES = ("pass", "fail", "inconclusive", "info")


# ---------------------------------------------------------------------------
# encoding


def _enc_poly(p: Poly) -> list:
    return [rat_str(c) for c in p.coeffs]


def _enc_ratfunc(c: RatFunc) -> dict:
    # num over the materialized monic denominator; the factored split is an
    # arithmetic detail and is rebuilt from pole hints on load
    return {"num": _enc_poly(c.num), "den": _enc_poly(c.den)}


def _enc_tseries(s: TSeries) -> dict:
    return {
        "t_min": s.t_min,
        "prec": None if s.prec is INF else s.prec,
        "coeffs": [_enc_ratfunc(c) for c in s.coeffs],
    }


def _enc_tmatrix(m: TMatrix) -> dict:
    return {"entries": [[_enc_tseries(e) for e in row] for row in m.entries]}


def _enc_seed(s: LocalSeed) -> dict:
    return {
        "point": rat_str(s.q),
        "family": s.family,
        "root": list(s.root),
        "prec": s.prec,
        "f": _enc_tseries(s.f),
        "c": _enc_tseries(s.c),
        "Y_local": _enc_tmatrix(s.Y_local),
        "A_local": _enc_tmatrix(s.A_local),
    }


def _enc_reconstruction(r: ReconstructionResult) -> dict:
    return {
        "success": r.success,
        "degree_bounds": list(r.degree_bounds),
        "verified_order": r.verified_order,
        "numerator": None if r.numerator is None else [_enc_tseries(s) for s in r.numerator],
        "denominator": None if r.denominator is None else [_enc_tseries(s) for s in r.denominator],
    }


def _enc_report(rep: VerificationReport) -> dict:
    return {
        "checks": [
            {
                "name": c.name,
                "status": c.status,
                "verified_order": c.verified_order,
                "note": c.note,
            }
            for c in rep.checks
        ]
    }


def bundle_to_doc(bundle: EquationBundle) -> dict:
    """Plain-JSON document for a bundle, ready for the canonical writer."""
    label = bundle.group_label
    doc = {
        "format_version": FORMAT_VERSION,
        "group": {"type": label[:1], "rank": int(label[1:])},
        "points": [rat_str(p) for p in bundle.points],
        "precision": bundle.prec,
        "seeds": [_enc_seed(s) for s in bundle.seeds],
        "patch": {
            "achieved_order": bundle.patch.achieved_order,
            "Y": _enc_tmatrix(bundle.patch.Y),
            "Z": [_enc_tmatrix(z) for z in bundle.patch.Z],
        },
        "matrix_A": _enc_tmatrix(bundle.A),
        "reconstructions": [
            [_enc_reconstruction(r) for r in row] for row in bundle.reconstructions
        ],
        "report": _enc_report(bundle.report) if bundle.report is not None else None,
    }
    return doc


def dumps_bundle(bundle: EquationBundle) -> str:
    return json.dumps(bundle_to_doc(bundle), sort_keys=True, separators=(",", ":"))


def save_bundle(bundle: EquationBundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_bundle(bundle))
        fh.write("\n")


# ---------------------------------------------------------------------------
# decoding


def _need(doc: dict, key: str, kind, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field '{key}' in {where}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise FormatError(f"field '{key}' in {where} has the wrong type")
    return value


def _int_field(doc: dict, key: str, where: str) -> int:
    value = _need(doc, key, int, where)
    if isinstance(value, bool):
        raise FormatError(f"field '{key}' in {where} has the wrong type")
    return value


def _dec_rat(s, where: str) -> Rat:
    if not isinstance(s, str):
        raise FormatError(f"rational in {where} must be a 'p/q' string")
    try:
        return rat(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r} in {where}: {exc}") from exc


def _dec_poly(doc, where: str) -> Poly:
    if not isinstance(doc, list):
        raise FormatError(f"polynomial in {where} must be a coefficient list")
    return Poly([_dec_rat(c, where) for c in doc])


def _dec_ratfunc(doc, points, where: str) -> RatFunc:
    num = _dec_poly(_need(doc, "num", list, where), where)
    den = _dec_poly(_need(doc, "den", list, where), where)
    if den.is_zero:
        raise FormatError(f"zero denominator in {where}")
    return RatFunc(num, den, pole_hints=points)


def _dec_tseries(doc, points, where: str) -> TSeries:
    t_min = _int_field(doc, "t_min", where)
    prec = _need(doc, "prec", None, where)
    if prec is None:
        prec = INF
    elif not isinstance(prec, int) or isinstance(prec, bool):
        raise FormatError(f"field 'prec' in {where} has the wrong type")
    coeffs = _need(doc, "coeffs", list, where)
    return TSeries(t_min, [_dec_ratfunc(c, points, where) for c in coeffs], prec)


def _dec_tmatrix(doc, points, where: str) -> TMatrix:
    entries = _need(doc, "entries", list, where)
    if not entries or not all(isinstance(row, list) and row for row in entries):
        raise FormatError(f"matrix in {where} must have nonempty rows")
    width = len(entries[0])
    if any(len(row) != width for row in entries):
        raise FormatError(f"ragged matrix in {where}")
    return TMatrix(
        [[_dec_tseries(e, points, where) for e in row] for row in entries]
    )


def _dec_seed(doc, rd: RootDatum, points, where: str) -> LocalSeed:
    family = _need(doc, "family", str, where)
    if family not in FAMILIES:
        raise FormatError(f"unknown seed family {family!r} in {where}")
    root_doc = _need(doc, "root", list, where)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in root_doc):
        raise FormatError(f"seed root in {where} must be a list of integers")
    return LocalSeed(
        rd=rd,
        root=tuple(root_doc),
        family=family,
        q=_dec_rat(_need(doc, "point", str, where), where),
        prec=_int_field(doc, "prec", where),
        f=_dec_tseries(_need(doc, "f", dict, where), points, f"{where}.f"),
        c=_dec_tseries(_need(doc, "c", dict, where), points, f"{where}.c"),
        Y_local=_dec_tmatrix(_need(doc, "Y_local", dict, where), points, f"{where}.Y_local"),
        A_local=_dec_tmatrix(_need(doc, "A_local", dict, where), points, f"{where}.A_local"),
    )


def _dec_reconstruction(doc, points, where: str) -> ReconstructionResult:
    success = _need(doc, "success", bool, where)
    bounds = _need(doc, "degree_bounds", list, where)
    if len(bounds) != 2 or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in bounds
    ):
        raise FormatError(f"degree_bounds in {where} must be two integers")
    num_doc = _need(doc, "numerator", None, where)
    den_doc = _need(doc, "denominator", None, where)

    def cols(sub, name):
        if sub is None:
            return None
        if not isinstance(sub, list):
            raise FormatError(f"{name} in {where} must be a list or null")
        return [_dec_tseries(s, points, f"{where}.{name}") for s in sub]

    num = cols(num_doc, "numerator")
    den = cols(den_doc, "denominator")
    if success and (num is None or den is None):
        raise FormatError(f"successful reconstruction in {where} is missing its certificate")
    return ReconstructionResult(
        success=success,
        numerator=num,
        denominator=den,
        degree_bounds=tuple(bounds),
        verified_order=_int_field(doc, "verified_order", where),
    )


def _dec_report(doc, where: str) -> VerificationReport:
    rep = VerificationReport()
    for i, c in enumerate(_need(doc, "checks", list, where)):
        name = _need(c, "name", str, f"{where}.checks[{i}]")
        status = _need(c, "status", str, f"{where}.checks[{i}]")
        if status not in _CHECK_STATUSES:
            raise FormatError(f"unknown check status {status!r} in {where}")
        order = _need(c, "verified_order", None, f"{where}.checks[{i}]")
        if order is not None and (not isinstance(order, int) or isinstance(order, bool)):
            raise FormatError(f"bad verified_order in {where}.checks[{i}]")
        rep.add(name, status, order, _need(c, "note", str, f"{where}.checks[{i}]"))
    return rep


def doc_to_bundle(doc) -> EquationBundle:
    """Rebuild a bundle from a parsed document, validating the structure."""
    if not isinstance(doc, dict):
        raise FormatError("bundle document must be a JSON object")
    version = _int_field(doc, "format_version", "bundle")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version}, expected {FORMAT_VERSION}")

    group = _need(doc, "group", dict, "bundle")
    gtype = _need(group, "type", str, "group")
    rank = _int_field(group, "rank", "group")
    label = f"{gtype}{rank}"
    rd = RootDatum.from_label(label)

    points_doc = _need(doc, "points", list, "bundle")
    points = [_dec_rat(p, "points") for p in points_doc]

    seeds_doc = _need(doc, "seeds", list, "bundle")
    seeds = [
        _dec_seed(s, rd, points, f"seeds[{i}]") for i, s in enumerate(seeds_doc)
    ]

    patch_doc = _need(doc, "patch", dict, "bundle")
    z_doc = _need(patch_doc, "Z", list, "patch")
    patch = PatchSolution(
        Y=_dec_tmatrix(_need(patch_doc, "Y", dict, "patch"), points, "patch.Y"),
        Z=[_dec_tmatrix(z, points, f"patch.Z[{i}]") for i, z in enumerate(z_doc)],
        achieved_order=_int_field(patch_doc, "achieved_order", "patch"),
    )

    a_matrix = _dec_tmatrix(_need(doc, "matrix_A", dict, "bundle"), points, "matrix_A")

    recs_doc = _need(doc, "reconstructions", list, "bundle")
    recs = [
        [_dec_reconstruction(r, points, f"reconstructions[{i}][{j}]") for j, r in enumerate(row)]
        for i, row in enumerate(recs_doc)
    ]

    report_doc = _need(doc, "report", None, "bundle")
    report = None if report_doc is None else _dec_report(report_doc, "report")

    return EquationBundle(
        group_label=label,
        rd=rd,
        points=points,
        prec=_int_field(doc, "precision", "bundle"),
        seeds=seeds,
        patch=patch,
        A=a_matrix,
        reconstructions=recs,
        report=report,
    )


def loads_bundle(text: str) -> EquationBundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return doc_to_bundle(doc)


def load_bundle(path) -> EquationBundle:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read bundle file {path}: {exc}") from exc
    return loads_bundle(text)


# building blocks reused by other front-end documents (factor inputs, series files)
encode_series = _enc_tseries
decode_series = _dec_tseries
encode_matrix = _enc_tmatrix
decode_matrix = _dec_tmatrix
