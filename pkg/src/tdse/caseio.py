"""Case file readers: canonical JSON schema plus a MATPOWER-like importer.

JSON is the round-trip format.  A plain case is::

    {"base_mva": 100.0, "slack_bus": 0,
     "buses": [{"id": 0, "base_kv": 132.0, "load_p": 0.1, ...}, ...],
     "branches": [{"from": 0, "to": 1, "r": 0.02, "x": 0.08, ...}, ...]}

An integrated case wraps a transmission case, a list of feeder cases, and
``boundary_links`` records ``{"transmission_bus": k, "feeder": i,
"substation_bus": s}`` (bus ids are the file-level external ids).  Unknown
fields are rejected in strict mode and warned about otherwise.
"""

from __future__ import annotations

import json
import re
import warnings
from pathlib import Path

from .errors import CaseFormatError, DuplicateBusIdError
from .network import (
    BoundaryLink,
    Branch,
    Bus,
    IntegratedCase,
    NetworkCase,
    to_common_per_unit,
)

_BUS_KEYS = {"id", "base_kv", "kind", "load_p", "load_q", "gen_p", "gen_q", "shunt_b"}
_BRANCH_KEYS = {"from", "to", "r", "x", "b_sh", "tap"}
_CASE_KEYS = {"base_mva", "slack_bus", "buses", "branches", "name"}
_INTEGRATED_KEYS = {"transmission", "feeders", "boundary_links", "name"}
_LINK_KEYS = {"transmission_bus", "feeder", "substation_bus"}


def _check_keys(obj: dict, allowed: set, where: str, strict: bool) -> None:
    unknown = set(obj) - allowed
    if unknown:
        msg = f"{where}: unknown fields {sorted(unknown)}"
        if strict:
            raise CaseFormatError(msg)
        warnings.warn(msg, stacklevel=3)


def _num(obj: dict, key: str, where: str, default=None):
    if key not in obj:
        if default is None:
            raise CaseFormatError(f"{where}: missing required field {key!r}")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise CaseFormatError(f"{where}: field {key!r} must be a number, got {val!r}")
    return val


def case_from_dict(data: dict, *, strict: bool = True, where: str = "case") -> NetworkCase:
    if not isinstance(data, dict):
        raise CaseFormatError(f"{where}: expected an object")
    _check_keys(data, _CASE_KEYS, where, strict)
    raw_buses = data.get("buses")
    raw_branches = data.get("branches")
    if not isinstance(raw_buses, list) or not raw_buses:
        raise CaseFormatError(f"{where}: 'buses' must be a non-empty list")
    if not isinstance(raw_branches, list):
        raise CaseFormatError(f"{where}: 'branches' must be a list")

    index: dict = {}
    buses = []
    for i, rec in enumerate(raw_buses):
        loc = f"{where}.buses[{i}]"
        _check_keys(rec, _BUS_KEYS, loc, strict)
        if "id" not in rec:
            raise CaseFormatError(f"{loc}: missing required field 'id'")
        ext = rec["id"]
        if ext in index:
            raise DuplicateBusIdError(f"{loc}: duplicate bus id {ext!r}")
        index[ext] = i
        kind = rec.get("kind")
        if kind is not None and kind not in ("master", "boundary", "slave"):
            raise CaseFormatError(f"{loc}: bad kind {kind!r}")
        buses.append(
            Bus(
                id=i,
                base_kv=float(_num(rec, "base_kv", loc)),
                kind=kind,
                load_p=float(_num(rec, "load_p", loc, 0.0)),
                load_q=float(_num(rec, "load_q", loc, 0.0)),
                gen_p=float(_num(rec, "gen_p", loc, 0.0)),
                gen_q=float(_num(rec, "gen_q", loc, 0.0)),
                shunt_b=float(_num(rec, "shunt_b", loc, 0.0)),
            )
        )

    branches = []
    for i, rec in enumerate(raw_branches):
        loc = f"{where}.branches[{i}]"
        _check_keys(rec, _BRANCH_KEYS, loc, strict)
        for key in ("from", "to"):
            if key not in rec:
                raise CaseFormatError(f"{loc}: missing required field {key!r}")
            if rec[key] not in index:
                raise CaseFormatError(f"{loc}: references unknown bus {rec[key]!r}")
        branches.append(
            Branch(
                from_bus=index[rec["from"]],
                to_bus=index[rec["to"]],
                r=float(_num(rec, "r", loc, 0.0)),
                x=float(_num(rec, "x", loc)),
                b_sh=float(_num(rec, "b_sh", loc, 0.0)),
                tap=float(_num(rec, "tap", loc, 1.0)),
            )
        )

    slack_ext = data.get("slack_bus")
    if slack_ext not in index:
        raise CaseFormatError(f"{where}: slack_bus {slack_ext!r} is not a bus id")
    case = NetworkCase(
        buses=tuple(buses),
        branches=tuple(branches),
        base_mva=float(_num(data, "base_mva", where)),
        slack_bus=index[slack_ext],
        name=str(data.get("name", "")),
        ext_ids=tuple(index),
    )
    case.validate()
    return case


def integrated_from_dict(data: dict, *, strict: bool = True) -> IntegratedCase:
    _check_keys(data, _INTEGRATED_KEYS, "integrated", strict)
    for key in ("transmission", "feeders", "boundary_links"):
        if key not in data:
            raise CaseFormatError(f"integrated: missing required field {key!r}")
    trans = case_from_dict(data["transmission"], strict=strict, where="transmission")
    feeders = [
        case_from_dict(rec, strict=strict, where=f"feeders[{i}]")
        for i, rec in enumerate(data["feeders"])
    ]
    links = []
    for i, rec in enumerate(data["boundary_links"]):
        loc = f"boundary_links[{i}]"
        if isinstance(rec, list):
            if len(rec) != 3:
                raise CaseFormatError(f"{loc}: expected [transmission_bus, feeder, substation_bus]")
            rec = dict(zip(("transmission_bus", "feeder", "substation_bus"), rec))
        _check_keys(rec, _LINK_KEYS, loc, strict)
        for key in _LINK_KEYS:
            if key not in rec:
                raise CaseFormatError(f"{loc}: missing required field {key!r}")
        fi = rec["feeder"]
        if not isinstance(fi, int) or not 0 <= fi < len(feeders):
            raise CaseFormatError(f"{loc}: feeder index {fi!r} out of range")
        feeder = feeders[fi]
        t_ext = dict((e, i) for i, e in enumerate(trans.ext_ids))
        f_ext = dict((e, i) for i, e in enumerate(feeder.ext_ids))
        if rec["transmission_bus"] not in t_ext:
            raise CaseFormatError(
                f"{loc}: transmission bus {rec['transmission_bus']!r} not in transmission case"
            )
        if rec["substation_bus"] not in f_ext:
            raise CaseFormatError(
                f"{loc}: substation bus {rec['substation_bus']!r} not in feeder {fi}"
            )
        links.append(
            BoundaryLink(
                transmission_bus=t_ext[rec["transmission_bus"]],
                feeder=fi,
                substation_bus=f_ext[rec["substation_bus"]],
            )
        )
    # harmonize every feeder onto the transmission base before composing
    harmonized = []
    for i, feeder in enumerate(feeders):
        link = next(l for l in links if l.feeder == i)
        boundary_kv = trans.buses[link.transmission_bus].base_kv
        harmonized.append(to_common_per_unit(feeder, boundary_kv, trans.base_mva))
    case = IntegratedCase(
        transmission=trans,
        feeders=tuple(harmonized),
        links=tuple(links),
        name=str(data.get("name", "")),
    )
    case.validate()
    return case


def load_case(path, format: str = "json", *, strict: bool = True) -> NetworkCase:
    """Read a plain network case from ``path``.

    ``format`` is ``"json"`` or ``"matpower_like"``.
    """
    path = Path(path)
    if format == "json":
        data = _read_json(path)
        return case_from_dict(data, strict=strict, where=str(path))
    if format == "matpower_like":
        return _load_matpower_like(path)
    raise CaseFormatError(f"unknown case format {format!r}")


def load_integrated(path, *, strict: bool = True) -> IntegratedCase:
    path = Path(path)
    data = _read_json(path)
    if "transmission" not in data:
        raise CaseFormatError(f"{path}: not an integrated case (no 'transmission' key)")
    return integrated_from_dict(data, strict=strict)


def is_integrated_file(path) -> bool:
    try:
        return "transmission" in _read_json(Path(path))
    except CaseFormatError:
        return False


def _read_json(path: Path) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise CaseFormatError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CaseFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise CaseFormatError(f"{path}: top level must be an object")
    return data


# MATPOWER column positions (0-based) for the columns we consume.
_BUS_I, _BUS_TYPE, _PD, _QD, _GS, _BS, _BASE_KV = 0, 1, 2, 3, 4, 5, 9
_GEN_BUS, _PG, _QG = 0, 1, 2
_F_BUS, _T_BUS, _BR_R, _BR_X, _BR_B, _TAP, _BR_STATUS = 0, 1, 2, 3, 4, 8, 10

_MATRIX_RE = re.compile(r"mpc\.(\w+)\s*=\s*\[(.*?)\];", re.S)
_SCALAR_RE = re.compile(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)\s*;")


def _load_matpower_like(path: Path) -> NetworkCase:
    """Convenience importer for MATPOWER-style .m case files.

    Understands ``mpc.baseMVA``, ``mpc.bus``, ``mpc.gen`` and ``mpc.branch``
    numeric blocks; everything else is ignored.
    """
    try:
        text = path.read_text()
    except OSError as exc:
        raise CaseFormatError(f"{path}: {exc}") from exc
    text = re.sub(r"%.*", "", text)
    scalar = _SCALAR_RE.search(text)
    if not scalar:
        raise CaseFormatError(f"{path}: missing mpc.baseMVA")
    base_mva = float(scalar.group(1))
    tables = {}
    for name, body in _MATRIX_RE.findall(text):
        rows = []
        for line in re.split(r"[;\n]", body):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split()])
            except ValueError as exc:
                raise CaseFormatError(f"{path}: bad row in mpc.{name}: {line!r}") from exc
        tables[name] = rows
    for required in ("bus", "branch"):
        if required not in tables:
            raise CaseFormatError(f"{path}: missing mpc.{required}")

    gen_p: dict[float, float] = {}
    gen_q: dict[float, float] = {}
    for row in tables.get("gen", []):
        gen_p[row[_GEN_BUS]] = gen_p.get(row[_GEN_BUS], 0.0) + row[_PG] / base_mva
        gen_q[row[_GEN_BUS]] = gen_q.get(row[_GEN_BUS], 0.0) + row[_QG] / base_mva

    index: dict[float, int] = {}
    buses = []
    slack = None
    for i, row in enumerate(tables["bus"]):
        ext = row[_BUS_I]
        if ext in index:
            raise DuplicateBusIdError(f"{path}: duplicate bus id {ext:g} in mpc.bus row {i}")
        index[ext] = i
        if int(row[_BUS_TYPE]) == 3:
            slack = i
        buses.append(
            Bus(
                id=i,
                base_kv=row[_BASE_KV],
                load_p=row[_PD] / base_mva,
                load_q=row[_QD] / base_mva,
                gen_p=gen_p.get(ext, 0.0),
                gen_q=gen_q.get(ext, 0.0),
                shunt_b=row[_BS] / base_mva,
            )
        )
    if slack is None:
        raise CaseFormatError(f"{path}: no slack (type 3) bus")

    branches = []
    for i, row in enumerate(tables["branch"]):
        if len(row) > _BR_STATUS and row[_BR_STATUS] == 0.0:
            continue
        for ext in (row[_F_BUS], row[_T_BUS]):
            if ext not in index:
                raise CaseFormatError(f"{path}: mpc.branch row {i} references unknown bus {ext:g}")
        tap = row[_TAP] if len(row) > _TAP and row[_TAP] != 0.0 else 1.0
        branches.append(
            Branch(
                from_bus=index[row[_F_BUS]],
                to_bus=index[row[_T_BUS]],
                r=row[_BR_R],
                x=row[_BR_X],
                b_sh=row[_BR_B],
                tap=tap,
            )
        )

    ext_ids = tuple(int(e) if float(e).is_integer() else e for e in index)
    case = NetworkCase(
        buses=tuple(buses),
        branches=tuple(branches),
        base_mva=base_mva,
        slack_bus=slack,
        name=path.stem,
        ext_ids=ext_ids,
    )
    case.validate()
    return case
