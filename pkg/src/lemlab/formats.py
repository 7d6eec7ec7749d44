"""Text formats: complex numbers as ``a+bi``, polynomial coefficient strings,
region / condenser / sweep-config files (YAML documents), and the stable
key=value record used for verification reports."""

from __future__ import annotations

import hashlib

import numpy as np
import yaml

from .errors import FormatError
from .polynomial import Polynomial
from . import region as reg

_FLOAT_CHARS = set("0123456789.eE")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` / ``a-bi`` / ``a`` / ``bi`` (also bare ``i``, ``-i``)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise FormatError("empty complex literal")
    try:
        if not s.endswith("i"):
            return complex(float(s), 0.0)
        body = s[:-1]
        # split at the last +/- that is not an exponent sign and not leading
        split = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                split = k
                break
        if split is None:
            imag = body
            real = "0"
        else:
            real = body[:split]
            imag = body[split:]
        if imag in ("", "+"):
            im = 1.0
        elif imag == "-":
            im = -1.0
        else:
            im = float(imag)
        return complex(float(real) if real else 0.0, im)
    except ValueError as exc:
        raise FormatError(f"bad complex literal {text!r}") from exc


def format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_polynomial(text: str) -> Polynomial:
    """Comma-separated complex coefficients, low-to-high degree."""
    parts = [p for p in text.strip().split(",") if p.strip()]
    if not parts:
        raise FormatError("empty polynomial literal")
    return Polynomial(tuple(parse_complex(p) for p in parts))


def format_polynomial(p: Polynomial) -> str:
    return ",".join(format_complex(c) for c in p.coeffs)


# ---------------------------------------------------------------------------
# Region documents


def region_to_dict(K: reg.Region) -> dict:
    if isinstance(K, reg.Disc):
        return {"type": "disc", "center": format_complex(K.center), "radius": float(K.radius)}
    if isinstance(K, reg.Annulus):
        return {
            "type": "annulus",
            "center": format_complex(K.center),
            "r_in": float(K.r_in),
            "r_out": float(K.r_out),
        }
    if isinstance(K, reg.Polygon):
        return {"type": "polygon", "vertices": [format_complex(v) for v in K.vertices]}
    if isinstance(K, reg.Sublevel):
        return {"type": "sublevel", "poly": format_polynomial(K.poly), "x": float(K.x)}
    if isinstance(K, reg.Preimage):
        return {"type": "preimage", "poly": format_polynomial(K.poly), "inner": region_to_dict(K.inner)}
    if isinstance(K, reg.UnionRegion):
        return {"type": "union", "parts": [region_to_dict(part) for part in K.parts]}
    if isinstance(K, reg.PixelMask):
        return {
            "type": "mask",
            "origin": format_complex(K.origin),
            "h": float(K.h),
            "bits": K.bits.astype(int).tolist(),
        }
    raise FormatError(f"unknown region variant {type(K).__name__}")


def _need(doc: dict, field: str):
    if field not in doc:
        raise FormatError(f"region document missing field {field!r}")
    return doc[field]


def region_from_dict(doc) -> reg.Region:
    if not isinstance(doc, dict):
        raise FormatError("region document must be a mapping")
    kind = _need(doc, "type")
    try:
        if kind == "disc":
            return reg.Disc(parse_complex(str(_need(doc, "center"))), float(_need(doc, "radius")))
        if kind == "annulus":
            return reg.Annulus(
                parse_complex(str(_need(doc, "center"))),
                float(_need(doc, "r_in")),
                float(_need(doc, "r_out")),
            )
        if kind == "polygon":
            verts = _need(doc, "vertices")
            return reg.Polygon(tuple(parse_complex(str(v)) for v in verts))
        if kind == "sublevel":
            return reg.Sublevel(parse_polynomial(str(_need(doc, "poly"))), float(_need(doc, "x")))
        if kind == "preimage":
            return reg.Preimage(
                parse_polynomial(str(_need(doc, "poly"))), region_from_dict(_need(doc, "inner"))
            )
        if kind == "union":
            return reg.UnionRegion(tuple(region_from_dict(d) for d in _need(doc, "parts")))
        if kind == "mask":
            bits = np.asarray(_need(doc, "bits"), dtype=bool)
            return reg.PixelMask(
                parse_complex(str(_need(doc, "origin"))), float(_need(doc, "h")), bits
            )
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad value in region field for type {kind!r}: {exc}") from exc
    raise FormatError(f"unknown region type {kind!r}")


def load_region(path: str) -> reg.Region:
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise FormatError(f"unparseable region file {path}: {exc}") from exc
    return region_from_dict(doc)


def dump_region(K: reg.Region, path: str) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(region_to_dict(K), fh, sort_keys=True)


def load_condenser(path: str):
    from .capacity import Condenser

    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise FormatError(f"unparseable condenser file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("condenser document must be a mapping")
    if "E" not in doc:
        raise FormatError("condenser document missing field 'E'")
    if "B" not in doc:
        raise FormatError("condenser document missing field 'B'")
    return Condenser(region_from_dict(doc["E"]), region_from_dict(doc["B"]))


# ---------------------------------------------------------------------------
# Stable report records and digests


def report_record(rep) -> str:
    """One-line key=value record with a stable field order."""
    fields = [
        ("statement_id", rep.statement_id),
        ("lhs", repr(rep.lhs)),
        ("rhs", repr(rep.rhs)),
        ("lhs_err", repr(rep.lhs_err)),
        ("rhs_err", repr(rep.rhs_err)),
        ("margin", repr(rep.margin)),
        ("verdict", rep.verdict),
        ("seed", str(rep.seed)),
        ("inputs_digest", rep.inputs_digest),
    ]
    return " ".join(f"{k}={v}" for k, v in fields)


def digest(*parts) -> str:
    """Short stable digest of heterogeneous inputs (for report provenance)."""
    chunks = []
    for p in parts:
        if isinstance(p, Polynomial):
            chunks.append(format_polynomial(p))
        elif isinstance(
            p,
            (reg.Disc, reg.Annulus, reg.Polygon, reg.Sublevel, reg.Preimage, reg.UnionRegion, reg.PixelMask),
        ):
            chunks.append(yaml.safe_dump(region_to_dict(p), sort_keys=True))
        elif isinstance(p, float):
            chunks.append(repr(p))
        else:
            chunks.append(str(p))
    h = hashlib.sha256("|".join(chunks).encode()).hexdigest()
    return h[:12]
