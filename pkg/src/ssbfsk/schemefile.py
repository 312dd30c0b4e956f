"""JSON scheme documents: the on-disk description of one configuration.

Document keys: family, M, h, L, w, bt, Ts, samples_per_symbol, alphabet.
Unknown keys are rejected so typos fail loudly instead of being ignored.
"""

from __future__ import annotations

import json

from .modulator import CpmScheme
from .pulses import ConfigError, PulseSpec, make_pulse

SCHEME_KEYS = {"family", "M", "h", "L", "w", "bt", "Ts", "samples_per_symbol", "alphabet"}
DEFAULT_SPS = 64


def scheme_from_dict(doc: dict) -> CpmScheme:
    unknown = set(doc) - SCHEME_KEYS
    if unknown:
        raise ConfigError(f"unknown scheme keys: {sorted(unknown)}")
    missing = {"family", "M", "h", "L"} - set(doc)
    if missing:
        raise ConfigError(f"scheme document missing keys: {sorted(missing)}")
    spec = PulseSpec(family=doc["family"], L=doc["L"], w=doc.get("w", 0.0),
                     bt=doc.get("bt", 0.0), Ts=doc.get("Ts", 1.0))
    pulse = make_pulse(spec, doc.get("samples_per_symbol", DEFAULT_SPS))
    return CpmScheme(M=doc["M"], h=doc["h"], pulse=pulse,
                     alphabet=doc.get("alphabet", ""))


def scheme_to_dict(scheme: CpmScheme) -> dict:
    spec = scheme.pulse.spec
    return {"family": spec.family, "M": scheme.M, "h": scheme.h, "L": spec.L,
            "w": spec.w, "bt": spec.bt, "Ts": spec.Ts,
            "samples_per_symbol": scheme.pulse.samples_per_symbol,
            "alphabet": scheme.alphabet}


def load_scheme(path: str) -> CpmScheme:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid scheme JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"scheme file {path} must hold a JSON object")
    return scheme_from_dict(doc)


def save_scheme(scheme: CpmScheme, path: str):
    with open(path, "w") as fh:
        json.dump(scheme_to_dict(scheme), fh, indent=2)
        fh.write("\n")
