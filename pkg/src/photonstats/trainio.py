"""Pulse-train persistence.

Two interchangeable on-disk forms, both round-tripping float64 values
losslessly:

* binary (extensions .pstn, .bin): a 64-byte header followed by the
  values as little-endian float64. Header layout (little-endian):

      bytes  0-3   magic "PSTN"
      bytes  4-7   format version (u32, currently 1)
      bytes  8-15  pulse count (u64)
      bytes 16-23  master seed (u64)
      bytes 24-39  16-byte spec digest
      bytes 40-63  zero padding

  The binary form keeps only the digest of the source spec; the full
  spec and transform history travel with the NDJSON form.

* NDJSON (extensions .ndjson, .jsonl): first line a meta record with the
  full spec serialization, seed, pulse count, and transform history,
  then one ``{"index": i, "value": v}`` record per pulse. Values are
  written with shortest-round-trip float repr, so reading restores the
  exact float64.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .errors import DataFormatError, ValidationError
from .sampler import PulseTrain
from .specs import DistributionSpec

MAGIC = b"PSTN"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQQ16s")
HEADER_SIZE = 64

BINARY_EXTENSIONS = (".pstn", ".bin")
NDJSON_EXTENSIONS = (".ndjson", ".jsonl")


def _spec_digest(train: PulseTrain) -> bytes:
    if train.spec is not None:
        return DistributionSpec.from_dict(train.spec).digest()
    if train.spec_digest is not None:
        return bytes.fromhex(train.spec_digest)
    return bytes(16)


def _history_digest(train: PulseTrain) -> bytes:
    # Transforms change the law; fold them into the stored digest so a
    # transformed train never masquerades as its source spec.
    digest = _spec_digest(train)
    if not train.history:
        return digest
    blob = json.dumps(train.history, sort_keys=True).encode()
    return hashlib.sha256(digest + blob).digest()[:16]


def format_for_path(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in BINARY_EXTENSIONS:
        return "binary"
    if suffix in NDJSON_EXTENSIONS:
        return "ndjson"
    raise ValidationError(
        f"cannot infer train format from extension {suffix!r}; use one of "
        f"{BINARY_EXTENSIONS + NDJSON_EXTENSIONS} or pass an explicit "
        "format", field="out")


def save_train(train: PulseTrain, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or format_for_path(path)
    if fmt == "binary":
        _save_binary(train, path)
    elif fmt == "ndjson":
        _save_ndjson(train, path)
    else:
        raise ValidationError(f"unknown train format {fmt!r}; expected "
                              "binary or ndjson", field="format")
    return path


def load_train(path) -> PulseTrain:
    path = Path(path)
    try:
        with open(path, "rb") as handle:
            head = handle.read(4)
    except OSError as exc:
        raise DataFormatError(f"cannot read train file {path}: {exc}")
    if head == MAGIC:
        return _load_binary(path)
    return _load_ndjson(path)


# -- binary --------------------------------------------------------------------

def _save_binary(train: PulseTrain, path: Path) -> None:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, train.pulse_count,
                          train.master_seed, _history_digest(train))
    header = header.ljust(HEADER_SIZE, b"\0")
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(train.values.astype("<f8").tobytes())


def _load_binary(path: Path) -> PulseTrain:
    with open(path, "rb") as handle:
        header = handle.read(HEADER_SIZE)
        if len(header) < HEADER_SIZE:
            raise DataFormatError(f"{path}: truncated header")
        magic, version, count, seed, digest = _HEADER.unpack(
            header[:_HEADER.size])
        if magic != MAGIC:
            raise DataFormatError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise DataFormatError(f"{path}: unsupported format version "
                                  f"{version}")
        payload = handle.read()
    expected = count * 8
    if len(payload) != expected:
        raise DataFormatError(f"{path}: expected {expected} value bytes, "
                              f"found {len(payload)}")
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return PulseTrain(values=values, spec=None, master_seed=seed,
                      spec_digest=digest.hex())


# -- ndjson --------------------------------------------------------------------

def _save_ndjson(train: PulseTrain, path: Path) -> None:
    meta = {"type": "meta", "format": "pulsetrain",
            "version": FORMAT_VERSION, "spec": train.spec,
            "master_seed": train.master_seed,
            "pulse_count": train.pulse_count, "history": train.history,
            "spec_digest": _history_digest(train).hex()}
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(meta, sort_keys=True) + "\n")
        for index, value in enumerate(train.values.tolist()):
            handle.write(f'{{"index":{index},"value":{value!r}}}\n')


def _load_ndjson(path: Path) -> PulseTrain:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            first = handle.readline()
            try:
                meta = json.loads(first)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}: not a pulse-train file "
                                      f"({exc})")
            if not isinstance(meta, dict) or meta.get("type") != "meta" \
                    or meta.get("format") != "pulsetrain":
                raise DataFormatError(f"{path}: missing pulse-train meta "
                                      "record")
            if meta.get("version") != FORMAT_VERSION:
                raise DataFormatError(f"{path}: unsupported format version "
                                      f"{meta.get('version')}")
            count = meta.get("pulse_count")
            if not isinstance(count, int) or count < 0:
                raise DataFormatError(f"{path}: bad pulse_count")
            values = np.empty(count, dtype=np.float64)
            for i in range(count):
                line = handle.readline()
                if not line:
                    raise DataFormatError(f"{path}: truncated at record "
                                          f"{i}")
                try:
                    record = json.loads(line)
                    if record["index"] != i:
                        raise DataFormatError(
                            f"{path}: record {i} has index "
                            f"{record['index']}")
                    values[i] = float(record["value"])
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise DataFormatError(f"{path}: bad record {i}: {exc}")
    except OSError as exc:
        raise DataFormatError(f"cannot read train file {path}: {exc}")
    except UnicodeDecodeError:
        raise DataFormatError(f"{path}: neither a binary nor an NDJSON "
                              "pulse train")
    return PulseTrain(values=values, spec=meta.get("spec"),
                      master_seed=meta.get("master_seed", 0),
                      history=list(meta.get("history", [])),
                      spec_digest=meta.get("spec_digest"))
