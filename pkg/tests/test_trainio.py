import numpy as np
import pytest

import photonstats as ps
from photonstats.errors import DataFormatError, ValidationError
from photonstats.trainio import MAGIC, format_for_path


@pytest.fixture()
def train():
    t = ps.sample(ps.superbunched(7.0), 5000, 99)
    t = ps.apply_loss(t, 0.5)
    return t


def test_binary_roundtrip(tmp_path, train):
    path = tmp_path / "train.pstn"
    ps.save_train(train, path)
    loaded = ps.load_train(path)
    assert np.array_equal(loaded.values, train.values)
    assert loaded.master_seed == train.master_seed
    assert loaded.pulse_count == train.pulse_count
    assert loaded.spec is None  # binary keeps the digest only
    assert loaded.spec_digest is not None


def test_binary_file_layout(tmp_path, train):
    path = tmp_path / "train.bin"
    ps.save_train(train, path)
    blob = path.read_bytes()
    assert blob[:4] == MAGIC
    assert len(blob) == 64 + 8 * train.pulse_count


def test_binary_save_load_save_identical(tmp_path, train):
    first = tmp_path / "a.pstn"
    second = tmp_path / "b.pstn"
    ps.save_train(train, first)
    ps.save_train(ps.load_train(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_ndjson_roundtrip(tmp_path, train):
    path = tmp_path / "train.ndjson"
    ps.save_train(train, path)
    loaded = ps.load_train(path)
    assert np.array_equal(loaded.values, train.values)
    assert loaded.spec == train.spec
    assert loaded.history == train.history
    assert loaded.master_seed == train.master_seed


def test_ndjson_preserves_exact_floats(tmp_path):
    values = np.array([1.0 / 3.0, 1e-308, 6.02214076e23, -2.5])
    train = ps.PulseTrain(values=values, spec=None, master_seed=0)
    path = tmp_path / "t.jsonl"
    ps.save_train(train, path)
    assert np.array_equal(ps.load_train(path).values, values)


def test_format_by_extension(tmp_path, train):
    assert format_for_path("x.pstn") == "binary"
    assert format_for_path("x.ndjson") == "ndjson"
    with pytest.raises(ValidationError):
        format_for_path("x.csv")


def test_corrupt_magic_rejected(tmp_path, train):
    path = tmp_path / "train.pstn"
    ps.save_train(train, path)
    blob = bytearray(path.read_bytes())
    blob[:4] = b"XXXX"
    path.write_bytes(blob)
    # no longer binary; also fails the ndjson parse
    with pytest.raises(DataFormatError):
        ps.load_train(path)


def test_truncated_payload_rejected(tmp_path, train):
    path = tmp_path / "train.pstn"
    ps.save_train(train, path)
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(DataFormatError):
        ps.load_train(path)


def test_bad_version_rejected(tmp_path, train):
    path = tmp_path / "train.pstn"
    ps.save_train(train, path)
    blob = bytearray(path.read_bytes())
    blob[4] = 99
    path.write_bytes(blob)
    with pytest.raises(DataFormatError):
        ps.load_train(path)


def test_truncated_ndjson_rejected(tmp_path, train):
    path = tmp_path / "train.ndjson"
    ps.save_train(train, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:100]) + "\n")
    with pytest.raises(DataFormatError):
        ps.load_train(path)


def test_missing_file():
    with pytest.raises(DataFormatError):
        ps.load_train("/nonexistent/path/train.pstn")
