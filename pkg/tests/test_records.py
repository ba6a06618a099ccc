from __future__ import annotations

import io

import pytest

from biqme.errors import RecordError
from biqme.records import (
    CpcqiRecord,
    EnhanceSidecar,
    Evaluation,
    ManifestRecord,
    RecordType,
    ScoreRecord,
    decode_record,
    encode_record,
    iter_records,
    load_schema,
    parse_record,
    validate_record,
    write_records,
)


def test_every_record_type_has_a_schema():
    for record_type in RecordType:
        assert load_schema(record_type.value) is not None


def test_score_record_line():
    line = encode_record(ScoreRecord(path="a.png", score=0.5))
    assert line == b'{"record":"score","path":"a.png","score":0.5,"degenerate":false}\n'
    decoded = decode_record(line)
    assert isinstance(decoded, ScoreRecord)
    assert decoded.score == 0.5


def test_sidecar_keeps_evaluations():
    sidecar = EnhanceSidecar(
        input="in.png",
        output="out/in.enhanced.png",
        method="boiem",
        lambda_b=0.5,
        lambda_e=4.0,
        lambda_s=2.0,
        evaluations=[Evaluation(stage="brightness", params={"lambda_b": 0.5}, score=0.3)],
        config={"runtime.seed": 0},
    )
    decoded = decode_record(encode_record(sidecar))
    assert decoded == sidecar


def test_schema_rejects_bad_records():
    with pytest.raises(RecordError):
        validate_record({"record": "score", "path": "a.png"})
    with pytest.raises(RecordError):
        validate_record({"record": "cpcqi", "reference": "a", "distorted": "b", "score": -0.1})
    with pytest.raises(RecordError):
        validate_record({"record": "unknown"})
    with pytest.raises(RecordError):
        encode_record({"record": "score", "path": "a.png", "score": 1.0, "extra": 1})


def test_decode_rejects_malformed_lines():
    for line in (b"not json\n", b"[1, 2]\n", b'{"record": "score", "path": 3, "score": 1}\n'):
        with pytest.raises(RecordError):
            decode_record(line)


def test_non_finite_values_do_not_encode():
    with pytest.raises(RecordError):
        encode_record(CpcqiRecord(reference="a", distorted="b", score=float("nan")))


def test_parse_record_dispatches_on_type():
    record = parse_record(
        {"record": "manifest", "row": "s#original", "source_path": "s", "source_hash": "ab", "op": "original", "label": 1.0}
    )
    assert isinstance(record, ManifestRecord)
    with pytest.raises(RecordError):
        parse_record({"record": "nope"})


def test_stream_helpers():
    records = [ScoreRecord(path=f"{i}.png", score=float(i)) for i in range(3)]
    buffer = io.StringIO()
    write_records(buffer, records)
    lines = buffer.getvalue().encode("utf-8").splitlines(keepends=True)
    assert list(iter_records(iter(lines + [b"\n"]))) == records
