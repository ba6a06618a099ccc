from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest

from biqme.cli import Command, build_router, main
from biqme.imaging import load_image, save_image
from biqme.records import ManifestRecord
from biqme.trainset import write_manifest

from .synthetic import noisy, scene


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = main(list(argv), stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


def _images(directory, count=3, size=40):
    paths = []
    for index in range(count):
        path = directory / f"img{index}.png"
        save_image(scene(seed=index, size=size), path)
        paths.append(path)
    return paths


def test_router_knows_every_command():
    assert build_router().commands() == sorted(command.value for command in Command)


def test_cpcqi_of_identical_images_is_one(tmp_path):
    (path,) = _images(tmp_path, count=1)
    status, out, _ = _run("cpcqi", str(path), str(path))
    assert status == 0
    record = json.loads(out)
    assert record["record"] == "cpcqi"
    assert record["score"] == pytest.approx(1.0, abs=1e-12)


def test_features_over_a_directory(tmp_path):
    _images(tmp_path)
    status, out, _ = _run("features", str(tmp_path))
    assert status == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["path"] + [f"f{i:02d}" for i in range(1, 18)]
    assert len(rows) == 4
    assert [row[0] for row in rows[1:]] == [str(tmp_path / f"img{i}.png") for i in range(3)]
    assert all(np.isfinite(float(v)) for row in rows[1:] for v in row[1:])


def test_features_family_subset(tmp_path):
    _images(tmp_path, count=1)
    out_path = tmp_path / "features.csv"
    status, _, _ = _run("features", str(tmp_path / "img0.png"), "--families", "contrast", "--drop-skipped", "--out", str(out_path))
    assert status == 0
    with out_path.open(encoding="utf-8") as handle:
        header = next(csv.reader(handle))
    assert header == ["path", "f01", "f02", "f03", "f04"]


def test_unknown_family_is_a_usage_error(tmp_path):
    _images(tmp_path, count=1)
    status, _, err = _run("features", str(tmp_path), "--families", "loudness")
    assert status == 2
    assert err.splitlines()[-1].startswith("error code=200")


def test_missing_image_exit_status(tmp_path):
    missing = str(tmp_path / "absent.png")
    status, out, err = _run("cpcqi", missing, missing)
    assert status == 3
    assert out == ""
    assert err.splitlines()[-1].startswith("error code=300")


def test_boiem_requires_a_model(tmp_path):
    (path,) = _images(tmp_path, count=1)
    status, _, err = _run("enhance", str(path), "--out", str(tmp_path / "out"))
    assert status == 2
    assert "--model" in err.splitlines()[-1]


@pytest.mark.parametrize("method", ["agcwd", "rice"])
def test_fixed_enhancement_writes_image_and_sidecar(tmp_path, method):
    (path,) = _images(tmp_path, count=1)
    out_dir = tmp_path / "out"
    status, out, _ = _run("enhance", str(path), "--out", str(out_dir), "--method", method)
    assert status == 0
    sidecar = json.loads(out)
    assert sidecar["method"] == method
    enhanced = out_dir / "img0.enhanced.png"
    assert sidecar["output"] == str(enhanced)
    assert load_image(enhanced).shape == load_image(path).shape
    assert json.loads((out_dir / "img0.enhanced.json").read_text(encoding="utf-8")) == sidecar


def _write_mos(path, names, values):
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["image_path", "mos"])
        writer.writerows(zip(names, values))


def test_eval_perfect_ranking(tmp_path):
    names = [f"{i}.png" for i in range(25)]
    mos = np.linspace(1.0, 5.0, 25)
    _write_mos(tmp_path / "mos.csv", names, mos)
    with (tmp_path / "scores.csv").open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["path", "score"])
        writer.writerows(zip(names, 0.1 * mos))
    report_path = tmp_path / "report.json"
    status, out, _ = _run("eval", str(tmp_path / "scores.csv"), str(tmp_path / "mos.csv"), "--out", str(report_path))
    assert status == 0
    assert "1.000000" in next(line for line in out.splitlines() if line.startswith("SRC"))
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["n"] == 25
    assert report["krcc"] == pytest.approx(1.0)


def test_unwritable_report_is_a_file_error(tmp_path):
    names = [f"{i}.png" for i in range(10)]
    _write_mos(tmp_path / "mos.csv", names, range(10))
    with (tmp_path / "scores.csv").open("w", encoding="utf-8", newline="") as handle:
        handle.write("path,score\n" + "".join(f"{name},{i}\n" for i, name in enumerate(names)))
    report_path = tmp_path / "missing" / "report.json"
    status, _, err = _run("eval", str(tmp_path / "scores.csv"), str(tmp_path / "mos.csv"), "--out", str(report_path))
    assert status == 3
    assert err.splitlines()[-1].startswith("error code=306 kind=FileIOError")


def test_eval_refuses_training_sources(tmp_path):
    names = []
    for index in range(5):
        img = noisy(seed=index, size=32)
        save_image(img, tmp_path / f"{index}.png")
        names.append(f"{index}.png")
    _write_mos(tmp_path / "mos.csv", names, range(5))
    with (tmp_path / "scores.csv").open("w", encoding="utf-8", newline="") as handle:
        handle.write("path,score\n" + "".join(f"{name},{i}\n" for i, name in enumerate(names)))
    used = load_image(tmp_path / "3.png").content_hash()
    write_manifest(
        tmp_path / "train.manifest.jsonl",
        [ManifestRecord(row="3#original", source_path="3.png", source_hash=used, op="original", label=1.0)],
    )
    status, _, err = _run(
        "eval", str(tmp_path / "scores.csv"), str(tmp_path / "mos.csv"), "--train-manifest", str(tmp_path / "train.manifest.jsonl")
    )
    assert status == 4
    assert err.splitlines()[-1].startswith("error code=403")


@pytest.mark.slow
def test_generate_train_score_enhance(tmp_path):
    config = tmp_path / "biqme.conf"
    config.write_text("gen.synthetic_count = 6\ngen.synthetic_size = 40\nsvr.min_rows = 10\n", encoding="utf-8")
    common = ("--config", str(config), "--seed", "3")
    train_csv = tmp_path / "train.csv"
    model = tmp_path / "model.svr"

    status, _, _ = _run("gen", "--per-op", "1", "--out", str(train_csv), *common)
    assert status == 0
    with train_csv.open(encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 6 * 9
    assert len({row["group"] for row in rows}) == 6
    assert (tmp_path / "train.manifest.jsonl").is_file()

    status, out, _ = _run("train", str(train_csv), "--out", str(model), "--t", "16", "--k", "0.5", *common)
    assert status == 0
    report = json.loads(out)
    assert report["rows"] == 54
    assert report["support_vectors"] > 0
    assert len(report["self_predictions"]) == 54
    assert (tmp_path / "model.svr.report.json").is_file()

    (tmp_path / "images").mkdir()
    images = _images(tmp_path / "images", count=2)
    status, out, _ = _run("score", *map(str, images), "--model", str(model), "--jobs", "2", *common)
    assert status == 0
    scores = [json.loads(line) for line in out.splitlines()]
    assert [s["path"] for s in scores] == [str(p) for p in images]
    assert all(np.isfinite(s["score"]) for s in scores)

    status, out, _ = _run("validate", str(train_csv), "--iterations", "2", "--t", "16", "--k", "0.5", *common)
    assert status == 0
    assert out.splitlines()[1].startswith("median")

    status, out, _ = _run("enhance", str(images[0]), "--out", str(tmp_path / "enhanced"), "--model", str(model), *common)
    assert status == 0
    sidecar = json.loads(out)
    assert len(sidecar["evaluations"]) == 6
    assert sidecar["lambda_b"] in (0.3, 0.5, 0.7)
