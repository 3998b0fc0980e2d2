import csv
import hashlib
import random
from pathlib import Path

import pytest

from lifegrid.errors import (
    BadImage,
    BadMagic,
    BadHeader,
    DanglingReference,
    MalformedRow,
    MissingManifest,
    NonMonotonicTimestamps,
    TruncatedPixelData,
    UnsortedSamples,
    UnsupportedMaxval,
)
from lifegrid.ingest import (
    ConceptTaxonomy,
    FrameRecord,
    Raster,
    SensorSample,
    align_sensors,
    encode_ppm,
    load_dataset,
    parse_ppm,
)
from lifegrid.synth import generate_synthetic


# --- PPM ---------------------------------------------------------------------

def test_parse_ppm_1x1_red():
    r = parse_ppm(b"P6 1 1 255 " + bytes([255, 0, 0]))
    assert (r.width, r.height) == (1, 1)
    assert r.pixels == bytes([255, 0, 0])


def test_parse_ppm_bad_magic():
    with pytest.raises(BadMagic):
        parse_ppm(b"P5 1 1 255 \x00")


def test_parse_ppm_2x2_exact_bytes():
    # hand-constructed file, byte-level oracle
    pixels = bytes([0, 0, 0, 255, 255, 255, 10, 20, 30, 40, 50, 60])
    data = b"P6\n# a comment\n2 2\n255\n" + pixels
    r = parse_ppm(data)
    assert (r.width, r.height) == (2, 2)
    assert r.pixels == pixels


def test_parse_ppm_errors():
    with pytest.raises(UnsupportedMaxval):
        parse_ppm(b"P6 1 1 65535 " + bytes(6))
    with pytest.raises(TruncatedPixelData):
        parse_ppm(b"P6 2 2 255 " + bytes(5))
    with pytest.raises(BadHeader):
        parse_ppm(b"P6 x 1 255 ")
    with pytest.raises(BadHeader):
        parse_ppm(b"P6 0 1 255 ")


def test_ppm_round_trip():
    rng = random.Random(0)
    pixels = bytes(rng.randrange(256) for _ in range(5 * 3 * 3))
    r = Raster(width=5, height=3, pixels=pixels)
    assert parse_ppm(encode_ppm(r)) == r


# --- sensor alignment ----------------------------------------------------------

def _frames(*times):
    return [FrameRecord(day_id="d", index=i, timestamp_utc=t, tz_offset_min=0,
                        image_path="x") for i, t in enumerate(times)]


def _samples(*times):
    return [SensorSample(timestamp_utc=t, steps=i) for i, t in enumerate(times)]


def test_align_nearest_within_tolerance():
    out = align_sensors(_frames(100), _samples(80, 130))
    assert out[0].timestamp_utc == 80


def test_align_out_of_tolerance():
    out = align_sensors(_frames(100), _samples(200), tolerance_s=60)
    assert out == [None]


def test_align_tie_breaks_earlier():
    out = align_sensors(_frames(100), _samples(90, 110))
    assert out[0].timestamp_utc == 90
    # exhaustive check of the rule around the tie point
    for t in range(85, 116):
        got = align_sensors(_frames(t), _samples(90, 110))[0]
        want = 90 if abs(t - 90) <= abs(110 - t) else 110
        assert got.timestamp_utc == want


def test_align_duplicate_timestamps_deterministic():
    samples = [SensorSample(timestamp_utc=100, steps=1),
               SensorSample(timestamp_utc=100, steps=2)]
    out = align_sensors(_frames(101), samples)
    assert out[0].steps == 1
    # duplicating entries does not change the attachment
    out2 = align_sensors(_frames(101), samples + [SensorSample(timestamp_utc=100, steps=3)])
    assert out2[0].steps == 1


def test_align_idempotent_and_empty():
    frames = _frames(10, 50, 90)
    samples = _samples(0, 40, 80, 1000)
    first = align_sensors(frames, samples)
    assert align_sensors(frames, samples) == first
    assert align_sensors(frames, []) == [None, None, None]


def test_align_unsorted_rejected():
    with pytest.raises(UnsortedSamples):
        align_sensors(_frames(10), _samples(50, 40))


# --- taxonomy --------------------------------------------------------------------

def test_taxonomy_rejects_cycles_and_dangling():
    with pytest.raises(DanglingReference):
        ConceptTaxonomy(nodes=frozenset({"a", "b"}), parent={"a": "b", "b": "a"})
    with pytest.raises(DanglingReference):
        ConceptTaxonomy(nodes=frozenset({"a"}), parent={"a": "ghost"})


# --- load/generate round trip ------------------------------------------------------

def test_load_generate_round_trip(tmp_path):
    for seed in (1, 42, 99):
        out = tmp_path / f"s{seed}"
        summary = generate_synthetic(seed=seed, days=2, frames_per_day=50, out=out)
        store = load_dataset(out)
        assert len(store.days) == 2
        assert store.frame_count == 100
        assert sum(1 for d in store.days for dets in d.concepts for _ in dets) == summary.concept_rows
        assert sum(1 for d in store.days for recs in d.ocr for _ in recs) == summary.ocr_rows
        assert len(store.vectors) == summary.vector_rows
        for day in store.days:
            assert [f.index for f in day.frames] == list(range(len(day)))
            ts = [f.timestamp_utc for f in day.frames]
            assert all(b > a for a, b in zip(ts, ts[1:]))


def test_generator_deterministic(tmp_path):
    def tree_hash(root: Path) -> str:
        h = hashlib.sha256()
        for p in sorted(root.rglob("*")):
            if p.is_file():
                h.update(str(p.relative_to(root)).encode())
                h.update(p.read_bytes())
        return h.hexdigest()

    generate_synthetic(seed=7, days=2, frames_per_day=30, out=tmp_path / "a")
    generate_synthetic(seed=7, days=2, frames_per_day=30, out=tmp_path / "b")
    assert tree_hash(tmp_path / "a") == tree_hash(tmp_path / "b")


def test_generator_frame_gap_is_40s(tmp_path):
    generate_synthetic(seed=3, days=1, frames_per_day=20, out=tmp_path)
    store = load_dataset(tmp_path)
    ts = [f.timestamp_utc for f in store.days[0].frames]
    assert {b - a for a, b in zip(ts, ts[1:])} == {40}


def test_ground_truth_matches_image_scan(tmp_path):
    """The ground-truth boundary list must equal boundaries recovered by an
    independent scan of the generated images (mean-color jumps)."""
    summary = generate_synthetic(seed=7, days=1, frames_per_day=30, out=tmp_path)
    store = load_dataset(tmp_path)
    day = store.days[0]

    def mean_rgb(raster):
        px = raster.pixels
        n = len(px) // 3
        return tuple(sum(px[c::3]) / n for c in range(3))

    means = [mean_rgb(r) for r in day.rasters]
    scanned = [i for i in range(1, len(means))
               if max(abs(a - b) for a, b in zip(means[i - 1], means[i])) > 64]
    assert summary.boundaries[day.day_id] == scanned
    with (tmp_path / "ground_truth_shots.csv").open() as fh:
        rows = list(csv.reader(fh))[1:]
    assert [int(r[1]) for r in rows if r[0] == day.day_id] == scanned


def test_114_day_store(tmp_path):
    generate_synthetic(seed=5, days=114, frames_per_day=4, out=tmp_path,
                       width=8, height=8, with_vectors=False, task_count=0)
    store = load_dataset(tmp_path)
    assert len(store.days) == 114


def test_empty_manifest_gives_empty_store(tmp_path):
    (tmp_path / "frames.csv").write_text(
        "day_id,index,timestamp_utc,tz_offset_min,image_path\n")
    store = load_dataset(tmp_path)
    assert len(store.days) == 0
    assert store.frame_count == 0


# --- load errors ---------------------------------------------------------------------

def _write_min_dataset(root: Path, frame_rows: list[str]):
    root.mkdir(parents=True, exist_ok=True)
    (root / "images").mkdir(exist_ok=True)
    (root / "frames.csv").write_text(
        "day_id,index,timestamp_utc,tz_offset_min,image_path\n"
        + "".join(r + "\n" for r in frame_rows))
    img = encode_ppm(Raster(width=4, height=4, pixels=bytes(48)))
    (root / "images" / "f.ppm").write_bytes(img)


def test_missing_manifest(tmp_path):
    with pytest.raises(MissingManifest):
        load_dataset(tmp_path)


def test_malformed_row_reports_location(tmp_path):
    _write_min_dataset(tmp_path, ["d1,zero,100,0,images/f.ppm"])
    with pytest.raises(MalformedRow) as exc:
        load_dataset(tmp_path)
    assert exc.value.file == "frames.csv"
    assert exc.value.line == 2


def test_index_gap_rejected(tmp_path):
    _write_min_dataset(tmp_path, ["d1,0,100,0,images/f.ppm",
                                  "d1,2,140,0,images/f.ppm"])
    with pytest.raises(MalformedRow):
        load_dataset(tmp_path)


def test_non_monotonic_timestamps(tmp_path):
    _write_min_dataset(tmp_path, ["d1,0,100,0,images/f.ppm",
                                  "d1,1,100,0,images/f.ppm"])
    with pytest.raises(NonMonotonicTimestamps) as exc:
        load_dataset(tmp_path)
    assert exc.value.day_id == "d1"


def test_dangling_concept_reference(tmp_path):
    _write_min_dataset(tmp_path, ["d1,0,100,0,images/f.ppm"])
    (tmp_path / "taxonomy.csv").write_text("concept_id,parent_id\ndog,\n")
    (tmp_path / "concepts.csv").write_text(
        "day_id,frame_index,concept_id,confidence,bx,by,bw,bh\n"
        "d1,5,dog,0.9,,,,\n")
    with pytest.raises(DanglingReference):
        load_dataset(tmp_path)


def test_unknown_concept_id_rejected(tmp_path):
    _write_min_dataset(tmp_path, ["d1,0,100,0,images/f.ppm"])
    (tmp_path / "concepts.csv").write_text(
        "day_id,frame_index,concept_id,confidence,bx,by,bw,bh\n"
        "d1,0,ghost,0.9,,,,\n")
    with pytest.raises(DanglingReference):
        load_dataset(tmp_path)


def test_dangling_ocr_reference(tmp_path):
    _write_min_dataset(tmp_path, ["d1,0,100,0,images/f.ppm"])
    (tmp_path / "ocr.csv").write_text("day_id,frame_index,text\nd2,0,hello\n")
    with pytest.raises(DanglingReference):
        load_dataset(tmp_path)


def test_bad_image(tmp_path):
    _write_min_dataset(tmp_path, ["d1,0,100,0,images/f.ppm"])
    (tmp_path / "images" / "f.ppm").write_bytes(b"P6 4 4 255 \x00\x00")
    with pytest.raises(BadImage):
        load_dataset(tmp_path)


def test_vector_dimension_mismatch(tmp_path):
    _write_min_dataset(tmp_path, ["d1,0,100,0,images/f.ppm",
                                  "d1,1,140,0,images/f.ppm"])
    (tmp_path / "vectors.csv").write_text(
        "day_id,frame_index,v0,v1\nd1,0,1.0,0.0\nd1,1,1.0\n")
    with pytest.raises(MalformedRow):
        load_dataset(tmp_path)


def test_sidecars_fully_resolved(dataset_dir):
    """Every attached detection/OCR record points at its own frame."""
    store = load_dataset(dataset_dir)
    for day in store.days:
        for i in range(len(day)):
            for det in day.concepts[i]:
                assert det.day_id == day.day_id and det.frame_index == i
                assert det.concept_id in store.taxonomy
            for rec in day.ocr[i]:
                assert rec.day_id == day.day_id and rec.frame_index == i
