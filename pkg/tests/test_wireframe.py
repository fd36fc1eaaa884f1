import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import FIXTURES, TV
from tvcast.classify import classify_page
from tvcast.errors import DimensionMismatch, EmptyJudgments, ZeroLeaves
from tvcast.grouping import group_page
from tvcast.hierarchy import load_hierarchy
from tvcast.layout import layout_page
from tvcast.transform import ContentKind, build_tv_page
from tvcast.wireframe import (
    COLORS,
    Block,
    PixelClass,
    Wireframe,
    compute_miou,
    exact_match_rate,
    item_class,
    read_judgments,
    read_wf,
    reduced_ratio,
    render_wireframe,
    write_wf,
)

IMG, TXT = PixelClass.IMAGE, PixelClass.TEXT


def frame(*blocks, size=(100, 100)):
    return Wireframe.from_blocks(*size, [Block(*b) for b in blocks])


def golden_frame():
    tree = load_hierarchy(FIXTURES / "golden_home.xml")
    page = build_tv_page(classify_page(group_page(tree), tree.screen), tree.screen, TV)
    fitted, solution = layout_page(page)
    return render_wireframe(solution, fitted), solution


def test_area_fixture():
    a = frame((0, 0, 50, 100, IMG))
    b = frame((25, 0, 50, 100, IMG))
    report = compute_miou(a, b)
    # overlap 25x100, union 75x100; text is absent from both
    assert report.per_class["image"].iou == pytest.approx(1 / 3)
    assert not report.per_class["text"].present
    assert report.miou == pytest.approx(1 / 3, abs=1e-4)


def test_two_classes_average():
    a = frame((0, 0, 50, 50, IMG), (0, 50, 100, 50, TXT))
    b = frame((0, 0, 50, 50, IMG), (0, 50, 50, 50, TXT))
    report = compute_miou(a, b)
    assert report.per_class["image"].iou == 1.0
    assert report.per_class["text"].iou == pytest.approx(0.5)
    assert report.miou == pytest.approx(0.75)


def test_identical_frames_score_one():
    a = frame((10, 10, 30, 30, TXT))
    assert compute_miou(a, a).miou == 1.0


def test_empty_frames_score_one():
    assert compute_miou(frame(), frame()).miou == 1.0


def test_later_blocks_overwrite():
    f = frame((0, 0, 100, 100, IMG), (0, 0, 10, 10, TXT))
    assert f.count(TXT) == 100 and f.count(IMG) == 9900
    assert f.cells[5, 5] == TXT


def test_blocks_are_clamped():
    f = frame((-10, 90, 30, 30, IMG), (200, 200, 5, 5, TXT))
    assert f.count(IMG) == 20 * 10
    assert f.blocks == (Block(0, 90, 20, 10, IMG),)


def test_cells_are_read_only():
    f = frame((0, 0, 10, 10, IMG))
    with pytest.raises(ValueError):
        f.cells[0, 0] = 0


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compute_miou(frame(size=(100, 100)), frame(size=(100, 90)))


def test_svg_colors():
    svg = frame((0, 0, 10, 10, IMG), (20, 20, 10, 10, TXT)).to_svg()
    assert COLORS[IMG] == "#FF0000" and COLORS[TXT] == "#00FF00"
    assert 'fill="#FFFFFF"' in svg
    assert '<rect x="0" y="0" width="10" height="10" fill="#FF0000"/>' in svg
    assert '<rect x="20" y="20" width="10" height="10" fill="#00FF00"/>' in svg


def test_golden_render_is_deterministic():
    a, solution = golden_frame()
    b, _ = golden_frame()
    assert a == b and a.to_svg() == b.to_svg()
    assert (a.width, a.height) == (1920, 1080)
    assert len(a.blocks) == len(solution.items)


def test_wf_round_trip(tmp_path):
    f = frame((3, 4, 20, 7, IMG), (50, 60, 10, 10, TXT), size=(97, 61))
    path = tmp_path / "x.wf"
    write_wf(f, path)
    assert path.read_bytes()[:4] == b"WFRM"
    assert read_wf(path) == f


def test_wf_rejects_bad_data():
    good = frame((0, 0, 5, 5, IMG)).to_bytes()
    with pytest.raises(ValueError):
        Wireframe.from_bytes(b"XXXX" + good[4:])
    with pytest.raises(ValueError):
        Wireframe.from_bytes(good[:-1])
    with pytest.raises(ValueError):
        Wireframe.from_bytes(good[:6])


def test_item_class():
    assert item_class(ContentKind.ICON) is IMG
    assert item_class(ContentKind.PLAYER) is IMG
    assert item_class(ContentKind.TEXT) is TXT


def test_reduced_ratio():
    assert reduced_ratio(12, 4) == pytest.approx(2 / 3)
    assert reduced_ratio(5, 5) == 0.0
    with pytest.raises(ZeroLeaves):
        reduced_ratio(0, 0)
    with pytest.raises(ValueError):
        reduced_ratio(3, 4)


def test_golden_reduced_ratio():
    tree = load_hierarchy(FIXTURES / "golden_home.xml")
    result = group_page(tree)
    assert reduced_ratio(result.original_leaf_count, result.final_unit_count) == pytest.approx(20 / 25)


def test_exact_match_rate():
    assert exact_match_rate([True, True, True, False]) == 0.75
    with pytest.raises(EmptyJudgments):
        exact_match_rate([])


def test_read_judgments(tmp_path):
    path = tmp_path / "j.csv"
    path.write_text("page_id,group_id,match\np1,g0,1\np1,g1,0\n")
    assert read_judgments(path) == [("p1", "g0", True), ("p1", "g1", False)]
    path.write_text("page_id,group_id,match\np1,g0,yes\n")
    with pytest.raises(ValueError):
        read_judgments(path)
    path.write_text("page,match\np1,1\n")
    with pytest.raises(ValueError):
        read_judgments(path)


blocks = st.lists(
    st.tuples(st.integers(-20, 60), st.integers(-20, 60), st.integers(1, 50), st.integers(1, 50),
              st.sampled_from([IMG, TXT])),
    max_size=8,
)


@given(blocks)
def test_pixels_are_conserved(bs):
    f = frame(*bs, size=(64, 48))
    total = sum(f.count(c) for c in PixelClass)
    assert total == 64 * 48
    # brute force: paint each pixel with the last block covering it
    expect = np.zeros((48, 64), dtype=np.uint8)
    for x, y, w, h, c in bs:
        for yy in range(max(y, 0), min(y + h, 48)):
            for xx in range(max(x, 0), min(x + w, 64)):
                expect[yy, xx] = c
    assert np.array_equal(f.cells, expect)


@given(blocks, blocks)
def test_miou_is_symmetric_and_bounded(a, b):
    fa, fb = frame(*a), frame(*b)
    m1, m2 = compute_miou(fa, fb).miou, compute_miou(fb, fa).miou
    assert m1 == pytest.approx(m2) and 0.0 <= m1 <= 1.0
