import random
import re

import pytest

from helpers import FIXTURES, frame, image, node, text, tree_of
from tvcast.classify import (
    AttributePredicate,
    PhoneGroupCategory as P,
    TemplateCatalog,
    TemplateSpec,
    classify_page,
    load_templates,
    match_template,
    parse_templates,
)
from tvcast.errors import ConfigError
from tvcast.grouping import ComponentGroup, GroupingResult, GroupKind, group_page
from tvcast.hierarchy import ScreenInfo, load_hierarchy, parse_hierarchy

CATALOG = load_templates()


def categories(tree):
    return [c.category for c in classify_page(group_page(tree), tree.screen, CATALOG)]


def single(tree):
    (c,) = categories(tree)
    return c


def test_golden_sequence():
    tree = load_hierarchy(FIXTURES / "golden_home.xml")
    assert categories(tree) == [P.SEARCH, P.TOP_TAB_LAYOUT, P.BIG_PIC, P.PIC_INFO, P.BOTTOM_TAB_LAYOUT]


def test_list_page():
    tree = load_hierarchy(FIXTURES / "list_page.xml")
    assert categories(tree) == [P.TOOL_BAR, P.LIST_VIEW]


def test_top_tabs():
    tabs = frame((0, 200, 1080, 300), *[text((i * 270, 210, i * 270 + 250, 290), f"T{i}") for i in range(4)],
                 cls="android.app.ActionBar$Tab", rid="tabs")
    assert single(tree_of(tabs)) is P.TOP_TAB_LAYOUT


def test_search_row():
    row = frame((0, 100, 1080, 220),
                node("android.widget.EditText", (20, 120, 900, 200), rid="searchText"),
                node("android.widget.Button", (920, 120, 1060, 200), rid="searchBtn"),
                rid="search_container")
    assert single(tree_of(row)) is P.SEARCH


def test_big_picture():
    assert single(tree_of(image((0, 600, 1080, 1200)))) is P.BIG_PIC


def test_plain_text_is_others():
    tree = tree_of(text((300, 1000, 700, 1060), "hello"))
    (c,) = classify_page(group_page(tree), tree.screen, CATALOG)
    assert c.category is P.OTHERS
    assert max(c.scores.values()) <= CATALOG.threshold


def test_side_nav():
    drawer = frame((0, 0, 240, 1920), *[text((20, 100 + i * 120, 220, 180 + i * 120), f"item{i}") for i in range(5)],
                   cls="com.google.android.material.navigation.NavigationView", rid="nav_view")
    tree = tree_of(drawer)
    assert set(categories(tree)) == {P.SIDE_NAV}


def test_video_player():
    player = node("android.widget.VideoView", (0, 300, 1080, 907), rid="video_player")
    assert single(tree_of(player)) is P.VIDEO_MUSIC_PLAYER


def test_short_video_player():
    player = node("android.widget.VideoView", (0, 0, 1080, 1800), rid="short_clip")
    assert single(tree_of(player)) is P.SHORT_VIDEO_PLAYER


def test_pic_side_info():
    row = frame((0, 800, 1080, 1100), image((20, 820, 400, 1080)), text((440, 840, 1060, 900), "Title"),
                text((440, 960, 1060, 1010), "by someone"))
    assert single(tree_of(row)) is P.PIC_SIDE_INFO


def test_icon_info():
    icons = frame((0, 800, 1080, 1000), *[
        frame((x, 800, x + 200, 1000), image((x + 50, 810, x + 150, 910)), text((x, 920, x + 200, 970), f"app{x}"))
        for x in (0, 270, 540, 810)
    ])
    assert single(tree_of(icons)) is P.ICON_INFO


def test_empty_result():
    assert classify_page(GroupingResult([], [], 0, 0, ScreenInfo(1080, 1920))) == []


def test_totality_and_fallback():
    tree = load_hierarchy(FIXTURES / "golden_home.xml")
    result = group_page(tree)
    out = classify_page(result, tree.screen, CATALOG)
    assert len(out) == len(result.groups) + len(result.ungrouped)
    for c in out:
        assert (c.category is P.OTHERS) == (max(c.scores.values()) <= CATALOG.threshold)
        if c.category is not P.OTHERS:
            assert c.matched_attribute_count == c.scores[c.category.value]


def _scale(xml: str, k: int) -> str:
    return re.sub(r"\[(\d+),(\d+)\]", lambda m: f"[{int(m[1]) * k},{int(m[2]) * k}]", xml)


@pytest.mark.parametrize("name", ["golden_home.xml", "list_page.xml"])
@pytest.mark.parametrize("k", [2, 3])
def test_scale_invariance(name, k):
    xml = (FIXTURES / name).read_text()
    base = parse_hierarchy(xml)
    scaled = parse_hierarchy(_scale(xml, k))
    assert scaled.screen.width_px == base.screen.width_px * k
    # group membership in index terms must match too for the comparison to be meaningful
    assert categories(scaled) == categories(base)


def test_ties_follow_priority_order():
    preds = (AttributePredicate("has_image"), AttributePredicate("big_image"), AttributePredicate("no_side_text"))
    templates = (TemplateSpec(P.PIC_INFO, preds), TemplateSpec(P.BIG_PIC, preds))
    tree = tree_of(image((0, 600, 1080, 1200)))
    group = ComponentGroup(members=tree.leaves(), kind=GroupKind.SINGLETON)
    assert match_template(group, templates, 2, screen=tree.screen).category is P.PIC_INFO
    assert match_template(group, templates[::-1], 2, screen=tree.screen).category is P.BIG_PIC


def test_threshold_is_strict():
    preds = (AttributePredicate("has_image"), AttributePredicate("big_image"))
    tree = tree_of(image((0, 600, 1080, 1200)))
    group = ComponentGroup(members=tree.leaves(), kind=GroupKind.SINGLETON)
    c = match_template(group, (TemplateSpec(P.BIG_PIC, preds),), 2, screen=tree.screen)
    assert c.matched_attribute_count == 2 and c.category is P.OTHERS
    c = match_template(group, (TemplateSpec(P.BIG_PIC, preds),), 1, screen=tree.screen)
    assert c.category is P.BIG_PIC


def test_template_needs_two_predicates():
    with pytest.raises(ConfigError):
        TemplateSpec(P.BIG_PIC, (AttributePredicate("has_image"),))


def test_unknown_predicate():
    with pytest.raises(ConfigError):
        parse_templates({"templates": [{"category": "BigPic", "predicates": [{"name": "nope"}, {"name": "has_image"}]}]})


def test_missing_template_file(tmp_path):
    with pytest.raises(ConfigError):
        load_templates(tmp_path / "missing.json")


def test_toml_catalog(tmp_path):
    path = tmp_path / "t.toml"
    path.write_text(
        'threshold = 1\n[[templates]]\ncategory = "BigPic"\n'
        '[[templates.predicates]]\nname = "has_image"\n'
        '[[templates.predicates]]\nname = "big_image"\nargs = { fraction = 0.5 }\n'
    )
    catalog = load_templates(path)
    assert isinstance(catalog, TemplateCatalog) and catalog.threshold == 1
    assert catalog.templates[0].category is P.BIG_PIC


def test_packaged_catalog_covers_all_categories():
    assert {t.category for t in CATALOG.templates} == set(P) - {P.OTHERS}
    assert all(len(t.attribute_predicates) > CATALOG.threshold for t in CATALOG.templates)


def test_classification_is_deterministic():
    tree = load_hierarchy(FIXTURES / "golden_home.xml")
    runs = {tuple(c.to_dict()["category"] for c in classify_page(group_page(tree), tree.screen)) for _ in range(3)}
    assert len(runs) == 1


def test_random_groups_respect_fallback():
    rng = random.Random(5)
    tree = load_hierarchy(FIXTURES / "golden_home.xml")
    leaves = tree.leaves()
    for _ in range(200):
        members = sorted(rng.sample(leaves, rng.randint(1, 5)), key=lambda n: n.index)
        c = match_template(ComponentGroup(members=members, kind=GroupKind.ROW), CATALOG.templates, 2, screen=tree.screen)
        assert (c.category is P.OTHERS) == (c.matched_attribute_count <= 2)
