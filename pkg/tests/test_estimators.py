import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from helpers import FIXTURES
from tvcast import ComponentGrouper, GroupClassifier, TvConverter
from tvcast.classify import PhoneGroupCategory as P
from tvcast.errors import CannotFit, ConfigError
from tvcast.grouping import GroupingResult
from tvcast.hierarchy import load_hierarchy
from tvcast.wireframe import Wireframe

GOLDEN = FIXTURES / "golden_home.xml"
LIST = FIXTURES / "list_page.xml"


def test_params_and_clone():
    g = ComponentGrouper(gap_coefficient=0.03)
    assert g.get_params()["gap_coefficient"] == 0.03
    c = clone(g)
    assert c is not g and c.get_params() == g.get_params()
    g.set_params(corner_tolerance=6)
    assert g.corner_tolerance == 6


def test_grouper_accepts_paths_text_and_trees():
    xml = LIST.read_text()
    out = ComponentGrouper().fit_transform([GOLDEN, str(LIST), xml, load_hierarchy(GOLDEN)])
    assert all(isinstance(r, GroupingResult) for r in out)
    assert out[1].final_unit_count == out[2].final_unit_count
    assert out[0].final_unit_count == 5


def test_classifier_in_a_pipeline():
    pipe = make_pipeline(ComponentGrouper(), GroupClassifier())
    pipe.fit([GOLDEN])
    cats = pipe.predict([GOLDEN, LIST])
    assert cats[1] == [P.TOOL_BAR, P.LIST_VIEW]
    assert cats[0][0] is P.SEARCH


def test_classifier_threshold_changes_outcome():
    results = ComponentGrouper().fit_transform([GOLDEN])
    strict = GroupClassifier(threshold=4).fit().predict(results)[0]
    assert set(strict) <= {P.OTHERS}


def test_converter_predict_and_score():
    conv = TvConverter().fit()
    (dsl,) = conv.predict([GOLDEN])
    assert dsl.startswith('Col(Chan("Home"')
    frames = [r.wireframe for r in conv.transform([GOLDEN, LIST])]
    assert conv.score([GOLDEN, LIST], frames) == 1.0
    blank = [Wireframe(1920, 1080)] * 2
    assert conv.score([GOLDEN, LIST], blank) < 1.0


def test_converter_screen_override():
    (result,) = TvConverter(tv_width=2560, tv_height=1440).fit().transform([GOLDEN])
    assert (result.wireframe.width, result.wireframe.height) == (2560, 1440)


def test_default_size_table_is_too_wide_for_720p():
    # the packaged size table is in 1080p pixels; on a 666 px canvas the golden page overflows
    with pytest.raises(CannotFit):
        TvConverter(tv_width=1280, tv_height=720).fit().transform([GOLDEN])


def test_not_fitted():
    with pytest.raises(NotFittedError):
        ComponentGrouper().transform([GOLDEN])
    with pytest.raises(NotFittedError):
        TvConverter().predict([GOLDEN])


def test_validation_errors(tmp_path):
    with pytest.raises(TypeError):
        ComponentGrouper().fit().transform(str(GOLDEN))
    with pytest.raises(ValueError):
        ComponentGrouper().fit().transform([])
    with pytest.raises(TypeError):
        ComponentGrouper().fit().transform([42])
    with pytest.raises(TypeError):
        GroupClassifier().fit().transform([load_hierarchy(GOLDEN)])
    with pytest.raises(ValueError):
        GroupClassifier(threshold=0).fit()
    with pytest.raises(ValueError):
        TvConverter(tv_width=-5).fit()
    with pytest.raises(ConfigError):
        TvConverter(templates=tmp_path / "none.json").fit()
    conv = TvConverter().fit()
    with pytest.raises(ValueError):
        conv.score([GOLDEN], [])
    with pytest.raises(TypeError):
        conv.score([GOLDEN], ["frame"])
