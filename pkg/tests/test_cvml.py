import pytest

from versa import cvml
from versa.cvml import CvmlParseError, TypeMapping, parse_cvml, parse_frame_element
from versa.geometry import Point
from versa.kb import EntityType, FactStore
from versa.spatial import SpatialConfig

CFG = SpatialConfig()


def test_parse_sample_dataset(sample_cvml):
    dataset = parse_cvml(sample_cvml)
    assert dataset.name == "LeftBag"
    assert len(dataset.frames) == 2
    assert [f.number for f in dataset.frames] == [0, 1]
    for frame in dataset.frames:
        assert [o.id for o in frame.objects] == [0, 1, 2]
    obj0 = dataset.frames[0].objects[0]
    assert obj0.orientation == 165
    assert obj0.box.center == Point(184, 204)
    assert (obj0.box.width, obj0.box.height) == (55, 30)
    assert obj0.appearance == "appear"
    assert obj0.hypotheses[0].role == "walker"
    assert obj0.hypotheses[0].movement == "walking"
    # frame 1 boxes move slightly
    assert dataset.frames[1].objects[0].box.center == Point(183, 200)


def test_groups_never_become_entities(sample_cvml):
    dataset = parse_cvml(sample_cvml)
    store = FactStore()
    for _ in cvml.process_dataset(dataset, store, CFG):
        pass
    assert store.entities_in_frame(0) == [0, 1, 2]
    assert store.entities_in_frame(1) == [0, 1, 2]


def test_default_role_mapping(sample_cvml):
    dataset = parse_cvml(sample_cvml)
    obj = dataset.frames[0].objects[0]
    assert cvml.entity_type(obj) is EntityType.PERSON  # walker
    bare = cvml.CvmlObject(id=9, orientation=0, box=obj.box)
    assert cvml.entity_type(bare) is EntityType.OBJECT  # no hypothesis -> default
    mapping = TypeMapping(roles=(("walker", EntityType.OBJECT),))
    assert cvml.entity_type(obj, mapping) is EntityType.OBJECT


def test_type_mapping_from_file(tmp_path):
    path = tmp_path / "roles.cfg"
    path.write_text("# comment\nshopper = person\ncart=object\n\n")
    mapping = TypeMapping.from_file(path)
    assert mapping.type_for("shopper") is EntityType.PERSON
    assert mapping.type_for("cart") is EntityType.OBJECT
    assert mapping.type_for("unknown") is EntityType.OBJECT
    (tmp_path / "bad.cfg").write_text("shopper person\n")
    with pytest.raises(CvmlParseError):
        TypeMapping.from_file(tmp_path / "bad.cfg")
    (tmp_path / "bad2.cfg").write_text("shopper = alien\n")
    with pytest.raises(CvmlParseError):
        TypeMapping.from_file(tmp_path / "bad2.cfg")


def test_parse_errors():
    with pytest.raises(CvmlParseError):
        parse_cvml("<dataset><frame></dataset>")  # malformed xml
    with pytest.raises(CvmlParseError):
        parse_cvml("<video/>")  # wrong root
    with pytest.raises(CvmlParseError):
        parse_cvml('<dataset><frame><objectlist/></frame></dataset>')  # missing number
    with pytest.raises(CvmlParseError):
        parse_cvml(
            '<dataset><frame number="0"><objectlist>'
            '<object id="1"><box h="2" w="2" xc="5" yc="5"/></object>'
            '<object id="1"><box h="2" w="2" xc="9" yc="9"/></object>'
            "</objectlist></frame></dataset>"
        )  # duplicate object id
    with pytest.raises(CvmlParseError):
        parse_cvml(
            '<dataset><frame number="1"/><frame number="0"/></dataset>'
        )  # frames out of order
    with pytest.raises(CvmlParseError):
        parse_cvml(
            '<dataset><frame number="0"/><frame number="0"/></dataset>'
        )  # duplicate frame numbers
    with pytest.raises(CvmlParseError):
        parse_cvml(
            '<dataset><frame number="0"><objectlist>'
            '<object id="1"><box h="x" w="2" xc="5" yc="5"/></object>'
            "</objectlist></frame></dataset>"
        )  # non-numeric box attribute
    with pytest.raises(CvmlParseError):
        parse_cvml(
            '<dataset><frame number="0"><objectlist>'
            '<object id="1"/></objectlist></frame></dataset>'
        )  # missing box


def test_parse_frame_element():
    frame = parse_frame_element(
        '<frame number="7"><objectlist>'
        '<object id="3"><box h="4" w="4" xc="10" yc="10"/></object>'
        "</objectlist></frame>"
    )
    assert frame.number == 7
    assert frame.objects[0].id == 3
    with pytest.raises(CvmlParseError):
        parse_frame_element("<dataset/>")


def test_frame_data_lookup(sample_cvml):
    dataset = parse_cvml(sample_cvml)
    assert cvml.frame_data(dataset, 0).number == 0
    assert cvml.frame_data(dataset, 1).number == 1
    assert cvml.frame_data(dataset, 2) is None


def test_process_frame_missing_number_is_empty(sample_cvml):
    dataset = parse_cvml(sample_cvml)
    store = FactStore()
    cvml.process_frame(dataset, 0, store, CFG)
    cvml.process_frame(dataset, 1, store, CFG)
    cvml.process_frame(dataset, 2, store, CFG)  # not annotated: empty frame
    assert store.high_water == 2
    assert store.entities_in_frame(2) == []


def test_process_dataset_advances_high_water(sample_cvml):
    dataset = parse_cvml(sample_cvml)
    store = FactStore()
    seen = list(cvml.process_dataset(dataset, store, CFG))
    assert seen == [0, 1]
    assert store.high_water == 1
    # facts landed with the right types and values
    facts = store.frame_facts(0, 0)
    assert facts.type is EntityType.PERSON
    assert facts.loc == Point(184, 204)
    assert facts.orient == 165.0
    # relations were entailed: 1 and 2 are close together in both frames
    assert (1, 2, 0) in set(store.query_cached("near", frame=0))
    assert (1, 2, 1) in set(store.query_cached("near", frame=1))
