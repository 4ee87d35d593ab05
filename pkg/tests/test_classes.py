"""Taxonomy structure and lookups."""

import pytest

from luxharvest.classes import (
    ARTIFICIAL_CLASSES,
    BASE_TAXONOMY,
    CANONICAL_ORDER,
    EXTENDED_TAXONOMY,
    LightClass,
    NATURAL_SUBCLASSES,
    class_from_id,
    is_artificial,
    is_natural,
    taxonomy_classes,
)
from luxharvest.errors import TaxonomyError, UnknownClass


def test_base_taxonomy_has_seven_classes():
    assert len(BASE_TAXONOMY) == 7
    assert BASE_TAXONOMY[0] is LightClass.DARK
    ids = {c.id for c in BASE_TAXONOMY}
    assert ids == {
        "dark", "led_3000k", "led_4000k", "cfl_2700k", "cfl_6500k",
        "nltw_clear", "nltw_cloudy",
    }


def test_extended_taxonomy_swaps_nltw_for_subclasses():
    ids = {c.id for c in EXTENDED_TAXONOMY}
    assert "nltw_clear" not in ids
    assert "nltw_cloudy" not in ids
    assert {c.id for c in NATURAL_SUBCLASSES} <= ids
    assert len(NATURAL_SUBCLASSES) == 4


def test_canonical_order_covers_both_taxonomies():
    canon = set(CANONICAL_ORDER)
    assert set(BASE_TAXONOMY) <= canon
    assert set(EXTENDED_TAXONOMY) <= canon
    # ordinals are positions, so the order must never contain duplicates
    assert len(CANONICAL_ORDER) == len(canon)


def test_natural_artificial_partition():
    for cls in CANONICAL_ORDER:
        if cls is LightClass.DARK:
            assert not is_natural(cls) and not is_artificial(cls)
        else:
            assert is_natural(cls) != is_artificial(cls)
    assert len(ARTIFICIAL_CLASSES) == 4


def test_class_from_id_round_trip():
    for cls in CANONICAL_ORDER:
        assert class_from_id(cls.id) is cls


def test_class_from_id_unknown():
    with pytest.raises(UnknownClass):
        class_from_id("sodium_vapor")


def test_taxonomy_classes_lookup():
    assert taxonomy_classes("base") == BASE_TAXONOMY
    assert taxonomy_classes("extended") == EXTENDED_TAXONOMY
    with pytest.raises(TaxonomyError):
        taxonomy_classes("imaginary")
