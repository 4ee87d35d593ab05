"""Light-source classes and the two classification taxonomies.

The base taxonomy treats natural light through the window (NLTW) as two
coarse classes.  The extended taxonomy replaces them with four sub-classes
so that illuminance correction can be fitted per sub-class.  Enum
definition order is the canonical class order used for deterministic
tie-breaking everywhere in the package.
"""

from __future__ import annotations

import enum

from .errors import TaxonomyError, UnknownClass


class LightClass(enum.Enum):
    DARK = "dark"
    LED_3000K = "led_3000k"
    LED_4000K = "led_4000k"
    CFL_2700K = "cfl_2700k"
    CFL_6500K = "cfl_6500k"
    NLTW_CLEAR = "nltw_clear"
    NLTW_CLOUDY = "nltw_cloudy"
    SUNRISE = "sunrise"
    SUNSET = "sunset"
    DAYLIGHT = "daylight"
    STRONG_DAYLIGHT = "strong_daylight"

    @property
    def id(self) -> str:
        return self.value

    def __repr__(self) -> str:  # keeps reprs short in test output
        return f"<{self.value}>"


CANONICAL_ORDER: tuple[LightClass, ...] = tuple(LightClass)
ORDINAL = {cls: i for i, cls in enumerate(CANONICAL_ORDER)}

BASE_TAXONOMY = (
    LightClass.DARK,
    LightClass.LED_3000K,
    LightClass.LED_4000K,
    LightClass.CFL_2700K,
    LightClass.CFL_6500K,
    LightClass.NLTW_CLEAR,
    LightClass.NLTW_CLOUDY,
)

EXTENDED_TAXONOMY = (
    LightClass.DARK,
    LightClass.LED_3000K,
    LightClass.LED_4000K,
    LightClass.CFL_2700K,
    LightClass.CFL_6500K,
    LightClass.SUNRISE,
    LightClass.SUNSET,
    LightClass.DAYLIGHT,
    LightClass.STRONG_DAYLIGHT,
)

NATURAL_SUBCLASSES = (
    LightClass.SUNRISE,
    LightClass.SUNSET,
    LightClass.DAYLIGHT,
    LightClass.STRONG_DAYLIGHT,
)

ARTIFICIAL_CLASSES = frozenset(
    {
        LightClass.LED_3000K,
        LightClass.LED_4000K,
        LightClass.CFL_2700K,
        LightClass.CFL_6500K,
    }
)

NATURAL_CLASSES = frozenset(
    {LightClass.NLTW_CLEAR, LightClass.NLTW_CLOUDY} | set(NATURAL_SUBCLASSES)
)

TAXONOMIES = {"base": BASE_TAXONOMY, "extended": EXTENDED_TAXONOMY}


def class_from_id(name: str) -> LightClass:
    """Look up a class by its snake_case id.  Raises UnknownClass."""
    try:
        return LightClass(name)
    except ValueError:
        raise UnknownClass(f"unknown light class {name!r}") from None


def taxonomy_classes(taxonomy: str) -> tuple[LightClass, ...]:
    try:
        return TAXONOMIES[taxonomy]
    except KeyError:
        raise TaxonomyError(f"unknown taxonomy {taxonomy!r}") from None


def is_natural(cls: LightClass) -> bool:
    return cls in NATURAL_CLASSES


def is_artificial(cls: LightClass) -> bool:
    return cls in ARTIFICIAL_CLASSES
