try:
    from enum import StrEnum
except ImportError:  # Python < 3.11: backport of enum.StrEnum
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()


class Polarization(StrEnum):
    TE = "TE"
    TM = "TM"


class SynthesisMode(StrEnum):
    NORMAL = "normal"
    OBLIQUE = "oblique"


class GammaSource(StrEnum):
    IDEAL = "ideal"
    NORMAL = "normal"
    OBLIQUE = "oblique"


class Boresight(StrEnum):
    NORMAL = "normal"
    CENTER = "center"


class RcsObliquity(StrEnum):
    INCIDENT = "incident"
    RECIPROCAL = "reciprocal"


class Subcommand(StrEnum):
    CELL_RESPONSE = "cell-response"
    LOOKUP = "lookup"
    SYNTHESIZE = "synthesize"
    LINK = "link"
    VALIDATE_PEC = "validate-pec"
