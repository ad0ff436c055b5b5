from enum import Enum


class ChainInit(str, Enum):
    """Starting configuration of a Glauber or block chain."""

    EMPTY = "empty"
    FILL_V1 = "fill_V1"
    FILL_V2 = "fill_V2"
    GIVEN = "given"
