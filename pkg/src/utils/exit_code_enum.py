from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    CHECK_FAILURE = 1
    USAGE_ERROR = 2
