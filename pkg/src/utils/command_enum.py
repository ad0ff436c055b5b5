from enum import Enum


class CommandEnum(str, Enum):
    GEN = "gen"
    TREE = "tree"
    EXPONENTS = "exponents"
    MOMENTS = "moments"
    ENUMERATE = "enumerate"
    DYNAMICS = "dynamics"
    EXPERIMENT = "experiment"


class ExponentsAction(str, Enum):
    PHI1_LANDSCAPE = "phi1-landscape"
    STATIONARY = "stationary"
    VERIFY_POLYS = "verify-polys"


class MomentsAction(str, Enum):
    RATIO = "ratio"
    TAU = "tau"
    CONDITIONING = "conditioning"


class EnumerateAction(str, Enum):
    PROFILE = "profile"
    BARRIER = "barrier"
    GAP = "gap"


class DynamicsAction(str, Enum):
    RUN = "run"
    CROSSING = "crossing"
