from enum import Enum


class ExperimentName(str, Enum):
    PHASE_DIAGRAM = "phase-diagram"
    PHI1_LANDSCAPE = "phi1-landscape"
    INTERIOR_MAXIMUM = "interior-maximum"
    RATIO_CONVERGENCE = "ratio-convergence"
    TAU_CONSISTENCY = "tau-consistency"
    CONDITIONING = "conditioning"
    CYCLE_STATISTICS = "cycle-statistics"
    BOTTLENECK_TREND = "bottleneck-trend"
    CROSSING_TREND = "crossing-trend"
