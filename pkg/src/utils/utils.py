from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
import logging

import numpy as np

logger = logging.getLogger(__name__)


def parse_grid(spec: str) -> list[float]:
    """
    Parse a grid given as `start:stop:step` (inclusive stop) or as a comma-separated list of values.

    Args:
        spec (str): The grid specification, e.g. "3.5:5:0.1" or "3.8,4.4".

    Returns:
        list[float]: The grid values in increasing order of appearance.

    Raises:
        ValueError: If the grid string is malformed or yields an empty grid.
    """
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"Invalid grid '{spec}'. Expected format start:stop:step.")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"Invalid grid '{spec}'. The step must be positive.")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [start + k * step for k in range(max(count, 0))]
    else:
        values = [float(v) for v in spec.split(",") if v.strip()]

    if not values:
        raise ValueError(f"Grid '{spec}' is empty.")
    return values


def parse_int_list(spec: str) -> list[int]:
    """Parse a comma-separated list of integers such as "30,60,120"."""
    try:
        values = [int(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"Invalid integer list: '{spec}'.") from None
    if not values:
        raise ValueError("Integer list is empty.")
    return values


def ordered_map(func: Callable, items: Iterable, threads: int = 1) -> list:
    """
    Apply `func` to every item, in parallel when `threads > 1`, returning results in input order.

    Reductions over the returned list are therefore independent of the thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"Mapping {len(items)} tasks over {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))
