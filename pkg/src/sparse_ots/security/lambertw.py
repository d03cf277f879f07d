"""Lower branch W_{-1} of the Lambert W function on [-1/e, 0)."""
import math

from sparse_ots.core.errors import ArgumentError

BRANCH_POINT = -math.exp(-1.0)


def _initial_guess(x: float) -> float:
    if x < -0.25:
        # Series about the branch point in p = -sqrt(2(ex + 1)).
        p = -math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
    l1 = math.log(-x)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def lambert_w_neg1(x: float) -> float:
    """Solve w * exp(w) = x with w <= -1 by Halley iteration.

    Raises:
        ArgumentError: If x is outside [-1/e, 0)
    """
    if not (BRANCH_POINT - 1e-15 <= x < 0.0):
        raise ArgumentError(f"W_-1 is defined on [-1/e, 0), got {x}")
    if x <= BRANCH_POINT:
        return -1.0

    w = _initial_guess(x)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        w1 = w + 1.0
        if w1 == 0.0:
            break
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            break
    return min(w, -1.0)
