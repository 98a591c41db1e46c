"""
Initial designs.
"""
from typing import List

import numpy as np

from .errors import ProblemError
from .models.search_space import ConfigPoint, SearchSpace


def latin_hypercube(space: SearchSpace, n: int, rng: np.random.Generator) -> List[ConfigPoint]:
    """n points with exactly one point per stratum [k/n, (k+1)/n) in every dimension."""
    if n < 1:
        raise ProblemError(f"LHS 점 개수는 1 이상이어야 합니다: {n}")
    d = space.dimension
    if d == 0:
        raise ProblemError("빈 탐색 공간입니다")
    strata = np.column_stack([rng.permutation(n) for _ in range(d)])
    u = (strata + rng.uniform(0.0, 1.0, size=(n, d))) / n
    # stay inside the stratum when the uniform draw lands on 1.0 after rounding
    u = np.minimum(u, np.nextafter((strata + 1) / n, 0.0))
    return [ConfigPoint(tuple(row)) for row in u]
