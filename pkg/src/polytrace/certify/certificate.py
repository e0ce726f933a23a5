from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .interval import Box


class Method(str, Enum):
    ALPHA = "alpha"
    KRAWCZYK = "krawczyk"


@dataclass
class Certificate:
    """Outcome of certifying one approximate zero.

    For the alpha method the certified region is the ball of ``radius`` 2β
    around ``point``; for Krawczyk it is ``box``.
    """

    method: Method
    point: np.ndarray
    certified: bool = False
    radius: float = math.inf
    box: Box | None = None
    unique: bool = False
    real: bool | None = None
    distinct_from: list[int] = field(default_factory=list)
    beta: float = math.inf
    gamma: float = math.inf
    alpha: float = math.inf
    contraction: float = math.inf
    rounds: int = 0

    def contains(self, z) -> bool:
        z = np.asarray(z, dtype=complex)
        if self.method is Method.ALPHA:
            return float(np.linalg.norm(z - self.point)) <= self.radius
        return self.box is not None and all(zi in b for zi, b in zip(z, self.box))

    def box_radius(self) -> float:
        if not self.box:
            return math.inf
        return max(max(b.re.width, b.im.width) for b in self.box) / 2
