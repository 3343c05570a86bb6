"""
Spatial hashing for rational balls.

Balls are bucketed by radius class: a ball of radius r goes to the grid whose
cube side is the least power of two s >= r (or the fixed `div` when given),
keyed by the exact floor of centre / s. Lookups scan, per grid, only the
cubes within reach, so unions mixing tiny and large balls stay cheap.
"""

import itertools
import math
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from src.metric import Ball, balls_contained, balls_disjoint


def _grid_side(radius: Fraction) -> Fraction:
    """Least power of two at least `radius`."""
    side = Fraction(1)
    while side < radius:
        side *= 2
    while side / 2 >= radius:
        side /= 2
    return side


class SpaceHash:
    """Grid index over a list of balls.

    Args:
        balls: the balls to index (order is kept; lookups return the least index)
        div: fixed grid cell size for every ball (default: one grid per radius class)
    """

    def __init__(self, balls: Sequence[Ball] = (), div: Optional[Fraction] = None):
        self.div = None if div is None else Fraction(div)
        if self.div is not None and self.div <= 0:
            raise ValueError(f"grid cell size must be positive, got {self.div}")
        self.balls: list[Ball] = []
        self.grids: dict[Fraction, dict[tuple[int, ...], list[int]]] = {}
        self.max_radius = Fraction(0)
        for ball in balls:
            self.add(ball)

    def __len__(self) -> int:
        return len(self.balls)

    @staticmethod
    def point_to_space(point: Sequence[Fraction], side: Fraction) -> tuple[int, ...]:
        return tuple(math.floor(c / side) for c in point)

    def add(self, ball: Ball) -> int:
        """Index a further ball; returns its index."""
        side = self.div if self.div is not None else _grid_side(ball.radius)
        self.balls.append(ball)
        i_ball = len(self.balls) - 1
        self.grids.setdefault(side, {}).setdefault(self.point_to_space(ball.center, side), []).append(i_ball)
        self.max_radius = max(self.max_radius, ball.radius)
        return i_ball

    def _cubes(self, side: Fraction, center: Sequence[Fraction], reach: Fraction) -> Iterator[tuple[int, ...]]:
        cells = self.grids[side]
        lo = self.point_to_space([c - reach for c in center], side)
        hi = self.point_to_space([c + reach for c in center], side)
        n_cubes = math.prod(h - l + 1 for l, h in zip(lo, hi))
        if n_cubes > len(cells):
            for space in cells:
                if all(l <= s <= h for s, l, h in zip(space, lo, hi)):
                    yield space
            return
        yield from itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi)))

    def _scan(self, center: Sequence[Fraction], reach_of) -> list[int]:
        found = []
        for side, cells in self.grids.items():
            reach = reach_of(side)
            for space in self._cubes(side, center, reach):
                for i_ball in cells.get(space, ()):
                    if all(abs(a - b) <= reach for a, b in zip(self.balls[i_ball].center, center)):
                        found.append(i_ball)
        found.sort()
        return found

    def near(self, center: Sequence[Fraction], reach: Fraction) -> list[int]:
        """Indices of balls whose centre lies in the box of half-width `reach`, sorted."""
        reach = Fraction(reach)
        return self._scan(center, lambda side: reach)

    def around(self, point: Sequence[Fraction]) -> list[int]:
        """Indices of balls that can contain `point`, sorted."""
        if self.div is not None:
            return self.near(point, self.max_radius)
        return self._scan(point, lambda side: side)

    def container_of(self, ball: Ball) -> Optional[int]:
        """Least index of a stored ball that formally contains `ball`."""
        for i_ball in self.around(ball.center):
            if balls_contained(ball, self.balls[i_ball]):
                return i_ball
        return None

    def touching(self, ball: Ball) -> Optional[int]:
        """Least index of a stored ball not formally disjoint from `ball`."""
        found = self.touching_all(ball)
        return found[0] if found else None

    def touching_all(self, ball: Ball) -> list[int]:
        """Indices of every stored ball not formally disjoint from `ball`, sorted."""
        if self.div is not None:
            candidates = self.near(ball.center, self.max_radius + ball.radius)
        else:
            candidates = self._scan(ball.center, lambda side: side + ball.radius)
        return [i_ball for i_ball in candidates if not balls_disjoint(ball, self.balls[i_ball])]
