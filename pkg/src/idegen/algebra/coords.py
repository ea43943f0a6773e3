from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CoordinateSystem:
    """Coordinates ``u1..uk, v1..vk, x1..xm`` of an n = 2k + m dimensional chart.

    The tuple order of ``names`` is the polynomial variable order (it drives the
    canonical term order). Metric matrices use a different index order,
    ``(u, x, v)``; see :meth:`metric_order`.
    """

    k: int
    m: int = 0
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.k < 0 or self.m < 0 or (self.k == 0 and self.m == 0):
            raise ValueError(f"need k >= 1 or m >= 1, got k={self.k}, m={self.m}")
        if not self.names:
            names = (
                tuple(f"u{i}" for i in range(1, self.k + 1))
                + tuple(f"v{i}" for i in range(1, self.k + 1))
                + tuple(f"x{a}" for a in range(1, self.m + 1))
            )
            object.__setattr__(self, "names", names)
        if len(self.names) != self.n:
            raise ValueError(f"expected {self.n} names, got {len(self.names)}")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"coordinate names are not unique: {self.names}")
        object.__setattr__(self, "_lookup", {nm: i for i, nm in enumerate(self.names)})

    @property
    def n(self) -> int:
        return 2 * self.k + self.m

    def index(self, name: str) -> int:
        try:
            return self._lookup[name]
        except KeyError:
            raise KeyError(f"unknown coordinate {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._lookup

    # 1-based helpers returning variable indices
    def u(self, i: int) -> int:
        return i - 1

    def v(self, i: int) -> int:
        return self.k + i - 1

    def x(self, a: int) -> int:
        return 2 * self.k + a - 1

    def kind(self, var: int) -> tuple[str, int]:
        """``('u', i)``, ``('v', i)`` or ``('x', a)`` for a variable index (1-based i, a)."""
        if var < self.k:
            return "u", var + 1
        if var < 2 * self.k:
            return "v", var - self.k + 1
        return "x", var - 2 * self.k + 1

    def metric_order(self) -> tuple[int, ...]:
        """Variable index for each metric matrix index: u block, x block, v block."""
        k, m = self.k, self.m
        return (
            tuple(range(k))
            + tuple(range(2 * k, 2 * k + m))
            + tuple(range(k, 2 * k))
        )

    def u_vars(self) -> range:
        return range(self.k)

    def v_vars(self) -> range:
        return range(self.k, 2 * self.k)

    def x_vars(self) -> range:
        return range(2 * self.k, 2 * self.k + self.m)
