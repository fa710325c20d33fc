"""Gradient-descent placement of circle centers against target distances.

The loss is the sum over pairs of |observed - target| center distance; one
epoch applies one full-batch gradient update to every coordinate.  The
learning rate starts at 10*n and follows loss/(10*n) capped at 100, so steps
shrink with the remaining error.  Numeric code is deliberately plain scalar
arithmetic with a fixed accumulation order, keeping epoch/loss traces
bit-reproducible and portable across engine ports.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Protocol, Sequence

from .errors import DivergenceError, InputError
from .geometry import CircleModel, area_scale_for_canvas, target_distance_matrix
from .setops import IdSet, RegionTable, build_region_table

LR_CAP = 100.0
MAX_RISES = 5
_MAX_HALVINGS = 40

Positions = tuple[tuple[float, float], ...]


class RunStatus(enum.Enum):
    RUNNING = "running"
    CONVERGED = "converged"
    STOPPED_BY_USER = "stopped_by_user"
    REVERTED_AFTER_RISES = "reverted_after_rises"
    EPOCH_LIMIT = "epoch_limit"


@dataclass(frozen=True)
class BestSnapshot:
    positions: Positions
    loss: float
    epoch: int


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    max_epochs: int = 20000
    loss_threshold: float = 1.0
    canvas: tuple[float, float] = (800.0, 800.0)

    def __post_init__(self):
        if self.max_epochs < 1:
            raise InputError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.loss_threshold <= 0:
            raise InputError(f"loss_threshold must be positive, got {self.loss_threshold}")
        if self.canvas[0] <= 0 or self.canvas[1] <= 0:
            raise InputError(f"canvas dimensions must be positive, got {self.canvas}")


@dataclass(frozen=True)
class LayoutState:
    positions: Positions
    epoch: int
    loss: float
    lr: float
    rise_count: int
    best: BestSnapshot
    status: RunStatus


class StopSignal(Protocol):
    def is_set(self) -> bool: ...


def placement_order(model: CircleModel) -> list[int]:
    """Biggest circle first, then greedily the unplaced circle nearest (by
    target distance) to the previously chosen one; ties go to the lower index."""
    n = model.n
    first = 0
    for i in range(1, n):
        if model.radii[i] > model.radii[first]:
            first = i
    order = [first]
    remaining = [i for i in range(n) if i != first]
    while remaining:
        prev = order[-1]
        best = remaining[0]
        for j in remaining[1:]:
            if model.target[prev][j] < model.target[prev][best]:
                best = j
        order.append(best)
        remaining.remove(best)
    return order


def initial_positions(
    order: Sequence[int], canvas: tuple[float, float], model: CircleModel
) -> Positions:
    """Deterministic ring start: the k-th circle of the placement order sits on
    a ring of radius min(w,h)/4 at angle 90 - 360*k/n degrees (y-axis up)."""
    n = model.n
    w, h = canvas
    ring_r = min(w, h) / 4.0
    cx, cy = w / 2.0, h / 2.0
    pos: list[tuple[float, float]] = [(0.0, 0.0)] * n
    for k, idx in enumerate(order):
        theta = math.radians(90.0 - 360.0 * k / n)
        pos[idx] = (cx + ring_r * math.cos(theta), cy + ring_r * math.sin(theta))
    return tuple(pos)


def loss(positions: Positions, model: CircleModel) -> float:
    """Sum over circle pairs of |observed - target| center distance."""
    total = 0.0
    n = model.n
    for i in range(n):
        xi, yi = positions[i]
        for j in range(i + 1, n):
            dx = xi - positions[j][0]
            dy = yi - positions[j][1]
            d = math.sqrt(dx * dx + dy * dy)
            total += abs(d - model.target[i][j])
    return total


def loss_gradient(positions: Positions, model: CircleModel) -> Positions:
    """Analytic gradient of the absolute-difference loss.

    Coincident centers with a positive target use a fixed +x unit direction
    for the lower-index circle, removing the singularity deterministically.
    """
    n = model.n
    gx = [0.0] * n
    gy = [0.0] * n
    for i in range(n):
        xi, yi = positions[i]
        for j in range(i + 1, n):
            dx = xi - positions[j][0]
            dy = yi - positions[j][1]
            d = math.sqrt(dx * dx + dy * dy)
            if d > 0.0:
                ux = dx / d
                uy = dy / d
            else:
                ux, uy = 1.0, 0.0
            e = d - model.target[i][j]
            s = 1.0 if e > 0.0 else (-1.0 if e < 0.0 else 0.0)
            gx[i] += s * ux
            gy[i] += s * uy
            gx[j] -= s * ux
            gy[j] -= s * uy
    return tuple(zip(gx, gy))


def initialize(model: CircleModel, config: RunConfig) -> LayoutState:
    order = placement_order(model)
    pos = initial_positions(order, config.canvas, model)
    start_loss = loss(pos, model)
    return LayoutState(
        positions=pos,
        epoch=0,
        loss=start_loss,
        lr=10.0 * model.n,
        rise_count=0,
        best=BestSnapshot(positions=pos, loss=start_loss, epoch=0),
        status=RunStatus.RUNNING,
    )


def epoch_step(state: LayoutState, model: CircleModel, config: RunConfig) -> LayoutState:
    """One full-batch descent step plus loss / learning-rate / best bookkeeping."""
    if state.status is not RunStatus.RUNNING:
        raise InputError(f"cannot step a terminal state (status {state.status.value})")
    grad = loss_gradient(state.positions, model)
    lr = state.lr
    candidate: Positions = ()
    for _ in range(_MAX_HALVINGS + 1):
        candidate = tuple(
            (x - lr * gx_, y - lr * gy_)
            for (x, y), (gx_, gy_) in zip(state.positions, grad)
        )
        if all(math.isfinite(x) and math.isfinite(y) for x, y in candidate):
            break
        lr *= 0.5
    else:
        raise DivergenceError(
            f"non-finite coordinates at epoch {state.epoch + 1} despite step rescue"
        )
    new_loss = loss(candidate, model)
    epoch = state.epoch + 1
    return replace(
        state,
        positions=candidate,
        epoch=epoch,
        loss=new_loss,
        lr=min(new_loss / (10.0 * model.n), LR_CAP),
        rise_count=min(state.rise_count + 1, MAX_RISES) if new_loss > state.loss else 0,
        best=(
            BestSnapshot(positions=candidate, loss=new_loss, epoch=epoch)
            if new_loss < state.best.loss
            else state.best
        ),
    )


def _revert_to_best(state: LayoutState, status: RunStatus) -> LayoutState:
    return replace(
        state, positions=state.best.positions, loss=state.best.loss, status=status
    )


def resolve_status(
    state: LayoutState, config: RunConfig, stop_requested: bool = False
) -> LayoutState:
    """Apply the stop rules, in order: converged, user stop, 5 rises, epoch cap.

    Every termination except convergence reverts to the lowest-loss snapshot.
    """
    if state.status is not RunStatus.RUNNING:
        return state
    if state.loss < config.loss_threshold:
        return replace(state, status=RunStatus.CONVERGED)
    if stop_requested:
        return _revert_to_best(state, RunStatus.STOPPED_BY_USER)
    if state.rise_count >= MAX_RISES:
        return _revert_to_best(state, RunStatus.REVERTED_AFTER_RISES)
    if state.epoch >= config.max_epochs:
        return _revert_to_best(state, RunStatus.EPOCH_LIMIT)
    return state


class LayoutSession:
    """Stepping contract for front ends: initialize / step / stop / state."""

    def __init__(
        self,
        model: CircleModel,
        config: RunConfig,
        table: Optional[RegionTable] = None,
    ):
        self.model = model
        self.config = config
        self.table = table
        self._stop = False
        self._state = resolve_status(initialize(model, config), config, False)

    @classmethod
    def from_sets(cls, sets: Sequence[IdSet], config: RunConfig) -> "LayoutSession":
        table = build_region_table(sets)
        sizes = table.set_sizes()
        scale = area_scale_for_canvas(sizes, config.canvas[0], config.canvas[1])
        model = target_distance_matrix(table, sizes, scale)
        return cls(model, config, table=table)

    @property
    def state(self) -> LayoutState:
        return self._state

    def request_stop(self) -> None:
        self._stop = True

    def step(self, epochs: int = 1) -> list[tuple[int, float]]:
        """Advance up to `epochs` epochs; returns the (epoch, loss) trace."""
        trace: list[tuple[int, float]] = []
        self._state = resolve_status(self._state, self.config, self._stop)
        while len(trace) < epochs and self._state.status is RunStatus.RUNNING:
            self._state = epoch_step(self._state, self.model, self.config)
            trace.append((self._state.epoch, self._state.loss))
            self._state = resolve_status(self._state, self.config, self._stop)
        return trace


def run(
    model: CircleModel,
    config: RunConfig,
    stop_signal: Optional[StopSignal] = None,
    epoch_callback: Optional[Callable[[LayoutState], None]] = None,
) -> LayoutState:
    """Iterate epochs until a stop rule fires; returns the final state."""
    session = LayoutSession(model, config)
    while session.state.status is RunStatus.RUNNING:
        if stop_signal is not None and stop_signal.is_set():
            session.request_stop()
        before = session.state.epoch
        session.step(1)
        if epoch_callback is not None and session.state.epoch > before:
            epoch_callback(session.state)
    return session.state
