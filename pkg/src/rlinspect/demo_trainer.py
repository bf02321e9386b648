"""Built-in instrumented cart-pole trainer.

A tiny two-layer Q-network (4 -> H -> 2, tanh hidden) is trained online
with epsilon-greedy semi-gradient TD(0) and manual backpropagation, and
every step of the run is written to a trace: state visits and step
rewards per environment step, a loss point per update, and layer
snapshots plus action probes every ``snapshot_every`` updates. All
randomness comes from one seed, so a re-run with the same configuration
produces a byte-identical trace.

``inject_fault`` re-runs the same training but corrupts what gets
*recorded* in a chosen update range (gradients zeroed, or probe q-values
flattened), producing ground-truth fixtures for the detector tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .data_handler import TraceWriter
from .trace_model import (
    FORMAT_VERSION,
    KIND_BIAS,
    KIND_GRADIENT,
    KIND_WEIGHT,
    ActionProbe,
    ActionSpace,
    HISTOGRAM_BINS,
    LayerSnapshot,
    LayerSummary,
    LossPoint,
    StateVisit,
    StepReward,
    TraceHeader,
)

# Cart-pole physics constants (classic control task, Euler integration).
GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
TOTAL_MASS = CART_MASS + POLE_MASS
POLE_HALF_LENGTH = 0.5
POLE_MASS_LENGTH = POLE_MASS * POLE_HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02
X_LIMIT = 2.4
THETA_LIMIT = 12.0 * math.pi / 180.0
MAX_EPISODE_STEPS = 500

STATE_DIM = 4
N_ACTIONS = 2


@dataclass(frozen=True)
class CartPoleState:
    x: float
    x_dot: float
    theta: float
    theta_dot: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x, self.x_dot, self.theta, self.theta_dot)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)


def is_terminal(state: CartPoleState) -> bool:
    return abs(state.x) > X_LIMIT or abs(state.theta) > THETA_LIMIT


def env_step(state: CartPoleState, action: int) -> Tuple[CartPoleState, float, bool]:
    """Advance the cart-pole one Euler step; action 0 pushes left, 1 pushes right.

    Reward is 1.0 per surviving step and 0.0 on the transition that leaves
    the allowed region. Stepping an already-terminal state is an error.
    """
    if is_terminal(state):
        raise ValueError("cannot step a terminal state")
    if action not in (0, 1):
        raise ValueError(f"action must be 0 or 1, got {action}")
    force = FORCE_MAG if action == 1 else -FORCE_MAG
    cos_t = math.cos(state.theta)
    sin_t = math.sin(state.theta)
    temp = (force + POLE_MASS_LENGTH * state.theta_dot**2 * sin_t) / TOTAL_MASS
    theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
        POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t**2 / TOTAL_MASS)
    )
    x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS
    nxt = CartPoleState(
        x=state.x + TAU * state.x_dot,
        x_dot=state.x_dot + TAU * x_acc,
        theta=state.theta + TAU * state.theta_dot,
        theta_dot=state.theta_dot + TAU * theta_acc,
    )
    done = is_terminal(nxt)
    return nxt, 0.0 if done else 1.0, done


@dataclass(frozen=True)
class TrainerConfig:
    learning_rate: float = 1e-3
    gamma: float = 0.99
    eps_start: float = 1.0
    eps_min: float = 0.01
    eps_decay: float = 0.995
    hidden: int = 32
    episodes: int = 300
    seed: int = 0
    snapshot_every: int = 10
    probe_k: int = 32
    near_zero_threshold: float = 1e-7  # producer-side convention for LayerSummary

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if not 0.0 < self.eps_decay < 1.0:
            raise ValueError("eps_decay must be in (0, 1)")
        if min(self.eps_start, self.eps_min) < 0:
            raise ValueError("epsilon values must be >= 0")
        if min(self.hidden, self.episodes, self.snapshot_every, self.probe_k) <= 0:
            raise ValueError("hidden, episodes, snapshot_every and probe_k must be positive")

    def run_id(self) -> str:
        return f"cartpole-demo-seed{self.seed}-ep{self.episodes}"

    def header(self) -> TraceHeader:
        return TraceHeader(
            format_version=FORMAT_VERSION,
            run_id=self.run_id(),
            state_dim=STATE_DIM,
            action_space=ActionSpace(kind="discrete", n=N_ACTIONS),
            state_kind="continuous",
            probe_count=self.probe_k,
        )


class QNetwork:
    """Dense 4 -> H -> 2 network with tanh hidden activation and manual backprop."""

    LAYERS = ("dense1", "dense2")

    def __init__(self, hidden: int, rng: np.random.Generator):
        self.w1 = rng.normal(0.0, 1.0 / math.sqrt(STATE_DIM), size=(hidden, STATE_DIM))
        self.b1 = np.zeros(hidden)
        self.w2 = rng.normal(0.0, 1.0 / math.sqrt(hidden), size=(N_ACTIONS, hidden))
        self.b2 = np.zeros(N_ACTIONS)

    def forward(self, state: np.ndarray) -> np.ndarray:
        return self.w2 @ np.tanh(self.w1 @ state + self.b1) + self.b2

    def loss_and_gradients(
        self, state: np.ndarray, action: int, target: float
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        """Squared TD error (target - Q(s, a))^2 and its gradients w.r.t. all parameters."""
        z1 = self.w1 @ state + self.b1
        h = np.tanh(z1)
        q = self.w2 @ h + self.b2
        error = target - q[action]
        loss = error**2
        dq = np.zeros(N_ACTIONS)
        dq[action] = -2.0 * error
        dw2 = np.outer(dq, h)
        db2 = dq
        dh = self.w2.T @ dq
        dz1 = dh * (1.0 - h**2)
        dw1 = np.outer(dz1, state)
        db1 = dz1
        return float(loss), {"dw1": dw1, "db1": db1, "dw2": dw2, "db2": db2}

    def apply_gradients(self, grads: Dict[str, np.ndarray], learning_rate: float) -> None:
        self.w1 -= learning_rate * grads["dw1"]
        self.b1 -= learning_rate * grads["db1"]
        self.w2 -= learning_rate * grads["dw2"]
        self.b2 -= learning_rate * grads["db2"]

    def layer_params(self) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
        return {"dense1": (self.w1, self.b1), "dense2": (self.w2, self.b2)}

    def layer_grads(self, grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        return {
            "dense1": np.concatenate([grads["dw1"].ravel(), grads["db1"].ravel()]),
            "dense2": np.concatenate([grads["dw2"].ravel(), grads["db2"].ravel()]),
        }


def summarize(values: np.ndarray, near_zero_threshold: float) -> LayerSummary:
    """Collapse a tensor into the bounded LayerSummary the trace carries."""
    flat = np.asarray(values, dtype=float).ravel()
    lo, hi = float(flat.min()), float(flat.max())
    if hi > lo:
        counts, _ = np.histogram(flat, bins=HISTOGRAM_BINS, range=(lo, hi))
    else:
        counts = np.zeros(HISTOGRAM_BINS, dtype=int)
        counts[0] = flat.size
    return LayerSummary(
        min=lo,
        max=hi,
        mean=float(flat.mean()),
        std=float(flat.std()),
        near_zero_fraction=float(np.mean(np.abs(flat) < near_zero_threshold)),
        histogram=tuple(int(c) for c in counts),
    )


@dataclass(frozen=True)
class Fault:
    """Recording-level fault: corrupts what the trace records, not the training."""

    kind: str  # "vanishing" | "qjump"
    start: int
    end: Optional[int] = None  # inclusive; None = to end of run (qjump default)

    def __post_init__(self) -> None:
        if self.kind not in ("vanishing", "qjump"):
            raise ValueError(f"unknown fault kind {self.kind!r}")
        if self.start < 0 or (self.end is not None and self.end < self.start):
            raise ValueError("fault range must satisfy 0 <= start <= end")

    def active(self, update: int) -> bool:
        return update >= self.start and (self.end is None or update <= self.end)


@dataclass(frozen=True)
class TrainSummary:
    episodes: int
    updates: int
    explore_visits: int
    exploit_visits: int
    total_reward: float
    final_epsilon: float


def train(config: TrainerConfig, writer: TraceWriter, fault: Optional[Fault] = None) -> TrainSummary:
    """Run the seeded cart-pole training loop, emitting the full trace.

    Every environment step performs one online TD(0) update. Probe states
    are the first ``probe_k`` distinct exploitation states; action probes
    are emitted at snapshot updates once the probe set is complete.
    """
    rng = np.random.default_rng(config.seed)
    net = QNetwork(config.hidden, rng)
    epsilon = config.eps_start
    probe_states: List[np.ndarray] = []
    update = 0
    explore_visits = 0
    exploit_visits = 0
    total_reward = 0.0
    fault_hit = False

    for episode in range(config.episodes):
        state = CartPoleState(*rng.uniform(-0.05, 0.05, size=STATE_DIM))
        for step in range(MAX_EPISODE_STEPS):
            s_vec = state.as_array()
            explore = bool(rng.random() < epsilon)
            if explore:
                action = int(rng.integers(0, N_ACTIONS))
                explore_visits += 1
            else:
                action = int(np.argmax(net.forward(s_vec)))
                exploit_visits += 1
                if len(probe_states) < config.probe_k and not any(
                    np.array_equal(s_vec, p) for p in probe_states
                ):
                    probe_states.append(s_vec.copy())
            writer.append(
                StateVisit(
                    episode=episode,
                    step=step,
                    state=state.as_tuple(),
                    mode="explore" if explore else "exploit",
                    trained=True,  # online TD(0): every acted-from state enters an update
                )
            )
            next_state, reward, done = env_step(state, action)
            writer.append(StepReward(episode=episode, step=step, reward=reward))
            total_reward += reward

            target = reward if done else reward + config.gamma * float(
                np.max(net.forward(next_state.as_array()))
            )
            loss, grads = net.loss_and_gradients(s_vec, action, target)
            net.apply_gradients(grads, config.learning_rate)
            writer.append(LossPoint(update=update, loss=loss))

            if update % config.snapshot_every == 0:
                fault_active = fault is not None and fault.active(update)
                if fault_active:
                    fault_hit = True
                layer_grads = net.layer_grads(grads)
                for layer, (weight, bias) in net.layer_params().items():
                    grad_values = layer_grads[layer]
                    if fault is not None and fault.kind == "vanishing" and fault_active:
                        grad_values = np.zeros_like(grad_values)
                    writer.append(
                        LayerSnapshot(
                            update=update,
                            layer=layer,
                            kind=KIND_WEIGHT,
                            summary=summarize(weight, config.near_zero_threshold),
                        )
                    )
                    writer.append(
                        LayerSnapshot(
                            update=update,
                            layer=layer,
                            kind=KIND_BIAS,
                            summary=summarize(bias, config.near_zero_threshold),
                        )
                    )
                    writer.append(
                        LayerSnapshot(
                            update=update,
                            layer=layer,
                            kind=KIND_GRADIENT,
                            summary=summarize(grad_values, config.near_zero_threshold),
                        )
                    )
                if len(probe_states) == config.probe_k:
                    for probe_id, probe_state in enumerate(probe_states):
                        q = net.forward(probe_state)
                        if fault is not None and fault.kind == "qjump" and fault_active:
                            q = np.full(N_ACTIONS, float(q.mean()))
                        writer.append(
                            ActionProbe(
                                update=update,
                                probe_id=probe_id,
                                q_values=tuple(float(v) for v in q),
                            )
                        )
            update += 1
            state = next_state
            if done:
                break
        epsilon = max(config.eps_min, epsilon * config.eps_decay)

    writer.flush()
    if fault is not None and not fault_hit:
        raise ValueError(
            f"fault range starting at update {fault.start} lies outside the run "
            f"({update} updates performed)"
        )
    return TrainSummary(
        episodes=config.episodes,
        updates=update,
        explore_visits=explore_visits,
        exploit_visits=exploit_visits,
        total_reward=total_reward,
        final_epsilon=epsilon,
    )


def inject_fault(config: TrainerConfig, fault: Fault, writer: TraceWriter) -> TrainSummary:
    """Same run as :func:`train`, with the fault applied to the recorded values."""
    return train(config, writer, fault=fault)


def parse_fault(spec: str) -> Fault:
    """Parse the CLI fault syntax: ``vanishing:100..110`` or ``qjump:50``."""
    kind, _, rest = spec.partition(":")
    if not rest:
        raise ValueError(f"fault spec {spec!r} needs a location, e.g. vanishing:100..110")
    if ".." in rest:
        lo, _, hi = rest.partition("..")
        return Fault(kind=kind, start=int(lo), end=int(hi))
    return Fault(kind=kind, start=int(rest), end=None if kind == "qjump" else int(rest))
