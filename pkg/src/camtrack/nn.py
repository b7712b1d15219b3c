"""Pose-policy network: parameters, feature encoding, forward pass and exact
analytic gradients.

The network is small on purpose: a shared per-camera embedding that is
mean-pooled (so the encoding is permutation-invariant in the other cameras),
a two-layer tanh trunk, and linear policy/value heads. Gradients are written
out by hand so training has no framework dependency and can be checked
against finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

N_ACTIONS = 11
RAW_SIZE = 7          # per-camera tuple: x, y, z, sin yaw, cos yaw, pitch, label
EMBED_SIZE = 16
FEATURE_SIZE = RAW_SIZE + EMBED_SIZE  # self tuple + pooled embedding = 23
HIDDEN_SIZE = 64

# (name, shape, fan_in, fan_out) in fixed declaration order; this order is
# also the checkpoint serialization order.
PARAM_SPECS = (
    ("embed_w", (EMBED_SIZE, RAW_SIZE), RAW_SIZE, EMBED_SIZE),
    ("embed_b", (EMBED_SIZE,), None, None),
    ("trunk1_w", (HIDDEN_SIZE, FEATURE_SIZE), FEATURE_SIZE, HIDDEN_SIZE),
    ("trunk1_b", (HIDDEN_SIZE,), None, None),
    ("trunk2_w", (HIDDEN_SIZE, HIDDEN_SIZE), HIDDEN_SIZE, HIDDEN_SIZE),
    ("trunk2_b", (HIDDEN_SIZE,), None, None),
    ("policy_w", (N_ACTIONS, HIDDEN_SIZE), HIDDEN_SIZE, N_ACTIONS),
    ("policy_b", (N_ACTIONS,), None, None),
    ("value_w", (1, HIDDEN_SIZE), HIDDEN_SIZE, 1),
    ("value_b", (1,), None, None),
)


@dataclass
class PolicyParams:
    """Named weight arrays of the pose policy, always float64."""

    embed_w: np.ndarray
    embed_b: np.ndarray
    trunk1_w: np.ndarray
    trunk1_b: np.ndarray
    trunk2_w: np.ndarray
    trunk2_b: np.ndarray
    policy_w: np.ndarray
    policy_b: np.ndarray
    value_w: np.ndarray
    value_b: np.ndarray

    def arrays(self):
        """(name, array) pairs in declaration order."""
        for name, _, _, _ in PARAM_SPECS:
            yield name, getattr(self, name)

    def copy(self) -> "PolicyParams":
        return PolicyParams(**{name: arr.copy() for name, arr in self.arrays()})

    def mean_abs(self) -> float:
        total = sum(float(np.abs(arr).sum()) for _, arr in self.arrays())
        count = sum(arr.size for _, arr in self.arrays())
        return total / count

    def validate(self) -> None:
        for name, shape, _, _ in PARAM_SPECS:
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite values")


def zeros_like_params() -> PolicyParams:
    return PolicyParams(**{name: np.zeros(shape)
                           for name, shape, _, _ in PARAM_SPECS})


def init_params(seed: int) -> PolicyParams:
    """Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases."""
    rng = RngStream(seed, 0)
    arrays = {}
    for name, shape, fan_in, fan_out in PARAM_SPECS:
        if fan_in is None:
            arrays[name] = np.zeros(shape)
        else:
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            flat = [rng.uniform(-bound, bound) for _ in range(int(np.prod(shape)))]
            arrays[name] = np.array(flat).reshape(shape)
    return PolicyParams(**arrays)


@dataclass
class ForwardCache:
    """Intermediates kept for the backward pass. raws/embeds are only present
    when the features were built from pose messages; without them the embed
    layer receives zero gradient."""

    features: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    logits: np.ndarray
    raws: np.ndarray | None = None
    embeds: np.ndarray | None = None


def _encode(params: PolicyParams, self_index: int, messages,
            arena_half: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raw tuples, their embeddings, and the 23-feature vector for one camera."""
    n = len(messages)
    raws = np.empty((n, RAW_SIZE))
    for j, msg in enumerate(messages):
        p = msg.pose
        yaw = math.radians(p.yaw_deg)
        raws[j, 0] = p.x / arena_half
        raws[j, 1] = p.y / arena_half
        raws[j, 2] = p.z / 3.0
        raws[j, 3] = math.sin(yaw)
        raws[j, 4] = math.cos(yaw)
        raws[j, 5] = p.pitch_deg / 60.0
        raws[j, 6] = float(msg.label)
    embeds = np.tanh(raws @ params.embed_w.T + params.embed_b)
    features = np.concatenate([raws[self_index], embeds.mean(axis=0)])
    return features, raws, embeds


def build_features(params: PolicyParams, self_index: int, messages,
                   arena_half: float) -> np.ndarray:
    """Observation vector for one camera: its own normalized pose tuple
    concatenated with the mean embedding of all cameras' tuples."""
    features, _, _ = _encode(params, self_index, messages, arena_half)
    return features


def forward(params: PolicyParams,
            features: np.ndarray) -> tuple[np.ndarray, float, ForwardCache]:
    """Trunk and heads on a prebuilt feature vector -> (logits, value, cache)."""
    features = np.asarray(features, dtype=float)
    if features.shape != (FEATURE_SIZE,):
        raise ValueError(f"features must have shape ({FEATURE_SIZE},), "
                         f"got {features.shape}")
    if not np.isfinite(features).all():
        raise ValueError("features contain non-finite values")
    h1 = np.tanh(params.trunk1_w @ features + params.trunk1_b)
    h2 = np.tanh(params.trunk2_w @ h1 + params.trunk2_b)
    logits = params.policy_w @ h2 + params.policy_b
    value = float(params.value_w[0] @ h2 + params.value_b[0])
    return logits, value, ForwardCache(features, h1, h2, logits)


def policy_forward(params: PolicyParams, self_index: int, messages,
                   arena_half: float) -> tuple[np.ndarray, float, ForwardCache]:
    """Full pipeline from pose messages; the cache also supports embed-layer
    gradients."""
    features, raws, embeds = _encode(params, self_index, messages, arena_half)
    logits, value, cache = forward(params, features)
    cache.raws = raws
    cache.embeds = embeds
    return logits, value, cache


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    return shifted - math.log(np.exp(shifted).sum())


def softmax(logits: np.ndarray) -> np.ndarray:
    e = np.exp(logits - logits.max())
    return e / e.sum()


def entropy(logits: np.ndarray) -> float:
    """Shannon entropy of the action distribution, in nats."""
    logp = log_softmax(logits)
    p = np.exp(logp)
    return float(-(p * np.where(p > 0.0, logp, 0.0)).sum())


def loss_value(logits: np.ndarray, value: float, action: int, advantage: float,
               return_target: float, entropy_coeff: float,
               value_coeff: float) -> float:
    """Scalar actor-critic loss; the quantity backward() differentiates."""
    logp = log_softmax(logits)
    return (-float(logp[action]) * advantage
            + value_coeff * (value - return_target) ** 2
            - entropy_coeff * entropy(logits))


def backward(params: PolicyParams, cache: ForwardCache, action: int,
             advantage: float, return_target: float, entropy_coeff: float,
             value_coeff: float) -> PolicyParams:
    """Exact gradients of the actor-critic loss

        L = -log pi(action) * advantage
            + value_coeff * (value - return_target)^2
            - entropy_coeff * H(pi)

    with respect to every parameter array. The advantage is treated as a
    constant. Returns a PolicyParams holding the gradient arrays.
    """
    if cache.features.shape != (FEATURE_SIZE,) or cache.h1.shape != (HIDDEN_SIZE,):
        raise ValueError("cache does not match the parameter shapes")
    if not 0 <= action < N_ACTIONS:
        raise ValueError(f"action index {action} out of range")

    f, h1, h2 = cache.features, cache.h1, cache.h2
    logp = log_softmax(cache.logits)
    p = np.exp(logp)
    value = float(params.value_w[0] @ h2 + params.value_b[0])

    # policy head: d(-logp[a] * A)/dlogits = A * (p - onehot)
    d_logits = advantage * p.copy()
    d_logits[action] -= advantage
    # entropy bonus: d(-H)/dlogits = p * (logp + H)
    ent = float(-(p * np.where(p > 0.0, logp, 0.0)).sum())
    d_logits += entropy_coeff * p * np.where(p > 0.0, logp + ent, 0.0)
    d_value = 2.0 * value_coeff * (value - return_target)

    grads = zeros_like_params()
    grads.policy_w[:] = np.outer(d_logits, h2)
    grads.policy_b[:] = d_logits
    grads.value_w[0, :] = d_value * h2
    grads.value_b[0] = d_value

    d_h2 = params.policy_w.T @ d_logits + params.value_w[0] * d_value
    d_z2 = d_h2 * (1.0 - h2 * h2)
    grads.trunk2_w[:] = np.outer(d_z2, h1)
    grads.trunk2_b[:] = d_z2

    d_h1 = params.trunk2_w.T @ d_z2
    d_z1 = d_h1 * (1.0 - h1 * h1)
    grads.trunk1_w[:] = np.outer(d_z1, f)
    grads.trunk1_b[:] = d_z1

    if cache.raws is not None:
        # mean pooling spreads the feature gradient evenly over the cameras
        d_features = params.trunk1_w.T @ d_z1
        d_embed = d_features[RAW_SIZE:] / cache.raws.shape[0]
        d_z_embed = d_embed * (1.0 - cache.embeds * cache.embeds)
        grads.embed_w[:] = d_z_embed.T @ cache.raws
        grads.embed_b[:] = d_z_embed.sum(axis=0)
    return grads


def compute_returns(rewards: list[float], bootstrap: float,
                    gamma: float) -> list[float]:
    """Discounted returns G_t = r_t + gamma * G_{t+1}, seeded with the
    bootstrap value past the final reward."""
    returns = [0.0] * len(rewards)
    acc = bootstrap
    for i in range(len(rewards) - 1, -1, -1):
        acc = rewards[i] + gamma * acc
        returns[i] = acc
    return returns


def sample_action(probs: np.ndarray, u: float) -> int:
    """Inverse-CDF draw from a probability vector using a uniform u in [0, 1)."""
    acc = 0.0
    for idx in range(len(probs) - 1):
        acc += probs[idx]
        if u < acc:
            return idx
    return len(probs) - 1
