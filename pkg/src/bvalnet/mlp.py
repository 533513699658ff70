"""A 7-15-1 logistic-sigmoid network trained by online backpropagation.

Everything is plain numpy. Inputs are min-max scaled with statistics from
the training set and targets are divided by a fixed magnitude scale so they
fit the sigmoid's (0, 1) output range.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ModelFormatError, ValidationError

MODEL_MAGIC = "QBNET v1"
DEFAULT_MAGNITUDE_SCALE = 8.0


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int = 7
    hidden_dim: int = 15
    output_dim: int = 1

    def __post_init__(self):
        if min(self.input_dim, self.hidden_dim, self.output_dim) < 1:
            raise ValidationError("network dimensions must be positive")


@dataclass
class Network:
    hidden_weights: np.ndarray  # (hidden, input)
    hidden_bias: np.ndarray  # (hidden,)
    output_weights: np.ndarray  # (output, hidden)
    output_bias: np.ndarray  # (output,)

    @property
    def config(self) -> NetworkConfig:
        h, i = self.hidden_weights.shape
        return NetworkConfig(i, h, self.output_weights.shape[0])

    def parameters(self) -> tuple[np.ndarray, ...]:
        return (self.hidden_weights, self.hidden_bias, self.output_weights, self.output_bias)

    def copy(self) -> Network:
        return Network(*(p.copy() for p in self.parameters()))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.parameters()])

    def with_vector(self, theta: np.ndarray) -> Network:
        """A network of the same shape holding the flat parameters ``theta``."""
        parts, offset = [], 0
        for p in self.parameters():
            parts.append(np.asarray(theta[offset : offset + p.size], dtype=float).reshape(p.shape).copy())
            offset += p.size
        if offset != len(theta):
            raise ValidationError(f"expected {offset} parameters, got {len(theta)}")
        return Network(*parts)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())


def sigmoid(z):
    # split by sign so exp never overflows
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_network(config: NetworkConfig = NetworkConfig(), seed: int = 0) -> Network:
    """Glorot-uniform weights, zero biases, reproducible per seed."""
    rng = np.random.default_rng(seed)
    r1 = np.sqrt(6.0 / (config.input_dim + config.hidden_dim))
    r2 = np.sqrt(6.0 / (config.hidden_dim + config.output_dim))
    return Network(
        hidden_weights=rng.uniform(-r1, r1, size=(config.hidden_dim, config.input_dim)),
        hidden_bias=np.zeros(config.hidden_dim),
        output_weights=rng.uniform(-r2, r2, size=(config.output_dim, config.hidden_dim)),
        output_bias=np.zeros(config.output_dim),
    )


def _forward(net: Network, x: np.ndarray):
    h = sigmoid(net.hidden_weights @ x + net.hidden_bias)
    out = sigmoid(net.output_weights @ h + net.output_bias)
    return h, out


def forward(net: Network, x) -> float:
    """Network output for one normalized input vector, in (0, 1)."""
    _, out = _forward(net, np.asarray(x, dtype=float))
    return float(out[0])


def forward_batch(net: Network, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        return np.empty(0)
    H = sigmoid(X @ net.hidden_weights.T + net.hidden_bias)
    return sigmoid(H @ net.output_weights.T + net.output_bias)[:, 0]


def loss(net: Network, x, y: float) -> float:
    return 0.5 * (forward(net, x) - y) ** 2


def mean_loss(net: Network, X, Y) -> float:
    out = forward_batch(net, X)
    return float(np.mean(0.5 * (out - np.asarray(Y, dtype=float)) ** 2))


def gradients(net: Network, x, y: float) -> Network:
    """Gradient of ``0.5 * (out - y)**2`` w.r.t. every parameter.

    Returned as a Network whose arrays hold the partial derivatives.
    """
    x = np.asarray(x, dtype=float)
    h, out = _forward(net, x)
    delta_out = (out - y) * out * (1.0 - out)  # (output,)
    delta_hidden = (net.output_weights.T @ delta_out) * h * (1.0 - h)  # (hidden,)
    return Network(
        hidden_weights=np.outer(delta_hidden, x),
        hidden_bias=delta_hidden,
        output_weights=np.outer(delta_out, h),
        output_bias=delta_out,
    )


@dataclass(frozen=True)
class TrainParams:
    epochs: int = 500
    learning_rate: float = 0.1
    seed: int = 0
    shuffle: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError("epochs must be at least 1")
        if not self.learning_rate >= 0:
            raise ValidationError("learning_rate must be non-negative")


def train(net: Network, X, Y, params: TrainParams = TrainParams()) -> tuple[Network, np.ndarray]:
    """Online gradient descent, one update per pattern.

    Patterns are presented in the given order every epoch unless
    ``params.shuffle`` is set, in which case a permutation is drawn per epoch
    from ``params.seed``.

    Args:
        net: starting network; it is copied, not modified.
        X: normalized inputs, shape ``(n, input_dim)``.
        Y: normalized targets, shape ``(n,)``.
        params: epochs, learning rate, seed and ordering.

    Returns:
        The trained network and the mean loss over the whole set measured
        after each epoch (length ``params.epochs``).
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise ValidationError("training set is empty")
    if len(X) != len(Y):
        raise ValidationError(f"{len(X)} inputs but {len(Y)} targets")
    net = net.copy()
    lr = params.learning_rate
    rng = np.random.default_rng(params.seed)
    history = np.empty(params.epochs)
    order = np.arange(len(X))
    W1, b1, W2, b2 = net.parameters()
    for epoch in range(params.epochs):
        if params.shuffle:
            order = rng.permutation(len(X))
        for i in order:
            g = gradients(net, X[i], Y[i])
            # in-place so the Network keeps referencing the same arrays
            W1 -= lr * g.hidden_weights
            b1 -= lr * g.hidden_bias
            W2 -= lr * g.output_weights
            b2 -= lr * g.output_bias
        history[epoch] = mean_loss(net, X, Y)
    return net, history


@dataclass
class Normalizer:
    """Per-feature min-max input scaling and fixed target scaling."""

    minimum: np.ndarray
    maximum: np.ndarray
    magnitude_scale: float = DEFAULT_MAGNITUDE_SCALE

    def __post_init__(self):
        self.minimum = np.asarray(self.minimum, dtype=float)
        self.maximum = np.asarray(self.maximum, dtype=float)
        if self.minimum.shape != self.maximum.shape:
            raise ValidationError("minimum and maximum must have the same shape")
        if np.any(self.minimum > self.maximum):
            raise ValidationError("minimum exceeds maximum for some feature")
        if not self.magnitude_scale > 0:
            raise ValidationError("magnitude_scale must be positive")

    @classmethod
    def fit(cls, X, magnitude_scale: float = DEFAULT_MAGNITUDE_SCALE) -> Normalizer:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[0] == 0:
            raise ValidationError("cannot fit a normalizer on an empty set")
        return cls(X.min(axis=0), X.max(axis=0), magnitude_scale)

    def transform(self, X) -> np.ndarray:
        # no clamping: unseen data may land outside [0, 1]
        span = self.maximum - self.minimum
        span = np.where(span > 0, span, 1.0)
        return (np.asarray(X, dtype=float) - self.minimum) / span

    def scale_targets(self, Y) -> np.ndarray:
        return np.asarray(Y, dtype=float) / self.magnitude_scale

    def unscale_outputs(self, out) -> np.ndarray:
        return np.asarray(out, dtype=float) * self.magnitude_scale


def predict(net: Network, X, normalizer: Normalizer) -> np.ndarray:
    """Raw network outputs (in the normalized target scale) for raw inputs."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.empty(0)
    return forward_batch(net, normalizer.transform(X))


def _row(values) -> str:
    return " ".join(repr(float(v)) for v in np.ravel(values))


def format_model(net: Network, normalizer: Normalizer) -> str:
    cfg = net.config
    pairs = np.column_stack([normalizer.minimum, normalizer.maximum]).ravel()
    lines = [
        MODEL_MAGIC,
        f"{cfg.input_dim} {cfg.hidden_dim} {cfg.output_dim}",
        _row(np.append(pairs, normalizer.magnitude_scale)),
    ]
    lines += [_row(r) for r in net.hidden_weights]
    lines.append(_row(net.hidden_bias))
    lines += [_row(r) for r in net.output_weights]
    lines.append(_row(net.output_bias))
    return "\n".join(lines) + "\n"


def save_model(path: str | Path, net: Network, normalizer: Normalizer) -> None:
    Path(path).write_text(format_model(net, normalizer), encoding="utf-8")


def parse_model(text: str, config: NetworkConfig | None = None) -> tuple[Network, Normalizer]:
    """Inverse of :func:`format_model`.

    Raises:
        ModelFormatError: wrong header, dimensions that disagree with
            ``config``, wrong row lengths, truncation or bad numbers.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != MODEL_MAGIC:
        raise ModelFormatError(f"expected header {MODEL_MAGIC!r}")

    def numbers(idx, expected, what):
        if idx >= len(lines):
            raise ModelFormatError(f"file truncated before {what}")
        try:
            vals = np.array([float(t) for t in lines[idx].split()])
        except ValueError:
            raise ModelFormatError(f"malformed number in {what} (line {idx + 1})") from None
        if len(vals) != expected:
            raise ModelFormatError(f"{what} has {len(vals)} values, expected {expected}")
        if not np.all(np.isfinite(vals)):
            raise ModelFormatError(f"non-finite value in {what}")
        return vals

    try:
        dims = [int(t) for t in lines[1].split()] if len(lines) > 1 else []
    except ValueError:
        raise ModelFormatError("malformed dimension line") from None
    if len(dims) != 3 or min(dims) < 1:
        raise ModelFormatError("dimension line must hold three positive integers")
    n_in, n_hid, n_out = dims
    if config is not None and (n_in, n_hid, n_out) != (config.input_dim, config.hidden_dim, config.output_dim):
        raise ModelFormatError(
            f"model dimensions {n_in}-{n_hid}-{n_out} do not match "
            f"{config.input_dim}-{config.hidden_dim}-{config.output_dim}"
        )
    norm = numbers(2, 2 * n_in + 1, "normalizer")
    idx = 3
    w1 = np.array([numbers(idx + r, n_in, "hidden weights") for r in range(n_hid)])
    idx += n_hid
    b1 = numbers(idx, n_hid, "hidden bias")
    idx += 1
    w2 = np.array([numbers(idx + r, n_hid, "output weights") for r in range(n_out)])
    idx += n_out
    b2 = numbers(idx, n_out, "output bias")
    idx += 1
    if idx != len(lines):
        raise ModelFormatError(f"{len(lines) - idx} unexpected trailing lines")
    pairs = norm[:-1].reshape(n_in, 2)
    try:
        normalizer = Normalizer(pairs[:, 0], pairs[:, 1], float(norm[-1]))
    except ValidationError as exc:
        raise ModelFormatError(str(exc)) from None
    return Network(w1, b1, w2, b2), normalizer


def load_model(path: str | Path, config: NetworkConfig | None = NetworkConfig()) -> tuple[Network, Normalizer]:
    return parse_model(Path(path).read_text(encoding="utf-8"), config)
