"""Binary logistic regression trained by full-batch gradient descent.

The objective is mean logistic loss plus an L2 penalty on the weights
(bias unpenalized). The default step rule is backtracking line search
(Armijo condition), which makes the recorded loss sequence provably
non-increasing; a fixed-step rule is available for comparison.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, NumericError, ShapeError

__all__ = ["LogisticRegression", "logistic_gradient", "logistic_loss", "sigmoid"]

STEP_RULES = ("backtracking", "fixed")

_ARMIJO_C = 1e-4
_BACKTRACK = 0.5
_STEP_GROW = 2.0
_STEP_MAX = 1e12
_STEP_MIN = 1e-300


def sigmoid(x):
    """Numerically stable logistic function 1 / (1 + e^-x).

    Uses e^x / (1 + e^x) on the negative branch so no exp overflows,
    whatever the magnitude of x.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    if out.ndim == 0:
        return float(out)
    return out


def _scores(X, w, b):
    return X @ w + b


def logistic_loss(X, y, w, b, l2_lambda=0.0) -> float:
    """Mean logistic loss + (l2_lambda / 2) * ||w||^2."""
    s = _scores(X, w, b)
    data = np.mean(np.logaddexp(0.0, s) - y * s)
    return float(data + 0.5 * l2_lambda * (w @ w))


def logistic_gradient(X, y, w, b, l2_lambda=0.0):
    """Gradient of `logistic_loss` with respect to (w, b)."""
    residual = (sigmoid(_scores(X, w, b)) - y) / X.shape[0]
    gw = X.T @ residual + l2_lambda * w
    gb = float(residual.sum())
    return gw, gb


class LogisticRegression:
    """Gradient-descent logistic classifier.

    Parameters
    ----------
    max_iter : int
        Cap on descent iterations.
    tol : float
        Stop once the gradient infinity norm drops to ``tol``.
    l2_lambda : float | None
        L2 penalty strength; ``None`` uses 1/N at fit time (the
        conventional unit-strength regularization).
    step_rule : str
        ``"backtracking"`` (Armijo line search, monotone loss) or
        ``"fixed"`` (constant ``learning_rate``).

    After `fit`: ``weights``, ``bias``, ``converged``, ``iters_used``,
    and the per-iteration ``loss_history``.
    """

    def __init__(
        self,
        max_iter: int = 1000,
        tol: float = 1e-6,
        l2_lambda: float | None = None,
        step_rule: str = "backtracking",
        learning_rate: float = 0.1,
    ):
        if max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
        if l2_lambda is not None and l2_lambda < 0:
            raise ConfigError(f"l2_lambda must be >= 0, got {l2_lambda}")
        if step_rule not in STEP_RULES:
            raise ConfigError(f"step_rule must be one of {STEP_RULES}, got {step_rule!r}")
        self.max_iter = max_iter
        self.tol = tol
        self.l2_lambda = l2_lambda
        self.step_rule = step_rule
        self.learning_rate = learning_rate
        self.weights = None
        self.bias = 0.0
        self.converged = False
        self.iters_used = 0
        self.loss_history: list[float] = []

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64).ravel()
        if X.ndim != 2 or X.shape[0] == 0:
            raise ShapeError(f"training matrix must be non-empty 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ShapeError(f"{X.shape[0]} rows but {y.shape[0]} labels")
        n, width = X.shape
        lam = self.l2_lambda if self.l2_lambda is not None else 1.0 / n

        w = np.zeros(width)
        b = 0.0
        s = np.zeros(n)
        step = 1.0
        self.loss_history = []
        self.converged = False
        self.iters_used = 0

        # overflow becomes NaN/Inf and is caught by the explicit checks below
        with np.errstate(over="ignore", invalid="ignore"):
            for it in range(1, self.max_iter + 1):
                p = sigmoid(s)
                loss = float(np.mean(np.logaddexp(0.0, s) - y * s) + 0.5 * lam * (w @ w))
                if not np.isfinite(loss):
                    raise NumericError(f"non-finite loss at iteration {it}")
                self.loss_history.append(loss)

                residual = (p - y) / n
                gw = X.T @ residual + lam * w
                gb = float(residual.sum())
                if not (np.isfinite(gw).all() and np.isfinite(gb)):
                    raise NumericError(f"non-finite gradient at iteration {it}")
                if max(np.abs(gw).max(), abs(gb)) <= self.tol:
                    self.converged = True
                    break

                if self.step_rule == "fixed":
                    step = self.learning_rate
                    w = w - step * gw
                    b = b - step * gb
                    s = _scores(X, w, b)
                else:
                    # one matvec per iteration: scores are affine in the step size
                    Xg = X @ gw
                    g2 = float(gw @ gw) + gb * gb
                    ww = float(w @ w)
                    wg = float(w @ gw)
                    gg = float(gw @ gw)
                    step = min(step * _STEP_GROW, _STEP_MAX)
                    while True:
                        s_try = s - step * Xg - step * gb
                        data = np.mean(np.logaddexp(0.0, s_try) - y * s_try)
                        penalty = 0.5 * lam * (ww - 2.0 * step * wg + step * step * gg)
                        if data + penalty <= loss - _ARMIJO_C * step * g2:
                            break
                        step *= _BACKTRACK
                        if step < _STEP_MIN:
                            break
                    if step < _STEP_MIN:
                        break  # line search exhausted; stationary for practical purposes
                    w = w - step * gw
                    b = b - step * gb
                    s = s_try
                self.iters_used = it

        self.weights = w
        self.bias = b
        return self

    def _check_width(self, X):
        X = np.asarray(X, dtype=np.float64)
        if self.weights is None:
            raise ShapeError("model is not fitted")
        if X.ndim != 2 or X.shape[1] != self.weights.shape[0]:
            raise ShapeError(
                f"query width {X.shape[-1] if X.ndim else '?'} does not match "
                f"training width {self.weights.shape[0]}"
            )
        return X

    def predict_proba(self, X):
        """Per-row probability of the positive class."""
        X = self._check_width(X)
        return sigmoid(_scores(X, self.weights, self.bias))

    def predict(self, X):
        """Binary labels; probability >= 0.5 maps to 1."""
        return (self.predict_proba(X) >= 0.5).astype(np.int64)
