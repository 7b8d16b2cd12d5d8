"""scikit-learn compatible transformers built on the functional core."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_signal, check_signals
from .gabor import analysis, build_system, dual_window, frame_bounds, synthesis
from .tfcore import istft, stft
from .windows import make_window


def _resolve_window(window, L):
    if isinstance(window, str):
        return make_window(window, L)
    return check_signal(window, "window", length=L)


class STFT(BaseEstimator, TransformerMixin):
    """Full-grid windowed Fourier transform.

    ``transform`` maps each row of length L to the flattened L x L grid;
    ``inverse_transform`` undoes it exactly.
    """

    def __init__(self, window="gaussian"):
        self.window = window

    def fit(self, X, y=None):
        X = check_signals(X)
        self.n_features_in_ = X.shape[1]
        self.window_ = _resolve_window(self.window, X.shape[1])
        return self

    def transform(self, X):
        check_is_fitted(self, "window_")
        X = check_signals(X, length=self.n_features_in_)
        return np.stack([stft(x, self.window_).ravel() for x in X])

    def inverse_transform(self, V):
        check_is_fitted(self, "window_")
        L = self.n_features_in_
        V = np.asarray(V).reshape(-1, L, L)
        return np.stack([istft(v, self.window_) for v in V])


class GaborFrame(BaseEstimator, TransformerMixin):
    """Gabor frame with time step `a` and frequency step `b`.

    ``fit`` learns L from the data and computes frame bounds and the
    canonical dual window; it raises ``NotAFrameError`` when the system
    does not span.  ``transform`` returns flattened analysis coefficients
    and ``inverse_transform`` synthesises with the dual window.
    """

    def __init__(self, window="gaussian", a=1, b=1):
        self.window = window
        self.a = a
        self.b = b

    def fit(self, X, y=None):
        X = check_signals(X)
        L = X.shape[1]
        self.n_features_in_ = L
        self.system_ = build_system(_resolve_window(self.window, L), self.a, self.b)
        self.bounds_ = frame_bounds(self.system_)
        self.dual_window_ = dual_window(self.system_, bounds=self.bounds_)
        self.dual_system_ = self.system_.with_window(self.dual_window_)
        return self

    def transform(self, X):
        check_is_fitted(self, "system_")
        X = check_signals(X, length=self.n_features_in_)
        return np.stack([analysis(self.system_, x).ravel() for x in X])

    def inverse_transform(self, C):
        check_is_fitted(self, "system_")
        shape = self.system_.coef_shape
        C = np.asarray(C).reshape((-1,) + shape)
        return np.stack([synthesis(self.dual_system_, c) for c in C])
