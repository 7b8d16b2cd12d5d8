"""Finite Gabor analysis on C^L: frames, duals, twisted convolution, densities."""

from ._validation import InconclusiveError, NotAFrameError
from .estimators import STFT, GaborFrame
from .gabor import (
    FrameBounds,
    GaborSystem,
    JanssenRep,
    analysis,
    build_system,
    density_trace_probe,
    dual_window,
    frame_bounds,
    frame_operator,
    janssen,
    normalized_trace,
    synthesis,
)
from .tfcore import istft, stft, tf_shift
from .twisted import (
    SingularAtTruncationError,
    TwistedSequence,
    spectral_radius_l1,
    spectral_radius_l2,
    twisted_conv,
    twisted_involution,
    wiener_invert,
)

__version__ = "0.1.0"

__all__ = [
    "FrameBounds",
    "GaborFrame",
    "GaborSystem",
    "InconclusiveError",
    "JanssenRep",
    "NotAFrameError",
    "STFT",
    "SingularAtTruncationError",
    "TwistedSequence",
    "analysis",
    "build_system",
    "density_trace_probe",
    "dual_window",
    "frame_bounds",
    "frame_operator",
    "istft",
    "janssen",
    "normalized_trace",
    "spectral_radius_l1",
    "spectral_radius_l2",
    "stft",
    "synthesis",
    "tf_shift",
    "twisted_conv",
    "twisted_involution",
    "wiener_invert",
]
