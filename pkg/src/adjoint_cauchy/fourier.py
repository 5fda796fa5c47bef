"""Conversion between nodal ring data and Fourier coefficients.

``analyze`` turns equispaced ring samples into coefficients via the
discrete Fourier transform, ``synthesize`` goes back, and ``detect_band``
finds the significant mode range of a coefficient set. Real data is kept
exactly conjugate-symmetric so the round trip is the identity on
band-limited functions.
"""

from __future__ import annotations

import warnings

import numpy as np

from .boundary import BoundaryFunction, BoundaryRing
from .spectral import FourierBoundary

__all__ = ["analyze", "synthesize", "detect_band"]

# Relative magnitude below which a coefficient is treated as numerical noise.
BAND_THRESHOLD = 1e-8


def _require_equispaced(ring: BoundaryRing) -> None:
    n = ring.size
    expected = 2.0 * np.pi * np.arange(n) / n
    if not np.allclose(ring.angles, expected, rtol=0.0, atol=1e-12):
        raise ValueError("analysis requires a ring of equispaced nodes starting at angle 0")


def analyze(
    f: BoundaryFunction, max_mode: int | None = None, *, warn_tail: bool = True
) -> FourierBoundary:
    """Fourier coefficients of ring samples, up to ``max_mode``.

    A ring of n nodes resolves modes up to (n - 1) // 2; asking beyond that
    raises, while sample content above the returned band (including the
    even-n Nyquist bin) is discarded with a warning when it is significant.
    ``warn_tail=False`` suppresses the warning; callers that analyze data
    which is band-limited by construction (so any tail is roundoff) use it
    to avoid false alarms on all-noise signals.
    """
    ring = f.ring
    _require_equispaced(ring)
    n = ring.size
    resolvable = (n - 1) // 2
    if max_mode is None:
        max_mode = resolvable
    elif max_mode < 0:
        raise ValueError("max_mode must be nonnegative")
    elif max_mode > resolvable:
        raise ValueError(
            f"requested band {max_mode} exceeds the {resolvable} modes "
            f"resolvable with {n} samples"
        )

    spectrum = np.fft.fft(f.values) / n
    coeffs: dict[int, complex] = {0: complex(spectrum[0].real, 0.0)}
    for j in range(1, max_mode + 1):
        a = complex(spectrum[j])
        coeffs[j] = a
        coeffs[-j] = a.conjugate()

    discarded = np.abs(spectrum[max_mode + 1 : n - max_mode])
    if warn_tail and discarded.size:
        scale = float(np.max(np.abs(spectrum)))
        if scale > 0.0 and float(np.max(discarded)) > BAND_THRESHOLD * scale:
            warnings.warn(
                f"ring data has significant content above mode {max_mode}; "
                "those coefficients were discarded",
                stacklevel=2,
            )
    return FourierBoundary(coeffs, ring.radius)


def synthesize(c: FourierBoundary, ring: BoundaryRing) -> BoundaryFunction:
    """Nodal samples of a coefficient set on ``ring``.

    The coefficients must be conjugate-symmetric (real data) and their band
    must be resolvable on the ring.
    """
    if c.radius != ring.radius:
        raise ValueError("coefficients and ring have different radii")
    if c.max_mode > (ring.size - 1) // 2:
        raise ValueError(
            f"band {c.max_mode} exceeds the {(ring.size - 1) // 2} modes "
            f"resolvable on a ring of {ring.size} nodes"
        )
    if not c.is_real():
        raise ValueError("coefficients are not conjugate-symmetric; data would be complex")

    modes = np.array(c.modes, dtype=float)
    amps = np.array([c.coeffs[j] for j in c.modes], dtype=complex)
    phases = np.exp(1j * np.outer(ring.angles, modes))
    values = phases @ amps
    return BoundaryFunction(ring, values.real)


def detect_band(c: FourierBoundary, rel_threshold: float = BAND_THRESHOLD) -> tuple[int, int] | None:
    """Smallest and largest significant |mode| of a coefficient set.

    Significance is relative to the largest coefficient magnitude. Returns
    None when every coefficient vanishes, signalling that no band exists;
    callers typically fall back to mode 0 and a large cap.
    """
    if not c.coeffs:
        return None
    scale = max(abs(a) for a in c.coeffs.values())
    if scale == 0.0:
        return None
    significant = {abs(j) for j, a in c.coeffs.items() if abs(a) > rel_threshold * scale}
    return min(significant), max(significant)
