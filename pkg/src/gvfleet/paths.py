"""Parametric paths and the guiding vector fields built on top of them.

A path is a map ``f : omega -> R^dim`` (dim 2 for surface vessels, 3 for
aerial vehicles) with analytic partials ``df`` and ``ddf``.  The built-in
kinds (circle, lissajous, and generic cosine series) also carry a
coefficient table so the simulation kernels can evaluate them without
calling back into Python; ``custom_path`` accepts arbitrary closures but is
then usable only through this module's functions, not the fused simulator.

Two vector fields are provided:

* ``gvf_physical`` -- the classic field on the workspace itself, built from
  implicit level sets.  It has singular points (e.g. the circle centre) and
  is included for demonstration and contrast.
* ``gvf_augmented`` -- the field on the workspace extended by the virtual
  coordinate omega.  Its last component contains a constant +-1 term, so it
  never vanishes; this is the field the fleet controllers are derived from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import UnsupportedPathError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PathSpec:
    """A parametric path with analytic first and second partials.

    ``offsets``/``terms`` hold the cosine-series table for built-in kinds:
    ``f_j(w) = offsets[j] + sum_t amp * cos(freq * w + phase)`` with
    ``terms[j, t] = (amp, freq, phase)``.  They are ``None`` for closure-
    backed custom paths.
    """

    dim: int
    kind: str
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    ddf: Callable[[np.ndarray], np.ndarray]
    period: Optional[float] = None
    offsets: Optional[np.ndarray] = None
    terms: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    @property
    def has_table(self) -> bool:
        return self.offsets is not None and self.terms is not None


@dataclass(frozen=True)
class PathError:
    """Signed componentwise deviation ``phi = q - f(omega)`` in metres."""

    phi: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.phi))


def _table_functions(offsets, terms):
    offsets = np.asarray(offsets, dtype=np.float64)
    terms = np.asarray(terms, dtype=np.float64)

    def f(omega):
        w = np.asarray(omega, dtype=np.float64)
        arg = terms[..., 1] * w[..., None, None] + terms[..., 2]
        return offsets + np.sum(terms[..., 0] * np.cos(arg), axis=-1)

    def df(omega):
        w = np.asarray(omega, dtype=np.float64)
        arg = terms[..., 1] * w[..., None, None] + terms[..., 2]
        return np.sum(-terms[..., 0] * terms[..., 1] * np.sin(arg), axis=-1)

    def ddf(omega):
        w = np.asarray(omega, dtype=np.float64)
        arg = terms[..., 1] * w[..., None, None] + terms[..., 2]
        return np.sum(-terms[..., 0] * terms[..., 1] ** 2 * np.cos(arg), axis=-1)

    return offsets, terms, f, df, ddf


def _common_period(frequencies) -> Optional[float]:
    """Smallest common period of cos(freq*w) terms, None if incommensurable."""
    fracs = []
    for fr in frequencies:
        if fr == 0.0:
            continue
        frac = Fraction(abs(float(fr))).limit_denominator(10_000)
        if abs(float(frac) - abs(float(fr))) > 1e-12:
            return None
        fracs.append(frac)
    if not fracs:
        return None
    # period of cos(f*w) is 2pi/f; lcm of rationals p/q is lcm(p)/gcd(q)
    inv = [Fraction(f.denominator, f.numerator) for f in fracs]
    num = inv[0].numerator
    den = inv[0].denominator
    for f in inv[1:]:
        num = num * f.numerator // np.gcd(num, f.numerator)
        den = np.gcd(den, f.denominator)
    return TWO_PI * num / den


def circle_path(center, radius: float, altitude: Optional[float] = None) -> PathSpec:
    """Circle of given centre/radius; a fixed altitude makes it a 3D path."""
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    cx, cy = (float(c) for c in center)
    offsets = [cx, cy]
    terms = [
        [[radius, 1.0, 0.0]],
        [[radius, 1.0, -np.pi / 2.0]],  # cos(w - pi/2) = sin(w)
    ]
    if altitude is not None:
        offsets.append(float(altitude))
        terms.append([[0.0, 0.0, 0.0]])
    offsets, terms, f, df, ddf = _table_functions(offsets, terms)
    return PathSpec(
        dim=len(offsets),
        kind="circle",
        f=f,
        df=df,
        ddf=ddf,
        period=TWO_PI,
        offsets=offsets,
        terms=terms,
        params={"center": (cx, cy), "radius": float(radius), "altitude": altitude},
    )


def lissajous_path(amplitude, frequency, phase, offset) -> PathSpec:
    """Per-axis cosine curve ``off_j + amp_j * cos(freq_j * w + phase_j)``."""
    amplitude = np.asarray(amplitude, dtype=np.float64)
    frequency = np.asarray(frequency, dtype=np.float64)
    phase = np.asarray(phase, dtype=np.float64)
    offset = np.asarray(offset, dtype=np.float64)
    dim = amplitude.shape[0]
    if not (frequency.shape[0] == phase.shape[0] == offset.shape[0] == dim):
        raise ValueError("amplitude/frequency/phase/offset lengths differ")
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    terms = [[[amplitude[j], frequency[j], phase[j]]] for j in range(dim)]
    offsets, terms, f, df, ddf = _table_functions(offset, terms)
    return PathSpec(
        dim=dim,
        kind="lissajous",
        f=f,
        df=df,
        ddf=ddf,
        period=_common_period(frequency),
        offsets=offsets,
        terms=terms,
        params={
            "amplitude": amplitude.tolist(),
            "frequency": frequency.tolist(),
            "phase": phase.tolist(),
            "offset": offset.tolist(),
        },
    )


def trig_series_path(offsets, terms, period: Optional[float] = None) -> PathSpec:
    """Custom path given directly as a cosine-series table per axis."""
    terms = np.asarray(terms, dtype=np.float64)
    if terms.ndim != 3 or terms.shape[2] != 3:
        raise ValueError("terms must have shape (dim, n_terms, 3)")
    offsets, terms, f, df, ddf = _table_functions(offsets, terms)
    dim = offsets.shape[0]
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if period is None:
        period = _common_period(terms[..., 1].ravel())
    return PathSpec(dim=dim, kind="custom", f=f, df=df, ddf=ddf,
                    period=period, offsets=offsets, terms=terms)


def custom_path(f, df, ddf, dim: int, period: Optional[float] = None) -> PathSpec:
    """Closure-backed path.  Usable with this module, not the fused simulator."""
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    return PathSpec(dim=dim, kind="custom", f=f, df=df, ddf=ddf, period=period)


def eval_path(path: PathSpec, omega) -> np.ndarray:
    """Path point ``f(omega)``; broadcasts over arrays of omega."""
    omega = np.asarray(omega, dtype=np.float64)
    if not np.all(np.isfinite(omega)):
        raise ValueError("omega must be finite")
    return path.f(omega)


def path_error(path: PathSpec, q, omega) -> PathError:
    """Componentwise error ``phi = q - f(omega)``."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape[-1] != path.dim:
        raise ValueError(f"q has dim {q.shape[-1]}, path has dim {path.dim}")
    return PathError(phi=q - eval_path(path, omega))


def gvf_physical(path: PathSpec, q, gains) -> np.ndarray:
    """Workspace guiding vector field from implicit level sets (circle only).

    The propagation term is the rotated gradient (cross-product construction
    in 2D), the convergence term is gradient descent on the squared level
    value.  Vanishes at the circle centre -- the singularity the augmented
    field removes.
    """
    if path.kind != "circle" or path.dim != 2:
        raise UnsupportedPathError(
            f"gvf_physical supports only the planar circle, got {path.kind}/{path.dim}d"
        )
    q = np.asarray(q, dtype=np.float64)
    gains = np.atleast_1d(np.asarray(gains, dtype=np.float64))
    if gains.shape[-1] != path.dim - 1:
        raise ValueError(f"expected {path.dim - 1} gain(s), got {gains.shape[-1]}")
    center = np.asarray(path.params["center"], dtype=np.float64)
    radius = path.params["radius"]
    rel = q - center
    level = np.sum(rel * rel, axis=-1) - radius**2
    grad = 2.0 * rel
    rotated = np.stack([-grad[..., 1], grad[..., 0]], axis=-1)  # 90 deg CCW
    return rotated - gains[..., 0, None] * level[..., None] * grad


def gvf_augmented(path: PathSpec, q, omega, gains, sign: float = -1.0) -> np.ndarray:
    """Guiding field on the omega-augmented space, shape ``(..., dim+1)``.

    First ``dim`` components: ``sign*df_j - k_j*phi_j``.  Last component:
    ``sign + sum_j k_j*phi_j*df_j``.  With ``phi = 0`` the last component is
    exactly ``sign``, so the field never vanishes.
    """
    gains = np.asarray(gains, dtype=np.float64)
    if gains.shape[-1] != path.dim:
        raise ValueError(f"expected {path.dim} gains, got {gains.shape[-1]}")
    if np.any(gains <= 0.0):
        raise ValueError("gains must be strictly positive")
    if sign not in (-1.0, 1.0):
        raise ValueError(f"sign must be -1 or +1, got {sign}")
    phi = path_error(path, q, omega).phi
    df = path.df(np.asarray(omega, dtype=np.float64))
    spatial = sign * df - gains * phi
    last = sign + np.sum(gains * phi * df, axis=-1)
    return np.concatenate([spatial, last[..., None]], axis=-1)


def validate_partials(path: PathSpec, omega_range=(-2.0 * TWO_PI, 2.0 * TWO_PI),
                      samples: int = 257, rtol: float = 1e-6) -> None:
    """Check df (and ddf) against central differences of f; raises on mismatch."""
    lo, hi = omega_range
    omega = np.linspace(lo, hi, samples)
    h = 1e-5 * max(1.0, hi - lo) / samples
    fd1 = (path.f(omega + h) - path.f(omega - h)) / (2.0 * h)
    fd2 = (path.df(omega + h) - path.df(omega - h)) / (2.0 * h)
    scale1 = np.maximum(np.abs(path.df(omega)), 1.0)
    scale2 = np.maximum(np.abs(path.ddf(omega)), 1.0)
    err1 = np.max(np.abs(fd1 - path.df(omega)) / scale1)
    err2 = np.max(np.abs(fd2 - path.ddf(omega)) / scale2)
    if err1 > rtol:
        raise ValueError(f"df disagrees with finite difference of f (rel err {err1:.2e})")
    if err2 > rtol:
        raise ValueError(f"ddf disagrees with finite difference of df (rel err {err2:.2e})")


def bounds_report(path: PathSpec, omega_range, samples: int = 2048) -> dict:
    """Sampled sup-norms of f, df, ddf over the given omega interval.

    The boundedness requirement nominally targets the derivatives; the value
    itself is reported too since the displayed form of the assumption lists
    it.  All three must be finite for a usable path.
    """
    lo, hi = omega_range
    omega = np.linspace(lo, hi, samples)
    report = {
        "sup_f": float(np.max(np.abs(path.f(omega)))),
        "sup_df": float(np.max(np.abs(path.df(omega)))),
        "sup_ddf": float(np.max(np.abs(path.ddf(omega)))),
    }
    report["bounded"] = all(np.isfinite(v) for v in report.values())
    return report
