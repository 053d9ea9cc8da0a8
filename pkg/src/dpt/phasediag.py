"""Phase-diagram engine: region classification, grid sweeps, boundaries.

Classification taxonomy (shared by both models):

closed mode
    I    -- the normal/symmetric state is the ground state,
    II   -- the normal state is unphysical (imaginary excitations),
    III  -- the normal state is a physical excited state while the
            symmetry-broken states are the ground states.

open mode
    I     -- NP is the sole stable attractor and the closed ground state,
    II    -- only symmetry-broken attractors are stable,
    III   -- costability: NP and a broken attractor are both stable,
    IIp   -- NP sole stable attractor, closed-system unphysical
             (the dissipation-stabilized region),
    IIIp  -- NP sole stable attractor, closed-system excited,
    UNPHYS -- nothing is stable.

Verdicts use the strict margin 1e-9 on Re(eigenvalue); samples whose
extremal rate sits inside the +-1e-9 band are labeled from the stable
side and flagged as boundary samples so that grid sweeps stay
deterministic when a grid line hits a phase boundary exactly.
"""

from __future__ import annotations

import os
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, is_dataclass, replace
from enum import Enum

from . import idtc, kpo
from .numerics import BracketingError, ValidationError

BOUNDARY_TOL = 1e-9
MAX_GRID_POINTS = 1_000_000


class RegionLabel(Enum):
    """Phase-diagram region labels."""

    I = "I"
    II = "II"
    III = "III"
    IIP = "IIp"
    IIIP = "IIIp"
    UNPHYSICAL = "UNPHYS"


def thread_count(override: int | None = None) -> int:
    """Worker count for sweeps: override, else DPT_THREADS, else cpu-capped."""
    if override is not None:
        value = int(override)
    elif "DPT_THREADS" in os.environ:
        try:
            value = int(os.environ["DPT_THREADS"])
        except ValueError as exc:
            raise ValidationError(f"DPT_THREADS must be an integer: {exc}") from exc
    else:
        value = min(8, os.cpu_count() or 1)
    if value < 1:
        raise ValidationError("thread count must be >= 1")
    return value


# --------------------------------------------------------------------------
# closed-system NP character
# --------------------------------------------------------------------------

def _kpo_closed_character(params: kpo.KpoParams):
    """(ground, unphysical, boundary) of the closed NP at these couplings."""
    ground = kpo.closed_ground_state(params)[0].label == "NP"
    gap2 = params.delta ** 2 - abs(params.pump) ** 2
    scale = max(1.0, params.delta ** 2, abs(params.pump) ** 2)
    boundary = abs(gap2) <= BOUNDARY_TOL * scale
    unphysical = (not boundary) and gap2 < 0
    return ground, unphysical, boundary


def _idtc_closed_character(params: idtc.IdtcParams):
    ground = idtc.closed_ground_state(params)[0].label == "NP"
    # soft-mode frequency squared changes sign with this product
    qx = 4.0 * params.lambda_x ** 2 - params.omega_c * params.omega_z
    qy = 4.0 * params.lambda_y ** 2 - params.omega_c * params.omega_z
    scale = max(1.0, (params.omega_c * params.omega_z) ** 2)
    boundary = abs(qx * qy) <= BOUNDARY_TOL * scale
    unphysical = (not boundary) and qx * qy < 0
    return ground, unphysical, boundary


# --------------------------------------------------------------------------
# open-system attractor survey
# --------------------------------------------------------------------------

def _kpo_survey(params: kpo.KpoParams):
    reports = []
    for state in kpo.open_steady_states(params):
        rep = kpo.stability_report(params, state, want_covariance=False)
        reports.append((state.branch, rep.stable, rep.boundary))
    return reports


def _idtc_survey(params: idtc.IdtcParams):
    reports = []
    seeds = idtc.sp_candidates_closed_form(params)
    for state in idtc.open_steady_states(params, seeds=seeds):
        rep = idtc.stability_report(params, state, want_covariance=False)
        reports.append((state.branch, rep.stable, rep.boundary))
    return reports


_MODELS = {
    "kpo": (_kpo_closed_character, _kpo_survey, kpo.KpoParams),
    "idtc": (_idtc_closed_character, _idtc_survey, idtc.IdtcParams),
}


def classify_point_detailed(model: str, params, mode: str = "open"):
    """(RegionLabel, boundary_sample) for one parameter point."""
    if model not in _MODELS:
        raise ValidationError(f"unknown model '{model}' (use kpo or idtc)")
    if mode not in ("open", "closed"):
        raise ValidationError(f"mode must be open or closed, got '{mode}'")
    character, survey, cls = _MODELS[model]
    if not isinstance(params, cls):
        raise ValidationError(f"model '{model}' expects {cls.__name__}")

    ground, unphysical, char_boundary = character(params)
    if mode == "closed":
        if ground:
            return RegionLabel.I, char_boundary
        return (RegionLabel.II if unphysical else RegionLabel.III), char_boundary

    boundary = False
    np_stable = False
    broken_stable = False
    for branch, stable, on_edge in survey(params):
        boundary = boundary or on_edge
        if branch == 0:
            np_stable = stable or on_edge
        elif stable or on_edge:
            broken_stable = True
    if np_stable and broken_stable:
        return RegionLabel.III, boundary
    if broken_stable:
        return RegionLabel.II, boundary
    if not np_stable:
        return RegionLabel.UNPHYSICAL, boundary
    # NP is the sole stable attractor: sub-classify by the closed character
    boundary = boundary or char_boundary
    if ground:
        return RegionLabel.I, boundary
    if unphysical:
        return RegionLabel.IIP, boundary
    return RegionLabel.IIIP, boundary


def classify_point(model: str, params, mode: str = "open") -> RegionLabel:
    """Region label of one parameter point (see module taxonomy)."""
    return classify_point_detailed(model, params, mode)[0]


# --------------------------------------------------------------------------
# grid sweeps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """One swept parameter axis (inclusive endpoints, uniform)."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValidationError("axis needs at least 2 points")
        if not np.isfinite(self.start) or not np.isfinite(self.stop):
            raise ValidationError("axis endpoints must be finite")
        if self.stop <= self.start:
            raise ValidationError("axis stop must exceed start")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class PhaseDiagram:
    """Sweep result; labels[iy, ix] classifies (x.values()[ix], y.values()[iy])."""

    model: str
    mode: str
    x: GridSpec
    y: GridSpec
    labels: np.ndarray
    boundary_mask: np.ndarray
    boundaries: list


def _check_axis(params, axis: GridSpec):
    names = {f.name for f in fields(params)}
    if axis.name not in names:
        raise ValidationError(f"'{axis.name}' is not a parameter field ({sorted(names)})")


def sweep(model: str, params, x: GridSpec, y: GridSpec, mode: str = "open", max_workers: int | None = None) -> PhaseDiagram:
    """Classify a 2-D parameter grid (deterministic, threaded).

    Both axes must name fields of the parameter record; every other field
    is held at its value in `params`.  The label array is independent of
    the worker count and ordering.
    """
    if not is_dataclass(params):
        raise ValidationError("params must be a model parameter record")
    _check_axis(params, x)
    _check_axis(params, y)
    if x.count * y.count > MAX_GRID_POINTS:
        raise ValidationError("grid exceeds the 1e6-point cap")
    xs, ys = x.values(), y.values()

    def work(flat_index: int):
        iy, ix = divmod(flat_index, x.count)
        point = replace(params, **{x.name: float(xs[ix]), y.name: float(ys[iy])})
        return classify_point_detailed(model, point, mode)

    with ThreadPoolExecutor(max_workers=thread_count(max_workers)) as pool:
        results = list(pool.map(work, range(x.count * y.count)))

    labels = np.empty((y.count, x.count), dtype=object)
    mask = np.zeros((y.count, x.count), dtype=bool)
    for flat, (label, on_edge) in enumerate(results):
        iy, ix = divmod(flat, x.count)
        labels[iy, ix] = label
        mask[iy, ix] = on_edge
    return PhaseDiagram(model=model, mode=mode, x=x, y=y, labels=labels, boundary_mask=mask, boundaries=[])


# --------------------------------------------------------------------------
# boundary tracing
# --------------------------------------------------------------------------

@dataclass
class BoundaryPoint:
    """A label change bracketed to tolerance along a parameter segment."""

    t: float
    params: object
    label_low: RegionLabel
    label_high: RegionLabel


def _lerp_params(a, b, t: float):
    updates = {}
    for f in fields(a):
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, (int, float, complex)) and va != vb:
            updates[f.name] = va + t * (vb - va)
        elif va != vb:
            raise ValidationError(f"cannot interpolate non-numeric field '{f.name}'")
    return replace(a, **updates) if updates else a


def _segment_span(a, b) -> float:
    span = 0.0
    for f in fields(a):
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, (int, float, complex)):
            span = max(span, abs(vb - va))
    return span


def trace_boundary(model: str, params_low, params_high, mode: str = "open", tol: float = 1e-6) -> BoundaryPoint:
    """Bisect a label change along the straight parameter segment.

    The endpoints must carry different labels; the returned point
    brackets the change within `tol` in parameter units.

    Raises
    ------
    BracketingError
        If both endpoints carry the same label.
    """
    if type(params_low) is not type(params_high):
        raise ValidationError("endpoints must be the same parameter type")
    span = _segment_span(params_low, params_high)
    if span <= 0:
        raise ValidationError("endpoints are identical")
    label_low = classify_point(model, params_low, mode)
    label_high = classify_point(model, params_high, mode)
    if label_low == label_high:
        raise BracketingError(f"both endpoints carry label {label_low.value}")
    lo, hi = 0.0, 1.0
    while (hi - lo) * span > tol:
        mid = 0.5 * (lo + hi)
        if classify_point(model, _lerp_params(params_low, params_high, mid), mode) == label_low:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    return BoundaryPoint(
        t=t_star,
        params=_lerp_params(params_low, params_high, t_star),
        label_low=label_low,
        label_high=label_high,
    )
