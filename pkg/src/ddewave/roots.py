"""Zero finding for det Delta(z) with multiplicities, and orbit stability.

The counting tool is the argument principle: the number of zeros inside a
contour, counted with multiplicity, is the contour integral of the
logarithmic derivative divided by 2*pi*i.  A search region (by default the
disk |z| <= 1/mu_min, so that every Floquet multiplier with modulus at least
mu_min corresponds to a zero inside) is quadrisected recursively until each
cell isolates a single root cluster, which is then polished by Newton
iteration on the logarithmic derivative and assigned its multiplicity by a
small-circle count.  Completeness is enforced: the multiplicities must sum
to the winding number of the full region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charmat import CharMatrixEvaluator
from .errors import ClusterResolutionError, ContourError, SingularMatrixError

# Gauss-Kronrod 7-15 nodes and weights on [-1, 1]
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])
_G_IDX = np.arange(1, 15, 2)

_TWO_PI_I = 2j * np.pi


# ---------------------------------------------------------------------------
# contours

@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float

    def edges(self):
        """Four quarter arcs, each as (z(t), z'(t)) callables on [0, 1]."""
        c, r = self.center, self.radius

        def make(theta0):
            def zmap(t):
                ang = theta0 + t * (np.pi / 2)
                z = c + r * np.exp(1j * ang)
                dz = r * 1j * (np.pi / 2) * np.exp(1j * ang)
                return z, dz
            return zmap

        return [make(k * np.pi / 2) for k in range(4)]

    def dilate(self, factor: float) -> "CircleContour":
        return CircleContour(self.center, self.radius * factor)

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) <= self.radius


@dataclass(frozen=True)
class RectContour:
    lo: complex  # lower-left corner
    hi: complex  # upper-right corner

    def edges(self):
        a, b = self.lo, self.hi
        corners = [a, complex(b.real, a.imag), b, complex(a.real, b.imag), a]

        def make(p, q):
            def zmap(t):
                z = p + t * (q - p)
                dz = np.broadcast_to(q - p, np.shape(t)).astype(complex) \
                    if np.ndim(t) else q - p
                return z, dz
            return zmap

        return [make(corners[i], corners[i + 1]) for i in range(4)]

    def dilate(self, factor: float) -> "RectContour":
        c = (self.lo + self.hi) / 2
        return RectContour(c + (self.lo - c) * factor, c + (self.hi - c) * factor)

    def contains(self, z: complex) -> bool:
        return (self.lo.real <= z.real <= self.hi.real
                and self.lo.imag <= z.imag <= self.hi.imag)


# ---------------------------------------------------------------------------
# data types

@dataclass
class SearchRegion:
    """Bounded region of the z-plane in which all roots are located.

    ``mu_min`` is the smallest multiplier modulus of interest; for the disk
    kind the region radius is 1/mu_min.
    """

    kind: str  # "disk" or "rectangle"
    center: complex = 0.0
    radius: float = 0.0
    corners: tuple[complex, complex] | None = None
    mu_min: float = 0.01

    @classmethod
    def disk(cls, mu_min: float = 0.01, center: complex = 0.0) -> "SearchRegion":
        if not 0 < mu_min < 1:
            raise ValueError("mu_min must lie in (0, 1)")
        return cls(kind="disk", center=center, radius=1.0 / mu_min, mu_min=mu_min)

    @classmethod
    def rectangle(cls, lo: complex, hi: complex,
                  mu_min: float = 0.01) -> "SearchRegion":
        return cls(kind="rectangle", corners=(lo, hi), mu_min=mu_min)

    def outer_contour(self):
        if self.kind == "disk":
            return CircleContour(self.center, self.radius)
        if self.kind == "rectangle":
            return RectContour(*self.corners)
        raise ValueError(f"unknown region kind {self.kind!r}")

    def bounding_box(self) -> tuple[complex, complex]:
        if self.kind == "disk":
            c, r = self.center, self.radius
            return complex(c.real - r, c.imag - r), complex(c.real + r, c.imag + r)
        return self.corners


@dataclass
class RootRecord:
    """A located zero of det Delta with its multiplier mu = 1/z."""

    z: complex
    multiplicity: int
    newton_residual: float

    @property
    def mu(self) -> complex:
        return 1.0 / self.z


@dataclass
class MultiplierSet:
    """All roots in a region, sorted by descending multiplier modulus."""

    roots: list[RootRecord]
    region: SearchRegion
    total_count: int
    trivial_root: RootRecord | None = None
    winding_deviations: list[float] = field(default_factory=list)

    def nontrivial(self) -> list[RootRecord]:
        return [r for r in self.roots if r is not self.trivial_root]


@dataclass
class StabilityVerdict:
    classification: str  # "stable" | "unstable" | "inconclusive"
    witness: RootRecord | None
    trivial_simple: bool
    margin: float
    warnings: list[str] = field(default_factory=list)


@dataclass
class RootSettings:
    """Tunable knobs of the root finder; defaults match the golden suite."""

    mu_min: float = 0.01
    quad_tol: float = 1e-5
    winding_round_tol: float = 1e-3
    newton_tol: float = 1e-12
    max_newton_iterations: int = 120
    max_depth: int = 40
    merge_scale: float = 1e-9
    mult_circle_scale: float = 1e-4
    overlap: float = 0.10
    dilation: float = 1e-4
    max_dilation_retries: int = 5
    max_panels: int = 8000


# ---------------------------------------------------------------------------
# winding numbers

def _winding_raw(evaluator: CharMatrixEvaluator, contour,
                 settings: RootSettings) -> float:
    """(1/2 pi i) * contour integral of the logarithmic derivative.

    Adaptive Gauss-Kronrod 7-15 panels per edge; all node evaluations of a
    refinement round are batched through the evaluator.
    """
    total = 0.0 + 0.0j
    pending = [(zmap, 0.0, 1.0) for zmap in contour.edges()]
    n_edges = len(pending)
    panels_done = 0
    while pending:
        if panels_done + len(pending) > settings.max_panels:
            raise ContourError("quadrature did not converge (panel budget)")
        ts = []
        for zmap, a, b in pending:
            ts.append((a + b) / 2 + (b - a) / 2 * _XK)
        zs = []
        dzs = []
        for (zmap, a, b), t in zip(pending, ts):
            z, dz = zmap(t)
            zs.append(z)
            dzs.append(dz)
        flat = np.concatenate(zs)
        _, logd = evaluator.det_logderiv_batch(flat)
        logd = logd.reshape(len(pending), 15)
        next_pending = []
        for i, (zmap, a, b) in enumerate(pending):
            f = logd[i] * dzs[i] / _TWO_PI_I
            half = (b - a) / 2
            k15 = half * np.sum(_WK * f)
            g7 = half * np.sum(_WG * f[_G_IDX])
            err = abs(k15 - g7)
            budget = settings.quad_tol * (b - a) / n_edges
            if err <= budget or (b - a) < 1e-10:
                total += k15
                panels_done += 1
            else:
                m = (a + b) / 2
                next_pending.append((zmap, a, m))
                next_pending.append((zmap, m, b))
        pending = next_pending
    return total.real + 1j * total.imag


def winding_count(evaluator: CharMatrixEvaluator, contour,
                  settings: RootSettings | None = None,
                  deviations: list[float] | None = None) -> int:
    """Number of zeros of det Delta inside the contour, with multiplicity.

    The raw integral must round to an integer within the configured
    tolerance; a root sitting (numerically) on the contour triggers automatic
    dilation by a small relative factor and a retry, up to a retry cap.
    """
    if settings is None:
        settings = RootSettings()
    count, _ = _winding_with_final(evaluator, contour, settings,
                                   deviations if deviations is not None
                                   else [])
    return count


def _winding_with_final(evaluator, contour, settings, deviations):
    """Like winding_count but also reports the contour actually used.

    Retryable failures (a root sitting on or numerically near the contour
    shows up as a singular evaluation, a blown panel budget, or a raw
    integral far from any integer) trigger dilation by a small relative
    factor; the dilated contour is returned with the count so callers test
    membership against the contour actually integrated.
    """
    current = contour
    last_exc: Exception | None = None
    for attempt in range(settings.max_dilation_retries + 1):
        try:
            raw = _winding_raw(evaluator, current, settings)
        except (SingularMatrixError, ContourError) as exc:
            last_exc = exc
            current = current.dilate(1.0 + settings.dilation * (attempt + 1))
            continue
        nearest = int(np.rint(raw.real))
        dev = abs(raw - nearest)
        if dev < settings.winding_round_tol:
            deviations.append(float(dev))
            return nearest, current
        last_exc = ContourError(
            f"winding integral {raw!r} is not close to an integer "
            "(root on or near the contour)")
        current = current.dilate(1.0 + settings.dilation * (attempt + 1))
    raise ContourError(f"contour retries exhausted: {last_exc}")


# ---------------------------------------------------------------------------
# root isolation

def _newton_polish(evaluator, z0: complex, trust: float,
                   settings: RootSettings) -> complex | None:
    """Newton iteration z <- z - 1/logderiv(z) from z0.

    Converges quadratically to simple roots and linearly (ratio 1 - 1/m) to
    multiplicity-m roots.  Returns None when the iteration leaves the trust
    disk or fails to contract.
    """
    z = complex(z0)
    for _ in range(settings.max_newton_iterations):
        try:
            _, logd = evaluator.det_logderiv_batch([z])
        except SingularMatrixError:
            # determinant below the working-precision floor: we are at a root
            return z
        l = complex(logd[0])
        if l == 0:
            return None
        step = -1.0 / l
        if abs(step) > 2.0 * trust:
            return None
        z = z + step
        if abs(z - z0) > 3.0 * trust:
            return None
        if abs(step) < settings.newton_tol * (1.0 + abs(z)):
            return z
    return None


def _multiplicity(evaluator, z: complex, settings, deviations) -> int:
    radius = settings.mult_circle_scale * (1.0 + abs(z))
    return winding_count(evaluator, CircleContour(z, radius), settings,
                         deviations)


def find_all(evaluator: CharMatrixEvaluator, region: SearchRegion,
             settings: RootSettings | None = None) -> MultiplierSet:
    """Locate every zero of det Delta in the region, with multiplicities.

    Recursive quadrisection of the region's bounding box with a 10% cell
    overlap margin (roots straddling a cell boundary are then interior to
    some grown cell); a cell is resolved when Newton polishing from its
    center converges and the small-circle multiplicity of the polished root
    equals the cell's count.  Roots rediscovered through overlapping margins
    are merged by a relative radius well below the polish accuracy.  The
    final multiplicities must sum to the winding number of the full region
    boundary.
    """
    if settings is None:
        settings = RootSettings()
    deviations: list[float] = []
    evaluator.ensure_radius(_region_reach(region))

    total, outer_final = _winding_with_final(
        evaluator, region.outer_contour(), settings, deviations)

    lo, hi = region.bounding_box()
    raw_roots: list[tuple[complex, int]] = []

    def process(cell_lo: complex, cell_hi: complex, depth: int) -> None:
        c = (cell_lo + cell_hi) / 2
        grow = 1.0 + settings.overlap / 2.0
        g_lo = c + (cell_lo - c) * grow
        g_hi = c + (cell_hi - c) * grow
        contour = RectContour(g_lo, g_hi)
        count, used = _winding_with_final(evaluator, contour, settings,
                                          deviations)
        if count == 0:
            return
        trust = abs(cell_hi - cell_lo)
        z_root = _newton_polish(evaluator, c, trust, settings)
        if z_root is not None and used.contains(z_root):
            m = _multiplicity(evaluator, z_root, settings, deviations)
            if m == count and m >= 1:
                raw_roots.append((z_root, m))
                return
        if depth >= settings.max_depth:
            raise ClusterResolutionError(
                f"cell [{cell_lo}, {cell_hi}] not resolved at depth {depth} "
                f"(count {count})")
        mid = c
        quads = [
            (cell_lo, mid),
            (complex(mid.real, cell_lo.imag), complex(cell_hi.real, mid.imag)),
            (complex(cell_lo.real, mid.imag), complex(mid.real, cell_hi.imag)),
            (mid, cell_hi),
        ]
        for q_lo, q_hi in quads:
            process(q_lo, q_hi, depth + 1)

    process(lo, hi, 0)

    # deterministic order, then merge rediscoveries from overlapping margins
    raw_roots.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    merged: list[tuple[complex, int]] = []
    for z, m in raw_roots:
        dup = False
        for zk, _ in merged:
            if abs(z - zk) <= settings.merge_scale * (1.0 + abs(z)):
                dup = True
                break
        if not dup:
            merged.append((z, m))

    inside = [(z, m) for z, m in merged if outer_final.contains(z)]
    if sum(m for _, m in inside) != total:
        raise ClusterResolutionError(
            f"found multiplicities sum to {sum(m for _, m in inside)} "
            f"but the region winding number is {total}")

    records = []
    for z, m in inside:
        try:
            resid = abs(evaluator.det_delta(z))
        except SingularMatrixError:
            resid = 0.0
        records.append(RootRecord(z=z, multiplicity=m, newton_residual=resid))
    records.sort(key=lambda r: (-abs(r.mu), r.z.real, r.z.imag))

    trivial = min(records, key=lambda r: abs(r.z - 1.0)) if records else None
    return MultiplierSet(roots=records, region=region, total_count=total,
                         trivial_root=trivial, winding_deviations=deviations)


def _region_reach(region: SearchRegion) -> float:
    lo, hi = region.bounding_box()
    return max(abs(lo), abs(hi)) * (1.0 + 0.1)


# ---------------------------------------------------------------------------
# classification

#: acceptance window for the trivial root around z = 1
TRIVIAL_WINDOW = 1e-4


def classify(multipliers: MultiplierSet, tol_unit: float = 1e-6,
             expect_trivial: bool = True) -> StabilityVerdict:
    """Orbit stability from the multiplier set.

    Stable: the trivial multiplier is simple and every other multiplier lies
    strictly inside the unit circle (by at least tol_unit).  Unstable: some
    nontrivial multiplier lies strictly outside.  Everything else, including
    a non-simple trivial root with nothing outside, is inconclusive.

    With ``expect_trivial=False`` (coefficient families not arising from an
    orbit linearization) every root is judged against the unit circle and no
    trivial multiplier is required.
    """
    warnings: list[str] = []
    if expect_trivial:
        trivial = multipliers.trivial_root
        if trivial is None or abs(trivial.z - 1.0) > TRIVIAL_WINDOW:
            warnings.append("trivial multiplier 1 not located near z = 1")
            return StabilityVerdict(classification="inconclusive",
                                    witness=None, trivial_simple=False,
                                    margin=0.0, warnings=warnings)
        others = multipliers.nontrivial()
        trivial_simple = trivial.multiplicity == 1
        if not trivial_simple:
            warnings.append(
                f"trivial root has multiplicity {trivial.multiplicity}")
    else:
        others = list(multipliers.roots)
        trivial_simple = True

    outside = [r for r in others if abs(r.mu) >= 1.0 + tol_unit]
    if outside:
        witness = max(outside, key=lambda r: abs(r.mu))
        return StabilityVerdict(classification="unstable", witness=witness,
                                trivial_simple=trivial_simple,
                                margin=float(np.log(abs(witness.mu))),
                                warnings=warnings)
    all_inside = all(abs(r.mu) <= 1.0 - tol_unit for r in others)
    if trivial_simple and all_inside:
        margin = min((abs(np.log(abs(r.mu))) for r in others),
                     default=float("inf"))
        return StabilityVerdict(classification="stable", witness=None,
                                trivial_simple=True, margin=float(margin),
                                warnings=warnings)
    if trivial_simple and not all_inside:
        warnings.append("a nontrivial multiplier lies on the unit circle "
                        "within tolerance")
    return StabilityVerdict(classification="inconclusive", witness=None,
                            trivial_simple=trivial_simple, margin=0.0,
                            warnings=warnings)
