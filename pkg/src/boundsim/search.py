"""Parameter-space exploration of the reduced state family.

* :func:`scan_slice` classifies a 2D ``(q1, q2)`` grid at fixed ``q3`` (d = 3).
* :func:`optimize_witness` minimises ``2 - I_{d+1}`` over physical PPT family
  states.
* :func:`horodecki_sweep` tabulates the Horodecki line.

Optimiser
---------
The maximally mixed state (``q = 0``) is strictly inside both constraint sets,
and ``rho(t u) = 1/d^2 + t * Delta(u)`` is affine along every ray.  Hence the
largest feasible step along a direction ``u`` has a closed form,

    t_max(u) = min(-1 / (d^2 min Delta_c(u)), -1 / (d^2 lambda_min(Delta(u)^T_A))),

and because ``I`` is convex in ``q`` the witness along a ray is smallest at one
of its end points.  The search is therefore over directions only: a coarse grid
on the unit sphere (plus seeded random directions), then Nelder-Mead restarts
from the best ``k_best`` cells.  Every candidate is feasible by construction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.optimize import minimize

from .errors import OutOfRange, UnsupportedDimension, ValidationError
from .simplex import (
    PHYSICAL_TOL,
    FamilyParams,
    bell_projectors_pt,
    coeffs_from_family,
    family_table,
    horodecki_params,
    ppt_min_eig_coeffs,
)
from .witness import (
    BellTables,
    Labeling,
    LabelingArg,
    _all_perms,
    _resolve_fixed,
    bell_tables,
    best_relabeling_table,
    mcp_coeffs,
)

PPT_TOL = 1e-9
# a witness counts as negative only below -WITNESS_TOL (round-off guard)
WITNESS_TOL = 1e-9
OPTIMIZE_DIMS = (3, 4, 5, 7, 8, 9)

UNPHYSICAL, UNDETECTED, FREE_ENTANGLED, BOUND_ENTANGLED = range(4)
CLASS_NAMES = ("unphysical", "separable-or-undetected", "free-entangled", "bound-entangled")
CLASS_GRAY = (0, 255, 96, 176)


def _n_params(d: int) -> int:
    return 3 if d == 3 else 4


def _witness_batch(P: np.ndarray, fixed: Labeling | None) -> np.ndarray:
    """Witness ``2 - sum_k C_k`` for a batch of per-basis tables ``P[n, k, i, j]``."""
    n, m, d, _ = P.shape
    if fixed is not None:
        idx = np.arange(d)
        total = sum(P[:, k, idx, list(fixed.perms[k])].sum(axis=1) for k in range(m))
        return 2.0 - total
    if d <= 6:
        perms = _all_perms(d)
        vals = P[:, :, np.arange(d), perms]  # (n, m, n_perms, d)
        return 2.0 - vals.sum(axis=3).max(axis=2).sum(axis=1)
    out = np.empty(n)
    for s in range(n):
        out[s] = 2.0 - sum(best_relabeling_table(P[s, k])[1] for k in range(m))
    return out


# -- slice scan ------------------------------------------------------------------


@dataclass(frozen=True)
class SliceSpec:
    q3: float
    q1_range: tuple[float, float]
    q2_range: tuple[float, float]
    resolution: tuple[int, int] = (200, 200)
    d: int = 3

    def __post_init__(self):
        if self.d != 3:
            raise UnsupportedDimension("slices are defined for d = 3")
        for lo, hi in (self.q1_range, self.q2_range):
            if not lo < hi:
                raise ValidationError(f"range ({lo}, {hi}) must satisfy lo < hi")
        if min(self.resolution) < 2:
            raise ValidationError("resolution must be at least 2 per axis")

    @property
    def q1(self) -> np.ndarray:
        return np.linspace(*self.q1_range, self.resolution[0])

    @property
    def q2(self) -> np.ndarray:
        return np.linspace(*self.q2_range, self.resolution[1])


@dataclass(frozen=True)
class ClassifiedGrid:
    """Cell ``[j, i]`` holds the state at ``(q1[i], q2[j])``."""

    spec: SliceSpec
    q1: np.ndarray
    q2: np.ndarray
    min_coeff: np.ndarray
    min_pt_eig: np.ndarray
    witness: np.ndarray
    physical: np.ndarray
    ppt: np.ndarray
    cls: np.ndarray

    @property
    def bound_region(self) -> np.ndarray:
        return self.cls == BOUND_ENTANGLED

    def counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.cls == k)) for k, name in enumerate(CLASS_NAMES)}

    def rows(self):
        """Yield ``(q1, q2, class_name, witness, min_pt_eig)`` in row-major order."""
        for j in range(self.q2.size):
            for i in range(self.q1.size):
                yield (
                    float(self.q1[i]),
                    float(self.q2[j]),
                    CLASS_NAMES[self.cls[j, i]],
                    float(self.witness[j, i]),
                    float(self.min_pt_eig[j, i]),
                )

    def to_pgm(self) -> bytes:
        """Binary PGM (P5) heatmap, top row = largest ``q2``."""
        img = np.asarray(CLASS_GRAY, dtype=np.uint8)[self.cls[::-1]]
        h, w = img.shape
        return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()

    def cell_of(self, q1: float, q2: float) -> tuple[int, int]:
        return int(np.argmin(np.abs(self.q2 - q2))), int(np.argmin(np.abs(self.q1 - q1)))


def region_components(mask: np.ndarray) -> int:
    """Number of 4-connected components of ``mask``."""
    return int(ndimage.label(mask)[1])


def region_has_holes(mask: np.ndarray) -> bool:
    """True if some cell outside ``mask`` cannot be flood-filled from the grid border."""
    outside = ~mask
    labels, n = ndimage.label(outside)
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
    border.discard(0)
    return any(k not in border for k in range(1, n + 1))


def _classify_rows(q1, q2_rows, q3, fixed, tables, pt_stack):
    d = 3
    Q1, Q2 = np.meshgrid(q1, q2_rows)
    n = Q1.size
    q = np.stack([Q1.ravel(), Q2.ravel(), np.full(n, q3)], axis=1)
    C = np.array([family_table(d, row) for row in q])  # (n, d, d)
    min_c = C.reshape(n, -1).min(axis=1)
    M = np.tensordot(C.reshape(n, -1), pt_stack, axes=1)
    min_pt = np.linalg.eigvalsh(M)[:, 0]
    P = np.einsum("nab,kabij->nkij", C, tables.tables)
    w = _witness_batch(P, fixed)
    shape = (len(q2_rows), len(q1))
    return min_c.reshape(shape), min_pt.reshape(shape), w.reshape(shape)


def scan_slice(
    spec: SliceSpec,
    labeling: LabelingArg = "maximize",
    threads: int = 1,
    psd_tol: float = PHYSICAL_TOL,
    ppt_tol: float = PPT_TOL,
) -> ClassifiedGrid:
    """Classify every cell of a ``(q1, q2)`` slice.

    Classes: unphysical (some Bell weight < -psd_tol), free-entangled (NPT),
    bound-entangled (PPT and witness < -WITNESS_TOL), otherwise separable-or-undetected.
    Rows are processed independently, so the output does not depend on
    ``threads``.
    """
    tables = bell_tables(3)
    fixed = _resolve_fixed(labeling, tables.fam)
    pt_stack = bell_projectors_pt(3)
    q1, q2 = spec.q1, spec.q2
    chunks = [q2[i : i + 8] for i in range(0, q2.size, 8)]

    def work(rows):
        return _classify_rows(q1, rows, spec.q3, fixed, tables, pt_stack)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(ch) for ch in chunks]
    min_c = np.concatenate([p[0] for p in parts])
    min_pt = np.concatenate([p[1] for p in parts])
    wit = np.concatenate([p[2] for p in parts])
    physical = min_c >= -psd_tol
    ppt = min_pt >= -ppt_tol
    cls = np.full(min_c.shape, UNDETECTED, dtype=np.int8)
    cls[~ppt] = FREE_ENTANGLED
    cls[ppt & (wit < -WITNESS_TOL)] = BOUND_ENTANGLED
    cls[~physical] = UNPHYSICAL
    return ClassifiedGrid(spec, q1, q2, min_c, min_pt, wit, physical, ppt, cls)


# -- optimisation -----------------------------------------------------------------


@dataclass(frozen=True)
class OptimizationResult:
    d: int
    params: FamilyParams
    witness: float
    min_pt_eig: float
    min_coeff: float
    evaluations: int
    trace: tuple[tuple[int, float], ...] = field(repr=False)
    labeling: Labeling | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return self.min_coeff >= -PHYSICAL_TOL and self.min_pt_eig >= -PPT_TOL

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "q": list(self.params.q),
            "witness": self.witness,
            "min_pt_eig": self.min_pt_eig,
            "min_coeff": self.min_coeff,
            "feasible": self.feasible,
            "evaluations": self.evaluations,
            "labeling": None if self.labeling is None else [list(p) for p in self.labeling.perms],
            "trace": [list(t) for t in self.trace],
        }


class _RayObjective:
    """Witness at the feasibility boundary along a direction in parameter space."""

    SHRINK = 1.0 - 1e-10

    def __init__(self, d: int, fixed: Labeling | None, tables: BellTables):
        self.d = d
        self.fixed = fixed
        npar = _n_params(d)
        base = family_table(d, np.zeros(npar))
        self.lin = np.array([family_table(d, np.eye(npar)[i]) - base for i in range(npar)])
        pts = bell_projectors_pt(d)
        self.pt_lin = np.array([np.tensordot(L.ravel(), pts, axes=1) for L in self.lin])
        self.base_P = np.einsum("ab,kabij->kij", base, tables.tables)
        self.lin_P = np.einsum("nab,kabij->nkij", self.lin, tables.tables)
        self.evaluations = 0

    def step(self, u: np.ndarray) -> float:
        d2 = self.d * self.d
        dc = np.tensordot(u, self.lin, axes=1)
        lo_c = dc.min()
        t = -1.0 / (d2 * lo_c) if lo_c < 0 else math.inf
        lam = np.linalg.eigvalsh(np.tensordot(u, self.pt_lin, axes=1))[0]
        if lam < 0:
            t = min(t, -1.0 / (d2 * lam))
        return t * self.SHRINK

    def point(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        if not np.isfinite(norm) or norm == 0:
            return np.zeros_like(u)
        u = u / norm
        return self.step(u) * u

    def __call__(self, u) -> float:
        self.evaluations += 1
        q = self.point(u)
        P = self.base_P + np.tensordot(q, self.lin_P, axes=1)
        return float(_witness_batch(P[None], self.fixed)[0])


def sphere_grid(n: int, resolution: int) -> np.ndarray:
    """Deterministic near-uniform directions on the unit sphere in R^n (n = 3 or 4)."""
    if n == 3:
        th = np.linspace(0, np.pi, resolution + 1)[1:-1]
        ph = np.linspace(0, 2 * np.pi, 2 * resolution, endpoint=False)
        pts = [(np.sin(a) * np.cos(b), np.sin(a) * np.sin(b), np.cos(a)) for a in th for b in ph]
    elif n == 4:
        a1 = np.linspace(0, np.pi, resolution + 1)[1:-1]
        a3 = np.linspace(0, 2 * np.pi, 2 * resolution, endpoint=False)
        pts = [
            (np.cos(x), np.sin(x) * np.cos(y), np.sin(x) * np.sin(y) * np.cos(z), np.sin(x) * np.sin(y) * np.sin(z))
            for x in a1
            for y in a1
            for z in a3
        ]
    else:
        raise ValueError("sphere_grid supports n = 3 or 4")
    axes = np.vstack([np.eye(n), -np.eye(n)])
    return np.vstack([np.array(pts), axes])


def _refine(objective: _RayObjective, u0: np.ndarray, rounds: int, maxiter: int):
    x = np.asarray(u0, dtype=float)
    best = (objective(x), x)
    for _ in range(rounds):
        res = minimize(objective, x, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": maxiter})
        x = res.x / np.linalg.norm(res.x)
        if res.fun < best[0]:
            best = (float(res.fun), x)
    return best


def optimize_witness(
    d: int,
    labeling: LabelingArg = "maximize",
    budget: int | None = None,
    seed: int = 0,
    threads: int = 1,
    k_best: int = 20,
    grid_resolution: int | None = None,
    rounds: int = 3,
) -> OptimizationResult:
    """Minimise ``2 - I_{d+1}`` over the family subject to ``c >= 0`` and PPT.

    ``budget`` caps the Nelder-Mead iterations per restart round (default 2000).
    The result is re-evaluated through the generic state pipeline; the reported
    witness and constraint values come from that re-evaluation.
    """
    if d not in OPTIMIZE_DIMS:
        raise UnsupportedDimension(f"optimisation supports d in {OPTIMIZE_DIMS}, got {d}")
    tables = bell_tables(d)
    fixed = _resolve_fixed(labeling, tables.fam)
    npar = _n_params(d)
    res = grid_resolution or (30 if npar == 3 else 14)
    maxiter = budget or 2000

    dirs = sphere_grid(npar, res)
    rng = np.random.default_rng(seed)
    extra = rng.normal(size=(max(64, len(dirs) // 8), npar))
    dirs = np.vstack([dirs, extra / np.linalg.norm(extra, axis=1, keepdims=True)])

    scout = _RayObjective(d, fixed, tables)
    values = np.array([scout(u) for u in dirs])
    order = np.lexsort((np.arange(len(dirs)), values))[:k_best]
    trace = [(scout.evaluations, float(values[order[0]]))]

    def work(i):
        obj = _RayObjective(d, fixed, tables)
        val, u = _refine(obj, dirs[i], rounds, maxiter)
        return val, u, obj.evaluations

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, order))
    else:
        results = [work(i) for i in order]

    evaluations = scout.evaluations
    best = None
    for val, u, n in results:
        evaluations += n
        key = (val, tuple(scout.point(u)))
        if best is None or key < best:
            best = key
        trace.append((evaluations, float(min(best[0], trace[-1][1]))))
    best_val, q = best[0], np.array(best[1])
    # the maximally mixed state (ray start) is the other candidate end point
    w0 = 2.0 - (d + 1) / d
    if best_val > w0:
        q = np.zeros(npar)

    params = FamilyParams.from_vector(d, q)
    coeffs = coeffs_from_family(params)
    report = mcp_coeffs(coeffs, labeling)
    return OptimizationResult(
        d=d,
        params=params,
        witness=float(report.witness),
        min_pt_eig=ppt_min_eig_coeffs(coeffs),
        min_coeff=float(coeffs.c.min()),
        evaluations=evaluations,
        trace=tuple(trace),
        labeling=report.labeling,
    )


# -- Horodecki line ---------------------------------------------------------------


@dataclass(frozen=True)
class HorodeckiRow:
    lam: float
    min_pt_eig: float
    witness: float

    @property
    def ppt(self) -> bool:
        return self.min_pt_eig >= -PPT_TOL

    @property
    def bound_entangled(self) -> bool:
        return self.ppt and self.witness < -WITNESS_TOL


def horodecki_sweep(lam_lo: float, lam_hi: float, step: float, labeling: LabelingArg = "maximize") -> list[HorodeckiRow]:
    if not (0.0 <= lam_lo <= lam_hi <= 5.0):
        raise OutOfRange(f"lambda range [{lam_lo}, {lam_hi}] must lie within [0, 5]")
    if step <= 0:
        raise ValidationError("step must be positive")
    n = int(math.floor((lam_hi - lam_lo) / step + 1e-9)) + 1
    rows = []
    for i in range(n):
        lam = min(round(lam_lo + i * step, 12), lam_hi)
        coeffs = coeffs_from_family(horodecki_params(lam))
        rows.append(HorodeckiRow(lam, ppt_min_eig_coeffs(coeffs), float(mcp_coeffs(coeffs, labeling).witness)))
    return rows


__all__ = [
    "CLASS_NAMES",
    "ClassifiedGrid",
    "HorodeckiRow",
    "OptimizationResult",
    "SliceSpec",
    "horodecki_sweep",
    "optimize_witness",
    "region_components",
    "region_has_holes",
    "scan_slice",
    "sphere_grid",
]
