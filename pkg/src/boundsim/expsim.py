"""Photon-counting simulation of the complementarity and tomography measurements.

Counts are simulated separately for each Bell state and combined afterwards
with the simplex weights (retroactive mixing), as done in the lab.  Each count
is an independent Poisson draw with mean

    windows * (peak * d * Tr[(|a><a| x |b><b|) P_kl] + background),

so a perfectly correlated setting on a Bell state has mean ``peak`` per
window.  Every draw uses its own generator seeded by
``(seed, setting_id, bell_index)``, which makes results independent of the
evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCounts, NegativeWeight, OutOfRange, SingularSystem, ValidationError
from .mubs import MubFamily, conjugate_basis, mub_family
from .numkernel import as_matrix
from .simplex import SimplexCoeffs, bell_vectors
from .witness import CorrelationReport, LabelingArg, _report

UNIT_TOL = 1e-9
TOMOGRAPHY_PHASES = (0.0, np.pi / 2, np.pi, 3 * np.pi / 2)


@dataclass(frozen=True)
class NoiseModel:
    peak: float = 1500.0
    background: float = 5.0
    windows: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.peak < 0 or self.background < 0 or self.windows < 1:
            raise ValidationError("rates must be >= 0 and windows >= 1")


@dataclass(frozen=True)
class CountRecord:
    """Counts of one detector setting: one entry per Bell state (row-major ``(k, l)``)."""

    setting_id: int
    counts: np.ndarray
    mixed: float | None = None
    basis: int | None = None
    outcome: tuple[int, int] | None = None

    def __post_init__(self):
        counts = np.array(self.counts)
        if np.any(counts < 0):
            raise ValidationError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class TomographySet:
    """Single-side detection kets; the pair settings are all ``(a, b)`` combinations."""

    d: int
    kets: np.ndarray = field(repr=False)

    @property
    def n_side(self) -> int:
        return self.kets.shape[0]

    @property
    def n_pairs(self) -> int:
        return self.n_side**2

    def pairs(self):
        """Yield ``(setting_id, ket_a, ket_b)`` in row-major order."""
        for ia in range(self.n_side):
            for ib in range(self.n_side):
                yield ia * self.n_side + ib, self.kets[ia], self.kets[ib]


@dataclass(frozen=True)
class Budget:
    n_qst: int
    n_mcp1: int
    n_mcp2: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_qst, self.n_mcp1, self.n_mcp2)


def measurement_budget(d: int) -> Budget:
    """Number of settings for over-complete tomography and for the two MCP variants.

    ``n_mcp1`` counts only the matched outcome per basis (labeling known in
    advance); ``n_mcp2`` counts every outcome pair.
    """
    if d < 2:
        raise ValidationError(f"d must be >= 2, got {d}")
    return Budget(d * d - 4 * d**3 + 4 * d**4, d + d * d, d * d + d**3)


# -- counts ----------------------------------------------------------------------


def _unit(ket) -> np.ndarray:
    v = np.asarray(ket, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValidationError("detection kets must be unit vectors")
    return v


def _bell_overlaps(d: int, ket_a, ket_b) -> np.ndarray:
    """``|<a b|P_kl>|^2`` for every Bell state, flattened row-major."""
    v = np.kron(_unit(ket_a), _unit(ket_b))
    return np.abs(bell_vectors(d).reshape(d * d, -1) @ v.conj()) ** 2


def expected_counts(bell_index: int, ket_a, ket_b, noise: NoiseModel) -> float:
    a = np.asarray(ket_a).ravel()
    d = a.size
    if not 0 <= bell_index < d * d:
        raise OutOfRange(f"bell_index {bell_index} outside 0..{d * d - 1}")
    p = _bell_overlaps(d, ket_a, ket_b)[bell_index]
    return noise.windows * (noise.peak * d * p + noise.background)


def _rng(noise: NoiseModel, setting_id: int, bell_index: int) -> np.random.Generator:
    return np.random.default_rng([noise.seed, setting_id, bell_index])


def simulate_counts(bell_index: int, ket_a, ket_b, noise: NoiseModel, setting_id: int = 0) -> int:
    """One Poisson coincidence count for Bell state ``bell_index`` (row-major ``k * d + l``)."""
    mean = expected_counts(bell_index, ket_a, ket_b, noise)
    return int(_rng(noise, setting_id, bell_index).poisson(mean))


def _record(d, sid, ket_a, ket_b, noise, expected, **meta) -> CountRecord:
    means = noise.windows * (noise.peak * d * _bell_overlaps(d, ket_a, ket_b) + noise.background)
    if expected:
        counts = means
    else:
        counts = np.array([_rng(noise, sid, b).poisson(means[b]) for b in range(d * d)], dtype=np.int64)
    return CountRecord(sid, counts, **meta)


def mcp_settings(fam: MubFamily):
    """Yield ``(setting_id, k, i, j, ket_a, ket_b)``; Bob measures the conjugate basis."""
    d = fam.d
    for k in range(fam.m):
        bob = conjugate_basis(fam.bases[k])
        for i in range(d):
            for j in range(d):
                yield (k * d + i) * d + j, k, i, j, fam.bases[k][i], bob[j]


def simulate_mcp(d: int, noise: NoiseModel, expected: bool = False, fam: MubFamily | None = None) -> list[CountRecord]:
    """Per-Bell-state counts for all ``m * d^2`` outcome pairs of the MCP."""
    fam = mub_family(d) if fam is None else fam
    return [
        _record(d, sid, a, b, noise, expected, basis=k, outcome=(i, j))
        for sid, k, i, j, a, b in mcp_settings(fam)
    ]


def simulate_tomography(tset: TomographySet, noise: NoiseModel, expected: bool = False) -> list[CountRecord]:
    d = tset.d
    return [_record(d, sid, a, b, noise, expected) for sid, a, b in tset.pairs()]


# -- analysis --------------------------------------------------------------------


def retroactive_mix(records: list[CountRecord], c) -> list[CountRecord]:
    """Weight every record's per-Bell-state counts by the simplex coefficients."""
    table = c.c if isinstance(c, SimplexCoeffs) else np.asarray(c, dtype=float)
    w = table.ravel()
    if np.any(w < 0):
        raise NegativeWeight("retroactive mixing needs nonnegative weights")
    out = []
    for r in records:
        if r.counts.size != w.size:
            raise ValidationError(f"record has {r.counts.size} Bell-state counts, weights have {w.size}")
        out.append(CountRecord(r.setting_id, r.counts, float(w @ r.counts), r.basis, r.outcome))
    return out


def probabilities_from_counts(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValidationError("counts must be nonnegative")
    total = g.sum()
    if not total > 0:
        raise EmptyCounts("total count is zero")
    return g / total


def mcp_from_counts(mixed: list[CountRecord], d: int, labeling: LabelingArg = "maximize", fam: MubFamily | None = None) -> CorrelationReport:
    """Correlation report from mixed MCP counts, normalising per basis pair."""
    fam = mub_family(d) if fam is None else fam
    gamma = np.zeros((fam.m, d, d))
    for r in mixed:
        if r.mixed is None or r.basis is None:
            raise ValidationError("records must be mixed MCP records")
        i, j = r.outcome
        gamma[r.basis, i, j] = r.mixed
    tables = [probabilities_from_counts(g) for g in gamma]
    return _report(d, fam.m, tables, labeling, fam, True)


def tomography_settings(d: int) -> TomographySet:
    """Basis kets plus ``(|a> + e^{i phi}|b>)/sqrt 2`` for ``a < b`` and four phases."""
    if d < 2:
        raise ValidationError(f"d must be >= 2, got {d}")
    kets = list(np.eye(d, dtype=complex))
    for a in range(d):
        for b in range(a + 1, d):
            for phi in TOMOGRAPHY_PHASES:
                v = np.zeros(d, dtype=complex)
                v[a] = 1.0
                v[b] = np.exp(1j * phi)
                kets.append(v / np.sqrt(2))
    arr = np.array(kets)
    arr.setflags(write=False)
    return TomographySet(d, arr)


def _design_matrix(tset: TomographySet) -> np.ndarray:
    """Rows map the real parametrisation of a Hermitian matrix to ``Tr(Pi_s X)``."""
    d2 = tset.d**2
    rows = []
    for _, a, b in tset.pairs():
        v = np.kron(a, b)
        proj = np.outer(v, v.conj())  # Tr(Pi X) = sum conj(Pi)_{ij} X_ij
        rows.append(np.concatenate([proj.real.ravel(), proj.imag.ravel()]))
    A = np.array(rows)
    # X = Xr + i Xi with Xr symmetric, Xi antisymmetric; Tr(Pi X) = <Pi_r, Xr> + <Pi_i, Xi>
    iu = np.triu_indices(d2)
    il = np.triu_indices(d2, 1)
    sym = np.zeros((d2 * d2, iu[0].size))
    for n, (i, j) in enumerate(zip(*iu)):
        sym[i * d2 + j, n] = 1.0
        sym[j * d2 + i, n] = 1.0
    anti = np.zeros((d2 * d2, il[0].size))
    for n, (i, j) in enumerate(zip(*il)):
        anti[i * d2 + j, n] = 1.0
        anti[j * d2 + i, n] = -1.0
    return A[:, : d2 * d2] @ sym, A[:, d2 * d2 :] @ anti, iu, il


def reconstruct(counts, tset: TomographySet, background: float = 0.0) -> np.ndarray:
    """Least-squares state estimate from tomography counts.

    ``counts[s]`` belongs to setting ``s`` of ``tset.pairs()``.  A known flat
    background is subtracted, the linear system is solved for an unnormalised
    Hermitian matrix, which is then trace-normalised and projected onto the
    PSD cone by clipping negative eigenvalues.
    """
    n = np.asarray([r.mixed if isinstance(r, CountRecord) else r for r in counts], dtype=float)
    if n.size != tset.n_pairs:
        raise ValidationError(f"expected {tset.n_pairs} counts, got {n.size}")
    Ar, Ai, iu, il = _design_matrix(tset)
    A = np.hstack([Ar, Ai])
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise SingularSystem("tomography settings do not span the state space")
    x, *_ = np.linalg.lstsq(A, n - background, rcond=None)
    d2 = tset.d**2
    X = np.zeros((d2, d2), dtype=complex)
    xr, xi = x[: iu[0].size], x[iu[0].size :]
    X[iu] += xr
    X[iu[1], iu[0]] = xr
    X[il] += 1j * xi
    X[il[1], il[0]] -= 1j * xi
    tr = np.trace(X).real
    if not tr > 0:
        raise SingularSystem("reconstructed matrix has nonpositive trace")
    vals, vecs = np.linalg.eigh(X / tr)
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum()
    return (vecs * vals) @ vecs.conj().T


# -- OAM bookkeeping -------------------------------------------------------------


def oam_relabel(ell: int) -> int:
    """Map OAM values -1, 0, +1 onto qutrit indices 0, 1, 2."""
    if ell not in (-1, 0, 1):
        raise OutOfRange(f"OAM value {ell} outside {{-1, 0, +1}}")
    return ell + 1


def spdc_state() -> np.ndarray:
    """Anti-correlated OAM pair ``(|-1,+1> + |0,0> + |+1,-1>)/sqrt 3`` as a vector in index basis."""
    psi = np.zeros(9, dtype=complex)
    for ell in (-1, 0, 1):
        psi[oam_relabel(ell) * 3 + oam_relabel(-ell)] = 1 / np.sqrt(3)
    return psi


def anticorrelate_bob(rho, d: int = 3) -> np.ndarray:
    """Apply Bob's index flip ``i -> (d - 1 - i)``, turning the SPDC pair into ``P00``."""
    r = as_matrix(rho)
    perm = np.eye(d)[::-1]
    U = np.kron(np.eye(d), perm)
    return U @ r @ U.conj().T


__all__ = [
    "Budget",
    "CountRecord",
    "NoiseModel",
    "TomographySet",
    "anticorrelate_bob",
    "expected_counts",
    "mcp_from_counts",
    "mcp_settings",
    "measurement_budget",
    "oam_relabel",
    "probabilities_from_counts",
    "reconstruct",
    "retroactive_mix",
    "simulate_counts",
    "simulate_mcp",
    "simulate_tomography",
    "spdc_state",
    "tomography_settings",
]
