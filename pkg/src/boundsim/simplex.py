"""Bell-diagonal ("magic simplex") states of two qudits.

Conventions
-----------
* ``P00`` projects onto ``sum_i |ii> / sqrt(d)``.
* ``weyl(d, k, l) = sum_n omega^(k n) |n><n - l|`` with ``omega = exp(2 pi i / d)``
  and indices mod d, so ``(W_kl x 1)|P00>`` has Bob's index equal to Alice's
  minus ``l``.  With this shift direction the fixed outcome relabelling
  ``j = i + 1 mod 3`` in the computational basis picks out the Bell states
  ``P_{k,2}`` (see :mod:`boundsim.witness`).
* ``P_kl = (W_kl x 1) P00 (W_kl x 1)^H``.

A point of the simplex is a ``d x d`` table ``c[k, l]`` of Bell weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadNormalization, IndexOutOfRange, OutOfRange, UnsupportedDimension
from .numkernel import herm_eigvals, partial_transpose

PHYSICAL_TOL = 1e-10
NORM_TOL = 1e-12


def _check_index(d: int, k: int, l: int) -> None:
    if d < 2:
        raise IndexOutOfRange(f"dimension must be >= 2, got {d}")
    if not (0 <= k < d and 0 <= l < d):
        raise IndexOutOfRange(f"Weyl index ({k}, {l}) outside 0..{d - 1}")


def weyl(d: int, k: int, l: int) -> np.ndarray:
    _check_index(d, k, l)
    n = np.arange(d)
    w = np.zeros((d, d), dtype=complex)
    w[n, (n - l) % d] = np.exp(2j * np.pi * k * n / d)
    return w


def bell_vector(d: int, k: int, l: int) -> np.ndarray:
    """State vector of ``P_kl``: ``sum_n omega^(k n) |n, n - l> / sqrt(d)``."""
    _check_index(d, k, l)
    n = np.arange(d)
    psi = np.zeros(d * d, dtype=complex)
    psi[n * d + (n - l) % d] = np.exp(2j * np.pi * k * n / d) / np.sqrt(d)
    return psi


def bell_state(d: int, k: int, l: int) -> np.ndarray:
    psi = bell_vector(d, k, l)
    return np.outer(psi, psi.conj())


@lru_cache(maxsize=None)
def bell_vectors(d: int) -> np.ndarray:
    """All Bell vectors, shape ``(d, d, d*d)`` indexed ``[k, l]`` (read-only, cached)."""
    out = np.array([[bell_vector(d, k, l) for l in range(d)] for k in range(d)])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def bell_projectors(d: int) -> np.ndarray:
    v = bell_vectors(d)
    out = np.einsum("kli,klj->klij", v, v.conj())
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def bell_projectors_pt(d: int) -> np.ndarray:
    """Partial transposes (on Alice) of all Bell projectors, shape ``(d*d, d*d, d*d)``."""
    P = bell_projectors(d)
    out = np.array([partial_transpose(P[k, l], d, d, "A") for k in range(d) for l in range(d)])
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SimplexCoeffs:
    d: int
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.shape != (self.d, self.d):
            raise BadNormalization(f"coefficient table must be {self.d}x{self.d}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise BadNormalization("coefficients must be finite")
        total = c.sum()
        if abs(total - 1.0) > NORM_TOL * max(1.0, np.abs(c).sum()):
            raise BadNormalization(f"coefficients sum to {total:.15g}, not 1")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def physical(self) -> bool:
        return bool(self.c.min() >= -PHYSICAL_TOL)

    def sorted_values(self) -> np.ndarray:
        return np.sort(self.c.ravel())

    def rows(self):
        """Yield ``(k, l, c_kl)`` in row-major order."""
        for k in range(self.d):
            for l in range(self.d):
                yield k, l, float(self.c[k, l])


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of the reduced state family; ``q4`` only exists for ``d > 3``."""

    d: int
    q1: float
    q2: float
    q3: float
    q4: float = 0.0

    def __post_init__(self):
        if self.d < 3:
            raise UnsupportedDimension(f"state family needs d >= 3, got {self.d}")
        if self.d == 3 and self.q4 != 0.0:
            raise UnsupportedDimension("q4 is not a parameter for d = 3")

    @property
    def q(self) -> tuple[float, ...]:
        if self.d == 3:
            return (self.q1, self.q2, self.q3)
        return (self.q1, self.q2, self.q3, self.q4)

    @classmethod
    def from_vector(cls, d: int, q) -> "FamilyParams":
        q = [float(x) for x in q]
        expected = 3 if d == 3 else 4
        if len(q) == 3 and d > 3:
            q = q + [0.0]
        if len(q) != expected:
            raise UnsupportedDimension(f"d={d} takes {expected} parameters, got {len(q)}")
        return cls(d, *q)


def family_table(d: int, q) -> np.ndarray:
    """Raw (unvalidated) coefficient table for parameters ``q``; linear in ``q``."""
    q1, q2, q3 = q[0], q[1], q[2]
    q4 = q[3] if len(q) > 3 else 0.0
    n1 = d * d - (d + 1)
    identity_weight = 1.0 - q1 / n1 - q2 / (d + 1) - q3 - (d - 3) * q4
    c = np.full((d, d), identity_weight / (d * d))
    c[0, 0] += q1 / n1
    c[1:, 0] += q2 / ((d + 1) * (d - 1))
    c[:, 1] += q3 / d
    if d > 3:
        c[:, 2 : d - 1] += q4 / d
    return c


def coeffs_from_family(p: FamilyParams) -> SimplexCoeffs:
    """Bell weights of the family state.

    The identity portion is spread uniformly, then ``q1`` goes to ``P00``,
    ``q2`` to the rest of the ``l = 0`` column, ``q3`` to the ``l = 1``
    column and ``q4`` to columns ``2 .. d-2``.  Column ``d-1`` only carries
    identity weight.
    """
    return SimplexCoeffs(p.d, family_table(p.d, p.q))


def state_from_coeffs(c: SimplexCoeffs) -> np.ndarray:
    if not isinstance(c, SimplexCoeffs):
        raise BadNormalization("expected SimplexCoeffs")
    return np.tensordot(c.c, bell_projectors(c.d), axes=([0, 1], [0, 1]))


def family_state(p: FamilyParams) -> np.ndarray:
    return state_from_coeffs(coeffs_from_family(p))


def coeffs_from_state(rho, d: int, tol: float = 1e-9) -> SimplexCoeffs:
    """Bell weights ``c_kl = Tr(P_kl rho)`` of a Bell-diagonal state.

    Raises :class:`BadNormalization` if ``rho`` is not Bell-diagonal within ``tol``.
    """
    r = np.asarray(rho, dtype=complex)
    if r.shape != (d * d, d * d):
        raise BadNormalization(f"expected a {d * d}x{d * d} matrix, got {r.shape}")
    v = bell_vectors(d).reshape(d * d, -1)
    m = v.conj() @ r @ v.T
    off = np.abs(m - np.diag(np.diag(m))).max()
    if off > tol:
        raise BadNormalization(f"state is not Bell-diagonal (off-diagonal weight {off:.3g})")
    return SimplexCoeffs(d, np.diag(m).real.reshape(d, d))


def horodecki_params(lam: float) -> FamilyParams:
    """Family parameters of the one-parameter Horodecki qutrit state, ``lam`` in [0, 5]."""
    if not (0.0 <= lam <= 5.0):
        raise OutOfRange(f"lambda={lam} outside [0, 5]")
    return FamilyParams(3, (30 - 5 * lam) / 21, -8 * lam / 21, (5 - 2 * lam) / 7)


def ppt_min_eig(rho, d: int) -> float:
    """Smallest eigenvalue of the partial transpose on Alice's side."""
    return float(herm_eigvals(partial_transpose(rho, d, d, "A"))[0])


def ppt_min_eig_coeffs(c) -> float:
    """Same as :func:`ppt_min_eig` for a simplex state, from its coefficient table."""
    table = c.c if isinstance(c, SimplexCoeffs) else np.asarray(c, dtype=float)
    d = table.shape[0]
    m = np.tensordot(table.ravel(), bell_projectors_pt(d), axes=1)
    return float(np.linalg.eigvalsh(m)[0])


# -- phase-space lines and unitary-equivalent variants (d = 3) ---------------------


def phase_space_lines(d: int = 3) -> list[tuple[tuple[int, int], ...]]:
    """All ``d (d + 1)`` lines of the ``Z_d x Z_d`` phase space for prime ``d``.

    Lines are grouped by direction; within a direction they are ordered by the
    point where they meet ``k = 0`` (or ``l = 0`` for the ``(0, 1)`` direction).
    """
    dirs = [(1, 0)] + [(u, 1) for u in range(d)]
    lines = []
    for du, dv in dirs:
        for off in range(d):
            start = (0, off) if (du, dv) == (1, 0) else (off, 0)
            lines.append(tuple(((start[0] + t * du) % d, (start[1] + t * dv) % d) for t in range(d)))
    return lines


@dataclass(frozen=True)
class VariantSpec:
    line: tuple[tuple[int, int], ...]
    apex: tuple[int, int]
    parallel: tuple[tuple[int, int], ...]


def _parallels(line, d):
    du = (line[1][0] - line[0][0]) % d
    dv = (line[1][1] - line[0][1]) % d
    pts = set(line)
    out = []
    for off in range(d * d):
        p0 = (off // d, off % d)
        cand = tuple(((p0[0] + t * du) % d, (p0[1] + t * dv) % d) for t in range(d))
        if set(cand) & pts or any(set(cand) == set(o) for o in out):
            continue
        out.append(cand)
    return out


def variant_specs() -> list[VariantSpec]:
    """The 72 (line, apex, parallel line) choices, identity choice first."""
    specs = []
    for line in phase_space_lines(3):
        pars = sorted(_parallels(line, 3), key=lambda ln: sorted(ln))
        for apex in sorted(line):
            for par in pars:
                specs.append(VariantSpec(line, apex, par))
    ident = VariantSpec(((0, 0), (1, 0), (2, 0)), (0, 0), ((0, 1), (1, 1), (2, 1)))
    key = lambda s: (set(s.line), s.apex, set(s.parallel))  # noqa: E731
    idx = next(i for i, s in enumerate(specs) if key(s) == key(ident))
    specs.insert(0, specs.pop(idx))
    return specs


def equivalent_variants(p: FamilyParams) -> list[SimplexCoeffs]:
    """The 72 relabellings of a d = 3 family state related by local unitaries."""
    if p.d != 3:
        raise UnsupportedDimension("unitary-equivalent variants are only defined for d = 3")
    base = coeffs_from_family(p).c
    apex_w, line_w, par_w, rest_w = base[0, 0], base[1, 0], base[0, 1], base[0, 2]
    out = []
    for s in variant_specs():
        c = np.full((3, 3), rest_w)
        for pt in s.line:
            c[pt] = line_w
        c[s.apex] = apex_w
        for pt in s.parallel:
            c[pt] = par_w
        out.append(SimplexCoeffs(3, c))
    return out


def random_simplex(d: int, rng: np.random.Generator) -> SimplexCoeffs:
    """Uniformly random point of the simplex (Dirichlet(1, ..., 1))."""
    c = rng.dirichlet(np.ones(d * d)).reshape(d, d)
    c /= c.sum()
    return SimplexCoeffs(d, c)

