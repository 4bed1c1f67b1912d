"""Correlation sums over mutually unbiased bases (the complementarity witness).

Alice measures basis ``k`` of a :class:`~boundsim.mubs.MubFamily`; Bob measures
its componentwise complex conjugate.  For one basis pair the correlation is

    C_k = sum_i P(i, sigma_k(i)),

with ``sigma_k`` a relabelling of Bob's outcomes.  Summing over ``m`` bases gives
``I_m``; every separable state obeys ``I_m <= 1 + (m - 1) / d``.  For a complete
family (``m = d + 1``) the bound is 2 and ``2 - I_{d+1} < 0`` certifies
entanglement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatch, UnsupportedLabeling
from .mubs import MubFamily, conjugate_basis, mub_family
from .numkernel import as_matrix
from .simplex import SimplexCoeffs, bell_vectors

PROB_TOL = 1e-12
TIE_TOL = 1e-12
EXHAUSTIVE_MAX_D = 6

# j = i + 1 (mod 3) on the computational basis, identity on the other three.
METHODS_D3 = ((1, 2, 0), (0, 1, 2), (0, 1, 2), (0, 1, 2))


@dataclass(frozen=True)
class Labeling:
    """Per-basis permutations of Bob's outcome index."""

    perms: tuple[tuple[int, ...], ...]
    conjugate_bob: bool = True

    def __post_init__(self):
        perms = tuple(tuple(int(x) for x in p) for p in self.perms)
        for p in perms:
            if sorted(p) != list(range(len(p))):
                raise UnsupportedLabeling(f"{p} is not a permutation")
        object.__setattr__(self, "perms", perms)

    @classmethod
    def identity(cls, d: int, m: int) -> "Labeling":
        return cls(tuple(tuple(range(d)) for _ in range(m)))

    @classmethod
    def methods_d3(cls) -> "Labeling":
        return cls(METHODS_D3)


LabelingArg = Union[str, Labeling]


@dataclass(frozen=True)
class CorrelationReport:
    d: int
    m: int
    correlations: tuple[float, ...]
    I: float
    bound: float
    witness: float | None
    labeling: Labeling = field(repr=False)

    @property
    def detected(self) -> bool:
        """True if the correlation sum exceeds the separable bound."""
        return self.I > self.bound

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "m": self.m,
            "correlations": list(self.correlations),
            "I": self.I,
            "bound": self.bound,
            "witness": self.witness,
            "detected": self.detected,
            "labeling": {
                "perms": [list(p) for p in self.labeling.perms],
                "conjugate_bob": self.labeling.conjugate_bob,
            },
        }


def separable_bound(m: int, d: int) -> Fraction:
    """Largest correlation sum a separable state reaches with ``m`` MUBs."""
    if m < 1 or d < 2:
        raise ValueError(f"need m >= 1 and d >= 2, got m={m}, d={d}")
    return 1 + Fraction(m - 1, d)


def joint_prob(rho, ket_a, ket_b) -> float:
    """``Tr(|a b><a b| rho)`` clamped to [0, 1]."""
    r = as_matrix(rho)
    a = np.asarray(ket_a, dtype=complex).ravel()
    b = np.asarray(ket_b, dtype=complex).ravel()
    if a.size * b.size != r.shape[0]:
        raise DimensionMismatch(f"kets of size {a.size} and {b.size} do not match a {r.shape[0]}-dim state")
    v = np.kron(a, b)
    p = float(np.real(v.conj() @ r @ v))
    return min(max(p, 0.0), 1.0)


def joint_prob_table(rho, basis_a, basis_b) -> np.ndarray:
    """``P[i, j] = <a_i b_j| rho |a_i b_j>`` for all outcome pairs."""
    r = as_matrix(rho)
    A = np.asarray(basis_a, dtype=complex)
    B = np.asarray(basis_b, dtype=complex)
    da, db = A.shape[1], B.shape[1]
    if da * db != r.shape[0]:
        raise DimensionMismatch(f"bases of dimension {da} and {db} do not match a {r.shape[0]}-dim state")
    t = r.reshape(da, db, da, db)
    # sum over n, m, n', m' of conj(A[i,n]) conj(B[j,m]) rho[n m, n' m'] A[i,n'] B[j,m']
    P = np.einsum("in,jm,nmpq,ip,jq->ij", A.conj(), B.conj(), t, A, B, optimize=True).real
    return np.clip(P, 0.0, 1.0)


def correlation(rho, basis_a, basis_b, sigma: Sequence[int] | None = None) -> float:
    P = joint_prob_table(rho, basis_a, basis_b)
    d = P.shape[0]
    sigma = range(d) if sigma is None else sigma
    return float(sum(P[i, j] for i, j in zip(range(d), sigma)))


@lru_cache(maxsize=None)
def _all_perms(d: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(d))), dtype=np.int64)


def best_relabeling_table(P: np.ndarray) -> tuple[tuple[int, ...], float]:
    """Permutation maximising ``sum_i P[i, sigma(i)]``.

    Exhaustive (lexicographically smallest maximiser) for ``d <= 6``; the
    Hungarian algorithm above that.
    """
    d = P.shape[0]
    if d <= EXHAUSTIVE_MAX_D:
        perms = _all_perms(d)
        vals = P[np.arange(d), perms].sum(axis=1)
        best = int(np.flatnonzero(vals >= vals.max() - TIE_TOL)[0])
        sigma = tuple(int(x) for x in perms[best])
    else:
        rows, cols = linear_sum_assignment(P, maximize=True)
        sigma = tuple(int(x) for x in cols[np.argsort(rows)])
    return sigma, float(sum(P[i, sigma[i]] for i in range(d)))


def best_relabeling(rho, basis_a, basis_b) -> tuple[tuple[int, ...], float]:
    return best_relabeling_table(joint_prob_table(rho, basis_a, basis_b))


def _resolve_fixed(labeling: LabelingArg, fam: MubFamily) -> Labeling | None:
    if isinstance(labeling, Labeling):
        lab = labeling
    elif labeling in ("maximize", "max"):
        return None
    elif labeling in ("methods_d3", "methods"):
        if fam.d != 3 or fam.m != 4:
            raise UnsupportedLabeling("the fixed qutrit labelling needs the complete d = 3 family")
        lab = Labeling.methods_d3()
    else:
        raise UnsupportedLabeling(f"unknown labeling {labeling!r}")
    if len(lab.perms) != fam.m or any(len(p) != fam.d for p in lab.perms):
        raise UnsupportedLabeling(f"labeling does not fit {fam.m} bases of dimension {fam.d}")
    return lab


def _report(d: int, m: int, tables, labeling: LabelingArg, fam: MubFamily, conjugate: bool) -> CorrelationReport:
    fixed = _resolve_fixed(labeling, fam)
    perms, cs = [], []
    for k, P in enumerate(tables):
        if fixed is None:
            sigma, ck = best_relabeling_table(P)
        else:
            sigma = fixed.perms[k]
            ck = float(sum(P[i, sigma[i]] for i in range(d)))
        perms.append(sigma)
        cs.append(ck)
    I = sum(cs)
    bound = float(separable_bound(m, d))
    witness = 2.0 - I if m == d + 1 else None
    return CorrelationReport(d, m, tuple(cs), I, bound, witness, Labeling(tuple(perms), conjugate))


def mcp(rho, fam: MubFamily | None = None, labeling: LabelingArg = "maximize", conjugate_bob: bool = True) -> CorrelationReport:
    """Run the complementarity protocol on a two-qudit density matrix.

    ``labeling`` is ``"maximize"`` (best relabelling per basis), ``"methods_d3"``
    (shift on the computational basis, identity elsewhere) or an explicit
    :class:`Labeling`.

    >>> from boundsim.simplex import FamilyParams, family_state
    >>> rep = mcp(family_state(FamilyParams(3, -0.07, -1.73, -0.5774)), labeling="methods_d3")
    >>> round(rep.witness, 3)
    -0.079
    """
    r = as_matrix(rho)
    d = int(round(np.sqrt(r.shape[0])))
    if d * d != r.shape[0]:
        raise DimensionMismatch(f"state dimension {r.shape[0]} is not a square")
    fam = mub_family(d) if fam is None else fam
    if fam.d != d:
        raise DimensionMismatch(f"family dimension {fam.d} does not match state dimension {d}")
    if isinstance(labeling, Labeling):
        conjugate_bob = labeling.conjugate_bob
    tables = []
    for k in range(fam.m):
        A = fam.bases[k]
        B = conjugate_basis(A) if conjugate_bob else A
        tables.append(joint_prob_table(r, A, B))
    return _report(d, fam.m, tables, labeling, fam, conjugate_bob)


# -- fast path for simplex states ------------------------------------------------


@dataclass(frozen=True)
class BellTables:
    """Joint-probability tables of every Bell state in every basis.

    ``tables[k, a, b]`` is the ``d x d`` outcome table of ``P_ab`` in basis ``k``
    (Bob conjugated).  Correlation tables are linear in the Bell weights, so a
    simplex state's tables are ``einsum('ab,kabij->kij', c, tables)``.
    """

    fam: MubFamily
    tables: np.ndarray


@lru_cache(maxsize=None)
def bell_tables(d: int) -> BellTables:
    fam = mub_family(d)
    vecs = bell_vectors(d).reshape(d, d, d, d)  # [a, b, n, m]
    out = np.empty((fam.m, d, d, d, d))
    for k in range(fam.m):
        A = fam.bases[k]
        amp = np.einsum("in,abnm,jm->abij", A.conj(), vecs, A, optimize=True)
        out[k] = np.abs(amp) ** 2
    out.setflags(write=False)
    return BellTables(fam, out)


def mcp_coeffs(c, labeling: LabelingArg = "maximize", tables: BellTables | None = None) -> CorrelationReport:
    """:func:`mcp` for a simplex state given by its Bell weights (no density matrix built)."""
    table = c.c if isinstance(c, SimplexCoeffs) else np.asarray(c, dtype=float)
    d = table.shape[0]
    bt = bell_tables(d) if tables is None else tables
    P = np.einsum("ab,kabij->kij", table, bt.tables)
    return _report(d, bt.fam.m, list(P), labeling, bt.fam, True)


def witness_coeffs(c, labeling: LabelingArg = "maximize", tables: BellTables | None = None) -> float:
    rep = mcp_coeffs(c, labeling, tables)
    if rep.witness is None:
        raise UnsupportedLabeling(f"no complete MUB family for d={rep.d}; witness undefined")
    return rep.witness
