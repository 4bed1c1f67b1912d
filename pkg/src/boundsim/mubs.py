"""Complete sets of mutually unbiased bases (MUBs).

For a prime power ``d = p^n`` the family consists of the computational basis
followed by ``d`` bases labelled by field elements ``b`` of GF(d):

* odd ``p``: vector ``a`` of basis ``b`` has components
  ``omega^tr(b x^2 + a x) / sqrt(d)`` with ``omega = exp(2 pi i / p)``;
* ``p = 2``: basis ``b`` is the joint eigenbasis of the commuting Pauli class
  ``{X(a) Z(b a)}``.  Its first vector spans the joint +1 eigenspace of the
  (Hermitian-normalised) generators and vector ``a`` is ``Z(a)`` applied to it.

In both cases the vector order follows the integer encoding of the field
(see :mod:`boundsim.galois`), so the labelling is reproducible.  For ``d = 3``
this is exactly the family used in the qutrit experiment, e.g. the second basis
is ``{(1,1,1), (1,w,w^2), (1,w^2,w)} / sqrt(3)``.

``d = 6`` has no known complete family; :func:`mub_family` returns the
computational basis, the Fourier basis and one further unbiased basis stored as
literal phase data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedDimension
from .galois import GaloisField, gf_make, prime_power

# Third basis for d = 6: entries exp(2 pi i E / 12) / sqrt(6), row = vector.
_D6_THIRD_PHASES = (
    (0, 7, 4, 3, 4, 7),
    (0, 11, 0, 3, 8, 3),
    (0, 3, 8, 3, 0, 11),
    (0, 1, 4, 9, 4, 1),
    (0, 5, 0, 9, 8, 9),
    (0, 9, 8, 9, 0, 5),
)


@dataclass(frozen=True)
class MubFamily:
    """``bases[k, i]`` is the i-th unit vector of basis k (k = 0 is computational)."""

    d: int
    bases: np.ndarray

    @property
    def m(self) -> int:
        return self.bases.shape[0]

    @property
    def complete(self) -> bool:
        return self.m == self.d + 1

    def basis(self, k: int) -> np.ndarray:
        return self.bases[k]

    def __len__(self) -> int:
        return self.m


@dataclass(frozen=True)
class MubReport:
    max_overlap_deviation: float
    max_orthonormality_deviation: float

    def ok(self, tol: float = 1e-10) -> bool:
        return self.max_overlap_deviation <= tol and self.max_orthonormality_deviation <= tol


def _fourier(d: int) -> np.ndarray:
    n = np.arange(d)
    return np.exp(2j * np.pi * np.outer(n, n) / d) / np.sqrt(d)


def _odd_bases(F: GaloisField) -> list[np.ndarray]:
    d, p = F.order, F.p
    omega = np.exp(2j * np.pi / p)
    tr = np.array([F.trace(a) for a in range(d)])
    xs = np.arange(d)
    sq = F.mul[xs, xs]
    out = []
    for b in range(d):
        quad = F.mul[b, sq]
        basis = np.empty((d, d), dtype=complex)
        for a in range(d):
            basis[a] = omega ** tr[F.add[quad, F.mul[a, xs]]]
        out.append(basis / np.sqrt(d))
    return out


def _even_bases(F: GaloisField) -> list[np.ndarray]:
    d = F.order
    xs = np.arange(d)
    tr = np.array([F.trace(a) for a in range(d)])

    def shift(alpha):
        m = np.zeros((d, d))
        m[F.add[xs, alpha], xs] = 1.0
        return m

    def zdiag(beta):
        return (-1.0) ** tr[F.mul[beta, xs]]

    generators = [F.p**j for j in range(F.n)]
    out = []
    for b in range(d):
        proj = np.eye(d, dtype=complex)
        for e in generators:
            g = shift(e) * zdiag(F.mul[b, e])[None, :]
            if tr[F.mul[F.mul[b, e], e]]:
                g = 1j * g  # square is -1; rescale to a Hermitian involution
            proj = proj @ (np.eye(d) + g) / 2
        v = proj[:, int(np.argmax(np.linalg.norm(proj, axis=0)))]
        v = v / np.linalg.norm(v)
        v = v * np.exp(-1j * np.angle(v[0]))
        out.append(np.array([zdiag(a) * v for a in range(d)]))
    return out


def mub_family(d: int) -> MubFamily:
    """Return the MUB family for dimension ``d``.

    Prime powers up to 16 give ``d + 1`` bases; ``d = 6`` gives 3 bases.
    """
    if d == 6:
        third = np.exp(2j * np.pi * np.array(_D6_THIRD_PHASES) / 12) / np.sqrt(6)
        bases = [np.eye(6, dtype=complex), _fourier(6), third]
        return MubFamily(6, np.array(bases))
    pn = prime_power(d)
    if pn is None or d > 16:
        raise UnsupportedDimension(f"no MUB construction for d={d}")
    F = gf_make(*pn)
    rest = _even_bases(F) if F.p == 2 else _odd_bases(F)
    bases = np.array([np.eye(d, dtype=complex)] + rest)
    bases.setflags(write=False)
    return MubFamily(d, bases)


def verify_mub(fam: MubFamily) -> MubReport:
    """Exhaustive check of orthonormality and pairwise unbiasedness."""
    d = fam.d
    ortho = 0.0
    overlap = 0.0
    for k in range(fam.m):
        g = fam.bases[k].conj() @ fam.bases[k].T
        ortho = max(ortho, float(np.max(np.abs(g - np.eye(d)))))
        for j in range(k + 1, fam.m):
            o = np.abs(fam.bases[k].conj() @ fam.bases[j].T) ** 2
            overlap = max(overlap, float(np.max(np.abs(o - 1.0 / d))))
    return MubReport(overlap, ortho)


def conjugate_basis(basis) -> np.ndarray:
    """Componentwise complex conjugate of every vector in ``basis``."""
    return np.conj(np.asarray(basis, dtype=complex))


def family_to_json(fam: MubFamily) -> list:
    return [[[[float(z.real), float(z.imag)] for z in vec] for vec in basis] for basis in fam.bases]


def export_family(d: int, path) -> None:
    with open(path, "w") as fh:
        json.dump(family_to_json(mub_family(d)), fh)


def family_from_json(obj) -> MubFamily:
    arr = np.asarray(obj, dtype=float)
    bases = arr[..., 0] + 1j * arr[..., 1]
    return MubFamily(bases.shape[1], bases)
