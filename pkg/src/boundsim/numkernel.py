"""Dense complex linear algebra for small (at most 81 x 81) matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
functions here never mutate their inputs.

Fidelity convention
-------------------
:func:`fidelity` returns the *squared* Uhlmann fidelity

.. math::  F(\\rho, \\sigma) = \\left(\\mathrm{Tr}\\sqrt{\\sqrt{\\rho}\\,\\sigma\\sqrt{\\rho}}\\right)^2,

so that for a pure state :math:`\\rho = |\\psi\\rangle\\langle\\psi|` it reduces to
the overlap :math:`\\langle\\psi|\\sigma|\\psi\\rangle`.  All fidelities reported
by this package (tomography, CLI output) use this convention.
"""

from __future__ import annotations

import json
from typing import Literal

import numpy as np

from .errors import DimensionMismatch, NotAState, NotHermitian, NumericalError

HERMITIAN_TOL = 1e-9
PSD_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex array, validating shape and finiteness."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotAState("matrix has non-finite entries")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square matrices (standard block layout)."""
    return np.kron(as_matrix(a), as_matrix(b))


def hermiticity_error(m) -> float:
    a = as_matrix(m)
    return float(np.max(np.abs(a - a.conj().T)))


def _check_hermitian(a: np.ndarray, tol: float) -> None:
    err = float(np.max(np.abs(a - a.conj().T)))
    if err > tol:
        raise NotHermitian(f"max |m - m^H| = {err:.3e} exceeds tolerance {tol:.1e}")


def jacobi_eigh(m, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix with the cyclic complex Jacobi method.

    Each off-diagonal element ``a[p, q]`` is first made real by a diagonal phase
    and then annihilated by a plane rotation. Sweeps continue until the
    off-diagonal Frobenius norm falls below ``tol * ||m||_F``.

    Returns ``(values, vectors)`` with values ascending and ``vectors[:, i]``
    the eigenvector of ``values[i]``.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        raise NumericalError("Jacobi eigensolver did not converge")
    vals = np.diag(a).real
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def herm_eigvals(
    m, tol: float = HERMITIAN_TOL, method: Literal["lapack", "jacobi"] = "lapack"
) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    Raises :class:`NotHermitian` if ``max |m - m^H| > tol``.  The default
    ``lapack`` backend is ``numpy.linalg.eigvalsh``; ``jacobi`` uses
    :func:`jacobi_eigh` and serves as an independent cross-check.
    """
    a = as_matrix(m)
    _check_hermitian(a, tol)
    h = 0.5 * (a + a.conj().T)
    if method == "jacobi":
        return jacobi_eigh(h)[0]
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    return np.linalg.eigvalsh(h)


def herm_eigh(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    a = as_matrix(m)
    _check_hermitian(a, tol)
    return np.linalg.eigh(0.5 * (a + a.conj().T))


def partial_transpose(m, dA: int, dB: int, side: Literal["A", "B"] = "A") -> np.ndarray:
    """Transpose one tensor factor of an operator on C^dA (x) C^dB.

    Pure index permutation, so applying it twice returns the input bit-exactly.
    """
    a = as_matrix(m)
    if a.shape[0] != dA * dB:
        raise DimensionMismatch(f"matrix dimension {a.shape[0]} != {dA}*{dB}")
    t = a.reshape(dA, dB, dA, dB)
    if side == "A":
        t = t.transpose(2, 1, 0, 3)
    elif side == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', not {side!r}")
    return np.ascontiguousarray(t.reshape(dA * dB, dA * dB))


def check_state(rho, tol: float = HERMITIAN_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate a density matrix (Hermitian, PSD, unit trace) and return it."""
    a = as_matrix(rho)
    try:
        _check_hermitian(a, tol)
    except NotHermitian as exc:
        raise NotAState(str(exc)) from None
    tr = np.trace(a)
    if abs(tr - 1.0) > tol * max(1, a.shape[0]):
        raise NotAState(f"trace {tr:.12g} is not 1")
    lo = np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]
    if lo < -psd_tol:
        raise NotAState(f"minimum eigenvalue {lo:.3e} < -{psd_tol:.0e}")
    return a


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    # eigenvalues at round-off level are zeroed; their square roots would be ~1e-8
    cut = a.shape[0] * np.finfo(float).eps * max(float(np.abs(w).max()), 1.0)
    w = np.where(w > cut, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Squared Uhlmann fidelity, clipped to [0, 1]; see module docstring.

    Computed as the squared nuclear norm of ``sqrt(sigma) sqrt(rho)``; singular
    values carry absolute (not square-root) round-off, which keeps pure-state
    fidelities accurate.
    """
    r = check_state(rho)
    s = check_state(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"{r.shape} vs {s.shape}")
    f = float(np.linalg.svd(_psd_sqrt(s) @ _psd_sqrt(r), compute_uv=False).sum() ** 2)
    return min(max(f, 0.0), 1.0)


def matrix_to_dict(m) -> dict:
    a = as_matrix(m)
    return {"dim": int(a.shape[0]), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        n = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros(n * n)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionMismatch(f"malformed matrix JSON: {exc}") from None
    if n < 1 or re.size != n * n or im.size != n * n:
        raise DimensionMismatch(f"matrix JSON with dim={n} needs {n * n} entries")
    return (re + 1j * im).reshape(n, n)


def dump_matrix(m, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(m), fh)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))
