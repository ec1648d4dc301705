"""Exact diagonalization on small periodic lattices.

The leading transfer-matrix eigenstate defines inhomogeneous reduced density
matrices of the face model.  From those we extract the two-site function
``omega``, check the discrete functional equation and measure spin-chain
correlators directly in the ground state of the three-spin Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .face_model import (HEIGHT_BASIS, SPIN_BASIS, LatticeOperator, _check_even,
                         apply_transfer, config_index, hamiltonian_irf,
                         height_configs, pauli_string, row_kernels, row_sweep,
                         weight_tensor)

#: Spectral point at which the leading eigenvector is selected.  All
#: transfer matrices of a commuting family share it; at this point the
#: physical state is separated from the rest of the spectrum by a gap.
REFERENCE_LAMBDA = -0.5

DENSE_LIMIT = 1024
DEGENERACY_TOL = 1e-10
#: Basis tag of face-model matrices ordered as two spin-chain blocks.
DIRECT_SUM_BASIS = "irf-direct-sum"

CORRELATOR_STRINGS = {
    "x1": {1: "x"},
    "x1x2": {1: "x", 2: "x"},
    "x1x2x3": {1: "x", 2: "x", 3: "x"},
    "x1x3": {1: "x", 3: "x"},
    "y1y3": {1: "y", 3: "y"},
    "z1z3": {1: "z", 3: "z"},
    "yxy": {1: "y", 2: "x", 3: "y"},
    "zxz": {1: "z", 2: "x", 3: "z"},
}


class DegenerateStateError(RuntimeError):
    """Raised when the state selected as ground state is not unique."""


class StructureError(RuntimeError):
    """Raised when a density matrix violates the expected block structure."""


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max())
    ph = v[nz[0]] / abs(v[nz[0]])
    return v / ph


def leading_eigenpair(T, allow_degenerate: bool = False, max_iter: int | None = None,
                      tol: float = 0.0) -> tuple[complex, np.ndarray]:
    """Eigenvalue of largest modulus and its right eigenvector.

    Parameters
    ----------
    T : LatticeOperator, ndarray, sparse matrix or LinearOperator
        Square operator of dimension at least 4.
    allow_degenerate : bool
        If False a leading modulus shared by two eigenvalues (within
        ``1e-10`` relative) raises :class:`DegenerateStateError`.  If True
        the eigenvalue with the largest real part among the leading ones is
        returned.
    max_iter : int, optional
        Iteration cap for the Krylov solver used above ``DENSE_LIMIT``.
    tol : float
        Krylov convergence tolerance (0 means machine precision).

    Returns
    -------
    eigenvalue : complex
    vector : ndarray
        Unit-norm eigenvector whose first nonzero component is real positive.
    """
    op = T.matrix if isinstance(T, LatticeOperator) else T
    n = op.shape[0]
    if op.shape[0] != op.shape[1] or n < 4:
        raise ValueError(f"need a square operator of dimension >= 4, got {op.shape}")
    if n <= DENSE_LIMIT and not isinstance(op, spla.LinearOperator):
        a = op.toarray() if sp.issparse(op) else np.asarray(op, dtype=complex)
        w, vr = np.linalg.eig(a)
    else:
        k = min(6, n - 2)
        try:
            w, vr = spla.eigs(op, k=k, which="LM", maxiter=max_iter, tol=tol)
        except spla.ArpackNoConvergence as exc:
            raise RuntimeError(
                f"Krylov eigensolver did not converge: {len(exc.eigenvalues)} of {k} "
                f"eigenvalues found after maxiter={max_iter}") from exc
    order = np.argsort(-np.abs(w), kind="stable")
    top = np.abs(w[order[0]])
    lead = [i for i in order if abs(np.abs(w[i]) - top) <= DEGENERACY_TOL * max(top, 1.0)]
    if len(lead) > 1 and not allow_degenerate:
        raise DegenerateStateError(
            f"leading modulus {top:.12g} shared by {len(lead)} eigenvalues: "
            f"{np.round(w[lead], 12)}")
    i = max(lead, key=lambda j: (w[j].real, -j))
    return complex(w[i]), _normalize_phase(vr[:, i])


@dataclass
class GroundState:
    """Leading eigenstate of a commuting family of transfer matrices.

    Attributes
    ----------
    vector : ndarray
        Right eigenvector, unit norm.
    dual : ndarray
        Left eigenvector normalized so that ``dual @ vector == 1``.
    length : int
        Lattice size ``L``.
    inhomogeneities : ndarray
        Column shifts ``u_1..u_L``.
    eigenvalue_at : dict
        Cached leading eigenvalues ``Lambda_0(lambda)``.
    """

    vector: np.ndarray
    dual: np.ndarray
    length: int
    inhomogeneities: np.ndarray
    eigenvalue_at: dict = field(default_factory=dict)

    def eigenvalue(self, lam: complex) -> complex:
        """Leading eigenvalue at ``lam`` (cached after the first call)."""
        key = complex(lam)
        if key not in self.eigenvalue_at:
            tv = apply_transfer(self.vector, key, self.inhomogeneities, left=False)
            val = complex(self.dual @ tv)
            scale = max(abs(val), 1e-300)
            resid = np.abs(tv - val * self.vector).max() / scale
            if resid > 1e-8:
                raise RuntimeError(
                    f"stored vector is not an eigenvector of T({key}): residual {resid:.2e}")
            self.eigenvalue_at[key] = val
        return self.eigenvalue_at[key]

    def with_eigenvalues(self, lambdas: Sequence[complex]) -> "GroundState":
        """Precompute ``Lambda_0`` at every point of ``lambdas``."""
        for lam in lambdas:
            self.eigenvalue(lam)
        return self


def ground_state(L: int, inhomogeneities: Sequence[complex] | None = None,
                 lambdas: Sequence[complex] = ()) -> GroundState:
    """Leading eigenstate of the transfer matrix family.

    The eigenvector is selected as the eigenvalue of largest modulus of
    ``T(REFERENCE_LAMBDA)``.  Both the right and the left eigenvector are kept
    because the transfer matrix is not symmetric for generic inhomogeneities.
    """
    _check_even(L, 4)
    u = np.zeros(L, dtype=complex) if inhomogeneities is None else np.asarray(
        inhomogeneities, dtype=complex)
    if len(u) != L:
        raise ValueError(f"need {L} inhomogeneities, got {len(u)}")
    lam = REFERENCE_LAMBDA
    dim = 2**L
    if dim <= DENSE_LIMIT:
        t = apply_transfer(np.eye(dim, dtype=complex), lam, u, left=True).T
        w, vl, vr = sla.eig(t, left=True, right=True)
        order = np.argsort(-np.abs(w), kind="stable")
        if abs(abs(w[order[0]]) - abs(w[order[1]])) <= DEGENERACY_TOL * abs(w[order[0]]):
            raise DegenerateStateError(
                f"leading eigenvalue of T({lam}) is degenerate: {w[order[:2]]}")
        right = vr[:, order[0]]
        left = vl[:, order[0]].conj()
    else:
        right_op = spla.LinearOperator(
            (dim, dim), dtype=complex,
            matvec=lambda v: apply_transfer(v, lam, u, left=False))
        left_op = spla.LinearOperator(
            (dim, dim), dtype=complex,
            matvec=lambda v: apply_transfer(v, lam, u, left=True))
        _, right = leading_eigenpair(right_op)
        _, left = leading_eigenpair(left_op)
    right = _normalize_phase(right)
    left = left / (left @ right)
    gs = GroundState(right, left, L, u)
    gs.with_eigenvalues([lam, *lambdas])
    return gs


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix on an explicitly ordered basis.

    Attributes
    ----------
    matrix : ndarray
        Square complex matrix.
    sites : int
        Number of sites ``n``.  Face-model matrices have dimension
        ``2**(n+1)``, chain matrices ``2**n``.
    basis_tag : str
        Ordering of rows and columns.
    spectral_points : tuple
        The spectral parameters used.
    kind : str
        ``"irf"`` or ``"chain"``.
    """

    matrix: np.ndarray
    sites: int
    basis_tag: str
    spectral_points: tuple
    kind: str = "irf"

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def reduced_density_irf(gs: GroundState, lambdas: Sequence[complex],
                        inhomogeneities: Sequence[complex] | None = None,
                        n: int | None = None) -> DensityMatrix:
    """Inhomogeneous reduced density matrix of the face model.

    Element ``(alpha_1..alpha_{n+1}; beta_1..beta_{n+1})`` is the expectation
    value of a product of ``n`` monodromy elements with fixed boundary
    heights, divided by ``prod_k Lambda_0(lambda_k)``.  Because a row is
    periodic, the corner heights are identified: entries with
    ``alpha_1 != beta_1`` or ``alpha_{n+1} != beta_{n+1}`` vanish.

    Parameters
    ----------
    gs : GroundState
        Must already hold ``Lambda_0`` at every ``lambdas[k]``.
    lambdas : sequence of complex
        Spectral parameters ``lambda_1..lambda_n``.
    inhomogeneities : sequence of complex, optional
        Checked against those of ``gs`` when given.
    n : int, optional
        Number of sites; defaults to ``len(lambdas)``.
    """
    lams = [complex(x) for x in lambdas]
    n = len(lams) if n is None else n
    if n != len(lams):
        raise ValueError(f"n={n} does not match {len(lams)} spectral points")
    if not 1 <= n <= gs.length:
        raise ValueError(f"need 1 <= n <= L={gs.length}, got n={n}")
    if inhomogeneities is not None and not np.allclose(
            np.asarray(inhomogeneities, dtype=complex), gs.inhomogeneities):
        raise ValueError("ground state was built with different inhomogeneities")
    missing = [x for x in lams if x not in gs.eigenvalue_at]
    if missing:
        raise KeyError(f"Lambda_0 not precomputed at {missing}; "
                       "call gs.with_eigenvalues(lambdas) first")
    kernels = [row_kernels(x, gs.inhomogeneities) for x in lams]
    # partial products keyed by the (alpha_k, beta_k) history
    level = {((s,), (s,)): gs.dual for s in (0, 1)}
    for k in range(n):
        nxt = {}
        last = k == n - 1
        for (al, be), v in level.items():
            for a2, b2 in product((0, 1), repeat=2):
                if last and a2 != b2:
                    continue
                w = row_sweep(v, kernels[k], al[-1], a2, be[-1], b2)
                nxt[(al + (a2,), be + (b2,))] = w
        level = nxt
    dim = 2 ** (n + 1)
    out = np.zeros((dim, dim), dtype=complex)
    norm = np.prod([gs.eigenvalue_at[x] for x in lams])
    for (al, be), v in level.items():
        i = int("".join(map(str, al)), 2)
        j = int("".join(map(str, be)), 2)
        out[i, j] = (v @ gs.vector) / norm
    return DensityMatrix(out, n, HEIGHT_BASIS, tuple(lams), "irf")


def _qkz_matrices(lams: Sequence[complex]):
    n = len(lams)
    ln = lams[-1]
    cfg = height_configs(n + 1)
    idx = (1 - cfg) // 2
    dim = 2 ** (n + 1)
    wts = [weight_tensor(ln - lk) for lk in lams[:-1]]
    wbs = [weight_tensor(lk - ln) for lk in lams[:-1]]
    wcross = weight_tensor(-1.0)
    m1 = np.zeros((dim, dim), dtype=complex)
    m2 = np.zeros((dim, dim), dtype=complex)
    for p in range(dim):
        al = idx[p]
        for q in range(dim):
            ga = idx[q]
            if ga[n] == al[n - 1]:
                m1[p, q] = np.prod([wts[k][al[k], al[k + 1], ga[k + 1], ga[k]]
                                    for k in range(n - 1)])
            # here p indexes delta and q indexes beta
            de, be = al, ga
            m2[p, q] = np.prod([wbs[k][de[k + 1], be[k + 1], be[k], de[k]]
                                for k in range(n - 1)]) * wcross[de[n], be[n], be[n - 1], de[n - 1]]
    corner = (idx[:, None, 0] == idx[None, :, 0]) & (idx[:, None, n] == idx[None, :, n])
    return m1, m2, corner


def apply_qkz_operator(D: DensityMatrix, lambdas: Sequence[complex] | None = None) -> DensityMatrix:
    """Apply the linear operator of the discrete functional equation.

    ``A_n[D]`` contracts ``D`` with face weights at arguments
    ``lambda_n - lambda_k`` (upper side) and ``lambda_k - lambda_n`` (lower
    side), closes with a crossing weight at ``-1`` and divides by
    ``prod_k (1 - (lambda_k - lambda_n)**2)``.
    """
    lams = [complex(x) for x in (D.spectral_points if lambdas is None else lambdas)]
    n = len(lams)
    if D.kind != "irf" or D.matrix.shape[0] != 2 ** (n + 1):
        raise ValueError("apply_qkz_operator needs an n-site face-model density matrix")
    den = np.prod([1 - (lk - lams[-1]) ** 2 for lk in lams])
    if abs(den) < 1e-12:
        raise ZeroDivisionError(f"singular prefactor: some (lambda_k - lambda_n)**2 = 1 in {lams}")
    m1, m2, corner = _qkz_matrices(lams)
    out = np.where(corner, m1 @ D.matrix @ m2, 0.0) / den
    return DensityMatrix(out, n, D.basis_tag, tuple(lams), "irf")


def verify_qkz(L: int, n: int, lambdas: Sequence[complex],
               inhomogeneities: Sequence[complex]) -> float:
    """Residual ``max|D_n(.., lambda_n - 1) - A_n[D_n(.., lambda_n)]|``.

    ``lambda_n`` must coincide with one of the inhomogeneities.
    """
    lams = [complex(x) for x in lambdas]
    u = np.asarray(inhomogeneities, dtype=complex)
    if len(lams) != n:
        raise ValueError(f"need {n} spectral points, got {len(lams)}")
    if not np.any(np.abs(u - lams[-1]) < 1e-14):
        raise ValueError("lambda_n must equal one of the inhomogeneities")
    shifted = lams[:-1] + [lams[-1] - 1]
    gs = ground_state(L, u, lambdas=lams + shifted)
    lhs = reduced_density_irf(gs, shifted)
    rhs = apply_qkz_operator(reduced_density_irf(gs, lams), lams)
    return float(np.abs(lhs.matrix - rhs.matrix).max())


def partial_trace_to_chain(D: DensityMatrix) -> DensityMatrix:
    """Trace out the outer heights ``alpha_1`` and ``alpha_{n+1}``.

    The result is indexed by the inner heights ``alpha_2..alpha_n`` in
    lexicographic order and has dimension ``2**(n-1)``.
    """
    n = D.sites
    if D.kind != "irf":
        raise ValueError("partial_trace_to_chain expects a face-model matrix")
    if D.basis_tag == DIRECT_SUM_BASIS:
        D = from_direct_sum_order(D)
    t = D.matrix.reshape((2,) + (2 ** (n - 1),) + (2,) + (2,) + (2 ** (n - 1),) + (2,))
    red = np.einsum("aibajb->ij", t)
    return DensityMatrix(red, n - 1, HEIGHT_BASIS, D.spectral_points, "chain")


@lru_cache(maxsize=None)
def direct_sum_permutation(n: int) -> np.ndarray:
    """Height-basis indices listed in block (direct-sum) order.

    Position ``p = block * 2**n + s`` holds the height configuration with
    ``alpha_1`` given by the block (``+`` first) and spins
    ``s_i = alpha_1 alpha_i alpha_{i+1}`` whose lexicographic index is ``s``.
    """
    cfg = height_configs(n + 1)
    perm = np.empty(2 ** (n + 1), dtype=int)
    for i, a in enumerate(cfg):
        spins = [a[0] * a[k] * a[k + 1] for k in range(n)]
        pos = (0 if a[0] == 1 else 2**n) + config_index(spins)
        perm[pos] = i
    return perm


def to_direct_sum_order(D: DensityMatrix) -> np.ndarray:
    """Reorder a face-model density matrix into the two-block basis."""
    if D.basis_tag == DIRECT_SUM_BASIS:
        return D.matrix
    perm = direct_sum_permutation(D.sites)
    return D.matrix[np.ix_(perm, perm)]


def from_direct_sum_order(D: DensityMatrix) -> DensityMatrix:
    """Inverse of :func:`to_direct_sum_order` for a matrix tagged as direct-sum."""
    if D.basis_tag != DIRECT_SUM_BASIS:
        raise ValueError(f"expected basis {DIRECT_SUM_BASIS!r}, got {D.basis_tag!r}")
    perm = direct_sum_permutation(D.sites)
    out = np.empty_like(D.matrix)
    out[np.ix_(perm, perm)] = D.matrix
    return DensityMatrix(out, D.sites, HEIGHT_BASIS, D.spectral_points, D.kind)


def chain_block(D: DensityMatrix, tol: float = 1e-8) -> np.ndarray:
    """Extract the spin-chain block of a face-model density matrix.

    Raises
    ------
    StructureError
        If the reordered matrix is not ``B/2 (+) B/2`` within ``tol``.
    """
    r = to_direct_sum_order(D)
    h = 2**D.sites
    b1, b2 = r[:h, :h], r[h:, h:]
    off = max(np.abs(r[:h, h:]).max(), np.abs(r[h:, :h]).max())
    diff = np.abs(b1 - b2).max()
    if off > tol or diff > tol:
        raise StructureError(
            f"direct-sum structure violated: off-block {off:.2e}, block difference {diff:.2e}")
    return 2 * b1


def omega_from_ed(L, lambda1: complex, lambda2: complex,
                  inhomogeneities: Sequence[complex] | None = None) -> complex:
    """Two-site function ``omega(lambda1, lambda2)`` from the exact state.

    Parameters
    ----------
    L : int or GroundState
        Lattice size, or a prepared ground state to reuse.
    """
    gs = L if isinstance(L, GroundState) else ground_state(L, inhomogeneities)
    lams = [complex(lambda1), complex(lambda2)]
    gs.with_eigenvalues(lams)
    block = chain_block(reduced_density_irf(gs, lams))
    # block = (1/4 - w/6) I + (w/3) P12; the P12 coefficient sits at (+-, -+)
    return complex(3 * block[1, 2])


@lru_cache(maxsize=8)
def _hamiltonian_ground_state(L: int) -> np.ndarray:
    h = hamiltonian_irf(L).matrix
    if h.shape[0] <= 256:
        w, v = np.linalg.eigh(h.toarray())
        e, vec = w[:2], v[:, 0]
    else:
        w, v = spla.eigsh(h, k=2, which="SA", tol=0)
        order = np.argsort(w)
        e, vec = w[order], v[:, order[0]]
    if e[1] - e[0] < DEGENERACY_TOL:
        raise DegenerateStateError(f"ground level of L={L} is degenerate: gap {e[1] - e[0]:.2e}")
    vec = _normalize_phase(vec)
    vec.setflags(write=False)
    return vec


def correlator_ed(L: int, name: str) -> float:
    """Ground-state expectation value of a named Pauli string.

    Parameters
    ----------
    L : int
        Even chain length, at most 12 in practice.
    name : str
        One of ``x1, x1x2, x1x2x3, x1x3, y1y3, z1z3, yxy, zxz``.
    """
    if name not in CORRELATOR_STRINGS:
        raise KeyError(f"unknown correlator {name!r}; choose from {sorted(CORRELATOR_STRINGS)}")
    _check_even(L, 4)
    vec = _hamiltonian_ground_state(L)
    op = pauli_string(L, CORRELATOR_STRINGS[name])
    return float(np.real(np.vdot(vec, op @ vec)))


__all__ = [
    "CORRELATOR_STRINGS", "DIRECT_SUM_BASIS", "DegenerateStateError", "DensityMatrix", "GroundState",
    "StructureError", "SPIN_BASIS", "apply_qkz_operator", "chain_block", "correlator_ed",
    "direct_sum_permutation", "from_direct_sum_order", "ground_state", "leading_eigenpair", "omega_from_ed",
    "partial_trace_to_chain", "reduced_density_irf", "to_direct_sum_order", "verify_qkz",
]
