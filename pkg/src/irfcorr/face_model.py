"""Face weights, row-to-row transfer matrices and the three-spin Hamiltonian.

Heights take the values ``+1`` and ``-1``.  A configuration of ``L`` heights
is indexed lexicographically with ``+ < -`` and height 1 as the most
significant digit, i.e. ``+`` maps to bit 0 and ``-`` to bit 1.  This single
ordering is referred to by the basis tag :data:`HEIGHT_BASIS` and is used by
every other module of the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

HEIGHT_BASIS = "height-lex"
SPIN_BASIS = "spin-lex"

# Corner order (a, b, c, d) = (bottom-left, bottom-right, top-right, top-left).
_A_TYPE = {(1, 1, 1, 1), (-1, -1, -1, -1), (-1, 1, -1, 1), (1, -1, 1, -1)}
_B_TYPE = {(1, 1, -1, -1), (-1, -1, 1, 1), (1, -1, -1, 1), (-1, 1, 1, -1)}
_C_TYPE = {(1, 1, 1, -1), (-1, -1, -1, 1), (1, -1, 1, 1), (-1, 1, -1, -1)}

Matrix = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class LatticeOperator:
    """Square operator on an explicitly ordered basis.

    Attributes
    ----------
    matrix : ndarray or sparse matrix
        The ``2**L x 2**L`` matrix.
    basis_tag : str
        Name of the ordering used for rows and columns.
    """

    matrix: Matrix
    basis_tag: str = HEIGHT_BASIS

    def __post_init__(self):
        shape = self.matrix.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"operator must be square, got shape {shape}")
        if shape[0] & (shape[0] - 1):
            raise ValueError(f"dimension {shape[0]} is not a power of two")
        if self.basis_tag not in (HEIGHT_BASIS, SPIN_BASIS):
            raise ValueError(f"unknown basis tag {self.basis_tag!r}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        """Return the matrix as a dense ndarray."""
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)


def _check_even(L: int, minimum: int = 2) -> None:
    if int(L) != L or L < minimum:
        raise ValueError(f"L must be an integer >= {minimum}, got {L}")
    if L % 2:
        raise ValueError(f"odd L={L} is not supported: height-parity sectors do not close")


def _check_height(h) -> None:
    if h not in (1, -1):
        raise ValueError(f"heights must be +1 or -1, got {h!r}")


def face_weight(a: int, b: int, c: int, d: int, lam: complex) -> complex:
    """Boltzmann weight of one face.

    Parameters
    ----------
    a, b, c, d : {+1, -1}
        Heights at the bottom-left, bottom-right, top-right and top-left
        corners.
    lam : complex
        Spectral parameter.

    Returns
    -------
    complex
        ``lam + 1``, ``lam`` or ``1`` for the three allowed classes and zero
        for every other pattern.
    """
    for h in (a, b, c, d):
        _check_height(h)
    t = (a, b, c, d)
    if t in _A_TYPE:
        return lam + 1
    if t in _B_TYPE:
        return lam
    if t in _C_TYPE:
        return 1.0 + 0 * lam
    return 0.0 * lam


def weight_tensor(lam: complex) -> np.ndarray:
    """All face weights at ``lam`` as a ``(2, 2, 2, 2)`` complex array.

    Index 0 stands for height ``+`` and index 1 for ``-``; the axes follow the
    corner order of :func:`face_weight`.
    """
    w = np.zeros((2, 2, 2, 2), dtype=complex)
    for t in _A_TYPE:
        w[tuple((1 - h) // 2 for h in t)] = lam + 1
    for t in _B_TYPE:
        w[tuple((1 - h) // 2 for h in t)] = lam
    for t in _C_TYPE:
        w[tuple((1 - h) // 2 for h in t)] = 1.0
    return w


def check_yang_baxter(lam: complex, mu: complex) -> float:
    """Maximum residual of the face Yang-Baxter equation.

    With external heights ``a..f`` around a hexagon and the internal height
    ``g`` summed, the identity checked is

    ``sum_g W(a,b,c,g|l) W(g,e,d,c|m) W(g,a,f,e|l-m)
      = sum_g W(g,d,c,b|l-m) W(d,e,f,g|l) W(g,b,a,f|m)``

    over all ``2**6`` external assignments.
    """
    wl, wm, wd = weight_tensor(lam), weight_tensor(mu), weight_tensor(lam - mu)
    lhs = np.einsum("abcg,gedc,gafe->abcdef", wl, wm, wd)
    rhs = np.einsum("gdcb,defg,gbaf->abcdef", wd, wl, wm)
    return float(np.abs(lhs - rhs).max())


def height_configs(L: int) -> np.ndarray:
    """All height rows of length ``L`` in basis order, shape ``(2**L, L)``."""
    bits = (np.arange(2**L)[:, None] >> np.arange(L - 1, -1, -1)) & 1
    return 1 - 2 * bits


def config_index(heights: Sequence[int]) -> int:
    """Basis index of a row of heights."""
    idx = 0
    for h in heights:
        _check_height(h)
        idx = 2 * idx + (1 - h) // 2
    return idx


def row_sweep(v: np.ndarray, kernels: Sequence[np.ndarray],
              first_in: int, first_out: int,
              last_in: int, last_out: int) -> np.ndarray:
    """Contract a vector with one row of faces having fixed boundary heights.

    The row carries heights ``n_1..n_L`` (input, summed) and ``o_1..o_L``
    (output).  Face ``i`` contributes ``K_i[o_i, o_{i+1}, n_{i+1}, n_i]``
    with ``n_{L+1} = last_in`` and ``o_{L+1} = last_out``.  The input is
    restricted to ``n_1 = first_in`` and the output is supported on
    ``o_1 = first_out``.  Boundary heights are given as indices 0/1.

    Parameters
    ----------
    v : ndarray, shape (2**L,) or (2**L, m)
        Input vector(s) indexed by ``n``.
    kernels : sequence of ndarray
        One ``(2, 2, 2, 2)`` tensor per column.

    Returns
    -------
    ndarray
        Output vector(s) indexed by ``o``, same shape as ``v``.
    """
    L = len(kernels)
    extra = v.shape[1:]
    m = int(np.prod(extra)) if extra else 1
    y = v.reshape((2, 2 ** (L - 1), m))[first_in]
    # y axes: (n_2..n_L, m); sweep carries (o_2..o_i, n_i..n_L, m)
    k0 = kernels[0][first_out, :, :, first_in]          # (o_2, n_2)
    y = y.reshape(2, -1)
    y = np.einsum("on,nr->onr", k0, y)                  # (o_2, n_2, rest)
    lead = 1
    for i in range(1, L - 1):
        y = y.reshape(lead, 2, 2, 2, -1)                # (B, o_i, n_i, n_{i+1}, R)
        y = np.einsum("pxyzr,xwzy->pxwzr", y, kernels[i])
        lead *= 2
    # last face: sum over n_L with n_{L+1}, o_{L+1} fixed
    y = y.reshape(lead, 2, 2, m)                        # (B, o_L, n_L, m)
    kl = kernels[-1][:, last_out, last_in, :]           # (o_L, n_L)
    y = np.einsum("pxym,xy->pxm", y, kl)
    out = np.zeros((2, 2 ** (L - 1), m), dtype=complex)
    out[first_out] = y.reshape(2 ** (L - 1), m)
    return out.reshape(v.shape)


def row_kernels(lam: complex, inhomogeneities: Sequence[complex],
                transpose: bool = False) -> list:
    """Per-column face tensors for :func:`row_sweep`.

    With ``transpose=False`` the input is the top row ``a`` and the output the
    bottom row ``b`` (action from the left, ``v -> v T``).  With
    ``transpose=True`` the roles are exchanged (``v -> T v``).
    """
    ks = []
    for u in inhomogeneities:
        w = weight_tensor(lam - u)
        ks.append(w.transpose(3, 2, 1, 0) if transpose else w)
    return ks


def apply_transfer(v: np.ndarray, lam: complex, inhomogeneities: Sequence[complex],
                   left: bool = True) -> np.ndarray:
    """Apply the periodic transfer matrix without forming it.

    ``left=True`` returns ``v @ T`` and ``left=False`` returns ``T @ v``.
    """
    ks = row_kernels(lam, inhomogeneities, transpose=not left)
    out = np.zeros(v.shape, dtype=complex)
    for s in (0, 1):
        for t in (0, 1):
            out += row_sweep(v, ks, s, t, s, t)
    return out


def transfer_matrix(lam: complex, inhomogeneities: Sequence[complex] | None = None,
                    L: int | None = None) -> LatticeOperator:
    """Dense row-to-row transfer matrix.

    Parameters
    ----------
    lam : complex
        Spectral parameter.
    inhomogeneities : sequence of complex, optional
        Column shifts ``u_1..u_L``; zero if omitted (then ``L`` is required).
    L : int, optional
        Lattice size when ``inhomogeneities`` is omitted.

    Returns
    -------
    LatticeOperator
        Entry ``(a, b)`` is the traced row product
        ``prod_i W(b_i, b_{i+1}, a_{i+1}, a_i | lam - u_i)``.
    """
    u = _inhomogeneities(inhomogeneities, L)
    _check_even(len(u), 4)
    dim = 2 ** len(u)
    # column j of the sweep output is e_j @ T, i.e. row j of T
    rows = apply_transfer(np.eye(dim, dtype=complex), lam, u, left=True)
    return LatticeOperator(np.ascontiguousarray(rows.T), HEIGHT_BASIS)


def _inhomogeneities(u, L):
    if u is None:
        if L is None:
            raise ValueError("either inhomogeneities or L must be given")
        return np.zeros(L, dtype=complex)
    return np.asarray(u, dtype=complex)


def pauli_string(L: int, ops: dict) -> sp.csr_matrix:
    """Sparse product of Pauli matrices on selected sites.

    Parameters
    ----------
    L : int
        Number of sites.
    ops : dict
        Map ``site -> 'x' | 'y' | 'z'`` with sites counted from 1; site 1 is
        the most significant tensor factor.
    """
    mats = {"x": np.array([[0, 1], [1, 0]], dtype=complex),
            "y": np.array([[0, -1j], [1j, 0]]),
            "z": np.array([[1, 0], [0, -1]], dtype=complex)}
    out = sp.identity(1, dtype=complex, format="csr")
    for site in range(1, L + 1):
        m = mats[ops[site]] if site in ops else np.eye(2, dtype=complex)
        out = sp.kron(out, sp.csr_matrix(m), format="csr")
    return out


def hamiltonian_irf(L: int) -> LatticeOperator:
    """Three-spin chain Hamiltonian with periodic boundary conditions.

    ``H = 1/2 sum_i (x_i - z_{i-1} x_i z_{i+1} + z_{i-1} z_{i+1} + 1)``,
    returned as a sparse operator.
    """
    _check_even(L, 4)
    dim = 2**L
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(1, L + 1):
        lft = (i - 2) % L + 1
        rgt = i % L + 1
        h = h + pauli_string(L, {i: "x"})
        h = h - pauli_string(L, {lft: "z", i: "x", rgt: "z"})
        h = h + pauli_string(L, {lft: "z", rgt: "z"})
    h = 0.5 * (h + L * sp.identity(dim, dtype=complex, format="csr"))
    return LatticeOperator(h.tocsr(), HEIGHT_BASIS)


def symmetry_operators(L: int) -> tuple[LatticeOperator, LatticeOperator]:
    """The U(1) generator ``sum_j z_j z_{j+1}`` and the flip ``prod_j x_j``."""
    _check_even(L, 2)
    dim = 2**L
    sz = sp.csr_matrix((dim, dim), dtype=complex)
    for j in range(1, L + 1):
        sz = sz + pauli_string(L, {j: "z", j % L + 1: "z"})
    px = pauli_string(L, {j: "x" for j in range(1, L + 1)})
    return LatticeOperator(sz.tocsr(), HEIGHT_BASIS), LatticeOperator(px, HEIGHT_BASIS)


def all_height_patterns():
    """Iterate over the sixteen corner patterns ``(a, b, c, d)``."""
    return product((1, -1), repeat=4)
