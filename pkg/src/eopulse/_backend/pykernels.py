"""Pure-numpy implementations of the sequential evolution kernels.

These are the hot loops of the optimizer: cumulative propagator products and
per-slice Kraus-channel density evolution. A compiled twin lives in
``_fastkernels.pyx`` with identical semantics; the equivalence tests assert
elementwise agreement between the two.
"""

import numpy as np


def chain_forward(props):
    """Cumulative left products X_n = U_n ... U_1 of a propagator stack.

    Parameters
    ----------
    props : ndarray, shape (N, d, d)
        Slice propagators U_1 .. U_N.

    Returns
    -------
    ndarray, shape (N, d, d)
        X_n for n = 1 .. N; X_N is the total evolution operator.
    """
    n, d, _ = props.shape
    out = np.empty((n, d, d), dtype=np.complex128)
    acc = np.eye(d, dtype=np.complex128)
    for i in range(n):
        acc = props[i] @ acc
        out[i] = acc
    return out


def chain_backward(props, tail):
    """Suffix products back_n = U_{n+1}^† ... U_N^† @ tail, with back_N = tail.

    With ``tail`` the identity these are the backward propagators P_n; with
    ``tail`` a target unitary they are the overlap operators used by the
    fidelity gradient.
    """
    n, d, _ = props.shape
    out = np.empty((n, d, d), dtype=np.complex128)
    acc = np.array(tail, dtype=np.complex128, copy=True)
    out[n - 1] = acc
    for i in range(n - 2, -1, -1):
        acc = props[i + 1].conj().T @ acc
        out[i] = acc
    return out


def evolve_density(props, kraus, rho0):
    """Evolve a density matrix: per slice, conjugate by U_n then apply a channel.

    Parameters
    ----------
    props : ndarray, shape (N, d, d)
    kraus : ndarray, shape (M, d, d)
        Kraus operators of the per-slice noise channel (M = 0 for none).
    rho0 : ndarray, shape (d, d)

    Returns
    -------
    ndarray, shape (d, d)
        Final density matrix.
    """
    rho = np.array(rho0, dtype=np.complex128, copy=True)
    noisy = kraus.shape[0] > 0
    for u in props:
        rho = u @ rho @ u.conj().T
        if noisy:
            rho = np.einsum("mij,jk,mlk->il", kraus, rho, kraus.conj())
    return rho
