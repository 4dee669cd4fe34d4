"""Single-qubit noise channels, global white noise, and the experimental
initial-state model used for the noisy-source predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, _PAULI, _freeze, kron_all, require_hermitian
from .tolerances import DEFAULT, Tolerances


@dataclass(eq=False)
class SingleQubitChannel:
    """A trace-preserving single-qubit map given by its Kraus operators."""

    kraus_ops: tuple
    name: str = "channel"

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        if any(k.shape != (2, 2) for k in ops):
            raise ValueError("Kraus operators must be 2x2")
        closure = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(closure - np.eye(2))) > DEFAULT.kraus_sum:
            raise ValueError(f"channel {self.name!r} is not trace preserving")
        self.kraus_ops = tuple(_freeze(k) for k in ops)


def bit_flip_channel(p: float) -> SingleQubitChannel:
    """Flip the qubit with probability p: rho -> (1-p) rho + p X rho X."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must be in [0, 1], got {p!r}")
    k0 = math.sqrt(1.0 - p) * np.eye(2, dtype=complex)
    k1 = math.sqrt(p) * _PAULI["X"]
    return SingleQubitChannel((k0, k1), name=f"bitflip({p:g})")


def apply_local(rho: DensityMatrix, channel: SingleQubitChannel, qubit: int) -> DensityMatrix:
    """Apply a single-qubit channel to one qubit (0-based, qubit 0 = leftmost)."""
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit index {qubit} out of range for {n} qubits")
    left = np.eye(2**qubit, dtype=complex)
    right = np.eye(2 ** (n - qubit - 1), dtype=complex)
    out = np.zeros_like(rho.matrix)
    for k in channel.kraus_ops:
        op = kron_all([left, k, right])
        out += op @ rho.matrix @ op.conj().T
    return DensityMatrix(n, out, tol=rho.tol)


def apply_to_all(rho: DensityMatrix, channel: SingleQubitChannel) -> DensityMatrix:
    """Apply the same single-qubit channel independently to every qubit."""
    out = rho
    for q in range(rho.n_qubits):
        out = apply_local(out, channel, q)
    return out


def white_noise(rho: DensityMatrix, q: float) -> DensityMatrix:
    """Admix the maximally mixed state: rho -> (1-q) rho + q 1/2**n."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"white-noise weight must be in [0, 1], got {q!r}")
    d = rho.dim
    mixed = np.eye(d, dtype=complex) / d
    return DensityMatrix(rho.n_qubits, (1.0 - q) * rho.matrix + q * mixed, tol=rho.tol)


@dataclass(frozen=True)
class AnsatzParams:
    """Parameters of the noisy-source model state on 4 qubits.

    The raw matrix is
        alpha |0000><0000| + beta |1111><1111|
        + gamma (|0000><1111| + |1111><0000|) + (lam/16) * identity,
    which has trace alpha + beta + lam.  ``experimental_ansatz`` divides by
    that trace, so slightly over-complete parameter sets (the reference values
    sum to 1.004) stay physical.
    """

    alpha: float = 0.362
    beta: float = 0.522
    gamma: float = 0.398
    lam: float = 0.12

    @property
    def trace_renormalization(self) -> float:
        return self.alpha + self.beta + self.lam


def experimental_ansatz(params: AnsatzParams, tol: Tolerances = DEFAULT) -> DensityMatrix:
    """Build the 4-qubit noisy-source model state, renormalized to unit trace."""
    a, b, g, lam = params.alpha, params.beta, params.gamma, params.lam
    m = (lam / 16.0) * np.eye(16, dtype=complex)
    m[0, 0] += a
    m[15, 15] += b
    m[0, 15] += g
    m[15, 0] += g
    tr = params.trace_renormalization
    if tr <= 0:
        raise ValueError("ansatz parameters give non-positive trace")
    m /= tr
    require_hermitian(m, tol.hermitian, "ansatz state")
    min_eig = float(np.linalg.eigvalsh(m)[0])
    if min_eig < -tol.psd:
        raise ValueError(
            f"ansatz parameters give a non-positive state (minimal eigenvalue {min_eig:.6e})"
        )
    return DensityMatrix(4, m, tol=tol)
