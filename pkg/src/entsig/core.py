"""Dense linear algebra for few-qubit states and observables.

Everything lives in the full 2**n dimensional Hilbert space (n <= 6) as
complex numpy arrays.  Qubit 0 is the most significant bit of a
computational-basis index, i.e. |q0 q1 ... q_{n-1}> sits at index
q0*2**(n-1) + q1*2**(n-2) + ... + q_{n-1}.  This matches the left-to-right
ordering of operator strings such as "XXYY".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tolerances import DEFAULT, Tolerances

MAX_QUBITS = 6

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _require_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):  # complex: checks real and imaginary parts
        raise ValueError(f"{what} contains NaN or Inf entries")


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation of ``m`` from its conjugate transpose."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def require_hermitian(m: np.ndarray, tol: float, what: str = "matrix") -> None:
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"{what} is not Hermitian (defect {defect:.3e} > {tol:.1e})")


def _as_matrix(obs) -> np.ndarray:
    """Accept a raw matrix or anything carrying one in a ``matrix`` attribute."""
    m = getattr(obs, "matrix", obs)
    return np.asarray(m, dtype=complex)


@dataclass(eq=False)
class SingleQubitObservable:
    """A dichotomic single-qubit observable (O Hermitian, O^2 = 1)."""

    matrix: np.ndarray
    label: str

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("single-qubit observable must be 2x2")
        _require_finite(m, f"observable {self.label!r}")
        require_hermitian(m, DEFAULT.hermitian, f"observable {self.label!r}")
        if np.max(np.abs(m @ m - np.eye(2))) > DEFAULT.dichotomic:
            raise ValueError(f"observable {self.label!r} does not square to identity")
        self.matrix = _freeze(m)

    def eigenbasis(self) -> np.ndarray:
        """Columns [v_plus, v_minus]: the +1 then -1 eigenvectors."""
        vals, vecs = hermitian_eig(self.matrix)
        if vals[1] - vals[0] > 1.0:  # genuinely dichotomic: (-1, +1)
            return np.ascontiguousarray(vecs[:, ::-1])
        return vecs  # identity-like: both eigenvalues +1, any basis works


def pauli(label: str) -> SingleQubitObservable:
    """The standard Pauli matrix (or identity) named by ``label``."""
    if label not in _PAULI:
        raise ValueError(f"unknown Pauli label {label!r}; expected one of I, X, Y, Z")
    return SingleQubitObservable(_PAULI[label].copy(), label)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("tensor expects square matrices")
    return np.kron(a, b)


def kron_all(factors) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left factor most significant."""
    out = np.array([[1.0 + 0j]])
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


@dataclass(eq=False)
class PureState:
    """State vector on ``n_qubits`` qubits, normalized to 1."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != 2**self.n_qubits:
            raise ValueError("amplitude vector length must be 2**n_qubits")
        _require_finite(amp, "state vector")
        norm2 = float(np.sum(np.abs(amp) ** 2))
        if abs(norm2 - 1.0) > DEFAULT.unit_norm:
            raise ValueError(f"state not normalized: <psi|psi> = {norm2!r}")
        self.amplitudes = _freeze(amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, self.projector())

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on n qubits.

    Eigenvalues in [-psd, -psd_clamp) are accepted as round-off; anything in
    [-psd_clamp, 0) after repeated channel application gets clamped to zero
    (with trace renormalization) so that noise pipelines cannot accumulate
    unphysical negativity.
    """

    n_qubits: int
    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT, repr=False)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        m = np.array(self.matrix, dtype=complex)
        d = 2**self.n_qubits
        if m.shape != (d, d):
            raise ValueError(f"density matrix must be {d}x{d} for {self.n_qubits} qubits")
        _require_finite(m, "density matrix")
        require_hermitian(m, self.tol.hermitian, "density matrix")
        tr = float(m.trace().real)
        if abs(tr - 1.0) > self.tol.trace_one:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        evals = np.linalg.eigvalsh(m)
        lo = float(evals[0])
        if lo < -self.tol.psd:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
        if lo < -self.tol.psd_clamp:
            # meaningful round-off negativity: project back onto PSD cone
            vals, vecs = np.linalg.eigh(m)
            vals = np.clip(vals, 0.0, None)
            vals /= vals.sum()
            m = (vecs * vals) @ vecs.conj().T
        self.matrix = _freeze(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        return cls(psi.n_qubits, psi.projector())

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        d = 2**n_qubits
        return cls(n_qubits, np.eye(d, dtype=complex) / d)


def ghz_state(n: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits, 2 <= n <= 6."""
    if not 2 <= n <= MAX_QUBITS:
        raise ValueError(f"GHZ state needs 2 <= n <= {MAX_QUBITS}, got {n}")
    amp = np.zeros(2**n, dtype=complex)
    amp[0] = amp[-1] = 1.0 / math.sqrt(2.0)
    return PureState(n, amp)


def _state_matrix(state) -> np.ndarray:
    if isinstance(state, DensityMatrix):
        return state.matrix
    if isinstance(state, PureState):
        return state.projector()
    return np.asarray(state, dtype=complex)


def expectation(state, obs, tol: Tolerances = DEFAULT) -> float:
    """tr(rho O) for a Hermitian observable; tiny imaginary residue is dropped."""
    m = _as_matrix(obs)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    require_hermitian(m, tol.op_hermitian * scale, "observable")
    if isinstance(state, PureState):
        if m.shape[0] != state.dim:
            raise ValueError("state and observable dimensions differ")
        val = complex(np.vdot(state.amplitudes, m @ state.amplitudes))
    else:
        rho = _state_matrix(state)
        if m.shape != rho.shape:
            raise ValueError("state and observable dimensions differ")
        val = complex(np.trace(rho @ m))
    if abs(val.imag) > tol.imag_discard:
        raise ValueError(f"expectation has imaginary residue {val.imag:.3e}")
    return val.real


def variance(state, obs, tol: Tolerances = DEFAULT) -> float:
    """<O^2> - <O>^2, clamped to zero at -variance_floor.

    Evaluated in centered form -- ||(O - <O>) psi||^2 for pure states,
    tr(rho (O - <O>)^2) for density matrices -- which stays accurate all the
    way down to exact eigenstates where the textbook difference of two large
    moments would cancel catastrophically.
    """
    m = _as_matrix(obs)
    if isinstance(state, PureState):
        mean = expectation(state, m, tol)
        resid = m @ state.amplitudes - mean * state.amplitudes
        return float(np.sum(np.abs(resid) ** 2))
    mean = expectation(state, m, tol)
    centered = m - mean * np.eye(m.shape[0])
    var = expectation(state, centered @ centered, tol)
    if var < -tol.variance_floor:
        raise ValueError(f"variance came out negative: {var:.3e}")
    return max(var, 0.0)


def fidelity_with_pure(rho, psi: PureState, tol: Tolerances = DEFAULT) -> float:
    """<psi| rho |psi>, clamped into [0, 1] at the configured tolerance."""
    m = _state_matrix(rho)
    if m.shape[0] != psi.dim:
        raise ValueError("state and reference dimensions differ")
    val = complex(np.vdot(psi.amplitudes, m @ psi.amplitudes))
    f = val.real
    if f < -tol.imag_discard or f > 1.0 + tol.imag_discard:
        raise ValueError(f"fidelity {f!r} outside [0, 1]")
    return min(max(f, 0.0), 1.0)


def hermitian_eig(m: np.ndarray, tol: Tolerances = DEFAULT, max_sweeps: int = 100):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as orthonormal columns.  Sweeps stop once the off-diagonal
    Frobenius norm drops below ``eig_offdiag`` times the matrix norm.  Fine for
    the dimensions used here (<= 64); not meant for large matrices.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("hermitian_eig expects a square matrix")
    mag = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    require_hermitian(a, tol.op_hermitian * mag)
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    a = (a + a.conj().T) / 2.0
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(d), v
    stop = tol.eig_offdiag * scale
    elem_stop = stop / d

    diag_mask = ~np.eye(d, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a[diag_mask]))
        if off < stop:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                beta = abs(apq)
                if beta <= elem_stop:
                    continue
                phase = apq / beta
                tau = (a[q, q].real - a[p, p].real) / (2.0 * beta)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # unitary U = diag(phase, 1) . [[c, s], [-s, c]] on the (p, q) plane
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = ap * (c * phase) - aq * s
                a[:, q] = ap * (s * phase) + aq * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = rp * (c * np.conj(phase)) - rq * s
                a[q, :] = rp * (s * np.conj(phase)) + rq * c
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * (c * phase) - vq * s
                v[:, q] = vp * (s * phase) + vq * c
    else:
        raise RuntimeError("Jacobi eigensolver failed to converge")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order])
