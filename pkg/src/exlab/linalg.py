"""
Small dense complex linear algebra for state vectors and density matrices.

States are plain 1-D ``complex128`` arrays of length ``2**t``; density
matrices are 2-D ``(2**t, 2**t)`` arrays. Qubit 1 is the most significant
bit of the basis index.
"""

import numpy as np

ATOL = 1e-10
ENTROPY_CUTOFF = 1e-12

__all__ = [
    "ATOL",
    "as_state",
    "num_qubits",
    "basis_state",
    "is_normalized",
    "tensor_product",
    "inner_product",
    "trace_distance_pure",
    "density_matrix",
    "partial_trace",
    "check_density_matrix",
    "von_neumann_entropy",
    "born_probability",
]


def num_qubits(dim: int) -> int:
    t = int(dim).bit_length() - 1
    if dim < 1 or (1 << t) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return t


def as_state(vec) -> np.ndarray:
    """Coerce to a complex state vector, checking the length is ``2**t``."""
    arr = np.asarray(vec, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"state must be 1-D, got shape {arr.shape}")
    num_qubits(arr.size)
    return arr


def basis_state(index: int, t: int) -> np.ndarray:
    vec = np.zeros(1 << t, dtype=np.complex128)
    vec[index] = 1.0
    return vec


def is_normalized(vec, atol: float = ATOL) -> bool:
    v = np.asarray(vec)
    return abs(float(np.vdot(v, v).real) - 1.0) <= atol


def tensor_product(a, b) -> np.ndarray:
    """``a (x) b``; entry ``j * len(b) + k`` is ``a[j] * b[k]``."""
    return np.kron(as_state(a), as_state(b))


def inner_product(a, b) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    a = as_state(a)
    b = as_state(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def trace_distance_pure(a, b) -> float:
    """Trace distance between two normalized pure states, ``sqrt(1 - |<a|b>|^2)``."""
    a = as_state(a)
    b = as_state(b)
    if not (is_normalized(a) and is_normalized(b)):
        raise ValueError("trace_distance_pure expects normalized states")
    ov = inner_product(a, b)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    # ||b - e^{i phi} a||^2 = 2 - 2|<a|b>|, which avoids cancellation in 1 - |<a|b>|^2
    d2 = float(np.linalg.norm(b - phase * a) ** 2)
    return float(np.sqrt(min(1.0, max(0.0, d2 / 2 * (2 - d2 / 2)))))


def density_matrix(state) -> np.ndarray:
    s = as_state(state)
    return np.outer(s, s.conj())


def partial_trace(state, keep) -> np.ndarray:
    """Reduced density matrix of a pure state on the qubits in ``keep``.

    ``keep`` holds 1-based qubit indices; the result orders them ascending.
    """
    s = as_state(state)
    t = num_qubits(s.size)
    keep = sorted(int(q) for q in keep)
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubit in {keep}")
    if keep and (keep[0] < 1 or keep[-1] > t):
        raise ValueError(f"qubit index out of range 1..{t}: {keep}")
    rest = [q for q in range(1, t + 1) if q not in keep]
    tensor = s.reshape((2,) * t) if t else s.reshape(())
    axes = [q - 1 for q in keep] + [q - 1 for q in rest]
    block = np.transpose(tensor, axes).reshape(1 << len(keep), 1 << len(rest))
    return block @ block.conj().T


def check_density_matrix(rho, atol: float = ATOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    num_qubits(rho.shape[0])
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise ValueError(f"density matrix trace {np.trace(rho).real!r} != 1")
    return rho


def von_neumann_entropy(rho) -> float:
    """Entropy in bits. Eigenvalues below 1e-12 count as exactly zero."""
    rho = check_density_matrix(rho)
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -ATOL:
        raise ValueError(f"negative eigenvalue {evals.min():.3e}")
    evals = evals[evals > ENTROPY_CUTOFF]
    return float(max(0.0, -np.sum(evals * np.log2(evals))))


def born_probability(rho, effect) -> float:
    """``<effect| rho |effect>`` clipped to ``[0, 1]``."""
    rho = np.asarray(rho, dtype=np.complex128)
    e = as_state(effect)
    if rho.shape != (e.size, e.size):
        raise ValueError(f"dimension mismatch: rho {rho.shape}, effect {e.size}")
    p = np.vdot(e, rho @ e).real
    return float(min(1.0, max(0.0, p)))
