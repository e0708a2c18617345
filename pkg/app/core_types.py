"""
Numeric substrate
Scattering samples, Pauli and lexicographic target vectors, 3x3 Hermitian matrices,
coherency rasters and the Jacobi eigendecomposition used by every other module
"""

import cmath
import logging
import math
from dataclasses import astuple, dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from app.errors import DataError, DataIntegrityError, EigFailure, EmptyWindow

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

# Target vector dimension for the mono-static case
Q = 3

# Negative eigenvalues within EIG_TOLERANCE * trace are floating-point drift
EIG_TOLERANCE = 1e-9
JACOBI_TOLERANCE = 1e-13
JACOBI_MAX_SWEEPS = 100

_PAIRS = ((0, 1), (0, 2), (1, 2))

# k_p = PAULI_BASIS @ h
PAULI_BASIS = np.array(
    [[1.0, 0.0, 1.0],
     [1.0, 0.0, -1.0],
     [0.0, SQRT2, 0.0]],
    dtype=np.complex128
) / SQRT2


def _as_finite_complex(name: str, value) -> complex:
    value = complex(value)
    if not cmath.isfinite(value):
        raise DataError(f"{name} must be finite, got {value}")
    return value


class _Triple:
    """Shared behaviour of the three-component complex vectors"""

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.complex128)

    @property
    def power(self) -> float:
        """|v|^2"""
        v = self.as_array()
        return float(np.vdot(v, v).real)


@dataclass(frozen=True)
class ScatteringSample:
    """Single-pixel complex scattering amplitudes"""
    s_hh: complex
    s_hv: complex
    s_vv: complex

    def __post_init__(self):
        for name in ("s_hh", "s_hv", "s_vv"):
            object.__setattr__(self, name, _as_finite_complex(name, getattr(self, name)))


@dataclass(frozen=True)
class PauliVector(_Triple):
    """k_p = (S_HH+S_VV, S_HH-S_VV, 2 S_HV) / sqrt(2)"""
    k1: complex
    k2: complex
    k3: complex

    def __post_init__(self):
        for name in ("k1", "k2", "k3"):
            object.__setattr__(self, name, _as_finite_complex(name, getattr(self, name)))


@dataclass(frozen=True)
class TargetVector(_Triple):
    """h = (S_HH, sqrt(2) S_HV, S_VV)"""
    h1: complex
    h2: complex
    h3: complex

    def __post_init__(self):
        for name in ("h1", "h2", "h3"):
            object.__setattr__(self, name, _as_finite_complex(name, getattr(self, name)))


@dataclass(frozen=True)
class HermitianMatrix3:
    """
    3x3 complex Hermitian matrix stored as its six independent values.

    Houses coherency matrices T, covariance matrices Z and class centers.
    The lower triangle is implied, so the matrix is Hermitian by construction.
    """
    t11: float
    t22: float
    t33: float
    t12: complex = 0j
    t13: complex = 0j
    t23: complex = 0j

    def __post_init__(self):
        for name in ("t11", "t22", "t33"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DataError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        for name in ("t12", "t13", "t23"):
            object.__setattr__(self, name, _as_finite_complex(name, getattr(self, name)))

    @classmethod
    def from_array(cls, m) -> "HermitianMatrix3":
        """Build from a 3x3 array; only the diagonal and upper triangle are read"""
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (3, 3):
            raise DataError(f"expected a 3x3 matrix, got shape {m.shape}")
        return cls(m[0, 0].real, m[1, 1].real, m[2, 2].real, m[0, 1], m[0, 2], m[1, 2])

    @classmethod
    def diag(cls, a: float, b: float, c: float) -> "HermitianMatrix3":
        return cls(a, b, c)

    @classmethod
    def identity(cls) -> "HermitianMatrix3":
        return cls(1.0, 1.0, 1.0)

    @classmethod
    def from_planes(cls, values: Sequence[float]) -> "HermitianMatrix3":
        """Inverse of to_planes"""
        if len(values) != 9:
            raise DataError(f"expected 9 plane values, got {len(values)}")
        v = [float(x) for x in values]
        return cls(v[0], v[1], v[2], complex(v[3], v[4]), complex(v[5], v[6]), complex(v[7], v[8]))

    def to_planes(self) -> Tuple[float, ...]:
        """T11, T22, T33, Re T12, Im T12, Re T13, Im T13, Re T23, Im T23"""
        return (
            self.t11, self.t22, self.t33,
            self.t12.real, self.t12.imag,
            self.t13.real, self.t13.imag,
            self.t23.real, self.t23.imag,
        )

    def full(self) -> np.ndarray:
        """The full 3x3 complex matrix"""
        return np.array(
            [[self.t11, self.t12, self.t13],
             [self.t12.conjugate(), self.t22, self.t23],
             [self.t13.conjugate(), self.t23.conjugate(), self.t33]],
            dtype=np.complex128
        )

    @property
    def trace(self) -> float:
        return self.t11 + self.t22 + self.t33

    def scaled(self, factor: float) -> "HermitianMatrix3":
        return HermitianMatrix3(
            self.t11 * factor, self.t22 * factor, self.t33 * factor,
            self.t12 * factor, self.t13 * factor, self.t23 * factor
        )

    def __add__(self, other: "HermitianMatrix3") -> "HermitianMatrix3":
        return HermitianMatrix3(
            self.t11 + other.t11, self.t22 + other.t22, self.t33 + other.t33,
            self.t12 + other.t12, self.t13 + other.t13, self.t23 + other.t23
        )


@dataclass(frozen=True, eq=False)
class EigenSystem3:
    """Eigenvalues in descending order and the matching unit eigenvectors (columns)"""
    eigenvalues: Tuple[float, float, float]
    eigenvectors: np.ndarray

    def vector(self, index: int) -> np.ndarray:
        return self.eigenvectors[:, index]

    def reconstruct(self) -> np.ndarray:
        e = self.eigenvectors
        return (e * np.asarray(self.eigenvalues)) @ e.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    """(M + M^H) / 2 over the last two axes; exactly Hermitian in floating point"""
    m = np.asarray(m, dtype=np.complex128)
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


@dataclass(frozen=True, eq=False)
class CoherencyRaster:
    """
    Row-major grid of 3x3 Hermitian matrices plus the number of looks.

    data has shape (height, width, 3, 3). The array is hermitized and made
    read-only on construction.
    """
    data: np.ndarray
    looks: int = 1

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 4 or data.shape[-2:] != (3, 3):
            raise DataError(f"coherency raster must have shape (height, width, 3, 3), got {data.shape}")
        if int(self.looks) != self.looks or self.looks < 1:
            raise DataError(f"looks must be a positive integer, got {self.looks}")
        data = hermitize(data)
        if not np.all(np.isfinite(data)):
            raise DataError("coherency raster contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "looks", int(self.looks))

    @classmethod
    def from_matrices(cls, matrices: Sequence[HermitianMatrix3], width: int, height: int,
                      looks: int = 1) -> "CoherencyRaster":
        if len(matrices) != width * height:
            raise DataError(f"expected {width * height} matrices, got {len(matrices)}")
        data = np.array([m.full() for m in matrices], dtype=np.complex128)
        return cls(data.reshape(height, width, 3, 3), looks)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def pixel(self, row: int, col: int) -> HermitianMatrix3:
        return HermitianMatrix3.from_array(self.data[row, col])

    def span(self) -> np.ndarray:
        """Per-pixel total power (trace)"""
        return span(self)


@dataclass(frozen=True, eq=False)
class SlcRaster:
    """Single-look complex scattering data; data has shape (height, width, 3) = (S_HH, S_HV, S_VV)"""
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128)
        if data.ndim != 3 or data.shape[-1] != 3:
            raise DataError(f"SLC raster must have shape (height, width, 3), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DataError("SLC raster contains non-finite samples")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def sample(self, row: int, col: int) -> ScatteringSample:
        return ScatteringSample(*self.data[row, col])


Vector3 = Union[PauliVector, TargetVector]
MatrixLike = Union[HermitianMatrix3, np.ndarray]


def pauli_vector(s: ScatteringSample) -> PauliVector:
    """Scattering vector in the Pauli basis"""
    return PauliVector(
        (s.s_hh + s.s_vv) / SQRT2,
        (s.s_hh - s.s_vv) / SQRT2,
        2.0 * s.s_hv / SQRT2,
    )


def target_vector(s: ScatteringSample) -> TargetVector:
    """Lexicographic target vector"""
    return TargetVector(s.s_hh, SQRT2 * s.s_hv, s.s_vv)


def outer_product(v: Vector3) -> HermitianMatrix3:
    """v v^H, a rank-1 positive semi-definite matrix with trace |v|^2"""
    a = v.as_array()
    return HermitianMatrix3.from_array(np.outer(a, a.conj()))


def multilook(samples: Sequence[Vector3]) -> HermitianMatrix3:
    """Average of the outer products of n samples"""
    if len(samples) == 0:
        raise EmptyWindow("cannot multilook an empty window")
    v = np.array([s.as_array() for s in samples], dtype=np.complex128)
    z = np.einsum("ki,kj->ij", v, v.conj()) / len(samples)
    return HermitianMatrix3.from_array(z)


def pauli_vectors(scattering: np.ndarray) -> np.ndarray:
    """Array form of pauli_vector over (..., 3) = (S_HH, S_HV, S_VV)"""
    s = np.asarray(scattering, dtype=np.complex128)
    hh, hv, vv = s[..., 0], s[..., 1], s[..., 2]
    return np.stack([(hh + vv) / SQRT2, (hh - vv) / SQRT2, 2.0 * hv / SQRT2], axis=-1)


def target_vectors(scattering: np.ndarray) -> np.ndarray:
    """Array form of target_vector over (..., 3)"""
    s = np.asarray(scattering, dtype=np.complex128)
    return np.stack([s[..., 0], SQRT2 * s[..., 1], s[..., 2]], axis=-1)


def outer_products(vectors: np.ndarray) -> np.ndarray:
    """v v^H for every vector in a (..., 3) array"""
    v = np.asarray(vectors, dtype=np.complex128)
    return v[..., :, None] * np.conj(v[..., None, :])


def _similarity(m: MatrixLike, u: np.ndarray):
    if isinstance(m, HermitianMatrix3):
        return HermitianMatrix3.from_array(u @ m.full() @ u.conj().T)
    return hermitize(u @ np.asarray(m, dtype=np.complex128) @ u.conj().T)


def covariance_to_coherency(c: MatrixLike):
    """T = D C D^H"""
    return _similarity(c, PAULI_BASIS)


def coherency_to_covariance(t: MatrixLike):
    """C = D^H T D"""
    return _similarity(t, PAULI_BASIS.conj().T)


def single_look_raster(slc: SlcRaster) -> CoherencyRaster:
    """Per-pixel k_p k_p^H with one look"""
    return CoherencyRaster(outer_products(pauli_vectors(slc.data)), looks=1)


def span(raster: CoherencyRaster) -> np.ndarray:
    return np.real(np.trace(raster.data, axis1=-2, axis2=-1))


def _off_diagonal_norm(a: np.ndarray) -> np.ndarray:
    total = np.sum(np.abs(a) ** 2, axis=(1, 2))
    diagonal = np.sum(np.abs(np.diagonal(a, axis1=1, axis2=2)) ** 2, axis=1)
    return np.sqrt(np.maximum(total - diagonal, 0.0))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One complex Jacobi rotation zeroing a[:, p, q] for every matrix in the batch"""
    apq = a[:, p, q]
    r = np.abs(apq)
    active = r > 0.0
    safe_r = np.where(active, r, 1.0)
    phase = np.where(active, apq / safe_r, 1.0)

    tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe_r)
    sign = np.where(tau >= 0.0, 1.0, -1.0)
    t = np.where(active, sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    u = np.zeros_like(a)
    u[:, 0, 0] = u[:, 1, 1] = u[:, 2, 2] = 1.0
    u[:, p, p] = c
    u[:, p, q] = s
    u[:, q, p] = -s * np.conj(phase)
    u[:, q, q] = c * np.conj(phase)

    a[:] = hermitize(np.conj(np.swapaxes(u, 1, 2)) @ a @ u)
    v[:] = v @ u


def hermitian_eig_batch(matrices, psd: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigendecomposition of a stack of 3x3 Hermitian matrices.

    Args:
        matrices: array of shape (..., 3, 3)
        psd: enforce the positive semi-definite rule (clamp drift, reject violations)

    Returns:
        (eigenvalues of shape (..., 3) in descending order,
         eigenvectors of shape (..., 3, 3) with eigenvector i in column i)

    Raises:
        DataIntegrityError: psd is set and an eigenvalue is below -1e-9 * trace
        EigFailure: the off-diagonal norm did not vanish within the sweep budget
    """
    a = hermitize(np.array(matrices, dtype=np.complex128))
    if a.ndim < 2 or a.shape[-2:] != (3, 3):
        raise DataError(f"expected (..., 3, 3) matrices, got shape {a.shape}")
    batch_shape = a.shape[:-2]
    a = a.reshape(-1, 3, 3).copy()
    v = np.broadcast_to(np.eye(3, dtype=np.complex128), a.shape).copy()

    trace = np.real(np.trace(a, axis1=1, axis2=2))
    threshold = JACOBI_TOLERANCE * np.maximum(np.abs(trace), np.linalg.norm(a, axis=(1, 2)))

    for sweep in range(JACOBI_MAX_SWEEPS + 1):
        if np.all(_off_diagonal_norm(a) <= threshold):
            logger.debug(f"Jacobi converged after {sweep} sweep(s) for {a.shape[0]} matrices")
            break
        if sweep == JACOBI_MAX_SWEEPS:
            raise EigFailure(f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")
        for p, q in _PAIRS:
            _rotate(a, v, p, q)

    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)

    if psd:
        band = EIG_TOLERANCE * np.maximum(trace, 0.0)
        violations = w[:, -1] < -band
        if np.any(violations):
            worst = int(np.argmin(w[:, -1] + band))
            raise DataIntegrityError(
                f"{int(violations.sum())} matrix(es) not positive semi-definite "
                f"(eigenvalue {w[worst, -1]:.3e} with trace {trace[worst]:.3e})"
            )
        w = np.maximum(w, 0.0)

    return w.reshape(batch_shape + (3,)), v.reshape(batch_shape + (3, 3))


def hermitian_eig(m: HermitianMatrix3, psd: bool = True) -> EigenSystem3:
    """Eigendecomposition of a single Hermitian matrix"""
    w, v = hermitian_eig_batch(m.full()[None], psd=psd)
    return EigenSystem3(tuple(float(x) for x in w[0]), v[0])
