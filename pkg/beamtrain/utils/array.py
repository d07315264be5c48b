import math
from typing import Union

import numpy as np

# Spatial directions are plain floats in [-1, 1); raw (unwrapped) directions are any finite real.
SpatialDirection = float
ComplexVector = np.ndarray
Codeword = np.ndarray

UNIT_MODULUS_TOL = 1e-12


class InvalidSizeError(ValueError):
    """
    Raised when a vector or array size is not a positive integer.
    """
    def __init__(self, name, size):
        self.name = name
        self.size = size
        super().__init__(f"'{name}' must be a positive integer. Got {size!r}.")


class InvalidArgumentError(ValueError):
    """
    Raised when an argument is outside the domain of an array-math primitive
    (non-finite direction, mismatched lengths, non unit-modulus codeword, ...).
    """
    pass


def wrap_direction(raw: float) -> SpatialDirection:
    """
    Reduce a raw spatial direction modulo 2 into [-1, 1).

    The steering vector is periodic in its direction with period 2, so the wrapped value
    addresses the same array response as the raw one.
    """
    raw = float(raw)
    if not math.isfinite(raw):
        raise InvalidArgumentError(f"Spatial direction must be finite. Got {raw}.")
    wrapped = (raw + 1.0) % 2.0 - 1.0
    # float modulo can round a tiny negative remainder up to exactly 2
    if wrapped >= 1.0:
        wrapped -= 2.0
    return wrapped


def steering_vector(phi: Union[float, SpatialDirection], n: int) -> ComplexVector:
    """
    u(phi, n) = [1, e^{-j pi phi}, ..., e^{-j pi (n-1) phi}]^T

    The per-element phase is reduced modulo 2 before exponentiation, which keeps large
    arrays accurate and makes u(phi, n) == u(phi + 2, n) hold elementwise.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidSizeError('n', n)
    phi = float(phi)
    if not math.isfinite(phi):
        raise InvalidArgumentError(f"Spatial direction must be finite. Got {phi}.")
    turns = np.mod(np.arange(n) * phi, 2.0)
    return np.exp(-1j * np.pi * turns)


def beam_gain(w: Codeword, phi: SpatialDirection) -> float:
    """
    A(w, phi) = |u^H(phi, N) w| with N = len(w).
    """
    w = np.asarray(w, dtype=complex)
    return float(abs(np.vdot(steering_vector(phi, w.size), w)))


def kron(a: ComplexVector, b: ComplexVector) -> ComplexVector:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def hadamard(a: ComplexVector, b: ComplexVector) -> ComplexVector:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"Hadamard product needs equal lengths. Got {a.size} and {b.size}.")
    return a * b


def planar_response(phi: float, chi: float, n_x: int, n_z: int) -> ComplexVector:
    """
    Response of an n_x-by-n_z planar array, enumerated row-major: u(phi, n_x) ⊗ u(chi, n_z).
    """
    return kron(steering_vector(phi, n_x), steering_vector(chi, n_z))


def as_codeword(coefficients) -> Codeword:
    """
    Validate a vector of reflection coefficients. Every entry must have unit modulus.
    """
    w = np.asarray(coefficients, dtype=complex)
    if w.ndim != 1 or w.size < 1:
        raise InvalidSizeError('codeword', w.shape)
    if not np.all(np.isfinite(w)):
        raise InvalidArgumentError("Codeword entries must be finite.")
    if np.max(np.abs(np.abs(w) - 1.0)) > UNIT_MODULUS_TOL:
        raise InvalidArgumentError("Codeword entries must have unit modulus.")
    return w
