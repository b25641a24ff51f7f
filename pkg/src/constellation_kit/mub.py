"""Orthonormal basis sets, known MU constructions, and the defect functional.

A pair of bases is mutually unbiased when every cross overlap has squared
modulus 1/d; the defect sums the squared deviations from that value and is
zero exactly on MU configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConstructionInvalid,
    DegenerateSpectrum,
    DimensionMismatch,
    UnsupportedOrder,
)
from .gf import build_field, factor_prime_power

CONSTRUCTION_TOL = 1e-12


@dataclass(frozen=True)
class Basis:
    """m <= dim orthonormal columns of a dim-dimensional complex space."""

    dim: int
    matrix: np.ndarray  # dim x m, columns are the vectors

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != self.dim or m.shape[1] > self.dim:
            raise DimensionMismatch(
                f"matrix shape {m.shape} does not fit dim {self.dim}"
            )
        m.flags.writeable = False

    @property
    def n_vectors(self) -> int:
        return self.matrix.shape[1]

    def gram_residual(self) -> float:
        g = self.matrix.conj().T @ self.matrix
        return float(np.abs(g - np.eye(self.n_vectors)).max())


def make_basis(matrix, dim: int | None = None, check: bool = True) -> Basis:
    m = np.asarray(matrix, dtype=complex)
    b = Basis(dim if dim is not None else m.shape[0], m.copy())
    if check and b.gram_residual() > CONSTRUCTION_TOL:
        raise ConstructionInvalid(
            f"columns not orthonormal (residual {b.gram_residual():.2e})"
        )
    return b


@dataclass(frozen=True)
class MUConstellation:
    dim: int
    bases: tuple[Basis, ...]

    def __post_init__(self):
        if any(b.dim != self.dim for b in self.bases):
            raise DimensionMismatch("bases have inconsistent dimensions")

    @property
    def signature(self) -> tuple[int, ...]:
        """Set sizes, sorted descending; a full basis of d columns records as
        d-1 (its last vector is implied by the others)."""
        sizes = [
            b.n_vectors - 1 if b.n_vectors == self.dim else b.n_vectors
            for b in self.bases
        ]
        return tuple(sorted(sizes, reverse=True))


@dataclass(frozen=True)
class DefectReport:
    pair_defects: dict[tuple[int, int], float]
    orthonormality_residuals: tuple[float, ...]
    total: float


def mu_defect(B1: Basis, B2: Basis) -> float:
    """Sum over cross column pairs of (|<u|v>|^2 - 1/d)^2."""
    if B1.dim != B2.dim:
        raise DimensionMismatch(f"dims differ: {B1.dim} vs {B2.dim}")
    ov = np.abs(B1.matrix.conj().T @ B2.matrix) ** 2 - 1.0 / B1.dim
    # fsum: exactly rounded, so the value is independent of summation order
    # (defect is then exactly symmetric and permutation-invariant)
    return math.fsum((ov**2).ravel())


def constellation_defect(C: MUConstellation) -> DefectReport:
    pairs: dict[tuple[int, int], float] = {}
    for i in range(len(C.bases)):
        for j in range(i + 1, len(C.bases)):
            pairs[(i, j)] = mu_defect(C.bases[i], C.bases[j])
    residuals = tuple(b.gram_residual() for b in C.bases)
    return DefectReport(pairs, residuals, float(sum(pairs.values())))


def standard_basis(d: int) -> Basis:
    return make_basis(np.eye(d, dtype=complex))


def fourier_basis(d: int) -> Basis:
    j = np.arange(d)
    return make_basis(np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d))


def dephase(m: np.ndarray) -> np.ndarray:
    """Make the first row and column real positive: divide each column by the
    phase of its first entry, then each row by the phase of its first entry."""
    m = np.array(m, dtype=complex)
    col = m[0, :] / np.abs(m[0, :])
    m = m / col[np.newaxis, :]
    row = m[:, 0] / np.abs(m[:, 0])
    m = m / row[:, np.newaxis]
    return m


def fourier_family6(a: float, b: float) -> Basis:
    """The two-parameter affine family through the order-6 Fourier matrix.

    Entry (j,k) is w^(jk) times an extra phase applied on odd rows: 2*pi*a
    for columns k = 1 mod 3 and 2*pi*b for k = 2 mod 3. (a, b) are in units
    of full turns; (0, 0) gives the plain Fourier matrix. Columns stay
    orthogonal because the extra phase only depends on k mod 3 while the
    unbalanced character sums vanish unless the column difference is 0 mod 3,
    in which case the phases cancel.
    """
    d = 6
    j = np.arange(d)
    w = np.exp(2j * np.pi / d)
    m = w ** np.outer(j, j) / np.sqrt(d)
    phase = np.zeros((d, d))
    odd = (j % 2 == 1)[:, None]
    phase += np.where(odd & (j[None, :] % 3 == 1), 2 * np.pi * a, 0.0)
    phase += np.where(odd & (j[None, :] % 3 == 2), 2 * np.pi * b, 0.0)
    m = dephase(m * np.exp(1j * phase))
    out = make_basis(m)
    if np.abs(np.abs(m) - 1 / np.sqrt(d)).max() > CONSTRUCTION_TOL:
        raise ConstructionInvalid("family member is not flat")
    return out


_TAO_EXPONENTS = (
    (0, 0, 0, 0, 0, 0),
    (0, 0, 1, 1, 2, 2),
    (0, 1, 0, 2, 2, 1),
    (0, 1, 2, 0, 1, 2),
    (0, 2, 2, 1, 0, 1),
    (0, 2, 1, 2, 1, 0),
)


def tao_basis() -> Basis:
    """The order-6 spectral matrix with third-root-of-unity entries."""
    w = np.exp(2j * np.pi / 3)
    m = np.power(w, np.array(_TAO_EXPONENTS)) / np.sqrt(6)
    b = Basis(6, m)
    if b.gram_residual() > CONSTRUCTION_TOL:
        raise ConstructionInvalid("embedded matrix is not unitary")
    if np.abs(np.abs(m) - 1 / np.sqrt(6)).max() > CONSTRUCTION_TOL:
        raise ConstructionInvalid("embedded matrix is not flat")
    return b


def hw_triple(d: int) -> MUConstellation:
    """Eigenbases of the clock operator Z, the shift operator X, and their
    product XZ. Z's eigenbasis is the standard basis and X's the Fourier
    basis; XZ is diagonalized numerically with deterministic fixing."""
    if d < 2:
        raise DimensionMismatch(f"need d >= 2, got {d}")
    w = np.exp(2j * np.pi / d)
    Z = np.diag(w ** np.arange(d))
    X = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    t, q = scipy.linalg.schur(X @ Z, output="complex")
    evals = np.diag(t)
    phases = np.mod(np.angle(evals), 2 * np.pi)
    if np.min(np.diff(np.sort(phases))) < 1e-8:
        raise DegenerateSpectrum("XZ eigenvalues closer than 1e-8")
    order = np.argsort(phases)
    q = q[:, order]
    # make the first component of largest modulus real positive, per column
    for k in range(d):
        idx = int(np.argmax(np.abs(q[:, k])))
        q[:, k] *= np.abs(q[idx, k]) / q[idx, k]
    return MUConstellation(
        d, (standard_basis(d), fourier_basis(d), make_basis(q))
    )


def wf_complete_set(q: int) -> MUConstellation:
    """d+1 MU bases for d = q a prime power: the Pauli eigenbases at q = 2,
    and the Galois quadratic-phase construction for odd prime powers.

    Basis a's column b has x-th amplitude exp(2*pi*i*Tr(a*x^2 + b*x)/p)
    over GF(q), with Tr the field trace to Z_p.
    """
    p, k = factor_prime_power(q)
    if q == 2:
        s = standard_basis(2)
        f = fourier_basis(2)
        y = make_basis(np.array([[1, 1], [1j, -1j]]) / np.sqrt(2))
        return MUConstellation(2, (s, f, y))
    if p == 2:
        raise UnsupportedOrder(
            "even prime powers beyond 2 need Galois rings (unsupported)"
        )
    F = build_field(p, k)
    wp = np.exp(2j * np.pi / p)
    bases = [standard_basis(q)]
    for a in F.elements:
        m = np.empty((q, q), dtype=complex)
        for b in F.elements:
            for x in F.elements:
                tr = F.trace(F.add(F.mul(a, F.mul(x, x)), F.mul(b, x)))
                m[x, b] = wp**tr
        bases.append(make_basis(m / np.sqrt(q)))
    return MUConstellation(q, tuple(bases))


# -- JSON mapping (schema fixed by the cli module) --

def bases_to_dict(C: MUConstellation) -> dict:
    return {
        "dim": C.dim,
        "bases": [
            [
                [[float(z.real), float(z.imag)] for z in b.matrix[:, k]]
                for k in range(b.n_vectors)
            ]
            for b in C.bases
        ],
    }


def bases_from_dict(doc: dict) -> MUConstellation:
    d = doc["dim"]
    bases = []
    for cols in doc["bases"]:
        m = np.array(
            [[complex(re, im) for re, im in col] for col in cols], dtype=complex
        ).T
        bases.append(make_basis(m, dim=d, check=False))
    return MUConstellation(d, tuple(bases))
