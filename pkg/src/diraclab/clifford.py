"""Complex Clifford algebra representations on spinor spaces.

Conventions used throughout the package:

* generators anticommute to ``g_i g_j + g_j g_i = -2 delta_ij`` (so each
  generator is a skew-Hermitian unitary),
* for odd ``n`` the representation is normalized so that the complex volume
  element acts as ``+Id`` (the other irreducible choice acts as ``-Id`` and is
  kept only as a negative-control fixture),
* the embedding of the n-dimensional algebra into the even part of the
  (n+1)-dimensional one sends ``e_i`` to ``e_i * nu`` with ``nu`` the last
  generator.

The construction is a deterministic tensor-product recursion built from the
Pauli blocks; no randomness is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

ANTICOMMUTATION_TOL = 1e-12
INTERTWINER_TOL = 1e-10


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True)
class GammaSet:
    """An irreducible representation of the complex Clifford algebra.

    ``generators[i]`` is the matrix of the i-th basis vector acting on the
    spinor space; the last generator plays the role of the unit normal when
    the set is used as an ambient algebra.
    """

    n: int
    dim_spinor: int
    generators: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"need at least one generator, got n={self.n}")
        if len(self.generators) != self.n:
            raise ConfigError("generator count does not match n")
        if self.dim_spinor != 2 ** (self.n // 2):
            raise ConfigError(
                f"dim_spinor must be 2^(n//2) = {2 ** (self.n // 2)}, got {self.dim_spinor}"
            )
        for g in self.generators:
            if g.shape != (self.dim_spinor, self.dim_spinor):
                raise ConfigError("generator has wrong shape")

    def anticommutation_defect(self) -> float:
        """Largest entrywise deviation of g_i g_j + g_j g_i from -2 delta_ij."""
        eye = np.eye(self.dim_spinor)
        worst = 0.0
        for i, gi in enumerate(self.generators):
            for j, gj in enumerate(self.generators):
                target = -2.0 * eye if i == j else 0.0
                worst = max(worst, _max_abs(gi @ gj + gj @ gi - target))
        return worst

    def unitarity_defect(self) -> float:
        eye = np.eye(self.dim_spinor)
        return max(_max_abs(g.conj().T @ g - eye) for g in self.generators)

    def skew_hermitian_defect(self) -> float:
        return max(_max_abs(g.conj().T + g) for g in self.generators)

    def validate(self, tol: float = ANTICOMMUTATION_TOL) -> None:
        defect = max(
            self.anticommutation_defect(),
            self.unitarity_defect(),
            self.skew_hermitian_defect(),
        )
        if defect > tol:
            raise ConfigError(f"Clifford relations violated: defect {defect:.3e} > {tol:.1e}")


@dataclass(frozen=True)
class ChiralitySplit:
    """Projectors onto the two half-spinor subspaces of an ambient algebra."""

    projector_plus: np.ndarray
    projector_minus: np.ndarray
    defining_operator: np.ndarray

    def defect(self) -> float:
        p, m = self.projector_plus, self.projector_minus
        eye = np.eye(p.shape[0])
        return max(
            _max_abs(p + m - eye),
            _max_abs(p @ p - p),
            _max_abs(m @ m - m),
            _max_abs(p @ m),
            _max_abs(p - p.conj().T),
            _max_abs(m - m.conj().T),
        )


def build_gamma(n: int) -> GammaSet:
    """Deterministic generator matrices for the n-dimensional complex algebra.

    Even dimensions are built by the tensor doubling
    ``g_i -> sigma3 (x) g_i`` plus the two fresh Pauli generators; each odd
    dimension appends the unique extra generator proportional to the product
    of the even ones that makes the complex volume element the identity.
    """
    if n < 1:
        raise ConfigError(f"dimension must be >= 1, got {n}")
    if n == 1:
        return GammaSet(n=1, dim_spinor=1, generators=(np.array([[-1j]]),))
    target_even = n if n % 2 == 0 else n - 1
    even: list[np.ndarray] = []
    m = 0
    while 2 * m < target_even:
        if m == 0:
            even = [1j * SIGMA1, 1j * SIGMA2]
        else:
            eye = np.eye(2**m)
            even = [np.kron(SIGMA3, g) for g in even]
            even += [np.kron(1j * SIGMA1, eye), np.kron(1j * SIGMA2, eye)]
        m += 1
    if n % 2 == 0:
        gens = even
    else:
        mm = n // 2
        prod = even[0]
        for g in even[1:]:
            prod = prod @ g
        gens = even + [1j ** (mm - 1) * prod]
    return GammaSet(n=n, dim_spinor=2 ** (n // 2), generators=tuple(np.ascontiguousarray(g) for g in gens))


def volume_element(gamma: GammaSet) -> np.ndarray:
    """Complex volume element: i^m e_1...e_2m (n=2m) or i^(m+1) e_1...e_2m+1."""
    prod = gamma.generators[0]
    for g in gamma.generators[1:]:
        prod = prod @ g
    power = gamma.n // 2 if gamma.n % 2 == 0 else (gamma.n + 1) // 2
    return (1j**power) * prod


def alpha_embed(ambient: GammaSet) -> GammaSet:
    """Restrict an (n+1)-generator set to the n-dimensional sub-algebra.

    The i-th new generator is ``g_i g_nu`` with ``g_nu`` the last ambient
    generator; the result acts on the ambient spinor space (which for odd n is
    reducible, split by :func:`chirality_split`).
    """
    if ambient.n < 2:
        raise ConfigError("ambient set needs at least two generators")
    nu = ambient.generators[-1]
    gens = tuple(g @ nu for g in ambient.generators[:-1])
    return EmbeddedGammaSet(n=ambient.n - 1, dim_spinor=ambient.dim_spinor, generators=gens)


@dataclass(frozen=True)
class EmbeddedGammaSet(GammaSet):
    """Tangent Clifford action realized on an ambient spinor space.

    ``dim_spinor`` is the ambient dimension, which for odd n is twice the
    irreducible one; all other invariants (anticommutation, unitarity,
    skew-hermiticity) hold as for :class:`GammaSet`.
    """

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"need at least one generator, got n={self.n}")
        if len(self.generators) != self.n:
            raise ConfigError("generator count does not match n")


@dataclass(frozen=True)
class IntertwinerResult:
    equivalent: bool
    unitary: np.ndarray | None
    residual: float


def find_intertwiner(a: GammaSet, b: GammaSet, tol: float = INTERTWINER_TOL) -> IntertwinerResult:
    """Search for a unitary U with U a_i = b_i U for all generators.

    The linear system over the matrix entries is solved by SVD; the smallest
    singular vector is polar-corrected to a unitary and accepted only if the
    resulting residual is below ``tol``.  Inequivalent irreducibles (for
    example the two odd-dimensional representations distinguished by the sign
    of the volume element) are reported instead of returning a bad U.
    """
    if a.n != b.n or a.dim_spinor != b.dim_spinor:
        raise ConfigError("intertwiner search needs equal generator counts and dimensions")
    d = a.dim_spinor
    eye = np.eye(d)
    blocks = [np.kron(ga.T, eye) - np.kron(eye, gb) for ga, gb in zip(a.generators, b.generators)]
    system = np.vstack(blocks)
    _, svals, vh = np.linalg.svd(system)
    u0 = vh[-1].conj().reshape(d, d)
    # polar factor: closest unitary to the raw null vector
    w, _, vt = np.linalg.svd(u0)
    u = w @ vt
    residual = max(_max_abs(u @ ga - gb @ u) for ga, gb in zip(a.generators, b.generators))
    if residual > tol:
        return IntertwinerResult(equivalent=False, unitary=None, residual=residual)
    return IntertwinerResult(equivalent=True, unitary=u, residual=residual)


def chirality_split(ambient: GammaSet) -> ChiralitySplit:
    """Half-spinor projectors of an ambient algebra with n+1 generators.

    For odd ambient dimension the split is by ``i * nu`` (intrinsic dimension
    even); for even ambient dimension it is by the ambient volume element
    (intrinsic dimension odd).  The defining operator squares to the identity
    in both cases.
    """
    if ambient.n < 2:
        raise ConfigError("chirality split needs ambient dimension >= 2")
    if ambient.n % 2 == 1:
        op = 1j * ambient.generators[-1]
    else:
        op = volume_element(ambient)
    eye = np.eye(ambient.dim_spinor)
    plus = 0.5 * (eye + op)
    minus = 0.5 * (eye - op)
    return ChiralitySplit(projector_plus=plus, projector_minus=minus, defining_operator=op)


def chirality_block(ambient: GammaSet, sign: int = +1) -> tuple[np.ndarray, EmbeddedGammaSet]:
    """Orthonormal basis V of a half-spinor space and the restricted tangent action.

    Returns ``(V, gamma_restricted)`` where the columns of V span the +/-
    eigenspace of the chirality operator and ``gamma_restricted`` holds the
    matrices ``V^H (g_i g_nu) V``.  Only meaningful for even ambient
    dimension, where the tangent action preserves the split.
    """
    split = chirality_split(ambient)
    proj = split.projector_plus if sign > 0 else split.projector_minus
    evals, evecs = np.linalg.eigh(proj)
    cols = evecs[:, evals > 0.5]
    tangent = alpha_embed(ambient)
    gens = tuple(cols.conj().T @ g @ cols for g in tangent.generators)
    restricted = EmbeddedGammaSet(n=tangent.n, dim_spinor=cols.shape[1], generators=gens)
    return cols, restricted
