"""
dS QFT Lab - Fock Module

Truncated bosonic Fock space over the modes |k| <= M of the one-particle space, in the
occupation-number basis with total occupation <= N_max.

One-particle vectors enter through their H coordinates x_k (components in the H-orthonormal
basis f_k), so a(h) = sum conj(x_k) a_k and a*(h) = sum x_k a*_k give [a(h), a*(g)] = <h, g>_H.
Ladder operators are scipy.sparse CSR matrices; a*_k is the exact adjoint of a_k, so identities
that need one more quantum than the cutoff allows only hold on the low-occupation block.
Basis states are ordered by total occupation, which makes every such block a leading slice.
"""

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.special import gammaln

from app.config import settings
from app.errors import CutoffError, DegreeCapError, DomainError, FockDimensionError
from app.errors import NotBoundedBelowError
from app.oneparticle import FourierVector, SpectralWeights, h_norm, inner_product
from app.oneparticle import to_h_coordinates
from app.representation import OperatorH, boost_generator, rotation_operator
from app.utils import max_abs

logger = logging.getLogger(__name__)

MAX_NORMAL_ORDER_DEGREE = 8
CUTOFF_TOLERANCE = 1e-14


# ============================================================================
# Configuration and basis
# ============================================================================

@dataclass(frozen=True)
class FockConfig:
    """Mode cutoff M (modes |k| <= M) and total occupation cutoff N_max."""

    M: int
    N_max: int
    dim: int = field(init=False)

    def __post_init__(self):
        if self.M < 0:
            raise DomainError(f"mode cutoff M must be >= 0, got {self.M}")
        if self.N_max < 1:
            raise DomainError(f"occupation cutoff N_max must be >= 1, got {self.N_max}")
        dim = math.comb(self.N_max + self.n_modes, self.n_modes)
        if dim > settings.fock_dim_limit:
            raise FockDimensionError(
                f"Fock dimension {dim} for M={self.M}, N_max={self.N_max} exceeds "
                f"the limit {settings.fock_dim_limit}"
            )
        object.__setattr__(self, "dim", dim)

    @property
    def n_modes(self) -> int:
        return 2 * self.M + 1

    def block_size(self, max_total: int) -> int:
        """Number of basis states with total occupation <= max_total."""
        if max_total < 0:
            return 0
        return math.comb(min(max_total, self.N_max) + self.n_modes, self.n_modes)


def _compositions(total: int, parts: int):
    """Occupation tuples of the given length summing to total."""
    for bars in combinations(range(total + parts - 1), parts - 1):
        previous = -1
        occupation = []
        for b in bars:
            occupation.append(b - previous - 1)
            previous = b
        occupation.append(total + parts - 1 - previous - 1)
        yield tuple(occupation)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Occupation tuples (n_{-M}, ..., n_M) ordered by total, with their index map."""

    config: FockConfig
    occupations: np.ndarray
    index: Dict[Tuple[int, ...], int]

    @property
    def totals(self) -> np.ndarray:
        return self.occupations.sum(axis=1)

    def state(self, occupation: Sequence[int]) -> int:
        return self.index[tuple(occupation)]


@lru_cache(maxsize=16)
def fock_basis(config: FockConfig) -> FockBasis:
    states: List[Tuple[int, ...]] = []
    for total in range(config.N_max + 1):
        states.extend(_compositions(total, config.n_modes))
    occupations = np.array(states, dtype=np.int64).reshape(len(states), config.n_modes)
    index = {s: i for i, s in enumerate(states)}
    logger.debug(f"Fock basis built: dim {len(states)}", extra={"M": config.M, "N_max": config.N_max})
    return FockBasis(config, occupations, index)


@lru_cache(maxsize=16)
def _annihilators(config: FockConfig) -> Tuple[scipy.sparse.csr_matrix, ...]:
    basis = fock_basis(config)
    ops = []
    for mode in range(config.n_modes):
        rows, cols, vals = [], [], []
        for col, occupation in enumerate(basis.occupations):
            n = int(occupation[mode])
            if n == 0:
                continue
            lowered = list(occupation)
            lowered[mode] -= 1
            rows.append(basis.index[tuple(lowered)])
            cols.append(col)
            vals.append(math.sqrt(n))
        ops.append(scipy.sparse.csr_matrix(
            (np.array(vals, dtype=complex), (rows, cols)), shape=(config.dim, config.dim)
        ))
    return tuple(ops)


def annihilation(config: FockConfig, k: int) -> scipy.sparse.csr_matrix:
    """a_k for |k| <= M."""
    if abs(k) > config.M:
        raise CutoffError(f"mode {k} above the Fock cutoff M={config.M}")
    return _annihilators(config)[k + config.M]


def creation(config: FockConfig, k: int) -> scipy.sparse.csr_matrix:
    """a*_k, the exact adjoint of a_k on the truncated space."""
    return annihilation(config, k).conj().T.tocsr()


def number_operator(config: FockConfig) -> scipy.sparse.csr_matrix:
    totals = fock_basis(config).totals.astype(complex)
    return scipy.sparse.diags(totals, format="csr")


def vacuum(config: FockConfig) -> np.ndarray:
    v = np.zeros(config.dim, dtype=complex)
    v[0] = 1.0
    return v


# ============================================================================
# Operators
# ============================================================================

@dataclass(frozen=True, eq=False)
class FockOperator:
    """Operator on the truncated Fock space, stored sparse."""

    config: FockConfig
    matrix: scipy.sparse.csr_matrix
    label: str = ""

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.config, self.matrix.conj().T.tocsr(), f"{self.label}*")

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.config, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.config, (self.matrix - other.matrix).tocsr())

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.config, (self.matrix @ other.matrix).tocsr())

    def scaled(self, factor: complex) -> "FockOperator":
        return FockOperator(self.config, (complex(factor) * self.matrix).tocsr(), self.label)

    def block(self, max_total: int) -> np.ndarray:
        """Dense sub-block on the states with total occupation <= max_total."""
        n = self.config.block_size(max_total)
        return self.matrix[:n, :n].toarray()

    def columns(self, max_total: int) -> np.ndarray:
        """All rows of the columns with total occupation <= max_total."""
        n = self.config.block_size(max_total)
        return self.matrix[:, :n].toarray()

    def hermiticity_defect(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0


def _mode_coordinates(config: FockConfig, w: SpectralWeights, h: FourierVector) -> np.ndarray:
    """H coordinates of h on |k| <= M; modes above M must vanish."""
    if config.M > w.K:
        raise DomainError(f"Fock cutoff M={config.M} exceeds the one-particle cutoff K={w.K}")
    x = to_h_coordinates(w, h)
    keep = np.abs(w.modes) <= config.M
    dropped = x[~keep]
    if dropped.size and np.max(np.abs(dropped)) > CUTOFF_TOLERANCE * max(1.0, np.max(np.abs(x))):
        raise CutoffError(f"vector has components above the Fock cutoff M={config.M}")
    return x[keep]


def annihilation_field(config: FockConfig, w: SpectralWeights, h: FourierVector) -> FockOperator:
    """a(h), anti-linear in h."""
    x = _mode_coordinates(config, w, h)
    ops = _annihilators(config)
    matrix = sum(complex(np.conj(x[i])) * ops[i] for i in range(config.n_modes))
    return FockOperator(config, scipy.sparse.csr_matrix(matrix), "a(h)")


def creation_field(config: FockConfig, w: SpectralWeights, h: FourierVector) -> FockOperator:
    """a*(h), linear in h."""
    return annihilation_field(config, w, h).adjoint()


def field_operator(config: FockConfig, w: SpectralWeights, h: FourierVector) -> FockOperator:
    """
    Segal field phi(h) = a(h) + a*(h).

    [phi(h), phi(g)] = 2i Im<h, g>_H holds exactly on columns with total occupation <= N_max - 2.

    Raises:
        CutoffError: h has modes above M
    """
    a = annihilation_field(config, w, h)
    return FockOperator(config, (a.matrix + a.matrix.conj().T).tocsr(), "phi(h)")


def ccr_defect(config: FockConfig, w: SpectralWeights, h: FourierVector, g: FourierVector) -> float:
    """max |[phi(h), phi(g)] - 2i Im<h,g>| on columns with total <= N_max - 2."""
    ph = field_operator(config, w, h).matrix
    pg = field_operator(config, w, g).matrix
    commutator = FockOperator(config, (ph @ pg - pg @ ph).tocsr())
    expected = 2j * inner_product(w, h, g).imag
    n = config.block_size(config.N_max - 2)
    cols = commutator.columns(config.N_max - 2)
    cols[:n, :n] -= expected * np.eye(n)
    return max_abs(cols)


def two_point_function(config: FockConfig, w: SpectralWeights, h: FourierVector, g: FourierVector) -> complex:
    """<Omega, phi(h) phi(g) Omega>."""
    omega = vacuum(config)
    ph = field_operator(config, w, h).matrix
    pg = field_operator(config, w, g).matrix
    return complex(np.vdot(omega, ph @ (pg @ omega)))


# ============================================================================
# Coherent vectors and Weyl operators
# ============================================================================

def _coherent_from_coordinates(config: FockConfig, x: np.ndarray) -> np.ndarray:
    occupations = fock_basis(config).occupations
    log_norm = 0.5 * gammaln(occupations + 1.0).sum(axis=1)
    return np.prod(x[None, :] ** occupations, axis=1) * np.exp(-log_norm)


def coherent_vector(config: FockConfig, w: SpectralWeights, f: FourierVector) -> np.ndarray:
    """
    Truncated exponential vector Gamma(f) = sum_{n <= N_max} f^{(x)n} / sqrt(n!).

    Issues a warning (not an error) when ||f||_H > 1.
    """
    norm = h_norm(w, f)
    if norm > 1.0:
        message = f"coherent vector of norm {norm:.3f} > 1; truncated series converges slowly"
        logger.warning(message, extra={"N_max": config.N_max})
        warnings.warn(message, stacklevel=2)
    return _coherent_from_coordinates(config, _mode_coordinates(config, w, f))


def coherent_overlap_check(
    config: FockConfig,
    w: SpectralWeights,
    f: FourierVector,
    g: FourierVector,
) -> float:
    """|<Gamma(f), Gamma(g)> - sum_{n <= N_max} <f, g>^n / n!|."""
    overlap = np.vdot(coherent_vector(config, w, f), coherent_vector(config, w, g))
    z = inner_product(w, f, g)
    partial = sum(z ** n / math.factorial(n) for n in range(config.N_max + 1))
    return float(abs(overlap - partial))


def weyl_vacuum_vector(config: FockConfig, w: SpectralWeights, h: FourierVector) -> np.ndarray:
    """e^{i phi(h)} Omega on the truncated space."""
    phi = field_operator(config, w, h).matrix
    return scipy.sparse.linalg.expm_multiply(1j * phi, vacuum(config))


def vacuum_weyl_check(config: FockConfig, w: SpectralWeights, h: FourierVector) -> float:
    """|<Omega, V(h) Omega> - e^{-||h||^2 / 2}|."""
    value = weyl_vacuum_vector(config, w, h)[0]
    expected = math.exp(-0.5 * inner_product(w, h, h).real)
    return float(abs(value - expected))


def weyl_check(
    config: FockConfig,
    w: SpectralWeights,
    h: FourierVector,
    g: FourierVector,
    max_total: Optional[int] = None,
) -> float:
    """
    V(h) V(g) Omega against e^{-i Im<h,g>} V(h+g) Omega on the low-occupation block.

    max_total defaults to N_max // 2.
    """
    phi_h = field_operator(config, w, h).matrix
    lhs = scipy.sparse.linalg.expm_multiply(1j * phi_h, weyl_vacuum_vector(config, w, g))
    phase = np.exp(-1j * inner_product(w, h, g).imag)
    rhs = phase * weyl_vacuum_vector(config, w, h + g)
    n = config.block_size(config.N_max // 2 if max_total is None else max_total)
    return max_abs(lhs[:n] - rhs[:n])


# ============================================================================
# Second quantization
# ============================================================================

def _mode_block(config: FockConfig, A: OperatorH) -> np.ndarray:
    if config.M > A.K:
        raise DomainError(f"Fock cutoff M={config.M} exceeds the operator cutoff K={A.K}")
    lo = A.K - config.M
    return A.M[lo:lo + config.n_modes, lo:lo + config.n_modes]


def second_quantize(config: FockConfig, A: OperatorH) -> FockOperator:
    """
    Multiplicative second quantization Gamma(A) = direct sum of A^{(x)n}, for A on |k| <= M.

    Column of |n> is prod_i a*(A f_i)^{n_i} / sqrt(n_i!) Omega, built sector by sector from the
    column with one quantum less in the first occupied mode.
    """
    block = _mode_block(config, A)
    basis = fock_basis(config)
    ops = _annihilators(config)
    raised = [
        scipy.sparse.csr_matrix(
            sum(complex(block[j, i]) * ops[j].conj().T for j in range(config.n_modes))
        )
        for i in range(config.n_modes)
    ]

    columns: Dict[int, scipy.sparse.csc_matrix] = {0: scipy.sparse.csc_matrix(vacuum(config)[:, None])}
    for col in range(1, config.dim):
        occupation = basis.occupations[col]
        mode = int(np.flatnonzero(occupation)[0])
        parent = list(occupation)
        parent[mode] -= 1
        parent_col = columns[basis.index[tuple(parent)]]
        columns[col] = (raised[mode] @ parent_col) / math.sqrt(occupation[mode])

    matrix = scipy.sparse.hstack([columns[i] for i in range(config.dim)], format="csr")
    matrix.eliminate_zeros()
    return FockOperator(config, matrix, f"Gamma({A.label})")


def second_quantize_diagonal(config: FockConfig, phases: np.ndarray) -> FockOperator:
    """Gamma of a diagonal one-particle operator with the given entries on |k| <= M."""
    occupations = fock_basis(config).occupations
    values = np.prod(np.asarray(phases, dtype=complex)[None, :] ** occupations, axis=1)
    return FockOperator(config, scipy.sparse.diags(values, format="csr"), "Gamma(diag)")


def second_quantize_derivation(config: FockConfig, B: OperatorH) -> FockOperator:
    """Additive second quantization dGamma(B) = sum_jk B_jk a*_j a_k."""
    block = _mode_block(config, B)
    ops = _annihilators(config)
    creators = [op.conj().T for op in ops]
    matrix = scipy.sparse.csr_matrix((config.dim, config.dim), dtype=complex)
    for j in range(config.n_modes):
        for k in range(config.n_modes):
            if block[j, k] != 0:
                matrix = matrix + complex(block[j, k]) * (creators[j] @ ops[k])
    return FockOperator(config, matrix.tocsr(), f"dGamma({B.label})")


def derivation_consistency(config: FockConfig, B: OperatorH, s: float = 1e-4) -> float:
    """max |dGamma(B) - (Gamma(e^{sB}) - Gamma(e^{-sB})) / (2s)|, an O(s^2) check."""
    plus = OperatorH(B.K, scipy.linalg.expm(s * B.M), B.weights)
    minus = OperatorH(B.K, scipy.linalg.expm(-s * B.M), B.weights)
    difference = (second_quantize(config, plus).matrix - second_quantize(config, minus).matrix) / (2 * s)
    diff = difference - second_quantize_derivation(config, B).matrix
    return float(np.max(np.abs(diff.toarray())))


def gamma_coherent_defect(config: FockConfig, A: OperatorH, h: FourierVector) -> float:
    """|Gamma(A) Gamma(h) - Gamma(A h)| for A restricted to |k| <= M."""
    w = A.weights
    if w is None:
        raise DomainError("gamma_coherent_defect needs an operator built from spectral weights")
    x = _mode_coordinates(config, w, h)
    block = _mode_block(config, A)
    lhs = second_quantize(config, A).matrix @ _coherent_from_coordinates(config, x)
    rhs = _coherent_from_coordinates(config, block @ x)
    return max_abs(lhs - rhs)


# ============================================================================
# Normal ordering and interactions
# ============================================================================

def _matrix_power(matrix: scipy.sparse.csr_matrix, n: int, dim: int) -> scipy.sparse.csr_matrix:
    result = scipy.sparse.identity(dim, dtype=complex, format="csr")
    for _ in range(n):
        result = result @ matrix
    return result.tocsr()


def normal_ordered_power(config: FockConfig, w: SpectralWeights, h: FourierVector, n: int) -> FockOperator:
    """
    :phi(h)^n: = sum_j C(n, j) a*(h)^j a(h)^{n-j}.

    Raises:
        DegreeCapError: n > 8 or n < 0
    """
    if not 0 <= n <= MAX_NORMAL_ORDER_DEGREE:
        raise DegreeCapError(f"normal-ordered powers support 0 <= n <= {MAX_NORMAL_ORDER_DEGREE}, got {n}")
    a = annihilation_field(config, w, h).matrix
    a_star = a.conj().T.tocsr()
    dim = config.dim
    total = scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    for j in range(n + 1):
        term = _matrix_power(a_star, j, dim) @ _matrix_power(a, n - j, dim)
        total = total + math.comb(n, j) * term
    return FockOperator(config, total.tocsr(), f":phi^{n}:")


def hermite_recursion(config: FockConfig, w: SpectralWeights, h: FourierVector, n: int) -> FockOperator:
    """:phi^n: from :phi^n: = phi :phi^{n-1}: - (n-1) ||h||^2 :phi^{n-2}:."""
    if not 0 <= n <= MAX_NORMAL_ORDER_DEGREE:
        raise DegreeCapError(f"normal-ordered powers support 0 <= n <= {MAX_NORMAL_ORDER_DEGREE}, got {n}")
    phi = field_operator(config, w, h).matrix
    norm_sq = inner_product(w, h, h).real
    previous = scipy.sparse.identity(config.dim, dtype=complex, format="csr")
    if n == 0:
        return FockOperator(config, previous)
    current = phi
    for m in range(2, n + 1):
        previous, current = current, (phi @ current - (m - 1) * norm_sq * previous).tocsr()
    return FockOperator(config, current.tocsr(), f"hermite^{n}")


def normal_order_agreement(config: FockConfig, w: SpectralWeights, h: FourierVector, n: int) -> float:
    """Binomial versus recursive :phi^n: on columns with total <= N_max - n."""
    binomial = normal_ordered_power(config, w, h, n).columns(config.N_max - n)
    recursive = hermite_recursion(config, w, h, n).columns(config.N_max - n)
    return max_abs(binomial - recursive)


def _partial_matchings(positions: Tuple[int, ...]):
    """Every set of disjoint pairs among positions, the empty set included."""
    if not positions:
        yield ()
        return
    first, rest = positions[0], positions[1:]
    yield from _partial_matchings(rest)
    for i, other in enumerate(rest):
        for matching in _partial_matchings(rest[:i] + rest[i + 1:]):
            yield ((first, other),) + matching


def wick_power(config: FockConfig, w: SpectralWeights, h: FourierVector, n: int) -> np.ndarray:
    """
    :phi(h)^n: on the N_max space from plain field powers with every contraction removed.

    phi^n is the sum of all 2^n orderings of a(h) and a*(h). Inverting Wick's theorem, each
    partial matching of the n factors with p pairs contributes (-||h||^2)^p phi^{n-2p}.
    The powers are taken in the space with N_max + n quanta, where products of n fields are
    exact on the leading N_max block.

    Raises:
        DegreeCapError: n > 8 or n < 0
    """
    if not 0 <= n <= MAX_NORMAL_ORDER_DEGREE:
        raise DegreeCapError(f"normal-ordered powers support 0 <= n <= {MAX_NORMAL_ORDER_DEGREE}, got {n}")
    enlarged = FockConfig(config.M, config.N_max + n)
    phi = field_operator(enlarged, w, h).matrix
    contraction = inner_product(w, h, h).real
    pair_counts = [0] * (n // 2 + 1)
    for matching in _partial_matchings(tuple(range(n))):
        pair_counts[len(matching)] += 1
    total = scipy.sparse.csr_matrix((enlarged.dim, enlarged.dim), dtype=complex)
    for pairs, count in enumerate(pair_counts):
        power = _matrix_power(phi, n - 2 * pairs, enlarged.dim)
        total = total + count * (-contraction) ** pairs * power
    return total.tocsr()[: config.dim, : config.dim].toarray()


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial sum_n coefficients[n] x^n, bounded from below."""

    coefficients: Tuple[float, ...]

    def __post_init__(self):
        coeffs = [float(c) for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs) or (0.0,))
        d = self.degree
        if d > MAX_NORMAL_ORDER_DEGREE:
            raise DegreeCapError(f"polynomial degree {d} above {MAX_NORMAL_ORDER_DEGREE}")
        if d > 0 and (d % 2 == 1 or self.coefficients[-1] <= 0):
            raise NotBoundedBelowError(
                f"polynomial of degree {d} with leading coefficient {self.coefficients[-1]} "
                "is not bounded below"
            )

    @classmethod
    def monomial(cls, n: int, coefficient: float = 1.0) -> "Polynomial":
        return cls(tuple([0.0] * n + [coefficient]))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: float) -> float:
        return sum(c * x ** n for n, c in enumerate(self.coefficients))


def node_vector(w: SpectralWeights, M: int, psi: float) -> FourierVector:
    """Fourier-truncated delta at psi: h_k = e^{-ik psi} / sqrt(2 pi r) for |k| <= M, real datum."""
    coeff = np.where(
        np.abs(w.modes) <= M,
        np.exp(-1j * w.modes * psi) / math.sqrt(2.0 * math.pi * w.radius),
        0.0,
    )
    return FourierVector(w.K, coeff)


def default_node_count(M: int, degree: int) -> int:
    """Smallest node count that integrates cos(psi) :P(phi(h_psi)): exactly, at least 2M+1."""
    return max(2 * M + 1, degree * M + 2)


def interaction_generator(
    config: FockConfig,
    w: SpectralWeights,
    P: Polynomial,
    n_nodes: Optional[int] = None,
    alpha: float = 0.0,
) -> FockOperator:
    """
    V = sum_j (2 pi / N_q) r cos(psi_j - alpha) :P(phi(h_j)): over N_q uniform nodes.

    h_j is the delta at node psi_j = 2 pi j / N_q truncated to |k| <= M. The node sum runs in
    fixed order.
    """
    n_q = n_nodes or default_node_count(config.M, P.degree)
    dim = config.dim
    total = scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    for j in range(n_q):
        psi = 2.0 * math.pi * j / n_q
        weight = (2.0 * math.pi / n_q) * w.radius * math.cos(psi - alpha)
        h = node_vector(w, config.M, psi)
        local = scipy.sparse.csr_matrix((dim, dim), dtype=complex)
        for n, c in enumerate(P.coefficients):
            if c != 0.0:
                local = local + c * normal_ordered_power(config, w, h, n).matrix
        total = total + complex(weight) * local
    logger.debug(
        f"Interaction generator assembled on {n_q} nodes",
        extra={"M": config.M, "N_max": config.N_max, "degree": P.degree},
    )
    return FockOperator(config, total.tocsr(), "V")


def free_generator(config: FockConfig, w: SpectralWeights) -> FockOperator:
    """L0 = dGamma(l1 restricted to |k| <= M)."""
    return second_quantize_derivation(config, boost_generator(w))


def full_generator(config: FockConfig, w: SpectralWeights, P: Polynomial, n_nodes: Optional[int] = None) -> FockOperator:
    """L = dGamma(l1 on |k| <= M) + V."""
    L = free_generator(config, w) + interaction_generator(config, w, P, n_nodes)
    return FockOperator(config, L.matrix, "L")


def wick_interaction(
    config: FockConfig,
    w: SpectralWeights,
    P: Polynomial,
    n_nodes: Optional[int] = None,
) -> np.ndarray:
    """Dense V assembled on the same nodes as interaction_generator, with wick_power."""
    n_q = n_nodes or default_node_count(config.M, P.degree)
    total = np.zeros((config.dim, config.dim), dtype=complex)
    for j in range(n_q):
        psi = 2.0 * math.pi * j / n_q
        weight = (2.0 * math.pi / n_q) * w.radius * math.cos(psi)
        h = node_vector(w, config.M, psi)
        for n, c in enumerate(P.coefficients):
            if c != 0.0:
                total += weight * c * wick_power(config, w, h, n)
    return total


def wick_oracle_defect(config: FockConfig, w: SpectralWeights, P: Polynomial) -> float:
    """Entrywise interaction_generator against wick_interaction, relative to max(1, max |V|)."""
    expected = wick_interaction(config, w, P)
    V = interaction_generator(config, w, P).dense()
    return max_abs(V - expected) / max(1.0, max_abs(expected))


def rotation_covariance_defect(
    config: FockConfig,
    w: SpectralWeights,
    P: Polynomial,
    m: int = 1,
    n_nodes: Optional[int] = None,
) -> float:
    """
    max |Gamma(u(R0(a))) V Gamma(u(R0(a)))* - V_a| for the node rotation a = 2 pi m / N_q,
    where V_a uses the weight cos(psi - a).
    """
    n_q = n_nodes or default_node_count(config.M, P.degree)
    alpha = 2.0 * math.pi * m / n_q
    rotation = rotation_operator(w, alpha)
    R = second_quantize_diagonal(config, np.diag(_mode_block(config, rotation))).matrix
    V = interaction_generator(config, w, P, n_q).matrix
    conjugated = R @ V @ R.conj().T
    expected = interaction_generator(config, w, P, n_q, alpha=alpha).matrix
    diff = conjugated - expected
    return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0


def node_refinement_defect(config: FockConfig, w: SpectralWeights, P: Polynomial) -> float:
    """V on N_q against V on 2 N_q nodes, on the block with total <= N_max - degree."""
    n_q = default_node_count(config.M, P.degree)
    coarse = interaction_generator(config, w, P, n_q)
    fine = interaction_generator(config, w, P, 2 * n_q)
    limit = config.N_max - P.degree
    return max_abs(coarse.block(limit) - fine.block(limit))


def low_lying_spectrum(L: FockOperator, count: int = 10) -> np.ndarray:
    """Smallest eigenvalues of a Hermitian FockOperator (dense solve, desk-scale dims)."""
    values = scipy.linalg.eigvalsh(L.dense())
    return values[:count]


def write_spectrum_csv(L: FockOperator, path: Union[str, Path], count: int = 10) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "eigenvalue"])
        for i, value in enumerate(low_lying_spectrum(L, count)):
            writer.writerow([i, repr(float(value))])
    logger.info(f"Fock spectrum saved: {path}")
    return path
