"""Ray-valuation oracles and the quadratic-form machinery built on them.

A valuation assigns a probability to every ray of the Hilbert space,
additively over orthogonal decompositions and normalized so any full
orthonormal basis sums to 1.  Oracles expose only ray queries; subspace
values are obtained by additivity.  The extension ``f`` of a valuation to
non-unit vectors, and the polarization identity recovering a sesquilinear
form from it, are what the explicit reconstruction routes consume:

    f(x)       = ||x||^2 v(x / ||x||)
    <x|rho|y>  = [f(x+y) - f(x-y)]/4 - i [f(x+iy) - f(x-iy)]/4

with the imaginary bracket dropped on real Hilbert spaces.
"""

from __future__ import annotations

import threading

import numpy as np

from .hilbert import ATOL, DensityMatrix, Subspace, UnitVector
from .serialize import load_json, oracle_table_from_json

ZERO_NORM = 1e-14
TABLE_MATCH_TOL = 1e-9

__all__ = [
    "ValuationOracle",
    "ExactOracle",
    "NoisyOracle",
    "TabulatedOracle",
    "OracleLookupError",
    "extend",
    "sesquilinear",
    "subspace_measure",
    "load_tabulated_oracle",
]


class OracleLookupError(LookupError):
    """A tabulated oracle was queried outside its table."""


class ValuationOracle:
    """Base class: a black-box map from unit vectors to probabilities.

    Subclasses implement ``_values`` on a stack of row vectors.  Queries
    are counted atomically so reconstruction query budgets can be audited;
    results are clipped to [0, 1].
    """

    def __init__(self, dim: int, field: str = "complex"):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if field not in ("complex", "real"):
            raise ValueError(f"unknown field {field!r}")
        self.dim = dim
        self.field = field
        self._count = 0
        self._lock = threading.Lock()

    @property
    def query_count(self) -> int:
        with self._lock:
            return self._count

    def query(self, v: UnitVector) -> float:
        """Valuation of a single ray."""
        if v.dim != self.dim:
            raise ValueError(f"vector dim {v.dim} != oracle dim {self.dim}")
        return float(self.query_batch(v.components[None, :])[0])

    def query_batch(self, vectors: np.ndarray) -> np.ndarray:
        """Valuations of a stack of unit row vectors, shape (k, dim)."""
        vecs = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
        if vecs.shape[1] != self.dim:
            raise ValueError(f"vectors have dim {vecs.shape[1]}, oracle dim {self.dim}")
        norms = np.linalg.norm(vecs, axis=1)
        if np.max(np.abs(norms - 1.0)) > ATOL:
            raise ValueError("queried vectors must be unit norm")
        if self.field == "real" and np.max(np.abs(vecs.imag), initial=0.0) > ATOL:
            raise ValueError("real-mode oracle queried with complex vector")
        vals = self._values(vecs)
        with self._lock:
            self._count += vecs.shape[0]
        return np.clip(vals, 0.0, 1.0)

    def _values(self, vecs: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _check_hidden_state(state: DensityMatrix, field: str) -> None:
    if field == "real" and not state.is_real():
        raise ValueError("real-mode oracle needs a real symmetric hidden state")


class ExactOracle(ValuationOracle):
    """Noise-free oracle: v(n) = <n|rho|n> to machine precision."""

    def __init__(self, state: DensityMatrix, field: str = "complex"):
        super().__init__(state.dim, field)
        _check_hidden_state(state, field)
        self._state = state.matrix

    def _values(self, vecs: np.ndarray) -> np.ndarray:
        return np.einsum("ki,ij,kj->k", vecs.conj(), self._state, vecs).real


class NoisyOracle(ValuationOracle):
    """Finite-shot oracle: each query returns k/n, k ~ Binomial(n, <n|rho|n>).

    Repeated queries of the same vector draw fresh samples unless
    ``memoize=True``.  Sampling is seeded; per-call reproducibility holds
    under single-threaded use (concurrent callers see the same marginal
    distribution but an order-dependent stream).
    """

    def __init__(
        self,
        state: DensityMatrix,
        shots: int = 10_000,
        seed: int = 0,
        memoize: bool = False,
        field: str = "complex",
    ):
        super().__init__(state.dim, field)
        _check_hidden_state(state, field)
        if shots < 1:
            raise ValueError("shots must be >= 1")
        self._state = state.matrix
        self.shots = int(shots)
        self.memoize = bool(memoize)
        self._rng = np.random.default_rng(seed)
        self._memo: dict[bytes, float] = {}
        self._rng_lock = threading.Lock()

    def _values(self, vecs: np.ndarray) -> np.ndarray:
        probs = np.einsum("ki,ij,kj->k", vecs.conj(), self._state, vecs).real
        probs = np.clip(probs, 0.0, 1.0)
        out = np.empty(vecs.shape[0])
        with self._rng_lock:
            if self.memoize:
                for i in range(vecs.shape[0]):
                    key = vecs[i].tobytes()
                    if key not in self._memo:
                        self._memo[key] = (
                            self._rng.binomial(self.shots, probs[i]) / self.shots
                        )
                    out[i] = self._memo[key]
            else:
                out[:] = self._rng.binomial(self.shots, probs) / self.shots
        return out


class TabulatedOracle(ValuationOracle):
    """Oracle backed by a finite table of (vector, value) records.

    Lookups match vectors within Euclidean distance ``TABLE_MATCH_TOL``
    and raise :class:`OracleLookupError` on a miss.
    """

    def __init__(
        self,
        vectors: np.ndarray,
        values: np.ndarray,
        field: str = "complex",
        match_tol: float = TABLE_MATCH_TOL,
    ):
        vectors = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
        values = np.asarray(values, dtype=float).reshape(-1)
        if vectors.shape[0] != values.size:
            raise ValueError("one value per vector required")
        if np.any(values < -1e-9) or np.any(values > 1 + 1e-9):
            raise ValueError("tabulated values must lie in [0, 1]")
        super().__init__(vectors.shape[1], field)
        self._table = vectors
        self._vals = np.clip(values, 0.0, 1.0)
        self.match_tol = float(match_tol)

    def _values(self, vecs: np.ndarray) -> np.ndarray:
        # (k, m) distance matrix; the table is CLI-scale so this is fine
        diff = vecs[:, None, :] - self._table[None, :, :]
        dists = np.linalg.norm(diff, axis=2)
        idx = np.argmin(dists, axis=1)
        misses = dists[np.arange(vecs.shape[0]), idx] > self.match_tol
        if np.any(misses):
            bad = int(np.flatnonzero(misses)[0])
            raise OracleLookupError(
                f"no tabulated vector within {self.match_tol} of query "
                f"(nearest at distance {dists[bad, idx[bad]]:.3e})"
            )
        return self._vals[idx]


def load_tabulated_oracle(path, field: str = "complex") -> TabulatedOracle:
    """Read a tabulated oracle from its JSON record-list file."""
    vectors, values = oracle_table_from_json(load_json(path))
    return TabulatedOracle(vectors, values, field=field)


def extend(oracle: ValuationOracle, x: np.ndarray) -> float:
    """Quadratic-form extension f(x) = ||x||^2 v(x/||x||), with f(0) = 0."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.size != oracle.dim:
        raise ValueError(f"vector dim {x.size} != oracle dim {oracle.dim}")
    norm = float(np.linalg.norm(x))
    if norm < ZERO_NORM:
        return 0.0
    return norm**2 * float(oracle.query_batch((x / norm)[None, :])[0])


def sesquilinear(oracle: ValuationOracle, x: np.ndarray, y: np.ndarray) -> complex:
    """Recover <x|rho|y> from quadratic-form evaluations by polarization.

    Complex mode uses the four probes x+y, x-y, x+iy, x-iy; real mode
    uses only the first two (the form is then symmetric and real).
    """
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if x.size != y.size:
        raise ValueError("x and y must have the same dimension")
    re = (extend(oracle, x + y) - extend(oracle, x - y)) / 4
    if oracle.field == "real":
        return complex(re)
    im = (extend(oracle, x + 1j * y) - extend(oracle, x - 1j * y)) / 4
    return complex(re - 1j * im)


def subspace_measure(oracle: ValuationOracle, a: Subspace) -> float:
    """Valuation of a subspace by additivity over an orthonormal spanning set."""
    if a.dim != oracle.dim:
        raise ValueError(f"subspace dim {a.dim} != oracle dim {oracle.dim}")
    rows = np.vstack([v.components for v in a.spanning_set])
    return float(np.sum(oracle.query_batch(rows)))
