"""Linear operators with adjoints and a cached spectral-norm estimate."""

import numpy as np
import scipy.sparse as sp

__all__ = ["LinearMap", "NormEstimationError", "aslinearmap"]

#: Multiplicative safety margin applied to norm estimates before caching.
NORM_SAFETY = 1.001


class NormEstimationError(RuntimeError):
    """Power iteration did not settle within the iteration budget."""

    def __init__(self, message, estimate, iterations):
        super().__init__(message)
        self.estimate = estimate
        self.iterations = iterations


class LinearMap:
    """A matrix ``A`` acting as ``x -> A x`` with adjoint ``y -> A^T y``.

    Both dense and CSR inputs are accepted. Products are always evaluated
    through a CSR kernel, which accumulates each output entry sequentially
    in column (resp. row) order, so results do not depend on the storage
    the operator was built from and repeated runs are bitwise identical.

    Parameters
    ----------
    matrix : array_like or scipy.sparse matrix
        Two-dimensional operator of shape ``(rows, cols)``.
    norm : float, optional
        Known upper bound on the spectral norm. Skips power iteration.
    """

    def __init__(self, matrix, norm=None):
        if sp.issparse(matrix):
            csr = sp.csr_matrix(matrix, dtype=float)
            self.storage = "csr"
            self._dense = None
        else:
            dense = np.array(matrix, dtype=float, order="C")
            if dense.ndim != 2:
                raise ValueError("LinearMap needs a two-dimensional matrix")
            csr = sp.csr_matrix(dense)
            self.storage = "dense"
            self._dense = dense
        csr.sort_indices()
        self._csr = csr
        self._csr_t = csr.T.tocsr()
        self._csr_t.sort_indices()
        self.rows, self.cols = csr.shape
        self._norm = None
        if norm is not None:
            if norm < 0:
                raise ValueError("operator norm must be nonnegative")
            self._norm = float(norm)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def cached_norm(self):
        return self._norm

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.cols,):
            raise ValueError(
                f"apply expects a vector of length {self.cols}, got shape {x.shape}")
        return self._csr @ x

    def adjoint_apply(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.rows,):
            raise ValueError(
                f"adjoint_apply expects a vector of length {self.rows}, got shape {y.shape}")
        # The explicit transpose keeps accumulation in increasing row order.
        return self._csr_t @ y

    __matmul__ = apply

    @property
    def T(self):
        return _Adjoint(self)

    def toarray(self):
        if self._dense is not None:
            return self._dense.copy()
        return self._csr.toarray()

    def tocsr(self):
        return self._csr.copy()

    def scaled(self, c):
        """Return the operator ``c A`` (the cached norm is rescaled too)."""
        src = self._csr * c if self._dense is None else self._dense * c
        out = LinearMap(src)
        if self._norm is not None:
            out._norm = abs(c) * self._norm
        return out

    def estimate_norm(self, rel_tol=1e-6, max_iters=1000, seed=0):
        """Estimate ``||A||_2`` by power iteration on ``A^T A``.

        The start vector is drawn from ``numpy.random.default_rng(seed)``.
        Iteration stops once two successive estimates differ by less than
        `rel_tol` relatively. The returned value is the raw estimate; the
        cached norm (used for step sizes) is the estimate times
        ``NORM_SAFETY``.

        Raises
        ------
        NormEstimationError
            If the relative change is still above `rel_tol` after
            `max_iters` iterations. The last estimate is attached.
        """
        if rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(self.cols)
        v /= np.linalg.norm(v)
        est = 0.0
        for it in range(1, max_iters + 1):
            w = self.adjoint_apply(self.apply(v))
            lam = float(v @ w)
            new = np.sqrt(max(lam, 0.0))
            nrm = np.linalg.norm(w)
            if nrm == 0.0:
                # A v = 0; A is zero on this start vector and (generically) zero.
                est = 0.0
                break
            v = w / nrm
            if it > 1 and abs(new - est) <= rel_tol * max(new, np.finfo(float).tiny):
                est = new
                break
            est = new
        else:
            raise NormEstimationError(
                f"power iteration did not reach rel_tol={rel_tol} in {max_iters} iterations",
                estimate=est, iterations=max_iters)
        if self._norm is None:
            self._norm = NORM_SAFETY * est
        return est

    def norm(self, **kwargs):
        """Cached norm, estimating it on first use."""
        if self._norm is None:
            self.estimate_norm(**kwargs)
        return self._norm

    def __repr__(self):
        return f"LinearMap(shape={self.shape}, storage={self.storage!r}, norm={self._norm})"


class _Adjoint:
    def __init__(self, op):
        self._op = op

    def __matmul__(self, y):
        return self._op.adjoint_apply(y)


def aslinearmap(A):
    return A if isinstance(A, LinearMap) else LinearMap(A)
