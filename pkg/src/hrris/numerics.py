"""Dense complex linear-algebra kernels backing the secrecy optimizer.

All routines operate on numpy ``complex128`` arrays and are deterministic:
identical inputs produce bitwise-identical outputs, which downstream code
relies on for reproducible experiment runs.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatchError, NoConvergenceError, SingularMatrixError

# Pivot magnitudes below PIVOT_RTOL times the matrix max-entry are treated as
# singular during inversion.
PIVOT_RTOL = 1e-12

# Power-iteration limits: hard iteration cap and the relative stall threshold
# on successive Rayleigh quotients.
EIG_MAX_ITERS = 10_000
EIG_RAYLEIGH_TOL = 1e-12

# Progress is audited every EIG_PROGRESS_WINDOW iterations; when the residual
# trend cannot reach the target within the budget, the best iterate is
# returned if its residual is within EIG_ACCEPT_RTOL times the matrix
# max-entry, else the iteration is declared failed.
EIG_PROGRESS_WINDOW = 200
EIG_ACCEPT_RTOL = 1e-2


def _as_square(m: np.ndarray, op: str) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{op} requires a square matrix, got shape {a.shape}")
    return a


def hermitian(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose of a matrix."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatchError(f"hermitian expects a 2-D array, got {a.ndim}-D")
    return a.conj().T


def inverse(m: np.ndarray) -> np.ndarray:
    """Matrix inverse via partially pivoted LU elimination.

    Args:
        m: square complex matrix.

    Returns:
        The inverse as a new ``complex128`` array.

    Raises:
        SingularMatrixError: if any pivot magnitude falls below
            ``PIVOT_RTOL`` times the largest input magnitude.
    """
    a = _as_square(m, "inverse")
    n = a.shape[0]
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError("cannot invert the zero matrix")
    lu = a.copy()
    # Right-hand side starts as the identity and is row-swapped in lockstep
    # with the elimination so no separate permutation pass is needed.
    x = np.eye(n, dtype=np.complex128)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < PIVOT_RTOL * scale:
            raise SingularMatrixError(f"pivot {abs(lu[p, k]):.3e} below threshold at column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            x[[k, p]] = x[[p, k]]
        factors = lu[k + 1 :, k] / lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(factors, lu[k, k + 1 :])
        x[k + 1 :] -= np.outer(factors, x[k])
    for k in range(n - 1, -1, -1):
        x[k] -= lu[k, k + 1 :] @ x[k + 1 :]
        x[k] /= lu[k, k]
    return x


def determinant(m: np.ndarray) -> complex:
    """Determinant as the signed product of LU pivots.

    Never raises on singular input: an exactly zero pivot column short-circuits
    to 0, and near-zero pivots simply drive the product toward zero.
    """
    a = _as_square(m, "determinant")
    n = a.shape[0]
    if n == 0:
        return complex(1.0)
    lu = a.copy()
    sign = 1.0
    det = complex(1.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = lu[p, k]
        if pivot == 0:
            return complex(0.0)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            sign = -sign
        det *= complex(pivot)
        factors = lu[k + 1 :, k] / pivot
        lu[k + 1 :, k + 1 :] -= np.outer(factors, lu[k, k + 1 :])
    return complex(sign * det)


def _fixed_perturbation(n: int) -> np.ndarray:
    # Fixed pseudo-random unit vector, one per dimension, so stall recovery
    # stays deterministic across runs.
    rng = np.random.default_rng(0x5EED)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    # Rotate so the largest-magnitude entry is real and nonnegative; ties
    # resolve to the first index via argmax.
    i = int(np.argmax(np.abs(v)))
    pivot = v[i]
    mag = abs(pivot)
    if mag == 0.0:
        return v
    out = v * (pivot.conjugate() / mag)
    # Pin the pivot entry exactly: rounding in the rotation leaves ~1e-17j.
    out[i] = mag
    return out


def dominant_eigenvector(
    m: np.ndarray,
    max_iters: int = EIG_MAX_ITERS,
    tol: float = EIG_RAYLEIGH_TOL,
    trace: list | None = None,
) -> tuple[complex, np.ndarray]:
    """Dominant eigenpair by power iteration.

    Starts from the normalized all-ones vector and perturbs it with a fixed
    pseudo-random direction on the first Rayleigh-quotient stall (successive
    relative change below ``tol``), which recovers starts that happen to be
    orthogonal to the dominant eigenvector. After the perturbation the
    iteration runs until the residual ``||M v - lam v||`` drops below 1e-8
    times the largest input magnitude.

    Every ``EIG_PROGRESS_WINDOW`` iterations the geometric decay rate of the
    residual is extrapolated; when the target is unreachable within the
    remaining budget, the smallest-residual iterate seen is returned provided
    it sits within ``EIG_ACCEPT_RTOL`` times the matrix max-entry. A cluster
    of near-equal dominant magnitudes contracts too slowly for the target but
    lands in this acceptance band, and any vector in the cluster's span is an
    equally good answer to working precision. Iterates far from every
    eigenpair (a +/- magnitude pair never contracts at all) fail the band and
    raise instead.

    The returned vector has unit norm and its largest-magnitude entry is
    rotated to be real and nonnegative, making the output unique.

    Args:
        m: square complex matrix; the residual target is only reachable when
            the dominant eigenvalue is strictly separated in magnitude.
        max_iters: total iteration cap.
        tol: relative stall threshold on successive Rayleigh quotients.
        trace: optional list collecting ``(rayleigh, residual, iterate)`` per
            iteration.

    Returns:
        ``(eigenvalue, eigenvector)``.

    Raises:
        NoConvergenceError: if the iteration cap is reached, or progress dies
            out while the best residual is still outside the acceptance band.
    """
    a = _as_square(m, "dominant_eigenvector")
    n = a.shape[0]
    if n == 0:
        raise DimensionMismatchError("dominant_eigenvector requires a nonempty matrix")
    max_abs = float(np.max(np.abs(a)))
    if max_abs == 0.0:
        # The zero matrix: every direction is an eigenvector for eigenvalue 0.
        return complex(0.0), _canonical_phase(np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128))
    target = 1e-8 * max_abs
    accept = EIG_ACCEPT_RTOL * max_abs
    window = EIG_PROGRESS_WINDOW
    x = np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128)
    lam_prev: complex | None = None
    perturbed = False
    best_res = np.inf
    best: tuple[complex, np.ndarray] | None = None
    mark_res: float | None = None
    since_mark = 0

    def perturb(v: np.ndarray) -> np.ndarray:
        w = v + 1e-3 * _fixed_perturbation(n)
        return w / np.linalg.norm(w)

    for it in range(max_iters):
        y = a @ x
        lam = complex(np.vdot(x, y))
        res = float(np.linalg.norm(y - lam * x))
        if trace is not None:
            trace.append((lam, res, x.copy()))
        if perturbed:
            if res <= target:
                return lam, _canonical_phase(x)
            if res < best_res:
                best_res, best = res, (lam, x)
        if mark_res is None:
            mark_res, since_mark = res, 0
        else:
            since_mark += 1
            if since_mark >= window:
                if res <= target:
                    # Value-converged before the perturbation; the stall
                    # branch below restarts rather than returning early.
                    hopeless = False
                elif res >= mark_res:
                    hopeless = True
                else:
                    # Iterations still needed at the observed per-window decay.
                    need = window * math.log(target / res) / math.log(res / mark_res)
                    hopeless = need > max_iters - 1 - it
                if hopeless:
                    if not perturbed:
                        perturbed = True
                        lam_prev = None
                        x = perturb(x)
                        mark_res, since_mark = None, 0
                        continue
                    lam_b, x_b = best if best is not None else (lam, x)
                    if best_res > accept:
                        # Contraction died far from any eigenpair: the top of
                        # the spectrum has no dominant magnitude.
                        raise NoConvergenceError(
                            f"stalled with residual {best_res:.3e} (max entry {max_abs:.3e})"
                        )
                    return lam_b, _canonical_phase(x_b)
                mark_res, since_mark = res, 0
        norm_y = float(np.linalg.norm(y))
        stalled = lam_prev is not None and abs(lam - lam_prev) <= tol * max(1.0, abs(lam))
        if stalled or norm_y == 0.0:
            if not perturbed:
                perturbed = True
                lam_prev = None
                x = perturb(x)
                mark_res, since_mark = None, 0
                continue
            if norm_y == 0.0:
                # Still in the nullspace after perturbing: eigenvalue 0.
                return complex(0.0), _canonical_phase(x)
        lam_prev = lam
        x = y / norm_y
    raise NoConvergenceError(f"power iteration exhausted {max_iters} iterations")
