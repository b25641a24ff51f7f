"""Seeded, budgeted numerical search for MU constellations.

Vector sets are parametrized as leading columns of d x d unitaries
U = exp(iH), H Hermitian with d^2 real parameters, so orthonormality is
exact and the cost contains only the unbiasedness terms. The total defect
is minimized by gradient descent with a backtracking line search; restarts
draw independent initial parameters from a seeded stream and are merged
deterministically, so results do not depend on the worker count.

A NotFound outcome is a statement about the exhausted budget, not a proof
of non-existence.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize

from .errors import BadCount, BadSignature, DimensionMismatch, DimensionTooSmall
from .mub import Basis, MUConstellation, make_basis

_ARMIJO = 1e-4
_MAX_BACKTRACK = 60
_PLATEAU_WINDOW = 50
_PLATEAU_RELDROP = 1e-3


@dataclass(frozen=True)
class SearchConfig:
    seed: int
    restarts: int = 50
    max_iterations: int = 10_000
    grad_tol: float = 1e-9
    success_threshold: float = 1e-8
    workers: int = 1
    polish: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise BadCount("restarts must be >= 1")
        if self.grad_tol <= 0 or self.success_threshold <= 0:
            raise BadCount("tolerances must be positive")


@dataclass(frozen=True)
class SearchResult:
    status: str  # "Found" | "NotFound"
    best_defect: float
    best_configuration: MUConstellation
    found_at_restart: int | None
    iterations_used: int
    restarts_used: int
    elapsed: float


@dataclass(frozen=True)
class _Problem:
    """Fixed column blocks, free block widths, and interacting block pairs.

    Blocks are indexed fixed-first: blocks 0..len(fixed)-1 are the fixed
    matrices, the rest are free. pairs lists interacting block index pairs.
    """

    d: int
    fixed: tuple  # tuple of (d, m) complex ndarrays
    free_cols: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    full_free: tuple[bool, ...]  # emit all d columns of this free block

    @property
    def n_free(self) -> int:
        return len(self.free_cols)

    @property
    def n_params(self) -> int:
        return self.n_free * self.d * self.d


def _herm_batch(theta: np.ndarray, d: int) -> np.ndarray:
    """(B, d^2) real parameters -> (B, d, d) Hermitian matrices."""
    B = theta.shape[0]
    noff = d * (d - 1) // 2
    iu = np.triu_indices(d, 1)
    H = np.zeros((B, d, d), dtype=complex)
    H[:, np.arange(d), np.arange(d)] = theta[:, :d]
    off = theta[:, d : d + noff] + 1j * theta[:, d + noff :]
    H[:, iu[0], iu[1]] = off
    H[:, iu[1], iu[0]] = off.conj()
    return H


def _unitaries(theta: np.ndarray, d: int):
    """exp(iH) for each parameter block, with the eigendecomposition kept
    for the gradient pullback."""
    H = _herm_batch(theta.reshape(-1, d * d), d)
    lam, V = np.linalg.eigh(H)
    phase = np.exp(1j * lam)
    U = (V * phase[:, None, :]) @ V.conj().transpose(0, 2, 1)
    return U, lam, V, phase


def _phi_matrix(lam: np.ndarray, phase: np.ndarray) -> np.ndarray:
    """Divided differences of exp(i*lambda): (f(a)-f(b))/(a-b), with the
    derivative i*f on the diagonal / coincident eigenvalues."""
    dl = lam[:, :, None] - lam[:, None, :]
    df = phase[:, :, None] - phase[:, None, :]
    near = np.abs(dl) < 1e-12
    phi = np.where(near, 1j * phase[:, :, None], df / np.where(near, 1.0, dl))
    return phi


def _block_columns(prob: _Problem, U: np.ndarray) -> list[np.ndarray]:
    cols = [m for m in prob.fixed]
    for i, m in enumerate(prob.free_cols):
        cols.append(U[i][:, :m])
    return cols


def _cost_only(theta: np.ndarray, prob: _Problem) -> float:
    U, _, _, _ = _unitaries(theta, prob.d)
    cols = _block_columns(prob, U)
    c = 0.0
    inv_d = 1.0 / prob.d
    for a, b in prob.pairs:
        t = np.abs(cols[a].conj().T @ cols[b]) ** 2 - inv_d
        c += float((t * t).sum())
    return c


def _cost_grad(theta: np.ndarray, prob: _Problem):
    d = prob.d
    U, lam, V, phase = _unitaries(theta, d)
    cols = _block_columns(prob, U)
    nfix = len(prob.fixed)
    inv_d = 1.0 / d
    c = 0.0
    # G[i] = dC/dconj(U_i), nonzero only on the used columns
    G = np.zeros_like(U)
    for a, b in prob.pairs:
        t = cols[a].conj().T @ cols[b]
        w = np.abs(t) ** 2 - inv_d
        c += float((w * w).sum())
        wt = 2.0 * w * t
        if b >= nfix:
            G[b - nfix][:, : prob.free_cols[b - nfix]] += cols[a] @ wt
        if a >= nfix:
            G[a - nfix][:, : prob.free_cols[a - nfix]] += cols[b] @ wt.conj().T

    # pull back through U = exp(iH): K = V (phi o (V^H G V))^T-style transport
    phi = _phi_matrix(lam, phase)
    Vh = V.conj().transpose(0, 2, 1)
    A = Vh @ G.conj().transpose(0, 2, 1) @ V
    W = A.transpose(0, 2, 1) * phi
    K = V @ W.transpose(0, 2, 1) @ Vh

    noff = d * (d - 1) // 2
    iu = np.triu_indices(d, 1)
    B = K.shape[0]
    grad = np.empty((B, d * d))
    grad[:, :d] = 2.0 * K[:, np.arange(d), np.arange(d)].real
    kpq = K[:, iu[0], iu[1]]
    kqp = K[:, iu[1], iu[0]]
    grad[:, d : d + noff] = 2.0 * (kpq + kqp).real
    grad[:, d + noff :] = -2.0 * (kqp - kpq).imag
    return c, grad.reshape(-1)


def _residuals(theta: np.ndarray, prob: _Problem) -> np.ndarray:
    """Per-overlap residuals |<u|v>|^2 - 1/d; the cost is their square sum."""
    U, _, _, _ = _unitaries(theta, prob.d)
    cols = _block_columns(prob, U)
    inv_d = 1.0 / prob.d
    return np.concatenate(
        [
            (np.abs(cols[a].conj().T @ cols[b]) ** 2 - inv_d).ravel()
            for a, b in prob.pairs
        ]
    )


def _residual_jacobian(theta: np.ndarray, prob: _Problem) -> np.ndarray:
    """Analytic Jacobian of _residuals for the Gauss-Newton polish."""
    d = prob.d
    U, lam, V, phase = _unitaries(theta, d)
    phi = _phi_matrix(lam, phase)
    cols = _block_columns(prob, U)
    nfix = len(prob.fixed)
    noff = d * (d - 1) // 2
    iu = np.triu_indices(d, 1)
    diag = np.arange(d)

    def pack(K: np.ndarray) -> np.ndarray:
        # K: (R, d, d) transported gradients; dr = 2 Re tr(K dH)
        out = np.empty((K.shape[0], d * d))
        out[:, :d] = 2.0 * K[:, diag, diag].real
        kpq = K[:, iu[0], iu[1]]
        kqp = K[:, iu[1], iu[0]]
        out[:, d : d + noff] = 2.0 * (kpq + kqp).real
        out[:, d + noff :] = -2.0 * (kqp - kpq).imag
        return out

    n_res = sum(
        cols[a].shape[1] * cols[b].shape[1] for a, b in prob.pairs
    )
    jac = np.zeros((n_res, prob.n_params))
    off = 0
    for a, b in prob.pairs:
        T = cols[a].conj().T @ cols[b]
        ma, mb = T.shape
        R = ma * mb
        if b >= nfix:
            i = b - nfix
            Vb = V[i]
            P = cols[a].conj().T @ Vb  # u_i^H V
            Q = Vb[:mb, :].conj()  # rows j of V, conjugated
            W = np.einsum("ij,ix,jy,xy->ijxy", T.conj(), P, Q, phi[i])
            K = np.einsum("py,ijxy,qx->ijpq", Vb, W, Vb.conj())
            jac[off : off + R, i * d * d : (i + 1) * d * d] += pack(
                K.reshape(R, d, d)
            )
        if a >= nfix:
            i = a - nfix
            Va = V[i]
            P = cols[b].conj().T @ Va  # v_j^H V
            Q = Va[:ma, :].conj()
            W = np.einsum("ij,jx,iy,xy->ijxy", T, P, Q, phi[i])
            K = np.einsum("py,ijxy,qx->ijpq", Va, W, Va.conj())
            jac[off : off + R, i * d * d : (i + 1) * d * d] += pack(
                K.reshape(R, d, d)
            )
        off += R
    return jac


def _polish(theta: np.ndarray, prob: _Problem):
    """Deterministic Gauss-Newton refinement of a descent endpoint."""
    res = scipy.optimize.least_squares(
        _residuals,
        theta,
        jac=_residual_jacobian,
        args=(prob,),
        method="trf",
        xtol=3e-16,
        ftol=3e-16,
        gtol=3e-16,
        max_nfev=500,
    )
    return float((res.fun**2).sum()), res.x, int(res.nfev)


def _optimize(prob: _Problem, theta0: np.ndarray, cfg: SearchConfig):
    """Gradient descent with backtracking (Armijo) line search, followed by a
    Gauss-Newton polish.

    Plain descent stalls far above the success threshold on these landscapes
    (flat directions near the minima), so once it plateaus the endpoint is
    handed to the polish, which converges to the local minimum proper.
    """
    theta = theta0
    c, g = _cost_grad(theta, prob)
    step = 1.0
    iters = 0
    stop_at = cfg.success_threshold * 1e-2
    history: list[float] = [c]
    for _ in range(cfg.max_iterations):
        gn2 = float(g @ g)
        if np.sqrt(gn2) < cfg.grad_tol or c < stop_at:
            break
        alpha = step
        for _ in range(_MAX_BACKTRACK):
            trial = theta - alpha * g
            ct = _cost_only(trial, prob)
            if ct <= c - _ARMIJO * alpha * gn2:
                break
            alpha *= 0.5
        else:
            break  # no admissible step at machine scale
        theta = trial
        c, g = _cost_grad(theta, prob)
        step = alpha * 2.0
        iters += 1
        history.append(c)
        if (
            cfg.polish
            and len(history) > _PLATEAU_WINDOW
            and history[-_PLATEAU_WINDOW - 1] - c
            < _PLATEAU_RELDROP * history[-_PLATEAU_WINDOW - 1]
        ):
            break  # crawling; hand over to the polish
    if cfg.polish and c > 1e-20:
        cp, thetap, nfev = _polish(theta, prob)
        if cp < c:
            c, theta = cp, thetap
        iters += nfev
    return c, theta, iters


def _initial_theta(seed: int, restart: int, n_params: int) -> np.ndarray:
    """Independent per-restart stream keyed on (seed, restart index)."""
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, restart]))
    return rng.normal(0.0, 1.0, size=n_params)


def _run_restart(args):
    prob, cfg, idx = args
    theta0 = _initial_theta(cfg.seed, idx, prob.n_params)
    return _optimize(prob, theta0, cfg)


def _configuration(prob: _Problem, theta: np.ndarray) -> MUConstellation:
    U, _, _, _ = _unitaries(theta, prob.d)
    bases = [make_basis(m, dim=prob.d, check=False) for m in prob.fixed]
    for i, m in enumerate(prob.free_cols):
        take = prob.d if prob.full_free[i] else m
        bases.append(make_basis(U[i][:, :take], dim=prob.d, check=False))
    return MUConstellation(prob.d, tuple(bases))


def _search(prob: _Problem, cfg: SearchConfig) -> SearchResult:
    start = time.monotonic()
    tasks = ((prob, cfg, i) for i in range(cfg.restarts))
    if cfg.workers <= 1:
        results = map(_run_restart, tasks)
        pool = None
    else:
        import multiprocessing as mp

        pool = mp.Pool(cfg.workers)
        results = pool.imap(_run_restart, tasks, chunksize=1)

    best = None  # (cost, theta, restart index)
    found_at = None
    total_iters = 0
    used = 0
    try:
        for i, (c, theta, iters) in enumerate(results):
            total_iters += iters
            used = i + 1
            if best is None or c < best[0]:
                best = (c, theta, i)
            if c < cfg.success_threshold:
                found_at = i
                break
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()

    assert best is not None
    return SearchResult(
        status="Found" if found_at is not None else "NotFound",
        best_defect=best[0],
        best_configuration=_configuration(prob, best[1]),
        found_at_restart=found_at,
        iterations_used=total_iters,
        restarts_used=used,
        elapsed=time.monotonic() - start,
    )


def search_constellation(
    signature: list[int], d: int, cfg: SearchConfig
) -> SearchResult:
    """Search for an MU constellation with the given set sizes.

    The first set is gauge-fixed to identity columns (the defect is invariant
    under a global unitary); each further set is optimized. Sizes follow the
    d-1 convention: a size of d-1 requests a full basis, whose last column is
    the forced completion and is included in the returned configuration.
    """
    if d < 2:
        raise DimensionTooSmall(f"need dimension >= 2, got {d}")
    sizes = list(signature)
    if len(sizes) < 2:
        raise BadSignature("need at least two sets")
    if any(not 1 <= x <= d - 1 for x in sizes):
        raise BadSignature(f"set sizes must lie in 1..{d - 1}: {sizes}")

    first = np.eye(d, dtype=complex)[:, : d if sizes[0] == d - 1 else sizes[0]]
    # cost uses only the stated d-1 columns; the d-th is the forced completion
    fixed = (first[:, : sizes[0]],)
    free = tuple(sizes[1:])
    nblocks = 1 + len(free)
    pairs = tuple(
        (a, b) for a in range(nblocks) for b in range(a + 1, nblocks)
    )
    prob = _Problem(
        d=d,
        fixed=fixed,
        free_cols=free,
        pairs=pairs,
        full_free=tuple(x == d - 1 for x in free),
    )
    res = _search(prob, cfg)
    if sizes[0] == d - 1:
        # report the gauge-fixed set as the full standard basis
        bases = (make_basis(np.eye(d, dtype=complex)),) + res.best_configuration.bases[1:]
        res = replace(
            res,
            best_configuration=MUConstellation(d, bases),
        )
    return res


def extend_search(
    fixed: list[Basis], k: int, orthonormal: bool, cfg: SearchConfig
) -> SearchResult:
    """Search for k unit vectors MU to every column of the fixed bases.

    With orthonormal=True the vectors are the leading k columns of one
    unitary; otherwise each is the first column of its own unitary, so unit
    norm is exact but no mutual constraint is imposed.
    """
    if not fixed:
        raise BadCount("need at least one fixed basis")
    d = fixed[0].dim
    if any(b.dim != d for b in fixed):
        raise DimensionMismatch("fixed bases have inconsistent dimensions")
    if not 1 <= k <= d - 1:
        raise BadCount(f"vector count must lie in 1..{d - 1}, got {k}")

    fixed_mats = tuple(np.asarray(b.matrix, dtype=complex) for b in fixed)
    nfix = len(fixed_mats)
    if orthonormal:
        free = (k,)
    else:
        free = (1,) * k
    pairs = tuple(
        (a, nfix + i) for a in range(nfix) for i in range(len(free))
    )
    prob = _Problem(
        d=d,
        fixed=fixed_mats,
        free_cols=free,
        pairs=pairs,
        full_free=(False,) * len(free),
    )
    res = _search(prob, cfg)
    if not orthonormal and k > 1:
        # collect the singleton blocks into one vector set for reporting
        C = res.best_configuration
        vecs = np.hstack([b.matrix for b in C.bases[nfix:]])
        bases = C.bases[:nfix] + (make_basis(vecs, dim=d, check=False),)
        res = replace(res, best_configuration=MUConstellation(d, bases))
    return res
