"""Dense convex QP solver: min 0.5 x'Hx + g'x  s.t.  Ax <= b.

Sized for tens of variables and ~100 rows. H must be strictly positive
definite (the retargeting assembly guarantees this through its regularization
weight; a zero weight is rejected upstream, and the factorization here rejects
anything else).

The method is an active-set scheme working from the dual side: start at the
unconstrained minimum, repeatedly add the most violated constraint, and take
the largest step that keeps the working-set multipliers nonnegative, dropping
blocking rows along the way. The Cholesky factor of H is computed once;
working-set systems are re-solved densely per change, which at these sizes is
cheaper and more predictable than incremental factor updates. Everything is
deterministic for identical input bits: ties in violation pick the lowest row
index, ties in blocking pick the first minimal index.

Warm starting seeds the working set from a hint (typically the previous
control step's active set), solves the equality-constrained subproblem, drops
negative-multiplier rows, and resumes the normal loop, so temporally coherent
instances re-solve in a handful of working-set changes.

Infeasibility is certified by a Farkas ray y >= 0 with A'y = 0 and b'y < 0.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

_SYM_TOL = 1e-12
# Terminate on violations below this (scaled); kept two decades under the
# certified 1e-8 residual so large multipliers cannot push the objective off
# the optimum by more than ~1e-8 * |dual|.
_FEAS_TOL = 1e-10
_DUAL_TOL = 1e-12
# Working-set changes allowed per solve, as a multiple of (n + m).
_ITERATION_FACTOR = 10


class QpError(RuntimeError):
    """Structural solver failure (non-positive-definite Hessian)."""


class QpStatus(enum.Enum):
    SOLVED = "solved"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True, eq=False)
class QpProblem:
    """One dense instance. ``A``/``b`` may be empty (unconstrained)."""

    H: np.ndarray
    g: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        g = np.asarray(self.g, dtype=float)
        n = g.shape[0]
        A = np.zeros((0, n)) if self.A is None else np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=float).reshape(-1)
        if H.shape != (n, n):
            raise ValueError(f"H has shape {H.shape}, expected ({n}, {n})")
        if A.shape[1] != n or b.shape[0] != A.shape[0]:
            raise ValueError(
                f"constraint shapes A {A.shape}, b {b.shape} inconsistent with n={n}"
            )
        sym = np.max(np.abs(H - H.T)) if n else 0.0
        if sym > _SYM_TOL * max(1.0, float(np.max(np.abs(H))) if n else 1.0):
            raise ValueError(f"H is not symmetric (max asymmetry {sym:.3e})")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[0]

    def to_json(self) -> str:
        """Debug dump for offline reproduction (row-major lists)."""
        return json.dumps(
            {
                "H": self.H.tolist(),
                "g": self.g.tolist(),
                "A": self.A.tolist(),
                "b": self.b.tolist(),
            }
        )

    @staticmethod
    def from_json(text: str) -> "QpProblem":
        doc = json.loads(text)
        return QpProblem(
            H=np.array(doc["H"], dtype=float),
            g=np.array(doc["g"], dtype=float),
            A=np.array(doc["A"], dtype=float).reshape(len(doc["b"]), -1)
            if doc["b"]
            else None,
            b=np.array(doc["b"], dtype=float) if doc["b"] else None,
        )


@dataclass(frozen=True, eq=False)
class QpSolution:
    """Certified solver output.

    When ``status`` is SOLVED, ``kkt_residual`` bounds the worst of
    stationarity, primal feasibility, and complementary slackness, each
    normalized by the problem magnitude (1 + max of |g| and |b| norms).
    ``certificate`` carries the Farkas ray for INFEASIBLE instances.
    """

    x: np.ndarray
    active_set: tuple[int, ...]
    dual: np.ndarray
    kkt_residual: float
    iterations: int
    status: QpStatus
    certificate: np.ndarray | None = field(default=None)


def _lower_cholesky(H: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(H)
    except np.linalg.LinAlgError as e:
        raise QpError("Hessian is not positive definite") from e


def _h_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    y = scipy.linalg.solve_triangular(L, rhs, lower=True)
    return scipy.linalg.solve_triangular(L.T, y, lower=False)


def _independent_subset(L: np.ndarray, A: np.ndarray, rows: list[int]) -> list[int]:
    """Maximal subset of ``rows`` whose normals are independent in the H metric."""
    if not rows:
        return []
    cols = scipy.linalg.solve_triangular(L, A[rows].T, lower=True)
    _, r, piv = scipy.linalg.qr(cols, mode="economic", pivoting=True)
    diag = np.abs(np.diag(np.atleast_2d(r)))
    if diag.size == 0 or diag[0] == 0.0:
        return []
    rank = int(np.sum(diag > diag[0] * max(cols.shape) * np.finfo(float).eps))
    return sorted(rows[piv[i]] for i in range(min(rank, len(rows))))


def _kkt_residual(p: QpProblem, x: np.ndarray, dual: np.ndarray) -> float:
    scale = 1.0 + max(
        float(np.max(np.abs(p.g))) if p.n else 0.0,
        float(np.max(np.abs(p.b))) if p.m else 0.0,
    )
    stat = float(np.max(np.abs(p.H @ x + p.g + p.A.T @ dual))) if p.n else 0.0
    if p.m:
        slack = p.A @ x - p.b
        feas = float(max(np.max(slack), 0.0))
        comp = float(np.max(np.abs(dual * slack)))
    else:
        feas = comp = 0.0
    return max(stat, feas, comp) / scale


def solve(p: QpProblem) -> QpSolution:
    """KKT-certified minimizer; deterministic for identical input bits."""
    return _active_set_solve(p, hint=())


def warm_start_solve(p: QpProblem, hint) -> QpSolution:
    """Same contract as :func:`solve`; only the iteration path may differ."""
    hint = tuple(int(i) for i in hint)
    for i in hint:
        if not 0 <= i < p.m:
            raise IndexError(f"hint index {i} out of range for m={p.m}")
    return _active_set_solve(p, hint=hint)


def _active_set_solve(p: QpProblem, hint: tuple[int, ...]) -> QpSolution:
    n, m = p.n, p.m
    L = _lower_cholesky(p.H)
    x = _h_solve(L, -p.g)
    feas_tol = _FEAS_TOL * (1.0 + (float(np.max(np.abs(p.b))) if m else 0.0))
    limit = _ITERATION_FACTOR * (n + m)

    work: list[int] = []
    u: list[float] = []
    iterations = 0

    if hint:
        work = _independent_subset(L, p.A, sorted(set(hint)))
        while work:
            iterations += 1
            k_mat = _h_solve(L, p.A[work].T)
            s_mat = p.A[work] @ k_mat
            x_free = _h_solve(L, -p.g)
            try:
                u_vec = np.linalg.solve(s_mat, p.A[work] @ x_free - p.b[work])
            except np.linalg.LinAlgError:
                work = _independent_subset(L, p.A, work[:-1])
                continue
            if np.all(u_vec >= -_DUAL_TOL):
                x = x_free - k_mat @ np.maximum(u_vec, 0.0)
                u = list(np.maximum(u_vec, 0.0))
                break
            work.pop(int(np.argmin(u_vec)))
        if not work:
            x = _h_solve(L, -p.g)
            u = []

    def finish(status: QpStatus, certificate=None) -> QpSolution:
        dual = np.zeros(m)
        for idx, wi in enumerate(work):
            dual[wi] = max(u[idx], 0.0)
        return QpSolution(
            x=x.copy(),
            active_set=tuple(sorted(work)),
            dual=dual,
            kkt_residual=_kkt_residual(p, x, dual),
            iterations=iterations,
            status=status,
            certificate=certificate,
        )

    if m == 0:
        return finish(QpStatus.SOLVED)

    while True:
        violation = p.A @ x - p.b
        pick = int(np.argmax(violation))
        if violation[pick] <= feas_tol:
            return finish(QpStatus.SOLVED)

        u_new = 0.0
        while True:
            iterations += 1
            if iterations > limit:
                return finish(QpStatus.ITERATION_LIMIT)
            a_p = p.A[pick]
            hinv_ap = _h_solve(L, a_p)
            if work:
                k_mat = _h_solve(L, p.A[work].T)
                s_mat = p.A[work] @ k_mat
                r = np.linalg.solve(s_mat, p.A[work] @ hinv_ap)
                z = hinv_ap - k_mat @ r
            else:
                r = np.zeros(0)
                z = hinv_ap
            apz = float(a_p @ z)
            slack_p = float(a_p @ x - p.b[pick])
            degenerate_dir = apz <= 1e-14 * max(1.0, float(a_p @ hinv_ap))

            t_full = np.inf if degenerate_dir else slack_p / apz
            t_block, blocker = np.inf, -1
            for idx in range(len(work)):
                if r[idx] > _DUAL_TOL:
                    cand = u[idx] / r[idx]
                    if cand < t_block:
                        t_block, blocker = cand, idx

            if not np.isfinite(t_full) and not np.isfinite(t_block):
                # a_p lies in the span of the working normals with no
                # multiplier able to give way: Farkas ray certifies Ax <= b
                # has no solution.
                ray = np.zeros(m)
                ray[pick] = 1.0
                for idx, wi in enumerate(work):
                    ray[wi] -= r[idx]
                ray[ray < 0.0] = 0.0  # clip -0.0 / roundoff
                return finish(QpStatus.INFEASIBLE, certificate=ray)

            step = min(t_full, t_block)
            x = x - step * z
            for idx in range(len(work)):
                u[idx] -= step * r[idx]
            u_new += step

            if t_full <= t_block:
                work.append(pick)
                u.append(u_new)
                break
            work.pop(blocker)
            u.pop(blocker)
