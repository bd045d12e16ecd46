"""Dense convex QP backends for

    min 1/2 x'Hx + f'x   s.t.   C x <= b

ActiveSetSolver is a dual active-set method (Goldfarb-Idnani): it starts from
the unconstrained minimiser and repeatedly adds the most violated constraint,
dropping active constraints whose multipliers would turn negative. It needs a
positive definite H, is exact up to round-off on small problems and reports
infeasibility when no dual step can restore a violated row.

OsqpSolver wraps the OSQP operator-splitting solver and accepts a warm start.
"""

import logging
import math
from typing import Optional, Protocol

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.linalg import cholesky, solve_triangular

from app.models.control import QpBackendName, QpResult, SolveStatus

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


class QpBackend(Protocol):
    def solve(
        self,
        H: FloatArray,
        f: FloatArray,
        C: FloatArray,
        b: FloatArray,
        *,
        tol: float,
        max_iter: int,
        x0: Optional[FloatArray] = None,
    ) -> QpResult: ...


def _objective(H: FloatArray, f: FloatArray, x: FloatArray) -> float:
    return float(0.5 * x @ H @ x + f @ x)


class ActiveSetSolver:
    """Dual active-set QP solver on a Cholesky factor of H."""

    def solve(
        self,
        H: FloatArray,
        f: FloatArray,
        C: FloatArray,
        b: FloatArray,
        *,
        tol: float = 1e-6,
        max_iter: int = 4000,
        x0: Optional[FloatArray] = None,
    ) -> QpResult:
        # x0 is ignored: a dual method always starts from the unconstrained optimum
        H = 0.5 * (np.asarray(H, dtype=float) + np.asarray(H, dtype=float).T)
        f = np.asarray(f, dtype=float)
        n = f.shape[0]
        C = np.asarray(C, dtype=float).reshape(-1, n)
        b = np.asarray(b, dtype=float).reshape(-1)
        m = C.shape[0]

        L = self._factor(H)
        # J J' = H^-1; columns q: span the null space of the active normals
        J = solve_triangular(L, np.eye(n), lower=True).T
        R = np.zeros((0, 0))
        active: list[int] = []
        u = np.zeros(0)

        x = -J @ (J.T @ f)
        iterations = 0
        eps = 1e-14

        while m:
            slack = b - C @ x
            p = int(np.argmin(slack))
            if slack[p] >= -tol:
                break
            n_plus = -C[p]
            s_p = float(slack[p])
            u_plus = 0.0

            while True:
                iterations += 1
                if iterations > max_iter:
                    logger.warning("Active-set QP stopped at max_iter=%d", max_iter)
                    return self._result(H, f, x, iterations - 1, SolveStatus.MAX_ITER, m, active, u)
                q = len(active)
                d = J.T @ n_plus
                z = J[:, q:] @ d[q:]
                r = solve_triangular(R, d[:q], lower=False) if q else np.zeros(0)

                # largest dual step keeping active multipliers nonnegative
                t1, drop = math.inf, -1
                for k in range(q):
                    if r[k] > eps and u[k] / r[k] < t1:
                        t1, drop = u[k] / r[k], k

                # full primal step onto constraint p
                t2 = math.inf
                if np.linalg.norm(d[q:]) > 1e-12 * max(1.0, np.linalg.norm(d)):
                    zn = float(z @ n_plus)
                    if zn > 0.0:
                        t2 = max(-s_p / zn, 0.0)

                t = min(t1, t2)
                if math.isinf(t):
                    return self._result(H, f, x, iterations, SolveStatus.INFEASIBLE, m, active, u)

                if math.isinf(t2):
                    # dual-only step: free the blocking constraint and retry
                    u = u - t * r
                    u_plus += t
                    J, R, active, u = self._drop(J, R, active, u, drop)
                    continue

                x = x + t * z
                u = u - t * r
                u_plus += t
                if t2 <= t1:
                    J, R = self._add(J, R, d, q)
                    active.append(p)
                    u = np.append(u, u_plus)
                    break
                J, R, active, u = self._drop(J, R, active, u, drop)
                s_p = float(b[p] - C[p] @ x)

        return self._result(H, f, x, iterations, SolveStatus.SOLVED, m, active, u)

    @staticmethod
    def _factor(H: FloatArray) -> FloatArray:
        try:
            return cholesky(H, lower=True)
        except np.linalg.LinAlgError:
            shift = 1e-9 * max(1.0, float(np.max(np.abs(np.diag(H)))))
            logger.warning("QP Hessian not positive definite; regularising by %.1e", shift)
            return cholesky(H + shift * np.eye(H.shape[0]), lower=True)

    @staticmethod
    def _add(J: FloatArray, R: FloatArray, d: FloatArray, q: int) -> tuple[FloatArray, FloatArray]:
        """Householder-rotate J[:, q:] so the new normal lands in column q only."""
        v = d[q:].copy()
        norm_v = np.linalg.norm(v)
        alpha = -math.copysign(norm_v, v[0]) if v[0] != 0.0 else -norm_v
        v[0] -= alpha
        v_norm = np.linalg.norm(v)
        if v_norm > 0.0:
            v /= v_norm
            Jq = J[:, q:]
            J[:, q:] = Jq - 2.0 * np.outer(Jq @ v, v)
        grown = np.zeros((q + 1, q + 1))
        grown[:q, :q] = R
        grown[:q, q] = d[:q]
        grown[q, q] = alpha
        return J, grown

    @staticmethod
    def _drop(
        J: FloatArray,
        R: FloatArray,
        active: list[int],
        u: FloatArray,
        pos: int,
    ) -> tuple[FloatArray, FloatArray, list[int], FloatArray]:
        """Remove active constraint `pos` and restore R to upper-triangular with Givens rotations."""
        q = R.shape[0]
        R = np.delete(R, pos, axis=1)
        for j in range(pos, q - 1):
            a, c_ = R[j, j], R[j + 1, j]
            h = math.hypot(a, c_)
            if h == 0.0:
                continue
            c, s = a / h, c_ / h
            rj, rj1 = R[j].copy(), R[j + 1].copy()
            R[j] = c * rj + s * rj1
            R[j + 1] = -s * rj + c * rj1
            Jj, Jj1 = J[:, j].copy(), J[:, j + 1].copy()
            J[:, j] = c * Jj + s * Jj1
            J[:, j + 1] = -s * Jj + c * Jj1
        active = active[:pos] + active[pos + 1 :]
        return J, R[: q - 1, :], active, np.delete(u, pos)

    @staticmethod
    def _result(
        H: FloatArray,
        f: FloatArray,
        x: FloatArray,
        iterations: int,
        status: SolveStatus,
        m: int,
        active: list[int],
        u: FloatArray,
    ) -> QpResult:
        multipliers = np.zeros(m)
        if active:
            multipliers[active] = u
        return QpResult(
            x=x,
            objective=_objective(H, f, x),
            iterations=iterations,
            status=status,
            multipliers=multipliers,
        )


class OsqpSolver:
    """OSQP backend (l <= Cx <= u with l = -inf)."""

    def solve(
        self,
        H: FloatArray,
        f: FloatArray,
        C: FloatArray,
        b: FloatArray,
        *,
        tol: float = 1e-6,
        max_iter: int = 4000,
        x0: Optional[FloatArray] = None,
    ) -> QpResult:
        import osqp

        H = 0.5 * (np.asarray(H, dtype=float) + np.asarray(H, dtype=float).T)
        f = np.asarray(f, dtype=float)
        n = f.shape[0]
        C = np.asarray(C, dtype=float).reshape(-1, n)
        b = np.asarray(b, dtype=float).reshape(-1)

        solver = osqp.OSQP()
        solver.setup(
            P=sparse.triu(sparse.csc_matrix(H), format="csc"),
            q=f,
            A=sparse.csc_matrix(C),
            l=-np.inf * np.ones(b.shape[0]),
            u=b,
            eps_abs=tol,
            eps_rel=tol,
            max_iter=max_iter,
            polish=True,
            verbose=False,
        )
        if x0 is not None:
            solver.warm_start(x=np.asarray(x0, dtype=float))
        res = solver.solve()

        status = self._status(str(res.info.status))
        x = np.asarray(res.x, dtype=float) if res.x is not None else np.zeros(n)
        if not np.all(np.isfinite(x)):
            x = np.zeros(n)
        y = np.asarray(res.y, dtype=float) if res.y is not None else np.zeros(b.shape[0])
        return QpResult(
            x=x,
            objective=_objective(H, f, x),
            iterations=int(res.info.iter),
            status=status,
            multipliers=np.where(np.isfinite(y), np.maximum(y, 0.0), 0.0),
        )

    @staticmethod
    def _status(text: str) -> SolveStatus:
        text = text.lower()
        if "infeasible" in text:
            return SolveStatus.INFEASIBLE
        if text.startswith("solved"):
            if "inaccurate" in text:
                logger.warning("OSQP returned '%s'", text)
            return SolveStatus.SOLVED
        return SolveStatus.MAX_ITER


BACKENDS = {
    QpBackendName.ACTIVE_SET: ActiveSetSolver,
    QpBackendName.OSQP: OsqpSolver,
}


def get_backend(name: QpBackendName | str) -> QpBackend:
    return BACKENDS[QpBackendName(name)]()
