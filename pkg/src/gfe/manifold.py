"""Embedded manifolds: flat space, unit spheres, and the rotation group SO(3).

Points and tangent vectors are plain numpy arrays in embedding coordinates:
vectors of length ``k`` for ``Euclidean(k)``, unit vectors of length ``n+1``
for ``Sphere(n)``, and orthogonal 3x3 matrices with determinant +1 for
``Rotation3``.  Tangent vectors carry the inner product of the flattened
embedding (the Frobenius inner product for rotations), so ``Rotation3``
distances come out as ``sqrt(2)`` times the rotation angle.

Besides the metric operations (``dist``, ``exp``, ``log``, parallel
``transport``) each manifold provides

- a deterministic orthonormal ``tangent_basis`` used to express all
  matrix-valued derivative data in reproducible coordinates,
- the two second-derivative blocks of squared distance,
  ``dist2_hess_q`` and ``dist2_mixed``, that drive the implicit derivative
  systems of the interpolation modules,
- a closest-point projection ``project_point`` with its Jacobian
  ``projection_jacobian`` (normalization for spheres, the polar
  decomposition for rotations, the identity for flat space).

All three geometries have constant sectional curvature, so the
second-derivative blocks are evaluated from the closed forms of a constant
curvature model: at distance r, the Hessian of ``q -> dist(v, q)**2`` has
radial eigenvalue 2 and eigenvalue ``2*rho*cot(rho)`` on the orthogonal
complement, and the mixed block maps a perturbation ``w`` of ``v`` to

    2*<w, u_v>*u_q - 2*(rho/sin(rho)) * Pt(w - <w, u_v>*u_v),

where ``rho = sqrt(K)*r``, ``u_v = log_v(q)/r``, ``u_q = log_q(v)/r`` and
``Pt`` is parallel transport from v to q.  All operations are pure functions
of their inputs; values are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CutLocusError,
    DimensionMismatchError,
    NonConvergenceError,
    ProjectionUndefinedError,
    SingularMatrixError,
)

_CUT_TOL = 1e-8       # distance-to-cut-locus slack before log refuses
_SERIES_CUTOFF = 1e-4  # switch to Taylor series below this angle


def _sinc(t: float) -> float:
    """sin(t)/t with a series branch near zero."""
    if abs(t) < _SERIES_CUTOFF:
        t2 = t * t
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    return np.sin(t) / t


def _one_minus_cos_over_sq(t: float) -> float:
    """(1 - cos(t))/t**2 with a series branch near zero."""
    if abs(t) < _SERIES_CUTOFF:
        t2 = t * t
        return 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    return (1.0 - np.cos(t)) / (t * t)


def _t_over_sin(t: float) -> float:
    """t/sin(t) with a series branch near zero."""
    if abs(t) < _SERIES_CUTOFF:
        t2 = t * t
        return 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    return t / np.sin(t)


def _t_cot(t: float) -> float:
    """t*cot(t) with a series branch near zero."""
    if abs(t) < _SERIES_CUTOFF:
        t2 = t * t
        return 1.0 - t2 / 3.0 - t2 * t2 / 45.0
    return t * np.cos(t) / np.sin(t)


class Manifold:
    """Shared interface and the constant-curvature derivative blocks.

    Concrete subclasses set ``kind``, ``intrinsic_dim``, ``point_shape``,
    the advisory ``curvature_bound`` entering the Karcher-ball diagnostic,
    and ``_model_curvature``, the actual constant sectional curvature used
    by the closed-form second derivatives of squared distance.
    """

    kind: str
    intrinsic_dim: int
    point_shape: tuple
    curvature_bound: float | None
    _model_curvature: float

    # ------------------------------------------------------------------
    # basic helpers

    @property
    def embed_dim(self) -> int:
        return int(np.prod(self.point_shape))

    @property
    def injectivity_radius(self) -> float:
        raise NotImplementedError

    def _check_pair(self, p, q) -> None:
        if np.shape(p) != self.point_shape or np.shape(q) != self.point_shape:
            raise DimensionMismatchError(
                f"expected two points of shape {self.point_shape} on {self.kind}, "
                f"got {np.shape(p)} and {np.shape(q)}"
            )

    def check_point(self, p) -> None:
        raise NotImplementedError

    def check_tangent(self, p, v) -> None:
        raise NotImplementedError

    def project_tangent(self, p, w) -> np.ndarray:
        """Orthogonal projection of an embedding vector onto T_p M."""
        raise NotImplementedError

    # ------------------------------------------------------------------
    # metric operations

    def dist(self, p, q) -> float:
        raise NotImplementedError

    def exp(self, p, v) -> np.ndarray:
        raise NotImplementedError

    def log(self, p, q) -> np.ndarray:
        raise NotImplementedError

    def transport(self, p, q, w) -> np.ndarray:
        """Parallel transport of w in T_p M to T_q M along the connecting geodesic."""
        raise NotImplementedError

    # ------------------------------------------------------------------
    # projections (overridden where a projection exists)

    def project_point(self, w) -> np.ndarray:
        raise NotImplementedError

    def projection_jacobian(self, w) -> np.ndarray:
        raise NotImplementedError

    # ------------------------------------------------------------------
    # deterministic tangent basis

    def tangent_basis(self, p) -> np.ndarray:
        """Deterministic orthonormal basis of T_p M, shape (dim, *point_shape).

        Gram-Schmidt over the canonical embedding directions projected onto
        the tangent space, in fixed index order; candidates with projected
        norm below 1e-8 are skipped.  The same point always yields the
        bitwise-identical basis.
        """
        p = np.asarray(p, dtype=float)
        basis: list[np.ndarray] = []
        for k in range(self.embed_dim):
            cand = np.zeros(self.embed_dim)
            cand[k] = 1.0
            w = self.project_tangent(p, cand.reshape(self.point_shape))
            for b in basis:
                w = w - np.vdot(b, w) * b
            nrm = float(np.linalg.norm(w))
            if nrm < 1e-8:
                continue
            w = w / nrm
            # second pass kills the cancellation debris left by a barely
            # accepted candidate; drop it if debris was most of its mass
            w = self.project_tangent(p, w)
            for b in basis:
                w = w - np.vdot(b, w) * b
            nrm = float(np.linalg.norm(w))
            if nrm < 0.5:
                continue
            basis.append(w / nrm)
            if len(basis) == self.intrinsic_dim:
                break
        if len(basis) != self.intrinsic_dim:
            raise RuntimeError(f"could not build a tangent basis on {self.kind}")
        return np.array(basis)

    # ------------------------------------------------------------------
    # second-derivative blocks of squared distance

    def dist2_hess_q(self, v, q) -> np.ndarray:
        """Hessian of q -> dist(v, q)**2 in the tangent_basis(q) coordinates.

        Symmetric (dim x dim); equals 2*I at v = q.  Requires q within the
        injectivity radius of v (raises CutLocusError otherwise).
        """
        self._check_pair(v, q)
        dim = self.intrinsic_dim
        r = self.dist(v, q)
        if r < 1e-15:
            return 2.0 * np.eye(dim)
        u = self.log(q, v) / r
        E = self.tangent_basis(q).reshape(dim, -1)
        c = E @ u.reshape(-1)
        kappa = self._model_curvature
        a = _t_cot(np.sqrt(kappa) * r) if kappa > 0.0 else 1.0
        return 2.0 * (a * np.eye(dim) + (1.0 - a) * np.outer(c, c))

    def dist2_mixed(self, v, q) -> np.ndarray:
        """Mixed second derivative of dist(v, q)**2, d/dv of the q-gradient.

        Returned as a (dim x dim) matrix mapping tangent_basis(v)
        coefficients of a perturbation of v to tangent_basis(q) coefficients
        of the change in the q-gradient.  Equals -2*I at v = q.
        """
        self._check_pair(v, q)
        dim = self.intrinsic_dim
        r = self.dist(v, q)
        if r < 1e-15:
            return -2.0 * np.eye(dim)
        Bv = self.tangent_basis(v)
        Eq = self.tangent_basis(q).reshape(dim, -1)
        u_v = self.log(v, q) / r
        u_q = self.log(q, v) / r
        kappa = self._model_curvature
        a = _t_over_sin(np.sqrt(kappa) * r) if kappa > 0.0 else 1.0
        M = np.empty((dim, dim))
        for j in range(dim):
            b = Bv[j]
            rad = float(np.vdot(b, u_v))
            perp = b - rad * u_v
            vec = 2.0 * rad * u_q - 2.0 * a * self.transport(v, q, perp)
            M[:, j] = Eq @ vec.reshape(-1)
        return M


# ----------------------------------------------------------------------
# tangent vectors


@dataclass(frozen=True, eq=False)
class TangentVector:
    """An embedded tangent vector anchored at a point of a manifold.

    The constructor validates both the base point and tangency of ``vec``
    at ``base`` (orthogonality for spheres, skewness of Q^T W for
    rotations).
    """

    manifold: Manifold
    base: np.ndarray
    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.array(self.base, dtype=float))
        object.__setattr__(self, "vec", np.array(self.vec, dtype=float))
        self.manifold.check_point(self.base)
        self.manifold.check_tangent(self.base, self.vec)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


# ----------------------------------------------------------------------
# flat space


@dataclass(frozen=True)
class Euclidean(Manifold):
    """R^k with the usual inner product; exp/log are addition/subtraction.

    Carried along so that every construction in the package can be
    regression-checked against classical Lagrange finite elements.
    """

    k: int

    kind = "euclidean"
    curvature_bound: float | None = None
    _model_curvature = 0.0

    @property
    def intrinsic_dim(self) -> int:
        return self.k

    @property
    def point_shape(self) -> tuple:
        return (self.k,)

    @property
    def injectivity_radius(self) -> float:
        return np.inf

    def check_point(self, p) -> None:
        if np.shape(p) != (self.k,):
            raise DimensionMismatchError(f"expected a vector of length {self.k}")

    def check_tangent(self, p, v) -> None:
        if np.shape(v) != (self.k,):
            raise DimensionMismatchError(f"expected a vector of length {self.k}")

    def project_tangent(self, p, w):
        return np.asarray(w, dtype=float).copy()

    def dist(self, p, q) -> float:
        self._check_pair(p, q)
        return float(np.linalg.norm(np.subtract(q, p)))

    def exp(self, p, v):
        return np.add(p, v, dtype=float)

    def log(self, p, q):
        self._check_pair(p, q)
        return np.subtract(q, p, dtype=float)

    def transport(self, p, q, w):
        return np.asarray(w, dtype=float).copy()

    def project_point(self, w):
        return np.asarray(w, dtype=float).reshape(self.k).copy()

    def projection_jacobian(self, w):
        return np.eye(self.k)


# ----------------------------------------------------------------------
# spheres


@dataclass(frozen=True)
class Sphere(Manifold):
    """The unit n-sphere embedded in R^{n+1}.

    Geodesics are great circles; dist(p, q) = arccos(<p, q>).  The
    closest-point projection is w -> w/|w| with Jacobian
    I/|w| - w w^T/|w|^3.
    """

    n: int

    kind = "sphere"
    curvature_bound: float | None = 1.0
    _model_curvature = 1.0

    @property
    def intrinsic_dim(self) -> int:
        return self.n

    @property
    def point_shape(self) -> tuple:
        return (self.n + 1,)

    @property
    def injectivity_radius(self) -> float:
        return np.pi

    def check_point(self, p) -> None:
        p = np.asarray(p)
        if p.shape != (self.n + 1,):
            raise DimensionMismatchError(f"expected a vector of length {self.n + 1}")
        if abs(np.linalg.norm(p) - 1.0) > 1e-12:
            raise ValueError(f"sphere point is not unit length: |p| = {np.linalg.norm(p)!r}")

    def check_tangent(self, p, v) -> None:
        v = np.asarray(v)
        if v.shape != (self.n + 1,):
            raise DimensionMismatchError(f"expected a vector of length {self.n + 1}")
        # scale-aware so that representation dust on large vectors passes
        if abs(float(np.dot(p, v))) > 1e-10 * max(1.0, float(np.linalg.norm(v))):
            raise ValueError("vector is not tangent to the sphere at its base point")

    def project_tangent(self, p, w):
        w = np.asarray(w, dtype=float)
        return w - float(np.dot(p, w)) * np.asarray(p, dtype=float)

    def dist(self, p, q) -> float:
        self._check_pair(p, q)
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if np.array_equal(p, q):
            return 0.0
        c = float(np.dot(p, q))
        # atan2 of (sin, cos) stays well conditioned at all angles, unlike
        # arccos, which loses ~eps/theta accuracy near aligned points
        s = float(np.linalg.norm(q - c * p))
        return float(np.arctan2(s, c))

    def exp(self, p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        theta = float(np.linalg.norm(v))
        q = np.cos(theta) * p + _sinc(theta) * v
        return q / np.linalg.norm(q)

    def log(self, p, q):
        self._check_pair(p, q)
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        c = float(np.dot(p, q))
        u = q - c * p
        nrm = float(np.linalg.norm(u))
        theta = float(np.arctan2(nrm, c))
        if theta > np.pi - _CUT_TOL:
            raise CutLocusError(f"points at distance {theta:.6f} are (numerically) antipodal")
        if nrm < 1e-14:
            return np.zeros_like(p)
        return (theta / nrm) * u

    def transport(self, p, q, w):
        r = self.dist(p, q)
        if r < 1e-15:
            return np.asarray(w, dtype=float).copy()
        u_p = self.log(p, q) / r
        u_q = self.log(q, p) / r
        a = float(np.vdot(w, u_p))
        return np.asarray(w, dtype=float) - a * u_p - a * u_q

    def project_point(self, w):
        w = np.asarray(w, dtype=float).reshape(self.n + 1)
        nrm = float(np.linalg.norm(w))
        if nrm <= 1e-12:
            raise ProjectionUndefinedError(
                f"projection undefined: weighted embedding sum has norm {nrm:.3e}"
            )
        return w / nrm

    def projection_jacobian(self, w):
        w = np.asarray(w, dtype=float).reshape(self.n + 1)
        nrm = float(np.linalg.norm(w))
        if nrm <= 1e-12:
            raise ProjectionUndefinedError(
                f"projection undefined: weighted embedding sum has norm {nrm:.3e}"
            )
        return np.eye(self.n + 1) / nrm - np.outer(w, w) / nrm**3


# ----------------------------------------------------------------------
# SO(3)


def _hat(w: np.ndarray) -> np.ndarray:
    """Skew matrix with _hat(w) @ x = w x x (cross product)."""
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def _vee(S: np.ndarray) -> np.ndarray:
    """Inverse of _hat on skew matrices."""
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def _skew_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M - M.T)


def _expm_skew(S: np.ndarray) -> np.ndarray:
    """Matrix exponential of a 3x3 skew matrix (Rodrigues form)."""
    theta = float(np.linalg.norm(_vee(S)))
    return np.eye(3) + _sinc(theta) * S + _one_minus_cos_over_sq(theta) * (S @ S)


def _rotation_angle(R: np.ndarray) -> float:
    """Rotation angle in [0, pi], via atan2 for uniform conditioning."""
    A = _skew_part(R)
    s = float(np.linalg.norm(_vee(A)))
    c = (float(np.trace(R)) - 1.0) / 2.0
    return float(np.arctan2(s, c))


def _logm_rotation(R: np.ndarray) -> np.ndarray:
    """Principal matrix logarithm of a rotation; skew 3x3 result.

    Raises CutLocusError within _CUT_TOL of a half-turn, where the
    logarithm branches.
    """
    A = _skew_part(R)
    s = float(np.linalg.norm(_vee(A)))
    c = (float(np.trace(R)) - 1.0) / 2.0
    theta = float(np.arctan2(s, c))
    if theta > np.pi - _CUT_TOL:
        raise CutLocusError(f"rotation angle {theta:.6f} is (numerically) at the half-turn")
    if theta < _SERIES_CUTOFF:
        t2 = theta * theta
        factor = 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    else:
        factor = theta / s
    return factor * A


def _polar_iterates(A: np.ndarray, tol: float = 1e-13, max_iter: int = 50):
    """Run Q <- (Q + Q^-T)/2 from Q = A; return (iterates, residuals).

    ``iterates[0]`` is A itself, ``iterates[k]`` the k-th update;
    ``residuals[k-1]`` is the Frobenius norm of iterates[k]-iterates[k-1].
    """
    Q = np.asarray(A, dtype=float).reshape(3, 3).copy()
    iterates = [Q]
    residuals: list[float] = []
    for _ in range(max_iter):
        try:
            Qn = 0.5 * (Q + np.linalg.inv(Q).T)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError("polar iterate became singular") from exc
        res = float(np.linalg.norm(Qn - Q))
        iterates.append(Qn)
        residuals.append(res)
        Q = Qn
        if res <= tol:
            return iterates, residuals
    raise NonConvergenceError(f"polar iteration did not converge in {max_iter} steps")


def polar_decompose(A: np.ndarray):
    """Orthogonal polar factor of a 3x3 matrix with positive determinant.

    Returns ``(Q, iterations)`` where Q is the closest rotation to A in the
    Frobenius norm and ``iterations`` counts the update steps performed.
    Q^T A is symmetric positive definite for valid input.
    """
    A = np.asarray(A, dtype=float).reshape(3, 3)
    det = float(np.linalg.det(A))
    if abs(det) < 1e-12:
        raise SingularMatrixError(f"matrix is numerically singular (det = {det:.3e})")
    if det < 0.0:
        raise SingularMatrixError(f"polar factor is not a rotation for det = {det:.3e} < 0")
    iterates, residuals = _polar_iterates(A)
    return iterates[-1], len(residuals)


@dataclass(frozen=True)
class Rotation3(Manifold):
    """SO(3) as 3x3 matrices, bi-invariant metric from the Frobenius product.

    With this scaling dist(Q1, Q2) = |log(Q1^T Q2)|_F = sqrt(2) * angle.
    Geodesics are one-parameter subgroups, evaluated through Rodrigues
    closed forms with series fallbacks near the identity.  The closest-point
    projection is the polar decomposition, computed by the quadratically
    convergent iteration Q <- (Q + Q^-T)/2; its Jacobian is obtained by
    forward-mode differentiation of the same iteration, truncated at the
    primal's iteration count.
    """

    kind = "rotation3"
    intrinsic_dim = 3
    point_shape = (3, 3)
    # Advisory Karcher-ball constant.  The Frobenius-scaled sectional
    # curvature is 1/8, so a bound of 1/4 keeps the ball-radius diagnostic
    # conservative.
    curvature_bound: float | None = 0.25
    _model_curvature = 0.125

    @property
    def injectivity_radius(self) -> float:
        return np.sqrt(2.0) * np.pi

    def check_point(self, p) -> None:
        Q = np.asarray(p)
        if Q.shape != (3, 3):
            raise DimensionMismatchError("expected a 3x3 matrix")
        if np.linalg.norm(Q.T @ Q - np.eye(3)) > 1e-10:
            raise ValueError("matrix is not orthogonal within 1e-10")
        if np.linalg.det(Q) <= 0.0:
            raise ValueError("matrix has non-positive determinant")

    def check_tangent(self, p, v) -> None:
        v = np.asarray(v)
        if v.shape != (3, 3):
            raise DimensionMismatchError("expected a 3x3 matrix")
        S = np.asarray(p).T @ v
        if np.linalg.norm(S + S.T) > 1e-10 * max(1.0, float(np.linalg.norm(v))):
            raise ValueError("vector is not tangent at its base rotation (Q^T W not skew)")

    def project_tangent(self, p, w):
        Q = np.asarray(p, dtype=float)
        return Q @ _skew_part(Q.T @ np.asarray(w, dtype=float))

    def dist(self, p, q) -> float:
        self._check_pair(p, q)
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if np.array_equal(p, q):
            return 0.0
        return float(np.sqrt(2.0) * _rotation_angle(p.T @ q))

    def exp(self, p, v):
        Q = np.asarray(p, dtype=float)
        S = _skew_part(Q.T @ np.asarray(v, dtype=float))
        return Q @ _expm_skew(S)

    def log(self, p, q):
        self._check_pair(p, q)
        Q1 = np.asarray(p, dtype=float)
        return Q1 @ _logm_rotation(Q1.T @ np.asarray(q, dtype=float))

    def transport(self, p, q, w):
        Q1 = np.asarray(p, dtype=float)
        S = _logm_rotation(Q1.T @ np.asarray(q, dtype=float))
        E = _expm_skew(0.5 * S)
        Om = _skew_part(Q1.T @ np.asarray(w, dtype=float))
        return Q1 @ E @ Om @ E

    def project_point(self, w):
        A = np.asarray(w, dtype=float).reshape(3, 3)
        det = float(np.linalg.det(A))
        if det <= 1e-12:
            raise ProjectionUndefinedError(
                f"projection undefined: weighted rotation sum has det = {det:.3e}"
            )
        Q, _ = polar_decompose(A)
        return Q

    def projection_jacobian(self, w):
        A = np.asarray(w, dtype=float).reshape(3, 3)
        det = float(np.linalg.det(A))
        if det <= 1e-12:
            raise ProjectionUndefinedError(
                f"projection undefined: weighted rotation sum has det = {det:.3e}"
            )
        iterates, _ = _polar_iterates(A)
        # Seed one derivative per embedding coordinate and push all nine
        # through the primal's iterates: dQ' = (dQ - Q^-T dQ^T Q^-T)/2.
        D = np.eye(9).reshape(9, 3, 3)
        for Q in iterates[:-1]:
            B = np.linalg.inv(Q).T
            D = 0.5 * (D - B @ np.transpose(D, (0, 2, 1)) @ B)
        return D.reshape(9, 9).T
