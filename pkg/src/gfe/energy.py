"""Harmonic-map Dirichlet energy on global functions, and its minimization.

The energy of u is (1/2) * integral over the domain of |grad (iota o u)|^2,
assembled element by element with a fixed order-4 simplex quadrature; the
gradient of the embedded composition comes from the interpolants' reference
derivatives mapped through the affine element geometry.

The first variation in the direction of a test field eta is
integral of <grad u, grad eta> (valid because eta is tangent along u), with
the field gradients supplied by the jacobi module.  The algebraic gradient
collects these directional derivatives against the global nodal basis into
one tangent vector per Lagrange node, with fixed (by default: boundary)
nodes zeroed; ``minimize`` runs Riemannian gradient descent with Armijo
backtracking on the nodal values.

``equivalence_audit`` compares, for random nodal tangent directions, the
finite difference of the energy along the corresponding curve of nodal
values against the directional derivative taken with the assembled test
field; the two are discretizations of the same derivative and must agree up
to finite-difference noise.

Element loops may run thread-parallel; set GFE_THREADS (0 = one thread per
CPU).  Partial results are reduced in element order either way, so results
do not depend on the thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GFEError, LineSearchFailure
from .grid import GFEFunction, GlobalTestFunction
from .jacobi import _basis_ref_gradients, _nodal_coefficients
from .manifold import TangentVector

_FIELD_FD_STEP = 1e-6
_ARMIJO_C = 1e-4
_ARMIJO_BACKTRACK = 0.5
_MIN_STEP = 1e-14


# ----------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Reference-simplex quadrature: points (nq, d) and positive weights."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if np.any(self.weights <= 0.0):
            raise ValueError("quadrature weights must be positive")


def simplex_quadrature(dim: int) -> QuadratureRule:
    """Order-4 rules: 3-point Gauss on [0,1], 6-point on the unit triangle."""
    if dim == 1:
        s = np.sqrt(3.0 / 5.0)
        pts = 0.5 * (1.0 + np.array([-s, 0.0, s]))
        wts = np.array([5.0, 8.0, 5.0]) / 18.0
        return QuadratureRule(pts.reshape(-1, 1), wts)
    if dim == 2:
        a1, w1 = 0.445948490915965, 0.223381589678011
        a2, w2 = 0.091576213509771, 0.109951743655322
        pts = []
        wts = []
        for a, w in ((a1, w1), (a2, w2)):
            pts.extend([[a, a], [1.0 - 2.0 * a, a], [a, 1.0 - 2.0 * a]])
            wts.extend([w, w, w])
        return QuadratureRule(np.array(pts), 0.5 * np.array(wts))
    raise ValueError(f"no quadrature for dimension {dim}")


@dataclass(frozen=True)
class EnergyReport:
    value: float
    gradient_norm: float
    iterations: int
    converged: bool


# ----------------------------------------------------------------------
# threaded element loops


def _thread_count() -> int:
    raw = os.environ.get("GFE_THREADS")
    if raw is None:
        return 1
    n = int(raw)
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def _map_elements(fn, ne: int) -> list:
    nt = _thread_count()
    if nt <= 1 or ne <= 1:
        return [fn(e) for e in range(ne)]
    with ThreadPoolExecutor(max_workers=nt) as ex:
        return list(ex.map(fn, range(ne)))


# ----------------------------------------------------------------------
# energy and first variation


def _physical_gradient(cols, Binv: np.ndarray) -> np.ndarray:
    """Map reference-derivative columns to physical space; shape (N, d)."""
    G = np.stack([tv.vec.reshape(-1) for tv in cols], axis=1)
    return G @ Binv


def dirichlet_energy(u: GFEFunction, quad: QuadratureRule | None = None) -> float:
    """(1/2) * integral of the squared embedded gradient of u."""
    grid = u.grid
    rule = quad or simplex_quadrature(grid.dim)

    def element_energy(e: int) -> float:
        interp = u.local(e)
        Binv = grid._Binv[e]
        acc = 0.0
        for w, xi in zip(rule.weights, rule.points):
            G = _physical_gradient(interp.d_dxi(xi), Binv)
            acc += w * float(np.sum(G * G))
        return grid._detB[e] * acc

    parts = _map_elements(element_energy, grid.n_elements)
    return 0.5 * float(sum(parts))


def directional_derivative(
    u: GFEFunction, eta: GlobalTestFunction, quad: QuadratureRule | None = None
) -> float:
    """First variation of the Dirichlet energy in the direction of eta."""
    grid = u.grid
    rule = quad or simplex_quadrature(grid.dim)

    def element_part(e: int) -> float:
        interp = u.local(e)
        Binv = grid._Binv[e]
        vectors = tuple(eta.vectors[g] for g in grid.element_nodes[e])
        beta = _nodal_coefficients(interp, vectors)
        acc = 0.0
        for w, xi in zip(rule.weights, rule.points):
            Gu = _physical_gradient(interp.d_dxi(xi), Binv)
            _, G = _basis_ref_gradients(interp, xi, h=_FIELD_FD_STEP)
            Feta_ref = np.einsum("injl,ij->nl", G, beta)
            Feta = Feta_ref @ Binv
            acc += w * float(np.sum(Gu * Feta))
        return grid._detB[e] * acc

    parts = _map_elements(element_part, grid.n_elements)
    return float(sum(parts))


def algebraic_gradient(
    u: GFEFunction,
    quad: QuadratureRule | None = None,
    fixed: set[int] | None = None,
) -> list[TangentVector]:
    """Energy gradient as one tangent vector per Lagrange node.

    Component (i, j) is the directional derivative along the global nodal
    basis function carrying tangent_basis(u_i)[j] at node i.  Entries at
    ``fixed`` nodes (grid boundary nodes by default) are zeroed.
    """
    grid = u.grid
    man = u.manifold
    dim = man.intrinsic_dim
    rule = quad or simplex_quadrature(grid.dim)
    fixed_set = grid.boundary_nodes if fixed is None else set(fixed)

    def element_part(e: int) -> np.ndarray:
        interp = u.local(e)
        Binv = grid._Binv[e]
        local = np.zeros((grid.ref.m, dim))
        for w, xi in zip(rule.weights, rule.points):
            Gu = _physical_gradient(interp.d_dxi(xi), Binv)
            _, G = _basis_ref_gradients(interp, xi, h=_FIELD_FD_STEP)
            # physical gradient of basis field (i, j): G[i, :, j, :] @ Binv
            local += w * np.einsum("nk,injl,lk->ij", Gu, G, Binv)
        return grid._detB[e] * local

    parts = _map_elements(element_part, grid.n_elements)
    coeff = np.zeros((grid.n_nodes, dim))
    for e, local in enumerate(parts):
        for loc, g in enumerate(grid.element_nodes[e]):
            coeff[g] += local[loc]
    for g in fixed_set:
        coeff[g] = 0.0
    return [
        TangentVector(man, u.values[i], np.tensordot(coeff[i], man.tangent_basis(u.values[i]), axes=1))
        for i in range(grid.n_nodes)
    ]


def _gradient_norm(grad: list[TangentVector]) -> float:
    return float(np.sqrt(sum(tv.norm() ** 2 for tv in grad)))


# ----------------------------------------------------------------------
# minimization


def minimize(
    u0: GFEFunction,
    fixed: set[int],
    quad: QuadratureRule | None = None,
    max_iter: int = 500,
    tol: float = 1e-8,
    initial_step: float = 1.0,
    callback=None,
):
    """Riemannian gradient descent with Armijo backtracking.

    Nodal values outside ``fixed`` are updated by v <- exp_v(-alpha * grad);
    each iteration's trial step doubles the previous accepted step and is
    halved until the energy decreases sufficiently (c = 1e-4).  Trial states
    that fail to evaluate (admissibility, cut locus, projection) are treated
    like an insufficient decrease.  Returns (minimizer, EnergyReport);
    raises LineSearchFailure when the step underflows below 1e-14.
    """
    rule = quad or simplex_quadrature(u0.grid.dim)
    fixed_set = set(fixed)
    u = u0
    energy = dirichlet_energy(u, rule)
    alpha_prev = 0.5 * initial_step
    iterations = 0
    free = [i for i in range(u.grid.n_nodes) if i not in fixed_set]

    grad = algebraic_gradient(u, rule, fixed_set)
    gnorm = _gradient_norm(grad)
    if callback is not None:
        callback(iterations, energy, gnorm)

    while gnorm > tol:
        if iterations >= max_iter:
            break
        alpha = 2.0 * alpha_prev
        while True:
            trial = u.values.copy()
            ok = True
            try:
                for i in free:
                    trial[i] = u.manifold.exp(u.values[i], -alpha * grad[i].vec)
                u_try = u.with_values(trial)
                e_try = dirichlet_energy(u_try, rule)
            except GFEError:
                ok = False
            if ok and e_try <= energy - _ARMIJO_C * alpha * gnorm**2 and e_try < energy:
                break
            alpha *= _ARMIJO_BACKTRACK
            if alpha < _MIN_STEP:
                raise LineSearchFailure(
                    f"step underflow at descent iteration {iterations} "
                    f"(energy {energy:.12e}, gradient norm {gnorm:.3e})"
                )
        u, energy, alpha_prev = u_try, e_try, alpha
        iterations += 1
        try:
            grad = algebraic_gradient(u, rule, fixed_set)
        except GFEError as exc:
            raise type(exc)(f"at descent iteration {iterations}: {exc}") from exc
        gnorm = _gradient_norm(grad)
        if callback is not None:
            callback(iterations, energy, gnorm)

    report = EnergyReport(energy, gnorm, iterations, bool(gnorm <= tol))
    return u, report


# ----------------------------------------------------------------------
# two-route derivative comparison


def equivalence_audit(
    u: GFEFunction,
    quad: QuadratureRule | None = None,
    trials: int = 20,
    seed: int = 0,
) -> float:
    """Max discrepancy between the two routes to the first variation.

    For each of ``trials`` random unit nodal tangent directions: (A) central
    finite difference (h = 1e-5) of the energy along the curve of nodal
    values exp_{v_i}(t * b_i), and (B) the directional derivative against
    the assembled test field.  Discrepancies are relative when either route
    exceeds 1e-6 in magnitude and absolute otherwise.
    """
    rule = quad or simplex_quadrature(u.grid.dim)
    man = u.manifold
    n = u.grid.n_nodes
    dim = man.intrinsic_dim
    rng = np.random.default_rng(seed)
    bases = [man.tangent_basis(v) for v in u.values]
    h = 1e-5

    worst = 0.0
    for _ in range(trials):
        coeff = rng.standard_normal((n, dim))
        coeff /= np.linalg.norm(coeff)
        vecs = [np.tensordot(coeff[i], bases[i], axes=1) for i in range(n)]

        plus = np.array([man.exp(u.values[i], h * vecs[i]) for i in range(n)])
        minus = np.array([man.exp(u.values[i], -h * vecs[i]) for i in range(n)])
        route_a = (
            dirichlet_energy(u.with_values(plus), rule)
            - dirichlet_energy(u.with_values(minus), rule)
        ) / (2.0 * h)

        eta = GlobalTestFunction(u, [TangentVector(man, u.values[i], vecs[i]) for i in range(n)])
        route_b = directional_derivative(u, eta, rule)

        denom = max(abs(route_a), abs(route_b))
        disc = abs(route_a - route_b) if denom < 1e-6 else abs(route_a - route_b) / denom
        worst = max(worst, disc)
    return worst
