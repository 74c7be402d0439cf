"""Measurement-side machinery: outcome statistics and classical Fisher
information, optimal locally unbiased post-processing, the projective
measurement realizing the two-parameter exact bound (built from estimation
vectors in a dilated space), the commuting-SLD estimator for faithful models,
and dilation/compression utilities.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    InternalConsistencyError,
    ValidationError,
    gram_schmidt_real_coefficients,
)

__all__ = [
    "PvmEstimator",
    "EstimationVectors",
    "outcome_distribution",
    "classical_fisher",
    "optimal_postprocessing",
    "construct_pvm_from_vectors",
    "optimal_vectors_two_param",
    "commuting_sld_estimator",
    "naimark_compress",
]

PVM_TOL = 1e-10
UNBIASED_TOL = 1e-8
XCHECK_TOL = 1e-8
PROB_FLOOR = 1e-12
DERIV_FLOOR = 1e-9
COMMUTATOR_TOL = 1e-8


@dataclass
class PvmEstimator:
    """Projective measurement with per-outcome estimates.

    ``projectors[k]`` is Hermitian idempotent on a space of dimension
    ``ambient_dim``; projectors sum to the identity.  ``estimates[k]`` is the
    parameter estimate announced on outcome k.  ``embedding`` (optional,
    ambient_dim x base_dim isometry) records how the model's relevant
    subspace sits inside a dilated ambient space.
    """

    projectors: list
    estimates: list
    ambient_dim: int
    embedding: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def validate(self, tol=PVM_TOL):
        total = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        for p in self.projectors:
            if np.max(np.abs(p - p.conj().T)) > tol:
                raise ValidationError("projector not Hermitian")
            if np.max(np.abs(p @ p - p)) > tol:
                raise ValidationError("projector not idempotent")
            total += p
        if np.max(np.abs(total - np.eye(self.ambient_dim))) > tol:
            raise ValidationError("projectors do not sum to identity")
        return True


@dataclass(frozen=True)
class EstimationVectors:
    """Columns x^1..x^m and base point phi in a common (possibly dilated)
    space, satisfying <phi|x^i> = 0, Re X*L = I and Im X*X = 0."""

    phi: np.ndarray
    X: np.ndarray  # shape (dim, m)
    theta: np.ndarray


def outcome_distribution(frame, projectors):
    """Probabilities p_k = tr(rho P_k) and derivatives dp_k/dtheta_i.

    ``frame`` supplies the state and its tangent data; projectors act on the
    same space as the frame (no dilation here -- compress first).
    """
    m = frame.m
    n = len(projectors)
    p = np.zeros(n)
    dp = np.zeros((m, n))
    if frame.pure:
        phi = frame.phi
        for k, proj in enumerate(projectors):
            pk = np.vdot(phi, proj @ phi).real
            p[k] = max(pk, 0.0) if pk > -PROB_FLOOR else 0.0
            if pk < -PROB_FLOOR:
                raise ValidationError(f"negative outcome probability {pk:.3e}")
            for i, l in enumerate(frame.lifts):
                dp[i, k] = np.vdot(l, proj @ phi).real
    else:
        rho = frame.rho
        drhos = [0.5 * (l @ rho + rho @ l) for l in frame.slds]
        for k, proj in enumerate(projectors):
            pk = np.trace(rho @ proj).real
            p[k] = max(pk, 0.0)
            for i in range(m):
                dp[i, k] = np.trace(drhos[i] @ proj).real
    return p, dp


def classical_fisher(p, dp):
    """Classical Fisher matrix of an outcome distribution.

    Outcomes with p <= 1e-12 are excluded; if such an outcome still has a
    first-order probability flow (|dp| > 1e-9) the information diverges in
    that direction and the result carries ``singular=True``.

    Returns ``(J_M, singular)``.
    """
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    live = p > PROB_FLOOR
    singular = bool(np.any(~live & (np.max(np.abs(dp), axis=0) > DERIV_FLOOR)))
    sel = dp[:, live] / np.sqrt(p[live])
    jm = sel @ sel.T
    return 0.5 * (jm + jm.T), singular


def optimal_postprocessing(p, dp, g):
    """Best locally unbiased post-processing of a fixed measurement.

    Returns ``(min Tr G V, corrections)`` where corrections[k] is the
    estimate offset from theta on outcome k: J_M^{-1} score_k.
    Outcomes with p ~ 0 get correction 0.
    """
    jm, singular = classical_fisher(p, dp)
    if singular:
        raise ValidationError(
            "unbounded information direction: zero-probability outcome with "
            "nonzero derivative")
    w = np.linalg.eigvalsh(jm)
    if w[0] <= 1e-12 * max(1.0, w[-1]):
        raise ValidationError("singular classical Fisher matrix: "
                              "interval-only result")
    jm_inv = np.linalg.inv(jm)
    value = float(np.trace(np.asarray(g) @ jm_inv))
    corrections = np.zeros((len(p), jm.shape[0]))
    live = p > PROB_FLOOR
    scores = np.zeros_like(corrections)
    scores[live] = (dp[:, live] / p[live]).T
    corrections[live] = scores[live] @ jm_inv.T
    return value, corrections


def _householder_orthogonal(k):
    """Symmetric orthogonal (k x k) matrix whose first column is the uniform
    vector (1,...,1)/sqrt(k): the Householder reflection swapping e_1 with it."""
    c = np.full(k, 1.0 / np.sqrt(k))
    e1 = np.zeros(k)
    e1[0] = 1.0
    w = e1 - c
    nw = np.linalg.norm(w)
    if nw < 1e-14:
        return np.eye(k)
    w /= nw
    return np.eye(k) - 2.0 * np.outer(w, w)


def construct_pvm_from_vectors(vectors, rng_seed=0):
    """Projective measurement realizing the covariance Re X*X.

    Given estimation vectors (phi, X) with real Gram data (<phi|x^i> = 0,
    Im X*X = 0), orthonormalizes {phi, x^1..x^m} with real coefficients,
    mixes the resulting basis by a real orthogonal O whose first column is
    uniform (so every mixed vector overlaps phi), and returns the rank-one
    projectors |b'_k><b'_k| plus a remainder projector with estimate theta.

    Output covariance equals Re X*X and the measurement is locally unbiased;
    both are verified before returning.
    """
    phi = vectors.phi
    xs = [vectors.X[:, i] for i in range(vectors.X.shape[1])]
    theta = vectors.theta
    m = len(xs)
    dim = len(phi)

    basis, coeffs, rank = gram_schmidt_real_coefficients([phi] + xs)
    if dim < rank:
        raise ValidationError("ambient space too small for the construction")
    # lam[i, j]: coefficient of x^i on basis vector j (row 0 of coeffs is phi)
    lam = np.zeros((m, rank))
    lam[:, :coeffs.shape[1]] = coeffs[1:, :]

    k = rank
    o = _householder_orthogonal(k)
    rng = np.random.default_rng(rng_seed)
    for _ in range(32):
        overlaps = o[:, 0]  # <b'_kappa | phi> since b^1 = phi
        if np.min(np.abs(overlaps)) > 1e-9:
            break
        q, r = np.linalg.qr(rng.standard_normal((k, k)))
        o = q * np.sign(np.diag(r))
    else:
        raise InternalConsistencyError("could not find an orthogonal mix "
                                       "with nonzero overlaps")

    bmat = np.column_stack(basis)          # dim x k
    bprime = bmat @ o.T                    # columns are b'_kappa
    projectors = []
    estimates = []
    for kappa in range(k):
        v = bprime[:, kappa]
        projectors.append(np.outer(v, v.conj()))
        corr = (lam @ o[kappa, :]) / o[kappa, 0]
        estimates.append(theta + corr)
    rem = np.eye(dim, dtype=complex) - bmat @ bmat.conj().T
    if np.max(np.abs(rem)) > PVM_TOL:
        projectors.append(rem)
        estimates.append(theta.copy())

    pvm = PvmEstimator(projectors=projectors, estimates=estimates,
                       ambient_dim=dim)
    pvm.validate()

    # verify local unbiasedness and the covariance identity
    p = np.array([np.vdot(phi, proj @ phi).real for proj in projectors])
    est = np.array(estimates)
    mean = p @ est
    if np.max(np.abs(mean - theta)) > UNBIASED_TOL:
        raise InternalConsistencyError("constructed PVM is biased")
    dev = est - theta
    cov = (dev * p[:, None]).T @ dev
    target = (vectors.X.conj().T @ vectors.X).real
    if np.max(np.abs(cov - target)) > 1e-9 * max(1.0, np.max(np.abs(target))):
        raise InternalConsistencyError(
            "constructed PVM covariance does not match Re X*X")
    pvm.meta["covariance"] = cov
    return pvm


def _isometric_embedding(frame, columns, dilate_dim):
    """Orthonormal basis of span{columns} and the embedding of each column
    into C^dilate_dim (first-coordinates inclusion)."""
    mat = np.column_stack(columns)
    q, r = np.linalg.qr(mat)
    keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.max(np.abs(r)))
    q = q[:, keep]
    k = q.shape[1]
    if dilate_dim < k:
        raise ValidationError(f"dilate_dim {dilate_dim} < span dimension {k}")
    coords = q.conj().T @ mat              # k x ncols
    out = np.zeros((dilate_dim, mat.shape[1]), dtype=complex)
    out[:k, :] = coords
    return q, out


COHERENT_SWITCH = 1e-6


def optimal_vectors_two_param(frame, weight, bound):
    """Estimation vectors attaining the two-parameter exact bound, in a
    dilated space of dimension 2m+1 = 5.

    Away from maximal incompatibility the vectors stay in the span of the
    lifts: X = L V G (G - i Lambda)^{-1} with (V, Lambda) from
    ``cr_two_param``.  When beta is within 1e-6 of 1 that matrix is (nearly)
    singular and the optimizer genuinely needs the dilation: in normalized
    rotated coordinates X = L'' + Y with Y orthogonal to the physical span
    and Y*Y = V'' - L''*L''.  Both branches verify Re X*L = I, Im X*X = 0
    and Re X*X = V before returning.
    """
    if not frame.pure or frame.m != 2:
        raise ValidationError("requires a 2-parameter pure model")
    if bound.V_opt is None:
        raise ValidationError("bound carries no optimizer (infimum only?)")
    g = np.asarray(weight.G, dtype=float)
    v_opt = bound.V_opt

    dilate_dim = 2 * frame.m + 1
    cols = [frame.phi] + list(frame.lifts)
    basis, embedded = _isometric_embedding(frame, cols, dilate_dim)
    phi_e = embedded[:, 0]
    l_e = embedded[:, 1:]
    span_k = basis.shape[1]

    # normalized rotated frame data
    ll = l_e.conj().T @ l_e
    js = ll.real
    jt = ll.imag
    wj, uj = np.linalg.eigh(js)
    s_half = (uj * np.sqrt(wj)) @ uj.T
    s_inv = (uj / np.sqrt(wj)) @ uj.T
    jt_n = s_inv @ jt @ s_inv
    beta = abs(0.5 * (jt_n[1, 0] - jt_n[0, 1]))

    if beta < 1.0 - COHERENT_SWITCH:
        if bound.Lambda is None:
            raise ValidationError("bound carries no Lagrange multiplier")
        x_e = l_e @ v_opt @ g @ np.linalg.inv(g - 1j * bound.Lambda)
    else:
        if span_k + 2 > dilate_dim:
            raise InternalConsistencyError("dilated space too small")
        from .bounds import _so2_diagonalizer  # shared rotation convention

        g_n = s_inv @ g @ s_inv
        r, _ = _so2_diagonalizer(0.5 * (g_n + g_n.T))
        l_rot = l_e @ s_inv @ r
        v_rot = r.T @ (s_half @ v_opt @ s_half) @ r
        q = v_rot - l_rot.conj().T @ l_rot
        q = 0.5 * (q + q.conj().T)
        wq, uq = np.linalg.eigh(q)
        if wq[0] < -1e-7:
            raise InternalConsistencyError(
                f"dilation tail not PSD (min eig {wq[0]:.3e})")
        q_half = (uq * np.sqrt(np.clip(wq, 0.0, None))) @ uq.conj().T
        extra = np.zeros((dilate_dim, 2), dtype=complex)
        extra[span_k, 0] = 1.0
        extra[span_k + 1, 1] = 1.0
        x_rot = l_rot + extra @ q_half
        x_e = x_rot @ r.T @ s_inv

    # verification in the dilated space
    xl = x_e.conj().T @ l_e
    if np.max(np.abs(xl.real - np.eye(2))) > XCHECK_TOL:
        raise InternalConsistencyError(
            f"Re X*L != I (max dev {np.max(np.abs(xl.real - np.eye(2))):.3e})")
    xx = x_e.conj().T @ x_e
    scale = max(1.0, np.max(np.abs(xx)))
    if np.max(np.abs(xx.imag)) > XCHECK_TOL * scale:
        raise InternalConsistencyError("Im X*X != 0")
    if np.max(np.abs(xx.real - v_opt)) > XCHECK_TOL * scale:
        raise InternalConsistencyError("Re X*X != V")
    if np.max(np.abs(x_e.conj().T @ phi_e)) > XCHECK_TOL:
        raise InternalConsistencyError("<phi|x^i> != 0")

    vectors = EstimationVectors(phi=phi_e, X=x_e,
                                theta=np.asarray(frame.theta, dtype=float))
    return vectors, basis


def commuting_sld_estimator(model, theta, geom=None):
    """Optimal projective estimator for a faithful model with commuting SLDs.

    Measures the simultaneous eigenbasis of the SLDs and announces
    theta + J^{S-1} lambda(omega), where lambda_k(omega) is the eigenvalue of
    L_k on the outcome vector.  Covariance equals J^{S-1}.
    """
    from .models import sld_solve
    from .geometry import info_geometry

    frame = sld_solve(model, theta)
    slds = frame.slds
    m = len(slds)
    scale = max(max(np.max(np.abs(l)) for l in slds), 1e-300)
    for i in range(m):
        for j in range(i + 1, m):
            comm = slds[i] @ slds[j] - slds[j] @ slds[i]
            nrm = np.max(np.abs(comm))
            if nrm > COMMUTATOR_TOL * scale**2:
                raise ValidationError(
                    f"SLDs do not commute: max |[L_{i},L_{j}]| = {nrm:.3e}")

    # simultaneous eigenbasis via a generic linear combination
    rng = np.random.default_rng(7)
    dim = model.dim
    for _ in range(16):
        c = rng.standard_normal(m)
        mix = sum(ci * li for ci, li in zip(c, slds))
        mix = mix + rng.standard_normal() * frame.rho  # break ties generically
        _, u = np.linalg.eigh(0.5 * (mix + mix.conj().T))
        diag_ok = all(
            np.max(np.abs(u.conj().T @ l @ u
                          - np.diag(np.diag(u.conj().T @ l @ u))))
            <= 1e-6 * max(1.0, np.max(np.abs(l))) for l in slds)
        if diag_ok:
            break
    else:
        raise InternalConsistencyError("simultaneous diagonalization failed")

    geom = geom if geom is not None else info_geometry(frame)
    js_inv = np.linalg.inv(geom.JS)
    projectors = []
    estimates = []
    for w in range(dim):
        v = u[:, w]
        projectors.append(np.outer(v, v.conj()))
        lam = np.array([np.vdot(v, l @ v).real for l in slds])
        estimates.append(np.asarray(theta, dtype=float) + js_inv @ lam)
    pvm = PvmEstimator(projectors=projectors, estimates=estimates,
                       ambient_dim=dim)
    pvm.validate()
    return pvm


def naimark_compress(pvm, embedding):
    """Compress a dilated PVM to POVM elements on the base space.

    ``embedding`` is the (base_dim x k) orthonormal matrix whose columns span
    the physically relevant subspace; the dilated space holds that subspace
    in its first k coordinates.  Returns POVM elements M_k on the base space
    plus a remainder element absorbing the orthogonal complement, so the
    elements sum to the base identity.
    """
    base_dim, k = embedding.shape
    elements = []
    for proj in pvm.projectors:
        block = proj[:k, :k]
        elem = embedding @ block @ embedding.conj().T
        elements.append(0.5 * (elem + elem.conj().T))
    total = sum(elements)
    rem = np.eye(base_dim, dtype=complex) - total
    if np.max(np.abs(rem)) > 1e-9:
        elements.append(0.5 * (rem + rem.conj().T))
    else:
        rem = None
    return elements, rem is not None
