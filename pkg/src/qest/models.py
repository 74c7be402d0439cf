"""Parametric quantum-state models: tangents, horizontal lifts, SLDs and the
built-in model zoo (spin-coherent rotations, displaced squeezed vacuum,
phase-space shifts of a Fock state, Gibbs families, unitary time evolution).
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    TOL,
    QuantumState,
    ValidationError,
    hermitian_eigendecomposition,
    matrix_exponential_skew,
    mixed_state,
    pure_state,
)

__all__ = [
    "ParametricModel",
    "TangentFrame",
    "tangents",
    "horizontal_lift",
    "sld_solve",
    "frame_at",
    "zoo_spin_coherent",
    "zoo_squeezed",
    "zoo_pm_shift",
    "zoo_canonical",
    "zoo_time_evolution",
    "explicit_model",
    "load_model_spec",
    "annihilation",
]

FD_STEP_DEFAULT = 1e-5
TRUNC_DIM_DEFAULT = 64
LEAKAGE_TOL = 1e-10


@dataclass(frozen=True)
class ParametricModel:
    """Map theta in R^m -> quantum state, with a tangent supplier.

    ``state_at(theta)`` returns a :class:`QuantumState`.  Tangents are
    central finite differences by default; models that know their derivative
    in closed form may supply ``tangent_at(theta) -> list of d(state)``.
    """

    kind: str
    dim: int
    m: int
    state_at: callable
    hbar: float = 1.0
    k_b: float = 1.0
    tangent_mode: str = "finite_difference"
    fd_step: float = FD_STEP_DEFAULT
    tangent_at: callable = None
    pure: bool = True
    meta: dict = field(default_factory=dict)

    def state(self, theta):
        return self.state_at(np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class TangentFrame:
    """State plus derivative data at a point.

    Pure models carry the base vector ``phi`` and horizontal lifts
    ``lifts[i] = 2 (I - |phi><phi|) |d_i phi>`` (each orthogonal to phi).
    Faithful mixed models carry ``rho`` and Hermitian SLD operators
    ``slds[i]`` solving  d_i rho = (L_i rho + rho L_i)/2.
    """

    theta: np.ndarray
    pure: bool
    hbar: float = 1.0
    phi: np.ndarray = None
    lifts: list = None
    rho: np.ndarray = None
    slds: list = None

    @property
    def m(self):
        return len(self.lifts) if self.pure else len(self.slds)

    def sld_operators(self):
        """SLD operators, valid for pure frames too:
        L_i = |l_i><phi| + |phi><l_i|."""
        if not self.pure:
            return list(self.slds)
        return [np.outer(l, self.phi.conj()) + np.outer(self.phi, l.conj())
                for l in self.lifts]


def _align_phase(ref, vec, tol=1e-6):
    """Multiply ``vec`` by a unimodular factor so <ref|vec> is real positive."""
    ov = np.vdot(ref, vec)
    if abs(ov) < 1e-12:
        raise ValidationError(
            "phase alignment impossible: neighbor state orthogonal to center "
            "(fd_step far too large?)")
    return vec * (ov.conjugate() / abs(ov))


def tangents(model, theta):
    """List of d_i(state) at theta: either the model's analytic tangents or
    central finite differences with pure-state phase alignment."""
    theta = np.asarray(theta, dtype=float)
    if model.tangent_mode == "analytic":
        if model.tangent_at is None:
            raise ValidationError("model declares analytic tangents but "
                                  "provides no tangent_at")
        return [np.asarray(t, dtype=complex) for t in model.tangent_at(theta)]

    h = model.fd_step
    st0 = model.state(theta)
    out = []
    for i in range(model.m):
        dt = np.zeros(model.m)
        dt[i] = h
        sp = model.state(theta + dt)
        sm = model.state(theta - dt)
        if model.pure:
            vp = _align_phase(st0.vector, sp.vector)
            vm = _align_phase(st0.vector, sm.vector)
            out.append((vp - vm) / (2.0 * h))
        else:
            out.append((sp.rho - sm.rho) / (2.0 * h))
    return out


def horizontal_lift(model, theta, tol=TOL):
    """Tangent frame of a pure model: horizontal lifts of the coordinate
    tangents, l_i = 2 (I - |phi><phi|) |d_i phi>."""
    if not model.pure:
        raise ValidationError("horizontal_lift requires a pure model")
    theta = np.asarray(theta, dtype=float)
    phi = model.state(theta).vector
    dphis = tangents(model, theta)
    lifts = []
    for dphi in dphis:
        l = 2.0 * (dphi - phi * np.vdot(phi, dphi))
        lifts.append(l)

    # non-redundancy: the real span of the lifts must have dimension m
    stacked = np.array([np.concatenate([l.real, l.imag]) for l in lifts])
    scale = max(np.linalg.norm(stacked), 1e-300)
    rank = np.linalg.matrix_rank(stacked, tol=1e-8 * scale)
    if rank < model.m:
        raise ValidationError(
            f"redundant parameters: real span of lifts has rank {rank} < {model.m}")
    return TangentFrame(theta=theta, pure=True, hbar=model.hbar,
                        phi=phi, lifts=lifts)


def sld_solve(model, theta, tol=TOL):
    """Tangent frame of a faithful mixed model: Hermitian SLDs from the
    eigenbasis formula (L_i)_{ab} = 2 <a|d_i rho|b> / (p_a + p_b)."""
    theta = np.asarray(theta, dtype=float)
    st = model.state(theta)
    if st.kind != "mixed":
        raise ValidationError("sld_solve requires a mixed model")
    rho = st.density
    p, u = hermitian_eigendecomposition(rho, tol)
    if p[0] < tol.faithful_min_eig:
        raise ValidationError(
            f"state not faithful at theta={theta}: min eigenvalue {p[0]:.3e}; "
            "use the pure-state path or regularize the model")
    drhos = tangents(model, theta)
    denom = p[:, None] + p[None, :]
    slds = []
    for drho in drhos:
        m_eig = 2.0 * (u.conj().T @ drho @ u) / denom
        l = u @ m_eig @ u.conj().T
        l = 0.5 * (l + l.conj().T)
        resid = np.linalg.norm(0.5 * (l @ rho + rho @ l) - drho)
        if resid > tol.lift_residual * max(1.0, np.linalg.norm(drho)):
            raise ValidationError(f"SLD reconstruction residual {resid:.3e}")
        slds.append(l)
    return TangentFrame(theta=theta, pure=False, hbar=model.hbar,
                        rho=rho, slds=slds)


def frame_at(model, theta, tol=TOL):
    """Dispatch to horizontal_lift (pure) or sld_solve (faithful mixed)."""
    if model.pure:
        return horizontal_lift(model, theta, tol)
    return sld_solve(model, theta, tol)


# ---------------------------------------------------------------------------
# model zoo
# ---------------------------------------------------------------------------

def _spin_matrices(s, hbar):
    """Spin matrices S_x, S_y, S_z for spin s, basis ordered m = s..-s."""
    dim = int(round(2 * s)) + 1
    mvals = s - np.arange(dim)
    sz = hbar * np.diag(mvals)
    sp = np.zeros((dim, dim), dtype=complex)  # raising operator
    for k in range(1, dim):
        m = mvals[k]
        sp[k - 1, k] = hbar * np.sqrt(s * (s + 1) - m * (m + 1))
    sm = sp.conj().T
    sx = 0.5 * (sp + sm)
    sy = -0.5j * (sp - sm)
    return sx, sy, sz


def zoo_spin_coherent(s, m_z, hbar=1.0, tangent_mode="finite_difference",
                      fd_step=FD_STEP_DEFAULT):
    """Rotated spin eigenstate model, 2 parameters.

    phi(theta) = exp[i theta^1 (sin(theta^2) S_x - cos(theta^2) S_y)] |s, m_z>.

    Closed forms (attached in ``meta``):
    J^S = 2 hbar^2 (s^2 + s - m_z^2) diag(1, sin^2 theta^1),
    J~_{12} = 2 m_z hbar^2 sin theta^1,  beta = m_z / (s^2 + s - m_z^2).
    """
    if (2 * s) % 1 != 0 or s <= 0:
        raise ValidationError(f"s must be a positive half-integer, got {s}")
    if abs(m_z) > s or (s - m_z) % 1 != 0:
        raise ValidationError(f"invalid m_z={m_z} for s={s}")
    dim = int(round(2 * s)) + 1
    sx, sy, _ = _spin_matrices(s, hbar)
    idx = int(round(s - m_z))
    phi0 = np.zeros(dim, dtype=complex)
    phi0[idx] = 1.0

    def state_at(theta):
        gen = np.sin(theta[1]) * sx - np.cos(theta[1]) * sy
        u = matrix_exponential_skew(gen, scale=theta[0])
        return pure_state(u @ phi0)

    c = s * s + s - m_z * m_z
    meta = {
        "s": s, "m_z": m_z,
        "js": lambda th: 2 * hbar**2 * c * np.diag([1.0, np.sin(th[0])**2]),
        "jtilde_12": lambda th: 2 * m_z * hbar**2 * np.sin(th[0]),
        "beta": m_z / c,
    }
    return ParametricModel(kind="spin_coherent", dim=dim, m=2,
                           state_at=state_at, hbar=hbar,
                           tangent_mode=tangent_mode, fd_step=fd_step,
                           meta=meta)


def annihilation(n):
    """Truncated bosonic annihilation matrix on an n-dimensional Fock space."""
    a = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        a[k - 1, k] = np.sqrt(k)
    return a


def _check_leakage(vec, label):
    leak = np.abs(vec[-2:]) ** 2
    if leak.sum() > LEAKAGE_TOL:
        raise ValidationError(
            f"{label}: top-Fock population {leak.sum():.3e} exceeds "
            f"{LEAKAGE_TOL:.0e}; increase trunc_dim")


def zoo_squeezed(trunc_dim=TRUNC_DIM_DEFAULT, hbar=1.0,
                 fd_step=FD_STEP_DEFAULT):
    """Displaced squeezed vacuum |z, xi> = D(z) S(xi) |0>, 4 parameters.

    z = (theta^1 + i theta^2) / (2 sqrt(hbar)) and xi = theta^3 exp(-2i theta^4).
    The displacement normalization is chosen so the determinant identity of
    the coherent model comes out as |det J^S| = |det J~| =
    (4/hbar^2) sinh^2(2 theta^3); rescaling theta^1, theta^2 only rescales
    both determinants together.  States live on a truncated Fock space; the
    constructor rejects points where the truncation leaks.
    """
    if trunc_dim < 32:
        raise ValidationError("trunc_dim must be >= 32")
    a = annihilation(trunc_dim)
    ad = a.conj().T
    a2 = a @ a
    ad2 = ad @ ad
    vac = np.zeros(trunc_dim, dtype=complex)
    vac[0] = 1.0
    from scipy.linalg import expm

    def state_at(theta):
        z = (theta[0] + 1j * theta[1]) / (2.0 * np.sqrt(hbar))
        xi = theta[2] * np.exp(-2j * theta[3])
        sq = expm(0.5 * (np.conj(xi) * a2 - xi * ad2))
        disp = expm(z * ad - np.conj(z) * a)
        v = disp @ (sq @ vac)
        _check_leakage(v, "squeezed model")
        return pure_state(v / np.linalg.norm(v))

    meta = {
        # |det J^S| = |det J~| for this model (it is coherent)
        "abs_det": lambda th: (4.0 / hbar**2) * np.sinh(2 * th[2])**2,
    }
    return ParametricModel(kind="squeezed", dim=trunc_dim, m=4,
                           state_at=state_at, hbar=hbar, fd_step=fd_step,
                           meta=meta)


def zoo_pm_shift(phi0=0, trunc_dim=TRUNC_DIM_DEFAULT, hbar=1.0,
                 fd_step=FD_STEP_DEFAULT):
    """Phase-space shift model, 2 parameters (x0, p0).

    phi(x0, p0) = exp[(i/hbar)(p0 X - x0 P)] |phi0> with X, P built from the
    truncated ladder operator, [X, P] = i hbar.  ``phi0`` is a Fock index or
    an explicit reference vector.
    """
    a = annihilation(trunc_dim)
    ad = a.conj().T
    x = np.sqrt(hbar / 2.0) * (a + ad)
    p = 1j * np.sqrt(hbar / 2.0) * (ad - a)
    if np.isscalar(phi0):
        nidx = int(phi0)
        ref = np.zeros(trunc_dim, dtype=complex)
        ref[nidx] = 1.0
        meta = {
            "n": nidx,
            "js": (4.0 / hbar) * (nidx + 0.5) * np.eye(2),
            "abs_beta": 1.0 / (2 * nidx + 1),
        }
    else:
        ref = np.asarray(phi0, dtype=complex).ravel()
        ref = ref / np.linalg.norm(ref)
        meta = {}
    from scipy.linalg import expm

    def state_at(theta):
        gen = (theta[1] * x - theta[0] * p) / hbar
        v = expm(1j * gen) @ ref
        _check_leakage(v, "pm-shift model")
        return pure_state(v / np.linalg.norm(v))

    return ParametricModel(kind="pm_shift", dim=trunc_dim, m=2,
                           state_at=state_at, hbar=hbar, fd_step=fd_step,
                           meta=meta)


def zoo_canonical(energies, k_b=1.0, hbar=1.0, fd_step=FD_STEP_DEFAULT):
    """Gibbs family rho(T) = exp(-H / k_B T) / Z, 1 parameter T > 0.

    Exposes the heat capacity C(T) = Var(H) / (k_B T^2) and the optimal
    temperature estimator that assigns T + (E_w - <H>_T) / C(T) to energy
    outcome w.
    """
    e = np.asarray(energies, dtype=float).ravel()
    if len(e) < 2:
        raise ValidationError("need at least two energy levels")

    def probs(t):
        if t <= 0:
            raise ValidationError(f"temperature must be positive, got {t}")
        x = -(e - e.min()) / (k_b * t)
        p = np.exp(x)
        return p / p.sum()

    def state_at(theta):
        return mixed_state(np.diag(probs(theta[0]).astype(complex)),
                           require_faithful=True)

    def heat_capacity(t):
        p = probs(t)
        mean = p @ e
        var = p @ (e - mean) ** 2
        return var / (k_b * t * t)

    def best_estimates(t):
        p = probs(t)
        mean = p @ e
        return t + (e - mean) / heat_capacity(t)

    meta = {
        "energies": e,
        "heat_capacity": heat_capacity,
        "best_estimates": best_estimates,
        "js": lambda t: heat_capacity(t) / (k_b * t * t),
    }
    return ParametricModel(kind="canonical", dim=len(e), m=1,
                           state_at=state_at, hbar=hbar, k_b=k_b,
                           fd_step=fd_step, pure=False, meta=meta)


def zoo_time_evolution(h, psi0, hbar=1.0, fd_step=FD_STEP_DEFAULT):
    """Unitary time evolution phi(t) = exp(-i H t / hbar) psi0, 1 parameter."""
    h = np.asarray(h, dtype=complex)
    psi0 = np.asarray(psi0, dtype=complex).ravel()
    psi0 = psi0 / np.linalg.norm(psi0)
    w, u = hermitian_eigendecomposition(h)
    coeff = u.conj().T @ psi0

    def state_at(theta):
        return pure_state(u @ (np.exp(-1j * w * theta[0] / hbar) * coeff))

    mean = np.vdot(psi0, h @ psi0).real
    var = (np.vdot(psi0, h @ h @ psi0).real - mean * mean)
    meta = {"h": h, "var_h": var, "js": 4.0 * var / hbar**2}
    return ParametricModel(kind="time_evolution", dim=len(psi0), m=1,
                           state_at=state_at, hbar=hbar, fd_step=fd_step,
                           meta=meta)


def explicit_model(theta, state, tangent_vectors, hbar=1.0, pure=True):
    """Single-point model: state and tangents supplied directly at ``theta``.

    Only valid for evaluation exactly at ``theta`` (tangent_mode is analytic
    and constant); used by the CLI "explicit" model-spec kind and by tests.
    """
    theta = np.asarray(theta, dtype=float)
    tvs = [np.asarray(t, dtype=complex) for t in tangent_vectors]
    if pure:
        st = pure_state(state)
        dim = st.dim
    else:
        st = mixed_state(state, require_faithful=True)
        dim = st.dim
    return ParametricModel(kind="explicit", dim=dim, m=len(tvs),
                           state_at=lambda th: st, hbar=hbar,
                           tangent_mode="analytic",
                           tangent_at=lambda th: tvs, pure=pure)


# ---------------------------------------------------------------------------
# model-spec files
# ---------------------------------------------------------------------------

def _complex_array(pairs):
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def load_model_spec(spec):
    """Build (model, theta) from a JSON-compatible mapping.

    Format: { "kind": str, "hbar": num, "k_b": num, "trunc_dim": int,
    "params": {...}, "theta": [...], "tangent": "analytic"|"finite_difference",
    "fd_step": num }.  Kind "explicit" supplies "state" and "tangents" as
    arrays of [re, im] pairs.
    """
    if not isinstance(spec, dict):
        raise ValidationError("model spec must be a mapping")
    kind = spec.get("kind")
    hbar = float(spec.get("hbar", 1.0))
    k_b = float(spec.get("k_b", 1.0))
    trunc = int(spec.get("trunc_dim", TRUNC_DIM_DEFAULT))
    params = spec.get("params", {})
    fd_step = float(spec.get("fd_step", FD_STEP_DEFAULT))
    theta = np.asarray(spec.get("theta", []), dtype=float)

    if kind == "spin_coherent":
        model = zoo_spin_coherent(float(params["s"]), float(params["m_z"]),
                                  hbar=hbar, fd_step=fd_step)
    elif kind == "squeezed":
        model = zoo_squeezed(trunc_dim=trunc, hbar=hbar, fd_step=fd_step)
    elif kind == "pm_shift":
        model = zoo_pm_shift(params.get("n", 0), trunc_dim=trunc, hbar=hbar,
                             fd_step=fd_step)
    elif kind == "canonical":
        model = zoo_canonical(params["energies"], k_b=k_b, hbar=hbar,
                              fd_step=fd_step)
    elif kind == "time_evolution":
        model = zoo_time_evolution(_complex_array(params["h"]),
                                   _complex_array(params["psi0"]),
                                   hbar=hbar, fd_step=fd_step)
    elif kind == "explicit":
        model = explicit_model(theta, _complex_array(params["state"]),
                               [_complex_array(t) for t in params["tangents"]],
                               hbar=hbar, pure=params.get("pure", True))
    else:
        raise ValidationError(f"unknown model kind: {kind!r}")

    if len(theta) != model.m:
        raise ValidationError(
            f"theta has {len(theta)} components, model needs {model.m}")
    return model, theta
