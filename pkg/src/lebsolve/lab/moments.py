"""Inequalities for fields in the kernel of a cocanceling operator.

* the moment estimate ``|int phi . f| <= C sum_j int |f| |y|^j |D^j phi|``;
* the kernel estimate ``(int |K * g|^q dnu)^(1/q) <= C int |g|`` for ``g`` in
  ``ker L(D)``, with the split ``K * g = J1 + J2`` of its proof;
* the measure duality ``|int u dmu| <= C ||A(D)u||_1``;
* the trace inequalities with ``D^(m-1) u`` or ``(-Delta)^((m-l)/2) u``.

The last three predict ``c (||nu||_{0,lam} + [[nu]]_lam)^(1/q)`` with a
calibrated scalar ``c`` per (inequality, operator), see :mod:`.calibration`.
"""
from __future__ import annotations

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .. import catalog
from .. import grid as _grid
from ..ensembles import TestEnsemble, smoothstep_cutoff
from ..errors import InputError, PreconditionError
from ..grid import GridField
from ..measures import VectorMeasure, origin_ahlfors, total_variation, wolff_condition
from ..operators import (HomogeneousOperator, apply_operator, certify, check_cocanceling,
                         verify_annihilator)
from ..solver import _H_on_modes, kernel_field
from ..trend import assess
from .calibration import calibration_constant
from .report import InequalityReport, build_report, ratio


# --- helpers ---------------------------------------------------------------

def _measure_grid(nu: VectorMeasure, lo=None, hi=None, resolution=None):
    """Grid for the test fields: the measure's own grid, or a box around the atoms."""
    if lo is not None:
        return np.asarray(lo, float), np.asarray(hi, float), tuple(int(n) for n in resolution)
    if nu.kind == "gridded":
        return nu.lo, nu.hi, nu.resolution
    reach = float(np.max(np.abs(nu.points))) if len(nu.points) else 1.0
    lo, hi, res = _grid.centered_box(2 * max(reach, 1e-12), resolution or 128, nu.dim_N)
    return lo, hi, res


class _Quadrature:
    """``int |F|^q dnu`` for fields on a fixed grid (nodes or interpolation at atoms)."""

    def __init__(self, nu: VectorMeasure, lo, hi, res):
        tv = total_variation(nu).measure
        self.lo, self.hi, self.res = lo, hi, res
        if tv.kind == "gridded":
            if tv.resolution != tuple(res) or not (np.allclose(tv.lo, lo) and np.allclose(tv.hi, hi)):
                raise InputError("gridded measure and test fields must share a grid")
            self.weights = tv.density[0].real * tv.cell_volume
            self.points = None
        else:
            self.points = tv.points
            self.weights = tv.weights[:, 0].real
            self.axes = _grid.node_coords(lo, hi, res)
            top = np.array([a[-1] for a in self.axes])
            if len(self.points) and (np.any(self.points < lo) or np.any(self.points > top)):
                raise InputError("atoms outside the test-field grid")

    def values(self, F: np.ndarray) -> np.ndarray:
        """Field values (value_dim, ...) where the measure lives."""
        if self.points is None:
            return F
        out = []
        for comp in F:
            re = RegularGridInterpolator(self.axes, comp.real)(self.points)
            im = RegularGridInterpolator(self.axes, comp.imag)(self.points)
            out.append(re + 1j * im)
        return np.array(out)

    def lq(self, F: np.ndarray, q: float) -> float:
        a = np.sqrt(np.sum(np.abs(self.values(F)) ** 2, axis=0))
        return float(np.sum(a**q * self.weights)) ** (1.0 / q)


def _measure_hypotheses(nu: VectorMeasure, lam: float) -> tuple:
    """Origin control and Wolff-type bracket at exponent ``lam``."""
    if lam <= 0:
        return {"exponent": {"met": False, "value": lam, "reason": "exponent must be positive"}}, None
    o = origin_ahlfors(nu, lam)
    w = wolff_condition(nu, lam)
    hyp = {
        "origin_ahlfors": {"met": bool(np.isfinite(o.value) and not o.trend.divergent),
                           "value": o.value, "trend": o.trend.kind, "lambda": lam},
        "wolff_bracket": {"met": bool(np.isfinite(w.value) and not w.trend.divergent),
                          "value": w.value, "trend": w.trend.kind, "lambda": lam},
    }
    return hyp, o.value + w.value


def _prediction(key: str, op_name: str, functional, q: float, calibration) -> tuple:
    c = calibration_constant(key, op_name) if calibration is None else float(calibration)
    if c is None or functional is None or not np.isfinite(functional):
        return None, {"key": [key, op_name], "c": c}
    return c * functional ** (1.0 / q), {"key": [key, op_name], "c": c, "functional": functional}


def _ensemble(lo, hi, res, value_dim, size, seed, given):
    if given is not None:
        members = list(given)
        if not members:
            raise InputError("empty ensemble")
        return members, getattr(given, "seed", None)
    if size < 1:
        raise InputError("ensemble size must be positive")
    ens = TestEnsemble.generate(size, lo, hi, res, value_dim, seed)
    return ens.fields, seed


def _norm1(F: GridField) -> float:
    return F.lp_norm(1)


def _multiplier(u: GridField, symbol) -> GridField:
    return u.with_samples(_grid.physical(symbol * _grid.spectral(u.samples)))


# --- cocanceling moment estimate ---------------------------------------------

def project_kernel(L: HomogeneousOperator, f: GridField, tol: float = 1e-10) -> GridField:
    """Project every Fourier mode of ``f`` onto ``ker L(k)``.

    The zero mode goes to the intersection of all kernels, which is zero for
    a cocanceling ``L`` (an integrable field in ``ker L(D)`` has zero mean).
    """
    if f.dim != L.dim_N or f.value_dim != L.dimE:
        raise InputError("field does not match the operator")
    k = _grid.wavevector_grid(f.lo, f.hi, f.resolution).reshape(L.dim_N, -1).T
    fh = _grid.spectral(f.samples).reshape(L.dimE, -1)
    sym = L.symbol(k)
    P = np.eye(L.dimE) - np.linalg.pinv(sym, rcond=tol) @ sym
    out = np.einsum("kij,jk->ik", P, fh)
    zero = np.all(k == 0, axis=1)
    if check_cocanceling(L).cocanceling:
        out[:, zero] = 0
    return f.with_samples(_grid.physical(out.reshape(f.samples.shape)))


def _kernel_residual(L: HomogeneousOperator, f: GridField) -> float:
    nf = float(np.linalg.norm(f.samples))
    if nf == 0:
        return 0.0
    return float(np.linalg.norm(f.samples - project_kernel(L, f).samples)) / nf


def cocanceling_moment_check(L: HomogeneousOperator, f: GridField, phi_ensemble=None,
                             ensemble_size: int = 100, seed: int = 0, slack: float = 1.25,
                             calibration=None, tol: float = 1e-10) -> InequalityReport:
    """``|int phi . f| <= C sum_{j<=m} int |f| |y|^j |D^j phi|`` with ``m`` the order of ``L``."""
    res_f = _kernel_residual(L, f)
    if res_f > tol:
        raise PreconditionError(f"f is not in ker L(D): projection residual {res_f:.3e}")
    phis, seed_used = _ensemble(f.lo, f.hi, f.resolution, L.dimE, ensemble_size, seed, phi_ensemble)
    r = _grid.radii(f.lo, f.hi, f.resolution, np.zeros(f.dim))
    af = f.norm()
    derivs = [catalog.total_derivative(L.dim_N, j) for j in range(1, L.order_m + 1)]
    ratios, lhs_all, rhs_all = [], [], []
    for phi in phis:
        lhs = abs(complex(np.sum(phi.samples * f.samples) * f.cell_volume))
        rhs = 0.0
        for j, D in enumerate(derivs, start=1):
            dphi = np.sqrt(sum(np.sum(np.abs(apply_operator(D, phi.with_samples(c[None])).samples) ** 2, axis=0)
                               for c in phi.samples))
            rhs += float(np.sum(af * r**j * dphi) * f.cell_volume)
        lhs_all.append(lhs)
        rhs_all.append(rhs)
        ratios.append(ratio(lhs, rhs))
    cert = check_cocanceling(L)
    hyp = {"cocanceling": {"met": cert.cocanceling, "intersection_dim": cert.intersection_dim},
           "kernel_residual": {"met": True, "value": res_f}}
    c = calibration_constant("cocanceling_moment", L.name) if calibration is None else float(calibration)
    return build_report("cocanceling_moment", ratios, c, slack, hyp,
                        terms={"lhs": lhs_all, "rhs": rhs_all},
                        calibration={"key": ["cocanceling_moment", L.name], "c": c}, seed=seed_used)


# --- fundamental lemma -----------------------------------------------------

def _annihilator(op: HomogeneousOperator) -> HomogeneousOperator:
    if op.name.startswith("grad"):
        return catalog.curl_antisym(op.dim_N)
    raise InputError(f"no default annihilator for {op.name!r}; pass L")


def _frame_mean(F: np.ndarray) -> np.ndarray:
    """Mean over the outer frame of a periodic grid (index 0 along any axis)."""
    N = F.ndim - 1
    mask = np.zeros(F.shape[1:], dtype=bool)
    for j in range(N):
        sl = [slice(None)] * N
        sl[j] = 0
        mask[tuple(sl)] = True
    return F[:, mask].mean(axis=1)


def fundamental_lemma_check(op: HomogeneousOperator, nu: VectorMeasure, q: float = 1.0, ell=None,
                            L: HomogeneousOperator | None = None, g_ensemble=None,
                            ensemble_size: int = 100, seed: int = 0, padding: int = 2,
                            slack: float = 1.25, calibration=None, lo=None, hi=None, resolution=None,
                            rho_points: int = 200) -> InequalityReport:
    """``(int |K * g|^q dnu)^(1/q) <= C int |g|`` for ``g`` in ``ker L(D)``.

    ``K`` is the reproducing kernel of ``op`` (homogeneous of degree
    ``m - N``), applied as the multiplier ``i^-m H(k)`` on the box enlarged
    ``padding`` times; the additive constant is fixed by making ``K * g``
    vanish on average over the outer frame.  Without ``g_ensemble`` the
    members are ``g = A(D)u`` for a seeded ensemble ``u``.

    ``terms`` carries the split ``K * g = J1 + J2`` with
    ``J1(x) = K(x) int psi(y/|x|) g(y) dy`` (``psi`` the smoothstep cutoff,
    ``J1(0) = 0``), evaluated in the same ``L^q(nu)`` norm.
    """
    N, m = op.dim_N, op.order_m
    ell = m if ell is None else ell
    if not 0 < ell < N:
        raise InputError("need 0 < l < N")
    if q < 1:
        raise InputError("need q >= 1")
    L = _annihilator(op) if L is None else L
    lo, hi, res = _measure_grid(nu, lo, hi, resolution)
    quad = _Quadrature(nu, lo, hi, res)

    if g_ensemble is None:
        us, seed_used = _ensemble(lo, hi, res, op.dimE, ensemble_size, seed, None)
        gs = [apply_operator(op, u) for u in us]
    else:
        gs, seed_used = _ensemble(lo, hi, res, op.dimF, ensemble_size, seed, g_ensemble)
        worst = max(_kernel_residual(L, g) for g in gs)
        if worst > 1e-8:
            raise PreconditionError(f"g is not in ker L(D): projection residual {worst:.3e}")

    plo, phi_, pres, off = _grid.padded_box(lo, hi, res, padding)
    H = _H_on_modes(op, plo, phi_, pres) * (1j ** -m)
    inner = (slice(None),) + tuple(slice(o, o + n) for o, n in zip(off, res))

    # split: K at the nodes and the cutoff moments F(rho)
    Kp = kernel_field(op, plo, phi_, pres)
    x = _grid.mesh(lo, hi, res)
    idx = tuple(np.rint(x[j] / ((phi_ - plo)[j] / pres[j])).astype(int) % pres[j] for j in range(N))
    Kx = Kp[(slice(None), slice(None)) + idx]
    rx = np.sqrt(np.sum(x**2, axis=0))
    h = float(np.max((hi - lo) / np.asarray(res)))
    rho = np.geomspace(h / 2, 2 * float(rx.max()), rho_points)
    psi = smoothstep_cutoff(rx.ravel()[None, :] / rho[:, None])
    cell = float(np.prod((hi - lo) / np.asarray(res)))

    ratios, lhs_all, rhs_all, j1_all, j2_all = [], [], [], [], []
    for g in gs:
        gp = np.zeros((op.dimF, *pres), dtype=complex)
        gp[inner] = g.samples
        Kg = _grid.physical(np.einsum("ef...,f...->e...", H, _grid.spectral(gp)))
        Kg = Kg - _frame_mean(Kg).reshape((-1,) + (1,) * N)
        Kg = Kg[inner]
        lhs = quad.lq(Kg, q)
        rhs = _norm1(g)
        Fr = psi @ g.samples.reshape(op.dimF, -1).T * cell  # (rho, dimF)
        lr = np.log(np.maximum(rx, h / 2))
        Fx = np.stack([np.interp(lr, np.log(rho), Fr[:, f].real)
                       + 1j * np.interp(lr, np.log(rho), Fr[:, f].imag) for f in range(op.dimF)])
        J1 = np.einsum("ef...,f...->e...", Kx, Fx)
        J1[(slice(None),) + tuple(np.argwhere(rx == 0).T)] = 0
        J2 = Kg - J1
        lhs_all.append(lhs)
        rhs_all.append(rhs)
        j1_all.append(quad.lq(J1, q))
        j2_all.append(quad.lq(J2, q))
        ratios.append(ratio(lhs, rhs))

    lam = (N - ell) * q
    hyp, functional = _measure_hypotheses(nu, lam)
    cc = check_cocanceling(L)
    hyp["cocanceling"] = {"met": cc.cocanceling, "operator": L.name}
    if g_ensemble is None:
        ann = verify_annihilator(op, L)
        hyp["annihilator"] = {"met": ann.all_contained, "max_relative_product": ann.max_relative_product}
    predicted, cal = _prediction("fundamental_lemma", op.name, functional, q, calibration)
    return build_report("fundamental_lemma", ratios, predicted, slack, hyp,
                        terms={"lhs": lhs_all, "rhs": rhs_all, "J1": j1_all, "J2": j2_all},
                        calibration=cal, seed=seed_used,
                        notes=[f"grid {list(res)}, padding {padding}, q={q}, l={ell}"])


# --- measure duality -------------------------------------------------------

def log_family(lo, hi, resolution, eps_list) -> list:
    """``u_eps = psi(|x| / a) * (-log(|x|^2 + eps^2) / 2)`` with ``a`` half the box width.

    The cutoff keeps every member inside the inner half of the box.
    """
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    r = _grid.radii(lo, hi, resolution, (lo + hi) / 2)
    a = float(np.min(hi - lo)) / 2
    cut = smoothstep_cutoff(r / a)
    return [GridField(lo, hi, (cut * -0.5 * np.log(r**2 + e**2))[None].astype(complex)) for e in eps_list]


def _pairing(quad: _Quadrature, mu: VectorMeasure, u: np.ndarray) -> complex:
    if mu.kind == "gridded":
        return complex(np.sum(u * mu.density) * mu.cell_volume)
    vals = quad.values(u)
    return complex(np.sum(vals.T * mu.weights))


def measure_duality_check(op: HomogeneousOperator, mu: VectorMeasure, u_ensemble=None,
                          ensemble_size: int = 100, seed: int = 0, slack: float = 1.25,
                          calibration=None, family=None, lo=None, hi=None,
                          resolution=None) -> InequalityReport:
    """``|int u . dmu| <= C ||A(D)u||_1`` over an ensemble.

    The prediction uses the functionals at exponent ``N - m`` with the same
    calibration scalar as :func:`fundamental_lemma_check`.  ``family`` is an
    optional sequence of fields ordered by increasing concentration; its
    ratios and their trend are recorded under ``terms["family"]``.
    """
    N, m = op.dim_N, op.order_m
    if mu.dim_N != N or mu.dimE != op.dimE:
        raise InputError("measure does not match operator")
    lo, hi, res = _measure_grid(mu, lo, hi, resolution)
    quad = _Quadrature(mu, lo, hi, res)
    us, seed_used = _ensemble(lo, hi, res, op.dimE, ensemble_size, seed, u_ensemble)

    def side_ratio(u):
        lhs = abs(_pairing(quad, mu, u.samples))
        rhs = _norm1(apply_operator(op, u))
        return lhs, rhs, ratio(lhs, rhs)

    out = [side_ratio(u) for u in us]
    cert = certify(op)
    hyp = {"elliptic": {"met": bool(cert.elliptic)}, "canceling": {"met": bool(cert.canceling)}}
    if N - m > 0:
        mh, functional = _measure_hypotheses(mu, N - m)
        hyp.update(mh)
    else:
        hyp["order"] = {"met": False, "reason": "need m < N"}
        functional = None
    predicted, cal = _prediction("fundamental_lemma", op.name, functional, 1.0, calibration)
    terms = {"lhs": [o[0] for o in out], "rhs": [o[1] for o in out]}
    if family is not None:
        fam = [side_ratio(u)[2] for u in family]
        terms["family"] = {"ratios": fam, "trend": assess(range(len(fam)), fam).to_document()}
    return build_report("measure_duality", [o[2] for o in out], predicted, slack, hyp, terms=terms,
                        calibration=cal, seed=seed_used)


# --- trace inequalities ----------------------------------------------------

TRACE_FORMS = ("derivative", "fractional")


def trace_inequality_check(op: HomogeneousOperator, nu: VectorMeasure, q: float = 1.0, ell: float = 1.0,
                           u_ensemble=None, ensemble_size: int = 100, seed: int = 0,
                           form: str = "derivative", slack: float = 1.25, calibration=None,
                           lo=None, hi=None, resolution=None) -> InequalityReport:
    """``(int |T u|^q dnu)^(1/q) <= C ||A(D)u||_1``.

    ``form="derivative"`` takes ``T u = D^(m-1) u`` (all derivatives of order
    ``m - 1``, tensor norm); ``form="fractional"`` takes the fractional power
    ``(-Delta)^((m-l)/2)`` with multiplier ``|k|^(m-l)``.
    """
    N, m = op.dim_N, op.order_m
    if form not in TRACE_FORMS:
        raise InputError(f"form must be one of {TRACE_FORMS}")
    if not (0 < ell < N and ell <= m):
        raise InputError("exponent out of range: need 0 < l < N and l <= m")
    if q < 1:
        raise InputError("need q >= 1")
    lo, hi, res = _measure_grid(nu, lo, hi, resolution)
    quad = _Quadrature(nu, lo, hi, res)
    us, seed_used = _ensemble(lo, hi, res, op.dimE, ensemble_size, seed, u_ensemble)
    if form == "derivative":
        D = catalog.total_derivative(N, m - 1) if m > 1 else None
    else:
        k = _grid.wavevector_grid(lo, hi, res)
        mult = np.sqrt(np.sum(k**2, axis=0)) ** (m - ell)

    ratios, lhs_all, rhs_all = [], [], []
    for u in us:
        if form == "derivative":
            T = u.samples if D is None else np.concatenate(
                [apply_operator(D, u.with_samples(c[None])).samples for c in u.samples])
        else:
            T = _multiplier(u, mult).samples
        lhs = quad.lq(T, q)
        rhs = _norm1(apply_operator(op, u))
        lhs_all.append(lhs)
        rhs_all.append(rhs)
        ratios.append(ratio(lhs, rhs))
    hyp, functional = _measure_hypotheses(nu, (N - ell) * q)
    predicted, cal = _prediction(f"trace_{form}", op.name, functional, q, calibration)
    return build_report(f"trace_{form}", ratios, predicted, slack, hyp,
                        terms={"lhs": lhs_all, "rhs": rhs_all}, calibration=cal, seed=seed_used,
                        notes=[f"q={q}, l={ell}"])
