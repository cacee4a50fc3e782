"""Null and alternative distributions: samplers, densities, divergences.

Cube alternatives are product densities on [0,1]^d built from named 1-D
mixtures of normals (affinely mapped from their +-3 sigma range and
renormalized); spherical alternatives are von Mises-Fisher and Watson
families and mixtures thereof; spectral alternatives perturb the null along
basis eigenfunctions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .spectrum import SpectralBasis, sphere_surface_area

_GL_NODES = 256


@dataclass
class AlternativeSpec:
    """Declarative description of a distribution under the alternative."""

    family: str
    dim: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        _validate_spec(self)


def _validate_spec(spec: "AlternativeSpec") -> None:
    fam = spec.family
    p = spec.params
    if fam in ("uniform-cube", "uniform-sphere"):
        return
    if fam == "gaussian-mixture":
        w = np.asarray(p["weights"], float)
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be positive and sum to 1")
        means = np.asarray(p["means"], float)
        if means.shape != (w.size, spec.dim):
            raise ValueError("component means have wrong shape")
        u = float(p.get("uniform_weight", 0.0))
        if not 0.0 <= u < 1.0:
            raise ValueError("uniform_weight must lie in [0, 1)")
        return
    if fam.startswith("marron-wand:"):
        _mw_components(fam.split(":", 1)[1])
        return
    if fam in ("vmf", "watson"):
        mu = np.asarray(p["mu"], float)
        if abs(np.linalg.norm(mu) - 1.0) > 1e-8:
            raise ValueError("mu must be a unit vector")
        if mu.size != spec.dim:
            raise ValueError("mu has wrong dimension")
        if p["kappa"] < 0:
            raise ValueError("kappa must be nonnegative")
        return
    if fam == "sphere-mixture":
        w = np.asarray([c["weight"] for c in p["components"]], float)
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be positive and sum to 1")
        for c in p["components"]:
            if c["type"] not in ("vmf", "watson"):
                raise ValueError("unknown sphere-mixture component type")
            if abs(np.linalg.norm(np.asarray(c["mu"], float)) - 1.0) > 1e-8:
                raise ValueError("mu must be a unit vector")
        return
    if fam == "spectral":
        basis: SpectralBasis = p["basis"]
        a = np.asarray(p["coefficients"], float)
        if a.size > basis.truncation:
            raise ValueError("more coefficients than basis eigenfunctions")
        if basis.sup_norms is None:
            raise ValueError("spectral family requires eigenfunction sup norms")
        bound = float(np.sum(np.abs(a) * basis.sup_norms[: a.size]))
        if bound >= 1.0:
            raise ValueError("sup-norm bound >= 1: density 1 + u may be negative")
        return
    raise ValueError("unknown alternative family: %r" % fam)


# ---------------------------------------------------------------------------
# null samplers


def uniform_sphere(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def null_sampler(null_id: str):
    """Sampler (n, rng) -> points for a named null distribution."""
    if null_id.startswith("uniform-cube-"):
        d = int(null_id.rsplit("-", 1)[1])
        return lambda n, rng: rng.random((n, d))
    if null_id.startswith("uniform-sphere-"):
        d = int(null_id.rsplit("-", 1)[1])
        return lambda n, rng: uniform_sphere(n, d, rng)
    raise ValueError("unknown null id: %r" % null_id)


# ---------------------------------------------------------------------------
# Marron-Wand 1-D mixtures, mapped to [0,1]

_MW_TABLE = {
    "skewed-unimodal": (
        [0.2, 0.2, 0.6],
        [0.0, 0.5, 13.0 / 12.0],
        [1.0, 2.0 / 3.0, 5.0 / 9.0],
    ),
    "asymmetric-claw": (
        [0.5] + [2.0 ** (1 - l) / 31.0 for l in range(-2, 3)],
        [0.0] + [l + 0.5 for l in range(-2, 3)],
        [1.0] + [2.0 ** (-l) / 10.0 for l in range(-2, 3)],
    ),
    "smooth-comb": (
        [2.0 ** (5 - l) / 63.0 for l in range(6)],
        [(65.0 - 96.0 * 0.5 ** l) / 21.0 for l in range(6)],
        [(32.0 / 63.0) / 2.0 ** l for l in range(6)],
    ),
}


def _mw_components(name: str):
    try:
        w, mu, sd = _MW_TABLE[name]
    except KeyError:
        raise ValueError("unknown Marron-Wand density: %r" % name) from None
    return np.asarray(w, float), np.asarray(mu, float), np.asarray(sd, float)


class _Mapped1D:
    """A 1-D mixture of normals restricted to its +-3 sigma box and mapped to [0,1]."""

    def __init__(self, w, mu, sd):
        self.w, self.mu, self.sd = w, mu, sd
        self.lo = float(np.min(mu - 3.0 * sd))
        self.hi = float(np.max(mu + 3.0 * sd))
        self.width = self.hi - self.lo
        z = special.ndtr((self.hi - mu) / sd) - special.ndtr((self.lo - mu) / sd)
        self.mass = float(np.sum(w * z))

    def pdf01(self, y):
        y = np.asarray(y, float)
        x = self.lo + y * self.width
        dens = np.zeros_like(x)
        for wj, mj, sj in zip(self.w, self.mu, self.sd):
            dens += wj * np.exp(-0.5 * ((x - mj) / sj) ** 2) / (sj * math.sqrt(2 * math.pi))
        out = dens * self.width / self.mass
        return np.where((y >= 0) & (y <= 1), out, 0.0)

    def sample01(self, n, rng):
        out = np.empty(n)
        filled = 0
        while filled < n:
            m = max(n - filled, 16)
            comp = rng.choice(self.w.size, size=m, p=self.w)
            x = rng.standard_normal(m) * self.sd[comp] + self.mu[comp]
            keep = x[(x >= self.lo) & (x <= self.hi)]
            take = min(keep.size, n - filled)
            out[filled:filled + take] = keep[:take]
            filled += take
        return (out - self.lo) / self.width

    def square_integral(self):
        y, w = np.polynomial.legendre.leggauss(_GL_NODES)
        y = (y + 1.0) / 2.0
        return float(np.sum(w / 2.0 * self.pdf01(y) ** 2))


def _mapped_mw(name: str) -> _Mapped1D:
    return _Mapped1D(*_mw_components(name))


# ---------------------------------------------------------------------------
# spherical constants

def vmf_log_const(d: int, kappa: float) -> float:
    """log of C(kappa) = kappa^{d/2-1} / ((2 pi)^{d/2} I_{d/2-1}(kappa))."""
    if kappa == 0:
        return -math.log(sphere_surface_area(d))
    nu = d / 2.0 - 1.0
    # ive = I_nu(kappa) * exp(-kappa)
    log_bessel = math.log(special.ive(nu, kappa)) + kappa
    return nu * math.log(kappa) - (d / 2.0) * math.log(2.0 * math.pi) - log_bessel


def watson_const(d: int, kappa: float) -> float:
    """C_W(kappa) = Gamma(d/2) / (2 pi^{d/2} M(1/2, d/2, kappa))."""
    m = float(special.hyp1f1(0.5, d / 2.0, kappa))
    return math.gamma(d / 2.0) / (2.0 * math.pi ** (d / 2.0) * m)


# ---------------------------------------------------------------------------
# sampling


def sample(spec: AlternativeSpec, n: int, seed=None) -> np.ndarray:
    """n i.i.d. draws from the alternative; deterministic given the seed."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    fam, d, p = spec.family, spec.dim, spec.params
    if fam == "uniform-cube":
        return rng.random((n, d))
    if fam == "uniform-sphere":
        return uniform_sphere(n, d, rng)
    if fam.startswith("marron-wand:"):
        m = _mapped_mw(fam.split(":", 1)[1])
        return np.column_stack([m.sample01(n, rng) for _ in range(d)])
    if fam == "gaussian-mixture":
        return _sample_gaussian_mixture(p, n, d, rng)
    if fam == "vmf":
        return sample_vmf(np.asarray(p["mu"], float), p["kappa"], n, rng)
    if fam == "watson":
        return sample_watson(np.asarray(p["mu"], float), p["kappa"], n, rng)
    if fam == "sphere-mixture":
        comps = p["components"]
        w = np.asarray([c["weight"] for c in comps], float)
        which = rng.choice(len(comps), size=n, p=w)
        out = np.empty((n, d))
        for i, c in enumerate(comps):
            idx = np.flatnonzero(which == i)
            if idx.size == 0:
                continue
            mu = np.asarray(c["mu"], float)
            if c["type"] == "vmf":
                out[idx] = sample_vmf(mu, c["kappa"], idx.size, rng)
            else:
                out[idx] = sample_watson(mu, c["kappa"], idx.size, rng)
        return out
    if fam == "spectral":
        return _sample_spectral(p, n, d, rng)
    raise ValueError("unknown alternative family: %r" % fam)


def _sample_gaussian_mixture(p, n, d, rng):
    w = np.asarray(p["weights"], float)
    means = np.asarray(p["means"], float)
    scale = float(p.get("scale", 0.05))
    uniform_weight = float(p.get("uniform_weight", 0.0))
    out = np.empty((n, d))
    filled = 0
    while filled < n:
        m = max(n - filled, 16)
        comp = rng.choice(w.size, size=m, p=w)
        x = means[comp] + scale * rng.standard_normal((m, d))
        keep = x[np.all((x >= 0.0) & (x <= 1.0), axis=1)]
        take = min(keep.shape[0], n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    if uniform_weight > 0.0:
        # contamination toward the null: with prob u the draw is uniform
        mask = rng.random(n) < uniform_weight
        out[mask] = rng.random((int(mask.sum()), d))
    return out


def sample_vmf(mu: np.ndarray, kappa: float, n: int,
               rng: np.random.Generator) -> np.ndarray:
    """von Mises-Fisher draws by the tangent-normal decomposition (Wood 1994)."""
    d = mu.size
    if kappa == 0:
        return uniform_sphere(n, d, rng)
    t = _sample_vmf_radial(kappa, d, n, rng)
    return _tangent_normal(mu, t, n, rng)


def _sample_vmf_radial(kappa, d, n, rng):
    p = d - 1
    b = p / (math.sqrt(4.0 * kappa * kappa + p * p) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + p * math.log(1.0 - x0 * x0)
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(n - filled, 16)
        z = rng.beta(p / 2.0, p / 2.0, size=m)
        t = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(m)
        ok = kappa * t + p * np.log1p(-x0 * t) - c >= np.log(u)
        keep = t[ok]
        take = min(keep.size, n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def _tangent_normal(mu, t, n, rng):
    """Combine radial coordinates t with uniform tangential directions."""
    d = mu.size
    g = rng.standard_normal((n, d))
    g -= np.outer(g @ mu, mu)
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    v = g / norms
    return t[:, None] * mu[None, :] + np.sqrt(np.maximum(1.0 - t * t, 0.0))[:, None] * v


def sample_watson(mu: np.ndarray, kappa: float, n: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Watson draws: rejection on the radial coordinate, uniform tangent."""
    d = mu.size
    if kappa == 0:
        return uniform_sphere(n, d, rng)
    # unnormalized radial density h(t) = exp(kappa t^2) (1-t^2)^{(d-3)/2}
    expo = (d - 3) / 2.0
    if expo > 0 and 2.0 * kappa > (d - 3):
        t2 = 1.0 - (d - 3) / (2.0 * kappa)
        log_env = kappa * t2 + expo * math.log((d - 3) / (2.0 * kappa))
    elif expo > 0:
        log_env = expo * math.log(1.0)  # maximum at t = 0 when kappa small
        log_env = max(log_env, 0.0)
    else:
        log_env = kappa  # expo == 0 (d == 3): max at t = +-1
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 16)
        t = rng.uniform(-1.0, 1.0, size=m)
        with np.errstate(divide="ignore"):
            logh = kappa * t * t + expo * np.log1p(-t * t)
        u = rng.random(m)
        keep = t[np.log(u) + log_env <= logh]
        take = min(keep.size, n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return _tangent_normal(mu, out, n, rng)


def _sample_spectral(p, n, d, rng):
    basis: SpectralBasis = p["basis"]
    a = np.asarray(p["coefficients"], float)
    envelope = 1.0 + float(np.sum(np.abs(a) * basis.sup_norms[: a.size]))
    proposal = null_sampler(basis.null_id)
    active = np.flatnonzero(a != 0.0)
    out = np.empty((n, d))
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 64)
        x = proposal(m, rng)
        feats = basis.features(x)[:, active]
        dens = 1.0 + feats @ a[active]
        if np.any(dens < -1e-9):
            raise RuntimeError("spectral density went negative despite envelope")
        u = rng.random(m)
        keep = x[u * envelope <= dens]
        take = min(keep.shape[0], n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


# ---------------------------------------------------------------------------
# densities


def density(spec: AlternativeSpec, x) -> np.ndarray:
    """Density w.r.t. Lebesgue measure (cube) or surface measure (sphere)."""
    x = np.atleast_2d(np.asarray(x, float))
    fam, d, p = spec.family, spec.dim, spec.params
    if fam == "uniform-cube":
        inside = np.all((x >= 0.0) & (x <= 1.0), axis=1)
        return inside.astype(float)
    if fam == "uniform-sphere":
        return np.full(x.shape[0], 1.0 / sphere_surface_area(d))
    if fam.startswith("marron-wand:"):
        m = _mapped_mw(fam.split(":", 1)[1])
        out = np.ones(x.shape[0])
        for j in range(d):
            out *= m.pdf01(x[:, j])
        return out
    if fam == "gaussian-mixture":
        return _density_gaussian_mixture(p, x, d)
    if fam == "vmf":
        mu = np.asarray(p["mu"], float)
        return np.exp(vmf_log_const(d, p["kappa"]) + p["kappa"] * (x @ mu))
    if fam == "watson":
        mu = np.asarray(p["mu"], float)
        return watson_const(d, p["kappa"]) * np.exp(p["kappa"] * (x @ mu) ** 2)
    if fam == "sphere-mixture":
        out = np.zeros(x.shape[0])
        for c in p["components"]:
            sub = AlternativeSpec(family=c["type"], dim=d,
                                  params={"mu": c["mu"], "kappa": c["kappa"]})
            out += c["weight"] * density(sub, x)
        return out
    if fam == "spectral":
        basis: SpectralBasis = p["basis"]
        a = np.asarray(p["coefficients"], float)
        u = basis.features(x)[:, : a.size] @ a
        base = (1.0 if basis.null_id.startswith("uniform-cube")
                else 1.0 / sphere_surface_area(d))
        return base * (1.0 + u)
    raise ValueError("unsupported family: %r" % fam)


def _density_gaussian_mixture(p, x, d):
    w = np.asarray(p["weights"], float)
    means = np.asarray(p["means"], float)
    scale = float(p.get("scale", 0.05))
    out = np.zeros(x.shape[0])
    for wj, mj in zip(w, means):
        z = np.prod(special.ndtr((1.0 - mj) / scale) - special.ndtr((0.0 - mj) / scale))
        logpdf = -0.5 * np.sum(((x - mj) / scale) ** 2, axis=1) \
            - d * math.log(scale * math.sqrt(2 * math.pi))
        out += wj * np.exp(logpdf) / z
    u = float(p.get("uniform_weight", 0.0))
    out = u + (1.0 - u) * out
    inside = np.all((x >= 0.0) & (x <= 1.0), axis=1)
    return np.where(inside, out, 0.0)


def make_gaussian_mixture_spec(d: int, seed=None, *, n_components: int = 5,
                               scale: float = 0.05,
                               uniform_weight: float = 0.0) -> AlternativeSpec:
    """Equal-weight Gaussian mixture with seeded means in [0.2, 0.8]^d.

    ``uniform_weight`` mixes the density toward the uniform null,
    f = u + (1 - u) mixture, which tempers the separation.
    """
    rng = np.random.default_rng(seed)
    means = 0.2 + 0.6 * rng.random((n_components, d))
    return AlternativeSpec(
        family="gaussian-mixture", dim=d,
        params={"weights": np.full(n_components, 1.0 / n_components),
                "means": means, "scale": scale,
                "uniform_weight": uniform_weight})


# ---------------------------------------------------------------------------
# chi-square divergence


def chi_square_divergence(spec: AlternativeSpec, null_id: Optional[str] = None) -> float:
    """chi^2(P, P0) = int (dP/dP0)^2 dP0 - 1 against the family's null."""
    fam, d, p = spec.family, spec.dim, spec.params
    if fam == "spectral":
        a = np.asarray(p["coefficients"], float)
        return float(np.sum(a * a))
    if fam in ("uniform-cube", "uniform-sphere"):
        return 0.0
    if fam.startswith("marron-wand:"):
        m = _mapped_mw(fam.split(":", 1)[1])
        return m.square_integral() ** d - 1.0
    if fam == "gaussian-mixture":
        return _chi2_gaussian_mixture(p, d)
    if fam == "vmf":
        k = p["kappa"]
        log_ratio = 2.0 * vmf_log_const(d, k) - vmf_log_const(d, 2.0 * k)
        return math.exp(math.log(sphere_surface_area(d)) + log_ratio) - 1.0
    if fam == "watson":
        k = p["kappa"]
        ratio = watson_const(d, k) ** 2 / watson_const(d, 2.0 * k)
        return sphere_surface_area(d) * ratio - 1.0
    raise ValueError("no quadrature path for family %r" % fam)


def _chi2_gaussian_mixture(p, d):
    w = np.asarray(p["weights"], float)
    means = np.asarray(p["means"], float)
    scale = float(p.get("scale", 0.05))
    y, gw = np.polynomial.legendre.leggauss(_GL_NODES)
    y = (y + 1.0) / 2.0
    gw = gw / 2.0
    total = 0.0
    z = special.ndtr((1.0 - means) / scale) - special.ndtr((0.0 - means) / scale)
    for a in range(w.size):
        for b in range(w.size):
            prod = 1.0
            for j in range(d):
                fa = np.exp(-0.5 * ((y - means[a, j]) / scale) ** 2) \
                    / (scale * math.sqrt(2 * math.pi)) / z[a, j]
                fb = np.exp(-0.5 * ((y - means[b, j]) / scale) ** 2) \
                    / (scale * math.sqrt(2 * math.pi)) / z[b, j]
                prod *= float(np.sum(gw * fa * fb))
            total += w[a] * w[b] * prod
    u = float(p.get("uniform_weight", 0.0))
    # chi^2 of u + (1-u) f against uniform scales by (1-u)^2
    return (1.0 - u) ** 2 * (total - 1.0)


def chi_square_divergence_quadrature(spec: AlternativeSpec, basis: SpectralBasis,
                                     nodes: int = _GL_NODES) -> float:
    """1-D quadrature cross-check of the spectral-family Parseval identity."""
    if spec.family != "spectral" or not basis.null_id.startswith("uniform-cube-1"):
        raise ValueError("quadrature cross-check supports 1-D spectral specs only")
    y, w = np.polynomial.legendre.leggauss(nodes)
    y = ((y + 1.0) / 2.0)[:, None]
    w = w / 2.0
    dens = density(spec, y)
    return float(np.sum(w * dens * dens)) - 1.0


# ---------------------------------------------------------------------------
# interpolation-class diagnostics


@dataclass(frozen=True)
class InterpolationDiagnostic:
    theta: float
    m_literal: float
    m_proof: float
    trace_literal: np.ndarray
    trace_proof: np.ndarray


def interpolation_radius(a: Sequence[float], eigenvalues: Sequence[float],
                         theta: float) -> InterpolationDiagnostic:
    """Minimal M for membership of u = sum a_k phi_k in the interpolation class.

    Two readings of the sufficient condition are reported: the literal one,
    max_K (sum_{k<=K} a_k^2/lambda_k)^{2/theta} (sum_{k>=K} a_k^2) <= M^2,
    and the variant with head exponent 1/theta and tail k >= K+1.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    a = np.asarray(a, float)
    lam = np.asarray(eigenvalues, float)
    if lam.size < a.size:
        raise ValueError("eigenvalue list shorter than coefficient list")
    a2 = a * a
    head = np.cumsum(a2 / lam[: a.size])
    tail_from_k = np.concatenate((np.cumsum(a2[::-1])[::-1], [0.0]))
    ks = np.arange(1, a.size + 1)
    lit = head ** (2.0 / theta) * tail_from_k[ks - 1]
    prf = head ** (1.0 / theta) * tail_from_k[ks]
    return InterpolationDiagnostic(
        theta=theta,
        m_literal=math.sqrt(float(lit.max(initial=0.0))),
        m_proof=math.sqrt(float(prf.max(initial=0.0))),
        trace_literal=lit,
        trace_proof=prf,
    )


# ---------------------------------------------------------------------------
# least-favorable spectral alternatives


def least_favorable(basis: SpectralBasis, n: int, s: float, theta: float,
                    delta: float, seed=None, *, c8: float = 1.0,
                    c10: float = 1.0, c2: float = 1.0,
                    mode: str = "multi") -> AlternativeSpec:
    """Spectral alternative at exact chi-square separation delta.

    ``multi`` spreads sqrt(delta / K_n) with random signs over the first K_n
    frequencies, K_n = floor(C delta^{-(theta+1)/(2s)}); ``single`` puts all
    mass on the single frequency floor(c2 n^{1/(4s)}).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    dim = _basis_dim(basis)
    if mode == "single":
        k_n = int(c2 * n ** (1.0 / (4.0 * s)))
        if k_n < 1 or k_n > basis.truncation:
            raise ValueError("single frequency outside the basis truncation")
        coeffs = np.zeros(k_n)
        coeffs[k_n - 1] = math.sqrt(delta)
    elif mode == "multi":
        c = c8 if theta == 0 else c10
        k_n = int(c * delta ** (-(theta + 1.0) / (2.0 * s)))
        k_n = max(k_n, 1)
        if k_n > basis.truncation:
            raise ValueError("K_n exceeds the basis truncation")
        rng = np.random.default_rng(seed)
        signs = rng.choice([-1.0, 1.0], size=k_n)
        coeffs = math.sqrt(delta / k_n) * signs
    else:
        raise ValueError("mode must be 'multi' or 'single'")
    return AlternativeSpec(family="spectral", dim=dim,
                           params={"basis": basis, "coefficients": coeffs})


def _basis_dim(basis: SpectralBasis) -> int:
    null_id = basis.null_id
    for prefix in ("uniform-cube-", "uniform-sphere-"):
        if null_id.startswith(prefix):
            return int(null_id[len(prefix):])
    raise ValueError("basis null id does not encode a dimension: %r" % null_id)


# ---------------------------------------------------------------------------
# serialization helpers for the CLI / plan files


def spec_to_config(spec: AlternativeSpec) -> dict:
    out = {"family": spec.family, "dim": spec.dim}
    for k, v in spec.params.items():
        if k == "basis":
            continue
        out[k] = v.tolist() if isinstance(v, np.ndarray) else v
    return out


def spec_from_config(cfg: dict, basis: Optional[SpectralBasis] = None) -> AlternativeSpec:
    cfg = dict(cfg)
    family = cfg.pop("family")
    dim = int(cfg.pop("dim"))
    if family == "spectral":
        if basis is None:
            raise ValueError("spectral alternative needs a basis")
        cfg["basis"] = basis
    return AlternativeSpec(family=family, dim=dim, params=cfg)


def alt_from_flag(text: str, basis: Optional[SpectralBasis] = None) -> AlternativeSpec:
    """Parse a `family:key=val,...` flag value into an AlternativeSpec.

    Vector values use semicolons, e.g. "vmf:dim=3,mu=0;0;1,kappa=2".
    Marron-Wand names keep their colon: "marron-wand:smooth-comb:dim=5".
    """
    head, _, rest = text.partition(":")
    if head == "marron-wand":
        name, _, rest = rest.partition(":")
        head = "marron-wand:%s" % name
    cfg: dict = {"family": head}
    for pair in filter(None, rest.split(",")):
        key, eq, val = pair.partition("=")
        if not eq:
            raise ValueError("malformed key=val pair %r in --alt" % pair)
        if ";" in val:
            cfg[key] = [float(v) for v in val.split(";")]
        else:
            try:
                cfg[key] = float(val)
            except ValueError:
                cfg[key] = val
    if "dim" not in cfg:
        raise ValueError("--alt requires a dim=... entry")
    return spec_from_config(cfg, basis=basis)
