"""
Characteristic polynomial of the eigenvector recurrence,

    p(x) = (1 - x)^{2r} - (-1)^r * lambda * x^r,

and its 2r roots in closed form. Roots are labelled (k, ell), k = 0..r-1,
ell in {0, 1}, with mu_k = lambda^{1/r} e^{2 pi i k / r} and
rho_{k,ell} = (2 - mu_k +- sqrt(mu_k^2 - 4 mu_k)) / 2 on the principal branch.
"""

import cmath
from dataclasses import dataclass
from itertools import combinations
from math import comb, sqrt

import numpy as np

from utils.errors import InvariantViolation
from utils.guardrail import require_lambda, require_order
from utils.logger import get_logger

logger = get_logger(__name__)

SILVER = 1.0 + sqrt(2.0)
CONDITIONING_FLOOR = 1e-8
REAL_TOL = 1e-12
UNIMODULAR_TOL = 1e-10


@dataclass(frozen=True)
class Root:
    k: int
    ell: int
    value: complex

    @property
    def label(self):
        return f"rho_{self.k},{self.ell}"


@dataclass(frozen=True)
class RootSet:
    lam: float
    r: int
    roots: tuple
    min_distance: float
    ill_conditioned: bool

    @property
    def values(self):
        """Roots in label order: position 2k + ell."""
        return np.array([root.value for root in self.roots], dtype=complex)

    def root(self, k, ell):
        return self.roots[2 * k + ell]

    def magnitude_order(self):
        """Positions sorted by |rho|, ties broken by (k, ell)."""
        return sorted(range(len(self.roots)), key=lambda p: (abs(self.roots[p].value), p))

    def conjugate_partner(self, position):
        k, ell = divmod(position, 2)
        if k == 0:
            return 1 - ell
        return 2 * ((self.r - k) % self.r) + ell


@dataclass(frozen=True)
class RootClassification:
    tags: tuple
    real_count: int
    unimodular_count: int
    expanding_count: int
    contracting_count: int


@dataclass(frozen=True)
class SeparationStats:
    min_distance: float
    max_distance: float
    min_distance_normalized: float
    max_distance_normalized: float
    min_modulus_gap_normalized: float
    ill_conditioned: bool


def eval_p(x, lam, r):
    return (1 - x) ** (2 * r) - (-1) ** r * lam * x ** r


def eval_p_factored(x, lam, r):
    """prod_k (-(1 - x)^2 - mu_k x), which equals (-1)^r p(x)."""
    r = require_order(r)
    out = 1.0 + 0.0j
    for k in range(r):
        mu = _mu(lam, r, k)
        out *= -(1 - x) ** 2 - mu * x
    return out


def _unit(k, r):
    """e^{2 pi i k / r}, exact on the real axis."""
    if k == 0:
        return complex(1.0, 0.0)
    if 2 * k == r:
        return complex(-1.0, 0.0)
    return cmath.exp(2j * cmath.pi * k / r)


def _mu(lam, r, k):
    return lam ** (1.0 / r) * _unit(k, r)


def roots_for(lam, r):
    """
    Closed-form roots. Labels k > r/2 are the conjugates of r - k, which keeps
    the conjugate symmetry exact when mu_k (mu_k - 4) sits on the branch cut.
    """
    r = require_order(r)
    lam = require_lambda(lam, r)
    values = [0j] * (2 * r)
    for k in range(r // 2 + 1):
        mu = _mu(lam, r, k)
        disc = cmath.sqrt(mu * mu - 4.0 * mu)
        values[2 * k] = (2.0 - mu + disc) / 2.0
        values[2 * k + 1] = (2.0 - mu - disc) / 2.0
    for k in range(r // 2 + 1, r):
        values[2 * k] = values[2 * (r - k)].conjugate()
        values[2 * k + 1] = values[2 * (r - k) + 1].conjugate()

    distances = [abs(a - b) for a, b in combinations(values, 2)]
    min_distance = min(distances) if distances else float("inf")
    ill = min_distance < CONDITIONING_FLOOR
    if ill:
        logger.warning("roots for lambda=%g r=%d nearly coincide (min distance %.3e)", lam, r, min_distance)
    roots = tuple(Root(k, ell, values[2 * k + ell]) for k in range(r) for ell in (0, 1))
    return RootSet(lam, r, roots, min_distance, ill)


def companion_roots(lam, r):
    """Oracle: eigenvalues of the companion matrix of p."""
    r = require_order(r)
    coeffs = np.zeros(2 * r + 1)
    for k in range(2 * r + 1):
        coeffs[2 * r - k] += (-1) ** k * comb(2 * r, k)
    coeffs[2 * r - r] -= (-1) ** r * lam
    return np.roots(coeffs)


def hausdorff_distance(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    dist = np.abs(a[:, None] - b[None, :])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _is_real(value):
    return abs(value.imag) <= REAL_TOL * max(1.0, abs(value))


def _is_unimodular(value):
    return abs(abs(value) - 1.0) <= UNIMODULAR_TOL


def classify(rootset):
    r = rootset.r
    tags = []
    for pos, root in enumerate(rootset.roots):
        real = _is_real(root.value)
        unimodular = _is_unimodular(root.value)
        should_be_real = r % 2 == 0 and 2 * root.k == r
        if real != should_be_real:
            raise InvariantViolation("root_real", f"{root.label} real={real}, expected {should_be_real}",
                                     index=pos, values={"re": root.value.real, "im": root.value.imag})
        if unimodular != (root.k == 0):
            raise InvariantViolation("root_unimodular", f"{root.label} has |rho|={abs(root.value)!r}",
                                     index=pos, values={"abs": abs(root.value)})
        tag = {"unimodular"} if unimodular else {"expanding" if abs(root.value) > 1.0 else "contracting"}
        if real:
            tag.add("real")
        tags.append(tuple(sorted(tag)))

    unimodular_count = sum("unimodular" in t for t in tags)
    if unimodular_count != 2:
        raise InvariantViolation("root_unimodular_count", f"{unimodular_count} unimodular roots, expected 2",
                                 values={"count": unimodular_count})
    order = rootset.magnitude_order()
    middle = {order[r - 1], order[r]}
    if middle != {0, 1}:
        raise InvariantViolation("root_magnitude_order", "unimodular roots are not in the middle of the magnitude order",
                                 values={"middle": sorted(middle)})
    return RootClassification(
        tags=tuple(tags),
        real_count=sum("real" in t for t in tags),
        unimodular_count=unimodular_count,
        expanding_count=sum("expanding" in t for t in tags),
        contracting_count=sum("contracting" in t for t in tags),
    )


def _paired(rootset, a, b):
    """Conjugate, inverse, or conjugate-inverse partners."""
    ka, la = divmod(a, 2)
    kb, lb = divmod(b, 2)
    if ka == 0 and kb == 0:
        return True
    inverse = ka == kb
    conj = b == rootset.conjugate_partner(a)
    conj_inverse = ka != 0 and kb == (rootset.r - ka) % rootset.r and lb == 1 - la
    return inverse or conj or conj_inverse


def separation_stats(rootset):
    r, lam = rootset.r, rootset.lam
    scale = lam ** (1.0 / (2 * r))
    values = rootset.values
    pairs = list(combinations(range(2 * r), 2))
    distances = np.array([abs(values[a] - values[b]) for a, b in pairs])
    upper = 2.0 * SILVER * scale
    worst = int(np.argmax(distances))
    if distances[worst] > upper * (1.0 + 1e-12):
        raise InvariantViolation("root_spread", f"pair {pairs[worst]} at distance {distances[worst]!r} > {upper!r}",
                                 index=pairs[worst], values={"distance": float(distances[worst]), "bound": upper})
    gaps = [abs(abs(values[a]) - abs(values[b])) for a, b in pairs if not _paired(rootset, a, b)]
    min_gap = min(gaps) / scale if gaps else float("inf")
    return SeparationStats(
        min_distance=float(distances.min()),
        max_distance=float(distances.max()),
        min_distance_normalized=float(distances.min() / scale),
        max_distance_normalized=float(distances.max() / scale),
        min_modulus_gap_normalized=float(min_gap),
        ill_conditioned=bool(distances.min() < CONDITIONING_FLOOR),
    )


def check_rootset(rootset, residual_tol=1e-10, pairing_tol=1e-10):
    """Residual, inverse pairing, conjugacy and the modulus / distance-to-one bounds."""
    r, lam = rootset.r, rootset.lam
    scale = lam ** (1.0 / (2 * r))
    worst = {"residual": 0.0, "pairing": 0.0, "conjugacy": 0.0}
    for pos, root in enumerate(rootset.roots):
        rho = root.value
        residual = abs(eval_p(rho, lam, r)) / (1.0 + abs(rho)) ** (2 * r)
        if residual > residual_tol:
            raise InvariantViolation("root_residual", f"|p({root.label})| too large", index=pos,
                                     values={"residual": residual})
        worst["residual"] = max(worst["residual"], residual)

        partner = rootset.conjugate_partner(pos)
        conj_gap = abs(rho - rootset.roots[partner].value.conjugate())
        if conj_gap > pairing_tol:
            raise InvariantViolation("root_conjugacy", f"{root.label} has no conjugate partner", index=pos,
                                     values={"gap": conj_gap})
        worst["conjugacy"] = max(worst["conjugacy"], conj_gap)

        if not SILVER ** -2 * (1 - 1e-12) <= abs(rho) <= SILVER ** 2 * (1 + 1e-12):
            raise InvariantViolation("root_modulus", f"|{root.label}|={abs(rho)!r} outside the annulus", index=pos)
        to_one = abs(rho - 1.0)
        if not scale / SILVER * (1 - 1e-12) <= to_one <= SILVER * scale * (1 + 1e-12):
            raise InvariantViolation("root_distance_to_one", f"|{root.label} - 1|={to_one!r} out of range",
                                     index=pos, values={"distance": to_one, "scale": scale})

    for k in range(r):
        product = rootset.root(k, 0).value * rootset.root(k, 1).value
        gap = abs(product - 1.0)
        if gap > pairing_tol:
            raise InvariantViolation("root_inverse_pairing", f"rho_{k},0 * rho_{k},1 = {product!r}", index=k,
                                     values={"gap": gap})
        worst["pairing"] = max(worst["pairing"], gap)
    return worst


def dump_roots(rootset):
    """JSON-ready records, one per root, in label order."""
    classification = classify(rootset)
    return [
        {
            "k": root.k,
            "ell": root.ell,
            "re": root.value.real,
            "im": root.value.imag,
            "abs": abs(root.value),
            "class": "+".join(tags),
        }
        for root, tags in zip(rootset.roots, classification.tags)
    ]
