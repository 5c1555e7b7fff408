"""Real spherical harmonics on R^3 \\ {0} and their solid (homogeneous) form.

Components of degree l are stored in the flat order

    Y_l^l, Y_l^{-l}, Y_l^{l-1}, Y_l^{-l+1}, ..., Y_l^0

so that the degree-l block occupies indices l**2 .. (l+1)**2 of a flat
array, and the l=1 block is proportional to (x, y, z) in that order.

The polynomial coefficients entering Y_l^m are assembled once per (l, m)
with exact integer arithmetic (binomials and factorials as Python ints)
and only converted to float64 at the end, which keeps the alternating
sums free of cancellation error.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, isqrt, pi, sqrt

import numpy as np

from .backend import get_kernels
from .limits import check_degree

ZERO_NORM2_EPS = 1e-30


def sh_index(l: int, m: int) -> int:
    """Flat index of the (l, m) component in the library ordering."""
    if abs(m) > l:
        raise ValueError(f"order m={m} out of range for degree l={l}")
    if m == 0:
        return l * l + 2 * l
    if m > 0:
        return l * l + 2 * (l - m)
    return l * l + 2 * (l + m) + 1


def index_lm(i: int) -> tuple:
    """Inverse of sh_index: the (l, m) pair stored at flat index i."""
    if i < 0:
        raise ValueError(f"flat index must be >= 0, got {i}")
    l = isqrt(i)
    offset = i - l * l
    if offset == 2 * l:
        return l, 0
    if offset % 2 == 0:
        return l, l - offset // 2
    return l, -(l - (offset - 1) // 2)


def block_slice(l: int) -> slice:
    """Slice selecting the degree-l block of a flat component array."""
    return slice(l * l, (l + 1) * (l + 1))


@dataclass(frozen=True)
class ShVector:
    """All spherical-harmonic values up to a maximum degree, flat layout."""

    max_degree: int
    values: np.ndarray

    def __post_init__(self):
        n = (self.max_degree + 1) ** 2
        if self.values.shape != (n,):
            raise ValueError(
                f"expected {n} components for max degree {self.max_degree}, "
                f"got shape {self.values.shape}"
            )
        self.values.flags.writeable = False

    def block(self, l: int) -> np.ndarray:
        if l > self.max_degree:
            raise ValueError(f"degree {l} beyond max degree {self.max_degree}")
        return self.values[block_slice(l)]


# -- exact coefficient assembly ----------------------------------------------


def _pi_terms(l: int, m: int) -> list:
    """Integer terms of the order-m polynomial part of degree l.

    Returns [(k, a_k)] such that the z-dependent factor of Y_l^m equals
    prefactor * sum_k a_k * |r|^{2k} * z^{l-2k-m} with exact integer a_k
    (the 1/2^l scaling lives in the prefactor).
    """
    terms = []
    for k in range((l - m) // 2 + 1):
        a = (
            (-1) ** k
            * comb(l, k)
            * comb(2 * l - 2 * k, l)
            * factorial(l - 2 * k)
            // factorial(l - 2 * k - m)
        )
        terms.append((k, a))
    return terms


def _norm2_over_pi(l: int, m: int) -> Fraction:
    """Exact rational q with overall prefactor sqrt(q/pi) for (l, |m|)."""
    q = Fraction(2 * l + 1, 4) * Fraction(factorial(l - m), factorial(l + m))
    if m > 0:
        q *= 2
    return q


@dataclass(frozen=True)
class PiPolynomial:
    """Exact coefficients of the z-polynomial factor for one (l, m)."""

    degree: int
    order: int
    coefficients: tuple  # ((k, Fraction), ...) for the |r|^{2k} z^{l-2k-m} terms

    @classmethod
    def build(cls, l: int, m: int) -> "PiPolynomial":
        if m < 0 or m > l:
            raise ValueError(f"order must satisfy 0 <= m <= l, got l={l}, m={m}")
        scale = Fraction(1, 2**l)
        coeffs = tuple((k, a * scale) for k, a in _pi_terms(l, m))
        return cls(degree=l, order=m, coefficients=coeffs)

    def __call__(self, z: float, r2: float = 1.0) -> float:
        """Evaluate, without the sqrt((l-m)!/(l+m)!) normalization."""
        l, m = self.degree, self.order
        return sum(float(c) * r2**k * z ** (l - 2 * k - m) for k, c in self.coefficients)


def _complex_power_coeffs(m: int):
    """Integer monomial coefficients of Re((x+iy)^m) and Im((x+iy)^m).

    Returns two dicts {(i, j): int} over monomials x^i y^j. The binomial
    sums contain only trig factors cos/sin(pi*(m-k)/2) in {-1, 0, 1}, so
    everything is exact.
    """
    re: dict = {}
    im: dict = {}
    for k in range(m + 1):
        c = comb(m, k)
        quarter = (m - k) % 4
        cosv = {0: 1, 1: 0, 2: -1, 3: 0}[quarter]
        sinv = {0: 0, 1: 1, 2: 0, 3: -1}[quarter]
        if cosv:
            re[(k, m - k)] = re.get((k, m - k), 0) + c * cosv
        if sinv:
            im[(k, m - k)] = im.get((k, m - k), 0) + c * sinv
    return re, im


def _expand_r2_powers(poly: dict) -> dict:
    """Expand {(i, j, k, p): c} with |r|^{2p} into pure {(i, j, k): c}."""
    out: dict = {}
    for (i, j, k, p), c in poly.items():
        for a in range(p + 1):
            for b in range(p - a + 1):
                c2 = c * comb(p, a) * comb(p - a, b)
                key = (i + 2 * a, j + 2 * b, k + 2 * (p - a - b))
                out[key] = out.get(key, 0) + c2
    return {key: c for key, c in out.items() if c != 0}


@lru_cache(maxsize=None)
def solid_monomials_exact(l: int, m: int):
    """Exact monomial expansion of the solid harmonic |r|^l * Y_l^m(r/|r|).

    Returns (poly, q) where poly maps (i, j, k) to a Fraction coefficient
    of x^i y^j z^k and the full harmonic is sqrt(q/pi) * poly with
    rational q > 0.
    """
    am = abs(m)
    re, im = _complex_power_coeffs(am)
    xy = re if m >= 0 else im
    scale = Fraction(1, 2**l)
    with_r2: dict = {}
    for k, a in _pi_terms(l, am):
        for (i, j), c in xy.items():
            key = (i, j, l - 2 * k - am, k)
            with_r2[key] = with_r2.get(key, 0) + a * c
    poly = {
        key: c * scale for key, c in _expand_r2_powers(with_r2).items()
    }
    return poly, _norm2_over_pi(l, am)


def solid_monomials(l: int, m: int) -> dict:
    """Float monomial coefficients {(i, j, k): c} of the solid harmonic."""
    poly, q = solid_monomials_exact(l, m)
    pref = sqrt(float(q) / pi)
    return {key: pref * float(c) for key, c in poly.items()}


def _double_factorial(n: int) -> int:
    if n <= 0:
        return 1
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def monomial_sphere_integral_over_4pi(i: int, j: int, k: int) -> Fraction:
    """Exact value of (1/4pi) * integral of x^i y^j z^k over the unit sphere."""
    if i % 2 or j % 2 or k % 2:
        return Fraction(0)
    num = (
        _double_factorial(i - 1)
        * _double_factorial(j - 1)
        * _double_factorial(k - 1)
    )
    return Fraction(num, _double_factorial(i + j + k + 1))


# -- evaluation tables --------------------------------------------------------


@dataclass(frozen=True)
class ShTables:
    """Flat coefficient tables driving the evaluation kernels.

    Terms are grouped into one segment per (l, m >= 0) pair; segment s
    contributes sum_t coeff[t] * z^zpow[t] * (r^2)^kpow[t], which is then
    routed to out_pos[s] (times Re((x+iy)^m)) and, for m > 0, to
    out_neg[s] (times Im).
    """

    max_degree: int
    coeff: np.ndarray
    zpow: np.ndarray
    kpow: np.ndarray
    seg_start: np.ndarray
    seg_m: np.ndarray
    out_pos: np.ndarray
    out_neg: np.ndarray


@lru_cache(maxsize=None)
def sh_tables(max_degree: int) -> ShTables:
    check_degree(max_degree, "max degree")
    coeff, zpow, kpow = [], [], []
    seg_start, seg_m, out_pos, out_neg = [0], [], [], []
    for l in range(max_degree + 1):
        for m in range(l + 1):
            pref = sqrt(float(_norm2_over_pi(l, m)) / pi) / 2**l
            for k, a in _pi_terms(l, m):
                coeff.append(pref * a)
                zpow.append(l - 2 * k - m)
                kpow.append(k)
            seg_start.append(len(coeff))
            seg_m.append(m)
            out_pos.append(sh_index(l, m))
            out_neg.append(sh_index(l, -m) if m > 0 else -1)
    def freeze(xs, dtype):
        arr = np.asarray(xs, dtype=dtype)
        arr.flags.writeable = False
        return arr

    return ShTables(
        max_degree=max_degree,
        coeff=freeze(coeff, np.float64),
        zpow=freeze(zpow, np.intp),
        kpow=freeze(kpow, np.intp),
        seg_start=freeze(seg_start, np.intp),
        seg_m=freeze(seg_m, np.intp),
        out_pos=freeze(out_pos, np.intp),
        out_neg=freeze(out_neg, np.intp),
    )


def _as_vec3(r) -> np.ndarray:
    v = np.asarray(r, dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


def _raw_values(x: float, y: float, z: float, max_degree: int) -> np.ndarray:
    t = sh_tables(max_degree)
    out = np.empty((max_degree + 1) ** 2, dtype=np.float64)
    get_kernels().sh_eval(
        t.coeff, t.zpow, t.kpow, t.seg_start, t.seg_m, t.out_pos, t.out_neg,
        float(x), float(y), float(z), out,
    )
    return out


def eval_sh(r, max_degree: int) -> ShVector:
    """All Y_l^m(r) for 0 <= l <= max_degree; depends only on r/|r|.

    Raises ValueError for (numerically) zero input, where the harmonics
    are undefined.
    """
    v = _as_vec3(r)
    n2 = float(v @ v)
    if n2 <= ZERO_NORM2_EPS:
        raise ValueError("spherical harmonics are undefined at the zero vector")
    u = v / sqrt(n2)
    return ShVector(max_degree, _raw_values(u[0], u[1], u[2], max_degree))


def eval_solid_sh(r, max_degree: int) -> ShVector:
    """Homogeneous extension |r|^l * Y_l^m(r/|r|); well-defined at r = 0."""
    check_degree(max_degree, "max degree")
    v = _as_vec3(r)
    return ShVector(max_degree, _raw_values(v[0], v[1], v[2], max_degree))


def eval_sh_single(l: int, m: int, r) -> float:
    """The (l, m) entry of eval_sh(r, l)."""
    if abs(m) > l:
        raise ValueError(f"order m={m} out of range for degree l={l}")
    return float(eval_sh(r, l).values[sh_index(l, m)])
