"""Sparse multivariate polynomials and directional-derivative contractions.

A :class:`MultiPolynomial` is a sparse map from exponent multi-indices to
real coefficients, together with an expansion center ``c``:

    f(x) = sum_alpha  coef[alpha] * (x - c)^alpha

Carrying the center makes recentering (exact binomial re-expansion about a
new point) and homogeneous-layer splitting first-class operations; both are
what the boundary-reduction integrator consumes.  The k-th order directional
derivative contraction

    D^k f : v^k  =  sum_{j1..jk} v_{j1} ... v_{jk} d^k f / dx_{j1}..dx_{jk}

is computed without ever materializing the derivative tensor, either by
repeated symbolic differentiation along a fixed vector (`contract`) or, for
the symbolic integrand, by the falling-factorial action on homogeneous
layers (`directional_poly`).
"""

import math
import re
from itertools import combinations_with_replacement

import numpy as np

from ._kernels import eval_terms, merge_terms, mul_terms

__all__ = [
    "MultiPolynomial",
    "contract",
    "directional_poly",
    "gradient_identity_check",
    "euler_check",
    "recenter",
    "pullback",
    "DerivativeOracle",
    "PolynomialOracle",
    "ProductOracle",
    "exp_sum_oracle",
    "sin_prod_oracle",
]

_TERM_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


class MultiPolynomial:
    """Sparse polynomial in ``dim`` variables about an expansion center."""

    __slots__ = ("dim", "exps", "coefs", "center")

    def __init__(self, dim, exps, coefs, center=None):
        self.dim = int(dim)
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, self.dim)
        coefs = np.asarray(coefs, dtype=np.float64).reshape(-1)
        if exps.shape[0] != coefs.shape[0]:
            raise ValueError("exponent rows and coefficients disagree in length")
        if exps.size and exps.min() < 0:
            raise ValueError("negative exponent in multi-index")
        self.exps, self.coefs = merge_terms(exps, coefs)
        if center is None:
            center = np.zeros(self.dim)
        center = np.asarray(center, dtype=np.float64).reshape(-1)
        if center.shape[0] != self.dim:
            raise ValueError(f"center has length {center.shape[0]}, expected {self.dim}")
        self.center = center

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim, center=None):
        return cls(dim, np.zeros((0, dim), dtype=np.int64), [], center)

    @classmethod
    def constant(cls, dim, value, center=None):
        if value == 0.0:
            return cls.zero(dim, center)
        return cls(dim, np.zeros((1, dim), dtype=np.int64), [value], center)

    @classmethod
    def monomial(cls, dim, alpha, coef=1.0, center=None):
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != dim:
            raise ValueError(f"multi-index length {len(alpha)} != dim {dim}")
        return cls(dim, np.array([alpha], dtype=np.int64), [coef], center)

    @classmethod
    def variable(cls, dim, i, center=None):
        alpha = [0] * dim
        alpha[i] = 1
        return cls.monomial(dim, alpha, 1.0, center)

    @classmethod
    def from_terms(cls, dim, terms, center=None):
        """Build from a mapping {multi-index tuple: coefficient}."""
        if not terms:
            return cls.zero(dim, center)
        exps = np.array(list(terms.keys()), dtype=np.int64)
        coefs = np.array(list(terms.values()), dtype=np.float64)
        return cls(dim, exps, coefs, center)

    @classmethod
    def parse(cls, text, dim=None):
        """Parse the term text format, e.g. ``"3.5 x0^2 x1 - 1 x2"``.

        Each term is a coefficient followed by space-separated ``xI^P``
        factors; terms are joined by ``+`` / ``-`` tokens.  Variable indices
        are 0-based.  When ``dim`` is omitted it is inferred from the largest
        index used (at least 1).
        """
        terms = []
        sign = 1.0
        cur = None
        for tok in text.split():
            if tok == "+" or tok == "-":
                if cur is not None:
                    terms.append(cur)
                    cur = None
                sign *= 1.0 if tok == "+" else -1.0
                continue
            m = _TERM_RE.match(tok)
            if m:
                if cur is None:
                    raise ValueError(f"factor {tok!r} appears before any coefficient")
                cur[1].append((int(m.group(1)), int(m.group(2) or 1)))
            else:
                if cur is not None:
                    terms.append(cur)
                try:
                    coef = float(tok)
                except ValueError:
                    raise ValueError(f"cannot parse token {tok!r} in polynomial text") from None
                cur = [sign * coef, []]
                sign = 1.0
        if cur is not None:
            terms.append(cur)
        if not terms:
            raise ValueError("empty polynomial text")
        max_idx = max((i for _, facs in terms for i, _ in facs), default=-1)
        inferred = max(max_idx + 1, 1)
        if dim is None:
            dim = inferred
        elif inferred > dim:
            raise ValueError(f"polynomial uses x{max_idx} but dim={dim}")
        acc = {}
        for coef, facs in terms:
            alpha = [0] * dim
            for i, p in facs:
                alpha[i] += p
            key = tuple(alpha)
            acc[key] = acc.get(key, 0.0) + coef
        return cls.from_terms(dim, acc)

    # -- views --------------------------------------------------------------

    @property
    def terms(self):
        """Dict view {multi-index tuple: coefficient}."""
        return {tuple(int(e) for e in row): float(c) for row, c in zip(self.exps, self.coefs)}

    @property
    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if len(self.coefs) == 0:
            return -1
        return int(self.exps.sum(axis=1).max())

    def is_homogeneous(self):
        if len(self.coefs) == 0:
            return True
        degs = self.exps.sum(axis=1)
        return bool((degs == degs[0]).all())

    def layers(self):
        """Split into homogeneous layers about the current center.

        Returns a list of ``(degree, MultiPolynomial)`` in increasing degree.
        """
        if len(self.coefs) == 0:
            return []
        degs = self.exps.sum(axis=1)
        out = []
        for d in sorted(set(int(v) for v in degs)):
            mask = degs == d
            out.append((d, MultiPolynomial(self.dim, self.exps[mask], self.coefs[mask], self.center)))
        return out

    def to_text(self):
        """Render in the parseable term text format (center folded to 0)."""
        p = self if not self.center.any() else recenter(self, np.zeros(self.dim))
        if len(p.coefs) == 0:
            return "0"
        parts = []
        for row, c in sorted(zip(map(tuple, p.exps), p.coefs), key=lambda t: (sum(t[0]), t[0])):
            facs = " ".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(row) if e
            )
            mag = repr(abs(c))
            body = f"{mag} {facs}".strip()
            if not parts:
                parts.append(body if c >= 0 else f"- {body}")
            else:
                parts.append(f"+ {body}" if c >= 0 else f"- {body}")
        return " ".join(parts)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MultiPolynomial):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            if not np.array_equal(other.center, self.center):
                other = recenter(other, self.center)
            return other
        return MultiPolynomial.constant(self.dim, float(other), self.center)

    def __add__(self, other):
        other = self._coerce(other)
        exps = np.concatenate([self.exps, other.exps], axis=0)
        coefs = np.concatenate([self.coefs, other.coefs])
        return MultiPolynomial(self.dim, exps, coefs, self.center)

    __radd__ = __add__

    def __neg__(self):
        return MultiPolynomial(self.dim, self.exps, -self.coefs, self.center)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return MultiPolynomial(self.dim, self.exps, self.coefs * float(other), self.center)
        other = self._coerce(other)
        exps, coefs = mul_terms(self.exps, self.coefs, other.exps, other.coefs)
        return MultiPolynomial(self.dim, exps, coefs, self.center)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = MultiPolynomial.constant(self.dim, 1.0, self.center)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __call__(self, point):
        point = np.asarray(point, dtype=np.float64).reshape(-1)
        if point.shape[0] != self.dim:
            raise ValueError(f"point has length {point.shape[0]}, expected {self.dim}")
        return eval_terms(self.exps, self.coefs, point - self.center)

    def diff(self, i):
        """Partial derivative in variable ``i`` (center unchanged)."""
        if not 0 <= i < self.dim:
            raise ValueError(f"variable index {i} out of range for dim {self.dim}")
        mask = self.exps[:, i] > 0
        exps = self.exps[mask].copy()
        coefs = self.coefs[mask] * exps[:, i]
        exps[:, i] -= 1
        return MultiPolynomial(self.dim, exps, coefs, self.center)

    def gradient(self):
        return [self.diff(i) for i in range(self.dim)]

    def __eq__(self, other):
        if not isinstance(other, MultiPolynomial):
            return NotImplemented
        other = self._coerce(other)
        return (
            np.array_equal(self.exps, other.exps)
            and np.array_equal(self.coefs, other.coefs)
        )

    def __repr__(self):
        c = "" if not self.center.any() else f", center={self.center.tolist()}"
        return f"MultiPolynomial({self.to_text()!r}{c})"


# -- affine substitution ------------------------------------------------------


def compose_affine(f, x0, A):
    """Exact substitution ``g(s) = f(x0 + A s)``.

    ``A`` is an (n, m) matrix; the result is an m-variable polynomial with
    center 0.  The degree never increases.
    """
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != f.dim or x0.shape[0] != f.dim:
        raise ValueError(
            f"affine map shape {A.shape} / base point {x0.shape} incompatible with dim {f.dim}"
        )
    m = A.shape[1]
    if len(f.coefs) == 0:
        return MultiPolynomial.zero(m)
    # (x - c)_i evaluated on the chart is the affine form  (x0 - c)_i + (A s)_i
    shift = x0 - f.center
    one = MultiPolynomial.constant(m, 1.0)
    # cache powers of each affine form up to the max exponent it carries
    max_pow = f.exps.max(axis=0)
    powers = []
    for i in range(f.dim):
        if max_pow[i] == 0:
            powers.append(None)
            continue
        terms = {}
        if shift[i] != 0.0:
            terms[(0,) * m] = shift[i]
        for j in range(m):
            if A[i, j] != 0.0:
                key = tuple(1 if t == j else 0 for t in range(m))
                terms[key] = terms.get(key, 0.0) + A[i, j]
        form = MultiPolynomial.from_terms(m, terms)
        cache = [one, form]
        for _ in range(2, int(max_pow[i]) + 1):
            cache.append(cache[-1] * form)
        powers.append(cache)
    total = MultiPolynomial.zero(m)
    for row, c in zip(f.exps, f.coefs):
        term = MultiPolynomial.constant(m, float(c))
        for i in range(f.dim):
            e = int(row[i])
            if e:
                term = term * powers[i][e]
        total = total + term
    return total


def recenter(f, new_center):
    """Re-express ``f`` in powers of ``(x - new_center)``; values unchanged."""
    new_center = np.asarray(new_center, dtype=np.float64).reshape(-1)
    if new_center.shape[0] != f.dim:
        raise ValueError(f"center has length {new_center.shape[0]}, expected {f.dim}")
    if np.array_equal(new_center, f.center):
        return f
    g = compose_affine(f, new_center, np.eye(f.dim))
    return MultiPolynomial(f.dim, g.exps, g.coefs, new_center)


def pullback(f, chart):
    """Restriction of ``f`` to an affine chart: ``s -> f(chart.x0 + chart.A s)``."""
    return compose_affine(f, chart.x0, chart.A)


# -- directional-derivative contractions --------------------------------------


def contract(f, k, x, z0):
    """``D^k f : (x - z0)^k`` at ``x`` by iterated differentiation along ``x - z0``.

    The derivative tensor is never formed: each sweep replaces ``g`` by the
    directional derivative ``sum_i v_i dg/dx_i`` with ``v = x - z0`` fixed.
    """
    if k < 0:
        raise ValueError("contraction order must be non-negative")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    z0 = np.asarray(z0, dtype=np.float64).reshape(-1)
    if x.shape[0] != f.dim or z0.shape[0] != f.dim:
        raise ValueError(f"point length does not match dim {f.dim}")
    v = x - z0
    g = f
    for _ in range(k):
        acc = MultiPolynomial.zero(f.dim, g.center)
        for i in range(f.dim):
            if v[i] != 0.0:
                acc = acc + g.diff(i) * float(v[i])
        g = acc
    return g(x)


def directional_poly(f, k, z0):
    """The symbolic integrand ``x -> D^k f : (x - z0)^k``.

    On a layer homogeneous of degree d about ``z0`` the contraction acts as
    the falling factorial d (d-1) ... (d-k+1); recentering makes the layer
    split exact.
    """
    if k < 0:
        raise ValueError("contraction order must be non-negative")
    g = recenter(f, z0)
    degs = g.exps.sum(axis=1)
    fall = np.ones(len(degs))
    for j in range(k):
        fall = fall * (degs - j)
    return MultiPolynomial(g.dim, g.exps, g.coefs * fall, g.center)


def gradient_identity_check(f, k, x, z0):
    """Both sides of the step identity
    ``(x-z0) . grad(D^k f : (x-z0)^k) = k D^k f:(x-z0)^k + D^{k+1} f:(x-z0)^{k+1}``.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    z0 = np.asarray(z0, dtype=np.float64).reshape(-1)
    tk = directional_poly(f, k, z0)
    lhs = sum((x[i] - z0[i]) * tk.diff(i)(x) for i in range(f.dim))
    rhs = k * contract(f, k, x, z0) + contract(f, k + 1, x, z0)
    return lhs, rhs


def euler_check(f, x, z0):
    """First-order contraction of a polynomial homogeneous about ``z0``.

    Returns ``D f . (x - z0)`` and verifies it equals ``d * f(x)`` where d is
    the homogeneity degree; raises for mixed-degree input.
    """
    g = recenter(f, z0)
    if not g.is_homogeneous():
        degs = sorted(set(int(v) for v in g.exps.sum(axis=1)))
        raise ValueError(f"polynomial is not homogeneous about z0 (degrees {degs})")
    d = max(g.degree, 0)
    val = contract(f, 1, x, z0)
    ref = d * f(np.asarray(x, dtype=np.float64))
    scale = max(abs(ref), 1.0)
    if abs(val - ref) > 1e-10 * scale:
        raise ValueError(f"homogeneous contraction {val} != degree * value {ref}")
    return val


# -- derivative oracles for non-polynomial integrands -------------------------


class DerivativeOracle:
    """Evaluator of ``D^k f : v^k`` at a point, for k = 0..max_order.

    Only equal copies of a single direction vector are ever requested, which
    is what every expansion formula consumes.
    """

    dim = None
    max_order = None

    def directional(self, k, x, v):
        raise NotImplementedError

    def value(self, x):
        return self.directional(0, x, np.zeros(self.dim))


class PolynomialOracle(DerivativeOracle):
    """Adapter presenting a MultiPolynomial through the oracle interface."""

    def __init__(self, poly):
        self.poly = poly
        self.dim = poly.dim
        self.max_order = None  # any order

    def directional(self, k, x, v):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        v = np.asarray(v, dtype=np.float64).reshape(-1)
        g = self.poly
        for _ in range(k):
            acc = MultiPolynomial.zero(g.dim, g.center)
            for i in range(g.dim):
                if v[i] != 0.0:
                    acc = acc + g.diff(i) * float(v[i])
            g = acc
        return g(x)


def _compositions(total, parts):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class ProductOracle(DerivativeOracle):
    """Oracle for separable products ``f(x) = prod_i g_i(x_i)``.

    ``factors`` supply 1-d derivatives ``g_i^{(m)}(t)``; the k-th directional
    contraction is the multinomial sum over derivative splittings
    ``sum_{|b|=k} k!/b! v^b prod_i g_i^{(b_i)}(x_i)``.
    """

    def __init__(self, factors):
        self.factors = list(factors)
        self.dim = len(self.factors)
        self.max_order = None

    def directional(self, k, x, v):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        v = np.asarray(v, dtype=np.float64).reshape(-1)
        base = [fac(0, x[i]) for i, fac in enumerate(self.factors)]
        if k == 0:
            return float(np.prod(base))
        total = 0.0
        kfact = math.factorial(k)
        for beta in _compositions(k, self.dim):
            w = kfact
            term = 1.0
            for i, b in enumerate(beta):
                w //= math.factorial(b)
                term *= (v[i] ** b) * (self.factors[i](b, x[i]) if b else base[i])
            total += w * term
        return total


def _exp_factor(m, t):
    return math.exp(t)


def _sin_factor(m, t):
    return math.sin(t + m * math.pi / 2.0)


def exp_sum_oracle(dim):
    """f(x) = exp(x_1 + ... + x_n)."""
    return ProductOracle([_exp_factor] * dim)


def sin_prod_oracle(dim):
    """f(x) = sin(x_1) * ... * sin(x_n)."""
    return ProductOracle([_sin_factor] * dim)
