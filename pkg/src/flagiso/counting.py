"""Point counts of finite flag varieties over F_q, by two independent routes.

The main route enumerates the Weyl group of the variety as (signed)
permutations, filters minimal coset representatives of the parabolic fixed by
the dimension sequence via the descent criterion, and accumulates q^length;
the resulting polynomial counts F_q points and its degree is the dimension.

The second route, :func:`brute_force_count`, enumerates actual flags over a
small prime field by row-reduced echelon bases, filtering by isotropy for the
split forms.  It exists purely as a ground-truth cross-check of the first.

Conventions.  Signed permutations act on positions 1..m with the special
generator at the last position (sign flip at m for types B/C, flip-and-swap of
the last two positions for type D).  For type D a variety with a Lagrangian
member means one connected component, the one containing the span of the first
m coordinates; the Weyl route uses the D_m group (not B_m) and the brute-force
route filters Lagrangians by the parity of their intersection with that
reference.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache

from .descriptors import FiniteFlagVariety, require_valid_variety
from .errors import ResourceLimitError, ValidationError

DEFAULT_MAX_RANK = 8
_RANK_ENV = "FLAGISO_MAX_RANK"


def max_rank() -> int:
    value = os.environ.get(_RANK_ENV)
    if value is None:
        return DEFAULT_MAX_RANK
    try:
        return int(value)
    except ValueError:
        raise ValidationError(f"{_RANK_ENV} must be an integer, got {value!r}")


# ---------------------------------------------------------------------------
# Polynomials in q with nonnegative integer coefficients.


@dataclass(frozen=True)
class QPolynomial:
    coefficients: tuple  # index = degree; trailing coefficient nonzero

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        for c in coeffs:
            if not isinstance(c, int) or c < 0:
                raise ValidationError(f"coefficients must be nonnegative integers, got {c!r}")
        object.__setattr__(self, "coefficients", coeffs)

    @staticmethod
    def from_dict(by_degree: dict) -> "QPolynomial":
        if not by_degree:
            return QPolynomial(())
        top = max(by_degree)
        return QPolynomial(tuple(by_degree.get(i, 0) for i in range(top + 1)))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, q: int) -> int:
        value = 0
        for c in reversed(self.coefficients):
            value = value * q + c
        return value

    def __add__(self, other):
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        return QPolynomial(tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)))

    def __mul__(self, other):
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return QPolynomial(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return QPolynomial(tuple(out))

    def is_palindromic(self) -> bool:
        return self.coefficients == tuple(reversed(self.coefficients))

    def render(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for deg, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if deg == 0:
                parts.append(str(c))
            elif deg == 1:
                parts.append("q" if c == 1 else f"{c}*q")
            else:
                parts.append(f"q^{deg}" if c == 1 else f"{c}*q^{deg}")
        return " + ".join(parts)

    def __repr__(self):
        return f"QPolynomial({self.render()!r})"


# ---------------------------------------------------------------------------
# Signed permutations.


@dataclass(frozen=True)
class SignedPermutation:
    """Images of 1..n as nonzero integers whose absolute values are a permutation.

    kind "A" requires all images positive, kind "D" an even number of negative
    ones, kind "BC" allows any signs.
    """

    images: tuple
    kind: str = "BC"

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if self.kind not in ("A", "BC", "D"):
            raise ValidationError(f"unknown kind {self.kind!r}")
        n = len(self.images)
        if sorted(abs(a) for a in self.images) != list(range(1, n + 1)):
            raise ValidationError("absolute images must be a permutation of 1..n")
        negatives = sum(1 for a in self.images if a < 0)
        if self.kind == "A" and negatives:
            raise ValidationError("type A permutations take no signs")
        if self.kind == "D" and negatives % 2 == 1:
            raise ValidationError("type D requires an even number of sign changes")

    def length(self) -> int:
        if self.kind == "A":
            return _inversions(self.images)
        a, b = _signed_root_flips(self.images)
        if self.kind == "D":
            return a + b
        return a + b + sum(1 for x in self.images if x < 0)


def _inversions(w) -> int:
    n = len(w)
    total = 0
    for i in range(n):
        wi = w[i]
        for j in range(i + 1, n):
            if wi > w[j]:
                total += 1
    return total


def _signed_root_flips(w):
    """Counts of flipped roots e_i - e_j and e_i + e_j (i < j)."""
    a = b = 0
    n = len(w)
    for i in range(n):
        wi = w[i]
        for j in range(i + 1, n):
            wj = w[j]
            if wi < 0:
                if wj > 0:
                    a += 1
                    if wi + wj > 0:
                        b += 1
                else:
                    if wi > wj:
                        a += 1
                    b += 1
            else:
                if wj > 0:
                    if wi > wj:
                        a += 1
                else:
                    if wi + wj > 0:
                        b += 1
    return a, b


def _length(w, kind) -> int:
    if kind == "A":
        return _inversions(w)
    a, b = _signed_root_flips(w)
    if kind == "D":
        return a + b
    return a + b + sum(1 for x in w if x < 0)


def _adjacent_descent(wi, wj) -> bool:
    """Right descent at the swap of two adjacent positions with images wi, wj."""
    if wi < 0 < wj:
        return True
    if (wi < 0) == (wj < 0):
        return wi > wj
    return False


def _is_minimal_rep(w, kind, adjacent, special) -> bool:
    for i in adjacent:  # 0-based position: generator swaps i, i+1
        if _adjacent_descent(w[i], w[i + 1]):
            return False
    if special:
        if kind == "BC":
            if w[-1] < 0:
                return False
        else:  # D: root e_{m-1} + e_m
            a, b = w[-2], w[-1]
            if a < 0 and b < 0:
                return False
            if (a < 0) != (b < 0) and a + b > 0:
                return False
    return True


def _weyl_elements(kind, m):
    if kind == "A":
        yield from itertools.permutations(range(1, m + 1))
        return
    for perm in itertools.permutations(range(1, m + 1)):
        for signs in itertools.product((1, -1), repeat=m):
            if kind == "D" and signs.count(-1) % 2 == 1:
                continue
            yield tuple(s * p for s, p in zip(signs, perm))


def weyl_group(v: FiniteFlagVariety):
    """The Weyl elements behind the variety, wrapped for inspection."""
    kind, m, _, _ = _parabolic_data(v)
    return (SignedPermutation(w, kind) for w in _weyl_elements(kind, m))


def _parabolic_data(v: FiniteFlagVariety):
    """(kind, m, adjacent generators kept, keep-special) for the stabilizer."""
    t, n, dims = v.lie_type, v.ambient_dim, v.dims
    if t == "A":
        adjacent = tuple(i - 1 for i in range(1, n) if i not in dims)
        return "A", n, adjacent, False
    m = n // 2
    adjacent = tuple(i - 1 for i in range(1, m) if i not in dims)
    if t == "D":
        special = max(dims) <= m - 2
        return "D", m, adjacent, special
    special = m not in dims
    return "BC", m, adjacent, special


def _rank(v: FiniteFlagVariety) -> int:
    return v.ambient_dim - 1 if v.lie_type == "A" else v.ambient_dim // 2


def _check_rank(v: FiniteFlagVariety):
    r = _rank(v)
    cap = max_rank()
    if r > cap:
        raise ResourceLimitError(
            f"rank {r} exceeds the enumeration bound {cap} "
            f"(set {_RANK_ENV} to raise it)"
        )


@lru_cache(maxsize=None)
def _poincare_cached(lie_type, ambient_dim, dims):
    v = FiniteFlagVariety(lie_type, ambient_dim, dims)
    kind, m, adjacent, special = _parabolic_data(v)
    coeffs = {}
    for w in _weyl_elements(kind, m):
        if not _is_minimal_rep(w, kind, adjacent, special):
            continue
        l = _length(w, kind)
        coeffs[l] = coeffs.get(l, 0) + 1
    return QPolynomial.from_dict(coeffs)


def poincare_polynomial(v: FiniteFlagVariety) -> QPolynomial:
    """Sum of q^length over minimal coset representatives of the parabolic."""
    require_valid_variety(v)
    _check_rank(v)
    return _poincare_cached(v.lie_type, v.ambient_dim, tuple(v.dims))


def point_count(v: FiniteFlagVariety, q: int) -> int:
    if not (isinstance(q, int) and q >= 1):
        raise ValidationError(f"q must be a positive integer, got {q!r}")
    return poincare_polynomial(v)(q)


def dimension(v: FiniteFlagVariety) -> int:
    return poincare_polynomial(v).degree


# ---------------------------------------------------------------------------
# Brute-force oracle: flags over F_q by echelon enumeration.

BRUTE_MAX_AMBIENT = 6
_BRUTE_PRIMES = (2, 3)


def standard_gram(lie_type: str, n: int, q: int):
    """The split bilinear form pairing coordinate i with coordinate n+1-i."""
    gram = [[0] * n for _ in range(n)]
    if lie_type == "C":
        m = n // 2
        for i in range(m):
            gram[i][n - 1 - i] = 1
            gram[n - 1 - i][i] = (-1) % q
    else:
        for i in range(n):
            gram[i][n - 1 - i] = 1 % q
        # odd ambient: the middle coordinate pairs with itself
    return tuple(tuple(row) for row in gram)


def _dot(u, gram, v, q):
    total = 0
    for i, ui in enumerate(u):
        if ui:
            row = gram[i]
            total += ui * sum(r * vj for r, vj in zip(row, v))
    return total % q


def _quadratic_value(u, n, q):
    """Q(u) for the split quadratic form refining the orthogonal gram."""
    total = 0
    for i in range(n // 2):
        total += u[i] * u[n - 1 - i]
    if n % 2 == 1:
        mid = n // 2
        if q == 2:
            raise ValidationError("odd orthogonal oracle needs odd q")
        total += pow(2, -1, q) * u[mid] * u[mid]
    return total % q


def _quadratic_from_gram(u, gram, q):
    """Q(u) = w(u,u)/2, valid for odd q."""
    return (_dot(u, gram, u, q) * pow(2, -1, q)) % q


def _rows_isotropic(rows, gram, q, quadratic):
    for i, u in enumerate(rows):
        if quadratic is not None and quadratic(u) != 0:
            return False
        for v in rows[i + 1 :]:
            if _dot(u, gram, v, q) != 0:
                return False
    return True


def _rref_mod(rows, q):
    mat = [list(r) for r in rows]
    n_cols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] % q), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, q)
        mat[r] = [(x * inv) % q for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] % q:
                f = mat[i][c]
                mat[i] = [(x - f * y) % q for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in mat[:r]), tuple(pivots)


def _echelon_subspaces(n, d, q):
    """All d-dimensional subspaces of F_q^n as (rref rows, pivot columns)."""
    for pivots in itertools.combinations(range(n), d):
        free = [
            (i, c)
            for i in range(d)
            for c in range(pivots[i] + 1, n)
            if c not in pivots
        ]
        base = [[0] * n for _ in range(d)]
        for i, c in enumerate(pivots):
            base[i][c] = 1
        for values in itertools.product(range(q), repeat=len(free)):
            rows = [row[:] for row in base]
            for (i, c), val in zip(free, values):
                rows[i][c] = val
            yield tuple(tuple(r) for r in rows), pivots


def _extensions(rows, pivots, n, e, q):
    """All subspaces of dimension e containing the given one, via the quotient."""
    d = len(rows)
    free_cols = [c for c in range(n) if c not in pivots]
    for qrows, _ in _echelon_subspaces(len(free_cols), e - d, q):
        lifted = []
        for qrow in qrows:
            vec = [0] * n
            for val, c in zip(qrow, free_cols):
                vec[c] = val
            lifted.append(tuple(vec))
        yield _rref_mod(rows + tuple(lifted), q)


def _intersection_dim_mod(rows_a, rows_b, q):
    dim_a, dim_b = len(rows_a), len(rows_b)
    _, pivots = _rref_mod(rows_a + rows_b, q)
    return dim_a + dim_b - len(pivots)


def brute_force_count(v: FiniteFlagVariety, q: int, form=None) -> int:
    """Count flags of the given shape over F_q by direct enumeration.

    ``form`` may be an explicit gram matrix (entries mod q) replacing the
    standard split one.  The orthogonal oracle needs odd q unless the ambient
    dimension is even and the built-in split quadratic form is used.
    """
    require_valid_variety(v)
    t, n, dims = v.lie_type, v.ambient_dim, v.dims
    if n > BRUTE_MAX_AMBIENT:
        raise ResourceLimitError(
            f"brute-force oracle is limited to ambient dimension {BRUTE_MAX_AMBIENT}"
        )
    if q not in _BRUTE_PRIMES:
        raise ValidationError(f"brute-force oracle needs a prime q in {_BRUTE_PRIMES}")

    quadratic = None
    gram = None
    if t != "A":
        if form is None:
            gram = standard_gram(t, n, q)
            if t in ("B", "D"):
                if t == "B" and q == 2:
                    raise ValidationError("type B oracle requires odd q")
                quadratic = lambda u: _quadratic_value(u, n, q)
        else:
            gram = tuple(tuple(x % q for x in row) for row in form)
            if t in ("B", "D"):
                if q == 2:
                    raise ValidationError(
                        "orthogonal oracle with an explicit bilinear form needs odd q"
                    )
                quadratic = lambda u: _quadratic_from_gram(u, gram, q)
            for i in range(n):
                for j in range(n):
                    expected = gram[j][i] if t in ("B", "D") else (-gram[j][i]) % q
                    if gram[i][j] % q != expected:
                        raise ValidationError("form has the wrong symmetry for the type")
    elif form is not None:
        raise ValidationError("type A varieties carry no form")

    m = n // 2
    lagrangian_filter = t == "D" and dims and dims[-1] == m
    if lagrangian_filter and form is not None:
        raise ValidationError(
            "component selection for a Lagrangian member needs the standard form"
        )
    ref = tuple(
        tuple(1 if j == i else 0 for j in range(n)) for i in range(m)
    )

    def ok(rows, dim):
        if gram is not None and not _rows_isotropic(rows, gram, q, quadratic):
            return False
        if lagrangian_filter and dim == m:
            if _intersection_dim_mod(rows, ref, q) % 2 != m % 2:
                return False
        return True

    total = 0
    first = dims[0]
    stack = [
        (rows, pivots, 0)
        for rows, pivots in _echelon_subspaces(n, first, q)
        if ok(rows, first)
    ]
    if len(dims) == 1:
        return len(stack)
    while stack:
        rows, pivots, level = stack.pop()
        next_dim = dims[level + 1]
        for grown, gpiv in _extensions(rows, pivots, n, next_dim, q):
            if not ok(grown, next_dim):
                continue
            if level + 1 == len(dims) - 1:
                total += 1
            else:
                stack.append((grown, gpiv, level + 1))
    return total
