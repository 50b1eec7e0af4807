"""Independent oracles for the test suite.

Everything here deliberately avoids the library's own code paths: counts come
from closed-form products or raw vector loops, polynomial identities from the
Pascal-style recursion, and Coxeter lengths from breadth-first word search.
"""

import itertools
from functools import lru_cache

from flagiso.counting import QPolynomial
from flagiso.orders import INF, Omega, OmegaStar, Seq


# ---------------------------------------------------------------------------
# q-binomials and product formulas.


@lru_cache(maxsize=None)
def gaussian_binomial_poly(n, k):
    """[n choose k]_q via the recursion [n k] = [n-1 k-1] + q^k [n-1 k]."""
    if k < 0 or k > n:
        return QPolynomial(())
    if k == 0 or k == n:
        return QPolynomial((1,))
    shifted = tuple([0] * k) + gaussian_binomial_poly(n - 1, k).coefficients
    return gaussian_binomial_poly(n - 1, k - 1) + QPolynomial(shifted)


def gaussian_binomial(n, k, q):
    return gaussian_binomial_poly(n, k)(q)


def symplectic_grassmannian_count(m, k, q):
    """Isotropic k-subspaces of a 2m-dimensional symplectic space."""
    total = gaussian_binomial(m, k, q)
    for i in range(m - k + 1, m + 1):
        total *= q**i + 1
    return total


def odd_orthogonal_grassmannian_count(m, k, q):
    """Isotropic k-subspaces of a (2m+1)-dimensional split orthogonal space."""
    total = gaussian_binomial(m, k, q)
    for i in range(m - k + 1, m + 1):
        total *= q**i + 1
    return total


def even_orthogonal_grassmannian_count(m, k, q):
    """Isotropic k-subspaces (k <= m-1) of a split 2m-dimensional space."""
    total = gaussian_binomial(m, k, q)
    for i in range(m - k, m):
        total *= q**i + 1
    return total


def lagrangian_component_count(m, q):
    """Lagrangians of a split 2m-dimensional space, one component."""
    total = 1
    for i in range(1, m):
        total *= q**i + 1
    return total


# ---------------------------------------------------------------------------
# Raw vector loops over F_2 (independent of any echelon machinery).


def count_incident_line_hyperplane_f2(n):
    """Pairs (line, hyperplane) with the line inside the hyperplane, in F_2^n."""
    vectors = [v for v in itertools.product((0, 1), repeat=n) if any(v)]
    total = 0
    for v in vectors:  # each nonzero vector is its own line over F_2
        for f in vectors:  # each nonzero functional cuts out a hyperplane
            if sum(a * b for a, b in zip(v, f)) % 2 == 0:
                total += 1
    return total


def count_lines_f2(n):
    return sum(1 for v in itertools.product((0, 1), repeat=n) if any(v))


# ---------------------------------------------------------------------------
# Coxeter lengths by breadth-first search over generator words.


def _apply_right(w, gen):
    w = list(w)
    kind, i = gen
    if kind == "swap":
        w[i], w[i + 1] = w[i + 1], w[i]
    elif kind == "flip":
        w[i] = -w[i]
    else:  # flip-and-swap of the last two positions
        w[-2], w[-1] = -w[-1], -w[-2]
    return tuple(w)


def bfs_lengths(kind, m):
    """Exact word lengths for W(A_{m-1}) on 1..m, W(B_m)=W(C_m), or W(D_m)."""
    gens = [("swap", i) for i in range(m - 1)]
    if kind == "BC":
        gens.append(("flip", m - 1))
    elif kind == "D":
        gens.append(("ds", None))
    identity = tuple(range(1, m + 1))
    lengths = {identity: 0}
    frontier = [identity]
    while frontier:
        nxt = []
        for w in frontier:
            for g in gens:
                u = _apply_right(w, g)
                if u not in lengths:
                    lengths[u] = lengths[w] + 1
                    nxt.append(u)
        frontier = nxt
    return lengths


# ---------------------------------------------------------------------------
# Weighted-order comparison by block matching (independent of the rewriter).


def front_blocks(x, k):
    """First k block sizes, or None when the order has no k-th block from the
    left (an omegastar gives unreachable leading blocks)."""
    out = []
    for atom in x.atoms:
        if isinstance(atom, OmegaStar):
            return None if len(out) < k else out[:k]
        if isinstance(atom, Seq):
            out.extend(atom.sizes)
        else:
            while len(out) < k:
                out.append(atom.size)
            return out[:k]
        if len(out) >= k:
            return out[:k]
    return out[:k] if len(out) >= k else None


def tail_kind(x):
    """The final atom's shape: ('seq', last size), ('omega', d), ('omegastar', d)."""
    atom = x.atoms[-1]
    if isinstance(atom, Seq):
        return ("seq", atom.sizes[-1])
    if isinstance(atom, Omega):
        return ("omega", atom.size)
    return ("omegastar", atom.size)


def omega_shaped_iso(a, b, window=60):
    """Isomorphism test for orders that are a finite prefix plus one omega
    tail: the weight sequences must agree pointwise, checked on a window plus
    the tail type."""
    assert all(isinstance(t, (Seq, Omega)) for t in a.atoms + b.atoms)
    assert isinstance(a.atoms[-1], Omega) and isinstance(b.atoms[-1], Omega)
    for k in range(1, window + 1):
        if front_blocks(a, k) != front_blocks(b, k):
            return False
    return tail_kind(a) == tail_kind(b)
