"""Exact integer lattice algebra: normal forms, expansivity, period groups and indices."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import NotInvariant, ValidationError


# -- small exact matrix helpers (row lists) ----------------------------------

def identity(n: int):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def transpose(a):
    return [list(r) for r in zip(*a)] if a else []


def det(m):
    m = [[Fraction(v) if not hasattr(v, "conj") else v for v in row] for row in m]
    n = len(m)
    result = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0 * m[0][0]
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        result = result * m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f != 0:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return result


def rank(m) -> int:
    """Rank over the field generated by the entries (Fractions or QuadNums)."""
    m = [[Fraction(v) if isinstance(v, int) else v for v in row] for row in m]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def solve_exact(a, b):
    """Solve a x = b (a: n x r full column rank, b: n x s) over Q; None if inconsistent."""
    n, r = len(a), len(a[0])
    aug = [[Fraction(v) for v in a[i]] + [Fraction(v) for v in b[i]] for i in range(n)]
    row = 0
    pivots = []
    for c in range(r):
        piv = next((i for i in range(row, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ValidationError("matrix does not have full column rank")
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][c]
        aug[row] = [v / pv for v in aug[row]]
        for i in range(n):
            if i != row and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        pivots.append(c)
        row += 1
    for i in range(row, n):
        if any(v != 0 for v in aug[i][r:]):
            return None
    return [aug[i][r:] for i in range(r)]


# -- Hermite and Smith normal forms ---------------------------------------------

def _row_hnf(a):
    """Row-style HNF: returns (H, U) with U unimodular, H = U a, H in echelon form,
    positive pivots, entries above each pivot reduced into [0, pivot)."""
    a = [list(map(int, r)) for r in a]
    n = len(a)
    m = len(a[0]) if a else 0
    u = identity(n)
    row = 0
    pivcols = []
    for c in range(m):
        if row >= n:
            break
        # Euclid on column c among rows >= row
        while True:
            nz = [i for i in range(row, n) if a[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[row], a[i0] = a[i0], a[row]
            u[row], u[i0] = u[i0], u[row]
            done = True
            for i in range(row + 1, n):
                if a[i][c]:
                    q = a[i][c] // a[row][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[row])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[row])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if row < n and a[row][c] != 0:
            if a[row][c] < 0:
                a[row] = [-x for x in a[row]]
                u[row] = [-x for x in u[row]]
            for i in range(row):
                q = a[i][c] // a[row][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[row])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[row])]
            pivcols.append(c)
            row += 1
    return a, u, row


def hnf(cols: Sequence[Sequence[int]], d: int | None = None):
    """Canonical column HNF of the lattice spanned by the given column vectors.

    Returns a tuple of basis columns (lower echelon, positive pivots, entries
    left of a pivot reduced into [0, pivot))."""
    cols = [tuple(int(v) for v in c) for c in cols]
    if not cols:
        return ()
    h, _, r = _row_hnf(cols)
    return tuple(tuple(row) for row in h[:r])


def hnf_with_transform(m):
    """Column HNF of matrix m (rows): returns (H, V) with H = m V, V unimodular."""
    t = transpose(m)
    h, u, _ = _row_hnf(t)
    return transpose(h), transpose(u)


def snf(m):
    """Smith normal form: returns (D, U, V) with U m V = D, U and V unimodular,
    diagonal entries nonnegative and dividing successively."""
    a = [list(map(int, r)) for r in m]
    n, k = len(a), len(a[0])
    u, v = identity(n), identity(k)
    t = 0
    while t < min(n, k):
        nz = [(i, j) for i in range(t, n) for j in range(t, k) if a[i][j] != 0]
        if not nz:
            break
        i0, j0 = min(nz, key=lambda p: abs(a[p[0]][p[1]]))
        a[t], a[i0] = a[i0], a[t]
        u[t], u[i0] = u[i0], u[t]
        for row in a:
            row[t], row[j0] = row[j0], row[t]
        for row in v:
            row[t], row[j0] = row[j0], row[t]
        clean = True
        for i in range(t + 1, n):
            q = a[i][t] // a[t][t]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                u[i] = [x - q * y for x, y in zip(u[i], u[t])]
            if a[i][t]:
                clean = False
        for j in range(t + 1, k):
            q = a[t][j] // a[t][t]
            if q:
                for row in a:
                    row[j] -= q * row[t]
                for row in v:
                    row[j] -= q * row[t]
            if a[t][j]:
                clean = False
        if not clean:
            continue
        bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, k) if a[i][j] % a[t][t]), None)
        if bad is not None:
            i, _ = bad
            a[t] = [x + y for x, y in zip(a[t], a[i])]
            u[t] = [x + y for x, y in zip(u[t], u[i])]
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def snf_diagonal(m) -> list:
    d, _, _ = snf(m)
    return [d[i][i] for i in range(min(len(d), len(d[0])))]


# -- characteristic polynomial and Schur-Cohn -------------------------------------

def char_poly(a):
    """Coefficients (low to high) of det(zI - a), via Faddeev-LeVerrier (exact)."""
    n = len(a)
    one = a[0][0] * 0 + 1
    zero = one - one
    coeffs = [zero] * n + [one]
    mk = [[zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        am = [[sum((a[i][t] * mk[t][j] for t in range(n)), zero) for j in range(n)] for i in range(n)]
        c_prev = coeffs[n - k + 1]
        mk = [[am[i][j] + (c_prev if i == j else zero) for j in range(n)] for i in range(n)]
        tr = sum((sum((a[i][t] * mk[t][i] for t in range(n)), zero) for i in range(n)), zero)
        coeffs[n - k] = -tr / k
    return coeffs


def _abs(x):
    return -x if x < 0 else x


def schur_cohn_stable(p) -> bool:
    """True iff every root of p (real coefficients, low to high) lies in the open unit disc."""
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    while len(p) > 1:
        a0, an = p[0], p[-1]
        if not _abs(a0) < _abs(an):
            return False
        rev = p[::-1]
        q = [an * x - a0 * y for x, y in zip(p, rev)]
        p = q[1:]
        while len(p) > 1 and p[-1] == 0:
            return False
    return True


def is_expansive(L) -> bool:
    """All eigenvalues strictly outside the closed unit disc."""
    L = [[Fraction(v) if isinstance(v, int) else v for v in row] for row in L]
    chi = char_poly(L)
    if chi[0] == 0:
        return False
    return schur_cohn_stable(chi[::-1])


# -- period groups ----------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    kind: str  # "certified" | "declared" | "partial"
    method: str
    complete: bool = False
    bound: int | None = None
    notes: tuple = ()

    def to_json(self):
        out = {"kind": self.kind, "method": self.method, "complete": self.complete}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True)
class PeriodGroup:
    """Closed subgroup V + Lambda of R^d: rational subspace V and integer lattice Lambda."""

    dim: int
    subspace: tuple = ()
    lattice: tuple = ()  # HNF basis columns
    certificate: Certificate = field(default_factory=lambda: Certificate("declared", "construction"))

    def __post_init__(self):
        sub = tuple(tuple(Fraction(v) for v in b) for b in self.subspace)
        if sub and rank([list(b) for b in sub]) != len(sub):
            raise ValidationError("subspace basis is dependent")
        object.__setattr__(self, "subspace", sub)
        object.__setattr__(self, "lattice", hnf(self.lattice))

    @staticmethod
    def trivial(d: int, certificate=None) -> "PeriodGroup":
        return PeriodGroup(d, (), (), certificate or Certificate("declared", "trivial"))

    @staticmethod
    def full_lattice(d: int, certificate=None) -> "PeriodGroup":
        return PeriodGroup(d, (), tuple(tuple(int(i == j) for i in range(d)) for j in range(d)), certificate or Certificate("declared", "Z^d"))

    @staticmethod
    def full_space(d: int) -> "PeriodGroup":
        return PeriodGroup(d, tuple(tuple(int(i == j) for i in range(d)) for j in range(d)), (), Certificate("declared", "full space"))

    @property
    def rank(self) -> int:
        return len(self.lattice)

    def contains(self, v) -> bool:
        """Exact membership of a rational vector."""
        v = [Fraction(x) for x in v]
        basis = [list(b) for b in self.subspace] + [[Fraction(x) for x in b] for b in self.lattice]
        if not basis:
            return all(x == 0 for x in v)
        a = transpose(basis)
        sol = solve_exact(a, [[x] for x in v]) if rank(basis) == len(basis) else None
        if sol is None:
            return False
        s = len(self.subspace)
        return all(row[0].denominator == 1 for row in sol[s:])

    def to_json(self):
        return {
            "dim": self.dim,
            "subspace": [[str(x) for x in b] for b in self.subspace],
            "lattice": [[str(x) for x in b] for b in self.lattice],
            "certificate": self.certificate.to_json(),
        }

    def __eq__(self, other):
        return isinstance(other, PeriodGroup) and self.dim == other.dim and self.lattice == other.lattice and _same_span(self.subspace, other.subspace)

    def __hash__(self):
        return hash((self.dim, self.lattice, len(self.subspace)))


def _same_span(a, b) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    return rank([list(x) for x in a] + [list(x) for x in b]) == len(a)


def _as_matrix(L, d):
    if isinstance(L, (int, Fraction)):
        return [[L if i == j else 0 for j in range(d)] for i in range(d)]
    return [list(r) for r in L]


def _mat_vec(L, v):
    return tuple(sum((L[i][j] * v[j] for j in range(len(v))), 0 * L[i][0]) for i in range(len(L)))


def _is_integer(x) -> bool:
    if hasattr(x, "b"):
        return x.b == 0 and Fraction(x.a).denominator == 1
    return Fraction(x).denominator == 1


def _to_fraction(x) -> Fraction:
    if hasattr(x, "b"):
        if x.b != 0:
            raise ValueError("irrational")
        return Fraction(x.a)
    return Fraction(x)


def _quotient_coordinates(K: PeriodGroup):
    """A map R^d -> R^d / V as coordinates, for rational V (returns function)."""
    d = K.dim
    if not K.subspace:
        return lambda v: tuple(Fraction(x) if not hasattr(x, "b") else x for x in v), d
    basis = [list(b) for b in K.subspace]
    comp = []
    for i in range(d):
        e = [Fraction(int(i == j)) for j in range(d)]
        if rank(basis + comp + [e]) > len(basis) + len(comp):
            comp.append(e)
    full = transpose(basis + comp)  # columns: subspace then complement
    s = len(basis)

    def coords(v):
        sol = solve_exact(full, [[x] for x in v])
        return tuple(row[0] for row in sol[s:])

    return coords, d - s


def inflate_periods(K: PeriodGroup, L) -> PeriodGroup:
    """L K (requires integer images for the lattice part)."""
    L = _as_matrix(L, K.dim)
    sub = []
    for b in K.subspace:
        img = _mat_vec(L, b)
        sub.append(img)
    # the image of a rational subspace under L: keep a rational basis when possible
    try:
        sub = tuple(tuple(_to_fraction(x) for x in v) for v in sub)
    except ValueError:
        if _subspace_invariant(K, L):
            sub = K.subspace
        else:
            raise ValidationError("image subspace is not rational")
    lat = []
    for b in K.lattice:
        img = _mat_vec(L, b)
        if not all(_is_integer(x) for x in img):
            raise ValidationError("inflated lattice is not integral")
        lat.append(tuple(int(_to_fraction(x)) for x in img))
    return PeriodGroup(K.dim, sub, tuple(lat), Certificate("declared", "inflated", K.certificate.complete))


def _subspace_invariant(K: PeriodGroup, L) -> bool:
    basis = [list(b) for b in K.subspace]
    for b in K.subspace:
        img = list(_mat_vec(L, b))
        if rank(basis + [img]) != len(basis):
            return False
    return True


def check_invariance(K: PeriodGroup, L) -> bool:
    """L K is contained in K."""
    L = _as_matrix(L, K.dim)
    if not _subspace_invariant(K, L):
        return False
    for b in K.lattice:
        img = _mat_vec(L, b)
        try:
            img = tuple(_to_fraction(x) for x in img)
        except ValueError:
            # irrational image of a lattice vector: inside K only through V
            if not K.subspace:
                return False
            basis = [list(s) for s in K.subspace]
            if rank(basis + [list(_mat_vec(L, b))]) != len(basis):
                return False
            continue
        if not K.contains(img):
            return False
    return True


def _discrete_data(K: PeriodGroup, L, n: int):
    """Basis B of the discrete component (quotient coordinates) and X with L^n B = B X."""
    if not check_invariance(K, _as_matrix(L, K.dim)):
        raise NotInvariant("L K is not contained in K")
    Lm = _as_matrix(L, K.dim)
    coords, q = _quotient_coordinates(K)
    if q == 0:
        return [], []
    gens = [coords(b) for b in K.lattice]
    gens = [g for g in gens]
    if not gens:
        return [], []
    den = 1
    for g in gens:
        for x in g:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [tuple(int(x * den) for x in g) for g in gens]
    basis = hnf(ints)
    B = [[Fraction(c[i], den) for c in basis] for i in range(q)]
    images = []
    for c in basis:
        v = [Fraction(x, den) for x in c]
        # lift to R^d using any preimage: K.lattice vectors map onto these; solve in lattice coordinates
        images.append(v)
    # compute L^n on lattice generators in R^d, then project
    lat = [list(map(Fraction, b)) for b in K.lattice]
    imgs = []
    for b in lat:
        v = b
        for _ in range(n):
            v = list(_mat_vec(Lm, v))
        imgs.append(coords(v))
    # express basis in terms of generators to transport: B = G T (rational)
    G = transpose([list(g) for g in gens])
    T = []
    for c in range(len(basis)):
        col = [[B[i][c]] for i in range(q)]
        sol = _solve_any(G, col)
        T.append([row[0] for row in sol])
    LG = transpose([list(x) for x in imgs])
    LB = [[sum(LG[i][g] * T[c][g] for g in range(len(gens))) for c in range(len(basis))] for i in range(q)]
    X = solve_exact(B, LB)
    if X is None or any(x.denominator != 1 for row in X for x in row):
        raise NotInvariant("inflated lattice leaves the discrete component")
    return B, [[int(x) for x in row] for row in X]


def _solve_any(a, b):
    """A particular rational solution of a x = b (a may have dependent columns)."""
    n, m = len(a), len(a[0])
    aug = [[Fraction(v) for v in a[i]] + [Fraction(b[i][0])] for i in range(n)]
    row, piv = 0, []
    for c in range(m):
        p = next((i for i in range(row, n) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[row], aug[p] = aug[p], aug[row]
        pv = aug[row][c]
        aug[row] = [v / pv for v in aug[row]]
        for i in range(n):
            if i != row and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        piv.append(c)
        row += 1
    x = [[Fraction(0)] for _ in range(m)]
    for r, c in enumerate(piv):
        x[c][0] = aug[r][m]
    return x


def index_of_inflated(K: PeriodGroup, L, n: int = 1) -> int:
    """[L^n K : K] computed on the discrete component; subspaces contribute 1."""
    B, X = _discrete_data(K, L, n)
    if not X:
        return 1
    return abs(int(det([[Fraction(v) for v in row] for row in X])))


def has_trivial_discrete_component(K: PeriodGroup) -> bool:
    coords, q = _quotient_coordinates(K)
    if q == 0 or not K.lattice:
        return True
    return all(all(x == 0 for x in coords(b)) for b in K.lattice)


def coset_representatives(K: PeriodGroup, L, n: int = 1) -> list:
    """Representatives (in K, as rational d-vectors) of the cosets of L^n K in K."""
    B, X = _discrete_data(K, L, n)
    d = K.dim
    if not X:
        return [tuple(Fraction(0) for _ in range(d))]
    D, U, _ = snf(X)
    r = len(X)
    diag = [D[i][i] for i in range(r)]
    Uinv = _int_inverse(U)
    # lift discrete-component coordinates back to lattice vectors of K
    lat_cols = [list(map(Fraction, b)) for b in K.lattice]
    coords, q = _quotient_coordinates(K)
    gens = [coords(b) for b in K.lattice]
    G = transpose([list(g) for g in gens])
    reps = []

    def rec(i, acc):
        if i == r:
            reps.append(tuple(acc))
            return
        for c in range(diag[i]):
            rec(i + 1, acc + [c])

    rec(0, [])
    out = []
    for c in reps:
        coeff = [sum(Uinv[i][j] * c[j] for j in range(r)) for i in range(r)]
        v_q = [sum(B[i][j] * coeff[j] for j in range(r)) for i in range(q)]
        sol = _solve_any(G, [[x] for x in v_q])
        vec = [sum(lat_cols[g][i] * sol[g][0] for g in range(len(lat_cols))) for i in range(d)]
        out.append(tuple(Fraction(x) for x in vec))
    out.sort(key=lambda v: tuple(v))
    return out


def _int_inverse(u):
    n = len(u)
    aug = [[Fraction(v) for v in u[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    inv = [row[n:] for row in aug]
    return [[int(x) for x in row] for row in inv]
