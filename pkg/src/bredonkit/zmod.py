"""Exact integer linear algebra and finitely generated abelian groups.

This is the engine under all the homological computations in the package:
Smith and Hermite normal forms over the integers (with the unimodular
transforms), integer kernels and linear solves, finitely presented abelian
groups, maps between them, and their kernels, cokernels, images and
subquotients.  Everything is arbitrary precision; no floats anywhere.

A finitely generated abelian group is presented as ``Z^ambient / L`` where
``L`` is the column lattice of a relation matrix:

>>> A = FgAbelian.from_relations(2, IntMatrix([[2, 0], [0, 3]]))
>>> A.invariant_factors
(6,)

Invariant factors follow the divisibility chain convention: factors of 1 are
dropped, finite factors come sorted by divisibility, and a trailing 0 stands
for a free ``Z`` summand.
"""

from __future__ import annotations

import itertools
import random

from .errors import ObjectMismatch


def xgcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b == g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        # Maintain the invariants: x0*a_orig + y0*b_orig == a,
        #                          x1*a_orig + y1*b_orig == b.
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class IntMatrix:
    """Immutable integer matrix; rows of equal length, row-major entries."""

    __slots__ = ("rows", "cols", "data", "_by_column")

    def __init__(self, data, cols=None):
        data = tuple(tuple(map(int, row)) for row in data)
        if data:
            width = len(data[0])
            if any(len(row) != width for row in data):
                raise ObjectMismatch("ragged matrix rows")
        else:
            width = 0 if cols is None else cols
        if cols is not None and data and cols != width:
            raise ObjectMismatch("declared column count disagrees with rows")
        self.rows = len(data)
        self.cols = width
        self.data = data
        self._by_column = None

    @staticmethod
    def zeros(rows, cols):
        return IntMatrix([[0] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def identity(n):
        return IntMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_columns(columns, rows=None):
        """Build a matrix whose columns are the given vectors."""
        columns = [list(c) for c in columns]
        if columns:
            rows = len(columns[0])
        elif rows is None:
            rows = 0
        return IntMatrix([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @staticmethod
    def diagonal(entries, rows=None, cols=None):
        entries = list(entries)
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        return IntMatrix(
            [[entries[i] if i == j and i < len(entries) else 0 for j in range(cols)]
             for i in range(rows)],
            cols=cols,
        )

    @property
    def entries(self):
        """Row-major flat tuple of entries."""
        return tuple(x for row in self.data for x in row)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.data == other.data and self.cols == other.cols

    def __hash__(self):
        return hash((self.cols, self.data))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.data]!r})"

    def tolists(self):
        return [list(r) for r in self.data]

    def column(self, j):
        return [row[j] for row in self.data]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return IntMatrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
                         cols=self.rows)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ObjectMismatch("hstack needs equal row counts")
        return IntMatrix([list(a) + list(b) for a, b in zip(self.data, other.data)],
                         cols=self.cols + other.cols)

    def vstack(self, other):
        if self.cols != other.cols:
            raise ObjectMismatch("vstack needs equal column counts")
        return IntMatrix(list(self.data) + list(other.data), cols=self.cols)

    def __mul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ObjectMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            # columnwise through apply, which skips zeros on both sides
            cols = [self.apply(other.column(j)) for j in range(other.cols)]
            return IntMatrix.from_columns(cols, rows=self.rows)
        return IntMatrix([[x * other for x in row] for row in self.data], cols=self.cols)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ObjectMismatch("shape mismatch in addition")
        return IntMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)],
                         cols=self.cols)

    def __sub__(self, other):
        return self + (other * -1)

    def __neg__(self):
        return self * -1

    def apply(self, vec):
        """Matrix-vector product; skips zero entries on both sides."""
        vec = list(vec)
        if len(vec) != self.cols:
            raise ObjectMismatch("vector length disagrees with column count")
        cols = self._by_column
        if cols is None:
            # matrices are never mutated after construction, so the sparse
            # column view can be cached on first use
            cols = [[] for _ in range(self.cols)]
            for i, row in enumerate(self.data):
                for j, x in enumerate(row):
                    if x:
                        cols[j].append((i, x))
            self._by_column = cols
        out = [0] * self.rows
        for j, b in enumerate(vec):
            if b:
                for i, x in cols[j]:
                    out[i] += x * b
        return out

    def is_zero(self):
        return all(x == 0 for row in self.data for x in row)


def smith_normal_form(a: IntMatrix, need_u=True, need_v=True):
    """Return (U, D, V) with U*a*V == D in Smith normal form.

    U and V are unimodular; D is diagonal with nonnegative entries
    satisfying the divisibility chain d1 | d2 | ... (zeros last).  Pivots
    are chosen by minimal absolute value among nonzero candidates, which
    keeps intermediate entries small.  A transform the caller does not
    need can be skipped with need_u/need_v; its slot is returned as None.
    """
    m, n = a.rows, a.cols
    d = [list(row) for row in a.data]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)] \
        if need_u else None
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)] \
        if need_v else None

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        if u is not None:
            u[i], u[j] = u[j], u[i]

    # Row/column updates touch only d[t:] / columns t..n-1: at stage t the
    # finished block is diagonal and everything else in its rows is zero.

    def swap_cols(i, j, start):
        for row in d[start:]:
            row[i], row[j] = row[j], row[i]
        if v is not None:
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c, start):
        # row dst += c * row src
        drow, srow = d[dst], d[src]
        for k in range(start, n):
            if srow[k]:
                drow[k] += c * srow[k]
        if u is not None:
            urow, usrc = u[dst], u[src]
            for k in range(m):
                if usrc[k]:
                    urow[k] += c * usrc[k]

    def add_col(src, dst, c, start):
        for row in d[start:]:
            if row[src]:
                row[dst] += c * row[src]
        if v is not None:
            for row in v:
                if row[src]:
                    row[dst] += c * row[src]

    t = 0
    limit = min(m, n)
    while t < limit:
        # Locate a pivot: the minimal absolute value among nonzero entries.
        # A unit entry is always optimal, and list.index finds one quickly.
        pivot = None
        best = None
        for i in range(t, m):
            row = d[i]
            j = None
            try:
                j = row.index(1, t)
            except ValueError:
                pass
            try:
                jm = row.index(-1, t)
                if j is None or jm < j:
                    j = jm
            except ValueError:
                pass
            if j is not None:
                best = 1
                pivot = (i, j)
                break
        if pivot is None:
            for i in range(t, m):
                row = d[i]
                for j in range(t, n):
                    x = row[j]
                    if x:
                        ax = x if x > 0 else -x
                        if best is None or ax < best:
                            best = ax
                            pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1], t)

        while True:
            # Clear column t, then row t, by division with remainder.
            dirty = False
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    if q:
                        add_row(t, i, -q, t)
                    if d[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    if q:
                        add_col(t, j, -q, t)
                    if d[t][j]:
                        swap_cols(t, j, t)
                        dirty = True
            if dirty:
                continue
            # Pivot must divide every remaining entry for the chain property.
            p = d[t][t]
            if p == 1 or p == -1:
                break
            offender = None
            for i in range(t + 1, m):
                row = d[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1, t)
        if d[t][t] < 0:
            for k in range(t, n):
                d[t][k] = -d[t][k]
            if u is not None:
                for k in range(m):
                    u[t][k] = -u[t][k]
        t += 1

    return (IntMatrix(u) if u is not None else None, IntMatrix(d),
            IntMatrix(v) if v is not None else None)


def determinant(a: IntMatrix):
    """Exact determinant via fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise ObjectMismatch("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(row) for row in a.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def hermite_row_basis(a: IntMatrix) -> IntMatrix:
    """Canonical Hermite basis of the row lattice of ``a``.

    Returns a matrix in row echelon form with positive pivots, entries above
    each pivot reduced into [0, pivot), and no zero rows.  Two matrices span
    the same row lattice iff their Hermite bases are equal.
    """
    rows = [list(r) for r in a.data if any(r)]
    m = len(rows)
    n = a.cols
    r = 0
    for j in range(n):
        # Combine rows r..m-1 so only row r has a nonzero entry in column j.
        pivot_row = None
        for i in range(r, m):
            if rows[i][j]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        for i in range(r + 1, m):
            while rows[i][j]:
                g, x, y = xgcd(rows[r][j], rows[i][j])
                p, q = rows[r][j] // g, rows[i][j] // g
                # Rows (r, i) <- (x*r + y*i, -q*r + p*i): determinant 1.
                new_r = [x * a_ + y * b_ for a_, b_ in zip(rows[r], rows[i])]
                new_i = [-q * a_ + p * b_ for a_, b_ in zip(rows[r], rows[i])]
                rows[r], rows[i] = new_r, new_i
        if rows[r][j] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][j] // rows[r][j]
            if q:
                rows[i] = [a_ - q * b_ for a_, b_ in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    rows = [row for row in rows[:r] if any(row)]
    return IntMatrix(rows, cols=n)


def hermite_column_basis(a: IntMatrix) -> IntMatrix:
    """Canonical basis (as columns) of the column lattice of ``a``."""
    return hermite_row_basis(a.transpose()).transpose()


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Basis (as columns) of the integer kernel {x : a*x == 0}."""
    _, d, v = smith_normal_form(a, need_u=False)
    rank = sum(1 for i in range(min(d.rows, d.cols)) if d.data[i][i] != 0)
    cols = [v.column(j) for j in range(rank, a.cols)]
    return IntMatrix.from_columns(cols, rows=a.cols)


class _SnfSolver:
    """Cached solver for repeated linear solves against one matrix."""

    def __init__(self, a: IntMatrix):
        self.a = a
        self.u, self.d, self.v = smith_normal_form(a)
        self.diag = [self.d.data[i][i] for i in range(min(a.rows, a.cols))]
        self.rank = sum(1 for x in self.diag if x)

    def solve(self, b):
        """One integer solution x of a*x == b, or None."""
        c = self.u.apply(b)
        y = [0] * self.a.cols
        for i in range(self.a.rows):
            if i < self.rank:
                if c[i] % self.diag[i]:
                    return None
                y[i] = c[i] // self.diag[i]
            elif c[i] != 0:
                return None
        return self.v.apply(y)


def solve(a: IntMatrix, b):
    """One integer solution of a*x == b, or None if none exists."""
    return _SnfSolver(a).solve(b)


def solve_matrix(a: IntMatrix, b: IntMatrix):
    """X with a*X == b columnwise, or None."""
    solver = _SnfSolver(a)
    cols = []
    for j in range(b.cols):
        x = solver.solve(b.column(j))
        if x is None:
            return None
        cols.append(x)
    return IntMatrix.from_columns(cols, rows=a.cols)


def lattice_contains(a: IntMatrix, vec) -> bool:
    """Whether vec lies in the column lattice of ``a``."""
    return solve(a, vec) is not None


def lattice_sum(*mats):
    """Canonical basis of the sum of the column lattices."""
    rows = None
    cols = []
    for m in mats:
        rows = m.rows if rows is None else rows
        if m.rows != rows:
            raise ObjectMismatch("lattice summands live in different ambient ranks")
        cols.extend(m.columns())
    return hermite_column_basis(IntMatrix.from_columns(cols, rows=rows or 0))


def lattices_equal(a: IntMatrix, b: IntMatrix) -> bool:
    return hermite_column_basis(a) == hermite_column_basis(b)


def _normalize_factors(diag, free_count):
    factors = [x for x in diag if x not in (0, 1)]
    factors.extend([0] * (free_count + sum(1 for x in diag if x == 0)))
    return tuple(factors)


class FgAbelian:
    """Finitely generated abelian group presented as Z^ambient_rank / relations.

    ``relations`` columns are the relators.  ``invariant_factors`` is the
    canonical normal form: finite factors > 1 in divisibility order, then one
    0 per free summand.  Equality of presentations is not tested here;
    use ``isomorphic`` (same invariant factors) or lattice comparisons.

    >>> FgAbelian.from_relations(1, IntMatrix([[2]])).invariant_factors
    (2,)
    >>> FgAbelian.free(2).invariant_factors
    (0, 0)
    """

    __slots__ = ("ambient_rank", "relations", "invariant_factors", "_solver", "_reduction")

    def __init__(self, ambient_rank: int, relations: IntMatrix = None):
        if relations is None:
            relations = IntMatrix.zeros(ambient_rank, 0)
        if relations.rows != ambient_rank:
            raise ObjectMismatch("relation matrix must have ambient_rank rows")
        if relations.cols > ambient_rank:
            # any basis of the same lattice presents the same group; the
            # canonical one keeps the normal-form pass square
            relations = hermite_column_basis(relations)
        self.ambient_rank = ambient_rank
        self.relations = relations
        u, d, _ = smith_normal_form(relations, need_v=False)
        diag = [d.data[i][i] for i in range(min(d.rows, d.cols))]
        full = diag + [0] * (ambient_rank - len(diag))
        self.invariant_factors = _normalize_factors(full, 0)
        # Reduction data: y = u*x has coordinate i killed mod full[i].
        self._reduction = (u, full)
        self._solver = None

    @staticmethod
    def free(n: int) -> "FgAbelian":
        return FgAbelian(n)

    @staticmethod
    def zero() -> "FgAbelian":
        return FgAbelian(0)

    @staticmethod
    def from_relations(ambient_rank: int, relations: IntMatrix) -> "FgAbelian":
        return FgAbelian(ambient_rank, relations)

    @staticmethod
    def from_factors(factors) -> "FgAbelian":
        """Group with the given cyclic factor orders (0 meaning Z)."""
        factors = list(factors)
        n = len(factors)
        cols = []
        for i, f in enumerate(factors):
            if f != 0:
                col = [0] * n
                col[i] = f
                cols.append(col)
        return FgAbelian(n, IntMatrix.from_columns(cols, rows=n))

    @property
    def rank(self) -> int:
        """Number of free Z summands."""
        return sum(1 for f in self.invariant_factors if f == 0)

    @property
    def torsion(self):
        return tuple(f for f in self.invariant_factors if f != 0)

    @property
    def order(self):
        """Group order, or None when infinite."""
        if self.rank:
            return None
        n = 1
        for f in self.torsion:
            n *= f
        return n

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def isomorphic(self, other: "FgAbelian") -> bool:
        return self.invariant_factors == other.invariant_factors

    def element_is_zero(self, vec) -> bool:
        """Whether an ambient vector lies in the relation lattice."""
        u, diag = self._reduction
        c = u.apply(vec)
        for i, x in enumerate(c):
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                if x != 0:
                    return False
            elif x % d:
                return False
        return True

    def reduce_element(self, vec):
        """Canonical coordinates of an ambient vector (for dedup/hashing)."""
        u, diag = self._reduction
        c = u.apply(vec)
        out = []
        for i, x in enumerate(c):
            d = diag[i] if i < len(diag) else 0
            out.append(x % d if d else x)
        return tuple(out)

    def elements(self):
        """Iterate ambient coordinate vectors hitting each element once.

        Only valid for finite groups; used by small brute-force oracles.
        """
        if self.rank:
            raise ObjectMismatch("cannot enumerate an infinite group")
        u, diag = self._reduction
        # Enumerate in canonical (reduced) coordinates, then pull back.
        uinv = solve_matrix(u, IntMatrix.identity(self.ambient_rank))
        ranges = [range(d if d else 1) for d in diag]
        for combo in itertools.product(*ranges):
            yield uinv.apply(list(combo))

    def summary(self):
        """Human-readable normal form like 'Z^2 + Z/2 + Z/6'."""
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z/{f}" for f in self.torsion)
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FgAbelian({self.summary()})"


class AbMap:
    """Homomorphism between finitely presented abelian groups.

    The matrix acts on ambient generators; it must carry the source relation
    lattice into the target relation lattice (checked by ``well_formed``).
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FgAbelian, target: FgAbelian, matrix: IntMatrix):
        if matrix.rows != target.ambient_rank or matrix.cols != source.ambient_rank:
            raise ObjectMismatch(
                f"map matrix must be {target.ambient_rank}x{source.ambient_rank}, "
                f"got {matrix.rows}x{matrix.cols}")
        self.source = source
        self.target = target
        self.matrix = matrix

    @staticmethod
    def zero(source: FgAbelian, target: FgAbelian) -> "AbMap":
        return AbMap(source, target, IntMatrix.zeros(target.ambient_rank, source.ambient_rank))

    @staticmethod
    def identity(group: FgAbelian) -> "AbMap":
        return AbMap(group, group, IntMatrix.identity(group.ambient_rank))

    def well_formed(self) -> bool:
        for j in range(self.source.relations.cols):
            img = self.matrix.apply(self.source.relations.column(j))
            if not self.target.element_is_zero(img):
                return False
        return True

    def compose(self, first: "AbMap") -> "AbMap":
        """self after first (self ∘ first)."""
        if first.target is not self.source and \
                first.target.ambient_rank != self.source.ambient_rank:
            raise ObjectMismatch("composition through mismatched groups")
        return AbMap(first.source, self.target, self.matrix * first.matrix)

    def __add__(self, other: "AbMap") -> "AbMap":
        return AbMap(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "AbMap") -> "AbMap":
        return AbMap(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self) -> "AbMap":
        return AbMap(self.source, self.target, -self.matrix)

    def apply(self, vec):
        return self.matrix.apply(vec)

    def is_zero_map(self) -> bool:
        return all(self.target.element_is_zero(self.matrix.column(j))
                   for j in range(self.matrix.cols))

    def equal_to(self, other: "AbMap") -> bool:
        """Equality as maps of presented groups (difference kills every generator)."""
        return (self - other).is_zero_map()

    def is_isomorphism(self) -> bool:
        return kernel(self)[0].is_trivial() and cokernel(self)[0].is_trivial()

    def __repr__(self):
        return f"AbMap({self.source.summary()} -> {self.target.summary()})"


def preimage_lattice(f: AbMap) -> IntMatrix:
    """Basis of {x in Z^m : f(x) lies in the target relation lattice}."""
    stacked = f.matrix.hstack(f.target.relations)
    ker = kernel_basis(stacked)
    cols = [ker.column(j)[: f.source.ambient_rank] for j in range(ker.cols)]
    return hermite_column_basis(
        IntMatrix.from_columns(cols, rows=f.source.ambient_rank))


def lattice_quotient(num: IntMatrix, den: IntMatrix):
    """Present (column lattice of num)/(column lattice of den).

    den's lattice must lie inside num's.  Returns (group, basis) where basis
    columns are the chosen generators of the numerator lattice and group is
    the quotient presented on those generators.
    """
    basis = hermite_column_basis(num)
    if basis.cols == 0:
        return FgAbelian.zero(), basis
    rels = solve_matrix(basis, den)
    if rels is None:
        raise ObjectMismatch("denominator lattice not contained in numerator lattice")
    return FgAbelian(basis.cols, rels), basis


def kernel(f: AbMap):
    """Kernel of f as (group, inclusion AbMap into f.source)."""
    pre = preimage_lattice(f)
    grp, basis = lattice_quotient(
        pre.hstack(f.source.relations), f.source.relations)
    return grp, AbMap(grp, f.source, basis)


def cokernel(f: AbMap):
    """Cokernel of f as (group, projection AbMap from f.target)."""
    rels = f.matrix.hstack(f.target.relations)
    grp = FgAbelian(f.target.ambient_rank, rels)
    return grp, AbMap(f.target, grp, IntMatrix.identity(f.target.ambient_rank))


def image(f: AbMap):
    """Image of f as (group, inclusion into f.target, projection from f.source).

    inclusion ∘ projection equals f as maps of presented groups.
    """
    img_lattice = lattice_sum(f.matrix, f.target.relations)
    grp, basis = lattice_quotient(img_lattice, f.target.relations)
    incl = AbMap(grp, f.target, basis)
    proj_matrix = solve_matrix(basis, f.matrix) if basis.cols else \
        IntMatrix.zeros(0, f.source.ambient_rank)
    proj = AbMap(f.source, grp, proj_matrix)
    return grp, incl, proj


def express_through_inclusion(incl: AbMap, f: AbMap) -> AbMap:
    """Factor f through an inclusion: returns g with incl ∘ g == f.

    Requires im(f) ⊆ im(incl) in the target group; raises otherwise.
    """
    if incl.target.ambient_rank != f.target.ambient_rank:
        raise ObjectMismatch("inclusion and map have different targets")
    stacked = incl.matrix.hstack(incl.target.relations)
    solver = _SnfSolver(stacked)
    cols = []
    for j in range(f.matrix.cols):
        sol = solver.solve(f.matrix.column(j))
        if sol is None:
            raise ObjectMismatch("map does not factor through the inclusion")
        cols.append(sol[: incl.source.ambient_rank])
    return AbMap(f.source, incl.source,
                 IntMatrix.from_columns(cols, rows=incl.source.ambient_rank))


def subquotient(ambient: FgAbelian, num_gens: IntMatrix, den_gens: IntMatrix):
    """Present (num + rel)/(den + rel) inside ambient; den ⊆ num assumed.

    Returns (group, basis) with basis columns the generators used (they span
    num + rel).
    """
    num = lattice_sum(num_gens, ambient.relations)
    den = lattice_sum(den_gens, ambient.relations)
    return lattice_quotient(num, den)


class SubgroupLattice:
    """A subgroup of a presented group, recorded as an ambient lattice.

    ``lattice`` columns span the preimage of the subgroup in Z^ambient
    (relation lattice included), ``group`` presents the subgroup itself and
    ``inclusion`` maps it into the ambient group.
    """

    __slots__ = ("ambient", "lattice", "group", "inclusion")

    def __init__(self, ambient: FgAbelian, lattice: IntMatrix):
        self.ambient = ambient
        self.lattice = hermite_column_basis(lattice)
        self.group, basis = lattice_quotient(self.lattice, ambient.relations)
        self.inclusion = AbMap(self.group, ambient, basis)

    def contains(self, vec) -> bool:
        return lattice_contains(self.lattice, vec)

    def __eq__(self, other):
        return isinstance(other, SubgroupLattice) and self.lattice == other.lattice

    def __hash__(self):
        return hash(self.lattice)


def saturate_subgroup(ambient: FgAbelian, generators, actions) -> SubgroupLattice:
    """Smallest subgroup containing ``generators`` and closed under ``actions``.

    ``generators`` is a list of ambient vectors, ``actions`` a list of AbMap
    endomorphisms of ``ambient``.  Iterates image closure until the lattice
    stabilizes; termination holds because ambient lattices satisfy the
    ascending chain condition.
    """
    cols = [list(g) for g in generators] + ambient.relations.columns()
    current = hermite_column_basis(
        IntMatrix.from_columns(cols, rows=ambient.ambient_rank))
    while True:
        new_cols = current.columns()
        for act in actions:
            for j in range(current.cols):
                new_cols.append(act.matrix.apply(current.column(j)))
        nxt = hermite_column_basis(
            IntMatrix.from_columns(new_cols, rows=ambient.ambient_rank))
        if nxt == current:
            return SubgroupLattice(ambient, current)
        current = nxt


def random_unimodular(n: int, rng: random.Random, steps: int = 12) -> IntMatrix:
    """Random unimodular matrix built from elementary operations (for tests)."""
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.randint(-3, 3)
        for k in range(n):
            m[i][k] += c * m[j][k]
    if rng.random() < 0.5 and n > 1:
        i, j = rng.sample(range(n), 2)
        m[i], m[j] = m[j], m[i]
        m[i] = [-x for x in m[i]]
    return IntMatrix(m)
