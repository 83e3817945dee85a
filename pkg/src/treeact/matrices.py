"""Exact matrix-group arithmetic over Z and Z/mZ.

Integral matrices use Python's unbounded integers; modular matrices carry
their modulus and keep entries reduced to [0, m).  Only determinant-1
matrices are admitted into group computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class MatrixError(ValueError):
    pass


class CapExceeded(RuntimeError):
    """An enumeration grew past its explicit desk-scale cap."""


# -- flat-tuple kernels (hot paths work on raw entry tuples) -------------------


def _mul_flat(a: tuple[int, ...], b: tuple[int, ...], n: int) -> tuple[int, ...]:
    out = []
    for i in range(n):
        row = a[i * n:(i + 1) * n]
        for j in range(n):
            out.append(sum(row[k] * b[k * n + j] for k in range(n)))
    return tuple(out)


def _mul_flat_mod(a, b, n: int, m: int) -> tuple[int, ...]:
    out = []
    for i in range(n):
        row = a[i * n:(i + 1) * n]
        for j in range(n):
            out.append(sum(row[k] * b[k * n + j] for k in range(n)) % m)
    return tuple(out)


def _det_flat(entries: Sequence[int], n: int) -> int:
    # Bareiss fraction-free elimination; exact over Z.
    if n == 1:
        return entries[0]
    a = [list(entries[i * n:(i + 1) * n]) for i in range(n)]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _identity_flat(n: int) -> tuple[int, ...]:
    return tuple(1 if i == j else 0 for i in range(n) for j in range(n))


@dataclass(frozen=True)
class GroupMatrix:
    """Square matrix over Z (mod=None) or Z/mZ, row-major entries."""

    n: int
    entries: tuple[int, ...]
    mod: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) != self.n * self.n:
            raise MatrixError("entry count does not match dimension")
        if self.mod is not None:
            if self.mod < 2:
                raise MatrixError("modulus must be at least 2")
            object.__setattr__(
                self, "entries", tuple(e % self.mod for e in self.entries)
            )

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], mod: int | None = None) -> "GroupMatrix":
        n = len(rows)
        flat = tuple(int(x) for row in rows for x in row)
        m = GroupMatrix(n, flat, mod)
        if m.det() != (1 % mod if mod is not None else 1):
            raise MatrixError("determinant must be 1")
        return m

    @staticmethod
    def identity(n: int, mod: int | None = None) -> "GroupMatrix":
        return GroupMatrix(n, _identity_flat(n), mod)

    def rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.n:(i + 1) * self.n]) for i in range(self.n)]

    def entry(self, i: int, j: int) -> int:
        """1-indexed entry access."""
        return self.entries[(i - 1) * self.n + (j - 1)]

    def det(self) -> int:
        d = _det_flat(self.entries, self.n)
        return d % self.mod if self.mod is not None else d

    def is_identity(self) -> bool:
        return self.entries == (
            tuple(e % self.mod for e in _identity_flat(self.n))
            if self.mod is not None
            else _identity_flat(self.n)
        )

    def _check_compatible(self, other: "GroupMatrix") -> None:
        if self.n != other.n:
            raise MatrixError("dimension mismatch")
        if self.mod != other.mod:
            raise MatrixError("coefficient domain mismatch")

    def __mul__(self, other: "GroupMatrix") -> "GroupMatrix":
        self._check_compatible(other)
        if self.mod is None:
            return GroupMatrix(self.n, _mul_flat(self.entries, other.entries, self.n))
        return GroupMatrix(
            self.n, _mul_flat_mod(self.entries, other.entries, self.n, self.mod), self.mod
        )

    def inverse(self) -> "GroupMatrix":
        # det = 1, so the adjugate is the exact inverse (also mod m).
        n = self.n
        if self.det() != (1 % self.mod if self.mod is not None else 1):
            raise MatrixError("only determinant-1 matrices are invertible here")
        if n == 1:
            return self
        cof = [0] * (n * n)
        for i in range(n):
            for j in range(n):
                minor = [
                    self.entries[r * n + c]
                    for r in range(n) if r != i
                    for c in range(n) if c != j
                ]
                s = -1 if (i + j) % 2 else 1
                cof[j * n + i] = s * _det_flat(minor, n - 1)
        return GroupMatrix(n, tuple(cof), self.mod)

    def __pow__(self, k: int) -> "GroupMatrix":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = GroupMatrix.identity(self.n, self.mod)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def reduce_mod(self, m: int) -> "GroupMatrix":
        return GroupMatrix(self.n, self.entries, m)

    def __repr__(self) -> str:
        dom = "Z" if self.mod is None else f"Z/{self.mod}"
        return f"GroupMatrix({self.rows()}, {dom})"


def elementary(n: int, i: int, j: int, v: int, mod: int | None = None) -> GroupMatrix:
    """Identity plus v at the (i, j) entry, 1-indexed, i != j."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise MatrixError("index out of range")
    if i == j:
        raise MatrixError("off-diagonal indices required")
    flat = list(_identity_flat(n))
    flat[(i - 1) * n + (j - 1)] = v
    return GroupMatrix(n, tuple(flat), mod)


def commutator(a: GroupMatrix, b: GroupMatrix) -> GroupMatrix:
    """a^-1 b^-1 a b, exactly."""
    a._check_compatible(b)
    return a.inverse() * b.inverse() * a * b


def transvection_generators(n: int, mod: int | None = None) -> dict[str, GroupMatrix]:
    """All n(n-1) elementary transvections u_ij, named deterministically."""
    return {
        f"u{i}{j}": elementary(n, i, j, 1, mod)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j
    }


def six_generators(r: int) -> list[GroupMatrix]:
    """The six 3x3 unipotent generators with parameter r, in hexagon order."""
    if r < 1:
        raise MatrixError("parameter must be positive")
    return [
        GroupMatrix.from_rows([[1, r, 0], [0, 1, 0], [0, 0, 1]]),
        GroupMatrix.from_rows([[1, 0, r], [0, 1, 0], [0, 0, 1]]),
        GroupMatrix.from_rows([[1, 0, 0], [0, 1, r], [0, 0, 1]]),
        GroupMatrix.from_rows([[1, 0, 0], [r, 1, 0], [0, 0, 1]]),
        GroupMatrix.from_rows([[1, 0, 0], [0, 1, 0], [r, 0, 1]]),
        GroupMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, r, 1]]),
    ]


def six_generators_embedded(n: int, i: int, j: int, l: int) -> list[GroupMatrix]:
    """The six n x n transvection powers keyed by a pair 1 <= i < j <= n-1."""
    if n < 3:
        raise MatrixError("dimension must be at least 3")
    if not (1 <= i < j <= n - 1):
        raise MatrixError("indices must satisfy 1 <= i < j <= n-1")
    if l < 1:
        raise MatrixError("power must be positive")
    return [
        elementary(n, i, j, l),
        elementary(n, i, j + 1, l),
        elementary(n, j, j + 1, l),
        elementary(n, j, i, l),
        elementary(n, j + 1, i, l),
        elementary(n, j + 1, j, l),
    ]


@dataclass(frozen=True)
class HexagonCheck:
    i: int                 # position in Z/6, 1-indexed
    commutes: bool         # [a_i, a_{i+1}] = e
    power_ok: bool         # [a_{i-1}, a_{i+1}] in {a_i^r, a_i^-r}
    sign: int | None       # realized sign, +1/-1, None if power_ok is False


@dataclass(frozen=True)
class HexagonReport:
    passed: bool
    checks: tuple[HexagonCheck, ...]

    def failures(self) -> tuple[int, ...]:
        return tuple(c.i for c in self.checks if not (c.commutes and c.power_ok))


def verify_hexagon_relations(gens: Sequence[GroupMatrix], r: int) -> HexagonReport:
    """Check the cyclic relations [a_i, a_{i+1}] = e, [a_{i-1}, a_{i+1}] = a_i^{+-r}."""
    if len(gens) != 6:
        raise MatrixError("exactly six matrices required")
    n, mod = gens[0].n, gens[0].mod
    for g in gens[1:]:
        if g.n != n or g.mod != mod:
            raise MatrixError("matrices must share dimension and domain")
    e = GroupMatrix.identity(n, mod)
    checks = []
    for i in range(1, 7):
        a_prev = gens[(i - 2) % 6]
        a_i = gens[i - 1]
        a_next = gens[i % 6]
        commutes = commutator(a_i, a_next) == e
        c = commutator(a_prev, a_next)
        plus, minus = a_i ** r, a_i ** (-r)
        if c == plus:
            power_ok, sign = True, 1
        elif c == minus:
            power_ok, sign = True, -1
        else:
            power_ok, sign = False, None
        checks.append(HexagonCheck(i, commutes, power_ok, sign))
    return HexagonReport(all(c.commutes and c.power_ok for c in checks), tuple(checks))


def verify_ll_identity(
    a: GroupMatrix, b: GroupMatrix, c: GroupMatrix,
    r: int, p: int, q: int, m: int,
) -> bool:
    """Exact check of (b^-1 c^q)^m (a^-1 c^p)^m b^m a^m = c^(-m^2 r + m(p+q)).

    Requires [a,b] = c^r with c commuting with both a and b; with c central
    the left side collapses to [b^m, a^m] c^(m(p+q)).
    """
    a._check_compatible(b)
    a._check_compatible(c)
    if commutator(a, b) != c ** r:
        raise MatrixError(
            "identity preconditions violated: need [a,b] = c^r with c central"
        )
    if a * c != c * a or b * c != c * b:
        raise MatrixError(
            "identity preconditions violated: need [a,b] = c^r with c central"
        )
    lhs = ((b.inverse() * c ** q) ** m) * ((a.inverse() * c ** p) ** m) * b ** m * a ** m
    rhs = c ** (-m * m * r + m * (p + q))
    return lhs == rhs


# -- finite quotients ----------------------------------------------------------


@dataclass(eq=False)
class FiniteMatrixGroup:
    """A finite matrix group mod m, stored as canonically sorted elements."""

    n: int
    mod: int
    elements: tuple[GroupMatrix, ...]
    generators: tuple[GroupMatrix, ...]

    def __post_init__(self) -> None:
        self._index = {g.entries: k for k, g in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: GroupMatrix) -> bool:
        return g.entries in self._index

    def identity(self) -> GroupMatrix:
        return GroupMatrix.identity(self.n, self.mod)

    def index(self, g: GroupMatrix) -> int:
        return self._index[g.entries]

    def is_subgroup(self, subset: Iterable[GroupMatrix]) -> bool:
        sub = {g.entries for g in subset}
        ident = tuple(e % self.mod for e in _identity_flat(self.n))
        if ident not in sub:
            return False
        mats = [GroupMatrix(self.n, s, self.mod) for s in sorted(sub)]
        for x in mats:
            if x.entries not in self._index:
                return False
            if x.inverse().entries not in sub:
                return False
            for y in mats:
                if (x * y).entries not in sub:
                    return False
        return True

    def closure(self, seed: Iterable[GroupMatrix]) -> tuple[GroupMatrix, ...]:
        """Subgroup generated by seed elements, as sorted elements."""
        eid = GroupMatrix.identity(self.n, self.mod)
        seen = {eid.entries}
        frontier = [eid]
        gens = []
        for g in seed:
            gens.append(g)
            gens.append(g.inverse())
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = x * g
                    if y.entries not in seen:
                        seen.add(y.entries)
                        new.append(y)
            frontier = new
        return tuple(GroupMatrix(self.n, e, self.mod) for e in sorted(seen))

    def left_coset_reps(self, sub: Sequence[GroupMatrix]) -> list[GroupMatrix]:
        subset = {g.entries for g in sub}
        reps = []
        covered: set[tuple[int, ...]] = set()
        for x in self.elements:
            if x.entries in covered:
                continue
            reps.append(x)
            for h in sub:
                covered.add((x * h).entries)
        return reps

    def all_subgroups(self, cap: int = 10_000) -> list[tuple[GroupMatrix, ...]]:
        """Every subgroup, found by closing each subgroup extended by one element."""
        trivial = self.closure([])
        found = {tuple(g.entries for g in trivial): trivial}
        worklist = [trivial]
        while worklist:
            current = worklist.pop()
            member = {g.entries for g in current}
            for x in self.elements:
                if x.entries in member:
                    continue
                bigger = self.closure(list(current) + [x])
                key = tuple(g.entries for g in bigger)
                if key not in found:
                    if len(found) >= cap:
                        raise CapExceeded("subgroup lattice too large for cap")
                    found[key] = bigger
                    worklist.append(bigger)
        return [found[k] for k in sorted(found)]


def enumerate_group(
    n: int, m: int, gens: Sequence[GroupMatrix], cap: int = 10 ** 6
) -> FiniteMatrixGroup:
    """Breadth-first closure of the generators inside SL_n(Z/m)."""
    if m < 2:
        raise MatrixError("modulus must be at least 2")
    reduced = []
    for g in gens:
        if g.n != n:
            raise MatrixError("dimension mismatch")
        if g.mod is None:
            g = g.reduce_mod(m)
        elif g.mod != m:
            raise MatrixError("generator modulus mismatch")
        if g.det() != 1 % m:
            raise MatrixError("determinant must be 1")
        reduced.append(g)
    steps = []
    for g in reduced:
        steps.append(g.entries)
        steps.append(g.inverse().entries)
    eid = _identity_flat(n)
    eid = tuple(e % m for e in eid)
    seen = {eid}
    frontier = [eid]
    while frontier:
        new = []
        for x in frontier:
            for s in steps:
                y = _mul_flat_mod(x, s, n, m)
                if y not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded("group too large for cap")
                    seen.add(y)
                    new.append(y)
        frontier = new
    elements = tuple(GroupMatrix(n, e, m) for e in sorted(seen))
    return FiniteMatrixGroup(n, m, elements, tuple(reduced))


def normal_core(
    g: FiniteMatrixGroup, h: Iterable[GroupMatrix]
) -> tuple[GroupMatrix, ...]:
    """Kernel of the action of g on left cosets g/h.

    This is the largest normal subgroup of g inside h: the elements k with
    x^-1 k x in h for every x.  Conjugating by one representative per coset
    suffices, since h is closed under conjugation by its own elements.
    """
    hset = {x.entries for x in h}
    hmats = tuple(GroupMatrix(g.n, e, g.mod) for e in sorted(hset))
    if not g.is_subgroup(hmats):
        raise MatrixError("not a subgroup")
    reps = g.left_coset_reps(hmats)
    core = []
    for k in hmats:
        if all((x.inverse() * k * x).entries in hset for x in reps):
            core.append(k)
    return tuple(core)


def congruence_membership(a: GroupMatrix, k: int) -> bool:
    """Whether the integral matrix a reduces to the identity mod k."""
    if a.mod is not None:
        raise MatrixError("integral matrix required")
    if a.det() != 1:
        raise MatrixError("determinant must be 1")
    if k < 2:
        raise MatrixError("level must be at least 2")
    ident = _identity_flat(a.n)
    return all((x - y) % k == 0 for x, y in zip(a.entries, ident))


def sl_order(n: int, p: int, alpha: int) -> int:
    """|SL_n(Z/p^alpha)| for prime p, alpha >= 0."""
    if alpha == 0:
        return 1
    base = p ** (n * (n - 1) // 2)
    for k in range(2, n + 1):
        base *= p ** k - 1
    return base * p ** ((n * n - 1) * (alpha - 1))


# -- serialization -------------------------------------------------------------


def matrix_to_json(g: GroupMatrix) -> dict:
    return {"n": g.n, "mod": g.mod, "entries": list(g.entries)}


def matrix_from_json(obj: Mapping) -> GroupMatrix:
    return GroupMatrix(int(obj["n"]), tuple(obj["entries"]), obj.get("mod"))


def group_to_json(g: FiniteMatrixGroup) -> dict:
    return {
        "n": g.n,
        "mod": g.mod,
        "elements": [list(x.entries) for x in g.elements],
        "generators": [g.index(x) for x in g.generators],
    }


def group_from_json(obj: Mapping) -> FiniteMatrixGroup:
    n, m = int(obj["n"]), int(obj["mod"])
    elements = tuple(GroupMatrix(n, tuple(e), m) for e in obj["elements"])
    gens = tuple(elements[i] for i in obj["generators"])
    return FiniteMatrixGroup(n, m, elements, gens)
