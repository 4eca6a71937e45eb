"""Finite groups with fully materialized element sets.

Every group is stored as a Cayley table over element ids ``0..n-1``.
Subgroups are Python ``int`` bitmasks over those ids, which keeps subset
tests, intersections and hashing cheap for the small orders this package
targets.  Products act on the right: ``(g*h)`` means "first g, then h",
so conjugation is ``x^g = g^-1 x g``.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np

from locality_lab import _kernels

DEFAULT_MAX_ORDER = 2000


class GroupError(Exception):
    pass


class SizeBoundExceeded(GroupError):
    pass


class ElementNotInGroup(GroupError):
    pass


def max_order() -> int:
    return int(os.environ.get("LOCALITY_LAB_MAX_ORDER", DEFAULT_MAX_ORDER))


def bits(mask: int) -> list[int]:
    """Ids set in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def to_mask(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_power(n: int, p: int) -> bool:
    return p_part(n, p) == n


# ---------------------------------------------------------------------------
# permutations


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True, order=True)
class Perm:
    """A permutation of ``{0, ..., degree-1}`` stored by its image array."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a bijection: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Perm":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, text: str, degree: int) -> "Perm":
        """Parse 1-based cycle notation such as ``(1 2)(3 4)``; ``()`` is the identity."""
        img = list(range(degree))
        stripped = text.strip()
        if _CYCLE_RE.sub("", stripped).strip():
            raise ValueError(f"bad cycle notation: {text!r}")
        for body in _CYCLE_RE.findall(stripped):
            pts = [int(t) - 1 for t in body.replace(",", " ").split()]
            if len(set(pts)) != len(pts):
                raise ValueError(f"repeated point in cycle ({body})")
            for a in pts:
                if not 0 <= a < degree:
                    raise ValueError(f"point {a + 1} outside degree {degree}")
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a] = b
        return cls(tuple(img))

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(tuple(other.images[i] for i in self.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def cycles(self) -> str:
        seen = set()
        parts = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            parts.append("(" + " ".join(str(c + 1) for c in cyc) + ")")
        return "".join(parts) or "()"

    def __str__(self) -> str:
        return self.cycles()


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """A finite group given by a Cayley table.

    ``labels[i]`` names element ``i``; ``mul[i, j]`` is the id of ``i*j``.
    """

    def __init__(self, labels, mul, name: str | None = None):
        self.labels = list(labels)
        self.mul = np.ascontiguousarray(mul, dtype=np.int32)
        n = len(self.labels)
        if self.mul.shape != (n, n):
            raise GroupError("Cayley table has the wrong shape")
        self.n = n
        self.name = name
        ar = np.arange(n)
        idents = [i for i in range(n) if np.array_equal(self.mul[i], ar)]
        if len(idents) != 1:
            raise GroupError("Cayley table has no unique identity")
        self.identity = idents[0]
        inv = np.full(n, -1, dtype=np.int32)
        rows, cols = np.nonzero(self.mul == self.identity)
        inv[rows] = cols
        if (inv < 0).any():
            raise GroupError("Cayley table is not a group (missing inverse)")
        self.inv = inv
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.full_mask = (1 << n) - 1

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name or ''} order={self.n}>"

    def __len__(self) -> int:
        return self.n

    @property
    def order(self) -> int:
        return self.n

    # -- element level ------------------------------------------------------

    def id_of(self, label) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise ElementNotInGroup(label) from None

    def prod(self, *ids: int) -> int:
        x = self.identity
        for g in ids:
            x = int(self.mul[x, g])
        return x

    def power(self, g: int, k: int) -> int:
        x = self.identity
        for _ in range(k):
            x = int(self.mul[x, g])
        return x

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = int(self.mul[x, g])
            k += 1
        return k

    @cached_property
    def conj(self) -> np.ndarray:
        """``conj[g, x]`` is the id of ``x^g = g^-1 x g``."""
        left = self.mul[self.inv]  # left[g, x] = g^-1 x
        return np.ascontiguousarray(self.mul[left, np.arange(self.n)[:, None]])

    def conjugate_element(self, x: int, g: int) -> int:
        return int(self.conj[g, x])

    # -- subgroup level -----------------------------------------------------

    def generate(self, ids) -> int:
        """Bitmask of the subgroup generated by ``ids``."""
        return to_mask(_kernels.closure(self.mul, list(ids), self.identity))

    def is_subgroup(self, mask: int) -> bool:
        ids = bits(mask)
        if self.identity not in ids:
            return False
        for a in ids:
            for b in ids:
                if not (mask >> int(self.mul[a, b])) & 1:
                    return False
        return True

    def conjugate_mask(self, mask: int, g: int) -> int:
        row = self.conj[g]
        return to_mask(int(row[x]) for x in bits(mask))

    def normalizer(self, mask: int, within: int | None = None) -> int:
        within = self.full_mask if within is None else within
        return to_mask(g for g in bits(within) if self.conjugate_mask(mask, g) == mask)

    def centralizer(self, mask: int, within: int | None = None) -> int:
        within = self.full_mask if within is None else within
        xs = bits(mask)
        return to_mask(
            g for g in bits(within) if all(self.conj[g, x] == x for x in xs)
        )

    def center(self) -> int:
        return self.centralizer(self.full_mask)

    def is_normal(self, sub: int, within: int | None = None) -> bool:
        within = self.full_mask if within is None else within
        return all(self.conjugate_mask(sub, g) == sub for g in bits(within))

    def commutator(self, a: int, b: int) -> int:
        return self.prod(int(self.inv[a]), int(self.inv[b]), a, b)

    def join(self, *masks: int) -> int:
        acc = 0
        for m in masks:
            acc |= m
        return self.generate(bits(acc)) if acc else 1 << self.identity

    def product_set(self, a: int, b: int) -> int:
        """The set ``AB`` (a subgroup when one factor normalizes the other)."""
        return to_mask(int(self.mul[x, y]) for x in bits(a) for y in bits(b))

    def as_group(self, mask: int, name: str | None = None) -> "FiniteGroup":
        """The subgroup ``mask`` as a standalone group; labels are the parent ids."""
        ids = bits(mask)
        pos = {g: i for i, g in enumerate(ids)}
        sub = self.mul[np.ix_(ids, ids)]
        table = np.vectorize(pos.__getitem__, otypes=[np.int32])(sub)
        return FiniteGroup(ids, table, name=name)

    @cached_property
    def _cyclic_subgroups(self) -> list[int]:
        return sorted({self.generate([g]) for g in range(self.n)}, key=self.sort_key)

    def sort_key(self, mask: int):
        return (popcount(mask), bits(mask))

    def subgroups(self) -> list[int]:
        """All subgroups, ordered by order then by element ids."""
        return list(self._subgroup_lattice)

    @cached_property
    def _subgroup_lattice(self) -> tuple[int, ...]:
        if self.n > max_order():
            raise SizeBoundExceeded(f"order {self.n} exceeds bound {max_order()}")
        cyclic = self._cyclic_subgroups
        found = set(cyclic)
        frontier = list(cyclic)
        while frontier:
            new = set()
            for h in frontier:
                hid = bits(h)
                for c in cyclic:
                    if c & ~h:
                        j = self.generate(hid + bits(c))
                        if j not in found:
                            new.add(j)
            found |= new
            frontier = list(new)
        return tuple(sorted(found, key=self.sort_key))

    def conjugacy_classes(self) -> list[int]:
        seen = 0
        out = []
        for x in range(self.n):
            if (seen >> x) & 1:
                continue
            cls = to_mask(int(self.conj[g, x]) for g in range(self.n))
            seen |= cls
            out.append(cls)
        return out

    def normal_closure(self, mask: int) -> int:
        acc = mask
        for g in range(self.n):
            acc |= self.conjugate_mask(mask, g)
        return self.generate(bits(acc))

    def normal_subgroups(self) -> list[int]:
        """All normal subgroups, as unions of conjugacy classes closed under products."""
        if self.n > max_order():
            raise SizeBoundExceeded(f"order {self.n} exceeds bound {max_order()}")
        classes = self.conjugacy_classes()
        triv = 1 << self.identity
        found = {triv}
        frontier = [triv]
        while frontier:
            new = []
            for nm in frontier:
                for c in classes:
                    if c & ~nm:
                        m = self.normal_closure(nm | c)
                        if m not in found:
                            found.add(m)
                            new.append(m)
            frontier = new
        return sorted(found, key=self.sort_key)

    def is_p_group(self, mask: int, p: int) -> bool:
        return is_p_power(popcount(mask), p)

    def sylow(self, p: int) -> int:
        """A Sylow p-subgroup, grown deterministically from the trivial group."""
        target = p_part(self.n, p)
        cur = 1 << self.identity
        while popcount(cur) < target:
            nrm = self.normalizer(cur)
            for g in bits(nrm & ~cur):
                cand = self.generate(bits(cur) + [g])
                if is_p_power(popcount(cand), p):
                    cur = cand
                    break
            else:  # pragma: no cover - Sylow's theorem forbids this
                raise GroupError("could not extend p-subgroup")
        return cur

    def sylow_conjugates(self, p: int) -> list[int]:
        s = self.sylow(p)
        return sorted({self.conjugate_mask(s, g) for g in range(self.n)}, key=self.sort_key)

    def big_o_p(self, p: int) -> int:
        """Largest normal p-subgroup."""
        ps = [m for m in self.normal_subgroups() if self.is_p_group(m, p)]
        return self.join(*ps)

    def o_super_p(self, p: int) -> int:
        """Smallest normal subgroup with p-group quotient: generated by p'-elements."""
        gens = [g for g in range(self.n) if gcd(self.element_order(g), p) == 1]
        return self.generate(gens)

    def o_p_prime(self, p: int) -> int:
        ns = [m for m in self.normal_subgroups() if gcd(popcount(m), p) == 1]
        return self.join(*ns)

    def is_characteristic_p(self, p: int) -> bool:
        q = self.big_o_p(p)
        return self.centralizer(q) & ~q == 0

    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())


class PermGroup(FiniteGroup):
    """A permutation group; elements are ``Perm`` objects in lexicographic order."""

    def __init__(self, generators, degree: int | None = None, name: str | None = None):
        gens = [g if isinstance(g, Perm) else Perm(tuple(g)) for g in generators]
        if degree is None:
            if not gens:
                raise GroupError("degree required for a group without generators")
            degree = gens[0].degree
        if any(g.degree != degree for g in gens):
            raise GroupError("generators of differing degree")
        self.degree = degree
        self.generators = gens
        elems = _perm_closure(gens, degree)
        if len(elems) > max_order():
            raise SizeBoundExceeded(f"order {len(elems)} exceeds bound {max_order()}")
        elems.sort()
        arr = np.array([e.images for e in elems], dtype=np.uint8)
        super().__init__(elems, _perm_cayley(arr), name=name)

    @classmethod
    def from_cycles(cls, cycle_strings, degree: int, name: str | None = None) -> "PermGroup":
        return cls([Perm.from_cycles(c, degree) for c in cycle_strings], degree, name)

    def perm(self, i: int) -> Perm:
        return self.labels[i]

    def id_of_cycles(self, text: str) -> int:
        return self.id_of(Perm.from_cycles(text, self.degree))

    def subgroup_perm_group(self, mask: int, name: str | None = None) -> "PermGroup":
        ids = bits(mask)
        return PermGroup([self.labels[i] for i in ids], self.degree, name)


def _perm_closure(gens: list[Perm], degree: int) -> list[Perm]:
    ident = Perm.identity(degree)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return list(seen)


def _perm_cayley(arr: np.ndarray) -> np.ndarray:
    """Cayley table for lexicographically sorted permutation rows."""
    n, d = arr.shape
    # (g*h)[i] = h[g[i]]
    comp = arr[np.arange(n)[None, :, None], arr[:, None, :]]
    keys = np.ascontiguousarray(arr).view(f"S{d}").ravel()
    ckeys = np.ascontiguousarray(comp.reshape(n * n, d)).view(f"S{d}").ravel()
    idx = np.searchsorted(keys, ckeys)
    if not (keys[np.minimum(idx, n - 1)] == ckeys).all():  # pragma: no cover
        raise GroupError("element set not closed")
    return idx.reshape(n, n).astype(np.int32)


# ---------------------------------------------------------------------------
# the operation-level API


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of ``parent`` stored as a bitmask of element ids."""

    parent: FiniteGroup
    mask: int

    @property
    def elements(self) -> list[int]:
        return bits(self.mask)

    @property
    def order(self) -> int:
        return popcount(self.mask)

    def __contains__(self, g: int) -> bool:
        return bool((self.mask >> g) & 1)

    def __le__(self, other: "Subgroup") -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and self.mask != other.mask

    def __hash__(self) -> int:
        return hash((id(self.parent), self.mask))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and other.mask == self.mask
        )

    def as_group(self) -> FiniteGroup:
        return self.parent.as_group(self.mask)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order})"


def _check_element(G: FiniteGroup, g: int) -> None:
    if not (isinstance(g, (int, np.integer)) and 0 <= g < G.n):
        raise ElementNotInGroup(g)


def sylow_p(G: FiniteGroup, p: int) -> Subgroup:
    return Subgroup(G, G.sylow(p))


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return Subgroup(G, G.normalizer(H.mask))


def centralizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return Subgroup(G, G.centralizer(H.mask))


def conjugate_subgroup(H: Subgroup, g: int) -> Subgroup:
    _check_element(H.parent, g)
    return Subgroup(H.parent, H.parent.conjugate_mask(H.mask, g))


def normal_subgroups(G: FiniteGroup) -> list[Subgroup]:
    return [Subgroup(G, m) for m in G.normal_subgroups()]


def big_o_p(G: FiniteGroup, p: int) -> Subgroup:
    return Subgroup(G, G.big_o_p(p))


def o_super_p(G: FiniteGroup, p: int) -> Subgroup:
    return Subgroup(G, G.o_super_p(p))


def is_characteristic_p(G: FiniteGroup, p: int) -> bool:
    return G.is_characteristic_p(p)
