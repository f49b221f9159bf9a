"""Permutations of half-edges: composition, cycle types, class sizes and uniform class sampling.

Indices are 0-based internally and 1-based in cycle notation.

Composition is right-to-left: ``compose(p, q)(i) == p(q(i))``, so ``q`` acts first. This is the order
in which ``compose(beta, alpha)`` reproduces the face permutation of the permutational model,
``(1,3,5)(2,12,8)(4,7,9)(6,10,11) * (1,2)(3,4)(5,6)(7,8)(9,10)(11,12) = (1,12,6)(2,3,7)(4,5,10)(8,9,11)``.
Applying alpha last instead traces right-hand-turn paths.
"""

from __future__ import annotations

import re
from math import factorial, prod
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .validation import PreconditionError, require

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Partition(tuple):
    """Weakly decreasing tuple of positive integers.

    Used both as the cycle type of a permutation and as the label of an irreducible character.
    Compares and hashes like the plain tuple of its parts.
    """

    def __new__(cls, parts: Iterable[int] = ()) -> Partition:
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise PreconditionError(f"partition parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise PreconditionError(f"partition parts must be nonincreasing, got {parts}")
        return super().__new__(cls, parts)

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> Partition:
        """Build from parts in any order."""
        return cls(sorted(parts, reverse=True))

    @classmethod
    def from_text(cls, text: str) -> Partition:
        """Parse the canonical text form ``5+5+3+2`` (``0`` is the empty partition)."""
        text = text.strip()
        if text in ("", "0"):
            return cls()
        try:
            return cls.from_parts(int(part) for part in text.split("+"))
        except ValueError:
            raise PreconditionError(f"invalid partition text '{text}', expected e.g. '5+5+3+2'")

    @classmethod
    def from_multiplicities(cls, multiplicities: Dict[int, int]) -> Partition:
        """Build from the multiplicity vector a_i = number of parts equal to i."""
        return cls(part for part in sorted(multiplicities, reverse=True) for _ in range(multiplicities[part]))

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def multiplicities(self) -> Dict[int, int]:
        """Map part -> number of parts of that size (only nonzero entries)."""
        counts: Dict[int, int] = {}
        for part in self:
            counts[part] = counts.get(part, 0) + 1
        return counts

    @property
    def sign(self) -> int:
        """Sign of any permutation with this cycle type."""
        return -1 if (self.size - len(self)) % 2 else 1

    def conjugate(self) -> Partition:
        """Transpose of the Young diagram."""
        if not self:
            return Partition()
        return Partition(sum(1 for part in self if part > j) for j in range(self[0]))

    def __str__(self) -> str:
        return "+".join(str(part) for part in self) if self else "0"

    def __repr__(self) -> str:
        return f"Partition({tuple(self)})"


CycleType = Partition


class Permutation:
    """Immutable bijection of {0, ..., N-1}; ``images[i]`` is the image of ``i``."""

    __slots__ = ("_images",)

    def __init__(self, images: Iterable[int]) -> None:
        """Validate and freeze the image array.

        Raises:
            PreconditionError: if the images do not form a bijection
        """
        array = np.array(list(images) if not isinstance(images, np.ndarray) else images, dtype=np.int64)
        require(array.ndim == 1, "permutation images must be a flat sequence")
        degree = array.shape[0]
        if degree and (array.min() < 0 or array.max() >= degree or np.bincount(array, minlength=degree).max() != 1):
            raise PreconditionError(f"images are not a bijection of {{0..{degree - 1}}}")
        array.flags.writeable = False
        self._images = array

    @classmethod
    def _trusted(cls, array: np.ndarray) -> Permutation:
        """Wrap an array already known to be a bijection."""
        perm = cls.__new__(cls)
        array = np.asarray(array, dtype=np.int64)
        array.flags.writeable = False
        perm._images = array
        return perm

    @property
    def images(self) -> np.ndarray:
        return self._images

    @property
    def degree(self) -> int:
        return int(self._images.shape[0])

    def __call__(self, i: int) -> int:
        return int(self._images[i])

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self._images, other._images)

    def __hash__(self) -> int:
        return hash(self._images.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"

    def __str__(self) -> str:
        return format_cycles(self)


def identity(degree: int) -> Permutation:
    return Permutation._trusted(np.arange(degree, dtype=np.int64))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p ∘ q``: ``q`` is applied first.

    Raises:
        PreconditionError: if the degrees differ
    """
    require(p.degree == q.degree, f"cannot compose permutations of degree {p.degree} and {q.degree}")
    return Permutation._trusted(p.images[q.images])


def inverse(p: Permutation) -> Permutation:
    inv = np.empty_like(p.images)
    inv[p.images] = np.arange(p.degree, dtype=np.int64)
    return Permutation._trusted(inv)


def conjugate_by(p: Permutation, g: Permutation) -> Permutation:
    """Return ``g p g^-1``."""
    return compose(g, compose(p, inverse(g)))


def cycles(p: Permutation) -> List[Tuple[int, ...]]:
    """Cycles of ``p`` (0-based, fixed points included), each starting at its smallest element, sorted by it."""
    images = p.images.tolist()
    seen = [False] * len(images)
    result = []
    for start in range(len(images)):
        if seen[start]:
            continue
        cycle = []
        i = start
        while not seen[i]:
            seen[i] = True
            cycle.append(i)
            i = images[i]
        result.append(tuple(cycle))
    return result


def cycle_type(p: Permutation) -> CycleType:
    """Orbit lengths of ``p`` sorted nonincreasing.

    Orbits are the weakly connected components of the functional graph ``i -> p(i)``.
    """
    degree = p.degree
    if degree == 0:
        return Partition()
    graph = csr_matrix((np.ones(degree, dtype=np.int8), (np.arange(degree), p.images)), shape=(degree, degree))
    _, labels = connected_components(graph, directed=True, connection="weak")
    lengths = np.bincount(labels)
    return Partition(sorted(lengths.tolist(), reverse=True))


def sign(p: Permutation) -> int:
    return cycle_type(p).sign


def format_cycles(p: Permutation) -> str:
    """Canonical 1-based cycle notation without fixed points, ``()`` for the identity."""
    text = "".join("(" + ",".join(str(i + 1) for i in cycle) + ")" for cycle in cycles(p) if len(cycle) > 1)
    return text or "()"


def parse_cycles(text: str, degree: Optional[int] = None) -> Permutation:
    """Parse 1-based cycle notation such as ``(1,3,5)(2,12,8)``.

    Args:
        text: cycles in parentheses, comma separated entries, whitespace ignored
        degree: degree of the result; defaults to the largest index mentioned

    Raises:
        PreconditionError: if the text is malformed, repeats an index or exceeds the degree
    """
    compact = re.sub(r"\s+", "", text)
    require(_CYCLE_RE.sub("", compact) == "", f"malformed cycle notation '{text}'")
    parsed = []
    for body in _CYCLE_RE.findall(compact):
        if body:
            try:
                parsed.append([int(entry) for entry in body.split(",")])
            except ValueError:
                raise PreconditionError(f"malformed cycle '({body})' in '{text}'")
    mentioned = [entry for cycle in parsed for entry in cycle]
    require(all(entry >= 1 for entry in mentioned), "cycle entries are 1-based positive integers")
    require(len(mentioned) == len(set(mentioned)), f"an index repeats in '{text}'")
    if degree is None:
        degree = max(mentioned, default=0)
    require(all(entry <= degree for entry in mentioned), f"an index in '{text}' exceeds degree {degree}")
    images = np.arange(degree, dtype=np.int64)
    for cycle in parsed:
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            images[a - 1] = b - 1
    return Permutation._trusted(images)


def class_size(t: CycleType) -> int:
    """Number of elements of S_N with cycle type ``t``: N! / prod_i i^{a_i} a_i!."""
    denominator = prod(part**count * factorial(count) for part, count in t.multiplicities.items())
    return factorial(t.size) // denominator


def alternating_class_count(t: CycleType) -> int:
    """Number of elements of A_N with cycle type ``t`` (the S_N class size for even types, else 0)."""
    return class_size(t) if t.sign == 1 else 0


def sample_uniform_class(degree: int, part: int, rng: np.random.Generator) -> Permutation:
    """Uniform element of the class of type ``part^(degree/part)``.

    A uniform shuffle of {0..N-1} is cut into consecutive blocks of length ``part``, each read as a cycle.

    Raises:
        PreconditionError: if ``part`` does not divide ``degree``
    """
    require(part >= 1 and degree % part == 0, f"part size {part} must divide degree {degree}")
    blocks = rng.permutation(degree).reshape(-1, part)
    images = np.empty(degree, dtype=np.int64)
    images[blocks] = np.roll(blocks, -1, axis=1)
    return Permutation._trusted(images)


def sample_uniform_class_batch(degree: int, part: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent uniform elements of the class ``part^(degree/part)`` as rows of image arrays."""
    require(part >= 1 and degree % part == 0, f"part size {part} must divide degree {degree}")
    orders = rng.permuted(np.tile(np.arange(degree, dtype=np.int64), (size, 1)), axis=1)
    successors = np.roll(orders.reshape(size, degree // part, part), -1, axis=2).reshape(size, degree)
    images = np.empty((size, degree), dtype=np.int64)
    np.put_along_axis(images, orders, successors, axis=1)
    return images


def orbit_lengths_batch(images: np.ndarray) -> np.ndarray:
    """Cycle-count vectors of many permutations at once.

    Args:
        images: array of shape (B, N), each row a permutation

    Returns:
        integer array of shape (B, N + 1); entry [b, L] is the number of L-cycles of row b
    """
    batch, degree = images.shape
    identity_row = np.arange(degree, dtype=images.dtype)
    lengths = np.zeros((batch, degree), dtype=np.int64)
    current = images.copy()
    for step in range(1, degree + 1):
        hit = (current == identity_row) & (lengths == 0)
        lengths[hit] = step
        if not (lengths == 0).any():
            break
        current = np.take_along_axis(images, current, axis=1)
    offsets = np.arange(batch, dtype=np.int64)[:, None] * (degree + 1)
    counts = np.bincount((offsets + lengths).ravel(), minlength=batch * (degree + 1)).reshape(batch, degree + 1)
    counts[:, 1:] //= np.arange(1, degree + 1)
    return counts


def counts_to_cycle_type(counts: np.ndarray) -> CycleType:
    """Convert one row of ``orbit_lengths_batch`` into a cycle type."""
    return Partition(np.repeat(np.arange(len(counts) - 1, 0, -1), counts[:0:-1]).tolist())


def uniform_cycle_type(degree: int, rng: np.random.Generator) -> CycleType:
    """Cycle type of a uniform element of S_N without building the permutation.

    The cycle through the smallest unplaced point has length uniform on the number of unplaced points.
    """
    parts = []
    remaining = degree
    while remaining:
        length = int(rng.integers(1, remaining + 1))
        parts.append(length)
        remaining -= length
    return Partition.from_parts(parts)
