"""Combinatorial maps on closed surfaces, possibly non-orientable.

A map is a set of half-edges with a fixed-point-free pairing, a cyclic
rotation at every vertex and a twist bit per edge.  Face boundaries are
traced on states ``(h, eps)`` where ``eps`` is the local direction of
rotation; crossing a twisted edge flips the direction.

The module also contains the exhaustive generator used as an oracle.  It
builds each rooted map exactly once by growing a canonical labelling
from the root: half-edges are processed in creation order and each one is
either sent to a brand-new vertex (untwisted, entering at position 0) or
glued to a later unpaired half-edge with either twist.
"""
from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

Code = Tuple[Tuple[int, ...], Tuple[Tuple[int, int], ...]]


class CombinatorialMap:
    """Rooted map given by rotations, pairing and twist bits.

    ``rotations[v]`` lists the half-edges around vertex v in cyclic order.
    ``partner[h]`` is the other half of h's edge; ``twist[h]`` is 0 or 1
    and must agree on both halves.  The root is a half-edge together with
    a side (+1 keeps the stored rotation, -1 reverses it).
    """

    def __init__(self, rotations: Sequence[Sequence[int]], partner: Sequence[int],
                 twist: Sequence[int] | None = None, root: int = 0, root_side: int = 1):
        self.rotations = [list(r) for r in rotations]
        self.partner = list(partner)
        H = len(self.partner)
        self.twist = list(twist) if twist is not None else [0] * H
        self.root = root
        self.root_side = root_side
        self.vertex_of = [-1] * H
        self.position = [-1] * H
        for v, rot in enumerate(self.rotations):
            for i, h in enumerate(rot):
                self.vertex_of[h] = v
                self.position[h] = i
        self._validate()

    def _validate(self):
        H = len(self.partner)
        for h in range(H):
            q = self.partner[h]
            if q == h or not 0 <= q < H or self.partner[q] != h:
                raise ValueError(f"pairing is not a fixed-point-free involution at {h}")
            if self.twist[h] != self.twist[q]:
                raise ValueError(f"twist bits disagree on edge {h}-{q}")
            if self.vertex_of[h] < 0:
                raise ValueError(f"half-edge {h} is not on any vertex")
        if self.root_side not in (1, -1):
            raise ValueError("root side must be +1 or -1")
        if len(self._component(self.root)) != len(self.rotations):
            raise ValueError("map is not connected")

    def _component(self, h0: int) -> set:
        seen = {self.vertex_of[h0]}
        stack = [self.vertex_of[h0]]
        while stack:
            v = stack.pop()
            for h in self.rotations[v]:
                w = self.vertex_of[self.partner[h]]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    # -- basic counts -----------------------------------------------------

    @property
    def num_halfedges(self) -> int:
        return len(self.partner)

    @property
    def num_edges(self) -> int:
        return len(self.partner) // 2

    @property
    def num_vertices(self) -> int:
        return len(self.rotations)

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def degrees(self) -> List[int]:
        return [len(r) for r in self.rotations]

    def sigma(self, h: int, eps: int = 1) -> int:
        rot = self.rotations[self.vertex_of[h]]
        return rot[(self.position[h] + eps) % len(rot)]

    # -- faces ------------------------------------------------------------

    def step(self, h: int, eps: int) -> Tuple[int, int]:
        """Cross the edge of h and turn to the next corner."""
        q = self.partner[h]
        e2 = -eps if self.twist[h] else eps
        return self.sigma(q, e2), e2

    def face_orbits(self) -> List[List[Tuple[int, int]]]:
        seen = set()
        orbits = []
        for h in range(self.num_halfedges):
            for eps in (1, -1):
                if (h, eps) in seen:
                    continue
                orb = []
                s = (h, eps)
                while s not in seen:
                    seen.add(s)
                    orb.append(s)
                    s = self.step(*s)
                orbits.append(orb)
        return orbits

    def faces(self) -> List[List[Tuple[int, int]]]:
        """One boundary walk per face (the two directions are merged)."""
        out, used = [], set()
        for orb in self.face_orbits():
            key = min(orb)
            if key in used:
                continue
            rev = self._reverse_orbit(orb)
            used.add(key)
            used.add(min(rev))
            out.append(orb)
        return out

    def _reverse_orbit(self, orb: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        # state (h, eps) leaves along h; the same corner walked backwards
        # leaves along the previous half-edge in the opposite direction
        h, eps = orb[0]
        q = self.sigma(h, -eps)
        start = (q, -eps)
        out = [start]
        s = self.step(*start)
        while s != start:
            out.append(s)
            s = self.step(*s)
        return out

    def num_faces(self) -> int:
        return len(self.face_orbits()) // 2

    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces()

    def is_orientable(self) -> bool:
        return all(t == 0 for _, t in self.canonical_code()[1])

    # -- canonical form ---------------------------------------------------

    def canonical_code(self) -> Code:
        """Root-first relabelling; equal codes iff the rooted maps are equal.

        Returns (degree sequence, ((partner, twist) per half-edge)) in the
        canonical numbering.
        """
        label: Dict[int, int] = {}
        orient: Dict[int, int] = {}
        order: List[int] = []  # canonical half-edge list
        degs: List[int] = []

        def visit(h: int, eps: int):
            v = self.vertex_of[h]
            orient[v] = eps
            d = self.degree(v)
            degs.append(d)
            x = h
            for _ in range(d):
                label[x] = len(order)
                order.append(x)
                x = self.sigma(x, eps)

        visit(self.root, self.root_side)
        i = 0
        while i < len(order):
            h = order[i]
            q = self.partner[h]
            if self.vertex_of[q] not in orient:
                eps = orient[self.vertex_of[h]]
                if self.twist[h]:
                    eps = -eps
                visit(q, eps)
            i += 1
        pairs = []
        for h in order:
            q = self.partner[h]
            t = self.twist[h] ^ (orient[self.vertex_of[h]] != orient[self.vertex_of[q]])
            pairs.append((label[q], t))
        return tuple(degs), tuple(pairs)

    @classmethod
    def from_code(cls, code: Code) -> "CombinatorialMap":
        degs, pairs = code
        rotations, k = [], 0
        for d in degs:
            rotations.append(list(range(k, k + d)))
            k += d
        return cls(rotations, [p for p, _ in pairs], [t for _, t in pairs], 0, 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, CombinatorialMap) and self.canonical_code() == other.canonical_code()

    def __hash__(self):
        return hash(self.canonical_code())

    def __repr__(self) -> str:
        return (f"CombinatorialMap(V={self.num_vertices}, E={self.num_edges}, "
                f"F={self.num_faces()}, degrees={self.degrees()})")


# ---------------------------------------------------------------------------
# Exhaustive generation


def generate_rooted_maps(leaves: int, excess: int, degrees: Iterable[int], faces: int,
                         orientable: bool, root_degree: int = 1) -> Iterator[Code]:
    """Yield canonical codes of all rooted maps with the given profile.

    The root vertex has ``root_degree`` (a leaf by default).  Other vertices
    are leaves or have a degree in ``degrees``; ``leaves`` counts all
    degree-1 vertices including a leaf root, and ``excess`` is the sum of
    (d - 2) over the non-leaf vertices, root included.  Only maps with
    exactly ``faces`` faces and the requested orientability are produced.
    """
    degs = sorted(set(int(d) for d in degrees))
    if any(d < 3 for d in degs):
        raise ValueError("internal degrees must be >= 3")

    partner: List[int] = []
    twist: List[int] = []
    vdeg: List[int] = []
    vstart: List[int] = []
    vert: List[int] = []

    def add_vertex(d: int):
        vstart.append(len(partner))
        vdeg.append(d)
        v = len(vdeg) - 1
        for _ in range(d):
            partner.append(-1)
            twist.append(0)
            vert.append(v)

    def pop_vertex():
        d = vdeg.pop()
        vstart.pop()
        for _ in range(d):
            partner.pop()
            twist.pop()
            vert.pop()

    def sig(h: int, eps: int) -> int:
        v = vert[h]
        s = vstart[v]
        return s + (h - s + eps) % vdeg[v]

    def closed_orbit(h: int, eps: int) -> Tuple[int, int] | None:
        start = (h, eps)
        best = start
        s = start
        while True:
            x, e = s
            q = partner[x]
            if q < 0:
                return None
            if twist[x]:
                e = -e
            s = (sig(q, e), e)
            if s == start:
                return best
            if s < best:
                best = s

    def new_faces(h: int, q: int) -> int:
        found = set()
        for x in (h, q):
            for e in (1, -1):
                key = closed_orbit(x, e)
                if key is not None:
                    found.add(key)
        return len(found) // 2

    if root_degree == 1:
        leaves_left = leaves - 1
        excess_left = excess
    else:
        leaves_left = leaves
        excess_left = excess - (root_degree - 2)
    if leaves_left < 0 or excess_left < 0:
        return
    add_vertex(root_degree)
    twists = (0,) if orientable else (0, 1)

    def rec(h: int, open_count: int, lleft: int, xleft: int, closed: int):
        # skip paired half-edges
        H = len(partner)
        while h < H and partner[h] >= 0:
            h += 1
        if h == H:
            if lleft == 0 and xleft == 0 and closed == faces:
                if orientable or any(twist):
                    pairs = tuple((partner[i], twist[i]) for i in range(H))
                    yield tuple(vdeg), pairs
            return
        slack = open_count + xleft - lleft
        if slack < 0 or slack % 2:
            return
        # option A: a new vertex
        choices = ([1] if lleft > 0 else []) + [d for d in degs if d - 2 <= xleft]
        for d in choices:
            add_vertex(d)
            q = vstart[-1]
            partner[h], partner[q] = q, h
            nf = new_faces(h, q)
            c2 = closed + nf
            if c2 < faces or (c2 == faces and open_count - 2 + d == 0):
                if d == 1:
                    yield from rec(h + 1, open_count - 1, lleft - 1, xleft, c2)
                else:
                    yield from rec(h + 1, open_count + d - 2, lleft, xleft - (d - 2), c2)
            partner[h] = partner[q] = -1
            pop_vertex()
        # option B: glue to a later open half-edge
        for q in range(h + 1, len(partner)):
            if partner[q] >= 0:
                continue
            for t in twists:
                partner[h], partner[q] = q, h
                twist[h] = twist[q] = t
                nf = new_faces(h, q)
                c2 = closed + nf
                if c2 < faces or (c2 == faces and open_count == 2):
                    yield from rec(h + 1, open_count - 2, lleft, xleft, c2)
                partner[h] = partner[q] = -1
                twist[h] = twist[q] = 0

    yield from rec(0, root_degree, leaves_left, excess_left, 0)
