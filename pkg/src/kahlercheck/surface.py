"""Surface groups, orbifold surface groups, and Dehn's algorithm.

The genus-g surface group has the single relator
[a_1, a_{g+1}] ... [a_g, a_{2g}].  For g >= 2 every piece shared by two
cyclic rotations of the relator (or its inverse) has length 1, far below a
sixth of the relator length 4g, so Dehn's greedy shortening decides the
word problem: repeatedly cyclically reduce and replace any subword that
matches more than half of some rotation by the inverse of the complement.

Orbifold surface groups add cone generators q_i with q_i^{m_i} = 1 and the
cone product appended to the surface relator.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import IntMatrix, cokernel
from .presentation import (EXACT, Word, build_presentation, commutator,
                           free_reduce, surface_genus, verify_hom)


@dataclass(frozen=True)
class SurfaceGroup:
    genus: int
    presentation: object

    @property
    def relator(self):
        return self.presentation.relators[0]


@dataclass(frozen=True)
class OrbifoldSurfaceGroup:
    genus: int
    orders: tuple
    presentation: object


def surface_group(g):
    """Standard presentation of the genus-g surface group."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    names = ["a%d" % (i + 1) for i in range(2 * g)]
    rel = Word()
    for i in range(g):
        rel = rel * commutator(Word(((i, 1),)), Word(((g + i, 1),)))
    pres = build_presentation(names, [rel], name="gamma%d" % g)
    return SurfaceGroup(genus=g, presentation=pres)


def orbifold_group(g, orders):
    """Orbifold surface group: genus g with cone points of the given
    orders (each >= 2)."""
    if g < 1:
        raise ValueError("genus must be >= 1 here (no genus-0 orbifolds)")
    orders = tuple(int(m) for m in orders)
    if any(m < 2 for m in orders):
        raise ValueError("cone orders must be >= 2")
    r = len(orders)
    names = ["a%d" % (i + 1) for i in range(2 * g)] + \
            ["q%d" % (j + 1) for j in range(r)]
    rel = Word()
    for i in range(g):
        rel = rel * commutator(Word(((i, 1),)), Word(((g + i, 1),)))
    for j in range(r):
        rel = rel * Word(((2 * g + j, 1),))
    relators = [rel]
    for j, m in enumerate(orders):
        relators.append(Word(((2 * g + j, 1),) * m))
    pres = build_presentation(names, relators,
                        name="orb_g%d_%s" % (g, "_".join(map(str, orders))))
    return OrbifoldSurfaceGroup(genus=g, orders=orders, presentation=pres)


# ---------------------------------------------------------------------------
# Dehn's algorithm


def _rotations_with_inverse(relator):
    rots = []
    letters = relator.letters
    n = len(letters)
    for w in (letters, relator.inverse().letters):
        for s in range(n):
            rots.append(w[s:] + w[:s])
    return rots


def dehn_trivial(g, word):
    """Decide triviality in the genus-g surface group, g >= 2.

    Greedy shortening with the leftmost longest match against the
    precomputed rotations of the relator and its inverse; each replacement
    strictly shortens the word, so this terminates, and small cancellation
    makes it complete.
    """
    if g < 2:
        raise ValueError("Dehn's algorithm needs genus >= 2")
    relator = surface_group(g).relator
    rots = _rotations_with_inverse(relator)
    half = len(relator) // 2  # match length must exceed this
    w = word.cyclically_reduced()
    while not w.is_identity():
        letters = w.letters
        n = len(letters)
        best = None  # (start, length, rotation)
        # search on the doubled word so cyclic subwords are visible
        doubled = letters + letters
        limit = min(len(relator), n)
        for start in range(n):
            for rot in rots:
                length = 0
                while (length < limit and length < len(rot)
                       and doubled[start + length] == rot[length]):
                    length += 1
                if length > half and (best is None or length > best[1]):
                    best = (start, length, rot)
            if best is not None and best[0] == start and best[1] == limit:
                break
        if best is None:
            return False
        start, length, rot = best
        # u matches rot[:length]; replace u by inverse(rot[length:])
        tail = Word(rot[length:])
        replacement = tail.inverse().letters
        rest = doubled[start + length:start + n]
        w = free_reduce(replacement + rest).cyclically_reduced()
    return True


# ---------------------------------------------------------------------------
# orbifold H1 check


@dataclass(frozen=True)
class OrbifoldH1Report:
    h1_total: object             # AbelianStructure of the orbifold group
    h1_kernel: object            # AbelianStructure of ker(H1(O) -> H1(surface))
    kernel_is_torsion: bool
    free_rank: int


def orbifold_kernel_h1_check(orb):
    """H1 of the orbifold group and the kernel of the induced map onto the
    surface group's H1 (kill the cone generators).

    The kernel must be finite: the cone loops are torsion, so the
    abelianized kernel of the surjection onto the surface group is torsion.
    """
    p = orb.presentation
    g2 = 2 * orb.genus
    r = len(orb.orders)
    total = cokernel(p.exponent_matrix())
    # the kernel is generated by the images of the q's: the quotient of Z^r
    # by the q-columns of the relator matrix
    A = p.exponent_matrix()
    q_block = IntMatrix(A.rows, r,
                        [[A[i, g2 + j] for j in range(r)]
                         for i in range(A.rows)])
    kernel = cokernel(q_block)
    return OrbifoldH1Report(h1_total=total, h1_kernel=kernel,
                            kernel_is_torsion=kernel.is_finite(),
                            free_rank=total.rank)


# ---------------------------------------------------------------------------
# obstruction for central extensions over surface groups


@dataclass(frozen=True)
class SurfaceMapReport:
    genus: int
    h1_surjective: bool
    ext_class: object            # ExtensionClass
    maximality: str              # "asserted" | "automatic (b1 = 2g)" | "not established"
    verdict: str                 # "not_kahler" | "conditional" | "consistent"

    @property
    def obstructed(self):
        return self.verdict == "not_kahler"


def maximal_surface_map_check(h, central_names, maximality_asserted=False):
    """Obstruction for a surjection of a presented group onto a surface
    group of genus >= 2.

    Requires the source presented as a central extension whose base is the
    standard surface presentation and the map the canonical projection;
    the map is verified exactly with Dehn's algorithm and surjectivity is
    certified at the H1 level.  A non-torsion splitting obstruction rules
    out a Kahler source provided the map is maximal (does not factor
    through a higher-genus surface group); maximality is taken from the
    caller's assertion or, automatically, from b1(source) = 2g.
    """
    from .extensions import (ExtensionShapeError, class_and_torsion,
                             recognize_extension)
    from .homology import h1
    g = surface_genus(h.target)
    if g is None or g < 2:
        raise ValueError("target must be a standard surface presentation "
                         "of genus >= 2")
    verified = verify_hom(h, EXACT)

    E = recognize_extension(h.source, central_names)
    if surface_genus(E.base) != g:
        raise ExtensionShapeError(
            "source does not present a central extension over the "
            "genus-%d surface group" % g)
    base_positions = [i for i in range(h.source.num_generators)
                      if i not in set(E.central_indices)]
    for pos, i in enumerate(base_positions):
        if verified.images[i] != Word(((pos, 1),)):
            raise ExtensionShapeError(
                "map is not the canonical projection: generator %s"
                % h.source.generator_names[i])
    for i in E.central_indices:
        if not verified.images[i].is_identity():
            raise ExtensionShapeError(
                "central generator %s has a nontrivial image"
                % h.source.generator_names[i])

    M = verified.induced_h1_matrix()
    h1_onto = cokernel(M).is_trivial()
    if not h1_onto:
        raise ValueError("map is not surjective on H1; not a surjection "
                         "onto the surface group")

    cls = class_and_torsion(E)
    b1_source = h1(h.source).rank
    if maximality_asserted:
        maximality = "asserted"
    elif b1_source == 2 * g:
        maximality = "automatic (b1 = 2g)"
    else:
        maximality = "not established"
    if cls.verdict == "non_torsion":
        verdict = "not_kahler" if maximality != "not established" \
            else "conditional"
    else:
        verdict = "consistent"
    return SurfaceMapReport(genus=g, h1_surjective=h1_onto, ext_class=cls,
                            maximality=maximality, verdict=verdict)
