"""Boundary graphs of Rauzy fractals, their dominant eigenvalues and the boundary dimension.

Translation classes z = <x, u> are kept as integer coordinate vectors in a
Z-basis of the module spanned by the eigenvector entries.  Multiplication by
the inverse of the dominant eigenvalue preserves that module (the incidence
matrix is unimodular), so exploration never leaves exact integer arithmetic.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Sequence

import mpmath
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .geometry import EmbeddingMap, build_embedding
from .numberfield import (FieldElement, SpecialPisotRecord, conjugates, minimal_polynomial_of,
                          registry_lookup, sign_at_dominant_root)
from .spectral import CharPoly, PerronData, char_poly, perron_data, poly_eval, poly_mul
from .substitution import Correspondence, PrefixGraph, Substitution, prefix_graph, substitution_for


class QuotientConditionError(ValueError):
    """The lattice translation set is not available for this substitution."""


class UndecidedComparison(RuntimeError):
    pass


# -----------------------------------------------------------------------------
# integer module of translation classes


def _row_hnf(rows: list[list[int]]) -> list[list[int]]:
    """Echelon basis of the integer row span (gcd elimination, column by column)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    out = []
    for col in range(len(rows[0])):
        piv = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(piv) > 1:
            piv.sort(key=lambda r: abs(r[col]))
            p = piv[0]
            nxt = [p]
            for r in piv[1:]:
                q = r[col] // p[col]
                r2 = [a - q * b for a, b in zip(r, p)]
                if r2[col] != 0:
                    nxt.append(r2)
                elif any(r2):
                    rest.append(r2)
            piv = nxt
        if piv:
            out.append(piv[0])
        rows = rest
    return out


def _mat_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


class ClassModule:
    """Z-module generated by field elements, with integer coordinates and fast numerics."""

    def __init__(self, generators: Sequence[FieldElement], lam: FieldElement, emb: EmbeddingMap):
        fld = lam.field
        self.field = fld
        self.n = fld.degree
        den = 1
        for g in generators:
            for c in g.coeffs:
                den = den * c.denominator // math.gcd(den, c.denominator)
        rows = [[int(c * den) for c in g.coeffs] for g in generators]
        hnf = _row_hnf(rows)
        if len(hnf) != self.n:
            raise ValueError("generators do not span a full-rank module")
        self.basis = [fld.element([Fraction(x, den) for x in r]) for r in hnf]
        self._inv = _mat_inverse([list(b.coeffs) for b in self.basis])
        self.values = np.array([b.value() for b in self.basis])
        self.psi_rows = np.array([emb.psi(b) for b in self.basis])
        self._psi_list = self.psi_rows.tolist()
        lam_inv = lam.inverse()
        div = [self.coords(b * lam_inv) for b in self.basis]
        if any(not isinstance(x, int) for row in div for x in row):
            raise ValueError("division by the eigenvalue leaves the module")
        self.div_rows = div  # coords(b_i / lam)
        self.lam = lam

    def coords_exact(self, z: FieldElement) -> tuple[Fraction, ...]:
        n = self.n
        return tuple(sum((z.coeffs[k] * self._inv[k][j] for k in range(n)), Fraction(0)) for j in range(n))

    def coords(self, z: FieldElement) -> tuple:
        """Integer coordinates (Fractions are kept when z is outside the module)."""
        c = self.coords_exact(z)
        return tuple(int(x) if x.denominator == 1 else x for x in c)

    def contains(self, z: FieldElement) -> bool:
        return all(x.denominator == 1 for x in self.coords_exact(z))

    def element(self, c: Sequence) -> FieldElement:
        z = self.field.zero
        for ci, b in zip(c, self.basis):
            if ci:
                z = z + b * ci
        return z

    def divide(self, c: Sequence) -> tuple:
        n = self.n
        rows = self.div_rows
        return tuple(sum(c[i] * rows[i][j] for i in range(n)) for j in range(n))

    def sign(self, c: Sequence) -> int:
        if not any(c):
            return 0
        acc = 0.0
        mag = 0.0
        for ci, v in zip(c, self.values):
            t = float(ci) * v
            acc += t
            mag += abs(t)
        if abs(acc) > 1e-9 * mag:
            return 1 if acc > 0 else -1
        return sign_at_dominant_root(self.element(c))

    def psi_norm(self, c: Sequence) -> float:
        rows = self._psi_list
        acc = 0.0
        for j in range(len(rows[0])):
            t = 0.0
            for i, ci in enumerate(c):
                if ci:
                    t += float(ci) * rows[i][j]
            acc += t * t
        return math.sqrt(acc)


# -----------------------------------------------------------------------------
# lattice point enumeration


def enumerate_lattice(gen: np.ndarray, center: np.ndarray, radius: float) -> list[tuple[int, ...]]:
    """All integer c with ||c @ gen - center|| <= radius (gen has full row rank).

    Fincke-Pohst enumeration after a QR factorisation of gen^T.
    """
    gen = np.asarray(gen, dtype=float)
    n = gen.shape[0]
    q, r = np.linalg.qr(gen.T)
    y = q.T @ center
    perp2 = float(center @ center - y @ y)
    r2 = radius * radius - max(perp2, 0.0)
    if r2 < 0:
        return []
    slack = 1e-9 * (radius * radius + 1.0)
    out: list[tuple[int, ...]] = []
    c = [0] * n

    def rec(i: int, rem: float):
        s = y[i] - sum(r[i, j] * c[j] for j in range(i + 1, n))
        rii = r[i, i]
        half = math.sqrt(max(rem, 0.0) + slack) / abs(rii)
        mid = s / rii
        for v in range(math.ceil(mid - half), math.floor(mid + half) + 1):
            c[i] = v
            dlt = rii * v - s
            nrem = rem - dlt * dlt
            if nrem < -slack:
                continue
            if i == 0:
                out.append(tuple(c))
            else:
                rec(i - 1, nrem)
        c[i] = 0

    rec(n - 1, r2)
    return out


# -----------------------------------------------------------------------------
# context: substitution, eigen data, module


@dataclass
class BoundaryContext:
    record: SpecialPisotRecord
    sigma: Substitution
    corr: Correspondence
    perron: PerronData
    emb: EmbeddingMap
    graph: PrefixGraph
    module: ClassModule
    edge_coords: dict  # prefix word -> module coordinates of <l(U), u>

    @property
    def size(self) -> int:
        return self.sigma.size


def boundary_context(record_or_index, scale: int = 1, precision: int = 64) -> BoundaryContext:
    rec = record_or_index if isinstance(record_or_index, SpecialPisotRecord) else registry_lookup(record_or_index)
    sigma, corr = substitution_for(rec)
    perron = perron_data(sigma, rec, corr, scale=scale)
    emb = build_embedding(rec, precision)
    g = prefix_graph(sigma)
    module = ClassModule(list(perron.u), perron.lambda0, emb)
    edge_coords = {}
    for e in g.edges:
        if e.prefix not in edge_coords:
            z = perron.pi_exact(np.bincount(e.prefix, minlength=sigma.size) if e.prefix else [0] * sigma.size)
            edge_coords[e.prefix] = module.coords(z)
    return BoundaryContext(rec, sigma, corr, perron, emb, g, module, edge_coords)


def contraction_modulus_bounds(lam: FieldElement) -> tuple[float, float]:
    """(upper bound of |lambda_1|, lower bound of |lambda_d|) over the non-dominant conjugates."""
    cj = conjugates(lam, 64)
    top = max(abs(v) + e for v, e in cj)
    low = min(abs(v) - e for v, e in cj)
    return top * (1 + 1e-15), low * (1 - 1e-15)


def norm_bound(ctx: BoundaryContext) -> float:
    """2 max ||pi l(U)|| / (1 - |lambda_1|), rounded outward."""
    top, _ = contraction_modulus_bounds(ctx.perron.lambda0)
    if top >= 1:
        raise ValueError("dominant eigenvalue is not Pisot")
    mx = max(ctx.module.psi_norm(c) for c in ctx.edge_coords.values())
    return 2.0 * mx / (1.0 - top) * (1 + 1e-9)


def exploration_bound(ctx: BoundaryContext) -> float:
    """Norm bound actually used while exploring.

    A vertex lies on an infinite walk only if R(a1) and z + R(a2) meet, so
    its translation is a difference of two subtile points. Any certified bound
    on such differences that does not exceed the definition's bound yields the
    same pruned graph and a much smaller search space.
    """
    from .rauzy import difference_bound, rauzy_gifs

    gifs = rauzy_gifs(ctx.sigma, ctx.perron, ctx.emb)
    return min(norm_bound(ctx), difference_bound(gifs) * (1 + 1e-9))


def in_xi_sr(z: FieldElement, a: int, perron: PerronData) -> bool:
    """0 <= z < <l(a), u>, decided exactly at the dominant root."""
    return sign_at_dominant_root(z) >= 0 and sign_at_dominant_root(perron.u[a] - z) > 0


def xi_lat_basis(ctx_or_index) -> list[FieldElement]:
    ctx = ctx_or_index if isinstance(ctx_or_index, BoundaryContext) else boundary_context(ctx_or_index)
    if not ctx.corr.quotient_condition or ctx.corr.lattice_letters is None:
        raise QuotientConditionError(f"quotient map condition fails for index {ctx.record.index}")
    ref, others = ctx.corr.lattice_letters
    u = ctx.perron.u
    return [u[ref] - u[a] for a in others]


def in_xi_lat(z: FieldElement, basis: Sequence[FieldElement]) -> bool:
    """Exact membership of z in the Z-span of the lattice basis."""
    n = z.field.degree
    k = len(basis)
    rows = [[basis[j].coeffs[i] for j in range(k)] + [z.coeffs[i]] for i in range(n)]
    # row reduce the n x (k+1) system
    piv_cols = []
    r = 0
    for col in range(k):
        p = next((i for i in range(r, n) if rows[i][col] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, n)):
        return False
    return all(rows[i][k].denominator == 1 for i in range(r))


# -----------------------------------------------------------------------------
# graph


@dataclass(frozen=True)
class BoundaryVertex:
    a1: int
    z: FieldElement
    a2: int

    def key(self):
        return (self.a1, self.a2, self.z.coeffs)


@dataclass
class BoundaryGraph:
    variant: str  # sr | lat
    rule: str  # derived | literal
    record_index: int
    vertices: list[BoundaryVertex]
    edges: list[tuple[int, int, FieldElement]]
    seeds: list[int]
    norm_bound: float
    explored: int = 0
    coords: list = field(default_factory=list, repr=False)

    def adjacency(self) -> np.ndarray:
        n = len(self.vertices)
        m = np.zeros((n, n), dtype=np.int64)
        for i, j, _ in self.edges:
            m[i, j] += 1
        return m

    def adjacency_sparse(self) -> csr_matrix:
        n = len(self.vertices)
        if not self.edges:
            return csr_matrix((n, n), dtype=np.int64)
        rows = [i for i, _, _ in self.edges]
        cols = [j for _, j, _ in self.edges]
        return csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))

    def to_json(self) -> dict:
        def fe(z):
            return [str(c) for c in z.coeffs]
        return {
            "variant": self.variant,
            "rule": self.rule,
            "index": self.record_index,
            "vertices": [[v.a1, fe(v.z), v.a2] for v in self.vertices],
            "edges": [[i, j, fe(s)] for i, j, s in self.edges],
            "seeds": list(self.seeds),
        }


def _normalize(b1, c, b2, module):
    s = module.sign(c)
    if s > 0 or (s == 0 and b1 < b2):
        return (b1, c, b2)
    if s < 0 or (s == 0 and b1 > b2):
        return (b2, tuple(-x for x in c), b1)
    return None


def _sr_seeds(ctx: BoundaryContext, bound: float) -> list[tuple]:
    mod = ctx.module
    umax = max(u.value() for u in ctx.perron.u)
    half = umax / 2
    gen = np.column_stack([mod.values / half, mod.psi_rows / bound])
    center = np.zeros(gen.shape[1])
    center[0] = 1.0
    cands = enumerate_lattice(gen, center, math.sqrt(2.0) * (1 + 1e-9))
    ucoords = [mod.coords(u) for u in ctx.perron.u]
    out = set()
    for c in cands:
        if mod.sign(c) < 0 or mod.psi_norm(c) > bound:
            continue
        for a2 in range(ctx.size):
            if mod.sign(tuple(x - y for x, y in zip(ucoords[a2], c))) <= 0:
                continue
            for a1 in range(ctx.size):
                v = _normalize(a1, c, a2, mod)
                if v is not None and v[1] == c:
                    out.add(v)
    return sorted(out, key=lambda v: (v[0], v[2], v[1]))


def _lat_seeds(ctx: BoundaryContext, bound: float) -> list[tuple]:
    mod = ctx.module
    basis = xi_lat_basis(ctx)
    bcoords = [mod.coords(b) for b in basis]
    gen = np.array([ctx.emb.psi(b) for b in basis])
    cands = enumerate_lattice(gen, np.zeros(gen.shape[1]), bound * (1 + 1e-9))
    out = set()
    for k in cands:
        if not any(k):
            continue
        c = tuple(sum(k[i] * bcoords[i][j] for i in range(len(k))) for j in range(mod.n))
        if mod.sign(c) <= 0 or mod.psi_norm(c) > bound:
            continue
        for a1 in range(ctx.size):
            for a2 in range(ctx.size):
                out.add((a1, c, a2))
    return sorted(out, key=lambda v: (v[0], v[2], v[1]))


def build_boundary_graph(record_or_ctx, variant: str = "sr", rule: str = "derived",
                         max_vertices: int = 2_000_000, bound: str = "tight") -> BoundaryGraph:
    """Largest boundary graph of the requested variant.

    rule="derived": lambda z' = z + <l(U2) - l(U1), u> with mirror normalisation.
    rule="literal": the edge equations with z' on both sides, kept as a negative control.
    bound="definition" uses the norm bound of the definition verbatim; "tight"
    uses the certified subtile-difference bound (same graph, faster).
    """
    ctx = record_or_ctx if isinstance(record_or_ctx, BoundaryContext) else boundary_context(record_or_ctx)
    if variant not in ("sr", "lat"):
        raise ValueError("variant must be 'sr' or 'lat'")
    if rule not in ("derived", "literal"):
        raise ValueError("rule must be 'derived' or 'literal'")
    if bound not in ("tight", "definition"):
        raise ValueError("bound must be 'tight' or 'definition'")
    mod = ctx.module
    bound = exploration_bound(ctx) if bound == "tight" else norm_bound(ctx)
    seeds = _sr_seeds(ctx, bound) if variant == "sr" else _lat_seeds(ctx, bound)

    out_edges = [[(e.prefix, e.target) for e in ctx.graph.out_edges(a)] for a in range(ctx.size)]
    ec = ctx.edge_coords
    lit_cache: dict = {}
    if rule == "literal":
        lam = ctx.perron.lambda0
        inv_m = (lam - 1).inverse()
        inv_p = (lam + 1).inverse()

    index: dict = {}
    order: list = []
    raw_edges: set = set()
    queue: deque = deque()
    for v in seeds:
        index[v] = len(order)
        order.append(v)
        queue.append(v)

    def visit(v):
        if v not in index:
            if len(order) >= max_vertices:
                raise RuntimeError("boundary graph exceeds vertex budget")
            index[v] = len(order)
            order.append(v)
            queue.append(v)
        return index[v]

    n = mod.n
    while queue:
        v = queue.popleft()
        a1, c, a2 = v
        src = index[v]
        for p1, b1 in out_edges[a1]:
            u1 = ec[p1]
            for p2, b2 in out_edges[a2]:
                u2 = ec[p2]
                w = tuple(c[j] + u2[j] - u1[j] for j in range(n))
                label = u1 if mod.sign(w) >= 0 else tuple(c[j] + u2[j] for j in range(n))
                if rule == "derived":
                    targets = [_normalize(b1, mod.divide(w), b2, mod)]
                else:
                    key = (p1, p2)
                    if key not in lit_cache:
                        diff = mod.element(tuple(u2[j] - u1[j] for j in range(n)))
                        lit_cache[key] = (mod.coords(diff * inv_m), mod.coords(-diff * inv_p))
                    t1, t2 = lit_cache[key]
                    targets = []
                    for cc, x, y in ((t1, b1, b2), (t2, b2, b1)):
                        if all(isinstance(q, int) for q in cc):
                            targets.append(_normalize(x, cc, y, mod))
                for t in targets:
                    if t is None or mod.psi_norm(t[1]) > bound:
                        continue
                    dst = visit(t)
                    raw_edges.add((src, dst, label))

    explored = len(order)
    # prune vertices without an infinite forward walk
    succ: list[set] = [set() for _ in order]
    pred: list[set] = [set() for _ in order]
    for i, j, _ in raw_edges:
        succ[i].add(j)
        pred[j].add(i)
    alive = [True] * len(order)
    outdeg = [len(s) for s in succ]
    stack = [i for i, d in enumerate(outdeg) if d == 0]
    while stack:
        i = stack.pop()
        if not alive[i]:
            continue
        alive[i] = False
        for p in pred[i]:
            if alive[p]:
                outdeg[p] -= 1
                if outdeg[p] == 0:
                    stack.append(p)
    # keep what is reachable from surviving seeds
    reach = [False] * len(order)
    stack = [index[s] for s in seeds if alive[index[s]]]
    for i in stack:
        reach[i] = True
    while stack:
        i = stack.pop()
        for j in succ[i]:
            if alive[j] and not reach[j]:
                reach[j] = True
                stack.append(j)
    keep = [i for i in range(len(order)) if reach[i]]
    verts = [(order[i], mod.element(order[i][1])) for i in keep]
    perm = sorted(range(len(keep)), key=lambda k: (verts[k][0][0], verts[k][0][2], verts[k][1].coeffs))
    new_id = {keep[k]: r for r, k in enumerate(perm)}
    vertices = [BoundaryVertex(verts[k][0][0], verts[k][1], verts[k][0][2]) for k in perm]
    coords = [verts[k][0][1] for k in perm]
    label_cache: dict = {}

    def lab(c):
        if c not in label_cache:
            label_cache[c] = mod.element(c)
        return label_cache[c]

    edges = [(new_id[i], new_id[j], lab(s)) for i, j, s in raw_edges if i in new_id and j in new_id]
    edges.sort(key=lambda e: (e[0], e[1], e[2].coeffs))
    seed_ids = sorted(new_id[index[s]] for s in seeds if index[s] in new_id)
    return BoundaryGraph(variant, rule, ctx.record.index, vertices, edges, seed_ids, bound, explored, coords)


# -----------------------------------------------------------------------------
# dominant eigenvalue


@dataclass(frozen=True)
class DominantEigenvalue:
    charpoly: CharPoly  # of the whole adjacency matrix
    component_poly: CharPoly  # of the strongly connected component attaining the maximum
    lower: Fraction
    upper: Fraction
    components: int

    @property
    def value(self) -> float:
        return float((self.lower + self.upper) / 2)

    @property
    def width(self) -> float:
        return float(self.upper - self.lower)


def _collatz_wielandt(rows: list[list[tuple[int, int]]], vec: np.ndarray) -> tuple[Fraction, Fraction]:
    v = [Fraction(float(x)).limit_denominator(1 << 60) for x in vec]
    lo = hi = None
    for i, row in enumerate(rows):
        s = sum(w * v[j] for j, w in row)
        q = s / v[i]
        lo = q if lo is None or q < lo else lo
        hi = q if hi is None or q > hi else hi
    return lo, hi


def _perron_bracket(sub: np.ndarray) -> tuple[Fraction, Fraction]:
    """Certified enclosure of the Perron root of an irreducible nonnegative integer matrix."""
    n = sub.shape[0]
    rows = [[(j, int(sub[i, j])) for j in np.nonzero(sub[i])[0]] for i in range(n)]
    if n == 1:
        x = Fraction(int(sub[0, 0]))
        return x, x
    # the left/right choice does not matter; use power-iteration refined eigenvector
    w, vecs = np.linalg.eig(sub.astype(float))
    k = int(np.argmax(w.real))
    v = np.abs(vecs[:, k].real)
    if v.min() <= 0:
        v = v + 1e-300
    mat = sub.astype(float)
    lam = w[k].real
    for _ in range(200):
        nv = mat @ v
        nv /= nv.max()
        if np.allclose(nv, v, rtol=1e-16, atol=0):
            break
        v = nv
    # shifted iteration (I + M) removes periodicity problems
    for _ in range(50):
        nv = v + mat @ v / max(lam, 1e-300)
        nv /= nv.max()
        v = nv
    return _collatz_wielandt(rows, v)


def graph_dominant_eigenvalue(g: BoundaryGraph | np.ndarray) -> DominantEigenvalue:
    """Exact characteristic polynomial and an enclosure of the dominant root."""
    adj = g.adjacency() if isinstance(g, BoundaryGraph) else np.asarray(g, dtype=np.int64)
    n = adj.shape[0]
    if n == 0:
        raise ValueError("empty graph")
    ncomp, labels = connected_components(csr_matrix(adj), directed=True, connection="strong")
    total = [1]
    best = None
    for comp in range(ncomp):
        idx = np.nonzero(labels == comp)[0]
        sub = adj[np.ix_(idx, idx)]
        cp = char_poly(sub) if len(idx) > 1 else CharPoly((-int(sub[0, 0]), 1))
        total = poly_mul(total, list(cp.coeffs))
        if len(idx) == 1 and sub[0, 0] == 0:
            continue
        lo, hi = _perron_bracket(sub)
        if best is None or lo > best[1]:
            best = (lo, hi, cp)
        elif hi >= best[0] and lo <= best[1]:
            # overlapping enclosures: keep the wider union, polynomial of the larger midpoint
            if lo + hi > best[0] + best[1]:
                best = (min(lo, best[0]), max(hi, best[1]), cp)
            else:
                best = (min(lo, best[0]), max(hi, best[1]), best[2])
    if best is None:
        return DominantEigenvalue(CharPoly(tuple(total)), CharPoly((0, 1)), Fraction(0), Fraction(0), ncomp)
    return DominantEigenvalue(CharPoly(tuple(total)), best[2], best[0], best[1], ncomp)


def polynomial_root_near(poly: Sequence[int], x: float) -> tuple[float, float]:
    """The root of poly closest to x and its distance (mpmath, 50 digits)."""
    with mpmath.workdps(50):
        roots = mpmath.polyroots(list(reversed([int(c) for c in poly])), maxsteps=400, extraprec=400)
        best = min(roots, key=lambda r: abs(r - x))
        return complex(best).real, float(abs(best - x))


def sign_change(poly: Sequence[int], lo: Fraction, hi: Fraction) -> bool:
    """True when poly takes opposite signs (or vanishes) at the ends of [lo, hi]."""
    a = poly_eval([Fraction(c) for c in poly], lo)
    b = poly_eval([Fraction(c) for c in poly], hi)
    return a == 0 or b == 0 or (a > 0) != (b > 0)


def eigenvalue_interval(lam: FieldElement, bits: int) -> tuple[Fraction, Fraction]:
    """Rational interval of width <= 2^-bits around the real value of lam (> 1)."""
    mp = [Fraction(c) for c in minimal_polynomial_of(lam)]
    v = lam.value()
    lo = Fraction(v) - Fraction(1, 1 << 20)
    hi = Fraction(v) + Fraction(1, 1 << 20)
    flo = poly_eval(mp, lo)
    if (flo > 0) == (poly_eval(mp, hi) > 0):
        raise RuntimeError("initial bracket does not isolate the eigenvalue")
    while hi - lo > Fraction(1, 1 << bits):
        mid = (lo + hi) / 2
        fm = poly_eval(mp, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def less_than_eigenvalue(mu: DominantEigenvalue, lam: FieldElement, max_bits: int = 4096) -> bool:
    """Decide mu < lambda_0 with disjoint enclosures."""
    bits = 64
    while True:
        lo, hi = eigenvalue_interval(lam, bits)
        if mu.upper < lo:
            return True
        if mu.lower > hi:
            return False
        # once the lambda_0 enclosure is much narrower than mu's, refining it cannot help
        if bits >= max_bits or Fraction(1, 1 << bits) < (mu.upper - mu.lower) / 4:
            raise UndecidedComparison("eigenvalue enclosures overlap")
        bits *= 2


def irreducible_factor(poly: Sequence[int], lo: Fraction, hi: Fraction) -> tuple[int, ...]:
    """The irreducible integer factor of poly (ascending) with a sign change on [lo, hi]."""
    import sympy

    t = sympy.Symbol("t")
    expr = sum(int(c) * t ** k for k, c in enumerate(poly))
    _, factors = sympy.factor_list(expr, t)
    for f, _ in factors:
        coeffs = tuple(int(c) for c in reversed(sympy.Poly(f, t).all_coeffs()))
        if sign_change(coeffs, lo, hi):
            return coeffs if coeffs[-1] > 0 else tuple(-c for c in coeffs)
    raise ValueError("no factor changes sign on the interval")


# -----------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class DimensionReport:
    index: int
    lambda0: float
    mu_sr: float
    mu_interval: tuple[float, float]
    mu_poly: tuple[int, ...]
    lambda_1: float
    lambda_d: float
    d: int
    box_dimension: float
    hausdorff_equal: bool
    sr_tiling_proper: bool
    vertices: int
    edges: int
    mu_lat: float | None = None
    lat_tiling_proper: bool | None = None

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["mu_poly"] = list(self.mu_poly)
        out["mu_interval"] = list(self.mu_interval)
        out["dim_H" if self.hausdorff_equal else "dim_H_upper_bound"] = self.box_dimension
        return out


def box_dimension(d: int, lambda0: float, mu: float, lambda_d: float) -> float:
    return d + (math.log(lambda0) - math.log(mu)) / math.log(lambda_d)


def tiling_property(record_or_index, variant: str = "sr", graph: BoundaryGraph | None = None) -> bool:
    ctx = boundary_context(record_or_index)
    g = graph or build_boundary_graph(ctx, variant)
    mu = graph_dominant_eigenvalue(g)
    return less_than_eigenvalue(mu, ctx.perron.lambda0)


def dimension_report(record_or_index, with_lattice: bool = False) -> DimensionReport:
    ctx = boundary_context(record_or_index)
    g = build_boundary_graph(ctx, "sr")
    mu = graph_dominant_eigenvalue(g)
    lam = ctx.perron.lambda0
    proper = less_than_eigenvalue(mu, lam)
    if not proper:
        raise ValueError("mu_sr >= lambda_0: the dimension formula does not apply")
    cj = [abs(v) for v, _ in conjugates(lam, 64)]
    l1, ld = max(cj), min(cj)
    dim = box_dimension(ctx.record.d, lam.value(), mu.value, ld)
    mu_lat = lat_ok = None
    if with_lattice and ctx.corr.quotient_condition:
        gl = build_boundary_graph(ctx, "lat")
        ml = graph_dominant_eigenvalue(gl)
        mu_lat = ml.value
        lat_ok = less_than_eigenvalue(ml, lam)
    return DimensionReport(
        ctx.record.index, lam.value(), mu.value, (float(mu.lower), float(mu.upper)),
        mu.component_poly.coeffs, l1, ld, ctx.record.d, dim, abs(l1 - ld) < 1e-9, proper,
        len(g.vertices), len(g.edges), mu_lat, lat_ok)
