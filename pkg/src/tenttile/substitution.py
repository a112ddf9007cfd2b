"""Substitutions on integer alphabets, prefix graphs and coincidence searches.

Also holds the four families of substitutions attached to special Pisot
units and, per registry record, the affine formulas that express each Rauzy
subtile through the tent-tile.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import json
from typing import Callable, Sequence

import numpy as np

Word = tuple[int, ...]


@dataclass(frozen=True)
class Substitution:
    images: tuple[Word, ...]
    name: str = ""

    def __post_init__(self):
        n = len(self.images)
        if n == 0:
            raise ValueError("empty alphabet")
        for img in self.images:
            if len(img) == 0:
                raise ValueError("substitution must be non-erasing")
            if any(not (0 <= a < n) for a in img):
                raise ValueError("letter out of range")

    @classmethod
    def from_lists(cls, images: Sequence[Sequence[int]], name: str = "") -> "Substitution":
        return cls(tuple(tuple(int(a) for a in img) for img in images), name)

    @property
    def size(self) -> int:
        return len(self.images)

    def apply(self, w: Sequence[int]) -> Word:
        out: list[int] = []
        for a in w:
            out.extend(self.images[a])
        return tuple(out)

    def iterate(self, a: int, k: int) -> Word:
        w: Word = (a,)
        for _ in range(k):
            w = self.apply(w)
        return w

    def to_json(self) -> str:
        return json.dumps({"alphabet": self.size, "images": [list(i) for i in self.images]})

    @classmethod
    def from_json(cls, text: str) -> "Substitution":
        data = json.loads(text)
        subs = cls.from_lists(data["images"])
        if subs.size != data["alphabet"]:
            raise ValueError("alphabet size mismatch")
        return subs


def abelianize(w: Sequence[int], size: int) -> np.ndarray:
    v = np.zeros(size, dtype=np.int64)
    for a in w:
        v[a] += 1
    return v


def incidence_matrix(s: Substitution) -> np.ndarray:
    """Column j is the letter-count vector of the image of j."""
    return np.stack([abelianize(img, s.size) for img in s.images], axis=1)


def is_primitive(s: Substitution) -> bool:
    m = incidence_matrix(s)
    n = s.size
    reach = (m > 0).astype(np.int64)
    power = reach.copy()
    for _ in range(n * n):
        if power.all():
            return True
        power = ((power @ reach) > 0).astype(np.int64)
    return bool(power.all())


@dataclass(frozen=True)
class PrefixEdge:
    source: int  # a
    prefix: Word  # U
    target: int  # b, with images[b] = U a V


@dataclass(frozen=True)
class PrefixGraph:
    size: int
    edges: tuple[PrefixEdge, ...]

    def adjacency_counts(self) -> np.ndarray:
        m = np.zeros((self.size, self.size), dtype=np.int64)
        for e in self.edges:
            m[e.source, e.target] += 1
        return m

    def out_edges(self, a: int) -> list[PrefixEdge]:
        return [e for e in self.edges if e.source == a]

    def prefixes(self) -> set[Word]:
        return {e.prefix for e in self.edges}


def prefix_graph(s: Substitution) -> PrefixGraph:
    edges = []
    for b, img in enumerate(s.images):
        for pos, a in enumerate(img):
            edges.append(PrefixEdge(a, img[:pos], b))
    return PrefixGraph(s.size, tuple(edges))


# -----------------------------------------------------------------------------
# the four families


def zeta_p(p: int) -> Substitution:
    if p < 3:
        raise ValueError("zeta_p needs p >= 3")
    images = [(1, 0)] + [(k + 1,) for k in range(1, p - 1)] + [(p - 1, 0)]
    return Substitution(tuple(images), f"zeta_{p}")


def theta_q(q: int) -> Substitution:
    if q < 2:
        raise ValueError("theta_q needs q >= 2")
    images: list[Word] = [(k + 1,) for k in range(q - 1)]
    images.append((q, q - 1))
    images += [(q + k + 1,) for k in range(q - 1)]
    images.append((2 * q - 1, 0))
    return Substitution(tuple(images), f"theta_{q}")


def theta_prime_q(q: int) -> Substitution:
    if q < 3:
        raise ValueError("theta'_q needs q >= 3")
    if q % 2:
        images: list[Word] = [(q + 1 + k,) for k in range(q - 1)]
        images.append((0, 2 * q - 1))
        images += [(k + 1,) for k in range(q - 1)]
        images.append((q - 1, q))
    else:
        images = [(k + 2,) for k in range(q - 2)]
        images.append((0, q - 1))
        images.append((0, q - 1, 1))
    return Substitution(tuple(images), f"theta'_{q}")


def zeta_prime_p(p: int) -> Substitution:
    if p < 3:
        # for p = 2 the displayed even-case images use the letter 2 outside the alphabet
        raise ValueError("zeta'_p is only well formed for p >= 3")
    if p % 2:
        images: list[Word] = [(p + 1, p)]
        images += [(p + 1 + k,) for k in range(1, p - 1)]
        images.append((0, 2 * p - 1))
        images.append((0, 1))
        images += [(k + 1,) for k in range(1, p - 1)]
        images.append((p - 1, p))
    else:
        images = [(2, 0, 1)]
        images += [(k + 2,) for k in range(1, p - 2)]
        images.append((0, p - 1))
        images.append((0, p - 1, 0, 1))
    return Substitution(tuple(images), f"zeta'_{p}")


def plus_minus_blocks(q: int) -> tuple[np.ndarray, np.ndarray]:
    """The q x q blocks M+ (subdiagonal plus corner) and M- (single corner entry)."""
    mp = np.zeros((q, q), dtype=np.int64)
    for k in range(q - 1):
        mp[k + 1, k] = 1
    mp[q - 1, q - 1] = 1
    mm = np.zeros((q, q), dtype=np.int64)
    mm[0, q - 1] = 1
    return mp, mm


# -----------------------------------------------------------------------------
# coincidence searches


@dataclass(frozen=True)
class CoincidenceResult:
    holds: bool
    k_max: int
    witnesses: dict = field(default_factory=dict)  # (a1, a2) -> (k, letter, at_start)
    failed_pairs: tuple = ()
    periodic: bool = False  # search state repeated: failure holds for every k

    @property
    def witness_k(self) -> int | None:
        if not self.holds:
            return None
        return max(w[0] for w in self.witnesses.values()) if self.witnesses else 0

    def summary(self) -> str:
        if self.holds:
            return f"holds (all pairs coincide by k={self.witness_k})"
        return f"not found up to k_max={self.k_max}" + (" (search state periodic)" if self.periodic else "")


def _pair_search(s: Substitution, k_max: int, step, start_state, is_hit, key_bound, state_cap: int):
    """Generic level-by-level search over pairs of positions.

    `step(state)` yields successor states; `is_hit(state)` tests coincidence.
    """
    n = s.size
    witnesses = {}
    failed = []
    periodic_all = True
    for a1 in range(n):
        for a2 in range(a1 + 1, n):
            level = {start_state(a1, a2)}
            seen_levels = {frozenset(level)}
            found = None
            periodic = False
            for k in range(1, k_max + 1):
                nxt = set()
                for st in level:
                    for ns in step(st):
                        if key_bound(ns, k):
                            nxt.add(ns)
                hits = [st for st in nxt if is_hit(st)]
                if hits:
                    best = sorted(hits, key=lambda st: (not st[-1], st[0]))[0]
                    found = (k, best[0], bool(best[-1]))
                    break
                if not nxt:
                    periodic = True
                    break
                fz = frozenset(nxt)
                if fz in seen_levels:
                    periodic = True
                    break
                seen_levels.add(fz)
                if len(nxt) > state_cap:
                    break
                level = nxt
            if found is None:
                failed.append((a1, a2))
                periodic_all = periodic_all and periodic
            else:
                witnesses[(a1, a2)] = found
    holds = not failed
    return CoincidenceResult(holds, k_max, witnesses, tuple(failed), (not holds) and periodic_all)


def strong_coincidence(s: Substitution, k_max: int | None = None, state_cap: int = 200_000) -> CoincidenceResult:
    """Search k <= k_max for a common letter at equal letter-count prefixes, for every pair."""
    n = s.size
    if k_max is None:
        k_max = n * n
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    m = incidence_matrix(s)
    graph = prefix_graph(s)
    by_letter = [[(e.source, tuple(int(x) for x in abelianize(e.prefix, n))) for e in graph.edges if e.target == b]
                 for b in range(n)]
    # Components of the offset along left eigenvectors evolve as y -> mu*y + c.
    # Expanding ones can never return to 0 once |y| > C/(|mu|-1); neutral ones
    # cannot return within the remaining levels once |y| > remaining*C.
    vals, vecs = np.linalg.eig(m.T.astype(float))
    jumps = np.array([[a - b for a, b in zip(l1, l2)]
                      for bl in by_letter for _, l1 in bl for bl2 in by_letter for _, l2 in bl2], dtype=float)
    comps = []
    for mu, v in zip(vals, vecs.T):
        c = float(np.abs(jumps @ v).max()) * 1.01 + 1e-9
        if abs(mu) > 1 + 1e-9:
            comps.append((v, c / (abs(mu) - 1.0), False))
        elif abs(mu) > 1 - 1e-9:
            comps.append((v, c, True))
    if np.linalg.cond(vecs) > 1e8:
        comps = []
    rows = [[int(x) for x in row] for row in m]

    def start(a1, a2):
        return (a1, a2, (0,) * n, True)

    def step(st):
        b1, b2, delta, at_start = st
        md = [sum(r * x for r, x in zip(row, delta)) for row in rows]
        for c1, l1 in by_letter[b1]:
            for c2, l2 in by_letter[b2]:
                nd = tuple(x + y - z for x, y, z in zip(md, l1, l2))
                yield (c1, c2, nd, at_start and not any(l1) and not any(l2))

    def hit(st):
        return st[0] == st[1] and not any(st[2])

    def bounded(st, k):
        if not comps:
            return True
        delta = np.array(st[2], dtype=float)
        for v, c, neutral in comps:
            limit = c * (k_max - k) + 1e-9 if neutral else c
            if abs(delta @ v) > limit:
                return False
        return True

    res = _pair_search(s, k_max, step, start, hit, bounded, state_cap)
    if any(neutral for _, _, neutral in comps) and res.periodic:
        # horizon-dependent pruning: a repeated level only settles the bounded search
        res = CoincidenceResult(res.holds, res.k_max, res.witnesses, res.failed_pairs, False)
    return res


def weak_coincidence(s: Substitution, u: Sequence, k_max: int | None = None, state_cap: int = 200_000) -> CoincidenceResult:
    """Like strong_coincidence but equality of prefixes is tested through <l(P1) - l(P2), u> = 0 exactly."""
    n = s.size
    if k_max is None:
        k_max = n * n
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    m = incidence_matrix(s)
    graph = prefix_graph(s)
    u = list(u)
    # eigenvalue from u M = lambda u
    lam = sum((u[i] * int(m[i, 0]) for i in range(n)), u[0] * 0) / u[0]
    def pref_val(prefix):
        z = u[0] * 0
        for a in prefix:
            z = z + u[a]
        return z
    by_letter = [[(e.source, pref_val(e.prefix), len(e.prefix) == 0) for e in graph.edges if e.target == b] for b in range(n)]
    pref_max = max(abs(pref_val(e.prefix).value()) for e in graph.edges)
    lam_f = lam.value()
    bound = (pref_max / (lam_f - 1.0)) * 1.01 + 1e-9
    zero = u[0] * 0

    def start(a1, a2):
        return (a1, a2, zero, True)

    def step(st):
        b1, b2, z, at_start = st
        lz = lam * z
        for c1, v1, e1 in by_letter[b1]:
            for c2, v2, e2 in by_letter[b2]:
                yield (c1, c2, lz + v1 - v2, at_start and e1 and e2)

    def hit(st):
        return st[0] == st[1] and st[2].is_zero()

    def bounded(st, k):
        return abs(st[2].value()) <= bound

    return _pair_search(s, k_max, step, start, hit, bounded, state_cap)


# -----------------------------------------------------------------------------
# registry map: which substitution describes which tent-tile


AffinePair = tuple  # (translation t, linear multiplier m): x -> Psi(t) + Psi-multiplication(m) x


@dataclass(frozen=True)
class Correspondence:
    """Data tying a substitution to the tent-tile of one registry record.

    `eigen` names the dominant eigenvalue: "alpha", "beta" or "beta2".
    `eigenvector(alpha, beta)` returns the explicit left eigenvector.
    `subtiles(alpha, beta)` returns per letter the affine pair (t, m) with
    R(k) = Psi(t) + m * F.
    `tent_letters` lists the letters whose union is the tent-tile (None when
    the tent-tile is recovered through inverse maps).
    """

    family: str
    parameter: int
    eigen: str
    eigenvector: Callable
    subtiles: Callable
    tent_letters: tuple | None
    lattice_letters: tuple | None  # (reference letter, other letters) for the lattice basis
    quotient_condition: bool


def _zeta_subtiles(p):
    def f(a, b):
        out = [(a ** k * b, -(a ** k) * b) for k in range(p - 1)]
        out.append((a * 0, a ** (p - 1)))
        return out
    return f


def _theta_subtiles(q):
    def f(a, b):
        out = []
        for k in range(q - 1):
            out.append((a ** k - a ** k * b, a ** k * b))
        out.append((a ** (q - 1), -(a ** (q - 1))))
        for k in range(q - 1):
            out.append((a ** k * b, -(a ** k) * b))
        out.append((a * 0, a ** (q - 1)))
        return out
    return f


def _theta_prime_subtiles(q):
    def f(a, b):
        zero = a * 0
        out = []
        if q % 2:
            for k in range(q - 1):
                if k % 2 == 0:
                    out.append((zero, b ** k * a))
                else:
                    out.append((b ** k, -(b ** k) * a))
            out.append((zero, b ** (q - 1)))
            for j in range(q - 1):
                if j % 2 == 0:
                    out.append((b ** j, -(b ** j) * a))
                else:
                    out.append((zero, b ** j * a))
            out.append((b ** (q - 1), -(b ** (q - 1))))
        else:
            for k in range(q - 1):
                if k % 2 == 0:
                    out.append((zero, b ** k * a))
                else:
                    out.append((b ** k, -(b ** k) * a))
            out.append((b ** (q - 1), -(b ** (q - 1))))
        return out
    return f


def _zeta_prime_subtiles(p):
    def f(a, b):
        zero = a * 0
        if p == 3:
            return [
                (zero, a),
                (b, -(b * a)),
                (zero, b ** 2),
                (a, -a),
                (zero, b * a),
                (b ** 2, -(b ** 2)),
            ]
        if p % 2:
            raise ValueError("subtile formulas are only available for p = 3 or even p")
        out = []
        for k in range(p - 1):
            if k % 2 == 0:
                out.append((zero, b ** k * a))
            else:
                out.append((b ** k, -(b ** k) * a))
        out.append((b ** (p - 1), -(b ** (p - 1))))
        return out
    return f


def family_correspondence(family: str, param: int) -> Correspondence:
    if family == "zeta":
        return Correspondence(
            "zeta", param, "alpha",
            lambda a, b: [b] + [a ** k for k in range(1, param)],
            _zeta_subtiles(param), tuple(range(param)), None, True)
    if family == "theta":
        q = param
        return Correspondence(
            "theta", q, "alpha",
            lambda a, b: [a ** k for k in range(q)] * 2,
            _theta_subtiles(q), tuple(range(q, 2 * q)), None, True)
    if family == "theta_prime":
        q = param
        if q % 2:
            return Correspondence(
                "theta_prime", q, "beta",
                lambda a, b: [b ** k for k in range(q)] * 2,
                _theta_prime_subtiles(q), None, None, True)
        return Correspondence(
            "theta_prime", q, "beta2",
            lambda a, b: [b ** k for k in range(q)],
            _theta_prime_subtiles(q), None, None, True)
    if family == "zeta_prime":
        p = param
        if p == 3:
            return Correspondence(
                "zeta_prime", 3, "beta",
                lambda a, b: [a, b, b ** 2] * 2,
                _zeta_prime_subtiles(3), None, None, True)
        if p % 2 == 0:
            return Correspondence(
                "zeta_prime", p, "beta2",
                lambda a, b: [a] + [b ** k for k in range(1, p)],
                _zeta_prime_subtiles(p), None, None, True)
        raise ValueError("zeta'_p data only for p = 3 or even p")
    raise ValueError(f"unknown family {family}")


_REGISTRY_MAP = {
    1: ("zeta", 3, (0, (1, 2)), True),
    3: ("theta", 3, (0, (1, 2)), True),
    4: ("theta", 4, (0, (1, 2, 3)), True),
    5: ("theta", 5, (0, (1, 2)), False),
    -1: ("zeta_prime", 3, (0, (1, 2)), True),
    -3: ("theta_prime", 3, (0, (1, 2)), True),
    -4: ("theta_prime", 4, (0, (1, 2, 3)), True),
    -5: ("theta_prime", 5, (0, (1, 2)), False),
}

_CONSTRUCTORS = {"zeta": zeta_p, "theta": theta_q, "theta_prime": theta_prime_q, "zeta_prime": zeta_prime_p}


def substitution_for(record_or_index) -> tuple[Substitution, Correspondence]:
    """The substitution whose Rauzy fractal carries the tent-tile of the record."""
    i = getattr(record_or_index, "index", record_or_index)
    if i == 0:
        raise ValueError("index 0 has no tent-tile")
    if i in (2, -2):
        raise ValueError("the quadratic cases are handled by exact interval arithmetic")
    if i not in _REGISTRY_MAP:
        raise KeyError(i)
    fam, param, lat, quot = _REGISTRY_MAP[i]
    base = family_correspondence(fam, param)
    corr = Correspondence(base.family, base.parameter, base.eigen, base.eigenvector, base.subtiles,
                          base.tent_letters, lat, quot)
    return _CONSTRUCTORS[fam](param), corr


def registry_substitution_indices() -> list[int]:
    return sorted(_REGISTRY_MAP)
