"""Ideal arithmetic in quadratic number fields K = Q(sqrt(m)).

Prime splitting, squarefree-ideal enumeration by ideal class, the class
group via Minkowski-bound enumeration with exact principality testing,
units modulo squares, and the analytic constants (residue of zeta_K at
s=1, zeta_K(2)) that drive squarefree-ideal counts and character
densities.

Ideals are kept in fully factored form; a two-generator Z-module (HNF)
representation is derived on demand for membership and principality
tests.  Fields are capped at |disc| <= 10^4 and real fields at a
fundamental-unit coordinate bound of 10^7 so that every search is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import factorize, kronecker, sieve_primes, sqrt_mod_prime, squarefree_part

SPLIT, INERT, RAMIFIED = "split", "inert", "ramified"

DISC_CAP = 10**4
UNIT_COORD_CAP = 10**7

# default Euler-product cutoff for zeta_K(2); tail below 1e-8 (see zeta2_tail_bound)
ZETA2_DEFAULT_CUTOFF = 15_000_000


class FieldTooLargeError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class PrimeIdealK:
    """A prime ideal of O_K, identified by its rational prime and conjugate slot."""

    p: int
    splitting: str
    conjugate_index: int
    norm: int


@dataclass(frozen=True, slots=True)
class IdealK:
    """A nonzero integral ideal in factored form; factorization sorted, no repeats."""

    factorization: tuple[tuple[PrimeIdealK, int], ...]
    norm: int


ONE_IDEAL = IdealK((), 1)


@dataclass(frozen=True, slots=True)
class IdealClassData:
    h: int
    representatives: tuple[IdealK, ...]


def _fact_key(ideal: IdealK):
    return tuple((P.p, P.conjugate_index, e) for P, e in ideal.factorization)


def make_ideal(factors) -> IdealK:
    """Build an IdealK from (PrimeIdealK, exponent) pairs, merging duplicates."""
    acc: dict[PrimeIdealK, int] = {}
    for P, e in factors:
        if e < 0:
            raise ValueError("make_ideal: exponents must be >= 0")
        if e:
            acc[P] = acc.get(P, 0) + e
    fact = tuple(sorted(acc.items(), key=lambda t: (t[0].norm, t[0].p, t[0].conjugate_index)))
    norm = 1
    for P, e in fact:
        norm *= P.norm**e
    return IdealK(fact, norm)


def ideal_mul(a: IdealK, b: IdealK) -> IdealK:
    return make_ideal(a.factorization + b.factorization)


def ideal_conj(a: IdealK) -> IdealK:
    out = []
    for P, e in a.factorization:
        if P.splitting == SPLIT:
            P = PrimeIdealK(P.p, SPLIT, 1 - P.conjugate_index, P.norm)
        out.append((P, e))
    return make_ideal(out)


def ideal_is_squarefree(a: IdealK) -> bool:
    return all(e == 1 for _, e in a.factorization)


def ideal_divides(d: IdealK, q: IdealK) -> bool:
    qmap = {P: e for P, e in q.factorization}
    return all(qmap.get(P, 0) >= e for P, e in d.factorization)


class QuadraticField:
    """Q(sqrt(m)) for squarefree m not in {0, 1}, with exact class data."""

    def __init__(self, m: int):
        if m in (0, 1):
            raise ValueError("m must be a squarefree integer distinct from 0 and 1")
        if squarefree_part(m) != m:
            raise ValueError(f"m = {m} is not squarefree")
        self.m = m
        self.disc = m if m % 4 == 1 else 4 * m
        if abs(self.disc) > DISC_CAP:
            raise FieldTooLargeError(f"|disc| = {abs(self.disc)} exceeds the cap {DISC_CAP}")
        self.signature = (2, 0) if m > 0 else (0, 1)
        # omega = sqrt(m) (m != 1 mod 4) or (1+sqrt(m))/2; trace/norm of omega:
        if m % 4 == 1:
            self.omega_trace, self.omega_norm = 1, (1 - m) // 4
        else:
            self.omega_trace, self.omega_norm = 0, -m
        if m == -1:
            self.num_roots_of_unity = 4
        elif m == -3:
            self.num_roots_of_unity = 6
        else:
            self.num_roots_of_unity = 2
        if m > 0:
            self.fundamental_unit = _fundamental_unit(m)
            x, y = self.fundamental_unit
            self.unit_value = x + y * self._omega_real()
            self.regulator = math.log(self.unit_value)
        else:
            self.fundamental_unit = None
            self.unit_value = None
            self.regulator = 0.0
        self._prime_cache: dict[int, list[PrimeIdealK]] = {}
        self._root_cache: dict[tuple[int, int], int] = {}
        self._prime_class_cache: dict[PrimeIdealK, int] = {}
        self._zeta2_cache: dict[int, float] = {}
        self._class_data: IdealClassData | None = None
        self._cayley: list[list[int]] | None = None
        self._sqfree_cache: dict[int, tuple] = {}

    def _omega_real(self) -> float:
        return math.sqrt(self.m) if self.m % 4 != 1 else (1 + math.sqrt(self.m)) / 2

    def __repr__(self):
        return f"QuadraticField({self.m})"

    # --- class group -------------------------------------------------

    @property
    def class_data(self) -> IdealClassData:
        if self._class_data is None:
            self._init_classes()
        return self._class_data

    @property
    def class_number(self) -> int:
        return self.class_data.h

    @property
    def minkowski_bound(self) -> int:
        d = abs(self.disc)
        if self.m < 0:
            return int((2.0 / math.pi) * math.sqrt(d)) + 1
        return int(0.5 * math.sqrt(d)) + 1

    def _init_classes(self):
        mb = self.minkowski_bound
        ideals = _ideals_up_to_norm(self, mb)
        reps: list[IdealK] = []
        for a in ideals:  # already sorted by (norm, factorization key)
            if not any(self._equivalent(a, r) for r in reps):
                reps.append(a)
        self._class_data = IdealClassData(len(reps), tuple(reps))
        h = len(reps)
        table = [[0] * h for _ in range(h)]
        for i in range(h):
            for j in range(i, h):
                prod = ideal_mul(reps[i], reps[j])
                k = next(t for t in range(h) if self._equivalent(prod, reps[t]))
                table[i][j] = table[j][i] = k
        self._cayley = table

    def _equivalent(self, a: IdealK, b: IdealK) -> bool:
        return generator_if_principal(self, ideal_mul(a, ideal_conj(b))) is not None

    def class_compose(self, i: int, j: int) -> int:
        self.class_data
        return self._cayley[i][j]

    def class_inverse(self, i: int) -> int:
        h = self.class_data.h
        return next(j for j in range(h) if self.class_compose(i, j) == 0)

    def class_of_prime(self, P: PrimeIdealK) -> int:
        if self.class_data.h == 1:
            return 0
        cls = self._prime_class_cache.get(P)
        if cls is None:
            a = make_ideal([(P, 1)])
            reps = self.class_data.representatives
            cls = next(k for k in range(len(reps)) if self._equivalent(a, reps[k]))
            self._prime_class_cache[P] = cls
        return cls

    def class_of_ideal(self, a: IdealK) -> int:
        cls = 0
        h = self.class_data.h
        for P, e in a.factorization:
            cp = self.class_of_prime(P)
            # element orders divide h, so the exponent only matters mod h
            for _ in range(e % h):
                cls = self.class_compose(cls, cp)
        return cls


_FIELD_CACHE: dict[int, QuadraticField] = {}


def make_field(m: int) -> QuadraticField:
    if m not in _FIELD_CACHE:
        _FIELD_CACHE[m] = QuadraticField(m)
    return _FIELD_CACHE[m]


# --- elements: (x, y) means x + y*omega ------------------------------


def element_norm(field: QuadraticField, el) -> int:
    x, y = el
    return x * x + field.omega_trace * x * y + field.omega_norm * y * y


def element_mul(field: QuadraticField, a, b):
    x1, y1 = a
    x2, y2 = b
    # omega^2 = trace*omega - norm
    return (
        x1 * x2 - field.omega_norm * y1 * y2,
        x1 * y2 + x2 * y1 + field.omega_trace * y1 * y2,
    )


def element_conj(field: QuadraticField, a):
    x, y = a
    return (x + field.omega_trace * y, -y)


def element_pow(field: QuadraticField, a, e: int):
    out = (1, 0)
    for _ in range(e):
        out = element_mul(field, out, a)
    return out


def element_divexact(field: QuadraticField, a, b):
    """a / b in O_K, or None if b does not divide a."""
    nb = element_norm(field, b)
    if nb == 0:
        raise ZeroDivisionError
    num = element_mul(field, a, element_conj(field, b))
    if num[0] % nb or num[1] % nb:
        return None
    return (num[0] // nb, num[1] // nb)


def _fundamental_unit(m: int):
    """Fundamental unit of O_K for real m, as integral coordinates on (1, omega)."""
    # continued fraction of sqrt(m) gives the fundamental solution of x^2-my^2=+-1
    a0 = math.isqrt(m)
    mm, dd, aa = 0, 1, a0
    h0, h1 = 1, a0
    k0, k1 = 0, 1
    while True:
        if h1 * h1 - m * k1 * k1 in (1, -1):
            x1, y1 = h1, k1
            break
        mm = dd * aa - mm
        dd = (m - mm * mm) // dd
        aa = (a0 + mm) // dd
        h0, h1 = h1, aa * h1 + h0
        k0, k1 = k1, aa * k1 + k0
        if h1 > UNIT_COORD_CAP * 10:
            raise FieldTooLargeError(f"fundamental unit of Q(sqrt({m})) exceeds the search bound")
    if x1 > UNIT_COORD_CAP or y1 > UNIT_COORD_CAP:
        raise FieldTooLargeError(f"fundamental unit of Q(sqrt({m})) exceeds the search bound")
    if m % 4 != 1:
        return (x1, y1)  # coordinates on (1, sqrt(m))
    # O_K may contain a half-integral unit (u + v*sqrt(m))/2 whose cube is x1 + y1*sqrt(m)
    vmax = int(round((8 * y1 / m) ** (1 / 3))) + 2
    for v in range(1, vmax + 1):
        for u in range(1, int(round((8 * x1) ** (1 / 3))) + 2):
            lhs = u * u * u + 3 * u * v * v * m
            if lhs > 8 * x1:
                break
            if lhs == 8 * x1:
                if (
                    3 * u * u * v + v * v * v * m == 8 * y1
                    and (u * u - m * v * v) in (4, -4)
                    and (u - v) % 2 == 0
                ):
                    # (u + v*sqrt(m))/2 = (u-v)/2 + v*omega
                    return ((u - v) // 2, v)
                break
    # no half-unit: x1 + y1*sqrt(m) = (x1 - y1) + 2*y1*omega
    return (x1 - y1, 2 * y1)


def _unit_group_mod_squares(field: QuadraticField):
    """Representatives of O_K^x/(O_K^x)^2 as elements."""
    if field.m < 0:
        if field.m == -1:
            return [(1, 0), (0, 1)]
        if field.m == -3:
            return [(1, 0), (0, 1)]  # zeta_6 = omega
        return [(1, 0), (-1, 0)]
    eps = field.fundamental_unit
    return [(1, 0), (-1, 0), eps, element_mul(field, (-1, 0), eps)]


def units_mod_squares(field: QuadraticField):
    return _unit_group_mod_squares(field)


def _all_units(field: QuadraticField):
    """Torsion units (imaginary) or None (real: infinite)."""
    if field.m > 0:
        return None
    out = []
    for x in range(-2, 3):
        for y in range(-2, 3):
            if (x, y) != (0, 0) and element_norm(field, (x, y)) == 1:
                out.append((x, y))
    return out


def element_is_unit(field: QuadraticField, el) -> bool:
    return abs(element_norm(field, el)) == 1


def element_is_square(field: QuadraticField, el) -> bool:
    """Whether el is a square in K^x (el a nonzero O_K element)."""
    if el == (0, 0):
        raise ValueError("element_is_square: element must be nonzero")
    ideal = ideal_of_element(field, el)
    if any(e % 2 for _, e in ideal.factorization):
        return False
    half = make_ideal([(P, e // 2) for P, e in ideal.factorization])
    gen = generator_if_principal(field, half)
    if gen is None:
        return False
    u = element_divexact(field, el, element_mul(field, gen, gen))
    assert u is not None and element_is_unit(field, u)
    if field.m < 0:
        squares = {element_mul(field, t, t) for t in _all_units(field)}
        return u in squares
    # real: u = +- eps^k; square iff sign + and k even
    eps = field.fundamental_unit
    uval = u[0] + u[1] * field._omega_real()
    if uval < 0:
        return False
    k = round(math.log(abs(uval)) / field.regulator) if uval != 1 else 0
    cand = element_pow(field, eps, abs(k))
    if k < 0:
        # eps^-1 = +-conj(eps)
        cand = element_conj(field, cand)
        if element_norm(field, eps) == -1 and abs(k) % 2 == 1:
            cand = (-cand[0], -cand[1])
    if cand != u and (-cand[0], -cand[1]) != u:
        return False
    return k % 2 == 0 and cand == u


# --- prime ideals -----------------------------------------------------


def split_prime(field: QuadraticField, p: int) -> list[PrimeIdealK]:
    """The prime ideals of O_K above the rational prime p."""
    if p not in field._prime_cache:
        sym = kronecker(field.disc, p)
        if sym == 1:
            out = [PrimeIdealK(p, SPLIT, 0, p), PrimeIdealK(p, SPLIT, 1, p)]
        elif sym == -1:
            out = [PrimeIdealK(p, INERT, 0, p * p)]
        else:
            out = [PrimeIdealK(p, RAMIFIED, 0, p)]
        field._prime_cache[p] = out
    return field._prime_cache[p]


def _omega_roots_mod_p(field: QuadraticField, p: int) -> list[int]:
    """Roots of the minimal polynomial of omega mod p (split: two, ramified: one)."""
    m = field.m
    if p == 2:
        if m % 8 == 1:
            return [0, 1]
        if m % 2 == 0:
            return [0]
        return [1]  # m = 3 mod 4: ideal (2, 1+omega)
    if m % 4 == 1:
        s = sqrt_mod_prime(m % p, p)
        if s is None:
            return []
        inv2 = (p + 1) // 2
        r1, r2 = (1 + s) * inv2 % p, (1 - s) * inv2 % p
    else:
        s = sqrt_mod_prime(m % p, p)
        if s is None:
            return []
        r1, r2 = s, (-s) % p
    return sorted({r1, r2})


def _prime_hnf(field: QuadraticField, P: PrimeIdealK):
    if P.splitting == INERT:
        return (P.p, 0, P.p)
    roots = _omega_roots_mod_p(field, P.p)
    r = roots[P.conjugate_index] if P.splitting == SPLIT else roots[0]
    return (P.p, (-r) % P.p, 1)


def _hnf_from_vectors(vecs):
    """HNF (A, B, C) of the Z-module spanned by vecs: A*Z + (B + C*omega)*Z."""
    gy, gx = 0, 0
    xs = []
    for x, y in vecs:
        if y:
            g, s, t = _xgcd(gy, y)
            gx = s * gx + t * x
            gy = g
        else:
            xs.append(x)
    assert gy > 0, "module of rank < 2"
    for x, y in vecs:
        if y:
            xs.append(x - (y // gy) * gx)
    A = 0
    for x in xs:
        A = math.gcd(A, x)
    assert A > 0, "module of rank < 2"
    return (A, gx % A, gy)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _hnf_mul(field: QuadraticField, H1, H2):
    A1, B1, C1 = H1
    A2, B2, C2 = H2
    w = element_mul(field, (B1, C1), (B2, C2))
    vecs = [(A1 * A2, 0), (A1 * B2, A1 * C2), (A2 * B1, A2 * C1), w]
    return _hnf_from_vectors(vecs)


def ideal_hnf(field: QuadraticField, a: IdealK):
    H = (1, 0, 1)
    for P, e in a.factorization:
        PH = _prime_hnf(field, P)
        for _ in range(e):
            H = _hnf_mul(field, H, PH)
    assert H[0] * H[2] == a.norm, "HNF norm mismatch"
    return H


def hnf_contains(H, el) -> bool:
    A, B, C = H
    x, y = el
    if y % C:
        return False
    return (x - (y // C) * B) % A == 0


def ideal_of_element(field: QuadraticField, el) -> IdealK:
    """The principal ideal generated by a nonzero el, in factored form."""
    n = abs(element_norm(field, el))
    if n == 0:
        raise ValueError("zero element")
    out = []
    for p, e in factorize(n):
        primes = split_prime(field, p)
        if primes[0].splitting == INERT:
            assert e % 2 == 0
            if e // 2:
                out.append((primes[0], e // 2))
        elif primes[0].splitting == RAMIFIED:
            out.append((primes[0], e))
        else:
            H = _prime_hnf(field, primes[0])
            Hk = H
            v0 = 0
            while v0 < e and hnf_contains(Hk, el):
                v0 += 1
                if v0 < e:
                    Hk = _hnf_mul(field, Hk, H)
            if v0:
                out.append((primes[0], v0))
            if e - v0:
                out.append((primes[1], e - v0))
    return make_ideal(out)


def generator_if_principal(field: QuadraticField, a: IdealK):
    """A generator of a if principal, else None.  Bounded norm-form search."""
    n = a.norm
    if n == 1:
        return (1, 0)
    H = ideal_hnf(field, a)
    m = field.m
    if m < 0:
        # 4*N(x + y*omega) = (2x + t*y)^2 + |m'| y^2 with m' = -m*(1 or 4)
        if m % 4 == 1:
            ybound = math.isqrt(4 * n // abs(m)) + 1
            for y in range(-ybound, ybound + 1):
                uu = 4 * n + m * y * y
                if uu < 0:
                    continue
                u = math.isqrt(uu)
                if u * u != uu:
                    continue
                for uv in {u, -u}:
                    if (uv - y) % 2 == 0:
                        cand = ((uv - y) // 2, y)
                        if hnf_contains(H, cand) and abs(element_norm(field, cand)) == n:
                            return cand
        else:
            ybound = math.isqrt(n // abs(m)) + 1
            for y in range(-ybound, ybound + 1):
                xx = n + m * y * y
                if xx < 0:
                    continue
                x = math.isqrt(xx)
                if x * x != xx:
                    continue
                for cand in {(x, y), (-x, y)}:
                    if hnf_contains(H, cand) and abs(element_norm(field, cand)) == n:
                        return cand
        return None
    # real field: a generator can be normalized into a unit box
    eps = field.unit_value
    sq = math.sqrt(n)
    w1 = field._omega_real()
    ybound = int((sq * (eps + 1)) / math.sqrt(m)) + 2
    for y in range(-ybound, ybound + 1):
        for target in (n, -n):
            if m % 4 == 1:
                uu = 4 * target + m * y * y
                if uu < 0:
                    continue
                u = math.isqrt(uu)
                if u * u != uu:
                    continue
                cands = [((uv - y) // 2, y) for uv in {u, -u} if (uv - y) % 2 == 0]
            else:
                xx = target + m * y * y
                if xx < 0:
                    continue
                x = math.isqrt(xx)
                if x * x != xx:
                    continue
                cands = [(x, y), (-x, y)]
            for cand in cands:
                if hnf_contains(H, cand) and abs(element_norm(field, cand)) == n:
                    return cand
    return None


# --- enumeration ------------------------------------------------------


def primes_up_to(field: QuadraticField, X: int) -> list[PrimeIdealK]:
    """All prime ideals of norm < X, ordered by (norm, p, conjugate_index)."""
    out = []
    for p in sieve_primes(max(2, X)).primes:
        for P in split_prime(field, p):
            if P.norm < X:
                out.append(P)
    out.sort(key=lambda P: (P.norm, P.p, P.conjugate_index))
    return out


def _ideals_up_to_norm(field: QuadraticField, bound: int) -> list[IdealK]:
    """All integral ideals of norm <= bound, sorted by (norm, factorization)."""
    primes = [P for P in primes_up_to(field, bound + 1)]
    out = []

    def rec(i, factors, norm):
        out.append(make_ideal(factors))
        for j in range(i, len(primes)):
            P = primes[j]
            if norm * P.norm > bound:
                break
            e, nn = 1, norm * P.norm
            while nn <= bound:
                rec(j + 1, factors + [(P, e)], nn)
                e += 1
                nn *= P.norm
        return

    rec(0, [], 1)
    out.sort(key=lambda a: (a.norm, _fact_key(a)))
    return out


def squarefree_ideals_up_to(field: QuadraticField, X: int, class_constraint: IdealK | None = None) -> list[IdealK]:
    """Squarefree ideals of norm < X; optionally only those a with a*b^2 principal."""
    ideals = [a for a, _ in _squarefree_with_classes(field, X)]
    if class_constraint is None:
        return list(ideals)
    b_cls = field.class_of_ideal(class_constraint)
    target = field.class_inverse(field.class_compose(b_cls, b_cls))
    return [a for a, cls in _squarefree_with_classes(field, X) if cls == target]


def _squarefree_with_classes(field: QuadraticField, X: int):
    """Cached list of (squarefree ideal of norm < X, class index), sorted."""
    cached = field._sqfree_cache.get(X)
    if cached is not None:
        return cached
    primes = primes_up_to(field, X)
    pcls = [field.class_of_prime(P) for P in primes]
    out = []

    def rec(i, factors, norm, cls):
        if norm < X:
            out.append((make_ideal(factors), cls))
        for j in range(i, len(primes)):
            nn = norm * primes[j].norm
            if nn >= X:
                break
            rec(j + 1, factors + [(primes[j], 1)], nn, field.class_compose(cls, pcls[j]))

    rec(0, [], 1, 0)
    out.sort(key=lambda t: (t[0].norm, _fact_key(t[0])))
    result = tuple(out)
    field._sqfree_cache[X] = result
    return result


def count_sf(field: QuadraticField, X: int, c: IdealK, q: IdealK, d: IdealK) -> int:
    """Exact count of squarefree ideals a, norm < X, class of c, gcd(a, q) = d."""
    _validate_qd(q, d)
    target = field.class_of_ideal(c)
    qprimes = {P for P, _ in q.factorization}
    dprimes = {P for P, _ in d.factorization}
    count = 0
    for a, cls in _squarefree_with_classes(field, X):
        if cls != target:
            continue
        common = {P for P, _ in a.factorization if P in qprimes}
        if common == dprimes:
            count += 1
    return count


def _validate_qd(q: IdealK, d: IdealK):
    if not ideal_is_squarefree(d):
        raise ValueError("d must be squarefree")
    if not ideal_divides(d, q):
        raise ValueError("d must divide q")


def phi_qd(field: QuadraticField, q: IdealK, d: IdealK) -> Fraction:
    """prod_{P | d} 1/(NP+1) * prod_{P | q, P !| d} NP/(NP+1)."""
    _validate_qd(q, d)
    dset = {P for P, _ in d.factorization}
    out = Fraction(1)
    for P, _ in q.factorization:
        if P in dset:
            out *= Fraction(1, P.norm + 1)
        else:
            out *= Fraction(P.norm, P.norm + 1)
    return out


# --- analytic constants ----------------------------------------------


def zeta_residue(field: QuadraticField) -> float:
    """res_{s=1} zeta_K(s) by the class number formula."""
    r1, r2 = field.signature
    reg = field.regulator if field.m > 0 else 1.0
    return (
        2**r1
        * (2 * math.pi) ** r2
        * field.class_number
        * reg
        / (field.num_roots_of_unity * math.sqrt(abs(field.disc)))
    )


def zeta2_tail_bound(B: int) -> float:
    """Upper bound for the log-tail of the zeta_K(2) Euler product cut at norm B."""
    # split/ramified primes p >= B contribute <= 2.02/p^2 each; inert p >= sqrt(B)
    return 2.1 / (B * math.log(B)) + 3.0 / (B ** 1.49)


def zeta_at_2(field: QuadraticField, B: int | None = None) -> float:
    """zeta_K(2) via the Euler product over prime ideals of norm < B."""
    if B is None:
        B = ZETA2_DEFAULT_CUTOFF
    if B in field._zeta2_cache:
        return field._zeta2_cache[B]
    absd = abs(field.disc)
    chi_table = np.array([kronecker(field.disc, r) if r else 0 for r in range(absd)], dtype=np.int8)
    flags = np.ones(B, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(B - 1) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    ps = np.nonzero(flags)[0].astype(np.float64)
    chi = chi_table[np.nonzero(flags)[0] % absd]
    inv2 = 1.0 / (ps * ps)
    log_split = -2.0 * np.log1p(-inv2[chi == 1])
    log_ram = -np.log1p(-inv2[chi == 0])
    small = ps[ps * ps < B]
    chi_small = chi[: len(small)]
    inert_small = small[chi_small == -1]
    log_inert = -np.log1p(-1.0 / inert_small**4)
    val = math.exp(float(log_split.sum() + log_ram.sum() + log_inert.sum()))
    field._zeta2_cache[B] = val
    return val


def mainterm_sf(field: QuadraticField, X: int, c: IdealK, q: IdealK, d: IdealK) -> float:
    """Main term (1/h) (res zeta_K / zeta_K(2)) phi(q, d) X of the squarefree count."""
    _validate_qd(q, d)
    return (
        (1.0 / field.class_number)
        * (zeta_residue(field) / zeta_at_2(field))
        * float(phi_qd(field, q, d))
        * X
    )


def lambda_exponent(deg: int) -> float:
    """Error exponent in the squarefree-ideal count: 1/2 for deg <= 2."""
    return 0.5 if deg <= 2 else (deg - 1) / (deg + 1)


def density_constant(field: QuadraticField) -> float:
    """c(K): the character count |C(K, X)| grows like c(K) * X."""
    reps = field.class_data.representatives
    s = sum(1.0 / (b.norm**2) for b in reps)
    u = len(units_mod_squares(field))
    return u * (1.0 / field.class_number) * (zeta_residue(field) / zeta_at_2(field)) * s


def ideal_count_up_to(field: QuadraticField, X: int) -> int:
    """Number of integral ideals of norm < X (multiplicative sieve)."""
    arr = [0] * X
    arr[1] = 1
    for p in sieve_primes(X).primes:
        sym = kronecker(field.disc, p)
        if sym == 1:
            local = lambda j: j + 1
        elif sym == 0:
            local = lambda j: 1
        else:
            local = lambda j: 1 if j % 2 == 0 else 0
        # norms coprime to p live at indices not divisible by p, so no double count
        pj, j = p, 1
        updates = []
        while pj < X:
            cj = local(j)
            if cj:
                for k in range(1, (X - 1) // pj + 1):
                    if arr[k]:
                        updates.append((k * pj, cj * arr[k]))
            pj *= p
            j += 1
        for idx, v in updates:
            arr[idx] += v
    return sum(arr)
