#!/usr/bin/env python3
"""Independent reference calculations for the frozen test values.

Everything here is computed from first principles with exact arithmetic
(fractions plus a tiny exact multi-radical class). The printed report is
the source of the literal expected values pasted into the C++ unit and
acceptance tests; those tests cite the section names printed below.

Run:  python3 tools/crosscheck.py

This script shares no code with the C++ library on purpose: it is the
second, independent route to every number.
"""

from fractions import Fraction as Fr
from math import gcd, isqrt, sqrt, log, floor, ceil, inf
import heapq
import sys

# ----------------------------------------------------------------------
# exact sums of rational multiples of square roots of square-free ints
# ----------------------------------------------------------------------


class Rad:
    """Finite sum  sum_r c_r * sqrt(r)  over square-free r >= 1, c_r in Q.

    Distinct square roots of square-free integers are linearly independent
    over Q, so the representation is canonical: the value is zero iff the
    term map is empty. Products stay square-free without any factoring:
    sqrt(r)*sqrt(s) = g*sqrt((r/g)*(s/g)) with g = gcd(r, s).
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for r, c in terms.items():
                c = Fr(c)
                if c != 0:
                    self.terms[int(r)] = c

    @staticmethod
    def rat(c):
        return Rad({1: Fr(c)})

    @staticmethod
    def root(r, c=1):
        return Rad({int(r): Fr(c)})

    def is_rational(self):
        return all(r == 1 for r in self.terms)

    def __add__(self, o):
        o = _coerce(o)
        t = dict(self.terms)
        for r, c in o.terms.items():
            t[r] = t.get(r, Fr(0)) + c
        return Rad(t)

    def __radd__(self, o):
        return self.__add__(o)

    def __neg__(self):
        return Rad({r: -c for r, c in self.terms.items()})

    def __sub__(self, o):
        return self.__add__(-_coerce(o))

    def __rsub__(self, o):
        return (-self).__add__(_coerce(o))

    def __mul__(self, o):
        o = _coerce(o)
        t = {}
        for r1, c1 in self.terms.items():
            for r2, c2 in o.terms.items():
                g = gcd(r1, r2)
                r = (r1 // g) * (r2 // g)
                t[r] = t.get(r, Fr(0)) + c1 * c2 * g
        return Rad(t)

    def __rmul__(self, o):
        return self.__mul__(o)

    def inv(self):
        if not self.terms:
            raise ZeroDivisionError("inverse of zero")
        num = Rad.rat(1)
        cur = self
        while not cur.is_rational():
            p = _some_prime(cur)
            conj = Rad({r: (-c if r % p == 0 else c) for r, c in cur.terms.items()})
            num = num * conj
            cur = cur * conj
        return num * Rad.rat(Fr(1) / cur.terms[1])

    def __truediv__(self, o):
        return self * _coerce(o).inv()

    def __rtruediv__(self, o):
        return _coerce(o) * self.inv()

    def sign(self):
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            ((_, c),) = self.terms.items()
            return 1 if c > 0 else -1
        bits = 16
        while True:
            scale = 1 << bits
            lo = Fr(0)
            hi = Fr(0)
            for r, c in self.terms.items():
                s = isqrt(r * scale * scale)
                lo_r = Fr(s, scale)
                hi_r = Fr(s + 1, scale)
                if c >= 0:
                    lo += c * lo_r
                    hi += c * hi_r
                else:
                    lo += c * hi_r
                    hi += c * lo_r
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
            if bits > 1 << 20:
                raise RuntimeError("sign refinement runaway (value must be 0?)")

    def cmp(self, o):
        return (self - o).sign()

    def __eq__(self, o):
        return (self - _coerce(o)).terms == {}

    def abs(self):
        return self if self.sign() >= 0 else -self

    def floor(self):
        if not self.terms:
            return 0
        import math

        n = math.floor(self.to_float()) - 1
        while (self - Rad.rat(n + 1)).sign() >= 0:
            n += 1
        while (self - Rad.rat(n)).sign() < 0:
            n -= 1
        return n

    def to_float(self):
        if not self.terms:
            return 0.0
        # exact enclosure first: naive float summation cancels catastrophically
        # when coefficients are huge and the value is tiny
        bits = 64 + max(
            abs(c.numerator).bit_length() + c.denominator.bit_length()
            for c in self.terms.values()
        )
        scale = 1 << bits
        lo = Fr(0)
        hi = Fr(0)
        for r, c in self.terms.items():
            s = isqrt(r * scale * scale)
            lo_r = Fr(s, scale)
            hi_r = Fr(s + 1, scale)
            if c >= 0:
                lo += c * lo_r
                hi += c * hi_r
            else:
                lo += c * hi_r
                hi += c * lo_r
        return float((lo + hi) / 2)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for r in sorted(self.terms):
            c = self.terms[r]
            parts.append(f"{c}" if r == 1 else f"{c}*sqrt({r})")
        return " + ".join(parts)


def _coerce(o):
    if isinstance(o, Rad):
        return o
    return Rad.rat(o)


def _some_prime(x):
    for r in x.terms:
        if r == 1:
            continue
        d = 2
        while d * d <= r:
            if r % d == 0:
                return d
            d += 1
        return r
    raise AssertionError("rational value has no radical prime")


# ----------------------------------------------------------------------
# continued fractions
# ----------------------------------------------------------------------


def cf_digits(x, n):
    """Partial quotients a_0..a_n of an exact irrational Rad."""
    out = []
    for _ in range(n + 1):
        a = x.floor()
        out.append(a)
        frac = x - Rad.rat(a)
        if not frac.terms:
            raise ValueError("rational input to cf_digits")
        x = frac.inv()
    return out


def cf_digits_fraction(x):
    """Full digit list of a rational x (canonical form, last digit >= 2 unless length 1)."""
    x = Fr(x)
    out = []
    while True:
        a = x.numerator // x.denominator
        out.append(a)
        x = x - a
        if x == 0:
            break
        x = 1 / x
    if len(out) > 1 and out[-1] == 1:
        out[-2] += 1
        out.pop()
    return out


def convergents(digits):
    """p_k, q_k lists from digits a_0.. (standard recurrence)."""
    ps, qs = [], []
    p2, p1 = 0, 1
    q2, q1 = 1, 0
    for a in digits:
        p = a * p1 + p2
        q = a * q1 + q2
        ps.append(p)
        qs.append(q)
        p2, p1 = p1, p
        q2, q1 = q1, q
    return ps, qs


def eps_list(xi, ps, qs):
    return [Rad.rat(q) * xi - Rad.rat(p) for p, q in zip(ps, qs)]


def convergent_matrix(ps, qs, k):
    if k % 2 == 0:
        return ((qs[k], -ps[k]), (-qs[k - 1], ps[k - 1]))
    return ((qs[k], -ps[k]), (qs[k - 1], -ps[k - 1]))


# ----------------------------------------------------------------------
# 2x2 integer matrices
# ----------------------------------------------------------------------

J = ((0, -1), (1, 0))
U = ((1, 1), (0, 1))


def mat_mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def mat_det(a):
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def mat_norm(a):
    return max(abs(a[0][0]), abs(a[0][1]), abs(a[1][0]), abs(a[1][1]))


def mat_upow(ell):
    return ((1, ell), (0, 1))


def mat_inv(a):
    assert mat_det(a) == 1
    return ((a[1][1], -a[0][1]), (-a[1][0], a[0][0]))


def mat_apply(a, v):
    return (
        Rad.rat(a[0][0]) * v[0] + Rad.rat(a[0][1]) * v[1],
        Rad.rat(a[1][0]) * v[0] + Rad.rat(a[1][1]) * v[1],
    )


def ext_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    return old_r, old_s, old_t


# ----------------------------------------------------------------------
# the documented enumeration of matrices with sup-norm <= T
# ----------------------------------------------------------------------


def _trange(base, step, bound):
    """Integers t with |base + t*step| <= bound, step != 0."""
    if step < 0:
        base, step = -base, -step
    lo = -((bound + base) // step)
    hi = (bound - base) // step
    return lo, hi


def unimodular_norm_bounded(T):
    """Every det-1 integer matrix ((v1,u1),(v2,u2)) with sup-norm <= T,
    emitted in lexicographic (v2, u2, v1, u1) order."""
    out = []
    for v2 in range(-T, T + 1):
        for u2 in range(-T, T + 1):
            if gcd(v2, u2) != 1:
                continue
            if v2 == 0:
                v1 = 1 if u2 > 0 else -1
                for u1 in range(-T, T + 1):
                    out.append(((v1, u1), (v2, u2)))
                continue
            g, a, b = ext_gcd(u2, v2)
            if g < 0:
                a, b = -a, -b
            v1s, u1s = a, -b  # v1s*u2 - u1s*v2 = 1
            assert v1s * u2 - u1s * v2 == 1
            lo1, hi1 = _trange(v1s, v2, T)
            if u2 == 0:
                lo, hi = lo1, hi1
            else:
                lo2, hi2 = _trange(u1s, u2, T)
                lo, hi = max(lo1, lo2), min(hi1, hi2)
            ts = range(lo, hi + 1)
            if v2 < 0:
                ts = reversed(ts)
            for t in ts:
                out.append(((v1s + t * v2, u1s + t * u2), (v2, u2)))
    return out


def direct_scan(T):
    out = []
    for v1 in range(-T, T + 1):
        for u1 in range(-T, T + 1):
            for v2 in range(-T, T + 1):
                for u2 in range(-T, T + 1):
                    if v1 * u2 - u1 * v2 == 1:
                        out.append(((v1, u1), (v2, u2)))
    return out


# ----------------------------------------------------------------------
# completion of a primitive column (a, b) to a det-1 matrix [[a,t'],[b,s']]
# ----------------------------------------------------------------------


def complete_primitive(a, b):
    """Canonical N = ((a, tp), (b, sp)) with a*sp - tp*b = 1.

    Choice: smallest |tp|, then smallest |sp|, then sp >= 0, then tp >= 0.
    """
    assert gcd(a, b) == 1
    g, x0, y0 = ext_gcd(a, b)  # a*x0 + b*y0 = 1
    sp0, tp0 = x0, -y0  # a*sp0 - tp0*b = 1; family (tp0 + m*a, sp0 + m*b)
    cands = set()
    ms = set()
    if a != 0:
        center = -tp0 / a
        ms.update(int(center) + d for d in range(-3, 4))
    if b != 0:
        center = -sp0 / b
        ms.update(int(center) + d for d in range(-3, 4))
    if not ms:
        ms = {0}
    for m in ms:
        tp, sp = tp0 + m * a, sp0 + m * b
        cands.add((tp, sp))
    key = lambda ts: (abs(ts[0]), abs(ts[1]), 0 if ts[1] >= 0 else 1, 0 if ts[0] >= 0 else 1)
    tp, sp = min(cands, key=key)
    N = ((a, tp), (b, sp))
    assert mat_det(N) == 1
    return N


# ----------------------------------------------------------------------
# the shift rho, the two integer choices of ell, and the built matrix
# ----------------------------------------------------------------------


def rho_value(N, k, x2, y2, eps):
    t, tp = N[0]
    s, sp = N[1]
    em1 = eps[k - 1].abs()
    return (_coerce(y2) / (_coerce(x2) * Rad.rat(s) * em1)) - eps[k] / em1 - Rad.rat(Fr(sp, s))


def ell_truncate(rho):
    f = rho.floor()
    if (rho - Rad.rat(f)).sign() == 0:
        return f
    return f if rho.sign() > 0 else f + 1


def ell_ceiling(rho):
    f = rho.floor()
    if (rho - Rad.rat(f)).sign() == 0:
        return f
    return f + 1


def build_gamma(N, ell, ps, qs, k):
    return mat_mul(N, mat_mul(mat_upow(ell), convergent_matrix(ps, qs, k)))


def residual(gamma, x, y):
    gx = mat_apply(gamma, x)
    return (gx[0] - y[0], gx[1] - y[1])


def sup_abs(pair):
    a0, a1 = pair[0].abs(), pair[1].abs()
    return a0 if (a0 - a1).sign() >= 0 else a1


# ----------------------------------------------------------------------
# shared exact inputs
# ----------------------------------------------------------------------

GOLDEN = (Rad.root(5) - 1) / 2          # (sqrt5 - 1)/2
NEG_GOLDEN = -GOLDEN
PHI = (Rad.root(5) + 1) / 2
SQRT2 = Rad.root(2)
SQRT2M1 = SQRT2 - 1

FMT = "{}"


def fl(x):
    return f"{x.to_float():.12g}" if isinstance(x, Rad) else f"{float(x):.12g}"


def hr(title):
    print()
    print("=" * 72)
    print(f"== {title}")
    print("=" * 72)


# ----------------------------------------------------------------------


def report_cf():
    hr("section cf: digits / convergents / eps")
    for name, xi, n in (
        ("golden=(sqrt5-1)/2", GOLDEN, 12),
        ("sqrt2", SQRT2, 12),
        ("sqrt2-1", SQRT2M1, 12),
        ("neg_golden=(1-sqrt5)/2", NEG_GOLDEN, 14),
    ):
        d = cf_digits(xi, n)
        ps, qs = convergents(d)
        eps = eps_list(xi, ps, qs)
        print(f"[{name}] digits a0..a{n}: {d}")
        print(f"  p: {ps}")
        print(f"  q: {qs}")
        print(f"  eps exact: {[repr(e) for e in eps[:8]]}")
        print(f"  eps signs: {[e.sign() for e in eps[:10]]}")
        ok21 = all(
            (eps[k].abs() - Rad.rat(Fr(1, 2 * qs[k + 1]))).sign() >= 0
            and (Rad.rat(Fr(1, qs[k + 1])) - eps[k].abs()).sign() >= 0
            for k in range(n)
        )
        okdet = all(
            ps[k] * qs[k - 1] - ps[k - 1] * qs[k] == (-1) ** (k - 1) for k in range(1, n + 1)
        )
        print(f"  (1/(2q_k+1) <= |eps_k| <= 1/q_k+1) for k<{n}: {ok21};"
              f" det identity: {okdet}")
    # long golden tables used by the deep drivers
    d = cf_digits(GOLDEN, 46)
    ps, qs = convergents(d)
    print(f"[golden long] q_0..q_46: {qs}")
    print(f"[golden long] p_0..p_46: {ps}")
    print(f"[rational 22/7] digits: {cf_digits_fraction(Fr(22, 7))}")
    print(f"[rational 1/2] digits: {cf_digits_fraction(Fr(1, 2))}")


def report_pivots():
    hr("section pivots: convergent matrices")
    d = cf_digits(GOLDEN, 16)
    ps, qs = convergents(d)
    for k in (2, 3, 4, 8):
        M = convergent_matrix(ps, qs, k)
        x = (GOLDEN, Rad.rat(1))
        mx = mat_apply(M, x)
        eps = eps_list(GOLDEN, ps, qs)
        ok = (mx[0] - eps[k]).sign() == 0 and (mx[1] - eps[k - 1].abs()).sign() == 0
        print(f"[golden] M_{k} = {M}, det {mat_det(M)}, norm {mat_norm(M)},"
              f" M_k x = (eps_k, |eps_k-1|): {ok}")
    dn = cf_digits(NEG_GOLDEN, 14)
    pn, qn = convergents(dn)
    print(f"[neg_golden] M_13 = {convergent_matrix(pn, qn, 13)}")
    print("J =", J, " U =", U, " J^2 =", mat_mul(J, J),
          " (JU)^3 =", mat_mul(mat_mul(J, U), mat_mul(mat_mul(J, U), mat_mul(J, U))))


def report_origin():
    hr("section origin: |M_k x| * |M_k| <= |x| for k = 2..11")
    for name, xi in (("golden", GOLDEN), ("sqrt2-1", SQRT2M1)):
        d = cf_digits(xi, 14)
        ps, qs = convergents(d)
        eps = eps_list(xi, ps, qs)
        x = (xi, Rad.rat(1))
        rows = []
        for k in range(2, 12):
            M = convergent_matrix(ps, qs, k)
            mx = mat_apply(M, x)
            r = sup_abs(mx)
            lhs = r * Rad.rat(mat_norm(M))
            ok = (Rad.rat(1) - lhs).sign() >= 0
            rows.append((k, mat_norm(M), fl(r), ok))
        print(f"[{name}] rows (k, |M_k|, |M_k x|, product<=1): {rows}")


def report_completion():
    hr("section completion: canonical det-1 completion of (a, b)")
    for a, b in ((1, 1), (1, 2), (2, 5), (0, 1), (1, 0), (-1, 2), (3, 5), (5, 8)):
        print(f"  ({a},{b}) -> {complete_primitive(a, b)}")


def report_rho_examples():
    hr("section rho: worked shift examples")
    d = cf_digits(GOLDEN, 16)
    ps, qs = convergents(d)
    eps = eps_list(GOLDEN, ps, qs)
    x = (GOLDEN, Rad.rat(1))

    # target (1,1), completion of (1,1), k = 4
    N = complete_primitive(1, 1)
    rho = rho_value(N, 4, 1, 1, eps)
    ell = ell_truncate(rho)
    g = build_gamma(N, ell, ps, qs, 4)
    lam = residual(g, x, (Rad.rat(1), Rad.rat(1)))
    lam2_id = -1 + (Rad.rat(N[1][0]) * eps[4] + Rad.rat(N[1][1]) * eps[3].abs())
    print(f"[y=(1,1) k=4] N={N} rho={rho!r} ~ {fl(rho)} ell={ell}")
    print(f"  gamma={g} norm={mat_norm(g)} det={mat_det(g)}")
    print(f"  Lambda=({lam[0]!r}, {lam[1]!r}) ~ ({fl(lam[0])}, {fl(lam[1])})")
    print(f"  Lambda2 at ell=0 equals -y2 + x2*(s*eps_k + s'*|eps_k-1|):"
          f" {(residual(build_gamma(N, 0, ps, qs, 4), x, (Rad.rat(1), Rad.rat(1)))[1] - lam2_id).sign() == 0}")
    print(f"  |Lambda2| <= x2*s/q_k = 1/5: {(Fr(1,5) - lam[1].abs()).sign() >= 0}")

    # target (1,2), completion of (1,2), k = 8
    N = complete_primitive(1, 2)
    rho = rho_value(N, 8, 1, 2, eps)
    ell = ell_truncate(rho)
    g = build_gamma(N, ell, ps, qs, 8)
    lam = residual(g, x, (Rad.rat(1), Rad.rat(2)))
    print(f"[y=(1,2) k=8] N={N} rho={rho!r} ~ {fl(rho)} ell={ell}")
    print(f"  gamma={g} norm={mat_norm(g)} det={mat_det(g)}")
    print(f"  Lambda=({lam[0]!r}, {lam[1]!r}) ~ ({fl(lam[0])}, {fl(lam[1])})")
    print(f"  residual={fl(sup_abs(lam))} <= 2*b*x2/q_8 = 4/34:"
          f" {(Fr(4,34) - sup_abs(lam)).sign() >= 0}")


def norm_sandwich_holds(N, ell, k, qs, g):
    s, sp = N[1]
    lower = abs(ell * qs[k - 1] + (-1) ** (k - 1) * qs[k]) * abs(s) - abs(sp) * qs[k - 1]
    upper = abs(ell) * mat_norm(N) * qs[k - 1] + 2 * mat_norm(N) * qs[k]
    n = mat_norm(g)
    return lower <= n <= upper, lower, upper


def report_rational_driver():
    hr("section rational-driver: golden x, y=(1,2), k=6..15")
    d = cf_digits(GOLDEN, 18)
    ps, qs = convergents(d)
    eps = eps_list(GOLDEN, ps, qs)
    x = (GOLDEN, Rad.rat(1))
    y = (Rad.rat(1), Rad.rat(2))
    N = complete_primitive(1, 2)
    c2 = 96  # (2*sqrt3*max(a,b)*|x|^1/2*|y|^1/2)^2 = 12*4*1*2
    for k in range(6, 16):
        rho = rho_value(N, k, 1, 2, eps)
        ell = ell_truncate(rho)
        g = build_gamma(N, ell, ps, qs, k)
        lam = residual(g, x, y)
        res = sup_abs(lam)
        n = mat_norm(g)
        ok_resid = (Rad.rat(Fr(4, qs[k])) - res).sign() >= 0
        ok_13 = (Rad.rat(c2) - res * res * Rad.rat(n)).sign() >= 0
        lo_s = qs[k - 1] * qs[k]      # (|y2|/2|x2|) q_{k-1} q_k with y2=2, x2=1
        hi_s = 6 * qs[k - 1] * qs[k]  # 3(|y2|/|x2|) q_{k-1} q_k
        ok_l2, l2lo, l2hi = norm_sandwich_holds(N, ell, k, qs, g)
        print(f"  k={k} ell={ell} gamma={g} norm={n}"
              f" resid~{fl(res)} resid<=4/q_k:{ok_resid}"
              f" sq*norm<=96:{ok_13} ({fl(res*res*Rad.rat(n))})"
              f" sandwich[{lo_s},{hi_s}]:{lo_s <= n <= hi_s}"
              f" productbounds[{l2lo},{l2hi}]:{ok_l2}")


def report_irrational_driver():
    hr("section irrational-driver: golden x, y slope sqrt2-1, j0=3..8")
    d = cf_digits(GOLDEN, 46)
    ps, qs = convergents(d)
    eps = eps_list(GOLDEN, ps, qs)
    x = (GOLDEN, Rad.rat(1))
    y = (SQRT2M1, Rad.rat(1))
    dy = cf_digits(SQRT2M1, 12)
    ts, ss = convergents(dy)
    c3 = Rad.root(5, 1715)  # (7 sqrt5)^3 * |x| * |y|^2 with |x| = |y| = 1

    def Nj(j):
        sgn = (-1) ** (j - 1)
        return ((ts[j], sgn * ts[j - 1]), (ss[j], sgn * ss[j - 1]))

    for j0 in range(3, 9):
        s3 = ss[j0] ** 3
        k = next(k for k in range(1, 46) if qs[k] >= s3)  # first k with s_{j0}^3 <= Y q_k, Y=1
        assert qs[k - 1] < s3 <= qs[k]
        j = max(jj for jj in range(1, len(ss)) if ss[jj] ** 3 <= qs[k])
        N = Nj(j)
        rho = rho_value(N, k, 1, 1, eps)  # x2 = y2 = 1
        ell = ell_truncate(rho)
        g = build_gamma(N, ell, ps, qs, k)
        lam = residual(g, x, y)
        res = sup_abs(lam)
        n = mat_norm(g)
        # documented bounds
        b44 = Rad.rat(Fr(2, ss[j] * ss[j + 1])) + Rad.rat(Fr(5 * ss[j], qs[k]))
        ok44 = (b44 - res).sign() >= 0
        d1 = (Rad.rat(ss[j]) * SQRT2M1 - Rad.rat(ts[j])).abs()
        d2 = (Rad.rat(ss[j - 1]) * SQRT2M1 - Rad.rat(ts[j - 1])).abs()
        ok45 = (Rad.rat(Fr(1, ss[j + 1])) - d1).sign() >= 0 and (Rad.rat(Fr(1, ss[j])) - d2).sign() >= 0
        lo46 = Fr(qs[k], ss[j]) - 3
        hi46 = 2 * Fr(qs[k], ss[j]) + 2
        ok46 = lo46 <= abs(ell) <= hi46
        ok14 = (c3 - res * res * res * Rad.rat(n)).sign() >= 0
        lo43 = abs(Fr(qs[k - 1] * qs[k]) - ss[j] * qs[k]) - 4 * ss[j] * qs[k - 1]
        hi43 = 2 * qs[k - 1] * qs[k] + 4 * ss[j] * qs[k]
        ok43 = lo43 <= n <= hi43
        print(f"  j0={j0}: k={k} j={j} s_j={ss[j]} ell={ell} norm={n}"
              f" resid~{fl(res)}")
        print(f"      gamma={g}")
        print(f"      resid<= (4.4-style) {fl(b44)}: {ok44}; conv-dist bounds: {ok45};"
              f" ell in [{fl(lo46)},{fl(hi46)}]: {ok46};"
              f" cube*norm<=1715sqrt5 ({fl(res*res*res*Rad.rat(n))} vs {fl(c3)}): {ok14};"
              f" norm in [{lo43},{hi43}]: {ok43}")


# interval arithmetic for the non-quadratic stream case -----------------


class Iv:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = Fr(lo)
        self.hi = Fr(hi if hi is not None else lo)
        assert self.lo <= self.hi

    def __add__(self, o):
        o = o if isinstance(o, Iv) else Iv(o)
        return Iv(self.lo + o.lo, self.hi + o.hi)

    def __radd__(self, o):
        return self.__add__(o)

    def __neg__(self):
        return Iv(-self.hi, -self.lo)

    def __sub__(self, o):
        o = o if isinstance(o, Iv) else Iv(o)
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = o if isinstance(o, Iv) else Iv(o)
        cands = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return Iv(min(cands), max(cands))

    def __rmul__(self, o):
        return self.__mul__(o)

    def inv(self):
        assert self.lo > 0 or self.hi < 0
        return Iv(1 / self.hi, 1 / self.lo)

    def __truediv__(self, o):
        o = o if isinstance(o, Iv) else Iv(o)
        return self * o.inv()

    def abs(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        raise AssertionError("ambiguous abs")

    def sign(self):
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        raise AssertionError("ambiguous sign")

    def floor(self):
        fl_lo = self.lo.numerator // self.lo.denominator
        fl_hi = self.hi.numerator // self.hi.denominator
        assert fl_lo == fl_hi, "ambiguous floor"
        return fl_lo

    def mid_float(self):
        return float((self.lo + self.hi) / 2)


def sqrt2_iv(bits=200):
    s = isqrt(2 << (2 * bits))
    return Iv(Fr(s, 1 << bits), Fr(s + 1, 1 << bits))


def report_large_omega():
    hr("section large-omega: digit rule a_{k+1} = a_k^3, omega = 5/2")
    digits = [0, 1, 2, 8, 512, 512 ** 3, (512 ** 3) ** 3]
    ps, qs = convergents(digits)
    print(f"  liouville-ish digits: {digits}")
    print(f"  q: {qs}")
    num, den = 5, 2
    qualifying = [k for k in range(3, 7) if qs[k - 1] ** num <= qs[k] ** den]
    print(f"  k in 3..6 with q_k-1^(5/2) <= q_k: {qualifying}")
    dg = cf_digits(GOLDEN, 10)
    _, qg = convergents(dg)
    print(f"  golden k in 3..8 qualifying: "
          f"{[k for k in range(3, 9) if qg[k - 1] ** num <= qg[k] ** den]} (expect empty)")

    # one full construction instance at k = 3 via interval arithmetic
    k = 3
    c5, c6 = Fr(ps[5], qs[5]), Fr(ps[6], qs[6])  # consecutive convergents enclose
    xi = Iv(min(c5, c6), max(c5, c6))
    y_slope = sqrt2_iv() - 1
    dy = cf_digits(SQRT2M1, 10)
    ts, ss = convergents(dy)
    j = max(jj for jj in range(1, len(ss)) if ss[jj] ** 2 <= qs[k])
    assert ss[j] ** 2 <= qs[k] < ss[j + 1] ** 2
    sgn = (-1) ** (j - 1)
    N = ((ts[j], sgn * ts[j - 1]), (ss[j], sgn * ss[j - 1]))
    epsk = qs[k] * xi - ps[k]
    epsk1 = (qs[k - 1] * xi - ps[k - 1]).abs()
    rho = Iv(1) / (Iv(N[1][0]) * epsk1) - epsk / epsk1 - Fr(N[1][1], N[1][0])
    fr = rho.floor()
    ell = fr if rho.sign() > 0 else fr + 1  # truncate toward zero, rho not integer
    g = build_gamma(N, ell, ps, qs, k)
    l1 = g[0][0] * xi + g[0][1] - y_slope
    l2 = g[1][0] * xi + g[1][1] - 1
    res_sq_qk_hi = max((l1 * l1).hi, (l2 * l2).hi) * qs[k]
    print(f"  [instance k=3] j={j} N={N} ell={ell} gamma={g} norm={mat_norm(g)}")
    print(f"  residual^2 * q_k <= {float(res_sq_qk_hi):.6g} (certified < 49: {res_sq_qk_hi < 49})")


def report_uniform_tau():
    hr("section uniform-tau: j with s_j <= q_k^tau < s_j+1")
    dg = cf_digits(GOLDEN, 12)
    _, qg = convergents(dg)
    dy = cf_digits(SQRT2M1, 10)
    _, ss = convergents(dy)
    k, num, den = 10, 1, 3  # tau = 1/3
    j = max(jj for jj in range(0, len(ss)) if ss[jj] ** den <= qg[k] ** num)
    print(f"  golden k=10 q_k={qg[k]} tau=1/3 slope sqrt2-1 -> j={j}"
          f" (s_j={ss[j]}, cubes {ss[j]**3} <= {qg[k]} < {ss[j+1]**3})")
    print(f"  omega(y)=1 -> tau = 1/3; omega(y)->inf -> tau -> 1/2 (formula w/(2w+1))")


def report_signed():
    hr("section signed: x=(neg_golden,1), y=(1,phi), odd k")
    d = cf_digits(NEG_GOLDEN, 24)
    ps, qs = convergents(d)
    eps = eps_list(NEG_GOLDEN, ps, qs)
    x = (NEG_GOLDEN, Rad.rat(1))
    y = (Rad.rat(1), PHI)
    slope = (Rad.rat(1) / PHI)
    dy = cf_digits(slope, 16)
    ts, ss = convergents(dy)
    print(f"  slope = 1/phi = golden; slope digits {dy[:8]}, s: {ss[:12]}, t: {ts[:12]}")
    good = []
    for k in range(1, 24, 2):
        j = None
        for jj in range(1, len(ss) - 1):
            if ss[jj - 1] ** 3 < qs[k] <= ss[jj] ** 3:
                j = jj
                break
        if j is None:
            continue
        if j % 2 == 0:
            N = ((ts[j - 1], ts[j]), (ss[j - 1], ss[j]))
        else:
            N = ((ts[j], ts[j - 1]), (ss[j], ss[j - 1]))
        assert mat_det(N) == 1
        s, sp = N[1]
        t, tp = N[0]
        rho = rho_value(N, k, 1, PHI, eps)
        ell = ell_ceiling(rho)
        g = build_gamma(N, ell, ps, qs, k)
        lam = residual(g, x, y)
        v1, v2 = g[0][0], g[1][0]
        pos = v1 > 0 and v2 > 0 and lam[0].sign() > 0 and lam[1].sign() > 0
        n = mat_norm(g)
        # size bound max(L1,L2) <= norm^(-3/10)  <=>  max(L)^10 * norm^3 <= 1
        mx = lam[0] if (lam[0] - lam[1]).sign() >= 0 else lam[1]
        p10 = Rad.rat(1)
        for _ in range(10):
            p10 = p10 * mx
        size_ok = (Rad.rat(1) - p10 * Rad.rat(n ** 3)).sign() >= 0
        delta = Rad.rat(s) * slope - Rad.rat(t)
        deltap = Rad.rat(sp) * slope - Rad.rat(tp)
        ok91 = (delta.sign() < 0
                and ((-delta) - Rad.rat(Fr(1, 2 * ss[j + 1]))).sign() > 0
                and (Rad.rat(Fr(1, ss[j])) - (-delta)).sign() >= 0
                and (Rad.rat(Fr(1, ss[j])) - deltap.abs()).sign() >= 0)
        sek = Rad.rat(s) * eps[k - 1].abs()
        ok97 = (lam[1].sign() > 0
                and (sek - lam[1]).sign() >= 0
                and (Rad.rat(Fr(ss[j], qs[k])) - sek).sign() >= 0)
        # window with epsilon = 1/10: s_j-1 >= q_k^(7/30), s_j <= q_k^(13/30), s_j+1 <= q_k^(16/30)
        w95 = (ss[j - 1] ** 30 >= qs[k] ** 7, ss[j] ** 30 <= qs[k] ** 13,
               ss[j + 1] ** 30 <= qs[k] ** 16)
        print(f"  k={k} q_k={qs[k]} j={j} N={N} rho~{fl(rho)} ell={ell} norm={n}")
        print(f"    gamma={g} L1~{fl(lam[0])} L2~{fl(lam[1])}"
              f" allpos={pos} size_mu=3/10:{size_ok} sgnbounds:{ok91} l2window:{ok97} win95:{w95}")
        if pos and size_ok:
            good.append(k)
    print(f"  odd k with all-positive outputs and size bound: {good}")


def report_enumerator():
    hr("section enumerator: counts / order / closure / nesting")
    for T in (1, 2, 3, 5, 8):
        fam = unimodular_norm_bounded(T)
        scan = direct_scan(T)
        sfam = set(fam)
        print(f"  T={T}: family count {len(fam)}, direct 3^4-style scan {len(scan)},"
              f" equal sets: {sfam == set(scan)},"
              f" negation closed: {all((( -m[0][0], -m[0][1]), (-m[1][0], -m[1][1])) in sfam for m in fam)}")
    small = unimodular_norm_bounded(1)
    print(f"  T=1 enumeration order: {small}")
    t2 = set(unimodular_norm_bounded(2))
    print(f"  nesting T=1 within T=2: {set(small) <= t2}")
    srt = sorted(small, key=lambda m: (m[1][0], m[1][1], m[0][0], m[0][1]))
    print(f"  emitted order is (v2,u2,v1,u1)-lex: {srt == small}")


def _min_distance(T, xi, y1, y2, label, bound):
    """Exact minimum of max(|v1 xi + u1 - y1|, |v2 xi + u2 - y2|) over norm <= T."""
    xf, y1f, y2f = xi.to_float(), float(y1), float(y2)
    mats = unimodular_norm_bounded(T)
    best = None
    dists = []
    for (v1, u1), (v2, u2) in mats:
        d = max(abs(v1 * xf + u1 - y1f), abs(v2 * xf + u2 - y2f))
        dists.append(d)
        if best is None or d < best:
            best = d
    margin = 1e-7
    cand = [m for m, d in zip(mats, dists) if d <= best + margin]
    exact_best = None
    arg = None
    y1r, y2r = Rad.rat(y1), Rad.rat(y2)
    for m in cand:
        lam = residual(m, (xi, Rad.rat(1)), (y1r, y2r))
        r = sup_abs(lam)
        if exact_best is None or (exact_best - r).sign() > 0:
            exact_best = r
            arg = m
    ok = (exact_best - Rad.rat(bound)).sign() >= 0
    print(f"  [{label}] T={T} matrices={len(mats)} min={exact_best!r} ~ {fl(exact_best)}"
          f" argmin={arg} min>= {bound}: {ok}")
    return exact_best, arg


def report_floor_bruteforce():
    hr("section floors: exhaustive minima")
    dg = cf_digits(GOLDEN, 10)
    _, qg = convergents(dg)
    for k in (4, 5, 6):
        T = qg[k + 1] // 2
        _min_distance(T, GOLDEN, 0, 0, f"origin k={k}", Fr(1, 2 * qg[k]))
    _min_distance(136, GOLDEN, 1, 2, "target(1,2) k=6", Fr(1, 104))


def report_staircase():
    hr("section staircase: records to T=64 (exact)")
    for label, y1, y2 in (("y=(1,2)", 1, 2), ("y=0", 0, 0)):
        mats = unimodular_norm_bounded(64)
        # canonical record definition: per norm take the minimal residual
        # (ties resolved by (v2,u2,v1,u1) order), then keep strict improvements
        mats.sort(key=lambda m: (mat_norm(m), m[1][0], m[1][1], m[0][0], m[0][1]))
        per_norm = {}
        for m in mats:
            lam = residual(m, (GOLDEN, Rad.rat(1)), (Rad.rat(y1), Rad.rat(y2)))
            r = sup_abs(lam)
            n = mat_norm(m)
            if n not in per_norm or (per_norm[n][1] - r).sign() > 0:
                per_norm[n] = (m, r)
        best = None
        recs = []
        for n in sorted(per_norm):
            m, r = per_norm[n]
            if best is None or (best - r).sign() > 0:
                best = r
                recs.append((n, m, r))
        print(f"  [{label}] records (norm, gamma, residual):")
        for n, m, r in recs:
            print(f"    {n:3d} {m} {r!r} ~ {fl(r)}")
        grid = [1, 2, 4, 8, 16, 32, 64]
        dvals = []
        for t in grid:
            cur = None
            for n, m, r in recs:
                if n <= t:
                    cur = r
            dvals.append((t, fl(cur) if cur is not None else None))
        print(f"    D on grid: {dvals}")
    # origin staircase vs the floor bound at T = floor(q_k+1/2)
    dg = cf_digits(GOLDEN, 10)
    _, qg = convergents(dg)
    print(f"  [y=0] D(floor(q_k+1/2)) >= 1/(2 q_k) for k=1..7 with argmins:")
    mats = unimodular_norm_bounded(17)
    mats.sort(key=lambda m: (mat_norm(m), m[1][0], m[1][1], m[0][0], m[0][1]))
    for k in range(1, 8):
        T = qg[k + 1] // 2
        best, arg = None, None
        for m in mats:
            if mat_norm(m) > T:
                continue
            r = sup_abs(residual(m, (GOLDEN, Rad.rat(1)), (Rad.rat(0), Rad.rat(0))))
            if best is None or (best - r).sign() > 0:
                best, arg = r, m
        ok = (best - Rad.rat(Fr(1, 2 * qg[k]))).sign() >= 0
        print(f"    k={k} T={T} D={fl(best)} argmin={arg} >=1/{2*qg[k]}: {ok}")


def report_factor_roundtrip():
    hr("section factorization: G = N^-1 gamma M_k^-1 with certified bounds")
    dg = cf_digits(GOLDEN, 10)
    pg, qg = convergents(dg)
    x = (GOLDEN, Rad.rat(1))
    # best matrix with norm <= 2T, T = 136 (regime q5 q6 = 104 <= T <= q6 q7 = 273)
    T = 136
    mats = unimodular_norm_bounded(2 * T)
    xf = GOLDEN.to_float()
    best, bestd = None, None
    for (v1, u1), (v2, u2) in mats:
        d = max(abs(v1 * xf + u1 - 1), abs(v2 * xf + u2 - 2))
        if bestd is None or d < bestd:
            bestd, best = d, ((v1, u1), (v2, u2))
    g = best
    lam = residual(g, x, (Rad.rat(1), Rad.rat(2)))
    res = sup_abs(lam)
    # hypotheses: mu = 1/4; |gamma| <= 2T; residual <= T^-mu; s_j >= T^(mu/2)
    mu_num, mu_den = 1, 4
    hyp_resid = (res ** 4 if False else res * res * res * res)
    ok_resid = (Rad.rat(T) * hyp_resid - Rad.rat(1)).sign() <= 0  # res^4 * T <= 1
    N = complete_primitive(1, 2)
    s_j = 2
    ok_sj = s_j ** 8 >= T  # s_j >= T^(1/8)
    M = convergent_matrix(pg, qg, 6)
    G = mat_mul(mat_inv(N), mat_mul(g, mat_inv(M)))
    ok_round = mat_mul(N, mat_mul(G, M)) == g
    c = 20  # 10 * max(|y|, |y|^-1) with y=(1,2)
    B1 = c * s_j * T ** 0.75 / qg[6]
    B2 = c * s_j * qg[6] * T ** -0.25
    col1 = max(abs(G[0][0]), abs(G[1][0]))
    col2 = max(abs(G[0][1]), abs(G[1][1]))
    print(f"  gamma={g} norm={mat_norm(g)} resid~{fl(res)}"
          f" resid^4*T<=1: {ok_resid} s_j^8>=T: {ok_sj}")
    print(f"  G={G} round-trip: {ok_round}")
    print(f"  col1={col1} <= B1~{B1:.3f}: {col1 <= B1}; col2={col2} <= B2~{B2:.3f}: {col2 <= B2}")


def report_omega_windows():
    hr("section omega-window: log q_{k+1} / log q_k ratios")
    dg = cf_digits(GOLDEN, 22)
    _, qg = convergents(dg)
    ratios = [log(qg[k + 1]) / log(qg[k]) for k in range(5, 21)]
    print(f"  golden k=5..20: max={max(ratios):.6f} min={min(ratios):.6f} (expect max <= 1.3)")
    digits = [0, 1]
    while len(digits) < 8:
        digits.append(digits[-1] * 10)
    ps, qs = convergents(digits)
    print(f"  rule a_k+1 = 10 a_k digits: {digits} q: {qs}")
    rr = [(k, log(qs[k + 1]) / log(qs[k])) for k in range(2, 7)]
    print(f"  ratios k=2..6: {[(k, f'{r:.3f}') for k, r in rr]}"
          f" first k with ratio > 2: {next(k for k, r in rr if r > 2)}")


def pruned_float_records(T, xf, y1f, y2f, warm=64):
    """Record sequence of min_{|g|<=n} |g x - y| via a pruned family scan.

    Families (second row fixed, first row shifted by t copies of it) are
    processed by m = max(|v2|, |u2|) ascending. Once the running best
    residual among candidates of norm <= m drops below |y2|/2, only the
    t that nearly cancels the first coordinate can produce records, and a
    family with |v2 x + u2 - y2| >= best cannot improve any later record.
    The warmup range is enumerated in full so the early (large-residual)
    records are exact too. Returns [(norm, residual)] with residuals
    strictly decreasing.
    """
    cands = []  # (norm, resid)
    for (v1, u1), (v2, u2) in unimodular_norm_bounded(min(warm, T)):
        r = max(abs(v1 * xf + u1 - y1f), abs(v2 * xf + u2 - y2f))
        cands.append((max(abs(v1), abs(u1), abs(v2), abs(u2)), r))
    heap = list(cands)
    heapq.heapify(heap)
    best = inf
    for m in range(warm + 1, T + 1):
        while heap and heap[0][0] <= m:
            _, r = heapq.heappop(heap)
            best = min(best, r)
        rows = set()
        for v2 in (m, -m):
            c = y2f - v2 * xf
            for u2 in range(ceil(c - best), floor(c + best) + 1):
                if abs(u2) <= m and gcd(v2, u2) == 1:
                    rows.add((v2, u2))
        w = best / abs(xf)
        for u2 in (m, -m):
            c = (y2f - u2) / xf
            for v2 in range(ceil(c - w), floor(c + w) + 1):
                if abs(v2) < m and gcd(v2, u2) == 1:
                    rows.add((v2, u2))
        for v2, u2 in rows:
            l2 = v2 * xf + u2 - y2f
            if abs(l2) >= best:
                continue
            g, a, b = ext_gcd(u2, v2)
            if g < 0:
                a, b = -a, -b
            v1s, u1s = a, -b  # v1s*u2 - u1s*v2 = 1
            q = v2 * xf + u2
            ts = -(v1s * xf + u1s - y1f) / q
            for t in {floor(ts), ceil(ts)}:
                v1 = v1s + t * v2
                u1 = u1s + t * u2
                n = max(abs(v1), abs(u1), abs(v2), abs(u2))
                if n > T:
                    continue
                r = max(abs(v1 * xf + u1 - y1f), abs(l2))
                heapq.heappush(heap, (n, r))
                cands.append((n, r))
    cands.sort()
    records = []
    best = inf
    for n, r in cands:
        if r < best:
            best = r
            records.append((n, r))
    return records


def report_estimator_preview():
    hr("section estimator-preview: float record scan, golden, y=(1,2)")
    xf = GOLDEN.to_float()

    # validate the pruned scan against the plain full enumeration at T=600
    full = []
    best = inf
    mats = unimodular_norm_bounded(600)
    mats.sort(key=lambda m: (mat_norm(m),
                             max(abs(m[0][0] * xf + m[0][1] - 1),
                                 abs(m[1][0] * xf + m[1][1] - 2))))
    for (v1, u1), (v2, u2) in mats:
        r = max(abs(v1 * xf + u1 - 1), abs(v2 * xf + u2 - 2))
        if r < best:
            best = r
            full.append((max(abs(v1), abs(u1), abs(v2), abs(u2)), r))
    pruned600 = pruned_float_records(600, xf, 1.0, 2.0)
    print(f"  pruned scan matches full enumeration at T=600: {pruned600 == full}")

    T = 10000
    records = pruned_float_records(T, xf, 1.0, 2.0)
    print(f"  records to T={T}: count={len(records)}")
    for n, r in records:
        show = f"    n={n:>6} r={r:.7f}"
        if n > 1 and 0 < r < 1:
            show += f"  -log r/log n={-log(r) / log(n):.4f}  c=r*sqrt(n)={r * sqrt(n):.4f}"
        print(show)
    for label, cut in [("sqrt(T)", T ** 0.5), ("T/64", T / 64), ("T^(3/4)", T ** 0.75)]:
        vals = [-log(r) / log(n) for n, r in records if n >= cut]
        if vals:
            print(f"  mu max over records with norm >= {label}={cut:.0f}:"
                  f" {max(vals):.4f} ({len(vals)} records)")
    grid = []
    t = T
    while t >= 8:
        grid.append(t)
        t //= 2
    hats = []
    for t in grid:
        dt = min(r for n, r in records if n <= t)
        hats.append((t, -log(dt) / log(t)))
    print("  mu-hat grid: " + " ".join(f"{t}:{h:.4f}" for t, h in hats))
    top_half = [h for t, h in hats if t >= T ** 0.5]
    top_34 = [h for t, h in hats if t >= T ** 0.75]
    print(f"  mu-hat min over T' >= sqrt(T): {min(top_half):.4f};"
          f" over T' >= T^(3/4): {min(top_34):.4f}")


def main():
    report_cf()
    report_pivots()
    report_origin()
    report_completion()
    report_rho_examples()
    report_rational_driver()
    report_irrational_driver()
    report_large_omega()
    report_uniform_tau()
    report_signed()
    report_enumerator()
    report_floor_bruteforce()
    report_staircase()
    report_factor_roundtrip()
    report_omega_windows()
    report_estimator_preview()
    print("\nall sections done")


if __name__ == "__main__":
    main()
