"""Finite field arithmetic for the MMS switch-graph construction.

Elements of GF(p^m) are encoded as integers in [0, q): the base-p digits of
the integer are the coefficients of a polynomial over GF(p), reduced modulo
an irreducible polynomial of degree m found by exhaustive search.
"""

from __future__ import annotations

from .errors import InvalidParameter


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q = p**m, or raise InvalidParameter."""
    if q < 2:
        raise InvalidParameter(f"q={q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            tmp = q
            while tmp % p == 0:
                tmp //= p
                m += 1
            if tmp != 1:
                raise InvalidParameter(f"q={q} is not a prime power")
            return p, m
    raise InvalidParameter(f"q={q} is not a prime power")


def _poly_digits(x: int, p: int, m: int) -> list[int]:
    out = [0] * m
    for i in range(m):
        out[i] = x % p
        x //= p
    return out


def _poly_index(coeffs: list[int], p: int) -> int:
    out = 0
    for c in reversed(coeffs):
        out = out * p + c
    return out


class GF:
    """GF(q) with precomputed add/mul tables (q small, <= a few hundred)."""

    def __init__(self, q: int):
        p, m = factor_prime_power(q)
        self.q = q
        self.p = p
        self.m = m
        self.irreducible = self._find_irreducible() if m > 1 else None
        self.add = [[0] * q for _ in range(q)]
        self.mul = [[0] * q for _ in range(q)]
        self._build_tables()
        self.primitive = self._find_primitive()

    # -- construction helpers -------------------------------------------------

    def _poly_mul_mod(self, a: list[int], b: list[int], mod: list[int]) -> list[int]:
        p = self.p
        deg = len(mod) - 1
        prod = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        # reduce: x^deg = -(mod[0..deg-1]) since mod is monic
        for i in range(len(prod) - 1, deg - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(deg):
                    prod[i - deg + j] = (prod[i - deg + j] - c * mod[j]) % p
        return prod[:deg] + [0] * max(0, deg - len(prod))

    def _is_irreducible(self, mod: list[int]) -> bool:
        # brute force: no monic divisor of degree 1..m//2
        p = self.p
        m = len(mod) - 1
        for d in range(1, m // 2 + 1):
            for idx in range(p**d):
                div = _poly_digits(idx, p, d) + [1]
                if self._poly_divides(div, mod):
                    return False
        return True

    def _poly_divides(self, div: list[int], mod: list[int]) -> bool:
        p = self.p
        rem = list(mod)
        dd = len(div) - 1
        while len(rem) - 1 >= dd:
            lead = rem[-1]
            if lead:
                shift = len(rem) - 1 - dd
                for i, c in enumerate(div):
                    rem[shift + i] = (rem[shift + i] - lead * c) % p
            rem.pop()
        return all(c == 0 for c in rem)

    def _find_irreducible(self) -> list[int]:
        # monic degree-m polynomial: coefficients [c0..c_{m-1}, 1]
        p, m = self.p, self.m
        for idx in range(p**m):
            cand = _poly_digits(idx, p, m) + [1]
            if self._is_irreducible(cand):
                return cand
        raise InvalidParameter(f"no irreducible polynomial for GF({self.q})")

    def _build_tables(self) -> None:
        q, p, m = self.q, self.p, self.m
        if m == 1:
            for i in range(q):
                for j in range(q):
                    self.add[i][j] = (i + j) % p
                    self.mul[i][j] = (i * j) % p
            return
        mod = self.irreducible
        polys = [_poly_digits(i, p, m) for i in range(q)]
        for i in range(q):
            for j in range(i, q):
                s = [(polys[i][k] + polys[j][k]) % p for k in range(m)]
                v = _poly_index(s, p)
                self.add[i][j] = v
                self.add[j][i] = v
                prod = self._poly_mul_mod(polys[i], polys[j], mod)
                v = _poly_index(prod, p)
                self.mul[i][j] = v
                self.mul[j][i] = v

    def _find_primitive(self) -> int:
        # exhaustive search for an element of multiplicative order q-1
        for cand in range(1, self.q):
            order = 1
            x = cand
            while x != 1:
                x = self.mul[x][cand]
                order += 1
                if order > self.q:  # zero divisor guard; cannot happen in a field
                    break
            if x == 1 and order == self.q - 1:
                return cand
        raise InvalidParameter(f"no primitive element in GF({self.q})")

    # -- public ops ------------------------------------------------------------

    def neg(self, a: int) -> int:
        for b in range(self.q):
            if self.add[a][b] == 0:
                return b
        raise AssertionError("field without additive inverse")

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg(b)]

    def power(self, base: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = self.mul[out][base]
        return out

    def powers_of_primitive(self) -> list[int]:
        """[xi^0, xi^1, ..., xi^(q-2)] — all nonzero elements once."""
        out = []
        x = 1
        for _ in range(self.q - 1):
            out.append(x)
            x = self.mul[x][self.primitive]
        return out
