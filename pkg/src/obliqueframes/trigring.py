"""Sparse multivariate trigonometric (Laurent) polynomials.

A :class:`TrigPoly` of dimension ``n`` stores a finite map ``k -> c_k`` from
integer exponent vectors to complex coefficients and represents

    f(w) = sum_k c_k * exp(-1j * k . w).

Two coefficient modes exist.  In *exact* mode every coefficient is a Gaussian
rational (``sympy``'s ``QQ_I``); in *float* mode coefficients are Python
complex numbers.  Exact mode is closed under ring operations and under shifts
by multiples of pi/2; anything that introduces an irrational scalar drops to
float mode.

Sign convention: the stored exponent ``k`` always multiplies ``-1j * w``, so
``exp(+1j * w)`` is stored with exponent ``-1``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Mapping

import numpy as np
from sympy.polys.domains import QQ, QQ_I

# pruning / zero-test constants
FLOAT_PRUNE_REL = 1e-14
MOMENT_ZERO_REL = 1e-8
QUARTER_TURN_TOL = 1e-9
DUAL_CHECK_TOL = 1e-12
DUAL_CHECK_POINTS = 32

_ZERO = QQ_I(0, 0)
_ONE = QQ_I(1, 0)
_PHASES = (QQ_I(1, 0), QQ_I(0, -1), QQ_I(-1, 0), QQ_I(0, 1))  # (-i)^r


def qq(x) -> QQ_I:
    """Convert an int / Fraction / QQ / QQ_I / exact pair to a Gaussian rational."""
    if isinstance(x, QQ_I.dtype):
        return x
    if isinstance(x, tuple):
        return QQ_I(qq(x[0]).x, qq(x[1]).x)
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, Integral):
        return QQ_I(int(x), 0)
    if isinstance(x, Fraction):
        return QQ_I(QQ(x.numerator, x.denominator), 0)
    if isinstance(x, Rational):
        return QQ_I(QQ(int(x.numerator), int(x.denominator)), 0)
    try:
        return QQ_I(QQ.convert(x), 0)
    except Exception as exc:  # pragma: no cover - defensive
        raise TypeError(f"cannot convert {x!r} to an exact coefficient") from exc


def is_exact_scalar(x) -> bool:
    if isinstance(x, (float, complex, np.floating, np.complexfloating)):
        return False
    return True


def qconj(c: QQ_I) -> QQ_I:
    return QQ_I(c.x, -c.y)


def to_complex(c) -> complex:
    if isinstance(c, QQ_I.dtype):
        return complex(float(c.x), float(c.y))
    return complex(c)


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class TrigPoly:
    """Immutable sparse trigonometric polynomial in ``dim`` variables."""

    __slots__ = ("dim", "terms", "exact", "meta", "_arr")

    def __init__(self, dim: int, terms: Mapping | None = None, exact: bool | None = None,
                 meta: dict | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        terms = dict(terms or {})
        for k in terms:
            if len(k) != dim:
                raise ValueError(f"exponent {k} does not have length {dim}")
        if exact is None:
            exact = all(is_exact_scalar(c) for c in terms.values())
        clean: dict[tuple[int, ...], object] = {}
        if exact:
            for k, c in terms.items():
                c = qq(c)
                if c:
                    clean[tuple(int(e) for e in k)] = c
        else:
            vals = {tuple(int(e) for e in k): to_complex(c) for k, c in terms.items()}
            if vals:
                cmax = max(abs(c) for c in vals.values())
                cut = FLOAT_PRUNE_REL * cmax
                clean = {k: c for k, c in vals.items() if abs(c) > cut}
        self.dim = dim
        self.terms = clean
        self.exact = bool(exact)
        self.meta = dict(meta or {})
        self._arr = None

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, dim: int, c=1) -> "TrigPoly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, k: Iterable[int], c=1) -> "TrigPoly":
        k = tuple(int(e) for e in k)
        return cls(len(k), {k: c})

    @classmethod
    def zero(cls, dim: int, exact: bool = True) -> "TrigPoly":
        return cls(dim, {}, exact=exact)

    @classmethod
    def from_cosines(cls, coeffs: Iterable, normalize: bool = False) -> "TrigPoly":
        """Univariate ``c0 + c1 cos w + c2 cos 2w + ...``; optionally scaled to value 1 at 0."""
        coeffs = list(coeffs)
        exact = all(is_exact_scalar(c) for c in coeffs)
        conv = qq if exact else complex
        terms: dict[tuple[int], object] = {}
        for j, c in enumerate(coeffs):
            c = conv(c)
            if j == 0:
                terms[(0,)] = c
            else:
                half = c * (QQ_I(QQ(1, 2), 0) if exact else 0.5)
                terms[(j,)] = half
                terms[(-j,)] = half
        p = cls(1, terms, exact=exact)
        if normalize:
            total = sum(coeffs)
            if total == 0:
                raise ValueError("cosine coefficients sum to zero; cannot normalize")
            p = p * (Fraction(1) / Fraction(total) if exact else 1.0 / total)
        return p

    # -- basic queries ------------------------------------------------
    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, k) -> object:
        return self.terms.get(tuple(k), _ZERO if self.exact else 0j)

    def constant_term(self):
        return self.coeff((0,) * self.dim)

    def exponents(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)

    def max_abs_exponent(self) -> int:
        if not self.terms:
            return 0
        return max(max(abs(e) for e in k) for k in self.terms)

    def coefficient_l1(self) -> float:
        return float(sum(abs(to_complex(c)) for c in self.terms.values()))

    def is_real_valued(self, tol: float = 1e-12) -> bool:
        """True when ``c_{-k} = conj(c_k)`` for every stored ``k``."""
        for k, c in self.terms.items():
            mk = tuple(-e for e in k)
            other = self.terms.get(mk)
            if self.exact:
                if other is None or other != qconj(c):
                    return False
            else:
                ref = max(1.0, self.coefficient_l1())
                o = 0j if other is None else other
                if abs(o - c.conjugate()) > tol * ref:
                    return False
        return True

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix ``(T, dim)`` and complex coefficient vector ``(T,)``."""
        if self._arr is None:
            ks = sorted(self.terms)
            K = np.array(ks, dtype=np.int64).reshape(len(ks), self.dim)
            c = np.array([to_complex(self.terms[k]) for k in ks], dtype=complex)
            self._arr = (K, c)
        return self._arr

    # -- conversions --------------------------------------------------
    def to_float(self) -> "TrigPoly":
        if not self.exact:
            return self
        return TrigPoly(self.dim, {k: to_complex(c) for k, c in self.terms.items()},
                        exact=False, meta=self.meta)

    def _coerce(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        return TrigPoly.constant(self.dim, other)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, RationalTrigPoly):
            return NotImplemented
        other = self._coerce(other)
        exact = self.exact and other.exact
        a = self if exact else self.to_float()
        b = other if exact else other.to_float()
        out = dict(a.terms)
        for k, c in b.terms.items():
            out[k] = out[k] + c if k in out else c
        return TrigPoly(self.dim, out, exact=exact)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(self.dim, {k: -c for k, c in self.terms.items()}, exact=self.exact)

    def __sub__(self, other):
        if isinstance(other, RationalTrigPoly):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalTrigPoly):
            return NotImplemented
        if not isinstance(other, TrigPoly):
            if is_exact_scalar(other) and self.exact:
                s = qq(other)
                return TrigPoly(self.dim, {k: c * s for k, c in self.terms.items()}, exact=True)
            s = complex(other)
            return TrigPoly(self.dim, {k: to_complex(c) * s for k, c in self.terms.items()},
                            exact=False)
        other = self._coerce(other)
        if self.exact and other.exact:
            return TrigPoly(self.dim, _exact_product(self.terms, other.terms), exact=True)
        return TrigPoly(self.dim, _float_product(self.to_float(), other.to_float()), exact=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (TrigPoly, RationalTrigPoly)):
            return RationalTrigPoly(self, TrigPoly.constant(self.dim, 1)) / other
        if is_exact_scalar(other) and self.exact:
            return self * (_ONE / qq(other))
        return self * (1.0 / complex(other))

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not trigonometric polynomials")
        out = TrigPoly.constant(self.dim, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def conj(self) -> "TrigPoly":
        """Pointwise complex conjugate: ``conj(f(w))``."""
        if self.exact:
            t = {tuple(-e for e in k): qconj(c) for k, c in self.terms.items()}
        else:
            t = {tuple(-e for e in k): c.conjugate() for k, c in self.terms.items()}
        return TrigPoly(self.dim, t, exact=self.exact)

    def abs2(self) -> "TrigPoly":
        return self * self.conj()

    def equals(self, other, tol: float = 0.0) -> bool:
        """Exact comparison in exact mode, else max coefficient difference <= tol * scale."""
        other = self._coerce(other)
        if self.exact and other.exact and tol == 0.0:
            return self.terms == other.terms
        diff = self.to_float() - other.to_float()
        if diff.is_zero():
            return True
        scale = max(1.0, self.coefficient_l1(), other.coefficient_l1())
        return max(abs(c) for c in diff.terms.values()) <= tol * scale

    def __eq__(self, other):
        if isinstance(other, TrigPoly):
            return self.dim == other.dim and self.exact == other.exact and self.terms == other.terms
        return NotImplemented

    __hash__ = None

    # -- evaluation ---------------------------------------------------
    def __call__(self, w) -> np.ndarray | complex:
        w = np.asarray(w, dtype=float)
        single = w.ndim == 1
        P = w.reshape(-1, self.dim)
        K, c = self.arrays()
        out = np.zeros(P.shape[0], dtype=complex)
        if len(c):
            step = max(1, 2_000_000 // max(1, len(c)))
            for s in range(0, P.shape[0], step):
                ph = P[s:s + step] @ K.T.astype(float)
                out[s:s + step] = np.exp(-1j * ph) @ c
        return complex(out[0]) if single else out.reshape(w.shape[:-1])

    def eval_grid(self, N) -> np.ndarray:
        """Values at ``w_j = 2*pi*j/N`` for all ``j`` in ``Z_N^dim`` via one FFT."""
        Ns = (N,) * self.dim if np.isscalar(N) else tuple(N)
        A = np.zeros(Ns, dtype=complex)
        K, c = self.arrays()
        if len(c):
            idx = tuple((K[:, d] % Ns[d]) for d in range(self.dim))
            np.add.at(A, idx, c)
        return np.fft.fftn(A)

    def __repr__(self) -> str:
        mode = "exact" if self.exact else "float"
        shown = ", ".join(f"{k}: {self.terms[k]}" for k in sorted(self.terms)[:6])
        more = " ..." if len(self.terms) > 6 else ""
        return f"TrigPoly(dim={self.dim}, {mode}, {{{shown}{more}}})"

    # -- serialization ------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for k in sorted(self.terms):
            c = self.terms[k]
            if self.exact:
                re, im = _fraction(c.x), _fraction(c.y)
                terms.append({"k": list(k),
                              "re": {"p": re.numerator, "q": re.denominator},
                              "im": {"p": im.numerator, "q": im.denominator}})
            else:
                terms.append({"k": list(k), "re": c.real, "im": c.imag})
        return {"dim": self.dim, "mode": "exact" if self.exact else "float", "terms": terms}

    @classmethod
    def from_json(cls, obj: Mapping) -> "TrigPoly":
        dim = int(obj["dim"])
        exact = obj["mode"] == "exact"
        terms = {}
        for t in obj["terms"]:
            k = tuple(int(e) for e in t["k"])
            if exact:
                terms[k] = QQ_I(QQ(int(t["re"]["p"]), int(t["re"]["q"])),
                                QQ(int(t["im"]["p"]), int(t["im"]["q"])))
            else:
                terms[k] = complex(float(t["re"]), float(t["im"]))
        return cls(dim, terms, exact=exact)


def _loop_product(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    get = out.get
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            prev = get(k)
            out[k] = ca * cb if prev is None else prev + ca * cb
    return out


def _exact_product(a: Mapping, b: Mapping) -> dict:
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    if all(not c.y for c in a.values()) and all(not c.y for c in b.values()):
        # real coefficients: multiply the rational parts directly
        bx = [(kb, cb.x) for kb, cb in b.items()]
        for ka, ca in a.items():
            xa = ca.x
            for kb, xb in bx:
                k = tuple(x + y for x, y in zip(ka, kb))
                prev = get(k)
                out[k] = xa * xb if prev is None else prev + xa * xb
        return {k: QQ_I(v, 0) for k, v in out.items()}
    return _loop_product(a, b)


def _float_product(a: TrigPoly, b: TrigPoly) -> dict:
    if a.is_zero() or b.is_zero():
        return {}
    Ka, ca = a.arrays()
    Kb, cb = b.arrays()
    if len(ca) * len(cb) <= 256:
        return _loop_product(a.terms, b.terms)
    K = (Ka[:, None, :] + Kb[None, :, :]).reshape(-1, a.dim)
    c = np.multiply.outer(ca, cb).ravel()
    lo = K.min(axis=0)
    span = K.max(axis=0) - lo + 1
    code = np.zeros(len(K), dtype=np.int64)
    for d in range(a.dim):
        code = code * span[d] + (K[:, d] - lo[d])
    uniq, inv = np.unique(code, return_inverse=True)
    re = np.bincount(inv, weights=c.real, minlength=len(uniq))
    im = np.bincount(inv, weights=c.imag, minlength=len(uniq))
    keys = np.zeros((len(uniq), a.dim), dtype=np.int64)
    rem = uniq.copy()
    for d in reversed(range(a.dim)):
        keys[:, d] = rem % span[d] + lo[d]
        rem //= span[d]
    return {tuple(int(e) for e in keys[i]): complex(re[i], im[i]) for i in range(len(uniq))}


class RationalTrigPoly:
    """Quotient ``num / den`` of trigonometric polynomials (``den`` not identically zero)."""

    __slots__ = ("num", "den", "meta")

    def __init__(self, num: TrigPoly, den: TrigPoly | None = None, meta: dict | None = None):
        if den is None:
            den = TrigPoly.constant(num.dim, 1)
        if num.dim != den.dim:
            raise ValueError("numerator and denominator dimensions differ")
        if den.is_zero():
            raise ZeroDivisionError("denominator is identically zero")
        if num.exact and den.exact:
            lead = den.terms[min(den.terms)]
            if lead != _ONE:
                inv = _ONE / lead
                num, den = num * inv, den * inv
        elif num.exact != den.exact:
            num, den = num.to_float(), den.to_float()
        self.num = num
        self.den = den
        self.meta = dict(meta or {})

    @classmethod
    def lift(cls, f) -> "RationalTrigPoly":
        if isinstance(f, RationalTrigPoly):
            return f
        return cls(f)

    @property
    def dim(self) -> int:
        return self.num.dim

    @property
    def exact(self) -> bool:
        return self.num.exact and self.den.exact

    def is_polynomial(self) -> bool:
        return len(self.den.terms) == 1 and (0,) * self.dim in self.den.terms

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _other(self, other) -> "RationalTrigPoly":
        if isinstance(other, RationalTrigPoly):
            return other
        if isinstance(other, TrigPoly):
            return RationalTrigPoly(other)
        return RationalTrigPoly(TrigPoly.constant(self.dim, other))

    def __add__(self, other):
        o = self._other(other)
        if self.den.exact == o.den.exact and self.den.terms == o.den.terms:
            return RationalTrigPoly(self.num + o.num, self.den)
        return RationalTrigPoly(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalTrigPoly(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, (TrigPoly, RationalTrigPoly)):
            return RationalTrigPoly(self.num * other, self.den)
        o = self._other(other)
        return RationalTrigPoly(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (TrigPoly, RationalTrigPoly)):
            return RationalTrigPoly(self.num / other, self.den)
        o = self._other(other)
        return RationalTrigPoly(self.num * o.den, self.den * o.num)

    def conj(self) -> "RationalTrigPoly":
        return RationalTrigPoly(self.num.conj(), self.den.conj())

    def to_float(self) -> "RationalTrigPoly":
        return RationalTrigPoly(self.num.to_float(), self.den.to_float(), meta=self.meta)

    def __call__(self, w):
        return self.num(w) / self.den(w)

    def eval_grid(self, N) -> np.ndarray:
        return self.num.eval_grid(N) / self.den.eval_grid(N)

    def equals(self, other, tol: float = 0.0) -> bool:
        o = self._other(other)
        return (self.num * o.den).equals(o.num * self.den, tol=tol)

    def __repr__(self) -> str:
        return f"RationalTrigPoly(num={self.num!r}, den={self.den!r})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "RationalTrigPoly":
        if "num" not in obj:
            return cls(TrigPoly.from_json(obj))
        return cls(TrigPoly.from_json(obj["num"]), TrigPoly.from_json(obj["den"]))


# ---------------------------------------------------------------------------
# integer matrix helpers

def int_matrix(M) -> tuple[tuple[int, ...], ...]:
    A = np.asarray(M)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("dilation must be a square integer matrix")
    if not np.all(np.equal(np.mod(A, 1), 0)):
        raise ValueError("dilation must have integer entries")
    return tuple(tuple(int(x) for x in row) for row in A)


def int_det(M) -> int:
    M = [list(r) for r in M]
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return sum((-1) ** j * M[0][j] * int_det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(n))


def int_adjugate(M) -> tuple[tuple[int, ...], ...]:
    """Integer adjugate, so that ``adj(M) @ M = det(M) * I``."""
    M = [list(r) for r in M]
    n = len(M)
    if n == 1:
        return ((1,),)
    cof = [[(-1) ** (i + j) * int_det([r[:j] + r[j + 1:] for k, r in enumerate(M) if k != i])
            for j in range(n)] for i in range(n)]
    return tuple(tuple(cof[j][i] for j in range(n)) for i in range(n))


def _matvec(M, k) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, k)) for row in M)


def in_lattice(k, M) -> bool:
    """Whether the integer vector ``k`` lies in ``M Z^n``."""
    det = int_det(M)
    return all(v % det == 0 for v in _matvec(int_adjugate(M), k))


# ---------------------------------------------------------------------------
# operations

def _as_dilation(scheme_or_M):
    return scheme_or_M.M if hasattr(scheme_or_M, "M") else int_matrix(scheme_or_M)


def tp_shift(f, gamma):
    """Translate ``f`` by ``gamma``: returns ``w -> f(w + gamma)``.

    Coefficients pick up ``exp(-1j k . gamma)``; exactness survives only when
    every such phase is a power of ``-1j``.
    """
    if isinstance(f, RationalTrigPoly):
        return RationalTrigPoly(tp_shift(f.num, gamma), tp_shift(f.den, gamma))
    g = np.asarray(gamma, dtype=float).reshape(-1)
    if len(g) != f.dim:
        raise ValueError(f"shift of length {len(g)} for a {f.dim}-variate polynomial")
    quarter: dict = {}
    ok = True
    for k in f.terms:
        q = float(np.dot(k, g)) / (math.pi / 2)
        r = round(q)
        if abs(q - r) > QUARTER_TURN_TOL:
            ok = False
            break
        quarter[k] = r % 4
    if ok:
        if f.exact:
            return TrigPoly(f.dim, {k: c * _PHASES[quarter[k]] for k, c in f.terms.items()},
                            exact=True)
        ph = (1, -1j, -1, 1j)
        return TrigPoly(f.dim, {k: c * ph[quarter[k]] for k, c in f.terms.items()}, exact=False)
    return TrigPoly(f.dim, {k: to_complex(c) * complex(np.exp(-1j * float(np.dot(k, g))))
                            for k, c in f.terms.items()}, exact=False)


def tp_dilate(f, M):
    """Compose with ``M^T``: returns ``w -> f(M^T w)`` (exponent ``k`` becomes ``M k``)."""
    if isinstance(f, RationalTrigPoly):
        return RationalTrigPoly(tp_dilate(f.num, M), tp_dilate(f.den, M))
    M = _as_dilation(M)
    if len(M) != f.dim:
        raise ValueError("dilation size does not match polynomial dimension")
    return TrigPoly(f.dim, {_matvec(M, k): c for k, c in f.terms.items()}, exact=f.exact)


def tp_restrict(f: TrigPoly, M) -> TrigPoly:
    """Keep only the terms whose exponent lies in ``M Z^n``."""
    M = _as_dilation(M)
    det = int_det(M)
    adj = int_adjugate(M)
    keep = {k: c for k, c in f.terms.items() if all(v % det == 0 for v in _matvec(adj, k))}
    return TrigPoly(f.dim, keep, exact=f.exact)


def tp_undilate(f, M):
    """Inverse of :func:`tp_dilate` for a polynomial supported on ``M Z^n``."""
    if isinstance(f, RationalTrigPoly):
        return RationalTrigPoly(tp_undilate(f.num, M), tp_undilate(f.den, M))
    M = _as_dilation(M)
    det = int_det(M)
    adj = int_adjugate(M)
    out = {}
    for k, c in f.terms.items():
        v = _matvec(adj, k)
        if any(x % det for x in v):
            raise ValueError(f"exponent {k} is not in M Z^n; polynomial is not G-invariant")
        out[tuple(x // det for x in v)] = c
    return TrigPoly(f.dim, out, exact=f.exact)


def tp_coset_sum(f: TrigPoly, scheme) -> TrigPoly:
    """``sum_{gamma in Gamma*} f(w + gamma)``, computed exactly as ``Q * restrict(f)``."""
    M = _as_dilation(scheme)
    return tp_restrict(f, M) * abs(int_det(M))


def along(p: TrigPoly, direction) -> TrigPoly:
    """Embed a univariate ``p`` as ``w -> p(w . direction)``."""
    if p.dim != 1:
        raise ValueError("along() expects a univariate polynomial")
    xi = tuple(int(e) for e in direction)
    return TrigPoly(len(xi), {tuple(k[0] * e for e in xi): c for k, c in p.terms.items()},
                    exact=p.exact)


def exp_monomial(nu, sign: int = 1, c=1) -> TrigPoly:
    """``c * exp(sign * 1j * nu . w)`` in the stored convention."""
    return TrigPoly.monomial(tuple(-sign * int(e) for e in nu), c)


@dataclass(frozen=True)
class Polyphase:
    """Polyphase components of a polynomial with respect to a dilation.

    The true component is ``f_nu = sqrt(scale_sq) * parts[nu]``; when ``Q`` is a
    perfect square the scale is folded into ``parts`` and ``scale_sq == 1``.
    """
    M: tuple
    Q: int
    parts: dict
    scale_sq: int = 1
    meta: dict = field(default_factory=dict)

    def component(self, nu) -> TrigPoly:
        p = self.parts[tuple(nu)]
        if self.scale_sq == 1:
            return p
        return p * math.sqrt(self.scale_sq)

    def components(self) -> list[TrigPoly]:
        return [self.component(nu) for nu in self.parts]

    def _dual_factor(self):
        if self.scale_sq == self.Q:
            return 1
        r = math.isqrt(self.Q)
        return Fraction(1, r)

    def reconstruct(self) -> TrigPoly:
        """Apply the dual relation ``f(w) = Q^{-1/2} sum_nu f_nu(M^T w) exp(1j w . nu)``."""
        dim = len(self.M)
        acc = TrigPoly.zero(dim)
        for nu, p in self.parts.items():
            acc = acc + tp_dilate(p, self.M) * exp_monomial(nu, +1)
        return acc * self._dual_factor()

    def energy(self) -> TrigPoly:
        """``sum_nu |f_nu(M^T w)|^2`` as a polynomial in ``w``."""
        dim = len(self.M)
        acc = TrigPoly.zero(dim)
        for p in self.parts.values():
            acc = acc + tp_dilate(p.abs2(), self.M)
        return acc * self.scale_sq


def tp_polyphase(f: TrigPoly, scheme, check: bool = True) -> Polyphase:
    """Polyphase components ``{f_nu}_{nu in Gamma}``.

    Uses ``f_nu(xi) = Q^{1/2} sum_j c_{Mj - nu} exp(-1j j . xi)``, which follows
    from the coset-sum definition; the dual relation is re-checked on return.
    """
    M = scheme.M
    if len(M) != f.dim:
        raise ValueError("scheme dimension does not match polynomial dimension")
    Q = scheme.Q
    det = int_det(M)
    adj = int_adjugate(M)
    gamma = [tuple(v) for v in scheme.Gamma]
    buckets: dict = {nu: {} for nu in gamma}
    for k, c in f.terms.items():
        for nu in gamma:
            v = _matvec(adj, tuple(a + b for a, b in zip(k, nu)))
            if all(x % det == 0 for x in v):
                buckets[nu][tuple(x // det for x in v)] = c
                break
        else:  # pragma: no cover - Gamma is complete by construction
            raise RuntimeError(f"exponent {k} matched no coset")
    r = math.isqrt(Q)
    meta = {}
    if r * r == Q:
        parts = {nu: TrigPoly(f.dim, t, exact=f.exact) * r for nu, t in buckets.items()}
        scale_sq = 1
    else:
        parts = {nu: TrigPoly(f.dim, t, exact=f.exact) for nu, t in buckets.items()}
        scale_sq = Q
        meta["symbolic_scale"] = f"sqrt({Q})"
        if f.exact:
            meta["note"] = "Q^(1/2) is irrational; kept as symbolic scale"
    pp = Polyphase(M=M, Q=Q, parts=parts, scale_sq=scale_sq, meta=meta)
    if check:
        back = pp.reconstruct()
        if f.exact:
            if back.terms != f.terms:
                raise RuntimeError("polyphase dual relation failed exactly")
        else:
            rng = np.random.default_rng(0)
            w = rng.uniform(-np.pi, np.pi, size=(DUAL_CHECK_POINTS, f.dim))
            err = np.max(np.abs(back(w) - f(w))) if not f.is_zero() else 0.0
            if err > DUAL_CHECK_TOL * max(1.0, f.coefficient_l1()):
                raise RuntimeError(f"polyphase dual relation residual {err:.3e}")
    return pp


def _multi_indices(dim: int, order: int):
    for combo in itertools.combinations_with_replacement(range(dim), order):
        alpha = [0] * dim
        for d in combo:
            alpha[d] += 1
        yield tuple(alpha)


def tp_vanishing_order(f, at=None, max_order: int = 40):
    """Order of the zero of ``f`` at ``at`` (default the origin); ``math.inf`` for zero.

    Uses moments ``sum_k c_k k^alpha`` of the translated polynomial; in float
    mode a moment counts as zero below ``1e-8 * sum|c| * max|k|^|alpha|``.
    """
    if isinstance(f, RationalTrigPoly):
        if at is not None and any(a != 0 for a in np.ravel(at)):
            num, den = tp_shift(f.num, at), tp_shift(f.den, at)
        else:
            num, den = f.num, f.den
        if _order0(den, max_order) != 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return _order0(num, max_order)
    if at is not None and any(a != 0 for a in np.ravel(at)):
        f = tp_shift(f, at)
    return _order0(f, max_order)


def _order0(f: TrigPoly, max_order: int):
    if f.is_zero():
        return math.inf
    if f.exact:
        items = [(k, c.x, c.y) for k, c in f.terms.items()]
        for d in range(max_order + 1):
            for alpha in _multi_indices(f.dim, d):
                re = im = QQ(0)
                for k, x, y in items:
                    m = 1
                    for e, a in zip(k, alpha):
                        if a:
                            m *= e ** a
                    if m:
                        re += x * m
                        im += y * m
                if re or im:
                    return d
        raise ArithmeticError(f"no nonzero moment up to order {max_order}")
    K, c = f.arrays()
    Kf = K.astype(float)
    l1 = float(np.sum(np.abs(c)))
    kmax = max(1.0, float(np.max(np.abs(K)))) if len(K) else 1.0
    for d in range(max_order + 1):
        thresh = MOMENT_ZERO_REL * l1 * kmax ** d
        for alpha in _multi_indices(f.dim, d):
            mono = np.prod(Kf ** np.array(alpha, dtype=float), axis=1)
            if abs(mono @ c) > thresh:
                return d
    raise ArithmeticError(f"no nonzero moment up to order {max_order}")
