"""Quasigroup terms over product, left division and right division.

Grammar (whitespace ignored)::

    variable = letter digit*
    factor   = variable | "(" expr ")"
    expr     = factor | factor factor | factor "\\" factor | factor "/" factor
    identity = expr "=" expr

An unparenthesised chain of three or more factors is rejected rather than
given an implicit association.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import left_divide, left_mul, multiply, right_divide, right_mul

HOLD_THRESHOLD = 1e-8
FAIL_THRESHOLD = 1e-4
MAX_COND = 1e8


class ParseError(ValueError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at column {position + 1})"
        super().__init__(message)
        self.position = position


class AmbiguityError(ParseError):
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Product:
    left: object
    right: object


@dataclass(frozen=True)
class LeftDiv:
    left: object
    right: object


@dataclass(frozen=True)
class RightDiv:
    left: object
    right: object


_OPS = {Product: "", LeftDiv: "\\", RightDiv: "/"}


def to_string(t):
    if isinstance(t, Var):
        return t.name

    def wrap(s):
        return s.name if isinstance(s, Var) else f"({to_string(s)})"

    return wrap(t.left) + _OPS[type(t)] + wrap(t.right)


def variables_of(t, out=None):
    """Variable names in order of first appearance."""
    out = [] if out is None else out
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    else:
        variables_of(t.left, out)
        variables_of(t.right, out)
    return out


def occurrences(t):
    if isinstance(t, Var):
        return {t.name: 1}
    counts = dict(occurrences(t.left))
    for k, v in occurrences(t.right).items():
        counts[k] = counts.get(k, 0) + v
    return counts


def product_only(t):
    if isinstance(t, Var):
        return True
    return isinstance(t, Product) and product_only(t.left) and product_only(t.right)


@dataclass(frozen=True)
class Identity:
    lhs: object
    rhs: object
    variables: tuple = field(default=())

    def __post_init__(self):
        if not self.variables:
            names = variables_of(self.lhs)
            variables_of(self.rhs, names)
            object.__setattr__(self, "variables", tuple(names))

    def __str__(self):
        return f"{to_string(self.lhs)}={to_string(self.rhs)}"


# ---- parsing

def _tokenize(src):
    tokens = []
    i = 0
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
        elif ch.isascii() and ch.isalpha():
            j = i + 1
            while j < len(src) and src[j].isdigit():
                j += 1
            tokens.append(("var", src[i:j], i))
            i = j
        elif ch in "()\\/=":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, len(self.src))

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            what = "end of input" if tok[0] is None else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.pos += 1
        return tok

    def factor(self):
        kind, text, at = self.peek()
        if kind == "var":
            self.pos += 1
            return Var(text)
        if kind == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek()[0] != ")":
                raise ParseError("unbalanced parentheses", self.peek()[2])
            self.pos += 1
            return inner
        if kind == ")":
            raise ParseError("unbalanced parentheses", at)
        what = "end of input" if kind is None else repr(text)
        raise ParseError(f"expected a variable or '(', found {what}", at)

    def expr(self):
        left = self.factor()
        kind, _, at = self.peek()
        if kind in ("var", "("):
            node = Product(left, self.factor())
        elif kind == "\\":
            self.pos += 1
            node = LeftDiv(left, self.factor())
        elif kind == "/":
            self.pos += 1
            node = RightDiv(left, self.factor())
        else:
            return left
        kind, _, at = self.peek()
        if kind in ("var", "(", "\\", "/"):
            raise AmbiguityError("three or more factors without parentheses", at)
        return node


def parse_term(src):
    p = _Parser(src)
    t = p.expr()
    kind, text, at = p.peek()
    if kind == ")":
        raise ParseError("unbalanced parentheses", at)
    if kind is not None:
        raise ParseError(f"unexpected {text!r}", at)
    return t


def parse_identity(src, allow_trivial=False):
    if src.count("=") != 1:
        raise ParseError("an identity needs exactly one '='" if "=" not in src else "more than one '='")
    p = _Parser(src)
    lhs = p.expr()
    kind, text, at = p.peek()
    if kind == ")":
        raise ParseError("unbalanced parentheses", at)
    p.take("=")
    rhs = p.expr()
    kind, text, at = p.peek()
    if kind == ")":
        raise ParseError("unbalanced parentheses", at)
    if kind is not None:
        raise ParseError(f"unexpected {text!r}", at)
    if lhs == rhs and not allow_trivial:
        raise ValueError("trivial identity: both sides are the same term")
    return Identity(lhs, rhs)


def is_balanced(identity):
    if not (product_only(identity.lhs) and product_only(identity.rhs)):
        return False
    left, right = occurrences(identity.lhs), occurrences(identity.rhs)
    return set(left) == set(right) and all(v == 1 for v in left.values()) and all(
        v == 1 for v in right.values()
    )


# ---- evaluation

def _solve_batched(M, y):
    """Solve M x = y for stacks; also return the condition number per stack entry."""
    U, s, Vt = np.linalg.svd(M)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = s[..., 0] / s[..., -1]
        coeff = np.einsum("...ji,...j->...i", U, y) / s
        x = np.einsum("...ji,...j->...i", Vt, coeff)
    return x, cond


def _eval(A, t, env, conds):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise KeyError(f"variable {t.name!r} is not assigned") from None
    left = _eval(A, t.left, env, conds)
    right = _eval(A, t.right, env, conds)
    if isinstance(t, Product):
        return multiply(A, left, right)
    if isinstance(t, LeftDiv):
        x, cond = _solve_batched(left_mul(A, left), right)
    else:
        x, cond = _solve_batched(right_mul(A, right), left)
    conds.append(cond)
    return x


def eval_term(A, t, assignment):
    """Evaluate a term; a single assignment raises on a singular division."""
    if isinstance(t, str):
        t = parse_term(t)
    if isinstance(t, Var):
        if t.name not in assignment:
            raise KeyError(f"variable {t.name!r} is not assigned")
        return np.asarray(assignment[t.name], dtype=float)
    left = eval_term(A, t.left, assignment)
    right = eval_term(A, t.right, assignment)
    if isinstance(t, Product):
        return multiply(A, left, right)
    if isinstance(t, LeftDiv):
        return left_divide(A, left, right)
    return right_divide(A, left, right)


@dataclass
class CheckReport:
    mode: str
    trials: int
    max_residual: float
    verdict: str
    witness: dict = None
    rejected: int = 0

    def to_dict(self):
        out = {
            "mode": self.mode,
            "trials": self.trials,
            "rejected": self.rejected,
            "max_residual": float(self.max_residual),
            "verdict": self.verdict,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _verdict(r, hold):
    if r < hold:
        return "holds"
    if r > FAIL_THRESHOLD:
        return "fails"
    return "inconclusive"


def _relative(lhs, rhs):
    scale = np.maximum(1.0, np.maximum(np.linalg.norm(lhs, axis=-1), np.linalg.norm(rhs, axis=-1)))
    return np.linalg.norm(lhs - rhs, axis=-1) / scale


def check_sampled(A, identity, trials=1000, seed=0, batch=None):
    """Seeded Gaussian sampling; near-singular division draws are rejected."""
    if isinstance(identity, str):
        identity = parse_identity(identity)
    rng = np.random.default_rng(seed)
    names = identity.variables
    batch = batch or max(1, min(trials, 2048))
    worst, worst_env = -1.0, None
    accepted = rejected = 0
    rounds = 0
    while accepted < trials:
        rounds += 1
        if rounds > 20 + 10 * (trials // batch + 1):
            break
        m = min(batch, trials - accepted)
        env = {name: rng.standard_normal((m, A.dim)) for name in names}
        conds = []
        with np.errstate(all="ignore"):
            lhs = _eval(A, identity.lhs, env, conds)
            rhs = _eval(A, identity.rhs, env, conds)
            ok = np.ones(m, dtype=bool)
            for c in conds:
                ok &= np.isfinite(c) & (c <= MAX_COND)
            res = _relative(lhs, rhs)
        ok &= np.isfinite(res)
        rejected += int(m - ok.sum())
        if ok.any():
            idx = np.flatnonzero(ok)
            k = idx[np.argmax(res[idx])]
            if res[k] > worst:
                worst = float(res[k])
                worst_env = {name: env[name][k].tolist() for name in names}
            accepted += idx.size
    if accepted == 0:
        raise ArithmeticError("every sampled assignment hit a near-singular division")
    verdict = _verdict(worst, HOLD_THRESHOLD)
    witness = worst_env if verdict == "fails" else None
    if witness is not None:
        witness = {"assignment": witness, "residual": worst}
    return CheckReport("sampled", accepted, worst, verdict, witness, rejected)


MAX_EXACT_TUPLES = 2_000_000


def check_exact_multilinear(A, identity, chunk=32768):
    """Compare both sides on every tuple of basis vectors (exact for balanced identities)."""
    if isinstance(identity, str):
        identity = parse_identity(identity)
    if not is_balanced(identity):
        raise ValueError("exact multilinear checking needs a balanced, product-only identity")
    names = identity.variables
    k, n = len(names), A.dim
    if n > 8 and k > 6:
        raise ValueError("refusing more than 6 variables on an algebra of dimension > 8")
    total = n**k
    if total > MAX_EXACT_TUPLES:
        raise ValueError(f"{total} basis tuples exceed the budget of {MAX_EXACT_TUPLES}")
    eye = np.eye(n)
    worst, worst_idx = -1.0, None
    flat = np.arange(total)
    for start in range(0, total, chunk):
        ids = flat[start : start + chunk]
        digits = np.unravel_index(ids, (n,) * k)
        env = {name: eye[d] for name, d in zip(names, digits)}
        res = _relative(_eval(A, identity.lhs, env, []), _eval(A, identity.rhs, env, []))
        j = int(np.argmax(res))
        if res[j] > worst:
            worst = float(res[j])
            worst_idx = {name: int(d[j]) for name, d in zip(names, digits)}
    verdict = _verdict(worst, max(A.tol, 1e-12))
    witness = None
    if verdict == "fails":
        labels = A.labels
        witness = {
            "basis": worst_idx,
            "residual": worst,
        }
        if labels:
            witness["labels"] = {name: labels[i] for name, i in worst_idx.items()}
    return CheckReport("exact-multilinear", total, worst, verdict, witness)


def check(A, identity, trials=1000, seed=0, exact=None):
    """Exact mode for balanced identities when affordable, sampled otherwise."""
    if isinstance(identity, str):
        identity = parse_identity(identity)
    if exact is None:
        exact = is_balanced(identity) and A.dim ** len(identity.variables) <= 65536
    if exact:
        return check_exact_multilinear(A, identity)
    return check_sampled(A, identity, trials=trials, seed=seed)


# ---- generated identities

def _pn(xs):
    if len(xs) == 2:
        return Product(xs[0], xs[1])
    half = len(xs) // 2
    return Product(_pn(xs[:half]), _pn(xs[half:]))


def generate_pn_identity(n):
    """y p_n(x1..x_{2^n}) = p_n(y, x1..x_{2^n-1}) x_{2^n}, with p_n the balanced binary word."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 5:
        raise ValueError("n must be an integer in 1..5")
    m = 2**n
    y = Var("y")
    xs = [Var(f"x{i}") for i in range(1, m + 1)]
    lhs = Product(y, _pn(xs))
    rhs = Product(_pn([y] + xs[:-1]), xs[-1])
    return Identity(lhs, rhs, variables=tuple(["y"] + [x.name for x in xs]))

