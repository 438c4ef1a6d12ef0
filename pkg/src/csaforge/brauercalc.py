"""Witness-carrying calculus on characteristic-2 Brauer words.

A word is a formal Z/2-sum of symbols {a, b} over a ring R (a field or an
Artin-Schreier layer over one).  Every rewrite step carries the exact data
that justifies it and is re-checked whenever it is applied, so a transcript
of steps is a proof that can be replayed independently.

Transcript format (one record per line, fields separated by `` | ``)::

    csa-forge/1
    transcript
    field <descriptor of K>
    tower <name> <a>                      # optional: L = K[name], name^2 + name = a
    BEGIN <chain name> <K|L>
    ASSUME <K|L> | a | b                  # hypothesis term
    STEP <K|L> <Kind> <split|merge|-> | payload...
    DESCEND | a | e                       # {X}_L = W_L  gives  {X} = {a,e} + W over K
    END <chain name> | a1 | b1 | a2 | b2 ...   # expected final word (may be empty)
"""

from __future__ import annotations

from types import SimpleNamespace

from . import FORMAT_HEADER
from .exactfield import as_adjoin, field_from_descriptor, field_of, format_scalar, parse_scalar
from .exactfield.tower import TowerElement
from .symbols import NormWitness, norm_witness_search

KINDS = ("BilinearSplit", "SlotAdd", "NormKill", "ASShift", "ComeeedStep", "ChainSwap")


class StepError(ValueError):
    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"step {index}: {message}")
        self.index = index


class TranscriptError(ValueError):
    pass


def _fmt(x):
    return format_scalar(x)


# -- words ---------------------------------------------------------------------


class BrauerWord:
    def __init__(self, ring, terms=()):
        self.ring = ring
        self.terms = [(_lift(ring, a), _lift(ring, b)) for a, b in terms]

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def index(self, a, b):
        a, b = _lift(self.ring, a), _lift(self.ring, b)
        for i, (x, y) in enumerate(self.terms):
            if x == a and y == b:
                return i
        return -1

    def __contains__(self, term):
        return self.index(*term) >= 0

    def without(self, *positions):
        drop = set(positions)
        return BrauerWord(self.ring, [t for i, t in enumerate(self.terms) if i not in drop])

    def plus(self, *terms):
        return BrauerWord(self.ring, list(self.terms) + list(terms))

    def same_as(self, other):
        """Multiset equality of normalized words."""
        x, y = normalize_word(self), normalize_word(other)
        if len(x) != len(y):
            return False
        rest = list(y.terms)
        for a, b in x.terms:
            for i, (c, d) in enumerate(rest):
                if a == _lift(self.ring, c) and b == _lift(self.ring, d):
                    del rest[i]
                    break
            else:
                return False
        return True

    def to_text(self):
        if not self.terms:
            return "0"
        return " + ".join("{" + _fmt(a) + ", " + _fmt(b) + "}" for a, b in self.terms)

    def __repr__(self):
        return f"BrauerWord({self.to_text()})"


def _lift(ring, x):
    if isinstance(x, int):
        return ring.from_int(x)
    if hasattr(ring, "lift") and not _in_ring(ring, x):
        return ring.lift(x)
    return x


def _in_ring(ring, x):
    if isinstance(x, TowerElement):
        return x.ring is ring
    return getattr(x, "field", None) is ring or getattr(x, "field", None) == ring


def normalize_word(w):
    """Cancel identical symbols in pairs (all classes here are 2-torsion)."""
    out = []
    for a, b in w.terms:
        for i, (c, d) in enumerate(out):
            if a == c and b == d:
                del out[i]
                break
        else:
            out.append((a, b))
    return BrauerWord(w.ring, out)


# -- witness operations -----------------------------------------------------------


def witness_mul(w1, w2):
    """Witness of the product of two norms from the same quadratic extension."""
    if w1.a != w2.a:
        raise ValueError("witnesses for different slots cannot be multiplied")
    a = w1.a
    x = w1.x * w2.x + a * w1.y * w2.y
    y = w1.x * w2.y + w2.x * w1.y + w1.y * w2.y
    return NormWitness(a, w1.b * w2.b, x, y).check()


def witness_inv(w):
    """Witness of b^-1 from conj(xi) / norm(xi)."""
    if not w.b:
        raise ZeroDivisionError("witnessed value is zero")
    binv = w.b.inverse()
    return NormWitness(w.a, binv, (w.x + w.y) * binv, w.y * binv).check()


def witness_shift(w, beta, d=None):
    """Turn n in N(b + d) into n in N(d), where beta^2 + beta = b in beta's ring."""
    S = field_of(beta)
    b = beta * beta + beta
    X, Y = _lift(S, w.x), _lift(S, w.y)
    slot = _lift(S, w.a)
    if d is None:
        d = slot - b
    d = _lift(S, d)
    if slot != b + d:
        raise ValueError("witness slot is not b + d for the given beta")
    return NormWitness(d, _lift(S, w.b), X + beta * Y, Y).check()


def witness_lift(w, ring):
    return NormWitness(*(_lift(ring, t) for t in (w.a, w.b, w.x, w.y)))


witness_ops = SimpleNamespace(mul=witness_mul, inv=witness_inv, shift=witness_shift)


def comeeed_witness(R, a, x, y, u, v, b, T=None):
    """Witness that (v + y)(x + y alpha) is a norm from T(beta)/T, beta^2 + beta = b.

    Here T = R[alpha] with alpha^2 + alpha = a, and the data satisfies
    x^2 + xy + a y^2 = u^2 + uv + b v^2 with v + y invertible.  The witness is
    (x + y alpha + u, v), checked by expanding its norm in T.
    """
    a, x, y, u, v, b = (_lift(R, t) for t in (a, x, y, u, v, b))
    if x * x + x * y + a * y * y != u * u + u * v + b * v * v:
        raise ValueError("hypothesis x^2 + xy + a y^2 = u^2 + uv + b v^2 fails")
    if not _invertible(v + y):
        raise ValueError("v + y is not invertible")
    if T is None:
        T = as_adjoin(R, a)
    elif T.a != _lift(T.parent, a):
        raise ValueError("tower generator does not match a")
    alpha = T.gen
    xi = T.lift(x) + alpha * T.lift(y)
    X = xi + T.lift(u)
    Y = T.lift(v)
    target = xi * T.lift(v + y)
    return NormWitness(T.lift(b), target, X, Y).check()


def _invertible(x):
    if not x:
        return False
    try:
        x.inverse()
    except ZeroDivisionError:
        return False
    return True


# -- rewrite steps ----------------------------------------------------------------


ARITY = {"BilinearSplit": 4, "SlotAdd": 4, "NormKill": 4, "ASShift": 4,
         "ComeeedStep": 6, "ChainSwap": 5}


class RewriteStep:
    """One rewrite with its payload.

    BilinearSplit (a, b, c, bc):  {a, bc} <-> {a, b} + {a, c}
    SlotAdd (a1, a2, b, a1+a2):   {a1+a2, b} <-> {a1, b} + {a2, b}
    NormKill (a, b, x, y):        {a, b} -> 0 when b = x^2 + xy + a y^2
    ASShift (a, b, s, a'):        {a, b} -> {a', b} with a' = a + s^p - s
    ChainSwap (b, d, n, x, y):    {b, n} -> {d, n} when n = x^2 + xy + (b+d) y^2
    ComeeedStep (a, b, x, y, u, v): over R[alpha] with alpha^2 + alpha = a,
                                  {b, x + y alpha} -> {b, v + y}
    """

    def __init__(self, kind, payload, mode="split"):
        if kind not in KINDS:
            raise ValueError(f"unknown step kind {kind!r}")
        if len(payload) != ARITY[kind]:
            raise ValueError(f"{kind} takes {ARITY[kind]} payload entries")
        self.kind = kind
        self.payload = list(payload)
        self.mode = mode if kind in ("BilinearSplit", "SlotAdd") else "-"

    def to_fields(self):
        return [self.kind, self.mode] + [_fmt(x) for x in self.payload]

    def __repr__(self):
        return f"RewriteStep({self.kind}, {self.mode}, {[_fmt(x) for x in self.payload]})"


def _require(word, a, b, what):
    i = word.index(a, b)
    if i < 0:
        raise StepError(f"{what}: term {{{_fmt(a)}, {_fmt(b)}}} not in word")
    return i


def apply_step(word, step, transcript=None):
    """Apply ``step`` after checking its witness; the input word is never modified."""
    R = word.ring
    P = [_lift(R, x) for x in step.payload]
    k = step.kind
    if k == "BilinearSplit":
        a, b, c, bc = P
        if b * c != bc:
            raise StepError("BilinearSplit: product check b*c fails")
        if not b or not c:
            raise StepError("BilinearSplit: zero slot")
        if step.mode == "split":
            i = _require(word, a, bc, k)
            out = word.without(i).plus((a, b), (a, c))
        else:
            i = _require(word, a, b, k)
            rest = word.without(i)
            j = _require(rest, a, c, k)
            out = rest.without(j).plus((a, bc))
    elif k == "SlotAdd":
        a1, a2, b, s = P
        if a1 + a2 != s:
            raise StepError("SlotAdd: sum check a1+a2 fails")
        if step.mode == "split":
            i = _require(word, s, b, k)
            out = word.without(i).plus((a1, b), (a2, b))
        else:
            i = _require(word, a1, b, k)
            rest = word.without(i)
            j = _require(rest, a2, b, k)
            out = rest.without(j).plus((s, b))
    elif k == "NormKill":
        a, b, x, y = P
        if not NormWitness(a, b, x, y).verify():
            raise StepError("NormKill: witness does not represent b")
        i = _require(word, a, b, k)
        out = word.without(i)
    elif k == "ASShift":
        a, b, s, a2 = P
        p = getattr(R, "p", None) or R.characteristic
        if a + s ** p - s != a2:
            raise StepError("ASShift: a' != a + s^p - s")
        i = _require(word, a, b, k)
        out = word.without(i).plus((a2, b))
    elif k == "ChainSwap":
        b, d, n, x, y = P
        if not NormWitness(b + d, n, x, y).verify():
            raise StepError("ChainSwap: witness for n in N(b+d) fails")
        if not n:
            raise StepError("ChainSwap: zero slot")
        i = _require(word, b, n, k)
        out = word.without(i).plus((d, n))
    elif k == "ComeeedStep":
        out = _apply_comeeed(word, P)
    else:  # pragma: no cover - guarded by the constructor
        raise StepError(f"unknown kind {k}")
    if transcript is not None:
        transcript.add_step(_ring_tag(transcript, R), step)
    return out


def _apply_comeeed(word, P):
    T = word.ring
    if not hasattr(T, "gen") or not isinstance(T.gen, TowerElement):
        raise StepError("ComeeedStep needs a word over an Artin-Schreier layer")
    a, b, x, y, u, v = P
    lowered = [t.lower() for t in (a, b, x, y, u, v)]
    if any(t is None for t in lowered):
        raise StepError("ComeeedStep: data must lie in the base ring R")
    try:
        comeeed_witness(T.parent, *lowered[0:1], *lowered[2:6], lowered[1], T=T)
    except ValueError as exc:
        raise StepError(f"ComeeedStep: {exc}") from None
    xi = x + y * T.gen
    i = _require(word, b, xi, "ComeeedStep")
    return word.without(i).plus((b, v + y))


def _ring_tag(transcript, R):
    return "L" if transcript.L is not None and R is transcript.L else "K"


# -- transcripts ------------------------------------------------------------------


class Transcript:
    def __init__(self, K, L=None):
        self.K = K
        self.L = L
        self.records = []

    def ring(self, tag):
        if tag == "K":
            return self.K
        if tag == "L" and self.L is not None:
            return self.L
        raise TranscriptError(f"unknown ring tag {tag!r}")

    def begin(self, name, tag):
        self.records.append(("BEGIN", name, tag))

    def assume(self, tag, a, b):
        self.records.append(("ASSUME", tag, [_fmt(a), _fmt(b)]))

    def add_step(self, tag, step):
        self.records.append(("STEP", tag, step.to_fields()))

    def descend(self, a, e):
        self.records.append(("DESCEND", [_fmt(a), _fmt(e)]))

    def end(self, name, word):
        fields = []
        for a, b in word.terms:
            fields += [_fmt(a), _fmt(b)]
        self.records.append(("END", name, fields))

    def to_text(self):
        lines = [FORMAT_HEADER, "transcript", f"field {self.K.descriptor()}"]
        if self.L is not None:
            lines.append(f"tower {self.L.name} {_fmt(self.L.a)}")
        for rec in self.records:
            kind = rec[0]
            if kind == "BEGIN":
                lines.append(f"BEGIN {rec[1]} {rec[2]}")
            elif kind == "ASSUME":
                lines.append(" | ".join([f"ASSUME {rec[1]}"] + rec[2]))
            elif kind == "STEP":
                f = rec[2]
                lines.append(" | ".join([f"STEP {rec[1]} {f[0]} {f[1]}"] + f[2:]))
            elif kind == "DESCEND":
                lines.append(" | ".join(["DESCEND"] + rec[1]))
            elif kind == "END":
                lines.append(" | ".join([f"END {rec[1]}"] + rec[2]))
        return "\n".join(lines) + "\n"


class ReplayResult:
    def __init__(self, ok, words=None, error=None, line=None):
        self.ok = ok
        self.words = words or {}
        self.error = error
        self.line = line

    def __bool__(self):
        return self.ok


def verify_transcript(text):
    """Replay a transcript from scratch; every step is re-checked."""
    try:
        return _replay_text(text)
    except (StepError, TranscriptError, ValueError, ZeroDivisionError) as exc:
        line = getattr(exc, "line", None)
        return ReplayResult(False, error=str(exc), line=line)


def _replay_text(text):
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise TranscriptError(f"missing {FORMAT_HEADER} header")
    if len(lines) == 1:
        return ReplayResult(True)
    if lines[1].strip() != "transcript":
        raise TranscriptError("not a transcript file")
    K = L = None
    words, current, name = {}, None, None
    for lineno, line in enumerate(lines[2:], start=3):
        try:
            head, *fields = [f.strip() for f in line.split(" | ")]
            tok = head.split()
            kind = tok[0]
            if kind == "field":
                K = field_from_descriptor(tok[1])
            elif kind == "tower":
                if K is None:
                    raise TranscriptError("tower before field")
                gen, expr = tok[1], head.split(None, 2)[2]
                L = as_adjoin(K, parse_scalar(expr, K), name=gen)
            elif kind == "BEGIN":
                if current is not None:
                    raise TranscriptError("nested BEGIN")
                name = tok[1]
                current = BrauerWord(_tag(K, L, tok[2]))
            elif kind == "ASSUME":
                R = _tag(K, L, tok[1])
                _same(current, R)
                a, b = (parse_scalar(f, R) for f in fields)
                if not b:
                    raise TranscriptError("assumed symbol has zero slot")
                current = current.plus((a, b))
            elif kind == "STEP":
                R = _tag(K, L, tok[1])
                _same(current, R)
                step = RewriteStep(tok[2], [parse_scalar(f, R) for f in fields], tok[3])
                current = apply_step(current, step)
            elif kind == "DESCEND":
                if L is None or current.ring is not L:
                    raise TranscriptError("DESCEND needs a word over L")
                a, e = (parse_scalar(f, K) for f in fields)
                if L.a != L.lift(a):
                    raise TranscriptError("DESCEND slot a differs from the tower's a")
                lowered = []
                for x, y in current.terms:
                    x0, y0 = x.lower(), y.lower()
                    if x0 is None or y0 is None:
                        raise TranscriptError("DESCEND: term is not defined over K")
                    lowered.append((x0, y0))
                current = BrauerWord(K, [(a, e)] + lowered)
            elif kind == "END":
                if current is None or tok[1] != name:
                    raise TranscriptError("END without matching BEGIN")
                R = current.ring
                vals = [parse_scalar(f, R) for f in fields]
                expected = BrauerWord(R, list(zip(vals[0::2], vals[1::2])))
                if not current.same_as(expected):
                    raise TranscriptError(f"chain {name} ends in {current.to_text()}, "
                                          f"expected {expected.to_text()}")
                words[name] = current
                current, name = None, None
            else:
                raise TranscriptError(f"unknown record {kind!r}")
        except (StepError, TranscriptError, ValueError, ZeroDivisionError) as exc:
            err = TranscriptError(f"line {lineno}: {exc}")
            err.line = lineno
            raise err from None
    if current is not None:
        raise TranscriptError(f"chain {name} not closed")
    return ReplayResult(True, words)


def _tag(K, L, tag):
    if tag == "K" and K is not None:
        return K
    if tag == "L" and L is not None:
        return L
    raise TranscriptError(f"ring {tag} is not defined")


def _same(word, R):
    if word is None:
        raise TranscriptError("record outside BEGIN/END")
    if word.ring is not R:
        raise TranscriptError("record ring differs from the chain's ring")


# -- Rowen's chain -----------------------------------------------------------------


class RowenChainData:
    """Inputs of the replay over K, with s = w + x alpha and t = y + z alpha in L.

    The norm equations carry their witnesses:
      N(s) = u'^2 + u' u + (b + d) u^2,
      N(t) = v'^2 + v' v + (c + d) v^2,
      N(s) N(t) = m^2 + m n + d n^2,
    and e is the slot produced by descending from L to K.
    """

    def __init__(self, K, a, b, c, d, e, w, x, y, z, u, v, m, n, uprime=None, vprime=None):
        conv = lambda t: _lift(K, t)  # noqa: E731
        self.K = K
        self.a, self.b, self.c, self.d, self.e = map(conv, (a, b, c, d, e))
        self.w, self.x, self.y, self.z = map(conv, (w, x, y, z))
        self.u, self.v, self.m, self.n = map(conv, (u, v, m, n))
        self.uprime = K.one if uprime is None else conv(uprime)
        self.vprime = K.one if vprime is None else conv(vprime)

    @property
    def f(self):
        return self.x * self.z + self.w * self.z + self.x * self.y

    @property
    def g(self):
        return self.w * self.y + self.x * self.z * self.a

    def norm_s(self):
        return self.w * self.w + self.w * self.x + self.a * self.x * self.x

    def norm_t(self):
        return self.y * self.y + self.y * self.z + self.a * self.z * self.z

    @property
    def k(self):
        return self.u + self.x

    @property
    def l(self):  # noqa: E743
        return self.v + self.z

    @property
    def m_out(self):
        return self.n + self.f

    def witnesses(self):
        return {
            "N(s) in N(b+d)": NormWitness(self.b + self.d, self.norm_s(), self.uprime, self.u),
            "N(t) in N(c+d)": NormWitness(self.c + self.d, self.norm_t(), self.vprime, self.v),
            "N(st) in N(d)": NormWitness(self.d, self.norm_s() * self.norm_t(), self.m, self.n),
        }

    def final_word(self):
        return BrauerWord(self.K, [(self.a, self.e), (self.b, self.k), (self.c, self.l),
                                   (self.d, self.k * self.l * self.m_out)])


def rowen_replay(data):
    """Replay Rowen's chain on ``data``; returns (final word over K, transcript).

    Two chains are recorded.  ``corestriction`` checks that the witnesses
    make {b, N(s)} + {c, N(t)} vanish over K.  ``main`` starts from the
    hypothesis {A}_L = {b, s} + {c, t}, rewrites it over L with the comeeed
    steps, descends to K (adding {a, e}) and regroups into four symbols.
    """
    K = data.K
    L = as_adjoin(K, data.a, name="alpha")
    tr = Transcript(K, L)
    a, b, c, d = data.a, data.b, data.c, data.d
    ns, nt = data.norm_s(), data.norm_t()
    ws = data.witnesses()
    index = [0]

    def step(word, kind, payload, mode="split"):
        index[0] += 1
        try:
            return apply_step(word, RewriteStep(kind, payload, mode), tr)
        except StepError as exc:
            raise StepError(str(exc), index[0]) from None

    # corestriction consequence over K
    tr.begin("corestriction", "K")
    W = BrauerWord(K, [(b, ns), (c, nt)])
    tr.assume("K", b, ns)
    tr.assume("K", c, nt)
    w1, w2, w3 = ws["N(s) in N(b+d)"], ws["N(t) in N(c+d)"], ws["N(st) in N(d)"]
    W = step(W, "ChainSwap", [b, d, ns, w1.x, w1.y])
    W = step(W, "ChainSwap", [c, d, nt, w2.x, w2.y])
    W = step(W, "BilinearSplit", [d, ns, nt, ns * nt], "merge")
    W = step(W, "NormKill", [d, ns * nt, w3.x, w3.y])
    tr.end("corestriction", W)

    # main chain over L
    lift = L.lift
    al = L.gen
    s = lift(data.w) + lift(data.x) * al
    t = lift(data.y) + lift(data.z) * al
    bL, cL, dL = lift(b), lift(c), lift(d)
    tr.begin("main", "L")
    W = BrauerWord(L, [(bL, s), (cL, t)])
    tr.assume("L", bL, s)
    tr.assume("L", cL, t)
    W = step(W, "SlotAdd", [bL + dL, dL, s, bL], "split")
    W = step(W, "SlotAdd", [cL + dL, dL, t, cL], "split")
    W = step(W, "BilinearSplit", [dL, s, t, s * t], "merge")
    aL = lift(a)
    W = step(W, "ComeeedStep", [aL, bL + dL, lift(data.w), lift(data.x),
                                lift(data.uprime), lift(data.u)])
    W = step(W, "ComeeedStep", [aL, cL + dL, lift(data.y), lift(data.z),
                                lift(data.vprime), lift(data.v)])
    W = step(W, "ComeeedStep", [aL, dL, lift(data.g), lift(data.f), lift(data.m), lift(data.n)])
    # descend: every slot now lies in K
    lowered = []
    for x, y in W.terms:
        x0, y0 = x.lower(), y.lower()
        if x0 is None or y0 is None:
            raise StepError("descent: a slot is not defined over K", index[0])
        lowered.append((x0, y0))
    tr.descend(a, data.e)
    W = BrauerWord(K, [(a, data.e)] + lowered)
    k, l, mo = data.k, data.l, data.m_out
    W = step(W, "SlotAdd", [b, d, k, b + d], "split")
    W = step(W, "SlotAdd", [c, d, l, c + d], "split")
    W = step(W, "BilinearSplit", [d, k, l, k * l], "merge")
    W = step(W, "BilinearSplit", [d, k * l, mo, k * l * mo], "merge")
    tr.end("main", W)
    return W, tr


def kill_split_terms(word, transcript=None, tag="K"):
    """NormKill every symbol with a searched witness (finite fields only)."""
    W = word
    for a, b in list(word.terms):
        wit = norm_witness_search(a, b, word.ring)
        if wit is None:
            raise StepError(f"no witness for {{{_fmt(a)}, {_fmt(b)}}}")
        W = apply_step(W, RewriteStep("NormKill", [a, b, wit.x, wit.y]))
        if transcript is not None:
            transcript.add_step(tag, RewriteStep("NormKill", [a, b, wit.x, wit.y]))
    return W
