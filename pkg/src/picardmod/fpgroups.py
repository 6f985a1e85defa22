"""Finitely presented groups: words, Tietze simplification, abelianization.

Words are tuples of nonzero signed integers: +-(i+1) is generator i or
its inverse (the Spherogram convention).  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "free_reduce",
    "cyclic_reduce",
    "Word",
    "Presentation",
    "read_presentation",
    "write_presentation",
    "tietze_simplify",
    "smith_normal_form",
    "abelianization",
    "AbelianInvariants",
]

Word = tuple[int, ...]


def free_reduce(w) -> Word:
    """Remove adjacent cancelling letters; the unique free normal form."""
    out: list[int] = []
    for x in w:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(w) -> Word:
    w = list(free_reduce(w))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def invert_word(w) -> Word:
    return tuple(-x for x in reversed(w))


def word_from_letters(letters: list[tuple[str, int]], gen_index: dict[str, int]) -> Word:
    out: list[int] = []
    for name, exp in letters:
        g = gen_index[name] + 1
        out.extend([g if exp > 0 else -g] * abs(exp))
    return free_reduce(out)


@dataclass
class Presentation:
    generators: list[str]
    relators: list[Word]

    def __post_init__(self):
        self.relators = [cyclic_reduce(r) for r in self.relators]
        self.relators = [r for r in self.relators if r]

    def gen_index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.generators)}

    def word_text(self, w: Word) -> str:
        # collapse runs into name^exp tokens
        toks = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.generators[abs(w[i]) - 1]
            e = (j - i) * (1 if w[i] > 0 else -1)
            toks.append(name if e == 1 else f"{name}^{e}")
            i = j
        return " ".join(toks)


# -- file format ---------------------------------------------------------------
# "gens: a b c" then one relator word per line ("a b^-2 c").


def write_presentation(path, pres: Presentation) -> None:
    with open(path, "w") as fh:
        fh.write("gens: " + " ".join(pres.generators) + "\n")
        for r in pres.relators:
            fh.write(pres.word_text(r) + "\n")


def read_presentation(path) -> Presentation:
    gens: list[str] | None = None
    relators: list[Word] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if gens is None:
                if not line.startswith("gens:"):
                    raise ValueError(f"{path}:{lineno}: expected 'gens:' header")
                gens = line[len("gens:"):].split()
                continue
            try:
                relators.append(parse_word(line, {g: i for i, g in enumerate(gens)}))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if gens is None:
        raise ValueError(f"{path}: missing 'gens:' header")
    return Presentation(gens, relators)


def parse_word(text: str, gen_index: dict[str, int]) -> Word:
    out: list[int] = []
    for tok in text.split():
        name, _, exp = tok.partition("^")
        e = int(exp) if exp else 1
        if name not in gen_index:
            raise ValueError(f"unknown generator {name!r}")
        g = gen_index[name] + 1
        out.extend([g if e > 0 else -g] * abs(e))
    return free_reduce(out)


# -- Tietze simplification --------------------------------------------------------


@dataclass
class SimplifyResult:
    presentation: Presentation
    # (eliminated generator name, replacement word over the then-current gens,
    #  generator list at elimination time) in elimination order
    substitutions: list[tuple[str, Word, list[str]]] = field(default_factory=list)


def tietze_simplify(
    pres: Presentation,
    max_rounds: int = 50,
    preserve: set[str] | frozenset[str] = frozenset(),
    elimination_limit: int | None = None,
    max_subword_len: int = 20,
) -> SimplifyResult:
    """Deterministic Tietze moves: eliminate single-occurrence generators,
    drop redundant relators, shorten by common-subword substitution.

    The group is unchanged; the substitution log lets callers expand
    simplified generators back into words over the original ones.
    """
    if len(pres.generators) > 126:
        raise ValueError("tietze_simplify supports at most 126 generators")
    gens = list(pres.generators)
    rels = [cyclic_reduce(r) for r in pres.relators if cyclic_reduce(r)]
    log: list[tuple[str, Word, list[str]]] = []
    eliminated = 0

    for _ in range(max_rounds):
        changed = False
        rels = _dedup(rels)

        # generator elimination: find a relator using some generator exactly once
        rels.sort(key=lambda r: (len(r), r))
        elim = None
        for r in rels:
            if elimination_limit is not None and eliminated >= elimination_limit:
                break
            counts: dict[int, int] = {}
            for x in r:
                counts[abs(x)] = counts.get(abs(x), 0) + 1
            for g, cnt in sorted(counts.items()):
                if cnt == 1 and gens[g - 1] not in preserve:
                    elim = (r, g)
                    break
            if elim:
                break
        if elim:
            r, g = elim
            i = next(k for k, x in enumerate(r) if abs(x) == g)
            # r = u g^e v  =>  g^e = u^-1 v^-1, replacement for g follows
            u, e, v = r[:i], r[i], r[i + 1:]
            repl = free_reduce(invert_word(u) + invert_word(v))
            if e < 0:
                repl = invert_word(repl)
            log.append((gens[g - 1], repl, list(gens)))
            rels.remove(r)
            rels = [
                _substitute(w, g, repl) if any(abs(x) == g for x in w) else w
                for w in rels
            ]
            rels = [x for x in (cyclic_reduce(w) for w in rels) if x]
            gens, rels = _drop_generator(gens, rels, g)
            eliminated += 1
            changed = True

        # subword shortening with short relators (byte-encoded search).
        # Rewrites commit one relator at a time against the live set: each
        # step replaces w by w * (conjugates of other present relators), so
        # the normal closure is invariant; an emptied relator is a
        # consequence of relators still present and may be dropped.
        rels = _dedup(rels)
        words = dict(enumerate(rels))

        def build_variants():
            vs = []
            for i, w in sorted(words.items()):
                n = len(w)
                if not 2 <= n <= max_subword_len:
                    continue
                half = n // 2 + 1
                if half <= n - half:
                    continue
                for rr in (w, invert_word(w)):
                    for s in range(n):
                        rot = rr[s:] + rr[:s]
                        vs.append(
                            (_encode(rot[:half]), invert_word(rot[half:]), i)
                        )
            return vs

        variants = build_variants()
        for i in sorted(words):
            w = words[i]
            w2 = _shorten_all(w, variants, i)
            if w2 == w:
                continue
            changed = True
            if w2:
                words[i] = w2
            else:
                del words[i]
            # rebuild when the set of short rewriters may have changed
            if len(w) <= max_subword_len or (w2 and len(w2) <= max_subword_len):
                variants = build_variants()
        rels = [words[i] for i in sorted(words)]
        if not changed:
            break

    rels = _dedup(rels)
    rels.sort(key=lambda r: (len(r), r))
    return SimplifyResult(Presentation(gens, rels), log)


def _encode(w: Word) -> bytes:
    return bytes(x if x > 0 else 128 - x for x in w)


def _shorten_all(w: Word, variants, self_index: int) -> Word:
    wb = _encode(w)
    changed = True
    while changed:
        changed = False
        for chunk, repl, src in variants:
            if src == self_index or len(chunk) > len(wb):
                continue
            idx = wb.find(chunk)
            if idx >= 0:
                head = tuple(c if c < 128 else 128 - c for c in wb[:idx])
                tail = tuple(c if c < 128 else 128 - c for c in wb[idx + len(chunk):])
                w = free_reduce(head + repl + tail)
                wb = _encode(w)
                changed = True
    return cyclic_reduce(w)


def _dedup(rels: list[Word]) -> list[Word]:
    """Drop repeats up to rotation and inversion (the same relator)."""
    seen = set()
    out = []
    for r in rels:
        key = _cyclic_key(r)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def _cyclic_key(w: Word) -> bytes:
    best = b"\xff"
    for ww in (w, invert_word(w)):
        b = _encode(ww)
        bb = b + b
        n = len(b)
        for s in range(n):
            cand = bb[s : s + n]
            if cand < best:
                best = cand
    return best


def _substitute(w: Word, g: int, repl: Word) -> Word:
    out: list[int] = []
    for x in w:
        if x == g:
            out.extend(repl)
        elif x == -g:
            out.extend(invert_word(repl))
        else:
            out.append(x)
    return free_reduce(out)


def _drop_generator(gens: list[str], rels: list[Word], g: int):
    """Renumber letters after deleting generator index g (1-based)."""
    def shift(x: int) -> int:
        a = abs(x)
        assert a != g
        a2 = a - 1 if a > g else a
        return a2 if x > 0 else -a2

    gens2 = gens[: g - 1] + gens[g:]
    rels2 = [tuple(shift(x) for x in r) for r in rels]
    return gens2, rels2


def expand_word(w: Word, gens: list[str], log) -> tuple[Word, list[str]]:
    """Map a word over simplified generators back to the original ones.

    Replays the substitution log backwards; returns the word and the
    original generator list.
    """
    names = list(gens)
    word = list(w)
    for gname, repl, gens_at in reversed(log):
        # move the word to the generator numbering of gens_at, with gname present
        idx = {g: i for i, g in enumerate(gens_at)}
        gpos = idx[gname] + 1
        rmap = {}
        for i, g in enumerate(names, 1):
            rmap[i] = idx[g] + 1
        lifted: list[int] = []
        for x in word:
            y = rmap[abs(x)]
            lifted.append(y if x > 0 else -y)
        # replace occurrences of gname's letter by its replacement word
        repl_shifted = repl
        out: list[int] = []
        for x in lifted:
            if abs(x) == gpos:
                out.extend(repl_shifted if x > 0 else invert_word(repl_shifted))
            else:
                out.append(x)
        word = list(free_reduce(out))
        names = list(gens_at)
    return tuple(word), names


# -- Smith normal form and abelianization ----------------------------------------


def smith_normal_form(M: list[list[int]]):
    """(D, U, V) with U M V = D, D diagonal with a divisibility chain, U, V unimodular."""
    m = len(M)
    n = len(M[0]) if m else 0
    A = [row[:] for row in M]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, j, c):  # row_i += c*row_j
        A[i] = [a + c * b for a, b in zip(A[i], A[j])]
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, c):  # col_i += c*col_j
        for r in range(m):
            A[r][i] += c * A[r][j]
        for r in range(n):
            V[r][i] += c * V[r][j]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(i, j):
        for r in range(m):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(n):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    def row_neg(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    t = 0
    while t < min(m, n):
        # find the least-abs nonzero pivot in the submatrix
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        row_swap(t, piv[0])
        col_swap(t, piv[1])
        if A[t][t] < 0:
            row_neg(t)
        clean = True
        for i in range(t + 1, m):
            if A[i][t]:
                row_op(i, t, -(A[i][t] // A[t][t]))
                if A[i][t]:
                    clean = False
        for j in range(t + 1, n):
            if A[t][j]:
                col_op(j, t, -(A[t][j] // A[t][t]))
                if A[t][j]:
                    clean = False
        if not clean:
            continue  # remainders became new, smaller pivots
        # divisibility: fold any non-divisible entry into the pivot
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % A[t][t]:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_op(t, bad, 1)
            continue
        t += 1
    return A, U, V


@dataclass(frozen=True)
class AbelianInvariants:
    torsion: tuple[int, ...]  # invariant factors > 1, divisibility chain
    free_rank: int

    def __str__(self):
        parts = [f"Z/{t}" for t in self.torsion] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "trivial"


def abelianization(pres: Presentation) -> AbelianInvariants:
    """Invariant factors of the relator exponent-sum matrix (exact SNF)."""
    n = len(pres.generators)
    rows = []
    for r in pres.relators:
        row = [0] * n
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    if not rows:
        return AbelianInvariants((), n)
    D, _, _ = smith_normal_form(rows)
    diag = [D[i][i] for i in range(min(len(rows), n))]
    nonzero = [abs(d) for d in diag if d]
    torsion = tuple(d for d in nonzero if d > 1)
    return AbelianInvariants(torsion, n - len(nonzero))
