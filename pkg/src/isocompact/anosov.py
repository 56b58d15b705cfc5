"""Free-group word balls with divergence and domination certificates, plus
boundary points and limit-set samples.

Words are tuples of nonzero integers: ``i`` is the i-th free generator and
``-i`` its inverse.  The alphabet order is ``1 < -1 < 2 < -2 < ...``; as
strings the generators are ``a, b, c, ...`` and inverses ``A, B, C, ...``.
Finite-radius verdicts are labelled "consistent at radius r", never proved.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .cartan import cartan_mu_batch, lyapunov_batch
from .forms import FormSpec, GLSpec, direct_sum_minus, eval_root, eval_weight, is_automorphism
from .scalars import ScalarTag
from .subspaces import Subspace, isotropy_residual
from .tolerances import DEFAULT, Tolerances

Word = tuple


class GapError(ArithmeticError):
    """The eigenvalue gap of a word is too small to locate an attracting subspace."""


# ---------------------------------------------------------------- words

def word_to_str(w: Word) -> str:
    return "".join(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1) for x in w) or "e"


def word_from_str(s: str) -> Word:
    if s in ("", "e"):
        return ()
    out = []
    for ch in s:
        if not ch.isalpha():
            raise ValueError(f"bad letter {ch!r} in word {s!r}")
        out.append(ord(ch) - ord("a") + 1 if ch.islower() else -(ord(ch) - ord("A") + 1))
    return tuple(out)


def _letter_key(x: int) -> int:
    return 2 * (abs(x) - 1) + (x < 0)


def alphabet(k: int) -> list[int]:
    return [s * i for i in range(1, k + 1) for s in (1, -1)]


def free_reduce(w) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse_word(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def is_cyclically_reduced(w: Word) -> bool:
    return len(w) > 0 and free_reduce(w) == tuple(w) and (len(w) == 1 or w[0] != -w[-1])


def canonical_rotation(w: Word) -> Word:
    keyed = [tuple(_letter_key(x) for x in w[i:] + w[:i]) for i in range(len(w))]
    i = min(range(len(w)), key=keyed.__getitem__)
    return w[i:] + w[:i]


def is_primitive(w: Word) -> bool:
    """Not a proper power."""
    n = len(w)
    return not any(n % d == 0 and w == w[:d] * (n // d) for d in range(1, n))


def ball_size(k: int, radius: int) -> int:
    return sum(2 * k * (2 * k - 1) ** (l - 1) for l in range(1, radius + 1))


@dataclass(frozen=True)
class WordBall:
    k: int
    radius: int
    words: list

    def __len__(self):
        return len(self.words)


def word_ball(k: int, radius: int, cap: int = 10 ** 6) -> WordBall:
    """Nontrivial freely reduced words of length <= radius in shortlex order."""
    if k < 1 or radius < 1:
        raise ValueError("word_ball needs k >= 1 and radius >= 1")
    if ball_size(k, radius) > cap:
        raise ValueError(f"ball of radius {radius} has {ball_size(k, radius)} words, above the cap {cap}")
    letters = alphabet(k)
    level = [(x,) for x in letters]
    words = list(level)
    for _ in range(radius - 1):
        level = [w + (x,) for w in level for x in letters if x != -w[-1]]
        words += level
    return WordBall(k, radius, words)


# ---------------------------------------------------------------- representations

@dataclass(frozen=True, eq=False)
class RepSpec:
    form: "FormSpec | GLSpec"
    generators: tuple
    tol: float = DEFAULT.grp

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=self.form.tag.dtype) for g in self.generators)
        if not gens:
            raise ValueError("a representation needs at least one generator")
        for i, g in enumerate(gens):
            if not is_automorphism(g, self.form, self.tol):
                raise ValueError(f"generator {i + 1} is not in the group of {self.form.label}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_inverses", tuple(np.linalg.inv(g) for g in gens))

    @property
    def rank_free(self) -> int:
        return len(self.generators)

    @property
    def tag(self) -> ScalarTag:
        return self.form.tag

    @property
    def dim(self) -> int:
        return self.form.numeric_dim

    def letter(self, x: int) -> np.ndarray:
        return self.generators[x - 1] if x > 0 else self._inverses[-x - 1]


def evaluate(rep: RepSpec, word) -> np.ndarray:
    """Left-to-right product of generator matrices; the empty word is the identity."""
    M = np.eye(rep.dim, dtype=rep.tag.dtype)
    for x in word:
        if not 1 <= abs(x) <= rep.rank_free:
            raise ValueError(f"letter {x} outside the alphabet of a rank {rep.rank_free} free group")
        M = M @ rep.letter(x)
    return M


def product_rep(repL: RepSpec, repR: RepSpec) -> RepSpec:
    """rho_L (+) rho_R into Aut(b (+) -b)."""
    if repL.rank_free != repR.rank_free:
        raise ValueError("representations of different free ranks")
    if not isinstance(repL.form, FormSpec) or repL.form.key != repR.form.key:
        raise ValueError("product representation needs both factors in the same Aut(b)")
    gens = [block_diag(a, b) for a, b in zip(repL.generators, repR.generators)]
    return RepSpec(direct_sum_minus(repL.form), gens)


def _levels(rep: RepSpec, radius: int):
    """Yield (length, words, stacked matrices) level by level in shortlex order."""
    letters = alphabet(rep.rank_free)
    gens = np.array([rep.letter(x) for x in letters])
    words = [(x,) for x in letters]
    mats = gens.copy()
    yield 1, words, mats
    for length in range(2, radius + 1):
        new_words, blocks = [], []
        for j, x in enumerate(letters):
            keep = [i for i, w in enumerate(words) if w[-1] != -x]
            blocks.append((keep, mats[keep] @ gens[j], j))
        order = []
        for keep, prod, j in blocks:
            for pos, i in enumerate(keep):
                order.append((i, j, prod[pos]))
        order.sort(key=lambda t: (t[0], t[1]))
        new_words = [words[i] + (letters[j],) for i, j, _ in order]
        mats = np.array([m for _, _, m in order])
        words = new_words
        yield length, words, mats


def _chunked_map(fn, mats: np.ndarray, workers: int, chunk: int = 512) -> np.ndarray:
    """Apply a batched function over chunks, optionally in threads; order preserved."""
    pieces = [mats[i: i + chunk] for i in range(0, len(mats), chunk)]
    if workers > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, pieces))
    else:
        parts = [fn(p) for p in pieces]
    return np.concatenate(parts) if parts else np.zeros((0,))


# ---------------------------------------------------------------- divergence

@dataclass(frozen=True)
class DivergenceProfile:
    radius: int
    root_index: int
    lengths: list
    minima: list
    argmin_words: list
    slope: float
    intercept: float
    nondecreasing: bool
    s_min: float

    @property
    def verdict(self) -> bool:
        return self.nondecreasing and self.slope >= self.s_min

    @property
    def label(self) -> str:
        state = "divergence-consistent" if self.verdict else "not divergence-consistent"
        return f"{state} at radius {self.radius}"

    def as_dict(self) -> dict:
        return {
            "radius": self.radius,
            "root_index": self.root_index,
            "lengths": self.lengths,
            "minima": self.minima,
            "argmin_words": [word_to_str(w) for w in self.argmin_words],
            "slope": self.slope,
            "intercept": self.intercept,
            "nondecreasing": self.nondecreasing,
            "s_min": self.s_min,
            "verdict": self.verdict,
            "label": self.label,
        }


def divergence_profile(rep: RepSpec, root_index: int = 1, radius: int = 8, s_min: float = 0.1,
                       workers: int = 1, mono_tol: float = 1e-9) -> DivergenceProfile:
    """Per-length minima of alpha(mu(rho(w))) with a least-squares slope."""
    if radius < 1:
        raise ValueError("empty ball")
    rd = rep.form.roots
    if not 1 <= root_index <= rd.simple_roots.shape[0]:
        raise IndexError(f"root index {root_index} invalid for type {rd.root_type}{rd.n}")
    alpha = rd.simple_roots[root_index - 1]
    lengths, minima, argmins = [], [], []
    for length, words, mats in _levels(rep, radius):
        mu = _chunked_map(lambda m: cartan_mu_batch(m, rep.form), mats, workers)
        vals = mu @ alpha
        i = int(np.argmin(vals))
        lengths.append(length)
        minima.append(float(vals[i]))
        argmins.append(words[i])
    slope, intercept = np.polyfit(lengths, minima, 1) if len(lengths) > 1 else (0.0, minima[0])
    mono = all(b >= a - mono_tol for a, b in zip(minima[1:], minima[2:]))
    return DivergenceProfile(radius, root_index, lengths, minima, argmins, float(slope), float(intercept), mono, s_min)


# ---------------------------------------------------------------- domination

def class_representatives(k: int, radius: int) -> list:
    """Cyclically reduced words up to radius, one per rotation class."""
    seen, out = set(), []
    for w in word_ball(k, radius).words:
        if is_cyclically_reduced(w):
            c = canonical_rotation(w)
            if c not in seen:
                seen.add(c)
                out.append(c)
    return out


@dataclass(frozen=True)
class DominationResult:
    radius: int
    weight_index: int
    c_hat: float
    witness: Word | None
    violations: list
    n_words: int

    @property
    def verdict(self) -> bool:
        return not self.violations and self.c_hat < 1.0

    @property
    def label(self) -> str:
        return ("dominates" if self.verdict else "does not dominate") + f" at radius {self.radius}"

    def as_dict(self) -> dict:
        return {
            "radius": self.radius,
            "weight_index": self.weight_index,
            "c_hat": self.c_hat,
            "witness": word_to_str(self.witness) if self.witness is not None else None,
            "violations": [word_to_str(w) for w in self.violations],
            "n_words": self.n_words,
            "verdict": "dominates" if self.verdict else "does not dominate",
            "label": self.label,
        }


def _weight_values(rep: RepSpec, words: list, index: int, workers: int) -> np.ndarray:
    mats = np.array([evaluate(rep, w) for w in words])
    lam = _chunked_map(lambda m: lyapunov_batch(m, rep.form), mats, workers)
    rd = rep.form.roots
    if not 1 <= index <= rd.fundamental_weights.shape[0]:
        raise IndexError(f"weight index {index} invalid for type {rd.root_type}{rd.n}")
    return lam @ rd.fundamental_weights[index - 1]


def domination_constant(repL: RepSpec, repR: RepSpec, weight_index: int = 1, radius: int = 6,
                        workers: int = 1, tol: Tolerances = DEFAULT) -> DominationResult:
    """c_hat = max over conjugacy-class representatives of omega(lambda(R w)) / omega(lambda(L w))."""
    if repL.rank_free != repR.rank_free:
        raise ValueError("representations of different free ranks")
    words = class_representatives(repL.rank_free, radius)
    if not words:
        raise ValueError("no nontrivial words")
    den = _weight_values(repL, words, weight_index, workers)
    num = _weight_values(repR, words, weight_index, workers)
    bad = den < tol.pos
    violations = [w for w, v in zip(words, bad) if v]
    ratios = np.where(bad, -np.inf, num / np.where(bad, 1.0, den))
    if np.all(bad):
        return DominationResult(radius, weight_index, float("nan"), None, violations, len(words))
    i = int(np.argmax(ratios))
    return DominationResult(radius, weight_index, float(ratios[i]), words[i], violations, len(words))


# ---------------------------------------------------------------- boundary points

@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    subspace: Subspace
    word: Word
    gap: float            # eigenvalue log-gap of rho(word)
    singular_gap: float   # log(sigma_d / sigma_{d+1}) of the final power
    power: int
    isotropy: float | None
    projected: bool = False

    @property
    def isotropic(self) -> bool | None:
        return None if self.isotropy is None else self.isotropy <= DEFAULT.rank


def _project_to_cone(u: np.ndarray, b: FormSpec, tol: float) -> np.ndarray | None:
    """One Newton step onto {b(u,u) = 0} for real-valued quadratic forms."""
    if b.kind not in ("symmetric", "hermitian") or not b.sesquilinear:
        return None
    G = b.gram
    for _ in range(3):
        val = float(np.real(np.conj(u.T) @ G @ u)[0, 0])
        Gu = G @ u
        u = u - val * Gu / (2 * np.real(np.conj(Gu.T) @ Gu)[0, 0])
        u = u / np.linalg.norm(u)
    return u


def boundary_point(rep: RepSpec, word, d: int = 1, tol: Tolerances = DEFAULT, project_tol: float = 1e-6) -> BoundaryPoint:
    """Attracting d-dimensional subspace of rho(word)."""
    w = free_reduce(tuple(word))
    if not w:
        raise ValueError("boundary_point needs a nontrivial word")
    f = rep.tag.factor
    N = rep.form.N
    if not 1 <= d < N:
        raise ValueError(f"subspace dimension {d} outside 1..{N - 1}")
    g = evaluate(rep, w)
    mods = np.sort(np.abs(np.linalg.eigvals(g)))[::-1][0::f] if f == 2 else np.sort(np.abs(np.linalg.eigvals(g)))[::-1]
    gap = float(np.log(mods[d - 1] / mods[d])) if mods[d] > 0 else np.inf
    if not gap * tol.m_max >= tol.gap_min:
        raise GapError(f"word {word_to_str(w)}: eigenvalue gap {gap:.3e} cannot reach {tol.gap_min:.3f} within m_max={tol.m_max}")
    target = max(tol.gap_min, 36.0)
    M = g / np.linalg.norm(g, 2)
    m = 1
    while True:
        U, s, _ = np.linalg.svd(M)
        sg = float(np.log(s[f * (d - 1)] / s[f * d])) if s[f * d] > 0 else np.inf
        if sg >= target or m >= tol.m_max:
            break
        M = M @ M
        M = M / np.linalg.norm(M, 2)
        m *= 2
    if sg < tol.gap_min:
        raise GapError(f"word {word_to_str(w)}: singular gap {sg:.3e} below {tol.gap_min:.3f} at power {m}")
    basis = U[:, : f * d]
    form = rep.form if isinstance(rep.form, FormSpec) else None
    W = Subspace.span(basis, rep.tag, form)
    iso, projected = None, False
    if form is not None:
        iso = isotropy_residual(W, form)
        if iso > tol.rank and d == 1 and iso <= project_tol:
            u = _project_to_cone(W.basis, form, tol.rank)
            if u is not None:
                W = Subspace.span(u, rep.tag, form)
                iso, projected = isotropy_residual(W, form), True
    return BoundaryPoint(W, w, gap, sg, m, iso, projected)


@dataclass(frozen=True, eq=False)
class LimitSetSample:
    points: list
    gaps: list
    source_words: list
    d: int
    warnings: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def transported(self, g: np.ndarray) -> "LimitSetSample":
        pts = [p.transform(g) for p in self.points]
        return LimitSetSample(pts, list(self.gaps), list(self.source_words), self.d, list(self.warnings))

    def extended(self, extra: list) -> "LimitSetSample":
        return LimitSetSample(self.points + list(extra), self.gaps + [np.nan] * len(extra),
                              self.source_words + [None] * len(extra), self.d, list(self.warnings))


def _dedup(points: list, eps: float) -> list:
    keep: list[int] = []
    stack = None
    for i, p in enumerate(points):
        B = p.basis
        if stack is not None:
            # residual of B against each kept subspace, batched for lines
            if B.shape[1] == 1 or (p.tag is ScalarTag.H and B.shape[1] == 2):
                ov = np.abs(np.einsum("kij,jl->kil", np.conj(np.transpose(stack, (0, 2, 1))), B))
                res = np.sqrt(np.maximum(0.0, 1.0 - np.sum(ov[:, :, 0] ** 2, axis=1)))
                close = bool(np.any(res < eps))
            else:
                close = any(points[j].distance(p) < eps for j in keep)
            if close:
                continue
        keep.append(i)
        stack = B[None] if stack is None else np.concatenate([stack, B[None]])
    return [points[i] for i in keep]


def limit_set(rep: RepSpec, radius: int, d: int = 1, workers: int = 1, tol: Tolerances = DEFAULT,
              check_divergence: bool = True) -> LimitSetSample:
    """Attracting subspaces of all cyclically reduced words up to radius, deduplicated."""
    notes = []
    if check_divergence and isinstance(rep.form, FormSpec) and rep.form.roots.simple_roots.shape[0] >= d:
        prof = divergence_profile(rep, d, radius)
        if not prof.verdict:
            notes.append(f"representation is {prof.label} for root {d}")
    words = [w for w in word_ball(rep.rank_free, radius).words if is_cyclically_reduced(w)]

    def one(w):
        try:
            return boundary_point(rep, w, d, tol)
        except GapError as exc:
            return str(exc)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, words))
    else:
        results = [one(w) for w in words]
    good = [r for r in results if isinstance(r, BoundaryPoint)]
    errors = [r for r in results if isinstance(r, str)]
    if errors:
        notes.append(f"{len(errors)} words skipped for insufficient eigenvalue gap (first: {errors[0]})")
    for r in good:
        if r.isotropic is False:
            notes.append(f"word {word_to_str(r.word)}: boundary point not isotropic (residual {r.isotropy:.2e})")
    by_id = {id(r.subspace): r for r in good}
    kept = _dedup([r.subspace for r in good], tol.dedup)
    meta = [by_id[id(p)] for p in kept]
    for n in notes:
        warnings.warn(n, RuntimeWarning, stacklevel=2)
    return LimitSetSample(kept, [m.gap for m in meta], [m.word for m in meta], d, notes)
