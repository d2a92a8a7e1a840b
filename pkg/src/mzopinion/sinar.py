"""Sparse identification of nonlinear autoregressive (NAR) models.

The pipeline is

    trajectories --build_hankel--> (X~, X') --fit--> NarModel --rollout--> forecast

Delay vectors are stacked newest-first, ``x~_t = [x_t; x_{t-1}; ...;
x_{t-p+1}]``. A dictionary is an ordered list of monomials, each touching a
single delay, optionally preceded by a constant term.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lasso import lasso_solve

ZERO_THRESHOLD = 1e-8


class RankDeficientWarning(UserWarning):
    """Least-squares fit on a rank-deficient feature matrix (minimum-norm solution used)."""


class DivergenceError(RuntimeError):
    """A rollout produced a non-finite state."""

    def __init__(self, msg, step, partial):
        super().__init__(msg)
        self.step = step
        self.partial = partial


# ---------------------------------------------------------------- dictionary

@dataclass(frozen=True)
class Term:
    delay: int
    exponents: tuple

    @property
    def degree(self) -> int:
        return int(sum(self.exponents))


@dataclass(frozen=True)
class DictionarySpec:
    """Ordered delay-structured monomial dictionary.

    Feature order is: the constant (if any), then ``terms`` in the given
    order. Terms must be delay-major (non-decreasing delay).
    """

    m_dims: int
    max_delay: int
    terms: tuple
    constant: bool = False
    _index: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m_dims < 1 or self.max_delay < 1:
            raise ValueError("m_dims and max_delay must be >= 1")
        terms = tuple(Term(int(t.delay), tuple(int(e) for e in t.exponents))
                      if isinstance(t, Term) else Term(int(t[0]), tuple(int(e) for e in t[1]))
                      for t in self.terms)
        object.__setattr__(self, "terms", terms)
        last = 0
        for t in terms:
            if not 0 <= t.delay < self.max_delay:
                raise ValueError(f"term delay {t.delay} outside 0..{self.max_delay - 1}")
            if len(t.exponents) != self.m_dims or min(t.exponents) < 0:
                raise ValueError(f"bad exponent vector {t.exponents}")
            if t.degree == 0:
                raise ValueError("use constant=True instead of a zero-degree term")
            if t.delay < last:
                raise ValueError("terms must be ordered delay-major")
            last = t.delay
        # Factor index table: each row lists the positions in the padded
        # delay vector whose product is the feature; pad slot holds 1.0.
        pad = self.m_dims * self.max_delay
        rows = ([[]] if self.constant else []) + [
            [t.delay * self.m_dims + j for j, e in enumerate(t.exponents) for _ in range(e)]
            for t in terms]
        width = max([len(r) for r in rows] + [1])
        index = np.full((len(rows), width), pad, dtype=np.int64)
        for i, r in enumerate(rows):
            index[i, :len(r)] = r
        object.__setattr__(self, "_index", index)

    @property
    def n_terms(self) -> int:
        return len(self.terms) + int(self.constant)

    def evaluate(self, Xtilde) -> np.ndarray:
        """Features of delay vectors: (m*p, n) -> (v, n), or (m*p,) -> (v,)."""
        X = np.asarray(Xtilde, dtype=float)
        single = X.ndim == 1
        if single:
            X = X[:, None]
        if X.shape[0] != self.m_dims * self.max_delay:
            raise ValueError(f"delay vectors have {X.shape[0]} rows, dictionary "
                             f"expects {self.m_dims * self.max_delay}")
        padded = np.vstack([X, np.ones((1, X.shape[1]))])
        theta = np.prod(padded[self._index], axis=1)
        return theta[:, 0] if single else theta

    def labels(self, names=None) -> list:
        names = names or [f"x{j + 1}" for j in range(self.m_dims)]
        out = ["1"] if self.constant else []
        for t in self.terms:
            when = "t" if t.delay == 0 else f"t-{t.delay}"
            parts = []
            for j, e in enumerate(t.exponents):
                if e:
                    parts.append(f"{names[j]}[{when}]" + (f"^{e}" if e > 1 else ""))
            out.append("*".join(parts))
        return out

    def per_delay_counts(self) -> list:
        return [sum(t.delay == k for t in self.terms) for k in range(self.max_delay)]

    def to_dict(self) -> dict:
        return {"m": self.m_dims, "p": self.max_delay, "constant": self.constant,
                "terms": [{"delay": t.delay, "exponents": list(t.exponents)}
                          for t in self.terms]}

    @classmethod
    def from_dict(cls, d) -> "DictionarySpec":
        return cls(int(d["m"]), int(d["p"]),
                   tuple(Term(t["delay"], tuple(t["exponents"])) for t in d["terms"]),
                   bool(d.get("constant", False)))


def _monomials(m: int, degree: int) -> list:
    """Exponent vectors of total degree 1..degree; graded, pure powers first."""
    out = []
    for d in range(1, degree + 1):
        pure = [tuple(d if i == j else 0 for i in range(m)) for j in range(m)]
        mixed = []

        def rec(prefix, left):
            if len(prefix) == m - 1:
                mixed.append(tuple(prefix + [left]))
                return
            for e in range(left, -1, -1):
                rec(prefix + [e], left - e)
        rec([], d)
        out += pure + [e for e in mixed if e not in pure]
    return out


def polynomial_dictionary(m: int, p: int, degree: int = 2, constant: bool = False):
    """Same monomial set at every delay 0..p-1 (no cross-delay products)."""
    if p < 1:
        raise ValueError("memory depth p must be >= 1")
    mons = _monomials(m, degree)
    return DictionarySpec(m, p, tuple(Term(k, e) for k in range(p) for e in mons), constant)


def opinion_dictionary(p: int) -> DictionarySpec:
    """``x1, x2, x1^2, x2^2, x1*x2`` at each delay (5p terms)."""
    return polynomial_dictionary(2, p, degree=2)


def linear_dictionary(m: int, p: int) -> DictionarySpec:
    return polynomial_dictionary(m, p, degree=1)


def henon_dictionary(p: int) -> DictionarySpec:
    """``[1, x_t^2, x_t, x_{t-1}, ..., x_{t-p+1}]`` (p+2 terms)."""
    if p < 1:
        raise ValueError("memory depth p must be >= 1")
    terms = [Term(0, (2,)), Term(0, (1,))] + [Term(k, (1,)) for k in range(1, p)]
    return DictionarySpec(1, p, tuple(terms), constant=True)


# -------------------------------------------------------------------- Hankel

@dataclass(frozen=True)
class HankelData:
    Xtilde: np.ndarray  # (m*p, n), newest block first
    Xprime: np.ndarray  # (m, n)
    source: np.ndarray  # (n,) trajectory index of each column
    p: int

    @property
    def n_samples(self) -> int:
        return self.Xprime.shape[1]


def _as_traj(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def build_hankel(trajectories, p: int) -> HankelData:
    """Stack delay windows of each trajectory (time along axis 0) side by side."""
    if p < 1:
        raise ValueError("memory depth p must be >= 1")
    if isinstance(trajectories, np.ndarray) and trajectories.ndim <= 2:
        trajectories = [trajectories]
    Xt, Xp, src = [], [], []
    m = None
    for i, traj in enumerate(trajectories):
        x = _as_traj(traj)
        if m is None:
            m = x.shape[1]
        elif x.shape[1] != m:
            raise ValueError(f"trajectory {i} has dimension {x.shape[1]}, expected {m}")
        T = x.shape[0] - 1
        if T < p:
            raise ValueError(f"trajectory {i} has {T + 1} states; memory depth {p} "
                             f"needs at least {p + 1}")
        Xt.append(np.vstack([x[p - 1 - k:T - k].T for k in range(p)]))
        Xp.append(x[p:].T)
        src.append(np.full(T - p + 1, i))
    if not Xt:
        raise ValueError("no trajectories given")
    return HankelData(np.hstack(Xt), np.hstack(Xp), np.concatenate(src), p)


# --------------------------------------------------------------------- model

@dataclass(frozen=True)
class NarModel:
    dictionary: DictionarySpec
    xi: np.ndarray  # (m, v)
    lam: float
    noise_cov: np.ndarray | None = None
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def p(self) -> int:
        return self.dictionary.max_delay

    @property
    def m(self) -> int:
        return self.dictionary.m_dims

    @property
    def constant_column(self):
        return self.xi[:, 0].copy() if self.dictionary.constant else None

    def nonzero(self) -> np.ndarray:
        return self.xi != 0.0


def stlsq_solve(A, y, threshold: float, max_iter: int = 100) -> np.ndarray:
    """Sequentially thresholded least squares for one output row.

    Least squares on all features, then repeatedly zero every coefficient with
    magnitude below ``threshold`` and refit the survivors, until the active
    set stops changing.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    w = np.linalg.lstsq(A.T, y, rcond=None)[0]
    active = np.abs(w) >= threshold
    for _ in range(max_iter):
        w = np.zeros(A.shape[0])
        if active.any():
            w[active] = np.linalg.lstsq(A[active].T, y, rcond=None)[0]
        new_active = np.abs(w) >= threshold
        if np.array_equal(new_active, active):
            break
        active = new_active
    w[~active] = 0.0
    return w


FIT_METHODS = ("stlsq", "lasso")


def fit(data: HankelData, dictionary: DictionarySpec, lam: float,
        method: str = "stlsq", zero_threshold: float = ZERO_THRESHOLD) -> NarModel:
    """Row-wise sparse regression of ``X'`` on dictionary features of ``X~``.

    ``lam == 0`` is plain minimum-norm least squares for every method; a
    :class:`RankDeficientWarning` is emitted when the features lack full row
    rank, and no coefficients are snapped to zero. For ``lam > 0``, entries
    below ``zero_threshold`` are set to exactly 0 and the solver is:

    ``method="stlsq"``
        sequential thresholding: coefficients with ``|w| < lam`` are dropped
        and the rest refitted (:func:`stlsq_solve`).
    ``method="lasso"``
        coordinate-descent LASSO with penalty ``lam * n`` on the summed
        squared error (:func:`~mzopinion.lasso.lasso_solve`).
    """
    if method not in FIT_METHODS:
        raise ValueError(f"unknown fit method {method!r}; choose from {FIT_METHODS}")
    if lam < 0 or not np.isfinite(lam):
        raise ValueError("lambda must be a finite non-negative number")
    if dictionary.m_dims * dictionary.max_delay != data.Xtilde.shape[0]:
        raise ValueError("dictionary depth/dimension does not match the Hankel data")
    theta = dictionary.evaluate(data.Xtilde)
    m, n = data.Xprime.shape
    meta = {"method": method, "n_samples": int(n), "zero_threshold": zero_threshold}
    if method == "lasso":
        meta["penalty"] = "lam*n*||w||_1 on summed squared error"
    if lam == 0:
        xi, _, rank, _ = np.linalg.lstsq(theta.T, data.Xprime.T, rcond=None)
        xi = xi.T
        meta["solver"] = "lstsq"
        meta["rank"] = int(rank)
        if rank < theta.shape[0]:
            warnings.warn(f"feature matrix has rank {rank} < {theta.shape[0]} terms; "
                          "using the minimum-norm least-squares solution",
                          RankDeficientWarning, stacklevel=2)
    elif method == "stlsq":
        xi = np.vstack([stlsq_solve(theta, data.Xprime[i], lam) for i in range(m)])
        meta["solver"] = "stlsq"
    else:
        xi = np.vstack([lasso_solve(theta, data.Xprime[i], lam) for i in range(m)])
        meta["solver"] = "coordinate-descent"
    if lam > 0:
        # plain least squares keeps tiny genuine coefficients (e.g. deep memory terms)
        xi = np.where(np.abs(xi) < zero_threshold, 0.0, xi)
    model = NarModel(dictionary, xi, float(lam), None, meta)
    if n >= 2:
        model = NarModel(dictionary, xi, float(lam),
                         estimate_noise_covariance(model, data), meta)
    return model


def residuals(model: NarModel, data: HankelData) -> np.ndarray:
    return data.Xprime - model.xi @ model.dictionary.evaluate(data.Xtilde)


def estimate_noise_covariance(model: NarModel, data: HankelData) -> np.ndarray:
    """Unbiased sample covariance (divisor n-1) of the one-step residuals."""
    if data.n_samples < 2:
        raise ValueError("need at least two residuals to estimate a covariance")
    r = residuals(model, data)
    return np.atleast_2d(np.cov(r, ddof=1))


def predict_one_step(model: NarModel, history) -> np.ndarray:
    """Next state from the ``p`` most recent states, newest first, shape (p, m)."""
    h = np.asarray(history, dtype=float)
    if h.ndim == 1 and model.m == 1:
        h = h[:, None]
    if h.shape != (model.p, model.m):
        raise ValueError(f"history must have shape {(model.p, model.m)}, got {h.shape}")
    return model.xi @ model.dictionary.evaluate(h.reshape(-1))


def rollout(model: NarModel, seed, steps: int) -> np.ndarray:
    """Iterate the model ``steps`` times.

    ``seed`` holds the last ``p`` observed states in chronological order,
    shape (p, m). Returns the (steps, m) predicted states.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    s = np.asarray(seed, dtype=float)
    if s.ndim == 1 and model.m == 1:
        s = s[:, None]
    p, m = model.p, model.m
    if s.shape != (p, m):
        raise ValueError(f"seed must have shape {(p, m)}, got {s.shape}")
    # window[0] is the newest state
    window = s[::-1].reshape(-1).copy()
    out = np.empty((steps, m))
    d, xi = model.dictionary, model.xi
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(steps):
            nxt = xi @ d.evaluate(window)
            if not np.all(np.isfinite(nxt)):
                raise DivergenceError(f"rollout diverged at step {t}", t, out[:t].copy())
            out[t] = nxt
            window[m:] = window[:-m]
            window[:m] = nxt
    return out


def coefficients_as_blocks(model: NarModel) -> list:
    """Split ``xi`` into per-delay blocks ``[H_0, ..., H_{p-1}]``.

    The constant column, if present, is excluded (see ``constant_column``).
    """
    counts = model.dictionary.per_delay_counts()
    if len(set(counts)) != 1:
        raise NotImplementedError(f"per-delay term counts differ ({counts})")
    k = counts[0]
    off = int(model.dictionary.constant)
    return [model.xi[:, off + i * k: off + (i + 1) * k].copy() for i in range(model.p)]


def format_model(model: NarModel, names=None, digits: int = 4) -> str:
    """Fitted equations as readable polynomials, zero terms omitted."""
    names = names or [f"x{j + 1}" for j in range(model.m)]
    labels = model.dictionary.labels(names)
    lines = []
    for i in range(model.m):
        parts = []
        for coef, lab in zip(model.xi[i], labels):
            if coef == 0:
                continue
            mag = f"{abs(coef):.{digits}f}"
            body = mag if lab == "1" else f"{mag} {lab}"
            sign = "-" if coef < 0 else "+"
            parts.append(f"{sign} {body}" if parts else (f"-{body}" if coef < 0 else body))
        lines.append(f"{names[i]}[t+1] = " + (" ".join(parts) if parts else "0"))
    return "\n".join(lines)


# ------------------------------------------------------------- serialization

def model_to_dict(model: NarModel) -> dict:
    return {
        "format": "nar-model",
        "version": 1,
        "m": model.m,
        "p": model.p,
        "lambda": model.lam,
        "dictionary": model.dictionary.to_dict(),
        "xi": model.xi.tolist(),
        "noise_cov": None if model.noise_cov is None else model.noise_cov.tolist(),
        "metadata": model.metadata,
    }


def model_from_dict(d) -> NarModel:
    if d.get("format") != "nar-model":
        raise ValueError("not a serialized NAR model")
    cov = d.get("noise_cov")
    return NarModel(DictionarySpec.from_dict(d["dictionary"]),
                    np.array(d["xi"], dtype=float), float(d["lambda"]),
                    None if cov is None else np.array(cov, dtype=float),
                    dict(d.get("metadata", {})))


def save_model(model: NarModel, path) -> None:
    """JSON text; floats are written with shortest round-trip repr."""
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1))


def load_model(path) -> NarModel:
    return model_from_dict(json.loads(Path(path).read_text()))
