"""Walsh-Hadamard code-division spreading across OFDM subcarriers.

A codebook is Nc x NC with orthonormal columns. Hadamard books hold +-1/sqrt(Nc)
entries (Sylvester construction, Nc a power of two); the identity book is plain
OFDM (one code channel per subcarrier). An odd number of selected Hadamard
channels guarantees the spread vector C d has no zero entry for any QAM input,
which keeps the radar reference division well defined; even NC admits exact
cancellations, and check_zero_free exhibits them.
"""

from dataclasses import dataclass, field

import numpy as np

from .constellation import QamConstellation

# spread entries of a true zero cancel exactly in float arithmetic; anything
# below this is a zero (min nonzero entry is a/(2 sqrt(Nc)) ~ 5e-3 at Nc=1024)
ZERO_TOL = 1e-9


def build_hadamard(nc: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order nc (power of two), +-1 entries."""
    if nc < 1 or nc & (nc - 1):
        raise ValueError(f"Hadamard order must be a power of two, got {nc}")
    h = np.ones((1, 1))
    while h.shape[0] < nc:
        h = np.block([[h, h], [h, -h]])
    return h


@dataclass(frozen=True)
class CodeBook:
    nc: int
    columns: tuple           # selected channel indices
    matrix: np.ndarray = field(repr=False)  # Nc x NC, orthonormal columns
    kind: str = "hadamard"   # "hadamard" | "identity"

    @property
    def n_channels(self) -> int:
        return len(self.columns)

    @property
    def norm_factor(self) -> float:
        # identity books are plain OFDM: no 1/sqrt(NC) transmit normalization
        return 1.0 if self.kind == "identity" else 1.0 / np.sqrt(self.n_channels)


def make_codebook(nc: int, n_channels: int = None, kind: str = "hadamard",
                  columns=None) -> CodeBook:
    """Build a codebook selecting `n_channels` columns (default: 0..NC-1)."""
    if kind not in ("hadamard", "identity"):
        raise ValueError(f"unknown codebook kind {kind!r}")
    if kind == "identity":
        if n_channels is None:
            n_channels = nc
        if columns is None:
            columns = range(n_channels)
        columns = tuple(int(c) for c in columns)
        if len(set(columns)) != len(columns):
            raise ValueError("duplicate code channel indices")
        if any(not 0 <= c < nc for c in columns):
            raise ValueError("code channel index out of range")
        mat = np.zeros((nc, len(columns)))
        mat[list(columns), np.arange(len(columns))] = 1.0
        return CodeBook(nc=nc, columns=columns, matrix=mat, kind="identity")
    if n_channels is None and columns is None:
        raise ValueError("n_channels or columns required")
    if columns is None:
        columns = range(n_channels)
    columns = tuple(int(c) for c in columns)
    if len(columns) == 0:
        raise ValueError("at least one code channel required")
    if len(set(columns)) != len(columns):
        raise ValueError("duplicate code channel indices")
    if any(not 0 <= c < nc for c in columns):
        raise ValueError("code channel index out of range")
    had = build_hadamard(nc)
    mat = had[:, list(columns)] / np.sqrt(nc)
    return CodeBook(nc=nc, columns=columns, matrix=mat, kind="hadamard")


def spread(book: CodeBook, d: np.ndarray) -> np.ndarray:
    """C d: map NC code-channel symbols (or an NC x Ms block) onto Nc subcarriers."""
    d = np.asarray(d)
    if d.shape[0] != book.n_channels:
        raise ValueError(f"expected leading dim {book.n_channels}, got {d.shape}")
    return book.matrix @ d


def despread(book: CodeBook, y: np.ndarray) -> np.ndarray:
    """C^H y: project Nc subcarrier symbols back onto the code channels."""
    y = np.asarray(y)
    if y.shape[0] != book.nc:
        raise ValueError(f"expected leading dim {book.nc}, got {y.shape}")
    return book.matrix.conj().T @ y


@dataclass
class ZeroFreeReport:
    nc: int
    n_channels: int
    qam_order: int
    mode: str                # "exhaustive" | "randomized"
    trials: int              # symbol-vector/entry evaluations performed
    zero_free: bool
    certified: bool          # True only after a complete exhaustive pass
    min_abs_entry: float
    witness: tuple = None    # (symbol indices per channel, row) for a found zero
    theorem_predicts_zero_free: bool = True

    def summary(self) -> str:
        s = (f"Nc={self.nc} NC={self.n_channels} M={self.qam_order} [{self.mode}] "
             f"trials={self.trials} zero_free={self.zero_free} "
             f"min|entry|={self.min_abs_entry:.3e}")
        if self.witness is not None:
            s += f" witness: d-indices={list(self.witness[0])} row={self.witness[1]}"
        if self.certified:
            s += " (certified by enumeration)"
        return s


EXHAUSTIVE_BUDGET = 10_000_000


def check_zero_free(book: CodeBook, const: QamConstellation, mode: str = "exhaustive",
                    trials: int = 1_000_000, rng: np.random.Generator = None,
                    chunk: int = 1 << 15) -> ZeroFreeReport:
    """Search for QAM inputs whose spread vector has a zero entry.

    Exhaustive mode enumerates all M^NC symbol vectors (refused above
    EXHAUSTIVE_BUDGET combinations); randomized mode samples `trials`
    (symbol-vector, row) pairs. Odd NC is zero-free by construction, so the
    exhaustive pass certifies it and the randomized pass reports the observed
    minimum entry magnitude.
    """
    m = const.order
    nch = book.n_channels
    odd = nch % 2 == 1
    if mode == "exhaustive":
        total = m ** nch
        if total > EXHAUSTIVE_BUDGET:
            raise ValueError(
                f"exhaustive search needs {total} combinations, over the "
                f"{EXHAUSTIVE_BUDGET} budget; use mode='randomized'")
        ct = book.matrix.T.copy()  # NC x Nc
        min_abs = np.inf
        witness = None
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total))
            digits = (idx[:, None] // m ** np.arange(nch)[None, :]) % m
            symbols = const.points[digits]           # (chunk, NC)
            entries = symbols @ ct                   # (chunk, Nc)
            mags = np.abs(entries)
            cmin = mags.min()
            if cmin < min_abs:
                min_abs = cmin
            if witness is None and cmin < ZERO_TOL:
                flat = int(np.argmin(mags))
                row = flat % book.nc
                witness = (tuple(int(v) for v in digits[flat // book.nc]), row)
        zero_free = witness is None
        return ZeroFreeReport(nc=book.nc, n_channels=nch, qam_order=m,
                              mode="exhaustive", trials=total, zero_free=zero_free,
                              certified=True, min_abs_entry=float(min_abs),
                              witness=witness, theorem_predicts_zero_free=odd)
    if mode != "randomized":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("randomized mode needs an rng")
    ct = book.matrix
    min_abs = np.inf
    witness = None
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        digits = rng.integers(0, m, size=(n, nch))
        rows = rng.integers(0, book.nc, size=n)
        symbols = const.points[digits]
        entries = np.einsum("ij,ij->i", symbols, ct[rows, :])
        mags = np.abs(entries)
        cmin = mags.min()
        if cmin < min_abs:
            min_abs = cmin
        if witness is None and cmin < ZERO_TOL:
            k = int(np.argmin(mags))
            witness = (tuple(int(v) for v in digits[k]), int(rows[k]))
        done += n
    return ZeroFreeReport(nc=book.nc, n_channels=nch, qam_order=m,
                          mode="randomized", trials=trials,
                          zero_free=witness is None, certified=False,
                          min_abs_entry=float(min_abs), witness=witness,
                          theorem_predicts_zero_free=odd)


def random_symbols(const: QamConstellation, rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform random constellation symbols (helper for simulation and checks)."""
    idx = rng.integers(0, const.order, size=shape)
    return const.points[idx]
