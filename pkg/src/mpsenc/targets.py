"""Target-state construction.

Builds the MPS targets consumed by the encoders: univariate functions
discretised on uniform grids, grayscale images flattened row by row, and
seeded random MPS ensembles.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import FormatError, InvalidInputError, ShapeError
from .mps import MPS, _as_cores, mps_from_statevector, truncate
from .validation import check_chi, check_threshold

DENSE_QUBIT_CAP = 24

LOG_SHIFT_EPS = 1e-6


def _is_power_of_two(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


# ---------------------------------------------------------------------------
# Function families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionFamily:
    """A named univariate function with frozen parameters.

    Instances are callable on scalar or vectorized grid points. Seeded
    families freeze their coefficients at construction time, so the same
    (name, params, seed) always evaluates identically.
    """

    name: str
    params: dict = field(default_factory=dict)
    _fn: callable = field(repr=False, default=None)

    def __call__(self, x):
        return self._fn(np.asarray(x, dtype=np.float64))

    def describe(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"


def _interval_edges(domain, intervals):
    a, b = domain
    return np.linspace(a, b, intervals + 1)


def _local_coordinate(x, lo, hi):
    # map [lo, hi] -> [-1, 1]
    return 2.0 * (x - lo) / (hi - lo) - 1.0


def _piecewise_eval(x, edges, piece_fns):
    idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(piece_fns) - 1)
    out = np.empty_like(x, dtype=np.float64)
    for i, fn in enumerate(piece_fns):
        mask = idx == i
        if np.any(mask):
            out[mask] = fn(x[mask])
    return out


def make_family(name: str, domain=(-1.0, 1.0), **params) -> FunctionFamily:
    """Build a function family by name.

    Known names: gaussian, cauchy, sine, cosine, linear, abs, heaviside,
    modulo, root, log-shifted, exp, polynomial, uniform-roots-poly,
    cubic-spline, piecewise-poly, piecewise-chebyshev, sine-reciprocal,
    hockey-stick.
    """
    key = name.lower().replace("_", "-")
    a, b = float(domain[0]), float(domain[1])
    if not a < b:
        raise InvalidInputError(f"domain must satisfy a < b, got [{a}, {b}]")

    if key == "gaussian":
        sigma = float(params.pop("sigma", 0.3))
        fn = lambda x: np.exp(-(x ** 2) / (2.0 * sigma ** 2))
        out_params = {"sigma": sigma}
    elif key == "cauchy":
        gamma = float(params.pop("gamma", 0.5))
        fn = lambda x: gamma / (np.pi * (x ** 2 + gamma ** 2))
        out_params = {"gamma": gamma}
    elif key == "sine":
        k = float(params.pop("k", 1.0))
        fn = lambda x: np.sin(k * np.pi * x)
        out_params = {"k": k}
    elif key == "cosine":
        k = float(params.pop("k", 1.0))
        fn = lambda x: np.cos(k * np.pi * x)
        out_params = {"k": k}
    elif key == "linear":
        fn = lambda x: x
        out_params = {}
    elif key == "abs":
        fn = np.abs
        out_params = {}
    elif key == "heaviside":
        fn = lambda x: (x >= 0.0).astype(np.float64)
        out_params = {}
    elif key == "modulo":
        fn = lambda x: np.mod(x / 2.0, 1.0)
        out_params = {}
    elif key == "root":
        fn = lambda x: np.sqrt(np.maximum(x + 1.0, 0.0))
        out_params = {}
    elif key == "log-shifted":
        eps = float(params.pop("eps", LOG_SHIFT_EPS))
        fn = lambda x: np.log10(x + 1.0 + eps)
        out_params = {"eps": eps}
    elif key == "exp":
        fn = np.exp
        out_params = {}
    elif key == "sine-reciprocal":
        fn = lambda x: np.sin(1.0 / np.where(x == 0.0, np.finfo(float).tiny, x))
        out_params = {}
    elif key == "hockey-stick":
        strike = float(params.pop("strike", 0.0))
        fn = lambda x: np.maximum(0.0, x - strike)
        out_params = {"strike": strike}
    elif key == "polynomial":
        coeffs = np.asarray(params.pop("coeffs"), dtype=np.float64)
        if coeffs.size == 0:
            raise InvalidInputError("polynomial needs at least one coefficient")
        fn = lambda x: np.polynomial.polynomial.polyval(x, coeffs)
        out_params = {"coeffs": tuple(coeffs.tolist())}
    elif key == "uniform-roots-poly":
        degree = int(params.pop("degree"))
        seed = int(params.pop("seed", 0))
        if degree < 1:
            raise InvalidInputError("degree must be >= 1")
        rng = np.random.default_rng(seed)
        roots = np.sort(rng.uniform(a, b, size=degree))
        fn = lambda x: np.prod(x[..., None] - roots, axis=-1)
        out_params = {"degree": degree, "seed": seed}
    elif key == "cubic-spline":
        knots = int(params.pop("knots"))
        seed = int(params.pop("seed", 0))
        if knots < 2:
            raise InvalidInputError("cubic-spline needs at least 2 knots")
        rng = np.random.default_rng(seed)
        if knots == 2:
            xs = np.array([a, b])
        else:
            interior = np.sort(rng.uniform(a, b, size=knots - 2))
            xs = np.concatenate([[a], interior, [b]])
        # nudge duplicates apart so the spline stays well defined
        for i in range(1, len(xs)):
            if xs[i] <= xs[i - 1]:
                xs[i] = np.nextafter(xs[i - 1], b)
        ys = rng.uniform(-1.0, 1.0, size=knots)
        spline = CubicSpline(xs, ys, bc_type="natural")
        fn = spline
        out_params = {"knots": knots, "seed": seed}
    elif key in ("piecewise-poly", "piecewise-chebyshev"):
        intervals = int(params.pop("intervals"))
        degree = int(params.pop("degree"))
        seed = int(params.pop("seed", 0))
        discontinuous = bool(params.pop("discontinuous", True))
        if intervals < 1 or degree < 0:
            raise InvalidInputError("need intervals >= 1 and degree >= 0")
        rng = np.random.default_rng(seed)
        edges = _interval_edges((a, b), intervals)
        coeff_table = rng.uniform(-1.0, 1.0, size=(intervals, degree + 1))
        if key == "piecewise-chebyshev":
            def _piece(i):
                lo, hi = edges[i], edges[i + 1]
                c = coeff_table[i]
                return lambda x: np.polynomial.chebyshev.chebval(
                    _local_coordinate(x, lo, hi), c
                )
        else:
            if not discontinuous:
                # chain the constant terms so pieces join at the edges
                for i in range(1, intervals):
                    left_end = np.polynomial.polynomial.polyval(
                        1.0, coeff_table[i - 1]
                    )
                    right_start = np.polynomial.polynomial.polyval(
                        -1.0, coeff_table[i]
                    )
                    coeff_table[i, 0] += left_end - right_start

            def _piece(i):
                lo, hi = edges[i], edges[i + 1]
                c = coeff_table[i]
                return lambda x: np.polynomial.polynomial.polyval(
                    _local_coordinate(x, lo, hi), c
                )

        piece_fns = [_piece(i) for i in range(intervals)]
        fn = lambda x: _piecewise_eval(np.atleast_1d(x), edges, piece_fns)
        out_params = {
            "intervals": intervals,
            "degree": degree,
            "seed": seed,
            "discontinuous": discontinuous,
        }
    else:
        raise InvalidInputError(f"unknown function family {name!r}")

    if params:
        raise InvalidInputError(f"unused parameters for {name!r}: {sorted(params)}")
    return FunctionFamily(name=key, params=out_params, _fn=fn)


def chebyshev_family(intervals: int, degree: int, seed: int = 0,
                     domain=(-1.0, 1.0)) -> FunctionFamily:
    """Shorthand for the piecewise Chebyshev family Cheby(intervals, degree)."""
    return make_family(
        "piecewise-chebyshev", domain=domain,
        intervals=intervals, degree=degree, seed=seed,
    )


# ---------------------------------------------------------------------------
# Target specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TargetSpec:
    """Declarative description of a target state.

    kind is one of "function", "image", "random-mps". Normalization is
    always L2 when the target is materialized.
    """

    kind: str
    n_qubits: int
    family: FunctionFamily | None = None
    domain: tuple = (-1.0, 1.0)
    pixels: np.ndarray | None = field(default=None, repr=False)
    chi: int | None = None
    seed: int | None = None

    @classmethod
    def function(cls, family, n_qubits: int, domain=(-1.0, 1.0), **params):
        if isinstance(family, str):
            family = make_family(family, domain=domain, **params)
        elif params:
            raise InvalidInputError("parameters only allowed with a family name")
        a, b = float(domain[0]), float(domain[1])
        if not a < b:
            raise InvalidInputError(f"domain must satisfy a < b, got [{a}, {b}]")
        if n_qubits < 1:
            raise InvalidInputError("n_qubits must be >= 1")
        return cls(kind="function", n_qubits=int(n_qubits), family=family,
                   domain=(a, b))

    @classmethod
    def image(cls, pixels):
        pixels = np.asarray(pixels, dtype=np.float64)
        if pixels.ndim != 2 or pixels.shape[0] != pixels.shape[1]:
            raise ShapeError(f"image must be square, got shape {pixels.shape}")
        side = pixels.shape[0]
        if not _is_power_of_two(side):
            raise ShapeError(
                f"image side must be a power of two, got {side}; "
                "pad or crop the image (no silent resampling is done)"
            )
        if np.min(pixels) < -1e-12 or np.max(pixels) > 1.0 + 1e-12:
            raise InvalidInputError("pixel values must lie in [0, 1]")
        n_qubits = 2 * (side.bit_length() - 1)
        return cls(kind="image", n_qubits=n_qubits,
                   pixels=np.clip(pixels, 0.0, 1.0))

    @classmethod
    def random(cls, n_qubits: int, chi: int, seed: int):
        chi = check_chi(chi, name="chi")
        return cls(kind="random-mps", n_qubits=int(n_qubits), chi=chi,
                   seed=int(seed))

    def describe(self) -> str:
        if self.kind == "function":
            return f"{self.family.describe()} on [{self.domain[0]},{self.domain[1]}] n={self.n_qubits}"
        if self.kind == "image":
            side = self.pixels.shape[0]
            return f"image {side}x{side} n={self.n_qubits}"
        return f"random-mps chi={self.chi} seed={self.seed} n={self.n_qubits}"


def discretise(spec: TargetSpec, dense_cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
    """Sample a function target on the uniform grid and L2-normalize.

    Grid points are x_j = a + j (b - a) / (N - 1), j = 0..N-1 with
    N = 2^n, so both endpoints are always included.
    """
    if spec.kind != "function":
        raise InvalidInputError(f"discretise expects a function target, got {spec.kind}")
    if spec.n_qubits > dense_cap:
        raise InvalidInputError(
            f"dense discretisation capped at {dense_cap} qubits; "
            "use the cross-interpolation builder for larger grids"
        )
    a, b = spec.domain
    n = 2 ** spec.n_qubits
    x = a + (b - a) * np.arange(n, dtype=np.float64) / (n - 1)
    values = np.asarray(spec.family(x), dtype=np.float64).reshape(n)
    norm = np.linalg.norm(values)
    if norm == 0.0 or not np.isfinite(norm):
        raise InvalidInputError(
            f"target {spec.family.describe()} has zero or non-finite norm"
        )
    return values / norm


def grid_points(spec: TargetSpec) -> np.ndarray:
    """The uniform grid a function target is sampled on."""
    a, b = spec.domain
    n = 2 ** spec.n_qubits
    return a + (b - a) * np.arange(n, dtype=np.float64) / (n - 1)


def image_vector(pixels: np.ndarray) -> np.ndarray:
    """Row-major flattening of normalized pixel values.

    The basis index of entry (i, j) is the bit string (row bits, column
    bits), which is plain C-order flattening.
    """
    flat = np.asarray(pixels, dtype=np.float64).reshape(-1)
    norm = np.linalg.norm(flat)
    if norm == 0.0:
        raise InvalidInputError("image has zero norm")
    return flat / norm


def target_mps(spec: TargetSpec, chi_max: int | None = None,
               svd_threshold: float = 1e-10) -> MPS:
    """Materialize a target specification as a left-canonical MPS."""
    chi_max = check_chi(chi_max)
    svd_threshold = check_threshold(svd_threshold)
    if spec.kind == "function":
        vec = discretise(spec)
        return mps_from_statevector(vec, chi_max=chi_max, svd_threshold=svd_threshold)
    if spec.kind == "image":
        vec = image_vector(spec.pixels)
        return mps_from_statevector(vec, chi_max=chi_max, svd_threshold=svd_threshold)
    if spec.kind == "random-mps":
        mps = random_mps(spec.n_qubits, spec.chi, spec.seed)
        if chi_max is not None and mps.max_bond > chi_max:
            mps, _ = truncate(mps, chi_max, svd_threshold)
        return mps
    raise InvalidInputError(f"unknown target kind {spec.kind!r}")


def random_mps(n: int, chi: int, seed: int) -> MPS:
    """Seeded random MPS with bond dimension ``chi``.

    Cores are drawn from the standard complex Gaussian and orthonormalized
    site by site, which yields a left-canonical, unit-norm state whose
    Schmidt spectra are fairly flat. Identical (n, chi, seed) give
    bitwise-identical cores.
    """
    chi = check_chi(chi, name="chi")
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    dims = [1]
    for k in range(n - 1):
        dims.append(min(chi, 2 ** min(k + 1, n - 1 - k)))
    dims.append(1)
    cores = []
    for k in range(n):
        raw = rng.standard_normal((dims[k] * 2, dims[k + 1])) \
            + 1j * rng.standard_normal((dims[k] * 2, dims[k + 1]))
        q, _ = np.linalg.qr(raw)
        cores.append(q.reshape(dims[k], 2, dims[k + 1]))
    return MPS(cores=_as_cores(cores), canonical="left", chi_max=chi)


# ---------------------------------------------------------------------------
# Image ingestion
# ---------------------------------------------------------------------------

def ingest_image(path, fmt: str | None = None) -> TargetSpec:
    """Load a grayscale image file into an image target.

    Supported formats: binary PGM (P5), CSV (one row per line), and raw
    unsigned bytes of a square power-of-two image. Pixel values are
    scaled to [0, 1] by the format's maximum value.
    """
    path = str(path)
    if fmt is None:
        lower = path.lower()
        if lower.endswith(".pgm"):
            fmt = "pgm"
        elif lower.endswith(".csv"):
            fmt = "csv"
        else:
            fmt = "raw"
    fmt = fmt.lower()
    if fmt in ("pgm", "pgm-p5"):
        pixels = _read_pgm(path)
    elif fmt == "csv":
        pixels = _read_csv_image(path)
    elif fmt in ("raw", "raw-u8"):
        pixels = _read_raw_u8(path)
    else:
        raise FormatError(f"unknown image format {fmt!r}")
    return TargetSpec.image(pixels)


def _read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise FormatError(f"{path}: not a binary PGM (P5) file")
    # header tokens: magic, width, height, maxval; '#' comments allowed
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if maxval <= 0 or maxval > 65535:
        raise FormatError(f"{path}: unsupported PGM maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    if raw.size != count:
        raise FormatError(f"{path}: PGM pixel data truncated")
    pixels = raw.reshape(height, width).astype(np.float64) / maxval
    return pixels


def _read_csv_image(path) -> np.ndarray:
    try:
        pixels = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise FormatError(f"{path}: malformed CSV image") from exc
    if np.max(pixels) > 1.0 + 1e-12:
        # treat as 8-bit values
        if np.max(pixels) > 255.0 + 1e-9 or np.min(pixels) < -1e-9:
            raise FormatError(f"{path}: CSV values must lie in [0,1] or [0,255]")
        pixels = pixels / 255.0
    return pixels


def _read_raw_u8(path) -> np.ndarray:
    raw = np.fromfile(path, dtype=np.uint8)
    side = int(round(np.sqrt(raw.size)))
    if side * side != raw.size or not _is_power_of_two(side):
        raise ShapeError(
            f"{path}: raw image must be square with power-of-two side, "
            f"got {raw.size} bytes; pad or crop the source data"
        )
    return raw.reshape(side, side).astype(np.float64) / 255.0


# ---------------------------------------------------------------------------
# Bundled phantom image
# ---------------------------------------------------------------------------

def synthetic_phantom(side: int = 128) -> np.ndarray:
    """Deterministic grayscale phantom used as an image stand-in.

    Two rib-textured lobes over a dark background with a soft diaphragm
    edge, loosely mimicking the structure of a chest radiograph. Values
    lie in [0, 1]; the layout is closed-form with no randomness, so the
    singular spectrum (and hence every truncation fidelity) is fixed.
    """
    if not _is_power_of_two(side):
        raise ShapeError(f"side must be a power of two, got {side}")
    t = (np.arange(side) + 0.5) / side
    y, x = np.meshgrid(t, t, indexing="ij")

    def blob(cx, cy, sx, sy, amp, tilt=0.0):
        dx, dy = x - cx, y - cy
        u = dx * np.cos(tilt) + dy * np.sin(tilt)
        v = -dx * np.sin(tilt) + dy * np.cos(tilt)
        return amp * np.exp(-(u ** 2) / (2 * sx ** 2) - (v ** 2) / (2 * sy ** 2))

    img = 0.06 + 0.05 * y
    lung_l = blob(0.32, 0.42, 0.13, 0.23, 1.0, tilt=0.30)
    lung_r = blob(0.70, 0.42, 0.13, 0.24, 1.0, tilt=-0.30)
    img = img + 0.75 * (lung_l + lung_r)
    rib_phase = 11.0 * np.pi * (y + 0.35 * (x - 0.5) ** 2)
    img = img + 0.62 * (lung_l + lung_r) * np.sin(rib_phase)
    img = img - 0.35 * blob(0.51, 0.42, 0.07, 0.26, 1.0)
    img = img + 0.25 / (1.0 + np.exp(-16.0 * (y - 0.66 - 0.10 * np.sin(2.6 * x))))
    img = img + blob(0.16, 0.14, 0.10, 0.07, 0.30, tilt=0.5)
    img = img + blob(0.86, 0.14, 0.10, 0.07, 0.30, tilt=-0.5)
    texture = np.zeros_like(img)
    for k in range(1, 11):
        fx, fy = 5.0 + 3.7 * k, 4.0 + 4.3 * k
        texture += np.sin(2.0 * np.pi * (fx * x + fy * y) + 0.7 * k) / k
    img = img + 0.035 * texture
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo)


def bundled_phantom_path() -> str:
    """Filesystem path of the bundled 128x128 phantom PGM."""
    ref = importlib.resources.files("mpsenc").joinpath("data/phantom_128.pgm")
    return str(ref)


def write_pgm(pixels: np.ndarray, path, maxval: int = 255) -> None:
    """Write a [0,1]-valued grayscale image as binary PGM (P5)."""
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.ndim != 2:
        raise ShapeError("pixels must be a 2-D array")
    quantized = np.clip(np.rint(pixels * maxval), 0, maxval)
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n{maxval}\n".encode()
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(quantized.astype(dtype).tobytes())
