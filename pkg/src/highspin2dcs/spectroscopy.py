"""One- and two-pulse coherent spectroscopy pipelines.

Frequencies are reported in cycles per unit time, ``f = omega / 2pi``; a
level spacing ``dE`` therefore shows up at ``f = dE / 2pi``.  Transforms use
the ``exp(+i 2pi f t)`` sign convention.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exact import ExactPropagator, ground_state, model_eigen
from .model import DriveProtocol, ModelSpec, PulseSpec

__all__ = [
    "WindowSpec",
    "TimeSeries",
    "Spectrum1D",
    "Spectrum2D",
    "blackman",
    "transform_1d",
    "transform_2d",
    "simulate_magnetization",
    "run_1dcs",
    "run_2dcs",
    "nonlinear_response",
    "slice_spectrum",
    "NonlinearSurface",
    "harmonic_ratios",
    "find_peaks_1d",
    "find_peaks_2d",
    "tau_grid",
]

ENGINES = ("avqds", "ed", "trotter", "meanfield")


@dataclass(frozen=True)
class WindowSpec:
    t1: float
    t2: float

    def __post_init__(self):
        if not self.t2 > self.t1:
            raise ValueError("window needs t2 > t1")

    @property
    def length(self) -> float:
        return self.t2 - self.t1


def blackman(t, window: WindowSpec):
    """Blackman taper on ``[t1, t2]``, zero outside."""
    t = np.asarray(t, dtype=float)
    x = (t - window.t1) / window.length
    w = 0.42 - 0.5 * np.cos(2 * np.pi * x) + 0.08 * np.cos(4 * np.pi * x)
    w = np.where((x >= 0) & (x <= 1), w, 0.0)
    # the formula leaves ~1e-17 residue at the edges
    return np.clip(w, 0.0, 1.0)


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values differ in length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def resample(self, grid: np.ndarray) -> "TimeSeries":
        return TimeSeries(grid, np.interp(grid, self.times, self.values))


@dataclass
class Spectrum1D:
    freqs: np.ndarray
    amplitude: np.ndarray
    window: WindowSpec
    padding: int

    @property
    def bin_width(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def magnitude(self) -> np.ndarray:
        return np.abs(self.amplitude)


@dataclass
class Spectrum2D:
    """``amplitude[i, j]`` at ``(f_t[i], f_tau[j])``; ``f_t >= 0``, ``f_tau`` signed."""

    f_t: np.ndarray
    f_tau: np.ndarray
    amplitude: np.ndarray
    t_window: WindowSpec
    tau_window: WindowSpec
    padding: int
    meta: dict = field(default_factory=dict)

    @property
    def bin_widths(self) -> tuple[float, float]:
        return float(self.f_t[1] - self.f_t[0]), float(self.f_tau[1] - self.f_tau[0])

    def magnitude(self) -> np.ndarray:
        return np.abs(self.amplitude)

    def value_near(self, ft: float, ftau: float, bins: int = 1) -> float:
        """Largest magnitude within ``bins`` grid cells of ``(ft, ftau)``."""
        i = int(np.argmin(np.abs(self.f_t - ft)))
        j = int(np.argmin(np.abs(self.f_tau - ftau)))
        mag = self.magnitude()
        return float(mag[max(0, i - bins) : i + bins + 1, max(0, j - bins) : j + bins + 1].max())


def _uniform(times: np.ndarray) -> float:
    dt = np.diff(times)
    if dt.size == 0 or not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-12):
        raise ValueError("transform needs a uniform grid; resample first")
    return float(dt[0])


def transform_1d(series: TimeSeries, window: WindowSpec, padding: int = 8) -> Spectrum1D:
    """Blackman-windowed, zero-padded transform ``sum_k w x e^{+i 2pi f t_k} dt``."""
    dt = _uniform(series.times)
    sel = (series.times >= window.t1 - 1e-9) & (series.times <= window.t2 + 1e-9)
    t = series.times[sel]
    x = series.values[sel] * blackman(t, window)
    n = padding * t.size
    # ifft carries e^{+i}; rescale its 1/n
    amp = np.fft.ifft(x, n) * n * dt
    freqs = np.fft.fftfreq(n, dt)
    amp = amp * np.exp(2j * np.pi * freqs * t[0])
    keep = freqs >= 0
    return Spectrum1D(freqs[keep], amp[keep], window, padding)


def transform_2d(
    times: np.ndarray,
    taus: np.ndarray,
    surface: np.ndarray,
    t_window: WindowSpec,
    tau_window: WindowSpec,
    padding: int = 8,
    tau_sign: int = -1,
) -> Spectrum2D:
    """2D analogue of :func:`transform_1d`; ``surface[i, j]`` is at ``(times[i], taus[j])``.

    The kernel is ``e^{+i 2pi f_t t} e^{i tau_sign 2pi f_tau tau}``.  With lab
    time on the ``t`` axis, ``tau_sign=-1`` puts a coherence that is carried
    through the delay and then radiated at the same frequency on the diagonal
    ``(f, f)``.
    """
    if tau_sign not in (1, -1):
        raise ValueError("tau_sign must be +1 or -1")
    dt, dtau = _uniform(times), _uniform(taus)
    st = (times >= t_window.t1 - 1e-9) & (times <= t_window.t2 + 1e-9)
    su = (taus >= tau_window.t1 - 1e-9) & (taus <= tau_window.t2 + 1e-9)
    t, u = times[st], taus[su]
    x = surface[np.ix_(st, su)] * np.outer(blackman(t, t_window), blackman(u, tau_window))
    nt, nu = padding * t.size, padding * u.size
    # ifft along t gives e^{+i}; along tau pick ifft or fft by the sign
    amp = np.fft.ifft(x, nt, axis=0) * (nt * dt)
    if tau_sign > 0:
        amp = np.fft.ifft(amp, nu, axis=1) * (nu * dtau)
    else:
        amp = np.fft.fft(amp, nu, axis=1) * dtau
    ft = np.fft.fftfreq(nt, dt)
    fu = np.fft.fftfreq(nu, dtau)
    amp = amp * np.exp(2j * np.pi * ft * t[0])[:, None] * np.exp(tau_sign * 2j * np.pi * fu * u[0])[None, :]
    keep = ft >= 0
    order = np.argsort(fu)
    return Spectrum2D(ft[keep], fu[order], amp[keep][:, order], t_window, tau_window, padding)


# --- dynamics -------------------------------------------------------------------------


@dataclass
class RunResult:
    series: TimeSeries
    info: dict = field(default_factory=dict)


def _ground_vector(spec: ModelSpec) -> np.ndarray:
    return ground_state(spec)[1]


def simulate_magnetization(
    spec: ModelSpec,
    protocol: DriveProtocol,
    t_final: float,
    engine: str = "ed",
    dt_out: float = 0.01,
    ansatz=None,
    config=None,
    trotter_dt: float = 0.005,
    track_exact: bool = False,
) -> RunResult:
    """``M^z(t)`` on ``[0, t_final]`` starting from the ground state.

    ``avqds`` returns its adaptive time grid; the other engines sample every
    ``dt_out``.  ``ansatz`` overrides the initial state for ``avqds``.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    ops = spec.operators
    if engine == "ed":
        n = int(round(t_final / dt_out))
        grid = np.linspace(0.0, n * dt_out, n + 1)
        prop = ExactPropagator(ops, protocol)
        return RunResult(TimeSeries(grid, prop.magnetization(_ground_vector(spec), grid)))
    if engine == "trotter":
        return _trotter_run(spec, protocol, t_final, trotter_dt, dt_out)
    if engine == "meanfield":
        from .meanfield import mf_magnetization

        n = int(round(t_final / dt_out))
        grid = np.linspace(0.0, n * dt_out, n + 1)
        return RunResult(TimeSeries(grid, mf_magnetization(spec, protocol, grid)))
    from .avqds import EvolutionConfig, evolve
    from .ground_state import prepare_ground_state

    if config is None:
        config = EvolutionConfig()
    if ansatz is None:
        ansatz = prepare_ground_state(spec, "adapt-vqe").ansatz
    exact0 = _ground_vector(spec) if track_exact else None
    rec, final = evolve(ansatz, ops, protocol, config, t_final, exact_initial=exact0)
    return RunResult(TimeSeries(np.asarray(rec.time), np.asarray(rec.mz)), {"record": rec, "ansatz": final})


def _trotter_run(spec, protocol, t_final, dt, dt_out):
    from .statevector import apply_rotation

    ops = spec.operators
    h0 = ops.H0.as_dict()
    hz = ops.Hz.as_dict()
    strings = sorted(set(h0) | set(hz), key=lambda s: s.sort_key())
    strings = [s for s in strings if s.weight > 0]
    c0 = np.array([np.real(h0.get(s, 0.0)) for s in strings])
    cz = np.array([np.real(hz.get(s, 0.0)) for s in strings])
    per_step = sum(2 * (s.weight - 1) for s in strings)
    psi = _ground_vector(spec).astype(complex)
    hzd = ops.Hz_diag
    n_steps = int(round(t_final / dt))
    stride = max(1, int(round(dt_out / dt)))
    times, values = [0.0], [float(np.dot(hzd, np.abs(psi) ** 2))]
    for k in range(n_steps):
        B = float(protocol((k + 0.5) * dt))
        coeffs = c0 - B * cz
        for s, c in zip(strings, coeffs):
            psi = apply_rotation(psi, s, dt * c)
        if (k + 1) % stride == 0:
            times.append((k + 1) * dt)
            values.append(float(np.dot(hzd, np.abs(psi) ** 2)))
    info = {"cnots_per_step": per_step, "n_steps": n_steps, "cumulative_cnots": per_step * n_steps, "state": psi}
    return RunResult(TimeSeries(np.array(times), np.array(values)), info)


# --- 1DCS ------------------------------------------------------------------------------


def run_1dcs(
    spec: ModelSpec,
    pulse: PulseSpec,
    engine: str = "ed",
    t_final: float = 50.0,
    window: WindowSpec | None = None,
    padding: int = 8,
    **kwargs,
) -> tuple[TimeSeries, Spectrum1D, RunResult]:
    window = window or WindowSpec(0.0, t_final)
    run = simulate_magnetization(spec, DriveProtocol.single(pulse), t_final, engine, **kwargs)
    series = run.series
    grid_dt = _grid_spacing(series.times)
    n = int(round((series.times[-1] - series.times[0]) / grid_dt))
    grid = series.times[0] + grid_dt * np.arange(n + 1)
    uniform = series.resample(grid)
    return series, transform_1d(uniform, window, padding), run


def _grid_spacing(times: np.ndarray, cap: float = 0.01) -> float:
    """``min(cap, smallest step)`` ignoring a final step truncated to hit the end time."""
    steps = np.diff(times)[:-1] if times.size > 2 else np.diff(times)
    steps = steps[steps > 0]
    if steps.size == 0:
        return cap
    return min(cap, float(steps.min()))


# --- 2DCS ------------------------------------------------------------------------------


def tau_grid(start: float = 3.5, stop: float = 20.0, step: float = 0.1) -> np.ndarray:
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


@dataclass
class NonlinearSurface:
    """``M_NL(t, tau) = M12 - M1 - M2`` on a uniform lab-time grid; ``values[i, j]`` at ``(times[i], taus[j])``."""

    times: np.ndarray
    taus: np.ndarray
    values: np.ndarray
    m1: np.ndarray
    info: dict = field(default_factory=dict)


def _run_pair(args):
    spec, protocol, t_final, engine, kwargs = args
    run = simulate_magnetization(spec, protocol, t_final, engine, **kwargs)
    rec = run.info.get("record")
    summary = rec.summary() if rec is not None else {}
    return run.series, summary


def nonlinear_response(
    spec: ModelSpec,
    pulse1: PulseSpec,
    pulse2: PulseSpec | None = None,
    taus: np.ndarray | None = None,
    engine: str = "ed",
    t_final: float = 50.0,
    workers: int = 1,
    dt_grid: float | None = None,
    **kwargs,
) -> NonlinearSurface:
    """``M_NL(t, tau)`` for pulse 1 at its ``t0`` and pulse 2 delayed by ``tau``.

    ``t`` is lab time.  ``M1`` is simulated once; ``M12`` and ``M2`` per delay.
    """
    pulse2 = pulse2 or pulse1
    taus = tau_grid() if taus is None else np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.size > 1 and np.any(np.diff(taus) <= 0):
        raise ValueError("tau grid must be increasing")
    if engine == "avqds" and "ansatz" not in kwargs:
        from .ground_state import prepare_ground_state

        kwargs = dict(kwargs, ansatz=prepare_ground_state(spec, "adapt-vqe").ansatz)
    jobs = [(spec, DriveProtocol.single(pulse1), t_final, engine, kwargs)]
    for tau in taus:
        jobs.append((spec, DriveProtocol.pair(pulse1, pulse2, tau), t_final, engine, kwargs))
        jobs.append((spec, DriveProtocol(((pulse2, float(tau)),)), t_final, engine, kwargs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_pair, jobs))
    else:
        results = [_run_pair(j) for j in jobs]
    series = [r[0] for r in results]
    spacing = dt_grid or min(_grid_spacing(s.times) for s in series)
    n = int(math.floor(t_final / spacing + 1e-9))
    grid = spacing * np.arange(n + 1)
    m1 = series[0].resample(grid).values
    surface = np.empty((grid.size, taus.size))
    for j in range(taus.size):
        m12 = series[1 + 2 * j].resample(grid).values
        m2 = series[2 + 2 * j].resample(grid).values
        surface[:, j] = m12 - m1 - m2
    info = {"engine": engine, "runs": [r[1] for r in results], "grid_spacing": spacing}
    return NonlinearSurface(grid, taus, surface, m1, info)


def run_2dcs(
    spec: ModelSpec,
    pulse1: PulseSpec,
    pulse2: PulseSpec | None = None,
    taus: np.ndarray | None = None,
    engine: str = "ed",
    t_final: float = 50.0,
    t_window: WindowSpec = WindowSpec(29.0, 49.0),
    tau_window: WindowSpec = WindowSpec(4.0, 19.5),
    padding: int = 8,
    workers: int = 1,
    dt_grid: float | None = None,
    tau_sign: int = -1,
    **kwargs,
) -> tuple[NonlinearSurface, Spectrum2D]:
    """:func:`nonlinear_response` followed by :func:`transform_2d`.

    The default windows sit after both pulses for every delay in the scan.
    """
    nl = nonlinear_response(spec, pulse1, pulse2, taus, engine, t_final, workers, dt_grid, **kwargs)
    spec2d = transform_2d(nl.times, nl.taus, nl.values, t_window, tau_window, padding, tau_sign)
    spec2d.meta.update({"engine": engine, "n_tau": int(nl.taus.size), "grid_spacing": nl.info["grid_spacing"]})
    return nl, spec2d


def slice_spectrum(surface: NonlinearSurface, tau: float, window: WindowSpec = WindowSpec(29.0, 49.0), padding: int = 8) -> Spectrum1D:
    """Transform of ``M_NL(t, tau)`` along ``t`` at the delay closest to ``tau``."""
    j = int(np.argmin(np.abs(surface.taus - tau)))
    return transform_1d(TimeSeries(surface.times, surface.values[:, j]), window, padding)


# --- peaks -----------------------------------------------------------------------------


def find_peaks_1d(spectrum: Spectrum1D, rel: float = 1e-3) -> list[tuple[float, float]]:
    """Local maxima of ``|amplitude|`` above ``rel`` times the global maximum."""
    mag = spectrum.magnitude()
    top = mag.max()
    out = []
    for k in range(mag.size):
        left = mag[k - 1] if k > 0 else -np.inf
        right = mag[k + 1] if k + 1 < mag.size else -np.inf
        if mag[k] >= left and mag[k] > right and mag[k] >= rel * top:
            out.append((float(spectrum.freqs[k]), float(mag[k])))
    return sorted(out, key=lambda p: -p[1])


def find_peaks_2d(spectrum: Spectrum2D, rel: float = 1e-3) -> list[tuple[float, float, float]]:
    """Local maxima (8-neighbourhood) above ``rel`` times the global maximum."""
    mag = spectrum.magnitude()
    padded = np.pad(mag, 1, constant_values=-np.inf)
    core = padded[1:-1, 1:-1]
    is_max = np.ones_like(mag, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = padded[1 + di : 1 + di + mag.shape[0], 1 + dj : 1 + dj + mag.shape[1]]
            is_max &= core >= nb
    is_max &= mag >= rel * mag.max()
    idx = np.argwhere(is_max)
    out = [(float(spectrum.f_t[i]), float(spectrum.f_tau[j]), float(mag[i, j])) for i, j in idx]
    return sorted(out, key=lambda p: -p[2])


def harmonic_ratios(freqs: np.ndarray, amplitude: np.ndarray, f_af: float, n_max: int = 7) -> list[tuple[int, float]]:
    """``(n, peak_n / peak_1)`` with ``peak_n`` the maximum in ``[(n - 1/2) f_af, (n + 1/2) f_af]``."""
    mag = np.abs(np.asarray(amplitude))
    freqs = np.asarray(freqs)
    peaks = []
    for n in range(1, n_max + 1):
        band = (freqs >= (n - 0.5) * f_af) & (freqs <= (n + 0.5) * f_af)
        if not band.any():
            raise ValueError(f"harmonic band {n} lies outside the frequency axis")
        peaks.append(mag[band].max())
    return [(n, float(p / peaks[0])) for n, p in zip(range(1, n_max + 1), peaks)]
