"""Quality measures between a gray image and its segmented version."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatch, ImageTooSmall

MAX_LEVEL = 255.0
SSIM_C1 = (0.01 * MAX_LEVEL) ** 2
SSIM_C2 = (0.03 * MAX_LEVEL) ** 2
FSIM_MIN_SIZE = 8


def _pair(orig, seg):
    x = np.asarray(orig, dtype=np.float64)
    y = np.asarray(seg, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes differ: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise ValueError("images are empty")
    return x, y


def rmse(orig, seg) -> float:
    x, y = _pair(orig, seg)
    return math.sqrt(float(np.mean((x - y) ** 2)))


def psnr(orig, seg):
    """Return ``(psnr_db, rmse)``; PSNR is ``inf`` for identical images."""
    err = rmse(orig, seg)
    if err == 0:
        return math.inf, 0.0
    return 20.0 * math.log10(MAX_LEVEL / err), err


def ssim(orig, seg, c1: float = SSIM_C1, c2: float = SSIM_C2) -> float:
    """Single-window SSIM over whole-image statistics.

    Variances and covariance use the ``N - 1`` normalization.
    """
    x, y = _pair(orig, seg)
    n = x.size
    mx, my = x.mean(), y.mean()
    dx, dy = x - mx, y - my
    denom = max(n - 1, 1)
    vx = np.sum(dx * dx) / denom
    vy = np.sum(dy * dy) / denom
    cov = np.sum(dx * dy) / denom
    num = (2 * mx * my + c1) * (2 * cov + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return float(num / den)


# --- FSIM -------------------------------------------------------------------

@dataclass(frozen=True)
class FsimConfig:
    """FSIM constants and log-Gabor bank geometry.

    ``t1``/``t2`` stabilize the phase-congruency and gradient similarity
    terms, ``epsilon`` guards the phase-congruency denominator.
    """

    t1: float = 0.85
    t2: float = 160.0
    scales: int = 4
    orientations: int = 4
    epsilon: float = 1e-4
    min_wavelength: float = 6.0
    scale_factor: float = 2.0
    sigma_on_f: float = 0.55
    d_theta_on_sigma: float = 1.2

    def __post_init__(self):
        for name in ("t1", "t2", "scales", "orientations", "epsilon",
                     "min_wavelength", "scale_factor", "sigma_on_f", "d_theta_on_sigma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"FsimConfig.{name} must be positive")


def _freq_axis(n):
    return np.fft.fftfreq(n)


def log_gabor_bank(shape, cfg: FsimConfig | None = None) -> np.ndarray:
    """Frequency-domain log-Gabor filters, shape ``(scales, orientations, h, w)``.

    The angular windows are one-sided, so each filter yields a complex
    (even + i*odd) response. Frequencies without a mirrored partner on the
    FFT grid (the Nyquist row/column of even sizes) are zeroed.
    """
    cfg = cfg or FsimConfig()
    rows, cols = shape
    fy = _freq_axis(rows)[:, None]
    fx = _freq_axis(cols)[None, :]
    radius = np.sqrt(fx ** 2 + fy ** 2)
    theta = np.arctan2(-fy, fx)
    radius_safe = np.where(radius == 0, 1.0, radius)

    lowpass = 1.0 / (1.0 + (radius / 0.45) ** 30)
    lowpass = lowpass * (np.abs(fx) < 0.5) * (np.abs(fy) < 0.5)

    radial = []
    for s in range(cfg.scales):
        f0 = 1.0 / (cfg.min_wavelength * cfg.scale_factor ** s)
        lg = np.exp(-(np.log(radius_safe / f0)) ** 2 / (2 * np.log(cfg.sigma_on_f) ** 2))
        lg[radius == 0] = 0.0
        radial.append(lg * lowpass)

    theta_sigma = math.pi / cfg.orientations / cfg.d_theta_on_sigma
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    angular = []
    for o in range(cfg.orientations):
        angle = o * math.pi / cfg.orientations
        ds = sin_t * math.cos(angle) - cos_t * math.sin(angle)
        dc = cos_t * math.cos(angle) + sin_t * math.sin(angle)
        dtheta = np.abs(np.arctan2(ds, dc))
        angular.append(np.exp(-dtheta ** 2 / (2 * theta_sigma ** 2)))

    return np.stack([np.stack([r * a for a in angular]) for r in radial])


def phase_congruency(img, cfg: FsimConfig | None = None, bank=None) -> np.ndarray:
    """Phase congruency map ``sum_o E_o / (eps + sum_o sum_s A_so)``.

    ``E_o`` is the magnitude of the summed complex response of orientation
    ``o``; ``A_so`` are the individual response amplitudes. No noise
    threshold is subtracted.
    """
    cfg = cfg or FsimConfig()
    x = np.asarray(img, dtype=np.float64)
    if bank is None:
        bank = log_gabor_bank(x.shape, cfg)
    spectrum = np.fft.fft2(x)
    energy = np.zeros(x.shape)
    amplitude = np.zeros(x.shape)
    for o in range(bank.shape[1]):
        summed = np.zeros(x.shape, dtype=np.complex128)
        for s in range(bank.shape[0]):
            resp = np.fft.ifft2(spectrum * bank[s, o])
            summed += resp
            amplitude += np.abs(resp)
        energy += np.abs(summed)
    return energy / (cfg.epsilon + amplitude)


_SCHARR_SMOOTH = np.array([3.0, 10.0, 3.0]) / 16.0
_SCHARR_DIFF = np.array([1.0, 0.0, -1.0])


def gradient_magnitude(img) -> np.ndarray:
    """Scharr gradient magnitude with edge-replicated borders."""
    x = np.pad(np.asarray(img, dtype=np.float64), 1, mode="edge")
    # separable: smooth along one axis, central difference along the other
    sm_rows = _SCHARR_SMOOTH[0] * x[:-2] + _SCHARR_SMOOTH[1] * x[1:-1] + _SCHARR_SMOOTH[2] * x[2:]
    gx = _SCHARR_DIFF[0] * sm_rows[:, :-2] + _SCHARR_DIFF[2] * sm_rows[:, 2:]
    sm_cols = _SCHARR_SMOOTH[0] * x[:, :-2] + _SCHARR_SMOOTH[1] * x[:, 1:-1] + _SCHARR_SMOOTH[2] * x[:, 2:]
    gy = _SCHARR_DIFF[0] * sm_cols[:-2] + _SCHARR_DIFF[2] * sm_cols[2:]
    return np.sqrt(gx ** 2 + gy ** 2)


def fsim_from_maps(pc1, pc2, g1, g2, cfg: FsimConfig | None = None) -> float:
    cfg = cfg or FsimConfig()
    s_pc = (2 * pc1 * pc2 + cfg.t1) / (pc1 ** 2 + pc2 ** 2 + cfg.t1)
    s_g = (2 * g1 * g2 + cfg.t2) / (g1 ** 2 + g2 ** 2 + cfg.t2)
    s_l = s_pc * s_g
    pc_m = np.maximum(pc1, pc2)
    weight = np.sum(pc_m)
    if weight <= 0:
        # featureless pair: fall back to the unweighted mean similarity
        return float(np.mean(s_l))
    return float(np.sum(s_l * pc_m) / weight)


def fsim(orig, seg, cfg: FsimConfig | None = None) -> float:
    """Feature similarity index of two gray images, in [0, 1].

    Parameters
    ----------
    orig, seg : array_like
        2-D images of identical shape, at least ``FSIM_MIN_SIZE`` on a side.
    cfg : FsimConfig, optional
        Constants and filter-bank geometry.
    """
    cfg = cfg or FsimConfig()
    x, y = _pair(orig, seg)
    if x.ndim != 2 or min(x.shape) < FSIM_MIN_SIZE:
        raise ImageTooSmall(f"FSIM needs 2-D images of at least {FSIM_MIN_SIZE}x{FSIM_MIN_SIZE}")
    bank = log_gabor_bank(x.shape, cfg)
    return fsim_from_maps(phase_congruency(x, cfg, bank), phase_congruency(y, cfg, bank),
                          gradient_magnitude(x), gradient_magnitude(y), cfg)


@dataclass(frozen=True)
class QualityReport:
    psnr: float
    rmse: float
    ssim: float
    fsim: float

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["psnr"]):
            d["psnr"] = "inf"
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def quality_report(orig, seg, cfg: FsimConfig | None = None) -> QualityReport:
    p, r = psnr(orig, seg)
    return QualityReport(psnr=p, rmse=r, ssim=ssim(orig, seg), fsim=fsim(orig, seg, cfg))
