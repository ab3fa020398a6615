"""Timing and quality harness comparing AMTIS with the classical optimizers.

Only threshold computation is timed: histogram construction plus the search.
Image decoding, segmentation, metrics and file output happen outside the
timed region, so every method is measured over the same kind of work.
"""
from __future__ import annotations

import csv
import gc
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .amtis import AmtisConfig, amtis_thresholds
from .baselines import SEARCHES, kapur_thresholds, mcet_thresholds, otsu_thresholds
from .errors import EmptyCorpus, ThresholdingError
from .histogram import compute_histogram, normalize, write_histogram_csv
from .imagecore import apply_thresholds, load_gray, write_pgm, write_png
from .metrics import (
    FSIM_MIN_SIZE,
    FsimConfig,
    QualityReport,
    fsim_from_maps,
    gradient_magnitude,
    log_gabor_bank,
    phase_congruency,
    psnr,
    ssim,
)

METHODS = ("amtis", "otsu", "kapur", "mcet")
IMAGE_SUFFIXES = (".pgm", ".png", ".jpg", ".jpeg")
CSV_COLUMNS = ("image", "method", "t", "thresholds", "mean_time_s", "psnr", "rmse",
               "ssim", "fsim", "speedup_vs_otsu", "error")

_BASELINES = {"otsu": otsu_thresholds, "kapur": kapur_thresholds, "mcet": mcet_thresholds}


@dataclass(frozen=True)
class BenchConfig:
    """Benchmark settings.

    ``baseline_search`` selects how the classical optimizers search
    (``"dp"`` times the dynamic-programming solver at every ``t``).
    ``warmup`` untimed calls precede the ``repeats`` timed ones. With
    ``interleave`` (corpus runs only) the records of one image are timed in
    round-robin order rather than one record after another.
    """

    corpus_dir: Optional[Path] = None
    methods: tuple = METHODS
    t_values: tuple = (2, 3, 4, 5)
    repeats: int = 20
    partitions: int = 32
    out_dir: Optional[Path] = None
    workers: int = 1
    baseline_search: str = "dp"
    warmup: int = 1
    metrics: bool = True
    png: bool = False
    interleave: bool = True
    fsim: FsimConfig = field(default_factory=FsimConfig)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if any(t < 1 for t in self.t_values):
            raise ValueError("threshold counts must be >= 1")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown method(s) {unknown}; choose from {METHODS}")
        if self.baseline_search not in SEARCHES:
            raise ValueError(f"baseline_search must be one of {SEARCHES}")
        AmtisConfig(partitions=self.partitions)


@dataclass
class BenchRecord:
    image: str
    method: str
    t: int
    thresholds: tuple = ()
    run_times_s: list = field(default_factory=list)
    psnr: Optional[float] = None
    rmse: Optional[float] = None
    ssim: Optional[float] = None
    fsim: Optional[float] = None
    speedup_vs_otsu: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def mean_time_s(self) -> Optional[float]:
        if not self.run_times_s:
            return None
        return math.fsum(self.run_times_s) / len(self.run_times_s)

    @property
    def median_time_s(self) -> Optional[float]:
        if not self.run_times_s:
            return None
        return float(np.median(self.run_times_s))

    @property
    def quality(self) -> Optional[QualityReport]:
        if self.psnr is None:
            return None
        return QualityReport(self.psnr, self.rmse, self.ssim, self.fsim)

    def sort_key(self):
        return (self.image, self.method, self.t)

    def row(self) -> dict:
        def num(v):
            if v is None:
                return ""
            return "inf" if math.isinf(v) else repr(float(v))

        return {
            "image": self.image,
            "method": self.method,
            "t": self.t,
            "thresholds": " ".join(str(x) for x in self.thresholds),
            "mean_time_s": num(self.mean_time_s),
            "psnr": num(self.psnr),
            "rmse": num(self.rmse),
            "ssim": num(self.ssim),
            "fsim": num(self.fsim),
            "speedup_vs_otsu": num(self.speedup_vs_otsu),
            "error": self.error or "",
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["thresholds"] = list(self.thresholds)
        d["mean_time_s"] = self.mean_time_s
        if d["psnr"] is not None and math.isinf(d["psnr"]):
            d["psnr"] = "inf"
        return d


def threshold_function(method: str, cfg: BenchConfig):
    """Return ``f(gray, t) -> thresholds`` covering histogram and search."""
    if method == "amtis":
        amtis_cfg = AmtisConfig(partitions=cfg.partitions)
        return lambda gray, t: amtis_thresholds(gray, t, amtis_cfg)
    try:
        search_fn = _BASELINES[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}") from None
    search = cfg.baseline_search
    return lambda gray, t: search_fn(normalize(compute_histogram(gray)), t, search)


def time_thresholds(fn, gray, t, repeats: int, warmup: int = 1):
    """Call ``fn(gray, t)`` ``warmup + repeats`` times; time the last ``repeats``.

    Returns ``(thresholds, run_times_s)``. Algorithm errors propagate from
    the first call.
    """
    result = None
    for _ in range(warmup):
        result = fn(gray, t)
    times = []
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            start = time.perf_counter_ns()
            result = fn(gray, t)
            times.append((time.perf_counter_ns() - start) * 1e-9)
    finally:
        if gc_was_enabled:
            gc.enable()
    return tuple(result), times


class _Original:
    """Gray image plus lazily computed FSIM feature maps."""

    def __init__(self, name, gray, fsim_cfg):
        self.name = name
        self.gray = gray
        self.fsim_cfg = fsim_cfg
        self._maps = None

    def maps(self):
        if self._maps is None:
            bank = log_gabor_bank(self.gray.shape, self.fsim_cfg)
            self._maps = (bank, phase_congruency(self.gray, self.fsim_cfg, bank),
                          gradient_magnitude(self.gray))
        return self._maps

    def quality(self, seg) -> QualityReport:
        p, r = psnr(self.gray, seg)
        s = ssim(self.gray, seg)
        f = math.nan
        if min(self.gray.shape) >= FSIM_MIN_SIZE:
            bank, pc0, g0 = self.maps()
            f = fsim_from_maps(pc0, phase_congruency(seg, self.fsim_cfg, bank),
                               g0, gradient_magnitude(seg), self.fsim_cfg)
        return QualityReport(p, r, s, f)


def _output_paths(out_dir: Path, image, method, t):
    stem = f"{image}_{method}_t{t}"
    return out_dir / "segmented" / f"{stem}.pgm", out_dir / "histograms" / f"{stem}.csv"


def emit_histogram_plot(hist, thresholds, path) -> Path:
    """Write ``level,count,is_threshold`` rows for plotting a histogram."""
    return write_histogram_csv(path, hist, thresholds)


def _failed(orig, method, t, exc) -> BenchRecord:
    return BenchRecord(orig.name, method, t, error=f"{type(exc).__name__}: {exc}")


def _finish_record(orig: _Original, method, t, ths, times, cfg: BenchConfig):
    """Fill quality fields and write per-record outputs for a timed run."""
    record = BenchRecord(orig.name, method, t, tuple(ths), list(times))
    seg = apply_thresholds(orig.gray, ths)
    if cfg.metrics:
        q = orig.quality(seg)
        record.psnr, record.rmse, record.ssim = q.psnr, q.rmse, q.ssim
        record.fsim = None if math.isnan(q.fsim) else q.fsim
    hist_path = None
    if cfg.out_dir is not None:
        seg_path, hist_path = _output_paths(Path(cfg.out_dir), orig.name, method, t)
        seg_path.parent.mkdir(parents=True, exist_ok=True)
        hist_path.parent.mkdir(parents=True, exist_ok=True)
        write_pgm(seg_path, seg)
        if cfg.png:
            write_png(seg_path.with_suffix(".png"), seg)
        emit_histogram_plot(compute_histogram(orig.gray), ths, hist_path)
    return record, seg, hist_path


def _run_record(orig: _Original, method, t, cfg: BenchConfig):
    fn = threshold_function(method, cfg)
    try:
        ths, times = time_thresholds(fn, orig.gray, t, cfg.repeats, cfg.warmup)
    except ThresholdingError as exc:
        return _failed(orig, method, t, exc), None, None
    return _finish_record(orig, method, t, ths, times, cfg)


def time_interleaved(jobs: dict, gray, repeats: int, warmup: int = 1):
    """Time several ``(fn, t)`` jobs on one image in round-robin order.

    Each repetition calls every job once, so slow drifts in machine speed
    hit all jobs alike and ratios between them stay stable. Calls still run
    one at a time. Returns ``{key: (thresholds, run_times_s)}`` and
    ``{key: exception}`` for jobs whose first call failed.
    """
    results, errors = {}, {}
    active = dict(jobs)
    for _ in range(warmup):
        for key, (fn, t) in list(active.items()):
            try:
                results[key] = (tuple(fn(gray, t)), [])
            except ThresholdingError as exc:
                errors[key] = exc
                del active[key]
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            for key, (fn, t) in list(active.items()):
                start = time.perf_counter_ns()
                try:
                    ths = fn(gray, t)
                except ThresholdingError as exc:
                    errors[key] = exc
                    del active[key]
                    continue
                elapsed = (time.perf_counter_ns() - start) * 1e-9
                prev = results.setdefault(key, (tuple(ths), []))
                prev[1].append(elapsed)
    finally:
        if gc_was_enabled:
            gc.enable()
    return results, errors


def run_single(image_path, method: str, t: int, cfg: BenchConfig | None = None):
    """Benchmark one method on one image.

    Returns ``(record, segmented, histogram_csv_path)``. ``segmented`` is None
    when the algorithm failed (the record then carries ``error``), and the
    CSV path is None unless ``cfg.out_dir`` is set.

    Raises
    ------
    OSError
        If the image cannot be read or decoded.
    """
    cfg = cfg or BenchConfig()
    image_path = Path(image_path)
    orig = _Original(image_path.stem, load_gray(image_path), cfg.fsim)
    return _run_record(orig, method, t, cfg)


def list_corpus(corpus_dir) -> list:
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise NotADirectoryError(f"corpus directory not found: {corpus_dir}")
    paths = sorted(p for p in corpus_dir.iterdir()
                   if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        raise EmptyCorpus(f"no PGM/PNG/JPEG images in {corpus_dir}")
    return paths


def _bench_image(path, cfg: BenchConfig) -> list:
    orig = _Original(Path(path).stem, load_gray(path), cfg.fsim)
    pairs = [(method, t) for method in cfg.methods for t in cfg.t_values]
    if not cfg.interleave:
        return [_run_record(orig, method, t, cfg)[0] for method, t in pairs]
    fns = {method: threshold_function(method, cfg) for method in cfg.methods}
    results, errors = time_interleaved({(m, t): (fns[m], t) for m, t in pairs},
                                       orig.gray, cfg.repeats, cfg.warmup)
    records = []
    for method, t in pairs:
        if (method, t) in errors:
            records.append(_failed(orig, method, t, errors[method, t]))
        else:
            ths, times = results[method, t]
            records.append(_finish_record(orig, method, t, ths, times, cfg)[0])
    return records


def attach_speedups(records) -> None:
    """Set ``speedup_vs_otsu = time(otsu) / time(amtis)`` on AMTIS rows."""
    otsu = {(r.image, r.t): r for r in records if r.method == "otsu" and r.ok}
    for r in records:
        if r.method != "amtis" or not r.ok:
            continue
        base = otsu.get((r.image, r.t))
        if base is not None:
            r.speedup_vs_otsu = base.mean_time_s / r.mean_time_s


def run_corpus(cfg: BenchConfig) -> list:
    """Benchmark every (image, method, t) combination of the corpus.

    Images are spread over ``cfg.workers`` processes; all timing for one
    image runs on a single worker, interleaved across its records unless
    ``cfg.interleave`` is off. Rows come back sorted by image, method and
    t. When ``cfg.out_dir`` is set, ``report.csv`` and ``report.json`` are
    written there along with segmented images and histogram CSVs.
    """
    paths = list_corpus(cfg.corpus_dir)
    if cfg.workers == 1:
        batches = [_bench_image(p, cfg) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            batches = list(pool.map(_bench_image, paths, [cfg] * len(paths)))
    records = sorted((r for batch in batches for r in batch), key=BenchRecord.sort_key)
    attach_speedups(records)
    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report_csv(records, out / "report.csv")
        write_report_json(records, out / "report.json")
    return records


def format_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def format_json(records) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2)


def write_report_csv(records, path) -> Path:
    path = Path(path)
    path.write_text(format_csv(records))
    return path


def write_report_json(records, path) -> Path:
    path = Path(path)
    path.write_text(format_json(records) + "\n")
    return path


def speedup_table(records) -> dict:
    """``{(image, t): speedup}`` for AMTIS rows that have one."""
    return {(r.image, r.t): r.speedup_vs_otsu for r in records
            if r.method == "amtis" and r.speedup_vs_otsu is not None}


def geometric_mean(values) -> float:
    values = np.asarray(list(values), dtype=np.float64)
    return float(np.exp(np.mean(np.log(values))))
