# coding: utf-8

# # AMTIS next to Otsu, Kapur and MCET
#
# Uses the scikit-image `camera` picture (install the `corpus` extra) to
# compare thresholds, runtime and segmentation quality for t = 2..5.

# In[1]:

import time

from skimage import data

from mthresh.amtis import amtis_thresholds
from mthresh.baselines import kapur_thresholds, mcet_thresholds, otsu_thresholds
from mthresh.histogram import compute_histogram, normalize
from mthresh.imagecore import apply_thresholds
from mthresh.metrics import quality_report

img = data.camera()
p = normalize(compute_histogram(img))


# The classical optimizers work on the normalized histogram; AMTIS takes the
# image itself (it only needs raw counts).

# In[2]:

methods = {
    "amtis": lambda t: amtis_thresholds(img, t),
    "otsu": lambda t: otsu_thresholds(p, t),
    "kapur": lambda t: kapur_thresholds(p, t),
    "mcet": lambda t: mcet_thresholds(p, t),
}

for t in (2, 3, 4, 5):
    print(f"t = {t}")
    for name, fn in methods.items():
        start = time.perf_counter()
        ths = fn(t)
        ms = (time.perf_counter() - start) * 1e3
        q = quality_report(img, apply_thresholds(img, ths))
        print(f"  {name:6s} {str(ths):24s} {ms:7.2f} ms  psnr {q.psnr:5.2f}  ssim {q.ssim:.3f}  fsim {q.fsim:.3f}")


# The exhaustive and dynamic-programming searches agree; DP is what makes
# t = 5 affordable.

# In[3]:

for t in (1, 2):
    assert otsu_thresholds(p, t, "dp") == otsu_thresholds(p, t, "exhaustive")
print(otsu_thresholds(p, 5, "dp"))
