# coding: utf-8

# # AMTIS step by step
#
# This walkthrough builds a small synthetic image with three gray-level
# populations, then follows the threshold pipeline one stage at a time:
# histogram, valleys, partition minima, their intersection and finally the
# grouping that reduces the candidates to `t` thresholds.

# In[1]:

import numpy as np

from mthresh.amtis import amtis_thresholds, select_thresholds
from mthresh.histogram import compute_histogram, find_valleys, intersect_candidates, partition_minima
from mthresh.imagecore import apply_thresholds


# ## A tri-modal test image
#
# Three Gaussian-shaped populations centred at 60, 128 and 200, cut off at
# three standard deviations so that the gaps between them are empty.

# In[2]:

levels = np.arange(256)
counts = np.zeros(256, dtype=np.int64)
for mu in (60, 128, 200):
    bump = np.round(1000 * np.exp(-0.5 * ((levels - mu) / 8.0) ** 2))
    counts += np.where(np.abs(levels - mu) <= 24, bump, 0).astype(np.int64)

pixels = np.repeat(levels, counts).astype(np.uint8)
np.random.default_rng(0).shuffle(pixels)
side = int(np.sqrt(pixels.size))
img = pixels[: side * side].reshape(side, side)
print(img.shape, img.dtype)


# ## Histogram and valleys
#
# A valley is a level whose count is lower than its nearest different
# neighbour on each side. Flat stretches count once, at their first level,
# so each empty gap contributes exactly one valley.

# In[3]:

h = compute_histogram(img)
set_a = find_valleys(h)
print("valleys:", set_a)


# ## Partition minima
#
# The 256 levels are cut into 32 blocks of 8 and the lowest-count level of
# each block is kept (the first one on ties).

# In[4]:

set_b = partition_minima(h, 32)
print("partition minima:", set_b)


# In[5]:

set_c = intersect_candidates(set_a, set_b)
print("candidates:", set_c)


# ## Picking the thresholds
#
# The candidate list is split into `t` contiguous groups and each group
# gives its first member at or above the group mean.

# In[6]:

print(select_thresholds([10, 20, 30, 40], 2))  # groups (10, 20) and (30, 40)
ths = amtis_thresholds(img, 2)
print("thresholds:", ths)


# In[7]:

seg = apply_thresholds(img, ths)
print(len(np.unique(img)), "levels before,", len(np.unique(seg)), "after")
