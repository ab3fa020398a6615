# coding: utf-8

# # Corpus benchmark
#
# Builds the 12-image stand-in corpus (sizes of the classic benchmark set,
# pixels from scikit-image samples), runs the timing harness and prints the
# speed-up of AMTIS over dynamic-programming Otsu per image and t.
# The same run is available as `mthresh bench <dir> --out <dir>`.

# In[1]:

import tempfile
from pathlib import Path

from mthresh.bench import BenchConfig, geometric_mean, run_corpus, speedup_table
from mthresh.corpus import build_standin_corpus

work = Path(tempfile.mkdtemp(prefix="mthresh_demo_"))
corpus = work / "corpus"
build_standin_corpus(corpus)
print(sorted(p.name for p in corpus.iterdir()))


# In[2]:

cfg = BenchConfig(corpus_dir=corpus, methods=("amtis", "otsu"), out_dir=work / "out")
records = run_corpus(cfg)
failed = [r for r in records if not r.ok]
print(len(records), "rows,", len(failed), "failed")


# In[3]:

table = speedup_table(records)
t_values = cfg.t_values
print(f"{'image':20s}" + "".join(f"   t={t}" for t in t_values))
for image in sorted({k[0] for k in table}):
    print(f"{image:20s}" + "".join(f"{table.get((image, t), float('nan')):7.2f}" for t in t_values))
print(f"{'geometric mean':20s}" + "".join(
    f"{geometric_mean(v for (i, tt), v in table.items() if tt == t):7.2f}" for t in t_values))


# Reports, segmented images and histogram CSVs are under `out/`.

# In[4]:

print(sorted(p.name for p in (work / "out").iterdir()))
