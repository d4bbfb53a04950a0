"""Adaptive instance normalization.

AdaIN moves each channel of a content tensor to the mean and standard
deviation of a style tensor. Applied directly to pixels, it transfers colour
statistics between images.

    python demos/05_adain.py [--out stylized.png]
"""

import argparse

import numpy as np

from corruptbench.assets import load_corpus
from corruptbench.imaging import write_image
from corruptbench.stylize import adain, channel_stats, stylize_image

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--out", default="stylized.png")
args = parser.parse_args()

rng = np.random.default_rng(0)
content = rng.normal(3.0, 2.0, (4, 16, 16))
style = rng.normal([[[-1.0]], [[0.0]], [[5.0]], [[2.0]]], [[[0.5]], [[1.0]], [[3.0]], [[1.5]]], (4, 24, 20))

out = adain(content, style)
print("style   mean/std:", np.round(channel_stats(style), 4).tolist())
print("output  mean/std:", np.round(channel_stats(out), 4).tolist())
print("alpha = 0 returns the content:", np.array_equal(adain(content, style, 0.0), content))
# The epsilon stabilizer makes a second pass move values by roughly eps / variance.
print(f"largest change from a second pass: {np.abs(adain(out, style) - out).max():.1e}")

corpus = load_corpus()
result = np.concatenate([corpus[0], stylize_image(corpus[0], corpus[3], 0.5), stylize_image(corpus[0], corpus[3])], axis=1)
write_image(args.out, result)
print(f"wrote {args.out}: content, alpha 0.5, alpha 1")
