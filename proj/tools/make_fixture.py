"""Regenerates tests/data/astronaut_128.ppm from the scikit-image sample."""
import sys

import numpy as np
from PIL import Image
from skimage import data, transform

out = sys.argv[1] if len(sys.argv) > 1 else "tests/data/astronaut_128.ppm"
img = transform.resize(data.astronaut(), (128, 128), anti_aliasing=True)
Image.fromarray((img * 255).round().astype(np.uint8)).save(out)
