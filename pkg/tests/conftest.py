import sys
from pathlib import Path

import hypothesis
import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile("default")

np.seterr(all="warn", under="ignore")
