"""Kernel selection: the compiled core when built, else numpy fallbacks.

Set ``RANKARE_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pycore

BACKEND = "python"
count_discordances = _pycore.count_discordances
batch_discordances = _pycore.batch_discordances
batch_lagged_products = _pycore.batch_lagged_products

if os.environ.get("RANKARE_PURE", "") != "1":
    try:
        from . import _core
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        count_discordances = _core.count_discordances
        batch_discordances = _core.batch_discordances
        batch_lagged_products = _core.batch_lagged_products
