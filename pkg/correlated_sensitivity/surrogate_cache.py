"""
This module caches fitted surrogates as JSON documents so that repeated CLI
invocations with the same inputs skip the model evaluations.
"""

import hashlib
import json
import logging
import os
from typing import Callable

from correlated_sensitivity.surrogate import Surrogate


def cache_key(inputs: dict) -> str:
    """
    SHA-256 digest identifying a fit.

    Args:
        inputs (dict): JSON-serialisable description of everything the fit
            depends on (model, input distribution, permutation, order, nodes,
            regularisation, transform).

    Returns:
        str: Hex digest.
    """
    encoded = json.dumps(inputs, sort_keys=True).encode("utf-8")
    return hashlib.sha256(encoded).hexdigest()


def cached_surrogate(
    cache_dir: str, key: str, fit_surrogate: Callable[[], Surrogate]
) -> Surrogate:
    """
    Retrieves a surrogate from the cache, fitting and storing it on a miss.

    Args:
        cache_dir (str): Directory holding the cached documents.
        key (str): Digest from cache_key.
        fit_surrogate (Callable): Produces the surrogate on a cache miss.

    Returns:
        Surrogate: The cached or freshly fitted surrogate.
    """
    cache_file = os.path.join(cache_dir, f"{key}.json")
    if not os.path.exists(cache_dir):
        os.makedirs(cache_dir)
    if not os.path.isfile(cache_file):
        surrogate = fit_surrogate()
        with open(cache_file, encoding="utf-8", mode="wt") as f:
            json.dump(surrogate.to_dict(), indent=4, fp=f)
    else:
        logging.info("Using cached surrogate %s", cache_file)
        with open(cache_file, encoding="utf-8", mode="rt") as f:
            surrogate = Surrogate.from_dict(json.load(f))
    return surrogate
