"""Exact-arithmetic engine for curved shifted L-infinity structures and
bundle charts: homotopy transfer, fibration reduction to simple subbundles,
and Chevalley-Eilenberg duality, all over the rationals.
"""

__version__ = "0.1.0"
