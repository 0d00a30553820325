"""Numerical conventions shared by every module.

Pairings integrate a density against real Lebesgue measure times
``PAIRING_FACTOR`` per complex coordinate, i.e. ``dz ^ dzbar = -2i dx ^ dy``.
"""

PAIRING_FACTOR = -2j
SINGULARITY_GUARD = 1e-12
CATALOG_VERSION = "1"
REPORT_SCHEMA_VERSION = "1"


def pairing_factor(d: int) -> complex:
    return PAIRING_FACTOR ** d


def describe() -> dict:
    return {
        "pairing": "dz^dzbar = -2i dx^dy per complex coordinate",
        "pairing_factor": [PAIRING_FACTOR.real, PAIRING_FACTOR.imag],
        "branch": "principal logarithm for f^(lam+a); conj(f) powers use the conjugate log",
        "singularity_guard": SINGULARITY_GUARD,
        "catalog_version": CATALOG_VERSION,
    }
