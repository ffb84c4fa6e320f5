"""
Deterministic 64-bit seed derivation.

Per-walk seeds depend only on (global seed, root label, walk index), never on
iteration order, so roots can be generated in any order or in parallel.
"""
import hashlib

MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """One SplitMix64 output step for state ``value``."""
    z = (value + _GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(*values: int) -> int:
    """Fold any number of 64-bit values into one well-mixed 64-bit value."""
    state = 0
    for value in values:
        state = splitmix64(state ^ (value & MASK64))
    return state


def label_hash(label: str) -> int:
    """Stable 64-bit hash of a node label, independent of PYTHONHASHSEED."""
    return int.from_bytes(hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest(), "little")


def walk_seed(global_seed: int, root: str, index: int) -> int:
    return mix(global_seed, label_hash(root), index)
