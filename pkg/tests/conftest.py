from __future__ import annotations

import importlib.resources
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
    deadline=None,
)
settings.load_profile("ci")

FIXTURES = Path(__file__).parent / "fixtures"


def bundled_circuit_paths() -> list[Path]:
    root = importlib.resources.files("truncarx") / "circuits"
    return sorted(Path(str(root)).glob("*.circuit"))


@pytest.fixture(scope="session")
def bundled_circuits():
    from truncarx.circuit import parse_circuit

    return {p.stem: parse_circuit(p.read_text()) for p in bundled_circuit_paths()}


def anf_truth_table(poly, nvars: int) -> np.ndarray:
    """Boolean array of poly over all 2^nvars assignments (index = assignment)."""
    assert nvars <= 24
    assigns = np.arange(1 << nvars, dtype=np.uint64)
    out = np.zeros(1 << nvars, dtype=bool)
    for mono in poly.monomials:
        m = np.uint64(mono)
        out ^= (assigns & m) == m
    return out


def load_kat_vectors() -> list[tuple[tuple, tuple, tuple, tuple]]:
    """(key, tweak, plaintext, ciphertext) tuples, words least-significant first."""
    lines = [
        ln.strip()
        for ln in (FIXTURES / "threefish256_kat.txt").read_text().splitlines()
        if ln.strip() and not ln.startswith("#")
    ]
    assert len(lines) % 4 == 0
    vectors = []
    for i in range(0, len(lines), 4):
        rows = [tuple(int(w, 16) for w in reversed(ln.split())) for ln in lines[i : i + 4]]
        key, tweak, pt, ct = rows
        assert len(key) == 4 and len(tweak) == 2 and len(pt) == 4 and len(ct) == 4
        vectors.append((key, tweak, pt, ct))
    return vectors
