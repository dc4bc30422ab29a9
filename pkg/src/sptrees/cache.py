"""Line-oriented text cache for exact series.

Format (version 1): a header block, one coefficient per line as
"n m numerator/denominator" (m is 0 for univariate series), and a
trailing integrity line.  Everything is decimal integers; no floats.

    sptrees-series-cache v1
    class: <id>
    kind: bivariate | univariate
    trunc_x: <int>
    trunc_y: <int or ->
    y: <rational or ->
    var: <tag>
    <n> <m> <p>/<q>
    ...
    sha256: <hex of all preceding lines>

Corrupted entries fail the integrity line (or the caller's residual
verifier) and are recomputed.
"""

from __future__ import annotations

import hashlib
import os
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from .series import Series, TruncPoly

CACHE_VERSION = "sptrees-series-cache v1"


class CacheError(RuntimeError):
    pass


def dumps_series(series: Series, class_id: str, y_value=None) -> str:
    lines = [CACHE_VERSION, f"class: {class_id}"]
    if series.is_bivariate:
        lines.append("kind: bivariate")
        lines.append(f"trunc_x: {series.trunc}")
        lines.append(f"trunc_y: {series.ycap}")
        lines.append("y: -")
    else:
        lines.append("kind: univariate")
        lines.append(f"trunc_x: {series.trunc}")
        lines.append("trunc_y: -")
        lines.append(f"y: {y_value if y_value is not None else '-'}")
    lines.append(f"var: {series.var}")
    for n in range(series.trunc + 1):
        c = series.coeff(n)
        if isinstance(c, TruncPoly):
            for m, v in enumerate(c.coeffs()):
                if v != 0:
                    lines.append(f"{n} {m} {v.numerator}/{v.denominator}")
        else:
            if c != 0:
                lines.append(f"{n} 0 {c.numerator}/{c.denominator}")
    payload = "\n".join(lines) + "\n"
    digest = hashlib.sha256(payload.encode()).hexdigest()
    return payload + f"sha256: {digest}\n"


def loads_series(text: str) -> tuple[Series, dict]:
    lines = text.splitlines()
    if not lines or lines[0] != CACHE_VERSION:
        raise CacheError("unknown cache version")
    if not lines[-1].startswith("sha256: "):
        raise CacheError("missing integrity line")
    digest = lines[-1].split(": ", 1)[1].strip()
    payload = "\n".join(lines[:-1]) + "\n"
    if hashlib.sha256(payload.encode()).hexdigest() != digest:
        raise CacheError("integrity check failed")
    meta: dict = {}
    coeff_lines = []
    for line in lines[1:-1]:
        if ": " in line and not line[0].isdigit():
            key, val = line.split(": ", 1)
            meta[key] = val
        else:
            coeff_lines.append(line)
    trunc = int(meta["trunc_x"])
    var = meta.get("var", "x")
    if meta["kind"] == "bivariate":
        ycap = int(meta["trunc_y"])
        grid = [[Fraction(0)] * (ycap + 1) for _ in range(trunc + 1)]
        for line in coeff_lines:
            n_s, m_s, frac = line.split()
            grid[int(n_s)][int(m_s)] = Fraction(frac)
        coeffs = [TruncPoly.from_coeffs(row, ycap) for row in grid]
        return Series(coeffs, trunc, var), meta
    vals = [Fraction(0)] * (trunc + 1)
    for line in coeff_lines:
        n_s, _m, frac = line.split()
        vals[int(n_s)] = Fraction(frac)
    return Series(vals, trunc, var), meta


def default_cache_dir() -> Path:
    env = os.environ.get("SPTREES_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "sptrees"


class SeriesCache:
    """Directory-backed cache with integrity and residual verification."""

    def __init__(self, directory: Optional[Path] = None):
        self.dir = Path(directory) if directory else default_cache_dir()

    def path(self, key: str) -> Path:
        return self.dir / f"{key}.series"

    def get_or_compute(self, key: str, builder: Callable[[], Series],
                       class_id: str, y_value=None,
                       verifier: Optional[Callable[[Series], bool]] = None) -> Series:
        p = self.path(key)
        if p.exists():
            try:
                series, _meta = loads_series(p.read_text())
                if verifier is None or verifier(series):
                    return series
            except (CacheError, ValueError, KeyError, IndexError):
                pass
            p.unlink(missing_ok=True)
        series = builder()
        self.dir.mkdir(parents=True, exist_ok=True)
        p.write_text(dumps_series(series, class_id, y_value))
        return series

    def entries(self) -> list[str]:
        if not self.dir.exists():
            return []
        return sorted(p.stem for p in self.dir.glob("*.series"))

    def purge(self) -> int:
        n = 0
        for p in self.dir.glob("*.series"):
            p.unlink()
            n += 1
        return n
