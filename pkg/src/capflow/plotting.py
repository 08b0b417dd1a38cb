"""Static SVG charts of flow monitors."""

from __future__ import annotations

import os

import numpy as np

from .errors import FormatError

MARGIN = 0.05

# group name -> (column prefixes, log scale)
GROUPS = {
    "quermass": (("A_",), False),
    "curvature": (("F_min", "F_max", "kappa_min", "kappa_max"), False),
    "residuals": (("mink_res_",), False),
    "speed": (("sup_f",), True),
}


def padded_limits(values, log: bool = False, margin: float = MARGIN) -> tuple[float, float]:
    """Data range widened by ``margin`` of its span on each side.

    On a log axis the padding is applied to ``log10`` of the data.  A
    degenerate range is widened by ``margin`` of its magnitude (or 1).
    """
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if log:
        v = v[v > 0.0]
    if v.size == 0:
        raise FormatError("no plottable values")
    if log:
        lo, hi = padded_limits(np.log10(v), False, margin)
        return 10.0**lo, 10.0**hi
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo
    if span == 0.0:
        span = abs(lo) if lo != 0.0 else 1.0
    return lo - margin * span, hi + margin * span


def _select(columns, prefixes):
    return [c for c in columns if any(c == p or (p.endswith("_") and c.startswith(p)) for p in prefixes)]


def plot_monitors(columns, data, out_dir, stem: str = "monitors") -> list[str]:
    """Write one SVG per channel group and return the paths.

    Nothing is written unless the table has at least one row.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] == 0:
        raise FormatError("monitor table is empty")
    if "t" not in columns:
        raise FormatError("monitor table has no time column")
    t = data[:, columns.index("t")]
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    with matplotlib.rc_context({"svg.hashsalt": "capflow", "svg.fonttype": "none"}):
        for name, (prefixes, log) in GROUPS.items():
            cols = _select(columns, prefixes)
            if not cols:
                continue
            ys = np.column_stack([data[:, columns.index(c)] for c in cols])
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            for c, y in zip(cols, ys.T):
                ax.plot(t, y, label=c, lw=1.2)
            if log:
                ax.set_yscale("log")
            ax.set_xlim(*padded_limits(t))
            ax.set_ylim(*padded_limits(ys, log=log))
            ax.set_xlabel("t")
            ax.set_title(name)
            ax.legend(fontsize="small")
            fig.tight_layout()
            path = os.path.join(out_dir, f"{stem}_{name}.svg")
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            paths.append(path)
    return paths
