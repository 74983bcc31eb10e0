"""Plot-script emission: turn a result CSV into a standalone matplotlib script.

The generated script is deterministic for a fixed input and only depends
on matplotlib, so plots can be (re)drawn outside this package.
"""

from __future__ import annotations

from pathlib import Path

from .config import read_csv
from .errors import ConfigError

_TEMPLATE = '''#!/usr/bin/env python3
"""Auto-generated plot script for {csv_name} (schema {schema})."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = Path(__file__).resolve().parent / {csv_name!r}

rows = []
with open(CSV_PATH, newline="") as fh:
    for line in fh:
        if line.startswith("#"):
            continue
        rows.append(line.strip().split(","))
header, data = rows[0], rows[1:]

{body}
fig.savefig(Path(__file__).with_suffix(".png"), dpi=150)
print("wrote", Path(__file__).with_suffix(".png"))
'''

_DECAY_BODY = '''t = [float(r[0]) for r in data]
norm = [float(r[1]) for r in data]
fig, ax = plt.subplots(figsize=(6, 4.5))
ax.loglog(t, norm, "o-", label=header[1])
{guide}
ax.set_xlabel("t")
ax.set_ylabel(header[1])
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
'''

_GUIDE = '''slope = {slope}
ref = [norm[0] * (x / t[0]) ** slope for x in t]
ax.loglog(t, ref, "k--", alpha=0.7, label=f"slope {{slope:+.4f}}")
'''

_KERNEL_BODY = '''from collections import defaultdict
by_t = defaultdict(list)
for r in data:
    by_t[float(r[0])].append((int(r[1]), (float(r[2]) ** 2 + float(r[3]) ** 2) ** 0.5))
fig, ax = plt.subplots(figsize=(6, 4.5))
for tv in sorted(by_t):
    pts = sorted(by_t[tv])
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", label=f"t = {tv:g}")
ax.set_xlabel("j")
ax.set_ylabel("|K_t(j)|")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
'''

_TORUS_BODY = '''t = [float(r[0]) for r in data]
scaled = [float(r[2]) for r in data]
fig, ax = plt.subplots(figsize=(6, 4.5))
ax.semilogx(t, scaled, "o-", label="|t|^{1/2} sup / L1")
ax.set_xlabel("t")
ax.set_ylabel("scaled sup-norm")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
'''

_OSCINT_BODY = '''from collections import defaultdict
by_a = defaultdict(lambda: defaultdict(float))
for r in data:
    t, a, scaled = float(r[0]), float(r[3]), float(r[7])
    by_a[a][t] = max(by_a[a][t], scaled)
fig, ax = plt.subplots(figsize=(6, 4.5))
for a in sorted(by_a):
    ts = sorted(by_a[a])
    ax.semilogx(ts, [by_a[a][t] for t in ts], "o-", label=f"a = {a:g}")
ax.set_xlabel("t")
ax.set_ylabel("max |I| (1+t)^{1/3}")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
'''


def emit_plot_script(csv_path: str | Path, out_path: str | Path | None = None) -> Path:
    """Write a matplotlib script next to (or at out_path for) a recognized CSV."""
    csv_path = Path(csv_path)
    schema, tokens, _, rows = read_csv(csv_path)
    if not rows:
        raise ConfigError("CSV has no data rows; nothing to plot", source=str(csv_path))
    if schema == "dispersim.decay.v1":
        guide = ""
        if "theory_slope" in tokens:
            guide = _GUIDE.format(slope=tokens["theory_slope"])
        body = _DECAY_BODY.format(guide=guide)
    elif schema == "dispersim.kernel.v1":
        body = _KERNEL_BODY
    elif schema == "dispersim.torus.v1":
        body = _TORUS_BODY
    elif schema == "dispersim.oscint.v1":
        body = _OSCINT_BODY
    else:
        raise ConfigError(f"no plot defined for schema {schema!r}", source=str(csv_path))
    script = _TEMPLATE.format(csv_name=csv_path.name, schema=schema, body=body)
    if out_path is None:
        out_path = csv_path.with_suffix(".plot.py")
    out_path = Path(out_path)
    out_path.write_text(script, encoding="utf-8")
    return out_path
