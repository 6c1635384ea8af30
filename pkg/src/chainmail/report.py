"""Rendering: canonical JSON reports, delimited per-cell verdicts, a
verdict heatmap, and line-delimited trace dumps.

JSON is emitted with sorted keys and fixed indentation so identical runs
produce byte-identical reports.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

from .assertions import Spec
from .checker import LawReport, Verdict, judgment_grid
from .interpreter import Stuck, Terminated, Trace
from .runtime import config_to_json


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_json(verdict: Verdict) -> str:
    return render_json(verdict.to_json())


def report_text(verdict: Verdict) -> str:
    lines = []
    if verdict.status == "no-violation-found":
        lines.append("no violation found on this run")
    elif verdict.status == "violated":
        lines.append(f"violated: {len(verdict.witnesses)} witness(es)")
    else:
        lines.append("withheld: a bound was too small to decide")
    for w in verdict.witnesses:
        binds = ", ".join(
            f"{k}={_short_value(v)}" for k, v in sorted(w.bindings.items())
        )
        suffix = f" with {binds}" if binds else ""
        lines.append(f"  position {w.position}: {w.assertion}{suffix}")
    for c in verdict.caveats:
        lines.append(f"  note: {c}")
    return "\n".join(lines) + "\n"


def _short_value(v) -> str:
    from .runtime import Addr, AddrSet, Bool, Nat, NullValue

    if isinstance(v, NullValue):
        return "null"
    if isinstance(v, Addr):
        return f"#{v.index}"
    if isinstance(v, AddrSet):
        return "{" + ", ".join(f"#{a.index}" for a in sorted(v.addrs)) + "}"
    if isinstance(v, Nat):
        return str(v.value)
    if isinstance(v, Bool):
        return "true" if v.value else "false"
    return repr(v)


def props_text(reports: list[LawReport]) -> str:
    lines = []
    for r in reports:
        mark = "pass" if r.ok else "FAIL"
        lines.append(f"{mark}  {r.law}: {r.trials - len(r.failures)}/{r.trials} (seed {r.seed})")
        for f in r.failures[:5]:
            lines.append(f"      {f}")
    return "\n".join(lines) + "\n"


def props_json(reports: list[LawReport]) -> str:
    return render_json({"suites": [r.to_json() for r in reports]})


# ---------------------------------------------------------------------------
# Trace dumps
# ---------------------------------------------------------------------------


def outcome_to_json(outcome) -> dict:
    if isinstance(outcome, Terminated):
        return {"kind": "terminated"}
    if isinstance(outcome, Stuck):
        return {"kind": "stuck", "reason": outcome.reason, "detail": outcome.detail}
    return {"kind": "stepped"}


def dump_trace_jsonl(trace: Trace, path: Path) -> None:
    """One JSON object per line: each visible configuration in order, then a
    summary line with the outcome."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, cfg in enumerate(trace.externals):
            row = {"position": i, "config": config_to_json(cfg)}
            if i > 0:
                row["interior_steps"] = len(trace.interiors[i - 1])
            fh.write(json.dumps(row, sort_keys=True) + "\n")
        fh.write(
            json.dumps(
                {
                    "summary": {
                        "positions": len(trace.externals),
                        "micro_total": trace.micro_total,
                        "outcome": outcome_to_json(trace.outcome),
                        "truncated": trace.truncated,
                    }
                },
                sort_keys=True,
            )
            + "\n"
        )


# ---------------------------------------------------------------------------
# Report directories: JSON + CSV + figure
# ---------------------------------------------------------------------------

_CELL_LEVELS = {"ok": 0, "violated": 1, "withheld": 2}
_CELL_COLORS = ["#4a7c59", "#b3422e", "#d9a441"]


def write_report_dir(
    verdict: Verdict,
    trace: Trace,
    spec: Spec,
    out_dir: Path,
    grid: Optional[list[tuple[int, str, str]]] = None,
) -> list[Path]:
    """Write report.json, verdicts.csv, and (when there is anything to draw)
    a verdicts.png heatmap of assertion-by-position outcomes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    report_path = out_dir / "report.json"
    report_path.write_text(report_json(verdict), encoding="utf-8")
    written.append(report_path)

    if grid is None:
        grid = judgment_grid(trace, spec, verdict.bounds)
    csv_path = out_dir / "verdicts.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["position", "assertion", "verdict"])
        for position, name, cell in grid:
            writer.writerow([position, name, cell])
    written.append(csv_path)

    if grid:
        png_path = out_dir / "verdicts.png"
        _write_heatmap(grid, png_path)
        written.append(png_path)
    return written


def _write_heatmap(grid: list[tuple[int, str, str]], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap
    from matplotlib.patches import Patch

    positions = sorted({row[0] for row in grid})
    names = []
    for _, name, _ in grid:
        if name not in names:
            names.append(name)
    data = [[0] * len(positions) for _ in names]
    for position, name, cell in grid:
        data[names.index(name)][positions.index(position)] = _CELL_LEVELS[cell]

    fig, ax = plt.subplots(
        figsize=(max(3.0, 0.6 * len(positions) + 2.0), max(2.0, 0.5 * len(names) + 1.5))
    )
    ax.imshow(
        data,
        cmap=ListedColormap(_CELL_COLORS),
        vmin=0,
        vmax=2,
        aspect="auto",
        interpolation="nearest",
    )
    ax.set_xticks(range(len(positions)), [str(p) for p in positions])
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("trace position")
    handles = [
        Patch(color=_CELL_COLORS[i], label=label)
        for label, i in _CELL_LEVELS.items()
    ]
    ax.legend(handles=handles, loc="upper left", bbox_to_anchor=(1.01, 1.0), frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
