"""Run reports: text, JSON and comparison tables."""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Dict, Iterable, List

# keys whose values vary between identical runs
TIME_KEYS = ("time_ms", "phase_ms")

COMPARE_COLUMNS = ("model", "size", "algorithm", "state_symmetries", "status",
                   "representatives", "peak_live_nodes", "time_ms", "rounds",
                   "images", "tau_passes")


def result_fields(res) -> Dict[str, Any]:
    return {
        "algorithm": res.algorithm,
        "state_symmetries": res.state_symmetries,
        "status": res.status,
        "reason": res.reason,
        "representatives": res.representatives,
        "peak_live_nodes": res.peak_live,
        "rounds": res.rounds,
        "images": res.images,
        "alpha_calls": res.alpha_calls,
        "tau_passes": res.tau_passes,
        "relations_built": res.relations_built,
        "filtered": res.filtered,
        "time_ms": round(res.wall_ms, 3),
        "phase_ms": {k: round(v, 3) for k, v in sorted(res.phase_ms.items())},
    }


def to_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def strip_times(report: Any) -> Any:
    """Copy of a report without the time fields (for stability checks)."""
    if isinstance(report, dict):
        return {k: strip_times(v) for k, v in report.items() if k not in TIME_KEYS}
    if isinstance(report, list):
        return [strip_times(v) for v in report]
    return report


def to_text(report: Dict[str, Any]) -> str:
    sizes = ", ".join(f"{k}={v}" for k, v in report["sizes"].items())
    lines = [
        f"model            {report['model']} ({sizes})",
        f"algorithm        {report['algorithm']}"
        f"{' + state symmetries' if report['state_symmetries'] else ''}",
        f"status           {report['status']}"
        + (f" ({report['reason']})" if report.get("reason") else ""),
        f"representatives  {report['representatives']}",
        f"peak live nodes  {report['peak_live_nodes']}",
        f"time             {report['time_ms']:.1f} ms",
        f"rounds           {report['rounds']}  images {report['images']}"
        f"  tau passes {report['tau_passes']}",
    ]
    for p in report["properties"]:
        line = f"property {p['name']:<12} {p['verdict']}"
        if p.get("witness"):
            line += f"  witness: {p['witness']}"
        lines.append(line)
    o = report.get("oracle")
    if o:
        lines.append(f"oracle           equivalence {o['equivalence']}, verdicts "
                     f"{'agree' if o['verdicts_agree'] else 'DISAGREE'}, "
                     f"{o['full_states']} full / {o['canonical_states']} canonical states")
    lines.append(f"exit             {report['exit_status']}")
    return "\n".join(lines) + "\n"


def rows_to_csv(rows: Iterable[Dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COMPARE_COLUMNS, extrasaction="ignore",
                       lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def reversals(rows: List[Dict[str, Any]]) -> List[str]:
    """Sizes where the component-wise run needed more peak nodes than
    the monolithic one."""
    out = []
    by_key: Dict[tuple, Dict[str, Any]] = {}
    for r in rows:
        by_key[(r["model"], r["size"], r["algorithm"], r["state_symmetries"])] = r
    for (model, size, algo, sym), r in sorted(by_key.items()):
        if algo != "comp" or sym:
            continue
        mono = by_key.get((model, size, "mono", False))
        if mono and mono["status"] == r["status"] == "complete" \
                and r["peak_live_nodes"] > mono["peak_live_nodes"]:
            out.append(f"{model}:{size}")
    return out
