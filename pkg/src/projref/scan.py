"""Batch scanner: classification rows over parameter ranges, with figures.

Each valid tuple (r,p,q,n) in range yields one ReportRow combining the cheap
parameter criteria, the involution/degree counts, and (optionally) the
brute-force model search.  Output is deterministic: rows are sorted by
(order, r, p, q, n) and every run over the same range produces identical
bytes.  The report path can also render summary figures next to the
delimited output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from . import characters as ch
from . import involutions as inv
from .automorphism import tau_aut
from .errors import ProjRefError
from .group_core import make_group
from .isomorphism import is_self_dual

ROW_FIELDS = [
    "r", "p", "q", "n", "order", "gcd_p_n", "self_dual",
    "has_split", "has_antisym", "involutions", "degree_sum",
    "status", "branch", "brute_status", "agreement", "error",
]


@dataclass
class ScanSpec:
    max_order: int
    max_r: int = 12
    max_n: int = 6
    verify: bool = False
    table_cap: int = ch.TABLE_ORDER_CAP
    class_cap: int = ch.CLASS_CAP
    gim_cap: int = inv.GIM_SEARCH_CAP
    skip: set = field(default_factory=set)


def valid_tuples(spec: ScanSpec) -> list[tuple[int, int, int, int]]:
    """All valid (r,p,q,n) in range, sorted by (order, r, p, q, n)."""
    out = []
    for r in range(1, spec.max_r + 1):
        divisors = [d for d in range(1, r + 1) if r % d == 0]
        for n in range(1, spec.max_n + 1):
            for p in divisors:
                for q in divisors:
                    if (r * n) % (p * q) != 0:
                        continue
                    order = r**n * math.factorial(n) // (p * q)
                    if order <= spec.max_order:
                        out.append((order, r, p, q, n))
    out.sort()
    return [(r, p, q, n) for (_o, r, p, q, n) in out]


def scan_row(params: tuple[int, int, int, int], spec: ScanSpec) -> dict:
    r, p, q, n = params
    G = make_group(r, p, q, n)
    row = {
        "r": r, "p": p, "q": q, "n": n,
        "order": G.order,
        "gcd_p_n": math.gcd(p, n),
        "self_dual": is_self_dual(G),
        "has_split": ch.split_criterion(G),
        "has_antisym": not inv.no_antisymmetric_criterion(G),
        "involutions": "", "degree_sum": "",
        "status": "", "branch": "",
        "brute_status": "", "agreement": "",
        "error": "",
    }
    result = inv.classify(r, p, q, n)
    row["status"], row["branch"] = result.status, result.branch
    try:
        row["involutions"] = len(inv.twisted_involutions(G, tau_aut(G)))
        row["degree_sum"] = ch.sum_of_degrees(G, cap=spec.table_cap, class_cap=spec.class_cap)
        if spec.verify:
            search = inv.gim_search(
                G, cap=spec.gim_cap, table_cap=spec.table_cap, class_cap=spec.class_cap
            )
            row["brute_status"] = search.status
            row["agreement"] = (
                result.status == "UNKNOWN-open" or result.status == search.status
            )
    except ProjRefError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_scan(spec: ScanSpec, done: set | None = None):
    """Yield rows in canonical order, skipping already-done tuples."""
    done = done or set()
    for params in valid_tuples(spec):
        if params in done or params in spec.skip:
            continue
        yield scan_row(params, spec)


# -- serialization ----------------------------------------------------------------


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def rows_to_jsonl(rows) -> str:
    return "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)


def rows_to_table(rows) -> str:
    rows = list(rows)
    widths = {f: len(f) for f in ROW_FIELDS}
    for row in rows:
        for f in ROW_FIELDS:
            widths[f] = max(widths[f], len(str(row[f])))
    lines = ["  ".join(f.ljust(widths[f]) for f in ROW_FIELDS)]
    for row in rows:
        lines.append("  ".join(str(row[f]).ljust(widths[f]) for f in ROW_FIELDS))
    return "\n".join(lines) + "\n"


def parse_rows(text: str, fmt: str) -> list[dict]:
    if fmt == "json":
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    if fmt == "csv":
        return list(csv.DictReader(io.StringIO(text)))
    raise ValueError(f"cannot parse format {fmt!r}")


# -- figures ------------------------------------------------------------------------


def render_figures(rows, directory) -> list[str]:
    """Write summary charts next to the delimited output; returns file paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from pathlib import Path

    rows = [r for r in rows if not r.get("error")]
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    statuses = sorted({r["status"] for r in rows})
    counts = [sum(1 for r in rows if r["status"] == s) for s in statuses]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(statuses, counts, color=["#2a9d8f", "#e76f51", "#e9c46a"][: len(statuses)])
    ax.set_ylabel("groups in range")
    ax.set_title("model existence by parameter classification")
    fig.tight_layout()
    path = directory / "scan_status.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(str(path))

    pts = [
        (int(r["involutions"]), int(r["degree_sum"]))
        for r in rows
        if r["involutions"] != "" and r["degree_sum"] != ""
    ]
    if pts:
        fig, ax = plt.subplots(figsize=(5, 5))
        eq = [(a, b) for a, b in pts if a == b]
        lt = [(a, b) for a, b in pts if a != b]
        if eq:
            ax.scatter(*zip(*eq), s=14, label="|I| = sum of degrees", color="#2a9d8f")
        if lt:
            ax.scatter(*zip(*lt), s=14, label="|I| < sum of degrees", color="#e76f51")
        lim = max(b for _a, b in pts) * 1.1
        ax.plot([1, lim], [1, lim], lw=0.8, color="gray")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("absolute involutions")
        ax.set_ylabel("sum of irreducible degrees")
        ax.legend()
        fig.tight_layout()
        path = directory / "scan_involutions.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(str(path))
    return written
