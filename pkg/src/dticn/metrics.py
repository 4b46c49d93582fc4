"""Transaction records, transmission counters, derived metrics, and file output.

Transmission counters tick at link departure time, so retransmissions and
lost packets count. Everything that happens before t = 0 (the registration
pre-roll) is kept out of the per-role counters but still balances the
per-link conservation ledger.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any

from .core import Name, Packet, PacketKind

if TYPE_CHECKING:
    from .node import Node

OUTCOME_PENDING = "pending"
OUTCOME_COMPLETED = "completed"
OUTCOME_FAILED = "failed"
OUTCOME_ABANDONED = "abandoned"

LORA_LINK_NAME = "lora"


@dataclass
class TransactionRecord:
    name: Name
    initiated_at: float
    initiated_by: str  # "consumer" | "producer"
    completed_at: float | None = None
    outcome: str = OUTCOME_PENDING
    attempts: int = 0

    @property
    def completion_time(self) -> float | None:
        if self.completed_at is None:
            return None
        return self.completed_at - self.initiated_at


@dataclass
class LinkLedger:
    departed: int = 0
    delivered: int = 0
    lost: int = 0


class Recorder:
    """Collects everything a run emits; owned by one simulation instance."""

    def __init__(self, measure_from: float = 0.0, trace: bool = False) -> None:
        self.measure_from = measure_from
        self.trace_enabled = trace
        self.trace: list[dict[str, Any]] = []
        self.transactions: dict[Name, TransactionRecord] = {}
        self.node_roles: dict[str, str] = {}
        self.interests_tx: Counter[str] = Counter()
        self.data_tx: Counter[str] = Counter()
        self.interest_tx_by_name: Counter[tuple[str, str]] = Counter()
        self.link_ledgers: dict[tuple[str, str], LinkLedger] = {}
        self.lora_interests = 0
        self.lora_data = 0
        self.drops: Counter[tuple[str, str]] = Counter()

    def log_action(self, now: float, node_id: str, action: str, pkt: Packet | None) -> None:
        if not self.trace_enabled:
            return
        record: dict[str, Any] = {"t": now, "node": node_id, "action": action}
        if pkt is not None:
            record["packet"] = f"{pkt.kind.value} {pkt.name}"
        self.trace.append(record)

    # -- transactions -------------------------------------------------------

    def create_transaction(self, name: Name, now: float, initiated_by: str) -> None:
        if name in self.transactions:
            raise ValueError(f"duplicate transaction for {name}")
        self.transactions[name] = TransactionRecord(name, now, initiated_by)

    def complete_transaction(self, name: Name, now: float) -> None:
        rec = self.transactions.get(name)
        if rec is not None and rec.outcome == OUTCOME_PENDING:
            rec.outcome = OUTCOME_COMPLETED
            rec.completed_at = now

    def fail_transaction(self, name: Name, now: float, reason: str = "failed") -> None:
        rec = self.transactions.get(name)
        if rec is not None and rec.outcome == OUTCOME_PENDING:
            rec.outcome = OUTCOME_FAILED

    def abandon_transaction(self, name: Name, now: float) -> None:
        rec = self.transactions.get(name)
        if rec is not None and rec.outcome == OUTCOME_PENDING:
            rec.outcome = OUTCOME_ABANDONED

    def finalize(self) -> None:
        for rec in self.transactions.values():
            if rec.outcome == OUTCOME_PENDING:
                rec.outcome = OUTCOME_FAILED

    # -- link events -----------------------------------------------------------

    def _ledger(self, link: str, from_node: str) -> LinkLedger:
        key = (link, from_node)
        if key not in self.link_ledgers:
            self.link_ledgers[key] = LinkLedger()
        return self.link_ledgers[key]

    def count_departure(self, link: str, node: "Node", pkt: Packet, now: float) -> None:
        self.node_roles[node.node_id] = node.role
        self._ledger(link, node.node_id).departed += 1
        if now < self.measure_from:
            return
        if pkt.kind is PacketKind.INTEREST:
            self.interests_tx[node.node_id] += 1
            self.interest_tx_by_name[(node.node_id, str(pkt.name))] += 1
            if link == LORA_LINK_NAME:
                self.lora_interests += 1
        else:
            self.data_tx[node.node_id] += 1
            if link == LORA_LINK_NAME:
                self.lora_data += 1
        if node.role == "consumer" and pkt.kind is PacketKind.INTEREST:
            rec = self.transactions.get(pkt.name)
            if rec is not None:
                rec.attempts += 1

    def count_delivery(self, link: str, from_node: str, at: float) -> None:
        self._ledger(link, from_node).delivered += 1

    def count_loss(self, link: str, from_node: str, now: float) -> None:
        self._ledger(link, from_node).lost += 1

    def count_drop(self, node_id: str, reason: str, now: float) -> None:
        self.drops[(node_id, reason)] += 1


@dataclass
class MetricsReport:
    scenario: str
    retx_mode: str
    loss: float
    seed: int
    requests: int
    finished_at: float
    transactions: list[TransactionRecord]
    node_counters: dict[str, dict[str, Any]]
    link_counters: dict[str, dict[str, int]]
    drops: dict[str, int]
    lora_interests: int
    lora_data: int

    # -- derived -------------------------------------------------------------

    def outcome_counts(self) -> dict[str, int]:
        counts = Counter(rec.outcome for rec in self.transactions)
        return {
            OUTCOME_COMPLETED: counts.get(OUTCOME_COMPLETED, 0),
            OUTCOME_FAILED: counts.get(OUTCOME_FAILED, 0),
            OUTCOME_ABANDONED: counts.get(OUTCOME_ABANDONED, 0),
        }

    def success_rate(self) -> float | None:
        if not self.transactions:
            return None
        done = sum(1 for r in self.transactions if r.outcome == OUTCOME_COMPLETED)
        return done / len(self.transactions)

    def completion_times(self) -> list[float]:
        return sorted(
            r.completion_time for r in self.transactions if r.completion_time is not None
        )

    def completion_quantiles(self) -> dict[str, float | None]:
        times = self.completion_times()
        if not times:
            return {"p50": None, "p90": None, "p99": None, "max": None}

        def q(p: float) -> float:
            idx = min(len(times) - 1, int(p * len(times)))
            return times[idx]

        return {"p50": q(0.50), "p90": q(0.90), "p99": q(0.99), "max": times[-1]}

    def completion_cdf(self, resolution_s: float = 1.0) -> list[tuple[float, float]]:
        """Fraction of all transactions completed by t, sampled every second."""
        if not self.transactions:
            return []
        times = self.completion_times()
        total = len(self.transactions)
        horizon = times[-1] if times else 0.0
        points: list[tuple[float, float]] = []
        t = 0.0
        i = 0
        while t <= horizon + resolution_s:
            while i < len(times) and times[i] <= t:
                i += 1
            points.append((t, i / total))
            t += resolution_s
        return points

    def tx_per_content(self) -> dict[str, float | None]:
        n = len(self.transactions)
        if n == 0:
            return {
                "consumer": None,
                "forwarder": None,
                "gateway": None,
                "node": None,
                "total": None,
                "lora_link": None,
            }
        by_role: Counter[str] = Counter()
        for node_id, counters in self.node_counters.items():
            by_role[counters["role"]] += counters["interests_tx"] + counters["data_tx"]
        out: dict[str, float | None] = {
            role: by_role.get(role, 0) / n for role in ("consumer", "forwarder", "gateway", "node")
        }
        out["total"] = sum(by_role.values()) / n
        out["lora_link"] = (self.lora_interests + self.lora_data) / n
        return out

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "retx_mode": self.retx_mode,
            "loss": self.loss,
            "seed": self.seed,
            "requests": self.requests,
            "finished_at": self.finished_at,
            "transactions": [
                {
                    "name": str(r.name),
                    "initiated_at_s": r.initiated_at,
                    "completed_at_s": r.completed_at,
                    "outcome": r.outcome,
                    "attempts": r.attempts,
                    "initiated_by": r.initiated_by,
                }
                for r in self.transactions
            ],
            "node_counters": self.node_counters,
            "link_counters": self.link_counters,
            "drops": self.drops,
            "summary": {
                "success_rate": self.success_rate(),
                "outcomes": self.outcome_counts(),
                "completion_quantiles": self.completion_quantiles(),
                "completion_cdf_1s": [[t, f] for t, f in self.completion_cdf()],
                "tx_per_content": self.tx_per_content(),
                "lora_interests": self.lora_interests,
                "lora_data": self.lora_data,
            },
        }


def build_report(recorder: Recorder, config: Any, finished_at: float) -> MetricsReport:
    recorder.finalize()
    node_counters = {
        node_id: {
            "role": role,
            "interests_tx": recorder.interests_tx.get(node_id, 0),
            "data_tx": recorder.data_tx.get(node_id, 0),
        }
        for node_id, role in sorted(recorder.node_roles.items())
    }
    link_counters = {
        f"{link}:{from_node}": {
            "departed": ledger.departed,
            "delivered": ledger.delivered,
            "lost": ledger.lost,
        }
        for (link, from_node), ledger in sorted(recorder.link_ledgers.items())
    }
    drops = {f"{node}:{reason}": n for (node, reason), n in sorted(recorder.drops.items())}
    return MetricsReport(
        scenario=config.scenario,
        retx_mode=config.retx_mode,
        loss=config.loss,
        seed=config.seed,
        requests=config.requests,
        finished_at=finished_at,
        transactions=list(recorder.transactions.values()),
        node_counters=node_counters,
        link_counters=link_counters,
        drops=drops,
        lora_interests=recorder.lora_interests,
        lora_data=recorder.lora_data,
    )


# -- file emission ------------------------------------------------------------


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit(report: dict[str, Any], fmt: str, out_dir: str | Path) -> list[Path]:
    """Write a report dict to disk; same input bytes in, same bytes out."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if fmt == "json":
        path = out / "report.json"
        path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown output format: {fmt}")

    tx_path = out / "transactions.csv"
    with tx_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "initiated_at_s", "completed_at_s", "outcome", "attempts"])
        for row in report["transactions"]:
            writer.writerow(
                [
                    row["name"],
                    _fmt(row["initiated_at_s"]),
                    _fmt(row["completed_at_s"]),
                    row["outcome"],
                    row["attempts"],
                ]
            )
    written.append(tx_path)

    nodes_path = out / "node_counters.csv"
    with nodes_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "role", "interests_tx", "data_tx"])
        for node_id, counters in report["node_counters"].items():
            writer.writerow([node_id, counters["role"], counters["interests_tx"], counters["data_tx"]])
    written.append(nodes_path)

    summary = report["summary"]
    summary_path = out / "summary.csv"
    with summary_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        writer.writerow(["success_rate", _fmt(summary["success_rate"])])
        for outcome, count in summary["outcomes"].items():
            writer.writerow([f"outcome_{outcome}", count])
        for key, value in summary["completion_quantiles"].items():
            writer.writerow([f"completion_{key}", _fmt(value)])
        for key, value in summary["tx_per_content"].items():
            writer.writerow([f"tx_per_content_{key}", _fmt(value)])
        writer.writerow(["lora_interests", summary["lora_interests"]])
        writer.writerow(["lora_data", summary["lora_data"]])
    written.append(summary_path)

    cdf_path = out / "cdf.csv"
    with cdf_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_s", "fraction_completed"])
        for t, fraction in summary["completion_cdf_1s"]:
            writer.writerow([_fmt(t), _fmt(fraction)])
    written.append(cdf_path)
    return written
