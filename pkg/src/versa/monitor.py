"""The event monitor: periodic incremental evaluation plus alert actions.

The monitor owns per-template cursors; evaluators stay pure. Every tick it
runs each registered event template against frames above the template's
cursor, fires the configured actions for new detections (idempotency-keyed,
so repeated ticks never duplicate), and advances the cursor to the store's
high-water mark. Action failures are reported and retried next tick; they
never stop the loop.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

from .events import Detection, EvaluationStats, EventTemplate, evaluate_event
from .kb import FactStore
from .spatial import SpatialConfig

RECORD_VERSION = 1


@dataclass(frozen=True)
class DetectionRecord:
    timestamp: float
    dataset: str
    event_id: str
    bindings: dict
    steps: dict  # step id -> [begin, end]

    def to_line(self) -> str:
        """One newline-free JSON record, versioned, deterministic key order."""
        return json.dumps(
            {
                "v": RECORD_VERSION,
                "ts": self.timestamp,
                "dataset": self.dataset,
                "event": self.event_id,
                "bindings": {str(k): v for k, v in sorted(self.bindings.items())},
                "steps": {k: list(v) for k, v in sorted(self.steps.items())},
            },
            sort_keys=True,
        )


class Action(Protocol):
    def deliver(self, record: DetectionRecord) -> None: ...


class ConsoleAction:
    """Print each detection record to stdout."""

    def deliver(self, record: DetectionRecord) -> None:
        print(record.to_line())


class FileLogAction:
    """Append detection records to a newline-delimited log file."""

    def __init__(self, path):
        self.path = path

    def deliver(self, record: DetectionRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(record.to_line() + "\n")


class WebhookAction:
    """POST each detection record as JSON to a webhook URL."""

    def __init__(self, url: str, post: Callable | None = None):
        self.url = url
        if post is None:
            import httpx

            def post(url, payload):
                httpx.post(url, json=payload, timeout=5.0).raise_for_status()

        self._post = post

    def deliver(self, record: DetectionRecord) -> None:
        self._post(self.url, json.loads(record.to_line()))


@dataclass
class MonitorConfig:
    poll_period_ms: int = 1000
    actions: list = field(default_factory=list)
    relation_mode: str = "cached"
    cfg: SpatialConfig | None = None
    dataset: str = ""

    def __post_init__(self) -> None:
        if self.poll_period_ms <= 0:
            raise ValueError("poll period must be > 0")


class Monitor:
    """Incremental evaluator over one fact store."""

    def __init__(self, store: FactStore, config: MonitorConfig | None = None):
        self.store = store
        self.config = config or MonitorConfig()
        self._lock = threading.Lock()
        self._templates: dict[str, EventTemplate] = {}
        self._cursors: dict[str, int | None] = {}
        self._delivered: set[tuple] = set()
        self._delivered_by_action: set[tuple] = set()
        self._pending: dict[tuple, DetectionRecord] = {}
        self.records: list[DetectionRecord] = []
        self.last_stats: dict[str, EvaluationStats] = {}
        self.errors: list[str] = []

    def add_template(self, template: EventTemplate) -> None:
        with self._lock:
            self._templates[template.id] = template
            self._cursors.setdefault(template.id, None)

    def remove_template(self, event_id: str) -> None:
        with self._lock:
            self._templates.pop(event_id, None)
            self._cursors.pop(event_id, None)

    def template_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._templates)

    def tick(self) -> list[DetectionRecord]:
        """Run one monitor cycle; returns the records newly created this tick."""
        with self._lock:
            templates = dict(self._templates)
            cursors = dict(self._cursors)
        high_water = self.store.high_water
        new_records: list[DetectionRecord] = []
        for event_id, template in templates.items():
            cursor = cursors.get(event_id)
            stats = EvaluationStats()
            self.last_stats[event_id] = stats
            for detection in evaluate_event(
                self.store,
                template,
                mode="all",
                cursor=cursor,
                relation_mode=self.config.relation_mode,
                cfg=self.config.cfg,
                stats=stats,
            ):
                key = detection.idempotency_key()
                if key in self._delivered or key in self._pending:
                    continue
                record = self._record_for(detection)
                self.records.append(record)
                new_records.append(record)
                self._pending[key] = record
            with self._lock:
                if event_id in self._cursors:
                    self._cursors[event_id] = high_water
        self._deliver_pending()
        return new_records

    def _record_for(self, detection: Detection) -> DetectionRecord:
        return DetectionRecord(
            timestamp=time.time(),
            dataset=self.config.dataset,
            event_id=detection.event_id,
            bindings=detection.bindings,
            steps={k: (v.begin, v.end) for k, v in detection.step_results.items()},
        )

    def _deliver_pending(self) -> None:
        for key, record in list(self._pending.items()):
            failed = False
            for idx, action in enumerate(self.config.actions):
                if (key, idx) in self._delivered_by_action:
                    continue  # already delivered to this action; never duplicate
                try:
                    action.deliver(record)
                    self._delivered_by_action.add((key, idx))
                except Exception as exc:  # noqa: BLE001 - actions must not stop the loop
                    failed = True
                    self.errors.append(f"{type(action).__name__}: {exc}")
            if not failed:
                self._delivered.add(key)
                del self._pending[key]

    def run(self, stop: threading.Event | None = None) -> None:
        """Poll loop; runs until `stop` is set."""
        stop = stop or threading.Event()
        period = self.config.poll_period_ms / 1000.0
        while not stop.is_set():
            self.tick()
            stop.wait(period)
