"""Project state: content-addressed model snapshots, pending edits, and a
serialized background job queue."""
from __future__ import annotations

import queue
import threading
import uuid
from dataclasses import dataclass
from typing import Callable, Optional

from ..anatomy import BodyModel, ModelError
from ..rom import PoseDataset, RomEdit
from .io import model_hash

JOB_KINDS = ("estimate", "retarget", "grid", "curves")
_TERMINAL = ("done", "failed")


class JobStateError(RuntimeError):
    pass


@dataclass
class JobRecord:
    id: str
    kind: str
    status: str = "queued"           # queued | running | done | failed
    progress: float = 0.0
    message: str = ""
    result: Optional[dict] = None
    error: Optional[str] = None

    def update(self, status: str | None = None, progress: float | None = None,
               message: str | None = None, result: dict | None = None,
               error: str | None = None) -> None:
        if self.status in _TERMINAL:
            raise JobStateError(f"job {self.id} already {self.status}")
        if progress is not None:
            if progress < self.progress - 1e-12:
                raise JobStateError("job progress must be monotone")
            self.progress = min(1.0, progress)
        if message is not None:
            self.message = message
        if result is not None:
            self.result = result
        if error is not None:
            self.error = error
        if status is not None:
            self.status = status

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "status": self.status,
                "progress": self.progress, "message": self.message,
                "result": self.result, "error": self.error}


class ProjectStore:
    """One open project: reference model, current model, snapshots by
    hash, pending ROM edits, dataset source, reports. Reads are safe
    concurrently; mutations hold the project lock and run through the
    single job worker when long."""

    def __init__(self, reference: BodyModel, dataset: PoseDataset | None = None,
                 keyposes: list | None = None):
        self.lock = threading.RLock()
        self.models: dict[str, BodyModel] = {}
        self.reference_hash = self._store(reference)
        self.current_hash = self.reference_hash
        self.dataset = dataset
        self.keyposes = keyposes if keyposes is not None else []
        self.edits = RomEdit.identity()
        self.params_doc: dict = {}
        self.reports: dict[str, dict] = {}
        self.jobs: dict[str, JobRecord] = {}
        self._queue: "queue.Queue[tuple[JobRecord, Callable]]" = queue.Queue()
        self._worker: threading.Thread | None = None

    # -- snapshots ---------------------------------------------------------

    def _store(self, model: BodyModel) -> str:
        h = model_hash(model)
        self.models[h] = model
        return h

    def commit(self, model: BodyModel) -> str:
        with self.lock:
            self.current_hash = self._store(model)
            return self.current_hash

    @property
    def reference(self) -> BodyModel:
        return self.models[self.reference_hash]

    @property
    def current(self) -> BodyModel:
        return self.models[self.current_hash]

    def model(self, h: str) -> BodyModel:
        try:
            return self.models[h]
        except KeyError:
            raise ModelError(f"unknown model hash {h!r}") from None

    def check_base(self, base_hash: str | None) -> None:
        """Optimistic concurrency: raise on a stale base hash."""
        if base_hash is not None and base_hash != self.current_hash:
            raise StaleBaseError(base_hash, self.current_hash)

    # -- jobs ---------------------------------------------------------------

    def submit_job(self, kind: str, work: Callable[[JobRecord], dict]) -> JobRecord:
        if kind not in JOB_KINDS:
            raise ModelError(f"unknown job kind {kind!r}")
        record = JobRecord(id=uuid.uuid4().hex[:12], kind=kind)
        with self.lock:
            self.jobs[record.id] = record
            self._queue.put((record, work))
            if self._worker is None or not self._worker.is_alive():
                self._worker = threading.Thread(target=self._run_jobs, daemon=True)
                self._worker.start()
        return record

    def _run_jobs(self) -> None:
        while True:
            try:
                record, work = self._queue.get(timeout=0.5)
            except queue.Empty:
                return
            with self.lock:
                record.update(status="running", message="started")
            try:
                result = work(record)
                with self.lock:
                    record.update(status="done", progress=1.0, result=result,
                                  message="finished")
            except Exception as exc:  # report, never kill the worker
                with self.lock:
                    record.update(status="failed", error=str(exc))

    def job(self, job_id: str) -> JobRecord:
        try:
            return self.jobs[job_id]
        except KeyError:
            raise ModelError(f"unknown job id {job_id!r}") from None

    def wait_all(self, timeout: float = 300.0) -> None:
        """Test helper: block until the queue drains."""
        import time
        deadline = time.time() + timeout
        while time.time() < deadline:
            with self.lock:
                pending = [j for j in self.jobs.values()
                           if j.status in ("queued", "running")]
            if not pending:
                return
            time.sleep(0.02)
        raise TimeoutError("jobs did not finish in time")


class StaleBaseError(ModelError):
    def __init__(self, base: str, current: str):
        super().__init__(
            f"base hash {base} does not match current model {current}")
        self.base = base
        self.current = current
