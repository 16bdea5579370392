"""Concurrency — ordered worker pool for simulation runs and CV grid points."""

from walsnb.concurrency.pool import WorkerPool

__all__ = ["WorkerPool"]
