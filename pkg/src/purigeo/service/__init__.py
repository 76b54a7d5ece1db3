from .schemas import JobSpec, Report
from . import handlers

__all__ = ["JobSpec", "Report", "handlers"]
