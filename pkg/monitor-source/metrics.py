from prometheus_client import Gauge, Counter, Histogram
import logging
import time

logger = logging.getLogger(__name__)

# Decomposition metrics
decompositions_total = Counter(
    'mpld_decompositions_total',
    'Total number of layout decompositions',
    ['engine', 'status']
)

decomposition_duration = Histogram(
    'mpld_decomposition_duration_seconds',
    'Wall-clock time of simplification plus solving',
    ['engine'],
    buckets=(0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0)
)

components_solved_total = Counter(
    'mpld_components_solved_total',
    'Total number of components solved',
    ['engine']
)

search_nodes_total = Counter(
    'mpld_search_nodes_total',
    'Search nodes expanded across all components',
    ['engine']
)

budget_exhausted_total = Counter(
    'mpld_budget_exhausted_total',
    'Decompositions that stopped on the node budget'
)

last_conflicts = Gauge(
    'mpld_last_conflicts',
    'Conflict count of the most recent decomposition'
)

last_stitches = Gauge(
    'mpld_last_stitches',
    'Stitch count of the most recent decomposition'
)

verifications_total = Counter(
    'mpld_verifications_total',
    'Colored layouts checked through the verify endpoint',
    ['result']
)

# System metrics
app_uptime_seconds = Gauge(
    'app_uptime_seconds',
    'Application uptime in seconds'
)

memory_usage_bytes = Gauge(
    'memory_usage_bytes',
    'Memory usage in bytes'
)

cpu_usage_percent = Gauge(
    'cpu_usage_percent',
    'Process CPU usage in percent'
)

available_cpus = Gauge(
    'available_cpus',
    'Logical CPUs available to parallel decomposition'
)

# Error metrics
errors_total = Counter(
    'errors_total',
    'Total number of errors',
    ['type', 'severity']
)


def record_decomposition(engine: str, status: str, duration: float, components: int = 0,
                         nodes: int = 0, conflicts: int = 0, stitches: int = 0, proven: bool = True):
    """Record one decomposition request"""
    decompositions_total.labels(engine=engine, status=status).inc()
    if status != "success":
        return
    decomposition_duration.labels(engine=engine).observe(duration)
    components_solved_total.labels(engine=engine).inc(components)
    search_nodes_total.labels(engine=engine).inc(nodes)
    last_conflicts.set(conflicts)
    last_stitches.set(stitches)
    if not proven:
        budget_exhausted_total.inc()


def record_verification(ok: bool):
    verifications_total.labels(result="ok" if ok else "violations").inc()


def record_error(error_type: str, severity: str = "error"):
    """Record error metrics"""
    errors_total.labels(type=error_type, severity=severity).inc()


def update_app_uptime(start_time: float):
    """Update application uptime"""
    uptime = time.time() - start_time
    app_uptime_seconds.set(uptime)


# Initialize some metrics with default values so they appear immediately
def initialize_metrics():
    last_conflicts.set(0)
    last_stitches.set(0)
    memory_usage_bytes.set(0)
    cpu_usage_percent.set(0)
    available_cpus.set(0)
    app_uptime_seconds.set(0)
    logger.debug("Custom metrics initialized with default values")


initialize_metrics()
