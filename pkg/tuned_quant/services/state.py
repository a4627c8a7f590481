from collections import OrderedDict

from loguru import logger

from tuned_quant.models.check import SuiteReport

suite_store: OrderedDict[str, SuiteReport] = OrderedDict()


def remember(report: SuiteReport, limit: int) -> None:
    """Keep the newest ``limit`` suite snapshots for CSV export."""
    suite_store[report.run_id] = report
    suite_store.move_to_end(report.run_id)
    while len(suite_store) > limit:
        evicted, _ = suite_store.popitem(last=False)
        logger.debug("Evicted suite snapshot run_id={}", evicted)
