import sys

import simplejson


class QbkLogger:
    """
    Wrapper for logging to handle either an injected log object or plain structured output.
    """

    def __init__(self, logger=None, echo=False):
        self.logger = logger
        self.has_sink = hasattr(logger, "write_log")
        self.echo = echo

    def write_log(self, code: str, exc_info, data: dict = None):
        if self.has_sink:
            self.logger.write_log(code, exc_info, data)
        elif self.echo:
            record = {"code": code, "exc_info": str(exc_info) if exc_info else None, "data": data}
            print(simplejson.dumps(record, default=str), file=sys.stderr)
