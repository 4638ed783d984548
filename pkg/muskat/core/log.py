import logging

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """Install one stream handler on the package logger"""
    logger = logging.getLogger("muskat")
    logger.setLevel(level.upper())
    if not any(getattr(h, "_muskat", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._muskat = True
        logger.addHandler(handler)
