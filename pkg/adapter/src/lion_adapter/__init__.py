"""Reference transcriber adapter for the lion-transcribe wire protocol."""

from .adapter import (
    AdapterConfig,
    AdapterError,
    build_backend,
    echo_transcribe,
    run_loop,
    serve,
)

__version__ = "0.1.0"
