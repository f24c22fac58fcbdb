"""Knowledge-graph construction, retrieval, and narrative analytics for transcripts."""

__version__ = "0.1.0"
