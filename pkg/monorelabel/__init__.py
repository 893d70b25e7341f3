"""L0 isotonic regression and monotonic relabeling."""
