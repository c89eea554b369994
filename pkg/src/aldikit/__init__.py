"""aldikit: build, score, and evaluate Arabic level-of-dialectness data."""

__version__ = "0.1.0"

FORMAT_VERSIONS = {
    "annotation-rows": "v1",
    "dataset": "v1",
    "lexicon": "v1",
    "manifest": "v1",
}
