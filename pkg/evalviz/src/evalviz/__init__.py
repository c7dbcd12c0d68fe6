"""evalviz: logical-error-rate evaluation and figure rendering for compiled
QCCD circuits (consumes *.stim and metrics.csv produced by qccdc)."""

__version__ = "0.1.0"
