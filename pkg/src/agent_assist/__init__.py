"""Customer-support agent assist toolkit.

Pipeline: domain gate -> intent identification -> two-stage context
retrieval (dense retriever + cross-encoder re-ranker) -> grounded response
generation, with training loops, an evaluation harness, a human feedback
loop, and a REST service for the agent console.
"""

__version__ = "0.1.0"
