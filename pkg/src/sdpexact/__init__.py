"""QCQP modelling, desk-scale SDP relaxations, and exactness certification."""

__version__ = "0.1.0"
