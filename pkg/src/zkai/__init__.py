"""Verifiable AI performance claims: zk proofs, a simulated oracle network and ledger."""

__version__ = "0.1.0"
