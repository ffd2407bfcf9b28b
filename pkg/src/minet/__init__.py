"""Desk-scale multi-identifier network prototype.

Subpackages cover the identifier space, the hash-plus-prefix-tree
forwarding table, the CCN-style multi-identifier router, the
Proof-of-Vote consortium chain, the on/off-chain data split, IP/CCN
interworking gateways, partition-tolerance analysis, and a deterministic
discrete-event simulator tying them together.  A FastAPI service wraps
the package for long-running worlds; ``minet`` is the thin CLI client.
"""

__version__ = "0.1.0"
