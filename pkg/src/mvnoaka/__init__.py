"""Anonymous MVNO authentication, handover and revocation.

Subpackages:

* ``primitives``: signatures, PKE, Pedersen commitments, chameleon hash, sanitizable signatures
* ``zkmembership``: CRS, identity tags, authorized lists and one-out-of-many membership proofs
* ``protocol``: entity state machines for registration, AKA, handover and revocation
* ``wire``: message encoding and 5G container framing
* ``harness``: simulated network, Dolev-Yao adversary, attacks, experiments, bench and CLI
"""

__version__ = "0.1.0"
