"""Certificate-producing verification of a fine Selmer cofiniteness criterion.

Subpackages build up from exact arithmetic (arith, quadfield), through curves
over finite fields and over Q/K (ellfp, ellq), mod-p Galois image sieves
(galrep), the analytic Heegner point construction (modparam), formal group
logarithms (formal), to the orchestrating verifier and CLI.
"""

__version__ = "0.1.0"
