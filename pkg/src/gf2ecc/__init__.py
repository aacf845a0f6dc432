"""Binary-field elliptic-curve arithmetic with a hybrid Karatsuba multiplier.

Modules:
    gf2m_core   field arithmetic over GF(2^m)
    ecpm        Montgomery-ladder scalar multiplication, curve files
    cost_model  gate-count / delay model for the multiplier families
    sched_sim   cycle-level simulation of the ladder datapath
    cli         command-line front end
"""

__version__ = "0.1.0"
