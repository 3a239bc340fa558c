"""Finite categories, families of arrows and fibred functors.

Checks whether a functor between finite categories is a (pre)fibration
or a (pre)topological functor, by brute force over families of arrows,
and builds the Grothendieck total category of a poset-valued
pseudofunctor.
"""
__version__ = "0.1.0"
