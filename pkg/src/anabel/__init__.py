"""anabel: exact combinatorial models for skeleta of p-adic curves.

Subpackages cover integer linear algebra, fine saturated monoids,
polysimplicial sets, branch graphs with currents, p-adic splitting
arithmetic, graphs of finite groups, and cospecialization maps, together
with a document-based CLI.
"""

__version__ = "0.1.0"
