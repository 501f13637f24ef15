"""Digit-window recursive sequences in base q.

Submodules:

* :mod:`digitseq.words` -- words over {0, ..., q-1} and their enumeration
* :mod:`digitseq.sequences` -- sequence definitions, evaluators, builtin families
* :mod:`digitseq.genealogy` -- transfer matrices, norms, the K invariant, Fourier sums
* :mod:`digitseq.propagation` -- exceptional sets of the truncation identity
* :mod:`digitseq.numtheory` -- sieve tables and prime statistics
* :mod:`digitseq.cli` -- the ``digitseq`` command

The package namespace stays free of eager imports so that ``digitseq --threads``
can configure numerical libraries before they load.
"""

__version__ = "0.1.0"
