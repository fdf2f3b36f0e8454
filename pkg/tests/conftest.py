"""Suite-wide configuration: a bounded hypothesis profile.

Eigendecompositions dominate per-example cost, so the profile trades example
count for a deadline-free run; the acceptance module drives its own larger
seeded corpora.
"""

from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=40)
settings.load_profile("suite")
