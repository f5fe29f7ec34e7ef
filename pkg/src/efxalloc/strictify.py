"""Lift weak valuations to strict ones without flipping any strict preference.

The strict order compares (value, size, mask) lexicographically.  Larger
bundles win value ties, so every monotonicity class a valuation had in the
weak sense it keeps in the strict sense; the mask settles the rest.  Any
allocation that is EFX under the strictified profile is EFX under the
original one.
"""

from .model import Profile, StrictifiedValuation, Valuation


def strictify(v: Valuation) -> StrictifiedValuation:
    if isinstance(v, StrictifiedValuation):
        return v
    return StrictifiedValuation(v)


def strictify_profile(profile: Profile) -> Profile:
    return Profile(tuple(strictify(v) for v in profile))


def is_strictified(profile: Profile) -> bool:
    return all(isinstance(v, StrictifiedValuation) for v in profile)
