"""
Seeded builders for randomized inputs: polynomial perturbations of the flat
metric and random polynomial forms.
"""
import random
from fractions import Fraction
from itertools import combinations

from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tractor import form_from_components
from g2conformal.scalars.poly import PolyQ, monomials_up_to
from g2conformal.scalars.ratfn import RatFn

FLAT_ENTRIES = {(0, 3): 1, (1, 4): 1, (2, 2): -1}


def random_polynomial(rng: random.Random, degree: int = 2, variables: int = 3, terms: int = 3) -> RatFn:
    """A polynomial in x1..x_variables without constant term."""
    exponents = [e for e in monomials_up_to(degree) if sum(e) and not any(e[variables:])]
    chosen = rng.sample(exponents, terms)
    return RatFn.coerce(PolyQ({e: Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 3)) for e in chosen}))


def perturbed_metric(seed: int) -> MetricField:
    """g = flat + F dx1^2 + G dx2^2, with det g = -1 for every F, G."""
    rng = random.Random(seed)
    entries = dict(FLAT_ENTRIES)
    entries[(0, 0)] = random_polynomial(rng)
    entries[(1, 1)] = random_polynomial(rng)
    return MetricField.from_upper_entries(entries)


def random_form(seed: int, degree: int, weight: int = 0, polynomial_degree: int = 1):
    rng = random.Random(seed)
    components = {}
    for index in combinations(range(5), degree):
        if rng.random() < 0.5:
            components[index] = random_polynomial(rng, polynomial_degree, 5, 2)
    if not components:
        components[tuple(range(degree))] = random_polynomial(rng, polynomial_degree, 5, 2)
    return form_from_components(degree, components, weight)
