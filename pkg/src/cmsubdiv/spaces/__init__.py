from .euclidean import EuclideanSpace, euclid_average, euclid_distance
from .hermite import (HermitePair, HermiteProductSpace, HermiteSpace, alpha, hermite_average,
                      hermite_distance, product_average)
from .sets import (FiniteCompactSet, MetricPairSet, SetSpace, hausdorff_distance,
                   set_metric_average, set_metric_pairs)
from .sphere import SphereSpace, sphere_average, sphere_distance, unit
from .wasserstein import (DiscreteMeasure1D, MonotoneCoupling, WassersteinSpace,
                          quantile_coupling, wasserstein_average, wasserstein_distance)

SPACES = {
    "euclidean": EuclideanSpace,
    "sphere": SphereSpace,
    "hermite": HermiteSpace,
    "hermite-product": HermiteProductSpace,
    "sets": SetSpace,
    "wasserstein": WassersteinSpace,
}


def make_space(space_id: str, **params):
    from ..errors import DomainError

    try:
        cls = SPACES[space_id]
    except KeyError:
        raise DomainError(f"unknown space id {space_id!r}", space=space_id) from None
    return cls(**params)
