from .uncertainty import UncertaintySpec, input_cumulants
from .gram_charlier import (
    CumulantSet,
    GramCharlierDensity,
    PowerDistribution,
    aggregate_cdf,
    gram_charlier_pdf,
    hermite_coefficients,
)
from .propagation import (
    ClusterTerms,
    EndpointDistribution,
    cluster_terms,
    deviation_cumulants,
    duty_sensitivities,
    endpoint_distributions,
    interval_probabilities,
    mean_aggregate_power,
    perturbed_quantities,
    power_distribution,
)
