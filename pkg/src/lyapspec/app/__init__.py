"""Domain layer: maps, exponential sums, spectrum, characteristic, inflections, surgery."""
