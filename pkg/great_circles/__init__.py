"""Great circle fibrations of the 3-sphere: construction, curvature and volume checks."""
