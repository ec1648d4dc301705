"""Short-distance correlators of the IRF six-vertex model and its three-spin chain."""
