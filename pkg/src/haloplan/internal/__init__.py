"""Internal haloplan stuff."""
