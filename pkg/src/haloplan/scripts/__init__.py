"""Home for scripts of the haloplan project."""
