"""Makes ``src`` a package so mypy can resolve ``haloplan`` from the checkout."""
