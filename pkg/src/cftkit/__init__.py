"""cftkit: exact modular data, ADE modular invariants, and coset checks
for affine sl2 WZW models and Virasoro minimal models."""

__version__ = "0.1.0"
