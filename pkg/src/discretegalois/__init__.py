"""Non-integrability of rational maps through difference Galois groups of variational equations."""

__version__ = "0.1.0"
