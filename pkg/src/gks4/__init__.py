"""Two-stage fourth-order gas-kinetic scheme for 3D Euler and Navier-Stokes flows."""

__version__ = "0.1.0"
