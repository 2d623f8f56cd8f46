# circuit package
from circuit.circuit_model import CircuitSpec, build_two_cpl, build_general, build_problem

__all__ = ["CircuitSpec", "build_two_cpl", "build_general", "build_problem"]
