"""Time stepping of the reduced system."""

from osdyn.integrate.solver import flow_array, flow_map, integrate

__all__ = ["flow_array", "flow_map", "integrate"]
